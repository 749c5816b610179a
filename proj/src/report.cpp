#include "phaseless/report.hpp"

#include <cstdio>

namespace phaseless {

std::string to_string(HaltReason r) {
  switch (r) {
    case HaltReason::Tolerance: return "tolerance";
    case HaltReason::Stagnation: return "stagnation";
    case HaltReason::MaxIterations: return "max_iterations";
    case HaltReason::LineSearchFailed: return "line_search_failed";
    case HaltReason::SmallGradient: return "small_gradient";
  }
  return "unknown";
}

std::string IterReport::to_csv() const {
  std::string out = "iteration,error\n";
  char buf[64];
  for (std::size_t i = 0; i < errors.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, errors[i]);
    out += buf;
  }
  return out;
}

}  // namespace phaseless
