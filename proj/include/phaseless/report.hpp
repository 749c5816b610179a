#pragma once

#include <string>
#include <vector>

namespace phaseless {

enum class HaltReason { Tolerance, Stagnation, MaxIterations, LineSearchFailed, SmallGradient };

std::string to_string(HaltReason r);

/// Per-iteration objective trace of an iterative solver.
struct IterReport {
  std::vector<double> errors;  // objective of the iterate entering each iteration
  std::size_t iterations = 0;
  HaltReason reason = HaltReason::MaxIterations;
  double final_error = 0.0;    // objective of the returned signal

  std::string to_csv() const;  // "iteration,error"
};

}  // namespace phaseless
