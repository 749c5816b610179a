#include "phaseless/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "phaseless/poly.hpp"

namespace phaseless {
namespace {

constexpr double kUnimodularBand = 1e-6;
constexpr double kMergeDistance = 1e-7;
constexpr double kDuplicateTol = 1e-6;

// Greedy nearest-first matching of `left` to `right`; returns (i, j, distance) triples.
template <class Dist>
std::vector<std::tuple<std::size_t, std::size_t, double>> greedy_match(std::size_t nl, std::size_t nr, Dist dist) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  cand.reserve(nl * nr);
  for (std::size_t i = 0; i < nl; ++i)
    for (std::size_t j = 0; j < nr; ++j) cand.emplace_back(dist(i, j), i, j);
  std::sort(cand.begin(), cand.end());
  std::vector<bool> used_l(nl, false), used_r(nr, false);
  std::vector<std::tuple<std::size_t, std::size_t, double>> out;
  for (const auto& [d, i, j] : cand) {
    if (used_l[i] || used_r[j]) continue;
    used_l[i] = used_r[j] = true;
    out.emplace_back(i, j, d);
  }
  return out;
}

// Single-linkage clustering of pair representatives into multiplicities.
std::vector<RootPair> merge_coincident(std::vector<RootPair> raw) {
  const std::size_t n = raw.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (raw[i].unimodular == raw[j].unimodular && std::abs(raw[i].root - raw[j].root) < kMergeDistance)
        parent[find(i)] = find(j);
  std::vector<RootPair> out;
  std::vector<std::size_t> slot(n, n);
  std::vector<cd> sum;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] == n) {
      slot[r] = out.size();
      out.push_back({cd{0.0, 0.0}, 0, raw[i].unimodular});
      sum.emplace_back(0.0, 0.0);
    }
    auto& p = out[slot[r]];
    p.multiplicity += raw[i].multiplicity;
    sum[slot[r]] += raw[i].root * double(raw[i].multiplicity);
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].root = sum[i] / double(out[i].multiplicity);
  return out;
}

Signal normalize_phase(CVec v) {
  for (const auto& c : v) {
    if (std::abs(c) > 0.0) {
      const cd rot = std::conj(c) / std::abs(c);
      for (auto& e : v) e *= rot;
      break;
    }
  }
  return Signal(std::move(v));
}

}  // namespace

AutocorrPoly AutocorrPoly::from_signal(const Signal& x) { return {autocorrelation(x), x.size()}; }

double AutocorrPoly::symmetry_defect() const {
  double worst = 0.0;
  const std::size_t d = coeffs.size();
  for (std::size_t i = 0; i < d; ++i) worst = std::max(worst, std::abs(coeffs[i] - std::conj(coeffs[d - 1 - i])));
  return worst;
}

std::size_t RootPairing::root_count() const {
  std::size_t s = 0;
  for (const auto& p : pairs) s += 2 * p.multiplicity;
  return s;
}

std::size_t RootPairing::off_circle_pairs() const {
  return static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(), [](const RootPair& p) { return !p.unimodular; }));
}

AutocorrPoly autocorr_from_measurements(const MeasurementSet& y) {
  if (y.model.kind != ModelKind::Classical)
    throw std::invalid_argument("autocorr_from_measurements: classical model required, got " + to_string(y.model.kind));
  const std::size_t n = y.model.n;
  const std::size_t nt = 2 * n - 1;
  if (y.model.ntilde != nt || y.model.k != nt)
    throw std::invalid_argument("autocorr_from_measurements: requires ntilde = K = 2N-1");
  CVec spec(y.y.begin(), y.y.end());
  const CVec a = ifft(spec);
  AutocorrPoly p;
  p.n = n;
  p.coeffs.resize(nt);
  // Lag l sits at index l mod (2N-1); shifting by N-1 aligns it with z^{l+N-1}.
  for (std::size_t i = 0; i < nt; ++i) p.coeffs[i] = a[(i + n) % nt];
  p.coeffs[n - 1] = p.coeffs[n - 1].real();
  return p;
}

RootPairing find_and_pair_roots(const AutocorrPoly& p, std::optional<double> tol) {
  RootPairing rp;
  rp.n = p.n;
  if (p.coeffs.size() != 2 * p.n - 1) throw std::invalid_argument("find_and_pair_roots: coefficient count != 2N-1");
  rp.leading = p.coeffs.back();
  if (p.n == 1) return rp;
  if (std::abs(p.coeffs.front()) == 0.0 || std::abs(p.coeffs.back()) == 0.0)
    throw std::invalid_argument("find_and_pair_roots: requires x[0] != 0 and x[N-1] != 0");

  const CVec roots = polynomial_roots(p.coeffs);
  double max_mod = 0.0;
  for (const auto& r : roots) max_mod = std::max(max_mod, std::abs(r));
  const double pair_tol = tol.value_or(1e-6 * max_mod);

  CVec on, inside, outside;
  for (const auto& r : roots) {
    const double m = std::abs(r);
    if (std::abs(m - 1.0) < kUnimodularBand) on.push_back(r);
    else if (m < 1.0) inside.push_back(r);
    else outside.push_back(r);
  }
  if (inside.size() != outside.size())
    throw PairingFailed("find_and_pair_roots: " + std::to_string(inside.size()) + " roots inside vs " +
                        std::to_string(outside.size()) + " outside the unit circle");
  if (on.size() % 2 != 0) throw PairingFailed("find_and_pair_roots: odd number of unimodular roots");

  std::vector<RootPair> raw;
  const auto off = greedy_match(inside.size(), outside.size(), [&](std::size_t i, std::size_t j) {
    return std::abs(outside[j] - 1.0 / std::conj(inside[i]));
  });
  for (const auto& [i, j, d] : off) {
    if (d > pair_tol)
      throw PairingFailed("find_and_pair_roots: reflected-pair distance " + std::to_string(d) + " exceeds tolerance");
    // Average the inside root with the reflection of its partner.
    raw.push_back({0.5 * (inside[i] + 1.0 / std::conj(outside[j])), 1, false});
  }

  // Unimodular zeros of A have even multiplicity: match them among themselves.
  std::vector<bool> used(on.size(), false);
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  for (std::size_t i = 0; i < on.size(); ++i)
    for (std::size_t j = i + 1; j < on.size(); ++j) cand.emplace_back(std::abs(on[i] - on[j]), i, j);
  std::sort(cand.begin(), cand.end());
  for (const auto& [d, i, j] : cand) {
    if (used[i] || used[j]) continue;
    used[i] = used[j] = true;
    if (d > std::max(pair_tol, 1e-3))
      throw PairingFailed("find_and_pair_roots: unimodular roots do not come in coincident pairs");
    const cd mid = 0.5 * (on[i] + on[j]);
    raw.push_back({mid / std::abs(mid), 1, true});
  }

  rp.pairs = merge_coincident(std::move(raw));
  std::stable_sort(rp.pairs.begin(), rp.pairs.end(), [](const RootPair& a, const RootPair& b) {
    if (a.unimodular != b.unimodular) return !a.unimodular;
    return std::arg(a.root) < std::arg(b.root);
  });
  return rp;
}

std::size_t count_nontrivial(const RootPairing& rp) {
  std::size_t prod = 1;
  for (const auto& p : rp.pairs)
    if (!p.unimodular) prod *= p.multiplicity + 1;
  return (prod + 1) / 2;
}

SolutionSet enumerate_solutions(const AutocorrPoly& p, std::optional<double> tol) {
  SolutionSet out;
  out.pairing = find_and_pair_roots(p, tol);
  const auto& rp = out.pairing;
  const double lead = std::abs(p.coeffs.back());

  if (p.n == 1) {
    out.members.push_back(Signal(CVec{std::sqrt(std::max(0.0, p.coeffs[0].real()))}));
    out.provenance.emplace_back();
    return out;
  }

  std::vector<const RootPair*> off;
  CVec fixed;
  for (const auto& pr : rp.pairs) {
    if (pr.unimodular) fixed.insert(fixed.end(), pr.multiplicity, pr.root);
    else off.push_back(&pr);
  }

  std::vector<std::size_t> choice(off.size(), 0);
  while (true) {
    CVec beta = fixed;
    for (std::size_t l = 0; l < off.size(); ++l) {
      beta.insert(beta.end(), choice[l], off[l]->root);
      beta.insert(beta.end(), off[l]->multiplicity - choice[l], off[l]->reflected());
    }
    CVec coeffs = poly_from_roots(beta);
    // Rescale so the candidate's a[N-1] = conj(x[0]) x[N-1] matches in modulus.
    const double scale = std::sqrt(lead / (std::abs(coeffs.front()) * std::abs(coeffs.back())));
    for (auto& c : coeffs) c *= scale;
    Signal cand = normalize_phase(std::move(coeffs));

    bool duplicate = false;
    for (const auto& m : out.members) {
      if (dist_up_to(m, cand, TrivialGroup::rotation_reflection()) < kDuplicateTol * m.norm()) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      out.members.push_back(std::move(cand));
      out.provenance.push_back(choice);
    }

    // Mixed-radix increment, last pair fastest.
    bool advanced = false;
    for (std::size_t l = off.size(); l-- > 0;) {
      if (++choice[l] <= off[l]->multiplicity) {
        advanced = true;
        break;
      }
      choice[l] = 0;
    }
    if (!advanced) break;
  }
  return out;
}

bool has_collision(const Signal& x) {
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != cd{0.0, 0.0}) support.push_back(i);
  std::set<std::size_t> diffs;
  for (std::size_t a = 0; a < support.size(); ++a)
    for (std::size_t b = a + 1; b < support.size(); ++b)
      if (!diffs.insert(support[b] - support[a]).second) return true;
  return false;
}

bool is_minimum_phase(const Signal& x) {
  if (x.is_2d()) throw std::invalid_argument("is_minimum_phase: 1D signal required");
  if (x[0] == cd{0.0, 0.0}) throw std::invalid_argument("is_minimum_phase: requires x[0] != 0");
  const std::size_t n = x.size();
  CVec q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = x[n - 1 - i];
  for (const auto& r : polynomial_roots(q))
    if (std::abs(r) >= 1.0 - 1e-9) return false;
  return true;
}

}  // namespace phaseless
