// study.hpp
// Optimal superposition order N for lossy photon counting, and the random
// component scatter study.

#pragma once

#include "phasecraft/fock.hpp"
#include "phasecraft/interferometer.hpp"
#include "phasecraft/parallel.hpp"
#include "phasecraft/probes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace phasecraft {

/// Phase at which photon-counting sensitivities are compared across N.
inline constexpr double kDefaultPhiEval = 1.0;

/// Relative tolerance within which two N count as equally good.
inline constexpr double kTieTolerance = 1e-9;

struct OptimizationResult {
  double t = 1.0;
  double n_av = 0.0;
  std::vector<int> best_n_set;
  double best_sensitivity = 0.0;
  std::vector<int> scanned_n;
  std::vector<double> scanned_sensitivity;
};

/// 1/F of sqrt(q)|1> + sqrt(1-q)|N> at two-mode energy n_av.
inline double qooq_inv_fi(int n, double n_av, double transmittance, double phi) {
  const auto probe = make_probe(solve_energy_constraint(OneNSpec{1.0, n}, n_av));
  const double f = classical_fi(probe, phi, transmittance);
  return f > 0.0 ? 1.0 / f : std::numeric_limits<double>::infinity();
}

/// 1/F of the number state |N> (NOON probe).
inline double noon_inv_fi(int n, double transmittance, double phi) {
  const double f = classical_fi(make_probe(NumberSpec{n}), phi, transmittance);
  return f > 0.0 ? 1.0 / f : std::numeric_limits<double>::infinity();
}

namespace detail {

/// Throws if a local minimum other than the global one comes within 10% of it;
/// a shallow secondary dip in the far tail is tolerated.
inline void check_unimodal(const std::vector<int>& ns, const std::vector<double>& s, double best) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool left = i == 0 || s[i] < s[i - 1] * (1.0 - kTieTolerance);
    const bool right = i + 1 == s.size() || s[i] < s[i + 1] * (1.0 - kTieTolerance);
    if (!left || !right) continue;
    if (s[i] <= best * (1.0 + kTieTolerance)) continue;
    if (s[i] < best * 1.1) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "sensitivity not unimodal in N: local minimum %.12g at N=%d vs global %.12g",
                    s[i], ns[i], best);
      throw Error(buf);
    }
  }
}

}  // namespace detail

/// Exhaustive scan of N over [n_lo, n_hi] intersected with [ceil(n_av) + 1, 200].
inline OptimizationResult optimize_qooq_n(double transmittance, double n_av, int n_lo, int n_hi,
                                          double phi_eval = kDefaultPhiEval, int jobs = 1) {
  if (!(transmittance > 0.0 && transmittance <= 1.0)) throw Error("transmittance outside (0, 1]");
  if (!(n_av > 0.0)) throw Error("infeasible");
  const int lo = std::max(n_lo, static_cast<int>(std::ceil(n_av)) + 1);
  const int hi = std::min(n_hi, 200);
  if (lo > hi) throw Error("infeasible");

  OptimizationResult res;
  res.t = transmittance;
  res.n_av = n_av;
  for (int n = lo; n <= hi; ++n) res.scanned_n.push_back(n);
  res.scanned_sensitivity = parallel_map<double>(res.scanned_n.size(), jobs, [&](std::size_t i) {
    return qooq_inv_fi(res.scanned_n[i], n_av, transmittance, phi_eval);
  });
  res.best_sensitivity = *std::min_element(res.scanned_sensitivity.begin(), res.scanned_sensitivity.end());
  for (std::size_t i = 0; i < res.scanned_n.size(); ++i)
    if (res.scanned_sensitivity[i] <= res.best_sensitivity * (1.0 + kTieTolerance))
      res.best_n_set.push_back(res.scanned_n[i]);
  if (transmittance < 1.0) detail::check_unimodal(res.scanned_n, res.scanned_sensitivity, res.best_sensitivity);
  return res;
}

// ---------------------------------------------------------------------------
// Random components sum_{n>=1} sqrt(p_n)|n>

struct SampleRecord {
  std::uint64_t id = 0;
  double n_av = 0.0;
  double inv_fi = 0.0;
  std::string digest;             // hex FNV-1a of the weight bytes
  std::vector<double> weights;    // p_1 .. p_K
};

namespace detail {

inline std::string fnv1a_hex(const std::vector<double>& values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(&v);
    for (std::size_t i = 0; i < sizeof v; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Flat Dirichlet weights of length k from an engine seeded by (seed, index).
inline std::vector<double> dirichlet_weights(std::uint64_t seed, std::uint64_t index, int k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 engine(seq);
  std::vector<double> w(static_cast<std::size_t>(k));
  double total = 0.0;
  for (auto& x : w) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;  // [0, 1)
    x = -std::log1p(-u);
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace detail

/// Draws `count` components with weights uniform on the simplex over
/// n = 1..n_support_max and records (n_av, 1/F) at (T, phi_eval). Record i
/// depends only on (seed, i), so the job count never changes the output.
inline std::vector<SampleRecord> sample_random_components(int count, int n_support_max, std::uint64_t seed,
                                                          double transmittance, double phi_eval = kDefaultPhiEval,
                                                          int jobs = 1) {
  if (count < 1) throw Error("sample count must be >= 1");
  if (n_support_max < 2) throw Error("support cutoff must be >= 2");
  if (!(transmittance >= 0.0 && transmittance <= 1.0)) throw Error("transmittance outside [0, 1]");
  return parallel_map<SampleRecord>(static_cast<std::size_t>(count), jobs, [&](std::size_t i) {
    SampleRecord rec;
    rec.id = i;
    rec.weights = detail::dirichlet_weights(seed, i, n_support_max);
    rec.digest = detail::fnv1a_hex(rec.weights);
    std::vector<cplx> amps(static_cast<std::size_t>(n_support_max) + 1, cplx{});
    for (int n = 1; n <= n_support_max; ++n)
      amps[static_cast<std::size_t>(n)] = std::sqrt(rec.weights[static_cast<std::size_t>(n - 1)]);
    const PathSymmetricProbe probe(FockVector(std::move(amps)));
    rec.n_av = probe.n_av();
    const double f = classical_fi(probe, phi_eval, transmittance);
    rec.inv_fi = f > 0.0 ? 1.0 / f : std::numeric_limits<double>::infinity();
    return rec;
  });
}

}  // namespace phasecraft
