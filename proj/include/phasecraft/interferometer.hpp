// interferometer.hpp
// Measurement-level phase sensitivity in a Mach-Zehnder interferometer with a
// loss beam splitter of transmittance T in each arm: parity on one output
// port, and full photon counting on both ports.
//
// All closed forms depend on the component only through p_n = |<n|phi>|^2.

#pragma once

#include "phasecraft/fock.hpp"
#include "phasecraft/metrology.hpp"
#include "phasecraft/parallel.hpp"
#include "phasecraft/probes.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace phasecraft {

enum class Measurement { kParity, kCounting };

inline const char* to_string(Measurement m) { return m == Measurement::kParity ? "parity" : "counting"; }

struct MeasurementConfig {
  double transmittance = 1.0;
  double phi = 0.0;
  PhaseGenerator generator = PhaseGenerator::kTwoArmSymmetric;

  void validate() const {
    if (!(transmittance >= 0.0 && transmittance <= 1.0)) throw Error("transmittance outside [0, 1]");
  }
};

/// Cell-centred phase grid: points start + (i + 1/2)(stop - start)/points, so
/// the endpoints sit half a step inside [start, stop].
struct PhiGrid {
  double start = 0.0;
  double stop = 2.0 * std::numbers::pi;
  int points = 1000;

  void validate() const {
    if (points < 2) throw Error("phase grid needs at least 2 points");
    if (!(stop > start)) throw Error("phase grid needs stop > start");
  }

  std::vector<double> values() const {
    validate();
    std::vector<double> out(static_cast<std::size_t>(points));
    const double step = (stop - start) / points;
    for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = start + (i + 0.5) * step;
    return out;
  }

  /// True when the grid covers one full 2 pi period.
  bool periodic() const { return std::abs((stop - start) - 2.0 * std::numbers::pi) < 1e-12; }
};

struct SensitivityCurve {
  std::vector<double> phi;
  std::vector<double> sensitivity;  // radians^2, may be +inf
  std::string label;
  double snl = 0.0;
  bool periodic = false;
};

// ---------------------------------------------------------------------------
// Parity

namespace detail {

struct ParityTerms {
  double mean = 0.0;           // <mu>_T
  double one_minus = 0.0;      // 1 - <mu>_T, without cancellation
  double derivative = 0.0;     // d<mu>/dphi
  double second_derivative = 0.0;
};

inline ParityTerms parity_terms(const PathSymmetricProbe& probe, double phi, double transmittance) {
  if (!(transmittance >= 0.0 && transmittance <= 1.0)) throw Error("transmittance outside [0, 1]");
  const double T = transmittance;
  const double R = 1.0 - T;
  const double denom = 1.0 + probe.p0();
  ParityTerms out;
  double mu = 0.0;
  double loss_gap = 0.0;  // sum_{n>=1} p_n (1 - R^n - T^n), zero for T in {0, 1}
  double fringe = 0.0;    // sum_n p_n T^n 2 sin^2(n phi / 2)
  for (int n = 0; n <= probe.n_max(); ++n) {
    const double p = probe.component().probability(n);
    if (p == 0.0) continue;
    const double Rn = std::pow(R, n);
    const double Tn = std::pow(T, n);
    const double s = std::sin(0.5 * n * phi);
    mu += p * (Rn + Tn * std::cos(n * phi));
    if (n >= 1) loss_gap += p * (1.0 - Rn - Tn);
    fringe += p * Tn * 2.0 * s * s;
    out.derivative -= p * Tn * n * std::sin(n * phi);
    out.second_derivative -= p * Tn * n * n * std::cos(n * phi);
  }
  out.mean = mu / denom;
  // sum_n p_n = 1, so 1 - <mu> = [loss_gap + fringe] / (1 + p0) with no cancellation.
  out.one_minus = (loss_gap + fringe) / denom;
  out.derivative /= denom;
  out.second_derivative /= denom;
  return out;
}

}  // namespace detail

/// <mu>_T = [sum_n p_n (R^n + T^n cos n phi)] / (1 + p0), R = 1 - T.
inline double parity_expectation(const PathSymmetricProbe& probe, double phi, double transmittance) {
  return detail::parity_terms(probe, phi, transmittance).mean;
}

/// Lossless parity: [p0 + sum_n p_n cos n phi] / (1 + p0).
inline double parity_expectation_lossless(const PathSymmetricProbe& probe, double phi) {
  double s = probe.p0();
  for (int n = 0; n <= probe.n_max(); ++n) s += probe.component().probability(n) * std::cos(n * phi);
  return s / (1.0 + probe.p0());
}

/// d<mu>_T/dphi = -[sum_n p_n T^n n sin n phi] / (1 + p0).
inline double parity_derivative(const PathSymmetricProbe& probe, double phi, double transmittance) {
  return detail::parity_terms(probe, phi, transmittance).derivative;
}

/// (1 - <mu>^2) / (d<mu>/dphi)^2. Returns +inf where the slope vanishes but the
/// numerator does not; where both vanish the second-order limit
/// -(1 + <mu>) / (2 d^2<mu>/dphi^2) is used.
inline double parity_sensitivity(const PathSymmetricProbe& probe, double phi, double transmittance) {
  const auto t = detail::parity_terms(probe, phi, transmittance);
  constexpr double kRoundoff = 64.0 * std::numeric_limits<double>::epsilon();
  const double numerator = t.one_minus * (1.0 + t.mean);
  if (std::abs(t.derivative) >= 1e-30) return numerator / (t.derivative * t.derivative);
  if (numerator > kRoundoff) return std::numeric_limits<double>::infinity();
  if (t.second_derivative < 0.0) return -(1.0 + t.mean) / (2.0 * t.second_derivative);
  return std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Photon counting

/// Probability table over output counts (n_a, n_b) with n_a + n_b <= n_max.
class OutcomePmf {
 public:
  OutcomePmf() = default;
  explicit OutcomePmf(int n_max)
      : n_max_(n_max), probs_(static_cast<std::size_t>(n_max + 1) * (n_max + 2) / 2, 0.0) {}

  int n_max() const { return n_max_; }
  /// 1 - sum of all entries.
  double deficit() const { return deficit_; }

  double operator()(int na, int nb) const {
    const int n = na + nb;
    if (na < 0 || nb < 0 || n > n_max_) return 0.0;
    return probs_[index(n, na)];
  }
  double& at(int na, int nb) { return probs_[index(na + nb, na)]; }

  double total() const {
    double s = 0.0;
    for (double p : probs_) s += p;
    return s;
  }

  /// Clamps round-off negatives (>= -1e-14) to zero and records the deficit.
  void finalize() {
    for (auto& p : probs_) {
      if (p < -1e-14) throw Error("negative outcome probability");
      p = std::max(p, 0.0);
    }
    deficit_ = 1.0 - total();
  }

 private:
  static std::size_t index(int n, int na) { return static_cast<std::size_t>(n) * (n + 1) / 2 + na; }

  int n_max_ = 0;
  std::vector<double> probs_;
  double deficit_ = 0.0;
};

namespace detail {

/// S_n = sum_{k>=1} p_{n+k} C(n+k, k) R^k, the weight that reaches total count
/// n only after losing k photons.
inline std::vector<double> loss_background(const std::vector<double>& p, double R) {
  const int n_max = static_cast<int>(p.size()) - 1;
  std::vector<double> S(p.size(), 0.0);
  if (R <= 0.0) return S;
  const double log_r = std::log(R);
  for (int n = 0; n <= n_max; ++n) {
    double s = 0.0;
    for (int k = 1; n + k <= n_max; ++k) {
      const double pk = p[static_cast<std::size_t>(n + k)];
      if (pk == 0.0) continue;
      s += std::exp(std::log(pk) + log_binomial(n + k, k) + k * log_r);
    }
    S[static_cast<std::size_t>(n)] = s;
  }
  return S;
}

/// log of C(n, n_a) 2^-n T^n for every n_a, or -inf when T = 0 and n > 0.
inline void log_splitting(int n, double log_t, std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(n) + 1);
  for (int na = 0; na <= n; ++na)
    out[static_cast<std::size_t>(na)] = log_binomial(n, na) - n * std::numbers::ln2 + (n == 0 ? 0.0 : n * log_t);
}

}  // namespace detail

/// p(n_a, n_b | phi)_T = T^n C(n, n_a) 2^-n [p_n (1 + (-1)^{n_a} cos n phi) + S_n] / (1 + p0)
/// with n = n_a + n_b. At T = 1 the background S_n vanishes.
inline OutcomePmf photon_counting_pmf(const PathSymmetricProbe& probe, double phi, double transmittance) {
  if (!(transmittance >= 0.0 && transmittance <= 1.0)) throw Error("transmittance outside [0, 1]");
  const auto p = probe.weights();
  const int n_max = probe.n_max();
  const double denom = 1.0 + probe.p0();
  const auto S = detail::loss_background(p, 1.0 - transmittance);
  const double log_t = transmittance > 0.0 ? std::log(transmittance) : -std::numeric_limits<double>::infinity();

  OutcomePmf pmf(n_max);
  std::vector<double> split;
  for (int n = 0; n <= n_max; ++n) {
    detail::log_splitting(n, log_t, split);
    const double pn = p[static_cast<std::size_t>(n)];
    const double c = std::cos(n * phi);
    for (int na = 0; na <= n; ++na) {
      const double sign = na % 2 == 0 ? 1.0 : -1.0;
      const double w = std::exp(split[static_cast<std::size_t>(na)]);
      pmf.at(na, n - na) = w * (pn * (1.0 + sign * c) + S[static_cast<std::size_t>(n)]) / denom;
    }
  }
  pmf.finalize();
  return pmf;
}

/// Lossless counting probabilities p_n 2^-n n!/(n_a! n_b!) [1 + (-1)^{n_a} cos n phi] / (1 + p0).
inline OutcomePmf photon_counting_pmf_lossless(const PathSymmetricProbe& probe, double phi) {
  const int n_max = probe.n_max();
  OutcomePmf pmf(n_max);
  for (int n = 0; n <= n_max; ++n) {
    const double pn = probe.component().probability(n);
    for (int na = 0; na <= n; ++na) {
      const double sign = na % 2 == 0 ? 1.0 : -1.0;
      pmf.at(na, n - na) = pn * std::exp(detail::log_binomial(n, na) - n * std::numbers::ln2) *
                           (1.0 + sign * std::cos(n * phi)) / (1.0 + probe.p0());
    }
  }
  pmf.finalize();
  return pmf;
}

/// Classical Fisher information sum (dp/dphi)^2 / p of the counting statistics.
///
/// Only the fringe term A (1 + s cos n phi) depends on phi, with
/// A = T^n C(n, n_a) 2^-n p_n / (1 + p0) and s = (-1)^{n_a}. Using
/// sin^2 = (1 - s cos)(1 + s cos) each outcome contributes
///   A n^2 (1 - s cos n phi) * A (1 + s cos n phi) / p,
/// which has no 0/0 where the fringe is dark; with no loss background
/// (B = 0) the last factor is exactly 1.
inline double classical_fi(const PathSymmetricProbe& probe, double phi, double transmittance) {
  if (!(transmittance >= 0.0 && transmittance <= 1.0)) throw Error("transmittance outside [0, 1]");
  const auto p = probe.weights();
  const int n_max = probe.n_max();
  const double denom = 1.0 + probe.p0();
  const auto S = detail::loss_background(p, 1.0 - transmittance);
  const double log_t = transmittance > 0.0 ? std::log(transmittance) : -std::numeric_limits<double>::infinity();

  double f = 0.0;
  std::vector<double> split;
  for (int n = 1; n <= n_max; ++n) {
    const double pn = p[static_cast<std::size_t>(n)];
    if (pn == 0.0) continue;
    detail::log_splitting(n, log_t, split);
    const double c = std::cos(n * phi);
    const double Sn = S[static_cast<std::size_t>(n)];
    for (int na = 0; na <= n; ++na) {
      const double sign = na % 2 == 0 ? 1.0 : -1.0;
      const double w = std::exp(split[static_cast<std::size_t>(na)]);
      if (w == 0.0) continue;
      const double fringe = pn * (1.0 + sign * c);
      const double total = fringe + Sn;
      const double visible = Sn == 0.0 ? 1.0 : (total > 0.0 ? fringe / total : 0.0);
      f += w * pn / denom * n * n * (1.0 - sign * c) * visible;
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Curves

inline double sensitivity(const PathSymmetricProbe& probe, Measurement m, double phi, double transmittance) {
  if (m == Measurement::kParity) return parity_sensitivity(probe, phi, transmittance);
  const double f = classical_fi(probe, phi, transmittance);
  return f > 0.0 ? 1.0 / f : std::numeric_limits<double>::infinity();
}

inline SensitivityCurve sensitivity_curve(const PathSymmetricProbe& probe, Measurement m, double transmittance,
                                          const PhiGrid& grid, std::string label, int jobs = 1) {
  SensitivityCurve curve;
  curve.phi = grid.values();
  curve.label = std::move(label);
  curve.snl = snl(probe.n_av());
  curve.periodic = grid.periodic();
  curve.sensitivity = parallel_map<double>(curve.phi.size(), jobs, [&](std::size_t i) {
    return sensitivity(probe, m, curve.phi[i], transmittance);
  });
  return curve;
}

/// Trapezoid measure of {phi : sensitivity(phi) < snl}. On a periodic grid the
/// wrap-around interval is included, so a curve below the SNL everywhere
/// scores the full period.
inline double snl_beating_range(const SensitivityCurve& curve) {
  const auto& x = curve.phi;
  const auto& y = curve.sensitivity;
  if (x.size() != y.size()) throw Error("curve arrays differ in length");
  if (x.size() < 2) return 0.0;
  auto below = [&](std::size_t i) { return y[i] < curve.snl ? 1.0 : 0.0; };
  double measure = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) measure += (x[i + 1] - x[i]) * 0.5 * (below(i) + below(i + 1));
  if (curve.periodic) {
    const double wrap = x.front() + 2.0 * std::numbers::pi - x.back();
    measure += wrap * 0.5 * (below(0) + below(x.size() - 1));
  }
  return measure;
}

}  // namespace phasecraft
