// fock.hpp
// Truncated single-mode and two-mode Fock-space linear algebra.
//
// Single-mode states are amplitude vectors over |0>..|n_max> with an explicit
// upper bound on the probability weight left beyond the cutoff. Two-mode
// states are dense (n_max+1) x (n_max+1) amplitude matrices indexed (n_a, n_b).

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace phasecraft {

using cplx = std::complex<double>;

/// Error raised by every module; the message carries the contract-level reason
/// ("truncation insufficient", "infeasible energy", ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

inline double log_binomial(int n, int k) {
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

inline double binomial(int n, int k) { return std::exp(log_binomial(n, k)); }

}  // namespace detail

struct TruncationPolicy {
  double tail_tolerance = 1e-12;
  int n_max_cap = 512;

  void validate() const {
    if (!(tail_tolerance > 0.0 && tail_tolerance < 1.0))
      throw Error("tail tolerance must lie in (0, 1)");
    if (n_max_cap < 1) throw Error("n_max cap must be positive");
  }

  /// Default policy, with PHASECRAFT_TAIL_TOL overriding the tail tolerance.
  static TruncationPolicy from_environment() {
    TruncationPolicy policy;
    if (const char* env = std::getenv("PHASECRAFT_TAIL_TOL"); env != nullptr && *env != '\0') {
      char* end = nullptr;
      const double tol = std::strtod(env, &end);
      if (end == env || *end != '\0') throw Error("PHASECRAFT_TAIL_TOL is not a number");
      policy.tail_tolerance = tol;
    }
    policy.validate();
    return policy;
  }
};

/// Single-mode state on a truncated number basis.
class FockVector {
 public:
  FockVector() : amps_(1, cplx{0.0, 0.0}) {}

  explicit FockVector(std::vector<cplx> amps, double tail_bound = 0.0)
      : amps_(std::move(amps)), tail_bound_(tail_bound) {
    if (amps_.empty()) throw Error("degenerate truncation");
    if (!(tail_bound_ >= 0.0)) throw Error("tail bound must be non-negative");
  }

  static FockVector number(int n, int n_max) {
    if (n < 0 || n > n_max) throw Error("number state outside truncation");
    std::vector<cplx> amps(static_cast<std::size_t>(n_max) + 1, cplx{});
    amps[static_cast<std::size_t>(n)] = 1.0;
    return FockVector(std::move(amps));
  }

  static FockVector vacuum(int n_max = 0) { return number(0, n_max); }

  int n_max() const { return static_cast<int>(amps_.size()) - 1; }
  double tail_bound() const { return tail_bound_; }
  const std::vector<cplx>& amps() const { return amps_; }
  cplx operator[](int n) const { return amps_[static_cast<std::size_t>(n)]; }
  cplx at(int n) const { return n >= 0 && n <= n_max() ? (*this)[n] : cplx{}; }

  /// p_n = |amps[n]|^2.
  double probability(int n) const { return std::norm(at(n)); }

  std::vector<double> probabilities() const {
    std::vector<double> p(amps_.size());
    std::transform(amps_.begin(), amps_.end(), p.begin(), [](cplx a) { return std::norm(a); });
    return p;
  }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  /// Copy with unit norm on the truncated basis. The tail bound is kept.
  FockVector normalized() const {
    const double nrm = std::sqrt(squared_norm());
    if (!(nrm > 0.0)) throw Error("cannot normalize a zero state");
    std::vector<cplx> out(amps_);
    for (auto& a : out) a /= nrm;
    return FockVector(std::move(out), tail_bound_);
  }

  /// Copy padded (or cropped) to a new cutoff. Cropping folds the dropped
  /// weight into the tail bound.
  FockVector resized(int n_max) const {
    std::vector<cplx> out(static_cast<std::size_t>(n_max) + 1, cplx{});
    double dropped = 0.0;
    for (int n = 0; n <= this->n_max(); ++n) {
      if (n <= n_max)
        out[static_cast<std::size_t>(n)] = (*this)[n];
      else
        dropped += std::norm((*this)[n]);
    }
    return FockVector(std::move(out), tail_bound_ + dropped);
  }

  Eigen::VectorXcd to_eigen() const {
    return Eigen::Map<const Eigen::VectorXcd>(amps_.data(), static_cast<Eigen::Index>(amps_.size()));
  }

  static FockVector from_eigen(const Eigen::VectorXcd& v, double tail_bound = 0.0) {
    return FockVector(std::vector<cplx>(v.data(), v.data() + v.size()), tail_bound);
  }

 private:
  std::vector<cplx> amps_;
  double tail_bound_ = 0.0;
};

/// Two-mode pure state, amplitude matrix indexed (n_a, n_b).
class TwoModeState {
 public:
  TwoModeState() : amps_(Eigen::MatrixXcd::Zero(1, 1)) {}
  explicit TwoModeState(int n_max) : amps_(Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1)) {}
  explicit TwoModeState(Eigen::MatrixXcd amps) : amps_(std::move(amps)) {
    if (amps_.rows() != amps_.cols() || amps_.rows() == 0)
      throw Error("two-mode amplitude matrix must be square and non-empty");
  }

  /// |a>|b> on the larger of the two cutoffs.
  static TwoModeState product(const FockVector& a, const FockVector& b) {
    const int n_max = std::max(a.n_max(), b.n_max());
    const Eigen::VectorXcd va = a.resized(n_max).to_eigen();
    const Eigen::VectorXcd vb = b.resized(n_max).to_eigen();
    return TwoModeState(Eigen::MatrixXcd(va * vb.transpose()));
  }

  int n_max() const { return static_cast<int>(amps_.rows()) - 1; }
  const Eigen::MatrixXcd& amps() const { return amps_; }
  Eigen::MatrixXcd& amps() { return amps_; }
  cplx operator()(int na, int nb) const { return amps_(na, nb); }
  cplx& operator()(int na, int nb) { return amps_(na, nb); }

  double squared_norm() const { return amps_.squaredNorm(); }

  TwoModeState normalized() const {
    const double nrm = amps_.norm();
    if (!(nrm > 0.0)) throw Error("cannot normalize a zero state");
    return TwoModeState(Eigen::MatrixXcd(amps_ / nrm));
  }

  TwoModeState resized(int n_max) const {
    TwoModeState out(n_max);
    const int keep = std::min(n_max, this->n_max()) + 1;
    out.amps_.topLeftCorner(keep, keep) = amps_.topLeftCorner(keep, keep);
    return out;
  }

  /// Applies a single-mode operator (square matrix on the same cutoff) to mode a or b.
  TwoModeState apply_on_a(const Eigen::MatrixXcd& op) const {
    return TwoModeState(Eigen::MatrixXcd(op * amps_));
  }
  TwoModeState apply_on_b(const Eigen::MatrixXcd& op) const {
    return TwoModeState(Eigen::MatrixXcd(amps_ * op.transpose()));
  }

 private:
  Eigen::MatrixXcd amps_;
};

/// <a|b>, conjugating a.
inline cplx overlap(const FockVector& a, const FockVector& b) {
  const int n = std::min(a.n_max(), b.n_max());
  cplx s{};
  for (int k = 0; k <= n; ++k) s += std::conj(a[k]) * b[k];
  return s;
}

inline cplx overlap(const TwoModeState& a, const TwoModeState& b) {
  const int n = std::min(a.n_max(), b.n_max()) + 1;
  return (a.amps().topLeftCorner(n, n).conjugate().cwiseProduct(b.amps().topLeftCorner(n, n))).sum();
}

/// |<a|b>|^2 / (<a|a><b|b>).
inline double fidelity(const TwoModeState& a, const TwoModeState& b) {
  const double na = a.squared_norm();
  const double nb = b.squared_norm();
  if (!(na > 0.0) || !(nb > 0.0)) return 0.0;
  return std::min(1.0, std::norm(overlap(a, b)) / (na * nb));
}

inline double fidelity(const FockVector& a, const FockVector& b) {
  const double na = a.squared_norm();
  const double nb = b.squared_norm();
  if (!(na > 0.0) || !(nb > 0.0)) return 0.0;
  return std::min(1.0, std::norm(overlap(a, b)) / (na * nb));
}

// ---------------------------------------------------------------------------
// Ladder and number operators

/// a|psi>. The result is unnormalized; its top amplitude is unknown from the
/// truncation and set to zero.
inline FockVector lowering_apply(const FockVector& state) {
  if (state.n_max() < 1) throw Error("degenerate truncation");
  const int n_max = state.n_max();
  std::vector<cplx> out(static_cast<std::size_t>(n_max) + 1, cplx{});
  for (int n = 0; n < n_max; ++n) out[static_cast<std::size_t>(n)] = std::sqrt(n + 1.0) * state[n + 1];
  return FockVector(std::move(out), (n_max + 1.0) * state.tail_bound());
}

struct NumberMoments {
  double mean = 0.0;
  double variance = 0.0;
  /// Additive bound on the error of both moments from the truncated tail.
  double error_bound = 0.0;
};

inline NumberMoments number_moments(const FockVector& state) {
  double m1 = 0.0;
  double m2 = 0.0;
  for (int n = 0; n <= state.n_max(); ++n) {
    const double p = state.probability(n);
    m1 += n * p;
    m2 += static_cast<double>(n) * n * p;
  }
  const double nm = state.n_max();
  return {m1, m2 - m1 * m1, state.tail_bound() * nm * nm};
}

inline double mandel_q(const FockVector& state) {
  const auto mom = number_moments(state);
  if (!(mom.mean > 0.0)) throw Error("Mandel-Q undefined for zero energy");
  return std::max(mom.variance / mom.mean - 1.0, -1.0);
}

/// exp(i x n)|psi>.
inline FockVector phase_rotation(const FockVector& state, double x) {
  std::vector<cplx> out(state.amps());
  for (int n = 0; n <= state.n_max(); ++n) out[static_cast<std::size_t>(n)] *= std::polar(1.0, x * n);
  return FockVector(std::move(out), state.tail_bound());
}

inline Eigen::MatrixXcd phase_rotation_matrix(double x, int n_max) {
  Eigen::VectorXcd diag(n_max + 1);
  for (int n = 0; n <= n_max; ++n) diag(n) = std::polar(1.0, x * n);
  return diag.asDiagonal();
}

// ---------------------------------------------------------------------------
// Closed-form states and their truncation cutoffs

/// Chernoff bound on the Poisson(mean) tail P(X >= m) <= e^{-mean} (e mean / m)^m for m > mean.
inline double poisson_tail_bound(double mean, double m) {
  if (mean <= 0.0) return m <= 0.0 ? 1.0 : 0.0;
  if (m <= mean) return 1.0;
  return std::min(1.0, std::exp(-mean + m * (1.0 + std::log(mean) - std::log(m))));
}

inline double coherent_tail_bound(double mean, int n_max) { return poisson_tail_bound(mean, n_max + 1.0); }

/// Bound on sum_{n > n_max} n^2 p_n relative to <n^2> = mean^2 + mean, using
/// n(n-1) p_n = mean^2 p_{n-2} and n p_n = mean p_{n-1}.
inline double coherent_moment_tail_bound(double mean, int n_max) {
  if (mean <= 0.0) return 0.0;
  const double dropped = mean * mean * poisson_tail_bound(mean, n_max - 1.0) + mean * poisson_tail_bound(mean, n_max);
  return dropped / (mean * mean + mean);
}

/// Smallest n_max whose dropped probability and relative dropped second moment are both below tol.
inline int coherent_cutoff(double mean, double tol, int cap) {
  if (mean <= 0.0) return 1;
  for (int n_max = 1; n_max <= cap; ++n_max)
    if (coherent_tail_bound(mean, n_max) < tol && coherent_moment_tail_bound(mean, n_max) < tol) return n_max;
  throw Error("truncation insufficient");
}

/// Tail of the squeezed vacuum beyond |2K>: sum_{k>K} p_{2k} <= sech r * t^{2(K+1)} / (1 - t^2)
/// with t = tanh r, since the central binomial factor is at most 1.
inline double squeezed_tail_bound(double r, int n_max) {
  if (r == 0.0) return 0.0;
  const double t2 = std::tanh(r) * std::tanh(r);
  const int k_next = n_max / 2 + 1;
  return std::min(1.0, std::exp(k_next * std::log(t2)) / (std::cosh(r) * (1.0 - t2)));
}

/// Bound on sum_{k > K} (2k)^2 p_{2k} relative to <n^2> = 3 sinh^4 r + 2 sinh^2 r. Uses
/// p_{2k} <= x^k / (sqrt(pi k) cosh r) with x = tanh^2 r and the closed sum of k^2 x^k over k >= k0.
inline double squeezed_moment_tail_bound(double r, int n_max) {
  if (r == 0.0) return 0.0;
  const double x = std::tanh(r) * std::tanh(r);
  const double k0 = n_max / 2 + 1;
  const double g = 1.0 - x;
  const double series = k0 * k0 / g + 2.0 * k0 * x / (g * g) + x * (1.0 + x) / (g * g * g);
  const double s2 = std::sinh(r) * std::sinh(r);
  const double dropped = 4.0 * std::exp(k0 * std::log(x)) * series / (std::sqrt(std::numbers::pi * k0) * std::cosh(r));
  return dropped / (3.0 * s2 * s2 + 2.0 * s2);
}

/// Smallest n_max whose dropped probability and relative dropped second moment are both below tol.
inline int squeezed_cutoff(double r, double tol, int cap) {
  if (r == 0.0) return 1;
  for (int n_max = 1; n_max <= cap; ++n_max)
    if (squeezed_tail_bound(r, n_max) < tol && squeezed_moment_tail_bound(r, n_max) < tol) return n_max;
  throw Error("truncation insufficient");
}

/// Coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!) for n <= n_max.
inline FockVector coherent_state(cplx alpha, int n_max) {
  const double mean = std::norm(alpha);
  std::vector<cplx> amps(static_cast<std::size_t>(n_max) + 1, cplx{});
  const double mod = std::abs(alpha);
  const double arg = std::arg(alpha);
  for (int n = 0; n <= n_max; ++n) {
    if (mod == 0.0) {
      amps[static_cast<std::size_t>(n)] = n == 0 ? 1.0 : 0.0;
      continue;
    }
    const double log_mag = -0.5 * mean + n * std::log(mod) - 0.5 * detail::log_factorial(n);
    amps[static_cast<std::size_t>(n)] = std::polar(std::exp(log_mag), arg * n);
  }
  return FockVector(std::move(amps), coherent_tail_bound(mean, n_max));
}

/// S(xi)|0> with xi = r e^{i theta}:
/// amplitude on |2k> is sech(r)^{1/2} (-e^{i theta} tanh r)^k sqrt((2k)!) / (2^k k!).
inline FockVector squeezed_vacuum(double r, double theta, int n_max) {
  std::vector<cplx> amps(static_cast<std::size_t>(n_max) + 1, cplx{});
  const double t = std::tanh(std::abs(r));
  const double phase = theta + std::numbers::pi + (r < 0.0 ? std::numbers::pi : 0.0);
  for (int k = 0; 2 * k <= n_max; ++k) {
    double mag = 0.0;
    if (k == 0) {
      mag = 1.0;
    } else if (t > 0.0) {
      mag = std::exp(k * std::log(t) + 0.5 * detail::log_factorial(2 * k) - k * std::numbers::ln2 -
                     detail::log_factorial(k));
    }
    amps[static_cast<std::size_t>(2 * k)] = std::polar(mag / std::sqrt(std::cosh(r)), phase * k);
  }
  return FockVector(std::move(amps), squeezed_tail_bound(r, n_max));
}

/// Truncated matrix of S(xi) = exp[(xi* a^2 - xi a^dag^2) / 2].
///
/// The generator is exponentiated on a buffered space of dimension
/// n_max + 1 + max(20, n_max / 2) and the leading block is cropped out, so the
/// columns for low occupations are accurate to the tail of the buffered space.
inline Eigen::MatrixXcd squeeze_matrix(cplx xi, int n_max, const TruncationPolicy& policy = {}) {
  const double r = std::abs(xi);
  if (n_max < 0) throw Error("degenerate truncation");
  if (n_max > policy.n_max_cap) throw Error("truncation insufficient");
  squeezed_cutoff(r, policy.tail_tolerance, policy.n_max_cap);
  if (r == 0.0) return Eigen::MatrixXcd::Identity(n_max + 1, n_max + 1);

  const int buffer = std::max(20, n_max / 2);
  const int dim = n_max + 1 + buffer;
  Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(dim, dim);
  // a^2 |n> = sqrt(n (n-1)) |n-2>
  for (int n = 2; n < dim; ++n) {
    const double c = std::sqrt(static_cast<double>(n) * (n - 1));
    gen(n - 2, n) += 0.5 * std::conj(xi) * c;
    gen(n, n - 2) -= 0.5 * xi * c;
  }
  const Eigen::MatrixXcd full = gen.exp();
  return full.topLeftCorner(n_max + 1, n_max + 1);
}

inline FockVector apply(const Eigen::MatrixXcd& op, const FockVector& state) {
  const int n_max = static_cast<int>(op.rows()) - 1;
  const Eigen::VectorXcd in = state.resized(n_max).to_eigen();
  return FockVector::from_eigen(op * in, state.tail_bound());
}

// ---------------------------------------------------------------------------
// Beam splitter

/// Sign of the reflection coefficient: a^dag -> sqrt(T) a^dag + (+-i) sqrt(R) b^dag.
/// The two signs are mutual inverses.
enum class ReflectionPhase { kPlusI, kMinusI };

/// Two-mode beam splitter with creation operators transforming as
///   a^dag -> sqrt(T) a^dag + i sqrt(R) b^dag,  b^dag -> i sqrt(R) a^dag + sqrt(T) b^dag
/// (with -i for kMinusI). Amplitude that lands beyond the cutoff is dropped.
inline TwoModeState beam_splitter_apply(const TwoModeState& state, double transmittance,
                                        ReflectionPhase phase = ReflectionPhase::kPlusI) {
  if (!(transmittance >= 0.0 && transmittance <= 1.0)) throw Error("transmittance outside [0, 1]");
  const int n_max = state.n_max();
  const double t = std::sqrt(transmittance);
  const cplx r = cplx{0.0, phase == ReflectionPhase::kPlusI ? 1.0 : -1.0} * std::sqrt(1.0 - transmittance);

  // powers t^k, r^k up to 2 n_max
  std::vector<double> tp(2 * static_cast<std::size_t>(n_max) + 1, 1.0);
  std::vector<cplx> rp(2 * static_cast<std::size_t>(n_max) + 1, cplx{1.0, 0.0});
  for (std::size_t k = 1; k < tp.size(); ++k) {
    tp[k] = tp[k - 1] * t;
    rp[k] = rp[k - 1] * r;
  }

  TwoModeState out(n_max);
  for (int na = 0; na <= n_max; ++na) {
    for (int nb = 0; nb <= n_max; ++nb) {
      const cplx c = state(na, nb);
      if (c == cplx{}) continue;
      const int n = na + nb;
      const double log_norm = -0.5 * (detail::log_factorial(na) + detail::log_factorial(nb));
      // (t a + r b)^na (r a + t b)^nb
      for (int j = 0; j <= na; ++j) {
        for (int l = 0; l <= nb; ++l) {
          const int oa = j + l;
          const int ob = n - oa;
          if (oa > n_max || ob > n_max) continue;
          const double mag = std::exp(detail::log_binomial(na, j) + detail::log_binomial(nb, l) + log_norm +
                                      0.5 * (detail::log_factorial(oa) + detail::log_factorial(ob)));
          out(oa, ob) += c * mag * tp[static_cast<std::size_t>(j + nb - l)] * rp[static_cast<std::size_t>(na - j + l)];
        }
      }
    }
  }
  return out;
}

}  // namespace phasecraft
