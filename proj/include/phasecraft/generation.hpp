// generation.hpp
// State-generation circuits: conditional phase shifts on polarization
// ancillas with |+>|+> heralding (squeezed and general decomposable
// components), and the coherent-operation cascade a + c that turns a number
// state into a superposition of |1> and |N+1>.

#pragma once

#include "phasecraft/fock.hpp"

#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace phasecraft {

enum class Polarization { kH = 0, kV = 1 };

/// Two bosonic modes (a, b) entangled with two ancilla qubits (u, d).
/// sector[2 u + d] holds the two-mode amplitudes for qubit values (u, d).
struct HybridState {
  std::array<TwoModeState, 4> sector;

  static constexpr std::size_t index(Polarization u, Polarization d) {
    return 2 * static_cast<std::size_t>(u) + static_cast<std::size_t>(d);
  }

  int n_max() const { return sector[0].n_max(); }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& m : sector) s += m.squared_norm();
    return s;
  }
};

/// |psi>_{ab} (|H>_u|V>_d + |V>_u|H>_d) / sqrt(2).
inline HybridState with_entangled_ancillas(const TwoModeState& psi) {
  HybridState h;
  const TwoModeState zero(psi.n_max());
  for (auto& m : h.sector) m = zero;
  const double c = 1.0 / std::sqrt(2.0);
  h.sector[HybridState::index(Polarization::kH, Polarization::kV)] = TwoModeState(Eigen::MatrixXcd(c * psi.amps()));
  h.sector[HybridState::index(Polarization::kV, Polarization::kH)] = TwoModeState(Eigen::MatrixXcd(c * psi.amps()));
  return h;
}

enum class BosonMode { kA, kB };
enum class Ancilla { kU, kD };

struct CpsPairing {
  BosonMode mode = BosonMode::kA;
  Ancilla qubit = Ancilla::kU;
};

/// I (x) |H><H| + exp(i x n) (x) |V><V| acting on the paired mode and qubit.
inline HybridState cps_apply(const HybridState& state, double x, CpsPairing pairing) {
  HybridState out = state;
  const Eigen::MatrixXcd rot = phase_rotation_matrix(x, state.n_max());
  for (int u = 0; u < 2; ++u) {
    for (int d = 0; d < 2; ++d) {
      const int q = pairing.qubit == Ancilla::kU ? u : d;
      if (q != static_cast<int>(Polarization::kV)) continue;
      auto& m = out.sector[static_cast<std::size_t>(2 * u + d)];
      m = pairing.mode == BosonMode::kA ? m.apply_on_a(rot) : m.apply_on_b(rot);
    }
  }
  return out;
}

/// Qubit bra coefficients (<q|H>, <q|V>)^* for a measurement outcome |q>.
struct QubitOutcome {
  cplx h{};
  cplx v{};
};

inline QubitOutcome plus_outcome() { return {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}; }
inline QubitOutcome minus_outcome() { return {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)}; }

/// (<q_u| <q_d|) |state>, unnormalized.
inline TwoModeState project_ancillas(const HybridState& state, QubitOutcome qu, QubitOutcome qd) {
  const std::array<cplx, 2> bu{std::conj(qu.h), std::conj(qu.v)};
  const std::array<cplx, 2> bd{std::conj(qd.h), std::conj(qd.v)};
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(state.n_max() + 1, state.n_max() + 1);
  for (std::size_t u = 0; u < 2; ++u)
    for (std::size_t d = 0; d < 2; ++d) m += bu[u] * bd[d] * state.sector[2 * u + d].amps();
  return TwoModeState(std::move(m));
}

struct Heralded {
  TwoModeState state;          // normalized
  double success_probability = 0.0;
};

/// Heralds both ancillas in |+> = (|H> + |V>)/sqrt(2).
inline Heralded project_plus_plus(const HybridState& state) {
  const TwoModeState raw = project_ancillas(state, plus_outcome(), plus_outcome());
  const double w = raw.squared_norm();
  if (!(w > 1e-15 * std::max(1.0, state.squared_norm()))) throw Error("post-selection failed");
  return {raw.normalized(), w};
}

struct GenerationReport {
  std::string scheme;
  TwoModeState output;          // normalized, or zero when degenerate
  double fidelity = 0.0;
  double success_probability = 0.0;
  bool degenerate = false;
  /// Occupations n >= 1 of mode a that carry weight.
  std::vector<int> output_support;
};

namespace detail {

inline std::vector<int> mode_a_support(const TwoModeState& s, double threshold = 1e-20) {
  std::vector<int> out;
  const double total = s.squared_norm();
  if (!(total > 0.0)) return out;
  for (int na = 1; na <= s.n_max(); ++na) {
    double w = 0.0;
    for (int nb = 0; nb <= s.n_max(); ++nb) w += std::norm(s(na, nb));
    if (w > threshold * total) out.push_back(na);
  }
  return out;
}

/// (|phi>|0> + |0>|phi>), unnormalized.
inline TwoModeState path_symmetric(const FockVector& phi) {
  TwoModeState out(phi.n_max());
  for (int n = 0; n <= phi.n_max(); ++n) {
    out(n, 0) += phi[n];
    out(0, n) += phi[n];
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Squeezed components

/// |xi>|xi> with both ancillas, CPS(a,u) and CPS(b,d) at phase x, heralding on
/// |+>|+>, then S(xi) on each mode. The output is compared with the closed
/// form (|2 xi>|0> + |0>|2 xi>) on twice the working cutoff.
///
/// The working cutoff defaults to the tail policy's cutoff for squeezing 2r.
inline GenerationReport generate_soos(double r, double theta, double x, const TruncationPolicy& policy = {},
                                      std::optional<int> n_max_override = std::nullopt) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error("squeezing requires r > 0");
  policy.validate();
  const int n_max = n_max_override ? *n_max_override : squeezed_cutoff(2.0 * r, policy.tail_tolerance, policy.n_max_cap);
  if (n_max < 2) throw Error("degenerate truncation");
  const cplx xi = std::polar(r, theta);
  const Eigen::MatrixXcd s = squeeze_matrix(xi, n_max, policy);

  const FockVector single = FockVector::from_eigen(s.col(0));
  HybridState h = with_entangled_ancillas(TwoModeState::product(single, single));
  h = cps_apply(h, x, {BosonMode::kA, Ancilla::kU});
  h = cps_apply(h, x, {BosonMode::kB, Ancilla::kD});
  const Heralded esv = project_plus_plus(h);

  GenerationReport rep;
  rep.scheme = "soos";
  rep.output = esv.state.apply_on_a(s).apply_on_b(s).normalized();
  rep.success_probability = esv.success_probability;

  const int n_ref = 2 * n_max;
  const TwoModeState target = detail::path_symmetric(squeezed_vacuum(2.0 * r, theta, n_ref));
  rep.fidelity = fidelity(target, rep.output);
  rep.output_support = detail::mode_a_support(rep.output);
  return rep;
}

/// Single-mode gate for decomposable recipes.
struct Gate {
  enum class Kind { kSqueeze, kRotate };
  Kind kind = Kind::kRotate;
  cplx xi{};           // squeeze parameter
  double angle = 0.0;  // rotation exp(i angle n)

  static Gate squeeze(cplx xi) { return {Kind::kSqueeze, xi, 0.0}; }
  static Gate rotate(double angle) { return {Kind::kRotate, cplx{}, angle}; }
};

/// U = G_k ... G_1 for gates listed in application order.
using GateProgram = std::vector<Gate>;

inline Eigen::MatrixXcd program_matrix(const GateProgram& program, int n_max, const TruncationPolicy& policy = {}) {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(n_max + 1, n_max + 1);
  for (const auto& g : program) {
    const Eigen::MatrixXcd m =
        g.kind == Gate::Kind::kSqueeze ? squeeze_matrix(g.xi, n_max, policy) : phase_rotation_matrix(g.angle, n_max);
    u = m * u;
  }
  return u;
}

/// Cutoff large enough for every squeeze in the program, taken at twice the
/// summed squeezing.
inline int program_cutoff(const GateProgram& program, const TruncationPolicy& policy) {
  double r = 0.0;
  for (const auto& g : program)
    if (g.kind == Gate::Kind::kSqueeze) r += std::abs(g.xi);
  return std::max(4, squeezed_cutoff(2.0 * r, policy.tail_tolerance, policy.n_max_cap));
}

/// U|0>U|0> with both ancillas, CPS(a,u) and CPS(b,d) at phase x, heralding on
/// |+>|+>, then U^dag on each mode, giving |0> U^dag e^{ixn} U|0> + (a <-> b).
/// When U^dag e^{ixn} U|0> is the vacuum the two branches coincide and the
/// report is flagged degenerate.
inline GenerationReport decomposable_generation(const GateProgram& program, double x,
                                                const TruncationPolicy& policy = {},
                                                std::optional<int> n_max_override = std::nullopt) {
  policy.validate();
  const int n_max = n_max_override ? *n_max_override : program_cutoff(program, policy);
  const Eigen::MatrixXcd u = program_matrix(program, n_max, policy);
  const Eigen::MatrixXcd u_dag = u.adjoint();

  const FockVector single = FockVector::from_eigen(u.col(0));
  HybridState h = with_entangled_ancillas(TwoModeState::product(single, single));
  h = cps_apply(h, x, {BosonMode::kA, Ancilla::kU});
  h = cps_apply(h, x, {BosonMode::kB, Ancilla::kD});
  const Heralded heralded = project_plus_plus(h);

  GenerationReport rep;
  rep.scheme = "decomposable";
  rep.output = heralded.state.apply_on_a(u_dag).apply_on_b(u_dag).normalized();
  rep.success_probability = heralded.success_probability;

  const int n_ref = 2 * n_max;
  const Eigen::MatrixXcd u_ref = program_matrix(program, n_ref, policy);
  const Eigen::VectorXcd phi = u_ref.adjoint() * phase_rotation_matrix(x, n_ref) * u_ref.col(0);
  const FockVector component = FockVector::from_eigen(phi);
  rep.degenerate = component.probability(0) > 1.0 - 1e-12 * component.squared_norm();
  rep.fidelity = fidelity(detail::path_symmetric(component), rep.output);
  rep.output_support = detail::mode_a_support(rep.output);
  return rep;
}

// ---------------------------------------------------------------------------
// Coherent operations

/// (a + c)|psi>: out[n] = sqrt(n+1) psi[n+1] + c psi[n]. Unnormalized; the
/// top amplitude misses the unknown sqrt(n_max+1) psi[n_max+1] contribution.
inline FockVector coherent_op_apply(const FockVector& state, cplx c) {
  if (state.n_max() < 1) throw Error("degenerate truncation");
  const int n_max = state.n_max();
  std::vector<cplx> out(static_cast<std::size_t>(n_max) + 1, cplx{});
  for (int n = 0; n <= n_max; ++n) {
    const cplx lower = n < n_max ? std::sqrt(n + 1.0) * state[n + 1] : cplx{};
    out[static_cast<std::size_t>(n)] = lower + c * state[n];
  }
  return FockVector(std::move(out), (n_max + 1.0 + std::abs(c)) * state.tail_bound());
}

/// c_k = alpha exp(i 2 pi k / N) for k = 1..N.
inline std::vector<cplx> cascade_constants(int n, cplx alpha) {
  std::vector<cplx> c;
  for (int k = 1; k <= n; ++k) c.push_back(alpha * std::polar(1.0, 2.0 * std::numbers::pi * k / n));
  return c;
}

/// prod_{k=1}^{N} (a + c_k) |psi>, applied for k = 1..N in order.
inline FockVector coherent_cascade(const FockVector& state, int n, cplx alpha) {
  FockVector out = state;
  for (const cplx c : cascade_constants(n, alpha)) out = coherent_op_apply(out, c);
  return out;
}

/// Matrix of prod_k (a + c_k) on cutoff n_max.
inline Eigen::MatrixXcd cascade_matrix(int n, cplx alpha, int n_max) {
  Eigen::MatrixXcd lower = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
  for (int m = 1; m <= n_max; ++m) lower(m - 1, m) = std::sqrt(static_cast<double>(m));
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(n_max + 1, n_max + 1);
  for (const cplx c : cascade_constants(n, alpha))
    out = (lower + c * Eigen::MatrixXcd::Identity(n_max + 1, n_max + 1)) * out;
  return out;
}

/// sqrt((N+1)!)|1> + (-1)^{N-1} alpha^N |N+1>.
inline FockVector cascade_target(int n, cplx alpha) {
  std::vector<cplx> amps(static_cast<std::size_t>(n) + 2, cplx{});
  amps[1] = std::exp(0.5 * detail::log_factorial(n + 1));
  amps[static_cast<std::size_t>(n) + 1] = (n % 2 == 1 ? 1.0 : -1.0) * std::pow(alpha, n);
  return FockVector(std::move(amps));
}

/// Applies the cascade to each mode of (|N+1,0> + |0,N+1>)/sqrt(2). The vacuum arm
/// picks up prod_k c_k = (-1)^{N+1} alpha^N, a global factor, so the output is
/// compared with the target up to phase. At alpha = 0 that factor kills the
/// state and the report is flagged degenerate.
inline GenerationReport generate_qooq_from_noon(int n, cplx alpha) {
  if (n < 2) throw Error("cascade requires N >= 2");
  const int n_max = n + 1;
  const Eigen::MatrixXcd c = cascade_matrix(n, alpha, n_max);
  const TwoModeState input = detail::path_symmetric(FockVector::number(n + 1, n_max)).normalized();
  const TwoModeState raw = input.apply_on_a(c).apply_on_b(c);

  GenerationReport rep;
  rep.scheme = "qooq";
  // Output norm relative to the largest norm the cascade can produce from any
  // normalized input, which keeps the weight in [0, 1].
  const double top = Eigen::JacobiSVD<Eigen::MatrixXcd>(c).singularValues()(0);
  rep.success_probability = top > 0.0 ? raw.squared_norm() / (top * top * top * top) : 0.0;
  const double scale = std::exp(detail::log_factorial(n + 1));
  rep.degenerate = !(raw.squared_norm() > 1e-24 * scale * scale);
  rep.output = rep.degenerate ? TwoModeState(n_max) : raw.normalized();
  rep.fidelity = rep.degenerate ? 0.0 : fidelity(detail::path_symmetric(cascade_target(n, alpha)), rep.output);
  rep.output_support = detail::mode_a_support(rep.output);
  return rep;
}

}  // namespace phasecraft
