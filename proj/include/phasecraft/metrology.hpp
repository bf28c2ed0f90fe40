// metrology.hpp
// Quantum Fisher information of path-symmetric probes (pure and phase-averaged),
// the quantum Cramer-Rao bound, and the shot-noise limit.

#pragma once

#include "phasecraft/fock.hpp"
#include "phasecraft/probes.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <utility>
#include <vector>

namespace phasecraft {

/// Where the unknown phase enters: exp(-i phi (n_a - n_b)/2) on both arms, or
/// exp(i phi n_b) on arm b only.
enum class PhaseGenerator { kTwoArmSymmetric, kSingleArm };

inline const char* to_string(PhaseGenerator gen) {
  return gen == PhaseGenerator::kTwoArmSymmetric ? "two-arm-symmetric" : "single-arm";
}

/// Eigenvalue of the phase generator on |n_a, n_b>.
inline double generator_value(PhaseGenerator gen, int na, int nb) {
  return gen == PhaseGenerator::kTwoArmSymmetric ? 0.5 * (na - nb) : static_cast<double>(nb);
}

/// 4 Var(G) of the materialized two-mode probe.
inline double qfi_pure(const PathSymmetricProbe& probe, PhaseGenerator gen) {
  const TwoModeState psi = probe.materialize();
  const int n_max = psi.n_max();
  double norm = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  for (int na = 0; na <= n_max; ++na) {
    for (int nb = 0; nb <= n_max; ++nb) {
      const double w = std::norm(psi(na, nb));
      if (w == 0.0) continue;
      const double g = generator_value(gen, na, nb);
      norm += w;
      g1 += w * g;
      g2 += w * g * g;
    }
  }
  if (!(norm > 0.0)) return 0.0;
  g1 /= norm;
  g2 /= norm;
  return std::max(0.0, 4.0 * (g2 - g1 * g1));
}

/// F_Q = <n> (<n> + 1 + Q_M) / (1 + p0).
inline double qfi_closed_form(double mean, double mandel_q, double p0) {
  return mean * (mean + 1.0 + mandel_q) / (1.0 + p0);
}

inline double qfi_closed_form(const PathSymmetricProbe& probe) {
  const auto mom = number_moments(probe.component());
  if (!(mom.mean > 0.0)) return 0.0;
  return qfi_closed_form(mom.mean, mom.variance / mom.mean - 1.0, probe.p0());
}

inline double qcrb(double f_q, int repetitions = 1) {
  if (repetitions < 1) throw Error("repetitions must be >= 1");
  if (!(f_q > 0.0)) throw Error("uninformative probe");
  return 1.0 / (repetitions * f_q);
}

/// Shot-noise limit 1/N_av.
inline double snl(double n_av) {
  if (!(n_av > 0.0)) throw Error("shot-noise limit needs positive energy");
  return 1.0 / n_av;
}

struct QfiReport {
  double f_q = 0.0;
  double qcrb = 0.0;
  double n_av = 0.0;
  double mandel_q = 0.0;
  double p0 = 0.0;
  int repetitions = 1;
};

inline QfiReport qfi_report(const PathSymmetricProbe& probe, int repetitions = 1) {
  QfiReport rep;
  rep.f_q = qfi_closed_form(probe);
  rep.qcrb = qcrb(rep.f_q, repetitions);
  rep.n_av = probe.n_av();
  rep.mandel_q = mandel_q(probe.component());
  rep.p0 = probe.p0();
  rep.repetitions = repetitions;
  return rep;
}

// ---------------------------------------------------------------------------
// Phase-averaged (NOON-mixture) state

struct SparseEntry {
  int na = 0;
  int nb = 0;
  cplx amp{};
};

/// Two-mode vector with few nonzero Fock amplitudes.
using SparseTwoModeVector = std::vector<SparseEntry>;

struct Eigenpair {
  double weight = 0.0;
  SparseTwoModeVector vec;
};

/// Mixed state given by its eigen-decomposition on a two-mode truncation.
struct BlockMixedState {
  int n_max = 0;
  std::vector<Eigenpair> eigen;

  double total_weight() const {
    double s = 0.0;
    for (const auto& e : eigen) s += e.weight;
    return s;
  }
};

/// |noon_n^+-> = (|n,0> +- |0,n>)/sqrt(2).
inline SparseTwoModeVector noon_vector(int n, double sign = 1.0) {
  const double c = 1.0 / std::sqrt(2.0);
  return {{n, 0, cplx{c, 0.0}}, {0, n, cplx{sign * c, 0.0}}};
}

/// Weight p_n/(1+p0) on |noon_n> for n >= 1 and 2 p0/(1+p0) on |0,0>.
inline BlockMixedState phase_averaged_state(const PathSymmetricProbe& probe) {
  BlockMixedState rho;
  rho.n_max = probe.n_max();
  const double denom = 1.0 + probe.p0();
  rho.eigen.push_back({2.0 * probe.p0() / denom, {{0, 0, cplx{1.0, 0.0}}}});
  for (int n = 1; n <= probe.n_max(); ++n) {
    const double p = probe.component().probability(n);
    if (p == 0.0) continue;
    rho.eigen.push_back({p / denom, noon_vector(n)});
  }
  return rho;
}

/// Adds the zero-weight vectors spanning the rest of the truncated space:
/// |noon_n^-> for every n, |noon_n^+> where absent, |0,0> where absent, and
/// the Fock states |a,b> with a, b >= 1.
inline BlockMixedState complete_eigensystem(const BlockMixedState& rho) {
  BlockMixedState out = rho;
  std::map<std::pair<int, int>, bool> seen_noon;
  bool has_vacuum = false;
  for (const auto& e : rho.eigen) {
    if (e.vec.size() == 1 && e.vec[0].na == 0 && e.vec[0].nb == 0) has_vacuum = true;
    if (e.vec.size() == 2 && e.vec[0].nb == 0 && e.vec[1].na == 0 && e.vec[0].na == e.vec[1].nb) {
      const int sign = std::real(e.vec[1].amp) * std::real(e.vec[0].amp) > 0 ? 1 : -1;
      seen_noon[{e.vec[0].na, sign}] = true;
    }
  }
  if (!has_vacuum) out.eigen.push_back({0.0, {{0, 0, cplx{1.0, 0.0}}}});
  for (int n = 1; n <= rho.n_max; ++n) {
    if (!seen_noon.count({n, 1})) out.eigen.push_back({0.0, noon_vector(n, 1.0)});
    if (!seen_noon.count({n, -1})) out.eigen.push_back({0.0, noon_vector(n, -1.0)});
  }
  for (int a = 1; a <= rho.n_max; ++a)
    for (int b = 1; b <= rho.n_max; ++b) out.eigen.push_back({0.0, {{a, b, cplx{1.0, 0.0}}}});
  return out;
}

namespace detail {

/// Fock index -> (eigenvector index, amplitude) for vectors touching it.
inline std::map<std::pair<int, int>, std::vector<std::pair<std::size_t, cplx>>> fock_index(
    const BlockMixedState& rho) {
  std::map<std::pair<int, int>, std::vector<std::pair<std::size_t, cplx>>> index;
  for (std::size_t i = 0; i < rho.eigen.size(); ++i)
    for (const auto& e : rho.eigen[i].vec) index[{e.na, e.nb}].emplace_back(i, e.amp);
  return index;
}

}  // namespace detail

/// Throws "invalid mixed state" unless weights are a probability vector and
/// eigenvectors are orthonormal within 1e-10.
inline void validate_mixed_state(const BlockMixedState& rho) {
  double total = 0.0;
  for (const auto& e : rho.eigen) {
    if (e.weight < -1e-14) throw Error("invalid mixed state");
    total += e.weight;
  }
  if (std::abs(total - 1.0) > 1e-10) throw Error("invalid mixed state");
  const auto index = detail::fock_index(rho);
  std::map<std::pair<std::size_t, std::size_t>, cplx> gram;
  for (const auto& [fock, members] : index)
    for (const auto& [i, ai] : members)
      for (const auto& [j, aj] : members)
        if (i <= j) gram[{i, j}] += std::conj(ai) * aj;
  for (std::size_t i = 0; i < rho.eigen.size(); ++i) {
    const auto it = gram.find({i, i});
    if (it == gram.end() || std::abs(it->second - 1.0) > 1e-10) throw Error("invalid mixed state");
  }
  for (const auto& [ij, g] : gram)
    if (ij.first != ij.second && std::abs(g) > 1e-10) throw Error("invalid mixed state");
}

/// F_Q = 2 sum_{i,j} (l_i - l_j)^2 / (l_i + l_j) |<i|G|j>|^2 over the completed
/// eigensystem; pairs with l_i + l_j < 1e-14 are dropped.
inline double qfi_mixed(const BlockMixedState& rho, PhaseGenerator gen) {
  validate_mixed_state(rho);
  const BlockMixedState full = complete_eigensystem(rho);
  const auto index = detail::fock_index(full);

  double f = 0.0;
  for (std::size_t i = 0; i < full.eigen.size(); ++i) {
    const double li = full.eigen[i].weight;
    if (li <= 0.0) continue;
    // <i|G|j> for all j sharing a Fock component with i; G is diagonal.
    std::map<std::size_t, cplx> row;
    for (const auto& e : full.eigen[i].vec) {
      const double g = generator_value(gen, e.na, e.nb);
      for (const auto& [j, aj] : index.at({e.na, e.nb})) row[j] += std::conj(e.amp) * g * aj;
    }
    for (const auto& [j, gij] : row) {
      const double lj = full.eigen[j].weight;
      const double sum = li + lj;
      const double diff = li - lj;
      // pair (i, j) and its mirror (j, i) when j has zero weight and is skipped as a row
      const double mult = lj <= 0.0 ? 2.0 : 1.0;
      f += mult * 2.0 * diff * diff / sum * std::norm(gij);
    }
  }
  return f;
}

}  // namespace phasecraft
