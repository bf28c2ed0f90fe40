// probes.hpp
// Component families and the path-symmetric probe (|phi>|0> + |0>|phi>) / sqrt(2(1+p0)).

#pragma once

#include "phasecraft/fock.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace phasecraft {

struct NumberSpec {
  int n = 1;
};
struct CoherentSpec {
  cplx alpha{};
};
struct SqueezedVacuumSpec {
  double r = 0.0;
  double theta = 0.0;
};
/// sqrt(q)|1> + sqrt(1-q)|N>.
struct OneNSpec {
  double q = 1.0;
  int n = 2;
};
struct CustomSpec {
  std::vector<cplx> amps;
};

using ProbeSpec = std::variant<NumberSpec, CoherentSpec, SqueezedVacuumSpec, OneNSpec, CustomSpec>;

/// Probe family name as used in labels: NOON, AOOA, SOOS, QOOQ, CUSTOM.
inline std::string family_name(const ProbeSpec& spec) {
  static constexpr std::array<const char*, 5> kNames = {"NOON", "AOOA", "SOOS", "QOOQ", "CUSTOM"};
  return kNames[spec.index()];
}

inline void validate(const ProbeSpec& spec) {
  std::visit(
      [](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, NumberSpec>) {
          if (s.n < 1) throw Error("number state requires N >= 1");
        } else if constexpr (std::is_same_v<S, CoherentSpec>) {
          if (!std::isfinite(s.alpha.real()) || !std::isfinite(s.alpha.imag()))
            throw Error("coherent amplitude must be finite");
        } else if constexpr (std::is_same_v<S, SqueezedVacuumSpec>) {
          if (!std::isfinite(s.r) || !std::isfinite(s.theta) || s.r < 0.0)
            throw Error("squeezing requires finite r >= 0");
        } else if constexpr (std::is_same_v<S, OneNSpec>) {
          if (!(s.q >= 0.0 && s.q <= 1.0)) throw Error("superposition weight q must lie in [0, 1]");
          if (s.n < 2) throw Error("superposition requires N >= 2");
        } else {
          if (s.amps.empty()) throw Error("custom component has no amplitudes");
        }
      },
      spec);
}

/// Single-mode component |phi> on a truncation chosen from its analytic tail.
/// Number and superposition families are exact (zero tail).
inline FockVector build_component(const ProbeSpec& spec, const TruncationPolicy& policy = {}) {
  validate(spec);
  policy.validate();
  return std::visit(
      [&](const auto& s) -> FockVector {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, NumberSpec>) {
          return FockVector::number(s.n, s.n);
        } else if constexpr (std::is_same_v<S, CoherentSpec>) {
          const int n_max = coherent_cutoff(std::norm(s.alpha), policy.tail_tolerance, policy.n_max_cap);
          return coherent_state(s.alpha, n_max);
        } else if constexpr (std::is_same_v<S, SqueezedVacuumSpec>) {
          const int n_max = squeezed_cutoff(s.r, policy.tail_tolerance, policy.n_max_cap);
          return squeezed_vacuum(s.r, s.theta, n_max);
        } else if constexpr (std::is_same_v<S, OneNSpec>) {
          std::vector<cplx> amps(static_cast<std::size_t>(s.n) + 1, cplx{});
          amps[1] = std::sqrt(s.q);
          amps[static_cast<std::size_t>(s.n)] = std::sqrt(1.0 - s.q);
          return FockVector(std::move(amps));
        } else {
          if (static_cast<int>(s.amps.size()) - 1 > policy.n_max_cap) throw Error("truncation insufficient");
          return FockVector(s.amps).normalized();
        }
      },
      spec);
}

class PathSymmetricProbe {
 public:
  PathSymmetricProbe() = default;

  /// The component is renormalized; amplitude dropped by truncation stays in its tail bound.
  explicit PathSymmetricProbe(const FockVector& component) : component_(component.normalized()) {
    p0_ = component_.probability(0);
    mean_ = number_moments(component_).mean;
    n_av_ = mean_ / (1.0 + p0_);
  }

  const FockVector& component() const { return component_; }
  double p0() const { return p0_; }
  /// <n> of the single-mode component.
  double component_mean() const { return mean_; }
  /// Two-mode average energy <n_a + n_b>.
  double n_av() const { return n_av_; }
  double normalization() const { return 1.0 / std::sqrt(2.0 * (1.0 + p0_)); }
  int n_max() const { return component_.n_max(); }
  std::vector<double> weights() const { return component_.probabilities(); }

  TwoModeState materialize() const {
    const int n_max = component_.n_max();
    TwoModeState out(n_max);
    const double c = normalization();
    for (int n = 0; n <= n_max; ++n) {
      out(n, 0) += c * component_[n];
      out(0, n) += c * component_[n];
    }
    return out;
  }

 private:
  FockVector component_;
  double p0_ = 1.0;
  double mean_ = 0.0;
  double n_av_ = 0.0;
};

inline PathSymmetricProbe assemble_probe(const FockVector& component) { return PathSymmetricProbe(component); }

namespace detail {

/// Strictly increasing check on a uniform sample of the bracket, then bisection.
template <typename F>
double solve_increasing(F&& f, double lo, double hi, double target) {
  constexpr int kSamples = 64;
  double prev = f(lo);
  for (int i = 1; i <= kSamples; ++i) {
    const double x = lo + (hi - lo) * i / kSamples;
    const double v = f(x);
    if (!(v > prev)) throw Error("energy map not monotone on bracket");
    prev = v;
  }
  if (target < f(lo) || target > f(hi)) throw Error("infeasible energy");
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Two-mode energy of a coherent component as a function of |alpha|^2.
inline double coherent_energy(double mean) { return mean / (1.0 + std::exp(-mean)); }

/// Two-mode energy of a squeezed-vacuum component as a function of r,
/// sinh^2 r / (1 + sech r) = cosh r (cosh r - 1).
inline double squeezed_energy(double r) {
  const double s = std::sinh(r);
  return s * s / (1.0 + 1.0 / std::cosh(r));
}

/// Inverse of squeezed_energy: cosh r = (1 + sqrt(1 + 4 n_av)) / 2.
inline double squeezing_for_energy(double n_av) { return std::acosh(0.5 * (1.0 + std::sqrt(1.0 + 4.0 * n_av))); }

/// Fixes the free parameter of `family` so that the assembled probe carries
/// two-mode energy `n_av_target`. Squeezing phase is set to zero.
inline ProbeSpec solve_energy_constraint(const ProbeSpec& family, double n_av_target) {
  if (!(n_av_target > 0.0) || !std::isfinite(n_av_target)) throw Error("infeasible energy");
  return std::visit(
      [&](const auto& s) -> ProbeSpec {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, NumberSpec>) {
          const double rounded = std::round(n_av_target);
          if (std::abs(rounded - n_av_target) > 1e-12 || rounded < 1.0) throw Error("infeasible energy");
          return NumberSpec{static_cast<int>(rounded)};
        } else if constexpr (std::is_same_v<S, CoherentSpec>) {
          const double mean = detail::solve_increasing(coherent_energy, 0.0, 4.0 * n_av_target + 4.0, n_av_target);
          return CoherentSpec{cplx{std::sqrt(mean), 0.0}};
        } else if constexpr (std::is_same_v<S, SqueezedVacuumSpec>) {
          return SqueezedVacuumSpec{squeezing_for_energy(n_av_target), 0.0};
        } else if constexpr (std::is_same_v<S, OneNSpec>) {
          if (s.n < 2) throw Error("superposition requires N >= 2");
          if (n_av_target < 1.0 || n_av_target > s.n) throw Error("infeasible energy");
          return OneNSpec{(s.n - n_av_target) / (s.n - 1.0), s.n};
        } else {
          throw Error("infeasible energy");
        }
      },
      family);
}

inline PathSymmetricProbe make_probe(const ProbeSpec& spec, const TruncationPolicy& policy = {}) {
  return assemble_probe(build_component(spec, policy));
}

// ---------------------------------------------------------------------------
// Canonical text form
//
//   noon:N=2   aooa:nav=2   aooa:alpha=1   soos:nav=2   soos:r=0.5,theta=0
//   qooq:N=8,nav=2   qooq:N=8,q=0.5   custom:file=<path>
//
// `nav` may be left out and supplied later (sweeps over energy).

struct ProbeRequest {
  std::string text;
  ProbeSpec family;                 // template; parameters filled when explicit
  std::optional<double> nav;        // energy constraint, if given
  bool explicit_parameters = false; // spec is complete without an energy

  /// Display label, e.g. "QOOQ(N=8)".
  std::string label() const {
    if (const auto* one_n = std::get_if<OneNSpec>(&family)) return "QOOQ(N=" + std::to_string(one_n->n) + ")";
    if (const auto* num = std::get_if<NumberSpec>(&family); num != nullptr && explicit_parameters)
      return "NOON(N=" + std::to_string(num->n) + ")";
    return family_name(family);
  }

  /// Spec at the given energy. Explicit parameters win over any energy.
  ProbeSpec resolve(std::optional<double> nav_override = std::nullopt) const {
    if (explicit_parameters) return family;
    const auto target = nav_override ? nav_override : nav;
    if (!target) throw Error("probe '" + text + "' needs an energy (nav)");
    return solve_energy_constraint(family, *target);
  }
};

namespace detail {

inline std::map<std::string, std::string> parse_kv(std::string_view body, const std::string& text) {
  std::map<std::string, std::string> kv;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto comma = body.find(',', pos);
    const auto item = body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) throw Error("malformed probe spec '" + text + "'");
    kv.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return kv;
}

inline double to_double(const std::string& s, const std::string& text) {
  std::istringstream in(s);
  double v = 0.0;
  if (!(in >> v) || !in.eof()) throw Error("malformed number '" + s + "' in probe spec '" + text + "'");
  return v;
}

inline int to_int(const std::string& s, const std::string& text) {
  const double v = to_double(s, text);
  if (v != std::round(v)) throw Error("expected an integer in probe spec '" + text + "'");
  return static_cast<int>(v);
}

}  // namespace detail

/// Reads a JSON array of [re, im] pairs.
inline std::vector<cplx> load_custom_amplitudes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open custom amplitude file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid custom amplitude JSON: " + std::string(e.what()));
  }
  if (!doc.is_array() || doc.empty()) throw Error("custom amplitude file must hold a non-empty array");
  std::vector<cplx> amps;
  for (const auto& pair : doc) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
      throw Error("custom amplitudes must be [re, im] pairs");
    amps.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  return amps;
}

inline ProbeRequest parse_probe_request(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const auto kv = colon == std::string::npos ? std::map<std::string, std::string>{}
                                             : detail::parse_kv(std::string_view(text).substr(colon + 1), text);
  ProbeRequest req;
  req.text = text;
  auto take = [&](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    return it == kv.end() ? std::nullopt : std::optional<std::string>(it->second);
  };
  auto allow_only = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : kv) {
      bool ok = false;
      for (const char* key : keys) ok = ok || k == key;
      if (!ok) throw Error("unknown key '" + k + "' in probe spec '" + text + "'");
    }
  };
  if (auto nav = take("nav")) req.nav = detail::to_double(*nav, text);

  if (name == "noon") {
    allow_only({"N", "nav"});
    if (auto n = take("N")) {
      req.family = NumberSpec{detail::to_int(*n, text)};
      req.explicit_parameters = true;
    } else {
      req.family = NumberSpec{};
    }
  } else if (name == "aooa") {
    allow_only({"alpha", "nav"});
    if (auto a = take("alpha")) {
      req.family = CoherentSpec{cplx{detail::to_double(*a, text), 0.0}};
      req.explicit_parameters = true;
    } else {
      req.family = CoherentSpec{};
    }
  } else if (name == "soos") {
    allow_only({"r", "theta", "nav"});
    if (auto r = take("r")) {
      const auto theta = take("theta");
      req.family = SqueezedVacuumSpec{detail::to_double(*r, text), theta ? detail::to_double(*theta, text) : 0.0};
      req.explicit_parameters = true;
    } else {
      req.family = SqueezedVacuumSpec{};
    }
  } else if (name == "qooq") {
    allow_only({"N", "q", "nav"});
    const auto n = take("N");
    if (!n) throw Error("qooq spec requires N");
    OneNSpec s{1.0, detail::to_int(*n, text)};
    if (auto q = take("q")) {
      s.q = detail::to_double(*q, text);
      req.explicit_parameters = true;
    }
    req.family = s;
  } else if (name == "custom") {
    allow_only({"file"});
    const auto file = take("file");
    if (!file) throw Error("custom spec requires file=<path>");
    req.family = CustomSpec{load_custom_amplitudes(*file)};
    req.explicit_parameters = true;
  } else {
    throw Error("unknown probe family '" + name + "'");
  }
  if (req.explicit_parameters) validate(req.family);
  if (req.explicit_parameters && req.nav) throw Error("probe spec '" + text + "' fixes both parameters and nav");
  return req;
}

}  // namespace phasecraft
