// cli.hpp
// Command-line front end. `run` takes the full argument vector and returns the
// rendered output, so every command is testable without a process boundary.

#pragma once

#include "phasecraft/fock.hpp"
#include "phasecraft/generation.hpp"
#include "phasecraft/interferometer.hpp"
#include "phasecraft/metrology.hpp"
#include "phasecraft/probes.hpp"
#include "phasecraft/study.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace phasecraft::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string command;
  std::vector<std::string> states;
  std::vector<double> nav;
  std::vector<double> transmittance;
  std::optional<double> phi;
  std::string phi_grid;
  std::string n_range;
  std::optional<int> count;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  int jobs = 1;
  std::string config;
  std::string measurement = "parity";
  std::string mode = "optimize";
  int support = 10;
  std::string generator = "two-arm-symmetric";
  std::string scheme;
  double r = 0.3;
  double theta = 0.0;
  double x = std::numbers::pi / 2.0;
  int n = 2;
  double alpha = 1.0;
  std::string program;
};

struct CliResult {
  int exit_code = 0;
  std::string output;
  std::string error;
};

// ---------------------------------------------------------------------------
// Tables

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> errors;
};

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline std::string render_csv(const Table& t) {
  std::ostringstream out;
  for (const auto& [k, v] : t.meta) out << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "");
      if (const auto* d = std::get_if<double>(&row[i]))
        out << format_number(*d);
      else
        out << std::get<std::string>(row[i]);
    }
    out << '\n';
  }
  for (const auto& e : t.errors) out << "# error: " << e << '\n';
  return out.str();
}

inline nlohmann::ordered_json json_value(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_number(*d);
  }
  return std::get<std::string>(c);
}

inline std::string render_json(const Table& t) {
  nlohmann::ordered_json doc;
  doc["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.meta) doc["metadata"][k] = v;
  doc["records"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json rec;
    for (std::size_t i = 0; i < row.size(); ++i) rec[t.columns[i]] = json_value(row[i]);
    doc["records"].push_back(rec);
  }
  doc["errors"] = t.errors;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Argument helpers

namespace detail {

/// Number with an optional trailing "pi", e.g. "2pi", "0.5pi", "1.2".
inline double parse_angle(std::string s) {
  double scale = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    scale = std::numbers::pi;
    s.resize(s.size() - 2);
    if (s.empty()) return scale;
  }
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw Error("malformed number '" + s + "'");
  return v * scale;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

inline PhiGrid parse_phi_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw Error("phase grid must be start:stop:points");
  PhiGrid g;
  try {
    g.start = parse_angle(parts[0]);
    g.stop = parse_angle(parts[1]);
    g.points = std::stoi(parts[2]);
  } catch (const std::logic_error&) {
    throw Error("malformed phase grid '" + text + "'");
  }
  g.validate();
  return g;
}

inline std::pair<int, int> parse_n_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw Error("N range must be lo:hi");
  try {
    return {std::stoi(parts[0]), std::stoi(parts[1])};
  } catch (const std::logic_error&) {
    throw Error("malformed N range '" + text + "'");
  }
}

/// squeeze:r,theta;rotate:angle;...
inline GateProgram parse_program(const std::string& text) {
  GateProgram program;
  for (const auto& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    const std::string kind = item.substr(0, colon);
    const auto args = colon == std::string::npos ? std::vector<std::string>{} : split(item.substr(colon + 1), ',');
    try {
      if (kind == "squeeze" && (args.size() == 1 || args.size() == 2)) {
        const double r = std::stod(args[0]);
        const double th = args.size() == 2 ? parse_angle(args[1]) : 0.0;
        program.push_back(Gate::squeeze(std::polar(r, th)));
      } else if (kind == "rotate" && args.size() == 1) {
        program.push_back(Gate::rotate(parse_angle(args[0])));
      } else {
        throw Error("unknown gate '" + item + "'");
      }
    } catch (const std::logic_error&) {
      throw Error("malformed gate '" + item + "'");
    }
  }
  return program;
}

inline std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    out[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
  return out;
}

inline PhaseGenerator parse_generator(const std::string& s) {
  return s == "single-arm" ? PhaseGenerator::kSingleArm : PhaseGenerator::kTwoArmSymmetric;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands

struct Context {
  RunConfig cfg;
  TruncationPolicy policy;
  std::string command_line;
};

inline Table base_table(const Context& ctx) {
  Table t;
  t.meta = {{"version", std::string("phasecraft ") + kVersion},
            {"command", ctx.command_line},
            {"seed", std::to_string(ctx.cfg.seed)},
            {"truncation", "tail_tolerance=" + format_number(ctx.policy.tail_tolerance) +
                               " n_max_cap=" + std::to_string(ctx.policy.n_max_cap)},
            {"generator", to_string(detail::parse_generator(ctx.cfg.generator))}};
  return t;
}

inline std::vector<std::string> default_states(bool noon_at_two) {
  return {noon_at_two ? "noon:N=2" : "noon", "aooa", "soos", "qooq:N=8", "qooq:N=100"};
}

inline std::string row_error(const std::string& label, double nav, const std::string& what) {
  return label + " n_av=" + format_number(nav) + ": " + what;
}

/// F_Q and the QCRB against two-mode energy.
inline Table cmd_fig1(const Context& ctx) {
  Table t = base_table(ctx);
  const bool explicit_grid = !ctx.cfg.nav.empty();
  const auto grid = explicit_grid ? ctx.cfg.nav : detail::log_grid(0.5, 5.0, 60);
  const auto states = ctx.cfg.states.empty() ? default_states(false) : ctx.cfg.states;
  t.meta.emplace_back("n_av_grid", explicit_grid ? "explicit" : "60 log-spaced points in [0.5, 5]");
  t.columns = {"state", "n_av", "f_q", "qcrb"};

  struct Job {
    ProbeRequest req;
    double nav;
  };
  std::vector<Job> jobs;
  std::vector<std::vector<Cell>> envelope;
  for (const auto& text : states) {
    const ProbeRequest req = parse_probe_request(text);
    if (req.explicit_parameters) {
      jobs.push_back({req, std::nan("")});
      continue;
    }
    for (double nav : grid) {
      const bool is_noon = std::holds_alternative<NumberSpec>(req.family);
      if (!explicit_grid) {
        // The default grid keeps each family to its feasible energies.
        if (is_noon) {
          envelope.push_back({std::string("NOON envelope"), nav, nav * nav, 1.0 / (nav * nav)});
          continue;
        }
        if (const auto* one_n = std::get_if<OneNSpec>(&req.family); one_n && (nav < 1.0 || nav > one_n->n)) continue;
      }
      jobs.push_back({req, nav});
    }
    if (!explicit_grid && std::holds_alternative<NumberSpec>(req.family))
      for (int n = static_cast<int>(std::ceil(grid.front())); n <= static_cast<int>(std::floor(grid.back())); ++n)
        jobs.push_back({req, static_cast<double>(n)});
  }

  struct Outcome {
    std::vector<Cell> row;
    std::string error;
  };
  const auto results = parallel_map<Outcome>(jobs.size(), ctx.cfg.jobs, [&](std::size_t i) {
    const auto& job = jobs[i];
    const std::string label = job.req.label();
    try {
      const auto spec = std::isnan(job.nav) ? job.req.resolve() : job.req.resolve(job.nav);
      const auto probe = make_probe(spec, ctx.policy);
      const double f = qfi_closed_form(probe);
      return Outcome{{label, probe.n_av(), f, qcrb(f)}, {}};
    } catch (const Error& e) {
      return Outcome{{}, row_error(label, job.nav, e.what())};
    }
  });
  for (const auto& r : results) {
    if (r.error.empty())
      t.rows.push_back(r.row);
    else
      t.errors.push_back(r.error);
  }
  for (auto& row : envelope) t.rows.push_back(std::move(row));
  return t;
}

inline double single_nav(const Context& ctx, double fallback) {
  if (ctx.cfg.nav.size() > 1) throw Error("this command takes a single --nav");
  return ctx.cfg.nav.empty() ? fallback : ctx.cfg.nav.front();
}

inline double single_t(const Context& ctx, double fallback) {
  if (ctx.cfg.transmittance.size() > 1) throw Error("this command takes a single --T");
  return ctx.cfg.transmittance.empty() ? fallback : ctx.cfg.transmittance.front();
}

inline PhiGrid grid_or_default(const Context& ctx) {
  return ctx.cfg.phi_grid.empty() ? PhiGrid{} : detail::parse_phi_grid(ctx.cfg.phi_grid);
}

inline PathSymmetricProbe resolve_probe(const ProbeRequest& req, double nav, const TruncationPolicy& policy) {
  return make_probe(req.explicit_parameters ? req.resolve() : req.resolve(nav), policy);
}

/// Sensitivity curves of each state against phi at fixed energy and loss.
inline Table cmd_fig3(const Context& ctx) {
  Table t = base_table(ctx);
  const double nav = single_nav(ctx, 2.0);
  const double tr = single_t(ctx, 0.9);
  const PhiGrid grid = grid_or_default(ctx);
  const Measurement m = ctx.cfg.measurement == "counting" ? Measurement::kCounting : Measurement::kParity;
  const auto states = ctx.cfg.states.empty() ? default_states(true) : ctx.cfg.states;
  t.meta.emplace_back("measurement", to_string(m));
  t.meta.emplace_back("phi_grid", format_number(grid.start) + ":" + format_number(grid.stop) + ":" +
                                      std::to_string(grid.points) + " cell-centred");
  t.columns = {"phi", "sensitivity", "snl", "label", "T", "n_av"};

  std::vector<SensitivityCurve> curves;
  for (const auto& text : states) {
    const ProbeRequest req = parse_probe_request(text);
    try {
      const auto probe = resolve_probe(req, nav, ctx.policy);
      curves.push_back(sensitivity_curve(probe, m, tr, grid, req.label(), ctx.cfg.jobs));
      if (!req.explicit_parameters) curves.back().snl = snl(nav);
    } catch (const Error& e) {
      t.errors.push_back(row_error(req.label(), nav, e.what()));
    }
  }
  for (const auto& c : curves)
    t.meta.emplace_back("snl_beating_range " + c.label, format_number(snl_beating_range(c)));
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.phi.size(); ++i) t.rows.push_back({c.phi[i], c.sensitivity[i], c.snl, c.label, tr, nav});
  const auto phis = grid.values();
  for (double phi : phis) t.rows.push_back({phi, snl(nav), snl(nav), std::string("SNL"), tr, nav});
  return t;
}

inline std::vector<double> optimize_nav_grid(const Context& ctx) {
  return ctx.cfg.nav.empty() ? std::vector<double>{1.5, 2.0, 2.5, 3.0} : ctx.cfg.nav;
}

inline Table cmd_optimize(const Context& ctx) {
  Table t = base_table(ctx);
  const auto ts = ctx.cfg.transmittance.empty() ? std::vector<double>{0.95, 0.9, 0.85, 0.8} : ctx.cfg.transmittance;
  const auto navs = optimize_nav_grid(ctx);
  const auto [lo, hi] = ctx.cfg.n_range.empty() ? std::pair<int, int>{2, 200} : detail::parse_n_range(ctx.cfg.n_range);
  const double phi = ctx.cfg.phi.value_or(kDefaultPhiEval);
  t.meta.emplace_back("mode", "optimize");
  t.meta.emplace_back("phi_eval", format_number(phi));
  t.meta.emplace_back("n_range", std::to_string(lo) + ":" + std::to_string(hi));
  t.columns = {"T", "n_av", "best_n_list", "best_sensitivity"};
  for (double tr : ts) {
    for (double nav : navs) {
      try {
        const auto res = optimize_qooq_n(tr, nav, lo, hi, phi, ctx.cfg.jobs);
        std::string list;
        for (int n : res.best_n_set) list += (list.empty() ? "" : ";") + std::to_string(n);
        t.rows.push_back({tr, nav, list, res.best_sensitivity});
      } catch (const Error& e) {
        t.errors.push_back("T=" + format_number(tr) + " n_av=" + format_number(nav) + ": " + e.what());
      }
    }
  }
  return t;
}

inline Table cmd_sample(const Context& ctx) {
  Table t = base_table(ctx);
  const int count = ctx.cfg.count.value_or(37132);
  const double tr = single_t(ctx, 0.9);
  const double phi = ctx.cfg.phi.value_or(kDefaultPhiEval);
  t.meta.emplace_back("mode", "sample");
  t.meta.emplace_back("sampler", "flat Dirichlet on p_1..p_" + std::to_string(ctx.cfg.support));
  t.meta.emplace_back("T", format_number(tr));
  t.meta.emplace_back("phi_eval", format_number(phi));
  t.columns = {"id", "n_av", "inv_fi"};
  const auto records = sample_random_components(count, ctx.cfg.support, ctx.cfg.seed, tr, phi, ctx.cfg.jobs);
  for (const auto& r : records) t.rows.push_back({std::to_string(r.id), r.n_av, r.inv_fi});
  return t;
}

inline Table cmd_qfi(const Context& ctx) {
  Table t = base_table(ctx);
  const auto gen = detail::parse_generator(ctx.cfg.generator);
  if (ctx.cfg.states.empty()) throw Error("qfi needs at least one --state");
  const auto navs = ctx.cfg.nav.empty() ? std::vector<double>{std::nan("")} : ctx.cfg.nav;
  t.columns = {"state", "n_av", "f_q", "qcrb", "f_q_pure", "f_q_mixed", "mandel_q", "p0"};
  for (const auto& text : ctx.cfg.states) {
    const ProbeRequest req = parse_probe_request(text);
    for (double nav : navs) {
      try {
        const auto spec = std::isnan(nav) ? req.resolve() : req.resolve(nav);
        const auto probe = make_probe(spec, ctx.policy);
        const auto rep = qfi_report(probe);
        t.rows.push_back({req.label(), rep.n_av, rep.f_q, rep.qcrb, qfi_pure(probe, gen),
                          qfi_mixed(phase_averaged_state(probe), gen), rep.mandel_q, rep.p0});
      } catch (const Error& e) {
        t.errors.push_back(row_error(req.label(), nav, e.what()));
      }
    }
  }
  return t;
}

/// Per-phi parity or counting values for each state.
inline Table cmd_pointwise(const Context& ctx, Measurement m) {
  Table t = base_table(ctx);
  if (ctx.cfg.states.empty()) throw Error("this command needs at least one --state");
  const double nav = single_nav(ctx, std::nan(""));
  const double tr = single_t(ctx, 1.0);
  std::vector<double> phis;
  if (ctx.cfg.phi) {
    phis = {*ctx.cfg.phi};
  } else {
    phis = grid_or_default(ctx).values();
  }
  t.meta.emplace_back("measurement", to_string(m));
  t.columns = m == Measurement::kParity
                  ? std::vector<std::string>{"phi", "expectation", "sensitivity", "snl", "label", "T", "n_av"}
                  : std::vector<std::string>{"phi", "fi", "inv_fi", "snl", "label", "T", "n_av"};
  for (const auto& text : ctx.cfg.states) {
    const ProbeRequest req = parse_probe_request(text);
    try {
      if (!req.explicit_parameters && std::isnan(nav)) throw Error("probe '" + text + "' needs an energy (nav)");
      const auto probe = resolve_probe(req, nav, ctx.policy);
      const auto rows = parallel_map<std::vector<Cell>>(phis.size(), ctx.cfg.jobs, [&](std::size_t i) {
        const double phi = phis[i];
        if (m == Measurement::kParity)
          return std::vector<Cell>{phi, parity_expectation(probe, phi, tr), parity_sensitivity(probe, phi, tr),
                                   snl(probe.n_av()), req.label(), tr, probe.n_av()};
        const double f = classical_fi(probe, phi, tr);
        return std::vector<Cell>{phi, f, f > 0.0 ? 1.0 / f : std::numeric_limits<double>::infinity(),
                                 snl(probe.n_av()), req.label(), tr, probe.n_av()};
      });
      for (const auto& r : rows) t.rows.push_back(r);
    } catch (const Error& e) {
      t.errors.push_back(row_error(req.label(), nav, e.what()));
    }
  }
  return t;
}

inline std::string cmd_generate(const Context& ctx) {
  const auto& c = ctx.cfg;
  nlohmann::ordered_json doc;
  doc["metadata"] = {{"version", std::string("phasecraft ") + kVersion},
                     {"command", ctx.command_line},
                     {"seed", std::to_string(c.seed)},
                     {"truncation", "tail_tolerance=" + format_number(ctx.policy.tail_tolerance) +
                                        " n_max_cap=" + std::to_string(ctx.policy.n_max_cap)},
                     {"generator", to_string(detail::parse_generator(c.generator))}};
  GenerationReport rep;
  nlohmann::ordered_json params;
  if (c.scheme == "soos") {
    params = {{"r", c.r}, {"theta", c.theta}, {"x", c.x}};
    rep = generate_soos(c.r, c.theta, c.x, ctx.policy);
  } else if (c.scheme == "qooq") {
    params = {{"N", c.n}, {"alpha", c.alpha}};
    rep = generate_qooq_from_noon(c.n, cplx{c.alpha, 0.0});
  } else {
    params = {{"program", c.program}, {"x", c.x}};
    rep = decomposable_generation(detail::parse_program(c.program), c.x, ctx.policy);
  }
  doc["scheme"] = c.scheme;
  doc["parameters"] = params;
  doc["fidelity"] = rep.fidelity;
  doc["success_probability"] = rep.success_probability;
  doc["degenerate"] = rep.degenerate;
  doc["output_support"] = rep.output_support;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Parsing and dispatch

namespace detail {

inline void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "Master seed");
  sub->add_option("--out", cfg.out, "Write output to this file instead of stdout");
  sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--config", cfg.config, "JSON file of option values; flags override it");
  sub->add_option("--generator", cfg.generator, "Phase generator convention")
      ->check(CLI::IsMember({"two-arm-symmetric", "single-arm"}));
}

inline std::unique_ptr<CLI::App> make_app(RunConfig& cfg) {
  auto app = std::make_unique<CLI::App>("Phase-estimation limits of path-symmetric entangled probes", "phasecraft");
  app->require_subcommand(1);
  auto states = [&](CLI::App* s) { s->add_option("--state", cfg.states, "Probe spec, repeatable (e.g. qooq:N=8)"); };
  auto navs = [&](CLI::App* s) { s->add_option("--nav", cfg.nav, "Two-mode average photon number(s)"); };
  auto ts = [&](CLI::App* s) {
    s->add_option("--T", cfg.transmittance, "Per-arm transmittance(s)")->check(CLI::Range(0.0, 1.0));
  };
  auto phi = [&](CLI::App* s) { s->add_option("--phi", cfg.phi, "Phase value"); };
  auto grid = [&](CLI::App* s) { s->add_option("--phi-grid", cfg.phi_grid, "start:stop:points (cell-centred)"); };

  auto* fig1 = app->add_subcommand("fig1", "QFI and QCRB against energy");
  states(fig1);
  navs(fig1);
  add_common(fig1, cfg);

  auto* fig3 = app->add_subcommand("fig3", "Lossy sensitivity curves against phase");
  states(fig3);
  navs(fig3);
  ts(fig3);
  grid(fig3);
  add_common(fig3, cfg);
  fig3->add_option("--measurement", cfg.measurement, "Readout scheme")->check(CLI::IsMember({"parity", "counting"}));

  auto* fig4 = app->add_subcommand("fig4", "Optimal N table or random-component scatter");
  navs(fig4);
  ts(fig4);
  phi(fig4);
  add_common(fig4, cfg);
  fig4->add_option("--mode", cfg.mode, "Optimal-N table or random scatter")->check(CLI::IsMember({"optimize", "sample"}));
  fig4->add_option("--N-range", cfg.n_range, "lo:hi");
  fig4->add_option("--count", cfg.count, "Number of random components")->check(CLI::PositiveNumber);
  fig4->add_option("--support", cfg.support, "Largest photon number in sampled components")->check(CLI::Range(2, 200));

  auto* sample = app->add_subcommand("sample", "Random-component scatter");
  ts(sample);
  phi(sample);
  add_common(sample, cfg);
  sample->add_option("--count", cfg.count, "Number of random components")->check(CLI::PositiveNumber);
  sample->add_option("--support", cfg.support, "Largest photon number in sampled components")->check(CLI::Range(2, 200));

  auto* gen = app->add_subcommand("generate", "Simulate a state-generation circuit");
  gen->add_option("scheme", cfg.scheme, "Circuit to simulate")->required()->check(CLI::IsMember({"soos", "qooq", "decomposable"}));
  gen->add_option("--r", cfg.r, "Squeezing magnitude of each input")->check(CLI::PositiveNumber);
  gen->add_option("--theta", cfg.theta, "Squeezing phase of each input");
  gen->add_option("--x", cfg.x, "CPS phase");
  gen->add_option("--N", cfg.n, "Target QOOQ photon number")->check(CLI::Range(2, 60));
  gen->add_option("--alpha", cfg.alpha, "Cascade displacement amplitude");
  gen->add_option("--program", cfg.program, "Gate recipe, e.g. squeeze:0.3,pi;rotate:0.2");
  add_common(gen, cfg);

  auto* qfi = app->add_subcommand("qfi", "QFI report per state");
  states(qfi);
  navs(qfi);
  add_common(qfi, cfg);

  auto* parity = app->add_subcommand("parity", "Parity expectation and sensitivity");
  states(parity);
  navs(parity);
  ts(parity);
  phi(parity);
  grid(parity);
  add_common(parity, cfg);

  auto* fi = app->add_subcommand("fi", "Photon-counting Fisher information");
  states(fi);
  navs(fi);
  ts(fi);
  phi(fi);
  grid(fi);
  add_common(fi, cfg);
  return app;
}

inline std::string json_scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

/// Turns config entries whose flags are absent from the command line into
/// extra arguments.
inline std::vector<std::string> config_arguments(const std::string& path, const CLI::App& sub) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid config JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw Error("config file must hold a JSON object");
  std::vector<std::string> extra;
  for (const auto& [key, value] : doc.items()) {
    if (key == "config") continue;
    const CLI::Option* opt = nullptr;
    try {
      opt = sub.get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw Error("unknown config key '" + key + "' for " + sub.get_name());
    }
    if (opt->count() > 0) continue;
    extra.push_back("--" + key);
    if (value.is_array()) {
      for (const auto& v : value) extra.push_back(json_scalar_text(v));
    } else {
      extra.push_back(json_scalar_text(value));
    }
  }
  return extra;
}

inline std::string join(const std::vector<std::string>& args) {
  std::string s;
  for (const auto& a : args) s += (s.empty() ? "" : " ") + a;
  return s;
}

}  // namespace detail

/// Runs one command. `args[0]` is the program name.
inline CliResult run(const std::vector<std::string>& args) {
  CliResult result;
  std::ostringstream out_stream;
  std::ostringstream err_stream;
  RunConfig cfg;
  std::vector<std::string> full = args;
  auto app = detail::make_app(cfg);
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app->parse(rev);
    if (!cfg.config.empty()) {
      const auto extra = detail::config_arguments(cfg.config, *app->get_subcommands().front());
      full.insert(full.end(), extra.begin(), extra.end());
    }
    cfg = RunConfig{};
    app = detail::make_app(cfg);
    rev.assign(full.rbegin(), full.rend() - 1);
    app->parse(rev);
    cfg.command = app->get_subcommands().front()->get_name();
  } catch (const CLI::ParseError& e) {
    result.exit_code = app->exit(e, out_stream, err_stream);
    result.output = out_stream.str();
    result.error = err_stream.str();
    return result;
  } catch (const Error& e) {
    result.exit_code = 1;
    result.error = std::string("error: ") + e.what() + "\n";
    return result;
  }

  Context ctx{cfg, TruncationPolicy::from_environment(), detail::join(args)};
  try {
    std::string text;
    if (cfg.command == "generate") {
      text = cmd_generate(ctx);
    } else {
      Table t;
      if (cfg.command == "fig1") t = cmd_fig1(ctx);
      else if (cfg.command == "fig3") t = cmd_fig3(ctx);
      else if (cfg.command == "fig4") t = cfg.mode == "sample" ? cmd_sample(ctx) : cmd_optimize(ctx);
      else if (cfg.command == "sample") t = cmd_sample(ctx);
      else if (cfg.command == "qfi") t = cmd_qfi(ctx);
      else if (cfg.command == "parity") t = cmd_pointwise(ctx, Measurement::kParity);
      else t = cmd_pointwise(ctx, Measurement::kCounting);
      text = cfg.format == "json" ? render_json(t) : render_csv(t);
      if (!t.errors.empty()) {
        result.exit_code = 2;
        for (const auto& e : t.errors) result.error += "error: " + e + "\n";
      }
    }
    if (cfg.out.empty()) {
      result.output = text;
    } else {
      std::ofstream file(cfg.out, std::ios::binary);
      if (!file) throw Error("cannot write '" + cfg.out + "'");
      file << text;
    }
  } catch (const Error& e) {
    result.exit_code = 1;
    result.error += std::string("error: ") + e.what() + "\n";
  }
  return result;
}

}  // namespace phasecraft::cli
