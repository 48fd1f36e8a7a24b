#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "simplexmc/discrete_time.hpp"
#include "simplexmc/fixtures.hpp"
#include "simplexmc/io.hpp"
#include "simplexmc/meanfield.hpp"
#include "simplexmc/parallel.hpp"
#include "simplexmc/projection.hpp"
#include "simplexmc/semigroup.hpp"
#include "simplexmc/verify.hpp"
#include "simplexmc/version.hpp"

namespace simplexmc::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

/// Thrown for argument values that are wrong on their face (usage, exit 2),
/// as opposed to data or tolerance failures (exit 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string cell = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw UsageError(flag + ": bad number '" + cell + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

SimplexPoint parse_point(const std::string& text, const std::string& flag) {
  try {
    return SimplexPoint(parse_list(text, flag));
  } catch (const std::invalid_argument& err) {
    throw UsageError(flag + ": " + err.what());
  }
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Global knobs every subcommand shares. An optional JSON config file seeds
/// them; explicitly given flags win over the file.
struct Globals {
  std::string config_file;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out_dir;
  double tol = 1e-6;
  bool seed_from_flag = false;
  bool tol_from_flag = false;
  bool threads_from_flag = false;
  bool out_dir_from_flag = false;

  void load_config() {
    if (config_file.empty()) return;
    std::ifstream in(config_file);
    if (!in) throw UsageError("--config: cannot open " + config_file);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& err) {
      throw UsageError("--config: " + std::string(err.what()));
    }
    for (const auto& [key, value] : doc.items()) {
      if (key == "seed") {
        if (!seed_from_flag) seed = value.get<std::uint64_t>();
      } else if (key == "threads") {
        if (!threads_from_flag) threads = value.get<int>();
      } else if (key == "out_dir") {
        if (!out_dir_from_flag) out_dir = value.get<std::string>();
      } else if (key == "tol") {
        if (!tol_from_flag) tol = value.get<double>();
      } else {
        throw UsageError("--config: unknown key '" + key + "'");
      }
    }
  }

  /// Relative outputs land under out_dir (flag, config, or environment).
  std::string resolve(const std::string& path) const {
    fs::path p(path);
    if (!p.is_absolute() && !out_dir.empty()) p = fs::path(out_dir) / p;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p.string();
  }
};

void emit_run_manifest(std::uint64_t seed, const std::string& command,
                       std::vector<std::pair<std::string, std::string>> config,
                       const std::vector<std::string>& outputs) {
  if (outputs.empty()) return;
  write_manifest(outputs.front() + ".manifest.json", command, std::move(config), seed, outputs);
}

RateField make_field(const std::string& model, double beta, double h, double J, double rho,
                     const std::string& rates_file) {
  if (model == "glauber") return glauber_field(IsingParams{beta, h, J});
  if (model == "reedfrost") return reed_frost_field(ReedFrostParams{beta, rho});
  if (model == "custom") {
    if (rates_file.empty()) throw UsageError("--model custom requires --rates FILE");
    std::ifstream in(rates_file);
    if (!in) throw std::runtime_error("cannot open " + rates_file + " for reading");
    nlohmann::json doc = nlohmann::json::parse(in);
    int k = doc.at("k").get<int>();
    std::vector<double> rates = doc.at("rates").get<std::vector<double>>();
    return RateField::constant(k, std::move(rates));
  }
  throw UsageError("--model: unknown model '" + model + "'");
}

ordered_json matrix_rows(const StochasticMatrix& q) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < q.dim(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < q.dim(); ++j) row.push_back(q(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_json_or_stdout(const ordered_json& doc, const std::string& out) {
  if (out.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + out + " for writing");
  file << doc.dump(2) << '\n';
  file.flush();
  if (!file) throw std::runtime_error("write to " + out + " failed");
}

MatrixLawSampler make_sampler(const std::string& spec, int k) {
  if (spec == "identity") return MatrixLawSampler::identity(k);
  auto load = [](const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file + " for reading");
    return nlohmann::json::parse(in);
  };
  if (spec.rfind("fixed:", 0) == 0) {
    nlohmann::json doc = load(spec.substr(6));
    int dk = doc.at("k").get<int>();
    return MatrixLawSampler::fixed(StochasticMatrix(dk, doc.at("matrix").get<std::vector<double>>()));
  }
  if (spec.rfind("mix:", 0) == 0) {
    nlohmann::json doc = load(spec.substr(4));
    int dk = doc.at("k").get<int>();
    std::vector<StochasticMatrix> choices;
    for (const auto& flat : doc.at("matrices")) {
      choices.emplace_back(dk, flat.get<std::vector<double>>());
    }
    return MatrixLawSampler::mixture(std::move(choices),
                                     doc.at("weights").get<std::vector<double>>());
  }
  throw UsageError("--sampler: expected identity, fixed:FILE, or mix:FILE");
}

struct SimulateArgs {
  std::string model = "glauber";
  double beta = 1.0, h = 0.0, J = 1.0, rho = 1.0;
  std::string rates_file;
  std::string y0 = "1,0";
  int n = 1000;
  double horizon = 1.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool limit = false;
  double tol = 1e-8;
  std::string out;
};

int cmd_simulate(const Globals& g, const SimulateArgs& a) {
  if (a.n < 1) throw UsageError("--n: need at least one site");
  if (!(a.horizon > 0.0)) throw UsageError("--horizon: must be positive");
  RateField field = make_field(a.model, a.beta, a.h, a.J, a.rho, a.rates_file);
  SimplexPoint y0 = parse_point(a.y0, "--y0");
  if (y0.dim() != field.k()) {
    throw UsageError("--y0: expected " + std::to_string(field.k()) + " entries for this model");
  }
  std::uint64_t seed = a.seed_set ? a.seed : g.seed;
  EnsemblePath e = a.limit ? simulate_limit(field, a.n, y0, a.horizon, a.tol, seed)
                           : simulate_finite(field, a.n, y0, a.horizon, seed);
  std::string out = g.resolve(a.out);
  write_ensemble_jsonl(e, out);
  emit_run_manifest(seed, "simulate",
                    {{"model", a.model},
                     {"n", std::to_string(a.n)},
                     {"horizon", fmt(a.horizon)},
                     {"y0", a.y0},
                     {"limit", a.limit ? "true" : "false"}},
                    {out});
  return 0;
}

struct OdeArgs {
  std::string model = "glauber";
  double beta = 1.0, h = 0.0, J = 1.0, rho = 1.0;
  std::string rates_file;
  std::string y0 = "1,0";
  double horizon = 1.0;
  double tol = 1e-8;
  std::string times;
  std::string out;
};

int cmd_ode(const Globals& g, const OdeArgs& a) {
  if (!(a.horizon > 0.0)) throw UsageError("--horizon: must be positive");
  if (!(a.tol > 0.0)) throw UsageError("--tol: must be positive");
  RateField field = make_field(a.model, a.beta, a.h, a.J, a.rho, a.rates_file);
  SimplexPoint y0 = parse_point(a.y0, "--y0");
  if (y0.dim() != field.k()) {
    throw UsageError("--y0: expected " + std::to_string(field.k()) + " entries for this model");
  }
  std::vector<double> knots;
  if (!a.times.empty()) {
    knots = parse_list(a.times, "--times");
    for (double t : knots) {
      if (t < 0.0 || t > a.horizon) throw UsageError("--times: values must lie in [0, horizon]");
    }
  }
  SimplexPath path = solve_ode(field, y0, a.horizon, a.tol, knots);
  std::string out = g.resolve(a.out);
  if (knots.empty()) {
    write_path_csv(path, out);
  } else {
    // The CSV format starts at t = 0, so pin the initial state even when the
    // caller only asked for later times.
    knots.push_back(0.0);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    write_path_csv(path, knots, out);
  }
  emit_run_manifest(g.seed, "ode",
                    {{"model", a.model},
                     {"y0", a.y0},
                     {"horizon", fmt(a.horizon)},
                     {"tol", fmt(a.tol)}},
                    {out});
  return 0;
}

struct ProjectArgs {
  std::string in;
  std::string times;
  std::string side = "right";
  bool plot_data = false;
  std::string out;
};

int cmd_project(const Globals& g, const ProjectArgs& a) {
  std::vector<double> times = parse_list(a.times, "--times");
  for (double t : times) {
    if (t < 0.0) throw UsageError("--times: values must be nonnegative");
  }
  if (a.side != "right" && a.side != "left") throw UsageError("--side: expected right or left");
  Side side = a.side == "left" ? Side::Left : Side::Right;
  EnsemblePath e = read_ensemble_jsonl(a.in);
  for (double t : times) {
    if (t > e.horizon()) {
      throw UsageError("--times: values must lie in [0, " + fmt(e.horizon()) + "]");
    }
  }

  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  SimplexPath p = project(e, times, side);
  std::string out = g.resolve(a.out);
  write_path_csv(p, times, out);
  std::vector<std::string> outputs = {out};

  if (a.plot_data) {
    // Long-format companion for plotting tools: one (t, color, value) row
    // per coordinate.
    std::string plot = out + ".plot.csv";
    std::ofstream pf(plot, std::ios::binary);
    if (!pf) throw std::runtime_error("cannot open " + plot + " for writing");
    pf << "t,color,value\n";
    for (double t : times) {
      SimplexPoint y = p.at(t);
      for (int j = 0; j < p.dim(); ++j) {
        pf << fmt(t) << ',' << j << ',' << fmt(y[j]) << '\n';
      }
    }
    pf.flush();
    if (!pf) throw std::runtime_error("write to " + plot + " failed");
    outputs.push_back(plot);
  }
  emit_run_manifest(g.seed, "project", {{"in", a.in}, {"times", a.times}, {"side", a.side}}, outputs);
  return 0;
}

struct QhatArgs {
  std::string in;
  double s = 0.0, t = 0.0;
  std::string out;
};

int cmd_qhat(const Globals& g, const QhatArgs& a) {
  if (a.s < 0.0 || a.s > a.t) throw UsageError("--s/--t: need 0 <= s <= t");
  EnsemblePath e = read_ensemble_jsonl(a.in);
  if (a.t > e.horizon()) {
    throw UsageError("--t: must not exceed the horizon " + fmt(e.horizon()));
  }
  StochasticMatrix q = estimate_transition(e, a.s, a.t);
  std::vector<long long> pairs = pair_counts(e, a.s, a.t);
  ordered_json doc;
  doc["k"] = e.k();
  doc["s"] = a.s;
  doc["t"] = a.t;
  doc["rows"] = matrix_rows(q);
  ordered_json counts = ordered_json::array();
  for (int i = 0; i < e.k(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < e.k(); ++j) row.push_back(pairs[static_cast<std::size_t>(i) * e.k() + j]);
    counts.push_back(std::move(row));
  }
  doc["pair_counts"] = std::move(counts);
  std::string out = a.out.empty() ? a.out : g.resolve(a.out);
  write_json_or_stdout(doc, out);
  if (!out.empty()) {
    emit_run_manifest(g.seed, "qhat", {{"in", a.in}, {"s", fmt(a.s)}, {"t", fmt(a.t)}}, {out});
  }
  return 0;
}

struct JumpsArgs {
  std::string in;
  double theta = 0.05;
  std::string out;
};

int cmd_jumps(const Globals& g, const JumpsArgs& a) {
  if (!(a.theta > 0.0 && a.theta <= 1.0)) throw UsageError("--theta: must lie in (0, 1]");
  EnsemblePath e = read_ensemble_jsonl(a.in);
  DiscontinuityReport rep = classify_discontinuities(e, a.theta);
  ordered_json doc;
  doc["theta"] = rep.theta;
  doc["n"] = e.n();
  ordered_json entries = ordered_json::array();
  for (const Discontinuity& d : rep.entries) {
    ordered_json row;
    row["t"] = d.t;
    row["type2"] = d.type2;
    row["multi_warning"] = d.multi_warning;
    row["sites"] = d.sites;
    if (d.jump) row["jump"] = matrix_rows(*d.jump);
    if (d.pre) row["pre"] = d.pre->weights();
    if (d.post) row["post"] = d.post->weights();
    entries.push_back(std::move(row));
  }
  doc["entries"] = std::move(entries);
  std::string out = a.out.empty() ? a.out : g.resolve(a.out);
  write_json_or_stdout(doc, out);
  if (!out.empty()) {
    emit_run_manifest(g.seed, "jumps", {{"in", a.in}, {"theta", fmt(a.theta)}}, {out});
  }
  return 0;
}

struct SemigroupArgs {
  std::string path_csv;
  std::string interp = "linear";
  std::string grid;
  std::string table;
  double tol = 0.0;
  bool tol_set = false;
  int n = 1000;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  std::string report;
};

SimplexPath::Interp parse_interp(const std::string& text) {
  if (text == "step") return SimplexPath::Interp::Step;
  if (text == "linear") return SimplexPath::Interp::Linear;
  throw UsageError("--interp: expected step or linear");
}

int cmd_semigroup_build(const Globals& g, const SemigroupArgs& a) {
  SimplexPath p = read_path_csv(a.path_csv, parse_interp(a.interp));
  std::vector<double> grid = parse_list(a.grid, "--grid");
  SemigroupTable tab = build_minimal_semigroup(p, std::move(grid));
  std::string out = g.resolve(a.out);
  write_semigroup_json(tab, out);
  emit_run_manifest(g.seed, "semigroup build",
                    {{"path", a.path_csv}, {"interp", a.interp}, {"grid", a.grid}}, {out});
  return 0;
}

int cmd_semigroup_check(const Globals& g, const SemigroupArgs& a) {
  SemigroupTable tab = read_semigroup_json(a.table);
  SimplexPath p = read_path_csv(a.path_csv, parse_interp(a.interp));
  double tol = a.tol_set ? a.tol : g.tol;
  SemigroupCheckReport rep = check_semigroup(tab, p, tol);
  ordered_json doc;
  doc["tol"] = rep.tol;
  doc["cocycle_residual"] = rep.cocycle_residual;
  doc["compatibility_residual"] = rep.compatibility_residual;
  doc["minimality_gap"] = rep.minimality_gap;
  ordered_json bad = ordered_json::array();
  for (const auto& triple : rep.subadditivity_violations) {
    bad.push_back({triple[0], triple[1], triple[2]});
  }
  doc["subadditivity_violations"] = std::move(bad);
  doc["pass"] = rep.pass();
  std::string report = a.report.empty() ? a.report : g.resolve(a.report);
  write_json_or_stdout(doc, report);
  if (!report.empty()) {
    emit_run_manifest(g.seed, "semigroup check",
                      {{"table", a.table}, {"path", a.path_csv}, {"tol", fmt(tol)}}, {report});
  }
  return rep.pass() ? 0 : 1;
}

int cmd_semigroup_sample(const Globals& g, const SemigroupArgs& a) {
  if (a.n < 1) throw UsageError("--n: need at least one site");
  SemigroupTable tab = read_semigroup_json(a.table);
  if (!tab.y0()) {
    throw std::runtime_error(a.table + ": table has no y0 marginal to start the chain from");
  }
  std::uint64_t seed = a.seed_set ? a.seed : g.seed;
  EnsemblePath e = sample_inhomogeneous_chain(tab, *tab.y0(), a.n, seed);
  std::string out = g.resolve(a.out);
  write_ensemble_jsonl(e, out);
  emit_run_manifest(seed, "semigroup sample", {{"table", a.table}, {"n", std::to_string(a.n)}},
                    {out});
  return 0;
}

struct DiscreteArgs {
  std::string sampler = "identity";
  std::string y0;
  int n = 1000;
  int steps = 10;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool record_colors = false;
  std::string out_trace;
  std::string out_ensemble;
};

int cmd_discrete(const Globals& g, const DiscreteArgs& a) {
  if (a.n < 1) throw UsageError("--n: need at least one site");
  if (a.steps < 1) throw UsageError("--steps: need at least one step");
  SimplexPoint y0 = parse_point(a.y0, "--y0");
  MatrixLawSampler law = make_sampler(a.sampler, y0.dim());
  if (law.dim() != y0.dim()) {
    throw UsageError("--sampler: matrix dimension disagrees with --y0");
  }
  std::uint64_t seed = a.seed_set ? a.seed : g.seed;
  auto [trace, e] = simulate_discrete(law, y0, a.n, a.steps, seed, a.record_colors);

  std::string out_trace = g.resolve(a.out_trace);
  ordered_json doc;
  doc["k"] = trace.k;
  doc["y0"] = trace.y0.weights();
  ordered_json marginals = ordered_json::array();
  for (const SimplexPoint& y : trace.marginals) marginals.push_back(y.weights());
  doc["marginals"] = std::move(marginals);
  ordered_json drawn = ordered_json::array();
  for (const StochasticMatrix& q : trace.drawn) drawn.push_back(matrix_rows(q));
  doc["drawn"] = std::move(drawn);
  if (a.record_colors) doc["colors"] = trace.colors;
  write_json_or_stdout(doc, out_trace);

  std::string out_ensemble = g.resolve(a.out_ensemble);
  write_ensemble_jsonl(e, out_ensemble);
  emit_run_manifest(seed, "discrete",
                    {{"sampler", a.sampler},
                     {"y0", a.y0},
                     {"n", std::to_string(a.n)},
                     {"steps", std::to_string(a.steps)}},
                    {out_trace, out_ensemble});
  return 0;
}

struct FixturesArgs {
  std::string subject;
  int n = 1000;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double y0 = 0.75;
  double p = 0.25;
  double horizon = 2.0;
  std::string out;
};

int cmd_fixtures(const Globals& g, const FixturesArgs& a) {
  if (a.n < 1) throw UsageError("--n: need at least one site");
  std::uint64_t seed = a.seed_set ? a.seed : g.seed;
  auto stem = [&](const std::string& suffix) {
    std::string base = a.out;
    if (base.size() > 6 && base.substr(base.size() - 6) == ".jsonl") {
      base = base.substr(0, base.size() - 6);
    }
    return g.resolve(base + suffix + ".jsonl");
  };

  if (a.subject == "cantor") {
    EnsemblePath e = singular_clock_process(MonotoneClock::cantor(), a.n, seed);
    std::string out = g.resolve(a.out);
    write_ensemble_jsonl(e, out);
    emit_run_manifest(seed, "fixtures", {{"subject", a.subject}, {"n", std::to_string(a.n)}}, {out});
    return 0;
  }
  if (a.subject == "threshold") {
    if (!(a.y0 >= 0.0 && a.y0 <= 1.0)) throw UsageError("--y0: must lie in [0,1]");
    EnsemblePath e = threshold_process(a.y0, a.n, seed, a.horizon);
    std::string out = g.resolve(a.out);
    write_ensemble_jsonl(e, out);
    emit_run_manifest(seed, "fixtures",
                      {{"subject", a.subject}, {"y0", fmt(a.y0)}, {"n", std::to_string(a.n)}},
                      {out});
    return 0;
  }
  if (a.subject == "recolor-pair") {
    auto [x, z] = poisson_recolor_pair(a.n, a.horizon, seed);
    std::string out_x = stem("_x"), out_z = stem("_z");
    write_ensemble_jsonl(x, out_x);
    write_ensemble_jsonl(z, out_z);
    emit_run_manifest(seed, "fixtures",
                      {{"subject", a.subject},
                       {"n", std::to_string(a.n)},
                       {"horizon", fmt(a.horizon)}},
                      {out_x, out_z});
    return 0;
  }
  if (a.subject == "feller-pair") {
    if (!(a.p > 0.0 && a.p < 0.5)) throw UsageError("--p: must lie in (0, 1/2)");
    auto [still, moving] = feller_degenerate_pair(a.p, a.n, a.horizon, seed);
    std::string out_a = stem("_still"), out_b = stem("_moving");
    write_ensemble_jsonl(still, out_a);
    write_ensemble_jsonl(moving, out_b);
    emit_run_manifest(seed, "fixtures",
                      {{"subject", a.subject},
                       {"p", fmt(a.p)},
                       {"n", std::to_string(a.n)},
                       {"horizon", fmt(a.horizon)}},
                      {out_a, out_b});
    return 0;
  }
  throw UsageError("fixtures: expected cantor, threshold, recolor-pair, or feller-pair");
}

struct VerifyArgs {
  bool quick = false;
  std::string report;
};

int cmd_verify_all(const Globals& g, const VerifyArgs& a) {
  AcceptanceOptions opt;
  opt.seed = g.seed;
  opt.quick = a.quick;
  opt.out_dir = g.out_dir;
  opt.threads = g.threads;
  std::vector<CriterionResult> results = run_acceptance(opt);

  bool all = true;
  for (const CriterionResult& r : results) {
    all = all && r.pass;
    char line[512];
    std::snprintf(line, sizeof line, "[%s] criterion %d: %s (%.2fs) %s", r.pass ? "PASS" : "FAIL",
                  r.id, r.name.c_str(), r.seconds, r.detail.c_str());
    std::cout << line << '\n';
  }
  std::cout << (all ? "all criteria passed" : "some criteria FAILED") << '\n';

  if (!a.report.empty()) {
    ordered_json doc;
    doc["seed"] = g.seed;
    doc["quick"] = a.quick;
    ordered_json rows = ordered_json::array();
    for (const CriterionResult& r : results) {
      ordered_json row;
      row["id"] = r.id;
      row["name"] = r.name;
      row["pass"] = r.pass;
      row["seconds"] = r.seconds;
      row["detail"] = r.detail;
      rows.push_back(std::move(row));
    }
    doc["criteria"] = std::move(rows);
    doc["pass"] = all;
    std::string report = g.resolve(a.report);
    write_json_or_stdout(doc, report);
    emit_run_manifest(g.seed, "verify-all", {{"quick", a.quick ? "true" : "false"}}, {report});
  }
  return all ? 0 : 1;
}

}

int run(const std::vector<std::string>& args) {
  CLI::App app{"exchangeable color dynamics: simulate, project, and audit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Globals g;
  if (const char* env = std::getenv("SIMPLEXMC_OUT_DIR"); env && *env) g.out_dir = env;

  app.add_option("--config", g.config_file, "JSON file with global defaults (seed, threads, out_dir, tol)");
  auto* seed_opt = app.add_option("--seed", g.seed, "master seed");
  auto* threads_opt = app.add_option("--threads", g.threads, "worker cap (0 = hardware)");
  auto* outdir_opt = app.add_option("--out-dir", g.out_dir, "directory for relative outputs");
  auto* tol_opt = app.add_option("--tol", g.tol, "default tolerance for checks");

  SimulateArgs sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "run the finite interacting system");
  c_sim->add_option("--model", sim.model, "glauber, reedfrost, or custom")->required();
  c_sim->add_option("--beta", sim.beta, "inverse temperature / infection rate");
  c_sim->add_option("--field", sim.h, "external field strength (glauber)");
  c_sim->add_option("--J", sim.J, "pair coupling (glauber)");
  c_sim->add_option("--rho", sim.rho, "recovery rate (reedfrost)");
  c_sim->add_option("--rates", sim.rates_file, "JSON constant-rate matrix (custom)");
  c_sim->add_option("--y0", sim.y0, "initial marginal, comma-separated")->required();
  c_sim->add_option("--n", sim.n, "site count")->required();
  c_sim->add_option("--horizon", sim.horizon, "time horizon")->required();
  auto* sim_seed = c_sim->add_option("--seed", sim.seed, "run seed");
  c_sim->add_flag("--limit", sim.limit, "sample i.i.d. coordinates against the fluid limit");
  c_sim->add_option("--tol", sim.tol, "ODE tolerance when --limit is set");
  c_sim->add_option("--out", sim.out, "output event stream (.jsonl)")->required();

  OdeArgs ode;
  CLI::App* c_ode = app.add_subcommand("ode", "integrate the fluid limit");
  c_ode->add_option("--model", ode.model, "glauber, reedfrost, or custom")->required();
  c_ode->add_option("--beta", ode.beta, "inverse temperature / infection rate");
  c_ode->add_option("--field", ode.h, "external field strength (glauber)");
  c_ode->add_option("--J", ode.J, "pair coupling (glauber)");
  c_ode->add_option("--rho", ode.rho, "recovery rate (reedfrost)");
  c_ode->add_option("--rates", ode.rates_file, "JSON constant-rate matrix (custom)");
  c_ode->add_option("--y0", ode.y0, "initial point, comma-separated")->required();
  c_ode->add_option("--horizon", ode.horizon, "time horizon")->required();
  c_ode->add_option("--tol", ode.tol, "integrator tolerance");
  c_ode->add_option("--times", ode.times, "comma-separated output times (default: accepted steps)");
  c_ode->add_option("--out", ode.out, "output time series (.csv)")->required();

  ProjectArgs prj;
  CLI::App* c_prj = app.add_subcommand("project", "occupancy fractions of an event stream");
  c_prj->add_option("--in", prj.in, "input event stream (.jsonl)")->required();
  c_prj->add_option("--times", prj.times, "comma-separated sample times")->required();
  c_prj->add_option("--side", prj.side, "right (default) or left limits");
  c_prj->add_flag("--emit-plot-data", prj.plot_data, "also write a long-format csv");
  c_prj->add_option("--out", prj.out, "output time series (.csv)")->required();

  QhatArgs qh;
  CLI::App* c_qh = app.add_subcommand("qhat", "empirical transition matrix between two times");
  c_qh->add_option("--in", qh.in, "input event stream (.jsonl)")->required();
  c_qh->add_option("--s", qh.s, "start time")->required();
  c_qh->add_option("--t", qh.t, "end time")->required();
  c_qh->add_option("--out", qh.out, "write the JSON here instead of stdout");

  JumpsArgs jm;
  CLI::App* c_jm = app.add_subcommand("jumps", "classify simultaneous-flip discontinuities");
  c_jm->add_option("--in", jm.in, "input event stream (.jsonl)")->required();
  c_jm->add_option("--theta", jm.theta, "type-II threshold as a fraction of n");
  c_jm->add_option("--out", jm.out, "write the JSON report here instead of stdout");

  SemigroupArgs sg;
  CLI::App* c_sg = app.add_subcommand("semigroup", "build, check, or sample transport tables");
  c_sg->require_subcommand(1);
  CLI::App* c_sgb = c_sg->add_subcommand("build", "minimal table of a path over a grid");
  c_sgb->add_option("--path", sg.path_csv, "input time series (.csv)")->required();
  c_sgb->add_option("--interp", sg.interp, "step or linear reading of the csv");
  c_sgb->add_option("--grid", sg.grid, "comma-separated grid times")->required();
  c_sgb->add_option("--out", sg.out, "output table (.json)")->required();
  CLI::App* c_sgc = c_sg->add_subcommand("check", "audit a table against a path");
  c_sgc->add_option("--table", sg.table, "table to audit (.json)")->required();
  c_sgc->add_option("--path", sg.path_csv, "path the table claims to represent (.csv)")->required();
  c_sgc->add_option("--interp", sg.interp, "step or linear reading of the csv");
  auto* sgc_tol = c_sgc->add_option("--tol", sg.tol, "acceptance tolerance");
  c_sgc->add_option("--report", sg.report, "write the JSON report here as well");
  CLI::App* c_sgs = c_sg->add_subcommand("sample", "drive i.i.d. coordinates through a table");
  c_sgs->add_option("--table", sg.table, "table to sample from (.json)")->required();
  c_sgs->add_option("--n", sg.n, "site count")->required();
  auto* sgs_seed = c_sgs->add_option("--seed", sg.seed, "run seed");
  c_sgs->add_option("--out", sg.out, "output event stream (.jsonl)")->required();

  DiscreteArgs dc;
  CLI::App* c_dc = app.add_subcommand("discrete", "random-environment chain in discrete time");
  c_dc->add_option("--sampler", dc.sampler, "identity, fixed:FILE, or mix:FILE")->required();
  c_dc->add_option("--y0", dc.y0, "initial marginal, comma-separated")->required();
  c_dc->add_option("--n", dc.n, "site count")->required();
  c_dc->add_option("--steps", dc.steps, "step count")->required();
  auto* dc_seed = c_dc->add_option("--seed", dc.seed, "run seed");
  c_dc->add_flag("--record-colors", dc.record_colors, "store full color rows in the trace");
  c_dc->add_option("--out-trace", dc.out_trace, "output trace (.json)")->required();
  c_dc->add_option("--out-ensemble", dc.out_ensemble, "output event stream (.jsonl)")->required();

  FixturesArgs fx;
  CLI::App* c_fx = app.add_subcommand("fixtures", "canonical counterexample processes");
  c_fx->add_option("subject", fx.subject, "cantor, threshold, recolor-pair, or feller-pair")
      ->required();
  c_fx->add_option("--n", fx.n, "site count")->required();
  auto* fx_seed = c_fx->add_option("--seed", fx.seed, "run seed");
  c_fx->add_option("--y0", fx.y0, "initial one-fraction (threshold)");
  c_fx->add_option("--p", fx.p, "stationary zero-fraction (feller-pair)");
  c_fx->add_option("--horizon", fx.horizon, "time horizon (where applicable)");
  c_fx->add_option("--out", fx.out, "output event stream (.jsonl), pairs get suffixes")
      ->required();

  VerifyArgs vf;
  CLI::App* c_vf = app.add_subcommand("verify-all", "run the acceptance gate");
  c_vf->add_flag("--quick", vf.quick, "reduced populations and replicate counts");
  c_vf->add_option("--report", vf.report, "also write the results as JSON");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("simplexmc");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\nrun 'simplexmc --help' for usage\n";
    return 2;
  }

  g.seed_from_flag = seed_opt->count() > 0;
  g.threads_from_flag = threads_opt->count() > 0;
  g.out_dir_from_flag = outdir_opt->count() > 0;
  g.tol_from_flag = tol_opt->count() > 0;
  sim.seed_set = sim_seed->count() > 0;
  sg.seed_set = sgs_seed->count() > 0;
  sg.tol_set = sgc_tol->count() > 0;
  dc.seed_set = dc_seed->count() > 0;
  fx.seed_set = fx_seed->count() > 0;

  try {
    g.load_config();
    if (g.threads > 0) set_max_threads(g.threads);

    if (c_sim->parsed()) return cmd_simulate(g, sim);
    if (c_ode->parsed()) return cmd_ode(g, ode);
    if (c_prj->parsed()) return cmd_project(g, prj);
    if (c_qh->parsed()) return cmd_qhat(g, qh);
    if (c_jm->parsed()) return cmd_jumps(g, jm);
    if (c_sg->parsed()) {
      if (c_sgb->parsed()) return cmd_semigroup_build(g, sg);
      if (c_sgc->parsed()) return cmd_semigroup_check(g, sg);
      return cmd_semigroup_sample(g, sg);
    }
    if (c_dc->parsed()) return cmd_discrete(g, dc);
    if (c_fx->parsed()) return cmd_fixtures(g, fx);
    if (c_vf->parsed()) return cmd_verify_all(g, vf);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    nlohmann::json report;
    report["error"] = err.what();
    std::cout << report.dump(2) << '\n';
    return 1;
  }
}

}
