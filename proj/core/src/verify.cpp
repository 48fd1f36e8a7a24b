#include "simplexmc/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "simplexmc/discrete_time.hpp"
#include "simplexmc/fixtures.hpp"
#include "simplexmc/io.hpp"
#include "simplexmc/meanfield.hpp"
#include "simplexmc/parallel.hpp"
#include "simplexmc/projection.hpp"
#include "simplexmc/rng.hpp"
#include "simplexmc/semigroup.hpp"

namespace simplexmc {

namespace {

namespace fs = std::filesystem;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

SimplexPoint dirichlet2(Rng& rng, int k) {
  // Gamma(2) weights via sums of two exponentials; concentrates the draws
  // away from the boundary so segment transports stay well conditioned.
  std::vector<double> w(k);
  for (double& wi : w) wi = rng.exponential(1.0) + rng.exponential(1.0);
  double total = 0.0;
  for (double wi : w) total += wi;
  for (double& wi : w) wi /= total;
  return SimplexPoint(std::move(w));
}

// Reference transport: integrate dM/du = M R(v, y(u)) along the segment with
// classical fourth-order steps, doubling the step count until stable. Kept
// independent of transport_linear on purpose; the two must meet in the middle.
std::vector<double> integrate_transport(const SimplexPoint& y, const SimplexPoint& y2) {
  int k = y.dim();
  double length = tv_distance(y, y2);
  std::vector<double> eye(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) eye[static_cast<std::size_t>(i) * k + i] = 1.0;
  if (length <= 1e-15) return eye;

  std::vector<double> v(k);
  for (int i = 0; i < k; ++i) v[i] = (y2[i] - y[i]) / length;

  auto deriv = [&](const std::vector<double>& m, double u) {
    std::vector<double> w(k);
    for (int i = 0; i < k; ++i) w[i] = y[i] + (u / length) * (y2[i] - y[i]);
    GeneratorMatrix r = rate_matrix(v, SimplexPoint(std::move(w)));
    std::vector<double> out(static_cast<std::size_t>(k) * k, 0.0);
    for (int i = 0; i < k; ++i) {
      for (int l = 0; l < k; ++l) {
        double mil = m[static_cast<std::size_t>(i) * k + l];
        if (mil == 0.0) continue;
        for (int j = 0; j < k; ++j) out[static_cast<std::size_t>(i) * k + j] += mil * r(l, j);
      }
    }
    return out;
  };

  auto rk4 = [&](int steps) {
    std::vector<double> m = eye;
    double h = length / steps;
    std::vector<double> tmp(m.size());
    for (int s = 0; s < steps; ++s) {
      double u = s * h;
      std::vector<double> k1 = deriv(m, u);
      for (std::size_t i = 0; i < m.size(); ++i) tmp[i] = m[i] + 0.5 * h * k1[i];
      std::vector<double> k2 = deriv(tmp, u + 0.5 * h);
      for (std::size_t i = 0; i < m.size(); ++i) tmp[i] = m[i] + 0.5 * h * k2[i];
      std::vector<double> k3 = deriv(tmp, u + 0.5 * h);
      for (std::size_t i = 0; i < m.size(); ++i) tmp[i] = m[i] + h * k3[i];
      std::vector<double> k4 = deriv(tmp, u + h);
      for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
    }
    return m;
  };

  std::vector<double> prev = rk4(256);
  for (int steps = 512; steps <= (1 << 18); steps *= 2) {
    std::vector<double> cur = rk4(steps);
    double diff = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) diff = std::max(diff, std::abs(cur[i] - prev[i]));
    prev = std::move(cur);
    if (diff < 1e-9) break;
  }
  return prev;
}

using Body = std::function<bool(std::string&)>;

CriterionResult run_criterion(int id, std::string name, const Body& body) {
  CriterionResult res;
  res.id = id;
  res.name = std::move(name);
  auto t0 = std::chrono::steady_clock::now();
  try {
    res.pass = body(res.detail);
  } catch (const std::exception& err) {
    res.pass = false;
    res.detail = std::string("exception: ") + err.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

double frequency(const EnsemblePath& e, double t, int color) {
  return static_cast<double>(e.counts_at(t)[color]) / e.n();
}

bool pair_count_identities(const EnsemblePath& e, const std::vector<double>& grid,
                           std::string& why) {
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    double s = grid[g], t = grid[g + 1];
    std::vector<long long> pairs = pair_counts(e, s, t);
    std::vector<long long> at_s = e.counts_at(s), at_t = e.counts_at(t);
    int k = e.k();
    for (int i = 0; i < k; ++i) {
      long long row = 0, col = 0;
      for (int j = 0; j < k; ++j) {
        row += pairs[static_cast<std::size_t>(i) * k + j];
        col += pairs[static_cast<std::size_t>(j) * k + i];
      }
      if (row != at_s[i] || col != at_t[i]) {
        why = "count identity broken at [" + fmt(s) + "," + fmt(t) + "] color " +
              std::to_string(i);
        return false;
      }
    }
  }
  return true;
}

}

std::vector<std::string> emit_bundle(const std::string& dir, std::uint64_t seed) {
  fs::create_directories(dir);
  std::vector<std::string> files;
  auto emit = [&](const std::string& name) {
    files.push_back((fs::path(dir) / name).string());
    return files.back();
  };

  std::vector<double> grid;
  for (int g = 0; g <= 20; ++g) grid.push_back(g * 0.05);

  // Coordinate-parallel simulation, the part most exposed to worker count.
  RateField glauber = glauber_field(IsingParams{1.0, 0.1, 0.5});
  EnsemblePath limit = simulate_limit(glauber, 4000, SimplexPoint({0.6, 0.4}), 1.0, 1e-8, seed);
  write_ensemble_jsonl(limit, emit("limit_glauber.jsonl"));

  SimplexPath ode =
      solve_ode(reed_frost_field(ReedFrostParams{2.0, 1.0}), SimplexPoint({0.9, 0.1, 0.0}), 1.0,
                1e-10, grid);
  write_path_csv(ode, grid, emit("reedfrost_ode.csv"));

  write_path_csv(project(limit, grid), grid, emit("limit_projection.csv"));

  std::vector<PathFixture> corpus = fixture_path_corpus();
  const PathFixture& ramp = corpus[1];
  SemigroupTable table = build_minimal_semigroup(ramp.path, ramp.grid);
  write_semigroup_json(table, emit("ramp_table.json"));

  EnsemblePath chain = sample_inhomogeneous_chain(table, *table.y0(), 4000, seed + 1);
  write_ensemble_jsonl(chain, emit("ramp_chain.jsonl"));

  MatrixLawSampler law = MatrixLawSampler::mixture(
      {StochasticMatrix(2, {0.9, 0.1, 0.2, 0.8}), StochasticMatrix(2, {0.5, 0.5, 0.5, 0.5})},
      {0.7, 0.3});
  auto discrete = simulate_discrete(law, SimplexPoint({0.3, 0.7}), 2000, 6, seed + 2);
  write_ensemble_jsonl(discrete.second, emit("discrete_chain.jsonl"));

  std::string manifest = (fs::path(dir) / "manifest.json").string();
  write_manifest(manifest, "emit-bundle",
                 {{"models", "glauber,reedfrost,ramp,mixture"},
                  {"sites", "4000"},
                  {"horizon", "1"}},
                 seed, files);
  files.push_back(manifest);
  return files;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  std::vector<CriterionResult> results;
  const int n_big = opt.quick ? 2000 : 10000;
  const double noise = 5.0 / std::sqrt(static_cast<double>(n_big));

  results.push_back(run_criterion(1, "fluid limit tracks the constant-rate ODE", [&](std::string& detail) {
    RateField field = RateField::constant(2, {0.0, 1.0, 1.0, 0.0});
    SimplexPoint y0({1.0, 0.0});
    std::vector<double> grid;
    for (int g = 1; g <= 20; ++g) grid.push_back(g / 20.0);
    SimplexPath ode = solve_ode(field, y0, 1.0, 1e-10, grid);
    double closed = 0.5 * (1.0 - std::exp(-2.0));
    double ode_err = std::abs(ode.at(1.0)[1] - closed);

    int runs = opt.quick ? 30 : 100;
    int need = opt.quick ? 27 : 95;
    int ok = 0;
    for (int r = 0; r < runs; ++r) {
      EnsemblePath e =
          simulate_finite(field, n_big, y0, 1.0, opt.seed + 1000003ULL * (r + 1));
      double worst = 0.0;
      for (double t : grid) worst = std::max(worst, std::abs(frequency(e, t, 1) - ode.at(t)[1]));
      if (worst <= 0.05) ++ok;
    }
    detail = "ode_err=" + fmt(ode_err) + ", runs_ok=" + std::to_string(ok) + "/" +
             std::to_string(runs);
    return ode_err <= 1e-8 && ok >= need;
  }));

  results.push_back(run_criterion(2, "constructed tables satisfy the semigroup contract", [&](std::string& detail) {
    bool pass = true;
    double worst_compat = 0.0, worst_gap = 0.0;
    for (const PathFixture& fx : fixture_path_corpus()) {
      SemigroupTable tab = build_minimal_semigroup(fx.path, fx.grid);
      SemigroupCheckReport rep = check_semigroup(tab, fx.path, 1e-6);
      worst_compat = std::max(worst_compat, rep.compatibility_residual);
      worst_gap = std::max(worst_gap, rep.minimality_gap);
      if (!rep.pass()) {
        pass = false;
        detail = fx.name + ": compat=" + fmt(rep.compatibility_residual) +
                 ", gap=" + fmt(rep.minimality_gap) +
                 ", cocycle=" + fmt(rep.cocycle_residual) + ", subadd_violations=" +
                 std::to_string(rep.subadditivity_violations.size());
      }
    }
    if (pass) detail = "worst compat=" + fmt(worst_compat) + ", worst gap=" + fmt(worst_gap);
    return pass;
  }));

  results.push_back(run_criterion(3, "closed-form jump transport matches integration", [&](std::string& detail) {
    double worst = 0.0;
    for (int k = 2; k <= 3; ++k) {
      Rng rng = Rng::stream(opt.seed, streams::kInit, 300 + static_cast<std::uint64_t>(k));
      for (int trial = 0; trial < 100; ++trial) {
        SimplexPoint a = dirichlet2(rng, k), b = dirichlet2(rng, k);
        StochasticMatrix closed = jump_transport_matrix(a, b);
        std::vector<double> integrated = integrate_transport(a, b);
        for (int i = 0; i < k; ++i) {
          for (int j = 0; j < k; ++j) {
            worst = std::max(worst,
                             std::abs(closed(i, j) - integrated[static_cast<std::size_t>(i) * k + j]));
          }
        }
      }
    }
    detail = "worst entry gap=" + fmt(worst) + " over 200 segments";
    return worst <= 1e-6;
  }));

  results.push_back(run_criterion(4, "sampled chains recover their table factors", [&](std::string& detail) {
    double worst = 0.0;
    std::string worst_name = "-";
    for (const PathFixture& fx : fixture_path_corpus()) {
      SemigroupTable tab = build_minimal_semigroup(fx.path, fx.grid);
      EnsemblePath e =
          sample_inhomogeneous_chain(tab, *tab.y0(), n_big, opt.seed ^ 0x4444ULL);
      for (int s = 0; s < tab.steps(); ++s) {
        StochasticMatrix qhat = estimate_transition(e, tab.grid()[s], tab.grid()[s + 1]);
        std::vector<long long> occupancy = e.counts_at(tab.grid()[s]);
        for (int i = 0; i < tab.dim(); ++i) {
          if (occupancy[i] == 0) continue;
          for (int j = 0; j < tab.dim(); ++j) {
            double gap = std::abs(qhat(i, j) - tab.factors()[s](i, j));
            if (gap > worst) {
              worst = gap;
              worst_name = fx.name;
            }
          }
        }
      }
    }
    detail = "worst supported-row gap=" + fmt(worst) + " (" + worst_name + "), bound=" +
             fmt(noise);
    return worst <= noise;
  }));

  results.push_back(run_criterion(5, "same marginals, provably different transports", [&](std::string& detail) {
    auto [x, z] = poisson_recolor_pair(n_big, 3.0, opt.seed ^ 0x5555ULL);
    DiscontinuityReport jumps = classify_discontinuities(x, 0.05);
    std::vector<double> times;
    for (const Discontinuity& d : jumps.entries) {
      if (d.type2) times.push_back(d.t);
    }
    if (times.empty()) {
      detail = "no shared jumps before the horizon";
      return false;
    }
    double worst_marginal = 0.0, least_row_gap = 1.0;
    double worst_tx = 0.0, worst_tz = 0.0;
    double prev = 0.0;
    for (double t : times) {
      worst_marginal = std::max(worst_marginal, std::abs(frequency(x, t, 1) - frequency(z, t, 1)));
      StochasticMatrix qx = estimate_jump_transition(x, t);
      StochasticMatrix qz = estimate_jump_transition(z, t);
      double row_gap = 0.0;
      for (int i = 0; i < 2; ++i) {
        double gap = std::max(std::abs(qx(i, 0) - qz(i, 0)), std::abs(qx(i, 1) - qz(i, 1)));
        row_gap = std::max(row_gap, gap);
      }
      least_row_gap = std::min(least_row_gap, row_gap);
      worst_tx = std::max(worst_tx, std::abs(mass_transfer(x, prev, t) - 1.0 / 3.0));
      worst_tz = std::max(worst_tz, std::abs(mass_transfer(z, prev, t) - 5.0 / 9.0));
      prev = t;
    }
    detail = std::to_string(times.size()) + " jumps, marginal gap=" + fmt(worst_marginal) +
             ", least row gap=" + fmt(least_row_gap) + ", transfer errs=" + fmt(worst_tx) + "/" +
             fmt(worst_tz);
    return worst_marginal <= noise && least_row_gap >= 0.2 && worst_tx <= noise && worst_tz <= noise;
  }));

  results.push_back(run_criterion(6, "flow map splits across the threshold", [&](std::string& detail) {
    EnsemblePath hi = threshold_process(0.501, n_big, opt.seed ^ 0x6666ULL);
    EnsemblePath lo = threshold_process(0.499, n_big, (opt.seed ^ 0x6666ULL) + 1);
    double gap = frequency(hi, 1.0, 1) - frequency(lo, 1.0, 1);
    detail = "gap at t=1 is " + fmt(gap) + " (limit 0.632)";
    return gap >= 0.55;
  }));

  results.push_back(run_criterion(7, "singular clock: staircase marginals, unit variation", [&](std::string& detail) {
    EnsemblePath e = singular_clock_process(MonotoneClock::cantor(), n_big, opt.seed ^ 0x7777ULL);
    const double probes[4] = {1.0 / 9.0, 1.0 / 3.0, 0.5, 2.0 / 3.0};
    const double wants[4] = {0.25, 0.5, 0.5, 0.5};
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      worst = std::max(worst, std::abs(frequency(e, probes[i], 1) - wants[i]));
    }
    double tv = 0.0;
    for (const PathFixture& fx : fixture_path_corpus()) {
      if (fx.name == "cantor") tv = path_total_variation(fx.path, 0.0, 1.0);
    }
    detail = "worst probe gap=" + fmt(worst) + ", limit path tv=" + fmt(tv);
    return worst <= 0.05 && std::abs(tv - 1.0) <= 1e-6;
  }));

  results.push_back(run_criterion(8, "constant-field flow is a stationary cocycle", [&](std::string& detail) {
    RateField field = RateField::constant(2, {0.0, 1.0, 1.0, 0.0});
    std::vector<double> grid;
    for (int g = 0; g <= 10; ++g) grid.push_back(g * 0.1);
    FellerFlowReport rep = feller_flow_check(field, 1.0, grid);
    detail = "cocycle=" + fmt(rep.cocycle_dev) + ", stationarity=" + fmt(rep.stationarity_dev) +
             ", identity defect=" + fmt(rep.identity_dev) + ", |Q-I| at 1e-3 gap=" +
             fmt(rep.shrink_norms.back()) + ", ode gap=" + fmt(rep.ode_compat_dev);
    return rep.pass(1e-9) && rep.shrink_norms.back() <= 0.01 && rep.ode_compat_dev <= 1e-6;
  }));

  results.push_back(run_criterion(9, "empirical identities hold with zero error", [&](std::string& detail) {
    int n = opt.quick ? 500 : 2000;
    std::vector<std::pair<std::string, EnsemblePath>> ensembles;
    ensembles.emplace_back("glauber", simulate_finite(glauber_field(IsingParams{1.0, 0.2, 1.0}), n,
                                                      SimplexPoint({0.5, 0.5}), 1.0,
                                                      opt.seed ^ 0x9101ULL));
    ensembles.emplace_back("reedfrost",
                           simulate_finite(reed_frost_field(ReedFrostParams{2.0, 1.0}), n,
                                           SimplexPoint({0.9, 0.1, 0.0}), 2.0,
                                           opt.seed ^ 0x9102ULL));
    ensembles.emplace_back("limit", simulate_limit(glauber_field(IsingParams{1.0, 0.0, 1.0}), n,
                                                   SimplexPoint({0.7, 0.3}), 1.0, 1e-8,
                                                   opt.seed ^ 0x9103ULL));
    auto pair_xz = poisson_recolor_pair(n, 2.0, opt.seed ^ 0x9104ULL);
    ensembles.emplace_back("recolor_x", std::move(pair_xz.first));
    ensembles.emplace_back("recolor_z", std::move(pair_xz.second));
    auto pair_ab = feller_degenerate_pair(0.2, n, 2.0, opt.seed ^ 0x9105ULL);
    ensembles.emplace_back("degenerate_a", std::move(pair_ab.first));
    ensembles.emplace_back("degenerate_b", std::move(pair_ab.second));
    ensembles.emplace_back("clock",
                           singular_clock_process(MonotoneClock::cantor(), n, opt.seed ^ 0x9106ULL));
    ensembles.emplace_back("threshold", threshold_process(0.3, n, opt.seed ^ 0x9107ULL));

    for (const auto& [name, e] : ensembles) {
      std::vector<double> grid;
      for (int g = 0; g <= 8; ++g) grid.push_back(e.horizon() * g / 8.0);
      std::string why;
      if (!pair_count_identities(e, grid, why)) {
        detail = name + ": " + why;
        return false;
      }
    }

    MatrixLawSampler law = MatrixLawSampler::mixture(
        {StochasticMatrix(2, {0.9, 0.1, 0.2, 0.8}), StochasticMatrix(2, {0.5, 0.5, 0.5, 0.5})},
        {0.7, 0.3});
    auto [trace, chain] = simulate_discrete(law, SimplexPoint({0.3, 0.7}), n, 8,
                                            opt.seed ^ 0x9108ULL);
    DiscreteCheckReport rep = verify_discrete(trace, chain);
    detail = std::to_string(ensembles.size()) + " ensembles exact; discrete marginal_dev=" +
             fmt(rep.marginal_dev) + ", recursion_dev=" + fmt(rep.recursion_dev) +
             ", qhat_dev=" + fmt(rep.qhat_dev);
    return rep.marginal_dev == 0.0 && rep.recursion_dev == 0.0 && rep.delta_rows_ok &&
           rep.qhat_dev <= 5.0;
  }));

  results.push_back(run_criterion(10, "outputs are byte-identical across worker counts", [&](std::string& detail) {
    fs::path base = opt.out_dir.empty() ? fs::temp_directory_path() / "simplexmc-accept"
                                        : fs::path(opt.out_dir);
    int saved = max_threads();
    set_max_threads(1);
    std::vector<std::string> one = emit_bundle((base / "workers-one").string(), opt.seed);
    set_max_threads(opt.threads == 1 ? 0 : opt.threads);
    std::vector<std::string> many = emit_bundle((base / "workers-many").string(), opt.seed);
    set_max_threads(saved);

    if (one.size() != many.size()) {
      detail = "bundle sizes differ";
      return false;
    }
    std::size_t bytes = 0;
    for (std::size_t i = 0; i < one.size(); ++i) {
      std::ifstream a(one[i], std::ios::binary), b(many[i], std::ios::binary);
      std::ostringstream sa, sb;
      sa << a.rdbuf();
      sb << b.rdbuf();
      if (sa.str() != sb.str()) {
        detail = fs::path(one[i]).filename().string() + " differs between worker counts";
        return false;
      }
      bytes += sa.str().size();
    }
    detail = std::to_string(one.size()) + " files, " + std::to_string(bytes) +
             " bytes identical";
    return true;
  }));

  return results;
}

}
