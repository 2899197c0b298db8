// Acceptance gate: every criterion prints exactly one PASS/FAIL line; the
// process exits nonzero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "asyncdgd/analysis.hpp"
#include "asyncdgd/config.hpp"
#include "asyncdgd/engine.hpp"

using namespace asyncdgd;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  if (!ok) ++g_failures;
}

AlgorithmSpec make_quadratic_spec(int n, int d, std::uint64_t seed,
                                  AlgKind kind, double fraction, int rank = 0,
                                  double lambda1 = 0.0,
                                  bool logistic = false,
                                  double lambda2 = 0.0) {
  ExperimentConfig cfg;
  cfg.loss = logistic ? "logistic" : "quadratic";
  cfg.n = n;
  cfg.d = d;
  cfg.samples_per_node = d + 3;
  cfg.quadratic_rank = rank;
  cfg.data_seed = seed;
  cfg.lambda1 = lambda1;
  cfg.lambda2 = lambda2;
  cfg.graph_kind = "random";
  cfg.edges = std::min(2 * n, n * (n - 1) / 2);
  cfg.graph_seed = seed + 1;
  cfg.algorithm = kind == AlgKind::dgd_atc ? "dgd_atc" : "prox_dgd";
  cfg.stepsize_rule = "fraction";
  cfg.stepsize_value = fraction;
  return build_spec(cfg, false);
}

BlockVector random_point(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  BlockVector x(n, d);
  for (Eigen::Index t = 0; t < x.flat().size(); ++t) x.flat()[t] = g(rng);
  return x;
}

double fit_slope(const std::vector<double>& lx, const std::vector<double>& ly) {
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t t = 0; t < lx.size(); ++t) {
    sx += lx[t];
    sy += ly[t];
    sxx += lx[t] * lx[t];
    sxy += lx[t] * ly[t];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  double worst_excess = -1.0;
  int instances = 0;
  std::mt19937_64 pick(2024);
  while (instances < 20) {
    const int n = 4 + static_cast<int>(pick() % 13);   // 4..16
    const int d = 2 + static_cast<int>(pick() % 9);    // 2..10
    AlgorithmSpec spec = make_quadratic_spec(n, d, pick(), AlgKind::prox_dgd,
                                             0.9);
    FixedPointResult fp = fixed_point(spec, 1e-12);
    if (!fp.converged) {
      ok = false;
      break;
    }
    const double rho = contraction_factor(spec).factor;
    const double measured =
        measure_pseudo_contraction(spec, fp.x_star, 200, pick());
    worst_excess = std::max(worst_excess, measured - rho);
    if (measured > rho + 1e-9) ok = false;
    ++instances;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (secs >= 30.0) ok = false;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%d instances, worst measured-rho = %.3g, %.1fs", instances,
                worst_excess, secs);
  report(1, "pseudo-contraction bound", ok, buf);
}

void criterion_2() {
  bool ok = true;
  std::string detail;
  for (AlgKind kind : {AlgKind::prox_dgd, AlgKind::dgd_atc}) {
    AlgorithmSpec spec = make_quadratic_spec(6, 3, 51, kind, 0.8);
    const int n = spec.problem.n;
    const double rho = contraction_factor(spec).factor;
    FixedPointResult fp = fixed_point(spec, 1e-12);
    for (auto [B, D] : std::vector<std::pair<long long, long long>>{
             {n - 1, 0}, {2 * n, 3 * n}}) {
      const long long P = B + D + 1;
      Schedule s = gen_partial_async(spec.graph, B, D, 20 * P, 7 * B + D);
      TraceOptions opts;
      opts.x_star = fp.x_star;
      RunTrace trace = simulate(spec, s, random_point(n, 3, 9), opts);
      const double d0 = trace.dist_to_star[0];
      for (long long k = 0; k <= s.horizon(); ++k) {
        if (trace.dist_to_star[k] >
            std::pow(rho, static_cast<double>(k / P)) * d0 + 1e-9) {
          ok = false;
        }
      }
      EnvelopeReport env =
          envelope_check(trace, fp.x_star, rho, delay_metrics(s));
      if (!env.floor_ok || !env.adaptive_ok) ok = false;
    }
  }
  report(2, "linear-rate envelope", ok,
         "(B,D) in {(n-1,0),(2n,3n)}, both algorithms, every k");
}

void criterion_3() {
  AlgorithmSpec spec = make_quadratic_spec(5, 3, 61, AlgKind::prox_dgd, 0.8);
  const int n = spec.problem.n;
  const double rho = contraction_factor(spec).factor;
  FixedPointResult fp = fixed_point(spec, 1e-12);
  BlockVector x0 = random_point(n, 3, 13);
  TraceOptions opts;
  opts.x_star = fp.x_star;
  const long long B = n + 2, D = 2, P = B + D + 1;
  bool ok = true;

  Schedule worst = gen_worst_case(spec.graph, B, D, 20 * P);
  DelayMetrics mw = delay_metrics(worst);
  for (long long k = 0; k < worst.horizon(); ++k) {
    if (mw.mk[k] != k / P) ok = false;
  }
  RunTrace tw = simulate(spec, worst, x0, opts);
  if (!envelope_check(tw, fp.x_star, rho, mw).adaptive_ok) ok = false;

  Schedule best = gen_best_case(spec.graph, B, D, 20 * P);
  DelayMetrics mb = delay_metrics(best);
  for (long long k = 0; k < best.horizon(); ++k) {
    if (static_cast<double>(mb.mk[k]) <
        static_cast<double>(k - P) / n) {
      ok = false;
    }
  }
  RunTrace tb = simulate(spec, best, x0, opts);
  if (!envelope_check(tb, fp.x_star, rho, mb).adaptive_ok) ok = false;

  RunTrace live = run_concurrent(spec, 2000, 0, x0, opts);
  if (live.failed) ok = false;
  PartialAsyncReport pa = verify_partial_async(live.schedule);
  if (!pa.holds) ok = false;
  DelayMetrics mr = delay_metrics(live.schedule);
  const long long Pr = pa.B_min + pa.D_min + 1;
  for (long long k = 0; k < live.schedule.horizon(); ++k) {
    if (mr.mk[k] < k / Pr || mr.mk[k] > k / n) ok = false;
  }
  if (!envelope_check(live, fp.x_star, rho, mr).adaptive_ok) ok = false;

  char buf[120];
  std::snprintf(buf, sizeof buf,
                "worst exact, best bounded, realized within [k/%lld, k/%d]",
                Pr, n);
  report(3, "delay adaptivity", ok, buf);
}

void criterion_4() {
  bool ok = true;
  long long hit = -1;
  AlgorithmSpec spec = make_quadratic_spec(6, 3, 71, AlgKind::prox_dgd, 0.6);
  FixedPointResult fp = fixed_point(spec, 1e-12);
  Schedule s = gen_total_async(spec.graph, 1.0, 100000, 17);
  TraceOptions opts;
  opts.x_star = fp.x_star;
  RunTrace trace = simulate(spec, s, random_point(6, 3, 19), opts);
  for (long long k = 0; k <= s.horizon(); ++k) {
    if (trace.dist_to_star[k] <= 1e-6) {
      hit = k;
      break;
    }
  }
  if (hit < 0) ok = false;
  char buf[96];
  std::snprintf(buf, sizeof buf, "1e-6 reached at k=%lld of 100000", hit);
  report(4, "total asynchrony convergence", ok, buf);
}

void criterion_5() {
  bool ok = true;
  double worst = 0.0;
  for (std::uint64_t seed : {81ull, 83ull}) {
    AlgorithmSpec spec = make_quadratic_spec(5, 4, seed, AlgKind::prox_dgd,
                                             0.5, /*rank=*/2);
    Schedule s = gen_partial_async(spec.graph, 8, 4, 100000, seed);
    RunTrace trace = simulate(spec, s, random_point(5, 4, seed + 1));
    const double res =
        block_max_norm(apply_T_full(spec, trace.x_final), trace.x_final);
    worst = std::max(worst, res);
    if (res > 1e-7) ok = false;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst ||T(x^K)-x^K|| = %.3g at K=1e5", worst);
  report(5, "weakly convex convergence", ok, buf);
}

void criterion_6() {
  bool ok = true;
  double worst = 0.0;
  int instances = 0;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    // strongly convex: both oracles from scratch
    AlgorithmSpec spec = make_quadratic_spec(4 + static_cast<int>(seed % 4), 3,
                                             seed * 7, AlgKind::prox_dgd, 0.6);
    FixedPointResult it = fixed_point(spec, 1e-13);
    FixedPointResult direct = fixed_point_quadratic_direct(spec);
    const double diff = block_max_norm(it.x_star, direct.x_star);
    worst = std::max(worst, diff);
    if (diff > 1e-7) ok = false;
    ++instances;
  }
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    // rank-deficient: the direct minimum-norm solution must be fixed under
    // the iteration
    AlgorithmSpec spec = make_quadratic_spec(5, 4, seed * 11,
                                             AlgKind::prox_dgd, 0.5, 2);
    FixedPointResult direct = fixed_point_quadratic_direct(spec);
    FixedPointResult it = fixed_point(spec, 1e-13, 2000000, direct.x_star);
    const double diff = block_max_norm(it.x_star, direct.x_star);
    worst = std::max(worst, diff);
    if (diff > 1e-7 || direct.residual > 1e-9) ok = false;
    ++instances;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d instances, worst disagreement = %.3g",
                instances, worst);
  report(6, "fixed-point oracle agreement", ok, buf);
}

void criterion_7() {
  bool ok = true;

  // F(x*) <= F_opt and the explicit bound on quadratics with exact min F
  for (std::uint64_t seed : {5ull, 9ull}) {
    AlgorithmSpec spec = make_quadratic_spec(6, 3, seed, AlgKind::prox_dgd,
                                             0.4);
    FixedPointResult fp = fixed_point(spec, 1e-12);
    CentralSolveResult central = central_solve(spec.problem);
    double minF = 0.0;
    for (const auto& f : spec.problem.smooth) {
      const auto& q = f.quadratic.value();
      Eigen::VectorXd z = q.A.colPivHouseholderQr().solve(q.b);
      minF += (q.A * z - q.b).squaredNorm();
    }
    GapReport g = gap_report(spec.problem, spec.W, spec.alpha, fp.x_star,
                             central.F_opt, minF, GapCase::lemma1);
    if (!g.F_star_le_opt || !g.bound_satisfied) ok = false;
  }

  // alpha sweep: consensus error vs alpha on log-log over one decade
  auto sweep_slope = [&](double lambda1) {
    std::vector<double> lx, ly;
    for (double frac : {0.01, 0.0178, 0.0316, 0.0562, 0.1}) {
      AlgorithmSpec spec = make_quadratic_spec(6, 3, 33, AlgKind::prox_dgd,
                                               frac, 0, lambda1);
      FixedPointResult fp = fixed_point(spec, 1e-13);
      CentralSolveResult central = central_solve(spec.problem);
      GapReport g = gap_report(spec.problem, spec.W, spec.alpha, fp.x_star,
                               central.F_opt, std::nullopt,
                               GapCase::lemma2_identical_h);
      if (!g.F_star_le_opt) ok = false;
      lx.push_back(std::log(spec.alpha));
      ly.push_back(std::log(std::max(g.consensus_error, 1e-300)));
    }
    return fit_slope(lx, ly);
  };
  const double slope_l1 = sweep_slope(0.05);   // general (nonsmooth) case
  const double slope_smooth = sweep_slope(0.0);  // identical h = 0
  if (slope_l1 < 0.4) ok = false;
  if (slope_smooth < 0.9) ok = false;

  char buf[120];
  std::snprintf(buf, sizeof buf,
                "bounds hold; sweep slopes %.2f (general, >=0.4) / %.2f "
                "(identical h, >=0.9)",
                slope_l1, slope_smooth);
  report(7, "optimality-gap bounds", ok, buf);
}

void criterion_8() {
  bool ok = true;
  long long worstB = 0, worstD = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    AlgorithmSpec spec = make_quadratic_spec(8, 4, 90 + seed,
                                             AlgKind::prox_dgd, 0.5, 0,
                                             /*lambda1=*/0.01,
                                             /*logistic=*/true,
                                             /*lambda2=*/0.1);
    BlockVector x0 = random_point(8, 4, seed);
    TraceOptions opts;
    opts.snapshot_stride = 200;
    RunTrace live = run_concurrent(spec, 2000, 0, x0, opts);
    if (live.failed || live.schedule.horizon() != 2000) {
      ok = false;
      continue;
    }
    RunTrace replay = simulate(spec, live.schedule, x0, opts);
    if (replay.snapshot_ks != live.snapshot_ks) ok = false;
    for (size_t t = 0; t < replay.snapshots.size() && ok; ++t) {
      if ((replay.snapshots[t].flat() - live.snapshots[t].flat()).norm() !=
          0.0) {
        ok = false;
      }
    }
    if ((replay.x_final.flat() - live.x_final.flat()).norm() != 0.0) ok = false;
    PartialAsyncReport pa = verify_partial_async(live.schedule);
    if (!pa.holds) ok = false;
    worstB = std::max(worstB, pa.B_min);
    worstD = std::max(worstD, pa.D_min);
  }
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "5/5 runs bitwise-replayed; worst (B_min, D_min) = (%lld, %lld)",
                worstB, worstD);
  report(8, "concurrent replay determinism", ok, buf);
}

void criterion_9() {
  bool ok = true;
  // rho_hat <= rho on 100 random specs at a common valid alpha
  std::mt19937_64 pick(777);
  for (int t = 0; t < 100; ++t) {
    const int n = 4 + static_cast<int>(pick() % 9);
    AlgorithmSpec spec = make_quadratic_spec(n, 3, pick(), AlgKind::prox_dgd,
                                             0.9);
    MixingMatrix W = spec.W;
    if (!W.positive_definite) W = lazy_transform(W);
    const double bound_common = std::min(
        max_stepsize(AlgKind::prox_dgd, spec.problem, W),
        max_stepsize(AlgKind::dgd_atc, spec.problem, W));
    const double alpha = 0.9 * bound_common;
    const double rho =
        contraction_factor(AlgKind::prox_dgd, spec.problem, W, alpha).factor;
    const double rho_hat =
        contraction_factor(AlgKind::dgd_atc, spec.problem, W, alpha).factor;
    if (rho_hat > rho) ok = false;
  }

  // ATC vs Prox-DGD iterations-to-1e-6 at theorem-max step-sizes
  int atc_wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto iters_to_thresh = [&](AlgKind kind) -> long long {
      AlgorithmSpec spec = make_quadratic_spec(6, 3, 600 + seed, kind, 0.999);
      FixedPointResult fp = fixed_point(spec, 1e-12);
      TraceOptions opts;
      opts.x_star = fp.x_star;
      RunTrace tr = run_synchronous(spec, 20000, random_point(6, 3, seed),
                                    opts);
      for (size_t k = 0; k < tr.dist_to_star.size(); ++k) {
        if (tr.dist_to_star[k] <= 1e-6) return static_cast<long long>(k);
      }
      return 1 << 30;
    };
    if (iters_to_thresh(AlgKind::dgd_atc) <=
        iters_to_thresh(AlgKind::prox_dgd)) {
      ++atc_wins;
    }
  }
  if (atc_wins < 16) ok = false;
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "rho_hat <= rho on 100 specs; ATC no slower in %d/20 trials",
                atc_wins);
  report(9, "ATC rate comparison", ok, buf);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (g_failures == 0) {
    std::printf("acceptance: all 9 criteria passed\n");
  } else {
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
