#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "asyncdgd/engine.hpp"
#include "asyncdgd/operators.hpp"
#include "asyncdgd/schedule.hpp"

namespace asyncdgd {

enum class FixedPointMethod { iterate, quadratic_direct };

struct FixedPointResult {
  BlockVector x_star;
  double residual = 0.0;  // ||T(x*) - x*||_inf^b
  FixedPointMethod method = FixedPointMethod::iterate;
  Eigen::VectorXd mean;  // xbar* = (1/n) sum_i x_i*
  BlockVector x_bar;     // xbar* stacked into every block
  bool converged = false;
  long long iterations = 0;
};

// Iterates the synchronous map T until the block-max step falls below tol.
// Starts from the zero stack unless x0 is given (relevant only when the fixed
// point is not unique, e.g. pure consensus).
FixedPointResult fixed_point(const AlgorithmSpec& spec, double tol = 1e-12,
                             long long max_iters = 2000000,
                             const std::optional<BlockVector>& x0 = {});

// Direct solve of (2 A^T A + (I - W (x) I_d)/alpha) x = 2 A^T b for prox_dgd
// with quadratic f_i = ||A_i x - b_i||^2 and h_i = 0. Singular systems get the
// minimum-norm solution via a symmetric eigendecomposition pseudo-inverse.
FixedPointResult fixed_point_quadratic_direct(const AlgorithmSpec& spec);

enum class GapCase { lemma1, lemma2_case_i, lemma2_identical_h, lemma3 };

struct GapReport {
  GapCase which = GapCase::lemma1;
  double consensus_error = 0.0;  // max_i ||x_i* - xbar*||
  double stacked_error = 0.0;    // ||x* - xbar*|| over the full stack
  double F_star = 0.0;           // F(x*)
  double F_opt = 0.0;
  double F_bar = 0.0;            // F at the averaged consensus point
  bool F_star_le_opt = false;    // F(x*) <= F_opt + 1e-9

  std::optional<double> bound;       // consensus-error bound for `which`
  bool bound_satisfied = false;      // measured <= bound (when present)
  std::optional<double> F_bar_bound; // F_opt + gap (identical-h cases)
  bool F_bar_satisfied = false;
};

// Evaluates the consensus error of a fixed point against the explicit bound
// of the requested case:
//   lemma1             sqrt(2 alpha (F_opt - min F) / (1 - beta)),
//                      needs lower_bound_minF
//   lemma2_case_i      alpha G / (1 - beta), needs lipschitz_G on every f_i
//                      (h_i must not add to the constant: zero or indicator)
//   lemma2_identical_h alpha ||grad f(x*)|| / (1 - beta), plus the function-
//                      value gap F_opt + (alpha/(1-beta) +
//                      L alpha^2/(2(1-beta)^2)) ||grad f(x*)||^2
//   lemma3             same as lemma2_identical_h (smooth problems, PD W)
GapReport gap_report(const ConsensusProblem& p, const MixingMatrix& W,
                     double alpha, const BlockVector& x_star, double F_opt,
                     std::optional<double> lower_bound_minF, GapCase which);

struct EnvelopeReport {
  bool floor_ok = false;     // rho^{floor(k/(B+D+1))} envelope
  bool adaptive_ok = false;  // rho^{m^k} envelope
  long long first_floor_violation = -1;
  long long first_adaptive_violation = -1;
  double worst_floor_margin = 0.0;     // max over k of dist - envelope
  double worst_adaptive_margin = 0.0;
  long long B = 0;  // B_min and D_min used for the floor envelope
  long long D = 0;
};

// Checks dist(k) <= rho^{floor(k/(B_min+D_min+1))} * dist(0) + 1e-9 and the
// sharper rho^{m^k} * dist(0) + 1e-9 for every recorded iterate. The trace
// must carry the distance series (TraceOptions::x_star was set).
EnvelopeReport envelope_check(const RunTrace& trace, const BlockVector& x_star,
                              double rho, const DelayMetrics& metrics);

struct CentralSolveResult {
  Eigen::VectorXd x_opt;
  double F_opt = 0.0;
  bool converged = false;
  long long iterations = 0;
};

// Proximal gradient with backtracking on the d-dimensional problem
// sum_i f_i(z) + h_i(z), run until the prox-gradient residual <= tol.
// Requires all h_i identical (their sum then has a closed-form prox).
CentralSolveResult central_solve(const ConsensusProblem& p, double tol = 1e-10,
                                 long long max_iters = 500000);

// key=value lines for reports
void write_gap_report(std::ostream& os, const GapReport& r);
void write_envelope_report(std::ostream& os, const EnvelopeReport& r);

}  // namespace asyncdgd
