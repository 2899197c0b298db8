#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "asyncdgd/block_vector.hpp"

namespace asyncdgd {

// Quadratic data ||A x - b||^2, kept alongside the generic callables so that
// direct linear-algebra routes can recover A and b.
struct QuadraticData {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

// Smooth local cost f_i with value/gradient callables and curvature constants.
// mu == 0 marks a weakly convex oracle.
struct SmoothOracle {
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  double L = 0.0;
  double mu = 0.0;
  std::optional<double> lipschitz_G;  // Lipschitz constant of f_i itself, if finite
  std::optional<QuadraticData> quadratic;
};

enum class ProxKind { zero, l1, box, ball };

// Nonsmooth local cost h_i with a closed-form proximal map.
class ProxOracle {
 public:
  static ProxOracle Zero(int dim);
  static ProxOracle L1(int dim, double lambda1);
  static ProxOracle Box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static ProxOracle Ball(Eigen::VectorXd center, double radius);

  ProxKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double lambda1() const { return lambda1_; }

  // argmin_y h(y) + (1/2)||y - v||^2 with h scaled by `scale`
  Eigen::VectorXd prox(const Eigen::VectorXd& v, double scale) const;
  // h(v), +inf outside dom h
  double value(const Eigen::VectorXd& v) const;

  bool same_as(const ProxOracle& other) const;

 private:
  ProxKind kind_ = ProxKind::zero;
  int dim_ = 0;
  double lambda1_ = 0.0;
  Eigen::VectorXd lo_, hi_;     // box
  Eigen::VectorXd center_;      // ball
  double radius_ = 0.0;         // ball
};

// Componentwise soft threshold sign(v_j) * max(|v_j| - scale, 0).
Eigen::VectorXd prox_l1(const Eigen::VectorXd& v, double scale);

struct ConsensusProblem {
  int n = 0;
  int d = 0;
  std::vector<SmoothOracle> smooth;
  std::vector<ProxOracle> prox;
  bool identical_h = false;

  void validate() const;
  bool all_prox_zero() const;
  double max_L() const;
  double min_mu() const;
};

ConsensusProblem make_problem(std::vector<SmoothOracle> smooth,
                              std::vector<ProxOracle> prox);

// F(x) = sum_i f_i(x_i) + h_i(x_i), +inf if any block leaves dom h_i.
double eval_F(const ConsensusProblem& p, const BlockVector& x);

// f_i(x) = (1/m) sum_j [log(1+exp(-b_j a_j^T x)) + (lambda2/2)||x||^2]
SmoothOracle make_logistic_oracle(const Eigen::MatrixXd& features,
                                  const Eigen::VectorXd& labels,
                                  double lambda2);

// f_i(x) = ||A x - b||^2
SmoothOracle make_quadratic_oracle(const Eigen::MatrixXd& A,
                                   const Eigen::VectorXd& b);

}  // namespace asyncdgd
