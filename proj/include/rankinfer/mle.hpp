#ifndef RANKINFER_MLE_HPP
#define RANKINFER_MLE_HPP

#include <vector>

#include <Eigen/Core>

#include "rankinfer/likelihood.hpp"
#include "rankinfer/types.hpp"

namespace rankinfer {

struct FitConfig {
  double grad_tol = 1e-10;  // on the projected (KKT) gradient, l-infinity
  int max_iter = 500;
  double kappa_max = kDefaultKappaMax;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  double ridge = 1e-10;

  void validate() const;
};

struct ScoreEstimate {
  ScoreVector theta_hat;
  bool converged = false;
  int iterations = 0;
  double final_grad_norm = 0.0;
  std::vector<Index> non_identifiable_items;
  std::vector<Index> boundary_items;
  /// Objective after each accepted step, starting with the initial point.
  std::vector<double> objective_trace;
};

/// Constrained MLE: argmin Lbar(theta) over 1'theta = 0 and
/// theta in [-kappa_max/2, kappa_max/2]^n, by damped projected Newton.
/// Items of degree zero are pinned at 0 and reported as non-identifiable.
ScoreEstimate fit_mle(const ComparisonDataset& data, const FitConfig& config = {});

/// Euclidean projection of `v` onto {sum over `active` = 0} intersected with
/// the box [-bound, bound]; entries outside `active` are set to zero.
Eigen::VectorXd project_feasible(const Eigen::VectorXd& v, const std::vector<bool>& active,
                                 double bound);

/// 1-based point ranks, largest score first; ties go to the smaller index.
std::vector<Index> point_ranks(const Eigen::VectorXd& theta);

}  // namespace rankinfer

#endif  // RANKINFER_MLE_HPP
