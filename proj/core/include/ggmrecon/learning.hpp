#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "ggmrecon/ggm.hpp"
#include "ggmrecon/graph.hpp"

namespace ggmrecon {

/// Sufficient statistics of the model family over N complete samples.
struct EmpiricalMoments {
  std::size_t n_samples = 0;
  Eigen::VectorXd mean;          // ⟨x_i⟩
  Eigen::VectorXd second;        // ⟨x_i²⟩
  Eigen::VectorXd edge_sq_diff;  // ⟨(x_u − x_v)²⟩, indexed like Graph::edges()
};

/// Rows of `data` are samples, columns vertices.
EmpiricalMoments empirical_moments(const Eigen::MatrixXd& data, const Graph& g);

struct LearnConfig {
  double lambda_h = 1e-3;
  double lambda_xi = 1e-3;
  double lambda_j = 1e-3;
  double gradient_tolerance = 1e-6;  // on the max-abs projected gradient
  std::size_t max_iterations = 10000;
  double xi_floor = 1e-6;
  double j_floor = 0.0;
  double armijo = 1e-4;
  double backtrack = 0.5;
  std::size_t max_backtracks = 60;

  void validate() const;
};

struct ParamGradient {
  Eigen::VectorXd h;
  double xi = 0.0;
  double j = 0.0;

  double max_abs() const;
};

struct Objective {
  double value = 0.0;
  ParamGradient gradient;
};

/// Regularized negative average log-likelihood
///
///   −⟨ln P(x | θ)⟩_data + λ_h‖h‖² + λ_ξ ξ² + λ_J J²
///
/// and its exact gradient, using model moments from the factorized precision.
Objective nll_and_gradient(const Graph& g, const GgmParams& p, const EmpiricalMoments& em,
                           const LearnConfig& cfg);

/// Value only; one factorization and solve, no covariance entries.
double nll(const Graph& g, const GgmParams& p, const EmpiricalMoments& em, const LearnConfig& cfg);

struct FitReport {
  GgmParams params;
  std::size_t iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;  // max-abs projected gradient at `params`
  double initial_objective = 0.0;
  double final_objective = 0.0;
};

/// Isolated-vertex moment match: ξ = 1 / (average site variance),
/// h = ξ · mean, J = 0.
GgmParams default_init(const EmpiricalMoments& em);

/// Projected gradient descent on the regularized NLL with Barzilai-Borwein
/// trial steps and Armijo backtracking; ξ and J are clamped to their floors.
/// Every accepted step strictly decreases the objective.
FitReport fit(const Graph& g, const EmpiricalMoments& em, const LearnConfig& cfg,
              const GgmParams& init);
FitReport fit(const Graph& g, const Eigen::MatrixXd& data, const LearnConfig& cfg,
              const GgmParams& init);

}  // namespace ggmrecon
