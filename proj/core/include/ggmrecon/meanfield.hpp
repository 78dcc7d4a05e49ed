#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ggmrecon {

/// Fully-connected prior (coupling J/n, variance parameter ξ, biases
/// h_i ~ p_h) and reconstruction model (J₀/n, ξ₀, biases β_i = h_i + ε_i with
/// ε_i ~ p_ε), observed with missing rate p.
struct AnalysisSetup {
  double j = 1.0;
  double xi = 1.0;
  double j0 = 1.0;
  double xi0 = 1.0;
  double mu_h = 0.0;
  double sigma_h = 0.0;
  double mu_eps = 0.0;
  double sigma_eps = 0.0;
  double p = 0.5;

  void validate() const;
};

/// Averaged reconstruction MSE in the thermodynamic limit:
///
///   E = 1/(ξ+J) + (σ_h/(ξ+J) − σ_h/(ξ₀+J₀))² + σ_ε²/(ξ₀+J₀)²
///       + (((ξ−ξ₀)μ_h + ξμ_ε) / (ξ(ξ₀ + (1−p)J₀)))².
///
/// Only the last term depends on p.
double analytic_mse(const AnalysisSetup& s);

/// 1/(ξ+J), reached exactly when the two models coincide.
double analytic_mse_min(const AnalysisSetup& s);

/// Free energy per variable −(1/n) ln Z of the fully-connected prior at
/// finite n = h.size(). Exact, not asymptotic.
double prior_free_energy(double j, double xi, const Eigen::VectorXd& h);

/// Exact finite-n moments of the fully-connected prior. The covariance has
/// only two distinct values: `variance` on the diagonal and `covariance`
/// off it.
struct FullyConnectedMoments {
  Eigen::VectorXd mean;
  double variance = 0.0;
  double covariance = 0.0;

  double cov(std::size_t i, std::size_t k) const { return i == k ? variance : covariance; }
};

FullyConnectedMoments prior_moments_fc(double j, double xi, const Eigen::VectorXd& h);

/// f(x_O) = (J₀/n) Σ_{i∈O} x_i, the field the observed block exerts on every
/// missing site.
double observed_field(double j0, std::size_t n, std::span<const double> observed_values);

/// Conditional means of the reconstruction model over the t = beta.size()
/// missing sites, given the observed field f. Requires 1 ≤ t ≤ n−1.
Eigen::VectorXd conditional_moments_fc(std::size_t n, double j0, double xi0,
                                       const Eigen::VectorXd& beta, double f_obs);

/// Large-n limit of conditional_moments_fc for one site, with the average
/// of β over M replaced by μ_h + μ_ε.
double thermo_reconstruction(const AnalysisSetup& s, double beta_i, double f_obs);

/// Finite-n Monte Carlo protocol. Biases are Gaussian with the setup's means
/// and standard deviations; ⌈p·n⌉ sites are masked uniformly at random.
struct McConfig {
  std::size_t n = 1000;
  std::size_t trials = 100;
  std::uint64_t seed = 0;

  void validate(double p) const;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

/// Number of masked sites for missing rate p at size n.
std::size_t missing_count(double p, std::size_t n);

/// Monte Carlo estimate of the averaged MSE. Each trial draws h and ε, one
/// exact prior sample, and a mask, then reconstructs with the exact
/// conditional-mean solver of the finite-n model.
McEstimate mc_mse(const AnalysisSetup& s, const McConfig& cfg);

enum class CurveAxis {
  CouplingError,  // x = r with J₀ = J + r
  MissingRate,    // x = p
};

struct CurvePoint {
  double x = 0.0;
  double analytic = 0.0;
  std::optional<McEstimate> mc;
};

/// Analytic E over `grid`, plus a Monte Carlo column when `mc` is given
/// (grid point k uses a seed derived from (mc.seed, k)).
std::vector<CurvePoint> curve(const AnalysisSetup& base, CurveAxis axis,
                              std::span<const double> grid,
                              const std::optional<McConfig>& mc = std::nullopt);

}  // namespace ggmrecon
