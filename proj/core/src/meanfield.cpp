#include "ggmrecon/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "ggmrecon/error.hpp"
#include "ggmrecon/evaluation.hpp"
#include "ggmrecon/ggm.hpp"
#include "ggmrecon/graph.hpp"
#include "ggmrecon/inference.hpp"
#include "ggmrecon/parallel.hpp"
#include "ggmrecon/rng.hpp"

namespace ggmrecon {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

void check_prior(double j, double xi, const Eigen::VectorXd& h) {
  require(std::isfinite(xi) && xi > 0.0, "xi must be > 0");
  require(std::isfinite(j) && j >= 0.0, "J must be >= 0");
  require(h.size() >= 1, "need at least one variable");
  require(h.allFinite(), "bias vector contains non-finite entries");
}

}  // namespace

void AnalysisSetup::validate() const {
  for (double v : {j, xi, j0, xi0, mu_h, sigma_h, mu_eps, sigma_eps, p}) {
    require(std::isfinite(v), "analysis parameters must be finite");
  }
  require(xi > 0.0, "xi must be > 0");
  require(xi0 > 0.0, "xi0 must be > 0");
  require(j >= 0.0, "J must be >= 0");
  require(j0 >= 0.0, "J0 must be >= 0");
  require(sigma_h >= 0.0, "sigma_h must be >= 0");
  require(sigma_eps >= 0.0, "sigma_eps must be >= 0");
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
}

double analytic_mse(const AnalysisSetup& s) {
  s.validate();
  const double prior = s.xi + s.j;
  const double model = s.xi0 + s.j0;
  const double spread = s.sigma_h / prior - s.sigma_h / model;
  const double noise = s.sigma_eps / model;
  const double offset =
      ((s.xi - s.xi0) * s.mu_h + s.xi * s.mu_eps) / (s.xi * (s.xi0 + (1.0 - s.p) * s.j0));
  return 1.0 / prior + spread * spread + noise * noise + offset * offset;
}

double analytic_mse_min(const AnalysisSetup& s) {
  s.validate();
  return 1.0 / (s.xi + s.j);
}

double prior_free_energy(double j, double xi, const Eigen::VectorXd& h) {
  check_prior(j, xi, h);
  const auto n = static_cast<double>(h.size());
  const double a = xi + j;
  const double sum = h.sum();
  return -std::log(a / xi) / (2.0 * n) - 0.5 * std::log(2.0 * std::numbers::pi / a) -
         h.squaredNorm() / (2.0 * n * a) - j * sum * sum / (2.0 * n * n * a * xi);
}

FullyConnectedMoments prior_moments_fc(double j, double xi, const Eigen::VectorXd& h) {
  check_prior(j, xi, h);
  const auto n = static_cast<double>(h.size());
  const double a = xi + j;
  const double shared = j / (n * a * xi);
  FullyConnectedMoments m;
  m.mean = (h.array() / a + shared * h.sum()).matrix();
  m.variance = 1.0 / a + shared;
  m.covariance = shared;
  return m;
}

double observed_field(double j0, std::size_t n, std::span<const double> observed_values) {
  require(n >= 1, "n must be >= 1");
  return j0 / static_cast<double>(n) *
         std::accumulate(observed_values.begin(), observed_values.end(), 0.0);
}

Eigen::VectorXd conditional_moments_fc(std::size_t n, double j0, double xi0,
                                       const Eigen::VectorXd& beta, double f_obs) {
  require(std::isfinite(xi0) && xi0 > 0.0, "xi0 must be > 0");
  require(std::isfinite(j0) && j0 >= 0.0, "J0 must be >= 0");
  const auto t = static_cast<std::size_t>(beta.size());
  if (t < 1 || t >= n) {
    throw ParameterError("missing count t = " + std::to_string(t) + " must lie in [1, n-1] for n = " +
                         std::to_string(n));
  }
  const double p = static_cast<double>(t) / static_cast<double>(n);
  const double a = xi0 + j0;
  const double b = xi0 + (1.0 - p) * j0;
  Eigen::ArrayXd shifted = beta.array() + f_obs;
  const double collective = p * j0 / (static_cast<double>(t) * a * b) * shifted.sum();
  return (shifted / a + collective).matrix();
}

double thermo_reconstruction(const AnalysisSetup& s, double beta_i, double f_obs) {
  s.validate();
  const double a = s.xi0 + s.j0;
  const double b = s.xi0 + (1.0 - s.p) * s.j0;
  return (beta_i + f_obs) / a + s.p * s.j0 * (s.mu_h + s.mu_eps + f_obs) / (a * b);
}

std::size_t missing_count(double p, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) - 1e-9));
}

void McConfig::validate(double p) const {
  require(n >= 2, "Monte Carlo size n must be >= 2");
  require(trials >= 1, "Monte Carlo trials must be >= 1");
  std::size_t t = missing_count(p, n);
  if (t < 1 || t > n - 1) {
    throw ParameterError("ceil(p*n) = " + std::to_string(t) + " must lie in [1, n-1]");
  }
}

McEstimate mc_mse(const AnalysisSetup& s, const McConfig& cfg) {
  s.validate();
  cfg.validate(s.p);
  const std::size_t n = cfg.n;
  const std::size_t t = missing_count(s.p, n);
  const double scale = 1.0 / static_cast<double>(n);

  const Graph complete = make_complete(n);
  const auto prior = factorize_precision(complete, s.xi, s.j * scale);
  // Every t-subset of the complete graph induces the same sub-precision, so
  // one factorization serves every mask.
  std::vector<Vertex> first(t);
  std::iota(first.begin(), first.end(), Vertex{0});
  const auto model = factorize_precision(complete, s.xi0, s.j0 * scale, first);

  std::vector<double> scores(cfg.trials);
  parallel_for(cfg.trials, [&](std::size_t trial) {
    Rng rng = make_stream(cfg.seed, trial);
    std::normal_distribution<double> bias_h(s.mu_h, s.sigma_h);
    std::normal_distribution<double> bias_eps(s.mu_eps, s.sigma_eps);
    Eigen::VectorXd h(static_cast<Eigen::Index>(n));
    Eigen::VectorXd beta(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < h.size(); ++i) {
      h[i] = s.sigma_h > 0.0 ? bias_h(rng) : s.mu_h;
      double eps = s.sigma_eps > 0.0 ? bias_eps(rng) : s.mu_eps;
      beta[i] = h[i] + eps;
    }
    Eigen::VectorXd x = prior.sample(h, rng);

    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), Vertex{0});
    for (std::size_t k = 0; k < t; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, n - 1);
      std::swap(order[k], order[pick(rng)]);
    }
    order.resize(t);

    Observation obs(x, std::move(order));
    GgmParams reconstruction{std::move(beta), s.xi0, s.j0 * scale};
    auto recon = reconstruct_exact(complete, reconstruction, obs, model);
    scores[trial] = mse(x, recon, obs.missing());
  });

  McEstimate est;
  est.trials = cfg.trials;
  for (double v : scores) est.mean += v;
  est.mean /= static_cast<double>(scores.size());
  if (scores.size() > 1) {
    double var = 0.0;
    for (double v : scores) var += (v - est.mean) * (v - est.mean);
    var /= static_cast<double>(scores.size() - 1);
    est.std_error = std::sqrt(var / static_cast<double>(scores.size()));
  }
  return est;
}

std::vector<CurvePoint> curve(const AnalysisSetup& base, CurveAxis axis,
                              std::span<const double> grid, const std::optional<McConfig>& mc) {
  if (grid.empty()) throw InputError("empty analysis grid");
  std::vector<CurvePoint> points;
  points.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    AnalysisSetup s = base;
    if (axis == CurveAxis::CouplingError) {
      s.j0 = base.j + grid[k];
    } else {
      s.p = grid[k];
    }
    CurvePoint point{grid[k], analytic_mse(s), std::nullopt};
    if (mc) {
      McConfig cfg = *mc;
      cfg.seed = make_stream(mc->seed, k)();
      point.mc = mc_mse(s, cfg);
    }
    points.push_back(point);
  }
  return points;
}

}  // namespace ggmrecon
