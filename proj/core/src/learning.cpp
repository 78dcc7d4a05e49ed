#include "ggmrecon/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ggmrecon/error.hpp"

namespace ggmrecon {

namespace {

struct DataTerms {
  double linear;     // hᵀ⟨x⟩
  double second;     // Σ_i ⟨x_i²⟩
  double edge_diff;  // Σ_E ⟨(x_u − x_v)²⟩
};

void check_moments(const Graph& g, const EmpiricalMoments& em) {
  const auto n = static_cast<Eigen::Index>(g.size());
  if (em.mean.size() != n || em.second.size() != n ||
      em.edge_sq_diff.size() != static_cast<Eigen::Index>(g.edge_count())) {
    throw InputError("empirical moments do not match the graph");
  }
}

double regularizer(const GgmParams& p, const LearnConfig& cfg) {
  return cfg.lambda_h * p.h.squaredNorm() + cfg.lambda_xi * p.xi * p.xi +
         cfg.lambda_j * p.j * p.j;
}

double objective_value(const GgmParams& p, const EmpiricalMoments& em,
                       const PrecisionFactor& factor, const Eigen::VectorXd& model_mean,
                       const LearnConfig& cfg) {
  const auto n = static_cast<double>(p.h.size());
  DataTerms data{p.h.dot(em.mean), em.second.sum(), em.edge_sq_diff.sum()};
  double log_partition = 0.5 * n * std::log(2.0 * std::numbers::pi) -
                         0.5 * factor.log_determinant() + 0.5 * p.h.dot(model_mean);
  return -data.linear + 0.5 * p.xi * data.second + 0.5 * p.j * data.edge_diff + log_partition +
         regularizer(p, cfg);
}

Eigen::VectorXd pack(const GgmParams& p) {
  Eigen::VectorXd theta(p.h.size() + 2);
  theta << p.h, p.xi, p.j;
  return theta;
}

Eigen::VectorXd pack(const ParamGradient& g) {
  Eigen::VectorXd v(g.h.size() + 2);
  v << g.h, g.xi, g.j;
  return v;
}

GgmParams unpack(const Eigen::VectorXd& theta) {
  const auto n = theta.size() - 2;
  return {theta.head(n), theta[n], theta[n + 1]};
}

void project(Eigen::VectorXd& theta, const LearnConfig& cfg) {
  const auto n = theta.size() - 2;
  theta[n] = std::max(theta[n], cfg.xi_floor);
  theta[n + 1] = std::max(theta[n + 1], cfg.j_floor);
}

// Gradient components that would push ξ or J below an active floor are
// dropped; what remains is zero exactly at a constrained stationary point.
Eigen::VectorXd projected(Eigen::VectorXd grad, const Eigen::VectorXd& theta,
                          const LearnConfig& cfg) {
  const auto n = theta.size() - 2;
  if (theta[n] <= cfg.xi_floor && grad[n] > 0.0) grad[n] = 0.0;
  if (theta[n + 1] <= cfg.j_floor && grad[n + 1] > 0.0) grad[n + 1] = 0.0;
  return grad;
}

}  // namespace

EmpiricalMoments empirical_moments(const Eigen::MatrixXd& data, const Graph& g) {
  if (data.rows() < 1) throw InputError("need at least one sample");
  if (static_cast<std::size_t>(data.cols()) != g.size()) {
    throw InputError("sample matrix has " + std::to_string(data.cols()) +
                     " columns, graph has " + std::to_string(g.size()) + " vertices");
  }
  if (!data.allFinite()) throw InputError("sample matrix contains non-finite values");

  const auto rows = static_cast<double>(data.rows());
  EmpiricalMoments em;
  em.n_samples = static_cast<std::size_t>(data.rows());
  em.mean = data.colwise().sum().transpose() / rows;
  em.second = data.array().square().colwise().sum().transpose() / rows;
  em.edge_sq_diff.resize(static_cast<Eigen::Index>(g.edge_count()));
  auto edges = g.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    em.edge_sq_diff[static_cast<Eigen::Index>(k)] =
        (data.col(edges[k].u) - data.col(edges[k].v)).squaredNorm() / rows;
  }
  return em;
}

void LearnConfig::validate() const {
  if (lambda_h < 0 || lambda_xi < 0 || lambda_j < 0) {
    throw ParameterError("regularization weights must be >= 0");
  }
  if (!(xi_floor > 0)) throw ParameterError("xi floor must be > 0");
  if (j_floor < 0) throw ParameterError("J floor must be >= 0");
  if (!(gradient_tolerance > 0)) throw ParameterError("gradient tolerance must be > 0");
  if (!(armijo > 0 && armijo < 1) || !(backtrack > 0 && backtrack < 1)) {
    throw ParameterError("line-search constants must lie in (0, 1)");
  }
}

double ParamGradient::max_abs() const {
  return std::max({h.size() > 0 ? h.cwiseAbs().maxCoeff() : 0.0, std::abs(xi), std::abs(j)});
}

double nll(const Graph& g, const GgmParams& p, const EmpiricalMoments& em,
           const LearnConfig& cfg) {
  p.validate(g.size());
  check_moments(g, em);
  auto factor = factorize_precision(g, p.xi, p.j);
  return objective_value(p, em, factor, factor.solve(p.h), cfg);
}

Objective nll_and_gradient(const Graph& g, const GgmParams& p, const EmpiricalMoments& em,
                           const LearnConfig& cfg) {
  p.validate(g.size());
  check_moments(g, em);
  const auto n = static_cast<Eigen::Index>(g.size());
  auto factor = factorize_precision(g, p.xi, p.j);
  Eigen::VectorXd mean = factor.solve(p.h);

  // tr(Q⁻¹) and Σ_E (Σ_uu + Σ_vv − 2Σ_uv), one covariance column per vertex.
  // Edges are sorted by (u, v) and neighbor lists ascend, so walking the
  // upper neighbors of each column visits the edges in storage order.
  double trace = 0.0;
  double edge_cov = 0.0;
  Eigen::VectorXd variance(n);
  Eigen::VectorXd cross(static_cast<Eigen::Index>(g.edge_count()));
  Eigen::Index edge = 0;
  for (Vertex c = 0; c < g.size(); ++c) {
    Eigen::VectorXd col = factor.solve(Eigen::VectorXd::Unit(n, c));
    variance[c] = col[c];
    trace += col[c];
    for (Vertex nb : g.neighbors(c)) {
      if (nb > c) cross[edge++] = col[nb];
    }
  }
  auto edges = g.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    double dm = mean[e.u] - mean[e.v];
    edge_cov += variance[e.u] + variance[e.v] - 2.0 * cross[static_cast<Eigen::Index>(k)] + dm * dm;
  }
  const double model_second = trace + mean.squaredNorm();

  Objective out;
  out.value = objective_value(p, em, factor, mean, cfg);
  out.gradient.h = mean - em.mean + 2.0 * cfg.lambda_h * p.h;
  out.gradient.xi = 0.5 * (em.second.sum() - model_second) + 2.0 * cfg.lambda_xi * p.xi;
  out.gradient.j = 0.5 * (em.edge_sq_diff.sum() - edge_cov) + 2.0 * cfg.lambda_j * p.j;
  return out;
}

GgmParams default_init(const EmpiricalMoments& em) {
  Eigen::VectorXd variance = (em.second.array() - em.mean.array().square()).max(0.0).matrix();
  double avg = variance.size() > 0 ? variance.mean() : 0.0;
  double xi = avg > 0.0 ? 1.0 / avg : 1.0;
  return {xi * em.mean, xi, 0.0};
}

FitReport fit(const Graph& g, const EmpiricalMoments& em, const LearnConfig& cfg,
              const GgmParams& init) {
  cfg.validate();
  init.validate(g.size());
  check_moments(g, em);

  Eigen::VectorXd theta = pack(init);
  project(theta, cfg);
  Objective current = nll_and_gradient(g, unpack(theta), em, cfg);
  Eigen::VectorXd grad = pack(current.gradient);

  FitReport report;
  report.initial_objective = current.value;
  double step = 1.0 / std::max(1.0, grad.cwiseAbs().maxCoeff());

  while (true) {
    report.gradient_norm = projected(grad, theta, cfg).cwiseAbs().maxCoeff();
    if (report.gradient_norm <= cfg.gradient_tolerance) {
      report.converged = true;
      break;
    }
    if (report.iterations >= cfg.max_iterations) break;

    bool accepted = false;
    Eigen::VectorXd candidate;
    for (std::size_t b = 0; b < cfg.max_backtracks; ++b, step *= cfg.backtrack) {
      candidate = theta - step * grad;
      project(candidate, cfg);
      double decrease = grad.dot(candidate - theta);
      if (!(decrease < 0.0)) continue;
      double value = nll(g, unpack(candidate), em, cfg);
      if (value <= current.value + cfg.armijo * decrease) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    Objective next = nll_and_gradient(g, unpack(candidate), em, cfg);
    Eigen::VectorXd next_grad = pack(next.gradient);
    Eigen::VectorXd s = candidate - theta;
    double sy = s.dot(next_grad - grad);
    step = sy > 0.0 ? s.squaredNorm() / sy : step * 2.0;
    step = std::clamp(step, 1e-12, 1e12);

    theta = std::move(candidate);
    grad = std::move(next_grad);
    current = std::move(next);
    ++report.iterations;
  }

  report.params = unpack(theta);
  report.final_objective = current.value;
  return report;
}

FitReport fit(const Graph& g, const Eigen::MatrixXd& data, const LearnConfig& cfg,
              const GgmParams& init) {
  return fit(g, empirical_moments(data, g), cfg, init);
}

}  // namespace ggmrecon
