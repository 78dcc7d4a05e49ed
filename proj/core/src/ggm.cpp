#include "ggmrecon/ggm.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>

#include "ggmrecon/error.hpp"
#include "ggmrecon/parallel.hpp"

namespace ggmrecon {

namespace {

using SparseLdlt = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                                         Eigen::AMDOrdering<int>>;

constexpr std::size_t kAlwaysDense = 48;

bool prefer_dense(std::size_t dim, std::size_t nonzeros) {
  return dim <= kAlwaysDense || 4 * nonzeros >= dim * dim;
}

Eigen::VectorXd standard_normals(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  return z;
}

// Entries of (ξI + J·L) restricted to `subset`, indexed by position in subset.
std::vector<Eigen::Triplet<double>> restricted_triplets(const Graph& g, double xi, double j,
                                                        std::span<const Vertex> subset) {
  constexpr auto kAbsent = static_cast<Eigen::Index>(-1);
  std::vector<Eigen::Index> position(g.size(), kAbsent);
  for (std::size_t k = 0; k < subset.size(); ++k) {
    if (subset[k] >= g.size()) throw InputError("subset vertex out of range");
    if (k > 0 && subset[k] <= subset[k - 1]) {
      throw InputError("subset must be strictly ascending");
    }
    position[subset[k]] = static_cast<Eigen::Index>(k);
  }

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t k = 0; k < subset.size(); ++k) {
    Vertex i = subset[k];
    const auto row = static_cast<Eigen::Index>(k);
    triplets.emplace_back(row, row, xi + static_cast<double>(g.degree(i)) * j);
    if (j == 0.0) continue;
    for (Vertex nb : g.neighbors(i)) {
      if (position[nb] != kAbsent) triplets.emplace_back(row, position[nb], -j);
    }
  }
  return triplets;
}

}  // namespace

void GgmParams::validate(std::size_t n) const {
  if (!std::isfinite(xi) || xi <= 0.0) {
    throw ParameterError("xi must be finite and > 0, got " + std::to_string(xi));
  }
  if (!std::isfinite(j) || j < 0.0) {
    throw ParameterError("j must be finite and >= 0, got " + std::to_string(j));
  }
  if (static_cast<std::size_t>(h.size()) != n) {
    throw InputError("bias vector has " + std::to_string(h.size()) + " entries, graph has " +
                     std::to_string(n) + " vertices");
  }
  if (!h.allFinite()) throw ParameterError("bias vector contains non-finite entries");
}

Eigen::SparseMatrix<double> precision_matrix(const Graph& g, const GgmParams& p) {
  p.validate(g.size());
  const auto n = static_cast<Eigen::Index>(g.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(g.size() + 2 * g.edge_count());
  for (Vertex i = 0; i < g.size(); ++i) {
    triplets.emplace_back(i, i, p.xi + static_cast<double>(g.degree(i)) * p.j);
  }
  if (p.j != 0.0) {
    for (const auto& e : g.edges()) {
      triplets.emplace_back(e.u, e.v, -p.j);
      triplets.emplace_back(e.v, e.u, -p.j);
    }
  }
  Eigen::SparseMatrix<double> q(n, n);
  q.setFromTriplets(triplets.begin(), triplets.end());
  return q;
}

// ---------------------------------------------------------------------------

struct PrecisionFactor::Impl {
  std::variant<Eigen::LLT<Eigen::MatrixXd>, std::unique_ptr<SparseLdlt>> factor;
  std::size_t dim = 0;
};

PrecisionFactor PrecisionFactor::dense(Eigen::MatrixXd q) {
  auto impl = std::make_shared<Impl>();
  impl->dim = static_cast<std::size_t>(q.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(q.rows());
  llt.compute(q);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("dense Cholesky factorization failed: matrix is not positive definite");
  }
  impl->factor = std::move(llt);
  return PrecisionFactor(std::move(impl));
}

PrecisionFactor PrecisionFactor::sparse(const Eigen::SparseMatrix<double>& q) {
  auto impl = std::make_shared<Impl>();
  impl->dim = static_cast<std::size_t>(q.rows());
  auto ldlt = std::make_unique<SparseLdlt>();
  ldlt->compute(q);
  if (ldlt->info() != Eigen::Success || (ldlt->vectorD().array() <= 0.0).any()) {
    throw NumericalError("sparse Cholesky factorization failed: matrix is not positive definite");
  }
  impl->factor = std::move(ldlt);
  return PrecisionFactor(std::move(impl));
}

std::size_t PrecisionFactor::size() const { return impl_->dim; }

PrecisionFactor::Backend PrecisionFactor::backend() const {
  return impl_->factor.index() == 0 ? Backend::Dense : Backend::Sparse;
}

Eigen::VectorXd PrecisionFactor::solve(const Eigen::VectorXd& b) const {
  if (static_cast<std::size_t>(b.size()) != impl_->dim) {
    throw InputError("right-hand side has wrong length");
  }
  if (const auto* llt = std::get_if<0>(&impl_->factor)) return llt->solve(b);
  return std::get<1>(impl_->factor)->solve(b);
}

double PrecisionFactor::log_determinant() const {
  if (const auto* llt = std::get_if<0>(&impl_->factor)) {
    return 2.0 * llt->matrixLLT().diagonal().array().log().sum();
  }
  return std::get<1>(impl_->factor)->vectorD().array().log().sum();
}

Eigen::VectorXd PrecisionFactor::sample(const Eigen::VectorXd& b, Rng& rng) const {
  if (static_cast<std::size_t>(b.size()) != impl_->dim) {
    throw InputError("bias has wrong length");
  }
  Eigen::VectorXd z = standard_normals(impl_->dim, rng);
  // With Q = L Lᵀ:  x = L⁻ᵀ (L⁻¹ b + z)  has mean Q⁻¹ b and covariance Q⁻¹.
  if (const auto* llt = std::get_if<0>(&impl_->factor)) {
    Eigen::VectorXd w = b;
    llt->matrixL().solveInPlace(w);
    w += z;
    llt->matrixU().solveInPlace(w);
    return w;
  }
  // Sparse: Q = Pᵀ L D Lᵀ P.
  const auto& ldlt = *std::get<1>(impl_->factor);
  Eigen::VectorXd w = ldlt.permutationP() * b;
  ldlt.matrixL().solveInPlace(w);
  Eigen::ArrayXd inv_sqrt_d = ldlt.vectorD().array().rsqrt();
  w = (w.array() * inv_sqrt_d + z.array()) * inv_sqrt_d;
  ldlt.matrixU().solveInPlace(w);
  return ldlt.permutationPinv() * w;
}

PrecisionFactor factorize_precision(const Graph& g, double xi, double j) {
  const std::size_t n = g.size();
  if (prefer_dense(n, n + 2 * g.edge_count())) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (Vertex i = 0; i < n; ++i) q(i, i) = xi + static_cast<double>(g.degree(i)) * j;
    for (const auto& e : g.edges()) {
      q(e.u, e.v) = -j;
      q(e.v, e.u) = -j;
    }
    return PrecisionFactor::dense(std::move(q));
  }
  return PrecisionFactor::sparse(precision_matrix(g, {Eigen::VectorXd::Zero(n), xi, j}));
}

PrecisionFactor factorize_precision(const Graph& g, double xi, double j,
                                    std::span<const Vertex> subset) {
  auto triplets = restricted_triplets(g, xi, j, subset);
  const auto m = static_cast<Eigen::Index>(subset.size());
  if (prefer_dense(subset.size(), triplets.size())) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
    for (const auto& t : triplets) q(t.row(), t.col()) = t.value();
    return PrecisionFactor::dense(std::move(q));
  }
  Eigen::SparseMatrix<double> q(m, m);
  q.setFromTriplets(triplets.begin(), triplets.end());
  return PrecisionFactor::sparse(q);
}

// ---------------------------------------------------------------------------

double GaussianMoments::covariance(Vertex i, Vertex j) const {
  return covariance_column(j)[i];
}

Eigen::VectorXd GaussianMoments::covariance_column(Vertex j) const {
  const auto n = static_cast<Eigen::Index>(factor_.size());
  if (j >= factor_.size()) throw InputError("vertex index out of range");
  return factor_.solve(Eigen::VectorXd::Unit(n, j));
}

Eigen::MatrixXd GaussianMoments::covariance_dense() const {
  const auto n = static_cast<Eigen::Index>(factor_.size());
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index j = 0; j < n; ++j) cov.col(j) = factor_.solve(Eigen::VectorXd::Unit(n, j));
  return cov;
}

GaussianMoments exact_moments(const Graph& g, const GgmParams& p) {
  p.validate(g.size());
  auto factor = factorize_precision(g, p.xi, p.j);
  Eigen::VectorXd mean = factor.solve(p.h);
  return {std::move(factor), std::move(mean)};
}

// ---------------------------------------------------------------------------

Observation::Observation(Eigen::VectorXd values, std::vector<Vertex> missing)
    : values_(std::move(values)), missing_(std::move(missing)) {
  const std::size_t n = size();
  is_missing_.assign(n, 0);
  for (Vertex i : missing_) {
    if (i >= n) {
      throw InputError("missing index " + std::to_string(i) + " is outside 0.." +
                       std::to_string(n == 0 ? 0 : n - 1));
    }
    if (is_missing_[i]) throw InputError("missing index " + std::to_string(i) + " repeated");
    is_missing_[i] = 1;
  }
  std::sort(missing_.begin(), missing_.end());
  observed_.reserve(n - missing_.size());
  for (Vertex i = 0; i < n; ++i) {
    if (!is_missing_[i]) observed_.push_back(i);
  }
}

Eigen::VectorXd effective_bias(const Graph& g, const GgmParams& p, const Observation& obs) {
  p.validate(g.size());
  if (obs.size() != g.size()) {
    throw InputError("observation has " + std::to_string(obs.size()) +
                     " entries, graph has " + std::to_string(g.size()) + " vertices");
  }
  auto missing = obs.missing();
  if (missing.empty()) throw DegenerateInputError("no missing vertices to reconstruct");

  Eigen::VectorXd bias(static_cast<Eigen::Index>(missing.size()));
  const auto& y = obs.values();
  for (std::size_t k = 0; k < missing.size(); ++k) {
    Vertex i = missing[k];
    double field = 0.0;
    for (Vertex nb : g.neighbors(i)) {
      if (!obs.is_missing(nb)) field += y[nb];
    }
    bias[static_cast<Eigen::Index>(k)] = p.h[i] + p.j * field;
  }
  return bias;
}

ConditionalSystem conditional_params(const Graph& g, const GgmParams& p, const Observation& obs) {
  ConditionalSystem sys;
  sys.bias = effective_bias(g, p, obs);
  sys.missing.assign(obs.missing().begin(), obs.missing().end());

  auto triplets = restricted_triplets(g, p.xi, p.j, sys.missing);
  const auto m = static_cast<Eigen::Index>(sys.missing.size());
  sys.precision.resize(m, m);
  sys.precision.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

Eigen::MatrixXd sample(const Graph& g, const GgmParams& p, std::size_t count, std::uint64_t seed) {
  p.validate(g.size());
  if (count == 0) throw InputError("sample count must be >= 1");
  const auto factor = factorize_precision(g, p.xi, p.j);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(g.size()));
  parallel_for(count, [&](std::size_t r) {
    Rng rng = make_stream(seed, r);
    out.row(static_cast<Eigen::Index>(r)) = factor.sample(p.h, rng).transpose();
  });
  return out;
}

}  // namespace ggmrecon
