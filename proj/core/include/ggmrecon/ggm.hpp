#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ggmrecon/graph.hpp"
#include "ggmrecon/rng.hpp"

namespace ggmrecon {

/// Parameters of the pairwise Gaussian MRF
///
///   P(x) ∝ exp( Σ_i h_i x_i − ξ/2 Σ_i x_i² − J/2 Σ_{(i,j)∈E} (x_i − x_j)² ).
///
/// ξ > 0 and J ≥ 0 make the precision ξI + J·L positive definite for every
/// graph Laplacian L.
struct GgmParams {
  Eigen::VectorXd h;
  double xi = 1.0;
  double j = 0.0;

  /// Throws ParameterError on ξ ≤ 0, J < 0 or non-finite values and
  /// InputError when h does not have n entries.
  void validate(std::size_t n) const;
};

/// Precision matrix ξI + J·L: diagonal ξ + deg(i)·J, −J on every edge.
Eigen::SparseMatrix<double> precision_matrix(const Graph& g, const GgmParams& p);

/// Cholesky factorization of a symmetric positive-definite precision matrix.
///
/// Small or dense systems use a dense LLᵀ; sparse ones use a fill-reducing
/// LDLᵀ. Copies share the (immutable) factor, and all member functions are
/// safe to call concurrently.
class PrecisionFactor {
 public:
  enum class Backend { Dense, Sparse };

  static PrecisionFactor dense(Eigen::MatrixXd q);
  static PrecisionFactor sparse(const Eigen::SparseMatrix<double>& q);

  std::size_t size() const;
  Backend backend() const;

  /// Q⁻¹ b.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  double log_determinant() const;

  /// One exact draw from N(Q⁻¹ b, Q⁻¹), consuming size() standard normals
  /// from rng.
  Eigen::VectorXd sample(const Eigen::VectorXd& b, Rng& rng) const;

 private:
  struct Impl;
  explicit PrecisionFactor(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Factor of ξI + J·L, picking the dense or sparse backend from the fill.
PrecisionFactor factorize_precision(const Graph& g, double xi, double j);

/// Factor of (ξI + J·L) restricted to rows/columns `subset` (ascending,
/// distinct), in subset order.
PrecisionFactor factorize_precision(const Graph& g, double xi, double j,
                                    std::span<const Vertex> subset);

/// Mean and covariance of the model. Covariance entries are solved from the
/// factorization on demand rather than stored.
class GaussianMoments {
 public:
  GaussianMoments(PrecisionFactor factor, Eigen::VectorXd mean)
      : factor_(std::move(factor)), mean_(std::move(mean)) {}

  const Eigen::VectorXd& mean() const { return mean_; }
  const PrecisionFactor& factor() const { return factor_; }

  double covariance(Vertex i, Vertex j) const;
  Eigen::VectorXd covariance_column(Vertex j) const;
  Eigen::MatrixXd covariance_dense() const;

 private:
  PrecisionFactor factor_;
  Eigen::VectorXd mean_;
};

GaussianMoments exact_moments(const Graph& g, const GgmParams& p);

/// A full-length value vector together with the missing/observed split.
/// Values at missing vertices are carried but never read by inference.
class Observation {
 public:
  /// Throws InputError for out-of-range or repeated indices, or when the
  /// value vector length differs from n.
  Observation(Eigen::VectorXd values, std::vector<Vertex> missing);

  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }
  std::span<const Vertex> missing() const { return missing_; }
  std::span<const Vertex> observed() const { return observed_; }
  bool is_missing(Vertex i) const { return is_missing_[i] != 0; }

 private:
  Eigen::VectorXd values_;
  std::vector<Vertex> missing_;
  std::vector<Vertex> observed_;
  std::vector<char> is_missing_;
};

/// Gaussian conditional of x_M given x_O = y, in canonical form.
struct ConditionalSystem {
  std::vector<Vertex> missing;
  Eigen::SparseMatrix<double> precision;  // Q restricted to M×M
  Eigen::VectorXd bias;                   // h_i + J Σ_{j∈∂(i)∩O} y_j
};

/// Effective bias over M (in missing() order). Throws DegenerateInputError
/// when M is empty.
Eigen::VectorXd effective_bias(const Graph& g, const GgmParams& p, const Observation& obs);

ConditionalSystem conditional_params(const Graph& g, const GgmParams& p, const Observation& obs);

/// `count` i.i.d. exact samples as rows of a count×n matrix. Row r is drawn
/// from make_stream(seed, r).
Eigen::MatrixXd sample(const Graph& g, const GgmParams& p, std::size_t count, std::uint64_t seed);

}  // namespace ggmrecon
