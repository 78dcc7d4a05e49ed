#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "ggmrecon/ggm.hpp"
#include "ggmrecon/graph.hpp"

namespace ggmrecon {

enum class MfeInit {
  Decoupled,  // x_i = h_i / ξ, the exact answer when J = 0
  Zero,
};

struct MfeConfig {
  double tolerance = 1e-10;  // on the max-abs update of one sweep
  std::size_t max_sweeps = 10000;
  MfeInit init = MfeInit::Decoupled;

  void validate() const;
};

struct ReconstructionResult {
  Eigen::VectorXd values;  // observed entries copied verbatim, missing ones filled in
  std::size_t sweeps_used = 0;
  bool converged = false;
  double residual = 0.0;
  std::vector<double> residual_history;  // one entry per sweep (MFE only)
};

/// Conditional mean of x_M given x_O = y by in-place Gauss-Seidel sweeps of
///
///   x_i ← (h_i + J Σ_{j∈∂(i)} z_j) / (ξ + |∂(i)| J),   i ∈ M ascending,
///
/// where z_j is the current x_j on M and y_j on O. Stops when a sweep moves
/// no entry by more than cfg.tolerance; hitting max_sweeps first is reported
/// through `converged == false`.
ReconstructionResult reconstruct_mfe(const Graph& g, const GgmParams& p, const Observation& obs,
                                     const MfeConfig& cfg = {});

/// Conditional mean by a direct factorization of the precision restricted to
/// M.
ReconstructionResult reconstruct_exact(const Graph& g, const GgmParams& p, const Observation& obs);

/// As above with a caller-supplied factor of the precision restricted to
/// obs.missing(). Lets repeated reconstructions over masks that induce the
/// same sub-precision share one factorization.
ReconstructionResult reconstruct_exact(const Graph& g, const GgmParams& p, const Observation& obs,
                                       const PrecisionFactor& sub_precision);

}  // namespace ggmrecon
