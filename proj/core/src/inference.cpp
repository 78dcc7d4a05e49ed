#include "ggmrecon/inference.hpp"

#include <algorithm>
#include <cmath>

#include "ggmrecon/error.hpp"

namespace ggmrecon {

void MfeConfig::validate() const {
  if (!(tolerance > 0.0)) throw ParameterError("MFE tolerance must be > 0");
  if (max_sweeps < 1) throw ParameterError("MFE max_sweeps must be >= 1");
}

ReconstructionResult reconstruct_mfe(const Graph& g, const GgmParams& p, const Observation& obs,
                                     const MfeConfig& cfg) {
  cfg.validate();
  p.validate(g.size());
  if (obs.size() != g.size()) throw InputError("observation length does not match graph");
  auto missing = obs.missing();
  if (missing.empty()) throw DegenerateInputError("no missing vertices to reconstruct");

  ReconstructionResult out;
  out.values = obs.values();
  Eigen::VectorXd& x = out.values;
  for (Vertex i : missing) x[i] = cfg.init == MfeInit::Decoupled ? p.h[i] / p.xi : 0.0;

  while (out.sweeps_used < cfg.max_sweeps) {
    double largest = 0.0;
    for (Vertex i : missing) {
      double field = 0.0;
      for (Vertex nb : g.neighbors(i)) field += x[nb];
      double updated =
          (p.h[i] + p.j * field) / (p.xi + static_cast<double>(g.degree(i)) * p.j);
      largest = std::max(largest, std::abs(updated - x[i]));
      x[i] = updated;
    }
    ++out.sweeps_used;
    out.residual_history.push_back(largest);
    out.residual = largest;
    if (!std::isfinite(largest)) break;
    if (largest <= cfg.tolerance) {
      out.converged = true;
      break;
    }
  }
  return out;
}

ReconstructionResult reconstruct_exact(const Graph& g, const GgmParams& p, const Observation& obs,
                                       const PrecisionFactor& sub_precision) {
  Eigen::VectorXd bias = effective_bias(g, p, obs);
  auto missing = obs.missing();
  if (sub_precision.size() != missing.size()) {
    throw InputError("sub-precision factor does not match the missing set size");
  }
  Eigen::VectorXd xm = sub_precision.solve(bias);

  ReconstructionResult out;
  out.values = obs.values();
  for (std::size_t k = 0; k < missing.size(); ++k) {
    out.values[missing[k]] = xm[static_cast<Eigen::Index>(k)];
  }
  out.converged = true;
  return out;
}

ReconstructionResult reconstruct_exact(const Graph& g, const GgmParams& p,
                                       const Observation& obs) {
  p.validate(g.size());
  if (obs.missing().empty()) throw DegenerateInputError("no missing vertices to reconstruct");
  auto factor = factorize_precision(g, p.xi, p.j, obs.missing());
  return reconstruct_exact(g, p, obs, factor);
}

}  // namespace ggmrecon
