#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ggmrecon/ggm.hpp"
#include "ggmrecon/graph.hpp"
#include "ggmrecon/inference.hpp"
#include "ggmrecon/learning.hpp"

namespace ggmrecon {

/// Either "each vertex missing independently with probability p" or an
/// explicit missing set.
struct MaskSpec {
  std::optional<double> probability;
  std::vector<Vertex> indices;
  std::uint64_t seed = 0;
  std::size_t max_redraws = 10000;

  static MaskSpec with_probability(double p, std::uint64_t seed) {
    return {p, {}, seed};
  }
  static MaskSpec explicit_set(std::vector<Vertex> indices) {
    return {std::nullopt, std::move(indices), 0};
  }
};

struct MaskedObservation {
  Observation observation;
  std::size_t redraws = 0;  // draws rejected for an empty M or O
};

/// Random masks are redrawn with seed+1, seed+2, ... until both M and O are
/// nonempty; after max_redraws rejections DegenerateInputError is thrown
/// (p = 0 and p = 1 never succeed). An explicit set must be nonempty and in
/// range (InputError otherwise).
MaskedObservation apply_mask(const Eigen::VectorXd& x, const MaskSpec& spec);

/// (1/|M|) Σ_{i∈M} (truth_i − recon_i)².
double mse(const Eigen::VectorXd& truth, const Eigen::VectorXd& recon,
           std::span<const Vertex> missing);
double mse(const Eigen::VectorXd& truth, const ReconstructionResult& recon,
           std::span<const Vertex> missing);

/// Pearson correlation over the entries in M. Throws DegenerateInputError
/// when |M| < 2 or either side has zero variance.
double correlation(const Eigen::VectorXd& truth, const Eigen::VectorXd& recon,
                   std::span<const Vertex> missing);

/// Five-stage display quantization: bin k covers [k·w, (k+1)·w) with the
/// first and last bins open-ended.
int quantize(double value, double width = 0.03, int bins = 5);

struct SweepRow {
  double x = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::string graph_id;
  std::string params_id;
  std::uint64_t seed = 0;
};

enum class Refit {
  None,         // use the supplied parameters for every trial
  LeaveOneOut,  // refit on all rows except the held-out one
};

using Reconstructor =
    std::function<Eigen::VectorXd(const Graph&, const GgmParams&, const Observation&)>;

struct SweepConfig {
  std::vector<double> p_grid;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  Refit refit = Refit::None;
  LearnConfig learn;
  Reconstructor reconstruct;  // defaults to reconstruct_exact
};

/// Trial k at grid point g holds out row k mod N as the truth, masks it with
/// stream make_stream(seed, g·trials + k), reconstructs and scores the MSE.
SweepResult sweep_p(const Graph& g, const GgmParams& params, const Eigen::MatrixXd& data,
                    const SweepConfig& cfg);

}  // namespace ggmrecon
