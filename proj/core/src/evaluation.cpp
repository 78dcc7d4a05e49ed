#include "ggmrecon/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "ggmrecon/error.hpp"
#include "ggmrecon/parallel.hpp"
#include "ggmrecon/rng.hpp"

namespace ggmrecon {

namespace {

void check_lengths(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   std::span<const Vertex> missing) {
  if (a.size() != b.size()) throw InputError("truth and reconstruction differ in length");
  for (Vertex i : missing) {
    if (i >= a.size()) throw InputError("missing index out of range");
  }
}

}  // namespace

MaskedObservation apply_mask(const Eigen::VectorXd& x, const MaskSpec& spec) {
  const auto n = static_cast<std::size_t>(x.size());
  if (!spec.probability) {
    if (spec.indices.empty()) throw InputError("explicit missing set is empty");
    return {Observation(x, spec.indices), 0};
  }

  const double p = *spec.probability;
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("missing probability must lie in [0, 1]");
  for (std::size_t redraws = 0; redraws <= spec.max_redraws; ++redraws) {
    Rng rng(spec.seed + redraws);
    std::bernoulli_distribution missing_draw(p);
    std::vector<Vertex> missing;
    for (Vertex i = 0; i < n; ++i) {
      if (missing_draw(rng)) missing.push_back(i);
    }
    if (!missing.empty() && missing.size() < n) {
      return {Observation(x, std::move(missing)), redraws};
    }
  }
  throw DegenerateInputError("mask with p = " + std::to_string(p) +
                             " left M or O empty after " + std::to_string(spec.max_redraws) +
                             " redraws");
}

double mse(const Eigen::VectorXd& truth, const Eigen::VectorXd& recon,
           std::span<const Vertex> missing) {
  check_lengths(truth, recon, missing);
  if (missing.empty()) throw DegenerateInputError("MSE over an empty missing set");
  double sum = 0.0;
  for (Vertex i : missing) {
    double d = truth[i] - recon[i];
    sum += d * d;
  }
  return sum / static_cast<double>(missing.size());
}

double mse(const Eigen::VectorXd& truth, const ReconstructionResult& recon,
           std::span<const Vertex> missing) {
  return mse(truth, recon.values, missing);
}

double correlation(const Eigen::VectorXd& truth, const Eigen::VectorXd& recon,
                   std::span<const Vertex> missing) {
  check_lengths(truth, recon, missing);
  if (missing.size() < 2) throw DegenerateInputError("correlation needs at least two entries");
  const auto m = static_cast<double>(missing.size());
  double mean_t = 0.0;
  double mean_r = 0.0;
  for (Vertex i : missing) {
    mean_t += truth[i];
    mean_r += recon[i];
  }
  mean_t /= m;
  mean_r /= m;
  double stt = 0.0;
  double srr = 0.0;
  double str = 0.0;
  for (Vertex i : missing) {
    double dt = truth[i] - mean_t;
    double dr = recon[i] - mean_r;
    stt += dt * dt;
    srr += dr * dr;
    str += dt * dr;
  }
  if (stt <= 0.0 || srr <= 0.0) {
    throw DegenerateInputError("correlation undefined: zero variance");
  }
  return str / std::sqrt(stt * srr);
}

int quantize(double value, double width, int bins) {
  if (!(width > 0.0) || bins < 1) throw ParameterError("invalid quantizer");
  if (!(value > 0.0)) return 0;
  auto bin = static_cast<long long>(std::floor(value / width));
  return static_cast<int>(std::min<long long>(bin, bins - 1));
}

SweepResult sweep_p(const Graph& g, const GgmParams& params, const Eigen::MatrixXd& data,
                    const SweepConfig& cfg) {
  params.validate(g.size());
  if (data.rows() < 2) throw InputError("sweep needs at least two samples");
  if (static_cast<std::size_t>(data.cols()) != g.size()) {
    throw InputError("sample matrix width does not match graph");
  }
  if (cfg.p_grid.empty()) throw InputError("empty missing-probability grid");
  if (cfg.trials < 1) throw InputError("trials must be >= 1");

  Reconstructor reconstruct = cfg.reconstruct;
  if (!reconstruct) {
    reconstruct = [](const Graph& graph, const GgmParams& p, const Observation& obs) {
      return reconstruct_exact(graph, p, obs).values;
    };
  }

  const auto rows = static_cast<std::size_t>(data.rows());
  std::vector<GgmParams> refit;
  if (cfg.refit == Refit::LeaveOneOut) {
    std::size_t needed = std::min(rows, cfg.trials);
    refit.resize(needed);
    parallel_for(needed, [&](std::size_t held) {
      Eigen::MatrixXd rest(data.rows() - 1, data.cols());
      rest.topRows(static_cast<Eigen::Index>(held)) = data.topRows(static_cast<Eigen::Index>(held));
      rest.bottomRows(data.rows() - 1 - static_cast<Eigen::Index>(held)) =
          data.bottomRows(data.rows() - 1 - static_cast<Eigen::Index>(held));
      auto em = empirical_moments(rest, g);
      refit[held] = fit(g, em, cfg.learn, default_init(em)).params;
    });
  }

  SweepResult result;
  result.seed = cfg.seed;
  std::vector<double> scores(cfg.p_grid.size() * cfg.trials);
  parallel_for(scores.size(), [&](std::size_t task) {
    std::size_t trial = task % cfg.trials;
    double p = cfg.p_grid[task / cfg.trials];
    std::size_t held = trial % rows;
    Eigen::VectorXd truth = data.row(static_cast<Eigen::Index>(held)).transpose();
    Rng stream = make_stream(cfg.seed, task);
    auto masked = apply_mask(truth, MaskSpec::with_probability(p, stream()));
    const GgmParams& used = cfg.refit == Refit::LeaveOneOut ? refit[held] : params;
    Eigen::VectorXd recon = reconstruct(g, used, masked.observation);
    scores[task] = mse(truth, recon, masked.observation.missing());
  });

  for (std::size_t k = 0; k < cfg.p_grid.size(); ++k) {
    std::span<const double> block(scores.data() + k * cfg.trials, cfg.trials);
    double mean = 0.0;
    for (double s : block) mean += s;
    mean /= static_cast<double>(block.size());
    double var = 0.0;
    for (double s : block) var += (s - mean) * (s - mean);
    double std_error =
        block.size() > 1 ? std::sqrt(var / static_cast<double>(block.size() - 1) /
                                     static_cast<double>(block.size()))
                         : 0.0;
    result.rows.push_back({cfg.p_grid[k], mean, std_error, block.size()});
  }
  return result;
}

}  // namespace ggmrecon
