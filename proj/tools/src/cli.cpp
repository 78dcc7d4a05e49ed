#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

#include "ggmrecon/error.hpp"
#include "ggmrecon/evaluation.hpp"
#include "ggmrecon/ggm.hpp"
#include "ggmrecon/graph.hpp"
#include "ggmrecon/inference.hpp"
#include "ggmrecon/io.hpp"
#include "ggmrecon/learning.hpp"
#include "ggmrecon/meanfield.hpp"

namespace ggmrecon::cli {

namespace {

constexpr const char* kVersion = GGMRECON_VERSION;
constexpr double kMaxMissingRate = 0.999;

const std::vector<std::string> kSubcommands{"sample",   "learn",   "reconstruct",
                                            "evaluate", "sweep-p", "analyze"};

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::optional<std::string> closest_subcommand(const std::string& word) {
  std::optional<std::string> best;
  std::size_t best_distance = 4;
  for (const auto& name : kSubcommands) {
    std::size_t d = edit_distance(word, name);
    if (d < best_distance) {
      best_distance = d;
      best = name;
    }
  }
  return best;
}

/// `a:b:step` (inclusive of b up to rounding) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
      throw CLI::ValidationError("--grid", "'" + s + "' is not a number");
    }
    return v;
  };
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream in(s);
    std::string part;
    while (std::getline(in, part, sep)) parts.push_back(part);
    return parts;
  };

  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    auto parts = split(text, ':');
    if (parts.size() != 3) throw CLI::ValidationError("--grid", "expected a:b:step");
    double a = number(parts[0]), b = number(parts[1]), step = number(parts[2]);
    if (step <= 0 || b < a) throw CLI::ValidationError("--grid", "need a <= b and step > 0");
    auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) grid.push_back(a + static_cast<double>(k) * step);
  } else {
    for (const auto& part : split(text, ',')) grid.push_back(number(part));
  }
  if (grid.empty()) throw CLI::ValidationError("--grid", "empty grid");
  return grid;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) out += (k ? "," : "") + items[k];
  return out;
}

/// Per-invocation state: where output goes and what went into it.
class Run {
 public:
  Run(const CLI::App& sub, std::ostream& out, std::ostream& err)
      : sub_(sub), out_(out), err_(err) {}

  std::ostream& err() { return err_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  template <typename Reader>
  auto load(const std::string& path, Reader&& reader) {
    digests_[path] = io::file_digest(path);
    return reader(path);
  }

  /// Writes to `path` plus a manifest, or to the output stream if `path` is
  /// empty.
  template <typename Writer>
  void emit(const std::string& path, Writer&& write) {
    if (path.empty()) {
      write(out_);
      out_.flush();
      return;
    }
    {
      auto file = io::open_output(path);
      write(file);
      file.close();
      if (!file) throw InputError("failed writing '" + path + "'");
    }
    io::write_manifest(path, manifest());
  }

 private:
  io::RunManifest manifest() const {
    io::RunManifest m;
    m.subcommand = sub_.get_name();
    m.version = kVersion;
    m.seed = seed_;
    m.input_digests = digests_;
    for (const CLI::Option* opt : sub_.get_options()) {
      if (opt == sub_.get_help_ptr()) continue;
      std::string value = opt->count() > 0 ? join(opt->results()) : opt->get_default_str();
      if (opt->count() == 0 && value.empty()) continue;
      std::string name = opt->get_name();
      name.erase(0, name.find_first_not_of('-'));
      m.flags[name] = value;
    }
    return m;
  }

  const CLI::App& sub_;
  std::ostream& out_;
  std::ostream& err_;
  std::map<std::string, std::string> digests_;
  std::optional<std::uint64_t> seed_;
};

struct GraphSource {
  std::string graph;
  std::string roads;

  void add(CLI::App* app) {
    auto* g = app->add_option("--graph", graph, "Graph file ('n <count>' then 'e <i> <j>' lines)");
    auto* r = app->add_option("--roads", roads, "Road network file, instead of --graph");
    g->excludes(r);
  }

  Graph load(Run& run) const {
    if (!roads.empty()) {
      return build_road_graph(run.load(roads, io::read_road_network_file));
    }
    if (graph.empty()) throw CLI::RequiredError("--graph");
    return run.load(graph, io::read_graph_file);
  }
};

GgmParams load_params(Run& run, const std::string& path, const Graph& g) {
  GgmParams p = run.load(path, io::read_params_file);
  p.validate(g.size());
  return p;
}

Eigen::MatrixXd load_data(Run& run, const std::string& path, const Graph& g) {
  Eigen::MatrixXd data = run.load(path, io::read_matrix_csv_file);
  if (static_cast<std::size_t>(data.cols()) != g.size()) {
    throw InputError(path + ": " + std::to_string(data.cols()) + " columns, graph has " +
                     std::to_string(g.size()) + " vertices");
  }
  return data;
}

Eigen::VectorXd data_row(const Eigen::MatrixXd& data, std::size_t row, const std::string& path) {
  if (row >= static_cast<std::size_t>(data.rows())) {
    throw InputError(path + ": row " + std::to_string(row) + " requested, file has " +
                     std::to_string(data.rows()));
  }
  return data.row(static_cast<Eigen::Index>(row)).transpose();
}

double cap_missing_rate(double p, std::ostream& err) {
  if (p > kMaxMissingRate) {
    err << "ggmrecon: note: missing rate " << io::format_double(p) << " capped at "
        << kMaxMissingRate << '\n';
    return kMaxMissingRate;
  }
  return p;
}

void add_mfe_options(CLI::App* app, MfeConfig& mfe) {
  app->add_option("--tol", mfe.tolerance, "Mean-field stopping tolerance (max-abs update)")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-sweeps", mfe.max_sweeps, "Mean-field sweep limit")
      ->check(CLI::PositiveNumber);
}

using Handler = std::function<int(Run&)>;

Handler add_sample(CLI::App& app) {
  auto* sub = app.add_subcommand("sample", "Draw samples from a GGM");
  struct Opts {
    GraphSource graph;
    std::string params, out;
    std::size_t count = 0;
    std::uint64_t seed = 0;
  };
  auto o = std::make_shared<Opts>();
  o->graph.add(sub);
  sub->add_option("--params", o->params, "Parameter file (JSON)")->required();
  sub->add_option("--count", o->count, "Number of samples")->required()->check(CLI::PositiveNumber);
  sub->add_option("--seed", o->seed, "Random seed");
  sub->add_option("--out", o->out, "Output CSV (default: standard output)");
  return [o](Run& run) {
    run.set_seed(o->seed);
    Graph g = o->graph.load(run);
    GgmParams p = load_params(run, o->params, g);
    Eigen::MatrixXd data = sample(g, p, o->count, o->seed);
    run.emit(o->out, [&](std::ostream& s) { io::write_matrix_csv(s, data); });
    return kOk;
  };
}

Handler add_learn(CLI::App& app) {
  auto* sub = app.add_subcommand("learn", "Fit xi, J and h to complete samples");
  struct Opts {
    GraphSource graph;
    std::string data, out, report;
    LearnConfig cfg;
    std::uint64_t seed = 0;
  };
  auto o = std::make_shared<Opts>();
  o->graph.add(sub);
  sub->add_option("--data", o->data, "Sample CSV")->required();
  sub->add_option("--out", o->out, "Output parameter file (default: standard output)");
  sub->add_option("--lambda-h", o->cfg.lambda_h, "Ridge weight on h")->check(CLI::NonNegativeNumber);
  sub->add_option("--lambda-xi", o->cfg.lambda_xi, "Ridge weight on xi")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--lambda-j", o->cfg.lambda_j, "Ridge weight on J")->check(CLI::NonNegativeNumber);
  sub->add_option("--tol", o->cfg.gradient_tolerance, "Max-abs gradient stopping tolerance")
      ->check(CLI::PositiveNumber);
  sub->add_option("--max-iter", o->cfg.max_iterations, "Iteration limit");
  sub->add_option("--seed", o->seed, "Seed (the moment-matched start is deterministic)");
  sub->add_option("--report", o->report, "Write a JSON fit report to this file");
  return [o](Run& run) {
    run.set_seed(o->seed);
    Graph g = o->graph.load(run);
    Eigen::MatrixXd data = load_data(run, o->data, g);
    EmpiricalMoments em = empirical_moments(data, g);
    FitReport fr = fit(g, em, o->cfg, default_init(em));
    run.emit(o->out, [&](std::ostream& s) { io::write_params(s, fr.params); });
    if (!o->report.empty()) {
      run.emit(o->report, [&](std::ostream& s) {
        s << "{\n  \"samples\": " << em.n_samples << ",\n  \"iterations\": " << fr.iterations
          << ",\n  \"converged\": " << (fr.converged ? "true" : "false")
          << ",\n  \"gradient_norm\": " << io::format_double(fr.gradient_norm)
          << ",\n  \"initial_objective\": " << io::format_double(fr.initial_objective)
          << ",\n  \"final_objective\": " << io::format_double(fr.final_objective) << "\n}\n";
      });
    }
    if (!fr.converged) {
      run.err() << "ggmrecon: learn: no convergence after " << fr.iterations
                << " iterations (gradient " << io::format_double(fr.gradient_norm) << ")\n";
      return kDataError;
    }
    return kOk;
  };
}

Handler add_reconstruct(CLI::App& app) {
  auto* sub = app.add_subcommand("reconstruct", "Fill in the missing entries of one observation");
  struct Opts {
    GraphSource graph;
    std::string params, observation, mask, out;
    std::size_t row = 0;
    std::string method = "mfe";
    MfeConfig mfe_cfg;
  };
  auto o = std::make_shared<Opts>();
  o->graph.add(sub);
  sub->add_option("--params", o->params, "Parameter file (JSON)")->required();
  sub->add_option("--observation", o->observation, "CSV holding the observation")->required();
  sub->add_option("--row", o->row, "Row of the observation CSV to use");
  sub->add_option("--mask", o->mask, "File listing the missing vertex indices")->required();
  sub->add_option("--method", o->method, "Reconstruction method")
      ->check(CLI::IsMember({"mfe", "exact"}));
  add_mfe_options(sub, o->mfe_cfg);
  sub->add_option("--out", o->out, "Output CSV (default: standard output)");
  return [o](Run& run) {
    Graph g = o->graph.load(run);
    GgmParams p = load_params(run, o->params, g);
    Eigen::MatrixXd data = load_data(run, o->observation, g);
    Observation obs(data_row(data, o->row, o->observation), run.load(o->mask, io::read_index_file));
    ReconstructionResult r = o->method == "mfe" ? reconstruct_mfe(g, p, obs, o->mfe_cfg)
                                                : reconstruct_exact(g, p, obs);
    run.emit(o->out, [&](std::ostream& s) { io::write_matrix_csv(s, r.values.transpose()); });
    run.err() << "reconstruct: method=" << o->method << " sweeps=" << r.sweeps_used
              << " residual=" << io::format_double(r.residual)
              << " converged=" << (r.converged ? "true" : "false") << '\n';
    return r.converged ? kOk : kDataError;
  };
}

Handler add_evaluate(CLI::App& app) {
  auto* sub = app.add_subcommand("evaluate", "Mask one sample, reconstruct it and score the result");
  struct Opts {
    GraphSource graph;
    std::string params, data, mask, out, quantize;
    std::size_t row = 0;
    double p = 0.0;
    double width = 0.03;
    std::uint64_t seed = 0;
    std::string method = "exact";
    MfeConfig mfe_cfg;
  };
  auto o = std::make_shared<Opts>();
  o->graph.add(sub);
  sub->add_option("--params", o->params, "Parameter file (JSON)")->required();
  sub->add_option("--data", o->data, "Sample CSV")->required();
  sub->add_option("--row", o->row, "Row used as the ground truth");
  auto* p_opt = sub->add_option("--p", o->p, "Missing probability per vertex")
                    ->check(CLI::Range(0.0, 1.0));
  auto* mask_opt = sub->add_option("--mask", o->mask, "File listing the missing vertex indices");
  p_opt->excludes(mask_opt);
  sub->add_option("--seed", o->seed, "Mask seed");
  sub->add_option("--method", o->method, "Reconstruction method")
      ->check(CLI::IsMember({"mfe", "exact"}));
  add_mfe_options(sub, o->mfe_cfg);
  sub->add_option("--quantize", o->quantize, "Write vertex,value,bin CSV of the reconstruction");
  sub->add_option("--quantize-width", o->width, "Quantizer bin width")->check(CLI::PositiveNumber);
  sub->add_option("--out", o->out, "Output CSV (default: standard output)");
  return [o, p_opt, mask_opt](Run& run) {
    if (p_opt->count() == 0 && mask_opt->count() == 0) throw CLI::RequiredError("--p or --mask");
    run.set_seed(o->seed);
    Graph g = o->graph.load(run);
    GgmParams params = load_params(run, o->params, g);
    Eigen::VectorXd truth = data_row(load_data(run, o->data, g), o->row, o->data);
    MaskSpec spec = o->mask.empty()
                        ? MaskSpec::with_probability(cap_missing_rate(o->p, run.err()), o->seed)
                        : MaskSpec::explicit_set(run.load(o->mask, io::read_index_file));
    Observation obs = apply_mask(truth, spec).observation;
    ReconstructionResult r = o->method == "mfe" ? reconstruct_mfe(g, params, obs, o->mfe_cfg)
                                                : reconstruct_exact(g, params, obs);
    if (!r.converged) {
      run.err() << "ggmrecon: evaluate: mean-field sweeps did not converge\n";
      return kDataError;
    }
    double rate = spec.probability ? *spec.probability
                                   : static_cast<double>(obs.missing().size()) / g.size();
    std::string corr;
    try {
      corr = io::format_double(correlation(truth, r.values, obs.missing()));
    } catch (const DegenerateInputError& e) {
      run.err() << "ggmrecon: note: correlation undefined (" << e.what() << ")\n";
    }
    run.emit(o->out, [&](std::ostream& s) {
      s << "p,missing,mse,correlation\n"
        << io::format_double(rate) << ',' << obs.missing().size() << ','
        << io::format_double(mse(truth, r, obs.missing())) << ',' << corr << '\n';
    });
    if (!o->quantize.empty()) {
      run.emit(o->quantize, [&](std::ostream& s) {
        s << "vertex,value,bin\n";
        for (Eigen::Index i = 0; i < r.values.size(); ++i) {
          s << i << ',' << io::format_double(r.values[i]) << ','
            << quantize(r.values[i], o->width) << '\n';
        }
      });
    }
    return kOk;
  };
}

Handler add_sweep(CLI::App& app) {
  auto* sub = app.add_subcommand("sweep-p", "Reconstruction MSE over a grid of missing rates");
  struct Opts {
    GraphSource graph;
    std::string params, data, grid, out;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    std::string refit = "none";
  };
  auto o = std::make_shared<Opts>();
  o->graph.add(sub);
  sub->add_option("--params", o->params, "Parameter file (JSON)")->required();
  sub->add_option("--data", o->data, "Sample CSV, at least two rows")->required();
  sub->add_option("--grid", o->grid, "Missing rates as a:b:step or a comma list")->required();
  sub->add_option("--trials", o->trials, "Trials per grid point")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o->seed, "Random seed");
  sub->add_option("--refit", o->refit, "none, or loo to refit without the held-out row")
      ->check(CLI::IsMember({"none", "loo"}));
  sub->add_option("--out", o->out, "Output CSV (default: standard output)");
  return [o](Run& run) {
    run.set_seed(o->seed);
    SweepConfig cfg;
    cfg.p_grid = parse_grid(o->grid);
    for (double& p : cfg.p_grid) p = cap_missing_rate(p, run.err());
    cfg.trials = o->trials;
    cfg.seed = o->seed;
    cfg.refit = o->refit == "loo" ? Refit::LeaveOneOut : Refit::None;
    Graph g = o->graph.load(run);
    GgmParams params = load_params(run, o->params, g);
    Eigen::MatrixXd data = load_data(run, o->data, g);
    SweepResult result = sweep_p(g, params, data, cfg);
    run.emit(o->out, [&](std::ostream& s) {
      s << "p,mse_mean,mse_stderr,trials\n";
      for (const auto& row : result.rows) {
        s << io::format_double(row.x) << ',' << io::format_double(row.mean) << ','
          << io::format_double(row.std_error) << ',' << row.trials << '\n';
      }
    });
    return kOk;
  };
}

Handler add_analyze(CLI::App& app) {
  auto* sub = app.add_subcommand(
      "analyze", "Averaged MSE of the fully-connected model, with optional Monte Carlo check");
  struct Opts {
    AnalysisSetup s;
    std::string sweep, grid, out;
    McConfig mc;
  };
  auto o = std::make_shared<Opts>();
  o->s.p = 0.5;
  o->mc.trials = 0;
  sub->add_option("--j", o->s.j, "Prior coupling J")->required();
  sub->add_option("--xi", o->s.xi, "Prior xi")->required();
  auto* j0 = sub->add_option("--j0", o->s.j0, "Model coupling J0 (p sweep; r sweep uses J + r)");
  sub->add_option("--xi0", o->s.xi0, "Model xi0")->required();
  sub->add_option("--mu-h", o->s.mu_h, "Mean of the prior biases")->required();
  sub->add_option("--sigma-h", o->s.sigma_h, "Std. dev. of the prior biases")->required();
  sub->add_option("--mu-eps", o->s.mu_eps, "Mean of the bias error");
  sub->add_option("--sigma-eps", o->s.sigma_eps, "Std. dev. of the bias error");
  sub->add_option("--sweep", o->sweep, "r (coupling error J0 - J) or p (missing rate)")
      ->required()
      ->check(CLI::IsMember({"r", "p"}));
  sub->add_option("--grid", o->grid, "Sweep values as a:b:step or a comma list")->required();
  sub->add_option("--p", o->s.p, "Missing rate held fixed in an r sweep")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--mc-n", o->mc.n, "Monte Carlo system size")->check(CLI::PositiveNumber);
  sub->add_option("--mc-trials", o->mc.trials, "Monte Carlo trials per point (0 disables)");
  sub->add_option("--seed", o->mc.seed, "Monte Carlo seed");
  sub->add_option("--out", o->out, "Output CSV (default: standard output)");
  return [o, j0](Run& run) {
    bool by_rate = o->sweep == "p";
    if (by_rate && j0->count() == 0) throw CLI::RequiredError("--j0");
    std::vector<double> grid = parse_grid(o->grid);
    std::optional<McConfig> mc;
    if (o->mc.trials > 0) {
      mc = o->mc;
      run.set_seed(o->mc.seed);
    }
    auto points = curve(o->s, by_rate ? CurveAxis::MissingRate : CurveAxis::CouplingError, grid, mc);
    run.emit(o->out, [&](std::ostream& s) {
      s << "x,analytic_E" << (mc ? ",mc_E,mc_stderr" : "") << '\n';
      for (const auto& pt : points) {
        s << io::format_double(pt.x) << ',' << io::format_double(pt.analytic);
        if (pt.mc) {
          s << ',' << io::format_double(pt.mc->mean) << ',' << io::format_double(pt.mc->std_error);
        }
        s << '\n';
      }
    });
    return kOk;
  };
}

}  // namespace

int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  if (!args.empty() && !args[0].empty() && args[0][0] != '-' &&
      std::find(kSubcommands.begin(), kSubcommands.end(), args[0]) == kSubcommands.end()) {
    err << "ggmrecon: unknown subcommand '" << args[0] << "'";
    if (auto near = closest_subcommand(args[0])) err << "; did you mean '" << *near << "'?";
    err << "\nRun 'ggmrecon --help' for the list of subcommands.\n";
    return kUsage;
  }

  CLI::App app{"Reconstruct missing values on graphs with Gaussian graphical models", "ggmrecon"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  std::vector<Handler> handlers;
  for (auto add : {add_sample, add_learn, add_reconstruct, add_evaluate, add_sweep, add_analyze}) {
    handlers.push_back(add(app));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    for (std::size_t k = 0; k < kSubcommands.size(); ++k) {
      const CLI::App* sub = app.get_subcommand(kSubcommands[k]);
      if (sub->parsed()) {
        Run run(*sub, out, err);
        return handlers[k](run);
      }
    }
    return kUsage;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == static_cast<int>(CLI::ExitCodes::Success) ? kOk : kUsage;
  } catch (const Error& e) {
    err << "ggmrecon: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "ggmrecon: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace ggmrecon::cli
