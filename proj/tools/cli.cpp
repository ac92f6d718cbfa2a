#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "specapprox/datasets.hpp"
#include "specapprox/errors.hpp"
#include "specapprox/pipeline.hpp"
#include "specapprox/report.hpp"
#include "specapprox/tasks.hpp"

namespace specapprox::cli {

namespace {

constexpr const char* kOutDirVariable = "SPECAPPROX_OUT_DIR";

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string method_slug(Method method) {
  std::string s(to_string(method));
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterError(message);
}

struct PendingFile {
  std::string name;
  std::string contents;
};

// Writes every file or none: contents go to temporaries first and are renamed
// into place only after all temporaries exist.
void write_all(const std::filesystem::path& dir, const std::vector<PendingFile>& files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> temporaries;
  auto discard = [&] {
    for (const auto& t : temporaries) std::filesystem::remove(t, ec);
  };
  for (const auto& f : files) {
    const auto tmp = dir / (f.name + ".partial");
    temporaries.push_back(tmp);
    std::ofstream out(tmp, std::ios::binary);
    out << f.contents;
    out.close();
    if (!out) {
      discard();
      throw IoError("cannot write " + tmp.string());
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::filesystem::rename(temporaries[i], dir / files[i].name, ec);
    if (ec) {
      discard();
      throw IoError("cannot move " + temporaries[i].string() + " into place: " + ec.message());
    }
  }
}

std::vector<std::uint64_t> seed_list(const RunConfig& config) {
  std::vector<std::uint64_t> seeds;
  for (int r = 0; r < config.reps; ++r) seeds.push_back(config.seed + static_cast<std::uint64_t>(r));
  return seeds;
}

std::vector<PendingFile> embedding_task(const RunConfig& config, std::ostream& log, ExperimentReport& report) {
  std::vector<PendingFile> files;
  const std::string task(to_string(config.task));
  for (std::uint64_t seed : seed_list(config)) {
    PointCloud cloud;
    if (config.task == Task::manifold) {
      cloud = fishbowl({.n = *config.n, .seed = seed});
    } else {
      HaloBallParams params;
      params.bowl.n = *config.n;
      params.bowl.seed = seed;
      params.n_ball = *config.n_ball;
      params.seed = seed;
      cloud = halo_ball(params);
    }
    EmbeddingTaskConfig tc;
    tc.task = task;
    tc.epsilon = *config.epsilon;
    tc.m_gp = *config.m_gp;
    tc.m_nys = *config.cost_matched ? cost_matched_m(cloud.size(), *config.m_gp) : *config.m;
    tc.p = *config.p;
    tc.seed = seed;
    tc.methods = config.methods;
    require(tc.m_nys <= cloud.size() && tc.m_gp <= cloud.size(),
            "m and m_gp must not exceed the " + std::to_string(cloud.size()) + " generated points");
    log << task << ": n=" << cloud.size() << " m_nys=" << tc.m_nys << " m_gp=" << tc.m_gp
        << " epsilon=" << tc.epsilon << " seed=" << seed << "\n";
    const auto outcome = run_embedding_task(cloud, tc);
    report.merge(outcome.report);

    if (seed != config.seed) continue;
    std::vector<int> labels = cloud.labels.value_or(std::vector<int>(static_cast<std::size_t>(cloud.size()), 0));
    if (!cloud.labels) {
      // Color the fishbowl by height so the unrolled sheet is readable.
      const Vector z = cloud.points.col(2);
      const double lo = z.minCoeff();
      const double span = std::max(z.maxCoeff() - lo, 1e-300);
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        labels[static_cast<std::size_t>(i)] = std::min(7, static_cast<int>(8.0 * (z(i) - lo) / span));
      }
    }
    for (const auto& run : outcome.runs) {
      const std::string stem = "scatter_" + task + "_" + method_slug(run.method);
      files.push_back({stem + ".csv", scatter_csv(run.embedding, labels)});
      files.push_back({stem + ".svg", scatter_svg(run.embedding, labels,
                                                  task + " / " + method_slug(run.method) + " / m=" +
                                                      std::to_string(run.decomposition.m))});
    }
  }
  return files;
}

void classification_task(const RunConfig& config, std::ostream& log, ExperimentReport& report) {
  const PointCloud all = load_idx(config.mnist_images, config.mnist_labels, config.rescale);
  require(config.n_train + config.n_test <= all.size(),
          "n_train + n_test = " + std::to_string(config.n_train + config.n_test) + " exceeds the " +
              std::to_string(all.size()) + " images available");
  const Split split = subsample(all, config.n_train, config.n_test, config.split_seed);

  ClassificationConfig cc;
  cc.task = std::string(to_string(config.task));
  cc.p = config.p;
  cc.epsilon_grid = config.epsilon_grid;
  cc.methods = config.methods;
  cc.seeds = seed_list(config);
  cc.classifier.folds = config.folds;

  std::vector<Eigen::Index> sizes = config.task == Task::sweep ? config.m_list : std::vector<Eigen::Index>{*config.m};
  for (Eigen::Index m : sizes) {
    cc.m = m;
    log << cc.task << ": n_train=" << config.n_train << " n_test=" << config.n_test << " m=" << m << " over "
        << cc.epsilon_grid.size() << " bandwidths and " << cc.seeds.size() << " seeds\n";
    const auto outcome = run_classification(split.train, split.test, cc);
    for (const auto& r : outcome.runs) {
      if (!r.ok()) log << "  " << to_string(r.method) << " epsilon=" << r.epsilon << " failed: " << r.error << "\n";
    }
    report.merge(outcome.report);
  }
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ",";
    if constexpr (std::is_floating_point_v<T>) {
      out += format_number(v);
    } else {
      out += std::to_string(v);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Task task) {
  switch (task) {
    case Task::manifold:
      return "manifold";
    case Task::cluster:
      return "cluster";
    case Task::classify:
      return "classify";
    case Task::sweep:
      return "sweep";
  }
  return "unknown";
}

RunConfig resolve(RunConfig c) {
  if (c.methods.empty()) {
    c.methods = c.task == Task::sweep
                    ? std::vector<Method>{Method::nystrom_uniform, Method::nystrom_weighted, Method::gaussian_projection}
                    : all_methods();
  }
  std::sort(c.methods.begin(), c.methods.end());
  c.methods.erase(std::unique(c.methods.begin(), c.methods.end()), c.methods.end());
  require(c.reps >= 1, "--reps must be at least 1");
  if (c.out_dir.empty()) {
    const char* env = std::getenv(kOutDirVariable);
    c.out_dir = env && *env ? std::filesystem::path(env) : std::filesystem::path("specapprox-out");
  }

  const bool embedding = c.task == Task::manifold || c.task == Task::cluster;
  if (embedding) {
    const bool manifold = c.task == Task::manifold;
    c.n = c.n.value_or(manifold ? 2000 : 2600);
    c.n_ball = c.n_ball.value_or(manifold ? 0 : 400);
    c.m_gp = c.m_gp.value_or(manifold ? 10 : 20);
    c.epsilon = c.epsilon.value_or(manifold ? 15.0 : 0.25);
    c.p = c.p.value_or(2);
    c.cost_matched = c.cost_matched.value_or(!c.m.has_value());
    require(*c.n >= 2, "--n must be at least 2");
    require(*c.n_ball >= 0, "--n-ball must be non-negative");
    require(*c.epsilon > 0.0, "--epsilon must be positive");
    require(*c.p >= 1, "--p must be at least 1");
    require(*c.m_gp >= *c.p + 1, "--m-gp must be at least p + 1");
    require(*c.m_gp <= *c.n, "--m-gp = " + std::to_string(*c.m_gp) + " exceeds n = " + std::to_string(*c.n));
    if (!*c.cost_matched) {
      require(c.m.has_value(), "--m is required when --cost-matched is off");
      require(*c.m >= *c.p + 1, "--m must be at least p + 1");
      require(*c.m <= *c.n, "--m = " + std::to_string(*c.m) + " exceeds n = " + std::to_string(*c.n));
    }
    require(c.epsilon_grid.empty(), "--epsilon-grid applies to classify and sweep only");
    require(c.m_list.empty(), "--m-list applies to sweep only");
  } else {
    require(!c.mnist_images.empty() && !c.mnist_labels.empty(),
            "--mnist-images and --mnist-labels are required for " + std::string(to_string(c.task)));
    require(c.n_train >= 2 && c.n_test >= 1, "--n-train must be at least 2 and --n-test at least 1");
    require(c.folds >= 2, "--folds must be at least 2");
    require(c.folds <= c.n_train, "--folds exceeds n_train");
    require(!c.cost_matched.value_or(false), "--cost-matched applies to manifold and cluster only");
    c.cost_matched = false;
    if (c.epsilon_grid.empty()) {
      c.epsilon_grid = c.epsilon ? std::vector<double>{*c.epsilon} : std::vector<double>{40.0, 80.0, 160.0};
    } else {
      require(!c.epsilon, "give either --epsilon or --epsilon-grid, not both");
    }
    for (double e : c.epsilon_grid) require(e > 0.0, "bandwidths must be positive");
    const Eigen::Index n = c.n_train + c.n_test;
    if (c.task == Task::classify) {
      c.m = c.m.value_or(400);
      require(c.m_list.empty(), "--m-list applies to sweep only");
      require(*c.m >= 2 && *c.m <= n, "--m = " + std::to_string(*c.m) + " must lie in [2, " + std::to_string(n) + "]");
    } else {
      if (c.m_list.empty()) c.m_list = {50, 150, 450};
      require(!c.m, "sweep takes --m-list rather than --m");
      for (Eigen::Index m : c.m_list) {
        require(m >= 2 && m <= n, "--m-list entry " + std::to_string(m) + " must lie in [2, " + std::to_string(n) + "]");
      }
    }
    if (c.p) {
      const Eigen::Index smallest = c.task == Task::classify ? *c.m : *std::min_element(c.m_list.begin(), c.m_list.end());
      require(*c.p >= 1 && *c.p + 1 <= smallest, "--p must satisfy 1 <= p <= m - 1");
    }
  }
  return c;
}

std::string scatter_csv(const Embedding& embedding, const std::vector<int>& labels) {
  std::ostringstream out;
  for (Eigen::Index j = 0; j < embedding.dim(); ++j) out << "c" << j + 1 << ",";
  out << "label\n";
  for (Eigen::Index i = 0; i < embedding.size(); ++i) {
    for (Eigen::Index j = 0; j < embedding.dim(); ++j) out << format_number(embedding.coords(i, j)) << ",";
    out << labels[static_cast<std::size_t>(i)] << "\n";
  }
  return out.str();
}

std::string scatter_svg(const Embedding& embedding, const std::vector<int>& labels, const std::string& title) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  constexpr double size = 480.0;
  constexpr double margin = 30.0;
  const Eigen::Index cols = std::min<Eigen::Index>(2, embedding.dim());
  const Vector x = embedding.coords.col(0);
  const Vector y = cols > 1 ? Vector(embedding.coords.col(1)) : Vector::Zero(x.size());
  auto scale = [&](const Vector& v, double value, bool flip) {
    const double lo = v.minCoeff();
    const double span = v.maxCoeff() - lo;
    const double t = span > 0.0 ? (value - lo) / span : 0.5;
    return margin + (flip ? 1.0 - t : t) * (size - 2.0 * margin);
  };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
  std::map<int, std::size_t> colors;
  for (int l : labels) colors.emplace(l, colors.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    out << "<circle cx=\"" << format_number(std::round(scale(x, x(i), false) * 10.0) / 10.0) << "\" cy=\""
        << format_number(std::round(scale(y, y(i), true) * 10.0) / 10.0) << "\" r=\"1.6\" fill=\""
        << palette[colors[label] % std::size(palette)] << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["task"] = std::string(to_string(c.task));
  std::vector<std::string> methods;
  for (Method m : c.methods) methods.push_back(method_slug(m));
  j["methods"] = methods;
  auto opt = [&](const char* key, const auto& value) {
    if (value) {
      j[key] = *value;
    } else {
      j[key] = nullptr;
    }
  };
  opt("n", c.n);
  opt("n_ball", c.n_ball);
  opt("m", c.m);
  opt("m_gp", c.m_gp);
  j["m_list"] = c.m_list;
  opt("cost_matched", c.cost_matched);
  opt("p", c.p);
  opt("epsilon", c.epsilon);
  j["epsilon_grid"] = c.epsilon_grid;
  j["seed"] = c.seed;
  j["reps"] = c.reps;
  j["split_seed"] = c.split_seed;
  j["mnist_images"] = c.mnist_images.string();
  j["mnist_labels"] = c.mnist_labels.string();
  j["n_train"] = c.n_train;
  j["n_test"] = c.n_test;
  j["folds"] = c.folds;
  j["rescale"] = c.rescale;
  j["timing"] = c.timing;
  return j.dump(2) + "\n";
}

int run(const RunConfig& config, std::ostream& log, std::ostream& err) {
  try {
    ExperimentReport report;
    std::vector<PendingFile> files;
    if (config.task == Task::manifold || config.task == Task::cluster) {
      files = embedding_task(config, log, report);
    } else {
      classification_task(config, log, report);
    }
    report.sort();
    files.insert(files.begin(), {{"report.csv", report.to_csv(config.timing)}, {"config.json", config_json(config)}});
    write_all(config.out_dir, files);
    log << "wrote " << files.size() << " files to " << config.out_dir.string() << "\n";
    return kOk;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const DegenerateGraphError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalError;
  }
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Approximate graph-Laplacian eigenvectors: Nystrom extension versus Gaussian projection"};
  app.require_subcommand(1);
  auto* cmd = app.add_subcommand("run", "Run one experiment and write its report");

  RunConfig config;
  std::string task = "manifold";
  std::vector<std::string> methods;
  std::optional<Eigen::Index> n, n_ball, m, m_gp, p;
  std::optional<double> epsilon;
  bool cost_matched = false;
  bool no_cost_matched = false;
  bool no_rescale = false;
  std::string out_dir;

  cmd->add_option("--task", task, "manifold | cluster | classify | sweep")
      ->check(CLI::IsMember({"manifold", "cluster", "classify", "sweep"}));
  cmd->add_option("--method,--methods", methods,
                  "exact, nystrom-uniform, nystrom-weighted, gp or all (repeatable, comma separated)")
      ->delimiter(',');
  cmd->add_option("--n", n, "points generated for manifold (fishbowl) or cluster (bowl before the cut)");
  cmd->add_option("--n-ball", n_ball, "ball points for the cluster task");
  cmd->add_option("--m", m, "Nystrom landmarks / projection width");
  cmd->add_option("--m-gp", m_gp, "Gaussian projection width for manifold and cluster");
  cmd->add_option("--m-list", config.m_list, "sweep sizes")->delimiter(',');
  cmd->add_flag("--cost-matched", cost_matched, "set m_nys = round(sqrt(n m_gp))");
  cmd->add_flag("--no-cost-matched", no_cost_matched, "use --m for Nystrom");
  cmd->add_option("--p", p, "diffusion coordinates (default 2, or m - 1 for classification)");
  cmd->add_option("--epsilon", epsilon, "kernel bandwidth");
  cmd->add_option("--epsilon-grid", config.epsilon_grid, "bandwidth grid for classify/sweep")->delimiter(',');
  cmd->add_option("--seed", config.seed, "first seed");
  cmd->add_option("--reps", config.reps, "repetitions (seeds seed .. seed + reps - 1)");
  cmd->add_option("--split-seed", config.split_seed, "seed of the train/test draw");
  cmd->add_option("--mnist-images", config.mnist_images, "IDX image file (optionally gzip)");
  cmd->add_option("--mnist-labels", config.mnist_labels, "IDX label file (optionally gzip)");
  cmd->add_option("--n-train", config.n_train, "training digits");
  cmd->add_option("--n-test", config.n_test, "test digits");
  cmd->add_option("--folds", config.folds, "cross-validation folds");
  cmd->add_flag("--no-rescale", no_rescale, "keep raw 0..255 pixel values");
  cmd->add_option("--out-dir", out_dir, std::string("output directory (default $") + kOutDirVariable + " or ./specapprox-out)");
  cmd->add_flag("--timing", config.timing, "record wall-clock times in report.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    config.task = task == "manifold" ? Task::manifold
                  : task == "cluster" ? Task::cluster
                  : task == "classify" ? Task::classify
                                       : Task::sweep;
    for (const auto& name : methods) {
      if (name == "all") {
        const auto every = all_methods();
        config.methods.insert(config.methods.end(), every.begin(), every.end());
      } else {
        config.methods.push_back(parse_method(name));
      }
    }
    if (cost_matched && no_cost_matched) throw ParameterError("--cost-matched and --no-cost-matched conflict");
    if (cost_matched) config.cost_matched = true;
    if (no_cost_matched) config.cost_matched = false;
    config.n = n;
    config.n_ball = n_ball;
    config.m = m;
    config.m_gp = m_gp;
    config.p = p;
    config.epsilon = epsilon;
    config.rescale = !no_rescale;
    config.out_dir = out_dir;
    config = resolve(config);
  } catch (const std::exception& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  }
  return run(config, out, err);
}

}  // namespace specapprox::cli
