#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "specapprox/diffusion.hpp"
#include "specapprox/spectral.hpp"

namespace specapprox::cli {

enum class Task { manifold, cluster, classify, sweep };

std::string_view to_string(Task task);

enum ExitCode : int { kOk = 0, kConfigError = 1, kIoError = 2, kNumericalError = 3 };

/// Everything one `run` invocation needs. Unset optionals take task-specific
/// defaults in `resolve`.
struct RunConfig {
  Task task = Task::manifold;
  std::vector<Method> methods;  ///< empty means all four

  // Synthetic manifolds
  std::optional<Eigen::Index> n;
  std::optional<Eigen::Index> n_ball;

  // Approximation sizes
  std::optional<Eigen::Index> m;
  std::optional<Eigen::Index> m_gp;
  std::vector<Eigen::Index> m_list;
  std::optional<bool> cost_matched;
  std::optional<Eigen::Index> p;

  // Bandwidth
  std::optional<double> epsilon;
  std::vector<double> epsilon_grid;

  // Randomness
  std::uint64_t seed = 0;
  int reps = 1;
  std::uint64_t split_seed = 0;

  // Classification
  std::filesystem::path mnist_images;
  std::filesystem::path mnist_labels;
  Eigen::Index n_train = 4000;
  Eigen::Index n_test = 800;
  int folds = 10;
  bool rescale = true;

  std::filesystem::path out_dir;
  bool timing = false;
};

/// Fills task-dependent defaults and checks every field. Throws
/// ParameterError on the first invalid setting; nothing is computed.
RunConfig resolve(RunConfig config);

/// Runs a resolved configuration and writes report.csv, config.json and
/// (manifold/cluster) one scatter CSV plus SVG per method into out_dir.
/// Files are only written once every computation has succeeded.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Parses argv (`specapprox run ...`) and dispatches. Returns the exit code.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

std::string config_json(const RunConfig& config);

/// Minimal self-contained SVG scatter of the first two embedding columns,
/// colored by label.
std::string scatter_svg(const Embedding& embedding, const std::vector<int>& labels, const std::string& title);

std::string scatter_csv(const Embedding& embedding, const std::vector<int>& labels);

}  // namespace specapprox::cli
