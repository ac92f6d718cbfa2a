#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace specapprox {

/// One metric of one run: (task, method, n, m, epsilon, seed, metric, value, wall_ms).
struct ReportRow {
  std::string task;
  std::string method;
  std::int64_t n = 0;
  std::int64_t m = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
  double wall_ms = 0.0;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;

  void add(ReportRow row) { rows.push_back(std::move(row)); }
  void merge(const ExperimentReport& other);

  /// Stable sort by (task, method, m, epsilon, seed, metric).
  void sort();

  /// Header plus one line per row. Without `include_timing` the wall_ms
  /// column holds "NA" so identical runs produce identical bytes.
  [[nodiscard]] std::string to_csv(bool include_timing) const;
  void write_csv(const std::filesystem::path& path, bool include_timing) const;

  [[nodiscard]] std::optional<double> find(const std::string& task, const std::string& method,
                                           const std::string& metric, std::uint64_t seed) const;
};

}  // namespace specapprox
