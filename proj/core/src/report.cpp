#include "specapprox/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

#include "specapprox/errors.hpp"
#include "text_util.hpp"

namespace specapprox {

void ExperimentReport::merge(const ExperimentReport& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

void ExperimentReport::sort() {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.task, a.method, a.m, a.epsilon, a.seed, a.metric) <
           std::tie(b.task, b.method, b.m, b.epsilon, b.seed, b.metric);
  });
}

std::string ExperimentReport::to_csv(bool include_timing) const {
  std::ostringstream out;
  out << "task,method,n,m,epsilon,seed,metric_name,metric_value,wall_ms\n";
  for (const auto& r : rows) {
    out << r.task << ',' << r.method << ',' << r.n << ',' << r.m << ',' << detail::format_double(r.epsilon)
        << ',' << r.seed << ',' << r.metric << ',' << detail::format_double(r.value) << ',';
    if (include_timing) {
      out << detail::format_double(r.wall_ms);
    } else {
      out << "NA";
    }
    out << '\n';
  }
  return out.str();
}

void ExperimentReport::write_csv(const std::filesystem::path& path, bool include_timing) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << to_csv(include_timing);
  if (!out) throw IoError("write failed: " + path.string());
}

std::optional<double> ExperimentReport::find(const std::string& task, const std::string& method,
                                             const std::string& metric, std::uint64_t seed) const {
  for (const auto& r : rows) {
    if (r.task == task && r.method == method && r.metric == metric && r.seed == seed) return r.value;
  }
  return std::nullopt;
}

}  // namespace specapprox
