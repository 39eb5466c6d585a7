#ifndef FEMTO_RESULTS_HPP
#define FEMTO_RESULTS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace femto {

struct ResultRow {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string sweep;
  std::string algorithm;
  std::string metric;
  double value = 0.0;
};

struct SummaryRow {
  std::string scenario;
  std::string sweep;
  std::string algorithm;
  std::string metric;
  double mean = 0.0;
  double ci95 = 0.0;  // half-width, Student t
  std::size_t n = 0;
};

/// Shortest round-trip decimal form; identical on every run.
std::string format_number(double value);

/// Mean and 95% confidence half-width over seeds for each
/// (scenario, sweep, algorithm, metric), in order of first appearance.
std::vector<SummaryRow> aggregate(const std::vector<ResultRow>& rows);

std::string to_csv(const std::vector<ResultRow>& rows);
std::string to_csv(const std::vector<SummaryRow>& rows);

/// Writes `text` to `path`, creating parent directories. Throws
/// std::runtime_error when the file cannot be written.
void write_text(const std::string& path, const std::string& text);

}  // namespace femto

#endif  // FEMTO_RESULTS_HPP
