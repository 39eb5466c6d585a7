#include "femto/results.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

namespace femto {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::vector<SummaryRow> aggregate(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, std::string, std::string, std::string>;
  std::map<Key, std::size_t> index;
  std::vector<SummaryRow> out;
  std::vector<std::vector<double>> samples;
  for (const auto& r : rows) {
    const Key key{r.scenario, r.sweep, r.algorithm, r.metric};
    auto [it, inserted] = index.emplace(key, out.size());
    if (inserted) {
      out.push_back({r.scenario, r.sweep, r.algorithm, r.metric, 0.0, 0.0, 0});
      samples.emplace_back();
    }
    samples[it->second].push_back(r.value);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& x = samples[i];
    const auto n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    out[i].mean = mean;
    out[i].n = n;
    if (n > 1) {
      double ss = 0.0;
      for (double v : x) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / static_cast<double>(n - 1));
      const boost::math::students_t dist(static_cast<double>(n - 1));
      out[i].ci95 = boost::math::quantile(dist, 0.975) * sd / std::sqrt(static_cast<double>(n));
    }
  }
  return out;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string s = "scenario,seed,sweep,algorithm,metric,value\n";
  for (const auto& r : rows)
    s += r.scenario + "," + std::to_string(r.seed) + "," + r.sweep + "," + r.algorithm + "," + r.metric +
         "," + format_number(r.value) + "\n";
  return s;
}

std::string to_csv(const std::vector<SummaryRow>& rows) {
  std::string s = "scenario,sweep,algorithm,metric,mean,ci95,n\n";
  for (const auto& r : rows)
    s += r.scenario + "," + r.sweep + "," + r.algorithm + "," + r.metric + "," + format_number(r.mean) +
         "," + format_number(r.ci95) + "," + std::to_string(r.n) + "\n";
  return s;
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace femto
