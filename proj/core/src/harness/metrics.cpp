#include "fedsel/harness/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace fedsel::harness {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const MetricsRow& r) {
  std::string line;
  line += std::to_string(r.seed);
  line += ',' + std::to_string(r.episode);
  line += ',' + std::to_string(r.service);
  line += ',' + format_double(r.reward);
  line += ',' + format_double(r.final_accuracy);
  line += ',' + std::to_string(r.slots_to_target);
  line += ',' + format_double(r.total_spend);
  line += ',' + format_double(r.clients_per_slot);
  return line;
}

MetricsRow parse_metrics_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (cells.size() != 8) throw std::runtime_error("metrics row needs 8 fields: " + line);
  MetricsRow r;
  r.seed = std::stoull(cells[0]);
  r.episode = std::stoi(cells[1]);
  r.service = std::stoi(cells[2]);
  r.reward = std::stod(cells[3]);
  r.final_accuracy = std::stod(cells[4]);
  r.slots_to_target = std::stoi(cells[5]);
  r.total_spend = std::stod(cells[6]);
  r.clients_per_slot = std::stod(cells[7]);
  return r;
}

std::vector<MetricsRow> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw std::runtime_error("metrics file has an unexpected header: " + path.string());
  }
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_metrics_line(line));
  }
  return rows;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& header,
                     bool flush_each_line)
    : path_(path), out_(path, std::ios::out | std::ios::trunc), flush_each_line_(flush_each_line) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  write_line(header);
}

void CsvWriter::write_line(const std::string& line) {
  out_ << line << '\n';
  if (flush_each_line_) out_.flush();
  if (!out_) throw std::runtime_error("write failed for " + path_.string());
}

std::vector<double> normalize_rewards(std::span<const double> series, int window) {
  if (series.empty()) throw std::invalid_argument("normalize_rewards: empty series");
  if (window < 1) throw std::invalid_argument("normalize_rewards: window must be >= 1");
  std::vector<double> smoothed(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t first = i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = first; k <= i; ++k) sum += series[k];
    smoothed[i] = sum / static_cast<double>(i + 1 - first);
  }
  const double peak = *std::max_element(smoothed.begin(), smoothed.end());
  if (!(peak > 0.0)) throw std::invalid_argument("normalize_rewards: series has no positive peak");
  for (double& v : smoothed) v /= peak;
  return smoothed;
}

int episodes_to_plateau(std::span<const double> series, int window, double threshold) {
  const auto normalized = normalize_rewards(series, window);
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    if (normalized[i] >= threshold) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(normalized.size());
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace fedsel::harness
