#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace fedsel::harness {

struct MetricsRow {
  std::uint64_t seed = 0;
  int episode = 0;  // 1-based
  int service = 0;
  double reward = 0.0;
  double final_accuracy = 0.0;
  int slots_to_target = -1;
  double total_spend = 0.0;
  double clients_per_slot = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "seed,episode,service,reward,final_accuracy,slots_to_target,total_spend,clients_per_slot";

/// Shortest round-trip decimal form.
std::string format_double(double v);
std::string to_csv(const MetricsRow& row);
MetricsRow parse_metrics_line(const std::string& line);
std::vector<MetricsRow> read_metrics(const std::filesystem::path& path);

/// Append-only CSV writer; the header is written on open. With
/// `flush_each_line` every row reaches the file as soon as it is appended.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header,
            bool flush_each_line = true);
  void write_line(const std::string& line);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  bool flush_each_line_;
};

/// Trailing moving average (partial windows at the start) scaled so the
/// peak equals 1. Throws std::invalid_argument for an empty series or a
/// series whose windowed peak is not positive.
std::vector<double> normalize_rewards(std::span<const double> series, int window = 10);

/// First 1-based episode whose normalised windowed reward reaches
/// `threshold`; series.size() when never reached.
int episodes_to_plateau(std::span<const double> series, int window = 10, double threshold = 0.95);

double median(std::vector<double> values);

}  // namespace fedsel::harness
