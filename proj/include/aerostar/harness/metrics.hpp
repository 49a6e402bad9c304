#pragma once

#include <cstddef>
#include <deque>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace aerostar::harness {

// One CSV line. step = -1 marks the per-episode aggregate row, whose reward
// is the episode return and whose other columns are episode means.
struct MetricsRow {
  int episode = 0;
  int step = -1;
  double reward = 0.0;
  double sum_rate = 0.0;    // bit/s
  double power = 0.0;       // W
  double efficiency = 0.0;  // bit/J
  double hfi = 0.0;
  double jfi = 0.0;
  double qos_violation_rate = 0.0;
  double uav_x = 0.0;
  double uav_y = 0.0;
  double uav_z = 0.0;
  double reward_ma50 = 0.0;
  double wall_ms = 0.0;
};

const std::vector<std::string>& metrics_header();
std::string format_row(const MetricsRow& row);

// Append-only CSV with a single header line.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void write(const std::vector<std::string>& cells);
  void write_line(const std::string& line);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::size_t columns_;
  std::ofstream out_;
};

class MovingAverage {
 public:
  explicit MovingAverage(std::size_t window = 50);
  double push(double x);
  double value() const;

 private:
  std::size_t window_;
  std::deque<double> items_;
  double sum_ = 0.0;
};

}  // namespace aerostar::harness
