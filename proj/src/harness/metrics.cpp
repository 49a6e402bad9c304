#include "aerostar/harness/metrics.hpp"

#include "aerostar/harness/config.hpp"

#include <stdexcept>

namespace aerostar::harness {

const std::vector<std::string>& metrics_header() {
  static const std::vector<std::string> header{
      "episode", "step", "reward", "sum_rate", "power", "efficiency", "hfi", "jfi",
      "qos_violation_rate", "uav_x", "uav_y", "uav_z", "reward_ma50", "wall_ms"};
  return header;
}

std::string format_row(const MetricsRow& r) {
  std::string line = std::to_string(r.episode) + "," + std::to_string(r.step);
  for (const double x : {r.reward, r.sum_rate, r.power, r.efficiency, r.hfi, r.jfi, r.qos_violation_rate,
                         r.uav_x, r.uav_y, r.uav_z, r.reward_ma50, r.wall_ms}) {
    line += ",";
    line += format_double(x);
  }
  return line;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::out | std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write(header);
}

void CsvWriter::write(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("CsvWriter: row width does not match the header");
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ",";
    line += cells[i];
  }
  write_line(line);
}

void CsvWriter::write_line(const std::string& line) {
  out_ << line << '\n';
  if (!out_) throw std::runtime_error("write to '" + path_.string() + "' failed");
}

MovingAverage::MovingAverage(std::size_t window) : window_(window) {
  if (window == 0) throw std::invalid_argument("MovingAverage: window must be positive");
}

double MovingAverage::push(double x) {
  items_.push_back(x);
  sum_ += x;
  if (items_.size() > window_) {
    sum_ -= items_.front();
    items_.pop_front();
  }
  return value();
}

double MovingAverage::value() const {
  return items_.empty() ? 0.0 : sum_ / static_cast<double>(items_.size());
}

}  // namespace aerostar::harness
