#include "elsim/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace elsim {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string metrics_csv_header() { return "step,episode,skill,r_tree,disc_loss,dqn_loss,n_leaves"; }

std::string metrics_csv_line(const MetricsRow& row) {
  std::string line;
  line += std::to_string(row.step);
  line += ',';
  line += std::to_string(row.episode);
  line += ',';
  line += row.skill.str();
  line += ',';
  line += format_double(row.r_tree);
  line += ',';
  line += format_double(row.disc_loss);
  line += ',';
  line += format_double(row.dqn_loss);
  line += ',';
  line += std::to_string(row.n_leaves);
  return line;
}

MetricsCsvWriter::MetricsCsvWriter(const std::string& path) : out_(path) {
  if (!out_) throw std::domain_error("metrics: cannot open '" + path + "'");
  out_ << metrics_csv_header() << '\n';
}

void MetricsCsvWriter::write(const MetricsRow& row) { out_ << metrics_csv_line(row) << '\n'; }

void MetricsCsvWriter::flush() { out_.flush(); }

DensityGrid::DensityGrid(int width, int height)
    : width(width), height(height),
      counts(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0) {
  if (width < 1 || height < 1) throw std::domain_error("DensityGrid: empty grid");
}

std::int64_t& DensityGrid::at(int x, int y) {
  return counts.at(static_cast<std::size_t>(y) * width + x);
}

std::int64_t DensityGrid::at(int x, int y) const {
  return counts.at(static_cast<std::size_t>(y) * width + x);
}

std::int64_t DensityGrid::total() const {
  std::int64_t sum = 0;
  for (std::int64_t c : counts) sum += c;
  return sum;
}

std::string DensityGrid::to_csv() const {
  std::string out;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x > 0) out += ',';
      out += std::to_string(at(x, y));
    }
    out += '\n';
  }
  return out;
}

double histogram_intersection(const DensityGrid& a, const DensityGrid& b) {
  if (a.width != b.width || a.height != b.height) {
    throw std::domain_error("histogram_intersection: grid shapes differ");
  }
  const double ta = static_cast<double>(a.total());
  const double tb = static_cast<double>(b.total());
  if (ta <= 0.0 || tb <= 0.0) throw std::domain_error("histogram_intersection: empty grid");
  double overlap = 0.0;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    overlap += std::min(a.counts[i] / ta, b.counts[i] / tb);
  }
  return overlap;
}

}  // namespace elsim
