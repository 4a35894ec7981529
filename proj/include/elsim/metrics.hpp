#ifndef ELSIM_METRICS_HPP_
#define ELSIM_METRICS_HPP_

#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "elsim/skill_id.hpp"

namespace elsim {

// Shortest representation that parses back to the same double. "nan" for
// missing values.
std::string format_double(double value);

struct MetricsRow {
  std::int64_t step = 0;
  std::int64_t episode = 0;
  SkillId skill;
  double r_tree = 0.0;
  double disc_loss = 0.0;
  double dqn_loss = 0.0;
  int n_leaves = 0;
};

using MetricsSink = std::function<void(const MetricsRow&)>;

std::string metrics_csv_header();
std::string metrics_csv_line(const MetricsRow& row);

// Streams rows to a CSV file with the canonical header.
class MetricsCsvWriter {
 public:
  explicit MetricsCsvWriter(const std::string& path);
  void write(const MetricsRow& row);
  void flush();

 private:
  std::ofstream out_;
};

// Per-cell visit counts of one evaluated skill.
struct DensityGrid {
  int width = 0;
  int height = 0;
  std::vector<std::int64_t> counts;

  DensityGrid() = default;
  DensityGrid(int width, int height);
  std::int64_t& at(int x, int y);
  std::int64_t at(int x, int y) const;
  std::int64_t total() const;
  std::string to_csv() const;  // height rows of comma-separated counts
};

// Overlap of two grids as distributions: sum of cell-wise minima of the
// normalized counts. 1 for identical supports, 0 for disjoint ones.
double histogram_intersection(const DensityGrid& a, const DensityGrid& b);

}  // namespace elsim

#endif  // ELSIM_METRICS_HPP_
