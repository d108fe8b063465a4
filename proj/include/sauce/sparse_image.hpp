#pragma once

#include <Eigen/Core>

#include <vector>

namespace sauce {

struct GridPosition {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridPosition&, const GridPosition&) = default;
};

/// The kept subset S_n of a scan: positions on the scan grid plus their
/// values (one row of `values` per position).
struct SparseImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<GridPosition> positions;
  Eigen::ArrayXXd values;

  Eigen::Index size() const { return Eigen::Index(positions.size()); }
  bool empty() const { return positions.empty(); }

  /// Throws InputError on out-of-bounds or duplicate positions.
  void validate() const;
};

}  // namespace sauce
