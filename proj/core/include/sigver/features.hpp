#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "sigver/raster.hpp"

namespace sigver::features {

using raster::BinaryImage;

inline constexpr int kBlockRows = 48;
inline constexpr int kBlockCols = 64;
inline constexpr int kGridRows = 4;
inline constexpr int kGridCols = 4;
inline constexpr int kBlockCount = kGridRows * kGridCols;
inline constexpr int kFeaturesPerBlock = 8;
inline constexpr int kFeatureDim = kBlockCount * kFeaturesPerBlock + 2;  // 130

/// Blocks with this many ink pixels or fewer contribute eight zeros.
inline constexpr std::size_t kSparseBlockLimit = 20;

/// Read-only rectangular window into a BinaryImage. Pixels outside the window
/// are treated as background by every per-region operation.
class Region {
 public:
  Region(const BinaryImage& img, int row0, int col0, int rows, int cols);
  explicit Region(const BinaryImage& img) : Region(img, 0, 0, img.height(), img.width()) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int row0() const noexcept { return row0_; }
  int col0() const noexcept { return col0_; }

  /// Local coordinates; out-of-window reads return background.
  bool at(int row, int col) const noexcept {
    if (row < 0 || col < 0 || row >= rows_ || col >= cols_) return false;
    return img_->at(row0_ + row, col0_ + col);
  }

 private:
  const BinaryImage* img_;
  int row0_;
  int col0_;
  int rows_;
  int cols_;
};

/// 4x4 row-major tiling of the canonical image into 48x64 blocks.
struct BlockGrid {
  std::vector<Region> blocks;
};

struct Point {
  double x = 0.0;  // row axis
  double y = 0.0;  // column axis
};

struct HeightLength {
  std::size_t height = 0;  // largest per-row ink count
  std::size_t length = 0;  // largest per-column ink count
};

/// Fixed on-disk order: eff_x, eff_y, dist, active, components, isolated, height, length.
struct BlockFeatures {
  double eff_x = 0.0;
  double eff_y = 0.0;
  double dist = 0.0;
  double active = 0.0;
  double components = 0.0;
  double isolated = 0.0;
  double height = 0.0;
  double length = 0.0;

  std::array<double, kFeaturesPerBlock> values() const noexcept {
    return {eff_x, eff_y, dist, active, components, isolated, height, length};
  }
};

using FeatureVector = std::array<double, kFeatureDim>;

/// Throws WrongDimensions unless the image is 192x256.
BlockGrid split_blocks(const BinaryImage& img);

std::size_t count_active(const Region& region);

/// Number of 8-connected ink components (queue-based labeling).
std::size_t connected_components(const Region& region);

/// Ink pixels whose eight neighbors are all background.
std::size_t count_isolated(const Region& region);

/// Centroid of the ink pixels. Throws EmptyRegion.
Point center_of_mass(const Region& region);

/// Half of the largest row ink count and half of the largest column ink count.
/// Throws EmptyRegion.
Point effective_center(const Region& region);

double center_distance(Point a, Point b) noexcept;

HeightLength height_length(const Region& region);

BlockFeatures block_features(const Region& block);

/// 16 blocks x 8 features, then global ink count and global component count.
/// Throws EmptySignature if the image has no ink.
FeatureVector extract(const BinaryImage& img);

/// Per-dimension z-score statistics (population standard deviation).
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  std::size_t dim() const noexcept { return mean.size(); }
  /// Dimensions with stddev below this map to zero.
  static constexpr double kMinStddev = 1e-12;
};

/// Requires at least two rows, all of the same length. Throws TooFewSamples.
Normalizer fit_normalizer(std::span<const std::vector<double>> rows);
Normalizer fit_normalizer(std::span<const FeatureVector> rows);

std::vector<double> apply_normalizer(const Normalizer& stats, std::span<const double> v);

}  // namespace sigver::features
