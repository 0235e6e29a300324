#include "sigver/features.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "sigver/error.hpp"

namespace sigver::features {

Region::Region(const BinaryImage& img, int row0, int col0, int rows, int cols)
    : img_(&img), row0_(row0), col0_(col0), rows_(rows), cols_(cols) {
  if (row0 < 0 || col0 < 0 || rows < 0 || cols < 0 || row0 + rows > img.height() ||
      col0 + cols > img.width())
    throw Error(ErrorCode::InvalidArgument, "region exceeds image bounds");
}

BlockGrid split_blocks(const BinaryImage& img) {
  if (img.height() != kGridRows * kBlockRows || img.width() != kGridCols * kBlockCols)
    throw Error(ErrorCode::WrongDimensions, "expected a 192x256 canonical image, got " +
                                                std::to_string(img.height()) + "x" +
                                                std::to_string(img.width()));
  BlockGrid grid;
  grid.blocks.reserve(kBlockCount);
  for (int br = 0; br < kGridRows; ++br)
    for (int bc = 0; bc < kGridCols; ++bc)
      grid.blocks.emplace_back(img, br * kBlockRows, bc * kBlockCols, kBlockRows, kBlockCols);
  return grid;
}

std::size_t count_active(const Region& region) {
  std::size_t n = 0;
  for (int r = 0; r < region.rows(); ++r)
    for (int c = 0; c < region.cols(); ++c) n += region.at(r, c) ? 1 : 0;
  return n;
}

std::size_t connected_components(const Region& region) {
  const int rows = region.rows();
  const int cols = region.cols();
  std::vector<std::uint8_t> labeled(static_cast<std::size_t>(rows) * cols, 0);
  std::deque<std::pair<int, int>> queue;
  std::size_t count = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!region.at(r, c) || labeled[static_cast<std::size_t>(r) * cols + c]) continue;
      ++count;
      labeled[static_cast<std::size_t>(r) * cols + c] = 1;
      queue.emplace_back(r, c);
      while (!queue.empty()) {
        const auto [pr, pc] = queue.front();
        queue.pop_front();
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int nr = pr + dr;
            const int nc = pc + dc;
            if (!region.at(nr, nc)) continue;
            auto& mark = labeled[static_cast<std::size_t>(nr) * cols + nc];
            if (mark) continue;
            mark = 1;
            queue.emplace_back(nr, nc);
          }
        }
      }
    }
  }
  return count;
}

std::size_t count_isolated(const Region& region) {
  std::size_t n = 0;
  for (int r = 0; r < region.rows(); ++r) {
    for (int c = 0; c < region.cols(); ++c) {
      if (!region.at(r, c)) continue;
      bool alone = true;
      for (int dr = -1; dr <= 1 && alone; ++dr)
        for (int dc = -1; dc <= 1 && alone; ++dc)
          if ((dr || dc) && region.at(r + dr, c + dc)) alone = false;
      n += alone ? 1 : 0;
    }
  }
  return n;
}

Point center_of_mass(const Region& region) {
  double sum_r = 0.0;
  double sum_c = 0.0;
  std::size_t n = 0;
  for (int r = 0; r < region.rows(); ++r)
    for (int c = 0; c < region.cols(); ++c)
      if (region.at(r, c)) {
        sum_r += r;
        sum_c += c;
        ++n;
      }
  if (n == 0) throw Error(ErrorCode::EmptyRegion, "center of mass of an empty region");
  return {sum_r / static_cast<double>(n), sum_c / static_cast<double>(n)};
}

HeightLength height_length(const Region& region) {
  HeightLength hl;
  std::vector<std::size_t> col_counts(static_cast<std::size_t>(region.cols()), 0);
  for (int r = 0; r < region.rows(); ++r) {
    std::size_t row_count = 0;
    for (int c = 0; c < region.cols(); ++c)
      if (region.at(r, c)) {
        ++row_count;
        ++col_counts[static_cast<std::size_t>(c)];
      }
    hl.height = std::max(hl.height, row_count);
  }
  for (const auto n : col_counts) hl.length = std::max(hl.length, n);
  return hl;
}

Point effective_center(const Region& region) {
  const auto hl = height_length(region);
  if (hl.height == 0) throw Error(ErrorCode::EmptyRegion, "effective center of an empty region");
  return {static_cast<double>(hl.height) / 2.0, static_cast<double>(hl.length) / 2.0};
}

double center_distance(Point a, Point b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

BlockFeatures block_features(const Region& block) {
  const auto active = count_active(block);
  if (active <= kSparseBlockLimit) return {};

  const auto cm = center_of_mass(block);
  const auto ec = effective_center(block);
  const auto hl = height_length(block);
  BlockFeatures f;
  f.eff_x = ec.x;
  f.eff_y = ec.y;
  f.dist = center_distance(cm, ec);
  f.active = static_cast<double>(active);
  f.components = static_cast<double>(connected_components(block));
  f.isolated = static_cast<double>(count_isolated(block));
  f.height = static_cast<double>(hl.height);
  f.length = static_cast<double>(hl.length);
  return f;
}

FeatureVector extract(const BinaryImage& img) {
  const auto grid = split_blocks(img);
  const Region whole(img);
  const auto active = count_active(whole);
  if (active == 0) throw Error(ErrorCode::EmptySignature, "no ink in canonical image");

  FeatureVector out{};
  std::size_t k = 0;
  for (const auto& block : grid.blocks)
    for (const auto v : block_features(block).values()) out[k++] = v;
  out[k++] = static_cast<double>(active);
  out[k++] = static_cast<double>(connected_components(whole));
  return out;
}

namespace {

template <typename Row>
Normalizer fit_rows(std::span<const Row> rows) {
  if (rows.size() < 2) throw Error(ErrorCode::TooFewSamples, "normalizer needs at least two vectors");
  const std::size_t dim = rows.front().size();
  Normalizer stats;
  stats.mean.assign(dim, 0.0);
  stats.stddev.assign(dim, 0.0);
  for (const auto& row : rows) {
    if (row.size() != dim) throw Error(ErrorCode::DimensionMismatch, "ragged feature rows");
    for (std::size_t j = 0; j < dim; ++j) stats.mean[j] += row[j];
  }
  const auto n = static_cast<double>(rows.size());
  for (auto& m : stats.mean) m /= n;
  for (const auto& row : rows)
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = row[j] - stats.mean[j];
      stats.stddev[j] += d * d;
    }
  for (auto& s : stats.stddev) s = std::sqrt(s / n);
  return stats;
}

}  // namespace

Normalizer fit_normalizer(std::span<const std::vector<double>> rows) { return fit_rows(rows); }
Normalizer fit_normalizer(std::span<const FeatureVector> rows) { return fit_rows(rows); }

std::vector<double> apply_normalizer(const Normalizer& stats, std::span<const double> v) {
  if (v.size() != stats.dim())
    throw Error(ErrorCode::DimensionMismatch, "vector length " + std::to_string(v.size()) +
                                                  " does not match normalizer dimension " +
                                                  std::to_string(stats.dim()));
  std::vector<double> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j)
    out[j] = stats.stddev[j] < Normalizer::kMinStddev ? 0.0 : (v[j] - stats.mean[j]) / stats.stddev[j];
  return out;
}

}  // namespace sigver::features
