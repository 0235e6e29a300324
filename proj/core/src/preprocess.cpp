#include "sigver/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "sigver/error.hpp"

namespace sigver::preprocess {

namespace {

// Median of nine via a 19-exchange sorting network (Paeth).
inline std::uint8_t median9(std::array<std::uint8_t, 9>& p) {
  auto sort2 = [&p](int a, int b) {
    const auto lo = std::min(p[a], p[b]);
    p[b] = std::max(p[a], p[b]);
    p[a] = lo;
  };
  sort2(1, 2); sort2(4, 5); sort2(7, 8); sort2(0, 1); sort2(3, 4); sort2(6, 7);
  sort2(1, 2); sort2(4, 5); sort2(7, 8); sort2(0, 3); sort2(5, 8); sort2(4, 7);
  sort2(3, 6); sort2(1, 4); sort2(2, 5); sort2(4, 7); sort2(4, 2); sort2(6, 4);
  sort2(4, 2);
  return p[4];
}

}  // namespace

GrayImage median_filter3(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  const int w = img.width();
  const int h = img.height();
  const auto px = img.pixels();
  std::array<std::uint8_t, 9> window{};
  std::array<int, 3> cols{};
  for (int r = 0; r < h; ++r) {
    const std::array<const std::uint8_t*, 3> rows{
        px.data() + static_cast<std::size_t>(std::max(r - 1, 0)) * static_cast<std::size_t>(w),
        px.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(w),
        px.data() + static_cast<std::size_t>(std::min(r + 1, h - 1)) * static_cast<std::size_t>(w)};
    for (int c = 0; c < w; ++c) {
      cols = {std::max(c - 1, 0), c, std::min(c + 1, w - 1)};
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) window[i * 3 + j] = rows[i][cols[j]];
      out.at(r, c) = median9(window);
    }
  }
  return out;
}

int otsu_threshold(const GrayImage& img) {
  std::array<std::uint64_t, 256> hist{};
  for (const auto v : img.pixels()) ++hist[v];

  const auto total = static_cast<std::uint64_t>(img.pixels().size());
  std::uint64_t sum_all = 0;
  for (std::size_t v = 0; v < 256; ++v) sum_all += v * hist[v];

  // sigma_b^2 * N^2 = (N*S0 - n0*S)^2 / (n0*n1); the numerator difference is
  // an exact integer, so equal partitions give bit-identical scores.
  double best = 0.0;
  int best_t = -1;
  std::uint64_t n0 = 0;
  std::uint64_t s0 = 0;
  for (int t = 1; t <= 255; ++t) {
    n0 += hist[static_cast<std::size_t>(t - 1)];
    s0 += static_cast<std::uint64_t>(t - 1) * hist[static_cast<std::size_t>(t - 1)];
    const std::uint64_t n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    const double diff = static_cast<double>(static_cast<std::int64_t>(total * s0) -
                                            static_cast<std::int64_t>(n0 * sum_all));
    const double score = diff * diff / (static_cast<double>(n0) * static_cast<double>(n1));
    if (score > best) {
      best = score;
      best_t = t;
    }
  }
  if (best_t < 0) throw Error(ErrorCode::DegenerateHistogram, "image is constant");
  return best_t;
}

BinaryImage binarize(const GrayImage& img, int threshold) {
  if (threshold < 0 || threshold > 255)
    throw Error(ErrorCode::InvalidArgument, "threshold must lie in [0, 255]");
  BinaryImage out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c) out.set(r, c, img.at(r, c) < threshold);
  return out;
}

BinaryImage crop_to_content(const BinaryImage& img) {
  int top = img.height();
  int bottom = -1;
  int left = img.width();
  int right = -1;
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      if (!img.at(r, c)) continue;
      top = std::min(top, r);
      bottom = std::max(bottom, r);
      left = std::min(left, c);
      right = std::max(right, c);
    }
  }
  if (bottom < 0) throw Error(ErrorCode::EmptySignature, "no ink pixels");
  BinaryImage out(right - left + 1, bottom - top + 1);
  for (int r = top; r <= bottom; ++r)
    for (int c = left; c <= right; ++c) out.set(r - top, c - left, img.at(r, c));
  return out;
}

double catmull_rom(double x) noexcept {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

namespace {

struct Taps {
  std::array<int, 4> index;
  std::array<double, 4> weight;
};

std::vector<Taps> make_taps(int in_size, int out_size) {
  std::vector<Taps> taps(static_cast<std::size_t>(out_size));
  const double scale = static_cast<double>(in_size) / out_size;
  for (int o = 0; o < out_size; ++o) {
    const double src = (o + 0.5) * scale - 0.5;
    const int base = static_cast<int>(std::floor(src));
    auto& t = taps[static_cast<std::size_t>(o)];
    for (int k = 0; k < 4; ++k) {
      const int i = base - 1 + k;
      t.index[static_cast<std::size_t>(k)] = std::clamp(i, 0, in_size - 1);
      t.weight[static_cast<std::size_t>(k)] = catmull_rom(src - i);
    }
  }
  return taps;
}

}  // namespace

GrayImage resize_bicubic(const GrayImage& img, int out_width, int out_height) {
  if (out_width <= 0 || out_height <= 0)
    throw Error(ErrorCode::InvalidArgument, "resize target must be positive");
  const auto col_taps = make_taps(img.width(), out_width);
  const auto row_taps = make_taps(img.height(), out_height);

  // Horizontal pass into doubles, then vertical; no intermediate rounding.
  std::vector<double> tmp(static_cast<std::size_t>(img.height()) * out_width);
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < out_width; ++c) {
      const auto& t = col_taps[static_cast<std::size_t>(c)];
      double acc = 0.0;
      for (std::size_t k = 0; k < 4; ++k) acc += t.weight[k] * img.at(r, t.index[k]);
      tmp[static_cast<std::size_t>(r) * out_width + c] = acc;
    }
  }
  GrayImage out(out_width, out_height);
  for (int r = 0; r < out_height; ++r) {
    const auto& t = row_taps[static_cast<std::size_t>(r)];
    for (int c = 0; c < out_width; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 4; ++k)
        acc += t.weight[k] * tmp[static_cast<std::size_t>(t.index[k]) * out_width + c];
      out.at(r, c) = static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
    }
  }
  return out;
}

BinaryImage resize_to_canonical(const BinaryImage& img) {
  const auto gray = raster::binary_to_gray(img);
  return binarize(resize_bicubic(gray, kCanonicalCols, kCanonicalRows), 128);
}

BinaryImage preprocess(const GrayImage& img, PreprocessMode mode) {
  BinaryImage ink;
  if (mode == PreprocessMode::Offline) {
    const auto filtered = median_filter3(img);
    int threshold = 0;
    try {
      threshold = otsu_threshold(filtered);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateHistogram) throw;
      throw Error(ErrorCode::EmptySignature, "blank image (constant intensity)");
    }
    ink = binarize(filtered, threshold);
  } else {
    ink = dilate(binarize(img, 128), StructuringElement::disk1());
  }
  return thicken_to_stability(resize_to_canonical(crop_to_content(ink)));
}

PreprocessMode parse_mode(std::string_view name) {
  if (name == "offline") return PreprocessMode::Offline;
  if (name == "online" || name == "online-trace") return PreprocessMode::OnlineTrace;
  throw Error(ErrorCode::InvalidArgument, "unknown preprocess mode '" + std::string(name) + "'");
}

std::string_view to_string(PreprocessMode mode) noexcept {
  return mode == PreprocessMode::Offline ? "offline" : "online";
}

}  // namespace sigver::preprocess
