#pragma once

#include <cstdint>

#include "sigver/morphology.hpp"
#include "sigver/raster.hpp"

namespace sigver::preprocess {

using raster::GrayImage;

inline constexpr int kCanonicalRows = 192;
inline constexpr int kCanonicalCols = 256;

enum class PreprocessMode {
  /// median -> Otsu -> crop -> resize -> thicken
  Offline,
  /// fixed threshold -> dilate(disk1) -> crop -> resize -> thicken
  OnlineTrace,
};

/// 3x3 median with replicate-padded borders.
GrayImage median_filter3(const GrayImage& img);

/// Threshold t maximizing the between-class variance, where the lower class
/// is {v < t}. Ties go to the smallest t. Throws DegenerateHistogram when
/// every pixel has the same value.
int otsu_threshold(const GrayImage& img);

/// value < t becomes ink. t must lie in [0, 255].
BinaryImage binarize(const GrayImage& img, int threshold);

/// Tight bounding box of the ink. Throws EmptySignature on a blank image.
BinaryImage crop_to_content(const BinaryImage& img);

/// Catmull-Rom (a = -0.5) bicubic resampling with edge clamping and
/// pixel-center alignment. Output samples are rounded and clamped to [0, 255].
GrayImage resize_bicubic(const GrayImage& img, int out_width, int out_height);

/// Catmull-Rom kernel weight at distance x.
double catmull_rom(double x) noexcept;

/// Gray-domain bicubic resize to 192x256 followed by re-binarization at 128.
BinaryImage resize_to_canonical(const BinaryImage& img);

/// The full pipeline; output is always 192 rows by 256 columns.
BinaryImage preprocess(const GrayImage& img, PreprocessMode mode);

PreprocessMode parse_mode(std::string_view name);
std::string_view to_string(PreprocessMode mode) noexcept;

}  // namespace sigver::preprocess
