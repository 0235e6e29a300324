#pragma once

#include <vector>

#include "sigver/raster.hpp"

namespace sigver::preprocess {

using raster::BinaryImage;

/// Binary structuring element with its origin at the geometric center.
/// Width and height are always odd.
class StructuringElement {
 public:
  StructuringElement(int width, int height, std::vector<bool> mask);

  /// 3x3 cross: the 4-neighborhood plus the center.
  static StructuringElement disk1();
  static StructuringElement square(int size);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int half_width() const noexcept { return width_ / 2; }
  int half_height() const noexcept { return height_ / 2; }

  /// Membership at offset (dr, dc) from the origin.
  bool contains(int dr, int dc) const noexcept;

  /// Point reflection through the origin.
  StructuringElement reflect() const;

  friend bool operator==(const StructuringElement&, const StructuringElement&) = default;

 private:
  int width_;
  int height_;
  std::vector<bool> mask_;
};

/// Union of the element translated to every ink pixel. Out-of-bounds is background.
BinaryImage dilate(const BinaryImage& img, const StructuringElement& se);

/// Pixels whose translated element lies entirely inside the ink. Out-of-bounds
/// is background, so pixels whose element leaves the image are never kept.
BinaryImage erode(const BinaryImage& img, const StructuringElement& se);

/// Pixels where every `se_fg` offset is ink and every `se_bg` offset is
/// background. Out-of-bounds pixels count as background.
BinaryImage hit_or_miss(const BinaryImage& img, const StructuringElement& se_fg,
                        const StructuringElement& se_bg);

/// One round of the eight rotated Golay L thinning templates, each applied in
/// parallel over the image and in sequence across templates.
BinaryImage thin_pass(const BinaryImage& img);

/// Repeats thin_pass until nothing changes. The image is treated as padded
/// with one ring of background.
BinaryImage thin_to_stability(const BinaryImage& img);

/// complement(thin_pass(complement(img))).
BinaryImage thicken_pass(const BinaryImage& img);

/// complement(thin_to_stability(complement(img))). The result is a fixpoint of
/// thicken_pass and contains every ink pixel of the input.
BinaryImage thicken_to_stability(const BinaryImage& img);

}  // namespace sigver::preprocess
