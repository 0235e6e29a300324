#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sigver::raster {

/// 8-bit single-channel image, row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }

  std::uint8_t at(int row, int col) const { return data_[index(row, col)]; }
  std::uint8_t& at(int row, int col) { return data_[index(row, col)]; }

  std::span<const std::uint8_t> pixels() const noexcept { return data_; }
  std::span<std::uint8_t> pixels() noexcept { return data_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Boolean raster where true means ink (foreground).
class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(int width, int height, bool fill = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }

  bool at(int row, int col) const { return data_[index(row, col)] != 0; }
  void set(int row, int col, bool ink) { data_[index(row, col)] = ink ? 1 : 0; }

  /// Out-of-bounds reads are background.
  bool at_or_background(int row, int col) const noexcept {
    if (row < 0 || col < 0 || row >= height_ || col >= width_) return false;
    return data_[index(row, col)] != 0;
  }

  std::size_t ink_count() const noexcept;

  /// Underlying storage: one byte per pixel, 0 or 1.
  std::span<const std::uint8_t> bytes() const noexcept { return data_; }

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

BinaryImage complement(const BinaryImage& img);

/// Decodes a portable graymap ("P5" binary or "P2" ASCII, maxval <= 255).
GrayImage load_gray(std::span<const std::uint8_t> bytes);

/// Encodes as binary P5 with maxval 255.
std::vector<std::uint8_t> save_gray(const GrayImage& img);

GrayImage read_gray_file(const std::string& path);
void write_gray_file(const std::string& path, const GrayImage& img);

/// ink -> 0, background -> 255.
GrayImage binary_to_gray(const BinaryImage& img);

}  // namespace sigver::raster
