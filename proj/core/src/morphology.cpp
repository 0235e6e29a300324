#include "sigver/morphology.hpp"

#include <array>
#include <cstdint>

#include "sigver/error.hpp"

namespace sigver::preprocess {

StructuringElement::StructuringElement(int width, int height, std::vector<bool> mask)
    : width_(width), height_(height), mask_(std::move(mask)) {
  if (width <= 0 || height <= 0 || width % 2 == 0 || height % 2 == 0)
    throw Error(ErrorCode::InvalidArgument, "structuring element dimensions must be odd and positive");
  if (mask_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw Error(ErrorCode::InvalidArgument, "structuring element mask size mismatch");
}

StructuringElement StructuringElement::disk1() {
  return StructuringElement(3, 3, {false, true, false,  //
                                   true,  true, true,   //
                                   false, true, false});
}

StructuringElement StructuringElement::square(int size) {
  return StructuringElement(size, size, std::vector<bool>(static_cast<std::size_t>(size) * size, true));
}

bool StructuringElement::contains(int dr, int dc) const noexcept {
  const int r = dr + half_height();
  const int c = dc + half_width();
  if (r < 0 || c < 0 || r >= height_ || c >= width_) return false;
  return mask_[static_cast<std::size_t>(r) * width_ + c];
}

StructuringElement StructuringElement::reflect() const {
  std::vector<bool> mask(mask_.rbegin(), mask_.rend());
  return StructuringElement(width_, height_, std::move(mask));
}

BinaryImage dilate(const BinaryImage& img, const StructuringElement& se) {
  BinaryImage out(img.width(), img.height());
  const int hh = se.half_height();
  const int hw = se.half_width();
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      if (!img.at(r, c)) continue;
      for (int dr = -hh; dr <= hh; ++dr) {
        for (int dc = -hw; dc <= hw; ++dc) {
          if (!se.contains(dr, dc)) continue;
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr >= 0 && cc >= 0 && rr < img.height() && cc < img.width()) out.set(rr, cc, true);
        }
      }
    }
  }
  return out;
}

BinaryImage erode(const BinaryImage& img, const StructuringElement& se) {
  BinaryImage out(img.width(), img.height());
  const int hh = se.half_height();
  const int hw = se.half_width();
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      bool fits = true;
      for (int dr = -hh; dr <= hh && fits; ++dr)
        for (int dc = -hw; dc <= hw && fits; ++dc)
          if (se.contains(dr, dc) && !img.at_or_background(r + dr, c + dc)) fits = false;
      out.set(r, c, fits);
    }
  }
  return out;
}

BinaryImage hit_or_miss(const BinaryImage& img, const StructuringElement& se_fg,
                        const StructuringElement& se_bg) {
  BinaryImage out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      bool fits = true;
      for (int dr = -se_fg.half_height(); dr <= se_fg.half_height() && fits; ++dr)
        for (int dc = -se_fg.half_width(); dc <= se_fg.half_width() && fits; ++dc)
          if (se_fg.contains(dr, dc) && !img.at_or_background(r + dr, c + dc)) fits = false;
      for (int dr = -se_bg.half_height(); dr <= se_bg.half_height() && fits; ++dr)
        for (int dc = -se_bg.half_width(); dc <= se_bg.half_width() && fits; ++dc)
          if (se_bg.contains(dr, dc) && img.at_or_background(r + dr, c + dc)) fits = false;
      out.set(r, c, fits);
    }
  }
  return out;
}

namespace {

// Neighbor bit order, clockwise from north.
constexpr std::array<int, 8> kDr = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr std::array<int, 8> kDc = {0, 1, 1, 1, 0, -1, -1, -1};

struct Template {
  std::uint8_t fg;  // neighbors that must be ink (center always ink)
  std::uint8_t bg;  // neighbors that must be background
};

// Rotating the neighborhood by 90 degrees clockwise shifts every bit by two.
constexpr std::uint8_t rotate90(std::uint8_t bits) {
  return static_cast<std::uint8_t>(((bits << 2) | (bits >> 6)) & 0xFF);
}

// Golay L:
//   0 0 0      . 0 0
//   . 1 .      1 1 0
//   1 1 1      . 1 .
constexpr std::uint8_t bit(int k) { return static_cast<std::uint8_t>(1u << k); }
constexpr Template kL1{bit(3) | bit(4) | bit(5), bit(7) | bit(0) | bit(1)};
constexpr Template kL2{bit(6) | bit(4), bit(0) | bit(1) | bit(2)};

using Lut = std::array<bool, 256>;

std::array<Lut, 8> build_luts() {
  std::array<Lut, 8> luts{};
  Template a = kL1;
  Template b = kL2;
  for (int rot = 0; rot < 4; ++rot) {
    for (int k = 0; k < 2; ++k) {
      const Template t = k == 0 ? a : b;
      auto& lut = luts[static_cast<std::size_t>(rot * 2 + k)];
      for (int code = 0; code < 256; ++code)
        lut[static_cast<std::size_t>(code)] = (code & t.fg) == t.fg && (code & t.bg) == 0;
    }
    a = {rotate90(a.fg), rotate90(a.bg)};
    b = {rotate90(b.fg), rotate90(b.bg)};
  }
  return luts;
}

const std::array<Lut, 8>& thinning_luts() {
  static const auto luts = build_luts();
  return luts;
}

// Image padded with one background ring; only boundary pixels (ink with at
// least one background neighbor) can match a thinning template, so the work
// list tracks just those.
class Thinner {
 public:
  explicit Thinner(const BinaryImage& img)
      : w_(img.width() + 2), h_(img.height() + 2), px_(static_cast<std::size_t>(w_) * h_, 0),
        queued_(px_.size(), 0) {
    for (int r = 0; r < img.height(); ++r)
      for (int c = 0; c < img.width(); ++c) px_[idx(r + 1, c + 1)] = img.at(r, c) ? 1 : 0;
    for (int r = 1; r < h_ - 1; ++r)
      for (int c = 1; c < w_ - 1; ++c) {
        const auto i = idx(r, c);
        if (px_[i] && code(i) != 0xFF) enqueue(i);
      }
  }

  bool pass() {
    bool changed = false;
    for (const auto& lut : thinning_luts()) {
      matches_.clear();
      for (const auto i : candidates_)
        if (px_[i] && lut[code(i)]) matches_.push_back(i);
      for (const auto i : matches_) {
        px_[i] = 0;
        changed = true;
        for (int k = 0; k < 8; ++k) {
          const auto n = static_cast<std::size_t>(static_cast<long>(i) + kDr[k] * w_ + kDc[k]);
          if (px_[n] && !queued_[n]) enqueue(n);
        }
      }
    }
    std::erase_if(candidates_, [this](std::size_t i) {
      if (px_[i]) return false;
      queued_[i] = 0;
      return true;
    });
    return changed;
  }

  BinaryImage image() const {
    BinaryImage out(w_ - 2, h_ - 2);
    for (int r = 0; r < h_ - 2; ++r)
      for (int c = 0; c < w_ - 2; ++c) out.set(r, c, px_[idx(r + 1, c + 1)] != 0);
    return out;
  }

 private:
  std::size_t idx(int r, int c) const noexcept { return static_cast<std::size_t>(r) * w_ + c; }

  std::uint8_t code(std::size_t i) const noexcept {
    std::uint8_t bits = 0;
    for (int k = 0; k < 8; ++k) {
      const auto n = static_cast<std::size_t>(static_cast<long>(i) + kDr[k] * w_ + kDc[k]);
      if (px_[n]) bits |= bit(k);
    }
    return bits;
  }

  void enqueue(std::size_t i) {
    queued_[i] = 1;
    candidates_.push_back(i);
  }

  int w_;
  int h_;
  std::vector<std::uint8_t> px_;
  std::vector<std::uint8_t> queued_;
  std::vector<std::size_t> candidates_;
  std::vector<std::size_t> matches_;
};

}  // namespace

BinaryImage thin_pass(const BinaryImage& img) {
  Thinner thinner(img);
  thinner.pass();
  return thinner.image();
}

BinaryImage thin_to_stability(const BinaryImage& img) {
  Thinner thinner(img);
  while (thinner.pass()) {
  }
  return thinner.image();
}

BinaryImage thicken_pass(const BinaryImage& img) {
  return raster::complement(thin_pass(raster::complement(img)));
}

BinaryImage thicken_to_stability(const BinaryImage& img) {
  return raster::complement(thin_to_stability(raster::complement(img)));
}

}  // namespace sigver::preprocess
