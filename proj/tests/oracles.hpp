#pragma once
// Naive reference implementations used only by the tests. They deliberately
// share no code with the library beyond the image containers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "sigver/random.hpp"
#include "sigver/raster.hpp"

namespace oracle {

using sigver::raster::BinaryImage;
using sigver::raster::GrayImage;

inline GrayImage random_gray(sigver::Rng& rng, int w, int h) {
  GrayImage img(w, h);
  for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return img;
}

/// Two-mode image: a background level and an ink level, each with noise.
inline GrayImage random_bimodal(sigver::Rng& rng, int w, int h) {
  const int lo = rng.uniform_int(0, 120);
  const int hi = rng.uniform_int(136, 255);
  const int spread = rng.uniform_int(0, 40);
  const double ink = rng.uniform(0.05, 0.6);
  GrayImage img(w, h);
  for (auto& p : img.pixels()) {
    const int base = rng.uniform() < ink ? lo : hi;
    p = static_cast<std::uint8_t>(std::clamp(base + rng.uniform_int(-spread, spread), 0, 255));
  }
  return img;
}

inline BinaryImage random_binary(sigver::Rng& rng, int w, int h, double density) {
  BinaryImage img(w, h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) img.set(r, c, rng.uniform() < density);
  return img;
}

/// Exhaustive argmax of w0 * w1 * (mu0 - mu1)^2 over t in [0, 255], lower
/// class {v < t}; the first (smallest) maximizer wins.
inline int otsu(const GrayImage& img) {
  const auto px = img.pixels();
  const double n = static_cast<double>(px.size());
  int best_t = -1;
  double best = -1.0;
  for (int t = 0; t <= 255; ++t) {
    double n0 = 0, s0 = 0, n1 = 0, s1 = 0;
    for (auto v : px) {
      if (v < t) {
        n0 += 1;
        s0 += v;
      } else {
        n1 += 1;
        s1 += v;
      }
    }
    double score = 0.0;
    if (n0 > 0 && n1 > 0) {
      const double d = s0 / n0 - s1 / n1;
      score = (n0 / n) * (n1 / n) * d * d;
    }
    if (score > best * (1.0 + 1e-12) + 1e-300) {
      best = score;
      best_t = t;
    }
  }
  return best_t;
}

inline GrayImage median3(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      std::array<int, 9> v{};
      int k = 0;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc)
          v[k++] = img.at(std::clamp(r + dr, 0, img.height() - 1), std::clamp(c + dc, 0, img.width() - 1));
      std::sort(v.begin(), v.end());
      out.at(r, c) = static_cast<std::uint8_t>(v[4]);
    }
  }
  return out;
}

/// Recursive 8-connected flood fill.
inline std::size_t components(const BinaryImage& img) {
  std::vector<char> seen(static_cast<std::size_t>(img.width() * img.height()), 0);
  std::function<void(int, int)> fill = [&](int r, int c) {
    if (r < 0 || c < 0 || r >= img.height() || c >= img.width()) return;
    auto& s = seen[static_cast<std::size_t>(r * img.width() + c)];
    if (s || !img.at(r, c)) return;
    s = 1;
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc)
        if (dr || dc) fill(r + dr, c + dc);
  };
  std::size_t n = 0;
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c)
      if (img.at(r, c) && !seen[static_cast<std::size_t>(r * img.width() + c)]) {
        ++n;
        fill(r, c);
      }
  return n;
}

/// 3x3 template: +1 must be ink, 0 must be background, -1 is don't-care.
using Template = std::array<int, 9>;

inline Template rotate90(const Template& t) {
  // Clockwise: new(r, c) = old(2 - c, r).
  Template out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out[r * 3 + c] = t[(2 - c) * 3 + r];
  return out;
}

/// The eight Golay L templates written out by explicit rotation of the two
/// base shapes (edge and corner variants).
inline std::array<Template, 8> golay_l() {
  const Template edge{0, 0, 0, -1, 1, -1, 1, 1, 1};
  const Template corner{-1, 0, 0, 1, 1, 0, -1, 1, -1};
  std::array<Template, 8> out{};
  Template e = edge, k = corner;
  for (int i = 0; i < 4; ++i) {
    out[2 * i] = e;
    out[2 * i + 1] = k;
    e = rotate90(e);
    k = rotate90(k);
  }
  return out;
}

/// One thinning round by full scans: for each template in turn remove every
/// pixel it matches (matched against the image as it was before that template).
inline BinaryImage thin_pass(const BinaryImage& in) {
  BinaryImage img = in;
  for (const auto& t : golay_l()) {
    BinaryImage next = img;
    for (int r = 0; r < img.height(); ++r) {
      for (int c = 0; c < img.width(); ++c) {
        bool hit = true;
        for (int k = 0; k < 9 && hit; ++k) {
          if (t[k] < 0) continue;
          hit = img.at_or_background(r + k / 3 - 1, c + k % 3 - 1) == (t[k] == 1);
        }
        if (hit) next.set(r, c, false);
      }
    }
    img = next;
  }
  return img;
}

inline BinaryImage thin(const BinaryImage& in) {
  BinaryImage cur = in;
  for (;;) {
    BinaryImage next = thin_pass(cur);
    if (next == cur) return cur;
    cur = next;
  }
}

inline BinaryImage complement(const BinaryImage& in) {
  BinaryImage out(in.width(), in.height());
  for (int r = 0; r < in.height(); ++r)
    for (int c = 0; c < in.width(); ++c) out.set(r, c, !in.at(r, c));
  return out;
}

/// Union of `offsets` translated to every ink pixel.
inline BinaryImage dilate(const BinaryImage& img, const std::vector<std::pair<int, int>>& offsets) {
  BinaryImage out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c)
      if (img.at(r, c))
        for (auto [dr, dc] : offsets) {
          const int rr = r + dr, cc = c + dc;
          if (rr >= 0 && cc >= 0 && rr < img.height() && cc < img.width()) out.set(rr, cc, true);
        }
  return out;
}

inline double catmull_rom(double x) {
  x = std::abs(x);
  if (x < 1) return 1.5 * x * x * x - 2.5 * x * x + 1;
  if (x < 2) return -0.5 * x * x * x + 2.5 * x * x - 4 * x + 2;
  return 0;
}

/// Direct two-dimensional kernel sum (no separable pass).
inline GrayImage resize_direct(const GrayImage& img, int ow, int oh) {
  GrayImage out(ow, oh);
  const double sx = static_cast<double>(img.width()) / ow;
  const double sy = static_cast<double>(img.height()) / oh;
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      const double y = (r + 0.5) * sy - 0.5;
      const double x = (c + 0.5) * sx - 0.5;
      const int y0 = static_cast<int>(std::floor(y));
      const int x0 = static_cast<int>(std::floor(x));
      double acc = 0.0;
      for (int i = y0 - 1; i <= y0 + 2; ++i)
        for (int j = x0 - 1; j <= x0 + 2; ++j)
          acc += catmull_rom(y - i) * catmull_rom(x - j) *
                 img.at(std::clamp(i, 0, img.height() - 1), std::clamp(j, 0, img.width() - 1));
      out.at(r, c) = static_cast<std::uint8_t>(std::clamp<long>(std::lround(acc), 0, 255));
    }
  }
  return out;
}

}  // namespace oracle
