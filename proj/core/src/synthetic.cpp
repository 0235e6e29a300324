#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "sigver/dataset.hpp"
#include "sigver/error.hpp"
#include "sigver/random.hpp"

namespace fs = std::filesystem;

namespace sigver::dataset {

namespace {

using Vec2 = std::pair<double, double>;

constexpr double kBackground = 232.0;
constexpr double kInk = 38.0;

Stroke random_stroke(Rng& rng, double x_lo, double x_hi) {
  Stroke s;
  const int points = rng.uniform_int(4, 7);
  const double amplitude = rng.uniform(0.12, 0.32);
  const double baseline = rng.uniform(0.40, 0.60);
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.5 : static_cast<double>(i) / (points - 1);
    // Occasional backtracking gives loops and hooks.
    const double x = x_lo + (x_hi - x_lo) * std::clamp(t + rng.uniform(-0.35, 0.35), 0.0, 1.0);
    const double y = baseline + amplitude * rng.uniform(-1.0, 1.0);
    s.control.emplace_back(x, std::clamp(y, 0.05, 0.95));
  }
  return s;
}

class Canvas {
 public:
  Canvas(int rows, int cols) : rows_(rows), cols_(cols), cover_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  void stamp(double px, double py, double radius) {
    const int r0 = std::max(0, static_cast<int>(std::floor(py - radius - 1)));
    const int r1 = std::min(rows_ - 1, static_cast<int>(std::ceil(py + radius + 1)));
    const int c0 = std::max(0, static_cast<int>(std::floor(px - radius - 1)));
    const int c1 = std::min(cols_ - 1, static_cast<int>(std::ceil(px + radius + 1)));
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) {
        const double d = std::hypot(c - px, r - py);
        const double cov = std::clamp(radius + 0.5 - d, 0.0, 1.0);
        auto& cell = cover_[static_cast<std::size_t>(r) * cols_ + c];
        cell = std::max(cell, cov);
      }
  }

  // Quadratic B-spline over the control polygon, pinned at both ends.
  void draw_curve(const std::vector<Vec2>& pts, double radius) {
    const std::size_t n = pts.size();
    if (n < 2) return;
    auto mid = [](Vec2 a, Vec2 b) { return Vec2{(a.first + b.first) / 2, (a.second + b.second) / 2}; };
    if (n == 2) {
      segment(pts[0], mid(pts[0], pts[1]), pts[1], radius);
      return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const Vec2 start = i == 1 ? pts[0] : mid(pts[i - 1], pts[i]);
      const Vec2 end = i + 2 == n ? pts[n - 1] : mid(pts[i], pts[i + 1]);
      segment(start, pts[i], end, radius);
    }
  }

  raster::GrayImage finish(Rng& rng) const {
    raster::GrayImage img(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) {
        const double cov = cover_[static_cast<std::size_t>(r) * cols_ + c];
        const double bg = kBackground + rng.normal(0.0, 5.0);
        const double ink = kInk + rng.normal(0.0, 8.0);
        const double v = bg * (1.0 - cov) + ink * cov;
        img.at(r, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    // Sparse salt-and-pepper noise.
    const auto impulses = static_cast<int>(0.002 * rows_ * cols_);
    for (int i = 0; i < impulses; ++i) {
      const int r = rng.uniform_int(0, rows_ - 1);
      const int c = rng.uniform_int(0, cols_ - 1);
      img.at(r, c) = rng.uniform() < 0.5 ? 0 : 255;
    }
    return img;
  }

 private:
  void segment(Vec2 a, Vec2 ctrl, Vec2 b, double radius) {
    const double len = std::hypot(ctrl.first - a.first, ctrl.second - a.second) +
                       std::hypot(b.first - ctrl.first, b.second - ctrl.second);
    const int steps = std::max(2, static_cast<int>(std::ceil(len / 0.4)));
    for (int k = 0; k <= steps; ++k) {
      const double t = static_cast<double>(k) / steps;
      const double u = 1.0 - t;
      const double x = u * u * a.first + 2 * u * t * ctrl.first + t * t * b.first;
      const double y = u * u * a.second + 2 * u * t * ctrl.second + t * t * b.second;
      stamp(x, y, radius);
    }
  }

  int rows_;
  int cols_;
  std::vector<double> cover_;
};

}  // namespace

WriterStyle writer_style(std::uint64_t corpus_seed, int writer_index) {
  Rng rng(mix_seed(corpus_seed, static_cast<std::uint64_t>(writer_index)));
  WriterStyle style;
  const int strokes = rng.uniform_int(2, 6);
  // Partition the horizontal extent into overlapping stroke spans.
  std::vector<double> cuts{0.06};
  for (int i = 1; i < strokes; ++i) cuts.push_back(rng.uniform(0.1, 0.9));
  cuts.push_back(0.94);
  std::sort(cuts.begin() + 1, cuts.end() - 1);
  for (int i = 0; i < strokes; ++i) {
    const double lo = std::max(0.04, cuts[static_cast<std::size_t>(i)] - 0.04);
    const double hi = std::min(0.96, std::max(cuts[static_cast<std::size_t>(i) + 1] + 0.04, lo + 0.12));
    style.strokes.push_back(random_stroke(rng, lo, hi));
  }
  style.jitter = rng.uniform(0.006, 0.012);
  style.slant = rng.uniform(-0.3, 0.3);
  style.scale = rng.uniform(0.75, 0.95);
  style.dot_probability = rng.uniform() < 0.5 ? rng.uniform(0.6, 1.0) : 0.0;
  style.dot = {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
  style.pen_radius = rng.uniform(1.4, 2.6);
  return style;
}

raster::GrayImage render_sample(const WriterStyle& style, std::uint64_t sample_seed, bool forged) {
  Rng rng(sample_seed);
  const double jitter = style.jitter * (forged ? 2.0 : 1.0);
  const double scale = style.scale * (1.0 + rng.normal(0.0, 0.03));
  const double slant = style.slant + rng.normal(0.0, 0.03);
  const int perturbed = forged ? rng.uniform_int(0, static_cast<int>(style.strokes.size()) - 1) : -1;
  const Vec2 shift = forged ? Vec2{rng.normal(0.0, 0.08), rng.normal(0.0, 0.08)} : Vec2{0.0, 0.0};

  const double rows = kSyntheticRows;
  const double cols = kSyntheticCols;
  auto to_pixels = [&](double x, double y) -> Vec2 {
    const double xs = (x - 0.5) * scale + slant * (0.5 - y) * scale * rows / cols;
    const double ys = (y - 0.5) * scale;
    return {cols / 2 + xs * cols, rows / 2 + ys * rows};
  };

  Canvas canvas(kSyntheticRows, kSyntheticCols);
  for (std::size_t s = 0; s < style.strokes.size(); ++s) {
    std::vector<Vec2> pts;
    for (const auto& [x, y] : style.strokes[s].control) {
      double px = x + rng.normal(0.0, jitter);
      double py = y + rng.normal(0.0, jitter);
      if (static_cast<int>(s) == perturbed) {
        px += shift.first + rng.normal(0.0, 0.04);
        py += shift.second + rng.normal(0.0, 0.04);
      }
      pts.push_back(to_pixels(px, py));
    }
    canvas.draw_curve(pts, style.pen_radius);
  }
  if (style.dot_probability > 0.0 && rng.uniform() < style.dot_probability) {
    const auto [dx, dy] = to_pixels(style.dot.first + rng.normal(0.0, jitter),
                                    style.dot.second + rng.normal(0.0, jitter));
    canvas.stamp(dx, dy, style.pen_radius * 1.4);
  }
  return canvas.finish(rng);
}

Manifest generate_synthetic(std::uint64_t seed, int n_writers, int genuine_per_writer,
                            int forged_per_writer, const fs::path& out) {
  if (n_writers < 2) throw Error(ErrorCode::InvalidArgument, "need at least two writers");
  if (genuine_per_writer < 1 || forged_per_writer < 0)
    throw Error(ErrorCode::InvalidArgument, "sample counts must be positive");

  Manifest manifest;
  manifest.root = out;
  std::error_code ec;
  char name[32];
  for (int w = 0; w < n_writers; ++w) {
    std::snprintf(name, sizeof(name), "w%03d", w);
    const std::string writer = name;
    const auto style = writer_style(seed, w);
    const std::uint64_t writer_seed = mix_seed(seed ^ 0x5EED5EEDULL, static_cast<std::uint64_t>(w));
    for (int kind = 0; kind < 2; ++kind) {
      const bool forged = kind == 1;
      const int count = forged ? forged_per_writer : genuine_per_writer;
      if (count == 0) continue;
      const std::string sub = forged ? "forged" : "genuine";
      fs::create_directories(out / writer / sub, ec);
      if (ec) throw Error(ErrorCode::IOFailure, "cannot create " + (out / writer / sub).string());
      for (int i = 0; i < count; ++i) {
        std::snprintf(name, sizeof(name), "%c%03d.pgm", forged ? 'f' : 'g', i);
        const auto tag = static_cast<std::uint64_t>(i) * 2 + (forged ? 1 : 0);
        const auto img = render_sample(style, mix_seed(writer_seed, tag), forged);
        const std::string rel = writer + "/" + sub + "/" + name;
        raster::write_gray_file((out / rel).string(), img);
        manifest.entries.push_back({rel, writer, forged ? Label::Forged : Label::Genuine});
      }
    }
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const Entry& a, const Entry& b) { return a.path < b.path; });
  write_manifest_tsv(out / "manifest.tsv", manifest);
  return manifest;
}

}  // namespace sigver::dataset
