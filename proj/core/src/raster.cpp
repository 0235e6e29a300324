#include "sigver/raster.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>

#include "sigver/error.hpp"

namespace sigver::raster {

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0)
    throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
}

// Tokenizer over a netpbm header: whitespace separated, '#' starts a comment
// running to end of line.
class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const noexcept { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  long long next_uint(const char* what) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) throw Error(ErrorCode::MalformedHeader, std::string("missing ") + what);
    long long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1LL << 31)) throw Error(ErrorCode::MalformedHeader, std::string(what) + " too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw Error(ErrorCode::MalformedHeader, std::string("bad ") + what);
    return value;
  }

  bool at_end() const noexcept { return pos_ >= bytes_.size(); }
  std::uint8_t peek() const { return bytes_[pos_]; }
  void advance(std::size_t n = 1) noexcept { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint8_t rescale(long long value, long long maxval) {
  if (maxval == 255) return static_cast<std::uint8_t>(value);
  return static_cast<std::uint8_t>((value * 255 + maxval / 2) / maxval);
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw Error(ErrorCode::InvalidArgument, "pixel buffer does not match dimensions");
}

BinaryImage::BinaryImage(int width, int height, bool fill) : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0);
}

std::size_t BinaryImage::ink_count() const noexcept {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

BinaryImage complement(const BinaryImage& img) {
  BinaryImage out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c) out.set(r, c, !img.at(r, c));
  return out;
}

GrayImage load_gray(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P')
    throw Error(ErrorCode::MalformedHeader, "not a netpbm file");
  const auto kind = bytes[1];
  if (kind != '5' && kind != '2')
    throw Error(ErrorCode::UnsupportedFormat,
                std::string("netpbm variant P") + static_cast<char>(kind) + " is not grayscale");

  HeaderReader reader(bytes);
  reader.advance(2);
  if (!reader.at_end() && !std::isspace(reader.peek()) && reader.peek() != '#')
    throw Error(ErrorCode::MalformedHeader, "magic must be followed by whitespace");
  const auto width = reader.next_uint("width");
  const auto height = reader.next_uint("height");
  const auto maxval = reader.next_uint("maxval");
  if (width <= 0 || height <= 0) throw Error(ErrorCode::MalformedHeader, "zero dimension");
  if (maxval <= 0) throw Error(ErrorCode::MalformedHeader, "maxval must be positive");
  if (maxval > 255) throw Error(ErrorCode::UnsupportedFormat, "only 8-bit graymaps are supported");

  const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> data(count);

  if (kind == '5') {
    // Exactly one whitespace byte separates the header from the raster.
    if (reader.at_end()) throw Error(ErrorCode::TruncatedData, "no raster data");
    if (!std::isspace(reader.peek())) throw Error(ErrorCode::MalformedHeader, "missing raster separator");
    reader.advance();
    if (bytes.size() - reader.pos() < count) throw Error(ErrorCode::TruncatedData, "raster shorter than header claims");
    for (std::size_t i = 0; i < count; ++i) {
      const auto v = bytes[reader.pos() + i];
      if (v > maxval) throw Error(ErrorCode::MalformedHeader, "sample exceeds maxval");
      data[i] = rescale(v, maxval);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      reader.skip_space_and_comments();
      if (reader.at_end()) throw Error(ErrorCode::TruncatedData, "raster shorter than header claims");
      const auto v = reader.next_uint("sample");
      if (v > maxval) throw Error(ErrorCode::MalformedHeader, "sample exceeds maxval");
      data[i] = rescale(v, maxval);
    }
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

std::vector<std::uint8_t> save_gray(const GrayImage& img) {
  const std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

GrayImage read_gray_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOFailure, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_gray(bytes);
}

void write_gray_file(const std::string& path, const GrayImage& img) {
  const auto bytes = save_gray(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IOFailure, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IOFailure, "short write to " + path);
}

GrayImage binary_to_gray(const BinaryImage& img) {
  GrayImage out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c) out.at(r, c) = img.at(r, c) ? 0 : 255;
  return out;
}

}  // namespace sigver::raster
