#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sigver/features.hpp"
#include "sigver/preprocess.hpp"
#include "sigver/raster.hpp"

namespace sigver::dataset {

enum class Label { Genuine, Forged };

std::string_view to_string(Label label) noexcept;
Label parse_label(std::string_view text);

struct Entry {
  std::string path;  // relative to the corpus root, '/'-separated
  std::string writer;
  Label label = Label::Genuine;

  friend bool operator==(const Entry&, const Entry&) = default;
};

struct Manifest {
  std::filesystem::path root;
  std::vector<Entry> entries;  // sorted by path
  preprocess::PreprocessMode mode = preprocess::PreprocessMode::Offline;

  /// Distinct writer ids in sorted order.
  std::vector<std::string> writers() const;
};

/// Reads `root/<writer>/genuine/*.pgm` and `root/<writer>/forged/*.pgm`.
/// Throws EmptyCorpus, WriterWithoutGenuine.
Manifest scan_corpus(const std::filesystem::path& root);

/// Checks the manifest invariants (unique paths, a genuine entry per writer).
void validate(const Manifest& manifest);

struct SplitFractions {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

struct Split {
  std::vector<Entry> train;
  std::vector<Entry> val;
  std::vector<Entry> test;  // held-out genuine entries followed by every forged entry
  std::uint64_t seed = 0;
};

/// Per-writer seeded shuffle of the genuine entries, then
/// val = max(1, floor(n * val)), test = max(1, ceil(n * test)), train = rest.
/// Forged entries go to test only. Throws TooFewSamples if a writer has fewer
/// than three genuine entries.
Split split(const Manifest& manifest, std::uint64_t seed, SplitFractions fractions = {});

/// Sizes (train, val, test) for a writer with n genuine samples.
struct SplitSizes {
  std::size_t train, val, test;
};
SplitSizes split_sizes(std::size_t n, SplitFractions fractions = {});

// ---------------------------------------------------------------------------
// Synthetic corpus

struct Stroke {
  std::vector<std::pair<double, double>> control;  // (x, y) in canvas units [0,1]
};

/// Seeded per-writer drawing parameters.
struct WriterStyle {
  std::vector<Stroke> strokes;  // 2 to 6
  double jitter = 0.0;          // control-point noise, canvas units
  double slant = 0.0;           // horizontal shear per unit height
  double scale = 1.0;
  double dot_probability = 0.0;
  std::pair<double, double> dot{0.0, 0.0};
  double pen_radius = 2.0;      // pixels
};

inline constexpr int kSyntheticRows = 300;
inline constexpr int kSyntheticCols = 400;

WriterStyle writer_style(std::uint64_t corpus_seed, int writer_index);

/// Renders one sample. Forgeries double the jitter and displace one stroke.
raster::GrayImage render_sample(const WriterStyle& style, std::uint64_t sample_seed, bool forged);

/// Writes `out/wNN/genuine/gNN.pgm`, `out/wNN/forged/fNN.pgm` and
/// `out/manifest.tsv`; returns the manifest. Throws IOFailure.
Manifest generate_synthetic(std::uint64_t seed, int n_writers, int genuine_per_writer,
                            int forged_per_writer, const std::filesystem::path& out);

/// manifest.tsv: one `path<TAB>writer<TAB>label` line per entry.
std::string format_manifest_tsv(const Manifest& manifest);
void write_manifest_tsv(const std::filesystem::path& file, const Manifest& manifest);
std::vector<Entry> read_manifest_tsv(const std::filesystem::path& file);

// ---------------------------------------------------------------------------
// Feature CSV

struct FeatureRow {
  Entry entry;
  features::FeatureVector values{};
};

/// Header `path,writer,label,f000..f129`, shortest round-trip decimals.
std::string format_features_csv(std::span<const FeatureRow> rows);
std::vector<FeatureRow> parse_features_csv(std::string_view text);

void write_features(const std::filesystem::path& file, std::span<const FeatureRow> rows);
std::vector<FeatureRow> read_features(const std::filesystem::path& file);

/// Manifest view of feature rows (root left empty).
Manifest manifest_from_rows(std::span<const FeatureRow> rows);

}  // namespace sigver::dataset
