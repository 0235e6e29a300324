#include "sigver/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sigver/error.hpp"
#include "sigver/numfmt.hpp"
#include "sigver/random.hpp"

namespace fs = std::filesystem;

namespace sigver::dataset {

std::string_view to_string(Label label) noexcept {
  return label == Label::Genuine ? "genuine" : "forged";
}

Label parse_label(std::string_view text) {
  if (text == "genuine") return Label::Genuine;
  if (text == "forged") return Label::Forged;
  throw Error(ErrorCode::InvalidArgument, "unknown label '" + std::string(text) + "'");
}

std::vector<std::string> Manifest::writers() const {
  std::set<std::string> ids;
  for (const auto& e : entries) ids.insert(e.writer);
  return {ids.begin(), ids.end()};
}

void validate(const Manifest& manifest) {
  if (manifest.entries.empty()) throw Error(ErrorCode::EmptyCorpus, "manifest has no entries");
  std::set<std::string> paths;
  std::map<std::string, std::size_t> genuine;
  for (const auto& e : manifest.entries) {
    if (!paths.insert(e.path).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate path " + e.path);
    auto& n = genuine[e.writer];
    if (e.label == Label::Genuine) ++n;
  }
  for (const auto& [writer, n] : genuine)
    if (n == 0) throw Error(ErrorCode::WriterWithoutGenuine, "writer '" + writer + "' has no genuine samples");
}

namespace {

std::vector<std::string> pgm_files(const fs::path& dir) {
  std::vector<std::string> names;
  if (!fs::is_directory(dir)) return names;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (!item.is_regular_file()) continue;
    auto ext = item.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pgm") names.push_back(item.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

void shuffle(std::vector<Entry>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1));
    std::swap(items[i - 1], items[j]);
  }
}

bool by_path(const Entry& a, const Entry& b) { return a.path < b.path; }

}  // namespace

Manifest scan_corpus(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(ErrorCode::IOFailure, "corpus root is not a directory: " + root.string());
  std::vector<std::string> writers;
  for (const auto& item : fs::directory_iterator(root))
    if (item.is_directory()) writers.push_back(item.path().filename().string());
  std::sort(writers.begin(), writers.end());

  Manifest manifest;
  manifest.root = root;
  for (const auto& writer : writers) {
    const auto genuine = pgm_files(root / writer / "genuine");
    const auto forged = pgm_files(root / writer / "forged");
    if (genuine.empty() && forged.empty()) continue;
    if (genuine.empty())
      throw Error(ErrorCode::WriterWithoutGenuine, "writer '" + writer + "' has no genuine samples");
    for (const auto& name : genuine) manifest.entries.push_back({writer + "/genuine/" + name, writer, Label::Genuine});
    for (const auto& name : forged) manifest.entries.push_back({writer + "/forged/" + name, writer, Label::Forged});
  }
  if (manifest.entries.empty()) throw Error(ErrorCode::EmptyCorpus, "no signatures under " + root.string());
  std::sort(manifest.entries.begin(), manifest.entries.end(), by_path);
  return manifest;
}

SplitSizes split_sizes(std::size_t n, SplitFractions fractions) {
  // A small epsilon keeps products like 20 * 0.15 from rounding past an integer.
  constexpr double eps = 1e-9;
  const auto nd = static_cast<double>(n);
  const auto val = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(nd * fractions.val + eps)));
  const auto test = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(nd * fractions.test - eps)));
  if (val + test >= n) throw Error(ErrorCode::TooFewSamples, "not enough samples to split");
  return {n - val - test, val, test};
}

Split split(const Manifest& manifest, std::uint64_t seed, SplitFractions fractions) {
  if (fractions.train <= 0 || fractions.val <= 0 || fractions.test <= 0 ||
      std::abs(fractions.train + fractions.val + fractions.test - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidArgument, "split fractions must be positive and sum to 1");

  std::map<std::string, std::vector<Entry>> genuine;
  Split out;
  out.seed = seed;
  for (const auto& e : manifest.entries) {
    if (e.label == Label::Genuine)
      genuine[e.writer].push_back(e);
    else
      out.test.push_back(e);
  }
  std::vector<Entry> forged = std::move(out.test);
  out.test.clear();

  std::uint64_t writer_index = 0;
  for (auto& [writer, items] : genuine) {
    if (items.size() < 3)
      throw Error(ErrorCode::TooFewSamples, "writer '" + writer + "' needs at least 3 genuine samples");
    std::sort(items.begin(), items.end(), by_path);
    Rng rng(mix_seed(seed, writer_index++));
    shuffle(items, rng);
    const auto sizes = split_sizes(items.size(), fractions);
    auto it = items.begin();
    out.train.insert(out.train.end(), it, it + static_cast<std::ptrdiff_t>(sizes.train));
    it += static_cast<std::ptrdiff_t>(sizes.train);
    out.val.insert(out.val.end(), it, it + static_cast<std::ptrdiff_t>(sizes.val));
    it += static_cast<std::ptrdiff_t>(sizes.val);
    out.test.insert(out.test.end(), it, items.end());
  }
  std::sort(out.train.begin(), out.train.end(), by_path);
  std::sort(out.val.begin(), out.val.end(), by_path);
  std::sort(out.test.begin(), out.test.end(), by_path);
  std::sort(forged.begin(), forged.end(), by_path);
  out.test.insert(out.test.end(), forged.begin(), forged.end());
  return out;
}

// ---------------------------------------------------------------------------

std::string format_manifest_tsv(const Manifest& manifest) {
  std::string out;
  for (const auto& e : manifest.entries) {
    out += e.path;
    out += '\t';
    out += e.writer;
    out += '\t';
    out += to_string(e.label);
    out += '\n';
  }
  return out;
}

void write_manifest_tsv(const fs::path& file, const Manifest& manifest) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IOFailure, "cannot write " + file.string());
  out << format_manifest_tsv(manifest);
  if (!out) throw Error(ErrorCode::IOFailure, "short write to " + file.string());
}

std::vector<Entry> read_manifest_tsv(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOFailure, "cannot open " + file.string());
  std::vector<Entry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw Error(ErrorCode::MalformedCsv, "manifest line needs three fields");
    entries.push_back({line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), parse_label(line.substr(t2 + 1))});
  }
  return entries;
}

// ---------------------------------------------------------------------------

namespace {

std::string csv_header() {
  std::string h = "path,writer,label";
  char buf[8];
  for (int i = 0; i < features::kFeatureDim; ++i) {
    std::snprintf(buf, sizeof(buf), ",f%03d", i);
    h += buf;
  }
  return h;
}

void check_field(const std::string& field) {
  if (field.find_first_of(",\n\r") != std::string::npos)
    throw Error(ErrorCode::InvalidArgument, "field contains a separator: " + field);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::string format_features_csv(std::span<const FeatureRow> rows) {
  std::string out = csv_header();
  out += '\n';
  for (const auto& row : rows) {
    check_field(row.entry.path);
    check_field(row.entry.writer);
    out += row.entry.path;
    out += ',';
    out += row.entry.writer;
    out += ',';
    out += to_string(row.entry.label);
    for (const auto v : row.values) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<FeatureRow> parse_features_csv(std::string_view text) {
  std::vector<FeatureRow> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  const auto header = csv_header();
  constexpr std::size_t kColumns = 3 + features::kFeatureDim;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (line_no == 1) {
      if (line != header) throw Error(ErrorCode::MalformedCsv, "unexpected feature CSV header");
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != kColumns)
      throw Error(ErrorCode::WrongColumnCount, "line " + std::to_string(line_no) + " has " +
                                                   std::to_string(fields.size()) + " columns, expected " +
                                                   std::to_string(kColumns));
    FeatureRow row;
    try {
      row.entry = {std::string(fields[0]), std::string(fields[1]), parse_label(fields[2])};
      for (std::size_t j = 0; j < row.values.size(); ++j) row.values[j] = parse_double(fields[3 + j]);
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line_no) + ": " + e.what());
    }
    rows.push_back(std::move(row));
  }
  if (line_no == 0) throw Error(ErrorCode::MalformedCsv, "empty feature file");
  return rows;
}

void write_features(const fs::path& file, std::span<const FeatureRow> rows) {
  const auto text = format_features_csv(rows);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IOFailure, "cannot write " + file.string());
  out << text;
  if (!out) throw Error(ErrorCode::IOFailure, "short write to " + file.string());
}

std::vector<FeatureRow> read_features(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOFailure, "cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_features_csv(buf.str());
}

Manifest manifest_from_rows(std::span<const FeatureRow> rows) {
  Manifest m;
  m.entries.reserve(rows.size());
  for (const auto& r : rows) m.entries.push_back(r.entry);
  std::sort(m.entries.begin(), m.entries.end(), by_path);
  return m;
}

}  // namespace sigver::dataset
