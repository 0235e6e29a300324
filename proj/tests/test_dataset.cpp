#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "sigver/dataset.hpp"
#include "sigver/error.hpp"
#include "sigver/numfmt.hpp"
#include "sigver/random.hpp"

using namespace sigver;
using namespace sigver::dataset;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("sigver_test_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void touch(const fs::path& p) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << "P2 1 1 255 0\n";
}

Manifest manifest_with(int writers, int genuine, int forged) {
  Manifest m;
  for (int w = 0; w < writers; ++w) {
    const auto id = "w" + std::to_string(w);
    for (int g = 0; g < genuine; ++g) m.entries.push_back({id + "/genuine/" + std::to_string(g), id, Label::Genuine});
    for (int f = 0; f < forged; ++f) m.entries.push_back({id + "/forged/" + std::to_string(f), id, Label::Forged});
  }
  return m;
}

}  // namespace

TEST_CASE("split sizes") {
  const auto s10 = split_sizes(10);
  CHECK(s10.train == 7u);
  CHECK(s10.val == 1u);
  CHECK(s10.test == 2u);
  const auto s20 = split_sizes(20);
  CHECK(s20.train == 14u);
  CHECK(s20.val == 3u);
  CHECK(s20.test == 3u);
  const auto s3 = split_sizes(3);
  CHECK(s3.train == 1u);
  CHECK(s3.val == 1u);
  CHECK(s3.test == 1u);
  for (std::size_t n = 3; n < 200; ++n) {
    const auto s = split_sizes(n);
    CHECK(s.train + s.val + s.test == n);
    CHECK(s.train >= 1u);
  }
}

TEST_CASE("split is a seeded per-writer partition with forgeries in test") {
  const auto m = manifest_with(4, 10, 3);
  const auto a = split(m, 5);
  const auto b = split(m, 5);
  const auto c = split(m, 6);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  CHECK(a.train != c.train);
  CHECK(a.train.size() == 4u * 7);
  CHECK(a.val.size() == 4u * 1);
  CHECK(a.test.size() == 4u * 2 + 4 * 3);
  std::set<std::string> seen;
  for (const auto* part : {&a.train, &a.val, &a.test})
    for (const auto& e : *part) CHECK(seen.insert(e.path).second);
  CHECK(seen.size() == m.entries.size());
  for (const auto* part : {&a.train, &a.val})
    for (const auto& e : *part) CHECK(e.label == Label::Genuine);
  CHECK_THROWS_AS((void)split(manifest_with(2, 2, 0), 1), Error);
}

TEST_CASE("scan_corpus reads the directory layout") {
  TempDir dir("scan");
  touch(dir.path / "bob/genuine/b1.pgm");
  touch(dir.path / "bob/genuine/a1.pgm");
  touch(dir.path / "bob/forged/x.pgm");
  touch(dir.path / "ann/genuine/1.pgm");
  touch(dir.path / "ann/genuine/notes.txt");
  const auto m = scan_corpus(dir.path);
  REQUIRE(m.entries.size() == 4u);
  CHECK(m.entries[0].path == "ann/genuine/1.pgm");
  CHECK(m.entries[1] == Entry{"bob/forged/x.pgm", "bob", Label::Forged});
  CHECK(m.writers() == std::vector<std::string>{"ann", "bob"});

  touch(dir.path / "cat/forged/1.pgm");
  try {
    (void)scan_corpus(dir.path);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WriterWithoutGenuine);
  }
  TempDir empty("scan_empty");
  CHECK_THROWS_AS((void)scan_corpus(empty.path), Error);
}

TEST_CASE("manifest TSV round trip") {
  TempDir dir("tsv");
  const auto m = manifest_with(2, 2, 1);
  write_manifest_tsv(dir.path / "m.tsv", m);
  CHECK(read_manifest_tsv(dir.path / "m.tsv") == m.entries);
  CHECK(format_manifest_tsv(m).substr(0, 21) == "w0/genuine/0\tw0\tgenui");
}

TEST_CASE("feature CSV round trip is exact") {
  Rng rng(81);
  std::vector<FeatureRow> rows(3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].entry = {"w/genuine/" + std::to_string(i) + ".pgm", "w", i == 2 ? Label::Forged : Label::Genuine};
    for (auto& v : rows[i].values) v = rng.normal() * std::pow(10.0, rng.uniform_int(-5, 5));
  }
  rows[0].values[0] = 0.1;
  const auto text = format_features_csv(rows);
  CHECK(text.rfind("path,writer,label,f000,f001,", 0) == 0);
  CHECK(text.find(",f129\n") != std::string::npos);
  CHECK(text.find(",0.1,") != std::string::npos);
  const auto back = parse_features_csv(text);
  REQUIRE(back.size() == 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].entry == rows[i].entry);
    CHECK(back[i].values == rows[i].values);
  }
  CHECK(format_features_csv(back) == text);

  auto code = [](const std::string& t) {
    try {
      (void)parse_features_csv(t);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  const auto header = text.substr(0, text.find('\n') + 1);
  CHECK(code(header + "a,w,genuine,1,2\n") == ErrorCode::WrongColumnCount);
  auto bad = text;
  bad.replace(bad.find(",0.1,"), 5, ",zz,");
  CHECK(code(bad) == ErrorCode::MalformedCsv);
  CHECK(code("nonsense\n") == ErrorCode::MalformedCsv);
}

TEST_CASE("shortest round-trip number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(3.0) == "3");
  CHECK(parse_double(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK_THROWS_AS((void)parse_double("1.5x"), Error);
  CHECK(parse_int("-42") == -42);
}

TEST_CASE("synthetic corpus is deterministic and well formed") {
  TempDir a("synth_a"), b("synth_b");
  const auto ma = generate_synthetic(9, 3, 4, 2, a.path);
  const auto mb = generate_synthetic(9, 3, 4, 2, b.path);
  CHECK(ma.entries == mb.entries);
  CHECK(ma.entries.size() == 3u * 6);
  CHECK(ma.writers().size() == 3u);
  for (const auto& e : ma.entries) {
    const auto ia = raster::read_gray_file((a.path / e.path).string());
    const auto ib = raster::read_gray_file((b.path / e.path).string());
    CHECK(ia == ib);
    CHECK(ia.width() == kSyntheticCols);
    CHECK(ia.height() == kSyntheticRows);
  }
  CHECK(scan_corpus(a.path).entries == ma.entries);
  CHECK(read_manifest_tsv(a.path / "manifest.tsv") == ma.entries);

  const auto style = writer_style(9, 0);
  CHECK(style.strokes.size() >= 2u);
  CHECK(style.strokes.size() <= 6u);
  CHECK(render_sample(style, 1, false) != render_sample(style, 2, false));
  CHECK(render_sample(style, 1, true) != render_sample(style, 1, false));
}
