#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "e2dpca/dataset.hpp"
#include "e2dpca/error.hpp"
#include "e2dpca/model.hpp"
#include "e2dpca/pgm.hpp"

using namespace e2dpca;
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

PgmError::Kind kind_of(const std::string& text) {
  try {
    (void)parse_pgm(bytes_of(text));
  } catch (const PgmError& e) {
    return e.kind();
  }
  FAIL("expected PgmError");
  return PgmError::Kind::bad_magic;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("e2dpca-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

Matrix tagged_image(int subject, int index) {
  Matrix m(3, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) m(i, j) = subject * 20 + index * 2 + static_cast<double>(i * 2 + j) / 10.0;
  }
  for (double& v : m.data()) v = std::round(v);
  return m;
}

void write_tree(const fs::path& root, int subjects, int per_subject, bool nested) {
  for (int s = 1; s <= subjects; ++s) {
    if (nested) fs::create_directories(root / ("s" + std::to_string(s)));
    for (int j = 1; j <= per_subject; ++j) {
      const fs::path file = nested ? root / ("s" + std::to_string(s)) / (std::to_string(j) + ".pgm")
                                   : root / ("s" + std::to_string(s) + "_" + std::to_string(j) + ".pgm");
      write_pgm(tagged_image(s, j), file);
    }
  }
}

}  // namespace

TEST_CASE("parse binary and ascii PGM") {
  std::string p5 = "P5\n3 2\n255\n";
  for (int v : {0, 10, 20, 30, 40, 255}) p5.push_back(static_cast<char>(v));
  CHECK(parse_pgm(bytes_of(p5)) == Matrix{{0, 10, 20}, {30, 40, 255}});

  CHECK(parse_pgm(std::string_view("P2\n2 2\n15\n0 5\n10 15\n")) == Matrix{{0, 5}, {10, 15}});
}

TEST_CASE("PGM comments are skipped") {
  CHECK(parse_pgm(std::string_view("P2\n# made by hand\n2 1 # width height\n9\n# pixels\n1 9\n")) ==
        Matrix{{1, 9}});
  std::string p5 = "P5 2 1 255# trailing comment\n";
  p5.push_back('\x07');
  p5.push_back('\x08');
  CHECK(parse_pgm(bytes_of(p5)) == Matrix{{7, 8}});
}

TEST_CASE("PGM errors carry distinct kinds") {
  CHECK(kind_of("P6\n1 1\n255\n\x01") == PgmError::Kind::bad_magic);
  CHECK(kind_of("hello") == PgmError::Kind::bad_magic);
  CHECK(kind_of("P5\n1 x\n255\n\x01") == PgmError::Kind::bad_header);
  CHECK(kind_of("P5\n0 1\n255\n") == PgmError::Kind::bad_header);
  CHECK(kind_of("P5\n1 1\n65535\n\x01\x01") == PgmError::Kind::maxval_too_large);
  CHECK(kind_of("P5\n2 2\n255\n\x01\x02") == PgmError::Kind::truncated_raster);
  CHECK(kind_of("P2\n2 2\n255\n1 2 3") == PgmError::Kind::truncated_raster);
}

TEST_CASE("encode and parse round-trip") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> pixel(0, 255);
  for (std::size_t rows : {1u, 3u, 112u}) {
    Matrix m(rows, 5);
    for (double& v : m.data()) v = pixel(rng);
    CHECK(parse_pgm(encode_pgm(m)) == m);
  }
  CHECK(parse_pgm(encode_pgm(Matrix{{-3.0, 300.0, 1.4}})) == Matrix{{0, 255, 1}});

  TempDir dir;
  const Matrix img{{1, 2, 3}, {4, 5, 6}};
  write_pgm(img, dir.path() / "x.pgm");
  CHECK(read_pgm(dir.path() / "x.pgm") == img);
  CHECK_THROWS_AS(read_pgm(dir.path() / "missing.pgm"), Error);

  std::ofstream(dir.path() / "bad.pgm", std::ios::binary) << "P5\n4 4\n255\n\x01";
  try {
    (void)read_pgm(dir.path() / "bad.pgm");
    FAIL("expected PgmError");
  } catch (const PgmError& e) {
    CHECK(std::string(e.what()).find("bad.pgm") != std::string::npos);
  }
}

TEST_CASE("load an ORL-style tree") {
  for (bool nested : {true, false}) {
    TempDir dir;
    write_tree(dir.path(), 3, 4, nested);
    const LabeledDataset ds = load_orl(dir.path());
    REQUIRE(ds.size() == 12);
    CHECK(ds.shape == Shape{3, 2});
    CHECK(ds.labels == std::vector<Label>{1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3});
    CHECK(ds.images[0] == tagged_image(1, 1));
    CHECK(ds.images[6] == tagged_image(2, 3));
    CHECK(ds.images[11] == tagged_image(3, 4));
  }
}

TEST_CASE("numeric ordering, not lexicographic") {
  TempDir dir;
  write_tree(dir.path(), 11, 10, true);
  const LabeledDataset ds = load_orl(dir.path());
  CHECK(ds.labels[10] == 2);
  CHECK(ds.labels[100] == 11);
  CHECK(ds.images[9] == tagged_image(1, 10));
}

TEST_CASE("loader errors name the problem") {
  TempDir dir;
  write_tree(dir.path(), 8, 4, true);
  fs::remove(dir.path() / "s7" / "3.pgm");
  try {
    (void)load_orl(dir.path());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find((fs::path("s7") / "3.pgm").string()) != std::string::npos);
  }

  TempDir shapes;
  write_tree(shapes.path(), 2, 2, true);
  write_pgm(Matrix(4, 2), shapes.path() / "s2" / "2.pgm");
  CHECK_THROWS_AS(load_orl(shapes.path()), Error);

  CHECK_THROWS_AS(load_orl(dir.path() / "nope"), Error);
  TempDir empty;
  CHECK_THROWS_AS(load_orl(empty.path()), Error);
}

TEST_CASE("resolve_data_dir precedence") {
  ::setenv(kDataDirEnv, "/from/env", 1);
  CHECK(resolve_data_dir(fs::path("/explicit")) == fs::path("/explicit"));
  CHECK(resolve_data_dir(std::nullopt) == fs::path("/from/env"));
  ::unsetenv(kDataDirEnv);
  CHECK_FALSE(resolve_data_dir(std::nullopt).has_value());
}

TEST_CASE("first_k split") {
  const LabeledDataset ds = synthesize(3, 4, {2, 2}, 1);
  const DatasetSplit s = split(ds, {1, SplitPolicy::first_k, 0});
  CHECK(s.train.labels == std::vector<Label>{1, 2, 3});
  CHECK(s.test.labels == std::vector<Label>{1, 1, 1, 2, 2, 2, 3, 3, 3});
  CHECK(s.train.images[1] == ds.images[4]);
  CHECK(s.test.images[0] == ds.images[1]);

  CHECK_THROWS_AS(split(ds, {4, SplitPolicy::first_k, 0}), Error);
  CHECK_THROWS_AS(split(ds, {0, SplitPolicy::first_k, 0}), Error);
  CHECK(parse_split_policy("seeded_random") == SplitPolicy::seeded_random);
  CHECK(to_string(SplitPolicy::first_k) == "first_k");
  CHECK_THROWS_AS(parse_split_policy("shuffle"), Error);
}

TEST_CASE("seeded split is deterministic and partitions each subject") {
  const LabeledDataset ds = synthesize(5, 6, {3, 3}, 2);
  const SplitSpec spec{2, SplitPolicy::seeded_random, 99};
  const DatasetSplit a = split(ds, spec);
  const DatasetSplit b = split(ds, spec);
  CHECK(a.train.images == b.train.images);
  CHECK(a.test.images == b.test.images);
  CHECK(a.train.size() == 10);
  CHECK(a.test.size() == 20);
  for (Label label = 1; label <= 5; ++label) {
    CHECK(std::count(a.train.labels.begin(), a.train.labels.end(), label) == 2);
    CHECK(std::count(a.test.labels.begin(), a.test.labels.end(), label) == 4);
  }
  bool differs = false;
  for (std::uint64_t seed = 0; seed < 8 && !differs; ++seed) {
    differs = split(ds, {2, SplitPolicy::seeded_random, seed}).train.images != a.train.images;
  }
  CHECK(differs);
}

TEST_CASE("synthesize is deterministic and well-formed") {
  const LabeledDataset a = synthesize(4, 3, {5, 7}, 42);
  const LabeledDataset b = synthesize(4, 3, {5, 7}, 42);
  CHECK(a.images == b.images);
  CHECK(a.labels == std::vector<Label>{1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4});
  CHECK_NOTHROW(a.validate());
  CHECK(synthesize(4, 3, {5, 7}, 43).images != a.images);
  for (double v : a.images[0].data()) CHECK(v == std::round(v));

  const LabeledDataset still = synthesize(2, 3, {4, 4}, 5, {100.0, 0.0});
  CHECK(still.images[0] == still.images[1]);
  CHECK(still.images[0] != still.images[3]);
  CHECK_THROWS_AS(synthesize(2, 2, {4, 4}, 1, {10.0, 5.0}), Error);
}

TEST_CASE("validate catches malformed datasets") {
  LabeledDataset ds = synthesize(2, 2, {3, 3}, 1);
  ds.labels.pop_back();
  CHECK_THROWS_AS(ds.validate(), DataError);
  ds = synthesize(2, 2, {3, 3}, 1);
  ds.images[1](0, 0) = 300.0;
  CHECK_THROWS_AS(ds.validate(), DataError);
  CHECK_THROWS_AS(LabeledDataset{}.validate(), DataError);
}

TEST_CASE("loaded fixture classifies perfectly end to end") {
  TempDir dir;
  const LabeledDataset source = synthesize(4, 5, {12, 10}, 8);
  for (std::size_t i = 0; i < source.size(); ++i) {
    const fs::path folder = dir.path() / ("s" + std::to_string(source.labels[i]));
    fs::create_directories(folder);
    write_pgm(source.images[i], folder / (std::to_string(i % 5 + 1) + ".pgm"));
  }
  const LabeledDataset ds = load_orl(dir.path());
  CHECK(ds.images == source.images);
  const DatasetSplit data = split(ds, {2, SplitPolicy::first_k, 0});
  const ModelConfig cfg{Method::e2d, 3, Direction::row, 2, Metric::column_sum_l2};
  const ProjectionBasis basis = train(data.train.images, cfg);
  std::vector<FeatureMatrix> gallery;
  for (std::size_t i = 0; i < data.train.size(); ++i) {
    gallery.push_back(extract(data.train.images[i], basis, data.train.labels[i]));
  }
  for (std::size_t i = 0; i < data.test.size(); ++i) {
    CHECK(classify(extract(data.test.images[i], basis), gallery, cfg.metric) == data.test.labels[i]);
  }
}
