#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "e2dpca/dataset.hpp"
#include "e2dpca/error.hpp"
#include "e2dpca/experiment.hpp"

using namespace e2dpca;

namespace {

const LabeledDataset& small_faces() {
  static const LabeledDataset ds = synthesize(6, 5, {14, 10}, 7);
  return ds;
}

const SplitSpec kSplit{2, SplitPolicy::first_k, 0};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

ExperimentResult sample(Method method, double accuracy, double time) {
  ExperimentResult r;
  r.method = method;
  r.direction = Direction::column;
  r.r = 3;
  r.d = 4;
  r.accuracy = accuracy;
  r.feature_coefficients = 16;
  r.train_time = time * 3.0;
  r.recognition_time = time;
  r.probe_count = 200;
  return r;
}

}  // namespace

TEST_CASE("run_experiment on a separable dataset") {
  const ModelConfig cfg{Method::e2d, 3, Direction::row, 2, Metric::column_sum_l2};
  const ExperimentResult r = run_experiment(small_faces(), kSplit, cfg);
  CHECK(r.accuracy == 1.0);
  CHECK(r.probe_count == 18);
  CHECK(r.method == Method::e2d);
  CHECK(r.r == 3);
  CHECK(r.feature_coefficients == 5 * 2);
  CHECK(r.train_time >= 0.0);
  CHECK(r.recognition_time > 0.0);

  const ExperimentResult again = run_experiment(small_faces(), kSplit, cfg);
  CHECK(again.accuracy == r.accuracy);
  CHECK(again.feature_coefficients == r.feature_coefficients);
}

TEST_CASE("run_experiment reports normalized configs") {
  const ExperimentResult two =
      run_experiment(small_faces(), kSplit, {Method::two_d, 5, Direction::column, 3, Metric::column_sum_l2});
  CHECK(two.r == 1);
  CHECK(two.feature_coefficients == 10 * 3);
  const ExperimentResult pca =
      run_experiment(small_faces(), kSplit, {Method::pca, 5, Direction::row, 4, Metric::column_sum_l2});
  CHECK(pca.r == 1);
  CHECK(pca.direction == Direction::column);
  CHECK(pca.feature_coefficients == 4);
}

TEST_CASE("run_experiment errors name the config") {
  try {
    (void)run_experiment(small_faces(), kSplit, {Method::e2d, 99, Direction::row, 1, Metric::column_sum_l2});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("r=99") != std::string::npos);
  }
}

TEST_CASE("make_grid covers and collapses the axes") {
  const std::vector<Method> e2d{Method::e2d};
  const std::vector<Direction> both{Direction::row, Direction::column};
  const std::vector<std::size_t> rs{1, 2};
  const std::vector<std::size_t> ds{1, 2};
  const auto grid = make_grid(e2d, both, rs, ds, Metric::column_sum_l2);
  CHECK(grid.size() == 8);
  CHECK(grid.front() == ModelConfig{Method::e2d, 1, Direction::row, 1, Metric::column_sum_l2});
  CHECK(grid.back() == ModelConfig{Method::e2d, 2, Direction::column, 2, Metric::column_sum_l2});

  const std::vector<Method> all{Method::pca, Method::two_d, Method::e2d};
  const auto mixed = make_grid(all, both, rs, ds, Metric::frobenius);
  // pca: 2 (d); twoD: 2 directions x 2 d; e2d: 8.
  CHECK(mixed.size() == 2 + 4 + 8);
  CHECK(std::count_if(mixed.begin(), mixed.end(), [](const ModelConfig& c) { return c.method == Method::pca; }) == 2);
}

TEST_CASE("sweep yields one result per config") {
  const std::vector<Method> e2d{Method::e2d};
  const std::vector<Direction> both{Direction::row, Direction::column};
  const std::vector<std::size_t> rs{1, 2};
  const std::vector<std::size_t> ds{1, 2};
  const auto grid = make_grid(e2d, both, rs, ds, Metric::column_sum_l2);
  const auto results = sweep(small_faces(), kSplit, grid);
  REQUIRE(results.size() == 8);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(results[i].r == grid[i].r);
    CHECK(results[i].d == grid[i].d);
    CHECK(results[i].direction == grid[i].direction);
    CHECK(results[i].accuracy == 1.0);
  }
}

TEST_CASE("sweep at r = 1 matches twoD and a singleton sweep matches run_experiment") {
  const std::vector<ModelConfig> grid{{Method::e2d, 1, Direction::row, 2, Metric::column_sum_l2},
                                      {Method::two_d, 1, Direction::row, 2, Metric::column_sum_l2}};
  const auto results = sweep(small_faces(), kSplit, grid);
  CHECK(results[0].accuracy == results[1].accuracy);
  CHECK(results[0].feature_coefficients == results[1].feature_coefficients);

  const LabeledDataset noisy = synthesize(8, 6, {12, 9}, 3, {50.0, 10.0});
  for (const ModelConfig& cfg : {ModelConfig{Method::e2d, 4, Direction::column, 3, Metric::column_sum_l2},
                                 ModelConfig{Method::pca, 1, Direction::column, 5, Metric::frobenius}}) {
    const std::vector<ModelConfig> single{cfg};
    const ExperimentResult swept = sweep(noisy, {3, SplitPolicy::seeded_random, 5}, single).front();
    const ExperimentResult direct = run_experiment(noisy, {3, SplitPolicy::seeded_random, 5}, cfg);
    CHECK(swept.accuracy == direct.accuracy);
    CHECK(swept.feature_coefficients == direct.feature_coefficients);
    CHECK(swept.probe_count == direct.probe_count);
  }
}

TEST_CASE("shared training across d gives the same accuracy as separate runs") {
  const LabeledDataset noisy = synthesize(10, 6, {10, 8}, 11, {50.0, 10.0});
  std::vector<ModelConfig> grid;
  for (std::size_t d = 1; d <= 4; ++d) grid.push_back({Method::e2d, 2, Direction::row, d, Metric::column_sum_l2});
  const auto shared = sweep(noisy, kSplit, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(shared[i].accuracy == run_experiment(noisy, kSplit, grid[i]).accuracy);
  }
}

TEST_CASE("a failing config aborts the sweep") {
  const std::vector<ModelConfig> grid{{Method::e2d, 2, Direction::row, 1, Metric::column_sum_l2},
                                      {Method::e2d, 50, Direction::row, 1, Metric::column_sum_l2}};
  try {
    (void)sweep(small_faces(), kSplit, grid);
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(what.find("sweep aborted") != std::string::npos);
    CHECK(what.find("r=50") != std::string::npos);
  }
  CHECK_THROWS_AS(sweep(small_faces(), kSplit, std::span<const ModelConfig>{}), Error);
}

TEST_CASE("top_per_method keeps the earliest best") {
  std::vector<ExperimentResult> results{sample(Method::e2d, 0.9, 1.0), sample(Method::e2d, 0.95, 1.0),
                                        sample(Method::e2d, 0.95, 2.0), sample(Method::pca, 0.8, 1.0)};
  const auto top = top_per_method(results);
  REQUIRE(top.size() == 2);
  CHECK(top[0].accuracy == 0.95);
  CHECK(top[0].train_time == 3.0);
  CHECK(top[1].method == Method::pca);
}

TEST_CASE("CSV emission") {
  const std::vector<ExperimentResult> results{sample(Method::e2d, 0.93, 0.1), sample(Method::two_d, 1.0, 0.25)};
  const auto text = lines(emit_results(results, ResultFormat::csv));
  REQUIRE(text.size() == 3);
  CHECK(text[0] == "method,direction,r,d,accuracy,feature_coefficients,train_time,recognition_time,probe_count");
  CHECK(text[1].rfind("e2d,column,3,4,0.930,16,", 0) == 0);
  CHECK(text[2].rfind("twoD,column,3,4,1.000,16,0.750,0.250,200", 0) == 0);
}

TEST_CASE("JSON emission") {
  const std::vector<ExperimentResult> results{sample(Method::pca, 0.85, 0.5)};
  const std::string text = emit_results(results, ResultFormat::json);
  CHECK(text.find("\"method\": \"pca\"") != std::string::npos);
  CHECK(text.find("\"feature_coefficients\": 16") != std::string::npos);
  CHECK(parse_result_format("json") == ResultFormat::json);
  CHECK_THROWS_AS(parse_result_format("xml"), Error);
}

TEST_CASE("results round-trip exactly through both formats") {
  const std::vector<ExperimentResult> measured =
      sweep(small_faces(), kSplit,
            std::vector<ModelConfig>{{Method::e2d, 3, Direction::column, 2, Metric::column_sum_l2},
                                     {Method::pca, 1, Direction::column, 3, Metric::column_sum_l2}});
  std::vector<ExperimentResult> results = measured;
  results.push_back(sample(Method::two_d, 2.0 / 3.0, 1.0 / 7.0));
  results.push_back(sample(Method::e2d, 0.0, 1e-7));

  const auto from_json = parse_results(emit_results(results, ResultFormat::json), ResultFormat::json);
  CHECK(from_json == results);
  const auto from_csv = parse_results(emit_results(from_json, ResultFormat::csv), ResultFormat::csv);
  CHECK(from_csv == results);

  CHECK_THROWS_AS(parse_results("a,b\n", ResultFormat::csv), Error);
  CHECK_THROWS_AS(parse_results("{}", ResultFormat::json), Error);
}

TEST_CASE("describe names every axis") {
  CHECK(describe({Method::e2d, 21, Direction::row, 20, Metric::column_sum_l2}) ==
        "method=e2d direction=row r=21 d=20 metric=column_sum_L2");
}
