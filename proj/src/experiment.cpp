#include "e2dpca/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <json.hpp>
#include <map>
#include <sstream>
#include <tuple>

#include "e2dpca/error.hpp"

namespace e2dpca {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr std::string_view kCsvHeader =
    "method,direction,r,d,accuracy,feature_coefficients,train_time,recognition_time,probe_count";

// Shortest fixed-notation text that parses back to the same double, padded to
// at least three decimals.
std::string format_real(double v) {
  char buf[512];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  if (ec != std::errc()) throw Error("cannot format value");
  std::string s(buf, end);
  const auto dot = s.find('.');
  if (dot == std::string::npos) {
    s += ".000";
  } else if (s.size() - dot - 1 < 3) {
    s.append(3 - (s.size() - dot - 1), '0');
  }
  return s;
}

double parse_real(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw Error("bad number '" + std::string(text) + "'");
  return v;
}

std::size_t parse_count(std::string_view text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw Error("bad count '" + std::string(text) + "'");
  return v;
}

struct Trained {
  ProjectionBasis basis;
  double train_seconds;
};

Trained train_for(const DatasetSplit& data, const ModelConfig& cfg, const TrainOptions& options) {
  const auto start = Clock::now();
  ProjectionBasis basis = train(data.train.images, cfg, options);
  return {std::move(basis), seconds_since(start)};
}

ExperimentResult evaluate(const DatasetSplit& data, const ProjectionBasis& basis, double train_seconds,
                          const ExperimentOptions& options) {
  const Metric metric = basis.config().metric;
  const auto gallery_start = Clock::now();
  std::vector<FeatureMatrix> gallery;
  gallery.reserve(data.train.size());
  for (std::size_t i = 0; i < data.train.size(); ++i) {
    gallery.push_back(extract(data.train.images[i], basis, data.train.labels[i]));
  }
  const double gallery_seconds = seconds_since(gallery_start);

  const std::size_t probes = data.test.size();
  std::size_t correct = 0;
  double best = 0.0;
  const int repeats = std::max(1, options.timing_repeats);
  for (int rep = 0; rep < repeats; ++rep) {
    std::size_t hits = 0;
    const auto start = Clock::now();
    for (std::size_t i = 0; i < probes; ++i) {
      const FeatureMatrix probe = extract(data.test.images[i], basis);
      if (classify(probe, gallery, metric) == data.test.labels[i]) ++hits;
    }
    const double elapsed = seconds_since(start);
    if (rep == 0 || elapsed < best) best = elapsed;
    correct = hits;
  }

  const ModelConfig& cfg = basis.config();
  ExperimentResult result;
  result.method = cfg.method;
  result.direction = cfg.direction;
  result.r = cfg.r;
  result.d = cfg.d;
  result.accuracy = probes == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(probes);
  result.feature_coefficients = gallery.empty() ? basis.feature_coefficients() : gallery.front().matrix.size();
  result.train_time = train_seconds + gallery_seconds;
  result.recognition_time = best;
  result.probe_count = probes;
  return result;
}

ExperimentResult result_from_json(const nlohmann::json& j) {
  ExperimentResult r;
  r.method = parse_method(j.at("method").get<std::string>());
  r.direction = parse_direction(j.at("direction").get<std::string>());
  r.r = j.at("r").get<std::size_t>();
  r.d = j.at("d").get<std::size_t>();
  r.accuracy = j.at("accuracy").get<double>();
  r.feature_coefficients = j.at("feature_coefficients").get<std::size_t>();
  r.train_time = j.at("train_time").get<double>();
  r.recognition_time = j.at("recognition_time").get<double>();
  r.probe_count = j.at("probe_count").get<std::size_t>();
  return r;
}

}  // namespace

std::string describe(const ModelConfig& cfg) {
  std::ostringstream out;
  out << "method=" << to_string(cfg.method) << " direction=" << to_string(cfg.direction) << " r=" << cfg.r
      << " d=" << cfg.d << " metric=" << to_string(cfg.metric);
  return out.str();
}

ExperimentResult run_experiment(const DatasetSplit& data, const ModelConfig& cfg, const ExperimentOptions& options) {
  try {
    const Trained trained = train_for(data, cfg, options.train);
    return evaluate(data, trained.basis, trained.train_seconds, options);
  } catch (const std::exception& e) {
    throw Error("experiment " + describe(cfg) + ": " + e.what());
  }
}

ExperimentResult run_experiment(const LabeledDataset& ds, const SplitSpec& split_spec, const ModelConfig& cfg,
                                const ExperimentOptions& options) {
  return run_experiment(split(ds, split_spec), cfg, options);
}

std::vector<ExperimentResult> sweep(const LabeledDataset& ds, const SplitSpec& split_spec,
                                    std::span<const ModelConfig> grid, const ExperimentOptions& options) {
  if (grid.empty()) throw Error("sweep: empty configuration grid");
  const DatasetSplit data = split(ds, split_spec);

  using Key = std::tuple<Method, Direction, std::size_t, Metric>;
  auto key_of = [](const ModelConfig& c) {
    const ModelConfig n = c.normalized();
    return Key{n.method, n.direction, n.r, n.metric};
  };
  std::map<Key, std::size_t> largest_d;
  for (const ModelConfig& cfg : grid) {
    auto& d = largest_d[key_of(cfg)];
    d = std::max(d, cfg.d);
  }

  std::map<Key, Trained> cache;
  std::vector<ExperimentResult> results;
  results.reserve(grid.size());
  for (const ModelConfig& cfg : grid) {
    try {
      const Key key = key_of(cfg);
      auto it = cache.find(key);
      if (it == cache.end()) {
        ModelConfig widest = cfg;
        widest.d = largest_d.at(key);
        it = cache.emplace(key, train_for(data, widest, options.train)).first;
      }
      const ProjectionBasis basis = it->second.basis.truncated(cfg.d);
      results.push_back(evaluate(data, basis, it->second.train_seconds, options));
    } catch (const std::exception& e) {
      throw Error("sweep aborted at " + describe(cfg) + ": " + e.what());
    }
  }
  return results;
}

std::vector<ModelConfig> make_grid(std::span<const Method> methods, std::span<const Direction> directions,
                                   std::span<const std::size_t> rs, std::span<const std::size_t> ds, Metric metric) {
  std::vector<ModelConfig> grid;
  auto seen = [&](const ModelConfig& c) { return std::find(grid.begin(), grid.end(), c) != grid.end(); };
  for (Method method : methods) {
    for (Direction direction : directions) {
      for (std::size_t r : rs) {
        for (std::size_t d : ds) {
          ModelConfig cfg{method, r, direction, d, metric};
          cfg = cfg.normalized();
          if (!seen(cfg)) grid.push_back(cfg);
        }
      }
    }
  }
  return grid;
}

std::vector<ExperimentResult> top_per_method(std::span<const ExperimentResult> results) {
  std::vector<ExperimentResult> best;
  for (const ExperimentResult& r : results) {
    auto it = std::find_if(best.begin(), best.end(), [&](const ExperimentResult& b) {
      return b.method == r.method && b.direction == r.direction;
    });
    if (it == best.end()) {
      best.push_back(r);
    } else if (r.accuracy > it->accuracy) {
      *it = r;
    }
  }
  return best;
}

ResultFormat parse_result_format(std::string_view text) {
  if (text == "json") return ResultFormat::json;
  if (text == "csv") return ResultFormat::csv;
  throw Error("unknown output format '" + std::string(text) + "' (expected json or csv)");
}

std::string emit_results(std::span<const ExperimentResult> results, ResultFormat format) {
  if (format == ResultFormat::json) {
    nlohmann::json out = nlohmann::json::array();
    for (const ExperimentResult& r : results) {
      out.push_back({
          {"method", to_string(r.method)},
          {"direction", to_string(r.direction)},
          {"r", r.r},
          {"d", r.d},
          {"accuracy", r.accuracy},
          {"feature_coefficients", r.feature_coefficients},
          {"train_time", r.train_time},
          {"recognition_time", r.recognition_time},
          {"probe_count", r.probe_count},
      });
    }
    return out.dump(2) + "\n";
  }
  std::string out(kCsvHeader);
  out += '\n';
  for (const ExperimentResult& r : results) {
    out += std::string(to_string(r.method)) + ',' + std::string(to_string(r.direction)) + ',' +
           std::to_string(r.r) + ',' + std::to_string(r.d) + ',' + format_real(r.accuracy) + ',' +
           std::to_string(r.feature_coefficients) + ',' + format_real(r.train_time) + ',' +
           format_real(r.recognition_time) + ',' + std::to_string(r.probe_count) + '\n';
  }
  return out;
}

std::vector<ExperimentResult> parse_results(std::string_view text, ResultFormat format) {
  std::vector<ExperimentResult> results;
  if (format == ResultFormat::json) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    if (!doc.is_array()) throw Error("results JSON must be an array");
    for (const auto& item : doc) results.push_back(result_from_json(item));
    return results;
  }
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw Error("results CSV has an unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 9) throw Error("results CSV row has " + std::to_string(fields.size()) + " fields");
    ExperimentResult r;
    r.method = parse_method(fields[0]);
    r.direction = parse_direction(fields[1]);
    r.r = parse_count(fields[2]);
    r.d = parse_count(fields[3]);
    r.accuracy = parse_real(fields[4]);
    r.feature_coefficients = parse_count(fields[5]);
    r.train_time = parse_real(fields[6]);
    r.recognition_time = parse_real(fields[7]);
    r.probe_count = parse_count(fields[8]);
    results.push_back(r);
  }
  return results;
}

}  // namespace e2dpca
