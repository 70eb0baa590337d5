#include "recur/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <thread>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "recur/complexity.hpp"
#include "recur/error.hpp"
#include "recur/estimators.hpp"
#include "recur/io.hpp"
#include "recur/recurrence.hpp"
#include "recur/symbolic.hpp"

namespace recur {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::pair<Quantity, std::string_view> kQuantityNames[] = {
    {Quantity::cylinder_return, "cylinder-return"},
    {Quantity::point_return, "point-return"},
    {Quantity::ball_return, "ball-return"},
    {Quantity::repetition, "repetition"},
    {Quantity::complexity, "complexity"},
    {Quantity::lyapunov, "lyapunov"},
    {Quantity::dimension, "dimension"},
    {Quantity::entropy, "entropy"},
    {Quantity::crosscheck, "crosscheck"},
};

bool wants(const ExperimentConfig& c, Quantity q) { return c.quantities.count(q) != 0; }

template <typename T>
bool strictly_monotone(const std::vector<T>& v, bool increasing) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (increasing ? !(v[i - 1] < v[i]) : !(v[i] < v[i - 1])) return false;
  }
  return true;
}

// Accepts either sort direction; stores the requested one.
template <typename T>
void normalize_grid(std::vector<T>& grid, bool increasing, std::string_view name,
                    std::vector<std::string>& problems) {
  if (grid.size() <= 1) return;
  if (strictly_monotone(grid, increasing)) return;
  std::reverse(grid.begin(), grid.end());
  if (strictly_monotone(grid, increasing)) return;
  std::reverse(grid.begin(), grid.end());
  problems.push_back(fmt::format("{} must be strictly sorted without duplicates", name));
}

void collect_problems(ExperimentConfig& c, std::vector<std::string>& problems) {
  try {
    make_builtin_map(c.map.name, c.map.params);
  } catch (const std::exception& e) {
    problems.push_back(fmt::format("map: {}", e.what()));
  }
  if (c.seeds < 1) problems.emplace_back("seeds must be at least 1");
  if (c.quantities.empty()) problems.emplace_back("quantities must name at least one quantity");
  for (Quantity q : c.quantities) {
    for (Quantity need : prerequisites(q)) {
      if (!wants(c, need)) {
        problems.push_back(fmt::format("quantity '{}' requires '{}' in quantities", to_string(q),
                                       to_string(need)));
      }
    }
  }
  for (double r : c.r_grid) {
    if (!(r > 0.0) || !std::isfinite(r)) problems.push_back(fmt::format("r_grid entry {} is not a positive radius", r));
  }
  for (std::size_t n : c.n_grid) {
    if (n == 0) problems.emplace_back("n_grid entries must be positive");
  }
  normalize_grid(c.r_grid, false, "r_grid", problems);
  normalize_grid(c.n_grid, true, "n_grid", problems);
  const bool needs_r = wants(c, Quantity::point_return) || wants(c, Quantity::ball_return);
  const bool needs_n = wants(c, Quantity::cylinder_return) || wants(c, Quantity::repetition);
  if (needs_r && c.r_grid.empty()) problems.emplace_back("r_grid must be nonempty for point-return and ball-return");
  if (needs_n && c.n_grid.empty()) problems.emplace_back("n_grid must be nonempty for cylinder-return and repetition");
  const Budgets& b = c.budgets;
  if (!(b.budget_scale > 0.0) || !std::isfinite(b.budget_scale)) problems.emplace_back("budgets.budget_scale must be positive");
  if (b.piece_cap < 1) problems.emplace_back("budgets.piece_cap must be at least 1");
  if (b.scan_limit < 1) problems.emplace_back("budgets.scan_limit must be at least 1");
  if (b.birkhoff_length < 1) problems.emplace_back("budgets.birkhoff_length must be at least 1");
  if (b.word_length < 1) problems.emplace_back("budgets.word_length must be at least 1");
  if (c.out.empty()) problems.emplace_back("out must be a directory path");
}

// Typed field readers that record a problem instead of throwing.
std::optional<std::uint64_t> read_count(const json& v, std::string_view key,
                                        std::vector<std::string>& problems) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d < 1.8e19 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
  }
  problems.push_back(fmt::format("{} must be a nonnegative integer", key));
  return std::nullopt;
}

std::optional<double> read_real(const json& v, std::string_view key,
                                std::vector<std::string>& problems) {
  if (v.is_number()) return v.get<double>();
  problems.push_back(fmt::format("{} must be a number", key));
  return std::nullopt;
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known,
                    std::string_view where, std::vector<std::string>& problems) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      problems.push_back(fmt::format("{}unknown field '{}'", where, key));
    }
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int size = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &size, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < size; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Branch coding of a typical orbit; stops early on a map error.
std::vector<Symbol> code_orbit(const IntervalMap& map, std::uint64_t seed, std::size_t length,
                               bool& truncated) {
  std::vector<Symbol> word;
  word.reserve(length);
  truncated = false;
  try {
    OrbitCursor cursor = typical_orbit(map, seed);
    word.push_back(static_cast<Symbol>(map.branch_index(cursor.current())));
    while (word.size() < length) word.push_back(static_cast<Symbol>(map.branch_index(cursor.advance())));
  } catch (const Error&) {
    truncated = true;
  }
  return word;
}

std::size_t alphabet_of(const IntervalMap& map, std::span<const Symbol> word) {
  if (map.family() != MapFamily::gauss) return map.branch_count();
  Symbol largest = 0;
  for (Symbol s : word) largest = std::max(largest, s);
  return static_cast<std::size_t>(largest) + 1;
}

struct SeedOutput {
  std::uint64_t seed = 0;
  std::vector<ReturnSeries> series;
  std::optional<Estimate> lyapunov;
  std::optional<Estimate> birkhoff;
  std::optional<Estimate> dimension;
  std::optional<ComplexityReport> complexity;
  std::vector<std::pair<Quantity, std::string>> failures;
  std::optional<std::string> birkhoff_failure;
};

ReturnSeries cylinder_series(const IntervalMap& map, std::uint64_t seed,
                             const std::vector<std::size_t>& n_grid) {
  bool truncated = false;
  const auto word = code_orbit(map, seed, n_grid.back(), truncated);
  ReturnSeries series;
  if (truncated) {
    series.kind = SeriesKind::cylinder_return;
    for (std::size_t n : n_grid) series.rows.push_back({static_cast<double>(n), 1, RowFlag::map_error});
  } else {
    const Admissibility adm =
        map.markov() ? Admissibility::markov(markov_matrix(map)) : Admissibility::full_shift();
    series = return_ratio_series(SymbolSequence(word, alphabet_of(map, word), map.name()), n_grid, adm);
  }
  series.zero_entropy = map.zero_entropy();
  return series;
}

SeedOutput run_seed(const ExperimentConfig& c, const IntervalMap& map, std::uint64_t seed) {
  SeedOutput out;
  out.seed = seed;
  ScanOptions opts;
  opts.budget_scale = c.budgets.budget_scale;
  opts.piece_cap = c.budgets.piece_cap;
  opts.seed = seed;

  auto attempt = [&](Quantity q, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      out.failures.emplace_back(q, e.what());
    }
  };

  std::optional<ReturnSeries> point;
  std::optional<ReturnSeries> ball;
  if (wants(c, Quantity::cylinder_return)) {
    attempt(Quantity::cylinder_return, [&] {
      auto s = cylinder_series(map, seed, c.n_grid);
      s.seed = seed;
      out.series.push_back(std::move(s));
    });
  }
  if (wants(c, Quantity::point_return)) {
    attempt(Quantity::point_return, [&] {
      point = scan_point_returns(map, typical_orbit(map, seed), c.r_grid, opts);
      out.series.push_back(*point);
    });
  }
  if (wants(c, Quantity::ball_return)) {
    attempt(Quantity::ball_return, [&] {
      const double x0 = typical_orbit(map, seed).current();
      ball = scan_scales(SeriesKind::ball_set_return, map, x0, c.r_grid, opts);
      out.series.push_back(*ball);
    });
  }
  if (wants(c, Quantity::repetition)) {
    attempt(Quantity::repetition, [&] {
      auto s = repetition_series(map, typical_orbit(map, seed), c.n_grid, c.budgets.scan_limit);
      s.seed = seed;
      out.series.push_back(std::move(s));
    });
  }
  if (wants(c, Quantity::complexity)) {
    attempt(Quantity::complexity, [&] {
      bool truncated = false;
      const auto word = code_orbit(map, seed, c.budgets.word_length, truncated);
      if (word.empty()) throw Error("orbit coding failed at the first point");
      out.complexity = complexity_report(word);
      if (truncated) out.complexity->flags.push_back(fmt::format("truncated@{}", word.size()));
    });
  }
  if (wants(c, Quantity::lyapunov)) {
    attempt(Quantity::lyapunov, [&] {
      if (!ball) throw Error("no ball-return series");
      out.lyapunov = lyapunov_from_ball_returns(*ball);
    });
    const std::uint64_t seeds[] = {seed};
    try {
      out.birkhoff = lyapunov_birkhoff(map, seeds, c.budgets.birkhoff_length).per_seed.front();
    } catch (const std::exception& e) {
      out.birkhoff_failure = e.what();
    }
  }
  if (wants(c, Quantity::dimension)) {
    attempt(Quantity::dimension, [&] {
      if (!point) throw Error("no point-return series");
      out.dimension = dimension_from_point_returns(*point);
    });
  }
  return out;
}

std::vector<SeedOutput> run_seeds(const ExperimentConfig& c, const IntervalMap& map) {
  std::vector<SeedOutput> outputs(c.seeds);
  std::size_t workers = c.workers != 0 ? c.workers : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, c.seeds);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < c.seeds; i = next++) {
      const std::uint64_t seed = ensemble_seed(c.master_seed, i);
      try {
        outputs[i] = run_seed(c, map, seed);
      } catch (const std::exception& e) {
        outputs[i].seed = seed;
        outputs[i].failures.emplace_back(Quantity::cylinder_return, e.what());
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return outputs;
}

std::vector<SeedFailure> failures_for(const std::vector<SeedOutput>& outputs, Quantity q) {
  std::vector<SeedFailure> failures;
  for (const auto& o : outputs) {
    for (const auto& [quantity, reason] : o.failures) {
      if (quantity == q) failures.push_back({o.seed, reason});
    }
  }
  return failures;
}

template <typename Pick>
AggregateEstimate aggregate_field(std::string method, const std::vector<SeedOutput>& outputs,
                                  Quantity q, Pick pick) {
  std::vector<Estimate> estimates;
  for (const auto& o : outputs) {
    if (const auto& e = pick(o)) estimates.push_back(*e);
  }
  return aggregate_estimates(std::move(method), std::move(estimates), failures_for(outputs, q));
}

}  // namespace

std::string_view to_string(Quantity q) {
  for (const auto& [value, name] : kQuantityNames) {
    if (value == q) return name;
  }
  return "unknown";
}

std::optional<Quantity> parse_quantity(std::string_view text) {
  for (const auto& [value, name] : kQuantityNames) {
    if (name == text) return value;
  }
  return std::nullopt;
}

std::vector<Quantity> all_quantities() {
  std::vector<Quantity> out;
  for (const auto& [value, name] : kQuantityNames) out.push_back(value);
  return out;
}

std::vector<Quantity> prerequisites(Quantity q) {
  switch (q) {
    case Quantity::lyapunov: return {Quantity::ball_return};
    case Quantity::dimension: return {Quantity::point_return};
    case Quantity::entropy: return {Quantity::repetition};
    case Quantity::crosscheck: return {Quantity::lyapunov, Quantity::entropy, Quantity::dimension};
    default: return {};
  }
}

MapSpec parse_map_spec(std::string_view text) {
  MapSpec spec;
  const auto colon = text.find(':');
  spec.name = std::string(text.substr(0, colon));
  if (spec.name.empty()) throw ParameterError("empty map name");
  if (colon == std::string_view::npos) return spec;
  std::string_view rest = text.substr(colon + 1);
  while (true) {
    const auto comma = rest.find(',');
    const std::string token(rest.substr(0, comma));
    if (token == "golden") {
      spec.params.push_back((std::sqrt(5.0) - 1.0) / 2.0);
    } else {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (token.empty() || used != token.size()) {
        throw ParameterError(fmt::format("bad map parameter '{}'", token));
      }
      spec.params.push_back(v);
    }
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return spec;
}

std::string format_map_spec(const MapSpec& spec) {
  std::string out = spec.name;
  for (std::size_t i = 0; i < spec.params.size(); ++i) {
    out += (i == 0 ? ':' : ',') + format_real(spec.params[i]);
  }
  return out;
}

std::uint64_t ensemble_seed(std::uint64_t master_seed, std::size_t index) {
  return derive_seed(master_seed, index);
}

ExperimentConfig config_from_json(const json& doc) {
  std::vector<std::string> problems;
  ExperimentConfig c;
  if (!doc.is_object()) throw ConfigError({"config must be a JSON object"});
  reject_unknown(doc,
                 {"map", "seeds", "master_seed", "r_grid", "n_grid", "budgets", "out",
                  "quantities", "workers"},
                 "", problems);

  if (doc.contains("map")) {
    const json& m = doc["map"];
    try {
      if (m.is_string()) {
        c.map = parse_map_spec(m.get<std::string>());
      } else if (m.is_object() && m.contains("name") && m["name"].is_string()) {
        reject_unknown(m, {"name", "params"}, "map: ", problems);
        c.map = {m["name"].get<std::string>(), {}};
        if (m.contains("params")) {
          if (!m["params"].is_array()) {
            problems.emplace_back("map.params must be an array of numbers");
          } else {
            for (const auto& p : m["params"]) {
              if (auto v = read_real(p, "map.params[]", problems)) c.map.params.push_back(*v);
            }
          }
        }
      } else {
        problems.emplace_back("map must be a string like \"logistic:4\" or {\"name\", \"params\"}");
      }
    } catch (const Error& e) {
      problems.push_back(fmt::format("map: {}", e.what()));
    }
  } else {
    problems.emplace_back("missing required field 'map'");
  }
  if (doc.contains("seeds")) {
    if (auto v = read_count(doc["seeds"], "seeds", problems)) c.seeds = *v;
  }
  if (doc.contains("master_seed")) {
    if (auto v = read_count(doc["master_seed"], "master_seed", problems)) c.master_seed = *v;
  }
  if (doc.contains("r_grid")) {
    if (!doc["r_grid"].is_array()) {
      problems.emplace_back("r_grid must be an array of radii");
    } else {
      for (std::size_t i = 0; i < doc["r_grid"].size(); ++i) {
        if (auto v = read_real(doc["r_grid"][i], fmt::format("r_grid[{}]", i), problems)) c.r_grid.push_back(*v);
      }
    }
  }
  if (doc.contains("n_grid")) {
    if (!doc["n_grid"].is_array()) {
      problems.emplace_back("n_grid must be an array of word lengths");
    } else {
      for (std::size_t i = 0; i < doc["n_grid"].size(); ++i) {
        if (auto v = read_count(doc["n_grid"][i], fmt::format("n_grid[{}]", i), problems)) c.n_grid.push_back(*v);
      }
    }
  }
  if (doc.contains("budgets")) {
    const json& b = doc["budgets"];
    if (!b.is_object()) {
      problems.emplace_back("budgets must be an object");
    } else {
      reject_unknown(b, {"budget_scale", "piece_cap", "scan_limit", "birkhoff_length", "word_length"},
                     "budgets: ", problems);
      if (b.contains("budget_scale")) {
        if (auto v = read_real(b["budget_scale"], "budgets.budget_scale", problems)) c.budgets.budget_scale = *v;
      }
      if (b.contains("piece_cap")) {
        if (auto v = read_count(b["piece_cap"], "budgets.piece_cap", problems)) c.budgets.piece_cap = *v;
      }
      if (b.contains("scan_limit")) {
        if (auto v = read_count(b["scan_limit"], "budgets.scan_limit", problems)) c.budgets.scan_limit = *v;
      }
      if (b.contains("birkhoff_length")) {
        if (auto v = read_count(b["birkhoff_length"], "budgets.birkhoff_length", problems)) {
          c.budgets.birkhoff_length = *v;
        }
      }
      if (b.contains("word_length")) {
        if (auto v = read_count(b["word_length"], "budgets.word_length", problems)) c.budgets.word_length = *v;
      }
    }
  }
  if (doc.contains("out")) {
    if (doc["out"].is_string()) {
      c.out = doc["out"].get<std::string>();
    } else {
      problems.emplace_back("out must be a string");
    }
  }
  if (doc.contains("quantities")) {
    if (!doc["quantities"].is_array()) {
      problems.emplace_back("quantities must be an array of names");
    } else {
      for (const auto& q : doc["quantities"]) {
        const auto parsed = q.is_string() ? parse_quantity(q.get<std::string>()) : std::nullopt;
        if (parsed) {
          c.quantities.insert(*parsed);
        } else {
          problems.push_back(fmt::format("unknown quantity {}", q.dump()));
        }
      }
    }
  } else {
    problems.emplace_back("missing required field 'quantities'");
  }
  if (doc.contains("workers")) {
    if (auto v = read_count(doc["workers"], "workers", problems)) c.workers = *v;
  }

  collect_problems(c, problems);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

void validate(ExperimentConfig& config) {
  std::vector<std::string> problems;
  collect_problems(config, problems);
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

ordered_json canonical_json(const ExperimentConfig& c) {
  ordered_json j;
  j["map"] = {{"name", c.map.name}, {"params", c.map.params}};
  j["seeds"] = c.seeds;
  j["master_seed"] = c.master_seed;
  j["r_grid"] = c.r_grid;
  j["n_grid"] = c.n_grid;
  j["budgets"] = {{"budget_scale", c.budgets.budget_scale},
                  {"piece_cap", c.budgets.piece_cap},
                  {"scan_limit", c.budgets.scan_limit},
                  {"birkhoff_length", c.budgets.birkhoff_length},
                  {"word_length", c.budgets.word_length}};
  auto qs = ordered_json::array();
  for (Quantity q : c.quantities) qs.push_back(std::string(to_string(q)));
  j["quantities"] = std::move(qs);
  return j;
}

std::string config_hash(const ExperimentConfig& config) {
  return sha256_hex(canonical_json(config).dump());
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const auto started = std::chrono::system_clock::now();
  const auto steady_start = std::chrono::steady_clock::now();
  ExperimentConfig c = config;
  validate(c);
  const IntervalMap map = make_builtin_map(c.map.name, c.map.params);
  std::filesystem::create_directories(c.out);

  const auto outputs = run_seeds(c, map);
  ExperimentResult result;
  bool total_failure = false;
  bool degraded = false;

  auto write = [&](const std::string& name, const ordered_json& doc) {
    write_json(doc, c.out / name);
    result.files.push_back(name);
  };
  auto note_failures = [&](const AggregateEstimate& agg) {
    if (!agg.failures.empty()) degraded = true;
  };
  auto header = [&](std::string_view quantity) {
    ordered_json j;
    j["quantity"] = quantity;
    j["map"] = format_map_spec(c.map);
    j["seeds"] = c.seeds;
    j["master_seed"] = c.master_seed;
    return j;
  };

  const bool any_series = wants(c, Quantity::cylinder_return) || wants(c, Quantity::point_return) ||
                          wants(c, Quantity::ball_return) || wants(c, Quantity::repetition);
  if (any_series) {
    const int width = std::max<int>(3, static_cast<int>(std::to_string(c.seeds - 1).size()));
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      const std::string name = fmt::format("series_seed_{:0{}}.csv", i, width);
      emit_csv(outputs[i].series, c.out / name);
      result.files.push_back(name);
    }
  }
  for (Quantity q : {Quantity::cylinder_return, Quantity::point_return, Quantity::ball_return,
                     Quantity::repetition}) {
    if (!wants(c, q)) continue;
    const auto failures = failures_for(outputs, q);
    if (failures.size() == outputs.size()) {
      total_failure = true;
      result.problems.push_back(fmt::format("{}: every seed failed ({})", to_string(q),
                                            failures.front().reason));
    } else if (!failures.empty()) {
      degraded = true;
    }
  }

  std::optional<AggregateEstimate> lyapunov;
  std::optional<AggregateEstimate> birkhoff;
  std::optional<AggregateEstimate> dimension;
  std::optional<AggregateEstimate> entropy;
  auto estimate = [&](Quantity q, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      total_failure = true;
      result.problems.push_back(fmt::format("{}: {}", to_string(q), e.what()));
      auto j = header(to_string(q));
      j["error"] = e.what();
      write(fmt::format("estimate_{}.json", to_string(q)), j);
    }
  };

  if (wants(c, Quantity::lyapunov)) {
    estimate(Quantity::lyapunov, [&] {
      std::vector<Estimate> reference;
      std::vector<SeedFailure> reference_failures;
      for (const auto& o : outputs) {
        if (o.birkhoff) reference.push_back(*o.birkhoff);
        if (o.birkhoff_failure) reference_failures.push_back({o.seed, *o.birkhoff_failure});
      }
      birkhoff = aggregate_estimates("lyapunov-birkhoff", std::move(reference),
                                     std::move(reference_failures));
      lyapunov = aggregate_field("lyapunov-ball-returns", outputs, Quantity::lyapunov,
                                 [](const SeedOutput& o) -> const std::optional<Estimate>& { return o.lyapunov; });
      note_failures(*lyapunov);
      auto j = header("lyapunov");
      j["estimate"] = to_json(*lyapunov);
      j["reference"] = to_json(*birkhoff);
      write("estimate_lyapunov.json", j);
    });
  }
  if (wants(c, Quantity::dimension)) {
    estimate(Quantity::dimension, [&] {
      dimension = aggregate_field("dimension-point-returns", outputs, Quantity::dimension,
                                  [](const SeedOutput& o) -> const std::optional<Estimate>& { return o.dimension; });
      note_failures(*dimension);
      auto j = header("dimension");
      j["estimate"] = to_json(*dimension);
      write("estimate_dimension.json", j);
    });
  }
  if (wants(c, Quantity::entropy)) {
    estimate(Quantity::entropy, [&] {
      std::vector<ReturnSeries> reps;
      for (const auto& o : outputs) {
        for (const auto& s : o.series) {
          if (s.kind == SeriesKind::repetition) reps.push_back(s);
        }
      }
      entropy = entropy_from_repetition_series(reps, failures_for(outputs, Quantity::repetition));
      note_failures(*entropy);
      auto j = header("entropy");
      j["estimate"] = to_json(*entropy);
      write("estimate_entropy.json", j);
    });
  }
  if (wants(c, Quantity::crosscheck)) {
    estimate(Quantity::crosscheck, [&] {
      if (!entropy || !birkhoff || !dimension) throw Error("a prerequisite estimate failed");
      const auto report = hofbauer_crosscheck(entropy->mean, birkhoff->mean, dimension->mean);
      auto j = header("crosscheck");
      j["lyapunov_method"] = birkhoff->method;
      j["report"] = to_json(report);
      write("estimate_crosscheck.json", j);
    });
  }
  if (wants(c, Quantity::complexity)) {
    estimate(Quantity::complexity, [&] {
      auto j = header("complexity");
      auto per_seed = ordered_json::array();
      double total = 0.0;
      std::size_t count = 0;
      for (const auto& o : outputs) {
        if (!o.complexity) continue;
        auto r = to_json(*o.complexity);
        r["seed"] = o.seed;
        per_seed.push_back(std::move(r));
        total += o.complexity->rate_nats;
        ++count;
      }
      if (count == 0) throw Error("no seed produced a complexity report");
      const auto failures = failures_for(outputs, Quantity::complexity);
      if (!failures.empty()) degraded = true;
      j["mean_rate_nats"] = total / static_cast<double>(count);
      j["per_seed"] = std::move(per_seed);
      auto fails = ordered_json::array();
      for (const auto& f : failures) fails.push_back({{"seed", f.seed}, {"reason", f.reason}});
      j["failures"] = std::move(fails);
      write("report_complexity.json", j);
    });
  }

  result.status = total_failure ? ExitStatus::failed
                  : degraded    ? ExitStatus::degraded
                                : ExitStatus::ok;

  const auto finished = std::chrono::system_clock::now();
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - steady_start).count();
  ordered_json manifest;
  manifest["version"] = RECUR_VERSION;
  manifest["config_hash"] = config_hash(c);
  manifest["master_seed"] = c.master_seed;
  manifest["config"] = canonical_json(c);
  auto seeds = ordered_json::array();
  for (std::size_t i = 0; i < c.seeds; ++i) seeds.push_back(ensemble_seed(c.master_seed, i));
  manifest["ensemble_seeds"] = std::move(seeds);
  std::vector<std::string> files = result.files;
  std::sort(files.begin(), files.end());
  manifest["files"] = files;
  manifest["exit_status"] = static_cast<int>(result.status);
  manifest["problems"] = result.problems;
  manifest["started_at"] = utc_timestamp(started);
  manifest["finished_at"] = utc_timestamp(finished);
  manifest["wall_clock_seconds"] = wall;
  write("manifest.json", manifest);
  return result;
}

}  // namespace recur
