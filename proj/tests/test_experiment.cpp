#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "recur/error.hpp"
#include "recur/experiment.hpp"
#include "recur/io.hpp"

using namespace recur;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "recur-experiment-tests" / name;
  fs::remove_all(dir);
  return dir;
}

nlohmann::json tripling_doc(const fs::path& out) {
  return {{"map", "tripling"},
          {"seeds", 8},
          {"master_seed", 11},
          {"r_grid", {0.03, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4}},
          {"n_grid", {1, 2, 3, 4, 5, 6}},
          {"budgets", {{"birkhoff_length", 20000}, {"word_length", 20000}}},
          {"out", out.string()},
          {"quantities", {"cylinder-return", "point-return", "ball-return", "repetition", "complexity",
                          "lyapunov", "dimension", "entropy", "crosscheck"}}};
}

std::vector<std::string> problems_of(const nlohmann::json& doc) {
  try {
    config_from_json(doc);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& word) {
  return std::any_of(problems.begin(), problems.end(),
                     [&](const std::string& p) { return p.find(word) != std::string::npos; });
}

int run_cli(const std::string& args) {
  const std::string command = std::string(RECUR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("map specs parse and print") {
    CHECK(parse_map_spec("tripling") == MapSpec{"tripling", {}});
    CHECK(parse_map_spec("logistic:4") == MapSpec{"logistic", {4.0}});
    const auto golden = parse_map_spec("rotation:golden");
    REQUIRE(golden.params.size() == 1);
    CHECK(golden.params[0] == doctest::Approx(0.6180339887498949));
    CHECK(format_map_spec(MapSpec{"gauss", {1e9}}) == "gauss:1000000000");
  }

  TEST_CASE("quantity names round trip") {
    for (Quantity q : all_quantities()) CHECK(parse_quantity(to_string(q)) == q);
    CHECK_FALSE(parse_quantity("volume").has_value());
  }

  TEST_CASE("published schema matches the parser") {
    std::ifstream in(RECUR_SCHEMA_PATH);
    REQUIRE(in.good());
    const auto schema = nlohmann::json::parse(in);
    const auto& props = schema["properties"];
    std::set<std::string> keys;
    for (const auto& [key, value] : props.items()) keys.insert(key);
    CHECK(keys == std::set<std::string>{"map", "seeds", "master_seed", "r_grid", "n_grid", "budgets", "out",
                                        "quantities", "workers"});
    CHECK(schema["required"] == nlohmann::json({"map", "quantities"}));

    std::set<std::string> enumerated;
    for (const auto& q : props["quantities"]["items"]["enum"]) enumerated.insert(q.get<std::string>());
    std::set<std::string> known;
    for (Quantity q : all_quantities()) known.insert(std::string(to_string(q)));
    CHECK(enumerated == known);

    const ExperimentConfig defaults;
    CHECK(props["seeds"]["default"] == defaults.seeds);
    CHECK(props["master_seed"]["default"] == defaults.master_seed);
    CHECK(props["workers"]["default"] == defaults.workers);
    CHECK(props["out"]["default"] == defaults.out.string());
    const auto& budgets = props["budgets"]["properties"];
    CHECK(budgets["budget_scale"]["default"] == defaults.budgets.budget_scale);
    CHECK(budgets["piece_cap"]["default"] == defaults.budgets.piece_cap);
    CHECK(budgets["scan_limit"]["default"] == defaults.budgets.scan_limit);
    CHECK(budgets["birkhoff_length"]["default"] == defaults.budgets.birkhoff_length);
    CHECK(budgets["word_length"]["default"] == defaults.budgets.word_length);

    // Required fields alone, plus what the quantities need, make a valid config.
    CHECK_NOTHROW(config_from_json(
        {{"map", "tripling"}, {"quantities", {"ball-return", "lyapunov"}}, {"r_grid", {0.1, 0.01}}}));
  }

  TEST_CASE("crosscheck without entropy names entropy") {
    auto doc = tripling_doc("unused");
    doc["quantities"] = {"ball-return", "point-return", "lyapunov", "dimension", "crosscheck"};
    const auto problems = problems_of(doc);
    CHECK(mentions(problems, "'crosscheck' requires 'entropy'"));
    CHECK_FALSE(mentions(problems, "requires 'lyapunov'"));
  }

  TEST_CASE("every problem is reported at once") {
    nlohmann::json doc = {{"map", "henon"}, {"seeds", 0}, {"colour", "red"}, {"quantities", {"dimension", "nonsense"}}};
    const auto problems = problems_of(doc);
    CHECK(mentions(problems, "map"));
    CHECK(mentions(problems, "seeds"));
    CHECK(mentions(problems, "colour"));
    CHECK(mentions(problems, "nonsense"));
    CHECK(mentions(problems, "'dimension' requires 'point-return'"));
    CHECK(mentions(problems_of(nlohmann::json{{"map", "tripling"}}), "quantities"));
  }

  TEST_CASE("grids in either order are normalized; duplicates and unsorted grids rejected") {
    auto doc = tripling_doc("unused");
    doc["r_grid"] = {1e-3, 1e-2, 1e-1};
    doc["n_grid"] = {5, 3, 1};
    const auto c = config_from_json(doc);
    CHECK(c.r_grid == std::vector<double>{1e-1, 1e-2, 1e-3});
    CHECK(c.n_grid == std::vector<std::size_t>{1, 3, 5});
    doc["r_grid"] = {1e-3, 1e-1, 1e-2};
    CHECK(mentions(problems_of(doc), "r_grid"));
    doc["r_grid"] = {1e-2, 1e-2};
    CHECK(mentions(problems_of(doc), "r_grid"));
    doc["r_grid"] = {-1.0};
    CHECK(mentions(problems_of(doc), "r_grid"));
  }

  TEST_CASE("config hash ignores output location and worker count") {
    auto a = config_from_json(tripling_doc("/tmp/a"));
    auto b = config_from_json(tripling_doc("/tmp/b"));
    b.workers = 3;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 64);
    b.master_seed = 12;
    CHECK(config_hash(a) != config_hash(b));
  }

  TEST_CASE("ensemble seeds are distinct and reproducible") {
    std::set<std::uint64_t> seen;
    for (std::size_t i = 0; i < 1000; ++i) seen.insert(ensemble_seed(5, i));
    CHECK(seen.size() == 1000);
    CHECK(ensemble_seed(5, 3) == ensemble_seed(5, 3));
    CHECK(ensemble_seed(5, 3) != ensemble_seed(6, 3));
  }

  TEST_CASE("full tripling pipeline writes every artifact, twice identically") {
    const auto first = fresh_dir("first");
    const auto second = fresh_dir("second");
    const auto result = run_experiment(config_from_json(tripling_doc(first)));
    auto doc2 = tripling_doc(second);
    doc2["workers"] = 3;
    const auto again = run_experiment(config_from_json(doc2));
    CHECK(result.status == ExitStatus::ok);
    CHECK(again.status == ExitStatus::ok);

    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(first)) names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    const std::vector<std::string> expected{
        "estimate_crosscheck.json", "estimate_dimension.json", "estimate_entropy.json",
        "estimate_lyapunov.json",   "manifest.json",           "report_complexity.json",
        "series_seed_000.csv",      "series_seed_001.csv",     "series_seed_002.csv",
        "series_seed_003.csv",      "series_seed_004.csv",     "series_seed_005.csv",
        "series_seed_006.csv",      "series_seed_007.csv"};
    CHECK(names == expected);

    for (const auto& name : names) {
      if (name == "manifest.json") continue;
      CHECK_MESSAGE(slurp(first / name) == slurp(second / name), name);
    }
    auto m1 = nlohmann::json::parse(slurp(first / "manifest.json"));
    auto m2 = nlohmann::json::parse(slurp(second / "manifest.json"));
    for (const char* volatile_key : {"started_at", "finished_at", "wall_clock_seconds"}) {
      CHECK(m1.contains(volatile_key));
      m1.erase(volatile_key);
      m2.erase(volatile_key);
    }
    CHECK(m1 == m2);
    CHECK(m1["exit_status"] == 0);
    CHECK(m1["ensemble_seeds"].size() == 8);
    CHECK(m1["config_hash"] == config_hash(config_from_json(tripling_doc(first))));

    const auto series = read_series_csv(first / "series_seed_000.csv");
    std::set<SeriesKind> kinds;
    for (const auto& s : series) kinds.insert(s.kind);
    CHECK(kinds.size() == 4);

    const auto crosscheck = nlohmann::json::parse(slurp(first / "estimate_crosscheck.json"));
    CHECK(crosscheck["report"]["within"] == true);
    const auto lyap = nlohmann::json::parse(slurp(first / "estimate_lyapunov.json"));
    CHECK(lyap["reference"]["mean"].get<double>() == doctest::Approx(std::log(3.0)));
  }

  TEST_CASE("a refused estimate fails the run loudly but keeps the series") {
    const auto out = fresh_dir("rotation");
    nlohmann::json doc = {{"map", "rotation:golden"},
                          {"seeds", 4},
                          {"r_grid", {1e-1, 1e-2, 1e-3, 1e-4}},
                          {"out", out.string()},
                          {"quantities", {"point-return", "dimension"}}};
    const auto result = run_experiment(config_from_json(doc));
    CHECK(result.status == ExitStatus::failed);
    CHECK(mentions(result.problems, "non-zero entropy"));
    CHECK(fs::exists(out / "series_seed_003.csv"));
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["exit_status"] == 3);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("invalid config exits with status 1") {
    const auto dir = fresh_dir("cli");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.json") << R"({"map": "tripling", "quantities": ["crosscheck"]})";
    CHECK(run_cli("experiment --config " + (dir / "bad.json").string()) == 1);
    std::ofstream(dir / "broken.json") << "{not json";
    CHECK(run_cli("experiment --config " + (dir / "broken.json").string()) == 1);
  }

  TEST_CASE("small experiment through the CLI exits 0") {
    const auto dir = fresh_dir("cli-run");
    CHECK(run_cli("experiment --map tripling --seeds 2 --quantities ball-return,lyapunov "
                  "--r-grid geom:0.03:0.0001:5 --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "estimate_lyapunov.json"));
  }

  TEST_CASE("other subcommands") {
    const auto dir = fresh_dir("cli-misc");
    fs::create_directories(dir);
    CHECK(run_cli("maps list") == 0);
    CHECK(run_cli("orbit --map logistic:4 --seed 3 --length 10") == 0);
    CHECK(run_cli("returns --map tripling --kind point-return --r-grid 0.1,0.01,0.001,0.0001 --seeds 3 --out " +
                  (dir / "p.csv").string()) == 0);
    CHECK(run_cli("estimate --method dimension --input " + (dir / "p.csv").string()) == 0);
    CHECK(run_cli("orbit --map henon") != 0);
    CHECK(run_cli("no-such-command") != 0);
  }
}
