#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const fs::path kWork = fs::temp_directory_path() / "vcpcr_cli_tests";

int run(const std::string& args) {
  const std::string command = std::string(VCPCR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

// Simulated data shared by the tests; created once.
const fs::path& sim_dir() {
  static const fs::path dir = [] {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
    const fs::path d = kWork / "sim";
    REQUIRE(run("simulate --config 3 --rho 0.6 --n 50 --seed 1 --out " + d.string()) == 0);
    return d;
  }();
  return dir;
}

const char* kTinyGrid = R"({"grid_size": 2, "K_grid": [4], "n_inits": 1, "outer_folds": 2, "inner_folds": 2})";

}  // namespace

TEST_CASE("simulate writes data, truth and the resolved config") {
  const fs::path d = sim_dir();
  CHECK(fs::exists(d / "data.csv"));
  const Json truth = Json::parse(slurp(d / "truth.json"));
  CHECK(truth.at("sigma_eps2").get<double>() == doctest::Approx(6.8));
  const Json resolved = Json::parse(slurp(d / "resolved-config.json"));
  CHECK(resolved.at("command") == "simulate");
  CHECK(run("simulate --n 30 --out " + (kWork / "bad").string()) == 1);
}

TEST_CASE("simulate is reproducible from its resolved config") {
  const fs::path d = sim_dir();
  const Json resolved = Json::parse(slurp(d / "resolved-config.json"));
  Json flat = resolved.at("simulation");
  flat["out"] = (kWork / "again").string();
  write(kWork / "again.json", flat.dump());
  REQUIRE(run("simulate --config-file " + (kWork / "again.json").string()) == 0);
  CHECK(slurp(kWork / "again" / "data.csv") == slurp(d / "data.csv"));
}

TEST_CASE("fit writes a fit and metrics for every method") {
  const fs::path d = sim_dir();
  for (const char* method : {"vcpcr-ridge", "vcpcr-lasso", "vcpcr-identity", "crl-kmeans", "crl-ward", "cen"}) {
    const fs::path out = kWork / (std::string("fit-") + method);
    REQUIRE(run(std::string("fit --method ") + method + " --K 5 --data " + (d / "data.csv").string() +
                " --truth " + (d / "truth.json").string() + " --out " + out.string()) == 0);
    const Json fit = Json::parse(slurp(out / "fit.json"));
    CHECK(fit.at("method") == method);
    CHECK(fit.at("b").size() == 200);
    const Json metrics = Json::parse(slurp(out / "metrics.json"));
    CHECK(metrics.contains("support_mcc"));
    CHECK(fs::exists(out / "resolved-config.json"));
  }
}

TEST_CASE("fit exit codes follow the error category") {
  const fs::path d = sim_dir();
  const std::string data = " --data " + (d / "data.csv").string() + " --out " + (kWork / "err").string();
  CHECK(run("fit --method vcpcr-ridge --lambda-ratio 1" + data) == 2);
  CHECK(run("fit --method vcpcr-ridge --lambda 100" + data) == 2);
  CHECK(run("fit --method pls" + data) == 1);
  CHECK(run("fit --method cen --data " + (kWork / "nope.csv").string()) == 3);
  CHECK(run("fit --method cen --data " + (d / "data.csv").string() + " --response-column z") == 3);
  CHECK(run("frobnicate") == 1);
  CHECK(run("--help") == 0);
}

TEST_CASE("metrics recomputes fit quality from files") {
  const fs::path d = sim_dir();
  const fs::path fit = kWork / "fit-cen";
  REQUIRE(fs::exists(fit / "fit.json"));
  const fs::path out = kWork / "metrics";
  REQUIRE(run("metrics --fit " + (fit / "fit.json").string() + " --truth " + (d / "truth.json").string() +
              " --data " + (d / "data.csv").string() + " --out " + out.string()) == 0);
  const Json a = Json::parse(slurp(out / "metrics.json"));
  const Json b = Json::parse(slurp(fit / "metrics.json"));
  CHECK(a.at("support_mcc") == b.at("support_mcc"));
  CHECK(a.at("msep").is_number());
}

TEST_CASE("cv writes rows, folds and summary deterministically") {
  const fs::path d = sim_dir();
  write(kWork / "grid.json", kTinyGrid);
  const std::string base = "cv --method vcpcr-identity --data " + (d / "data.csv").string() + " --truth " +
                           (d / "truth.json").string() + " --grid " + (kWork / "grid.json").string();
  REQUIRE(run(base + " --out " + (kWork / "cv1").string()) == 0);
  REQUIRE(run(base + " --jobs 2 --out " + (kWork / "cv2").string()) == 0);
  CHECK(slurp(kWork / "cv1" / "results.jsonl") == slurp(kWork / "cv2" / "results.jsonl"));
  CHECK(slurp(kWork / "cv1" / "folds.jsonl") == slurp(kWork / "cv2" / "folds.jsonl"));
  CHECK(fs::exists(kWork / "cv1" / "summary.csv"));
}

TEST_CASE("output directory defaults to the environment variable") {
  const fs::path env_out = kWork / "from-env";
  const std::string command = "VCPCR_OUTPUT_DIR=" + env_out.string() + " " + VCPCR_CLI_PATH +
                              " simulate --config 1 --rho 0.3 --n 25 > /dev/null 2>&1";
  REQUIRE(std::system(command.c_str()) == 0);
  CHECK(fs::exists(env_out / "data.csv"));
}

TEST_CASE("replication benchmark covers every setting and method") {
  Json spec = Json::parse(slurp(VCPCR_REPLICATION_SPEC));
  spec["grid"] = Json::parse(kTinyGrid);
  write(kWork / "replication.json", spec.dump());
  const fs::path out = kWork / "bench";
  REQUIRE(run("benchmark --spec " + (kWork / "replication.json").string() + " --jobs 2 --out " + out.string()) == 0);
  std::set<std::pair<std::string, std::string>> groups;
  std::istringstream lines(slurp(out / "results.jsonl"));
  for (std::string line; std::getline(lines, line);) {
    const Json row = Json::parse(line);
    groups.emplace(row.at("setting").get<std::string>(), row.at("method").get<std::string>());
  }
  CHECK(groups.size() == 12 * 6);
  const std::string first = slurp(out / "results.jsonl");

  // A resumed run reuses every cell and reproduces the assembled output.
  const auto stamp = fs::last_write_time(out / "cells" / "config3_rho0.6_n50_rep0__cen.jsonl");
  REQUIRE(run("benchmark --resume --spec " + (kWork / "replication.json").string() + " --out " + out.string()) == 0);
  CHECK(fs::last_write_time(out / "cells" / "config3_rho0.6_n50_rep0__cen.jsonl") == stamp);
  CHECK(slurp(out / "results.jsonl") == first);
}

TEST_CASE("benchmark validates its spec") {
  write(kWork / "empty.json", R"({"methods": [], "canonical": true})");
  CHECK(run("benchmark --spec " + (kWork / "empty.json").string() + " --out " + (kWork / "e").string()) == 1);
  write(kWork / "typo.json", R"({"methods": ["cen"], "canonical": true, "grids": {}})");
  CHECK(run("benchmark --spec " + (kWork / "typo.json").string() + " --out " + (kWork / "e").string()) == 1);
  write(kWork / "broken.json", R"({"methods": )");
  CHECK(run("benchmark --spec " + (kWork / "broken.json").string() + " --out " + (kWork / "e").string()) == 3);
}

TEST_CASE("failed benchmark cells are logged and the run continues") {
  const fs::path d = sim_dir();
  // Classification data make CEN fail while VC-PCR still runs.
  std::ifstream in(d / "data.csv");
  std::ostringstream csv;
  std::string line;
  std::getline(in, line);
  csv << line << "\n";
  for (int i = 0; std::getline(in, line); ++i) {
    const auto comma = line.rfind(',');
    csv << line.substr(0, comma) << "," << (i % 2) << "\n";
  }
  write(kWork / "binary.csv", csv.str());
  Json spec{{"methods", {"vcpcr-identity", "cen"}},
            {"datasets", {{{"path", (kWork / "binary.csv").string()}, {"task", "classification"}}}},
            {"grid", Json::parse(kTinyGrid)}};
  write(kWork / "mixed.json", spec.dump());
  const fs::path out = kWork / "mixed";
  CHECK(run("benchmark --spec " + (kWork / "mixed.json").string() + " --out " + out.string()) == 2);
  CHECK(fs::exists(out / "failures.json"));
  CHECK(slurp(out / "results.jsonl").find("vcpcr-identity") != std::string::npos);
}
