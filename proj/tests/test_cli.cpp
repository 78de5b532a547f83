#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rvspec.hpp"

using nlohmann::json;
using namespace rvspec;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

std::filesystem::path work_dir() {
  const std::filesystem::path dir(RVSPEC_TEST_WORK_DIR);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string path_in_work(const std::string& name) { return (work_dir() / name).string(); }

Run run_cli(const std::string& args) {
  const std::string command = std::string(RVSPEC_CLI_PATH) + " " + args + " 2>" + path_in_work("stderr.txt");
  Run run;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buffer[4096];
  std::size_t got = 0;
  while ((got = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) run.out.append(buffer, got);
  const int status = pclose(pipe);
  run.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return run;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

const char* kPolarAtoms = R"('{"sampler":"polar","alpha":1,"mass":2,"atoms":[[1,0,1.2],[0,1,0.8]]}')";

}  // namespace

TEST_CASE("estimate on a hand-computable sample", "[cli]") {
  // groups of three: norms {5, 1, 2} and {1, 4, sqrt 2}
  const std::string input = path_in_work("six.csv");
  write_file(input, "3,4\n1,0\n0,2\n0,-1\n-4,0\n1,1\n");
  const Run run = run_cli("estimate --input " + input +
                          " --r 0.4 --alpha 1 --t 0.25 --cdf-grid 4 --region arc:0:1.5707963267948966");
  REQUIRE(run.status == 0);
  const json doc = json::parse(run.out);
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["N"] == 6);
  CHECK(doc["d"] == 2);
  CHECK(doc["scheme"]["n"] == 2);
  CHECK(doc["scheme"]["m"] == 3);
  CHECK(doc["scheme"]["discarded"] == 0);

  const double s_n = 2.0 / 5.0 + std::sqrt(2.0) / 4.0;
  CHECK(doc["alpha"]["s_n"].get<double>() == Catch::Approx(s_n).epsilon(1e-15));
  CHECK(doc["alpha"]["hat"].get<double>() == Catch::Approx(s_n / (2.0 - s_n)).epsilon(1e-15));

  const auto& region = doc["spectral"]["regions"][0];
  CHECK(region["count"] == 1);
  CHECK(region["mass"].get<double>() == 0.5);
  const auto& cdf = doc["spectral"]["cdf"];
  REQUIRE(cdf.size() == 4);
  CHECK(cdf[0]["value"].get<double>() == 0.5);
  CHECK(cdf[1]["value"].get<double>() == 1.0);

  const double mean_qt = (std::pow(5.0 / 3.0, 0.25) + std::pow(4.0 / 3.0, 0.25)) / 2.0;
  const double mass = std::pow(mean_qt / std::tgamma(0.75), 4.0);
  CHECK(doc["mass"]["t"].get<double>() == 0.25);
  CHECK(doc["mass"]["alpha_used"].get<double>() == 1.0);
  CHECK(doc["mass"]["hat"].get<double>() == Catch::Approx(mass).epsilon(1e-13));
  CHECK(doc["warnings"].is_array());
}

TEST_CASE("data errors exit with code 3", "[cli]") {
  const std::string input = path_in_work("bad.csv");
  write_file(input, "1,2\n3,4\n1,abc\n");
  const Run run = run_cli("estimate --input " + input + " --r 0.5");
  CHECK(run.status == 3);
  const std::string err = slurp(path_in_work("stderr.txt"));
  CHECK(err.find("ParseError") != std::string::npos);
  CHECK(err.find("line 3") != std::string::npos);

  CHECK(run_cli("estimate --input " + path_in_work("missing.csv")).status == 3);
}

TEST_CASE("usage and numeric errors", "[cli]") {
  CHECK(run_cli("").status == 2);
  CHECK(run_cli("estimate").status == 2);
  CHECK(run_cli("frobnicate").status == 2);
  const std::string input = path_in_work("ok.csv");
  write_file(input, "1\n2\n3\n4\n5\n6\n7\n8\n");
  CHECK(run_cli("estimate --input " + input + " --r 0.5 --region bogus").status == 2);
  CHECK(run_cli("estimate --input " + input + " --r 1.5").status == 4);
}

TEST_CASE("simulate writes a deterministic CSV and a seed sidecar", "[cli]") {
  const std::string a = path_in_work("sim_a.csv");
  const std::string b = path_in_work("sim_b.csv");
  const std::string model = R"('{"sampler":"polar","alpha":1,"mass":1,"atoms":[[1,0,1]]}')";
  REQUIRE(run_cli("simulate --model " + model + " --n 5 --seed 7 --out " + a).status == 0);
  REQUIRE(run_cli("simulate --model " + model + " --n 5 --seed 7 --out " + b).status == 0);
  CHECK(slurp(a) == slurp(b));
  const DataMatrix data = read_csv_file(a);
  REQUIRE(data.rows() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(data(i, 1) == 0.0);
  const json sidecar = json::parse(slurp(a + ".json"));
  CHECK(sidecar["seed"] == 7);
  CHECK(run_cli("simulate --model nonsense --n 5 --out " + a).status == 2);
}

TEST_CASE("simulate then estimate equals the in-memory pipeline", "[cli]") {
  const std::string path = path_in_work("round_trip.csv");
  REQUIRE(run_cli(std::string("simulate --model ") + kPolarAtoms + " --n 3000 --seed 5 --out " + path).status == 0);
  const Run run = run_cli("estimate --input " + path + " --r 0.5 --region halfspace:1,0:0.5");
  REQUIRE(run.status == 0);
  const json doc = json::parse(run.out);

  const Scenario scenario{ModelSpec(1.0, 2.0, {{{1.0, 0.0}, 1.2}, {{0.0, 1.0}, 0.8}})};
  SeededRng rng(5, 0);
  const DataMatrix data = draw_sample(scenario, 3000, rng);
  PipelineConfig config;
  config.r = 0.5;
  config.regions = {{"h", halfspace_region({1.0, 0.0}, 0.5)}};
  const PipelineResult res = run_pipeline(data, config);
  CHECK(doc["alpha"]["hat"].get<double>() == res.alpha.alpha_hat);
  CHECK(doc["alpha"]["ci"]["lo"].get<double>() == res.alpha_interval.lo);
  CHECK(doc["spectral"]["regions"][0]["mass"].get<double>() == res.regions[0].mass);
  CHECK(doc["mass"]["hat"].get<double>() == res.mass.mass_hat);
}

TEST_CASE("sweep writes the documented table", "[cli]") {
  const std::string path = path_in_work("sweep.csv");
  const Run run = run_cli("sweep --model skewed-stable --n 2000 --reps 3 --target rho --seed 2 --out " + path);
  REQUIRE(run.status == 0);
  std::istringstream table(slurp(path));
  std::string first;
  std::getline(table, first);
  CHECK(first == "one_minus_r,mean,stddev,reps");
  const DataMatrix rows = read_csv(table);
  CHECK(rows.rows() == default_sweep_grid(2000, SweepTarget::Rho).size());
  CHECK(rows.dim() == 4);
  CHECK(json::parse(run.out)["rows"] == rows.rows());
}

TEST_CASE("ecdf and coverage commands", "[cli]") {
  const std::string path = path_in_work("ecdf.csv");
  const Run ecdf = run_cli("ecdf --model polar-quadrant --n 5000 --r 0.5 --grid 50 --out " + path);
  REQUIRE(ecdf.status == 0);
  const json summary = json::parse(ecdf.out);
  CHECK(summary["grid_size"] == 50);
  CHECK(summary["sup_distance"].get<double>() >= 0.0);
  std::istringstream table(slurp(path));
  std::string first;
  std::getline(table, first);
  CHECK(first == "angle,estimated,exact");
  CHECK(read_csv(table).rows() == 50);

  CHECK(run_cli("coverage --model polar-quadrant --n 1000 --reps 0").status == 4);
  CHECK(slurp(path_in_work("stderr.txt")).find("EmptyExperiment") != std::string::npos);
  const Run cov = run_cli("coverage --model polar-quadrant --n 2000 --reps 20 --kind alpha --r 0.5");
  REQUIRE(cov.status == 0);
  const json doc = json::parse(cov.out);
  CHECK(doc["reps"] == 20);
  CHECK(doc["coverage"].get<double>() >= 0.0);
}

TEST_CASE("auto-tuned estimate on a univariate stable file", "[cli][statistical]") {
  // Independent oracle (scipy levy_stable, 24220 groups of 82): E κ = 0.6783,
  // so α̂ concentrates near 2.108 with sd 0.067 at n = 1211, m = 82. The
  // finite-m bias of the α = 1.75 stable law dominates at this group size.
  const std::string path = path_in_work("skewed_stable.csv");
  REQUIRE(run_cli("simulate --model skewed-stable --n 100000 --seed 4 --out " + path).status == 0);
  const Run run = run_cli("estimate --input " + path);
  REQUIRE(run.status == 0);
  const json doc = json::parse(run.out);
  CHECK(doc["scheme"]["n"] == 1211);
  CHECK(doc["scheme"]["m"] == 82);
  const double alpha = doc["alpha"]["hat"].get<double>();
  CHECK(alpha >= 2.108 - 4 * 0.067);
  CHECK(alpha <= 2.108 + 4 * 0.067);
  CHECK(doc["spectral"]["rho"].get<double>() == Catch::Approx(0.5).margin(0.15));
}
