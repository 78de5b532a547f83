// rvspec: group-maxima estimation of tail index, spectral measure and total
// mass from the command line.
//
//   rvspec estimate --input data.csv [--r 0.5|auto] [--alpha 1] [--region arc:0:1.5708]
//   rvspec simulate --model stable-cos2 --n 50000 --seed 1 --out sample.csv
//   rvspec sweep    --model skewed-stable --n 100000 --reps 50 --target rho --out sweep.csv
//   rvspec coverage --model polar-quadrant --n 20000 --kind spectral --region arc:0:1.5708
//   rvspec ecdf     --model stable-cos2 --n 50000 --r 0.5 --out ecdf.csv
//
// Exit codes: 0 success, 2 usage, 3 data, 4 numeric or degenerate input.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rvspec.hpp"

#ifndef RVSPEC_VERSION
#define RVSPEC_VERSION "0.1.0"
#endif

using nlohmann::json;
using namespace rvspec;

namespace {

constexpr int kSchemaVersion = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON has no infinity; non-finite values are written as strings.
json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json interval_json(const Interval& ci) { return {{"lo", number(ci.lo)}, {"hi", number(ci.hi)}, {"level", ci.level}}; }

json scheme_json(const GroupScheme& s) {
  return {{"r", s.r}, {"n", s.n}, {"m", s.m}, {"discarded", s.discarded}};
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw UsageError("cannot parse " + what + " '" + text + "'");
  }
}

// "arc:START:END" (d = 2, half-open, radians) or "halfspace:u1,...,ud:c".
NamedRegion parse_region(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 3 && parts[0] == "arc") {
    return {spec, arc_region(parse_number(parts[1], "arc start"), parse_number(parts[2], "arc end"))};
  }
  if (parts.size() == 3 && parts[0] == "halfspace") {
    std::vector<double> u;
    for (const auto& c : split(parts[1], ',')) u.push_back(parse_number(c, "halfspace direction"));
    if (u.empty()) throw UsageError("halfspace direction is empty");
    return {spec, halfspace_region(std::move(u), parse_number(parts[2], "halfspace threshold"))};
  }
  throw UsageError("region must be arc:START:END or halfspace:u1,...,ud:c, got '" + spec + "'");
}

std::optional<double> parse_auto(const std::string& text, const std::string& what) {
  if (text.empty() || text == "auto") return std::nullopt;
  return parse_number(text, what);
}

// ---------------------------------------------------------------------------
// Models

const char* preset_json(const std::string& name) {
  if (name == "skewed-stable") return R"({"sampler":"stable1d","alpha":1.75,"rho":0.5,"mass":1})";
  if (name == "stable-cos2") return R"({"sampler":"stable_vector","alpha":0.75,"mass":1,"density":"abs_cos2"})";
  if (name == "polar-atoms")
    return R"({"sampler":"polar","alpha":1,"mass":2,"atoms":[[1,0,1.2],[0,1,0.8]]})";
  if (name == "polar-quadrant") return R"({"sampler":"polar","alpha":1,"mass":1,"density":"abs_cos2"})";
  return nullptr;
}

std::function<double(double)> named_density(const std::string& name, double mass) {
  if (name == "abs_cos2") return [mass](double t) { return mass * std::abs(std::cos(2.0 * t)) / 4.0; };
  if (name == "uniform") return [mass](double) { return mass / (2.0 * std::numbers::pi); };
  throw UsageError("unknown density '" + name + "' (abs_cos2, uniform)");
}

// A preset name, an inline JSON object, or a path to a JSON file.
Scenario parse_model(const std::string& text) {
  json spec;
  try {
    if (const char* preset = preset_json(text)) {
      spec = json::parse(preset);
    } else if (!text.empty() && text.front() == '{') {
      spec = json::parse(text);
    } else {
      std::ifstream in(text);
      if (!in) throw UsageError("unknown model preset or unreadable file '" + text + "'");
      spec = json::parse(in);
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("model JSON: ") + e.what());
  }
  try {
    const std::string sampler = spec.value("sampler", "polar");
    const double alpha = spec.at("alpha").get<double>();
    const double mass = spec.value("mass", 1.0);
    Scenario scenario{ModelSpec(1.0, 1.0, {{{1.0}, 1.0}})};
    if (sampler == "polar") {
      scenario.sampler = SamplerKind::Polar;
    } else if (sampler == "stable1d") {
      scenario.sampler = SamplerKind::Stable1d;
    } else if (sampler == "stable_vector") {
      scenario.sampler = SamplerKind::StableVector;
    } else {
      throw UsageError("unknown sampler '" + sampler + "' (polar, stable1d, stable_vector)");
    }
    // strictly stable laws have β = 2α; the polar model has no second-order term
    const double beta = spec.value("beta", scenario.sampler == SamplerKind::Polar ? kInfinity : 2.0 * alpha);
    scenario.discretization_atoms = spec.value("discretization_atoms", kDefaultDiscretizationAtoms);

    if (spec.contains("density")) {
      scenario.model = ModelSpec(alpha, mass, AngularDensity{named_density(spec.at("density"), mass)}, beta);
    } else if (spec.contains("rho")) {
      const double rho = spec.at("rho").get<double>();
      std::vector<SpectralAtom> atoms;
      if (rho > -1.0) atoms.push_back({{1.0}, mass * (1.0 + rho) / 2.0});
      if (rho < 1.0) atoms.push_back({{-1.0}, mass * (1.0 - rho) / 2.0});
      scenario.model = ModelSpec(alpha, mass, std::move(atoms), beta);
    } else if (spec.contains("atoms")) {
      std::vector<SpectralAtom> atoms;
      for (const auto& row : spec.at("atoms")) {
        auto values = row.get<std::vector<double>>();
        if (values.size() < 2) throw UsageError("atom rows are [u1, ..., ud, weight]");
        const double weight = values.back();
        values.pop_back();
        atoms.push_back({std::move(values), weight});
      }
      scenario.model = ModelSpec(alpha, mass, std::move(atoms), beta);
    } else {
      throw UsageError("model needs one of: atoms, rho, density");
    }
    return scenario;
  } catch (const json::exception& e) {
    throw UsageError(std::string("model JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Output

void emit_json(const json& doc, const std::string& path) {
  if (path.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
}

json header(const std::string& command) {
  return {{"schema_version", kSchemaVersion}, {"tool_version", RVSPEC_VERSION}, {"command", command}};
}

// ---------------------------------------------------------------------------
// Commands

struct Options {
  std::string input;
  std::string model;
  std::string r = "auto";
  std::string t = "auto";
  std::optional<double> alpha;
  std::optional<double> beta;
  double epsilon = kDefaultEpsilon;
  double level = 0.95;
  std::uint64_t seed = 1;
  std::size_t reps = 50;
  std::size_t sample_size = 0;
  std::vector<std::string> regions;
  std::string out;
  bool shuffle = false;
  bool header = false;
  std::size_t cdf_grid = 100;
  std::string target = "rho";
  std::string kind = "alpha";
};

json config_echo(const Options& o) {
  json c = {{"r", o.r}, {"t", o.t}, {"epsilon", o.epsilon}, {"level", o.level}, {"seed", o.seed}};
  if (!o.input.empty()) c["input"] = o.input;
  if (!o.model.empty()) c["model"] = o.model;
  c["alpha"] = o.alpha ? json(*o.alpha) : json("plugin");
  if (o.beta) c["beta"] = number(*o.beta);
  if (!o.regions.empty()) c["regions"] = o.regions;
  return c;
}

int cmd_estimate(const Options& o) {
  DataMatrix data = read_csv_file(o.input, o.header);
  validate_data(data);
  if (o.shuffle) {
    SeededRng rng(o.seed, 0);
    data = shuffled_rows(data, rng);
  }
  PipelineConfig config;
  config.r = parse_auto(o.r, "--r");
  config.t = parse_auto(o.t, "--t");
  config.alpha = o.alpha;
  config.beta = o.beta;
  config.epsilon = o.epsilon;
  config.level = o.level;
  config.cdf_grid = o.cdf_grid;
  for (const auto& spec : o.regions) config.regions.push_back(parse_region(spec));

  const PipelineResult res = run_pipeline(data, config);

  json doc = header("estimate");
  doc["config"] = config_echo(o);
  doc["N"] = res.sample_size;
  doc["d"] = res.dim;
  doc["scheme"] = scheme_json(res.alpha_scheme);
  if (res.plan) {
    const TuningPlan& p = *res.plan;
    doc["tuning"] = {{"alpha", res.tuning_alpha}, {"beta", number(res.tuning_beta)}, {"epsilon", p.epsilon},
                     {"r_alpha", p.r_alpha}, {"r_spectral", p.r_spectral}, {"r_mass", p.r_mass},
                     {"t_default", p.t_default}, {"mass_rule_applies", p.mass_rule_applies}};
  }
  doc["alpha"] = {{"hat", number(res.alpha.alpha_hat)},
                  {"s_n", res.alpha.s_n},
                  {"kappa_var", res.alpha.kappa_var},
                  {"ci", interval_json(res.alpha_interval)},
                  {"scheme", scheme_json(res.alpha_scheme)}};

  json regions = json::array();
  for (const auto& reg : res.regions) {
    regions.push_back({{"region", reg.label}, {"count", reg.count}, {"mass", reg.mass},
                       {"ci", reg.ci ? interval_json(*reg.ci) : json(nullptr)}});
  }
  json spectral = {{"scheme", scheme_json(res.spectral_scheme)}, {"regions", regions}};
  if (!res.cdf.empty()) {
    json cdf = json::array();
    for (const auto& point : res.cdf) cdf.push_back({{"angle", point.angle}, {"value", point.value}});
    spectral["cdf"] = cdf;
  }
  if (res.rho) spectral["rho"] = *res.rho;
  doc["spectral"] = spectral;

  doc["mass"] = {{"t", res.mass.t},
                 {"alpha_used", res.mass.alpha_used},
                 {"alpha_plugin", res.mass.alpha_plugin},
                 {"hat", number(res.mass.mass_hat)},
                 {"ci", interval_json(res.mass_interval)},
                 {"scheme", scheme_json(res.mass_scheme)}};
  doc["warnings"] = res.warnings;
  emit_json(doc, o.out);
  return 0;
}

int cmd_simulate(const Options& o) {
  if (o.out.empty()) throw UsageError("simulate needs --out");
  if (o.sample_size == 0) throw UsageError("simulate needs --n > 0");
  const Scenario scenario = parse_model(o.model);
  SeededRng rng(o.seed, 0);
  const DataMatrix data = draw_sample(scenario, o.sample_size, rng);
  write_csv_file(o.out, data);
  json sidecar = header("simulate");
  sidecar["config"] = config_echo(o);
  sidecar["N"] = data.rows();
  sidecar["d"] = data.dim();
  sidecar["seed"] = o.seed;
  sidecar["output"] = o.out;
  emit_json(sidecar, o.out + ".json");
  return 0;
}

SweepTarget parse_target(const std::string& name) {
  if (name == "alpha") return SweepTarget::Alpha;
  if (name == "rho") return SweepTarget::Rho;
  if (name == "mass") return SweepTarget::Mass;
  throw UsageError("--target must be alpha, rho or mass");
}

int cmd_sweep(const Options& o) {
  if (o.sample_size == 0) throw UsageError("sweep needs --n > 0");
  const Scenario scenario = parse_model(o.model);
  const SweepTarget target = parse_target(o.target);
  std::vector<double> grid;
  if (const auto r = parse_auto(o.r, "--r")) {
    grid.push_back(*r);
  } else {
    grid = default_sweep_grid(o.sample_size, target);
  }
  const SweepResult sweep = run_r_sweep(scenario, o.sample_size, grid, o.reps, target, o.seed);

  std::ostringstream table;
  table << "one_minus_r,mean,stddev,reps\n";
  char line[128];
  for (const auto& row : sweep.rows) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%zu\n", row.one_minus_r, row.mean, row.stddev, row.reps);
    table << line;
  }
  if (o.out.empty()) {
    std::cout << table.str();
    return 0;
  }
  std::ofstream out(o.out);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + o.out + "'");
  out << table.str();
  json summary = header("sweep");
  summary["config"] = config_echo(o);
  summary["N"] = o.sample_size;
  summary["reps"] = o.reps;
  summary["target"] = o.target;
  summary["rows"] = sweep.rows.size();
  std::cout << summary.dump(2) << '\n';
  return 0;
}

EstimatorKind parse_kind(const std::string& name) {
  if (name == "alpha") return EstimatorKind::Alpha;
  if (name == "spectral") return EstimatorKind::Spectral;
  if (name == "mass") return EstimatorKind::Mass;
  throw UsageError("--kind must be alpha, spectral or mass");
}

int cmd_coverage(const Options& o) {
  if (o.sample_size == 0) throw UsageError("coverage needs --n > 0");
  const Scenario scenario = parse_model(o.model);
  CoverageConfig config;
  config.kind = parse_kind(o.kind);
  config.level = o.level;
  config.reps = o.reps;
  config.r = parse_auto(o.r, "--r");
  config.epsilon = o.epsilon;
  if (!o.regions.empty()) config.region = parse_region(o.regions.front()).region;
  const CoverageResult res = run_ci_coverage(scenario, o.sample_size, config, o.seed);
  json doc = header("coverage");
  doc["config"] = config_echo(o);
  doc["N"] = o.sample_size;
  doc["kind"] = to_string(res.kind);
  doc["level"] = res.level;
  doc["reps"] = res.reps;
  doc["hits"] = res.hits;
  doc["undefined"] = res.failures;
  doc["coverage"] = res.coverage();
  doc["truth"] = res.truth;
  doc["scheme"] = scheme_json(res.scheme);
  emit_json(doc, o.out);
  return 0;
}

int cmd_ecdf(const Options& o) {
  if (o.sample_size == 0) throw UsageError("ecdf needs --n > 0");
  const Scenario scenario = parse_model(o.model);
  const auto r = parse_auto(o.r, "--r");
  SeededRng rng(o.seed, replication_stream(ExperimentTag::Ecdf, 0));
  const EcdfComparison cmp = run_ecdf_compare(scenario, o.sample_size, r.value_or(0.5), o.cdf_grid, rng);

  std::ostringstream table;
  table << "angle,estimated,exact\n";
  char line[128];
  for (const auto& row : cmp.rows) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", row.angle, row.estimated, row.exact);
    table << line;
  }
  json summary = header("ecdf");
  summary["config"] = config_echo(o);
  summary["N"] = o.sample_size;
  summary["scheme"] = scheme_json(cmp.scheme);
  summary["grid_size"] = cmp.rows.size();
  summary["sup_distance"] = cmp.sup_distance;
  if (o.out.empty()) {
    std::cout << table.str();
    std::cerr << summary.dump(2) << '\n';
    return 0;
  }
  std::ofstream out(o.out);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + o.out + "'");
  out << table.str();
  std::cout << summary.dump(2) << '\n';
  return 0;
}

void report_error(const std::string& code, const std::string& message) {
  const json doc = {{"error", {{"code", code}, {"message", message}}}};
  std::cerr << doc.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group-maxima estimation for multivariate regularly varying data"};
  app.set_version_flag("--version", RVSPEC_VERSION);
  app.require_subcommand(1);
  Options o;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--r", o.r, "Exponent r in n = floor(N^r), or 'auto'");
    cmd->add_option("--epsilon", o.epsilon, "Safety margin subtracted from tuned r");
    cmd->add_option("--level", o.level, "Confidence level");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--out", o.out, "Output path");
  };
  const auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("--model", o.model,
                    "Preset (skewed-stable, stable-cos2, polar-atoms, polar-quadrant), inline JSON or JSON file")
        ->required();
    cmd->add_option("--n", o.sample_size, "Sample size N")->required();
  };

  auto* estimate = app.add_subcommand("estimate", "Estimate alpha, spectral measure and total mass from a CSV file");
  add_common(estimate);
  estimate->add_option("--input", o.input, "CSV file, one vector per row")->required();
  estimate->add_option("--t", o.t, "Moment order t for the mass estimator, or 'auto'");
  estimate->add_option("--alpha", o.alpha, "Known tail index (default: plug-in estimate)");
  estimate->add_option("--beta", o.beta, "Second-order index for auto tuning (default 2 alpha)");
  estimate->add_option("--region", o.regions, "arc:START:END or halfspace:u1,...,ud:c (repeatable)");
  estimate->add_option("--cdf-grid", o.cdf_grid, "Angular cdf grid size for d = 2 (0 disables)");
  estimate->add_flag("--shuffle", o.shuffle, "Shuffle rows with --seed before grouping");
  estimate->add_flag("--header", o.header, "Skip the first nonblank row");

  auto* simulate = app.add_subcommand("simulate", "Draw a sample from a model and write it as CSV");
  add_common(simulate);
  add_model(simulate);

  auto* sweep = app.add_subcommand("sweep", "Mean and spread of an estimator over a grid of r");
  add_common(sweep);
  add_model(sweep);
  sweep->add_option("--reps", o.reps, "Replications per grid point");
  sweep->add_option("--target", o.target, "alpha, rho or mass");

  auto* coverage = app.add_subcommand("coverage", "Empirical coverage of confidence intervals");
  add_common(coverage);
  add_model(coverage);
  coverage->add_option("--reps", o.reps, "Replications");
  coverage->add_option("--kind", o.kind, "alpha, spectral or mass");
  coverage->add_option("--region", o.regions, "Region for spectral coverage");

  auto* ecdf = app.add_subcommand("ecdf", "Estimated versus exact angular cdf (d = 2)");
  add_common(ecdf);
  add_model(ecdf);
  ecdf->add_option("--grid", o.cdf_grid, "Number of grid angles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*estimate) return cmd_estimate(o);
    if (*simulate) return cmd_simulate(o);
    if (*sweep) return cmd_sweep(o);
    if (*coverage) return cmd_coverage(o);
    if (*ecdf) return cmd_ecdf(o);
  } catch (const UsageError& e) {
    report_error("UsageError", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    report_error(std::string(to_string(e.code())), e.what());
    return is_data_error(e.code()) ? kExitData : kExitNumeric;
  } catch (const std::exception& e) {
    report_error("InternalError", e.what());
    return kExitNumeric;
  }
  return kExitUsage;
}
