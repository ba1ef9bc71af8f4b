#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "propp/analysis.hpp"
#include "propp/dataset_io.hpp"
#include "propp/demo_data.hpp"
#include "propp/simulation.hpp"

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(part);
  return parts;
}

double parse_double_arg(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw propp::InputError(what + ": cannot parse number '" + text + "'");
  }
}

propp::BetaParams parse_prior(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2)
    throw propp::InputError("--delta-prior expects two numbers 'a,b', got '" +
                            text + "'");
  return {parse_double_arg(parts[0], "--delta-prior"),
          parse_double_arg(parts[1], "--delta-prior")};
}

propp::WeightVariant parse_scheme(const std::string& name) {
  if (name == "ate") return propp::WeightVariant::kATE;
  if (name == "att") return propp::WeightVariant::kATTrial;
  if (name == "ate-ext") return propp::WeightVariant::kATExternal;
  throw propp::InputError("--weight-scheme must be ate|att|ate-ext, got '" +
                          name + "'");
}

std::string format_g(double x, int precision) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", precision, x);
  return buf;
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty())
    std::cout << content;
  else
    propp::write_file_atomic(out_path, content);
}

long elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               t0)
      .count();
}

struct AnalyzeArgs {
  std::string data_path;
  std::string method = "propp";
  std::string scheme = "att";
  bool cap = true;
  std::string delta_prior = "1,1";
  std::size_t samples = 10000;
  std::optional<std::uint64_t> seed;
  double ridge = 1e-4;
  double weight_floor = 0.0;
  std::string out_path;
};

int run_analyze(const AnalyzeArgs& args) {
  const auto t0 = Clock::now();
  propp::AnalysisConfig cfg;
  cfg.method = args.method;
  propp::validate_method_string(cfg.method);
  cfg.scheme.variant = parse_scheme(args.scheme);
  cfg.scheme.capped = args.cap;
  cfg.delta_prior = parse_prior(args.delta_prior);
  cfg.n_samples = args.samples;
  cfg.seed = args.seed ? *args.seed : entropy_seed();
  cfg.ridge = args.ridge;
  cfg.weight_floor = args.weight_floor;

  const propp::LoadedDataset data = propp::read_dataset(args.data_path);
  const std::string doc =
      propp::run_analysis_document(data, cfg, args.data_path);
  emit(doc, args.out_path);
  std::cerr << "analyze: method=" << cfg.method << " seed=" << cfg.seed
            << " elapsed=" << elapsed_ms(t0) << "ms\n";
  return 0;
}

struct SimulateArgs {
  std::string scenario = "drift";
  std::string setting = "equal";
  std::string grid;
  int replicates = 1000;
  std::string methods;
  std::optional<std::uint64_t> seed;
  std::size_t samples = 10000;
  int superfluous = 1;
  std::string out_path;
};

int run_simulate(const SimulateArgs& args) {
  const auto t0 = Clock::now();
  propp::ScenarioConfig cfg = propp::make_scenario_config(
      propp::parse_scenario(args.scenario), propp::parse_setting(args.setting),
      args.superfluous);
  if (args.replicates < 1)
    throw propp::InputError("--replicates must be positive");
  cfg.replicates = args.replicates;
  cfg.seed = args.seed ? *args.seed : entropy_seed();
  cfg.n_posterior_samples = args.samples;
  if (!args.methods.empty()) {
    cfg.methods.clear();
    for (const auto& name : split(args.methods, ','))
      cfg.methods.push_back(propp::parse_sim_method(name));
  }

  std::vector<double> grid;
  if (args.grid.empty()) {
    for (int i = -4; i <= 4; ++i) grid.push_back(i * 0.125);
  } else {
    for (const auto& part : split(args.grid, ','))
      grid.push_back(parse_double_arg(part, "--grid"));
  }

  const std::vector<propp::MetricsRow> rows = propp::run_grid(cfg, grid);

  std::ostringstream out;
  out << "# propp simulate scenario=" << args.scenario
      << " setting=" << args.setting << " seed=" << cfg.seed
      << " replicates=" << cfg.replicates
      << " samples=" << cfg.n_posterior_samples << "\n";
  out << "method,grid_value,true_rate,rmse,type1,failures,replicates\n";
  for (const auto& row : rows)
    out << propp::to_string(row.method) << ',' << format_g(row.grid_value, 17)
        << ',' << format_g(row.true_rate, 10) << ',' << format_g(row.rmse, 10)
        << ',' << format_g(row.type1, 10) << ',' << row.failures << ','
        << row.replicates << '\n';
  emit(out.str(), args.out_path);
  std::cerr << "simulate: " << rows.size() << " rows seed=" << cfg.seed
            << " elapsed=" << elapsed_ms(t0) << "ms\n";
  return 0;
}

struct DemoArgs {
  std::optional<std::uint64_t> seed;
  std::string out_path = "demo.csv";
};

int run_demo(const DemoArgs& args) {
  const std::uint64_t seed = args.seed ? *args.seed : entropy_seed();
  const propp::DemoCohort demo = propp::generate_demo_data(seed);

  std::ostringstream out;
  out << "# propp demo-data seed=" << seed << "\n";
  propp::write_csv(demo.table, out);
  emit(out.str(), args.out_path);
  std::cerr << "demo-data: " << demo.loaded.dataset.n_trial() << " trial + "
            << demo.loaded.dataset.n_external()
            << " external patients, seed=" << seed << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "propensity-weighted power-prior borrowing for single-arm trials"};
  app.set_version_flag("--version", "propp 0.1.0");
  app.require_subcommand(1);

  AnalyzeArgs a;
  CLI::App* analyze =
      app.add_subcommand("analyze", "fit a borrowing method to a CSV cohort");
  analyze->add_option("--data", a.data_path, "cohort CSV file")->required();
  analyze->add_option("--method", a.method,
                      "ignore|pool|mpp|propp|fixed:<delta>|wang:<fraction>");
  analyze->add_option("--weight-scheme", a.scheme, "ate|att|ate-ext");
  analyze->add_flag("--cap,!--no-cap", a.cap, "cap external weights at 1");
  analyze->add_option("--delta-prior", a.delta_prior,
                      "Beta prior on delta, as 'a,b'");
  analyze->add_option("--samples", a.samples, "posterior draws");
  analyze->add_option("--seed", a.seed, "RNG seed (default: entropy)");
  analyze->add_option("--ridge", a.ridge, "propensity ridge penalty");
  analyze->add_option("--weight-floor", a.weight_floor,
                      "zero external weights below this");
  analyze->add_option("--out", a.out_path, "output path (default: stdout)");

  SimulateArgs s;
  CLI::App* simulate =
      app.add_subcommand("simulate", "operating-characteristics study");
  simulate->add_option("--scenario", s.scenario,
                       "drift|mixture|nomixture|superfluous");
  simulate->add_option("--setting", s.setting,
                       "equal|large-external|large-trial|many-covariates");
  simulate->add_option("--grid", s.grid,
                       "comma-separated grid values (default -0.5..0.5)");
  simulate->add_option("--replicates", s.replicates, "replicates per point");
  simulate->add_option("--methods", s.methods,
                       "comma-separated subset of "
                       "ignore,pool,mpp,propp,wang10,wang20");
  simulate->add_option("--seed", s.seed, "RNG seed (default: entropy)");
  simulate->add_option("--samples", s.samples, "posterior draws per fit");
  simulate->add_option("--superfluous", s.superfluous,
                       "covariate effects zeroed in the superfluous scenario");
  simulate->add_option("--out", s.out_path, "output path (default: stdout)");

  DemoArgs d;
  CLI::App* demo =
      app.add_subcommand("demo-data", "write the synthetic melanoma cohort");
  demo->add_option("--seed", d.seed, "RNG seed (default: entropy)");
  demo->add_option("--out", d.out_path, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*analyze) return run_analyze(a);
    if (*simulate) return run_simulate(s);
    if (*demo) return run_demo(d);
  } catch (const propp::MethodFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const propp::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
