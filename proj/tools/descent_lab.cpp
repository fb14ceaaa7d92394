// descent-lab: reproduces minimum-norm regression double-descent experiments.
//
//   descent-lab run --case A --seed 42 --out results/
//   descent-lab run --config my.cfg --lambda 1e-3
//   descent-lab spectrum --family linear --N 10 --nmax 30 --out results/
//   descent-lab interlace --trials 500 --seed 7

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "descent/experiment.hpp"
#include "descent/report.hpp"
#include "descent/rng.hpp"
#include "descent/spectrum.hpp"

namespace fs = std::filesystem;
using namespace descent;

namespace {

constexpr const char* kVersion = "0.3.0";
constexpr std::uint64_t kDefaultSeed = 1;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("DESCENT_LAB_SEED");
  if (!raw || !*raw) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(raw, &used);
    if (used != std::string(raw).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("DESCENT_LAB_SEED is not an unsigned integer: '") +
                                raw + "'");
  }
}

struct RunOptions {
  std::optional<std::string> case_id;
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  std::optional<double> lambda;
  std::optional<double> epsilon;
  std::optional<std::string> alpha_mode;
  std::string out = ".";
};

int do_run(const RunOptions& opt) {
  ExperimentConfig cfg;
  std::set<std::string> from_file;
  if (opt.config_path) {
    cfg = parse_config(read_text_file(*opt.config_path), &from_file);
  } else {
    cfg = preset(opt.case_id.value_or("A"));
  }

  if (opt.seed) {
    cfg.base_seed = *opt.seed;
  } else if (!from_file.contains("base_seed")) {
    cfg.base_seed = env_seed().value_or(kDefaultSeed);
  }
  if (opt.replicates) cfg.replicates = *opt.replicates;
  if (opt.lambda) cfg.estimator = Estimator::ridge(*opt.lambda);
  if (opt.epsilon) cfg.epsilon = *opt.epsilon;
  if (opt.alpha_mode) {
    if (*opt.alpha_mode == "fixed_per_case") cfg.alpha_mode = AlphaMode::fixed_per_case;
    else cfg.alpha_mode = AlphaMode::resample_per_replicate;
  }
  validate(cfg);

  const fs::path out_dir(opt.out);
  fs::create_directories(out_dir);
  const std::string stem = "case" + cfg.case_id;

  const auto result = run_case(cfg);

  RunManifest manifest{cfg, kVersion, utc_timestamp(), {}};
  auto emit = [&](const std::string& name, const std::string& contents) {
    write_text_file(out_dir / name, contents);
    manifest.outputs.push_back(name);
  };
  emit(stem + ".csv", case_csv(result));
  emit(stem + "_diagnostics.csv", diagnostics_csv(result));
  emit(stem + "_linear.svg", nmse_svg(result, OrderingKind::linear));
  emit(stem + "_optimal.svg", nmse_svg(result, OrderingKind::optimal));
  const std::string manifest_name = stem + "_manifest.txt";
  manifest.outputs.push_back(manifest_name);
  write_text_file(out_dir / manifest_name, manifest_text(manifest));

  for (const FamilyCurve* curve : {&result.linear, &result.optimal}) {
    const auto profile = double_descent_profile(*curve);
    std::cout << "case " << cfg.case_id << ", " << to_string(curve->family) << " ordering: ";
    if (profile.peak_order) {
      std::cout << "noisy NMSE peak at n=" << *profile.peak_order << " ("
                << format_double(profile.peak_value) << "), NMSE(n_max)="
                << format_double(profile.final_value) << '\n';
    } else {
      std::cout << "no peak (flat curve)\n";
    }
    for (const auto& o : curve->orders) {
      if (o.failure) std::cerr << "  warning: order " << o.order << " failed: " << *o.failure << '\n';
    }
  }
  std::cout << "wrote " << manifest.outputs.size() << " files to " << out_dir.string() << '\n';
  return 0;
}

int do_spectrum(const std::string& family, std::size_t N, std::size_t n_max,
                const std::string& out) {
  if (N < 1 || n_max < N) throw std::invalid_argument("spectrum: need 1 <= N <= nmax");
  const auto kind = family == "linear" ? OrderingKind::linear : OrderingKind::optimal;
  const auto builder = kind == OrderingKind::linear ? linear_family(n_max) : optimal_family(N, n_max);
  const auto sweep = sweep_spectrum(builder, sample_times(N), n_max);

  const fs::path out_dir(out);
  fs::create_directories(out_dir);
  const std::string stem = "spectrum_" + family;
  write_text_file(out_dir / (stem + ".csv"), spectrum_csv(sweep, kind));
  write_text_file(out_dir / (stem + ".svg"), spectrum_svg(sweep, kind, N));

  const auto mono = check_sigma_min_monotonicity(sweep, N);
  std::cout << family << " ordering, N=" << N << ", n_max=" << n_max
            << ": 1/sigma_min peaks at n=" << sweep.peak_order() << "; monotonicity "
            << (mono.holds ? "holds" : "violated: " + mono.detail) << '\n';
  return 0;
}

int do_interlace(std::size_t trials, std::uint64_t seed, std::size_t max_rows,
                 std::size_t max_cols, const std::optional<std::string>& out) {
  if (max_rows < 1 || max_cols < 1) throw std::invalid_argument("interlace: dimensions must be >= 1");
  std::size_t failures = 0;
  std::ostringstream report;
  report << "trial,rows,cols,regime,violation,larger,smaller\n";
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(derive_stream_seed(seed, stream_tag("interlace"), trial));
    const std::size_t rows = 1 + rng.next_u64() % max_rows;
    const std::size_t cols = 1 + rng.next_u64() % max_cols;
    ComplexMatrix phi(rows, cols);
    for (std::size_t j = 0; j < cols; ++j)
      for (std::size_t i = 0; i < rows; ++i) phi(i, j) = rng.circular_gaussian(1.0);
    ComplexVector col(rows);
    for (auto& z : col) z = rng.circular_gaussian(1.0);

    const auto verdict = verify_interlacing(phi, col);
    if (auto bad = verdict.first_violation()) {
      ++failures;
      report << trial << ',' << rows << ',' << cols << ','
             << (verdict.underparametrized ? "n<N" : "n>=N") << ',' << bad->larger << ">="
             << bad->smaller << ',' << format_double(bad->larger_value) << ','
             << format_double(bad->smaller_value) << '\n';
    }
  }
  if (out) {
    fs::create_directories(fs::path(*out).parent_path().empty() ? fs::path(".")
                                                                 : fs::path(*out).parent_path());
    write_text_file(*out, report.str());
  }
  std::cout << "interlacing: " << trials - failures << "/" << trials << " trials passed\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"descent-lab: minimum-norm regression and double descent experiments"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run a Monte-Carlo case (A-D or a config file)");
  auto* case_opt = run_cmd->add_option("--case", run.case_id, "Preset case id")
                       ->check(CLI::IsMember({"A", "B", "C", "D"}));
  run_cmd->add_option("--config", run.config_path, "key=value config file")
      ->check(CLI::ExistingFile)
      ->excludes(case_opt);
  run_cmd->add_option("--seed", run.seed, "Base seed (fallback: DESCENT_LAB_SEED)");
  run_cmd->add_option("--replicates", run.replicates, "Noisy replicates per case")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--lambda", run.lambda, "Use ridge regression with this lambda")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--epsilon", run.epsilon, "Test grid offset");
  run_cmd->add_option("--alpha-mode", run.alpha_mode, "fixed_per_case or resample_per_replicate")
      ->check(CLI::IsMember({"fixed_per_case", "resample_per_replicate"}));
  run_cmd->add_option("--out", run.out, "Output directory");

  std::string family = "linear";
  std::size_t N = 10;
  std::size_t n_max = 30;
  std::string spectrum_out = ".";
  auto* spec_cmd = app.add_subcommand("spectrum", "Sweep 1/sigma_min over model orders");
  spec_cmd->add_option("--family", family)->check(CLI::IsMember({"linear", "optimal"}));
  spec_cmd->add_option("--N", N, "Number of training samples");
  spec_cmd->add_option("--nmax", n_max, "Largest model order");
  spec_cmd->add_option("--out", spectrum_out, "Output directory");

  std::size_t trials = 500;
  std::uint64_t interlace_seed = 0;
  std::size_t max_rows = 20;
  std::size_t max_cols = 30;
  std::optional<std::string> interlace_out;
  auto* il_cmd = app.add_subcommand("interlace", "Randomized singular value interlacing check");
  il_cmd->add_option("--trials", trials);
  auto* il_seed = il_cmd->add_option("--seed", interlace_seed);
  il_cmd->add_option("--max-rows", max_rows);
  il_cmd->add_option("--max-cols", max_cols);
  il_cmd->add_option("--out", interlace_out, "CSV file listing failing trials");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return do_run(run);
    if (spec_cmd->parsed()) return do_spectrum(family, N, n_max, spectrum_out);
    if (il_cmd->parsed()) {
      if (il_seed->count() == 0) interlace_seed = env_seed().value_or(kDefaultSeed);
      return do_interlace(trials, interlace_seed, max_rows, max_cols, interlace_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "descent-lab: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
