// fdne: neural estimation of f-divergences with parameter-bounded shallow
// networks, exact ground truths, tail-bound constants, and sweep harness.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdne/bounds.hpp"
#include "fdne/errors.hpp"
#include "fdne/experiments.hpp"
#include "fdne/training.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct SweepOptions {
  std::string config_path;
  std::string out_path;
  std::string summary_path;
  bool resume = false;
  int threads = 0;
};

int run_sweep(const SweepOptions& opts, fdne::SweepSpec::Axis axis) {
  fdne::ExperimentConfig config = fdne::load_config(opts.config_path);
  if (config.sweep.axis != axis) {
    throw fdne::ConfigError(axis == fdne::SweepSpec::Axis::Ns
                                ? "sweep-n needs a config with sweep.ns"
                                : "sweep-k needs a config with sweep.ks");
  }
  std::vector<fdne::RunRecord> done;
  if (opts.resume && std::filesystem::exists(opts.out_path)) {
    done = fdne::parse_csv_records(opts.out_path);
    std::cerr << "resuming: " << done.size() << " records already present\n";
  }
  const auto records = fdne::run_experiment(config, opts.threads, done);
  fdne::emit_csv_records(records, opts.out_path);
  if (!opts.summary_path.empty()) {
    fdne::emit_csv_summaries(fdne::aggregate(records), opts.summary_path);
  }
  int failed = 0;
  for (const auto& r : records) {
    if (r.failed()) ++failed;
  }
  std::cerr << records.size() << " records -> " << opts.out_path;
  if (failed > 0) std::cerr << " (" << failed << " failed)";
  std::cerr << "\n";
  return failed > 0 ? kExitRuntime : kExitOk;
}

int run_estimate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& out_path) {
  fdne::ExperimentConfig config = fdne::load_config(config_path);
  std::int64_t n = 0;
  int k = 0;
  fdne::NetworkClassSpec class_spec;
  if (config.sweep.axis == fdne::SweepSpec::Axis::Ns) {
    n = config.sweep.ns.front();
    const auto s = fdne::schedule(config.kind, n, config.schedule_mode);
    k = s.k;
    class_spec = config.kind == fdne::DivergenceKind::SqHellinger
                     ? fdne::NetworkClassSpec::truncated_star(s.m_k, *s.t_k)
                     : fdne::NetworkClassSpec::star(s.m_k);
  } else {
    n = config.sweep.fixed_n;
    k = config.sweep.ks.front();
    const double m = 0.5 * std::log(static_cast<double>(k));
    class_spec = config.kind == fdne::DivergenceKind::SqHellinger
                     ? fdne::NetworkClassSpec::truncated_star(
                           m, 1.0 / std::log(static_cast<double>(k)))
                     : fdne::NetworkClassSpec::star(m);
  }

  fdne::TrainConfig tc;
  tc.kind = config.kind;
  tc.class_spec = class_spec;
  tc.k = k;
  tc.n = static_cast<int>(n);
  tc.epochs = config.epochs;
  tc.batch_size = std::max(
      1, static_cast<int>(std::lround(static_cast<double>(n) * config.batch_rule)));
  tc.lr_initial = config.lr_initial;
  tc.lr_late = config.lr_late;
  tc.lr_switch_epoch = config.lr_switch_epoch;
  tc.seed = seed.value_or(config.master_seed);
  const auto result = fdne::train(tc, *config.pair);
  const std::string json = fdne::train_result_to_json(result);
  if (out_path.empty()) {
    std::cout << json << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw fdne::ConfigError("cannot open '" + out_path + "' for writing");
    out << json << "\n";
  }
  return kExitOk;
}

int run_ground_truth(const std::string& config_path) {
  fdne::ExperimentConfig config = fdne::load_config(config_path);
  const auto report = fdne::ground_truth(config.kind, *config.pair);
  std::printf("{\"kind\": \"%s\", \"value\": %.17g, \"quadrature_tol\": %g}\n",
              std::string(fdne::to_string(report.kind)).c_str(), report.value,
              report.quadrature_tol);
  return kExitOk;
}

int run_bounds(const std::string& kind_str, const std::vector<int>& ks,
               const std::vector<std::int64_t>& ns, double a1, double a2, double a3,
               std::optional<double> t, double C, const std::string& format) {
  const auto kind = fdne::divergence_from_string(kind_str);
  fdne::ParamBounds bounds(a1, a2, a3, t);
  const bool csv = format == "csv";
  if (csv) {
    std::printf("kind,k,n,a1,a2,a3,t,C,gamma_prime_sup,R,V,E,tail_0.1\n");
  } else {
    std::printf("%-9s %6s %10s %12s %12s %12s %12s %12s\n", "kind", "k", "n",
                "gamma'_sup", "R", "V", "E", "tail(0.1)");
  }
  for (const int k : ks) {
    for (const std::int64_t n : ns) {
      const auto report = fdne::estimation_constants({kind, k, bounds, n, C});
      if (csv) {
        std::printf("%s,%d,%lld,%g,%g,%g,%s,%g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    kind_str.c_str(), k, static_cast<long long>(n), a1, a2, a3,
                    t ? std::to_string(*t).c_str() : "", C, report.gamma_prime_sup_value,
                    report.R, report.V, report.E, report.tail(0.1));
      } else {
        std::printf("%-9s %6d %10lld %12.5g %12.5g %12.5g %12.5g %12.5g\n", kind_str.c_str(),
                    k, static_cast<long long>(n), report.gamma_prime_sup_value, report.R,
                    report.V, report.E, report.tail(0.1));
      }
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural estimation of KL / chi-squared / squared Hellinger divergences"};
  app.require_subcommand(1);

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Train one estimator, print TrainResult JSON");
  std::string est_config, est_out;
  std::optional<std::uint64_t> est_seed;
  estimate->add_option("--config", est_config, "experiment config JSON")->required();
  estimate->add_option("--seed", est_seed, "override the master seed");
  estimate->add_option("--out", est_out, "write JSON here instead of stdout");

  // sweep-n / sweep-k
  SweepOptions sn, sk;
  auto* sweep_n = app.add_subcommand("sweep-n", "Estimate across the config's n grid");
  sweep_n->add_option("--config", sn.config_path, "experiment config JSON")->required();
  sweep_n->add_option("--out", sn.out_path, "records CSV path")->required();
  sweep_n->add_option("--summary", sn.summary_path, "also write per-point summary CSV + plot script");
  sweep_n->add_option("--threads", sn.threads, "worker threads (default: hardware)");
  sweep_n->add_flag("--resume", sn.resume, "skip records already present in the output CSV");

  auto* sweep_k = app.add_subcommand("sweep-k", "Estimate across the config's k grid at fixed n");
  sweep_k->add_option("--config", sk.config_path, "experiment config JSON")->required();
  sweep_k->add_option("--out", sk.out_path, "records CSV path")->required();
  sweep_k->add_option("--summary", sk.summary_path, "also write per-point summary CSV + plot script");
  sweep_k->add_option("--threads", sk.threads, "worker threads (default: hardware)");

  // ground-truth
  auto* gt = app.add_subcommand("ground-truth", "Print the exact divergence for the config's pair");
  std::string gt_config;
  gt->add_option("--config", gt_config, "experiment config JSON")->required();

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "Estimation-error constants over a (k, n) grid");
  std::string bounds_kind, bounds_format = "text";
  std::vector<int> bounds_ks;
  std::vector<std::int64_t> bounds_ns;
  double a1 = 1.0, a2 = 1.0, a3 = 1.0, C = 1.0;
  std::optional<double> t;
  bounds_cmd->add_option("--kind", bounds_kind, "kl | chisq | hellinger")->required();
  bounds_cmd->add_option("--k", bounds_ks, "neuron counts")->required();
  bounds_cmd->add_option("--n", bounds_ns, "sample counts")->required();
  bounds_cmd->add_option("--a1", a1, "bound on |W_ij|, |b_i| (default 1)");
  bounds_cmd->add_option("--a2", a2, "bound on |beta_i| (default 1)");
  bounds_cmd->add_option("--a3", a3, "bound on |b0| (default 1)");
  bounds_cmd->add_option("--t", t, "Hellinger truncation level");
  bounds_cmd->add_option("--C", C, "universal constant scale (default 1)");
  bounds_cmd->add_option("--format", bounds_format, "text | csv")
      ->check(CLI::IsMember({"text", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (estimate->parsed()) return run_estimate(est_config, est_seed, est_out);
    if (sweep_n->parsed()) return run_sweep(sn, fdne::SweepSpec::Axis::Ns);
    if (sweep_k->parsed()) return run_sweep(sk, fdne::SweepSpec::Axis::Ks);
    if (gt->parsed()) return run_ground_truth(gt_config);
    if (bounds_cmd->parsed()) {
      return run_bounds(bounds_kind, bounds_ks, bounds_ns, a1, a2, a3, t, C, bounds_format);
    }
  } catch (const fdne::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
