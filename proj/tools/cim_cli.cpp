// cim: train policies, run experiment matrices, sweeps, timing and reports.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "cim/config.hpp"
#include "cim/experiment.hpp"
#include "cim/report.hpp"

namespace fs = std::filesystem;
using namespace cim;

namespace {

struct Common {
  std::string spec_file;
  std::string dataset;
  std::string schemes, models, opponents;
  std::size_t runs = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string policy_dir;
  std::size_t updates = 0;
  bool no_auto_train = false;
  bool quiet = false;
  int threads = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--spec", c.spec_file, "Experiment config file (INI)");
  app->add_option("--dataset", c.dataset, "Edge list (.edges/.txt, or .mtx)");
  app->add_option("--schemes", c.schemes, "Comma list of drim-a, drim-na, storm, cstorm");
  app->add_option("--models", c.models, "Comma list of uom, hom, nom");
  app->add_option("--opponents", c.opponents, "Comma list of af, bf, sgf, cf, random, drl");
  app->add_option("--runs", c.runs, "Evaluation episodes per cell");
  app->add_option("--seed", c.seed, "Master seed")->each([&c](const std::string&) { c.seed_set = true; });
  app->add_option("--policy-dir", c.policy_dir, "Where trained policies are cached");
  app->add_option("--updates", c.updates, "PPO updates per training run");
  app->add_flag("--no-auto-train", c.no_auto_train, "Fail instead of training missing policies");
  app->add_flag("-q,--quiet", c.quiet, "No progress output");
  app->add_option("--threads", c.threads, "Worker threads (same as CIM_THREADS)");
}

ExperimentSpec build_spec(const Common& c) {
  ExperimentSpec spec;
  if (!c.spec_file.empty()) spec = load_spec(c.spec_file, spec);
  if (!c.dataset.empty()) spec.dataset = c.dataset;
  if (!c.schemes.empty()) {
    spec.schemes.clear();
    for (const auto& s : split_list(c.schemes)) spec.schemes.push_back(parse_scheme(s));
  }
  if (!c.models.empty()) {
    spec.models.clear();
    for (const auto& s : split_list(c.models)) spec.models.push_back(parse_trust_kind(s));
  }
  if (!c.opponents.empty()) {
    spec.opponents.clear();
    for (const auto& s : split_list(c.opponents)) spec.opponents.push_back(parse_opponent(s));
  }
  if (c.runs > 0) spec.runs = c.runs;
  if (c.seed_set) spec.master_seed = c.seed;
  if (!c.policy_dir.empty()) spec.training.policy_dir = c.policy_dir;
  if (c.updates > 0) spec.training.ppo.updates = c.updates;
  if (c.no_auto_train) spec.training.auto_train = false;
  if (!c.quiet) spec.training.log = &std::cerr;
  if (c.threads > 0) setenv("CIM_THREADS", std::to_string(c.threads).c_str(), 1);
  return spec;
}

void print_rows(const std::vector<ResultRow>& rows) {
  write_results_csv(std::cout, rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Competitive influence simulator on subjective-logic opinions"};
  app.require_subcommand(1);

  // train
  Common train_c;
  std::string train_scheme = "drim-a", train_opp = "cf", train_model = "uom", train_out = "policy.bin";
  std::string train_role = "tp";
  auto* train = app.add_subcommand("train", "Train a policy and write its parameter file");
  add_common(train, train_c);
  train->add_option("--scheme", train_scheme, "drim-a, drim-na, storm or cstorm");
  train->add_option("--opponent", train_opp, "False-party strategy, or drl for the self-play policy");
  train->add_option("--model", train_model, "Opinion model: uom, hom or nom");
  train->add_option("--role", train_role, "tp, or fp for the self-play false party")
      ->check(CLI::IsMember({"tp", "fp"}));
  train->add_option("--out", train_out, "Output parameter file");

  // eval
  Common eval_c;
  std::string eval_out;
  auto* eval = app.add_subcommand("eval", "Run the experiment matrix of a spec");
  add_common(eval, eval_c);
  eval->add_option("--out", eval_out, "Output directory");

  // sweep
  Common sweep_c;
  std::string sweep_axis = "ip", sweep_range, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Sweep ip, p_nv or prior_a");
  add_common(sweep, sweep_c);
  sweep->add_option("--axis", sweep_axis, "ip, p_nv or prior_a");
  sweep->add_option("--range", sweep_range, "a:b or a:b:step; default grid of the axis if omitted");
  sweep->add_option("--out", sweep_out, "Output directory");

  // bench
  Common bench_c;
  std::size_t bench_episodes = 20;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "Time evaluation episodes per scheme");
  add_common(bench, bench_c);
  bench->add_option("--episodes", bench_episodes, "Timed episodes per scheme (one extra warm-up)");
  bench->add_option("--out", bench_out, "Write bench CSV here (stdout otherwise)");

  // report
  std::string rep_layout = "table1", rep_results = "results", rep_out, rep_metric = "n_true", rep_fp = "drl",
              rep_range;
  auto* report = app.add_subcommand("report", "Lay out results.csv (or bench.csv) as a table or figure CSV");
  report->add_option("--layout", rep_layout, "table1, fig2, fig3a, fig3b, fig3c or table2");
  report->add_option("--results", rep_results, "Results directory or CSV file");
  report->add_option("--metric", rep_metric, "n_true or decided_true");
  report->add_option("--fp", rep_fp, "False party for fig3 layouts");
  report->add_option("--range", rep_range, "Grid for fig3 layouts as a:b[:step]");
  report->add_option("--out", rep_out, "Output file (stdout otherwise)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      ExperimentSpec spec = build_spec(train_c);
      const Scheme scheme = parse_scheme(train_scheme);
      const TrustKind model = parse_trust_kind(train_model);
      const Opponent fp = parse_opponent(train_opp);
      PolicyStore store(load_dataset(spec.dataset), spec.env, spec.training, spec.master_seed);
      const fs::path src = train_role == "fp" ? store.fp_path(model) : store.tp_path(scheme, model, fp);
      if (train_role == "fp") store.fp_policy(model);
      else store.tp_policy(scheme, model, fp);
      const fs::path out(train_out);
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      if (fs::absolute(src) != fs::absolute(out)) fs::copy_file(src, out, fs::copy_options::overwrite_existing);
      std::cout << out.string() << '\n';
    } else if (*eval) {
      ExperimentSpec spec = build_spec(eval_c);
      if (!eval_out.empty()) spec.out_dir = eval_out;
      print_rows(run_experiment(spec).rows);
    } else if (*sweep) {
      ExperimentSpec spec = build_spec(sweep_c);
      spec.axis = parse_sweep_axis(sweep_axis);
      spec.grid = sweep_range.empty() ? default_grid(spec.axis) : parse_range(sweep_range);
      if (!sweep_out.empty()) spec.out_dir = sweep_out;
      print_rows(run_experiment(spec).rows);
    } else if (*bench) {
      ExperimentSpec spec = build_spec(bench_c);
      if (bench_c.schemes.empty() && bench_c.spec_file.empty()) {
        spec.schemes = {Scheme::DrimA, Scheme::DrimNA, Scheme::CStorm, Scheme::Storm};
      }
      const auto rows = bench_runtime(spec, bench_episodes);
      if (bench_out.empty()) {
        write_bench_csv(std::cout, rows);
      } else {
        std::ofstream out(bench_out);
        write_bench_csv(out, rows);
      }
    } else if (*report) {
      const Layout layout = parse_layout(rep_layout);
      fs::path in = rep_results;
      if (fs::is_directory(in)) in /= layout == Layout::Table2 ? "bench.csv" : "results.csv";
      std::ifstream file(in);
      if (!file) throw std::runtime_error("cannot read " + in.string());
      std::ofstream out_file;
      if (!rep_out.empty()) out_file.open(rep_out);
      std::ostream& out = rep_out.empty() ? std::cout : out_file;
      if (layout == Layout::Table2) {
        emit_bench_report(out, read_bench_csv(file));
      } else {
        ReportOptions opts;
        opts.metric = parse_metric(rep_metric);
        opts.fp = parse_opponent(rep_fp);
        if (!rep_range.empty()) opts.grid = parse_range(rep_range);
        emit_report(out, layout, read_results_csv(file), opts);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
