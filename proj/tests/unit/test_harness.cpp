#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "cim/config.hpp"
#include "cim/experiment.hpp"
#include "cim/report.hpp"

using namespace cim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cim_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentSpec tiny_spec(const fs::path& dir) {
  ExperimentSpec spec;
  spec.dataset = std::string(CIM_DATA_DIR) + "/email_surrogate.edges";
  spec.schemes = {Scheme::DrimNA, Scheme::Storm};
  spec.opponents = {parse_opponent("cf"), parse_opponent("random")};
  spec.runs = 3;
  spec.env.rounds = 6;
  spec.out_dir = dir / "out";
  spec.training.policy_dir = dir / "policies";
  spec.training.ppo.updates = 1;
  spec.training.ppo.episodes_per_update = 2;
  spec.training.ppo.epochs = 2;
  return spec;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Drops the last CSV column (timing) from every line.
std::string without_timing(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

ResultRow row(Scheme s, TrustKind m, Opponent o, SweepAxis axis = SweepAxis::None, double v = 0.0) {
  ResultRow r;
  r.at = {s, m, o, axis, v};
  r.runs = 1;
  r.mean_n_true = 100.0 * static_cast<double>(s) + static_cast<double>(m) + v;
  r.mean_decided_true = r.mean_n_true / 2;
  r.mean_seconds = 0.1;
  return r;
}

}  // namespace

TEST_CASE("names round trip") {
  for (const Opponent& o : all_opponents()) CHECK(parse_opponent(to_string(o)) == o);
  CHECK(to_string(all_opponents().back()) == "drl");
  for (SweepAxis a : {SweepAxis::None, SweepAxis::Ip, SweepAxis::Pnv, SweepAxis::Prior}) {
    CHECK(parse_sweep_axis(to_string(a)) == a);
  }
  CHECK_THROWS_AS(parse_opponent("greedy"), std::invalid_argument);
  CHECK_THROWS_AS(parse_layout("table3"), std::invalid_argument);
  CHECK(default_grid(SweepAxis::Pnv) == std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0});
  CHECK(default_grid(SweepAxis::Prior) == std::vector<double>{0.1, 0.3, 0.5, 0.7, 0.9});
}

TEST_CASE("run seeds depend on every coordinate and the run index") {
  const Coordinate base{Scheme::DrimA, TrustKind::Uom, parse_opponent("cf"), SweepAxis::Ip, 2.0};
  std::set<std::uint64_t> seen;
  seen.insert(run_seed(1, base, 0));
  seen.insert(run_seed(1, base, 1));
  seen.insert(run_seed(2, base, 0));
  auto c = base;
  c.scheme = Scheme::Storm;
  seen.insert(run_seed(1, c, 0));
  c = base;
  c.model = TrustKind::Hom;
  seen.insert(run_seed(1, c, 0));
  c = base;
  c.fp = parse_opponent("drl");
  seen.insert(run_seed(1, c, 0));
  c = base;
  c.value = 3.0;
  seen.insert(run_seed(1, c, 0));
  CHECK(seen.size() == 7);
  CHECK(run_seed(1, base, 0) == run_seed(1, base, 0));
}

TEST_CASE("cell environment applies the model and sweep value") {
  EpisodeConfig base;
  CHECK(cell_env(base, {Scheme::DrimA, TrustKind::Nom, {}, SweepAxis::Ip, 4}).tp_waves == 4);
  CHECK(cell_env(base, {Scheme::DrimA, TrustKind::Nom, {}, SweepAxis::Ip, 4}).model.kind == TrustKind::Nom);
  CHECK(cell_env(base, {Scheme::DrimA, TrustKind::Uom, {}, SweepAxis::Pnv, 0.4}).p_nv == 0.4);
  CHECK(cell_env(base, {Scheme::DrimA, TrustKind::Uom, {}, SweepAxis::Prior, 0.7}).population.prior_a == 0.7);
  const auto same = cell_env(base, {Scheme::DrimA, TrustKind::Uom, {}, SweepAxis::None, 0});
  CHECK(same.tp_waves == base.tp_waves);
  CHECK(same.p_nv == base.p_nv);
}

TEST_CASE("aggregation matches the arithmetic mean of the raw runs") {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<std::size_t> count(0, 1133);
  std::vector<RunRecord> runs;
  std::map<Coordinate, std::vector<double>> raw;
  for (int cell = 0; cell < 6; ++cell) {
    const Coordinate at{static_cast<Scheme>(cell % 4), static_cast<TrustKind>(cell % 3), all_opponents()[cell]};
    for (std::size_t r = 0; r < 1 + static_cast<std::size_t>(cell); ++r) {
      RunRecord rec;
      rec.at = at;
      rec.run = r;
      rec.n_true = count(gen);
      rec.n_false = 1133 - rec.n_true;
      rec.decided_true = rec.n_true / 2;
      rec.seconds = 0.01;
      runs.push_back(rec);
      raw[at].push_back(static_cast<double>(rec.n_true));
    }
  }
  const auto rows = aggregate(runs);
  REQUIRE(rows.size() == raw.size());
  for (const ResultRow& r : rows) {
    const auto& xs = raw.at(r.at);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    CHECK(r.runs == xs.size());
    CHECK(r.mean_n_true == doctest::Approx(mean).epsilon(1e-12));
    CHECK(r.mean_n_true + r.mean_n_false == doctest::Approx(1133.0));
    CHECK(r.std_n_true >= 0.0);
    if (xs.size() == 1) CHECK(r.std_n_true == 0.0);
    else CHECK(r.std_n_true == doctest::Approx(std::sqrt(ss / static_cast<double>(xs.size() - 1))));
  }
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].at < rows[i].at);
}

TEST_CASE("results CSV round trip") {
  std::vector<ResultRow> rows{row(Scheme::DrimA, TrustKind::Uom, parse_opponent("drl")),
                              row(Scheme::CStorm, TrustKind::Hom, parse_opponent("sgf"), SweepAxis::Prior, 0.3)};
  std::stringstream s;
  write_results_csv(s, rows);
  const auto back = read_results_csv(s);
  REQUIRE(back.size() == 2);
  CHECK(back[1].at == rows[1].at);
  CHECK(back[1].mean_n_true == doctest::Approx(rows[1].mean_n_true));
  std::istringstream bad("nonsense\n");
  CHECK_THROWS_AS(read_results_csv(bad), std::runtime_error);
}

TEST_CASE("experiment runs are reproducible and aggregate the raw logs") {
  const fs::path dir = scratch("repro");
  ExperimentSpec spec = tiny_spec(dir);
  const ExperimentResult first = run_experiment(spec);
  CHECK(first.rows.size() == 4);
  CHECK(first.runs.size() == 12);
  for (const ResultRow& r : first.rows) {
    CHECK(r.runs == 3);
    CHECK(r.mean_seconds > 0.0);
  }
  const std::string results = slurp(spec.out_dir / "results.csv");
  const std::string runs = slurp(spec.out_dir / "runs.csv");
  const std::string logs = slurp(spec.out_dir / "round_logs.csv");
  CHECK(std::count(logs.begin(), logs.end(), '\n') == 1 + 12 * 12);

  // Second pass loads cached policies and must reproduce every CSV.
  spec.training.auto_train = false;
  run_experiment(spec);
  CHECK(without_timing(slurp(spec.out_dir / "results.csv")) == without_timing(results));
  CHECK(without_timing(slurp(spec.out_dir / "runs.csv")) == without_timing(runs));
  CHECK(slurp(spec.out_dir / "round_logs.csv") == logs);

  // Means recomputed from runs.csv.
  std::istringstream in(runs);
  std::string line;
  std::getline(in, line);
  std::map<std::string, std::pair<double, int>> acc;
  while (std::getline(in, line)) {
    std::vector<std::string> f = split_list(line);
    acc[f[1] + f[3]].first += std::stod(f[8]);
    acc[f[1] + f[3]].second += 1;
  }
  for (const ResultRow& r : first.rows) {
    const auto& [sum, n] = acc.at(std::string(to_string(r.at.scheme)) + to_string(r.at.fp));
    CHECK(r.mean_n_true == doctest::Approx(sum / n));
  }
}

TEST_CASE("experiment errors") {
  const fs::path dir = scratch("errors");
  ExperimentSpec spec = tiny_spec(dir);
  spec.dataset = dir / "missing.edges";
  CHECK_THROWS_AS(run_experiment(spec), std::runtime_error);

  spec = tiny_spec(dir);
  spec.training.auto_train = false;
  CHECK_THROWS_WITH_AS(run_experiment(spec), doctest::Contains("missing policy file"), std::runtime_error);

  spec = tiny_spec(dir);
  spec.runs = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = tiny_spec(dir);
  spec.axis = SweepAxis::Pnv;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.grid = {1.5};
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  spec = tiny_spec(dir);
  CHECK_THROWS_AS(bench_runtime(spec, 0), std::invalid_argument);
}

TEST_CASE("bench times every scheme") {
  const fs::path dir = scratch("bench");
  ExperimentSpec spec = tiny_spec(dir);
  const auto rows = bench_runtime(spec, 2);
  REQUIRE(rows.size() == 2);
  for (const BenchRow& r : rows) {
    CHECK(r.episodes == 2);
    CHECK(r.mean_seconds > 0.0);
  }
  std::stringstream s;
  write_bench_csv(s, rows);
  const auto back = read_bench_csv(s);
  CHECK(back.size() == 2);
  std::ostringstream out;
  CHECK_THROWS_WITH_AS(emit_bench_report(out, back), doctest::Contains("cstorm"), std::runtime_error);
}

TEST_CASE("table1 and fig2 layouts") {
  std::vector<ResultRow> rows;
  for (Scheme s : {Scheme::DrimA, Scheme::DrimNA, Scheme::Storm, Scheme::CStorm}) {
    for (TrustKind m : {TrustKind::Uom, TrustKind::Hom, TrustKind::Nom}) {
      for (const Opponent& o : all_opponents()) rows.push_back(row(s, m, o));
    }
  }
  std::ostringstream t1;
  emit_report(t1, Layout::Table1, rows);
  const std::string text = t1.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 13);
  CHECK(text.rfind("scheme,model,random,af,bf,sgf,cf,drl\ndrim-a,uom,0.00,", 0) == 0);

  std::ostringstream f2;
  emit_report(f2, Layout::Fig2, rows, {Metric::DecidedTrue});
  CHECK(f2.str().rfind("fp,drim-a,drim-na,cstorm,storm\nrandom,0.00,50.00,150.00,100.00\n", 0) == 0);

  rows.erase(rows.begin() + 7);  // drim-a / hom / af
  std::ostringstream missing;
  CHECK_THROWS_WITH_AS(emit_report(missing, Layout::Table1, rows), doctest::Contains("drim-a/hom/fp=af"),
                       std::runtime_error);
  CHECK(missing.str().empty());
}

TEST_CASE("fig3 layouts follow the sweep grid") {
  std::vector<ResultRow> rows;
  const Opponent drl = parse_opponent("drl");
  for (Scheme s : {Scheme::DrimA, Scheme::DrimNA, Scheme::Storm, Scheme::CStorm}) {
    for (double v : default_grid(SweepAxis::Prior)) rows.push_back(row(s, TrustKind::Uom, drl, SweepAxis::Prior, v));
  }
  std::ostringstream out;
  emit_report(out, Layout::Fig3c, rows);
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 6);
  CHECK(text.find("drl,0.9,") != std::string::npos);
  std::ostringstream other;
  CHECK_THROWS_WITH_AS(emit_report(other, Layout::Fig3a, rows), doctest::Contains("ip=1"), std::runtime_error);
}

TEST_CASE("config files") {
  std::istringstream in(R"([experiment]
schemes = drim-a, cstorm
models = uom,nom
opponents = drl, cf
runs = 5
axis = prior_a
master_seed = 9

[episode]
rounds = 30
p_nv = 0.8
free_degree_state = true

[training]
updates = 7
communities = 4
auto_train = false
)");
  const ExperimentSpec spec = parse_spec(in);
  CHECK(spec.schemes == std::vector<Scheme>{Scheme::DrimA, Scheme::CStorm});
  CHECK(spec.models == std::vector<TrustKind>{TrustKind::Uom, TrustKind::Nom});
  CHECK(spec.opponents.front().drl);
  CHECK(spec.runs == 5);
  CHECK(spec.axis == SweepAxis::Prior);
  CHECK(spec.grid == default_grid(SweepAxis::Prior));
  CHECK(spec.master_seed == 9);
  CHECK(spec.env.rounds == 30);
  CHECK(spec.env.p_nv == 0.8);
  CHECK(spec.env.state_uses_free_degree);
  CHECK(spec.training.ppo.updates == 7);
  CHECK(spec.training.communities == 4);
  CHECK_FALSE(spec.training.auto_train);

  std::istringstream unknown("[episode]\nwaves = 3\n");
  CHECK_THROWS_WITH_AS(parse_spec(unknown), doctest::Contains("episode.waves"), std::invalid_argument);
  std::istringstream bad_value("[experiment]\nruns = many\n");
  CHECK_THROWS_AS(parse_spec(bad_value), std::invalid_argument);
  std::istringstream zero_runs("[experiment]\nruns = 0\n");
  CHECK_THROWS_AS(parse_spec(zero_runs), std::invalid_argument);
  std::istringstream section("[plots]\nx = 1\n");
  CHECK_THROWS_AS(parse_spec(section), std::invalid_argument);
}

TEST_CASE("ranges") {
  CHECK(parse_range("1:5") == std::vector<double>{1, 2, 3, 4, 5});
  CHECK(parse_range("0.1:0.9:0.2") == std::vector<double>{0.1, 0.3, 0.5, 0.7, 0.9});
  CHECK(parse_range("2:2") == std::vector<double>{2});
  CHECK_THROWS_AS(parse_range("5:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_range("1:5:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_range("1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_range("a:b"), std::invalid_argument);
}
