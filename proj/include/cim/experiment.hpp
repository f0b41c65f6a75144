#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cim/baselines.hpp"
#include "cim/training.hpp"

namespace cim {

/// False-party behaviour in an experiment: a fixed strategy or a trained policy.
struct Opponent {
  bool drl = false;
  Strategy strategy = Strategy::Random;

  auto operator<=>(const Opponent&) const = default;
};

std::string to_string(const Opponent& o);
/// af, bf, sgf, cf, random or drl.
Opponent parse_opponent(std::string_view name);
/// Column order used by reports: random, af, bf, sgf, cf, drl.
std::vector<Opponent> all_opponents();

enum class SweepAxis : std::uint8_t { None, Ip, Pnv, Prior };

std::string_view to_string(SweepAxis a);
/// none, ip, p_nv, prior_a
SweepAxis parse_sweep_axis(std::string_view name);
/// ip 1..5, p_nv {0.2..1.0}, prior_a {0.1..0.9}; empty for none.
std::vector<double> default_grid(SweepAxis a);

struct TrainingPlan {
  PPOConfig ppo{};
  /// Self-play for the trained false party: updates per phase and phase pairs.
  std::size_t self_play_phase = 25;
  std::size_t self_play_rounds = 4;
  std::size_t communities = kDefaultCommunities;
  std::filesystem::path policy_dir = "policies";
  bool auto_train = true;
  /// Progress lines go here when set.
  std::ostream* log = nullptr;
};

struct ExperimentSpec {
  std::vector<Scheme> schemes{Scheme::DrimA};
  std::vector<TrustKind> models{TrustKind::Uom};
  std::vector<Opponent> opponents{Opponent{}};
  std::size_t runs = 20;
  SweepAxis axis = SweepAxis::None;
  std::vector<double> grid;
  /// Edge list; empty selects the bundled email network.
  std::filesystem::path dataset;
  std::filesystem::path out_dir = "results";
  std::uint64_t master_seed = 1;
  /// Base environment. The opinion model and sweep value override it per cell.
  EpisodeConfig env{};
  TrainingPlan training{};
  bool write_round_logs = true;

  void validate() const;
};

/// Bundled dataset path baked in at build time.
std::filesystem::path default_dataset();
std::shared_ptr<const Graph> load_dataset(const std::filesystem::path& path);

struct Coordinate {
  Scheme scheme = Scheme::DrimA;
  TrustKind model = TrustKind::Uom;
  Opponent fp{};
  SweepAxis axis = SweepAxis::None;
  double value = 0.0;

  auto operator<=>(const Coordinate&) const = default;
};

struct RunRecord {
  Coordinate at;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::size_t n_true = 0;
  std::size_t n_false = 0;
  std::size_t decided_true = 0;
  std::size_t decided_false = 0;
  double seconds = 0.0;
};

struct ResultRow {
  Coordinate at;
  std::size_t runs = 0;
  double mean_n_true = 0.0;
  double std_n_true = 0.0;
  double mean_n_false = 0.0;
  double mean_decided_true = 0.0;
  double mean_seconds = 0.0;
};

/// Per-run seed from the master seed, the coordinate tuple and the run index.
std::uint64_t run_seed(std::uint64_t master, const Coordinate& at, std::size_t run);

/// Environment of one cell: base env with the cell's model and sweep value.
EpisodeConfig cell_env(const EpisodeConfig& base, const Coordinate& at);

/// Trained policies keyed by everything that affects training. Files are
/// reused when present; otherwise trained if auto_train is set.
class PolicyStore {
 public:
  PolicyStore(std::shared_ptr<const Graph> graph, EpisodeConfig base_env, TrainingPlan plan,
              std::uint64_t master_seed);

  /// Policy of the true party for (scheme, model) trained against `fp`.
  std::shared_ptr<const PolicyParams> tp_policy(Scheme scheme, TrustKind model, const Opponent& fp);
  /// Self-play policy of the false party (DRIM-A action set).
  std::shared_ptr<const PolicyParams> fp_policy(TrustKind model);

  std::filesystem::path tp_path(Scheme scheme, TrustKind model, const Opponent& fp) const;
  std::filesystem::path fp_path(TrustKind model) const;

  /// Agent factories for evaluation (greedy).
  std::unique_ptr<SeedAgent> make_tp(Scheme scheme, TrustKind model, const Opponent& fp);
  std::unique_ptr<SeedAgent> make_fp(TrustKind model, const Opponent& fp);

 private:
  std::string fingerprint(std::string_view role) const;
  TrainSetup setup(Scheme scheme, Party party, TrustKind model, std::uint64_t seed) const;

  std::shared_ptr<const Graph> graph_;
  EpisodeConfig env_;
  TrainingPlan plan_;
  std::uint64_t master_seed_;
  std::recursive_mutex mutex_;
  std::map<std::string, std::shared_ptr<const PolicyParams>> loaded_;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<RunRecord> runs;
};

/// Runs every (scheme, model, fp, sweep value) cell `runs` times and writes
/// results.csv, runs.csv and, if enabled, round_logs.csv into out_dir.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Aggregates raw runs into rows ordered by coordinate.
std::vector<ResultRow> aggregate(std::span<const RunRecord> runs);

struct BenchRow {
  Scheme scheme = Scheme::DrimA;
  std::size_t episodes = 0;
  double mean_seconds = 0.0;
  double std_seconds = 0.0;
};

/// Mean wall time per evaluation episode for each scheme in the spec (first
/// model and opponent), after one excluded warm-up episode. Sequential.
std::vector<BenchRow> bench_runtime(const ExperimentSpec& spec, std::size_t episodes);

void write_results_csv(std::ostream& out, std::span<const ResultRow> rows);
std::vector<ResultRow> read_results_csv(std::istream& in);
void write_runs_csv(std::ostream& out, std::span<const RunRecord> runs);
void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);

}  // namespace cim
