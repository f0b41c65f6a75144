#include "cim/experiment.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cim/parallel.hpp"

#ifndef CIM_DEFAULT_DATASET
#define CIM_DEFAULT_DATASET "data/email_surrogate.edges"
#endif

namespace cim {

std::string to_string(const Opponent& o) {
  return o.drl ? std::string("drl") : std::string(cim::to_string(o.strategy));
}

Opponent parse_opponent(std::string_view name) {
  if (name == "drl") return {true, Strategy::Random};
  return {false, parse_strategy(name)};
}

std::vector<Opponent> all_opponents() {
  return {{false, Strategy::Random}, {false, Strategy::AF}, {false, Strategy::BF},
          {false, Strategy::SGF},    {false, Strategy::CF}, {true, Strategy::Random}};
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::None: return "none";
    case SweepAxis::Ip: return "ip";
    case SweepAxis::Pnv: return "p_nv";
    case SweepAxis::Prior: return "prior_a";
  }
  return "?";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "none") return SweepAxis::None;
  if (name == "ip") return SweepAxis::Ip;
  if (name == "p_nv" || name == "pnv") return SweepAxis::Pnv;
  if (name == "prior_a" || name == "prior") return SweepAxis::Prior;
  throw std::invalid_argument("unknown sweep axis '" + std::string(name) + "'");
}

std::vector<double> default_grid(SweepAxis a) {
  switch (a) {
    case SweepAxis::None: return {};
    case SweepAxis::Ip: return {1, 2, 3, 4, 5};
    case SweepAxis::Pnv: return {0.2, 0.4, 0.6, 0.8, 1.0};
    case SweepAxis::Prior: return {0.1, 0.3, 0.5, 0.7, 0.9};
  }
  return {};
}

void ExperimentSpec::validate() const {
  if (runs < 1) throw std::invalid_argument("runs must be at least 1");
  if (schemes.empty() || models.empty() || opponents.empty()) {
    throw std::invalid_argument("schemes, models and opponents must be nonempty");
  }
  if (axis != SweepAxis::None && grid.empty()) throw std::invalid_argument("sweep grid is empty");
  for (double v : grid) {
    switch (axis) {
      case SweepAxis::Ip:
        if (v < 1 || v != std::floor(v)) throw std::invalid_argument("ip values must be positive integers");
        break;
      case SweepAxis::Pnv:
      case SweepAxis::Prior:
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("sweep values must lie in [0, 1]");
        break;
      case SweepAxis::None:
        break;
    }
  }
  env.validate();
  training.ppo.validate();
}

std::filesystem::path default_dataset() { return CIM_DEFAULT_DATASET; }

std::shared_ptr<const Graph> load_dataset(const std::filesystem::path& path) {
  const std::filesystem::path p = path.empty() ? default_dataset() : path;
  if (!std::filesystem::exists(p)) throw std::runtime_error("dataset not found: " + p.string());
  EdgeListOptions opts;
  if (p.extension() == ".mtx") opts.format = EdgeFormat::MatrixMarket;
  return std::make_shared<const Graph>(load_edge_list_file(p.string(), opts));
}

namespace {

std::uint64_t opponent_code(const Opponent& o) {
  return o.drl ? 100 : static_cast<std::uint64_t>(o.strategy);
}

std::uint64_t graph_fingerprint(const Graph& g) {
  std::uint64_t h = splitmix64(g.num_nodes());
  for (auto [u, v] : g.edges()) h = splitmix64(h ^ ((static_cast<std::uint64_t>(u) << 32) | v));
  return h;
}

std::string hex(std::uint64_t x) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << x;
  return s.str();
}

void note(std::ostream* log, const std::string& line) {
  if (log != nullptr) *log << line << std::endl;
}

}  // namespace

std::uint64_t run_seed(std::uint64_t master, const Coordinate& at, std::size_t run) {
  return derive_seed(master, {static_cast<std::uint64_t>(at.scheme), static_cast<std::uint64_t>(at.model),
                              opponent_code(at.fp), static_cast<std::uint64_t>(at.axis),
                              std::bit_cast<std::uint64_t>(at.value), run});
}

EpisodeConfig cell_env(const EpisodeConfig& base, const Coordinate& at) {
  EpisodeConfig env = base;
  env.model.kind = at.model;
  switch (at.axis) {
    case SweepAxis::Ip: env.tp_waves = static_cast<std::size_t>(std::llround(at.value)); break;
    case SweepAxis::Pnv: env.p_nv = at.value; break;
    case SweepAxis::Prior: env.population.prior_a = at.value; break;
    case SweepAxis::None: break;
  }
  return env;
}

PolicyStore::PolicyStore(std::shared_ptr<const Graph> graph, EpisodeConfig base_env, TrainingPlan plan,
                         std::uint64_t master_seed)
    : graph_(std::move(graph)), env_(std::move(base_env)), plan_(std::move(plan)), master_seed_(master_seed) {
  if (!graph_) throw std::invalid_argument("policy store needs a graph");
  // Returns count users; scaling by 1/|V| keeps critic targets O(1).
  plan_.ppo.value_scale = 1.0 / static_cast<double>(graph_->num_nodes());
}

std::string PolicyStore::fingerprint(std::string_view role) const {
  std::ostringstream s;
  s << std::setprecision(17) << role << '|' << graph_fingerprint(*graph_) << '|' << master_seed_ << '|'
    << env_.rounds << ',' << env_.tp_waves << ',' << env_.fp_waves << ',' << env_.p_nv << ','
    << env_.model.xi << ',' << env_.model.t_d << ',' << env_.model.t_u << ',' << env_.propagate_on_masked
    << ',' << env_.newest_seed_only << ',' << env_.state_uses_free_degree << ',' << env_.population.prior_a
    << ',' << env_.population.free_threshold << '|';
  for (double w : env_.population.level_weights) s << w << ',';
  const PPOConfig& p = plan_.ppo;
  s << '|' << p.gamma << ',' << p.clip_eps << ',' << p.epochs << ',' << p.actor_lr << ',' << p.critic_lr << ','
    << p.episodes_per_update << ',' << p.updates << ',' << p.entropy_coef << ',' << p.hidden << ','
    << p.value_scale << '|' << plan_.self_play_phase << ',' << plan_.self_play_rounds << ','
    << plan_.communities;
  return std::string(role) + "_" + hex(hash_text(s.str().c_str()));
}

std::filesystem::path PolicyStore::tp_path(Scheme scheme, TrustKind model, const Opponent& fp) const {
  const std::string role =
      "tp_" + std::string(to_string(scheme)) + "_" + std::string(to_string(model)) + "_vs_" + to_string(fp);
  return plan_.policy_dir / (fingerprint(role) + ".bin");
}

std::filesystem::path PolicyStore::fp_path(TrustKind model) const {
  return plan_.policy_dir / (fingerprint("fp_selfplay_" + std::string(to_string(model))) + ".bin");
}

TrainSetup PolicyStore::setup(Scheme scheme, Party party, TrustKind model, std::uint64_t seed) const {
  TrainSetup s;
  s.scheme = scheme;
  s.party = party;
  s.graph = graph_;
  s.env = env_;
  s.env.model.kind = model;
  s.ppo = plan_.ppo;
  s.seed = seed;
  s.learner = make_learner(scheme, plan_.communities, plan_.ppo.value_scale);
  return s;
}

namespace {

void save_with_curve(const std::filesystem::path& path, const TrainResult& r) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  save_params(path, r.params);
  std::filesystem::path curve = path;
  curve.replace_extension(".curve.csv");
  std::ofstream out(curve);
  write_learning_curve(out, r.curve);
}

}  // namespace

std::shared_ptr<const PolicyParams> PolicyStore::fp_policy(TrustKind model) {
  std::lock_guard lock(mutex_);
  const std::filesystem::path path = fp_path(model);
  if (auto it = loaded_.find(path.string()); it != loaded_.end()) return it->second;

  const std::size_t actions = action_space(Scheme::DrimA).size();
  std::shared_ptr<const PolicyParams> params;
  if (std::filesystem::exists(path)) {
    params = std::make_shared<const PolicyParams>(load_params(path, actions));
  } else {
    if (!plan_.auto_train) throw std::runtime_error("missing policy file " + path.string());
    note(plan_.log, "training self-play false party (" + std::string(to_string(model)) + ")");
    const std::uint64_t seed = derive_seed(master_seed_, {hash_text("selfplay"), static_cast<std::uint64_t>(model)});
    const TrainSetup tp = setup(Scheme::DrimA, Party::True, model, derive_seed(seed, {1}));
    const TrainSetup fp = setup(Scheme::DrimA, Party::False, model, derive_seed(seed, {2}));
    SelfPlayResult r = train_self_play(tp, fp, plan_.self_play_phase, plan_.self_play_rounds);
    save_with_curve(path, r.fp);
    params = std::make_shared<const PolicyParams>(std::move(r.fp.params));
  }
  loaded_.emplace(path.string(), params);
  return params;
}

std::shared_ptr<const PolicyParams> PolicyStore::tp_policy(Scheme scheme, TrustKind model, const Opponent& fp) {
  std::lock_guard lock(mutex_);
  const std::filesystem::path path = tp_path(scheme, model, fp);
  if (auto it = loaded_.find(path.string()); it != loaded_.end()) return it->second;

  const std::size_t actions = action_space(scheme).size();
  std::shared_ptr<const PolicyParams> params;
  if (std::filesystem::exists(path)) {
    params = std::make_shared<const PolicyParams>(load_params(path, actions));
  } else {
    if (!plan_.auto_train) throw std::runtime_error("missing policy file " + path.string());
    note(plan_.log, "training " + std::string(to_string(scheme)) + "/" + std::string(to_string(model)) +
                        " against " + to_string(fp));
    TrainSetup s = setup(scheme, Party::True, model,
                         derive_seed(master_seed_, {hash_text("tp"), static_cast<std::uint64_t>(scheme),
                                                    static_cast<std::uint64_t>(model), opponent_code(fp)}));
    if (fp.drl) {
      auto fp_params = fp_policy(model);
      s.opponent = [fp_params] {
        return std::unique_ptr<SeedAgent>(std::make_unique<PolicyAgent>(Scheme::DrimA, fp_params, PolicyMode::Greedy));
      };
    } else {
      const Strategy kind = fp.strategy;
      s.opponent = [kind] { return std::unique_ptr<SeedAgent>(std::make_unique<HeuristicAgent>(kind)); };
    }
    TrainResult r = train_agent(s);
    save_with_curve(path, r);
    params = std::make_shared<const PolicyParams>(std::move(r.params));
  }
  loaded_.emplace(path.string(), params);
  return params;
}

std::unique_ptr<SeedAgent> PolicyStore::make_tp(Scheme scheme, TrustKind model, const Opponent& fp) {
  return make_learner(scheme, plan_.communities, plan_.ppo.value_scale)(tp_policy(scheme, model, fp),
                                                                         PolicyMode::Greedy);
}

std::unique_ptr<SeedAgent> PolicyStore::make_fp(TrustKind model, const Opponent& fp) {
  if (fp.drl) return std::make_unique<PolicyAgent>(Scheme::DrimA, fp_policy(model), PolicyMode::Greedy);
  return std::make_unique<HeuristicAgent>(fp.strategy);
}

std::vector<ResultRow> aggregate(std::span<const RunRecord> runs) {
  std::map<Coordinate, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : runs) groups[r.at].push_back(&r);
  std::vector<ResultRow> rows;
  for (const auto& [at, group] : groups) {
    ResultRow row;
    row.at = at;
    row.runs = group.size();
    const double n = static_cast<double>(group.size());
    for (const RunRecord* r : group) {
      row.mean_n_true += static_cast<double>(r->n_true) / n;
      row.mean_n_false += static_cast<double>(r->n_false) / n;
      row.mean_decided_true += static_cast<double>(r->decided_true) / n;
      row.mean_seconds += r->seconds / n;
    }
    if (group.size() > 1) {
      double ss = 0.0;
      for (const RunRecord* r : group) ss += std::pow(static_cast<double>(r->n_true) - row.mean_n_true, 2);
      row.std_n_true = std::sqrt(ss / (n - 1.0));
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::vector<Coordinate> coordinates(const ExperimentSpec& spec) {
  std::vector<double> values = spec.axis == SweepAxis::None ? std::vector<double>{0.0} : spec.grid;
  std::vector<Coordinate> out;
  for (Scheme s : spec.schemes) {
    for (TrustKind m : spec.models) {
      for (const Opponent& o : spec.opponents) {
        for (double v : values) out.push_back({s, m, o, spec.axis, v});
      }
    }
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto graph = load_dataset(spec.dataset);
  PolicyStore store(graph, spec.env, spec.training, spec.master_seed);
  const std::vector<Coordinate> cells = coordinates(spec);

  for (const Coordinate& c : cells) {
    store.tp_policy(c.scheme, c.model, c.fp);
    if (c.fp.drl) store.fp_policy(c.model);
  }

  const std::size_t jobs = cells.size() * spec.runs;
  std::vector<RunRecord> records(jobs);
  std::vector<std::string> logs(spec.write_round_logs ? jobs : 0);
  parallel_for(jobs, [&](std::size_t j) {
    const Coordinate& at = cells[j / spec.runs];
    RunRecord& rec = records[j];
    rec.at = at;
    rec.run = j % spec.runs;
    rec.seed = run_seed(spec.master_seed, at, rec.run);
    EpisodeConfig env = cell_env(spec.env, at);
    env.seed = rec.seed;

    auto tp = store.make_tp(at.scheme, at.model, at.fp);
    auto fp = store.make_fp(at.model, at.fp);
    const auto start = std::chrono::steady_clock::now();
    Episode ep(graph, env);
    run_episode(ep, *tp, *fp);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const RoundLog& last = ep.logs().back();
    rec.n_true = last.n_true;
    rec.n_false = last.n_false;
    rec.decided_true = last.decided_true;
    rec.decided_false = last.decided_false;
    if (spec.write_round_logs) {
      std::ostringstream s;
      write_round_logs(s, j, ep.logs());
      logs[j] = s.str();
    }
  });

  ExperimentResult result{aggregate(records), std::move(records)};

  std::filesystem::create_directories(spec.out_dir);
  {
    auto out = open_out(spec.out_dir / "results.csv");
    write_results_csv(out, result.rows);
  }
  {
    auto out = open_out(spec.out_dir / "runs.csv");
    write_runs_csv(out, result.runs);
  }
  if (spec.write_round_logs) {
    auto out = open_out(spec.out_dir / "round_logs.csv");
    write_round_log_header(out);
    for (const std::string& s : logs) out << s;
  }
  return result;
}

std::vector<BenchRow> bench_runtime(const ExperimentSpec& spec, std::size_t episodes) {
  if (episodes == 0) throw std::invalid_argument("bench needs at least one episode");
  spec.validate();
  const auto graph = load_dataset(spec.dataset);
  PolicyStore store(graph, spec.env, spec.training, spec.master_seed);

  std::vector<BenchRow> rows;
  for (Scheme scheme : spec.schemes) {
    const Coordinate at{scheme, spec.models.front(), spec.opponents.front(), SweepAxis::None, 0.0};
    store.tp_policy(at.scheme, at.model, at.fp);
    if (at.fp.drl) store.fp_policy(at.model);

    std::vector<double> times;
    for (std::size_t e = 0; e <= episodes; ++e) {
      EpisodeConfig env = cell_env(spec.env, at);
      env.seed = run_seed(spec.master_seed, at, e);
      auto tp = store.make_tp(at.scheme, at.model, at.fp);
      auto fp = store.make_fp(at.model, at.fp);
      const auto start = std::chrono::steady_clock::now();
      Episode ep(graph, env);
      run_episode(ep, *tp, *fp);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (e > 0) times.push_back(secs);  // the first episode warms caches
    }
    BenchRow row{scheme, times.size(), 0.0, 0.0};
    for (double t : times) row.mean_seconds += t / static_cast<double>(times.size());
    if (times.size() > 1) {
      double ss = 0.0;
      for (double t : times) ss += (t - row.mean_seconds) * (t - row.mean_seconds);
      row.std_seconds = std::sqrt(ss / static_cast<double>(times.size() - 1));
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

constexpr const char* kResultsHeader =
    "scheme,model,fp,axis,value,runs,mean_n_true,std_n_true,mean_n_false,mean_decided_true,mean_seconds";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_results_csv(std::ostream& out, std::span<const ResultRow> rows) {
  out << kResultsHeader << '\n' << std::setprecision(12);
  for (const ResultRow& r : rows) {
    out << to_string(r.at.scheme) << ',' << to_string(r.at.model) << ',' << to_string(r.at.fp) << ','
        << to_string(r.at.axis) << ',' << r.at.value << ',' << r.runs << ',' << r.mean_n_true << ','
        << r.std_n_true << ',' << r.mean_n_false << ',' << r.mean_decided_true << ',' << r.mean_seconds << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) throw std::runtime_error("not a results file");
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 11) throw std::runtime_error("results line " + std::to_string(lineno) + " has wrong arity");
    try {
      ResultRow r;
      r.at = {parse_scheme(f[0]), parse_trust_kind(f[1]), parse_opponent(f[2]), parse_sweep_axis(f[3]),
              std::stod(f[4])};
      r.runs = std::stoul(f[5]);
      r.mean_n_true = std::stod(f[6]);
      r.std_n_true = std::stod(f[7]);
      r.mean_n_false = std::stod(f[8]);
      r.mean_decided_true = std::stod(f[9]);
      r.mean_seconds = std::stod(f[10]);
      rows.push_back(r);
    } catch (const std::exception& e) {
      throw std::runtime_error("results line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

void write_runs_csv(std::ostream& out, std::span<const RunRecord> runs) {
  out << "episode,scheme,model,fp,axis,value,run,seed,n_true,n_false,decided_true,decided_false,seconds\n"
      << std::setprecision(12);
  for (std::size_t j = 0; j < runs.size(); ++j) {
    const RunRecord& r = runs[j];
    out << j << ',' << to_string(r.at.scheme) << ',' << to_string(r.at.model) << ',' << to_string(r.at.fp) << ','
        << to_string(r.at.axis) << ',' << r.at.value << ',' << r.run << ',' << r.seed << ',' << r.n_true << ','
        << r.n_false << ',' << r.decided_true << ',' << r.decided_false << ',' << r.seconds << '\n';
  }
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << "scheme,episodes,mean_seconds,std_seconds\n" << std::setprecision(6);
  for (const BenchRow& r : rows) {
    out << to_string(r.scheme) << ',' << r.episodes << ',' << r.mean_seconds << ',' << r.std_seconds << '\n';
  }
}

}  // namespace cim
