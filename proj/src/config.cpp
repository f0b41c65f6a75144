#include "cim/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace cim {

namespace pt = boost::property_tree;

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

std::vector<double> parse_range(std::string_view text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(':', start);
    const std::string piece(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(piece, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != piece.size()) throw std::invalid_argument("bad range '" + std::string(text) + "'");
    parts.push_back(v);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  if (parts.size() < 2 || parts.size() > 3) throw std::invalid_argument("range must be a:b or a:b:step");
  const double lo = parts[0], hi = parts[1], step = parts.size() == 3 ? parts[2] : 1.0;
  if (!(step > 0) || hi < lo) throw std::invalid_argument("range needs a <= b and a positive step");
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) {
    // Round away accumulated noise so 0.1:0.9:0.2 yields exact grid labels.
    out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9);
  }
  return out;
}

namespace {

template <class T>
T get(const pt::ptree& sec, const std::string& section, const std::string& key) {
  try {
    return sec.get<T>(key);
  } catch (const pt::ptree_error&) {
    throw std::invalid_argument("bad value for " + section + "." + key + ": '" + sec.get<std::string>(key) + "'");
  }
}

bool get_bool(const pt::ptree& sec, const std::string& section, const std::string& key) {
  const auto v = sec.get<std::string>(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("bad boolean for " + section + "." + key + ": '" + v + "'");
}

void apply_experiment(const pt::ptree& sec, ExperimentSpec& spec) {
  for (const auto& [key, node] : sec) {
    const std::string v = node.data();
    if (key == "schemes") {
      spec.schemes.clear();
      for (const auto& s : split_list(v)) spec.schemes.push_back(parse_scheme(s));
    } else if (key == "models") {
      spec.models.clear();
      for (const auto& s : split_list(v)) spec.models.push_back(parse_trust_kind(s));
    } else if (key == "opponents") {
      spec.opponents.clear();
      for (const auto& s : split_list(v)) spec.opponents.push_back(parse_opponent(s));
    } else if (key == "runs") {
      spec.runs = get<std::size_t>(sec, "experiment", key);
    } else if (key == "axis") {
      spec.axis = parse_sweep_axis(v);
      if (spec.grid.empty()) spec.grid = default_grid(spec.axis);
    } else if (key == "grid") {
      spec.grid = v.find(':') != std::string::npos ? parse_range(v) : std::vector<double>{};
      if (spec.grid.empty()) {
        for (const auto& s : split_list(v)) spec.grid.push_back(std::stod(s));
      }
    } else if (key == "dataset") {
      spec.dataset = v;
    } else if (key == "out_dir") {
      spec.out_dir = v;
    } else if (key == "master_seed") {
      spec.master_seed = get<std::uint64_t>(sec, "experiment", key);
    } else if (key == "round_logs") {
      spec.write_round_logs = get_bool(sec, "experiment", key);
    } else {
      throw std::invalid_argument("unknown key experiment." + key);
    }
  }
}

void apply_episode(const pt::ptree& sec, EpisodeConfig& env) {
  const std::string s = "episode";
  for (const auto& [key, node] : sec) {
    if (key == "rounds") env.rounds = get<std::size_t>(sec, s, key);
    else if (key == "tp_waves") env.tp_waves = get<std::size_t>(sec, s, key);
    else if (key == "fp_waves") env.fp_waves = get<std::size_t>(sec, s, key);
    else if (key == "p_nv") env.p_nv = get<double>(sec, s, key);
    else if (key == "prior_a") env.population.prior_a = get<double>(sec, s, key);
    else if (key == "xi") env.model.xi = get<double>(sec, s, key);
    else if (key == "t_d") env.model.t_d = get<double>(sec, s, key);
    else if (key == "t_u") env.model.t_u = get<double>(sec, s, key);
    else if (key == "propagate_on_masked") env.propagate_on_masked = get_bool(sec, s, key);
    else if (key == "newest_seed_only") env.newest_seed_only = get_bool(sec, s, key);
    else if (key == "free_degree_state") env.state_uses_free_degree = get_bool(sec, s, key);
    else throw std::invalid_argument("unknown key episode." + key);
  }
}

void apply_training(const pt::ptree& sec, TrainingPlan& plan) {
  const std::string s = "training";
  PPOConfig& p = plan.ppo;
  for (const auto& [key, node] : sec) {
    if (key == "updates") p.updates = get<std::size_t>(sec, s, key);
    else if (key == "episodes_per_update") p.episodes_per_update = get<std::size_t>(sec, s, key);
    else if (key == "epochs") p.epochs = get<std::size_t>(sec, s, key);
    else if (key == "actor_lr") p.actor_lr = get<double>(sec, s, key);
    else if (key == "critic_lr") p.critic_lr = get<double>(sec, s, key);
    else if (key == "clip") p.clip_eps = get<double>(sec, s, key);
    else if (key == "entropy") p.entropy_coef = get<double>(sec, s, key);
    else if (key == "gamma") p.gamma = get<double>(sec, s, key);
    else if (key == "hidden") p.hidden = get<std::size_t>(sec, s, key);
    else if (key == "self_play_phase") plan.self_play_phase = get<std::size_t>(sec, s, key);
    else if (key == "self_play_rounds") plan.self_play_rounds = get<std::size_t>(sec, s, key);
    else if (key == "communities") plan.communities = get<std::size_t>(sec, s, key);
    else if (key == "policy_dir") plan.policy_dir = node.data();
    else if (key == "auto_train") plan.auto_train = get_bool(sec, s, key);
    else throw std::invalid_argument("unknown key training." + key);
  }
}

}  // namespace

ExperimentSpec parse_spec(std::istream& in, ExperimentSpec base) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  for (const auto& [name, sec] : tree) {
    if (!sec.data().empty()) throw std::invalid_argument("config key '" + name + "' is outside any section");
    if (name == "experiment") apply_experiment(sec, base);
    else if (name == "episode") apply_episode(sec, base.env);
    else if (name == "training") apply_training(sec, base.training);
    else throw std::invalid_argument("unknown config section [" + name + "]");
  }
  base.validate();
  return base;
}

ExperimentSpec load_spec(const std::filesystem::path& path, ExperimentSpec base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  return parse_spec(in, std::move(base));
}

}  // namespace cim
