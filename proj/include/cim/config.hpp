#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cim/experiment.hpp"

namespace cim {

/// INI-style experiment file:
///
///   [experiment]  schemes, models, opponents, runs, axis, grid, dataset,
///                 out_dir, master_seed, round_logs
///   [episode]     rounds, tp_waves, fp_waves, p_nv, prior_a, xi, t_d, t_u,
///                 propagate_on_masked, newest_seed_only, free_degree_state
///   [training]    updates, episodes_per_update, epochs, actor_lr, critic_lr,
///                 clip, entropy, gamma, hidden, self_play_phase,
///                 self_play_rounds, communities, policy_dir, auto_train
///
/// Lists are comma separated. Unknown sections or keys are errors.
ExperimentSpec parse_spec(std::istream& in, ExperimentSpec base = {});
ExperimentSpec load_spec(const std::filesystem::path& path, ExperimentSpec base = {});

/// "a:b" or "a:b:step", inclusive of b (within a small tolerance).
std::vector<double> parse_range(std::string_view text);

std::vector<std::string> split_list(std::string_view text);

}  // namespace cim
