#pragma once

#include <iosfwd>
#include <string>

#include "tucrl/rng.hpp"
#include "tucrl/types.hpp"

namespace tucrl {

enum class NoiseKind { deterministic, bernoulli, uniform };

/// Reward noise model, realized at simulation time only; all planning and
/// analysis work with mean rewards.
struct RewardNoise {
    NoiseKind kind = NoiseKind::deterministic;
    double param = 0.0;  // uniform: full width of the interval around the mean
};

/// Finite tabular MDP: per-state action counts, mean rewards in [0, r_max]
/// with an optional noise model, and dense transition rows.
///
/// State-action pairs are addressed by a flat index `pair_index(s, a)`;
/// actions are indexed independently per state.
class Mdp {
  public:
    Mdp(int num_states, indvec actions_per_state, double r_max, int start_state = 0);

    int num_states() const { return num_states_; }
    int num_actions(int s) const { return actions_per_state_[std::size_t(s)]; }
    const indvec& actions_per_state() const { return actions_per_state_; }
    int max_actions() const { return max_actions_; }
    int num_pairs() const { return int(reward_mean_.size()); }
    int pair_index(int s, int a) const { return pair_offset_[std::size_t(s)] + a; }
    double r_max() const { return r_max_; }
    int start_state() const { return start_state_; }
    void set_start_state(int s1);

    void set_reward(int s, int a, double mean, RewardNoise noise = {});
    void set_transition(int s, int a, numvec row);

    double reward_mean(int s, int a) const { return reward_mean_[std::size_t(pair_index(s, a))]; }
    RewardNoise reward_noise(int s, int a) const { return noise_[std::size_t(pair_index(s, a))]; }
    const numvec& transition_row(int s, int a) const {
        return rows_[std::size_t(pair_index(s, a))];
    }
    double transition(int s, int a, int next) const {
        return rows_[std::size_t(pair_index(s, a))][std::size_t(next)];
    }
    /// States with positive transition probability from (s, a).
    const indvec& support(int s, int a) const { return support_[std::size_t(pair_index(s, a))]; }

    /// Largest transition-row support over all pairs.
    int max_support() const;

    /// Checks stochasticity of every row (sum within 1e-12, entries in
    /// [0, 1]) and the reward-range invariants; throws std::invalid_argument
    /// on the first violation.
    void validate() const;

    int sample_next(int s, int a, Rng& rng) const;
    double sample_reward(int s, int a, Rng& rng) const;

    /// Text serialization; decimal values round-trip exactly at up to 12
    /// significant digits.
    void write(std::ostream& out) const;
    static Mdp read(std::istream& in);
    std::string to_string() const;
    static Mdp from_string(const std::string& text);

  private:
    int num_states_;
    indvec actions_per_state_;
    indvec pair_offset_;
    int max_actions_;
    double r_max_;
    int start_state_;
    numvec reward_mean_;
    std::vector<RewardNoise> noise_;
    std::vector<numvec> rows_;
    std::vector<indvec> support_;
};

const char* noise_kind_name(NoiseKind kind);
NoiseKind noise_kind_from_name(const std::string& name);

}  // namespace tucrl
