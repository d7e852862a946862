#pragma once

#include <iosfwd>

#include "tucrl/mdp.hpp"
#include "tucrl/types.hpp"

namespace tucrl {

/// Visit statistics for one simulation run. N(s,a) counts visits committed
/// at episode ends; nu(s,a) counts visits inside the current episode;
/// transition counts accumulate live. Episode bookkeeping (t, t_k, k) lives
/// here as well.
class Counts {
  public:
    Counts(int num_states, indvec actions_per_state);
    explicit Counts(const Mdp& shape);

    int num_states() const { return num_states_; }
    int num_actions(int s) const { return actions_per_state_[std::size_t(s)]; }
    int max_actions() const { return max_actions_; }
    int pair_index(int s, int a) const { return pair_offset_[std::size_t(s)] + a; }
    int num_pairs() const { return int(visits_total_.size()); }

    long t() const { return t_; }
    long episode_start() const { return t_k_; }
    int episode() const { return k_; }

    /// Opens episode k+1 at the current time step.
    void start_episode();
    /// Registers one executed transition; visible in N only after end_episode.
    void record_step(int s, int a, int next);
    /// Commits the episode's visits into N.
    void end_episode();

    long N(int s, int a) const { return committed_[std::size_t(pair_index(s, a))]; }
    long nu(int s, int a) const {
        const auto i = std::size_t(pair_index(s, a));
        return visits_total_[i] - committed_[i];
    }
    long total(int s, int a) const { return visits_total_[std::size_t(pair_index(s, a))]; }
    long N_plus(int s, int a) const { return std::max(1L, N(s, a)); }
    long N_pm(int s, int a) const { return std::max(1L, N(s, a) - 1); }
    long trans(int s, int a, int next) const {
        return trans_total_[std::size_t(pair_index(s, a)) * std::size_t(num_states_) +
                            std::size_t(next)];
    }
    /// Distinct next states observed from (s, a), ascending.
    const indvec& observed(int s, int a) const {
        return observed_[std::size_t(pair_index(s, a))];
    }
    /// True when (s, a) has committed visits.
    bool visited(int s, int a) const { return N(s, a) > 0; }
    /// True when some action of s has committed visits.
    bool state_visited(int s) const { return state_committed_[std::size_t(s)] > 0; }

    /// Writes all positive transition counts as `s,a,s',count`.
    void write_csv(std::ostream& out) const;

  private:
    void check_state(int s) const;
    void check_pair(int s, int a) const;

    int num_states_;
    indvec actions_per_state_;
    indvec pair_offset_;
    int max_actions_;
    long t_ = 1;
    long t_k_ = 1;
    int k_ = 0;
    std::vector<long> committed_;      // N(s,a)
    std::vector<long> visits_total_;   // N(s,a) + nu(s,a)
    std::vector<long> state_committed_;
    std::vector<long> trans_total_;    // N(s,a,s') + in-episode part
    std::vector<indvec> observed_;
};

/// Streaming reward moments per state-action pair; transition frequencies
/// and their variances are views over a Counts instance.
class EmpiricalModel {
  public:
    EmpiricalModel(int num_states, indvec actions_per_state, double r_max = -1.0);
    explicit EmpiricalModel(const Mdp& shape);

    void record_reward(int s, int a, double r);

    double r_hat(int s, int a) const { return mean_[std::size_t(pair_index(s, a))]; }
    /// Population (biased) empirical variance.
    double var_r(int s, int a) const {
        const auto i = std::size_t(pair_index(s, a));
        return n_[i] > 0 ? m2_[i] / double(n_[i]) : 0.0;
    }
    long n_samples(int s, int a) const { return n_[std::size_t(pair_index(s, a))]; }

    double p_hat(const Counts& counts, int s, int a, int next) const {
        const long n = counts.total(s, a);
        return n > 0 ? double(counts.trans(s, a, next)) / double(n) : 0.0;
    }
    double var_p(const Counts& counts, int s, int a, int next) const {
        const double p = p_hat(counts, s, a, next);
        return p * (1.0 - p);
    }

    int pair_index(int s, int a) const { return pair_offset_[std::size_t(s)] + a; }

  private:
    int num_states_;
    indvec actions_per_state_;
    indvec pair_offset_;
    double r_max_;
    std::vector<long> n_;
    numvec mean_;
    numvec m2_;
};

/// Registers one executed step in both statistics objects.
void record(Counts& counts, EmpiricalModel& model, int s, int a, double r, int next);

}  // namespace tucrl
