#include "tucrl/counts.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace tucrl {

namespace {

indvec make_offsets(const indvec& actions, int& total, int& max_actions) {
    indvec offsets(actions.size());
    total = 0;
    max_actions = 0;
    for (std::size_t s = 0; s < actions.size(); ++s) {
        if (actions[s] <= 0) throw std::invalid_argument("counts: empty action set");
        offsets[s] = total;
        total += actions[s];
        max_actions = std::max(max_actions, actions[s]);
    }
    return offsets;
}

}  // namespace

Counts::Counts(int num_states, indvec actions_per_state)
    : num_states_(num_states), actions_per_state_(std::move(actions_per_state)) {
    if (num_states_ <= 0 || int(actions_per_state_.size()) != num_states_)
        throw std::invalid_argument("counts: bad shape");
    int total = 0;
    pair_offset_ = make_offsets(actions_per_state_, total, max_actions_);
    committed_.assign(std::size_t(total), 0);
    visits_total_.assign(std::size_t(total), 0);
    state_committed_.assign(std::size_t(num_states_), 0);
    trans_total_.assign(std::size_t(total) * std::size_t(num_states_), 0);
    observed_.assign(std::size_t(total), indvec{});
}

Counts::Counts(const Mdp& shape) : Counts(shape.num_states(), shape.actions_per_state()) {}

void Counts::check_state(int s) const {
    if (s < 0 || s >= num_states_) throw std::out_of_range("counts: state out of range");
}

void Counts::check_pair(int s, int a) const {
    check_state(s);
    if (a < 0 || a >= num_actions(s)) throw std::out_of_range("counts: action out of range");
}

void Counts::start_episode() {
    ++k_;
    t_k_ = t_;
}

void Counts::record_step(int s, int a, int next) {
    check_pair(s, a);
    check_state(next);
    const auto i = std::size_t(pair_index(s, a));
    ++visits_total_[i];
    auto& cnt = trans_total_[i * std::size_t(num_states_) + std::size_t(next)];
    if (cnt == 0) {
        auto& obs = observed_[i];
        obs.insert(std::lower_bound(obs.begin(), obs.end(), next), next);
    }
    ++cnt;
    ++t_;
}

void Counts::end_episode() {
    for (int s = 0; s < num_states_; ++s) {
        long total = 0;
        for (int a = 0; a < num_actions(s); ++a) {
            const auto i = std::size_t(pair_index(s, a));
            committed_[i] = visits_total_[i];
            total += committed_[i];
        }
        state_committed_[std::size_t(s)] = total;
    }
}

void Counts::write_csv(std::ostream& out) const {
    out << "s,a,s_next,count\n";
    for (int s = 0; s < num_states_; ++s)
        for (int a = 0; a < num_actions(s); ++a)
            for (int next : observed(s, a))
                out << s << ',' << a << ',' << next << ',' << trans(s, a, next) << "\n";
}

EmpiricalModel::EmpiricalModel(int num_states, indvec actions_per_state, double r_max)
    : num_states_(num_states), actions_per_state_(std::move(actions_per_state)), r_max_(r_max) {
    int total = 0;
    int max_a = 0;
    pair_offset_ = make_offsets(actions_per_state_, total, max_a);
    n_.assign(std::size_t(total), 0);
    mean_.assign(std::size_t(total), 0.0);
    m2_.assign(std::size_t(total), 0.0);
}

EmpiricalModel::EmpiricalModel(const Mdp& shape)
    : EmpiricalModel(shape.num_states(), shape.actions_per_state(), shape.r_max()) {}

void EmpiricalModel::record_reward(int s, int a, double r) {
    if (s < 0 || s >= num_states_ || a < 0 || a >= actions_per_state_[std::size_t(s)])
        throw std::out_of_range("model: pair out of range");
    if (r < 0.0 || (r_max_ > 0.0 && r > r_max_ + 1e-12))
        throw std::invalid_argument("model: reward outside [0, r_max]");
    const auto i = std::size_t(pair_index(s, a));
    ++n_[i];
    const double delta = r - mean_[i];
    mean_[i] += delta / double(n_[i]);
    m2_[i] += delta * (r - mean_[i]);
}

void record(Counts& counts, EmpiricalModel& model, int s, int a, double r, int next) {
    counts.record_step(s, a, next);
    model.record_reward(s, a, r);
}

}  // namespace tucrl
