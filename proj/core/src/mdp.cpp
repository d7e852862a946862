#include "tucrl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tucrl {

namespace {

std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

}  // namespace

Mdp::Mdp(int num_states, indvec actions_per_state, double r_max, int start_state)
    : num_states_(num_states),
      actions_per_state_(std::move(actions_per_state)),
      r_max_(r_max),
      start_state_(start_state) {
    if (num_states_ <= 0) throw std::invalid_argument("Mdp: need at least one state");
    if (int(actions_per_state_.size()) != num_states_)
        throw std::invalid_argument("Mdp: actions_per_state size mismatch");
    if (!(r_max_ > 0.0)) throw std::invalid_argument("Mdp: r_max must be positive");
    if (start_state_ < 0 || start_state_ >= num_states_)
        throw std::invalid_argument("Mdp: start state out of range");

    pair_offset_.resize(std::size_t(num_states_));
    int total = 0;
    for (int s = 0; s < num_states_; ++s) {
        if (actions_per_state_[std::size_t(s)] <= 0)
            throw std::invalid_argument("Mdp: every state needs at least one action");
        pair_offset_[std::size_t(s)] = total;
        total += actions_per_state_[std::size_t(s)];
    }
    max_actions_ = *std::max_element(actions_per_state_.begin(), actions_per_state_.end());
    reward_mean_.assign(std::size_t(total), 0.0);
    noise_.assign(std::size_t(total), RewardNoise{});
    rows_.assign(std::size_t(total), numvec(std::size_t(num_states_), 0.0));
    support_.assign(std::size_t(total), indvec{});
}

void Mdp::set_start_state(int s1) {
    if (s1 < 0 || s1 >= num_states_) throw std::invalid_argument("Mdp: start state out of range");
    start_state_ = s1;
}

void Mdp::set_reward(int s, int a, double mean, RewardNoise noise) {
    const auto i = std::size_t(pair_index(s, a));
    reward_mean_[i] = mean;
    noise_[i] = noise;
}

void Mdp::set_transition(int s, int a, numvec row) {
    if (int(row.size()) != num_states_)
        throw std::invalid_argument("Mdp: transition row size mismatch");
    const auto i = std::size_t(pair_index(s, a));
    support_[i].clear();
    for (int next = 0; next < num_states_; ++next)
        if (row[std::size_t(next)] > 0.0) support_[i].push_back(next);
    rows_[i] = std::move(row);
}

int Mdp::max_support() const {
    std::size_t best = 0;
    for (const auto& sup : support_) best = std::max(best, sup.size());
    return int(best);
}

void Mdp::validate() const {
    for (int s = 0; s < num_states_; ++s) {
        for (int a = 0; a < num_actions(s); ++a) {
            const auto i = std::size_t(pair_index(s, a));
            const numvec& row = rows_[i];
            double sum = 0.0;
            for (double p : row) {
                if (p < 0.0 || p > 1.0)
                    throw std::invalid_argument("Mdp: transition probability outside [0,1]");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw std::invalid_argument("Mdp: transition row does not sum to 1");
            const double r = reward_mean_[i];
            if (r < 0.0 || r > r_max_)
                throw std::invalid_argument("Mdp: mean reward outside [0, r_max]");
            const RewardNoise n = noise_[i];
            if (n.kind == NoiseKind::uniform) {
                if (r - n.param / 2 < -1e-15 || r + n.param / 2 > r_max_ + 1e-15)
                    throw std::invalid_argument(
                        "Mdp: uniform reward support outside [0, r_max]");
            }
        }
    }
}

int Mdp::sample_next(int s, int a, Rng& rng) const {
    const indvec& sup = support(s, a);
    if (sup.size() == 1) return sup.front();
    const numvec& row = transition_row(s, a);
    double u = rng.uniform01();
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < sup.size(); ++j) {
        acc += row[std::size_t(sup[j])];
        if (u < acc) return sup[j];
    }
    return sup.back();
}

double Mdp::sample_reward(int s, int a, Rng& rng) const {
    const auto i = std::size_t(pair_index(s, a));
    const double mean = reward_mean_[i];
    switch (noise_[i].kind) {
        case NoiseKind::deterministic: return mean;
        case NoiseKind::bernoulli:
            return rng.uniform01() < mean / r_max_ ? r_max_ : 0.0;
        case NoiseKind::uniform:
            return mean + noise_[i].param * (rng.uniform01() - 0.5);
    }
    return mean;
}

const char* noise_kind_name(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::deterministic: return "deterministic";
        case NoiseKind::bernoulli: return "bernoulli";
        case NoiseKind::uniform: return "uniform";
    }
    return "deterministic";
}

NoiseKind noise_kind_from_name(const std::string& name) {
    if (name == "deterministic") return NoiseKind::deterministic;
    if (name == "bernoulli") return NoiseKind::bernoulli;
    if (name == "uniform") return NoiseKind::uniform;
    throw std::invalid_argument("unknown reward noise kind: " + name);
}

void Mdp::write(std::ostream& out) const {
    out << "mdp v1\n";
    out << "states " << num_states_ << "\n";
    out << "rmax " << fmt12(r_max_) << "\n";
    out << "start " << start_state_ << "\n";
    out << "actions";
    for (int a : actions_per_state_) out << ' ' << a;
    out << "\n";
    for (int s = 0; s < num_states_; ++s) {
        for (int a = 0; a < num_actions(s); ++a) {
            const auto i = std::size_t(pair_index(s, a));
            out << s << ' ' << a << ' ' << fmt12(reward_mean_[i]) << ' '
                << noise_kind_name(noise_[i].kind) << ' ' << fmt12(noise_[i].param);
            for (double p : rows_[i]) out << ' ' << fmt12(p);
            out << "\n";
        }
    }
}

Mdp Mdp::read(std::istream& in) {
    std::string tag, version;
    in >> tag >> version;
    if (tag != "mdp" || version != "v1")
        throw std::invalid_argument("Mdp::read: not an mdp v1 file");
    std::string key;
    int S = 0, start = 0;
    double rmax = 0.0;
    in >> key >> S;
    if (key != "states") throw std::invalid_argument("Mdp::read: expected 'states'");
    in >> key >> rmax;
    if (key != "rmax") throw std::invalid_argument("Mdp::read: expected 'rmax'");
    in >> key >> start;
    if (key != "start") throw std::invalid_argument("Mdp::read: expected 'start'");
    in >> key;
    if (key != "actions") throw std::invalid_argument("Mdp::read: expected 'actions'");
    auto actions = indvec(std::size_t(S));
    for (int s = 0; s < S; ++s) in >> actions[std::size_t(s)];

    Mdp mdp(S, actions, rmax, start);
    const int pairs = mdp.num_pairs();
    for (int i = 0; i < pairs; ++i) {
        int s = 0, a = 0;
        double mean = 0.0, param = 0.0;
        std::string kind;
        if (!(in >> s >> a >> mean >> kind >> param))
            throw std::invalid_argument("Mdp::read: truncated pair line");
        auto row = numvec(std::size_t(S));
        for (int next = 0; next < S; ++next) in >> row[std::size_t(next)];
        if (!in) throw std::invalid_argument("Mdp::read: truncated transition row");
        mdp.set_reward(s, a, mean, RewardNoise{noise_kind_from_name(kind), param});
        mdp.set_transition(s, a, std::move(row));
    }
    return mdp;
}

std::string Mdp::to_string() const {
    std::ostringstream out;
    write(out);
    return out.str();
}

Mdp Mdp::from_string(const std::string& text) {
    std::istringstream in(text);
    return read(in);
}

}  // namespace tucrl
