#include "tucrl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fs = std::filesystem;

namespace tucrl {

namespace {

std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> parse_kv(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value, got: " + line);
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
    auto kv = parse_kv(in);
    ExperimentConfig cfg;
    AgentConfig base;

    if (auto it = kv.find("env"); it != kv.end()) cfg.env = EnvSpec::parse(it->second);
    if (auto it = kv.find("horizon"); it != kv.end()) cfg.horizon = std::stol(it->second);
    if (auto it = kv.find("seeds"); it != kv.end()) cfg.n_seeds = std::stoi(it->second);
    if (auto it = kv.find("base_seed"); it != kv.end()) cfg.base_seed = std::stoull(it->second);
    if (auto it = kv.find("checkpoints"); it != kv.end()) cfg.checkpoints = std::stoi(it->second);
    if (auto it = kv.find("workers"); it != kv.end()) cfg.workers = std::stoi(it->second);
    if (auto it = kv.find("out"); it != kv.end()) cfg.out_dir = it->second;
    if (auto it = kv.find("confidence"); it != kv.end()) base.delta = std::stod(it->second);
    if (auto it = kv.find("shrink"); it != kv.end())
        base.shrink_r = base.shrink_p = std::stod(it->second);
    if (auto it = kv.find("shrink_r"); it != kv.end()) base.shrink_r = std::stod(it->second);
    if (auto it = kv.find("shrink_p"); it != kv.end()) base.shrink_p = std::stod(it->second);
    if (auto it = kv.find("eps_scale"); it != kv.end()) base.eps_scale = std::stod(it->second);
    if (auto it = kv.find("variant"); it != kv.end())
        base.tucrl_variant = set_variant_from_name(it->second);

    std::vector<std::string> agent_names = {"ucrl", "tucrl"};
    if (auto it = kv.find("agents"); it != kv.end()) agent_names = split_list(it->second);
    for (const std::string& name : agent_names) {
        AgentConfig a = base;
        a.algorithm = algorithm_from_name(name);
        cfg.agents.push_back(a);
    }

    if (cfg.horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");
    if (cfg.n_seeds < 1) throw std::invalid_argument("config: seeds must be >= 1");
    if (cfg.agents.empty()) throw std::invalid_argument("config: no agents");
    if (!(base.delta > 0.0 && base.delta < 1.0))
        throw std::invalid_argument("config: confidence must lie in (0, 1)");
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    return parse(in);
}

std::vector<long> geometric_checkpoints(long horizon, int count) {
    std::vector<long> out;
    for (int j = 1; j <= count; ++j) {
        const long t =
            std::lround(std::pow(double(horizon), double(j) / double(count)));
        const long clamped = std::min(horizon, std::max(1L, t));
        if (out.empty() || clamped > out.back()) out.push_back(clamped);
    }
    if (out.empty() || out.back() != horizon) out.push_back(horizon);
    return out;
}

double geom_bound_min() {
    double lo = kInf;
    const int n = 500;
    for (int i = 0; i <= n; ++i) {
        const double x = std::pow(10.0, -6.0 + 5.0 * double(i) / double(n));
        lo = std::min(lo, std::exp(std::log1p(-x) / x));
    }
    return lo;
}

namespace {

struct RunSummary {
    int agent_idx = 0;
    int seed_idx = 0;
    Diagnostics diag;
    numvec at_checkpoints;
    double final_regret = 0.0;
};

void write_meta(const fs::path& path, const ExperimentConfig& cfg, const AgentConfig& agent,
                std::uint64_t seed, const EnvAnalysis& analysis, const Mdp& env) {
    std::ofstream out(path);
    out << "agent = " << algorithm_name(agent.algorithm) << "\n";
    out << "seed = " << seed << "\n";
    out << "env = " << cfg.env.name() << "\n";
    out << "S = " << env.num_states() << "\n";
    out << "A = " << env.max_actions() << "\n";
    out << "SC = " << analysis.decomp.comm.size() << "\n";
    out << "T = " << cfg.horizon << "\n";
    out << "delta = " << fmt12(agent.delta) << "\n";
    out << "g_star = " << fmt12(analysis.g_star) << "\n";
    out << "DC = " << fmt12(analysis.decomp.comm_diameter) << "\n";
}

RunSummary execute_run(const ExperimentConfig& cfg, const Mdp& env, const EnvAnalysis& analysis,
                       const std::vector<long>& checkpoints, int agent_idx, int seed_idx,
                       const fs::path& logs_dir) {
    AgentConfig agent = cfg.agents[std::size_t(agent_idx)];
    agent.seed = cfg.base_seed + std::uint64_t(seed_idx);
    const RunLog log = [&] {
        RunLog l = run_agent(env, agent, cfg.horizon, &analysis);
        l.env_name = cfg.env.name();
        return l;
    }();

    const std::string stem =
        std::string(algorithm_name(agent.algorithm)) + "_seed" + std::to_string(agent.seed);
    {
        std::ofstream out(logs_dir / (stem + "_steps.csv"));
        log.write_steps_csv(out);
    }
    {
        std::ofstream out(logs_dir / (stem + "_episodes.csv"));
        log.write_episodes_csv(out);
    }
    write_meta(logs_dir / (stem + "_meta.txt"), cfg, agent, agent.seed, analysis, env);

    RunSummary sum;
    sum.agent_idx = agent_idx;
    sum.seed_idx = seed_idx;
    sum.diag = diagnostics(log);
    const numvec curve = regret_curve(log, analysis.g_star);
    for (long t : checkpoints) sum.at_checkpoints.push_back(curve[std::size_t(t - 1)]);
    sum.final_regret = curve.back();
    return sum;
}

}  // namespace

AggregateResult run_experiment(const ExperimentConfig& cfg) {
    const Mdp env = cfg.env.build();
    const EnvAnalysis analysis = analyze_env(env);
    const std::vector<long> checkpoints = geometric_checkpoints(cfg.horizon, cfg.checkpoints);

    const fs::path out_dir(cfg.out_dir);
    const fs::path logs_dir = out_dir / "logs";
    fs::create_directories(logs_dir);

    struct Task {
        int agent_idx, seed_idx;
    };
    std::vector<Task> tasks;
    for (int a = 0; a < int(cfg.agents.size()); ++a)
        for (int s = 0; s < cfg.n_seeds; ++s) tasks.push_back({a, s});
    std::vector<RunSummary> results(tasks.size());

    const int workers = std::max(1, std::min(cfg.workers, int(tasks.size())));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;
    auto work = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size() || failed.load()) break;
            try {
                results[i] = execute_run(cfg, env, analysis, checkpoints, tasks[i].agent_idx,
                                         tasks[i].seed_idx, logs_dir);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) first_error = e.what();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw std::runtime_error("run_experiment: " + first_error);

    AggregateResult agg;
    agg.geom_min = geom_bound_min();

    std::ofstream lemmas(out_dir / "lemmas.txt");
    lemmas << "geom_bound: min over [1e-06, 0.1] of (1-x)^(1/x) = " << fmt12(agg.geom_min)
           << " >= 1/3: " << (agg.geom_min >= 1.0 / 3.0 ? "PASS" : "FAIL") << "\n";
    if (agg.geom_min < 1.0 / 3.0) agg.failures.push_back("geom_bound grid check failed");

    for (int a = 0; a < int(cfg.agents.size()); ++a) {
        const std::string name = algorithm_name(cfg.agents[std::size_t(a)].algorithm);
        AgentAggregate out;
        out.agent = name;
        out.checkpoints = checkpoints;
        out.mean.assign(checkpoints.size(), 0.0);
        out.ci_half.assign(checkpoints.size(), 0.0);

        std::vector<const RunSummary*> runs;
        for (const RunSummary& r : results)
            if (r.agent_idx == a) runs.push_back(&r);
        std::sort(runs.begin(), runs.end(), [](const RunSummary* x, const RunSummary* y) {
            return x->seed_idx < y->seed_idx;
        });
        const double n = double(runs.size());
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            double mean = 0.0;
            for (const RunSummary* r : runs) mean += r->at_checkpoints[c];
            mean /= n;
            double var = 0.0;
            for (const RunSummary* r : runs) {
                const double d = r->at_checkpoints[c] - mean;
                var += d * d;
            }
            const double stderr_ = runs.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
            out.mean[c] = mean;
            out.ci_half[c] = 1.96 * stderr_;
        }

        std::ofstream diag_csv(out_dir / ("diagnostics_" + name + ".csv"));
        diag_csv << "seed,T,Z_T,Z_T_bound,m,m_bound,nu_violations,optimism_violations,"
                    "span_violations,final_regret\n";
        for (const RunSummary* r : runs) {
            const std::uint64_t seed = cfg.base_seed + std::uint64_t(r->seed_idx);
            out.final_regret.push_back(r->final_regret);
            out.max_z = std::max(out.max_z, r->diag.z_t);
            out.max_m = std::max(out.max_m, r->diag.episodes);
            const Diagnostics& d = r->diag;
            diag_csv << seed << ',' << cfg.horizon << ',' << d.z_t << ',' << fmt12(d.z_bound)
                     << ',' << d.episodes << ',' << fmt12(d.episode_bound) << ','
                     << d.stopping_violations << ',' << d.optimism_violations << ','
                     << d.span_violations << ',' << fmt12(r->final_regret) << "\n";

            auto note = [&](const std::string& what) {
                const std::string msg = "agent " + name + " seed " + std::to_string(seed) + ": " + what;
                agg.failures.push_back(msg);
                lemmas << msg << ": FAIL\n";
                ++out.violations;
            };
            lemmas << "run " << name << " seed " << seed << ": Z_T=" << d.z_t
                   << " <= " << fmt12(d.z_bound) << " "
                   << (double(d.z_t) <= d.z_bound ? "PASS" : "FAIL") << "; m=" << d.episodes
                   << " <= " << fmt12(d.episode_bound) << " "
                   << (double(d.episodes) <= d.episode_bound ? "PASS" : "FAIL")
                   << "; nu<=N+ " << (d.stopping_violations == 0 ? "PASS" : "FAIL") << "\n";
            if (double(d.z_t) > d.z_bound) note("Z_T bound violated");
            if (double(d.episodes) > d.episode_bound) note("episode bound violated");
            if (d.stopping_violations > 0) note("stopping-condition inequality violated");
        }

        std::ofstream regret_csv(out_dir / ("regret_" + name + ".csv"));
        regret_csv << "checkpoint,mean,ci_lo,ci_hi\n";
        for (std::size_t c = 0; c < checkpoints.size(); ++c)
            regret_csv << checkpoints[c] << ',' << fmt12(out.mean[c]) << ','
                       << fmt12(out.mean[c] - out.ci_half[c]) << ','
                       << fmt12(out.mean[c] + out.ci_half[c]) << "\n";

        agg.agents.push_back(std::move(out));
    }
    lemmas << "OVERALL: " << (agg.failures.empty() ? "PASS" : "FAIL") << "\n";
    return agg;
}

namespace {

struct MetaInfo {
    std::string agent, env;
    std::uint64_t seed = 0;
    int S = 0, A = 0, SC = 0;
    long T = 0;
    fs::path steps, episodes;
};

MetaInfo read_meta(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("verify: cannot open " + path.string());
    auto kv = parse_kv(in);
    MetaInfo m;
    m.agent = kv.at("agent");
    m.env = kv.at("env");
    m.seed = std::stoull(kv.at("seed"));
    m.S = std::stoi(kv.at("S"));
    m.A = std::stoi(kv.at("A"));
    m.SC = std::stoi(kv.at("SC"));
    m.T = std::stol(kv.at("T"));
    const std::string stem = m.agent + "_seed" + std::to_string(m.seed);
    m.steps = path.parent_path() / (stem + "_steps.csv");
    m.episodes = path.parent_path() / (stem + "_episodes.csv");
    return m;
}

}  // namespace

LemmaReport verify_lemmas(const std::string& logs_dir) {
    LemmaReport report;
    report.geom_min = geom_bound_min();
    if (report.geom_min < 1.0 / 3.0)
        report.violations.push_back("geom_bound grid check failed: min = " +
                                    fmt12(report.geom_min));

    std::vector<fs::path> metas;
    for (const auto& entry : fs::directory_iterator(logs_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 9 && name.substr(name.size() - 9) == "_meta.txt")
            metas.push_back(entry.path());
    }
    std::sort(metas.begin(), metas.end());

    for (const fs::path& meta_path : metas) {
        const MetaInfo meta = read_meta(meta_path);
        const std::string tag = "run " + meta.agent + " seed " + std::to_string(meta.seed);
        ++report.runs_checked;

        std::ifstream steps(meta.steps);
        if (!steps) {
            report.violations.push_back(tag + ": missing steps log");
            continue;
        }
        std::string header;
        std::getline(steps, header);

        const int pairs = meta.S * meta.A;
        std::vector<long> committed(std::size_t(pairs), 0), nu(std::size_t(pairs), 0);
        long z_t = 0, steps_seen = 0;
        int cur_k = 1, max_k = 0;
        bool order_ok = true;
        long prev_t = 0;

        auto close_episode = [&](int k) {
            for (int i = 0; i < pairs; ++i) {
                if (nu[std::size_t(i)] > std::max(1L, committed[std::size_t(i)]))
                    report.violations.push_back(tag + " episode " + std::to_string(k) +
                                                ": nu exceeds max(1, N) for pair " +
                                                std::to_string(i));
                committed[std::size_t(i)] += nu[std::size_t(i)];
                nu[std::size_t(i)] = 0;
            }
        };

        std::string line;
        while (std::getline(steps, line)) {
            if (line.empty()) continue;
            long t;
            int k, s, a, next;
            double r;
            if (std::sscanf(line.c_str(), "%ld,%d,%d,%d,%lf,%d", &t, &k, &s, &a, &r, &next) != 6) {
                report.violations.push_back(tag + ": malformed step line: " + line);
                break;
            }
            if (t != prev_t + 1) order_ok = false;
            prev_t = t;
            if (k != cur_k) {
                close_episode(cur_k);
                cur_k = k;
            }
            max_k = std::max(max_k, k);
            const int idx = s * meta.A + a;
            const double thresh = std::sqrt(double(t) / (double(meta.S) * double(meta.A)));
            if (double(std::max(1L, committed[std::size_t(idx)] - 1)) <= thresh) ++z_t;
            ++nu[std::size_t(idx)];
            ++steps_seen;
        }
        close_episode(cur_k);

        if (!order_ok) report.violations.push_back(tag + ": step times are not contiguous");
        if (steps_seen != meta.T)
            report.violations.push_back(tag + ": trace length " + std::to_string(steps_seen) +
                                        " does not match horizon " + std::to_string(meta.T));

        const double sc = double(meta.SC), a_ = double(meta.A), t_ = double(meta.T);
        const double z_bound = 2.0 * std::sqrt(sc * a_ * t_) + 2.0 * sc * a_;
        const double m_bound = 1.0 + 2.0 * sc * a_ + sc * a_ * std::log2(t_ / (sc * a_)) + sc;
        if (double(z_t) > z_bound)
            report.violations.push_back(tag + ": Z_T=" + std::to_string(z_t) + " exceeds bound " +
                                        fmt12(z_bound));
        if (double(max_k) > m_bound)
            report.violations.push_back(tag + ": m=" + std::to_string(max_k) +
                                        " exceeds bound " + fmt12(m_bound));

        std::ifstream episodes(meta.episodes);
        if (!episodes) {
            report.violations.push_back(tag + ": missing episodes log");
        } else {
            std::getline(episodes, header);
            int rows = 0;
            while (std::getline(episodes, line))
                if (!line.empty()) ++rows;
            if (rows != max_k)
                report.violations.push_back(tag + ": episode log has " + std::to_string(rows) +
                                            " rows but the trace shows " + std::to_string(max_k) +
                                            " episodes");
        }
    }
    return report;
}

}  // namespace tucrl
