#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "tucrl/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Average-reward optimistic RL experiment driver"};
    app.require_subcommand(1);

    std::string config_path, out_override, logs_dir, env_spec, env_out;
    int workers = 0;

    auto* run = app.add_subcommand("run", "Run a multi-seed regret experiment");
    run->add_option("--config", config_path, "Experiment config file")->required();
    run->add_option("--workers", workers, "Parallel workers over (agent, seed) pairs");
    run->add_option("--out", out_override, "Output directory (overrides the config)");

    auto* verify = app.add_subcommand("verify", "Re-check the lemma inequalities from run logs");
    verify->add_option("--logs", logs_dir, "Directory with *_steps.csv/*_meta.txt logs")
        ->required();

    auto* env = app.add_subcommand("env", "Environment utilities");
    auto* env_export = env->add_subcommand("export", "Write an environment in the MDP text format");
    env_export->add_option("--spec", env_spec, "Environment spec, e.g. three_state:delta=0.005")
        ->required();
    env_export->add_option("--out", env_out, "Output file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            tucrl::ExperimentConfig cfg = tucrl::ExperimentConfig::load(config_path);
            if (workers > 0) cfg.workers = workers;
            if (!out_override.empty()) cfg.out_dir = out_override;
            const tucrl::AggregateResult result = tucrl::run_experiment(cfg);
            for (const auto& agent : result.agents) {
                std::cout << agent.agent << ": final regret mean " << agent.mean.back()
                          << " (+/- " << agent.ci_half.back() << "), max Z_T " << agent.max_z
                          << ", max m " << agent.max_m << "\n";
            }
            if (!result.all_pass()) {
                for (const auto& f : result.failures) std::cerr << "LEMMA VIOLATION: " << f << "\n";
                return 1;
            }
            std::cout << "all lemma checks passed\n";
            return 0;
        }
        if (verify->parsed()) {
            const tucrl::LemmaReport report = tucrl::verify_lemmas(logs_dir);
            std::cout << "checked " << report.runs_checked << " runs; geom bound min "
                      << report.geom_min << "\n";
            for (const auto& v : report.violations) std::cerr << "VIOLATION: " << v << "\n";
            if (!report.pass()) return 1;
            std::cout << "all lemma checks passed\n";
            return 0;
        }
        if (env_export->parsed()) {
            const tucrl::Mdp mdp = tucrl::EnvSpec::parse(env_spec).build();
            if (env_out.empty()) {
                mdp.write(std::cout);
            } else {
                std::ofstream out(env_out);
                if (!out) throw std::runtime_error("cannot open " + env_out);
                mdp.write(out);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
