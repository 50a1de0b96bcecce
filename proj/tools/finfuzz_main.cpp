// Copyright 2026 The finfuzz Authors
// SPDX-License-Identifier: Apache-2.0
//
// finfuzz: stateful fuzzer for simulated DeFi-style contracts with four
// financial-safety oracles (transfer arrival, balance conservation, swap-rate
// stability, fund-value stability).
//
// Exit codes: 0 clean run, 10 verdicts found, 20 replay mismatch,
// 64 usage error, 65 bad configuration, 66 missing/invalid input file.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "finfuzz/campaign.hpp"
#include "finfuzz/scenarios.hpp"

namespace {

using namespace finfuzz;

constexpr int kExitClean = 0;
constexpr int kExitVerdicts = 10;
constexpr int kExitMismatch = 20;
constexpr int kExitConfig = 65;
constexpr int kExitInput = 66;

struct RatOption {
    std::string text;
    Rat value;
    bool set = false;
};

void add_rat_option(CLI::App* app, const std::string& flag, RatOption& opt,
                    const std::string& help, const std::string& env) {
    app->add_option_function<std::string>(
           flag,
           [&opt](const std::string& s) {
               opt.text = s;
               opt.value = rat_parse(s);
               opt.set = true;
           },
           help)
        ->envname(env);
}

int cmd_fuzz(const CampaignConfig& cfg, const std::string& report_out) {
    Report report = run_campaign(cfg);
    if (!report_out.empty()) save_report(report, report_out);

    std::cout << "scenario:   " << cfg.scenario << "\n";
    std::cout << "executed:   " << report.executed << " / " << cfg.budget << " transactions\n";
    std::cout << "coverage:   " << report.coverage_executed << "/" << report.coverage_total
              << " callable pairs\n";
    if (report.first_detection.empty()) {
        std::cout << "verdicts:   none (clean)\n";
        return kExitClean;
    }
    std::cout << "verdicts:   " << report.verdicts.size() << " total\n";
    for (const auto& [cls, idx] : report.first_detection)
        std::cout << "  " << mevul_class_name(cls) << " first at tx " << idx << "\n";
    if (!report_out.empty()) std::cout << "report:     " << report_out << "\n";
    return kExitVerdicts;
}

int cmd_replay(const std::string& report_path) {
    Report report = load_report(report_path);
    ReplayResult result = replay_report(report);
    std::cout << "replayed " << report.poc_transactions.size() << " transactions, "
              << result.verdicts.size() << " verdicts\n";
    for (const auto& [cls, idx] : result.first_detection)
        std::cout << "  " << mevul_class_name(cls) << " first at tx " << idx << "\n";
    if (!result.matches) {
        std::cout << "MISMATCH: " << result.detail << "\n";
        return kExitMismatch;
    }
    std::cout << (result.verdicts.empty() ? "clean replay\n" : "reproduced\n");
    return result.verdicts.empty() ? kExitClean : kExitVerdicts;
}

int cmd_bench(const std::string& matrix_path, int seeds, const std::string& out_path) {
    BenchConfig cfg = load_bench_config(matrix_path);
    cfg.seeds = seeds;
    BenchResult result = measure_tx_to_detection(cfg);
    std::cout << result.format_table();
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw WorldError("cannot write '" + out_path + "'");
        out << "cell\tclass\tscenario\tseed\tfirst_tx\tfound\n";
        for (const auto& [key, st] : result.stats)
            for (const auto& s : st.samples)
                out << key.first << '\t' << mevul_class_name(key.second) << '\t' << s.scenario
                    << '\t' << s.seed << '\t' << s.first_tx << '\t' << (s.found ? 1 : 0)
                    << '\n';
        std::cout << "samples written to " << out_path << "\n";
    }
    return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
    register_builtin_behaviors();

    CLI::App app{"finfuzz: financial-invariant fuzzer for simulated DeFi contracts"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // ---- fuzz ----
    CampaignConfig cfg;
    std::string report_out;
    std::string strategy = "full";
    std::string reward_mode = "prose";
    std::string ta_mode = "corrected";
    std::string vs_scope = "scenario-default";
    RatOption tol_eps, lambda, explore_eps, stage_split;

    CLI::App* fuzz = app.add_subcommand("fuzz", "run a fuzzing campaign");
    fuzz->add_option("--scenario", cfg.scenario,
                     "registry scenario name or path to a world spec JSON file")
        ->required()
        ->envname("FINFUZZ_SCENARIO");
    fuzz->add_option("--rules", cfg.rules_path, "auditor rule file")
        ->envname("FINFUZZ_RULES");
    fuzz->add_option("--qtable", cfg.qtable_path, "q-table persistence file (loaded and saved)")
        ->envname("FINFUZZ_QTABLE");
    fuzz->add_option("--budget", cfg.budget, "maximum number of transactions")
        ->required()
        ->envname("FINFUZZ_BUDGET");
    fuzz->add_option("--seed", cfg.seed, "rng seed")->required()->envname("FINFUZZ_SEED");
    add_rat_option(fuzz, "--tol-eps", tol_eps, "swap-rate tolerance in [0,1] (default 1/20)",
                   "FINFUZZ_TOL_EPS");
    add_rat_option(fuzz, "--lambda", lambda, "fund-value band in [0,1] (default 1/5)",
                   "FINFUZZ_LAMBDA");
    add_rat_option(fuzz, "--explore-eps", explore_eps,
                   "exploration probability in [0,1] (default 1/10)", "FINFUZZ_EXPLORE_EPS");
    fuzz->add_option("--reward-mode", reward_mode, "prose|literal")
        ->envname("FINFUZZ_REWARD_MODE");
    fuzz->add_option("--ta-mode", ta_mode, "corrected|strict-paper")->envname("FINFUZZ_TA_MODE");
    add_rat_option(fuzz, "--stage-split", stage_split,
                   "fraction of the budget driven by rules (default 3/10)",
                   "FINFUZZ_STAGE_SPLIT");
    fuzz->add_flag("--early-stop", cfg.early_stop, "stop at the first verdict of any class")
        ->envname("FINFUZZ_EARLY_STOP");
    fuzz->add_option("--strategy", strategy, "full|random (default full)")
        ->envname("FINFUZZ_STRATEGY");
    fuzz->add_option("--vs-scope", vs_scope, "fund|benign|all (default: scenario's choice)")
        ->envname("FINFUZZ_VS_SCOPE");
    fuzz->add_option("--report-out", report_out, "where to write the report JSON")
        ->envname("FINFUZZ_REPORT_OUT");

    // ---- replay ----
    std::string report_path;
    CLI::App* replay = app.add_subcommand("replay", "re-execute a report's PoC and re-verify");
    replay->add_option("--report", report_path, "report JSON to replay")
        ->required()
        ->envname("FINFUZZ_REPORT");

    // ---- bench ----
    std::string matrix_path, bench_out;
    int seeds = 1;
    CLI::App* bench =
        app.add_subcommand("bench", "measure transactions-to-detection across strategies");
    bench->add_option("--matrix", matrix_path, "bench matrix JSON")
        ->required()
        ->envname("FINFUZZ_MATRIX");
    bench->add_option("--seeds", seeds, "seeds per cell (default 1)")
        ->envname("FINFUZZ_SEEDS");
    bench->add_option("--out", bench_out, "write per-sample TSV")->envname("FINFUZZ_OUT");

    // ---- scenarios ----
    CLI::App* scen = app.add_subcommand("scenarios", "list the seeded scenario corpus");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 64;
    }

    try {
        if (*fuzz) {
            if (tol_eps.set) cfg.tol_eps = tol_eps.value;
            if (lambda.set) cfg.lambda = lambda.value;
            if (explore_eps.set) cfg.explore_eps = explore_eps.value;
            if (stage_split.set) cfg.stage_split = stage_split.value;
            cfg.strategy = strategy_from_name(strategy);
            cfg.reward_mode = reward_mode_from_name(reward_mode);
            cfg.ta_mode = ta_mode_from_name(ta_mode);
            if (vs_scope != "scenario-default") cfg.vs_scope = vs_scope_from_name(vs_scope);
            return cmd_fuzz(cfg, report_out);
        }
        if (*replay) return cmd_replay(report_path);
        if (*bench) return cmd_bench(matrix_path, seeds, bench_out);
        if (*scen) {
            for (const auto& name : scenario_names()) {
                Scenario s = load_scenario(name);
                std::cout << name << "  labels={";
                bool first = true;
                for (auto e : s.labels) {
                    std::cout << (first ? "" : ",") << error_class_name(e);
                    first = false;
                }
                std::cout << "}\n  " << s.description << "\n";
            }
            return kExitClean;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const RuleParseError& e) {
        std::cerr << "rule file error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ExecError& e) {
        std::cerr << "transaction mismatch: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const WorldError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return 64;
}
