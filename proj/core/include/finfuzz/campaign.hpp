// Copyright 2026 The finfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "finfuzz/learn.hpp"
#include "finfuzz/oracles.hpp"
#include "finfuzz/rules.hpp"
#include "finfuzz/scenarios.hpp"
#include "finfuzz/world.hpp"

namespace finfuzz {

extern const char* kToolVersion;
extern const char* kReportSchema;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Strategy { Full, Random };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& s);
const char* reward_mode_name(RewardMode m);
RewardMode reward_mode_from_name(const std::string& s);
const char* ta_mode_name(TaMode m);
TaMode ta_mode_from_name(const std::string& s);

struct CampaignConfig {
    std::string scenario;         // registry name, or a path to a WorldSpec file
    std::string rules_path;       // optional
    std::string qtable_path;      // optional: loaded before, saved after
    long budget = 1;
    uint64_t seed = 0;
    Rat tol_eps = rat_of(1, 20);
    Rat lambda = rat_of(1, 5);
    Rat explore_eps = rat_of(1, 10);
    RewardMode reward_mode = RewardMode::Prose;
    TaMode ta_mode = TaMode::Corrected;
    Rat stage_split = rat_of(3, 10);  // fraction of budget driven by rules
    bool early_stop = false;
    Strategy strategy = Strategy::Full;
    std::optional<VsScope> vs_scope;  // overrides the scenario's declared scope

    void validate() const;  // throws ConfigError
};

struct Report {
    std::string generated_at;  // the only non-reproducible field
    CampaignConfig config;
    WorldSpec world_spec;  // embedded so replay is hermetic
    long executed = 0;
    long stage_switch_at = 0;  // first self-learning step (executed+1 if never reached)
    long coverage_executed = 0;
    long coverage_total = 0;
    std::map<MevulClass, long> first_detection;  // transactions to first verdict
    std::vector<Verdict> verdicts;
    std::vector<Transaction> poc_transactions;  // shared prefix; per-class PoC =
                                                // first first_detection[c] entries
    std::vector<std::string> warnings;

    bool clean() const { return verdicts.empty(); }
};

Report run_campaign(const CampaignConfig& cfg);

std::string report_to_json_text(const Report& report);
Report report_from_json_text(const std::string& text);
void save_report(const Report& report, const std::string& path);
Report load_report(const std::string& path);

// Re-executes the report's PoC prefix on a fresh world and re-evaluates the
// oracles. `matches` is true when every recorded class fires first at its
// recorded index.
struct ReplayResult {
    bool matches = false;
    std::vector<Verdict> verdicts;
    std::map<MevulClass, long> first_detection;
    std::string detail;
};

ReplayResult replay_report(const Report& report);

// ---------------------------------------------------------------------------
// Detection-speed measurement (strategy comparison harness)
// ---------------------------------------------------------------------------

struct BenchCell {
    std::string name;
    Strategy strategy = Strategy::Full;
};

struct BenchConfig {
    std::vector<BenchCell> cells;
    std::vector<std::string> scenarios;  // registry names
    long budget = 10000;
    int seeds = 1;
    std::string rules_path;
    Rat tol_eps = rat_of(1, 20);
    Rat lambda = rat_of(1, 5);
    Rat explore_eps = rat_of(1, 10);
};

BenchConfig bench_config_from_json_text(const std::string& text);
BenchConfig load_bench_config(const std::string& path);

struct BenchSample {
    std::string scenario;
    uint64_t seed = 0;
    long first_tx = 0;  // censored at budget+1 when the class was not found
    bool found = false;
};

struct BenchCellClassStats {
    std::vector<BenchSample> samples;
    double mean = 0.0;
    std::optional<double> variance;  // undefined for a single sample
};

struct BenchResult {
    // (cell name, class) -> stats over all (labeled scenario, seed) pairs
    std::map<std::pair<std::string, MevulClass>, BenchCellClassStats> stats;
    std::vector<std::string> warnings;
    long budget = 0;

    std::string format_table() const;
};

BenchResult measure_tx_to_detection(const BenchConfig& cfg);

// One-sided sign test helper: probability of at least `wins` successes in
// `trials` fair coin flips (ties must be excluded by the caller).
double sign_test_p_value(int wins, int trials);

}  // namespace finfuzz
