// Copyright 2026 The finfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "finfuzz/rng.hpp"
#include "finfuzz/world.hpp"

namespace finfuzz {

struct RuleParseError : std::runtime_error {
    int line;
    RuleParseError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

struct UnsatisfiableHint : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StrategyExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter generator hints carried by rule steps.
struct ParamHint {
    enum class Kind { SelfAddress, AttackerAddress, ContractAddress, Amount, TokenAny, TokenNamed, Flag };
    Kind kind;
    Rat lo, hi;         // Amount
    std::string token;  // TokenNamed
    bool flag = false;  // Flag
};

struct RuleStep {
    std::string abstract_name;
    std::vector<ParamHint> hints;
    int loop_group = -1;  // index into Rule::loops, -1 when not looped
};

struct LoopSpec {
    int min_reps = 1;
    int max_reps = 1;
    int first_step = 0;  // inclusive, 0-based into Rule::steps
    int last_step = 0;   // inclusive
};

struct Rule {
    std::string name;
    std::string source;  // free-text annotation
    std::vector<RuleStep> steps;
    std::vector<LoopSpec> loops;
};

// Line-oriented rule files:
//   rule <name>:
//     source <free text>
//     call <abstract-name>(<hint>, ...)
//     loop <a>-<b> {
//       call ...
//     }
// Hints: self-address | attacker-address | contract-address |
//        amount(<lo>-<hi>) | token(any) | token(<symbol>) | flag(true|false)
std::vector<Rule> parse_rules(const std::string& text);
std::vector<Rule> load_rules_file(const std::string& path);

// Name similarity: 1.0 exact (after camelCase/underscore normalization),
// 0.9 synonym-table hit, else normalized longest-common-subsequence.
double name_similarity(const std::string& abstract_name, const std::string& candidate);

constexpr double kMatchThreshold = 0.6;

std::optional<FunctionSpec> match_function(const std::string& abstract_name,
                                           const std::vector<FunctionSpec>& available);

// Cursor into the active rule. position 0 = not yet entered; after the last
// step the cursor resets to 1, so the pass restarts from step 2. An entry is
// released back to searching after two completed passes, otherwise a single
// rule would starve every other loaded rule.
struct RuleCursor {
    int rule_index = -1;  // into the engine's rule list
    int position = 0;     // 1-based step position, 0 = searching
    int loop_reps_left = 0;
    int loop_reps_drawn = 0;
    int passes_since_entry = 0;
};

// Default (hint-free) argument generation, shared by every strategy.
// Amounts come from a discrete log grid (mantissas 1,2,3,5,7 scaled by powers
// of ten) intersected with [lo, min(hi, funding balance)]; an empty
// intersection falls back to the raw template range so zero-capital senders
// can still exercise mint-like calls.
std::vector<Value> instantiate_params(const std::vector<ParamHint>& hints,
                                      const FunctionSpec& fn, const std::string& contract_name,
                                      const std::string& sender, const WorldState& world,
                                      Rng& rng, std::vector<std::string>* warnings);

class RuleEngine {
  public:
    RuleEngine(std::vector<Rule> rules, const WorldState& world);

    // Three-regime generation: uniform until a rule entry point fires, then
    // strict rule-following with uniform fallback, wrapping at rule end.
    Transaction next_transaction(WorldState& world, Rng& rng,
                                 std::vector<std::string>* warnings);

    const RuleCursor& cursor() const { return cursor_; }
    const std::vector<Rule>& rules() const { return rules_; }
    // True once every loaded rule has completed at least one full pass (the
    // stage-switch signal); vacuously false when rules exist but never all
    // finish, true when no rules are loaded.
    bool all_rules_passed() const;
    int passes(const std::string& rule_name) const;

    // A rule fits a world when every step matches some available function;
    // only fitting rules are eligible entry points.
    bool rule_fits(size_t rule_index) const { return eligible_[rule_index]; }

  private:
    std::vector<Rule> rules_;
    std::vector<bool> eligible_;
    RuleCursor cursor_;
    std::map<std::string, int> passes_;

    const RuleStep* step_at(int position) const;  // 1-based
    int advance_position(Rng& rng);               // next position per loop mechanics
};

// Uniform choice over the mutating callables (the regime-(a)/(c) and baseline
// sampling space). Throws StrategyExhausted when the world has none.
IntrospectionEntry uniform_callable(const Introspection& intro, Rng& rng);

std::string pick_sender(const WorldState& world, Rng& rng);

}  // namespace finfuzz
