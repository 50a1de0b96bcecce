// Copyright 2026 The finfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "finfuzz/oracles.hpp"
#include "finfuzz/rng.hpp"
#include "finfuzz/rules.hpp"
#include "finfuzz/world.hpp"

namespace finfuzz {

// Detected error class for the fuzzing state; None encodes "no error".
enum class ErrorClass { None, TA, BC, ES, VS };

const char* error_class_name(ErrorClass e);
ErrorClass error_class_from_name(const std::string& s);
ErrorClass error_class_of(MevulClass c);

// Folds a step's verdicts into one error class; priority TA < BC < ES < VS,
// highest wins.
ErrorClass fold_verdicts(const std::vector<Verdict>& verdicts);

using LabelSet = std::set<ErrorClass>;  // never contains None

// Three-valued measurement:
//   1    when L != {} and e in L
//   1/2  when L == {} and e != none
//   0    otherwise
Rat measure(ErrorClass e, const LabelSet& labels);

enum class RewardMode {
    Prose,    // r = 1 iff the state improved (m_curr > m_prev)
    Literal,  // r = 1 iff m_curr <= m_prev, as printed
};

int reward(const Rat& m_prev, const Rat& m_curr, RewardMode mode);

// Markov state key: (function identity of the current transaction, detected
// error class). The label set is campaign-constant and the measurement is
// derived, so neither belongs in the key.
struct StateKey {
    std::string fn_id;  // "Contract.function", empty before the first step
    ErrorClass e = ErrorClass::None;

    auto operator<=>(const StateKey&) const = default;
};

struct QEntry {
    Rat q = 1;   // optimistic prior
    long n = 0;  // visit count
};

class QTable {
  public:
    // Unvisited entries read (q = 1, n = 0).
    QEntry get(const StateKey& s, const std::string& action) const;

    // Recursive update: with 1-based visit count n after increment,
    // Q_{n+1} = ((n-1)/n) * Q_n + (r*m)/n. Equals the running average of r*m;
    // the optimistic prior drops out at the first observation.
    void update(const StateKey& s, const std::string& action, int r, const Rat& m);

    size_t size() const { return entries_.size(); }

    std::string serialize() const;  // versioned structured text
    static QTable deserialize(const std::string& text);
    void save(const std::string& path) const;
    static QTable load(const std::string& path);

    // Offline visit-weighted merge: n' = sum(n_i), q' = sum(q_i * n_i) / n'.
    static QTable merge(const std::vector<QTable>& tables);

    const std::map<std::pair<StateKey, std::string>, QEntry>& entries() const {
        return entries_;
    }

  private:
    std::map<std::pair<StateKey, std::string>, QEntry> entries_;
};

struct PolicyConfig {
    Rat explore_eps = rat_of(1, 10);  // in [0, 1]

    void validate() const;
};

// Epsilon-greedy selection: the argmax (ties resolve to the lowest candidate
// index) is emitted with probability 1-eps, every other candidate with
// probability eps/(|candidates|-1). A single candidate is emitted surely.
std::string select_next(const QTable& table, const StateKey& state,
                        const std::vector<std::string>& candidates, const PolicyConfig& cfg,
                        Rng& rng);

// Campaign-local learner: folds verdicts into the fuzzing state, applies the
// Q-update for the previous (state, action) pair, and emits the next
// transaction via the epsilon-policy.
class Learner {
  public:
    Learner(LabelSet labels, PolicyConfig policy, RewardMode mode)
        : labels_(std::move(labels)), policy_(policy), mode_(mode) {}

    // Observes the oracle outcome of an executed transaction (any stage, so
    // the rule phase warm-starts the table).
    void observe(const std::string& fn_id, const std::vector<Verdict>& verdicts, QTable& table);

    // Chooses the next transaction with the epsilon-policy over the mutating
    // callables catalogued by introspection.
    Transaction next_transaction(WorldState& world, const QTable& table, Rng& rng,
                                 std::vector<std::string>* warnings);

    const StateKey& state() const { return state_; }
    const Rat& last_measurement() const { return m_prev_; }

  private:
    LabelSet labels_;
    PolicyConfig policy_;
    RewardMode mode_;
    StateKey state_;
    Rat m_prev_ = 0;
};

}  // namespace finfuzz
