// Copyright 2026 The finfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <set>
#include <string>
#include <vector>

#include "finfuzz/learn.hpp"
#include "finfuzz/oracles.hpp"
#include "finfuzz/world.hpp"

namespace finfuzz {

// A seeded contract scenario: a deterministic world plus ground-truth labels
// and, for vulnerable scenarios, a known-exploit witness sequence.
struct Scenario {
    std::string name;
    std::string description;
    WorldSpec world_spec;
    LabelSet labels;  // headline vulnerability classes (empty = clean control)
    std::vector<Transaction> witness;
    // The exact class set the witness fires under default tolerances. Always a
    // superset of `labels`; conservation side effects of an exploit (e.g. an
    // attacker deposit crossing the benign boundary) legitimately add BC.
    std::set<MevulClass> witness_classes;
};

// Registers the built-in contract behaviors with the world's behavior
// registry. Idempotent; called implicitly by the scenario accessors and must
// be called before building user-supplied WorldSpec files that use these
// kinds.
void register_builtin_behaviors();

std::vector<std::string> scenario_names();
Scenario load_scenario(const std::string& name);
bool scenario_exists(const std::string& name);

// Executes the bundled witness on a fresh world and returns the full trace.
// Throws WorldError when the scenario bundles no witness.
std::vector<StepSnapshot> replay_witness(const Scenario& scenario);

}  // namespace finfuzz
