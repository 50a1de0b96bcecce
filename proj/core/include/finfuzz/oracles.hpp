// Copyright 2026 The finfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "finfuzz/world.hpp"

namespace finfuzz {

// The four financial-safety oracle classes.
enum class MevulClass { TA, BC, ES, VS };

const char* mevul_class_name(MevulClass c);
MevulClass mevul_class_from_name(const std::string& s);

enum class TaMode { Corrected, StrictPaper };

struct OracleConfig {
    Rat tol_eps = rat_of(1, 20);  // swap-rate tolerance, in [0, 1]
    Rat lambda = rat_of(1, 5);    // fund-value fluctuation coefficient, in [0, 1]
    TaMode ta_mode = TaMode::Corrected;
    std::optional<VsScope> vs_scope;  // overrides the world's declared scope

    void validate() const;
};

struct Verdict {
    MevulClass cls;
    int tx_index = 0;
    // Named evidence values, exact rationals rendered canonically. Every value
    // re-derives from the step snapshots.
    std::vector<std::pair<std::string, std::string>> evidence;
};

// Per-campaign evaluation state: the frozen v_0 for the fund-value check and
// the one-step price lag the swap-rate check needs. Never shared between
// campaigns.
class OracleContext {
  public:
    OracleContext(const WorldState& world, const OracleConfig& cfg);

    const Rat& v0() const { return v0_; }
    VsScope scope() const { return scope_; }
    const std::set<std::string>& es_tokens() const { return es_tokens_; }
    const std::optional<PriceMap>& prev_before_prices() const { return prev_before_; }

    void observe(const StepSnapshot& snap);  // advances the lag buffer

  private:
    Rat v0_;
    VsScope scope_;
    std::vector<std::string> scope_accounts_;
    std::set<std::string> es_tokens_;
    std::optional<PriceMap> prev_before_;

    friend std::optional<Verdict> check_fund_value_stability(const OracleContext&,
                                                             const StepSnapshot&,
                                                             const WorldState&,
                                                             const OracleConfig&);
};

// Transfer Arrival: a successful transfer-like payable call between two benign
// accounts must move exactly the declared amount and leave every attacker
// balance untouched.
std::optional<Verdict> check_transfer_arrival(const StepSnapshot& snap, const WorldState& world,
                                              const OracleConfig& cfg);

// Total Balance Conservation: a payable call must preserve the price-weighted
// sum of benign balances, both sides priced at the pre-transaction quotes.
std::optional<Verdict> check_balance_conservation(const StepSnapshot& snap,
                                                  const WorldState& world,
                                                  const OracleConfig& cfg);

// Swap Rate Stability: a quote that sat within tolerance of the observed
// reference (or of its own previous step) must not land outside it. May emit
// one verdict per token.
std::vector<Verdict> check_swap_rate_stability(const OracleContext& ctx, const StepSnapshot& snap,
                                               const WorldState& world, const OracleConfig& cfg);

// Fund Value Stability: the scoped portfolio value, at current internal
// quotes, must stay within the lambda-band around v_0 (initial balances at
// observed prices).
std::optional<Verdict> check_fund_value_stability(const OracleContext& ctx,
                                                  const StepSnapshot& snap,
                                                  const WorldState& world,
                                                  const OracleConfig& cfg);

// Runs every applicable check and advances the context's lag buffer.
std::vector<Verdict> evaluate_step(const WorldState& world, const StepSnapshot& snap,
                                   const OracleConfig& cfg, OracleContext& ctx);

// Transfer-like resolution, shared with the strategies and documented in the
// README matching table: canonical names transfer/transferFrom, or any payable
// function carrying (address, token, amount) parameters.
struct TransferShape {
    std::string from;
    std::string to;
    std::string token;
    Rat amount;
};

std::optional<TransferShape> transfer_shape(const Transaction& tx, const FunctionSpec& fn,
                                            const ContractInstance& contract);

}  // namespace finfuzz
