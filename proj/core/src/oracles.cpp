// Copyright 2026 The finfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "finfuzz/oracles.hpp"

#include <algorithm>

namespace finfuzz {

const char* mevul_class_name(MevulClass c) {
    switch (c) {
        case MevulClass::TA: return "TA";
        case MevulClass::BC: return "BC";
        case MevulClass::ES: return "ES";
        case MevulClass::VS: return "VS";
    }
    return "?";
}

MevulClass mevul_class_from_name(const std::string& s) {
    if (s == "TA") return MevulClass::TA;
    if (s == "BC") return MevulClass::BC;
    if (s == "ES") return MevulClass::ES;
    if (s == "VS") return MevulClass::VS;
    throw WorldError("unknown MEVul class: '" + s + "'");
}

void OracleConfig::validate() const {
    if (tol_eps < 0 || tol_eps > 1) throw WorldError("tol_eps must be within [0, 1]");
    if (lambda < 0 || lambda > 1) throw WorldError("lambda must be within [0, 1]");
}

// ---------------------------------------------------------------------------
// Context
// ---------------------------------------------------------------------------

OracleContext::OracleContext(const WorldState& world, const OracleConfig& cfg) {
    scope_ = cfg.vs_scope.value_or(world.vs_scope);
    scope_accounts_ = world.scope_accounts(scope_);
    v0_ = total_value(world, scope_accounts_, PriceSource::Observed);
    es_tokens_ = introspect(world).probes.price_probe_tokens;
}

void OracleContext::observe(const StepSnapshot& snap) {
    prev_before_ = snap.prices_before;
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

namespace {

Rat table_lookup(const BalanceTable& t, const std::string& account, const std::string& token) {
    auto it = t.find({account, token});
    return it == t.end() ? Rat(0) : it->second;
}

void put(std::vector<std::pair<std::string, std::string>>& ev, const std::string& k,
         const Rat& v) {
    ev.emplace_back(k, rat_str(v));
}

// |x/y - 1|, or nullopt when the baseline y is zero.
std::optional<Rat> deviation(const Rat& x, const Rat& y) {
    if (y == 0) return std::nullopt;
    return Rat(abs(x / y - 1));
}

bool within(const std::optional<Rat>& dev, const Rat& eps) {
    return dev.has_value() && *dev <= eps;
}

bool beyond(const std::optional<Rat>& dev, const Rat& eps) {
    return !dev.has_value() || *dev > eps;  // a vanished baseline is unstable
}

}  // namespace

std::optional<TransferShape> transfer_shape(const Transaction& tx, const FunctionSpec& fn,
                                            const ContractInstance& contract) {
    auto managed_token = [&]() -> std::optional<std::string> {
        if (contract.managed_tokens.size() == 1) return contract.managed_tokens.front();
        return std::nullopt;
    };
    if (fn.name == "transfer" && fn.params.size() >= 2 &&
        fn.params[0].kind == ParamKind::Address && fn.params[1].kind == ParamKind::Amount) {
        auto tok = managed_token();
        if (!tok) return std::nullopt;
        return TransferShape{tx.sender, tx.args[0].text, *tok, tx.args[1].amount};
    }
    if (fn.name == "transferFrom" && fn.params.size() >= 3 &&
        fn.params[0].kind == ParamKind::Address && fn.params[1].kind == ParamKind::Address &&
        fn.params[2].kind == ParamKind::Amount) {
        auto tok = managed_token();
        if (!tok) return std::nullopt;
        return TransferShape{tx.args[0].text, tx.args[1].text, *tok, tx.args[2].amount};
    }
    // Generic shape: first address is the recipient, explicit token and amount.
    if (!fn.payable) return std::nullopt;
    std::optional<size_t> addr_i, tok_i, amt_i;
    for (size_t i = 0; i < fn.params.size(); ++i) {
        if (fn.params[i].kind == ParamKind::Address && !addr_i) addr_i = i;
        if (fn.params[i].kind == ParamKind::Token && !tok_i) tok_i = i;
        if (fn.params[i].kind == ParamKind::Amount && !amt_i) amt_i = i;
    }
    if (addr_i && tok_i && amt_i)
        return TransferShape{tx.sender, tx.args[*addr_i].text, tx.args[*tok_i].text,
                             tx.args[*amt_i].amount};
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Transfer Arrival
// ---------------------------------------------------------------------------

std::optional<Verdict> check_transfer_arrival(const StepSnapshot& snap, const WorldState& world,
                                              const OracleConfig& cfg) {
    if (!snap.receipt.success) return std::nullopt;
    const ContractInstance* contract = world.find_contract(snap.tx.target);
    if (!contract) return std::nullopt;
    const FunctionSpec* fn = contract->find_function(snap.tx.function);
    if (!fn || !fn->payable || fn->readonly) return std::nullopt;
    auto shape = transfer_shape(snap.tx, *fn, *contract);
    if (!shape) return std::nullopt;

    const Address* from = world.find_account(shape->from);
    const Address* to = world.find_account(shape->to);
    if (!from || !to || !is_benign(from->role) || !is_benign(to->role)) return std::nullopt;

    Rat sender_decrease = table_lookup(snap.balances_before, shape->from, shape->token) -
                          table_lookup(snap.balances_after, shape->from, shape->token);
    Rat recipient_increase = table_lookup(snap.balances_after, shape->to, shape->token) -
                             table_lookup(snap.balances_before, shape->to, shape->token);
    // The corrected contract is decrease == increase == v; the strict-paper
    // mode keeps the printed "= 2v" for auditability.
    Rat expected = cfg.ta_mode == TaMode::StrictPaper ? Rat(2 * shape->amount) : shape->amount;
    bool exact = sender_decrease == expected && recipient_increase == expected;
    if (shape->from == shape->to) exact = sender_decrease == 0 && recipient_increase == 0;

    std::vector<std::pair<std::string, std::string>> attacker_changes;
    for (const auto& a : world.attacker_accounts()) {
        for (const auto& t : world.tokens) {
            Rat before = table_lookup(snap.balances_before, a, t.symbol);
            Rat after = table_lookup(snap.balances_after, a, t.symbol);
            if (before != after)
                attacker_changes.emplace_back("attacker_delta:" + a + ":" + t.symbol,
                                              rat_str(Rat(after - before)));
        }
    }

    if (exact && attacker_changes.empty()) return std::nullopt;

    Verdict v{MevulClass::TA, snap.index, {}};
    v.evidence.emplace_back("token", shape->token);
    put(v.evidence, "declared_amount", shape->amount);
    put(v.evidence, "sender_decrease", sender_decrease);
    put(v.evidence, "recipient_increase", recipient_increase);
    for (auto& e : attacker_changes) v.evidence.push_back(std::move(e));
    return v;
}

// ---------------------------------------------------------------------------
// Total Balance Conservation
// ---------------------------------------------------------------------------

std::optional<Verdict> check_balance_conservation(const StepSnapshot& snap,
                                                  const WorldState& world,
                                                  const OracleConfig& cfg) {
    (void)cfg;
    if (!snap.receipt.success) return std::nullopt;
    const ContractInstance* contract = world.find_contract(snap.tx.target);
    if (!contract) return std::nullopt;
    const FunctionSpec* fn = contract->find_function(snap.tx.function);
    if (!fn || !fn->payable || fn->readonly) return std::nullopt;

    // Both sides priced at p_i, the pre-transaction quotes.
    Rat lhs = 0, rhs = 0;
    for (const auto& id : world.benign_accounts()) {
        for (const auto& t : world.tokens) {
            auto pit = snap.prices_before.find(t.symbol);
            Rat p = pit == snap.prices_before.end() ? Rat(0) : pit->second;
            if (p == 0) continue;
            lhs += table_lookup(snap.balances_before, id, t.symbol) * p;
            rhs += table_lookup(snap.balances_after, id, t.symbol) * p;
        }
    }
    if (lhs == rhs) return std::nullopt;

    Verdict v{MevulClass::BC, snap.index, {}};
    put(v.evidence, "benign_value_before", lhs);
    put(v.evidence, "benign_value_after", rhs);
    put(v.evidence, "delta", Rat(rhs - lhs));
    return v;
}

// ---------------------------------------------------------------------------
// Swap Rate Stability
// ---------------------------------------------------------------------------

std::vector<Verdict> check_swap_rate_stability(const OracleContext& ctx, const StepSnapshot& snap,
                                               const WorldState& world, const OracleConfig& cfg) {
    std::vector<Verdict> out;
    const Rat& eps = cfg.tol_eps;
    for (const auto& sym : ctx.es_tokens()) {
        auto bit = snap.prices_before.find(sym);
        auto ait = snap.prices_after.find(sym);
        if (bit == snap.prices_before.end() || ait == snap.prices_after.end()) continue;
        const Rat& p_prev = bit->second;
        const Rat& p_curr = ait->second;
        Rat p_obs = world.observed_price(sym);

        bool violated = false;
        std::string condition;
        // Condition 1: stable against the observed reference.
        if (within(deviation(p_prev, p_obs), eps) && beyond(deviation(p_curr, p_obs), eps)) {
            violated = true;
            condition = "reference";
        }
        // Condition 2, one step lagged: stable against its own trajectory.
        if (!violated && ctx.prev_before_prices()) {
            auto ppit = ctx.prev_before_prices()->find(sym);
            if (ppit != ctx.prev_before_prices()->end()) {
                if (within(deviation(ppit->second, p_prev), eps) &&
                    beyond(deviation(p_prev, p_curr), eps)) {
                    violated = true;
                    condition = "trajectory";
                }
            }
        }
        if (!violated) continue;

        Verdict v{MevulClass::ES, snap.index, {}};
        v.evidence.emplace_back("token", sym);
        v.evidence.emplace_back("condition", condition);
        put(v.evidence, "price_before", p_prev);
        put(v.evidence, "price_after", p_curr);
        put(v.evidence, "observed", p_obs);
        put(v.evidence, "tol_eps", eps);
        out.push_back(std::move(v));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fund Value Stability
// ---------------------------------------------------------------------------

std::optional<Verdict> check_fund_value_stability(const OracleContext& ctx,
                                                  const StepSnapshot& snap,
                                                  const WorldState& world,
                                                  const OracleConfig& cfg) {
    Rat v_i = 0;
    for (const auto& id : ctx.scope_accounts_) {
        for (const auto& t : world.tokens) {
            Rat bal = table_lookup(snap.balances_after, id, t.symbol);
            if (bal == 0) continue;
            auto pit = snap.prices_after.find(t.symbol);
            if (pit == snap.prices_after.end()) continue;
            v_i += bal * pit->second;
        }
    }
    Rat lo = ctx.v0() * (1 - cfg.lambda);
    Rat hi = ctx.v0() * (1 + cfg.lambda);
    if (v_i >= lo && v_i <= hi) return std::nullopt;

    Verdict v{MevulClass::VS, snap.index, {}};
    put(v.evidence, "v0", ctx.v0());
    put(v.evidence, "v_i", v_i);
    put(v.evidence, "band_low", lo);
    put(v.evidence, "band_high", hi);
    put(v.evidence, "lambda", cfg.lambda);
    v.evidence.emplace_back("scope", vs_scope_name(ctx.scope()));
    return v;
}

// ---------------------------------------------------------------------------
// evaluate_step
// ---------------------------------------------------------------------------

std::vector<Verdict> evaluate_step(const WorldState& world, const StepSnapshot& snap,
                                   const OracleConfig& cfg, OracleContext& ctx) {
    std::vector<Verdict> out;
    if (auto v = check_transfer_arrival(snap, world, cfg)) out.push_back(std::move(*v));
    if (auto v = check_balance_conservation(snap, world, cfg)) out.push_back(std::move(*v));
    for (auto& v : check_swap_rate_stability(ctx, snap, world, cfg)) out.push_back(std::move(v));
    if (auto v = check_fund_value_stability(ctx, snap, world, cfg)) out.push_back(std::move(*v));
    ctx.observe(snap);
    return out;
}

}  // namespace finfuzz
