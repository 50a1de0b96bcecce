// Copyright 2026 The finfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "finfuzz/scenarios.hpp"

#include <algorithm>

namespace finfuzz {

namespace {

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

const std::string& arg_addr(const Transaction& tx, size_t i) { return tx.args[i].text; }
const std::string& arg_token(const Transaction& tx, size_t i) { return tx.args[i].text; }
const Rat& arg_amount(const Transaction& tx, size_t i) { return tx.args[i].amount; }
bool arg_flag(const Transaction& tx, size_t i) { return tx.args[i].flag; }

std::string allow_key(const std::string& owner, const std::string& spender) {
    return "allow:" + owner + ":" + spender;
}

bool manages(const ContractInstance& c, const std::string& sym) {
    return std::find(c.managed_tokens.begin(), c.managed_tokens.end(), sym) !=
           c.managed_tokens.end();
}

// The ERC20-style contract for a symbol: manages it and exposes transfer.
ContractInstance* token_contract(WorldState& w, const std::string& sym) {
    for (auto& c : w.contracts)
        if (manages(c, sym) && c.find_function("transfer")) return &c;
    return nullptr;
}

ParamSpec p_addr(const char* n) { return {n, ParamKind::Address}; }
ParamSpec p_token(const char* n) { return {n, ParamKind::Token}; }
ParamSpec p_amount(const char* n) { return {n, ParamKind::Amount}; }
ParamSpec p_flag(const char* n) { return {n, ParamKind::Flag}; }

std::vector<FunctionSpec> erc20_functions() {
    return {
        {"transfer", {p_addr("to"), p_amount("amount")}, true, false},
        {"approve", {p_addr("spender"), p_amount("amount")}, false, false},
        {"transferFrom", {p_addr("from"), p_addr("to"), p_amount("amount")}, true, false},
        {"balanceOf", {p_addr("account")}, false, true},
    };
}

std::string require_param(const std::map<std::string, std::string>& params,
                          const std::string& key, const std::string& kind) {
    auto it = params.find(key);
    if (it == params.end())
        throw WorldError("contract kind '" + kind + "' needs param '" + key + "'");
    return it->second;
}

// Internal quote refresh for balance-backed pools: the quote trusts the raw
// own balance, so a bare transfer into the pool inflates it on the next sync.
// quote = p_obs                         when surplus <= ledgered deposits
//       = p_obs * surplus / deposits    when the surplus dominates
void sync_balance_quote(WorldState& w, ContractInstance& c, const std::string& sym) {
    if (!manages(c, sym)) return;
    Rat deposits = c.slot("D:" + sym);
    if (deposits == 0) return;  // market not open, quote untouched
    Rat own = w.balance(c.name, sym);
    Rat surplus = own - deposits;
    Rat obs = w.observed_price(sym);
    w.prices[sym] = surplus > deposits ? Rat(obs * surplus / deposits) : obs;
}

// ---------------------------------------------------------------------------
// erc20: exact token semantics
// ---------------------------------------------------------------------------

void erc20_setup(WorldState& w, ContractInstance& c,
                 const std::map<std::string, std::string>& params) {
    (void)w;
    c.functions = erc20_functions();
    c.managed_tokens = {require_param(params, "token", c.kind)};
}

Receipt erc20_transfer_core(WorldState& w, const std::string& sym, const std::string& from,
                            const std::string& to, const Rat& amount) {
    if (w.balance(from, sym) < amount) return Receipt::revert("insufficient balance");
    w.try_move(from, to, sym, amount);
    return Receipt::ok();
}

Receipt erc20_invoke(WorldState& w, ContractInstance& c, const Transaction& tx) {
    const std::string sym = c.managed_tokens.front();
    if (tx.function == "transfer")
        return erc20_transfer_core(w, sym, tx.sender, arg_addr(tx, 0), arg_amount(tx, 1));
    if (tx.function == "approve") {
        c.set_slot(allow_key(tx.sender, arg_addr(tx, 0)), arg_amount(tx, 1));
        return Receipt::ok();
    }
    if (tx.function == "transferFrom") {
        const std::string& from = arg_addr(tx, 0);
        const Rat& amount = arg_amount(tx, 2);
        Rat allowance = c.slot(allow_key(from, tx.sender));
        if (allowance < amount) return Receipt::revert("insufficient allowance");
        Receipt r = erc20_transfer_core(w, sym, from, arg_addr(tx, 1), amount);
        if (r.success) c.set_slot(allow_key(from, tx.sender), Rat(allowance - amount));
        return r;
    }
    if (tx.function == "balanceOf") return Receipt::ok();
    return Receipt::revert("unhandled function");
}

// ---------------------------------------------------------------------------
// silo_protocol: lending pool with a balance-backed internal quote
//
// Flaws, deliberate:
//   * the quote for managed tokens trusts balanceOf, so donations inflate it;
//   * collateral is valued at the internal quote while debt is valued at the
//     observed feed;
//   * collateral-only custody is withdrawable with open debt, and the payout
//     comes from the pool account instead of the custody vault.
// ---------------------------------------------------------------------------

void silo_setup(WorldState& w, ContractInstance& c,
                const std::map<std::string, std::string>& params) {
    c.functions = {
        {"deposit", {p_token("token"), p_amount("amount"), p_flag("collateral_only")}, true,
         false},
        {"borrow", {p_token("token"), p_amount("amount")}, true, false},
        {"withdraw", {p_token("token"), p_amount("amount")}, true, false},
        {"liquidation", {}, true, false},
        {"getPrice", {p_token("token")}, false, true},
        {"getAmountOut", {p_token("token_in"), p_token("token_out"), p_amount("amount_in")},
         false, true},
    };
    std::string managed = require_param(params, "managed", c.kind);
    c.managed_tokens = {managed};
    c.str_slots["owner"] = require_param(params, "owner", c.kind);

    std::string vault = require_param(params, "vault", c.kind);
    c.str_slots["vault"] = vault;
    if (!w.find_account(vault)) w.accounts.push_back({vault, Role::BenignContract});

    for (const auto& [key, value] : params)
        if (key.rfind("deposit:", 0) == 0) c.set_slot("D:" + key.substr(8), rat_parse(value));

    // No market for the managed token until its first deposit.
    if (c.slot("D:" + managed) == 0) w.prices[managed] = 0;
}

Rat account_collateral_value(const WorldState& w, const ContractInstance& c,
                             const std::string& who) {
    Rat v = 0;
    for (const auto& t : w.tokens) {
        Rat held = c.slot("dep:" + who + ":" + t.symbol) + c.slot("collat:" + who + ":" + t.symbol);
        if (held != 0) v += held * w.price(t.symbol);
    }
    return v;
}

Rat account_debt_value(const WorldState& w, const ContractInstance& c, const std::string& who) {
    Rat v = 0;
    for (const auto& t : w.tokens) {
        Rat owed = c.slot("debt:" + who + ":" + t.symbol);
        if (owed != 0) v += owed * w.observed_price(t.symbol);
    }
    return v;
}

Receipt silo_invoke(WorldState& w, ContractInstance& c, const Transaction& tx) {
    const std::string vault = c.str_slots.at("vault");

    if (tx.function == "deposit") {
        const std::string& sym = arg_token(tx, 0);
        const Rat& amount = arg_amount(tx, 1);
        bool collateral_only = arg_flag(tx, 2);
        sync_balance_quote(w, c, sym);
        if (amount == 0) return Receipt::revert("zero amount");
        ContractInstance* tok = token_contract(w, sym);
        if (!tok) return Receipt::revert("no token contract for " + sym);
        Rat allowance = tok->slot(allow_key(tx.sender, c.name));
        if (allowance < amount) return Receipt::revert("insufficient allowance");
        if (w.balance(tx.sender, sym) < amount) return Receipt::revert("insufficient balance");
        tok->set_slot(allow_key(tx.sender, c.name), Rat(allowance - amount));
        if (collateral_only) {
            w.try_move(tx.sender, vault, sym, amount);
            c.set_slot("collat:" + tx.sender + ":" + sym,
                       Rat(c.slot("collat:" + tx.sender + ":" + sym) + amount));
        } else {
            bool market_opens = manages(c, sym) && c.slot("D:" + sym) == 0;
            w.try_move(tx.sender, c.name, sym, amount);
            c.set_slot("D:" + sym, Rat(c.slot("D:" + sym) + amount));
            c.set_slot("dep:" + tx.sender + ":" + sym,
                       Rat(c.slot("dep:" + tx.sender + ":" + sym) + amount));
            if (market_opens) w.prices[sym] = w.observed_price(sym);
        }
        return Receipt::ok();
    }

    if (tx.function == "borrow") {
        const std::string& sym = arg_token(tx, 0);
        const Rat& amount = arg_amount(tx, 1);
        sync_balance_quote(w, c, sym);
        if (amount == 0) return Receipt::revert("zero amount");
        if (w.balance(c.name, sym) < amount) return Receipt::revert("insufficient liquidity");
        Rat collateral = account_collateral_value(w, c, tx.sender);
        Rat debt = account_debt_value(w, c, tx.sender) + amount * w.observed_price(sym);
        if (debt > collateral) return Receipt::revert("ltv exceeded");
        w.try_move(c.name, tx.sender, sym, amount);
        c.set_slot("debt:" + tx.sender + ":" + sym,
                   Rat(c.slot("debt:" + tx.sender + ":" + sym) + amount));
        return Receipt::ok();
    }

    if (tx.function == "withdraw") {
        const std::string& sym = arg_token(tx, 0);
        const Rat& amount = arg_amount(tx, 1);
        sync_balance_quote(w, c, sym);
        if (amount == 0) return Receipt::revert("zero amount");
        Rat custody = c.slot("collat:" + tx.sender + ":" + sym);
        if (custody >= amount) {
            // Pays from the pool and skips the solvency check.
            if (w.balance(c.name, sym) < amount)
                return Receipt::revert("insufficient liquidity");
            w.try_move(c.name, tx.sender, sym, amount);
            c.set_slot("collat:" + tx.sender + ":" + sym, Rat(custody - amount));
            return Receipt::ok();
        }
        Rat shares = c.slot("dep:" + tx.sender + ":" + sym);
        if (shares >= amount) {
            if (w.balance(c.name, sym) < amount)
                return Receipt::revert("insufficient liquidity");
            w.try_move(c.name, tx.sender, sym, amount);
            c.set_slot("dep:" + tx.sender + ":" + sym, Rat(shares - amount));
            c.set_slot("D:" + sym, Rat(c.slot("D:" + sym) - amount));
            return Receipt::ok();
        }
        return Receipt::revert("no position");
    }

    if (tx.function == "liquidation") {
        if (tx.sender != c.str_slots.at("owner")) return Receipt::revert("owner only");
        for (const auto& t : w.tokens) sync_balance_quote(w, c, t.symbol);
        for (const auto& acct : w.accounts) {
            Rat debt = account_debt_value(w, c, acct.id);
            if (debt == 0) continue;
            if (debt <= account_collateral_value(w, c, acct.id)) continue;
            // Insolvent: recover what is reachable, then write the rest off.
            for (const auto& t : w.tokens) {
                std::string dep_key = "dep:" + acct.id + ":" + t.symbol;
                if (c.slot(dep_key) != 0) {
                    Rat wallet = w.balance(acct.id, t.symbol);
                    if (wallet > 0) w.try_move(acct.id, c.name, t.symbol, wallet);
                    c.set_slot("D:" + t.symbol, Rat(c.slot("D:" + t.symbol) - c.slot(dep_key)));
                    c.set_slot(dep_key, 0);
                }
                std::string collat_key = "collat:" + acct.id + ":" + t.symbol;
                if (c.slot(collat_key) != 0) {
                    Rat seizable = std::min(Rat(w.balance(vault, t.symbol)), c.slot(collat_key));
                    if (seizable > 0) w.try_move(vault, c.name, t.symbol, seizable);
                    c.set_slot(collat_key, 0);
                }
                c.set_slot("debt:" + acct.id + ":" + t.symbol, 0);
            }
        }
        // Custody tokens no ledger entry backs belong to the pool.
        for (const auto& t : w.tokens) {
            Rat booked = 0;
            for (const auto& acct : w.accounts)
                booked += c.slot("collat:" + acct.id + ":" + t.symbol);
            Rat orphan = w.balance(vault, t.symbol) - booked;
            if (orphan > 0) w.try_move(vault, c.name, t.symbol, orphan);
        }
        return Receipt::ok();
    }

    if (tx.function == "getPrice") return Receipt::ok();
    if (tx.function == "getAmountOut") {
        if (w.price(arg_token(tx, 1)) == 0) return Receipt::revert("no quote for output token");
        return Receipt::ok();
    }
    return Receipt::revert("unhandled function");
}

// ---------------------------------------------------------------------------
// rate_pool: smaller balance-backed pool, no custody, no allowances
// ---------------------------------------------------------------------------

void rate_pool_setup(WorldState& w, ContractInstance& c,
                     const std::map<std::string, std::string>& params) {
    (void)w;
    c.functions = {
        {"deposit", {p_token("token"), p_amount("amount")}, true, false},
        {"borrow", {p_token("token"), p_amount("amount")}, true, false},
        {"withdraw", {p_token("token"), p_amount("amount")}, true, false},
        {"getPrice", {p_token("token")}, false, true},
    };
    c.managed_tokens = {require_param(params, "managed", c.kind)};
    for (const auto& [key, value] : params)
        if (key.rfind("deposit:", 0) == 0) c.set_slot("D:" + key.substr(8), rat_parse(value));
}

Receipt rate_pool_invoke(WorldState& w, ContractInstance& c, const Transaction& tx) {
    if (tx.function == "getPrice") return Receipt::ok();
    const std::string& sym = arg_token(tx, 0);
    const Rat& amount = arg_amount(tx, 1);
    // Every pool operation refreshes every managed quote.
    for (const auto& m : c.managed_tokens) sync_balance_quote(w, c, m);
    if (amount == 0) return Receipt::revert("zero amount");

    if (tx.function == "deposit") {
        if (w.balance(tx.sender, sym) < amount) return Receipt::revert("insufficient balance");
        w.try_move(tx.sender, c.name, sym, amount);
        c.set_slot("D:" + sym, Rat(c.slot("D:" + sym) + amount));
        c.set_slot("dep:" + tx.sender + ":" + sym,
                   Rat(c.slot("dep:" + tx.sender + ":" + sym) + amount));
        return Receipt::ok();
    }
    if (tx.function == "borrow") {
        if (w.balance(c.name, sym) < amount) return Receipt::revert("insufficient liquidity");
        Rat collateral = 0;
        for (const auto& t : w.tokens) {
            Rat dep = c.slot("dep:" + tx.sender + ":" + t.symbol);
            if (dep != 0) collateral += dep * w.price(t.symbol);
        }
        Rat debt = amount * w.observed_price(sym);
        for (const auto& t : w.tokens) {
            Rat owed = c.slot("debt:" + tx.sender + ":" + t.symbol);
            if (owed != 0) debt += owed * w.observed_price(t.symbol);
        }
        if (debt > collateral) return Receipt::revert("ltv exceeded");
        w.try_move(c.name, tx.sender, sym, amount);
        c.set_slot("debt:" + tx.sender + ":" + sym,
                   Rat(c.slot("debt:" + tx.sender + ":" + sym) + amount));
        return Receipt::ok();
    }
    if (tx.function == "withdraw") {
        Rat shares = c.slot("dep:" + tx.sender + ":" + sym);
        if (shares < amount) return Receipt::revert("no position");
        if (w.balance(c.name, sym) < amount) return Receipt::revert("insufficient liquidity");
        w.try_move(c.name, tx.sender, sym, amount);
        c.set_slot("dep:" + tx.sender + ":" + sym, Rat(shares - amount));
        c.set_slot("D:" + sym, Rat(c.slot("D:" + sym) - amount));
        return Receipt::ok();
    }
    return Receipt::revert("unhandled function");
}

// ---------------------------------------------------------------------------
// share_pool_token: transferFrom shortchanges the recipient and skims a fee
// to a hardcoded collector
// ---------------------------------------------------------------------------

void share_pool_token_setup(WorldState& w, ContractInstance& c,
                            const std::map<std::string, std::string>& params) {
    (void)w;
    c.functions = erc20_functions();
    c.managed_tokens = {require_param(params, "token", c.kind)};
    c.str_slots["fee_collector"] = require_param(params, "fee_collector", c.kind);
}

Receipt share_pool_token_invoke(WorldState& w, ContractInstance& c, const Transaction& tx) {
    const std::string sym = c.managed_tokens.front();
    if (tx.function != "transferFrom") return erc20_invoke(w, c, tx);

    const std::string& from = arg_addr(tx, 0);
    const std::string& to = arg_addr(tx, 1);
    const Rat& amount = arg_amount(tx, 2);
    Rat allowance = c.slot(allow_key(from, tx.sender));
    if (allowance < amount) return Receipt::revert("insufficient allowance");
    if (w.balance(from, sym) < amount) return Receipt::revert("insufficient balance");
    c.set_slot(allow_key(from, tx.sender), Rat(allowance - amount));
    // Delegated pulls miscredit: 4/5 arrives, 1/10 leaks to the collector,
    // 1/10 is dropped from the books entirely.
    w.add_balance(from, sym, Rat(-amount));
    w.add_balance(to, sym, Rat(amount * rat_of(4, 5)));
    w.add_balance(c.str_slots.at("fee_collector"), sym, Rat(amount * rat_of(1, 10)));
    return Receipt::ok();
}

// ---------------------------------------------------------------------------
// mintable_token + mint_router: supply guarded only at the token, and a
// deployed router that forwards mints for anyone
// ---------------------------------------------------------------------------

void mintable_token_setup(WorldState& w, ContractInstance& c,
                          const std::map<std::string, std::string>& params) {
    (void)w;
    c.functions = erc20_functions();
    c.functions.push_back({"mint", {p_addr("to"), p_amount("amount")}, true, false});
    c.managed_tokens = {require_param(params, "token", c.kind)};
    c.str_slots["owner"] = require_param(params, "owner", c.kind);
}

Receipt mintable_token_invoke(WorldState& w, ContractInstance& c, const Transaction& tx) {
    if (tx.function != "mint") return erc20_invoke(w, c, tx);
    if (tx.sender != c.str_slots.at("owner")) return Receipt::revert("not owner");
    if (arg_amount(tx, 1) == 0) return Receipt::revert("zero amount");
    w.add_balance(arg_addr(tx, 0), c.managed_tokens.front(), arg_amount(tx, 1));
    return Receipt::ok();
}

void mint_router_setup(WorldState& w, ContractInstance& c,
                       const std::map<std::string, std::string>& params) {
    (void)w;
    c.functions = {{"mintTo", {p_addr("to"), p_amount("amount")}, true, false}};
    c.str_slots["token"] = require_param(params, "token", c.kind);
}

Receipt mint_router_invoke(WorldState& w, ContractInstance& c, const Transaction& tx) {
    if (tx.function != "mintTo") return Receipt::revert("unhandled function");
    // The router was meant to be an owner convenience; it never checks who
    // asked, so routing through it bypasses the token's own guard.
    if (arg_amount(tx, 1) == 0) return Receipt::revert("zero amount");
    w.add_balance(arg_addr(tx, 0), c.str_slots.at("token"), arg_amount(tx, 1));
    return Receipt::ok();
}

// ---------------------------------------------------------------------------
// overflow_token: recipient balances live in a 64-bit raw accumulator that
// wraps on large credits
// ---------------------------------------------------------------------------

const mpz_class kWordModulus = mpz_class(1) << 64;

void overflow_token_setup(WorldState& w, ContractInstance& c,
                          const std::map<std::string, std::string>& params) {
    (void)w;
    c.functions = erc20_functions();
    c.managed_tokens = {require_param(params, "token", c.kind)};
}

Receipt overflow_credit(WorldState& w, const std::string& sym, const std::string& to,
                        const Rat& amount) {
    if (amount.get_den() != 1) return Receipt::revert("fractional raw amount");
    Rat old_bal = w.balance(to, sym);
    if (old_bal.get_den() != 1) return Receipt::revert("corrupt raw balance");
    mpz_class raw = (old_bal.get_num() + amount.get_num()) % kWordModulus;
    w.set_balance(to, sym, Rat(raw));
    return Receipt::ok();
}

Receipt overflow_token_invoke(WorldState& w, ContractInstance& c, const Transaction& tx) {
    const std::string sym = c.managed_tokens.front();
    if (tx.function == "transfer" || tx.function == "transferFrom") {
        bool delegated = tx.function == "transferFrom";
        const std::string& from = delegated ? arg_addr(tx, 0) : tx.sender;
        const std::string& to = delegated ? arg_addr(tx, 1) : arg_addr(tx, 0);
        const Rat& amount = delegated ? arg_amount(tx, 2) : arg_amount(tx, 1);
        if (amount.get_den() != 1) return Receipt::revert("fractional raw amount");
        if (delegated) {
            Rat allowance = c.slot(allow_key(from, tx.sender));
            if (allowance < amount) return Receipt::revert("insufficient allowance");
            c.set_slot(allow_key(from, tx.sender), Rat(allowance - amount));
        }
        if (w.balance(from, sym) < amount) return Receipt::revert("insufficient balance");
        w.add_balance(from, sym, Rat(-amount));
        return overflow_credit(w, sym, to, amount);
    }
    return erc20_invoke(w, c, tx);
}

// ---------------------------------------------------------------------------
// clean_vault: correct deposit/withdraw with an honest feed-pinned quote
// ---------------------------------------------------------------------------

void clean_vault_setup(WorldState& w, ContractInstance& c,
                       const std::map<std::string, std::string>& params) {
    (void)w;
    c.functions = {
        {"deposit", {p_amount("amount")}, true, false},
        {"withdraw", {p_amount("amount")}, true, false},
        {"getPrice", {p_token("token")}, false, true},
    };
    c.managed_tokens = {require_param(params, "token", c.kind)};
}

Receipt clean_vault_invoke(WorldState& w, ContractInstance& c, const Transaction& tx) {
    const std::string sym = c.managed_tokens.front();
    if (tx.function == "getPrice") return Receipt::ok();
    const Rat& amount = arg_amount(tx, 0);
    if (amount == 0) return Receipt::revert("zero amount");
    std::string share_key = "shares:" + tx.sender;
    if (tx.function == "deposit") {
        if (w.balance(tx.sender, sym) < amount) return Receipt::revert("insufficient balance");
        w.try_move(tx.sender, c.name, sym, amount);
        c.set_slot(share_key, Rat(c.slot(share_key) + amount));
        return Receipt::ok();
    }
    if (tx.function == "withdraw") {
        if (c.slot(share_key) < amount) return Receipt::revert("insufficient shares");
        w.try_move(c.name, tx.sender, sym, amount);
        c.set_slot(share_key, Rat(c.slot(share_key) - amount));
        return Receipt::ok();
    }
    return Receipt::revert("unhandled function");
}

// ---------------------------------------------------------------------------
// Registration
// ---------------------------------------------------------------------------

bool g_registered = false;

}  // namespace

void register_builtin_behaviors() {
    if (g_registered) return;
    g_registered = true;
    register_behavior("erc20", {erc20_setup, erc20_invoke});
    register_behavior("silo_protocol", {silo_setup, silo_invoke});
    register_behavior("rate_pool", {rate_pool_setup, rate_pool_invoke});
    register_behavior("share_pool_token", {share_pool_token_setup, share_pool_token_invoke});
    register_behavior("mintable_token", {mintable_token_setup, mintable_token_invoke});
    register_behavior("mint_router", {mint_router_setup, mint_router_invoke});
    register_behavior("overflow_token", {overflow_token_setup, overflow_token_invoke});
    register_behavior("clean_vault", {clean_vault_setup, clean_vault_invoke});
}

// ---------------------------------------------------------------------------
// Scenario corpus
// ---------------------------------------------------------------------------

namespace {

Transaction make_tx(std::string target, std::string function, std::vector<Value> args,
                    std::string sender) {
    return Transaction{std::move(target), std::move(function), std::move(args),
                       std::move(sender)};
}

Scenario silo_lending() {
    Scenario s;
    s.name = "silo-lending";
    s.description =
        "Lending pool whose internal quote trusts its raw token balance. A dust deposit opens "
        "the market, a bare transfer inflates the quote a thousandfold at the next sync, and the "
        "inflated collateral valuation lets the attackers drain the pool and pull their custody "
        "back out.";
    WorldSpec& w = s.world_spec;
    w.tokens = {{"tA", 18, rat_parse("999/1000")},
                {"tB", 18, rat_parse("7/100")},
                {"tT", 18, rat_parse("11/10")}};
    w.accounts = {
        {"attacker0", Role::Attacker, {{"tA", rat_parse("1001999/9990")}}},
        {"attacker1", Role::Attacker, {{"tB", rat_parse("10000/7")}}},
        {"owner", Role::Owner, {}},
        {"Protocol", Role::BenignContract, {{"tB", rat_parse("10000/7")}, {"tT", rat_parse("1000/11")}}},
    };
    w.contracts = {
        {"TokenA", "erc20", {{"token", "tA"}}},
        {"TokenB", "erc20", {{"token", "tB"}}},
        {"TokenT", "erc20", {{"token", "tT"}}},
        {"Protocol",
         "silo_protocol",
         {{"managed", "tA"},
          {"vault", "Protocol.vault"},
          {"owner", "owner"},
          {"deposit:tB", "10000/7"},
          {"deposit:tT", "1000/11"}}},
    };
    w.fund_scope = {"Protocol"};
    w.vs_scope = VsScope::Fund;
    w.actors = {"attacker0", "attacker1"};

    const std::string dust = "100/999";      // ~0.1001, the market-opening deposit
    const std::string donation = "100000/999";  // ~100.1, the quote-inflating transfer
    s.witness = {
        make_tx("TokenA", "approve", {Value::address("Protocol"), Value::amount_of(rat_parse(dust))}, "attacker0"),
        make_tx("Protocol", "deposit", {Value::token("tA"), Value::amount_of(rat_parse(dust)), Value::flag_of(false)}, "attacker0"),
        make_tx("TokenA", "transfer", {Value::address("Protocol"), Value::amount_of(rat_parse(donation))}, "attacker0"),
        make_tx("TokenB", "approve", {Value::address("Protocol"), Value::amount_of(rat_parse("10000/7"))}, "attacker1"),
        make_tx("Protocol", "deposit", {Value::token("tB"), Value::amount_of(rat_parse("10000/7")), Value::flag_of(true)}, "attacker1"),
        make_tx("Protocol", "borrow", {Value::token("tA"), Value::amount_of(rat_parse("1001/10"))}, "attacker1"),
        make_tx("Protocol", "borrow", {Value::token("tT"), Value::amount_of(rat_parse("1000/11"))}, "attacker0"),
        make_tx("Protocol", "withdraw", {Value::token("tB"), Value::amount_of(rat_parse("10000/7"))}, "attacker1"),
        make_tx("Protocol", "liquidation", {}, "owner"),
    };
    s.labels = {ErrorClass::ES, ErrorClass::VS};
    s.witness_classes = {MevulClass::BC, MevulClass::ES, MevulClass::VS};
    return s;
}

Scenario share_accounting() {
    Scenario s;
    s.name = "share-accounting";
    s.description =
        "Pool share token whose delegated transfers shortchange the recipient: a fifth of every "
        "transferFrom goes missing, half of it skimmed to a hardcoded collector address.";
    WorldSpec& w = s.world_spec;
    w.tokens = {{"PS", 18, rat_parse("1")}};
    w.accounts = {
        {"user1", Role::BenignUser, {{"PS", rat_parse("600")}}},
        {"user2", Role::BenignUser, {{"PS", rat_parse("400")}}},
        {"delegate", Role::Attacker, {}},
        {"collector", Role::Attacker, {}},
    };
    w.contracts = {
        {"PoolShare", "share_pool_token", {{"token", "PS"}, {"fee_collector", "collector"}}},
    };
    w.fund_scope = {};
    w.vs_scope = VsScope::Fund;
    w.actors = {"user1", "user2", "delegate"};
    s.witness = {
        make_tx("PoolShare", "approve", {Value::address("delegate"), Value::amount_of(Rat(5))}, "user1"),
        make_tx("PoolShare", "transferFrom", {Value::address("user1"), Value::address("user2"), Value::amount_of(Rat(5))}, "delegate"),
    };
    s.labels = {ErrorClass::TA, ErrorClass::BC};
    s.witness_classes = {MevulClass::TA, MevulClass::BC};
    return s;
}

Scenario txorigin_mint() {
    Scenario s;
    s.name = "txorigin-mint";
    s.description =
        "Token whose mint is owner-guarded, next to a deployed router that forwards mints "
        "without checking its caller. Detouring through the router mints unbounded supply.";
    WorldSpec& w = s.world_spec;
    w.tokens = {{"tM", 18, rat_parse("1")}};
    w.accounts = {
        {"minter", Role::Attacker, {}},
        {"owner", Role::Owner, {}},
        {"Treasury", Role::BenignContract, {{"tM", rat_parse("1000")}}},
    };
    w.contracts = {
        {"MintToken", "mintable_token", {{"token", "tM"}, {"owner", "owner"}}},
        {"Router", "mint_router", {{"token", "tM"}}},
    };
    w.fund_scope = {"Treasury"};
    w.vs_scope = VsScope::All;  // supply inflation shows up wherever it lands
    w.actors = {"minter"};
    s.witness = {
        make_tx("Router", "mintTo", {Value::address("minter"), Value::amount_of(Rat(300))}, "minter"),
    };
    s.labels = {ErrorClass::VS};
    s.witness_classes = {MevulClass::VS};
    return s;
}

Scenario direct_transfer() {
    Scenario s;
    s.name = "direct-transfer";
    s.description =
        "Deposit pool that re-derives its quote from balanceOf on every operation. A direct "
        "token transfer inflates the quote, so a dust depositor can borrow against collateral "
        "the pool now wildly overvalues.";
    WorldSpec& w = s.world_spec;
    w.tokens = {{"tP", 18, rat_parse("1")}, {"tQ", 18, rat_parse("2")}};
    w.accounts = {
        {"raider", Role::Attacker, {{"tP", rat_parse("200")}}},
        {"RatePool", Role::BenignContract, {{"tP", rat_parse("10")}, {"tQ", rat_parse("50")}}},
    };
    w.contracts = {
        {"TokenP", "erc20", {{"token", "tP"}}},
        {"TokenQ", "erc20", {{"token", "tQ"}}},
        {"RatePool", "rate_pool", {{"managed", "tP"}, {"deposit:tP", "10"}}},
    };
    w.fund_scope = {"RatePool"};
    w.vs_scope = VsScope::Fund;
    w.actors = {"raider"};
    s.witness = {
        make_tx("RatePool", "deposit", {Value::token("tP"), Value::amount_of(Rat(10))}, "raider"),
        make_tx("TokenP", "transfer", {Value::address("RatePool"), Value::amount_of(Rat(90))}, "raider"),
        make_tx("RatePool", "borrow", {Value::token("tQ"), Value::amount_of(Rat(22))}, "raider"),
    };
    s.labels = {ErrorClass::ES, ErrorClass::VS};
    s.witness_classes = {MevulClass::BC, MevulClass::ES, MevulClass::VS};
    return s;
}

Scenario overflow_shares() {
    Scenario s;
    s.name = "overflow-shares";
    s.description =
        "Token that keeps recipient balances in a 64-bit raw accumulator. Repeated large "
        "transfers wrap the recipient's balance to dust, destroying the declared credit.";
    WorldSpec& w = s.world_spec;
    w.tokens = {{"tV", 0, rat_parse("1/1000")}};
    w.accounts = {
        {"whale", Role::BenignUser, {{"tV", rat_parse("10000000000000000000")}}},
        {"holder", Role::BenignUser, {{"tV", rat_parse("500000000000000000")}}},
        {"VaultToken", Role::BenignContract, {{"tV", rat_parse("9500000000000000000")}}},
    };
    w.contracts = {
        {"VaultToken", "overflow_token", {{"token", "tV"}}},
    };
    w.fund_scope = {};
    w.vs_scope = VsScope::Benign;
    w.actors = {"whale", "holder"};
    s.witness = {
        make_tx("VaultToken", "transfer", {Value::address("VaultToken"), Value::amount_of(rat_parse("5000000000000000000"))}, "whale"),
        make_tx("VaultToken", "transfer", {Value::address("VaultToken"), Value::amount_of(rat_parse("4000000000000000000"))}, "whale"),
    };
    s.labels = {ErrorClass::TA, ErrorClass::BC, ErrorClass::VS};
    s.witness_classes = {MevulClass::TA, MevulClass::BC, MevulClass::VS};
    return s;
}

Scenario clean_token() {
    Scenario s;
    s.name = "clean-token";
    s.description = "Plain token with exact transfer semantics; false-positive control.";
    WorldSpec& w = s.world_spec;
    w.tokens = {{"tC", 18, rat_parse("1")}};
    w.accounts = {
        {"user1", Role::BenignUser, {{"tC", rat_parse("100")}}},
        {"user2", Role::BenignUser, {{"tC", rat_parse("50")}}},
        {"user3", Role::BenignUser, {{"tC", rat_parse("7")}}},
        {"owner", Role::Owner, {}},
    };
    w.contracts = {{"CleanToken", "erc20", {{"token", "tC"}}}};
    w.fund_scope = {};
    w.vs_scope = VsScope::Fund;
    w.actors = {"user1", "user2", "user3"};
    s.labels = {};
    s.witness_classes = {};
    return s;
}

Scenario clean_vault() {
    Scenario s;
    s.name = "clean-vault";
    s.description =
        "Correct deposit/withdraw vault with an honest feed-pinned quote; false-positive "
        "control that exercises the price probe.";
    WorldSpec& w = s.world_spec;
    w.tokens = {{"tW", 18, rat_parse("1")}};
    w.accounts = {
        {"user1", Role::BenignUser, {{"tW", rat_parse("120")}}},
        {"user2", Role::BenignUser, {{"tW", rat_parse("80")}}},
    };
    w.contracts = {
        {"TokenW", "erc20", {{"token", "tW"}}},
        {"Vault", "clean_vault", {{"token", "tW"}}},
    };
    w.fund_scope = {"Vault"};
    w.vs_scope = VsScope::Benign;
    w.actors = {"user1", "user2"};
    s.labels = {};
    s.witness_classes = {};
    return s;
}

const std::vector<Scenario>& corpus() {
    static const std::vector<Scenario> all = [] {
        register_builtin_behaviors();
        return std::vector<Scenario>{silo_lending(),    share_accounting(), txorigin_mint(),
                                     direct_transfer(), overflow_shares(),  clean_token(),
                                     clean_vault()};
    }();
    return all;
}

}  // namespace

std::vector<std::string> scenario_names() {
    std::vector<std::string> names;
    for (const auto& s : corpus()) names.push_back(s.name);
    return names;
}

bool scenario_exists(const std::string& name) {
    for (const auto& s : corpus())
        if (s.name == name) return true;
    return false;
}

Scenario load_scenario(const std::string& name) {
    for (const auto& s : corpus())
        if (s.name == name) return s;
    throw WorldError("unknown scenario '" + name + "'");
}

std::vector<StepSnapshot> replay_witness(const Scenario& scenario) {
    if (scenario.witness.empty())
        throw WorldError("scenario '" + scenario.name + "' bundles no witness");
    register_builtin_behaviors();
    WorldState world = build_world(scenario.world_spec);
    std::vector<StepSnapshot> trace;
    trace.reserve(scenario.witness.size());
    for (const auto& tx : scenario.witness) trace.push_back(execute(world, tx));
    return trace;
}

}  // namespace finfuzz
