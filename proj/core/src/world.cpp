// Copyright 2026 The finfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "finfuzz/world.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace finfuzz {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Enum names
// ---------------------------------------------------------------------------

const char* role_name(Role r) {
    switch (r) {
        case Role::BenignUser: return "benign-user";
        case Role::BenignContract: return "benign-contract";
        case Role::Attacker: return "attacker";
        case Role::Owner: return "owner";
    }
    return "?";
}

Role role_from_name(const std::string& s) {
    if (s == "benign-user") return Role::BenignUser;
    if (s == "benign-contract") return Role::BenignContract;
    if (s == "attacker") return Role::Attacker;
    if (s == "owner") return Role::Owner;
    throw WorldError("unknown role: '" + s + "'");
}

const char* param_kind_name(ParamKind k) {
    switch (k) {
        case ParamKind::Address: return "address";
        case ParamKind::Token: return "token";
        case ParamKind::Amount: return "amount";
        case ParamKind::Flag: return "flag";
    }
    return "?";
}

const char* vs_scope_name(VsScope s) {
    switch (s) {
        case VsScope::Fund: return "fund";
        case VsScope::Benign: return "benign";
        case VsScope::All: return "all";
    }
    return "?";
}

VsScope vs_scope_from_name(const std::string& s) {
    if (s == "fund") return VsScope::Fund;
    if (s == "benign") return VsScope::Benign;
    if (s == "all") return VsScope::All;
    throw WorldError("unknown vs-scope: '" + s + "'");
}

// ---------------------------------------------------------------------------
// ContractInstance
// ---------------------------------------------------------------------------

const FunctionSpec* ContractInstance::find_function(const std::string& fn) const {
    for (const auto& f : functions)
        if (f.name == fn) return &f;
    return nullptr;
}

Rat ContractInstance::slot(const std::string& key) const {
    auto it = num_slots.find(key);
    return it == num_slots.end() ? Rat(0) : it->second;
}

void ContractInstance::set_slot(const std::string& key, const Rat& v) {
    if (v == 0)
        num_slots.erase(key);
    else
        num_slots[key] = v;
}

// ---------------------------------------------------------------------------
// Behavior registry
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, Behavior>& behavior_registry() {
    static std::map<std::string, Behavior> reg;
    return reg;
}

}  // namespace

void register_behavior(const std::string& kind, Behavior behavior) {
    behavior_registry()[kind] = std::move(behavior);
}

bool behavior_registered(const std::string& kind) {
    return behavior_registry().count(kind) > 0;
}

std::vector<std::string> registered_behavior_kinds() {
    std::vector<std::string> out;
    for (const auto& [k, _] : behavior_registry()) out.push_back(k);
    return out;
}

// ---------------------------------------------------------------------------
// WorldState accessors
// ---------------------------------------------------------------------------

const TokenId* WorldState::find_token(const std::string& symbol) const {
    for (const auto& t : tokens)
        if (t.symbol == symbol) return &t;
    return nullptr;
}

const Address* WorldState::find_account(const std::string& id) const {
    for (const auto& a : accounts)
        if (a.id == id) return &a;
    return nullptr;
}

ContractInstance* WorldState::find_contract(const std::string& name) {
    for (auto& c : contracts)
        if (c.name == name) return &c;
    return nullptr;
}

const ContractInstance* WorldState::find_contract(const std::string& name) const {
    for (const auto& c : contracts)
        if (c.name == name) return &c;
    return nullptr;
}

Rat WorldState::balance(const std::string& account, const std::string& token) const {
    auto it = balances.find({account, token});
    return it == balances.end() ? Rat(0) : it->second;
}

void WorldState::set_balance(const std::string& account, const std::string& token, const Rat& v) {
    if (v < 0)
        throw WorldError("negative balance write: " + account + "/" + token + " = " + rat_str(v));
    if (v == 0)
        balances.erase({account, token});
    else
        balances[{account, token}] = v;
}

void WorldState::add_balance(const std::string& account, const std::string& token,
                             const Rat& delta) {
    set_balance(account, token, Rat(balance(account, token) + delta));
}

bool WorldState::try_move(const std::string& from, const std::string& to,
                          const std::string& token, const Rat& amount) {
    if (amount < 0) return false;
    Rat have = balance(from, token);
    if (have < amount) return false;
    set_balance(from, token, Rat(have - amount));
    add_balance(to, token, amount);
    return true;
}

Rat WorldState::price(const std::string& token) const {
    auto it = prices.find(token);
    if (it == prices.end()) throw WorldError("no price for token '" + token + "'");
    return it->second;
}

Rat WorldState::observed_price(const std::string& token) const {
    auto it = observed.find(token);
    if (it == observed.end()) throw WorldError("no observed price for token '" + token + "'");
    return it->second;
}

Rat WorldState::swap_rate(const std::string& token_i, const std::string& token_j) const {
    Rat pi = price(token_i);
    Rat pj = price(token_j);
    if (pi == 0) throw WorldError("swap rate undefined: price(" + token_i + ") = 0");
    return Rat(pj / pi);
}

std::vector<std::string> WorldState::benign_accounts() const {
    std::vector<std::string> out;
    for (const auto& a : accounts)
        if (is_benign(a.role)) out.push_back(a.id);
    return out;
}

std::vector<std::string> WorldState::all_account_ids() const {
    std::vector<std::string> out;
    for (const auto& a : accounts) out.push_back(a.id);
    return out;
}

std::vector<std::string> WorldState::attacker_accounts() const {
    std::vector<std::string> out;
    for (const auto& a : accounts)
        if (a.role == Role::Attacker) out.push_back(a.id);
    return out;
}

std::vector<std::string> WorldState::scope_accounts(VsScope scope) const {
    switch (scope) {
        case VsScope::Fund: return fund_scope;
        case VsScope::Benign: return benign_accounts();
        case VsScope::All: return all_account_ids();
    }
    return {};
}

uint64_t WorldState::state_hash() const {
    uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        h ^= 0x1f;
        h *= 0x100000001b3ull;
    };
    for (const auto& [key, v] : balances) {
        mix(key.first);
        mix(key.second);
        mix(rat_str(v));
    }
    for (const auto& [sym, p] : prices) {
        mix(sym);
        mix(rat_str(p));
    }
    for (const auto& c : contracts) {
        mix(c.name);
        for (const auto& [k, v] : c.num_slots) {
            mix(k);
            mix(rat_str(v));
        }
        for (const auto& [k, v] : c.str_slots) {
            mix(k);
            mix(v);
        }
    }
    return h;
}

// ---------------------------------------------------------------------------
// build_world
// ---------------------------------------------------------------------------

WorldState build_world(const WorldSpec& spec) {
    WorldState w;

    std::set<std::string> token_syms;
    for (const auto& t : spec.tokens) {
        if (!token_syms.insert(t.symbol).second)
            throw WorldError("duplicate token symbol '" + t.symbol + "'");
        if (t.price <= 0)
            throw WorldError("token '" + t.symbol + "' must have a positive initial price");
        w.tokens.push_back({t.symbol, t.decimals});
        w.prices[t.symbol] = t.price;
        w.observed[t.symbol] = t.price;
    }

    std::set<std::string> account_ids;
    for (const auto& a : spec.accounts) {
        if (!account_ids.insert(a.id).second)
            throw WorldError("duplicate account id '" + a.id + "'");
        w.accounts.push_back({a.id, a.role});
        for (const auto& [sym, amt] : a.balances) {
            if (!token_syms.count(sym))
                throw WorldError("account '" + a.id + "' holds unknown token '" + sym + "'");
            if (amt < 0)
                throw WorldError("negative initial balance for '" + a.id + "'/" + sym);
            if (amt > 0) w.balances[{a.id, sym}] = amt;
        }
    }

    std::set<std::string> contract_names;
    for (const auto& c : spec.contracts) {
        if (!contract_names.insert(c.name).second)
            throw WorldError("duplicate contract name '" + c.name + "'");
        if (!behavior_registered(c.kind))
            throw WorldError("unknown contract kind '" + c.kind + "'");
        if (!account_ids.count(c.name)) {
            account_ids.insert(c.name);
            w.accounts.push_back({c.name, Role::BenignContract});
        }
        ContractInstance inst;
        inst.name = c.name;
        inst.kind = c.kind;
        w.contracts.push_back(std::move(inst));
        behavior_registry().at(c.kind).setup(w, w.contracts.back(), c.params);

        std::set<std::string> fn_names;
        for (const auto& f : w.contracts.back().functions)
            if (!fn_names.insert(f.name).second)
                throw WorldError("contract '" + c.name + "' declares duplicate function '" +
                                 f.name + "'");
    }

    auto check_ids = [&](const std::vector<std::string>& ids, const char* what) {
        for (const auto& id : ids)
            if (!w.find_account(id))
                throw WorldError(std::string(what) + " references unknown account '" + id + "'");
    };
    w.fund_scope = spec.fund_scope;
    w.vs_scope = spec.vs_scope;
    w.actors = spec.actors;
    check_ids(w.fund_scope, "fund_scope");
    check_ids(w.actors, "actors");
    if (w.actors.empty()) {
        w.actors = w.attacker_accounts();
        if (w.actors.empty())
            for (const auto& a : w.accounts)
                if (a.role == Role::BenignUser || a.role == Role::Owner)
                    w.actors.push_back(a.id);
    }

    w.step_count = 0;
    return w;
}

// ---------------------------------------------------------------------------
// execute
// ---------------------------------------------------------------------------

namespace {

void validate_args(const FunctionSpec& spec, const Transaction& tx) {
    if (tx.args.size() != spec.params.size())
        throw ExecError("arity mismatch calling " + tx.target + "." + tx.function + ": got " +
                        std::to_string(tx.args.size()) + ", want " +
                        std::to_string(spec.params.size()));
    for (size_t i = 0; i < tx.args.size(); ++i) {
        if (tx.args[i].kind != spec.params[i].kind)
            throw ExecError("argument " + std::to_string(i) + " of " + tx.target + "." +
                            tx.function + " has kind " + param_kind_name(tx.args[i].kind) +
                            ", want " + param_kind_name(spec.params[i].kind));
        if (tx.args[i].kind == ParamKind::Amount && tx.args[i].amount < 0)
            throw ExecError("negative amount argument to " + tx.target + "." + tx.function);
    }
}

struct MutableState {
    BalanceTable balances;
    PriceMap prices;
    std::vector<std::pair<std::map<std::string, Rat>, std::map<std::string, std::string>>> slots;
};

MutableState capture(const WorldState& w) {
    MutableState s;
    s.balances = w.balances;
    s.prices = w.prices;
    for (const auto& c : w.contracts) s.slots.push_back({c.num_slots, c.str_slots});
    return s;
}

void restore(WorldState& w, MutableState&& s) {
    w.balances = std::move(s.balances);
    w.prices = std::move(s.prices);
    for (size_t i = 0; i < w.contracts.size(); ++i) {
        w.contracts[i].num_slots = std::move(s.slots[i].first);
        w.contracts[i].str_slots = std::move(s.slots[i].second);
    }
}

}  // namespace

StepSnapshot execute(WorldState& world, const Transaction& tx) {
    ContractInstance* contract = world.find_contract(tx.target);
    if (!contract) throw ExecError("unknown contract '" + tx.target + "'");
    const FunctionSpec* fn = contract->find_function(tx.function);
    if (!fn) throw ExecError("unknown function '" + tx.target + "." + tx.function + "'");
    if (!world.find_account(tx.sender)) throw ExecError("unknown sender '" + tx.sender + "'");
    validate_args(*fn, tx);
    for (const auto& a : tx.args) {
        if (a.kind == ParamKind::Address && !world.find_account(a.text))
            throw ExecError("argument references unknown account '" + a.text + "'");
        if (a.kind == ParamKind::Token && !world.find_token(a.text))
            throw ExecError("argument references unknown token '" + a.text + "'");
    }

    StepSnapshot snap;
    snap.index = ++world.step_count;
    snap.tx = tx;
    snap.balances_before = world.balances;
    snap.prices_before = world.prices;

    MutableState checkpoint = capture(world);
    Receipt receipt;
    try {
        receipt = behavior_registry().at(contract->kind).invoke(world, *contract, tx);
    } catch (const ExecError&) {
        restore(world, std::move(checkpoint));
        --world.step_count;
        throw;
    }

    if (!receipt.success) {
        restore(world, std::move(checkpoint));
    } else if (fn->readonly) {
        // Purity is an invariant, not a convention.
        if (world.balances != checkpoint.balances || world.prices != checkpoint.prices)
            throw WorldError("readonly function " + tx.target + "." + tx.function +
                             " mutated state");
        restore(world, std::move(checkpoint));
    }

    snap.receipt = receipt;
    snap.balances_after = world.balances;
    snap.prices_after = world.prices;
    return snap;
}

// ---------------------------------------------------------------------------
// introspect / total_value
// ---------------------------------------------------------------------------

std::vector<IntrospectionEntry> Introspection::mutating() const {
    std::vector<IntrospectionEntry> out;
    for (const auto& e : callables)
        if (!e.function.readonly) out.push_back(e);
    return out;
}

Introspection introspect(const WorldState& world) {
    Introspection out;
    for (const auto& c : world.contracts) {
        bool has_get_price = false;
        for (const auto& f : c.functions) {
            out.callables.push_back({c.name, f});
            if (f.name == "balanceOf") out.probes.balance_probe = true;
            if (f.name == "getPrice") {
                out.probes.price_probe = true;
                has_get_price = true;
            }
            if (f.name == "getAmountOut") out.probes.amount_out_probe = true;
        }
        if (has_get_price)
            for (const auto& t : c.managed_tokens) out.probes.price_probe_tokens.insert(t);
    }
    return out;
}

Rat total_value(const WorldState& world, const std::vector<std::string>& scope,
                PriceSource source) {
    Rat sum = 0;
    for (const auto& id : scope) {
        for (const auto& t : world.tokens) {
            Rat bal = world.balance(id, t.symbol);
            if (bal == 0) continue;
            Rat p = source == PriceSource::Internal ? world.price(t.symbol)
                                                    : world.observed_price(t.symbol);
            sum += bal * p;
        }
    }
    return sum;
}

// ---------------------------------------------------------------------------
// WorldSpec JSON
// ---------------------------------------------------------------------------

namespace {

Rat json_rat(const ordered_json& j, const std::string& what) {
    if (j.is_string()) return rat_parse(j.get<std::string>());
    if (j.is_number_integer()) return Rat(static_cast<long>(j.get<int64_t>()));
    throw WorldError("expected a rational string for " + what);
}

}  // namespace

WorldSpec world_spec_from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw WorldError(std::string("world spec is not valid JSON: ") + e.what());
    }
    WorldSpec spec;
    for (const auto& t : j.value("tokens", ordered_json::array())) {
        TokenDecl d;
        d.symbol = t.at("symbol").get<std::string>();
        d.decimals = t.value("decimals", 18);
        d.price = json_rat(t.at("price"), "token price");
        spec.tokens.push_back(std::move(d));
    }
    for (const auto& a : j.value("accounts", ordered_json::array())) {
        AccountDecl d;
        d.id = a.at("id").get<std::string>();
        d.role = role_from_name(a.value("role", "benign-user"));
        for (auto it = a.value("balances", ordered_json::object()).begin();
             it != a.value("balances", ordered_json::object()).end(); ++it)
            d.balances[it.key()] = json_rat(it.value(), "balance of " + d.id);
        spec.accounts.push_back(std::move(d));
    }
    for (const auto& c : j.value("contracts", ordered_json::array())) {
        ContractDecl d;
        d.name = c.at("name").get<std::string>();
        d.kind = c.at("kind").get<std::string>();
        for (auto it = c.value("params", ordered_json::object()).begin();
             it != c.value("params", ordered_json::object()).end(); ++it)
            d.params[it.key()] = it.value().is_string() ? it.value().get<std::string>()
                                                        : it.value().dump();
        spec.contracts.push_back(std::move(d));
    }
    spec.fund_scope = j.value("fund_scope", std::vector<std::string>{});
    spec.vs_scope = vs_scope_from_name(j.value("vs_scope", "fund"));
    spec.actors = j.value("actors", std::vector<std::string>{});
    return spec;
}

WorldSpec load_world_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw WorldError("cannot open world spec file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return world_spec_from_json_text(ss.str());
}

std::string world_spec_to_json_text(const WorldSpec& spec) {
    ordered_json j;
    j["tokens"] = ordered_json::array();
    for (const auto& t : spec.tokens)
        j["tokens"].push_back(
            {{"symbol", t.symbol}, {"decimals", t.decimals}, {"price", rat_str(t.price)}});
    j["accounts"] = ordered_json::array();
    for (const auto& a : spec.accounts) {
        ordered_json bal = ordered_json::object();
        for (const auto& [sym, amt] : a.balances) bal[sym] = rat_str(amt);
        j["accounts"].push_back({{"id", a.id}, {"role", role_name(a.role)}, {"balances", bal}});
    }
    j["contracts"] = ordered_json::array();
    for (const auto& c : spec.contracts) {
        ordered_json params = ordered_json::object();
        for (const auto& [k, v] : c.params) params[k] = v;
        j["contracts"].push_back({{"name", c.name}, {"kind", c.kind}, {"params", params}});
    }
    j["fund_scope"] = spec.fund_scope;
    j["vs_scope"] = vs_scope_name(spec.vs_scope);
    j["actors"] = spec.actors;
    return j.dump(2);
}

}  // namespace finfuzz
