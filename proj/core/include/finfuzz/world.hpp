// Copyright 2026 The finfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "finfuzz/rational.hpp"

namespace finfuzz {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class Role { BenignUser, BenignContract, Attacker, Owner };

const char* role_name(Role r);
Role role_from_name(const std::string& s);

// Everything that is not attacker-controlled counts as benign for the
// conservation oracles.
inline bool is_benign(Role r) { return r != Role::Attacker; }

struct Address {
    std::string id;
    Role role = Role::BenignUser;
};

struct TokenId {
    std::string symbol;
    int decimals = 18;
};

enum class ParamKind { Address, Token, Amount, Flag };

const char* param_kind_name(ParamKind k);

struct ParamSpec {
    std::string name;
    ParamKind kind;
};

struct FunctionSpec {
    std::string name;
    std::vector<ParamSpec> params;
    bool payable = false;   // moves token balances (the oracle gate)
    bool readonly = false;  // never mutates world state
};

// One argument value, tagged by the parameter kind it satisfies.
struct Value {
    ParamKind kind = ParamKind::Amount;
    std::string text;  // Address: account id, Token: symbol
    Rat amount = 0;    // Amount
    bool flag = false; // Flag

    static Value address(std::string id) { return {ParamKind::Address, std::move(id), 0, false}; }
    static Value token(std::string sym) { return {ParamKind::Token, std::move(sym), 0, false}; }
    static Value amount_of(Rat v) { return {ParamKind::Amount, "", std::move(v), false}; }
    static Value flag_of(bool b) { return {ParamKind::Flag, "", 0, b}; }
};

struct Transaction {
    std::string target;    // contract name
    std::string function;
    std::vector<Value> args;
    std::string sender;    // account id
};

struct Receipt {
    bool success = true;
    std::string revert_reason;

    static Receipt ok() { return {true, ""}; }
    static Receipt revert(std::string why) { return {false, std::move(why)}; }
};

using BalanceKey = std::pair<std::string, std::string>;  // (account, token)
using BalanceTable = std::map<BalanceKey, Rat>;
using PriceMap = std::map<std::string, Rat>;

struct StepSnapshot {
    int index = 0;  // 1-based transaction ordinal within a trace
    Transaction tx;
    Receipt receipt;
    BalanceTable balances_before;
    BalanceTable balances_after;
    PriceMap prices_before;  // internal quotes
    PriceMap prices_after;
};

struct ContractInstance {
    std::string name;  // doubles as the contract's account id
    std::string kind;  // behavior registry key
    std::vector<FunctionSpec> functions;
    std::vector<std::string> managed_tokens;  // tokens whose quote this contract drives
    std::map<std::string, Rat> num_slots;
    std::map<std::string, std::string> str_slots;

    const FunctionSpec* find_function(const std::string& fn) const;
    Rat slot(const std::string& key) const;
    void set_slot(const std::string& key, const Rat& v);
};

// Which account set the fund-value oracle sums over.
enum class VsScope { Fund, Benign, All };

const char* vs_scope_name(VsScope s);
VsScope vs_scope_from_name(const std::string& s);

// ---------------------------------------------------------------------------
// WorldSpec: the declarative build input (also loadable from a JSON file)
// ---------------------------------------------------------------------------

struct TokenDecl {
    std::string symbol;
    int decimals = 18;
    Rat price;  // initial = observed reference price, must be > 0
};

struct AccountDecl {
    std::string id;
    Role role = Role::BenignUser;
    std::map<std::string, Rat> balances;
};

struct ContractDecl {
    std::string name;
    std::string kind;
    std::map<std::string, std::string> params;  // constructor parameters
};

struct WorldSpec {
    std::vector<TokenDecl> tokens;
    std::vector<AccountDecl> accounts;
    std::vector<ContractDecl> contracts;
    std::vector<std::string> fund_scope;  // accounts whose holdings are "the fund"
    VsScope vs_scope = VsScope::Fund;
    std::vector<std::string> actors;      // fuzz transaction sender pool
};

WorldSpec world_spec_from_json_text(const std::string& text);
WorldSpec load_world_spec_file(const std::string& path);
std::string world_spec_to_json_text(const WorldSpec& spec);

// ---------------------------------------------------------------------------
// WorldState
// ---------------------------------------------------------------------------

struct WorldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Hard errors (unknown contract/function, malformed args) are distinct from
// in-world reverts, which come back as Receipt::revert.
struct ExecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class WorldState {
  public:
    std::vector<TokenId> tokens;
    std::vector<Address> accounts;
    BalanceTable balances;
    PriceMap prices;    // internal quotes; scenario contracts may drive these
    PriceMap observed;  // frozen at construction
    std::vector<ContractInstance> contracts;
    std::vector<std::string> fund_scope;
    VsScope vs_scope = VsScope::Fund;
    std::vector<std::string> actors;
    int step_count = 0;

    const TokenId* find_token(const std::string& symbol) const;
    const Address* find_account(const std::string& id) const;
    ContractInstance* find_contract(const std::string& name);
    const ContractInstance* find_contract(const std::string& name) const;

    Rat balance(const std::string& account, const std::string& token) const;
    void set_balance(const std::string& account, const std::string& token, const Rat& v);
    void add_balance(const std::string& account, const std::string& token, const Rat& delta);
    // Moves `amount` if the source covers it; returns false (no mutation) otherwise.
    bool try_move(const std::string& from, const std::string& to, const std::string& token,
                  const Rat& amount);

    Rat price(const std::string& token) const;
    Rat observed_price(const std::string& token) const;
    // Swap rate e(k_i, k_j): how many k_i buy one k_j. Computed, never stored.
    Rat swap_rate(const std::string& token_i, const std::string& token_j) const;

    std::vector<std::string> benign_accounts() const;
    std::vector<std::string> all_account_ids() const;
    std::vector<std::string> attacker_accounts() const;
    std::vector<std::string> scope_accounts(VsScope scope) const;

    // FNV-1a over a canonical serialization of all mutable state.
    uint64_t state_hash() const;
};

// ---------------------------------------------------------------------------
// Contract behaviors
// ---------------------------------------------------------------------------

// A behavior is a deterministic state-transition function plus a setup hook
// that declares the contract's callable surface at deploy time.
struct Behavior {
    std::function<void(WorldState&, ContractInstance&, const std::map<std::string, std::string>&)>
        setup;
    std::function<Receipt(WorldState&, ContractInstance&, const Transaction&)> invoke;
};

void register_behavior(const std::string& kind, Behavior behavior);
bool behavior_registered(const std::string& kind);
std::vector<std::string> registered_behavior_kinds();

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

WorldState build_world(const WorldSpec& spec);

// Applies one transaction. Reverts restore the pre-state bit-identically;
// readonly functions are checked for purity.
StepSnapshot execute(WorldState& world, const Transaction& tx);

struct ProbeMap {
    bool balance_probe = false;    // balanceOf -> B
    bool price_probe = false;      // getPrice  -> p
    bool amount_out_probe = false; // getAmountOut -> e
    std::set<std::string> price_probe_tokens;  // tokens with a live quote source
};

struct IntrospectionEntry {
    std::string contract;
    FunctionSpec function;
};

struct Introspection {
    std::vector<IntrospectionEntry> callables;  // introspection order is canonical
    ProbeMap probes;

    std::vector<IntrospectionEntry> mutating() const;  // excludes readonly
};

Introspection introspect(const WorldState& world);

enum class PriceSource { Internal, Observed };

Rat total_value(const WorldState& world, const std::vector<std::string>& scope,
                PriceSource source);

}  // namespace finfuzz
