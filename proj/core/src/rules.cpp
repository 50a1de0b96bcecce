// Copyright 2026 The finfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "finfuzz/rules.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace finfuzz {

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_top_level_commas(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(') depth++;
        if (c == ')') depth--;
        if (c == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

ParamHint parse_hint(const std::string& text, int line) {
    if (text == "self-address") return {ParamHint::Kind::SelfAddress, 0, 0, "", false};
    if (text == "attacker-address") return {ParamHint::Kind::AttackerAddress, 0, 0, "", false};
    if (text == "contract-address") return {ParamHint::Kind::ContractAddress, 0, 0, "", false};
    auto open = text.find('(');
    if (open == std::string::npos || text.back() != ')')
        throw RuleParseError(line, "bad hint '" + text + "'");
    std::string head = text.substr(0, open);
    std::string body = text.substr(open + 1, text.size() - open - 2);
    if (head == "amount") {
        auto dash = body.find('-', 1);  // skip a possible leading minus
        if (dash == std::string::npos)
            throw RuleParseError(line, "amount hint needs a <lo>-<hi> range");
        Rat lo, hi;
        try {
            lo = rat_parse(trim(body.substr(0, dash)));
            hi = rat_parse(trim(body.substr(dash + 1)));
        } catch (const ParseError& e) {
            throw RuleParseError(line, e.what());
        }
        if (lo < 0 || hi < lo) throw RuleParseError(line, "bad amount range '" + body + "'");
        return {ParamHint::Kind::Amount, lo, hi, "", false};
    }
    if (head == "token") {
        if (body == "any") return {ParamHint::Kind::TokenAny, 0, 0, "", false};
        return {ParamHint::Kind::TokenNamed, 0, 0, trim(body), false};
    }
    if (head == "flag") {
        if (body == "true") return {ParamHint::Kind::Flag, 0, 0, "", true};
        if (body == "false") return {ParamHint::Kind::Flag, 0, 0, "", false};
        throw RuleParseError(line, "flag hint must be true or false");
    }
    throw RuleParseError(line, "unknown hint '" + head + "'");
}

}  // namespace

std::vector<Rule> parse_rules(const std::string& text) {
    std::vector<Rule> rules;
    Rule* current = nullptr;
    int open_loop = -1;  // index into current->loops while inside a block
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;

    auto finish_rule = [&](int at_line) {
        if (current && current->steps.empty())
            throw RuleParseError(at_line, "rule '" + current->name + "' has no steps");
    };

    while (std::getline(in, raw)) {
        ++line_no;
        auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;

        if (line.rfind("rule ", 0) == 0) {
            if (open_loop >= 0) throw RuleParseError(line_no, "unterminated loop block");
            finish_rule(line_no);
            std::string name = trim(line.substr(5));
            if (name.empty() || name.back() != ':')
                throw RuleParseError(line_no, "rule header must end with ':'");
            name = trim(name.substr(0, name.size() - 1));
            if (name.empty()) throw RuleParseError(line_no, "empty rule name");
            rules.push_back(Rule{name, "", {}, {}});
            current = &rules.back();
        } else if (line.rfind("source ", 0) == 0) {
            if (!current) throw RuleParseError(line_no, "source outside a rule");
            current->source = trim(line.substr(7));
        } else if (line.rfind("loop ", 0) == 0) {
            if (!current) throw RuleParseError(line_no, "loop outside a rule");
            if (open_loop >= 0) throw RuleParseError(line_no, "nested loops are not supported");
            std::string rest = trim(line.substr(5));
            if (rest.empty() || rest.back() != '{')
                throw RuleParseError(line_no, "loop header must end with '{'");
            rest = trim(rest.substr(0, rest.size() - 1));
            auto dash = rest.find('-');
            if (dash == std::string::npos)
                throw RuleParseError(line_no, "loop needs <a>-<b> bounds");
            int a, b;
            try {
                a = std::stoi(trim(rest.substr(0, dash)));
                b = std::stoi(trim(rest.substr(dash + 1)));
            } catch (...) {
                throw RuleParseError(line_no, "bad loop bounds '" + rest + "'");
            }
            if (a < 1 || b < a)
                throw RuleParseError(line_no, "loop bounds must satisfy 1 <= a <= b");
            current->loops.push_back(
                LoopSpec{a, b, static_cast<int>(current->steps.size()), -1});
            open_loop = static_cast<int>(current->loops.size()) - 1;
        } else if (line == "}") {
            if (open_loop < 0) throw RuleParseError(line_no, "'}' without a loop");
            LoopSpec& l = current->loops[open_loop];
            l.last_step = static_cast<int>(current->steps.size()) - 1;
            if (l.last_step < l.first_step)
                throw RuleParseError(line_no, "empty loop block");
            open_loop = -1;
        } else if (line.rfind("call ", 0) == 0) {
            if (!current) throw RuleParseError(line_no, "call outside a rule");
            std::string rest = trim(line.substr(5));
            std::string name = rest;
            std::vector<ParamHint> hints;
            auto open = rest.find('(');
            if (open != std::string::npos) {
                if (rest.back() != ')') throw RuleParseError(line_no, "missing ')'");
                name = trim(rest.substr(0, open));
                std::string body = rest.substr(open + 1, rest.size() - open - 2);
                for (const auto& part : split_top_level_commas(body))
                    hints.push_back(parse_hint(part, line_no));
            }
            if (name.empty()) throw RuleParseError(line_no, "call needs a function name");
            current->steps.push_back(RuleStep{name, std::move(hints), open_loop});
        } else {
            throw RuleParseError(line_no, "unrecognized line '" + line + "'");
        }
    }
    if (open_loop >= 0) throw RuleParseError(line_no, "unterminated loop block");
    finish_rule(line_no);
    return rules;
}

std::vector<Rule> load_rules_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw WorldError("cannot open rules file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_rules(ss.str());
}

// ---------------------------------------------------------------------------
// Name similarity
// ---------------------------------------------------------------------------

namespace {

// camelCase / snake_case -> lowercased joined form ("withDraw" == "with_draw").
std::string normalize_name(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '_' || c == '-' || c == ' ') continue;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

size_t lcs_length(const std::string& a, const std::string& b) {
    std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (size_t i = 1; i <= a.size(); ++i) {
        for (size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

const std::vector<std::vector<std::string>>& synonym_groups() {
    static const std::vector<std::vector<std::string>> groups = {
        {"deposit", "save", "supply"},
        {"withdraw", "redeem"},
        {"borrow", "loan"},
        {"mint", "issue"},
        {"delegate", "delegateto"},
    };
    return groups;
}

bool synonyms(const std::string& a, const std::string& b) {
    for (const auto& g : synonym_groups()) {
        bool ha = std::find(g.begin(), g.end(), a) != g.end();
        bool hb = std::find(g.begin(), g.end(), b) != g.end();
        if (ha && hb) return true;
    }
    return false;
}

}  // namespace

double name_similarity(const std::string& abstract_name, const std::string& candidate) {
    std::string a = normalize_name(abstract_name);
    std::string b = normalize_name(candidate);
    if (a.empty() || b.empty()) return 0.0;
    if (a == b) return 1.0;
    if (synonyms(a, b)) return 0.9;
    return static_cast<double>(lcs_length(a, b)) / static_cast<double>(std::max(a.size(), b.size()));
}

std::optional<FunctionSpec> match_function(const std::string& abstract_name,
                                           const std::vector<FunctionSpec>& available) {
    double best = 0.0;
    std::optional<FunctionSpec> out;
    for (const auto& f : available) {
        double s = name_similarity(abstract_name, f.name);
        if (s > best) {  // strictly greater: first best wins ties
            best = s;
            out = f;
        }
    }
    if (best >= kMatchThreshold) return out;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parameter instantiation
// ---------------------------------------------------------------------------

namespace {

Rat pow10_rat(int k) {
    static const std::vector<Rat> cache = [] {
        std::vector<Rat> c;
        mpz_class p = 1;
        for (int i = 0; i <= 64; ++i) {
            c.push_back(Rat(p));
            p *= 10;
        }
        return c;
    }();
    if (k >= 0) return cache[static_cast<size_t>(std::min(k, 64))];
    return Rat(Rat(1) / cache[static_cast<size_t>(std::min(-k, 64))]);
}

// Discrete log grid over [lo, hi]: mantissas {1,2,3,5,7} times powers of ten.
std::vector<Rat> log_grid(const Rat& lo, const Rat& hi) {
    std::vector<Rat> out;
    if (hi <= 0 || hi < lo) return out;
    static const int mantissas[] = {1, 2, 3, 5, 7};
    int k_min = -4, k_max = 0;
    while (pow10_rat(k_max) <= hi && k_max < 40) ++k_max;
    for (int k = k_min; k <= k_max; ++k) {
        Rat scale = pow10_rat(k);
        for (int m : mantissas) {
            Rat v = Rat(m * scale);
            if (v >= lo && v <= hi) out.push_back(v);
        }
    }
    if (out.empty()) out.push_back(hi);  // degenerate range: take the cap
    return out;
}

std::string uniform_from(const std::vector<std::string>& pool, Rng& rng) {
    return pool[rng.index(pool.size())];
}

}  // namespace

std::vector<Value> instantiate_params(const std::vector<ParamHint>& hints,
                                      const FunctionSpec& fn, const std::string& contract_name,
                                      const std::string& sender, const WorldState& world,
                                      Rng& rng, std::vector<std::string>* warnings) {
    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back(msg);
    };

    // Hints map to parameters by kind, in order; unmatched parameters fall
    // back to the default generators.
    std::vector<bool> hint_used(hints.size(), false);
    auto take_hint = [&](std::initializer_list<ParamHint::Kind> kinds) -> const ParamHint* {
        for (size_t i = 0; i < hints.size(); ++i) {
            if (hint_used[i]) continue;
            for (auto k : kinds)
                if (hints[i].kind == k) {
                    hint_used[i] = true;
                    return &hints[i];
                }
        }
        return nullptr;
    };

    std::vector<Value> args;
    std::optional<std::string> drawn_token;

    // The account whose balance caps amount draws: the declared source for
    // transferFrom, the sender otherwise.
    auto funding_account = [&](const std::vector<Value>& so_far) -> std::string {
        if (fn.name == "transferFrom" && !so_far.empty() &&
            so_far[0].kind == ParamKind::Address)
            return so_far[0].text;
        return sender;
    };

    auto amount_token = [&]() -> std::optional<std::string> {
        if (drawn_token) return drawn_token;
        const ContractInstance* c = world.find_contract(contract_name);
        if (c && c->managed_tokens.size() == 1) return c->managed_tokens.front();
        if (!world.tokens.empty()) return world.tokens.front().symbol;
        return std::nullopt;
    };

    for (const auto& p : fn.params) {
        switch (p.kind) {
            case ParamKind::Address: {
                const ParamHint* h = take_hint({ParamHint::Kind::SelfAddress,
                                                ParamHint::Kind::AttackerAddress,
                                                ParamHint::Kind::ContractAddress});
                if (h && h->kind == ParamHint::Kind::SelfAddress) {
                    args.push_back(Value::address(sender));
                } else if (h && h->kind == ParamHint::Kind::AttackerAddress) {
                    auto pool = world.attacker_accounts();
                    if (pool.empty())
                        throw UnsatisfiableHint("attacker-address requested but none configured");
                    args.push_back(Value::address(uniform_from(pool, rng)));
                } else if (h && h->kind == ParamHint::Kind::ContractAddress) {
                    std::vector<std::string> pool;
                    for (const auto& c : world.contracts) pool.push_back(c.name);
                    if (pool.empty())
                        throw UnsatisfiableHint("contract-address requested but none deployed");
                    args.push_back(Value::address(uniform_from(pool, rng)));
                } else {
                    args.push_back(Value::address(uniform_from(world.all_account_ids(), rng)));
                }
                break;
            }
            case ParamKind::Token: {
                const ParamHint* h =
                    take_hint({ParamHint::Kind::TokenNamed, ParamHint::Kind::TokenAny});
                std::vector<std::string> pool;
                for (const auto& t : world.tokens) pool.push_back(t.symbol);
                if (pool.empty()) throw UnsatisfiableHint("world has no tokens");
                std::string sym;
                if (h && h->kind == ParamHint::Kind::TokenNamed) {
                    if (world.find_token(h->token)) {
                        sym = h->token;
                    } else {
                        warn("token(" + h->token + ") not present, falling back to token(any)");
                        sym = uniform_from(pool, rng);
                    }
                } else {
                    sym = uniform_from(pool, rng);
                }
                drawn_token = sym;
                args.push_back(Value::token(sym));
                break;
            }
            case ParamKind::Amount: {
                const ParamHint* h = take_hint({ParamHint::Kind::Amount});
                Rat lo = h ? h->lo : rat_of(1, 100);
                Rat hi = h ? h->hi : pow10_rat(19);
                auto tok = amount_token();
                Rat cap = hi;
                if (tok) {
                    Rat bal = world.balance(funding_account(args), *tok);
                    if (bal < cap) cap = bal;
                }
                std::vector<Rat> grid = log_grid(lo, cap);
                if (cap < lo || grid.empty()) {
                    // Empty intersection with the funding balance: fall back
                    // to the raw template range (mint-like calls spend
                    // nothing from the sender).
                    grid = log_grid(lo, hi);
                }
                if (grid.empty()) {
                    args.push_back(Value::amount_of(Rat(0)));
                } else {
                    args.push_back(Value::amount_of(grid[rng.index(grid.size())]));
                }
                break;
            }
            case ParamKind::Flag: {
                const ParamHint* h = take_hint({ParamHint::Kind::Flag});
                args.push_back(Value::flag_of(h ? h->flag : rng.chance_bool()));
                break;
            }
        }
    }
    return args;
}

// ---------------------------------------------------------------------------
// RuleEngine
// ---------------------------------------------------------------------------

RuleEngine::RuleEngine(std::vector<Rule> rules, const WorldState& world)
    : rules_(std::move(rules)) {
    std::vector<FunctionSpec> fns;
    for (const auto& e : introspect(world).mutating()) fns.push_back(e.function);
    for (const auto& r : rules_) {
        passes_[r.name] = 0;
        bool fits = true;
        for (const auto& step : r.steps)
            if (!match_function(step.abstract_name, fns)) fits = false;
        eligible_.push_back(fits);
    }
}

bool RuleEngine::all_rules_passed() const {
    for (const auto& [_, n] : passes_)
        if (n == 0) return false;
    return true;
}

int RuleEngine::passes(const std::string& rule_name) const {
    auto it = passes_.find(rule_name);
    return it == passes_.end() ? 0 : it->second;
}

const RuleStep* RuleEngine::step_at(int position) const {
    if (cursor_.rule_index < 0) return nullptr;
    const Rule& r = rules_[cursor_.rule_index];
    if (position < 1 || position > static_cast<int>(r.steps.size())) return nullptr;
    return &r.steps[position - 1];
}

// Computes the next step position after `cursor_.position`, honoring loop
// blocks. Loop repeat counts are drawn once per pass, when the block is
// entered.
int RuleEngine::advance_position(Rng& rng) {
    const Rule& r = rules_[cursor_.rule_index];
    int n = static_cast<int>(r.steps.size());
    int pos = cursor_.position;

    if (pos >= 1) {
        const RuleStep& cur = r.steps[pos - 1];
        if (cur.loop_group >= 0) {
            const LoopSpec& l = r.loops[cur.loop_group];
            if (pos - 1 == l.last_step) {
                if (cursor_.loop_reps_left > 1) {
                    cursor_.loop_reps_left--;
                    return l.first_step + 1;  // back to the block head
                }
                cursor_.loop_reps_left = 0;
            } else {
                return pos + 1;  // still inside the block
            }
        }
    }
    int next = pos + 1;
    if (next > n) return n + 1;  // caller handles wraparound
    const RuleStep& ns = r.steps[next - 1];
    if (ns.loop_group >= 0 && next - 1 == r.loops[ns.loop_group].first_step) {
        const LoopSpec& l = r.loops[ns.loop_group];
        cursor_.loop_reps_drawn = static_cast<int>(rng.range(l.min_reps, l.max_reps));
        cursor_.loop_reps_left = cursor_.loop_reps_drawn;
    }
    return next;
}

Transaction RuleEngine::next_transaction(WorldState& world, Rng& rng,
                                         std::vector<std::string>* warnings) {
    Introspection intro = introspect(world);
    auto candidates = intro.mutating();
    if (candidates.empty())
        throw StrategyExhausted("world exposes no mutating functions to fuzz");

    auto emit = [&](const IntrospectionEntry& entry,
                    const std::vector<ParamHint>& hints) -> Transaction {
        Transaction tx;
        tx.target = entry.contract;
        tx.function = entry.function.name;
        tx.sender = pick_sender(world, rng);
        tx.args = instantiate_params(hints, entry.function, entry.contract, tx.sender, world,
                                     rng, warnings);
        return tx;
    };

    // Regime (a): uniform sampling until some fitting rule's entry step fires.
    auto regime_a = [&]() -> Transaction {
        IntrospectionEntry drawn = candidates[rng.index(candidates.size())];
        double best = 0.0;
        int best_rule = -1;
        for (size_t i = 0; i < rules_.size(); ++i) {
            if (!eligible_[i]) continue;
            double s = name_similarity(rules_[i].steps.front().abstract_name,
                                       drawn.function.name);
            if (s >= kMatchThreshold && s > best) {  // ties resolve to file order
                best = s;
                best_rule = static_cast<int>(i);
            }
        }
        if (best_rule >= 0) {
            cursor_.rule_index = best_rule;
            cursor_.position = 1;
            cursor_.loop_reps_left = 0;
            cursor_.passes_since_entry = 0;
            // The entry draw may itself sit inside a loop block.
            const Rule& r = rules_[best_rule];
            if (r.steps.front().loop_group >= 0) {
                const LoopSpec& l = r.loops[r.steps.front().loop_group];
                cursor_.loop_reps_drawn = static_cast<int>(rng.range(l.min_reps, l.max_reps));
                cursor_.loop_reps_left = cursor_.loop_reps_drawn;
            }
            return emit(drawn, r.steps.front().hints);
        }
        return emit(drawn, {});
    };

    if (cursor_.rule_index < 0 || cursor_.position == 0) return regime_a();

    // Regime (d): at the end of the rule the cursor resets to 1, restarting
    // the pass (the next emission corresponds to step 2). The second
    // completed pass releases the cursor so other rules get a turn.
    const Rule& rule = rules_[cursor_.rule_index];
    int n = static_cast<int>(rule.steps.size());
    RuleCursor saved = cursor_;
    int next = advance_position(rng);
    if (next > n) {
        passes_[rule.name]++;
        cursor_.passes_since_entry++;
        if (cursor_.passes_since_entry >= 2) {
            cursor_ = RuleCursor{};
            return regime_a();
        }
        cursor_.position = 1;
        cursor_.loop_reps_left = 0;
        cursor_.loop_reps_drawn = 0;
        if (n >= 2) {
            saved = cursor_;
            next = advance_position(rng);
        } else {
            next = 1;  // single-step rule: re-emit its only step
        }
    }

    const RuleStep& step = rule.steps[next - 1];
    // Regime (b): the declared step is available -> emit it with probability 1.
    std::vector<FunctionSpec> fns;
    std::vector<size_t> idx;
    for (size_t i = 0; i < candidates.size(); ++i) {
        fns.push_back(candidates[i].function);
        idx.push_back(i);
    }
    auto matched = match_function(step.abstract_name, fns);
    if (matched) {
        for (size_t i = 0; i < fns.size(); ++i) {
            if (fns[i].name == matched->name) {
                cursor_.position = next;
                return emit(candidates[idx[i]], step.hints);
            }
        }
    }
    // Regime (c): no match, fall back to uniform with the cursor unchanged.
    cursor_ = saved;
    IntrospectionEntry drawn = candidates[rng.index(candidates.size())];
    return emit(drawn, {});
}

IntrospectionEntry uniform_callable(const Introspection& intro, Rng& rng) {
    auto candidates = intro.mutating();
    if (candidates.empty())
        throw StrategyExhausted("world exposes no mutating functions to fuzz");
    return candidates[rng.index(candidates.size())];
}

std::string pick_sender(const WorldState& world, Rng& rng) {
    if (world.actors.empty()) throw StrategyExhausted("world declares no actor accounts");
    return world.actors[rng.index(world.actors.size())];
}

}  // namespace finfuzz
