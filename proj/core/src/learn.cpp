// Copyright 2026 The finfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "finfuzz/learn.hpp"

#include <fstream>
#include <sstream>

namespace finfuzz {

const char* error_class_name(ErrorClass e) {
    switch (e) {
        case ErrorClass::None: return "none";
        case ErrorClass::TA: return "TA";
        case ErrorClass::BC: return "BC";
        case ErrorClass::ES: return "ES";
        case ErrorClass::VS: return "VS";
    }
    return "?";
}

ErrorClass error_class_from_name(const std::string& s) {
    if (s == "none") return ErrorClass::None;
    if (s == "TA") return ErrorClass::TA;
    if (s == "BC") return ErrorClass::BC;
    if (s == "ES") return ErrorClass::ES;
    if (s == "VS") return ErrorClass::VS;
    throw WorldError("unknown error class: '" + s + "'");
}

ErrorClass error_class_of(MevulClass c) {
    switch (c) {
        case MevulClass::TA: return ErrorClass::TA;
        case MevulClass::BC: return ErrorClass::BC;
        case MevulClass::ES: return ErrorClass::ES;
        case MevulClass::VS: return ErrorClass::VS;
    }
    return ErrorClass::None;
}

ErrorClass fold_verdicts(const std::vector<Verdict>& verdicts) {
    ErrorClass best = ErrorClass::None;
    for (const auto& v : verdicts) {
        ErrorClass e = error_class_of(v.cls);
        if (static_cast<int>(e) > static_cast<int>(best)) best = e;
    }
    return best;
}

Rat measure(ErrorClass e, const LabelSet& labels) {
    if (!labels.empty() && e != ErrorClass::None && labels.count(e)) return 1;
    if (labels.empty() && e != ErrorClass::None) return rat_of(1, 2);
    return 0;
}

int reward(const Rat& m_prev, const Rat& m_curr, RewardMode mode) {
    if (mode == RewardMode::Prose) return m_curr > m_prev ? 1 : 0;
    return m_curr <= m_prev ? 1 : 0;
}

// ---------------------------------------------------------------------------
// QTable
// ---------------------------------------------------------------------------

QEntry QTable::get(const StateKey& s, const std::string& action) const {
    auto it = entries_.find({s, action});
    return it == entries_.end() ? QEntry{} : it->second;
}

void QTable::update(const StateKey& s, const std::string& action, int r, const Rat& m) {
    QEntry e = get(s, action);
    long n = e.n + 1;
    Rat rm = Rat(r) * m;
    e.q = Rat(rat_of(n - 1, n) * e.q + rm / n);
    e.n = n;
    entries_[{s, action}] = e;
}

namespace {

std::string field_escape(const std::string& s) { return s.empty() ? "-" : s; }
std::string field_unescape(const std::string& s) { return s == "-" ? "" : s; }

}  // namespace

std::string QTable::serialize() const {
    std::ostringstream out;
    out << "finfuzz-qtable v1\n";
    for (const auto& [key, e] : entries_) {
        out << field_escape(key.first.fn_id) << '\t' << error_class_name(key.first.e) << '\t'
            << field_escape(key.second) << '\t' << rat_str(e.q) << '\t' << e.n << '\n';
    }
    return out.str();
}

QTable QTable::deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "finfuzz-qtable v1")
        throw WorldError("unrecognized q-table header: '" + line + "'");
    QTable t;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string fn, e, action, q, n;
        if (!std::getline(ls, fn, '\t') || !std::getline(ls, e, '\t') ||
            !std::getline(ls, action, '\t') || !std::getline(ls, q, '\t') ||
            !std::getline(ls, n, '\t'))
            throw WorldError("bad q-table line " + std::to_string(line_no));
        StateKey key{field_unescape(fn), error_class_from_name(e)};
        QEntry entry{rat_parse(q), std::stol(n)};
        t.entries_[{key, field_unescape(action)}] = entry;
    }
    return t;
}

void QTable::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw WorldError("cannot write q-table file '" + path + "'");
    out << serialize();
}

QTable QTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw WorldError("cannot open q-table file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return deserialize(ss.str());
}

QTable QTable::merge(const std::vector<QTable>& tables) {
    QTable out;
    for (const auto& t : tables) {
        for (const auto& [key, e] : t.entries_) {
            if (e.n == 0) continue;
            auto it = out.entries_.find(key);
            if (it == out.entries_.end()) {
                out.entries_[key] = e;
            } else {
                long n = it->second.n + e.n;
                it->second.q = Rat((it->second.q * it->second.n + e.q * e.n) / n);
                it->second.n = n;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Policy
// ---------------------------------------------------------------------------

void PolicyConfig::validate() const {
    if (explore_eps < 0 || explore_eps > 1) throw WorldError("explore_eps must be within [0, 1]");
}

std::string select_next(const QTable& table, const StateKey& state,
                        const std::vector<std::string>& candidates, const PolicyConfig& cfg,
                        Rng& rng) {
    if (candidates.empty()) throw StrategyExhausted("epsilon-policy: no candidates");
    size_t best = 0;
    Rat best_q = table.get(state, candidates[0]).q;
    for (size_t i = 1; i < candidates.size(); ++i) {
        Rat q = table.get(state, candidates[i]).q;
        if (q > best_q) {  // strictly greater: ties keep the lowest index
            best_q = q;
            best = i;
        }
    }
    if (candidates.size() == 1) return candidates[0];

    // Explore with probability eps = num/den exactly: an unbiased integer
    // draw in [0, den) lands below num with probability eps.
    const Rat& eps = cfg.explore_eps;
    mpz_class den = eps.get_den();
    mpz_class num = eps.get_num();
    mpz_class draw;
    {
        size_t words = (mpz_sizeinbase(den.get_mpz_t(), 2) + 63) / 64;
        mpz_class span = mpz_class(1) << static_cast<unsigned long>(64 * words);
        mpz_class limit = span - span % den;
        do {
            draw = 0;
            for (size_t w = 0; w < words; ++w) {
                draw <<= 64;
                draw += mpz_class(rng.next_u64());
            }
        } while (draw >= limit);
        draw %= den;
    }
    if (draw < num) {
        size_t other = rng.index(candidates.size() - 1);
        if (other >= best) ++other;
        return candidates[other];
    }
    return candidates[best];
}

// ---------------------------------------------------------------------------
// Learner
// ---------------------------------------------------------------------------

void Learner::observe(const std::string& fn_id, const std::vector<Verdict>& verdicts,
                      QTable& table) {
    ErrorClass e = fold_verdicts(verdicts);
    Rat m = measure(e, labels_);
    int r = reward(m_prev_, m, mode_);
    // Updates key off the state the action was taken from; the very first
    // observation keys off the initial state ("", none).
    table.update(state_, fn_id, r, m);
    state_ = StateKey{fn_id, e};
    m_prev_ = m;
}

Transaction Learner::next_transaction(WorldState& world, const QTable& table, Rng& rng,
                                      std::vector<std::string>* warnings) {
    Introspection intro = introspect(world);
    auto mutating = intro.mutating();
    if (mutating.empty()) throw StrategyExhausted("world exposes no mutating functions to fuzz");

    std::vector<std::string> ids;
    for (const auto& e : mutating) ids.push_back(e.contract + "." + e.function.name);
    std::string chosen = select_next(table, state_, ids, policy_, rng);

    for (const auto& e : mutating) {
        if (e.contract + "." + e.function.name == chosen) {
            Transaction tx;
            tx.target = e.contract;
            tx.function = e.function.name;
            tx.sender = pick_sender(world, rng);
            tx.args = instantiate_params({}, e.function, e.contract, tx.sender, world, rng,
                                         warnings);
            return tx;
        }
    }
    throw StrategyExhausted("selected function disappeared from the world");
}

}  // namespace finfuzz
