// Copyright 2026 The finfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "finfuzz/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace finfuzz {

using nlohmann::ordered_json;

const char* kToolVersion = "1.0.0";
const char* kReportSchema = "finfuzz-report/1";

const char* strategy_name(Strategy s) { return s == Strategy::Full ? "full" : "random"; }

Strategy strategy_from_name(const std::string& s) {
    if (s == "full") return Strategy::Full;
    if (s == "random") return Strategy::Random;
    throw ConfigError("unknown strategy '" + s + "' (want full|random)");
}

const char* reward_mode_name(RewardMode m) {
    return m == RewardMode::Prose ? "prose" : "literal";
}

RewardMode reward_mode_from_name(const std::string& s) {
    if (s == "prose") return RewardMode::Prose;
    if (s == "literal") return RewardMode::Literal;
    throw ConfigError("unknown reward mode '" + s + "' (want prose|literal)");
}

const char* ta_mode_name(TaMode m) {
    return m == TaMode::Corrected ? "corrected" : "strict-paper";
}

TaMode ta_mode_from_name(const std::string& s) {
    if (s == "corrected") return TaMode::Corrected;
    if (s == "strict-paper") return TaMode::StrictPaper;
    throw ConfigError("unknown ta mode '" + s + "' (want corrected|strict-paper)");
}

void CampaignConfig::validate() const {
    if (scenario.empty()) throw ConfigError("a scenario name or world spec path is required");
    if (budget < 1) throw ConfigError("budget must be >= 1");
    auto in_unit = [](const Rat& r) { return r >= 0 && r <= 1; };
    if (!in_unit(tol_eps)) throw ConfigError("tol-eps must be within [0, 1]");
    if (!in_unit(lambda)) throw ConfigError("lambda must be within [0, 1]");
    if (!in_unit(explore_eps)) throw ConfigError("explore-eps must be within [0, 1]");
    if (!in_unit(stage_split)) throw ConfigError("stage-split must be within [0, 1]");
}

// ---------------------------------------------------------------------------
// Campaign
// ---------------------------------------------------------------------------

namespace {

bool looks_like_path(const std::string& s) {
    return s.find('/') != std::string::npos || s.find(".json") != std::string::npos;
}

Scenario resolve_scenario(const std::string& name_or_path) {
    register_builtin_behaviors();
    if (scenario_exists(name_or_path)) return load_scenario(name_or_path);
    if (looks_like_path(name_or_path)) {
        Scenario s;
        s.name = name_or_path;
        s.world_spec = load_world_spec_file(name_or_path);
        return s;  // user worlds carry no labels and no witness
    }
    throw ConfigError("unknown scenario '" + name_or_path +
                      "' (not in the registry and not a file path)");
}

std::string iso_timestamp_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fn_id_of(const Transaction& tx) { return tx.target + "." + tx.function; }

}  // namespace

Report run_campaign(const CampaignConfig& cfg) {
    cfg.validate();
    Scenario scenario = resolve_scenario(cfg.scenario);
    WorldState world = build_world(scenario.world_spec);

    std::vector<Rule> rules;
    if (!cfg.rules_path.empty()) rules = load_rules_file(cfg.rules_path);

    OracleConfig ocfg;
    ocfg.tol_eps = cfg.tol_eps;
    ocfg.lambda = cfg.lambda;
    ocfg.ta_mode = cfg.ta_mode;
    ocfg.vs_scope = cfg.vs_scope;
    ocfg.validate();
    OracleContext octx(world, ocfg);

    QTable qtable;
    if (!cfg.qtable_path.empty()) {
        std::ifstream probe(cfg.qtable_path);
        if (probe.good()) qtable = QTable::load(cfg.qtable_path);
    }
    Learner learner(scenario.labels, PolicyConfig{cfg.explore_eps}, cfg.reward_mode);
    RuleEngine rule_engine(rules, world);
    Rng rng(cfg.seed);

    Report report;
    report.config = cfg;
    report.world_spec = scenario.world_spec;

    // Rule stage ends at the split point or once every rule completed a pass,
    // whichever comes first.
    long split_point = 0;
    {
        Rat exact = cfg.stage_split * cfg.budget;
        mpz_class q = exact.get_num() / exact.get_den();
        split_point = q.get_si();
        if (Rat(q) != exact) split_point += 1;  // ceil
    }

    std::set<std::pair<std::string, std::string>> coverage;
    long stage_switch_at = 0;

    for (long step = 1; step <= cfg.budget; ++step) {
        bool rule_stage = cfg.strategy == Strategy::Full && !rules.empty() &&
                          step <= split_point && !rule_engine.all_rules_passed();
        if (!rule_stage && stage_switch_at == 0) stage_switch_at = step;

        Transaction tx;
        try {
            if (cfg.strategy == Strategy::Random) {
                Introspection intro = introspect(world);
                IntrospectionEntry entry = uniform_callable(intro, rng);
                tx.target = entry.contract;
                tx.function = entry.function.name;
                tx.sender = pick_sender(world, rng);
                tx.args = instantiate_params({}, entry.function, entry.contract, tx.sender,
                                             world, rng, &report.warnings);
            } else if (rule_stage) {
                tx = rule_engine.next_transaction(world, rng, &report.warnings);
            } else {
                tx = learner.next_transaction(world, qtable, rng, &report.warnings);
            }
        } catch (const UnsatisfiableHint& e) {
            // A rule hint this world cannot satisfy falls back to a plain
            // uniform draw; the rule cursor keeps whatever progress it made.
            report.warnings.push_back(std::string("hint fallback: ") + e.what());
            Introspection intro = introspect(world);
            IntrospectionEntry entry = uniform_callable(intro, rng);
            tx.target = entry.contract;
            tx.function = entry.function.name;
            tx.sender = pick_sender(world, rng);
            tx.args = instantiate_params({}, entry.function, entry.contract, tx.sender, world,
                                         rng, &report.warnings);
        }

        StepSnapshot snap = execute(world, tx);
        std::vector<Verdict> verdicts = evaluate_step(world, snap, ocfg, octx);
        if (cfg.strategy == Strategy::Full) learner.observe(fn_id_of(tx), verdicts, qtable);

        coverage.insert({tx.target, tx.function});
        report.poc_transactions.push_back(tx);
        report.executed = step;
        bool any_new = false;
        for (const auto& v : verdicts) {
            if (!report.first_detection.count(v.cls)) {
                report.first_detection[v.cls] = v.tx_index;
                any_new = true;
            }
            report.verdicts.push_back(v);
        }
        (void)any_new;
        if (cfg.early_stop && !verdicts.empty()) break;
    }
    if (stage_switch_at == 0) stage_switch_at = report.executed + 1;
    report.stage_switch_at = stage_switch_at;

    // The stored prefix only needs to reach the last first-detection.
    long max_needed = 0;
    for (const auto& [_, idx] : report.first_detection) max_needed = std::max(max_needed, idx);
    if (report.first_detection.empty())
        report.poc_transactions.clear();
    else
        report.poc_transactions.resize(static_cast<size_t>(max_needed));

    report.coverage_executed = static_cast<long>(coverage.size());
    report.coverage_total = static_cast<long>(introspect(world).mutating().size());
    report.generated_at = iso_timestamp_now();

    if (!cfg.qtable_path.empty() && cfg.strategy == Strategy::Full)
        qtable.save(cfg.qtable_path);
    return report;
}

// ---------------------------------------------------------------------------
// Report (de)serialization
// ---------------------------------------------------------------------------

namespace {

ordered_json value_to_json(const Value& v) {
    switch (v.kind) {
        case ParamKind::Address: return {{"kind", "address"}, {"value", v.text}};
        case ParamKind::Token: return {{"kind", "token"}, {"value", v.text}};
        case ParamKind::Amount: return {{"kind", "amount"}, {"value", rat_str(v.amount)}};
        case ParamKind::Flag: return {{"kind", "flag"}, {"value", v.flag}};
    }
    throw WorldError("bad value kind");
}

Value value_from_json(const ordered_json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "address") return Value::address(j.at("value").get<std::string>());
    if (kind == "token") return Value::token(j.at("value").get<std::string>());
    if (kind == "amount") return Value::amount_of(rat_parse(j.at("value").get<std::string>()));
    if (kind == "flag") return Value::flag_of(j.at("value").get<bool>());
    throw WorldError("bad value kind '" + kind + "'");
}

ordered_json tx_to_json(const Transaction& tx) {
    ordered_json args = ordered_json::array();
    for (const auto& a : tx.args) args.push_back(value_to_json(a));
    return {{"target", tx.target}, {"function", tx.function}, {"sender", tx.sender},
            {"args", args}};
}

Transaction tx_from_json(const ordered_json& j) {
    Transaction tx;
    tx.target = j.at("target").get<std::string>();
    tx.function = j.at("function").get<std::string>();
    tx.sender = j.at("sender").get<std::string>();
    for (const auto& a : j.at("args")) tx.args.push_back(value_from_json(a));
    return tx;
}

ordered_json verdict_to_json(const Verdict& v) {
    ordered_json ev = ordered_json::object();
    for (const auto& [k, val] : v.evidence) ev[k] = val;
    return {{"class", mevul_class_name(v.cls)}, {"tx_index", v.tx_index}, {"evidence", ev}};
}

Verdict verdict_from_json(const ordered_json& j) {
    Verdict v{mevul_class_from_name(j.at("class").get<std::string>()),
              j.at("tx_index").get<int>(),
              {}};
    for (auto it = j.at("evidence").begin(); it != j.at("evidence").end(); ++it)
        v.evidence.emplace_back(it.key(), it.value().get<std::string>());
    return v;
}

ordered_json config_to_json(const CampaignConfig& cfg) {
    ordered_json j;
    j["scenario"] = cfg.scenario;
    j["rules"] = cfg.rules_path;
    j["qtable"] = cfg.qtable_path;
    j["budget"] = cfg.budget;
    j["seed"] = cfg.seed;
    j["tol_eps"] = rat_str(cfg.tol_eps);
    j["lambda"] = rat_str(cfg.lambda);
    j["explore_eps"] = rat_str(cfg.explore_eps);
    j["reward_mode"] = reward_mode_name(cfg.reward_mode);
    j["ta_mode"] = ta_mode_name(cfg.ta_mode);
    j["stage_split"] = rat_str(cfg.stage_split);
    j["early_stop"] = cfg.early_stop;
    j["strategy"] = strategy_name(cfg.strategy);
    j["vs_scope"] = cfg.vs_scope ? vs_scope_name(*cfg.vs_scope) : "scenario-default";
    return j;
}

CampaignConfig config_from_json(const ordered_json& j) {
    CampaignConfig cfg;
    cfg.scenario = j.at("scenario").get<std::string>();
    cfg.rules_path = j.value("rules", "");
    cfg.qtable_path = j.value("qtable", "");
    cfg.budget = j.at("budget").get<long>();
    cfg.seed = j.at("seed").get<uint64_t>();
    cfg.tol_eps = rat_parse(j.at("tol_eps").get<std::string>());
    cfg.lambda = rat_parse(j.at("lambda").get<std::string>());
    cfg.explore_eps = rat_parse(j.at("explore_eps").get<std::string>());
    cfg.reward_mode = reward_mode_from_name(j.at("reward_mode").get<std::string>());
    cfg.ta_mode = ta_mode_from_name(j.at("ta_mode").get<std::string>());
    cfg.stage_split = rat_parse(j.at("stage_split").get<std::string>());
    cfg.early_stop = j.at("early_stop").get<bool>();
    cfg.strategy = strategy_from_name(j.at("strategy").get<std::string>());
    std::string scope = j.value("vs_scope", "scenario-default");
    if (scope != "scenario-default") cfg.vs_scope = vs_scope_from_name(scope);
    return cfg;
}

}  // namespace

std::string report_to_json_text(const Report& report) {
    ordered_json j;
    j["schema"] = kReportSchema;
    j["tool_version"] = kToolVersion;
    j["generated_at"] = report.generated_at;
    j["config"] = config_to_json(report.config);
    j["world_spec"] = ordered_json::parse(world_spec_to_json_text(report.world_spec));
    j["executed"] = report.executed;
    j["stage_switch_at"] = report.stage_switch_at;
    j["coverage"] = {{"executed_pairs", report.coverage_executed},
                     {"total_pairs", report.coverage_total},
                     {"fraction", rat_str(report.coverage_total == 0
                                              ? Rat(0)
                                              : rat_of(report.coverage_executed,
                                                       report.coverage_total))}};
    ordered_json fd = ordered_json::object();
    for (const auto& [cls, idx] : report.first_detection) fd[mevul_class_name(cls)] = idx;
    j["first_detection"] = fd;
    ordered_json poc = ordered_json::object();
    for (const auto& [cls, idx] : report.first_detection)
        poc[mevul_class_name(cls)] = {{"prefix_length", idx}};
    j["poc"] = poc;
    ordered_json txs = ordered_json::array();
    for (const auto& tx : report.poc_transactions) txs.push_back(tx_to_json(tx));
    j["poc_transactions"] = txs;
    ordered_json vs = ordered_json::array();
    for (const auto& v : report.verdicts) vs.push_back(verdict_to_json(v));
    j["verdicts"] = vs;
    j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

Report report_from_json_text(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    if (j.at("schema").get<std::string>() != kReportSchema)
        throw WorldError("unsupported report schema '" + j.at("schema").get<std::string>() +
                         "'");
    Report r;
    r.generated_at = j.at("generated_at").get<std::string>();
    r.config = config_from_json(j.at("config"));
    r.world_spec = world_spec_from_json_text(j.at("world_spec").dump());
    r.executed = j.at("executed").get<long>();
    r.stage_switch_at = j.at("stage_switch_at").get<long>();
    r.coverage_executed = j.at("coverage").at("executed_pairs").get<long>();
    r.coverage_total = j.at("coverage").at("total_pairs").get<long>();
    for (auto it = j.at("first_detection").begin(); it != j.at("first_detection").end(); ++it)
        r.first_detection[mevul_class_from_name(it.key())] = it.value().get<long>();
    for (const auto& t : j.at("poc_transactions")) r.poc_transactions.push_back(tx_from_json(t));
    for (const auto& v : j.at("verdicts")) r.verdicts.push_back(verdict_from_json(v));
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
}

void save_report(const Report& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw WorldError("cannot write report file '" + path + "'");
    out << report_to_json_text(report);
}

Report load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw WorldError("cannot open report file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return report_from_json_text(ss.str());
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

ReplayResult replay_report(const Report& report) {
    register_builtin_behaviors();
    WorldState world = build_world(report.world_spec);

    OracleConfig ocfg;
    ocfg.tol_eps = report.config.tol_eps;
    ocfg.lambda = report.config.lambda;
    ocfg.ta_mode = report.config.ta_mode;
    ocfg.vs_scope = report.config.vs_scope;
    OracleContext octx(world, ocfg);

    ReplayResult result;
    for (const auto& tx : report.poc_transactions) {
        StepSnapshot snap = execute(world, tx);
        for (auto& v : evaluate_step(world, snap, ocfg, octx)) {
            if (!result.first_detection.count(v.cls))
                result.first_detection[v.cls] = v.tx_index;
            result.verdicts.push_back(std::move(v));
        }
    }
    result.matches = result.first_detection == report.first_detection;
    if (!result.matches) {
        std::ostringstream why;
        why << "recorded first detections {";
        for (const auto& [c, i] : report.first_detection)
            why << mevul_class_name(c) << ":" << i << " ";
        why << "} replayed {";
        for (const auto& [c, i] : result.first_detection)
            why << mevul_class_name(c) << ":" << i << " ";
        why << "}";
        result.detail = why.str();
    }
    return result;
}

// ---------------------------------------------------------------------------
// Detection-speed measurement
// ---------------------------------------------------------------------------

BenchConfig bench_config_from_json_text(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    BenchConfig cfg;
    for (const auto& c : j.at("cells"))
        cfg.cells.push_back(
            {c.at("name").get<std::string>(),
             strategy_from_name(c.at("strategy").get<std::string>())});
    cfg.scenarios = j.at("scenarios").get<std::vector<std::string>>();
    cfg.budget = j.value("budget", 10000L);
    cfg.rules_path = j.value("rules", "");
    if (j.contains("tol_eps")) cfg.tol_eps = rat_parse(j.at("tol_eps").get<std::string>());
    if (j.contains("lambda")) cfg.lambda = rat_parse(j.at("lambda").get<std::string>());
    if (j.contains("explore_eps"))
        cfg.explore_eps = rat_parse(j.at("explore_eps").get<std::string>());
    return cfg;
}

BenchConfig load_bench_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw WorldError("cannot open bench matrix file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return bench_config_from_json_text(ss.str());
}

BenchResult measure_tx_to_detection(const BenchConfig& cfg) {
    if (cfg.cells.empty()) throw ConfigError("bench matrix needs at least one cell");
    if (cfg.seeds < 1) throw ConfigError("bench needs at least one seed");
    BenchResult result;
    result.budget = cfg.budget;
    if (cfg.seeds == 1)
        result.warnings.push_back(
            "variance is undefined with a single seed per cell; increase --seeds");

    for (const auto& cell : cfg.cells) {
        for (const auto& scenario_name : cfg.scenarios) {
            Scenario scenario = load_scenario(scenario_name);
            for (int s = 1; s <= cfg.seeds; ++s) {
                CampaignConfig cc;
                cc.scenario = scenario_name;
                cc.rules_path = cfg.rules_path;
                cc.budget = cfg.budget;
                cc.seed = static_cast<uint64_t>(s);
                cc.tol_eps = cfg.tol_eps;
                cc.lambda = cfg.lambda;
                cc.explore_eps = cfg.explore_eps;
                cc.strategy = cell.strategy;
                Report r = run_campaign(cc);
                for (ErrorClass label : scenario.labels) {
                    MevulClass cls = static_cast<MevulClass>(0);
                    switch (label) {
                        case ErrorClass::TA: cls = MevulClass::TA; break;
                        case ErrorClass::BC: cls = MevulClass::BC; break;
                        case ErrorClass::ES: cls = MevulClass::ES; break;
                        case ErrorClass::VS: cls = MevulClass::VS; break;
                        case ErrorClass::None: continue;
                    }
                    BenchSample sample;
                    sample.scenario = scenario_name;
                    sample.seed = cc.seed;
                    auto it = r.first_detection.find(cls);
                    sample.found = it != r.first_detection.end();
                    sample.first_tx = sample.found ? it->second : cfg.budget + 1;
                    result.stats[{cell.name, cls}].samples.push_back(sample);
                }
            }
        }
    }

    for (auto& [key, st] : result.stats) {
        double sum = 0;
        for (const auto& s : st.samples) sum += static_cast<double>(s.first_tx);
        size_t n = st.samples.size();
        st.mean = n ? sum / static_cast<double>(n) : 0.0;
        if (n >= 2) {
            double acc = 0;
            for (const auto& s : st.samples) {
                double d = static_cast<double>(s.first_tx) - st.mean;
                acc += d * d;
            }
            st.variance = acc / static_cast<double>(n - 1);
        }
    }
    return result;
}

std::string BenchResult::format_table() const {
    std::ostringstream out;
    out << "cell        class  n     mean        variance\n";
    for (const auto& [key, st] : stats) {
        char line[160];
        if (st.variance)
            std::snprintf(line, sizeof(line), "%-11s %-6s %-5zu %-11.1f %.1f\n",
                          key.first.c_str(), mevul_class_name(key.second), st.samples.size(),
                          st.mean, *st.variance);
        else
            std::snprintf(line, sizeof(line), "%-11s %-6s %-5zu %-11.1f n/a\n",
                          key.first.c_str(), mevul_class_name(key.second), st.samples.size(),
                          st.mean);
        out << line;
    }
    for (const auto& w : warnings) out << "warning: " << w << "\n";
    return out.str();
}

double sign_test_p_value(int wins, int trials) {
    if (trials <= 0) return 1.0;
    // Exact binomial tail at p = 1/2: P(X >= wins).
    long double p = 0.0L;
    for (int k = wins; k <= trials; ++k) {
        long double logc = 0.0L;
        for (int i = 1; i <= k; ++i)
            logc += std::log(static_cast<long double>(trials - k + i)) -
                    std::log(static_cast<long double>(i));
        p += std::exp(logc - trials * std::log(2.0L));
    }
    return static_cast<double>(std::min<long double>(p, 1.0L));
}

}  // namespace finfuzz
