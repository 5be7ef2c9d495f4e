#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "shrec/corpus.hpp"
#include "shrec/error.hpp"
#include "shrec/io.hpp"
#include "shrec/metrics.hpp"
#include "shrec/recommend.hpp"
#include "shrec/rng.hpp"
#include "shrec/scenario.hpp"
#include "shrec/textindex.hpp"

namespace shrec {

struct ExperimentPlan {
    std::vector<Scenario> scenarios;
    std::vector<Method> methods;
    EvalConfig config;
    std::string corpus_dir;
    std::string out_dir;

    void validate() const {
        if (scenarios.empty()) throw ValidationError("plan has no scenarios");
        if (methods.empty()) throw ValidationError("plan has no methods");
        if (corpus_dir.empty()) throw ValidationError("plan has no corpus_dir");
        if (out_dir.empty()) throw ValidationError("plan has no out_dir");
        config.validate();
    }
};

inline Scenario parse_scenario(const std::string& name) {
    for (Scenario s : all_scenarios())
        if (name == scenario_name(s)) return s;
    throw ParseError("unknown scenario: " + name);
}

inline Method parse_method(const std::string& name) {
    for (Method m : {Method::MP, Method::CF, Method::CB})
        if (name == method_name(m)) return m;
    throw ParseError("unknown method: " + name);
}

inline const char* cb_representation_name(CbItemRepresentation rep) {
    return rep == CbItemRepresentation::OwnDescription ? "own_description"
                                                       : "profile_centroid";
}

inline CbItemRepresentation parse_cb_representation(const std::string& name) {
    if (name == "own_description") return CbItemRepresentation::OwnDescription;
    if (name == "profile_centroid") return CbItemRepresentation::ProfileCentroid;
    throw ParseError("unknown cb_item_representation: " + name);
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string current;
    for (char ch : value) {
        if (ch == ',') {
            std::string t = trim(current);
            if (!t.empty()) out.push_back(t);
            current.clear();
        } else {
            current += ch;
        }
    }
    std::string t = trim(current);
    if (!t.empty()) out.push_back(t);
    return out;
}

inline long long parse_int(const std::string& value, int line_no) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": expected integer, got '" +
                         value + "'");
    }
}

inline double parse_real(const std::string& value, int line_no) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": expected number, got '" +
                         value + "'");
    }
}

inline bool parse_bool(const std::string& value, int line_no) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ParseError("line " + std::to_string(line_no) + ": expected true/false, got '" +
                     value + "'");
}

}  // namespace detail

// Plan files are flat `key = value` text; '#' starts a comment, scenario and
// method sets are comma-separated lists. Unknown keys are rejected so typos
// do not silently fall back to defaults.
inline ExperimentPlan parse_plan_text(std::istream& in) {
    ExperimentPlan plan;
    plan.scenarios = {Scenario::SC1, Scenario::SC2, Scenario::SC3,
                      Scenario::SC4, Scenario::SC5, Scenario::SC6};
    plan.methods = {Method::MP, Method::CF, Method::CB};

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError("line " + std::to_string(line_no) + ": expected key = value");

        if (key == "corpus_dir") {
            plan.corpus_dir = value;
        } else if (key == "out_dir") {
            plan.out_dir = value;
        } else if (key == "scenarios") {
            plan.scenarios.clear();
            for (const auto& name : detail::split_list(value)) {
                Scenario s = parse_scenario(name);
                bool seen = false;
                for (Scenario have : plan.scenarios) seen = seen || have == s;
                if (!seen) plan.scenarios.push_back(s);
            }
        } else if (key == "methods") {
            plan.methods.clear();
            for (const auto& name : detail::split_list(value)) {
                Method m = parse_method(name);
                bool seen = false;
                for (Method have : plan.methods) seen = seen || have == m;
                if (!seen) plan.methods.push_back(m);
            }
        } else if (key == "list_size") {
            plan.config.list_size = static_cast<int>(detail::parse_int(value, line_no));
        } else if (key == "neighbors") {
            plan.config.neighbors = static_cast<int>(detail::parse_int(value, line_no));
        } else if (key == "split_ratio") {
            plan.config.split_ratio = detail::parse_real(value, line_no);
        } else if (key == "tfidf_min_tf") {
            plan.config.tfidf_min_tf = static_cast<int>(detail::parse_int(value, line_no));
        } else if (key == "tfidf_min_df") {
            plan.config.tfidf_min_df = static_cast<int>(detail::parse_int(value, line_no));
        } else if (key == "overlap_truth_size") {
            plan.config.overlap_truth_size =
                static_cast<int>(detail::parse_int(value, line_no));
        } else if (key == "rng_seed") {
            plan.config.rng_seed =
                static_cast<std::uint64_t>(detail::parse_int(value, line_no));
        } else if (key == "knee_enabled") {
            plan.config.knee_enabled = detail::parse_bool(value, line_no);
        } else if (key == "cb_item_representation") {
            plan.config.cb_item_representation = parse_cb_representation(value);
        } else {
            throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key +
                             "'");
        }
    }
    return plan;
}

inline ExperimentPlan parse_plan_file(const std::string& path) {
    auto in = io::open_input(path);
    ExperimentPlan plan = parse_plan_text(in);
    return plan;
}

inline std::uint64_t cell_seed(const EvalConfig& config, Scenario scenario, Method method) {
    return derive_seed(config.rng_seed,
                       std::string(scenario_name(scenario)) + "/" + method_name(method));
}

struct CellResult {
    Scenario scenario = Scenario::SC1;
    Method method = Method::MP;
    ScenarioData data;
    MetricsReport report;
    std::vector<PerTargetResult> per_target;
    std::vector<RecommendationList> lists;
};

namespace detail {

inline std::string fmt_metric(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline TfIdfModel build_description_index(const Corpus& corpus, const EvalConfig& config) {
    std::map<EntityId, std::vector<std::string>> documents;
    for (const auto& [id, text] : corpus.descriptions)
        documents.emplace(id, normalize_tokenize(text));
    if (documents.empty())
        throw ValidationError("corpus has no item descriptions; CB needs at least one");
    return build_tfidf(documents, config.tfidf_min_tf, config.tfidf_min_df);
}

}  // namespace detail

// One grid cell: build the scenario with the cell's derived seed, produce a
// list per evaluated target and score it. `index` may be null unless the
// method is CB. The CF and CB models are built once and reused across the
// cell's targets.
inline CellResult run_cell(const Corpus& corpus, Scenario scenario, Method method,
                           const EvalConfig& config, const TfIdfModel* index) {
    CellResult cell;
    cell.scenario = scenario;
    cell.method = method;
    const std::uint64_t seed = cell_seed(config, scenario, method);
    cell.data = build_scenario(corpus, scenario, config, seed);
    if (cell.data.targets.empty())
        throw ValidationError(std::string(scenario_name(scenario)) + "/" +
                              method_name(method) + ": no evaluable targets");

    std::unique_ptr<CfModel> cf;
    std::unique_ptr<CbModel> cb;
    if (method == Method::CF) cf = std::make_unique<CfModel>(cell.data);
    if (method == Method::CB) {
        if (!index) throw ValidationError("CB requires a TF-IDF index");
        cb = std::make_unique<CbModel>(cell.data, *index, config.cb_item_representation);
    }

    cell.lists.reserve(cell.data.targets.size());
    for (const auto& [id, td] : cell.data.targets) {
        try {
            switch (method) {
                case Method::MP:
                    cell.lists.push_back(recommend_mp(cell.data, id, config.list_size));
                    break;
                case Method::CF:
                    cell.lists.push_back(
                        cf->recommend(id, config.neighbors, config.list_size));
                    break;
                case Method::CB:
                    cell.lists.push_back(cb->recommend(id, config.list_size));
                    break;
            }
        } catch (const Error& e) {
            throw Error(std::string(scenario_name(scenario)) + "/" + method_name(method) +
                        "/" + id + ": " + e.what());
        }
    }
    cell.report =
        evaluate_lists(cell.data, cell.lists, config.list_size, 10, &cell.per_target);
    cell.report.scenario = scenario;
    cell.report.method = method;

    return cell;
}

inline io::ordered_json report_row_json(const CellResult& cell) {
    io::ordered_json row;
    row["scenario"] = scenario_name(cell.scenario);
    row["method"] = method_name(cell.method);
    row["p1"] = cell.report.p_at_1;
    row["r10"] = cell.report.r_at_k;
    row["mrr10"] = cell.report.mrr_at_k;
    row["map10"] = cell.report.map_at_k;
    row["ndcg10"] = cell.report.ndcg_at_k;
    row["cov10"] = cell.report.cov_at_k;
    row["recpop10"] = cell.report.recpop_at_k;
    row["n_targets"] = cell.report.n_targets_evaluated;
    const ExclusionReport& ex = cell.data.report;
    row["exclusions"] = {{"considered", ex.considered},
                         {"evaluated", ex.evaluated},
                         {"too_few_interactions", ex.too_few_interactions},
                         {"no_interactions", ex.no_interactions},
                         {"isolated", ex.isolated}};
    return row;
}

inline std::string report_csv_header() {
    return "scenario,method,p1,r10,mrr10,map10,ndcg10,cov10,recpop10,n_targets";
}

inline std::string report_csv_row(const io::ordered_json& row) {
    std::string out;
    out += row.at("scenario").get<std::string>();
    out += ',';
    out += row.at("method").get<std::string>();
    for (const char* key : {"p1", "r10", "mrr10", "map10", "ndcg10", "cov10", "recpop10"}) {
        out += ',';
        out += detail::fmt_metric(row.at(key).get<double>());
    }
    out += ',';
    out += std::to_string(row.at("n_targets").get<long long>());
    return out;
}

inline std::string render_report_csv(const std::vector<io::ordered_json>& rows) {
    std::string out = report_csv_header();
    out += '\n';
    for (const auto& row : rows) {
        out += report_csv_row(row);
        out += '\n';
    }
    return out;
}

inline io::ordered_json config_json(const EvalConfig& config) {
    io::ordered_json j;
    j["list_size"] = config.list_size;
    j["neighbors"] = config.neighbors;
    j["split_ratio"] = config.split_ratio;
    j["tfidf_min_tf"] = config.tfidf_min_tf;
    j["tfidf_min_df"] = config.tfidf_min_df;
    j["overlap_truth_size"] = config.overlap_truth_size;
    j["rng_seed"] = config.rng_seed;
    j["knee_enabled"] = config.knee_enabled;
    j["cb_item_representation"] = cb_representation_name(config.cb_item_representation);
    return j;
}

namespace detail {

inline void write_cell_artifacts(const std::filesystem::path& out_dir,
                                 const CellResult& cell) {
    const std::string stem =
        std::string(scenario_name(cell.scenario)) + "_" + method_name(cell.method);

    {
        auto out = io::open_output((out_dir / "recs" / (stem + ".jsonl")).string());
        for (const auto& list : cell.lists) {
            io::ordered_json j;
            j["scenario"] = scenario_name(cell.scenario);
            j["method"] = method_name(cell.method);
            j["target"] = list.target;
            io::ordered_json items = io::ordered_json::array();
            for (const auto& entry : list.entries)
                items.push_back({{"id", entry.id}, {"score", entry.score}});
            j["items"] = std::move(items);
            out << j.dump() << '\n';
        }
    }
    {
        auto out = io::open_output((out_dir / "popfrac" / (stem + ".jsonl")).string());
        for (const auto& r : cell.per_target) {
            io::ordered_json j;
            j["scenario"] = scenario_name(cell.scenario);
            j["method"] = method_name(cell.method);
            j["target"] = r.target;
            j["popular_fraction"] = r.popular_fraction;
            out << j.dump() << '\n';
        }
    }
    {
        // The scenario snapshot is written per cell because each cell owns
        // its seed stream and therefore its holdout split.
        const ScenarioData& sd = cell.data;
        io::ordered_json j;
        j["scenario"] = scenario_name(cell.scenario);
        j["method"] = method_name(cell.method);
        j["target_kind"] = kind_name(target_kind(cell.scenario));
        j["candidate_kind"] = kind_name(candidate_kind(cell.scenario));
        j["n_candidates"] = sd.candidate_catalog.size();
        j["exclusions"] = {{"considered", sd.report.considered},
                           {"evaluated", sd.report.evaluated},
                           {"too_few_interactions", sd.report.too_few_interactions},
                           {"no_interactions", sd.report.no_interactions},
                           {"isolated", sd.report.isolated}};
        io::ordered_json targets = io::ordered_json::object();
        for (const auto& [id, td] : sd.targets) {
            io::ordered_json t;
            t["profile"] = std::vector<std::string>(td.profile.begin(), td.profile.end());
            t["ground_truth"] =
                std::vector<std::string>(td.ground_truth.begin(), td.ground_truth.end());
            targets[id] = std::move(t);
        }
        j["targets"] = std::move(targets);
        auto out = io::open_output((out_dir / "scenarios" / (stem + ".json")).string());
        out << j.dump(2) << '\n';
    }
}

}  // namespace detail

// Runs the full scenario × method grid over an already-loaded corpus and
// writes every artifact under plan.out_dir. Cells are independent: each one
// derives its seed from (master seed, scenario, method) alone, so dropping
// a cell from the plan never changes another cell's bytes.
inline std::vector<MetricsReport> run_experiment(const ExperimentPlan& plan,
                                                 const Corpus& corpus) {
    plan.validate();
    if (corpus.interactions.empty()) throw ValidationError("corpus has no interactions");

    const std::filesystem::path out_dir(plan.out_dir);
    std::filesystem::create_directories(out_dir / "recs");
    std::filesystem::create_directories(out_dir / "popfrac");
    std::filesystem::create_directories(out_dir / "scenarios");

    bool wants_cb = false;
    for (Method m : plan.methods) wants_cb = wants_cb || m == Method::CB;
    TfIdfModel index;
    if (wants_cb) index = detail::build_description_index(corpus, plan.config);

    std::vector<MetricsReport> reports;
    std::vector<io::ordered_json> rows;
    for (Scenario scenario : plan.scenarios) {
        for (Method method : plan.methods) {
            CellResult cell = run_cell(corpus, scenario, method, plan.config,
                                       wants_cb ? &index : nullptr);
            detail::write_cell_artifacts(out_dir, cell);
            rows.push_back(report_row_json(cell));
            reports.push_back(cell.report);
        }
    }

    {
        auto out = io::open_output((out_dir / "report.csv").string());
        out << render_report_csv(rows);
    }
    {
        io::ordered_json j;
        j["config"] = config_json(plan.config);
        j["rows"] = rows;
        auto out = io::open_output((out_dir / "report.json").string());
        out << j.dump(2) << '\n';
    }
    return reports;
}

inline std::vector<MetricsReport> run_experiment(const ExperimentPlan& plan) {
    Corpus corpus = io::load_corpus(plan.corpus_dir);
    return run_experiment(plan, corpus);
}

}  // namespace shrec
