// Acceptance gate for the evaluation framework. Each criterion prints one
// [PASS]/[FAIL]/[SKIP] line; the process exits non-zero if any criterion
// fails. Criteria 5-7 need the real OpenML usage snapshot, which is not
// shipped with the repository: point SHREC_OPENML_DIR at a directory
// holding either a cleaned corpus (interactions.csv, descriptions.jsonl,
// catalog.json) or a raw dump (raw.csv + descriptions.jsonl) to enable
// them.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "shrec/ingest.hpp"
#include "shrec/io.hpp"
#include "shrec/metrics.hpp"
#include "shrec/recommend.hpp"
#include "shrec/runner.hpp"
#include "shrec/scenario.hpp"
#include "support/synthetic.hpp"

using namespace shrec;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f s", s);
    return buf;
}

void pass(const std::string& name, const std::string& detail) {
    std::cout << "[PASS] " << name << ": " << detail << "\n";
}

void fail(const std::string& name, const std::string& detail) {
    ++failures;
    std::cout << "[FAIL] " << name << ": " << detail << "\n";
}

void skip(const std::string& name, const std::string& detail) {
    std::cout << "[SKIP] " << name << ": " << detail << "\n";
}

// C1: five accuracy metrics against literal formula transcriptions on
// randomized fixtures, |list| <= 10 and |truth| <= 5, agreement to 1e-12.
void criterion_1() {
    const std::string name = "C1 metric oracle suite";
    auto start = Clock::now();
    try {
        Rng rng(9001);
        int fixtures = 0;
        int mismatches = 0;
        std::string first_bad;
        for (int trial = 0; trial < 240; ++trial) {
            std::vector<std::string> ids;
            std::set<std::string> used;
            const int len = static_cast<int>(rng.next_below(11));
            while (static_cast<int>(ids.size()) < len) {
                std::string id = "x" + std::to_string(rng.next_below(15));
                if (used.insert(id).second) ids.push_back(id);
            }
            std::set<std::string> truth;
            const int ts = 1 + static_cast<int>(rng.next_below(5));
            while (static_cast<int>(truth.size()) < ts)
                truth.insert("x" + std::to_string(rng.next_below(15)));
            const int k = 1 + static_cast<int>(rng.next_below(12));

            RecommendationList list;
            list.target = "t";
            for (std::size_t i = 0; i < ids.size(); ++i)
                list.entries.push_back({ids[i], 1.0 / static_cast<double>(i + 1)});

            const std::pair<const char*, std::pair<double, double>> checks[] = {
                {"precision", {precision_at_k(list, truth, k),
                               support::oracle::precision(ids, truth, k)}},
                {"recall",
                 {recall_at_k(list, truth, k), support::oracle::recall(ids, truth, k)}},
                {"mrr", {mrr_at_k(list, truth, k), support::oracle::mrr(ids, truth, k)}},
                {"map", {map_at_k(list, truth, k),
                         support::oracle::average_precision(ids, truth, k)}},
                {"ndcg",
                 {ndcg_at_k(list, truth, k), support::oracle::ndcg(ids, truth, k)}},
            };
            for (const auto& [metric, pairv] : checks) {
                if (std::fabs(pairv.first - pairv.second) > 1e-12) {
                    ++mismatches;
                    if (first_bad.empty())
                        first_bad = std::string(metric) + " trial " +
                                    std::to_string(trial) + ": got " +
                                    std::to_string(pairv.first) + ", oracle " +
                                    std::to_string(pairv.second);
                }
            }
            ++fixtures;
        }
        const double elapsed = seconds_since(start);
        if (mismatches == 0 && fixtures >= 200 && elapsed < 5.0)
            pass(name, "5 metrics x " + std::to_string(fixtures) +
                           " fixtures agree to 1e-12 (" + fmt_seconds(elapsed) + ")");
        else if (mismatches > 0)
            fail(name, std::to_string(mismatches) + " mismatches; first: " + first_bad);
        else
            fail(name, "runtime " + fmt_seconds(elapsed) + " exceeds the 5 s budget");
    } catch (const std::exception& e) {
        fail(name, std::string("exception: ") + e.what());
    }
}

// C2: structural invariants of every recommendation list from every method
// on a 50-user synthetic corpus.
void criterion_2() {
    const std::string name = "C2 ranking invariants";
    auto start = Clock::now();
    try {
        support::CorpusSpec spec;
        spec.n_users = 50;
        spec.n_datasets = 40;
        spec.n_algorithms = 30;
        spec.n_extra_datasets = 10;
        spec.n_extra_algorithms = 10;
        spec.n_interactions = 600;
        spec.described_share = 0.9;
        spec.seed = 2;
        auto corpus = support::make_corpus(spec);
        EvalConfig config;
        config.rng_seed = 42;
        auto index = detail::build_description_index(corpus, config);

        long long lists_checked = 0;
        long long violations = 0;
        std::string first_bad;
        for (Scenario sc : all_scenarios()) {
            for (Method m : {Method::MP, Method::CF, Method::CB}) {
                CellResult cell = run_cell(corpus, sc, m, config, &index);
                for (std::size_t li = 0; li < cell.lists.size(); ++li) {
                    const auto& list = cell.lists[li];
                    const auto& td = cell.data.targets.at(list.target);
                    bool ok = list.entries.size() <= 10;
                    std::set<std::string> seen;
                    double prev = std::numeric_limits<double>::infinity();
                    for (const auto& e : list.entries) {
                        ok = ok && cell.data.candidate_catalog.count(e.id) == 1;
                        ok = ok && td.profile.count(e.id) == 0;
                        ok = ok && seen.insert(e.id).second;
                        ok = ok && e.score <= prev && e.score > 0.0;
                        prev = e.score;
                    }
                    if (!ok) {
                        ++violations;
                        if (first_bad.empty())
                            first_bad = std::string(scenario_name(sc)) + "/" +
                                        method_name(m) + "/" + list.target;
                    }
                    ++lists_checked;
                }
            }
        }
        const double elapsed = seconds_since(start);
        if (violations == 0 && elapsed < 10.0)
            pass(name, std::to_string(lists_checked) +
                           " lists across 18 cells satisfy all invariants (" +
                           fmt_seconds(elapsed) + ")");
        else if (violations > 0)
            fail(name, std::to_string(violations) + " violating lists; first: " + first_bad);
        else
            fail(name, "runtime " + fmt_seconds(elapsed) + " exceeds the 10 s budget");
    } catch (const std::exception& e) {
        fail(name, std::string("exception: ") + e.what());
    }
}

// C3: recommend_cf against exhaustive neighbour enumeration, exact equality
// including scores and tie-breaks, on fixtures with at most 10 targets.
void criterion_3() {
    const std::string name = "C3 CF exhaustive oracle";
    try {
        long long comparisons = 0;
        long long mismatches = 0;
        std::string first_bad;

        auto compare_all = [&](const ScenarioData& sd, int k, int n) {
            CfModel model(sd);
            for (const auto& [id, td] : sd.targets) {
                auto got = model.recommend(id, k, n);
                auto want = support::oracle::cf_recommend(sd, id, k, n);
                bool same = got.entries.size() == want.entries.size();
                for (std::size_t i = 0; same && i < got.entries.size(); ++i)
                    same = got.entries[i].id == want.entries[i].id &&
                           got.entries[i].score == want.entries[i].score;
                if (!same) {
                    ++mismatches;
                    if (first_bad.empty())
                        first_bad = std::string(scenario_name(sd.scenario)) + "/" + id;
                }
                ++comparisons;
            }
        };

        Rng rng(777);
        for (int trial = 0; trial < 40; ++trial) {
            const bool same_kind = trial % 2 == 1;
            ScenarioData sd;
            sd.scenario = same_kind ? Scenario::SC5 : Scenario::SC1;
            const int n_targets = 2 + static_cast<int>(rng.next_below(9));
            for (int t = 0; t < n_targets; ++t) {
                std::string id = (same_kind ? "d" : "u") + std::to_string(t);
                TargetData td;
                const int len = 1 + static_cast<int>(rng.next_below(5));
                while (static_cast<int>(td.profile.size()) < len)
                    td.profile.insert((same_kind ? "a" : "i") +
                                      std::to_string(rng.next_below(12)));
                td.ground_truth.insert("truth");
                sd.targets.emplace(std::move(id), std::move(td));
            }
            if (same_kind)
                for (int t = 0; t < n_targets; ++t)
                    sd.candidate_catalog.insert("d" + std::to_string(t));
            else
                for (int i = 0; i < 12; ++i)
                    sd.candidate_catalog.insert("i" + std::to_string(i));
            for (const auto& id : sd.candidate_catalog) sd.popularity.emplace(id, 0);
            for (int k : {1, 3, 40}) compare_all(sd, k, 10);
        }

        support::CorpusSpec small;
        small.n_users = 8;
        small.n_datasets = 10;
        small.n_algorithms = 8;
        small.n_extra_datasets = 2;
        small.n_extra_algorithms = 2;
        small.n_interactions = 60;
        small.seed = 3;
        auto corpus = support::make_corpus(small);
        EvalConfig config;
        for (Scenario sc : all_scenarios())
            compare_all(build_scenario(corpus, sc, config, 11), config.neighbors,
                        config.list_size);

        if (mismatches == 0)
            pass(name, std::to_string(comparisons) +
                           " target lists equal the oracle exactly, scores included");
        else
            fail(name, std::to_string(mismatches) + " mismatching lists; first: " + first_bad);
    } catch (const std::exception& e) {
        fail(name, std::string("exception: ") + e.what());
    }
}

// C4: knee detection against a brute-force chord-distance scan on random
// monotone curves, plus the documented flat-curve tie-break.
void criterion_4() {
    const std::string name = "C4 kneedle oracle";
    try {
        Rng rng(4242);
        int curves = 0;
        int mismatches = 0;
        std::string first_bad;
        for (int trial = 0; trial < 60; ++trial) {
            const int n = 3 + static_cast<int>(rng.next_below(60));
            std::vector<long long> counts(n);
            long long value = 1 + static_cast<long long>(rng.next_below(5));
            for (int i = n - 1; i >= 0; --i) {
                counts[i] = value;
                value += static_cast<long long>(rng.next_below(200));
            }
            auto knee = detect_knee(counts);
            auto expected = static_cast<std::size_t>(support::oracle::knee_rank(counts));
            if (knee != expected) {
                ++mismatches;
                if (first_bad.empty())
                    first_bad = "trial " + std::to_string(trial) + ": got rank " +
                                std::to_string(knee) + ", oracle " +
                                std::to_string(expected);
            }
            ++curves;
        }

        bool flat_ok = true;
        std::vector<long long> flat(5, 7);
        if (detect_knee(flat) != 0) flat_ok = false;

        if (mismatches == 0 && curves >= 50 && flat_ok)
            pass(name, std::to_string(curves) +
                           " random curves match the brute-force scan; flat curve "
                           "resolves to the first point");
        else if (!flat_ok)
            fail(name, "flat curve did not resolve to rank 0");
        else
            fail(name, std::to_string(mismatches) + " mismatches; first: " + first_bad);
    } catch (const std::exception& e) {
        fail(name, std::string("exception: ") + e.what());
    }
}

const char* kSnapshotHint =
    "SHREC_OPENML_DIR not set; point it at the OpenML usage snapshot "
    "(interactions.csv + descriptions.jsonl + catalog.json, or raw.csv + "
    "descriptions.jsonl) to enable this check";

// Reference statistics of the cleaned snapshot.
struct ReferenceStats {
    long long users = 512;
    long long datasets = 573;
    long long algorithms = 1307;
    long long interactions = 10945;
    long long zero_datasets = 2104;
    long long zero_algorithms = 11037;
};

std::optional<Corpus> load_snapshot(std::string& mode) {
    const char* env = std::getenv("SHREC_OPENML_DIR");
    if (!env) return std::nullopt;
    const fs::path dir(env);
    if (fs::exists(dir / "interactions.csv") && fs::exists(dir / "catalog.json")) {
        mode = "clean";
        return io::load_corpus(dir.string());
    }
    if (fs::exists(dir / "raw.csv") && fs::exists(dir / "descriptions.jsonl")) {
        mode = "raw";
        auto raw = parse_raw((dir / "raw.csv").string());
        auto merged = merge_repetitions(raw);
        std::set<std::string> pre_datasets, pre_algorithms;
        for (const auto& t : merged) {
            pre_datasets.insert(t.dataset);
            pre_algorithms.insert(t.algorithm);
        }
        auto [kept, knee] = knee_filter_users(merged);
        auto descriptions = io::read_descriptions_jsonl((dir / "descriptions.jsonl").string());
        return build_corpus(std::move(kept), descriptions, pre_datasets, pre_algorithms);
    }
    mode = "missing";
    return std::nullopt;
}

std::string stats_line(const StatsReport& s) {
    std::ostringstream out;
    out << s.n_users << " users, " << s.n_datasets << " datasets, " << s.n_algorithms
        << " algorithms, " << s.n_interactions << " interactions, "
        << s.n_datasets_no_interaction << "/" << s.n_algorithms_no_interaction
        << " zero-interaction datasets/algorithms";
    return out.str();
}

// C5: corpus statistics against the recorded reference values; exact on the
// cleaned snapshot, +-5% per count when re-ingesting the raw dump.
void criterion_5(const std::optional<Corpus>& snapshot, const std::string& mode) {
    const std::string name = "C5 snapshot statistics";
    if (!snapshot) {
        if (mode == "missing")
            fail(name, "SHREC_OPENML_DIR is set but holds no recognizable corpus");
        else
            skip(name, kSnapshotHint);
        return;
    }
    try {
        const ReferenceStats want;
        auto got = corpus_stats(*snapshot);
        if (mode == "clean") {
            const bool ok = got.n_users == want.users && got.n_datasets == want.datasets &&
                            got.n_algorithms == want.algorithms &&
                            got.n_interactions == want.interactions &&
                            got.n_datasets_no_interaction == want.zero_datasets &&
                            got.n_algorithms_no_interaction == want.zero_algorithms;
            if (ok)
                pass(name, "cleaned snapshot matches exactly: " + stats_line(got));
            else
                fail(name, "expected 512/573/1307/10945 + 2104/11037, got " +
                               stats_line(got));
        } else {
            auto within = [](long long got_v, long long want_v) {
                return std::llabs(got_v - want_v) <=
                       static_cast<long long>(std::ceil(0.05 * static_cast<double>(want_v)));
            };
            const bool ok = within(got.n_users, want.users) &&
                            within(got.n_datasets, want.datasets) &&
                            within(got.n_algorithms, want.algorithms) &&
                            within(got.n_interactions, want.interactions) &&
                            within(got.n_datasets_no_interaction, want.zero_datasets) &&
                            within(got.n_algorithms_no_interaction, want.zero_algorithms);
            if (ok)
                pass(name, "raw re-ingest lands within 5% of the reference: " +
                               stats_line(got));
            else
                fail(name, "raw re-ingest outside the 5% band: got " + stats_line(got) +
                               ", reference 512/573/1307/10945 + 2104/11037");
        }
    } catch (const std::exception& e) {
        fail(name, std::string("exception: ") + e.what());
    }
}

using ReportGrid = std::map<std::pair<std::string, std::string>, MetricsReport>;

ReportGrid run_grid(const Corpus& corpus, std::uint64_t seed) {
    EvalConfig config;
    config.rng_seed = seed;
    auto index = detail::build_description_index(corpus, config);
    ReportGrid grid;
    for (Scenario sc : all_scenarios())
        for (Method m : {Method::MP, Method::CF, Method::CB}) {
            CellResult cell = run_cell(corpus, sc, m, config, &index);
            grid[{scenario_name(sc), method_name(m)}] = cell.report;
        }
    return grid;
}

// C6: qualitative ordering of the three methods, robust across seeds.
void criterion_6(const std::optional<Corpus>& snapshot) {
    const std::string name = "C6 method-ordering properties";
    if (!snapshot) {
        skip(name, kSnapshotHint);
        return;
    }
    try {
        std::vector<std::string> broken;
        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            auto grid = run_grid(*snapshot, seed);
            for (Scenario sc : all_scenarios()) {
                const std::string s = scenario_name(sc);
                const auto& mp = grid.at({s, "MP"});
                const auto& cf = grid.at({s, "CF"});
                const auto& cb = grid.at({s, "CB"});
                if (!(cf.ndcg_at_k >= mp.ndcg_at_k && cf.ndcg_at_k >= cb.ndcg_at_k))
                    broken.push_back("seed " + std::to_string(seed) + " " + s +
                                     ": CF nDCG not highest");
                if (!(cb.cov_at_k >= mp.cov_at_k && cb.cov_at_k >= cf.cov_at_k))
                    broken.push_back("seed " + std::to_string(seed) + " " + s +
                                     ": CB coverage not highest");
                if (!(cb.recpop_at_k <= mp.recpop_at_k && cb.recpop_at_k <= cf.recpop_at_k))
                    broken.push_back("seed " + std::to_string(seed) + " " + s +
                                     ": CB RecPop not lowest");
                if (!(mp.cov_at_k <= 0.02))
                    broken.push_back("seed " + std::to_string(seed) + " " + s +
                                     ": MP coverage above 0.02");
            }
            const auto& sc4cf = grid.at({"SC4", "CF"});
            const auto& sc2cf = grid.at({"SC2", "CF"});
            if (!(sc4cf.ndcg_at_k > sc2cf.ndcg_at_k))
                broken.push_back("seed " + std::to_string(seed) +
                                 ": SC4/CF nDCG does not exceed SC2/CF");
        }
        if (broken.empty())
            pass(name, "all orderings hold for seeds 1, 2, 3");
        else
            fail(name, std::to_string(broken.size()) + " violations; first: " + broken[0]);
    } catch (const std::exception& e) {
        fail(name, std::string("exception: ") + e.what());
    }
}

// C7: nDCG spot values, informational (CF similarity and CB representation
// are declared stand-ins; deviations get a fidelity note, not a failure).
void criterion_7(const std::optional<Corpus>& snapshot) {
    const std::string name = "C7 nDCG spot checks";
    if (!snapshot) {
        skip(name, kSnapshotHint);
        return;
    }
    try {
        auto grid = run_grid(*snapshot, 1);
        const std::pair<const char*, double> spots[] = {
            {"SC4", 0.51}, {"SC1", 0.30}, {"SC6", 0.14}};
        std::ostringstream detail;
        bool all_within = true;
        for (const auto& [sc, want] : spots) {
            const double got = grid.at({sc, "CF"}).ndcg_at_k;
            const double dev = std::fabs(got - want);
            if (dev > 0.08) all_within = false;
            detail << sc << "/CF nDCG " << got << " vs " << want << " (|d|="
                   << dev << (dev > 0.08 ? ", outside tolerance" : "") << "); ";
        }
        if (all_within)
            pass(name, "within +-0.08: " + detail.str());
        else
            pass(name, "informational, fidelity note: " + detail.str() +
                           "similarity/representation stand-ins can shift CF and CB");
    } catch (const std::exception& e) {
        fail(name, std::string("exception: ") + e.what());
    }
}

// C8: the full 18-cell grid is byte-deterministic and completes within the
// time budget. Uses the snapshot when provided, otherwise a synthetic
// corpus at the same scale.
void criterion_8(const std::optional<Corpus>& snapshot) {
    const std::string name = "C8 grid determinism and runtime";
    try {
        Corpus corpus;
        std::string label;
        if (snapshot) {
            corpus = *snapshot;
            label = "snapshot corpus";
        } else {
            corpus = support::make_corpus(support::reference_scale_spec(12));
            label = "reference-scale synthetic corpus";
        }

        ExperimentPlan plan;
        plan.scenarios = {Scenario::SC1, Scenario::SC2, Scenario::SC3,
                          Scenario::SC4, Scenario::SC5, Scenario::SC6};
        plan.methods = {Method::MP, Method::CF, Method::CB};
        plan.corpus_dir = "unused";
        plan.config.rng_seed = 7;

        const fs::path base = fs::temp_directory_path() / "shrec_acceptance";
        const fs::path dir_a = base / "c8_a";
        const fs::path dir_b = base / "c8_b";
        fs::remove_all(dir_a);
        fs::remove_all(dir_b);

        auto start = Clock::now();
        plan.out_dir = dir_a.string();
        auto reports = run_experiment(plan, corpus);
        const double first_run = seconds_since(start);

        plan.out_dir = dir_b.string();
        run_experiment(plan, corpus);

        std::vector<fs::path> rel_files;
        for (const auto& entry : fs::recursive_directory_iterator(dir_a))
            if (entry.is_regular_file())
                rel_files.push_back(entry.path().lexically_relative(dir_a));
        std::sort(rel_files.begin(), rel_files.end());

        auto slurp = [](const fs::path& p) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream out;
            out << in.rdbuf();
            return out.str();
        };
        std::string first_diff;
        for (const auto& rel : rel_files) {
            if (!fs::exists(dir_b / rel) || slurp(dir_a / rel) != slurp(dir_b / rel)) {
                first_diff = rel.string();
                break;
            }
        }

        if (reports.size() != 18)
            fail(name, "expected 18 report rows, got " + std::to_string(reports.size()));
        else if (!first_diff.empty())
            fail(name, "rerun differs at " + first_diff);
        else if (first_run >= 300.0)
            fail(name, "grid runtime " + fmt_seconds(first_run) +
                           " exceeds the 5 min budget");
        else
            pass(name, "two runs over the " + label + " are byte-identical across " +
                           std::to_string(rel_files.size()) + " files; one grid takes " +
                           fmt_seconds(first_run));
    } catch (const std::exception& e) {
        fail(name, std::string("exception: ") + e.what());
    }
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    std::string mode;
    auto snapshot = load_snapshot(mode);
    criterion_5(snapshot, mode);
    criterion_6(snapshot);
    criterion_7(snapshot);
    criterion_8(snapshot);
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all runnable criteria passed\n";
    return 0;
}
