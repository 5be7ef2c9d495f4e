#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "shrec/error.hpp"
#include "shrec/recommend.hpp"

namespace shrec {

namespace detail {

inline int hits_in_top_k(const RecommendationList& list,
                         const std::set<std::string>& truth, int k) {
    int hits = 0;
    const int limit = std::min<int>(k, static_cast<int>(list.entries.size()));
    for (int p = 0; p < limit; ++p)
        if (truth.count(list.entries[p].id)) ++hits;
    return hits;
}

inline void check_k(int k) {
    if (k < 1) throw ValidationError("k must be >= 1");
}

}  // namespace detail

// Fraction of the top-k slots actually filled with relevant items. Lists
// shorter than k are scored against their own length, so a method is not
// punished for refusing to pad with junk; an empty list scores zero.
inline double precision_at_k(const RecommendationList& list,
                             const std::set<std::string>& truth, int k) {
    detail::check_k(k);
    const int limit = std::min<int>(k, static_cast<int>(list.entries.size()));
    if (limit == 0) return 0.0;
    return static_cast<double>(detail::hits_in_top_k(list, truth, k)) / limit;
}

inline double recall_at_k(const RecommendationList& list,
                          const std::set<std::string>& truth, int k) {
    detail::check_k(k);
    if (truth.empty()) throw ValidationError("recall undefined for empty ground truth");
    return static_cast<double>(detail::hits_in_top_k(list, truth, k)) /
           static_cast<double>(truth.size());
}

// Reciprocal-rank average over the relevant items found in the top k: each
// hit contributes 1/rank and the mean is taken over the hits themselves,
// not over a fixed first-hit. No hits means zero.
inline double mrr_at_k(const RecommendationList& list,
                       const std::set<std::string>& truth, int k) {
    detail::check_k(k);
    const int limit = std::min<int>(k, static_cast<int>(list.entries.size()));
    double sum = 0.0;
    int hits = 0;
    for (int p = 0; p < limit; ++p) {
        if (!truth.count(list.entries[p].id)) continue;
        sum += 1.0 / static_cast<double>(p + 1);
        ++hits;
    }
    if (hits == 0) return 0.0;
    return sum / hits;
}

// Average precision at k: precision is sampled at each hit position and the
// sum is normalized by min(|truth|, k), the best achievable hit count.
inline double map_at_k(const RecommendationList& list,
                       const std::set<std::string>& truth, int k) {
    detail::check_k(k);
    if (truth.empty()) throw ValidationError("average precision undefined for empty ground truth");
    const int limit = std::min<int>(k, static_cast<int>(list.entries.size()));
    double sum = 0.0;
    int hits = 0;
    for (int p = 0; p < limit; ++p) {
        if (!truth.count(list.entries[p].id)) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(p + 1);
    }
    const int ideal = std::min<int>(static_cast<int>(truth.size()), k);
    return sum / ideal;
}

// Binary-relevance nDCG with the 1/log2(p+1) discount; the ideal ranking
// packs min(|truth|, k) hits into the head of the list.
inline double ndcg_at_k(const RecommendationList& list,
                        const std::set<std::string>& truth, int k) {
    detail::check_k(k);
    if (truth.empty()) throw ValidationError("ndcg undefined for empty ground truth");
    const int limit = std::min<int>(k, static_cast<int>(list.entries.size()));
    double dcg = 0.0;
    for (int p = 0; p < limit; ++p)
        if (truth.count(list.entries[p].id))
            dcg += 1.0 / std::log2(static_cast<double>(p + 2));
    const int ideal = std::min<int>(static_cast<int>(truth.size()), k);
    double idcg = 0.0;
    for (int p = 0; p < ideal; ++p) idcg += 1.0 / std::log2(static_cast<double>(p + 2));
    return dcg / idcg;
}

// Catalog coverage: the share of the candidate catalog that shows up in at
// least one top-k list. The catalog includes items nobody interacted with,
// so methods that can only surface popular items are visibly penalized.
inline double coverage_at_k(const std::vector<RecommendationList>& lists,
                            const std::set<std::string>& catalog, int k) {
    detail::check_k(k);
    if (catalog.empty()) throw ValidationError("coverage undefined for empty catalog");
    std::set<std::string> seen;
    for (const auto& list : lists) {
        const int limit = std::min<int>(k, static_cast<int>(list.entries.size()));
        for (int p = 0; p < limit; ++p) seen.insert(list.entries[p].id);
    }
    return static_cast<double>(seen.size()) / static_cast<double>(catalog.size());
}

// Mean popularity of the recommended items, averaged over every filled slot
// across all lists. Repeats count once per slot, so popularity feedback
// loops show up directly. An empty recommendation set scores zero.
inline double recpop_at_k(const std::vector<RecommendationList>& lists,
                          const std::map<std::string, long long>& popularity, int k) {
    detail::check_k(k);
    double sum = 0.0;
    long long slots = 0;
    for (const auto& list : lists) {
        const int limit = std::min<int>(k, static_cast<int>(list.entries.size()));
        for (int p = 0; p < limit; ++p) {
            auto it = popularity.find(list.entries[p].id);
            if (it == popularity.end())
                throw LookupError("popularity missing for item " + list.entries[p].id);
            sum += static_cast<double>(it->second);
            ++slots;
        }
    }
    if (slots == 0) return 0.0;
    return sum / static_cast<double>(slots);
}

// Share of a list drawn from the n_pop most popular catalog items outside
// the target's own profile. Ties in popularity break toward the smaller id
// so the popular set is stable across runs.
inline double popular_fraction(const RecommendationList& list,
                               const std::set<std::string>& profile,
                               const std::map<std::string, long long>& popularity,
                               int n_pop = 10) {
    if (n_pop < 1) throw ValidationError("n_pop must be >= 1");
    if (list.entries.empty()) return 0.0;
    std::vector<std::pair<std::string, long long>> ranked;
    ranked.reserve(popularity.size());
    for (const auto& [id, count] : popularity)
        if (!profile.count(id)) ranked.push_back({id, count});
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > static_cast<std::size_t>(n_pop)) ranked.resize(n_pop);
    std::set<std::string> popular;
    for (const auto& [id, count] : ranked) popular.insert(id);

    int in_popular = 0;
    for (const auto& entry : list.entries)
        if (popular.count(entry.id)) ++in_popular;
    return static_cast<double>(in_popular) / static_cast<double>(list.entries.size());
}

struct PerTargetResult {
    std::string target;
    double p_at_1 = 0.0;
    double r_at_k = 0.0;
    double mrr_at_k = 0.0;
    double map_at_k = 0.0;
    double ndcg_at_k = 0.0;
    double popular_fraction = 0.0;
    int list_length = 0;
    int truth_size = 0;
};

struct MetricsReport {
    Scenario scenario = Scenario::SC1;
    Method method = Method::MP;
    double p_at_1 = 0.0;
    double r_at_k = 0.0;
    double mrr_at_k = 0.0;
    double map_at_k = 0.0;
    double ndcg_at_k = 0.0;
    double cov_at_k = 0.0;
    double recpop_at_k = 0.0;
    std::size_t n_targets_evaluated = 0;
};

inline PerTargetResult evaluate_target(const ScenarioData& sd,
                                       const RecommendationList& list,
                                       int k, int n_pop = 10) {
    const TargetData& td = detail::target_or_throw(sd, list.target);
    PerTargetResult r;
    r.target = list.target;
    r.p_at_1 = precision_at_k(list, td.ground_truth, 1);
    r.r_at_k = recall_at_k(list, td.ground_truth, k);
    r.mrr_at_k = mrr_at_k(list, td.ground_truth, k);
    r.map_at_k = map_at_k(list, td.ground_truth, k);
    r.ndcg_at_k = ndcg_at_k(list, td.ground_truth, k);
    r.popular_fraction = popular_fraction(list, td.profile, sd.popularity, n_pop);
    r.list_length = std::min<int>(k, static_cast<int>(list.entries.size()));
    r.truth_size = static_cast<int>(td.ground_truth.size());
    return r;
}

// Per-target accuracy averaged with equal weight; coverage and popularity
// computed corpus-wide over the same lists.
inline MetricsReport aggregate(const std::vector<PerTargetResult>& per_target,
                               const std::vector<RecommendationList>& lists,
                               const std::set<std::string>& catalog,
                               const std::map<std::string, long long>& popularity,
                               int k) {
    if (per_target.empty()) throw ValidationError("no evaluated targets to aggregate");
    MetricsReport report;
    for (const auto& r : per_target) {
        report.p_at_1 += r.p_at_1;
        report.r_at_k += r.r_at_k;
        report.mrr_at_k += r.mrr_at_k;
        report.map_at_k += r.map_at_k;
        report.ndcg_at_k += r.ndcg_at_k;
    }
    const double n = static_cast<double>(per_target.size());
    report.p_at_1 /= n;
    report.r_at_k /= n;
    report.mrr_at_k /= n;
    report.map_at_k /= n;
    report.ndcg_at_k /= n;
    report.cov_at_k = coverage_at_k(lists, catalog, k);
    report.recpop_at_k = recpop_at_k(lists, popularity, k);
    report.n_targets_evaluated = per_target.size();
    return report;
}

inline MetricsReport evaluate_lists(const ScenarioData& sd,
                                    const std::vector<RecommendationList>& lists,
                                    int k, int n_pop = 10,
                                    std::vector<PerTargetResult>* per_target_out = nullptr) {
    detail::check_k(k);
    if (lists.empty()) throw ValidationError("no recommendation lists to evaluate");
    std::vector<PerTargetResult> per_target;
    per_target.reserve(lists.size());
    for (const auto& list : lists)
        per_target.push_back(evaluate_target(sd, list, k, n_pop));
    MetricsReport report =
        aggregate(per_target, lists, sd.candidate_catalog, sd.popularity, k);
    report.scenario = sd.scenario;
    if (per_target_out) *per_target_out = std::move(per_target);
    return report;
}

}  // namespace shrec
