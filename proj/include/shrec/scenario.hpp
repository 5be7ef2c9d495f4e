#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "shrec/corpus.hpp"
#include "shrec/error.hpp"
#include "shrec/rng.hpp"

namespace shrec {

// The six recommendation scenarios: who receives recommendations (target)
// and what is recommended (candidate items).
enum class Scenario { SC1, SC2, SC3, SC4, SC5, SC6 };

inline std::array<Scenario, 6> all_scenarios() {
    return {Scenario::SC1, Scenario::SC2, Scenario::SC3,
            Scenario::SC4, Scenario::SC5, Scenario::SC6};
}

inline const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::SC1: return "SC1";
        case Scenario::SC2: return "SC2";
        case Scenario::SC3: return "SC3";
        case Scenario::SC4: return "SC4";
        case Scenario::SC5: return "SC5";
        case Scenario::SC6: return "SC6";
    }
    return "?";
}

inline const char* scenario_label(Scenario s) {
    switch (s) {
        case Scenario::SC1: return "Datasets to Users";
        case Scenario::SC2: return "Algorithms to Users";
        case Scenario::SC3: return "Datasets to Algorithms";
        case Scenario::SC4: return "Algorithms to Datasets";
        case Scenario::SC5: return "Datasets to Datasets";
        case Scenario::SC6: return "Algorithms to Algorithms";
    }
    return "?";
}

inline Kind target_kind(Scenario s) {
    switch (s) {
        case Scenario::SC1:
        case Scenario::SC2: return Kind::User;
        case Scenario::SC3: return Kind::Algorithm;   // datasets recommended to algorithms
        case Scenario::SC4:
        case Scenario::SC5: return Kind::Dataset;
        case Scenario::SC6: return Kind::Algorithm;
    }
    return Kind::User;
}

inline Kind candidate_kind(Scenario s) {
    switch (s) {
        case Scenario::SC1: return Kind::Dataset;
        case Scenario::SC2: return Kind::Algorithm;
        case Scenario::SC3: return Kind::Dataset;
        case Scenario::SC4: return Kind::Algorithm;
        case Scenario::SC5: return Kind::Dataset;
        case Scenario::SC6: return Kind::Algorithm;
    }
    return Kind::Dataset;
}

// True for the same-kind scenarios, whose ground truth comes from the
// collaboration network instead of a holdout split.
inline bool same_kind_scenario(Scenario s) {
    return s == Scenario::SC5 || s == Scenario::SC6;
}

// Items a user directly interacted with.
inline std::set<std::string> direct_profile(const Corpus& c, const std::string& user,
                                            Kind kind) {
    if (!c.users.count(user)) throw LookupError("unknown user '" + user + "'");
    if (kind == Kind::User) throw ValidationError("profile items must be datasets or algorithms");
    std::set<std::string> items;
    for (const auto& t : c.interactions)
        if (t.user == user) items.insert(t.item(kind));
    return items;
}

// Items of the opposite kind co-occurring with the given item in any
// interaction: algorithms run on a dataset, or datasets an algorithm was
// trained on.
inline std::set<std::string> indirect_profile(const Corpus& c, const EntityId& item) {
    if (item.kind == Kind::User) throw ValidationError("indirect profiles are item-to-item");
    if (!c.has_entity(item))
        throw LookupError("unknown " + std::string(kind_name(item.kind)) + " '" + item.id + "'");
    const Kind other = item.kind == Kind::Dataset ? Kind::Algorithm : Kind::Dataset;
    std::set<std::string> items;
    for (const auto& t : c.interactions)
        if (t.item(item.kind) == item.id) items.insert(t.item(other));
    return items;
}

struct SplitResult {
    std::set<std::string> profile;
    std::set<std::string> ground_truth;
};

// Random holdout split of one target's items: ground truth gets
// max(1, floor((1-ratio) * n)) items chosen uniformly, profile the rest.
// Deterministic for a given rng seed. Requires at least 2 items.
inline SplitResult split_holdout(const std::set<std::string>& items, double ratio, Rng& rng) {
    if (items.size() < 2)
        throw ValidationError("holdout split needs at least 2 items");
    std::vector<std::string> order(items.begin(), items.end());
    shuffle(order, rng);
    const auto n = items.size();
    // The epsilon absorbs representation error in (1 - ratio): with
    // ratio 0.8 and n = 10 the product is 1.9999999999999996, whose
    // mathematical value is exactly 2.
    auto truth_size = static_cast<std::size_t>(
        std::floor((1.0 - ratio) * static_cast<double>(n) + 1e-9));
    truth_size = std::max<std::size_t>(1, truth_size);
    SplitResult out;
    out.ground_truth.insert(order.begin(), order.begin() + truth_size);
    out.profile.insert(order.begin() + truth_size, order.end());
    return out;
}

// Symmetric user-overlap graph over same-kind items: an edge between two
// items counts the users who interacted with both. No self-edges; absent
// pairs mean overlap 0.
struct CollaborationNetwork {
    Kind kind = Kind::Dataset;
    std::map<std::string, std::map<std::string, long long>> adjacency;

    long long overlap(const std::string& a, const std::string& b) const {
        auto it = adjacency.find(a);
        if (it == adjacency.end()) return 0;
        auto jt = it->second.find(b);
        return jt == it->second.end() ? 0 : jt->second;
    }

    const std::map<std::string, long long>* neighbors(const std::string& item) const {
        auto it = adjacency.find(item);
        return it == adjacency.end() ? nullptr : &it->second;
    }

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& [item, nbrs] : adjacency) n += nbrs.size();
        return n / 2;
    }
};

inline CollaborationNetwork build_collaboration_network(const Corpus& c, Kind kind) {
    if (kind == Kind::User) throw ValidationError("collaboration network links items");
    CollaborationNetwork net;
    net.kind = kind;
    std::map<std::string, std::set<std::string>> items_per_user;
    for (const auto& t : c.interactions) items_per_user[t.user].insert(t.item(kind));
    for (const auto& [user, items] : items_per_user) {
        for (auto a = items.begin(); a != items.end(); ++a) {
            auto b = a;
            for (++b; b != items.end(); ++b) {
                ++net.adjacency[*a][*b];
                ++net.adjacency[*b][*a];
            }
        }
    }
    return net;
}

// The m network neighbors with the largest user overlap; ties at the
// cutoff break by ascending item id. Empty result means the target is
// isolated and gets excluded from evaluation.
inline std::set<std::string> overlap_ground_truth(const CollaborationNetwork& net,
                                                  const std::string& target, int m) {
    if (m < 1) throw ValidationError("truth size must be >= 1");
    const auto* nbrs = net.neighbors(target);
    if (!nbrs) return {};
    std::vector<std::pair<std::string, long long>> ranked(nbrs->begin(), nbrs->end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::set<std::string> truth;
    for (std::size_t i = 0; i < ranked.size() && i < static_cast<std::size_t>(m); ++i)
        truth.insert(ranked[i].first);
    return truth;
}

struct TargetData {
    std::set<std::string> profile;
    std::set<std::string> ground_truth;
};

struct ExclusionReport {
    long long considered = 0;
    long long evaluated = 0;
    long long too_few_interactions = 0;  // SC1-SC4: fewer than 2 profile items
    long long no_interactions = 0;       // SC5/SC6: target item never used
    long long isolated = 0;              // SC5/SC6: no collaboration neighbors
};

// Everything a recommender needs for one scenario: per-target profile and
// ground truth, the candidate catalog (including zero-interaction items)
// and the training-side popularity of every candidate item.
struct ScenarioData {
    Scenario scenario = Scenario::SC1;
    std::set<std::string> candidate_catalog;
    std::map<std::string, TargetData> targets;
    std::map<std::string, long long> popularity;
    ExclusionReport report;
};

namespace detail {

// Training popularity of candidate items. For the holdout scenarios this
// counts only interactions whose candidate item sits in the evaluated
// target's profile, so held-out items contribute nothing. For SC5/SC6 no
// interactions are held out and plain interaction counts apply.
inline void fill_popularity(ScenarioData& sd, const Corpus& c) {
    for (const auto& id : sd.candidate_catalog) sd.popularity[id] = 0;
    const Kind ck = candidate_kind(sd.scenario);
    if (same_kind_scenario(sd.scenario)) {
        for (const auto& t : c.interactions) ++sd.popularity[t.item(ck)];
        return;
    }
    const Kind tk = target_kind(sd.scenario);
    for (const auto& t : c.interactions) {
        const std::string& target =
            tk == Kind::User ? t.user : (tk == Kind::Dataset ? t.dataset : t.algorithm);
        auto it = sd.targets.find(target);
        if (it == sd.targets.end()) continue;
        const std::string& item = t.item(ck);
        if (it->second.profile.count(item)) ++sd.popularity[item];
    }
}

}  // namespace detail

// Builds profile and ground-truth data for every eligible target of one
// scenario. SC1/SC2 split each user's direct items, SC3/SC4 split each
// item's indirect items, SC5/SC6 keep the full indirect profile and take
// ground truth from the collaboration network. Targets without enough data
// are excluded and counted. Deterministic in (corpus, config, seed);
// per-target randomness is keyed by target id, not iteration order.
inline ScenarioData build_scenario(const Corpus& c, Scenario scenario,
                                   const EvalConfig& config, std::uint64_t seed) {
    config.validate();
    ScenarioData sd;
    sd.scenario = scenario;
    const Kind ck = candidate_kind(scenario);
    sd.candidate_catalog = c.catalog(ck);

    const Kind tk = target_kind(scenario);

    if (scenario == Scenario::SC1 || scenario == Scenario::SC2) {
        for (const auto& user : c.users) {
            ++sd.report.considered;
            auto items = direct_profile(c, user, ck);
            if (items.size() < 2) {
                ++sd.report.too_few_interactions;
                continue;
            }
            Rng rng(derive_seed(seed, std::string("split/") + user));
            auto split = split_holdout(items, config.split_ratio, rng);
            sd.targets.emplace(user, TargetData{std::move(split.profile),
                                                std::move(split.ground_truth)});
            ++sd.report.evaluated;
        }
    } else if (scenario == Scenario::SC3 || scenario == Scenario::SC4) {
        for (const auto& id : c.catalog(tk)) {
            ++sd.report.considered;
            auto items = indirect_profile(c, {tk, id});
            if (items.size() < 2) {
                ++sd.report.too_few_interactions;
                continue;
            }
            Rng rng(derive_seed(seed, std::string("split/") + id));
            auto split = split_holdout(items, config.split_ratio, rng);
            sd.targets.emplace(id, TargetData{std::move(split.profile),
                                              std::move(split.ground_truth)});
            ++sd.report.evaluated;
        }
    } else {
        auto net = build_collaboration_network(c, ck);
        for (const auto& id : c.catalog(tk)) {
            ++sd.report.considered;
            auto profile = indirect_profile(c, {tk, id});
            if (profile.empty()) {
                ++sd.report.no_interactions;
                continue;
            }
            auto truth = overlap_ground_truth(net, id, config.overlap_truth_size);
            if (truth.empty()) {
                ++sd.report.isolated;
                continue;
            }
            sd.targets.emplace(id, TargetData{std::move(profile), std::move(truth)});
            ++sd.report.evaluated;
        }
    }

    detail::fill_popularity(sd, c);
    return sd;
}

}  // namespace shrec
