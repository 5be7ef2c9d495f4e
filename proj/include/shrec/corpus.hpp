#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "shrec/error.hpp"

namespace shrec {

// The three entity roles of a data- and algorithm-sharing platform.
// Datasets and algorithms are the recommendable items.
enum class Kind { User, Dataset, Algorithm };

inline const char* kind_name(Kind k) {
    switch (k) {
        case Kind::User: return "user";
        case Kind::Dataset: return "dataset";
        case Kind::Algorithm: return "algorithm";
    }
    return "?";
}

struct EntityId {
    Kind kind;
    std::string id;

    auto operator<=>(const EntityId&) const = default;
};

// One merged usage triple: user applied algorithm to dataset.
// count carries the number of merged repetitions (informational).
struct Interaction {
    std::string user;
    std::string dataset;
    std::string algorithm;
    long long count = 1;

    // Identity is the triple; count never participates in ordering.
    friend bool operator<(const Interaction& a, const Interaction& b) {
        return std::tie(a.user, a.dataset, a.algorithm) <
               std::tie(b.user, b.dataset, b.algorithm);
    }
    friend bool operator==(const Interaction& a, const Interaction& b) {
        return a.user == b.user && a.dataset == b.dataset &&
               a.algorithm == b.algorithm;
    }

    const std::string& item(Kind k) const {
        return k == Kind::Dataset ? dataset : algorithm;
    }
};

struct ItemDescription {
    EntityId item;       // Dataset or Algorithm
    std::string text;    // raw; normalization happens at indexing time
};

// The canonical in-memory corpus. Immutable after construction; safe for
// concurrent reads. Catalogs include zero-interaction items, which are
// additionally listed in no_interaction_items.
struct Corpus {
    std::set<std::string> users;
    std::set<std::string> datasets;
    std::set<std::string> algorithms;
    std::vector<Interaction> interactions;   // sorted by triple, unique
    std::map<EntityId, std::string> descriptions;  // raw text per item
    std::set<EntityId> no_interaction_items;

    const std::set<std::string>& catalog(Kind k) const {
        switch (k) {
            case Kind::User: return users;
            case Kind::Dataset: return datasets;
            default: return algorithms;
        }
    }

    bool has_entity(const EntityId& e) const {
        return catalog(e.kind).count(e.id) > 0;
    }

    std::size_t count_no_interaction(Kind k) const {
        std::size_t n = 0;
        for (const auto& e : no_interaction_items)
            if (e.kind == k) ++n;
        return n;
    }
};

// How content-based filtering represents an item target: by the item's own
// description, or by the centroid of its profile items' descriptions.
enum class CbItemRepresentation { OwnDescription, ProfileCentroid };

struct EvalConfig {
    int list_size = 10;           // n
    int neighbors = 40;           // k for user-based kNN
    double split_ratio = 0.8;     // profile share of the holdout split
    int tfidf_min_tf = 1;
    int tfidf_min_df = 2;
    int overlap_truth_size = 10;  // m for the collaboration-network truth
    std::uint64_t rng_seed = 1;
    bool knee_enabled = true;
    CbItemRepresentation cb_item_representation = CbItemRepresentation::OwnDescription;

    void validate() const {
        if (list_size < 1) throw ValidationError("list_size must be >= 1");
        if (neighbors < 1) throw ValidationError("neighbors must be >= 1");
        if (!(split_ratio > 0.0 && split_ratio < 1.0))
            throw ValidationError("split_ratio must be in (0, 1)");
        if (tfidf_min_tf < 1) throw ValidationError("tfidf_min_tf must be >= 1");
        if (tfidf_min_df < 1) throw ValidationError("tfidf_min_df must be >= 1");
        if (overlap_truth_size < 1)
            throw ValidationError("overlap_truth_size must be >= 1");
    }
};

struct StatsReport {
    long long n_users = 0;
    long long n_datasets = 0;        // with at least one interaction
    long long n_algorithms = 0;      // with at least one interaction
    long long n_interactions = 0;
    double avg_per_user = 0.0;
    double avg_per_dataset = 0.0;
    double avg_per_algorithm = 0.0;
    long long n_datasets_no_interaction = 0;
    long long n_algorithms_no_interaction = 0;
};

inline StatsReport corpus_stats(const Corpus& c) {
    StatsReport s;
    s.n_users = static_cast<long long>(c.users.size());
    s.n_datasets_no_interaction =
        static_cast<long long>(c.count_no_interaction(Kind::Dataset));
    s.n_algorithms_no_interaction =
        static_cast<long long>(c.count_no_interaction(Kind::Algorithm));
    s.n_datasets = static_cast<long long>(c.datasets.size()) - s.n_datasets_no_interaction;
    s.n_algorithms = static_cast<long long>(c.algorithms.size()) - s.n_algorithms_no_interaction;
    s.n_interactions = static_cast<long long>(c.interactions.size());
    auto avg = [&](long long n) {
        return n > 0 ? static_cast<double>(s.n_interactions) / static_cast<double>(n) : 0.0;
    };
    s.avg_per_user = avg(s.n_users);
    s.avg_per_dataset = avg(s.n_datasets);
    s.avg_per_algorithm = avg(s.n_algorithms);
    return s;
}

// Popularity of every catalog item of the given kind within the supplied
// interaction subset: the number of distinct merged interactions mentioning
// the item. Items absent from the subset map to 0. Callers pass the
// profile-side interactions only, never ground truth.
inline std::map<std::string, long long> item_popularity(
    const Corpus& c, std::span<const Interaction> interactions, Kind kind) {
    if (kind == Kind::User) throw ValidationError("popularity is defined for items only");
    std::map<std::string, long long> pop;
    for (const auto& id : c.catalog(kind)) pop[id] = 0;
    for (const auto& t : interactions) ++pop[t.item(kind)];
    return pop;
}

}  // namespace shrec
