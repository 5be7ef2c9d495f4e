#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "shrec/corpus.hpp"
#include "shrec/error.hpp"
#include "shrec/scenario.hpp"
#include "shrec/textindex.hpp"

namespace shrec {

enum class Method { MP, CF, CB };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::MP: return "MP";
        case Method::CF: return "CF";
        case Method::CB: return "CB";
    }
    return "?";
}

struct ScoredItem {
    std::string id;
    double score = 0.0;
};

// Ranked top-n list for one target. Scores are non-increasing, items are
// unique candidates outside the target's profile, and zero-score items are
// never emitted.
struct RecommendationList {
    std::string target;
    std::vector<ScoredItem> entries;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
};

namespace detail {

inline const TargetData& target_or_throw(const ScenarioData& sd, const std::string& target) {
    auto it = sd.targets.find(target);
    if (it == sd.targets.end())
        throw LookupError(std::string(scenario_name(sd.scenario)) + ": unknown target '" +
                          target + "'");
    return it->second;
}

// Known-item filter: the target's profile, plus the target itself in the
// same-kind scenarios.
inline bool is_known(const ScenarioData& sd, const std::string& target,
                     const TargetData& td, const std::string& item) {
    if (same_kind_scenario(sd.scenario) && item == target) return true;
    return td.profile.count(item) > 0;
}

// (score desc, id asc) ordering shared by all methods.
inline void rank_and_truncate(std::vector<ScoredItem>& entries, int n) {
    std::sort(entries.begin(), entries.end(), [](const ScoredItem& a, const ScoredItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (entries.size() > static_cast<std::size_t>(n)) entries.resize(n);
}

}  // namespace detail

// Most Popular: candidates ranked by training popularity. Unpersonalized
// apart from the known-item filter.
inline RecommendationList recommend_mp(const ScenarioData& sd, const std::string& target, int n) {
    const TargetData& td = detail::target_or_throw(sd, target);
    RecommendationList out;
    out.target = target;
    for (const auto& [item, pop] : sd.popularity) {
        if (pop <= 0) continue;
        if (detail::is_known(sd, target, td, item)) continue;
        out.entries.push_back({item, static_cast<double>(pop)});
    }
    detail::rank_and_truncate(out.entries, n);
    return out;
}

// User-based k-nearest-neighbour collaborative filtering over binary
// profile vectors. The neighbour pool is the scenario's other targets and
// neighbour similarity is the cosine of the binary profile vectors. In the
// holdout scenarios a candidate's score is the sum of the similarities of
// the neighbours that hold it in their profile. In SC5/SC6 profiles live in
// the opposite-kind item space, so the recommendable entities are the
// neighbour targets themselves, scored by their similarity. Building the
// model once per scenario amortizes the inverted index across targets.
class CfModel {
public:
    explicit CfModel(const ScenarioData& sd) : sd_(sd) {
        target_ids_.reserve(sd.targets.size());
        for (const auto& [id, td] : sd.targets) target_ids_.push_back(id);

        std::map<std::string, int> item_index;
        for (const auto& [id, td] : sd.targets)
            for (const auto& item : td.profile)
                item_index.emplace(item, 0);
        item_ids_.reserve(item_index.size());
        for (auto& [item, idx] : item_index) {
            idx = static_cast<int>(item_ids_.size());
            item_ids_.push_back(item);
        }

        profiles_.resize(target_ids_.size());
        postings_.resize(item_ids_.size());
        for (std::size_t t = 0; t < target_ids_.size(); ++t) {
            const auto& profile = sd.targets.at(target_ids_[t]).profile;
            for (const auto& item : profile) {
                const int i = item_index.at(item);
                profiles_[t].push_back(i);
                postings_[i].push_back(static_cast<int>(t));
            }
        }
    }

    RecommendationList recommend(const std::string& target, int k, int n) const {
        const TargetData& td = detail::target_or_throw(sd_, target);
        if (k < 1) throw ValidationError("k must be >= 1");
        RecommendationList out;
        out.target = target;

        const auto pos = std::lower_bound(target_ids_.begin(), target_ids_.end(), target);
        const int t = static_cast<int>(pos - target_ids_.begin());
        const auto& own = profiles_[t];
        if (own.empty()) return out;

        // Overlaps with every other target sharing at least one item.
        std::vector<int> overlap(target_ids_.size(), 0);
        for (int item : own)
            for (int other : postings_[item]) ++overlap[other];
        overlap[t] = 0;

        struct Neighbor {
            int index;
            double sim;
        };
        std::vector<Neighbor> neighbors;
        for (std::size_t o = 0; o < overlap.size(); ++o) {
            if (overlap[o] <= 0) continue;
            double sim = static_cast<double>(overlap[o]) /
                         std::sqrt(static_cast<double>(own.size()) *
                                   static_cast<double>(profiles_[o].size()));
            neighbors.push_back({static_cast<int>(o), sim});
        }
        std::sort(neighbors.begin(), neighbors.end(), [](const Neighbor& a, const Neighbor& b) {
            if (a.sim != b.sim) return a.sim > b.sim;
            return a.index < b.index;
        });
        if (neighbors.size() > static_cast<std::size_t>(k)) neighbors.resize(k);

        if (same_kind_scenario(sd_.scenario)) {
            for (const auto& nb : neighbors) {
                const std::string& id = target_ids_[nb.index];
                if (detail::is_known(sd_, target, td, id)) continue;
                if (!sd_.candidate_catalog.count(id)) continue;
                out.entries.push_back({id, nb.sim});
            }
            detail::rank_and_truncate(out.entries, n);
            return out;
        }

        // Fixed accumulation order so scores are reproducible bit for bit.
        std::sort(neighbors.begin(), neighbors.end(),
                  [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
        std::vector<double> score(item_ids_.size(), 0.0);
        for (const auto& nb : neighbors)
            for (int item : profiles_[nb.index]) score[item] += nb.sim;

        for (std::size_t i = 0; i < item_ids_.size(); ++i) {
            if (score[i] <= 0.0) continue;
            if (detail::is_known(sd_, target, td, item_ids_[i])) continue;
            out.entries.push_back({item_ids_[i], score[i]});
        }
        detail::rank_and_truncate(out.entries, n);
        return out;
    }

private:
    const ScenarioData& sd_;
    std::vector<std::string> target_ids_;   // sorted
    std::vector<std::string> item_ids_;     // sorted union of profile items
    std::vector<std::vector<int>> profiles_;  // target -> profile item indices
    std::vector<std::vector<int>> postings_;  // profile item -> target indices
};

inline RecommendationList recommend_cf(const ScenarioData& sd, const std::string& target,
                                       int k, int n) {
    return CfModel(sd).recommend(target, k, n);
}

// Content-based filtering in the shared TF-IDF space. User targets are
// represented by the centroid of their profile items' vectors; item targets
// by their own description (or, behind the config switch, by the centroid
// of their profile items' vectors). Only candidates with a description can
// be scored, which is what lets CB reach cold-start items.
class CbModel {
public:
    CbModel(const ScenarioData& sd, const TfIdfModel& index,
            CbItemRepresentation rep = CbItemRepresentation::OwnDescription)
        : sd_(sd), index_(index), rep_(rep) {
        const Kind ck = candidate_kind(sd.scenario);
        for (const auto& id : sd.candidate_catalog) {
            const SparseVector* v = index.find({ck, id});
            if (!v || v->empty()) continue;
            candidate_ids_.push_back(id);
            candidate_norms_.push_back(v->norm());
            const int c = static_cast<int>(candidate_ids_.size()) - 1;
            for (const auto& [term, w] : v->entries) {
                if (static_cast<std::size_t>(term) >= postings_.size())
                    postings_.resize(term + 1);
                postings_[term].push_back({c, w});
            }
        }
    }

    SparseVector representation(const std::string& target) const {
        const TargetData& td = detail::target_or_throw(sd_, target);
        const Kind tk = target_kind(sd_.scenario);
        if (tk == Kind::User || rep_ == CbItemRepresentation::ProfileCentroid) {
            // Users' profiles hold candidate-kind items; item targets'
            // profiles hold the opposite kind.
            const Kind pk = tk == Kind::User ? candidate_kind(sd_.scenario)
                            : tk == Kind::Dataset ? Kind::Algorithm
                                                  : Kind::Dataset;
            std::vector<const SparseVector*> vecs;
            for (const auto& item : td.profile)
                if (const SparseVector* v = index_.find({pk, item})) vecs.push_back(v);
            return centroid(vecs);
        }
        const SparseVector* own = index_.find({tk, target});
        return own ? *own : SparseVector{};
    }

    RecommendationList recommend(const std::string& target, int n) const {
        const TargetData& td = detail::target_or_throw(sd_, target);
        RecommendationList out;
        out.target = target;
        const SparseVector rep = representation(target);
        if (rep.empty()) return out;
        const double rep_norm = rep.norm();

        std::vector<double> dot_acc(candidate_ids_.size(), 0.0);
        for (const auto& [term, w] : rep.entries) {
            if (static_cast<std::size_t>(term) >= postings_.size()) continue;
            for (const auto& [c, cw] : postings_[term]) dot_acc[c] += w * cw;
        }
        for (std::size_t c = 0; c < candidate_ids_.size(); ++c) {
            if (dot_acc[c] <= 0.0) continue;
            if (detail::is_known(sd_, target, td, candidate_ids_[c])) continue;
            out.entries.push_back({candidate_ids_[c], dot_acc[c] / (rep_norm * candidate_norms_[c])});
        }
        detail::rank_and_truncate(out.entries, n);
        return out;
    }

private:
    const ScenarioData& sd_;
    const TfIdfModel& index_;
    CbItemRepresentation rep_;
    std::vector<std::string> candidate_ids_;
    std::vector<double> candidate_norms_;
    std::vector<std::vector<std::pair<int, double>>> postings_;  // term -> (candidate, weight)
};

inline RecommendationList recommend_cb(const ScenarioData& sd, const std::string& target,
                                       const TfIdfModel& index, int n,
                                       CbItemRepresentation rep = CbItemRepresentation::OwnDescription) {
    return CbModel(sd, index, rep).recommend(target, n);
}

// Uniform dispatch used by the experiment runner.
inline RecommendationList recommend(Method method, const ScenarioData& sd,
                                    const std::string& target, const EvalConfig& config,
                                    const TfIdfModel* index = nullptr) {
    switch (method) {
        case Method::MP:
            return recommend_mp(sd, target, config.list_size);
        case Method::CF:
            return recommend_cf(sd, target, config.neighbors, config.list_size);
        case Method::CB:
            if (!index) throw ValidationError("CB requires a TF-IDF index");
            return recommend_cb(sd, target, *index, config.list_size,
                                config.cb_item_representation);
    }
    throw ValidationError("unknown method");
}

}  // namespace shrec
