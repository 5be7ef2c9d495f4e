#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "shrec/corpus.hpp"
#include "shrec/error.hpp"
#include "shrec/io.hpp"

namespace shrec {

// A single pre-merge usage event. Duplicates are expected.
struct RawInteraction {
    std::string user;
    std::string dataset;
    std::string algorithm;
};

// Reads a raw interaction dump: CSV with header user_id,dataset_id,algorithm_id
// (a trailing count column is tolerated and ignored). Row order is preserved.
inline std::vector<RawInteraction> parse_raw(const std::string& path) {
    auto in = io::open_input(path);
    std::string line;
    if (!std::getline(in, line))
        throw ParseError(path + ": empty file, expected header");
    line = io::strip_cr(line);
    const bool with_count = line == "user_id,dataset_id,algorithm_id,count";
    if (!with_count && line != "user_id,dataset_id,algorithm_id")
        throw ParseError(path + ": missing raw interactions header");
    const std::size_t n_fields = with_count ? 4 : 3;

    std::vector<RawInteraction> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = io::strip_cr(line);
        if (line.empty()) continue;
        auto f = io::split_csv_line(line, line_no);
        if (f.size() != n_fields)
            throw ParseError(path + ": line " + std::to_string(line_no) + ": expected " +
                             std::to_string(n_fields) + " fields, got " +
                             std::to_string(f.size()));
        if (f[0].empty() || f[1].empty() || f[2].empty())
            throw ParseError(path + ": line " + std::to_string(line_no) + ": empty id");
        out.push_back({std::move(f[0]), std::move(f[1]), std::move(f[2])});
    }
    return out;
}

// Collapses repeated (user, dataset, algorithm) triples into one Interaction
// each; count records the multiplicity. Idempotent.
inline std::vector<Interaction> merge_repetitions(const std::vector<RawInteraction>& raw) {
    std::map<std::tuple<std::string, std::string, std::string>, long long> counts;
    for (const auto& r : raw) ++counts[{r.user, r.dataset, r.algorithm}];
    std::vector<Interaction> out;
    out.reserve(counts.size());
    for (const auto& [key, n] : counts)
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), n});
    return out;
}

struct KneeResult {
    std::size_t knee_rank = 0;        // index into the descending count curve
    long long knee_threshold = 0;     // interaction count at the knee
    std::set<std::string> removed_users;
};

// Knee of a descending count curve: normalize rank to x in [0,1] and
// ln(count) to y in [0,1], then take the point with the largest
// perpendicular distance to the chord through the first and last points.
// Ties go to the smallest rank. Needs at least 3 points.
inline std::size_t detect_knee(std::span<const long long> counts_desc) {
    const std::size_t n = counts_desc.size();
    if (n < 3) throw ValidationError("knee detection needs at least 3 points");
    std::vector<double> y(n);
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (counts_desc[i] < 1) throw ValidationError("knee curve needs positive counts");
        if (i > 0 && counts_desc[i] > counts_desc[i - 1])
            throw ValidationError("knee curve must be sorted descending");
        y[i] = std::log(static_cast<double>(counts_desc[i]));
        y_min = std::min(y_min, y[i]);
        y_max = std::max(y_max, y[i]);
    }
    const double y_span = y_max - y_min;
    for (std::size_t i = 0; i < n; ++i)
        y[i] = y_span > 0.0 ? (y[i] - y_min) / y_span : 0.0;

    // Chord through the first and last curve points. The distance
    // denominator is constant, so comparing numerators suffices.
    const double x1 = 0.0, y1 = y.front(), x2 = 1.0, y2 = y.back();
    std::size_t best = 0;
    double best_dist = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(n - 1);
        const double d = std::fabs((y2 - y1) * x - (x2 - x1) * y[i] + x2 * y1 - y2 * x1);
        if (d > best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return best;
}

// Removes bot-like users: those whose interaction count strictly exceeds the
// knee of the log-transformed, descending per-user count curve. The knee
// user itself stays. Count ties sort by ascending user id.
inline std::pair<std::vector<Interaction>, KneeResult> knee_filter_users(
    const std::vector<Interaction>& interactions) {
    std::map<std::string, long long> per_user;
    for (const auto& t : interactions) ++per_user[t.user];
    if (per_user.size() < 3)
        throw ValidationError("knee filtering needs at least 3 distinct users");

    std::vector<std::pair<std::string, long long>> users(per_user.begin(), per_user.end());
    std::sort(users.begin(), users.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<long long> counts(users.size());
    for (std::size_t i = 0; i < users.size(); ++i) counts[i] = users[i].second;

    KneeResult result;
    result.knee_rank = detect_knee(counts);
    result.knee_threshold = counts[result.knee_rank];
    for (const auto& [user, count] : users)
        if (count > result.knee_threshold) result.removed_users.insert(user);

    std::vector<Interaction> kept;
    kept.reserve(interactions.size());
    for (const auto& t : interactions)
        if (!result.removed_users.count(t.user)) kept.push_back(t);
    return {std::move(kept), std::move(result)};
}

// Assembles a validated Corpus. Catalogs are the union of everything the
// interactions reference plus the extra (zero-interaction) items; extras
// that turn out to have interactions are simply treated as regular items.
inline Corpus build_corpus(std::vector<Interaction> interactions,
                           const std::vector<ItemDescription>& descriptions,
                           const std::set<std::string>& extra_datasets = {},
                           const std::set<std::string>& extra_algorithms = {}) {
    Corpus c;
    std::sort(interactions.begin(), interactions.end());
    interactions.erase(std::unique(interactions.begin(), interactions.end()),
                       interactions.end());
    c.interactions = std::move(interactions);

    for (const auto& t : c.interactions) {
        if (t.user.empty() || t.dataset.empty() || t.algorithm.empty())
            throw ValidationError("interaction with empty id");
        if (t.count < 1) throw ValidationError("interaction count must be >= 1");
        c.users.insert(t.user);
        c.datasets.insert(t.dataset);
        c.algorithms.insert(t.algorithm);
    }

    std::set<std::string> used_datasets(c.datasets);
    std::set<std::string> used_algorithms(c.algorithms);
    for (const auto& d : extra_datasets) {
        if (d.empty()) throw ValidationError("empty dataset id in extras");
        c.datasets.insert(d);
        if (!used_datasets.count(d)) c.no_interaction_items.insert({Kind::Dataset, d});
    }
    for (const auto& a : extra_algorithms) {
        if (a.empty()) throw ValidationError("empty algorithm id in extras");
        c.algorithms.insert(a);
        if (!used_algorithms.count(a)) c.no_interaction_items.insert({Kind::Algorithm, a});
    }

    // Described items join the catalogs too; a description for an item with
    // no interactions is exactly how cold-start items enter the corpus.
    for (const auto& d : descriptions) {
        if (d.item.kind == Kind::User)
            throw ValidationError("description must reference a dataset or algorithm, got user '" +
                                  d.item.id + "'");
        if (d.item.id.empty()) throw ValidationError("description with empty id");
        if (d.item.kind == Kind::Dataset) {
            c.datasets.insert(d.item.id);
            if (!used_datasets.count(d.item.id)) c.no_interaction_items.insert(d.item);
        } else {
            c.algorithms.insert(d.item.id);
            if (!used_algorithms.count(d.item.id)) c.no_interaction_items.insert(d.item);
        }
        c.descriptions[d.item] = d.text;
    }
    return c;
}

}  // namespace shrec
