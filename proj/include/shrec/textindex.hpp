#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "shrec/corpus.hpp"
#include "shrec/error.hpp"
#include "shrec/porter.hpp"

namespace shrec {

// Lowercase, split on non-alphanumeric runs, drop tokens shorter than two
// characters, stem. Empty text yields an empty list.
inline std::vector<std::string> normalize_tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2) tokens.push_back(porter::stem(current));
        current.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

// Term dictionary with dense indices 0..size-1 (assigned in term order)
// and per-term document frequencies. Only terms with df >= min_df survive.
struct Vocabulary {
    std::vector<std::string> terms;          // index -> term
    std::map<std::string, int> index;        // term -> index
    std::vector<long long> document_frequency;  // index -> df

    int size() const { return static_cast<int>(terms.size()); }
    int find(const std::string& term) const {
        auto it = index.find(term);
        return it == index.end() ? -1 : it->second;
    }
};

// Sparse non-negative weight vector over vocabulary indices.
// Entries are sorted by index and strictly positive; an all-zero vector is
// represented as empty.
struct SparseVector {
    std::vector<std::pair<int, double>> entries;

    bool empty() const { return entries.empty(); }

    double norm() const {
        double s = 0.0;
        for (const auto& [i, w] : entries) s += w * w;
        return std::sqrt(s);
    }
};

inline double dot(const SparseVector& u, const SparseVector& v) {
    double s = 0.0;
    auto a = u.entries.begin(), b = v.entries.begin();
    while (a != u.entries.end() && b != v.entries.end()) {
        if (a->first < b->first) ++a;
        else if (b->first < a->first) ++b;
        else { s += a->second * b->second; ++a; ++b; }
    }
    return s;
}

// Cosine similarity in [0, 1]; 0 whenever either vector is all-zero.
inline double cosine(const SparseVector& u, const SparseVector& v) {
    if (u.empty() || v.empty()) return 0.0;
    double d = dot(u, v);
    if (d == 0.0) return 0.0;
    return d / (u.norm() * v.norm());
}

// Per-term arithmetic mean (absent terms count as zero).
inline SparseVector centroid(const std::vector<const SparseVector*>& vectors) {
    SparseVector out;
    if (vectors.empty()) return out;
    std::map<int, double> sums;
    for (const SparseVector* v : vectors)
        for (const auto& [i, w] : v->entries) sums[i] += w;
    const double n = static_cast<double>(vectors.size());
    for (const auto& [i, s] : sums)
        if (s > 0.0) out.entries.emplace_back(i, s / n);
    return out;
}

// TF-IDF vector space over item descriptions. Immutable after build.
struct TfIdfModel {
    Vocabulary vocab;
    std::map<EntityId, SparseVector> vectors;   // one per input document
    long long n_documents = 0;

    const SparseVector* find(const EntityId& item) const {
        auto it = vectors.find(item);
        return it == vectors.end() ? nullptr : &it->second;
    }
};

// Builds the vocabulary and one weight vector per document.
// A term enters a document's vector iff its in-document count >= min_tf and
// its document frequency >= min_df; weight = tf * ln(N / df). Weights that
// come out exactly zero (df == N) are dropped, so documents whose terms are
// ubiquitous end up with empty vectors.
inline TfIdfModel build_tfidf(const std::map<EntityId, std::vector<std::string>>& documents,
                              int min_tf, int min_df) {
    if (min_tf < 1) throw ValidationError("min_tf must be >= 1");
    if (min_df < 1) throw ValidationError("min_df must be >= 1");
    if (documents.empty()) throw ValidationError("cannot index an empty document collection");

    TfIdfModel model;
    model.n_documents = static_cast<long long>(documents.size());

    // Per-document term counts, then corpus-wide document frequencies.
    std::map<EntityId, std::map<std::string, long long>> counts;
    std::map<std::string, long long> df;
    for (const auto& [item, tokens] : documents) {
        auto& c = counts[item];
        for (const auto& t : tokens) ++c[t];
        for (const auto& [term, n] : c) {
            (void)n;
            ++df[term];
        }
    }

    for (const auto& [term, d] : df) {
        if (d >= min_df) {
            model.vocab.index.emplace(term, model.vocab.size());
            model.vocab.terms.push_back(term);
            model.vocab.document_frequency.push_back(d);
        }
    }

    const double n_docs = static_cast<double>(model.n_documents);
    for (const auto& [item, c] : counts) {
        SparseVector vec;
        for (const auto& [term, tf] : c) {
            if (tf < min_tf) continue;
            int idx = model.vocab.find(term);
            if (idx < 0) continue;
            double w = static_cast<double>(tf) *
                       std::log(n_docs / static_cast<double>(model.vocab.document_frequency[idx]));
            if (w > 0.0) vec.entries.emplace_back(idx, w);
        }
        model.vectors.emplace(item, std::move(vec));
    }
    return model;
}

}  // namespace shrec
