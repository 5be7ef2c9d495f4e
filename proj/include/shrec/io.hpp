#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shrec/corpus.hpp"
#include "shrec/error.hpp"

namespace shrec::io {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------- CSV ----

// Splits one CSV line; supports double-quoted fields with "" escapes.
inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') { field.push_back('"'); ++i; }
                else quoted = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    if (quoted)
        throw ParseError("line " + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(std::move(field));
    return fields;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    return out;
}

// -------------------------------------------------- merged interactions ----

inline void write_interactions_csv(const std::vector<Interaction>& interactions,
                                   const std::string& path) {
    auto out = open_output(path);
    out << "user_id,dataset_id,algorithm_id,count\n";
    for (const auto& t : interactions)
        out << csv_escape(t.user) << ',' << csv_escape(t.dataset) << ','
            << csv_escape(t.algorithm) << ',' << t.count << '\n';
}

inline std::vector<Interaction> read_interactions_csv(const std::string& path) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line))
        throw ParseError(path + ": empty file, expected header");
    if (strip_cr(line) != "user_id,dataset_id,algorithm_id,count")
        throw ParseError(path + ": missing interactions header");
    std::vector<Interaction> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto f = split_csv_line(line, line_no);
        if (f.size() != 4)
            throw ParseError(path + ": line " + std::to_string(line_no) +
                             ": expected 4 fields, got " + std::to_string(f.size()));
        if (f[0].empty() || f[1].empty() || f[2].empty())
            throw ParseError(path + ": line " + std::to_string(line_no) + ": empty id");
        long long count = 0;
        try {
            count = std::stoll(f[3]);
        } catch (const std::exception&) {
            throw ParseError(path + ": line " + std::to_string(line_no) + ": bad count");
        }
        if (count < 1)
            throw ParseError(path + ": line " + std::to_string(line_no) + ": count must be >= 1");
        out.push_back({f[0], f[1], f[2], count});
    }
    return out;
}

// -------------------------------------------------------- descriptions ----

inline void write_descriptions_jsonl(const std::vector<ItemDescription>& descs,
                                     const std::string& path) {
    auto out = open_output(path);
    for (const auto& d : descs) {
        ordered_json row;
        row["id"] = d.item.id;
        row["kind"] = kind_name(d.item.kind);
        row["text"] = d.text;
        out << row.dump() << '\n';
    }
}

inline std::vector<ItemDescription> read_descriptions_jsonl(const std::string& path) {
    auto in = open_input(path);
    std::vector<ItemDescription> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        ordered_json row;
        try {
            row = ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!row.contains("id") || !row.contains("kind") || !row.contains("text"))
            throw ParseError(path + ": line " + std::to_string(line_no) +
                             ": need fields id, kind, text");
        const std::string kind_str = row["kind"].get<std::string>();
        Kind kind;
        if (kind_str == "dataset") kind = Kind::Dataset;
        else if (kind_str == "algorithm") kind = Kind::Algorithm;
        else
            throw ParseError(path + ": line " + std::to_string(line_no) +
                             ": unknown kind '" + kind_str + "'");
        const std::string id = row["id"].get<std::string>();
        if (id.empty())
            throw ParseError(path + ": line " + std::to_string(line_no) + ": empty id");
        out.push_back({{kind, id}, row["text"].get<std::string>()});
    }
    return out;
}

// ----------------------------------------------------- corpus directory ----
//
// A corpus on disk is a directory of three files:
//   interactions.csv   merged triples (user_id,dataset_id,algorithm_id,count)
//   descriptions.jsonl one {"id","kind","text"} object per line, raw text
//   catalog.json       full entity catalogs, including zero-interaction items

inline void save_corpus(const Corpus& c, const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_interactions_csv(c.interactions, dir + "/interactions.csv");

    std::vector<ItemDescription> descs;
    for (const auto& [item, text] : c.descriptions) descs.push_back({item, text});
    write_descriptions_jsonl(descs, dir + "/descriptions.jsonl");

    ordered_json catalog;
    catalog["users"] = c.users;
    catalog["datasets"] = c.datasets;
    catalog["algorithms"] = c.algorithms;
    auto out = open_output(dir + "/catalog.json");
    out << catalog.dump(2) << '\n';
}

inline Corpus load_corpus(const std::string& dir) {
    Corpus c;
    c.interactions = read_interactions_csv(dir + "/interactions.csv");
    std::sort(c.interactions.begin(), c.interactions.end());
    auto dup = std::adjacent_find(c.interactions.begin(), c.interactions.end());
    if (dup != c.interactions.end())
        throw ValidationError(dir + "/interactions.csv: duplicate triple for user '" +
                              dup->user + "'");

    auto in = open_input(dir + "/catalog.json");
    ordered_json catalog;
    try {
        catalog = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(dir + "/catalog.json: " + std::string(e.what()));
    }
    for (const auto& u : catalog.at("users")) c.users.insert(u.get<std::string>());
    for (const auto& d : catalog.at("datasets")) c.datasets.insert(d.get<std::string>());
    for (const auto& a : catalog.at("algorithms")) c.algorithms.insert(a.get<std::string>());

    for (const auto& d : read_descriptions_jsonl(dir + "/descriptions.jsonl")) {
        if (!c.has_entity(d.item))
            throw ValidationError(dir + ": description for unknown " +
                                  std::string(kind_name(d.item.kind)) + " '" + d.item.id + "'");
        c.descriptions[d.item] = d.text;
    }

    // Recover the zero-interaction subset from catalogs vs. interactions.
    std::set<std::string> used_datasets, used_algorithms, used_users;
    for (const auto& t : c.interactions) {
        used_users.insert(t.user);
        used_datasets.insert(t.dataset);
        used_algorithms.insert(t.algorithm);
    }
    for (const auto& t : c.interactions) {
        if (!c.users.count(t.user) || !c.datasets.count(t.dataset) ||
            !c.algorithms.count(t.algorithm))
            throw ValidationError(dir + ": interaction references entity missing from catalog");
    }
    for (const auto& d : c.datasets)
        if (!used_datasets.count(d)) c.no_interaction_items.insert({Kind::Dataset, d});
    for (const auto& a : c.algorithms)
        if (!used_algorithms.count(a)) c.no_interaction_items.insert({Kind::Algorithm, a});
    return c;
}

}  // namespace shrec::io
