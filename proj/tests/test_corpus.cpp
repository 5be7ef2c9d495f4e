#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>

#include "shrec/corpus.hpp"
#include "shrec/ingest.hpp"
#include "shrec/io.hpp"
#include "support/synthetic.hpp"

using namespace shrec;

namespace {

Corpus small_corpus() {
    std::vector<Interaction> interactions = {
        {"u1", "d1", "a1", 1},
        {"u2", "d1", "a2", 1},
        {"u1", "d2", "a1", 1},
    };
    return build_corpus(std::move(interactions), {});
}

}  // namespace

TEST_CASE("entity ids order by kind then id") {
    EntityId a{Kind::Dataset, "1"};
    EntityId b{Kind::Dataset, "2"};
    EntityId c{Kind::Algorithm, "1"};
    CHECK(a < b);
    CHECK(a != c);
    std::set<EntityId> s{a, b, c, a};
    CHECK(s.size() == 3);
}

TEST_CASE("interaction identity ignores count") {
    Interaction x{"u1", "d1", "a1", 1};
    Interaction y{"u1", "d1", "a1", 7};
    CHECK(x == y);
    CHECK_FALSE(x < y);
    CHECK_FALSE(y < x);
    CHECK(x.item(Kind::Dataset) == "d1");
    CHECK(x.item(Kind::Algorithm) == "a1");
}

TEST_CASE("corpus stats on a small corpus") {
    Corpus c = small_corpus();
    StatsReport s = corpus_stats(c);
    CHECK(s.n_users == 2);
    CHECK(s.n_datasets == 2);
    CHECK(s.n_algorithms == 2);
    CHECK(s.n_interactions == 3);
    CHECK(s.avg_per_user == Catch::Approx(1.5));
    CHECK(s.avg_per_dataset == Catch::Approx(1.5));
    CHECK(s.avg_per_algorithm == Catch::Approx(1.5));
    CHECK(s.n_datasets_no_interaction == 0);
    CHECK(s.n_algorithms_no_interaction == 0);
}

TEST_CASE("corpus stats on an empty corpus are all zero") {
    Corpus c;
    StatsReport s = corpus_stats(c);
    CHECK(s.n_users == 0);
    CHECK(s.n_datasets == 0);
    CHECK(s.n_algorithms == 0);
    CHECK(s.n_interactions == 0);
    CHECK(s.avg_per_user == 0.0);
    CHECK(s.avg_per_dataset == 0.0);
    CHECK(s.avg_per_algorithm == 0.0);
}

TEST_CASE("zero-interaction items are counted separately") {
    std::vector<Interaction> interactions = {{"u1", "d1", "a1", 1}};
    Corpus c = build_corpus(interactions, {}, {"d9"}, {"a8", "a9"});
    StatsReport s = corpus_stats(c);
    CHECK(s.n_datasets == 1);
    CHECK(s.n_algorithms == 1);
    CHECK(s.n_datasets_no_interaction == 1);
    CHECK(s.n_algorithms_no_interaction == 2);
    CHECK(c.datasets.count("d9") == 1);
    CHECK(c.has_entity({Kind::Algorithm, "a8"}));
}

TEST_CASE("item popularity counts mentioning interactions") {
    Corpus c = small_corpus();
    auto by_dataset = item_popularity(c, c.interactions, Kind::Dataset);
    CHECK(by_dataset.at("d1") == 2);
    CHECK(by_dataset.at("d2") == 1);
    auto by_algorithm = item_popularity(c, c.interactions, Kind::Algorithm);
    CHECK(by_algorithm.at("a1") == 2);
    CHECK(by_algorithm.at("a2") == 1);
}

TEST_CASE("item popularity maps absent items to zero") {
    std::vector<Interaction> interactions = {{"u1", "d1", "a1", 1}};
    Corpus c = build_corpus(interactions, {}, {"d3"});
    auto pop = item_popularity(c, c.interactions, Kind::Dataset);
    CHECK(pop.at("d3") == 0);
    CHECK(item_popularity(c, {}, Kind::Dataset).at("d1") == 0);
}

TEST_CASE("item popularity rejects the user kind") {
    Corpus c = small_corpus();
    CHECK_THROWS_AS(item_popularity(c, c.interactions, Kind::User), ValidationError);
}

TEST_CASE("popularity sums to the interaction count per kind") {
    Corpus c = support::make_corpus({});
    for (Kind k : {Kind::Dataset, Kind::Algorithm}) {
        long long sum = 0;
        for (const auto& [id, n] : item_popularity(c, c.interactions, k)) sum += n;
        CHECK(sum == static_cast<long long>(c.interactions.size()));
    }
}

TEST_CASE("stats averages reconstruct the interaction count") {
    Corpus c = support::make_corpus({});
    StatsReport s = corpus_stats(c);
    CHECK(s.avg_per_user * static_cast<double>(s.n_users) ==
          Catch::Approx(static_cast<double>(s.n_interactions)));
    CHECK(s.avg_per_dataset * static_cast<double>(s.n_datasets) ==
          Catch::Approx(static_cast<double>(s.n_interactions)));
}

TEST_CASE("eval config validation") {
    EvalConfig config;
    CHECK_NOTHROW(config.validate());
    EvalConfig bad = config;
    bad.list_size = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = config;
    bad.split_ratio = 1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = config;
    bad.split_ratio = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = config;
    bad.neighbors = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = config;
    bad.overlap_truth_size = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("corpus serialization round-trips exactly") {
    Corpus c = support::make_corpus({});
    REQUIRE_FALSE(c.descriptions.empty());
    REQUIRE_FALSE(c.no_interaction_items.empty());

    auto dir = std::filesystem::temp_directory_path() / "shrec_corpus_roundtrip";
    std::filesystem::remove_all(dir);
    io::save_corpus(c, dir.string());
    Corpus back = io::load_corpus(dir.string());

    CHECK(back.users == c.users);
    CHECK(back.datasets == c.datasets);
    CHECK(back.algorithms == c.algorithms);
    CHECK(back.descriptions == c.descriptions);
    CHECK(back.no_interaction_items == c.no_interaction_items);
    REQUIRE(back.interactions.size() == c.interactions.size());
    for (std::size_t i = 0; i < c.interactions.size(); ++i) {
        CHECK(back.interactions[i] == c.interactions[i]);
        CHECK(back.interactions[i].count == c.interactions[i].count);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("interaction csv rejects malformed input") {
    auto dir = std::filesystem::temp_directory_path() / "shrec_csv_errors";
    std::filesystem::create_directories(dir);
    auto write = [&](const char* name, const char* content) {
        std::ofstream out(dir / name);
        out << content;
        return (dir / name).string();
    };
    CHECK_THROWS_AS(io::read_interactions_csv(
                        write("bad_header.csv", "user,dataset\nu1,d1\n")),
                    ParseError);
    CHECK_THROWS_AS(
        io::read_interactions_csv(write(
            "bad_count.csv", "user_id,dataset_id,algorithm_id,count\nu1,d1,a1,0\n")),
        ParseError);
    CHECK_THROWS_AS(
        io::read_interactions_csv(
            write("empty_id.csv", "user_id,dataset_id,algorithm_id,count\n,d1,a1,1\n")),
        ParseError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("descriptions jsonl round-trips and validates kinds") {
    auto dir = std::filesystem::temp_directory_path() / "shrec_desc_jsonl";
    std::filesystem::create_directories(dir);
    std::vector<ItemDescription> descs = {
        {{Kind::Dataset, "d1"}, "Iris flowers, with \"quotes\" and, commas"},
        {{Kind::Algorithm, "a1"}, "Random forest"},
    };
    auto path = (dir / "descs.jsonl").string();
    io::write_descriptions_jsonl(descs, path);
    auto back = io::read_descriptions_jsonl(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].item == descs[0].item);
    CHECK(back[0].text == descs[0].text);
    CHECK(back[1].item == descs[1].item);

    {
        std::ofstream out(dir / "bad_kind.jsonl");
        out << R"({"id":"x","kind":"user","text":"nope"})" << "\n";
    }
    CHECK_THROWS_AS(io::read_descriptions_jsonl((dir / "bad_kind.jsonl").string()),
                    ParseError);
    std::filesystem::remove_all(dir);
}
