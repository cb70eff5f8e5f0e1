#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>

#include "recloss/dataset.hpp"
#include "recloss/rng.hpp"

using namespace recloss;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string("/tmp/recloss_test_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("pairs format readback") {
    auto path = write_temp("pairs.txt", "0 1\n0 2\n1 0\n");
    auto ds = load_interactions(path, PairFormat::pairs);
    CHECK(ds.n_users == 2);
    CHECK(ds.n_items == 3);
    REQUIRE(ds.pos_by_user.size() == 2);
    CHECK(ds.pos_by_user[0] == std::vector<int>{1, 2});
    CHECK(ds.pos_by_user[1] == std::vector<int>{0});
    CHECK(ds.n_interactions == 3);
    CHECK_NOTHROW(ds.validate());
}

TEST_CASE("adjacency format readback") {
    auto path = write_temp("adj.txt", "0 5 7\n1 5\n");
    auto ds = load_interactions(path, PairFormat::adjacency);
    CHECK(ds.n_interactions == 3);
    CHECK(ds.n_items == 8);
    CHECK(ds.pos_by_item[5] == std::vector<int>{0, 1});
    CHECK_NOTHROW(ds.validate());
}

TEST_CASE("dims header override") {
    auto path = write_temp("dims.txt", "# dims 10 20\n0 1\n");
    auto ds = load_interactions(path, PairFormat::pairs);
    CHECK(ds.n_users == 10);
    CHECK(ds.n_items == 20);
}

TEST_CASE("load errors") {
    auto bad = write_temp("bad.txt", "0 1\nx y\n");
    try {
        load_interactions(bad, PairFormat::pairs);
        FAIL("expected parse error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);  // line number
    }

    auto empty = write_temp("empty.txt", "");
    CHECK_THROWS(load_interactions(empty, PairFormat::pairs));

    auto triple = write_temp("triple.txt", "0 1 2\n");
    CHECK_THROWS(load_interactions(triple, PairFormat::pairs));

    CHECK_THROWS(load_interactions("/nonexistent/file", PairFormat::pairs));
}

TEST_CASE("split sizes and determinism") {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 1; i <= 5; ++i) pairs.emplace_back(0, i);
    pairs.emplace_back(1, 0);  // single-interaction user
    auto ds = InteractionDataset::from_pairs(2, 6, pairs);

    SplitSpec spec;
    spec.test_fraction = 0.2;
    spec.seed = 42;
    auto [train, test] = split(ds, spec);
    CHECK(test.pos_by_user[0].size() == 1);  // ceil(0.2 * 5)
    CHECK(train.pos_by_user[0].size() == 4);
    CHECK(test.pos_by_user[1].empty());
    CHECK(train.pos_by_user[1].size() == 1);

    auto [train2, test2] = split(ds, spec);
    CHECK(train.to_pairs() == train2.to_pairs());
    CHECK(test.to_pairs() == test2.to_pairs());
}

TEST_CASE("split caps test items below the user total") {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < 3; ++i) pairs.emplace_back(0, i);
    auto ds = InteractionDataset::from_pairs(1, 3, pairs);
    SplitSpec spec;
    spec.test_fraction = 0.99;
    auto [train, test] = split(ds, spec);
    CHECK(test.pos_by_user[0].size() == 2);  // capped at n - 1
    CHECK(train.pos_by_user[0].size() == 1);
}

TEST_CASE("split is a partition") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> users(0, 39), items(0, 59);
    std::set<std::pair<int, int>> seen;
    for (int k = 0; k < 600; ++k) seen.emplace(users(rng), items(rng));
    auto ds = InteractionDataset::from_pairs(
        40, 60, std::vector<std::pair<int, int>>(seen.begin(), seen.end()));

    SplitSpec spec;
    spec.test_fraction = 0.3;
    spec.seed = 11;
    auto [train, test] = split(ds, spec);
    CHECK(train.n_interactions + test.n_interactions == ds.n_interactions);
    for (const auto& [u, i] : ds.to_pairs()) {
        const bool in_train = train.has_interaction(u, i);
        const bool in_test = test.has_interaction(u, i);
        CHECK(in_train != in_test);
    }
}

TEST_CASE("popularity") {
    auto ds = InteractionDataset::from_pairs(2, 3, {{0, 1}, {1, 1}, {0, 2}});
    auto table = popularity(ds);
    CHECK(table.counts == std::vector<std::int64_t>{0, 2, 1});
    CHECK(table.probs[0] == doctest::Approx(0.0));
    CHECK(table.probs[1] == doctest::Approx(2.0 / 3.0));
    CHECK(table.probs[2] == doctest::Approx(1.0 / 3.0));

    double sum = 0.0;
    for (double p : table.probs) {
        CHECK(p >= 0.0);
        sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    // uniform dataset: every item interacted by the same number of users
    std::vector<std::pair<int, int>> uniform;
    for (int u = 0; u < 4; ++u)
        for (int i = 0; i < 5; ++i) uniform.emplace_back(u, i);
    auto uds = InteractionDataset::from_pairs(4, 5, uniform);
    auto utable = popularity(uds);
    for (double p : utable.probs) CHECK(p == doctest::Approx(0.2).epsilon(1e-12));

    auto empty = InteractionDataset::from_pairs(2, 2, {});
    CHECK_THROWS(popularity(empty));
}

TEST_CASE("pairs round trip") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> users(0, 17), items(0, 26);
    std::set<std::pair<int, int>> seen;
    for (int k = 0; k < 200; ++k) seen.emplace(users(rng), items(rng));
    // trailing users/items without interactions survive via the dims header
    auto ds = InteractionDataset::from_pairs(
        20, 30, std::vector<std::pair<int, int>>(seen.begin(), seen.end()));

    auto path = write_temp("roundtrip.txt", "");
    save_pairs(ds, path);
    auto back = load_interactions(path, PairFormat::pairs);
    CHECK(back.n_users == ds.n_users);
    CHECK(back.n_items == ds.n_items);
    CHECK(back.to_pairs() == ds.to_pairs());
}

TEST_CASE("densified load and id map") {
    auto path = write_temp("raw.txt", "1000 77\n1000 88\n2000 77\n");
    auto dd = load_densified(path, PairFormat::pairs);
    CHECK(dd.data.n_users == 2);
    CHECK(dd.data.n_items == 2);
    CHECK(dd.user_raw_ids == std::vector<std::int64_t>{1000, 2000});
    CHECK(dd.item_raw_ids == std::vector<std::int64_t>{77, 88});

    auto map_path = write_temp("idmap.txt", "");
    save_id_map(dd.user_raw_ids, map_path);
    std::ifstream in(map_path);
    std::int64_t raw, idx;
    in >> raw >> idx;
    CHECK(raw == 1000);
    CHECK(idx == 0);
}

TEST_CASE("duplicate pairs are collapsed") {
    auto path = write_temp("dup.txt", "0 1\n0 1\n0 2\n");
    auto ds = load_interactions(path, PairFormat::pairs);
    CHECK(ds.n_interactions == 2);
}

// Benchmark-scale statistics; these run only when the processed public files
// are available locally.
TEST_CASE("gowalla statistics" * doctest::skip(std::getenv("RECLOSS_GOWALLA_TRAIN") == nullptr)) {
    const char* path = std::getenv("RECLOSS_GOWALLA_TRAIN");
    REQUIRE(path != nullptr);
    auto ds = load_interactions(path, PairFormat::adjacency);
    CHECK(ds.n_users == 29858);
    CHECK(ds.n_items == 40981);
}

TEST_CASE("yelp2018 statistics" * doctest::skip(std::getenv("RECLOSS_YELP2018_TRAIN") == nullptr)) {
    const char* path = std::getenv("RECLOSS_YELP2018_TRAIN");
    REQUIRE(path != nullptr);
    auto ds = load_interactions(path, PairFormat::adjacency);
    CHECK(ds.n_users == 31668);
    CHECK(ds.n_items == 38048);
    auto table = popularity(ds);
    std::int64_t total = 0;
    for (auto c : table.counts) total += c;
    CHECK(total == 1561406);
}
