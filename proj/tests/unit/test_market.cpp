#include "support/oracles.hpp"
#include "support/random_market.hpp"
#include "tcmax/errors.hpp"
#include "tcmax/example3.hpp"
#include "tcmax/maximality.hpp"
#include "tcmax/scenario.hpp"

#include <doctest.h>

#include <functional>

using namespace tcmax;

namespace {

std::string one_period_doc(const std::string& pi_root, const std::string& extra = "") {
    return R"({"assets": 2, "horizon": 1,
      "nodes": [{"id": 0, "time": 0, "parent": null, "prob": "1"},
                {"id": 1, "time": 1, "parent": 0, "prob": "1/3"},
                {"id": 2, "time": 1, "parent": 0, "prob": "2/3"}],
      "bidask": {"0": )" + pi_root + R"(, "1": [["1","2"],["2","1"]], "2": [["1","2"],["2","1"]]})" + extra + "}";
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("example family from the builder") {
    const auto m = load_scenario(R"({"builder": "example3", "k": "10", "N": 4})");
    CHECK(m.assets() == 2);
    CHECK(m.horizon() == 1);
    CHECK(m.tree().node_count() == 5);
    CHECK(m.leaf_count() == 4);
    Rational total = 0;
    for (auto leaf : m.tree().nodes_at(1)) total += m.tree().node(leaf).probability;
    CHECK(total == 1);
    CHECK(m.tree().node(1).probability == 2 * m.tree().node(2).probability);
}

TEST_CASE("diagonal entry must be one") {
    const auto msg = message_of([] { load_scenario(one_period_doc(R"([["1","2"],["2","2"]])")); });
    CHECK(msg.find("π^{2,2}") != std::string::npos);
    CHECK(msg.find("≠ 1") != std::string::npos);
    CHECK_THROWS_AS(load_scenario(one_period_doc(R"([["1","2"],["2","2"]])")), ValidationError);
}

TEST_CASE("netting chain violation") {
    BidAskMatrix pi{{Rational(1), Rational(2), Rational(10)}, {Rational(2), Rational(1), Rational(3)}, {Rational(2), Rational(2), Rational(1)}};
    const auto msg = message_of([&] { validate_bidask(pi, 0); });
    CHECK(msg.find("netting violated") != std::string::npos);
    CHECK(msg.find("1→2→3") != std::string::npos);
    const auto fixed = repair_netting(pi, 0);
    CHECK(fixed[0][2] == 6);
    CHECK_NOTHROW(validate_bidask(fixed, 0));
}

TEST_CASE("netting repair is opt-in") {
    const std::string doc = R"({"assets": 3, "horizon": 0,
      "nodes": [{"id": 0, "time": 0, "parent": null, "prob": "1"}],
      "bidask": {"0": [["1","2","10"],["2","1","3"],["2","2","1"]]}})";
    CHECK_THROWS_AS(load_scenario(doc), ValidationError);
    const auto m = load_scenario(doc, NettingPolicy::Repair);
    CHECK(std::get<BidAskMatrix>(m.cone_specs()[0])[0][2] == 6);
}

TEST_CASE("probabilities must add up") {
    const std::string doc = R"({"assets": 1, "horizon": 1,
      "nodes": [{"id": 0, "time": 0, "parent": null, "prob": "1"},
                {"id": 1, "time": 1, "parent": 0, "prob": "1/3"},
                {"id": 2, "time": 1, "parent": 0, "prob": "1/3"}],
      "bidask": {"0": [["1"]], "1": [["1"]], "2": [["1"]]}})";
    CHECK_THROWS_AS(load_scenario(doc), ProbabilityError);
}

TEST_CASE("schema errors") {
    CHECK_THROWS_AS(load_scenario("[1, 2]"), SchemaError);
    CHECK_THROWS_AS(load_scenario("{"), SchemaError);
    CHECK_THROWS_AS(load_scenario(R"({"assets": 1})"), SchemaError);
    CHECK_THROWS_AS(load_scenario(one_period_doc(R"([["1", 2.5],["2","1"]])")), SchemaError);
}

TEST_CASE("generator order") {
    const auto m = example3_market(10, 2);
    const auto& g = m.cones().generators(1);
    REQUIRE(g.size() == 4);
    CHECK(g[0] == Vector{Rational(-10), Rational(1)}); // e_2 - pi^{1,2} e_1
    CHECK(g[1] == Vector{Rational(1), Rational(-2)});  // e_1 - pi^{2,1} e_2
    CHECK(g[2] == Vector{Rational(-1), Rational(0)});
    CHECK(g[3] == Vector{Rational(0), Rational(-1)});
}

TEST_CASE("single asset has only disposal") {
    const auto gens = bidask_generators(BidAskMatrix{{Rational(1)}});
    REQUIRE(gens.size() == 1);
    CHECK(gens[0] == Vector{Rational(-1)});
}

TEST_CASE("frictionless pair gives a line") {
    const auto gens = bidask_generators(BidAskMatrix{{Rational(1), Rational(2)}, {Rational(1, 2), Rational(1)}});
    const auto lin = lineality(LiftedCone::from_generators(2, gens));
    REQUIRE(lin.rank() == 1);
    CHECK(lin.contains(Vector{Rational(-2), Rational(1)}));
}

TEST_CASE("scenario round trip") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
        auto m = testing::random_market(rng, {});
        m = m.with_claim("x", terminal_claim(m.tree(), m.assets(), testing::random_legs(m, rng)));
        const auto text = save_scenario(m);
        const auto back = load_scenario(text);
        CHECK(back == m);
        CHECK(save_scenario(back) == text);
    }
    const auto e = example3_market(Rational(21, 2), 3);
    CHECK(load_scenario(save_scenario(e)) == e);
}

TEST_CASE("hand-built generator lists") {
    const std::string doc = R"({"assets": 2, "horizon": 0,
      "nodes": [{"id": 0, "time": 0, "parent": null, "prob": "1"}],
      "generators": {"0": [["-1","0"],["0","-1"],["1","-3"]]},
      "claims": {"c": {"0": ["1", "-3"]}}})";
    const auto m = load_scenario(doc);
    CHECK(m.cones().generators(0).size() == 3);
    CHECK(!m.cones().derived_from_bidask(0));
    CHECK(resolve_claim(m, "c").leaf(0)[1] == -3);
    CHECK(resolve_claim(m, R"({"0": ["1/2", "0"]})").leaf(0)[0] == Rational(1, 2));
    CHECK(is_zero(resolve_claim(m, "zero").flat()));
    CHECK_THROWS_AS(resolve_claim(m, "missing"), ValidationError);
}

TEST_CASE("randomized product market") {
    const auto base = example3_market(10, 4);
    const auto r = randomize_market(base, 3, 2);
    CHECK(r.market.leaf_count() == 12);
    for (unsigned t = 1; t <= r.market.horizon(); ++t) {
        Rational out = 1;
        for (auto node : r.g.events[t]) out -= r.market.tree().node(node).probability;
        CHECK(out == Rational(1, 7));
        CHECK(out == oracle::tail_weight(2, 3));
    }
    for (std::size_t n = 0; n < r.market.tree().node_count(); ++n) {
        CHECK(r.market.cones().generators(n) == base.cones().generators(r.base_node[n]));
    }
    const auto full = randomize_market(base, 3, 3);
    CHECK(full.g.events[1].size() == full.market.tree().nodes_at(1).size());
    CHECK(truncation_tail(2, 4) == Rational(1, 5));
    CHECK_THROWS_AS(randomize_market(base, 3, 4), ValidationError);
    CHECK_THROWS_AS(randomize_market(base, 30, 1, 100), BudgetExceeded);
}

TEST_CASE("randomization preserves no-arbitrage, null strategies and maximality") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 12; ++i) {
        testing::RandomMarketOptions opt;
        opt.max_leaves = 4;
        opt.max_assets = 2;
        opt.martingale_prices = i % 3 != 0;
        const auto m = testing::random_market(rng, opt);
        const auto r = randomize_market(m, 2, 1);
        const bool base_free = !arbitrage_check(LiftedCone::attainable(m)).has_value();
        CHECK(base_free == !arbitrage_check(LiftedCone::attainable(r.market)).has_value());

        auto null_trivial = [](const Market& mk) {
            std::vector<LiftedCone> f;
            for (unsigned t = 0; t <= mk.horizon(); ++t) f.push_back(LiftedCone::attainable(mk.tree(), mk.cones(), t, t));
            const auto ns = null_strategies(f);
            return ns.is_vector_space && ns.tuples.empty();
        };
        CHECK(null_trivial(m) == null_trivial(r.market));

        if (!base_free) continue;
        const auto z = find_consistent_process(m);
        const auto theta = terminal_claim(m.tree(), m.assets(), testing::tight_legs(m, z.process.z, rng));
        CHECK(is_maximal(m, theta, false).maximal);
        CHECK(is_maximal(r.market, r.lift(m, theta), false).maximal);
    }
}
