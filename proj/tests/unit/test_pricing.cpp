#include "support/oracles.hpp"
#include "support/random_market.hpp"
#include "tcmax/cone.hpp"
#include "tcmax/errors.hpp"
#include "tcmax/example3.hpp"
#include "tcmax/pricing.hpp"

#include <doctest.h>

using namespace tcmax;

namespace {

NodeVectors constant_process(const Market& m, Vector z) {
    NodeVectors out;
    out.per_node.assign(m.tree().node_count(), std::move(z));
    return out;
}

Market arbitrage_market() {
    std::vector<NodeSpec> specs{{0, 0, std::nullopt, Rational(1)}, {1, 1, std::size_t{0}, Rational(1)}};
    std::vector<NodeConeSpec> cones{BidAskMatrix{{Rational(1), Rational(1)}, {Rational(1), Rational(1)}},
                                    BidAskMatrix{{Rational(1), Rational(2)}, {Rational(1, 2), Rational(1)}}};
    return Market::build(2, FiltrationTree::build(std::move(specs)), std::move(cones));
}

} // namespace

TEST_CASE("strictly consistent process in the example") {
    for (unsigned N : {2u, 4u, 8u}) {
        const auto m = example3_market(10, N);
        const auto z = constant_process(m, {Rational(1), Rational(3, 4)});
        CHECK(check_price_process(m, z, true).empty());
        const auto found = find_consistent_process(m, true);
        REQUIRE(found.found);
        CHECK(found.process.strict);
        CHECK(found.process.slack > 0);
        CHECK(check_price_process(m, found.process.z, true).empty());
    }
}

TEST_CASE("boundary process is consistent but not strict") {
    const auto m = example3_market(10, 2);
    // (1, 1) is an extreme ray of the root dual cone.
    const auto z = constant_process(m, {Rational(1), Rational(1)});
    CHECK(check_price_process(m, z, false).empty());
    CHECK(!check_price_process(m, z, true).empty());
    CHECK(!check_price_process(m, constant_process(m, {Rational(0), Rational(0)}), false).empty());
    CHECK(!check_price_process(m, constant_process(m, {Rational(1), Rational(-1)}), false).empty());
}

TEST_CASE("martingale condition is checked") {
    const auto m = example3_market(10, 2);
    auto z = constant_process(m, {Rational(1), Rational(3, 4)});
    z.per_node[1] = {Rational(1), Rational(1, 2)};
    CHECK(!check_price_process(m, z, false).empty());
}

TEST_CASE("pricing the example claim at zero") {
    const auto m = example3_market(10, 3);
    const auto xi0 = m.claim("xi0");
    const auto r = find_consistent_process(m, false, &xi0);
    REQUIRE(r.found);
    CHECK(check_price_process(m, r.process.z, false).empty());
    CHECK(expected_pairing(m, r.process.z, xi0) == 0);
    // Only e_2 - e_1 direction: Z_0 must be proportional to (1, 1).
    CHECK(r.process.z.per_node[0][0] == r.process.z.per_node[0][1]);
}

TEST_CASE("no consistent process under arbitrage") {
    const auto m = arbitrage_market();
    const auto r = find_consistent_process(m);
    CHECK(!r.found);
    CHECK(r.farkas.has_value());
    CHECK(!r.explanation.empty());
    CHECK_THROWS_AS(dual_membership(m, Claim::constant(m.leaf_count(), Vector(2, Rational(0)))), PreconditionError);
}

TEST_CASE("price, value process and period terms") {
    const auto m = example3_market(10, 2);
    PriceProcess z{constant_process(m, {Rational(1), Rational(3, 4)}), true, Rational(0)};
    const auto theta = m.claim("theta");
    NodeVectors legs;
    legs.per_node.assign(m.tree().node_count(), Vector(2, Rational(0)));
    const auto xi0 = m.claim("xi0");
    legs.per_node[0] = Vector(xi0.leaf(0).begin(), xi0.leaf(0).end());
    for (std::size_t l = 0; l < m.leaf_count(); ++l) {
        const auto node = m.tree().leaf_node(l);
        legs.per_node[node] = subtracted(theta.leaf(l), legs.per_node[0]);
    }
    const auto rep = price_and_value(m, z, theta, &legs);
    CHECK(rep.price == Rational(-11, 24));
    REQUIRE(rep.period_terms.size() == 2);
    CHECK(rep.period_terms[0] == Rational(-1, 4));
    CHECK(rep.period_terms[1] == Rational(-5, 24));
    CHECK(rep.identity_holds);
    // Legs are not priced at zero, so Z_t . X_t is not a martingale.
    CHECK(!rep.tower_holds);
    CHECK(rep.value[0] == Rational(-1, 4));
    const auto plain = price_and_value(m, z, theta);
    CHECK(plain.tower_holds);
    CHECK(plain.value[0] == Rational(-11, 24));

    auto bad = legs;
    bad.per_node[0] = {Rational(1), Rational(0)};
    CHECK_THROWS_AS(price_and_value(m, z, theta, &bad), ValidationError);
}

TEST_CASE("price of the explicit strategy agrees with its legs") {
    const auto m = example3_market(10, 4);
    const auto legs = example3_strategy(m);
    const auto x = terminal_claim(m.tree(), 2, legs);
    PriceProcess z{constant_process(m, {Rational(1), Rational(3, 4)}), true, Rational(0)};
    const auto rep = price_and_value(m, z, x, &legs);
    CHECK(rep.identity_holds);
    Rational sum = 0;
    for (const auto& t : rep.period_terms) {
        CHECK(t <= 0);
        sum += t;
    }
    CHECK(sum == rep.price);
}

TEST_CASE("tight legs give a martingale value process") {
    std::mt19937_64 rng(8);
    int checked = 0;
    for (int i = 0; i < 20; ++i) {
        testing::RandomMarketOptions opt;
        opt.martingale_prices = true;
        const auto m = testing::random_market(rng, opt);
        const auto r = find_consistent_process(m);
        if (!r.found) continue;
        const auto legs = testing::tight_legs(m, r.process.z, rng);
        const auto x = terminal_claim(m.tree(), m.assets(), legs);
        const auto rep = price_and_value(m, r.process, x, &legs);
        CHECK(rep.identity_holds);
        CHECK(rep.tower_holds);
        CHECK(rep.price == 0);
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("dual membership") {
    const auto m = example3_market(10, 2);
    const auto in = dual_membership(m, m.claim("theta"));
    CHECK(in.in_cone);
    CHECK(in.optimum <= 0);
    CHECK(!in.witness);

    const auto x = Claim::constant(2, Vector{Rational(1, 2), Rational(0)});
    const auto out = dual_membership(m, x);
    CHECK(!out.in_cone);
    REQUIRE(out.witness);
    CHECK(check_price_process(m, out.witness->z, false).empty());
    CHECK(expected_pairing(m, out.witness->z, x) > 0);
}

TEST_CASE("dual membership agrees with primal membership") {
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int i = 0; i < 30; ++i) {
        testing::RandomMarketOptions opt;
        opt.max_leaves = 4;
        opt.martingale_prices = true;
        const auto m = testing::random_market(rng, opt);
        const auto a = LiftedCone::attainable(m);
        if (arbitrage_check(a)) continue;
        auto x = terminal_claim(m.tree(), m.assets(), testing::random_legs(m, rng));
        if (i % 2) x = Claim::constant(m.leaf_count(), Vector(m.assets(), Rational(1, 3)));
        CHECK(dual_membership(m, x).in_cone == member(a, x.flat()).member);
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("sampled martingale measures") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) {
        testing::RandomMarketOptions opt;
        opt.martingale_prices = true;
        const auto m = testing::random_market(rng, opt);
        const auto r = find_consistent_process(m);
        if (!r.found) continue;
        const auto x = terminal_claim(m.tree(), m.assets(), testing::random_legs(m, rng));
        for (int s = 0; s < 3; ++s) {
            const auto q = sample_emm(m, r.process.z, rng);
            CHECK(is_emm(m, q, r.process.z));
            CHECK(conditional_values(m, q, r.process.z, x) == oracle::conditional_expectations(m.tree(), q, r.process.z, x));
        }
    }
}

TEST_CASE("node cone membership") {
    const Matrix gens{{Rational(-1), Rational(0)}, {Rational(0), Rational(-1)}, {Rational(1), Rational(-2)}};
    CHECK(in_node_cone(gens, Vector{Rational(1), Rational(-3)}));
    CHECK(!in_node_cone(gens, Vector{Rational(1), Rational(-1)}));
}

TEST_CASE("lineality flags") {
    const auto m = example3_market(10, 2);
    for (const auto& flags : node_lineality_flags(m))
        for (bool f : flags) CHECK(!f);
    const auto pair = testing::frictionless_pair_market(2);
    const auto fl = node_lineality_flags(pair);
    bool any = false;
    for (bool f : fl[1]) any = any || f;
    CHECK(any);
}
