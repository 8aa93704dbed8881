#include "support/oracles.hpp"
#include "support/random_market.hpp"
#include "tcmax/cone.hpp"
#include "tcmax/errors.hpp"
#include "tcmax/example3.hpp"
#include "tcmax/pricing.hpp"
#include "tcmax/randomize.hpp"

#include <doctest.h>

using namespace tcmax;

namespace {

Matrix sorted_rays(const LiftedCone& c) {
    Matrix r;
    for (const auto& g : c.generators()) r.push_back(primitive(g));
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
}

Market arbitrage_market() {
    std::vector<NodeSpec> specs{{0, 0, std::nullopt, Rational(1)}, {1, 1, std::size_t{0}, Rational(1)}};
    std::vector<NodeConeSpec> cones{BidAskMatrix{{Rational(1), Rational(1)}, {Rational(1), Rational(1)}},
                                    BidAskMatrix{{Rational(1), Rational(2)}, {Rational(1, 2), Rational(1)}}};
    return Market::build(2, FiltrationTree::build(std::move(specs)), std::move(cones));
}

LiftedCone plain(std::size_t dim, Matrix gens) { return LiftedCone::from_generators(dim, gens); }

} // namespace

TEST_CASE("membership of the example claim") {
    const auto m = example3_market(10, 2);
    const auto a = LiftedCone::attainable(m);
    const auto r = member(a, m.claim("theta").flat());
    REQUIRE(r.member);
    // Reconstruct from the returned weights.
    Vector sum(a.dim(), Rational(0));
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(r.coefficients[k] >= 0);
        axpy(r.coefficients[k], a.generators()[k], sum);
    }
    CHECK(sum == m.claim("theta").flat());
    // The explicit strategy: 1 on e_2 - e_1 at the root, 1/(2 omega) on e_1 - 2 e_2 at leaf omega.
    const auto legs = example3_strategy(m);
    CHECK(legs.per_node[0] == Vector{Rational(-1), Rational(1)});
    CHECK(terminal_claim(m.tree(), 2, legs) == m.claim("theta"));
}

TEST_CASE("zero is in every cone") {
    const auto a = plain(2, {{Rational(-1), Rational(0)}});
    const auto r = member(a, Vector(2, Rational(0)));
    CHECK(r.member);
    CHECK(is_zero(r.coefficients));
}

TEST_CASE("nonmember with Farkas separator") {
    const auto m = example3_market(10, 2);
    const auto a = LiftedCone::attainable(m);
    const auto x = Claim::constant(2, Vector{Rational(1, 2), Rational(0)});
    const auto r = member(a, x.flat());
    REQUIRE(!r.member);
    for (const auto& g : a.generators()) CHECK(dot(r.separator, g) <= 0);
    CHECK(dot(r.separator, x.flat()) > 0);
    // The lifted consistent Z = (1, 1) also separates.
    NodeVectors z;
    z.per_node.assign(m.tree().node_count(), Vector{Rational(1), Rational(1)});
    CHECK(check_price_process(m, z, false).empty());
    CHECK(expected_pairing(m, z, x) > 0);
}

TEST_CASE("polars of the example node cones") {
    const auto m = example3_market(10, 2);
    const auto k1 = plain(2, m.cones().generators(1));
    const auto k0 = plain(2, m.cones().generators(0));
    const auto p1 = polar(k1);
    const auto p0 = polar(k0);
    const auto o1 = oracle::polar_2d(k1.generators());
    const auto o0 = oracle::polar_2d(k0.generators());
    REQUIRE(o1);
    REQUIRE(o0);
    CHECK(sorted_rays(p1) == *o1);
    CHECK(sorted_rays(p0) == *o0);
    CHECK(*o1 == Matrix{{Rational(1), Rational(10)}, {Rational(2), Rational(1)}});
    CHECK(*o0 == Matrix{{Rational(1), Rational(1)}, {Rational(10), Rational(1)}});
}

TEST_CASE("polar of the whole space") {
    Matrix gens;
    for (std::size_t i = 0; i < 3; ++i) {
        gens.push_back(unit_vector(3, i));
        gens.push_back(negated(unit_vector(3, i)));
    }
    CHECK(polar(plain(3, gens)).size() == 0);
}

TEST_CASE("polar budget") {
    const auto a = LiftedCone::attainable(example3_market(10, 16));
    CHECK_THROWS_AS(polar(a, 24), BudgetExceeded);
}

TEST_CASE("double polar on random cones") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 40; ++i) {
        const std::size_t d = 2 + testing::random_index(rng, 3);
        Matrix gens;
        const std::size_t n = 1 + testing::random_index(rng, 6);
        for (std::size_t k = 0; k < n; ++k) {
            Vector g(d);
            for (auto& v : g) v = testing::random_rational(rng, -3, 3, 1);
            gens.push_back(g);
        }
        const auto c = plain(d, gens);
        CHECK(cone_equal(polar(polar(c)), c));
        if (d == 2) {
            if (const auto o = oracle::polar_2d(gens); o && o->size() == 2 && (*o)[0] != negated((*o)[1])) {
                CHECK(cone_equal(polar(c), plain(2, *o)));
            }
        }
    }
}

TEST_CASE("lineality") {
    const auto m = example3_market(10, 2);
    CHECK(lineality(plain(2, m.cones().generators(1))).trivial());
    CHECK(lineality(plain(2, {{Rational(-1), Rational(0)}, {Rational(0), Rational(-1)}})).trivial());
    const auto pair = plain(2, bidask_generators({{Rational(1), Rational(2)}, {Rational(1, 2), Rational(1)}}));
    const auto lin = lineality(pair);
    REQUIRE(lin.rank() == 1);
    for (const auto& v : lin.basis) {
        CHECK(member(pair, v).member);
        CHECK(member(pair, negated(v)).member);
    }
    // A half-plane {x_1 + 2 x_2 <= 0}: the line is exactly span{e_2 - 2 e_1}.
    CHECK(lin.contains(Vector{Rational(-2), Rational(1)}));
    CHECK(!lin.contains(Vector{Rational(-1), Rational(0)}));
}

TEST_CASE("arbitrage check") {
    for (unsigned N : {2u, 5u}) CHECK(!arbitrage_check(LiftedCone::attainable(example3_market(10, N))));
    const auto m = arbitrage_market();
    const auto a = LiftedCone::attainable(m);
    const auto w = arbitrage_check(a);
    REQUIRE(w);
    CHECK(member(a, w->claim).member);
    CHECK(w->claim[w->coordinate] > 0);
    for (const auto& v : w->claim) CHECK(v >= 0);
    Vector sum(a.dim(), Rational(0));
    for (std::size_t k = 0; k < a.size(); ++k) axpy(w->coefficients[k], a.generators()[k], sum);
    CHECK(sum == w->claim);
    // The two-trade strategy gives e_2 / 2.
    const Vector explicit_claim = added(Vector{Rational(-1), Rational(1)}, Vector{Rational(1), Rational(-1, 2)});
    CHECK(explicit_claim == Vector{Rational(0), Rational(1, 2)});
    CHECK(member(a, explicit_claim).member);
    CHECK(!arbitrage_check(plain(4, {{Rational(-1), 0, 0, 0}, {0, Rational(-1), 0, 0}, {0, 0, Rational(-1), 0}, {0, 0, 0, Rational(-1)}})));
}

TEST_CASE("null strategies") {
    const auto m = example3_market(10, 2);
    std::vector<LiftedCone> f{LiftedCone::attainable(m.tree(), m.cones(), 0, 0), LiftedCone::attainable(m.tree(), m.cones(), 1, 1)};
    const auto ns = null_strategies(f);
    CHECK(ns.is_vector_space);
    CHECK(ns.tuples.empty());

    const auto c = plain(2, {{Rational(1), Rational(0)}, {Rational(1), Rational(1)}});
    const auto neg = plain(2, {{Rational(-1), Rational(0)}, {Rational(-1), Rational(-1)}});
    CHECK(!null_strategies({c, neg}).is_vector_space);

    const auto sub = plain(2, {{Rational(1), Rational(0)}, {Rational(-1), Rational(0)}});
    const auto sn = null_strategies({sub, sub});
    CHECK(sn.is_vector_space);
    CHECK(sn.components[0].size() == 1);

    const LiftedCone zero(2);
    const auto zn = null_strategies({zero, zero});
    CHECK(zn.is_vector_space);
    CHECK(zn.tuples.empty());
}

TEST_CASE("displaced cone") {
    const auto m = example3_market(10, 2);
    const auto k0 = plain(2, m.cones().generators(0));
    const Vector xi{Rational(-1), Rational(1)};
    const auto tree = FiltrationTree::trivial();
    const auto d = displaced_cone(k0, xi, Displacement::ScalarRay, tree, 0, 2);
    CHECK(d.size() == k0.size() + 1);
    const auto half_plane = plain(2, {{Rational(1), Rational(-1)}, {Rational(-1), Rational(1)}, {Rational(-1), Rational(-1)}});
    CHECK(cone_equal(d, half_plane));
    CHECK(sorted_rays(polar(d)) == Matrix{{Rational(1), Rational(1)}});
    CHECK(cone_equal(d, displaced_cone(k0, xi, Displacement::Measurable, tree, 0, 2)));
    CHECK(cone_equal(k0, displaced_cone(k0, Vector(2, Rational(0)), Displacement::ScalarRay, tree, 0, 2)));
}

TEST_CASE("cone equality") {
    CHECK(cone_equal(plain(2, {{Rational(1), 0}, {0, Rational(1)}}), plain(2, {{Rational(1), 0}, {0, Rational(1)}, {Rational(1), Rational(1)}})));
    CHECK(!cone_equal(plain(2, {{Rational(1), 0}}), plain(2, {{Rational(-1), 0}})));
}

TEST_CASE("neat reduction") {
    const auto m = example3_market(10, 3);
    const auto reduced = neat_reduce(m.tree(), m.cones());
    for (std::size_t n = 0; n < m.tree().node_count(); ++n) {
        CHECK(cone_equal(plain(2, reduced.generators(n)), plain(2, m.cones().generators(n))));
    }
    // A line at time 0 that is undone at time 1.
    std::vector<NodeSpec> specs{{0, 0, std::nullopt, Rational(1)}, {1, 1, std::size_t{0}, Rational(1, 2)}, {2, 1, std::size_t{0}, Rational(1, 2)}};
    auto tree = FiltrationTree::build(std::move(specs));
    const BidAskMatrix pair{{Rational(1), Rational(2)}, {Rational(1, 2), Rational(1)}};
    const Market lm = Market::build(2, std::move(tree), {pair, pair, pair});
    const auto r = neat_reduce(lm.tree(), lm.cones());
    CHECK(lineality(plain(2, r.generators(0))).trivial());
    CHECK(!lineality(plain(2, lm.cones().generators(0))).trivial());
    CHECK(cone_equal(LiftedCone::attainable(lm.tree(), r, 0, 1), LiftedCone::attainable(lm)));

    const Market single = Market::build(2, FiltrationTree::trivial(), {pair});
    CHECK(neat_reduce(single.tree(), single.cones()).generators(0) == single.cones().generators(0));
}

TEST_CASE("sum cone membership matches stacked feasibility") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 20; ++i) {
        testing::RandomMarketOptions opt;
        opt.max_leaves = 4;
        const auto m = testing::random_market(rng, opt);
        const auto a = LiftedCone::attainable(m);
        const auto x = terminal_claim(m.tree(), m.assets(), testing::random_legs(m, rng));
        CHECK(member(a, x.flat()).member);
        Vector y = x.flat();
        y[0] += 1;
        const auto r = member(a, y);
        if (!r.member) CHECK(dot(r.separator, y) > 0);
    }
}

TEST_CASE("FTAP equivalence on a small sample") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 40; ++i) {
        testing::RandomMarketOptions opt;
        opt.martingale_prices = i % 2;
        const auto m = testing::random_market(rng, opt);
        CHECK(!arbitrage_check(LiftedCone::attainable(m)).has_value() == find_consistent_process(m).found);
    }
}
