#include "support/oracles.hpp"
#include "support/random_market.hpp"
#include "tcmax/errors.hpp"
#include "tcmax/example3.hpp"
#include "tcmax/maximality.hpp"

#include <doctest.h>

using namespace tcmax;

namespace {

LiftedCone plain(std::size_t dim, Matrix gens) { return LiftedCone::from_generators(dim, gens); }

LiftedCone orthant(std::size_t dim) {
    Matrix g;
    for (std::size_t i = 0; i < dim; ++i) g.push_back(unit_vector(dim, i));
    return plain(dim, g);
}

Vector copy(std::span<const Rational> s) { return Vector(s.begin(), s.end()); }

Market arbitrage_market() {
    std::vector<NodeSpec> specs{{0, 0, std::nullopt, Rational(1)}, {1, 1, std::size_t{0}, Rational(1)}};
    std::vector<NodeConeSpec> cones{BidAskMatrix{{Rational(1), Rational(1)}, {Rational(1), Rational(1)}},
                                    BidAskMatrix{{Rational(1), Rational(2)}, {Rational(1, 2), Rational(1)}}};
    return Market::build(2, FiltrationTree::build(std::move(specs)), std::move(cones));
}

} // namespace

TEST_CASE("efficiency in a cone") {
    const auto k = plain(2, {{Rational(-1), Rational(0)}, {Rational(0), Rational(-1)}, {Rational(1), Rational(-2)}, {Rational(-10), Rational(1)}});
    const auto c = orthant(2);
    // e_1 - 2 e_2 lies on the boundary ray; nothing dominates it.
    CHECK(is_efficient(k, Vector{Rational(1), Rational(-2)}, c).efficient);
    // -e_1 is dominated by 0 and by e_1 - 2 e_2 scaled.
    const auto r = is_efficient(k, Vector{Rational(-1), Rational(0)}, c);
    CHECK(!r.efficient);
    REQUIRE(!r.witness.empty());
    for (const auto& v : r.witness) CHECK(v >= 0);
    CHECK(!is_zero(r.witness));
    CHECK_THROWS_AS(is_efficient(k, Vector{Rational(1), Rational(1)}, c), PreconditionError);
}

TEST_CASE("efficiency in a section") {
    const auto k = orthant(2);
    const auto b = orthant(2);
    const Vector top{Rational(1), Rational(1)};
    const auto ord = plain(2, {{Rational(1), Rational(0)}, {Rational(0), Rational(1)}});
    CHECK(is_efficient_in_section(k, b, top, Vector{Rational(1), Rational(1)}, ord).efficient);
    const auto r = is_efficient_in_section(k, b, top, Vector{Rational(1, 2), Rational(1)}, ord);
    CHECK(!r.efficient);
    REQUIRE(r.witness.size() == 2);
    CHECK(r.witness[0] > 0);
    CHECK(r.witness[1] == 0);
}

TEST_CASE("the example claim is not maximal") {
    for (unsigned N : {2u, 4u, 8u}) {
        const auto m = example3_market(10, N);
        const auto theta = m.claim("theta");
        const auto r = is_maximal(m, theta);
        CHECK(r.in_a);
        CHECK(!r.maximal);
        CHECK(r.verdict() == Verdict::NotMaximal);
        CHECK(to_string(r.verdict()) == "not-maximal");
        CHECK(r.improvement_value > 0);
        for (const auto& v : r.improvement.flat()) CHECK(v >= 0);
        Vector sum = theta.flat();
        axpy(Rational(1), r.improvement.flat(), sum);
        CHECK(member(LiftedCone::attainable(m), sum).member);

        const auto eps = max_uniform_improvement(m, theta, Vector{Rational(0), Rational(1)});
        CHECK(eps.epsilon == Rational(1) / (2 * N));
        // The explicit improving strategy reaches theta + eps e_2.
        const auto improved = terminal_claim(m.tree(), 2, example3_improvement_strategy(m));
        for (unsigned w = 1; w <= N; ++w) CHECK(copy(improved.leaf(w - 1)) == oracle::improvement_terminal(w, N));
    }
}

TEST_CASE("xi0 is properly maximal") {
    const auto m = example3_market(10, 4);
    const auto r = is_maximal(m, m.claim("xi0"));
    CHECK(r.maximal);
    CHECK(r.proper_checked);
    CHECK(r.properly_maximal);
    CHECK(!r.gap());
    REQUIRE(r.certificate);
    // Consistent but on the boundary at the root: Z_0 is forced onto the ray (1, 1).
    CHECK(check_price_process(m, r.certificate->z, false).empty());
    CHECK(!check_price_process(m, r.certificate->z, true).empty());
    CHECK(expected_pairing(m, r.certificate->z, m.claim("xi0")) == 0);
    CHECK(to_string(r.verdict()) == "properly-maximal");
}

TEST_CASE("maximality verdicts at the edges") {
    const auto m = example3_market(10, 2);
    const auto zero = Claim::constant(2, Vector(2, Rational(0)));
    CHECK(is_maximal(m, zero).properly_maximal);
    const auto outside = Claim::constant(2, Vector{Rational(1), Rational(0)});
    const auto r = is_maximal(m, outside);
    CHECK(!r.in_a);
    CHECK(r.verdict() == Verdict::NotInA);
    CHECK(to_string(r.verdict()) == "not-in-A");
    CHECK_THROWS_AS(is_maximal(arbitrage_market(), Claim::constant(1, Vector(2, Rational(0)))), PreconditionError);
}

TEST_CASE("maximality agrees with the absence of a strictly positive improvement") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 15; ++i) {
        testing::RandomMarketOptions opt;
        opt.martingale_prices = true;
        opt.max_leaves = 4;
        const auto m = testing::random_market(rng, opt);
        const auto z = find_consistent_process(m, true);
        if (!z.found) continue;
        const auto theta = terminal_claim(m.tree(), m.assets(), testing::tight_legs(m, z.process.z, rng));
        const auto r = is_maximal(m, theta);
        CHECK(r.maximal);
        CHECK(r.properly_maximal);
        const auto eps = max_uniform_improvement(m, theta, Vector(m.assets(), Rational(1)));
        CHECK(eps.epsilon == 0);
    }
}

TEST_CASE("special decomposition of the example") {
    const auto m = example3_market(10, 3);
    for (const char* name : {"xi0", "theta"}) {
        const auto theta = m.claim(name);
        const auto d = special_decomposition(m, theta);
        CHECK(d.valid);
        CHECK(terminal_claim(m.tree(), 2, d.legs) == theta);
        for (std::size_t n = 0; n < m.tree().node_count(); ++n)
            CHECK(in_node_cone(m.cones().generators(n), d.legs.per_node[n]));
        for (const auto& s : verify_special_decomposition(m, theta, d.legs)) CHECK(s.holds);
        REQUIRE(d.functionals.size() == 1);
        CHECK(d.functionals[0].scal_holds);
        CHECK(d.functionals[0].scal2_holds);
    }
    // The root leg of theta is forced to e_2 - e_1.
    const auto d = special_decomposition(m, m.claim("theta"));
    CHECK(d.legs.per_node[0] == Vector{Rational(-1), Rational(1)});
}

TEST_CASE("a non-special decomposition is detected") {
    const auto m = example3_market(10, 3);
    const auto theta = m.claim("theta");
    // Put everything on the leaves: the root leg zero is not efficient.
    NodeVectors legs;
    legs.per_node.assign(m.tree().node_count(), Vector(2, Rational(0)));
    for (std::size_t l = 0; l < m.leaf_count(); ++l) legs.per_node[m.tree().leaf_node(l)] = copy(theta.leaf(l));
    bool all_leaf_legs_in_cone = true;
    for (std::size_t l = 0; l < m.leaf_count(); ++l)
        all_leaf_legs_in_cone = all_leaf_legs_in_cone && in_node_cone(m.cones().generators(m.tree().leaf_node(l)), theta.leaf(l));
    if (all_leaf_legs_in_cone) {
        const auto checks = verify_special_decomposition(m, theta, legs);
        REQUIRE(!checks.empty());
        CHECK(!checks[0].holds);
        CHECK(!is_zero(checks[0].counterexample));
    } else {
        CHECK_THROWS_AS(verify_special_decomposition(m, theta, legs), ValidationError);
    }
}

TEST_CASE("decomposition on a one-date market") {
    const BidAskMatrix pi{{Rational(1), Rational(2)}, {Rational(2), Rational(1)}};
    const Market m = Market::build(2, FiltrationTree::trivial(), {pi});
    const auto x = Claim::constant(1, Vector{Rational(1), Rational(-2)});
    const auto d = special_decomposition(m, x);
    CHECK(d.valid);
    CHECK(d.legs.per_node[0] == Vector{Rational(1), Rational(-2)});
    CHECK(d.functionals.empty());
    CHECK_THROWS_AS(special_decomposition(m, Claim::constant(1, Vector{Rational(1), Rational(0)})), PreconditionError);
}

TEST_CASE("a claim already in the last cone") {
    const auto m = example3_market(10, 2);
    // e_1 - 2 e_2 on every leaf is a time-1 trade.
    const auto x = Claim::constant(2, Vector{Rational(1), Rational(-2)});
    const auto d = special_decomposition(m, x);
    CHECK(d.valid);
    CHECK(is_zero(d.legs.per_node[0]));
    CHECK(terminal_claim(m.tree(), 2, d.legs) == x);
}

TEST_CASE("support-maximal representatives with a frictionless pair") {
    const auto m = testing::frictionless_pair_market(2);
    const auto a = LiftedCone::attainable(m);
    REQUIRE(!lineality(a).trivial());
    std::mt19937_64 rng(3);
    const auto z = find_consistent_process(m);
    REQUIRE(z.found);
    const auto theta = terminal_claim(m.tree(), 2, testing::tight_legs(m, z.process.z, rng));
    const auto plain_d = special_decomposition(m, theta, false);
    const auto sm = special_decomposition(m, theta, true);
    CHECK(plain_d.valid);
    CHECK(sm.valid);
    CHECK(terminal_claim(m.tree(), 2, sm.legs) == theta);

    const auto eq = support_maximal_representative(m, 0, sm.legs);
    CHECK(eq.spec_holds);
    for (const auto& nc : eq.nodes) {
        CHECK(nc.spec_holds);
        CHECK(in_node_cone(m.cones().generators(nc.node), nc.xi));
    }
    NodeVectors bad;
    bad.per_node.assign(m.tree().node_count(), Vector(2, Rational(0)));
    bad.per_node[0] = {Rational(1), Rational(1)};
    CHECK_THROWS_AS(support_maximal_representative(m, 0, bad), PreconditionError);
}

TEST_CASE("null projection") {
    const auto m = example3_market(10, 2);
    const auto d = special_decomposition(m, m.claim("xi0"));
    const auto np = null_projection(m, 0, d.legs);
    CHECK(np.vector_space);
    for (std::size_t i = 0; i < np.per_node.size(); ++i) {
        if (np.per_node[i].empty() && np.complement[i].empty()) continue;
        CHECK(np.per_node[i].size() + np.complement[i].size() == 2);
    }
    // The line through e_2 - e_1 in K_0 - R+ xi_0 cannot be undone at time 1.
    CHECK(np.trivial);
    CHECK(np.global.trivial());
}

TEST_CASE("truncated claims") {
    const auto base = example3_market(10, 2);
    const auto r = randomize_market(base, 3, 1);
    const auto d = special_decomposition(base, base.claim("theta"));
    const auto legs = r.lift(d.legs);
    const auto t = truncate_claim(r.market, legs, r.g);
    CHECK(t.disagreement <= t.disagreement_bound);
    CHECK(t.disagreement_bound == oracle::tail_weight(1, 3));
    CHECK(member(LiftedCone::attainable(r.market), t.claim.flat()).member);
    const auto full = truncate_claim(r.market, legs, TruncationSets::full(r.market.tree()));
    CHECK(full.disagreement == 0);
    CHECK(full.claim == r.lift(base, base.claim("theta")));
}

TEST_CASE("G-condition") {
    const auto base = example3_market(10, 2);
    const auto d = special_decomposition(base, base.claim("xi0"));
    const auto r = randomize_market(base, 3, 1);
    const auto legs = r.lift(d.legs);
    const auto g = check_G_condition(r.market, legs, r.g, GVariant::Null2);
    CHECK(g.holds);
    // With G everything the complement is empty and every y passes the premise.
    const auto all = check_G_condition(r.market, legs, TruncationSets::full(r.market.tree()), GVariant::Null2);
    CHECK(!all.holds);
    CHECK(all.time == 1);
    CHECK(!is_zero(all.counterexample));
}

TEST_CASE("density sequence for a maximal claim") {
    const auto m = example3_market(10, 2);
    const auto rep = density_sequence(m, m.claim("xi0"), 3, {1, 2, 3});
    CHECK(!rep.lineality_track);
    REQUIRE(rep.terms.size() == 3);
    for (const auto& t : rep.terms) {
        CHECK(t.certified);
        CHECK(t.disagreement <= t.disagreement_bound);
        CHECK(t.disagreement_bound == oracle::tail_weight(t.n, 3));
        if (t.n < 3) CHECK(t.g_condition.holds);
        REQUIRE(t.certificate);
    }
    CHECK_THROWS_AS(density_sequence(m, m.claim("theta"), 3, {1}), PreconditionError);
}
