#include "tcmax/example3.hpp"

#include "tcmax/errors.hpp"
#include "tcmax/lp.hpp"

namespace tcmax {

namespace {

unsigned omega_of_leaf(const FiltrationTree& tree, std::size_t leaf) { return static_cast<unsigned>(tree.leaf_node(leaf)); }

} // namespace

Market example3_market(const Rational& k, unsigned N) {
    if (N < 1) throw ValidationError("N must be at least 1");
    if (k < 1) throw ValidationError("k must be at least 1");
    const Rational norm = 1 - pow2_neg(N);
    std::vector<NodeSpec> specs;
    specs.push_back({0, 0, std::nullopt, Rational(1)});
    for (unsigned w = 1; w <= N; ++w) specs.push_back({w, 1, std::size_t{0}, pow2_neg(w) / norm});
    auto tree = FiltrationTree::build(std::move(specs));

    const BidAskMatrix pi0{{Rational(1), Rational(1)}, {k, Rational(1)}};
    const BidAskMatrix pi1{{Rational(1), k}, {Rational(2), Rational(1)}};
    std::vector<NodeConeSpec> cones{pi0};
    for (unsigned w = 1; w <= N; ++w) cones.emplace_back(pi1);

    Claim theta(2, N);
    for (std::size_t l = 0; l < N; ++l) {
        const Rational w(omega_of_leaf(tree, l));
        theta.set_leaf(l, Vector{-(1 - 1 / (2 * w)), 1 - 1 / w});
    }
    const Vector xi0{Rational(-1), Rational(1)};
    std::map<std::string, Claim> claims{{"theta", theta}, {"xi0", Claim::constant(N, xi0)}};
    return Market::build(2, std::move(tree), std::move(cones), std::move(claims));
}

NodeVectors example3_strategy(const Market& m) {
    NodeVectors legs;
    legs.per_node.assign(m.tree().node_count(), Vector(2, Rational(0)));
    legs.per_node[m.tree().root()] = Vector{Rational(-1), Rational(1)};
    for (auto n : m.tree().nodes_at(1)) {
        const Rational b = Rational(1) / (2 * Rational(n));
        legs.per_node[n] = Vector{b, -2 * b};
    }
    return legs;
}

Claim example3_x(const Market& m, unsigned n) {
    Claim x(2, m.leaf_count());
    for (std::size_t l = 0; l < m.leaf_count(); ++l) {
        if (omega_of_leaf(m.tree(), l) <= n) x.set_leaf(l, Vector{Rational(-1, 2), Rational(1)});
    }
    return x;
}

NodeVectors example3_improvement_strategy(const Market& m) {
    const auto& leaves = m.tree().nodes_at(1);
    const Rational big_n(leaves.size());
    const Rational a = 1 - 1 / (2 * big_n);
    NodeVectors legs;
    legs.per_node.assign(m.tree().node_count(), Vector(2, Rational(0)));
    legs.per_node[m.tree().root()] = Vector{-a, a};
    for (auto n : leaves) {
        const Rational b = Rational(1) / (2 * Rational(n)) - 1 / (2 * big_n);
        legs.per_node[n] = Vector{b, -2 * b};
    }
    return legs;
}

std::optional<TimeOneCoefficients> example3_solve_coefficients(const Rational& k, const Rational& a0, const Rational& b0) {
    const Vector theta0{Rational(-1), Rational(1)};
    const Vector xi0 = added(scaled(Vector{Rational(-1), Rational(1)}, a0), scaled(Vector{Rational(1), -k}, b0));
    const Matrix columns{Vector{Rational(1), Rational(-2)}, Vector{-k, Rational(1)}};
    auto sol = solve_combination(columns, subtracted(theta0, xi0));
    if (!sol) return std::nullopt;
    return TimeOneCoefficients{(*sol)[0], (*sol)[1]};
}

TimeOneCoefficients example3_coefficient_formulas(const Rational& k, const Rational& a0, const Rational& b0) {
    return {(k - 1) * (-1 + a0 - (k + 1) * b0) / (2 * k - 1), (1 - a0 + (2 - k) * b0) / (2 * k - 1)};
}

std::optional<std::pair<Rational, Rational>> example3_forced_time_zero(const Rational& k) {
    // Variables a0, b0 >= 0; a1 >= 0 and b1 >= 0 are linear in them.
    auto solve = [&](std::size_t var, Sense sense) {
        LinearProgram lp;
        lp.add_variable(Bound::nonnegative());
        lp.add_variable(Bound::nonnegative());
        // (2k-1) b1 = 1 - a0 + (2-k) b0 >= 0
        lp.add_constraint(Vector{Rational(-1), 2 - k}, Relation::GreaterEqual, Rational(-1));
        // (2k-1) a1 / (k-1) = -1 + a0 - (k+1) b0 >= 0
        lp.add_constraint(Vector{Rational(1), -(k + 1)}, Relation::GreaterEqual, Rational(1));
        Vector c(2, Rational(0));
        c[var] = 1;
        lp.set_objective(c, sense);
        return lp_solve(lp);
    };
    Vector lo(2);
    for (std::size_t v = 0; v < 2; ++v) {
        const auto mx = solve(v, Sense::Maximize);
        const auto mn = solve(v, Sense::Minimize);
        if (mx.status != LpStatus::Optimal || mn.status != LpStatus::Optimal) return std::nullopt;
        if (mx.value != mn.value) return std::nullopt;
        lo[v] = mn.value;
    }
    return std::make_pair(lo[0], lo[1]);
}

} // namespace tcmax
