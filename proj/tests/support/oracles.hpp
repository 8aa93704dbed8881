#pragma once

// Independent reference computations. They share only the data types with the
// library; no decision procedure of the library is called from here.

#include "tcmax/market.hpp"

#include <algorithm>
#include <optional>

namespace tcmax::oracle {

/// Extreme rays of the polar of cone(gens) in R^2, by checking the two normals
/// of every generator. Rays are returned primitive and sorted. Returns nullopt
/// if the polar is not pointed (gens lie in a half-line or are empty).
inline std::optional<Matrix> polar_2d(const Matrix& gens) {
    Matrix cand;
    for (const auto& g : gens) {
        cand.push_back({g[1], -g[0]});
        cand.push_back({-g[1], g[0]});
    }
    Matrix rays;
    for (auto c : cand) {
        if (c[0] == 0 && c[1] == 0) continue;
        bool ok = true;
        for (const auto& g : gens) ok = ok && c[0] * g[0] + c[1] * g[1] <= 0;
        if (!ok) continue;
        // Rays on the boundary of the polar are tight at some generator not parallel to the others.
        c = primitive(c);
        if (std::find(rays.begin(), rays.end(), c) == rays.end()) rays.push_back(c);
    }
    if (rays.size() > 2) return std::nullopt;
    std::sort(rays.begin(), rays.end());
    return rays;
}

/// P(G^c) for truncated geometric weights 2^-k / (1 - 2^-M) on k = 1..M.
inline Rational tail_weight(unsigned n, unsigned M) {
    Rational norm = 0, tail = 0;
    for (unsigned k = 1; k <= M; ++k) {
        Rational w = 1;
        for (unsigned i = 0; i < k; ++i) w /= 2;
        norm += w;
        if (k > n) tail += w;
    }
    return tail / norm;
}

/// Claim in the two-asset example: theta(omega) = (-(1 - 1/(2 omega)), 1 - 1/omega).
inline Vector example_theta(unsigned omega) {
    const Rational w(omega);
    return {-(1 - 1 / (2 * w)), 1 - 1 / w};
}

/// Explicit strategy a = 1 - 1/(2N) on e_2 - e_1 at time 0 and
/// B(omega) = 1/(2 omega) - 1/(2N) on e_1 - 2 e_2 at leaf omega; its terminal value.
inline Vector improvement_terminal(unsigned omega, unsigned N) {
    const Rational a = 1 - Rational(1) / (2 * Rational(N));
    const Rational b = Rational(1) / (2 * Rational(omega)) - Rational(1) / (2 * Rational(N));
    return {-a + b, a - 2 * b};
}

/// K lifted at the time-t atoms plus one generator -xi 1_node per time-t node.
inline Matrix per_atom_displacement(const FiltrationTree& tree, std::size_t d, const std::vector<Vector>& node_gens_lifted,
                                    const Vector& xi, unsigned t) {
    Matrix out = node_gens_lifted;
    for (auto node : tree.nodes_at(t)) {
        Vector g(xi.size(), Rational(0));
        const auto& nd = tree.node(node);
        for (std::size_t l = nd.leaf_begin; l < nd.leaf_end; ++l)
            for (std::size_t i = 0; i < d; ++i) g[l * d + i] = -xi[l * d + i];
        out.push_back(std::move(g));
    }
    return out;
}

/// E_Q[Z_T . X | node] by backward recursion with conditional weights q.
inline std::vector<Rational> conditional_expectations(const FiltrationTree& tree, const std::vector<Rational>& q,
                                                      const NodeVectors& z, const Claim& x) {
    std::vector<Rational> v(tree.node_count(), Rational(0));
    for (std::size_t l = 0; l < tree.leaf_count(); ++l) {
        const auto node = tree.leaf_node(l);
        Rational s = 0;
        for (std::size_t i = 0; i < x.assets(); ++i) s += z.per_node[node][i] * x.at(l, i);
        v[node] = s;
    }
    for (unsigned t = tree.horizon(); t-- > 0;) {
        for (auto node : tree.nodes_at(t)) {
            Rational s = 0;
            for (auto c : tree.node(node).children) s += q[c] * v[c];
            v[node] = s;
        }
    }
    return v;
}

} // namespace tcmax::oracle
