#include "tcmax/maximality.hpp"

#include "cone_lp.hpp"
#include "tcmax/errors.hpp"

#include <algorithm>

namespace tcmax {

using detail::combine;

TruncatedClaim truncate_claim(const Market& m, const NodeVectors& legs, const TruncationSets& g) {
    const auto& tree = m.tree();
    const std::size_t d = m.assets();
    g.check_adapted(tree);
    if (legs.per_node.size() != tree.node_count()) throw ValidationError("decomposition must have one leg per node");

    TruncatedClaim out;
    out.legs.per_node.assign(tree.node_count(), Vector(d, Rational(0)));
    for (unsigned t = 0; t <= m.horizon(); ++t) {
        const auto h = g.h_leaves(tree, t);
        for (auto node : tree.nodes_at(t)) {
            if (h[tree.node(node).leaf_begin]) out.legs.per_node[node] = legs.per_node[node];
        }
    }
    out.claim = terminal_claim(tree, d, out.legs);
    const Claim full = terminal_claim(tree, d, legs);
    out.disagreement = 0;
    for (std::size_t l = 0; l < tree.leaf_count(); ++l) {
        if (!std::equal(full.leaf(l).begin(), full.leaf(l).end(), out.claim.leaf(l).begin())) {
            out.disagreement += tree.node(tree.leaf_node(l)).probability;
        }
    }
    out.disagreement_bound = 0;
    for (unsigned t = 1; t <= m.horizon(); ++t) {
        Rational in_g = 0;
        for (auto node : g.events[t]) in_g += tree.node(node).probability;
        out.disagreement_bound += 1 - in_g;
    }
    return out;
}

GConditionResult check_G_condition(const Market& m, const NodeVectors& legs, const TruncationSets& g, GVariant variant,
                                   const std::vector<EquivalenceData>* classes,
                                   const std::vector<NullProjection>* projections) {
    const auto& tree = m.tree();
    const std::size_t d = m.assets();
    const unsigned T = m.horizon();
    g.check_adapted(tree);
    if (variant == GVariant::Null9 && (!classes || !projections)) {
        throw std::invalid_argument("the lineality variant needs class and projection data");
    }

    for (unsigned t = 1; t <= T; ++t) {
        std::vector<bool> in_g(tree.node_count(), false);
        for (auto node : g.events[t]) in_g[node] = true;

        for (auto nu : tree.nodes_at(t - 1)) {
            // D(nu) in R^d
            Matrix dg = m.cones().generators(nu);
            const Matrix* perp = nullptr;
            if (variant == GVariant::Null2) {
                const Vector& th = legs.per_node.at(nu);
                if (!is_zero(th)) dg.push_back(negated(th));
            } else {
                const auto& eq = classes->at(t - 1);
                auto it = std::find_if(eq.nodes.begin(), eq.nodes.end(), [&](const NodeClass& c) { return c.node == nu; });
                if (it == eq.nodes.end()) throw std::invalid_argument("class data lacks node " + std::to_string(nu));
                for (const auto& s : it->sigma) dg.push_back(negated(s));
                perp = &projections->at(t - 1).per_node.at(nu);
            }

            const auto local = subtree_attainable(tree, m.cones(), nu, t, T);
            const auto [lo, hi] = tree.leaf_range(nu);
            const std::size_t nd = dg.size();

            // y = D mu; A beta + 1_{G^c} y = 0 on every leaf below nu.
            LinearProgram base(nd + local.size());
            for (std::size_t l = lo; l < hi; ++l) {
                const bool masked = !in_g[tree.atom_of_leaf(l, t)];
                for (std::size_t i = 0; i < d; ++i) {
                    const std::size_t r = (l - lo) * d + i;
                    std::vector<std::pair<std::size_t, Rational>> terms;
                    if (masked)
                        for (std::size_t j = 0; j < nd; ++j)
                            if (!dg[j][i].is_zero()) terms.emplace_back(j, dg[j][i]);
                    for (std::size_t j = 0; j < local.size(); ++j)
                        if (!local.generators()[j][r].is_zero()) terms.emplace_back(nd + j, local.generators()[j][r]);
                    if (!terms.empty()) base.add_sparse(terms, Relation::Equal, Rational(0));
                }
            }
            if (perp) {
                for (const auto& n : *perp) {
                    Vector row(base.variables(), Rational(0));
                    for (std::size_t j = 0; j < nd; ++j) row[j] = dot(n, dg[j]);
                    base.add_constraint(std::move(row), Relation::Equal, Rational(0));
                }
            }
            for (std::size_t i = 0; i < d; ++i) {
                for (int sign : {1, -1}) {
                    LinearProgram lp = base;
                    Vector obj(lp.variables(), Rational(0));
                    for (std::size_t j = 0; j < nd; ++j) obj[j] = sign > 0 ? dg[j][i] : Rational(-dg[j][i]);
                    lp.add_constraint(obj, Relation::LessEqual, Rational(1));
                    lp.set_objective(obj, Sense::Maximize);
                    const auto res = lp_solve(lp);
                    if (res.status != LpStatus::Optimal) throw InternalError("G-condition LP: " + to_string(res.status));
                    if (res.value > 0) return {false, t, nu, combine(dg, res.point, 0, d)};
                }
            }
        }
    }
    return {};
}

DensityReport density_sequence(const Market& m, const Claim& theta, unsigned M, const std::vector<unsigned>& n_list,
                               std::size_t node_budget) {
    const auto rep = is_maximal(m, theta, false);
    if (!rep.in_a) throw PreconditionError("theta is not in A");
    if (!rep.maximal) throw PreconditionError("theta is not maximal");

    DensityReport out;
    out.lineality_track = !lineality(LiftedCone::attainable(m)).trivial();
    out.decomposition = special_decomposition(m, theta, out.lineality_track);
    if (!out.decomposition.valid) throw InternalError("special decomposition failed its own checks");
    const unsigned T = m.horizon();

    for (unsigned n : n_list) {
        const auto r = randomize_market(m, M, n, node_budget);
        const NodeVectors legs = r.lift(out.decomposition.legs);
        auto tc = truncate_claim(r.market, legs, r.g);

        DensityTerm term;
        term.n = n;
        term.product_nodes = r.market.tree().node_count();
        if (n < M) {
            term.g_condition_checked = true;
            if (out.lineality_track) {
                std::vector<EquivalenceData> classes;
                std::vector<NullProjection> projections;
                for (unsigned t = 0; t < T; ++t) {
                    classes.push_back(support_maximal_representative(r.market, t, legs));
                    projections.push_back(null_projection(r.market, t, legs, &classes.back()));
                }
                term.g_condition = check_G_condition(r.market, legs, r.g, GVariant::Null9, &classes, &projections);
            } else {
                term.g_condition = check_G_condition(r.market, legs, r.g, GVariant::Null2);
            }
            if (!term.g_condition.holds) {
                throw ValidationError("G-condition fails for n=" + std::to_string(n) + " at t=" + std::to_string(term.g_condition.time) +
                                      ", node " + std::to_string(term.g_condition.node) + ": y = " + to_string(term.g_condition.counterexample));
            }
        }
        auto cr = find_consistent_process(r.market, false, &tc.claim);
        term.certified = cr.found;
        if (cr.found) term.certificate = std::move(cr.process);
        term.claim = std::move(tc.claim);
        term.legs = std::move(tc.legs);
        term.disagreement = tc.disagreement;
        term.disagreement_bound = tc.disagreement_bound;
        out.terms.push_back(std::move(term));
    }
    return out;
}

} // namespace tcmax
