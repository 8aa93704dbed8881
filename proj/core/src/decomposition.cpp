#include "tcmax/maximality.hpp"

#include "cone_lp.hpp"
#include "tcmax/errors.hpp"

#include <algorithm>

namespace tcmax {

using detail::combine;
using detail::RowBuilder;

namespace {

Vector first_leaf_block(std::span<const Rational> v, const FiltrationTree& tree, std::size_t node, std::size_t d) {
    const auto lo = tree.node(node).leaf_begin;
    return Vector(v.begin() + static_cast<std::ptrdiff_t>(lo * d), v.begin() + static_cast<std::ptrdiff_t>((lo + 1) * d));
}

Vector lift_time_legs(const FiltrationTree& tree, std::size_t d, const NodeVectors& legs, unsigned t) {
    Vector out(d * tree.leaf_count(), Rational(0));
    for (auto node : tree.nodes_at(t)) {
        const auto [lo, hi] = tree.leaf_range(node);
        for (auto l = lo; l < hi; ++l)
            for (std::size_t i = 0; i < d; ++i) out[l * d + i] = legs.per_node.at(node)[i];
    }
    return out;
}

LiftedCone stage_cone(const Market& m, unsigned from, unsigned to) {
    if (from > m.horizon()) return LiftedCone(m.claim_dimension());
    return LiftedCone::attainable(m.tree(), m.cones(), from, to);
}

bool in_lineality(const LiftedCone& a, std::span<const Rational> c) { return member(a, negated(c)).member; }

ScalarizationFunctional scalarization(const LiftedCone& kt, const LiftedCone& at1, unsigned t, std::size_t budget) {
    const std::size_t dim = at1.dim();
    ScalarizationFunctional f;
    f.time = t;
    f.lambda.assign(dim, Rational(0));
    Matrix c_gens;
    if (dim <= budget) {
        const Matrix s = span_basis(kt.generators(), dim);
        const Matrix eq = orthogonal_complement(s, dim);
        c_gens = intersect_with_subspace(at1.generators(), eq, dim).all();
        const auto pol = polar_generators(c_gens, dim);
        for (const auto& r : pol.rays) axpy(1 / norm1(r), r, f.lambda);
        f.source = "polar generators";
        f.polar_generators = pol.rays.size();
    } else {
        f.lambda = relint_polar_point(at1).z;
        c_gens = at1.generators();
        f.source = "relative interior";
    }
    f.scal_holds = true;
    f.scal2_holds = true;
    for (const auto& c : c_gens) {
        const Rational v = dot(f.lambda, c);
        if (v > 0) f.scal_holds = false;
        if (v.is_zero() && !in_lineality(at1, c)) f.scal2_holds = false;
    }
    return f;
}

// Sigma(node) = K(node) intersected with R+ theta + L, computed in coefficient
// space alpha >= 0 with Pi alpha in W.
struct WRep {
    Matrix ineq;
    Matrix eq;
};

WRep w_representation(std::span<const Rational> theta, const Matrix& l_basis, std::size_t d) {
    Matrix w_gens;
    if (!is_zero(theta)) w_gens.emplace_back(theta.begin(), theta.end());
    for (const auto& b : l_basis) {
        w_gens.push_back(b);
        w_gens.push_back(negated(b));
    }
    const auto pol = polar_generators(w_gens, d);
    return {pol.rays, pol.lineality};
}

Vector pull_back(const Vector& row, const std::vector<Vector>& pi) {
    Vector out(pi.size());
    for (std::size_t k = 0; k < pi.size(); ++k) out[k] = dot(row, pi[k]);
    return out;
}

} // namespace

std::vector<StageCheck> verify_special_decomposition(const Market& m, const Claim& theta, const NodeVectors& legs) {
    const auto& tree = m.tree();
    const std::size_t d = m.assets();
    if (legs.per_node.size() != tree.node_count()) throw ValidationError("decomposition must have one leg per node");
    for (std::size_t node = 0; node < tree.node_count(); ++node) {
        if (legs.per_node[node].size() != d) throw ValidationError("leg at node " + std::to_string(node) + " has wrong dimension");
        if (!in_node_cone(m.cones().generators(node), legs.per_node[node])) {
            throw ValidationError("leg xi_" + std::to_string(tree.node(node).time) + " at node " + std::to_string(node) +
                                  " is not in its trading cone");
        }
    }
    if (!(terminal_claim(tree, d, legs) == theta)) throw ValidationError("decomposition legs do not sum to the claim");

    std::vector<StageCheck> out;
    for (unsigned t = 0; t < m.horizon(); ++t) {
        const auto kt = stage_cone(m, t, t);
        const auto at1 = stage_cone(m, t + 1, m.horizon());
        const Vector x = lift_time_legs(tree, d, legs, t);
        const auto w = relint_polar_point(at1).z;
        // z = A_{t+1,T} beta, x - z = K_t alpha; max -w.z (bounded by 1).
        LinearProgram lp(at1.size() + kt.size());
        RowBuilder rows(at1.dim());
        rows.add_generators(at1.generators(), 0, 1);
        rows.add_generators(kt.generators(), at1.size(), 1);
        rows.set_rhs(x);
        rows.emit(lp);
        Vector obj(lp.variables(), Rational(0));
        for (std::size_t j = 0; j < at1.size(); ++j) obj[j] = -dot(w, at1.generators()[j]);
        lp.add_constraint(obj, Relation::LessEqual, Rational(1));
        lp.set_objective(obj, Sense::Maximize);
        const auto res = lp_solve(lp);
        if (res.status != LpStatus::Optimal) throw InternalError("stage check LP at t=" + std::to_string(t) + ": " + to_string(res.status));
        StageCheck c;
        c.time = t;
        c.holds = res.value.is_zero();
        if (!c.holds) c.counterexample = combine(at1.generators(), res.point, 0, at1.dim());
        out.push_back(std::move(c));
    }
    return out;
}

DecompositionResult special_decomposition(const Market& m, const Claim& theta, bool support_maximal, std::size_t dd_budget) {
    const auto& tree = m.tree();
    const std::size_t d = m.assets();
    const unsigned T = m.horizon();
    if (!member(LiftedCone::attainable(m), theta.flat()).member) throw PreconditionError("theta is not in A");

    DecompositionResult out;
    out.legs.per_node.assign(tree.node_count(), Vector(d, Rational(0)));
    Vector r = theta.flat();
    for (unsigned t = 0; t < T; ++t) {
        const auto kt = stage_cone(m, t, t);
        const auto at1 = stage_cone(m, t + 1, T);
        auto f = scalarization(kt, at1, t, dd_budget);

        LinearProgram lp(kt.size() + at1.size());
        RowBuilder rows(kt.dim());
        rows.add_generators(kt.generators(), 0, 1);
        rows.add_generators(at1.generators(), kt.size(), 1);
        rows.set_rhs(r);
        rows.emit(lp);
        Vector obj(lp.variables(), Rational(0));
        for (std::size_t j = 0; j < kt.size(); ++j) obj[j] = dot(f.lambda, kt.generators()[j]);
        lp.set_objective(obj, Sense::Maximize);
        const auto res = lp_solve(lp);
        if (res.status == LpStatus::Unbounded) {
            throw PreconditionError("scalarized stage t=" + std::to_string(t) +
                                    " is unbounded: the null strategies are not a vector space");
        }
        if (res.status != LpStatus::Optimal) throw InternalError("stage LP at t=" + std::to_string(t) + ": " + to_string(res.status));

        const Vector xi = combine(kt.generators(), res.point, 0, kt.dim());
        for (auto node : tree.nodes_at(t)) out.legs.per_node[node] = first_leaf_block(xi, tree, node, d);
        if (support_maximal) {
            const auto eq = support_maximal_representative(m, t, out.legs);
            for (auto node : tree.nodes_at(t)) out.legs.per_node[node] = eq.representative.per_node[node];
        }
        r = subtracted(r, lift_time_legs(tree, d, out.legs, t));
        out.functionals.push_back(std::move(f));
    }
    for (auto node : tree.nodes_at(T)) out.legs.per_node[node] = first_leaf_block(r, tree, node, d);

    out.checks = verify_special_decomposition(m, theta, out.legs);
    out.valid = std::all_of(out.checks.begin(), out.checks.end(), [](const StageCheck& c) { return c.holds; }) &&
                std::all_of(out.functionals.begin(), out.functionals.end(),
                            [](const ScalarizationFunctional& f) { return f.scal_holds && f.scal2_holds; });
    return out;
}

EquivalenceData support_maximal_representative(const Market& m, unsigned t, const NodeVectors& theta_t) {
    const auto& tree = m.tree();
    const std::size_t d = m.assets();
    const unsigned T = m.horizon();
    if (t > T) throw std::invalid_argument("time beyond horizon");

    EquivalenceData out;
    out.time = t;
    {
        const auto at1 = stage_cone(m, t + 1, T);
        out.lineality = at1.size() == 0 ? Subspace{at1.dim(), {}} : lineality(at1);
    }
    out.representative.per_node.assign(tree.node_count(), Vector(d, Rational(0)));

    LiftedCone lhs = stage_cone(m, t, t);
    Vector xi_claim(m.claim_dimension(), Rational(0));
    for (auto node : tree.nodes_at(t)) {
        const auto& pi = m.cones().generators(node);
        const Vector& th = theta_t.per_node.at(node);
        const auto th_member = member(LiftedCone::from_generators(d, pi), th);
        if (!th_member.member) {
            throw PreconditionError("theta_" + std::to_string(t) + " at node " + std::to_string(node) + " is not in K_t");
        }
        NodeClass nc;
        nc.node = node;

        // L = { v : v repeated on the node's leaves is in lin(A_{t+1,T}) }.
        if (t < T) {
            const auto local = subtree_attainable(tree, m.cones(), node, t + 1, T);
            const Matrix b = lineality(local).basis;
            if (!b.empty()) {
                const std::size_t rows_n = local.dim();
                Matrix sys(rows_n, Vector(d + b.size(), Rational(0)));
                for (std::size_t r = 0; r < rows_n; ++r) {
                    sys[r][r % d] = 1;
                    for (std::size_t j = 0; j < b.size(); ++j) sys[r][d + j] = -b[j][r];
                }
                Matrix proj;
                for (const auto& v : nullspace(sys, d + b.size())) proj.emplace_back(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(d));
                nc.lineality = span_basis(proj, d);
            }
        }

        // Sigma in coefficient space.
        const auto w = w_representation(th, nc.lineality, d);
        const std::size_t mgen = pi.size();
        Matrix a_ineq, a_eq;
        for (std::size_t k = 0; k < mgen; ++k) a_ineq.push_back(negated(unit_vector(mgen, k)));
        for (const auto& row : w.ineq) a_ineq.push_back(pull_back(row, pi));
        for (const auto& row : w.eq) a_eq.push_back(pull_back(row, pi));
        const auto alpha_cone = double_description(a_ineq, a_eq, mgen);
        for (const auto& g : alpha_cone.all()) {
            Vector x = combine(pi, g, 0, d);
            if (is_zero(x)) continue;
            x = primitive(x);
            if (std::find(nc.sigma.begin(), nc.sigma.end(), x) == nc.sigma.end()) nc.sigma.push_back(std::move(x));
        }

        // Support maximization over Phi = { alpha in [0,1]^m : Pi alpha in W }.
        std::vector<Vector> witnesses;
        std::vector<bool> covered(mgen, false);
        auto cover = [&](const Vector& a) {
            for (std::size_t k = 0; k < mgen; ++k)
                if (a[k] > 0) covered[k] = true;
            witnesses.push_back(a);
        };
        if (!is_zero(th)) {
            Vector a = th_member.coefficients;
            const Rational top = *std::max_element(a.begin(), a.end());
            if (top > 1) a = scaled(a, 1 / top);
            cover(a);
        }
        for (std::size_t i = 0; i < mgen; ++i) {
            if (covered[i]) continue;
            LinearProgram lp;
            for (std::size_t k = 0; k < mgen; ++k) lp.add_variable(Bound::between(Rational(0), Rational(1)));
            for (const auto& row : w.ineq) lp.add_constraint(pull_back(row, pi), Relation::LessEqual, Rational(0));
            for (const auto& row : w.eq) lp.add_constraint(pull_back(row, pi), Relation::Equal, Rational(0));
            lp.set_objective(unit_vector(mgen, i), Sense::Maximize);
            const auto res = lp_solve(lp);
            if (res.status != LpStatus::Optimal) throw InternalError("support LP: " + to_string(res.status));
            if (res.value > 0) cover(res.point);
        }
        nc.alpha.assign(mgen, Rational(0));
        for (std::size_t k = 0; k < witnesses.size(); ++k) axpy(pow2_neg(static_cast<unsigned>(k + 1)), witnesses[k], nc.alpha);
        const Vector x = combine(pi, nc.alpha, 0, d);

        if (in_span(nc.lineality, th)) {
            nc.xi = x;
        } else {
            Matrix cols{th};
            for (const auto& b : nc.lineality) cols.push_back(b);
            const auto sol = solve_combination(cols, x);
            if (!sol || (*sol)[0] <= 0) throw InternalError("support-maximal point is not in R+ theta + L");
            nc.xi = scaled(x, 1 / (*sol)[0]);
        }

        LiftedCone left = LiftedCone::from_generators(d, pi, "pi");
        LiftedCone right = left;
        for (const auto& s : nc.sigma) left.add(negated(s), {GeneratorTag::Kind::Added, t, node, 0, "-sigma"});
        if (!is_zero(nc.xi)) right.add(negated(nc.xi), {GeneratorTag::Kind::Added, t, node, 0, "-xi"});
        nc.spec_holds = cone_equal(left, right);

        for (const auto& s : nc.sigma) lhs.add(negated(lift_to_node(s, tree, node, d)), {GeneratorTag::Kind::Added, t, node, 0, "-sigma"});
        axpy(Rational(1), lift_to_node(nc.xi, tree, node, d), xi_claim);
        out.representative.per_node[node] = nc.xi;
        out.nodes.push_back(std::move(nc));
    }
    const auto rhs = displaced_cone(stage_cone(m, t, t), xi_claim, Displacement::Measurable, tree, t, d);
    out.spec_holds = cone_equal(lhs, rhs) &&
                     std::all_of(out.nodes.begin(), out.nodes.end(), [](const NodeClass& c) { return c.spec_holds; });
    return out;
}

NullProjection null_projection(const Market& m, unsigned t, const NodeVectors& theta_t, const EquivalenceData* classes) {
    const auto& tree = m.tree();
    const std::size_t d = m.assets();
    const unsigned T = m.horizon();
    NullProjection out;
    out.time = t;
    out.per_node.assign(tree.node_count(), {});
    out.complement.assign(tree.node_count(), {});
    Matrix global;
    for (auto node : tree.nodes_at(t)) {
        const auto [lo, hi] = tree.leaf_range(node);
        const std::size_t nl = hi - lo;
        Matrix sigma;
        if (classes) {
            auto it = std::find_if(classes->nodes.begin(), classes->nodes.end(), [&](const NodeClass& c) { return c.node == node; });
            if (it == classes->nodes.end()) throw std::invalid_argument("class data lacks node " + std::to_string(node));
            sigma = it->sigma;
        } else if (!is_zero(theta_t.per_node.at(node))) {
            sigma.push_back(theta_t.per_node.at(node));
        }
        LiftedCone f1(d * nl);
        for (const auto& g : m.cones().generators(node)) f1.add(repeat_on_leaves(g, nl), {GeneratorTag::Kind::Trading, t, node, 0, "k"});
        for (const auto& s : sigma) f1.add(repeat_on_leaves(negated(s), nl), {GeneratorTag::Kind::Added, t, node, 0, "-sigma"});
        const LiftedCone f2 = t < T ? subtree_attainable(tree, m.cones(), node, t + 1, T) : LiftedCone(d * nl);

        const auto ns = null_strategies({f1, f2});
        if (!ns.is_vector_space) {
            out.vector_space = false;
            continue;
        }
        Matrix local;
        if (!ns.components.empty()) {
            for (const auto& v : ns.components[0]) local.emplace_back(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(d));
        }
        out.per_node[node] = span_basis(local, d);
        out.complement[node] = orthogonal_complement(out.per_node[node], d);
        for (const auto& v : out.per_node[node]) global.push_back(lift_to_node(v, tree, node, d));
    }
    out.global = {m.claim_dimension(), span_basis(global, m.claim_dimension())};
    out.trivial = out.global.trivial();
    return out;
}

} // namespace tcmax
