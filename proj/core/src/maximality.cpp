#include "tcmax/maximality.hpp"

#include "cone_lp.hpp"
#include "tcmax/errors.hpp"

namespace tcmax {

using detail::combine;
using detail::RowBuilder;

namespace {

// Decides D cap C subset lin(C) for D = cone(d_gens): one LP over
// D mu - C nu = 0 with sum nu_j (z . c_j) in [-1, 0), z a relative-interior
// point of the polar of C (so z . y < 0 exactly off the lineality of C).
EfficiencyResult cone_efficiency(const Matrix& d_gens, const LiftedCone& c) {
    const std::size_t dim = c.dim();
    const auto rel = relint_polar_point(c);
    LinearProgram lp(d_gens.size() + c.size());
    RowBuilder rows(dim);
    rows.add_generators(d_gens, 0, 1);
    rows.add_generators(c.generators(), d_gens.size(), -1);
    rows.emit(lp);

    Vector obj(lp.variables(), Rational(0));
    for (std::size_t j = 0; j < c.size(); ++j) obj[d_gens.size() + j] = dot(rel.z, c.generators()[j]);
    lp.add_constraint(obj, Relation::GreaterEqual, Rational(-1));
    lp.set_objective(obj, Sense::Minimize);
    const auto res = lp_solve(lp);
    if (res.status != LpStatus::Optimal) throw InternalError("efficiency LP: " + to_string(res.status));

    EfficiencyResult out;
    out.efficient = res.value >= 0;
    if (!out.efficient) out.witness = combine(c.generators(), res.point, d_gens.size(), dim);
    return out;
}

} // namespace

EfficiencyResult is_efficient(const LiftedCone& a, std::span<const Rational> theta, const LiftedCone& c, bool proper,
                              const FiltrationTree* tree, unsigned t, std::size_t assets) {
    if (a.dim() != c.dim() || theta.size() != a.dim()) throw std::invalid_argument("is_efficient: dimension mismatch");
    if (!member(a, theta).member) throw PreconditionError("theta is not in A");
    LiftedCone displaced;
    if (proper) {
        if (!tree) throw std::invalid_argument("proper efficiency needs the filtration");
        displaced = displaced_cone(a, theta, Displacement::Measurable, *tree, t, assets);
    } else {
        displaced = a;
        if (!is_zero(theta)) displaced.add(negated(theta), {GeneratorTag::Kind::Added, 0, 0, 0, "-theta"});
    }
    return cone_efficiency(displaced.generators(), c);
}

EfficiencyResult is_efficient_in_section(const LiftedCone& k, const LiftedCone& b_cone, std::span<const Rational> b,
                                         std::span<const Rational> theta, const LiftedCone& c) {
    const std::size_t dim = c.dim();
    if (k.dim() != dim || b_cone.dim() != dim || b.size() != dim || theta.size() != dim) {
        throw std::invalid_argument("is_efficient_in_section: dimension mismatch");
    }
    if (!member(k, theta).member || !member(b_cone, subtracted(b, theta)).member) {
        throw PreconditionError("theta is not in K intersected with b - B");
    }
    // Homogenized: u = K alpha, s b - u = B beta, u - s theta = C nu, s >= 0.
    const std::size_t na = k.size(), nb = b_cone.size(), nc = c.size();
    const std::size_t s = na + nb;
    LinearProgram lp(na + nb + 1 + nc);
    {
        RowBuilder rows(dim);
        rows.add_generators(k.generators(), 0, 1);
        rows.add_generators(b_cone.generators(), na, 1);
        rows.add_column(b, s, -1);
        rows.emit(lp);
    }
    {
        RowBuilder rows(dim);
        rows.add_generators(k.generators(), 0, 1);
        rows.add_column(theta, s, -1);
        rows.add_generators(c.generators(), s + 1, -1);
        rows.emit(lp);
    }
    const auto rel = relint_polar_point(c);
    Vector obj(lp.variables(), Rational(0));
    for (std::size_t j = 0; j < nc; ++j) obj[s + 1 + j] = dot(rel.z, c.generators()[j]);
    lp.add_constraint(obj, Relation::GreaterEqual, Rational(-1));
    lp.set_objective(obj, Sense::Minimize);
    const auto res = lp_solve(lp);
    if (res.status != LpStatus::Optimal) throw InternalError("section efficiency LP: " + to_string(res.status));
    EfficiencyResult out;
    out.efficient = res.value >= 0;
    if (!out.efficient) out.witness = combine(c.generators(), res.point, s + 1, dim);
    return out;
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::NotInA: return "not-in-A";
    case Verdict::NotMaximal: return "not-maximal";
    case Verdict::Maximal: return "maximal";
    case Verdict::ProperlyMaximal: return "properly-maximal";
    }
    return "?";
}

Verdict MaximalityReport::verdict() const {
    if (!in_a) return Verdict::NotInA;
    if (!maximal) return Verdict::NotMaximal;
    if (proper_checked && properly_maximal) return Verdict::ProperlyMaximal;
    return Verdict::Maximal;
}

MaximalityReport is_maximal(const Market& m, const Claim& x, bool check_proper) {
    if (x.assets() != m.assets() || x.leaves() != m.leaf_count()) throw std::invalid_argument("claim shape does not match market");
    const auto base = find_consistent_process(m);
    if (!base.found) throw PreconditionError("market admits arbitrage; maximality is undefined");

    const auto a = LiftedCone::attainable(m);
    const std::size_t dim = a.dim(), d = m.assets();
    MaximalityReport out;
    out.membership = member(a, x.flat());
    out.in_a = out.membership.member;
    if (!out.in_a) return out;

    // max sum_leaf P(leaf) sum_i delta_i  s.t.  A mu - delta = X, delta >= 0.
    LinearProgram lp(a.size() + dim);
    RowBuilder rows(dim);
    rows.add_generators(a.generators(), 0, 1);
    for (std::size_t r = 0; r < dim; ++r) rows.add_term(r, a.size() + r, Rational(-1));
    rows.set_rhs(x.flat());
    rows.emit(lp);
    Vector obj(lp.variables(), Rational(0));
    for (std::size_t r = 0; r < dim; ++r) obj[a.size() + r] = m.tree().node(m.tree().leaf_node(r / d)).probability;
    lp.set_objective(obj, Sense::Maximize);
    const auto res = lp_solve(lp);
    if (res.status == LpStatus::Unbounded) throw InternalError("improvement LP unbounded on an arbitrage-free market");
    if (res.status != LpStatus::Optimal) throw InternalError("improvement LP: " + to_string(res.status));

    out.improvement_value = res.value;
    out.maximal = res.value.is_zero();
    if (!out.maximal) {
        out.improvement = Claim(d, Vector(res.point.begin() + static_cast<std::ptrdiff_t>(a.size()), res.point.end()));
        return out;
    }
    if (check_proper) {
        out.proper_checked = true;
        auto cr = find_consistent_process(m, false, &x);
        out.properly_maximal = cr.found;
        if (cr.found) out.certificate = std::move(cr.process);
        else out.farkas = std::move(cr.farkas);
    }
    return out;
}

UniformImprovement max_uniform_improvement(const Market& m, const Claim& x, std::span<const Rational> direction) {
    if (direction.size() != m.assets()) throw std::invalid_argument("direction must have one entry per asset");
    const auto a = LiftedCone::attainable(m);
    const std::size_t dim = a.dim();
    if (!member(a, x.flat()).member) throw PreconditionError("claim is not in A");
    const Vector v = repeat_on_leaves(direction, m.leaf_count());

    // max eps  s.t.  A mu - eps v = X, eps >= 0.
    LinearProgram lp(a.size() + 1);
    const std::size_t eps = a.size();
    RowBuilder rows(dim);
    rows.add_generators(a.generators(), 0, 1);
    rows.add_column(v, eps, -1);
    rows.set_rhs(x.flat());
    rows.emit(lp);
    Vector obj(lp.variables(), Rational(0));
    obj[eps] = 1;
    lp.set_objective(obj, Sense::Maximize);
    const auto res = lp_solve(lp);
    if (res.status == LpStatus::Unbounded) throw PreconditionError("uniform improvement along the direction is unbounded");
    if (res.status != LpStatus::Optimal) throw InternalError("uniform improvement LP: " + to_string(res.status));
    return {res.value, Vector(res.point.begin(), res.point.begin() + static_cast<std::ptrdiff_t>(a.size()))};
}

} // namespace tcmax
