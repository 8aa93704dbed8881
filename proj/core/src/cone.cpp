#include "tcmax/cone.hpp"

#include "tcmax/errors.hpp"
#include "tcmax/lp.hpp"

#include <algorithm>

namespace tcmax {

std::string to_string(const GeneratorTag& tag) {
    switch (tag.kind) {
    case GeneratorTag::Kind::Trading:
        return "K" + std::to_string(tag.time) + "[node " + std::to_string(tag.node) + "]#" + std::to_string(tag.index);
    case GeneratorTag::Kind::Added:
        return "added: " + tag.label;
    case GeneratorTag::Kind::Plain:
        return tag.label + "#" + std::to_string(tag.index);
    }
    return "?";
}

LiftedCone LiftedCone::from_generators(std::size_t dim, const Matrix& gens, const std::string& label) {
    LiftedCone c(dim);
    for (std::size_t i = 0; i < gens.size(); ++i) {
        GeneratorTag tag;
        tag.label = label;
        tag.index = i;
        c.add(gens[i], std::move(tag));
    }
    return c;
}

LiftedCone LiftedCone::attainable(const FiltrationTree& tree, const TradingConeField& cones, unsigned from, unsigned to) {
    const std::size_t d = cones.assets();
    LiftedCone c(d * tree.leaf_count());
    for (unsigned t = from; t <= to && t <= tree.horizon(); ++t) {
        for (auto node : tree.nodes_at(t)) {
            const auto& gens = cones.generators(node);
            for (std::size_t i = 0; i < gens.size(); ++i) {
                GeneratorTag tag;
                tag.kind = GeneratorTag::Kind::Trading;
                tag.time = t;
                tag.node = node;
                tag.index = i;
                c.add(lift_to_node(gens[i], tree, node, d), std::move(tag));
            }
        }
    }
    return c;
}

LiftedCone LiftedCone::attainable(const Market& m, unsigned from) {
    return attainable(m.tree(), m.cones(), from, m.horizon());
}

void LiftedCone::add(Vector g, GeneratorTag tag) {
    if (g.size() != dim_) {
        throw std::invalid_argument("generator has dimension " + std::to_string(g.size()) + ", cone has " + std::to_string(dim_));
    }
    gens_.push_back(std::move(g));
    tags_.push_back(std::move(tag));
    polar_.reset();
}

void LiftedCone::append(const LiftedCone& other) {
    for (std::size_t i = 0; i < other.size(); ++i) add(other.gens_[i], other.tags_[i]);
}

namespace {

ConeGenerators checked_polar(const LiftedCone& cone, std::size_t budget) {
    if (cone.dim() > budget) {
        throw BudgetExceeded("polar: ambient dimension " + std::to_string(cone.dim()) + " exceeds double-description budget " +
                             std::to_string(budget));
    }
    auto gens = polar_generators(cone.generators(), cone.dim());
    const Matrix all = gens.all();
    for (const auto& z : all) {
        for (const auto& g : cone.generators()) {
            if (dot(z, g) > 0) throw InternalError("polar generator is positive on a cone generator");
        }
    }
    const auto back = LiftedCone::from_generators(cone.dim(), polar_generators(all, cone.dim()).all(), "bipolar");
    if (!cone_equal(back, cone)) throw InternalError("double polar differs from the cone");
    return gens;
}

} // namespace

void LiftedCone::attach_polar(std::size_t budget) {
    polar_ = std::make_shared<const ConeGenerators>(checked_polar(*this, budget));
}

Vector restrict_to_node(std::span<const Rational> v, const FiltrationTree& tree, std::size_t node, std::size_t assets) {
    const auto [b, e] = tree.leaf_range(node);
    return Vector(v.begin() + static_cast<std::ptrdiff_t>(b * assets), v.begin() + static_cast<std::ptrdiff_t>(e * assets));
}

Vector lift_to_node(std::span<const Rational> v, const FiltrationTree& tree, std::size_t node, std::size_t assets) {
    if (v.size() != assets) throw std::invalid_argument("lift_to_node: dimension mismatch");
    Vector out(assets * tree.leaf_count(), Rational(0));
    const auto [b, e] = tree.leaf_range(node);
    for (std::size_t l = b; l < e; ++l) {
        for (std::size_t i = 0; i < assets; ++i) out[l * assets + i] = v[i];
    }
    return out;
}

LiftedCone subtree_attainable(const FiltrationTree& tree, const TradingConeField& cones, std::size_t node, unsigned from, unsigned to) {
    const std::size_t d = cones.assets();
    const auto [lo, hi] = tree.leaf_range(node);
    const unsigned t0 = tree.node(node).time;
    LiftedCone c(d * (hi - lo));
    for (unsigned t = std::max(from, t0); t <= to && t <= tree.horizon(); ++t) {
        for (auto n : tree.nodes_at(t)) {
            if (tree.ancestor_at(n, t0) != node) continue;
            const auto [b, e] = tree.leaf_range(n);
            const auto& gens = cones.generators(n);
            for (std::size_t i = 0; i < gens.size(); ++i) {
                Vector g(c.dim(), Rational(0));
                for (std::size_t l = b; l < e; ++l) {
                    for (std::size_t k = 0; k < d; ++k) g[(l - lo) * d + k] = gens[i][k];
                }
                GeneratorTag tag;
                tag.kind = GeneratorTag::Kind::Trading;
                tag.time = t;
                tag.node = n;
                tag.index = i;
                c.add(std::move(g), std::move(tag));
            }
        }
    }
    return c;
}

Vector repeat_on_leaves(std::span<const Rational> v, std::size_t leaves) {
    Vector out;
    out.reserve(v.size() * leaves);
    for (std::size_t l = 0; l < leaves; ++l) out.insert(out.end(), v.begin(), v.end());
    return out;
}

Membership member(const LiftedCone& cone, std::span<const Rational> x) {
    const std::size_t dim = cone.dim();
    if (x.size() != dim) throw std::invalid_argument("member: claim dimension does not match cone");
    const auto& gens = cone.generators();
    Membership out;
    if (gens.empty()) {
        out.member = is_zero(x);
        if (!out.member) out.separator.assign(x.begin(), x.end());
        return out;
    }
    // Coordinates where every generator vanishes are decided directly.
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < dim; ++r) {
        bool any = false;
        for (const auto& g : gens) {
            if (!g[r].is_zero()) {
                any = true;
                break;
            }
        }
        if (any) {
            rows.push_back(r);
        } else if (!x[r].is_zero()) {
            out.separator.assign(dim, Rational(0));
            out.separator[r] = x[r] > 0 ? 1 : -1;
            return out;
        }
    }
    LinearProgram lp(gens.size());
    for (auto r : rows) {
        Vector row(gens.size());
        for (std::size_t i = 0; i < gens.size(); ++i) row[i] = gens[i][r];
        lp.add_constraint(std::move(row), Relation::Equal, x[r]);
    }
    if (rows.empty()) {
        out.member = true;
        out.coefficients.assign(gens.size(), Rational(0));
        return out;
    }
    const auto res = lp_solve(lp);
    if (res.feasible()) {
        out.member = true;
        out.coefficients = res.point;
        return out;
    }
    out.separator.assign(dim, Rational(0));
    for (std::size_t k = 0; k < rows.size(); ++k) out.separator[rows[k]] = res.dual->rows[k];
    return out;
}

LiftedCone polar(const LiftedCone& cone, std::size_t budget) {
    if (const auto* cached = cone.cached_polar()) return LiftedCone::from_generators(cone.dim(), cached->all(), "polar");
    return LiftedCone::from_generators(cone.dim(), checked_polar(cone, budget).all(), "polar");
}

namespace {

// Generators lying in a nonnegative relation sum lambda_i g_i = 0 with lambda_i > 0.
std::vector<bool> lineality_support(const Matrix& gens, std::size_t dim, Vector* lambda_out = nullptr) {
    const std::size_t n = gens.size();
    std::vector<bool> in(n, false);
    if (n == 0) return in;
    LinearProgram lp(2 * n);
    for (std::size_t i = 0; i < n; ++i) lp.set_bound(n + i, Bound::between(0, 1));
    for (std::size_t r = 0; r < dim; ++r) {
        std::vector<std::pair<std::size_t, Rational>> terms;
        for (std::size_t i = 0; i < n; ++i) {
            if (!gens[i][r].is_zero()) terms.emplace_back(i, gens[i][r]);
        }
        if (!terms.empty()) lp.add_sparse(terms, Relation::Equal, 0);
    }
    for (std::size_t i = 0; i < n; ++i) lp.add_sparse({{n + i, Rational(1)}, {i, Rational(-1)}}, Relation::LessEqual, 0);
    Vector c(2 * n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) c[n + i] = 1;
    lp.set_objective(std::move(c), Sense::Maximize);
    const auto res = lp_solve(lp);
    if (res.status != LpStatus::Optimal) throw InternalError("lineality LP did not reach an optimum");
    for (std::size_t i = 0; i < n; ++i) in[i] = res.point[i] > 0;
    if (lambda_out) lambda_out->assign(res.point.begin(), res.point.begin() + static_cast<std::ptrdiff_t>(n));
    return in;
}

} // namespace

std::vector<bool> lineality_generators(const LiftedCone& cone) {
    return lineality_support(cone.generators(), cone.dim());
}

Subspace lineality(const LiftedCone& cone) {
    const auto in = lineality_support(cone.generators(), cone.dim());
    Matrix span;
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (in[i]) span.push_back(cone.generators()[i]);
    }
    return {cone.dim(), span_basis(span, cone.dim())};
}

RelintPoint relint_polar_point(const LiftedCone& cone) {
    const std::size_t dim = cone.dim();
    const auto& gens = cone.generators();
    const std::size_t n = gens.size();
    RelintPoint out;
    out.z.assign(dim, Rational(0));
    out.strict.assign(n, false);
    if (n == 0) return out;
    LinearProgram lp(dim + n);
    for (std::size_t r = 0; r < dim; ++r) lp.set_bound(r, Bound::free());
    for (std::size_t i = 0; i < n; ++i) lp.set_bound(dim + i, Bound::between(0, 1));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<std::size_t, Rational>> terms;
        for (std::size_t r = 0; r < dim; ++r) {
            if (!gens[i][r].is_zero()) terms.emplace_back(r, gens[i][r]);
        }
        terms.emplace_back(dim + i, Rational(1));
        lp.add_sparse(terms, Relation::LessEqual, 0);
    }
    Vector c(dim + n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) c[dim + i] = 1;
    lp.set_objective(std::move(c), Sense::Maximize);
    const auto res = lp_solve(lp);
    if (res.status != LpStatus::Optimal) throw InternalError("relative-interior LP did not reach an optimum");
    std::copy(res.point.begin(), res.point.begin() + static_cast<std::ptrdiff_t>(dim), out.z.begin());
    for (std::size_t i = 0; i < n; ++i) out.strict[i] = dot(out.z, gens[i]) < 0;
    return out;
}

std::optional<ArbitrageWitness> arbitrage_check(const LiftedCone& cone) {
    const std::size_t dim = cone.dim();
    const auto& gens = cone.generators();
    const std::size_t n = gens.size();
    if (n == 0) return std::nullopt;
    LinearProgram lp(n);
    Vector total(n, Rational(0));
    for (std::size_t r = 0; r < dim; ++r) {
        std::vector<std::pair<std::size_t, Rational>> terms;
        for (std::size_t i = 0; i < n; ++i) {
            if (gens[i][r].is_zero()) continue;
            terms.emplace_back(i, gens[i][r]);
            total[i] += gens[i][r];
        }
        if (!terms.empty()) lp.add_sparse(terms, Relation::GreaterEqual, 0);
    }
    lp.add_constraint(total, Relation::LessEqual, 1);
    lp.set_objective(total, Sense::Maximize);
    const auto res = lp_solve(lp);
    if (res.status != LpStatus::Optimal) throw InternalError("arbitrage LP did not reach an optimum");
    if (res.value <= 0) return std::nullopt;
    ArbitrageWitness w;
    w.coefficients = res.point;
    w.claim.assign(dim, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
        if (!res.point[i].is_zero()) axpy(res.point[i], gens[i], w.claim);
    }
    for (std::size_t r = 0; r < dim; ++r) {
        if (w.claim[r] > 0) {
            w.coordinate = r;
            break;
        }
    }
    return w;
}

NullStrategies null_strategies(const std::vector<LiftedCone>& factors) {
    NullStrategies out;
    if (factors.empty()) {
        out.is_vector_space = true;
        return out;
    }
    const std::size_t dim = factors.front().dim();
    const std::size_t m = factors.size();
    Matrix all;
    std::vector<std::size_t> owner;
    for (std::size_t k = 0; k < m; ++k) {
        if (factors[k].dim() != dim) throw std::invalid_argument("null_strategies: factors differ in dimension");
        for (const auto& g : factors[k].generators()) {
            all.push_back(g);
            owner.push_back(k);
        }
    }
    Vector lambda;
    const auto in = lineality_support(all, dim, &lambda);

    auto stack = [&](const Vector& weights) {
        Vector tuple(m * dim, Rational(0));
        for (std::size_t i = 0; i < all.size(); ++i) {
            if (weights[i].is_zero()) continue;
            std::span<Rational> part(tuple.data() + owner[i] * dim, dim);
            axpy(weights[i], all[i], part);
        }
        return tuple;
    };
    out.relint_tuple = lambda.empty() ? Vector(m * dim, Rational(0)) : stack(lambda);
    out.components.assign(m, Matrix{});
    if (lambda.empty()) {
        out.is_vector_space = true;
        return out;
    }

    // Is the negated max-support tuple again a null tuple? A zero tuple always is.
    LinearProgram lp(all.size());
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t r = 0; r < dim; ++r) {
            std::vector<std::pair<std::size_t, Rational>> terms;
            for (std::size_t i = 0; i < all.size(); ++i) {
                if (owner[i] == k && !all[i][r].is_zero()) terms.emplace_back(i, all[i][r]);
            }
            const Rational target = -out.relint_tuple[k * dim + r];
            if (terms.empty()) {
                if (!target.is_zero()) return out;
                continue;
            }
            lp.add_sparse(terms, Relation::Equal, target);
        }
    }
    if (!is_zero(out.relint_tuple) && !lp_solve(lp).feasible()) return out;
    out.is_vector_space = true;

    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (in[i]) support.push_back(i);
    }
    Matrix h(dim, Vector(support.size(), Rational(0)));
    for (std::size_t j = 0; j < support.size(); ++j) {
        for (std::size_t r = 0; r < dim; ++r) h[r][j] = all[support[j]][r];
    }
    Matrix tuples;
    for (const auto& kappa : nullspace(h, support.size())) {
        Vector w(all.size(), Rational(0));
        for (std::size_t j = 0; j < support.size(); ++j) w[support[j]] = kappa[j];
        tuples.push_back(stack(w));
    }
    out.tuples = span_basis(tuples, m * dim);
    for (std::size_t k = 0; k < m; ++k) {
        Matrix comp;
        for (const auto& t : out.tuples) comp.emplace_back(t.begin() + static_cast<std::ptrdiff_t>(k * dim),
                                                           t.begin() + static_cast<std::ptrdiff_t>((k + 1) * dim));
        out.components[k] = span_basis(comp, dim);
    }
    return out;
}

LiftedCone displaced_cone(const LiftedCone& cone, std::span<const Rational> xi, Displacement mode, const FiltrationTree& tree,
                          unsigned t, std::size_t assets) {
    if (xi.size() != cone.dim()) throw std::invalid_argument("displaced_cone: dimension mismatch");
    LiftedCone out = cone;
    if (mode == Displacement::ScalarRay) {
        GeneratorTag tag;
        tag.kind = GeneratorTag::Kind::Added;
        tag.label = "-xi";
        out.add(negated(xi), std::move(tag));
        return out;
    }
    for (auto node : tree.nodes_at(t)) {
        Vector g(cone.dim(), Rational(0));
        const auto [b, e] = tree.leaf_range(node);
        for (std::size_t k = b * assets; k < e * assets; ++k) g[k] = -xi[k];
        if (is_zero(g)) continue;
        GeneratorTag tag;
        tag.kind = GeneratorTag::Kind::Added;
        tag.time = t;
        tag.node = node;
        tag.label = "-xi_" + std::to_string(t) + " on node " + std::to_string(node);
        out.add(std::move(g), std::move(tag));
    }
    return out;
}

bool cone_equal(const LiftedCone& a, const LiftedCone& b) {
    if (a.dim() != b.dim()) return false;
    for (const auto& g : a.generators()) {
        if (!member(b, g).member) return false;
    }
    for (const auto& g : b.generators()) {
        if (!member(a, g).member) return false;
    }
    return true;
}

TradingConeField neat_reduce(const FiltrationTree& tree, const TradingConeField& cones) {
    const std::size_t d = cones.assets();
    const unsigned T = tree.horizon();
    std::vector<LiftedCone> factors;
    for (unsigned t = 0; t <= T; ++t) factors.push_back(LiftedCone::attainable(tree, cones, t, t));
    if (!null_strategies(factors).is_vector_space) {
        throw PreconditionError("null strategies not a vector space; apply closure preprocessing first");
    }

    std::vector<std::vector<Vector>> reduced(tree.node_count());
    for (auto node : tree.nodes_at(T)) reduced[node] = cones.generators(node);
    for (unsigned t = 0; t < T; ++t) {
        const std::vector<LiftedCone> tail(factors.begin() + t, factors.end());
        const auto ns = null_strategies(tail);
        if (!ns.is_vector_space) throw PreconditionError("null strategies from time " + std::to_string(t) + " are not a vector space");
        for (auto node : tree.nodes_at(t)) {
            const std::size_t leaf = tree.node(node).leaf_begin;
            Matrix rho;
            for (const auto& v : ns.components[0]) {
                Vector local(v.begin() + static_cast<std::ptrdiff_t>(leaf * d), v.begin() + static_cast<std::ptrdiff_t>((leaf + 1) * d));
                if (!is_zero(local)) rho.push_back(std::move(local));
            }
            rho = span_basis(rho, d);
            if (rho.empty()) {
                reduced[node] = cones.generators(node);
            } else {
                reduced[node] = intersect_with_subspace(cones.generators(node), rho, d).all();
            }
        }
    }
    TradingConeField out(d, std::move(reduced), std::vector<bool>(tree.node_count(), false));

    std::vector<LiftedCone> reduced_factors;
    for (unsigned t = 0; t <= T; ++t) reduced_factors.push_back(LiftedCone::attainable(tree, out, t, t));
    const auto check = null_strategies(reduced_factors);
    if (!is_zero(check.relint_tuple)) throw InternalError("reduced cones still admit a nonzero null strategy");
    if (!cone_equal(LiftedCone::attainable(tree, out, 0, T), LiftedCone::attainable(tree, cones, 0, T))) {
        throw InternalError("reduced cones do not generate the same attainable cone");
    }
    return out;
}

} // namespace tcmax
