#include "tcmax/pricing.hpp"

#include "tcmax/cone.hpp"
#include "tcmax/errors.hpp"

#include <map>

namespace tcmax {

bool in_node_cone(const std::vector<Vector>& generators, std::span<const Rational> v) {
    return member(LiftedCone::from_generators(v.size(), generators), v).member;
}

std::vector<std::vector<bool>> node_lineality_flags(const Market& m) {
    std::map<Matrix, std::vector<bool>> cache;
    std::vector<std::vector<bool>> out(m.tree().node_count());
    for (std::size_t n = 0; n < out.size(); ++n) {
        const auto& gens = m.cones().generators(n);
        auto it = cache.find(gens);
        if (it == cache.end()) {
            it = cache.emplace(gens, lineality_generators(LiftedCone::from_generators(m.assets(), gens))).first;
        }
        out[n] = it->second;
    }
    return out;
}

namespace {

// True if the generator is a negative multiple of a unit vector.
std::optional<std::size_t> negative_unit(const Vector& g) {
    std::optional<std::size_t> k;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i].is_zero()) continue;
        if (g[i] > 0 || k) return std::nullopt;
        k = i;
    }
    return k;
}

// Every cone contains -e_k for all k, so its polar lies in the orthant.
bool disposal_everywhere(const Market& m) {
    for (std::size_t n = 0; n < m.tree().node_count(); ++n) {
        std::vector<bool> seen(m.assets(), false);
        for (const auto& g : m.cones().generators(n)) {
            if (auto k = negative_unit(g)) seen[*k] = true;
        }
        for (bool s : seen) {
            if (!s) return false;
        }
    }
    return true;
}

struct PricingLp {
    LinearProgram lp;
    std::size_t slack = 0; // index of s when strict
    bool has_slack = false;
};

// Variables Z(node)_i at node * d + i.
PricingLp build_pricing_lp(const Market& m, bool strict, bool require_nonzero, bool allow_zero_box) {
    const auto& tree = m.tree();
    const std::size_t d = m.assets();
    const std::size_t n = tree.node_count();
    const bool orthant = disposal_everywhere(m);
    PricingLp p{LinearProgram(n * d), 0, false};
    auto& lp = p.lp;
    for (std::size_t j = 0; j < n * d; ++j) {
        if (!orthant) lp.set_bound(j, Bound::free());
    }
    if (allow_zero_box) {
        for (auto leaf_node : tree.nodes_at(tree.horizon())) {
            for (std::size_t i = 0; i < d; ++i) {
                lp.set_bound(leaf_node * d + i, orthant ? Bound::between(0, 1) : Bound::between(-1, 1));
            }
        }
    }
    if (strict) {
        p.slack = lp.add_variable(Bound::between(0, 1));
        p.has_slack = true;
    }
    const auto flags = strict ? node_lineality_flags(m) : std::vector<std::vector<bool>>{};

    for (std::size_t node = 0; node < n; ++node) {
        const auto& nd = tree.node(node);
        if (!nd.children.empty()) {
            for (std::size_t i = 0; i < d; ++i) {
                std::vector<std::pair<std::size_t, Rational>> terms{{node * d + i, nd.probability}};
                for (auto c : nd.children) terms.emplace_back(c * d + i, -tree.node(c).probability);
                lp.add_sparse(terms, Relation::Equal, 0);
            }
        }
        const auto& gens = m.cones().generators(node);
        for (std::size_t g = 0; g < gens.size(); ++g) {
            const bool exempt_from_slack = !strict || flags[node][g];
            if (orthant && negative_unit(gens[g]) && exempt_from_slack) continue;
            std::vector<std::pair<std::size_t, Rational>> terms;
            for (std::size_t i = 0; i < d; ++i) {
                if (!gens[g][i].is_zero()) terms.emplace_back(node * d + i, gens[g][i]);
            }
            if (terms.empty()) continue;
            if (!exempt_from_slack) terms.emplace_back(p.slack, Rational(1));
            lp.add_sparse(terms, Relation::LessEqual, 0);
        }
        if (require_nonzero && nd.children.empty()) {
            std::vector<std::pair<std::size_t, Rational>> terms;
            for (std::size_t i = 0; i < d; ++i) terms.emplace_back(node * d + i, Rational(1));
            lp.add_sparse(terms, Relation::GreaterEqual, 1);
        }
    }
    return p;
}

Vector pairing_row(const Market& m, const Claim& x, std::size_t vars) {
    const auto& tree = m.tree();
    const std::size_t d = m.assets();
    Vector row(vars, Rational(0));
    for (std::size_t l = 0; l < tree.leaf_count(); ++l) {
        const std::size_t node = tree.leaf_node(l);
        const Rational& p = tree.node(node).probability;
        for (std::size_t i = 0; i < d; ++i) {
            if (!x.at(l, i).is_zero()) row[node * d + i] = p * x.at(l, i);
        }
    }
    return row;
}

NodeVectors extract(const Market& m, const Vector& point) {
    const std::size_t d = m.assets();
    NodeVectors z;
    z.per_node.resize(m.tree().node_count());
    for (std::size_t node = 0; node < z.per_node.size(); ++node) {
        z.per_node[node].assign(point.begin() + static_cast<std::ptrdiff_t>(node * d),
                                point.begin() + static_cast<std::ptrdiff_t>((node + 1) * d));
    }
    return z;
}

void check_claim_shape(const Market& m, const Claim& x) {
    if (x.assets() != m.assets() || x.leaves() != m.leaf_count()) throw std::invalid_argument("claim shape does not match market");
}

} // namespace

std::string check_price_process(const Market& m, const NodeVectors& z, bool strict) {
    const auto& tree = m.tree();
    const std::size_t d = m.assets();
    if (z.per_node.size() != tree.node_count()) return "price process must have one vector per node";
    const auto flags = strict ? node_lineality_flags(m) : std::vector<std::vector<bool>>{};
    for (std::size_t node = 0; node < tree.node_count(); ++node) {
        const auto& v = z.per_node[node];
        if (v.size() != d) return "price vector at node " + std::to_string(node) + " has wrong dimension";
        if (is_zero(v)) return "price vector at node " + std::to_string(node) + " is zero";
        const auto& gens = m.cones().generators(node);
        for (std::size_t g = 0; g < gens.size(); ++g) {
            const Rational s = dot(v, gens[g]);
            if (s > 0) return "Z at node " + std::to_string(node) + " is positive on generator " + std::to_string(g);
            if (strict && !flags[node][g] && s >= 0) {
                return "Z at node " + std::to_string(node) + " is not strictly negative on generator " + std::to_string(g);
            }
        }
        const auto& nd = tree.node(node);
        if (nd.children.empty()) continue;
        Vector expect = scaled(v, nd.probability);
        for (auto c : nd.children) axpy(-tree.node(c).probability, z.per_node[c], expect);
        if (!is_zero(expect)) return "martingale property fails at node " + std::to_string(node);
    }
    return {};
}

ConsistencyResult find_consistent_process(const Market& m, bool strict, const Claim* price_zero) {
    auto p = build_pricing_lp(m, strict, true, false);
    const std::size_t vars = m.tree().node_count() * m.assets();
    if (price_zero) {
        check_claim_shape(m, *price_zero);
        Vector row = pairing_row(m, *price_zero, p.lp.variables());
        p.lp.add_constraint(std::move(row), Relation::Equal, 0);
    }
    if (strict) {
        Vector c(p.lp.variables(), Rational(0));
        c[p.slack] = 1;
        p.lp.set_objective(std::move(c), Sense::Maximize);
    }
    const auto res = lp_solve(p.lp);
    ConsistencyResult out;
    if (!res.feasible()) {
        out.farkas = res.dual;
        out.explanation = price_zero ? "no consistent price process prices the claim at zero: the claim is not properly maximal"
                                     : "no consistent price process exists: the market admits arbitrage";
        return out;
    }
    out.process.z = extract(m, Vector(res.point.begin(), res.point.begin() + static_cast<std::ptrdiff_t>(vars)));
    if (strict) {
        out.process.slack = res.point[p.slack];
        if (out.process.slack <= 0) {
            out.explanation = "consistent price processes exist but none is strictly consistent";
            return out;
        }
        out.process.strict = true;
    }
    if (auto e = check_price_process(m, out.process.z, strict); !e.empty()) throw InternalError("price process self-check: " + e);
    if (price_zero && expected_pairing(m, out.process.z, *price_zero) != 0) throw InternalError("price process does not price claim at zero");
    out.found = true;
    return out;
}

Rational expected_pairing(const Market& m, const NodeVectors& z, const Claim& x) {
    check_claim_shape(m, x);
    const auto& tree = m.tree();
    Rational sum = 0;
    for (std::size_t l = 0; l < tree.leaf_count(); ++l) {
        const std::size_t node = tree.leaf_node(l);
        sum += tree.node(node).probability * dot(z.per_node.at(node), x.leaf(l));
    }
    return sum;
}

ValueReport price_and_value(const Market& m, const PriceProcess& z, const Claim& x, const NodeVectors* decomposition) {
    check_claim_shape(m, x);
    const auto& tree = m.tree();
    const std::size_t d = m.assets();
    ValueReport r;
    r.price = expected_pairing(m, z.z, x);
    r.value.assign(tree.node_count(), Rational(0));
    if (decomposition) {
        if (decomposition->per_node.size() != tree.node_count()) throw ValidationError("decomposition must have one leg per node");
        for (std::size_t node = 0; node < tree.node_count(); ++node) {
            const auto& leg = decomposition->per_node[node];
            if (leg.empty() || is_zero(leg)) continue;
            if (leg.size() != d) throw ValidationError("leg at node " + std::to_string(node) + " has wrong dimension");
            if (!in_node_cone(m.cones().generators(node), leg)) {
                throw ValidationError("leg xi_" + std::to_string(tree.node(node).time) + " at node " + std::to_string(node) +
                                      " is not in the trading cone");
            }
        }
        if (!(terminal_claim(tree, d, *decomposition) == x)) throw ValidationError("decomposition legs do not sum to the claim");
        const auto cum = cumulative_position(tree, d, *decomposition);
        r.period_terms.assign(tree.horizon() + 1, Rational(0));
        for (std::size_t node = 0; node < tree.node_count(); ++node) {
            r.value[node] = dot(z.z.per_node[node], cum.per_node[node]);
            const auto& leg = decomposition->per_node[node];
            if (leg.empty()) continue;
            r.period_terms[tree.node(node).time] += tree.node(node).probability * dot(z.z.per_node[node], leg);
        }
        Rational total = 0;
        for (const auto& t : r.period_terms) total += t;
        r.identity_holds = total == r.price;
    } else {
        for (std::size_t l = 0; l < tree.leaf_count(); ++l) {
            const std::size_t node = tree.leaf_node(l);
            r.value[node] = dot(z.z.per_node[node], x.leaf(l));
        }
        for (unsigned t = tree.horizon(); t-- > 0;) {
            for (auto node : tree.nodes_at(t)) {
                Rational acc = 0;
                for (auto c : tree.node(node).children) acc += tree.node(c).probability * r.value[c];
                r.value[node] = acc / tree.node(node).probability;
            }
        }
    }
    for (std::size_t node = 0; node < tree.node_count(); ++node) {
        const auto& nd = tree.node(node);
        if (nd.children.empty()) continue;
        Rational acc = 0;
        for (auto c : nd.children) acc += tree.node(c).probability * r.value[c];
        if (acc != nd.probability * r.value[node]) r.tower_holds = false;
    }
    return r;
}

DualMembership dual_membership(const Market& m, const Claim& x) {
    check_claim_shape(m, x);
    const auto base = find_consistent_process(m);
    if (!base.found) throw PreconditionError("market admits arbitrage; the dual membership test is meaningless");
    auto p = build_pricing_lp(m, false, false, true);
    p.lp.set_objective(pairing_row(m, x, p.lp.variables()), Sense::Maximize);
    const auto res = lp_solve(p.lp);
    if (res.status != LpStatus::Optimal) throw InternalError("dual membership LP did not reach an optimum");
    DualMembership out;
    out.optimum = res.value;
    out.in_cone = res.value <= 0;
    if (out.in_cone) return out;
    // The optimizer may vanish on some node; mixing in a consistent process fixes that.
    NodeVectors zstar = extract(m, res.point);
    const Rational base_pair = expected_pairing(m, base.process.z, x);
    Rational eps = 1;
    if (base_pair < 0) eps = res.value / (2 * -base_pair);
    PriceProcess w;
    w.z.per_node.resize(zstar.per_node.size());
    for (std::size_t node = 0; node < zstar.per_node.size(); ++node) {
        w.z.per_node[node] = added(zstar.per_node[node], scaled(base.process.z.per_node[node], eps));
    }
    if (auto e = check_price_process(m, w.z, false); !e.empty()) throw InternalError("dual witness self-check: " + e);
    if (expected_pairing(m, w.z, x) <= 0) throw InternalError("dual witness does not price the claim positively");
    out.witness = std::move(w);
    return out;
}

ConditionalMeasure sample_emm(const Market& m, const NodeVectors& z, std::mt19937_64& rng) {
    const auto& tree = m.tree();
    const std::size_t d = m.assets();
    ConditionalMeasure q(tree.node_count(), Rational(0));
    q[tree.root()] = 1;
    std::uniform_int_distribution<int> coef(-9, 9);
    std::uniform_int_distribution<int> mix(1, 9);
    for (std::size_t node = 0; node < tree.node_count(); ++node) {
        const auto& ch = tree.node(node).children;
        if (ch.empty()) continue;
        LinearProgram lp(ch.size());
        for (std::size_t i = 0; i < d; ++i) {
            Vector row(ch.size());
            for (std::size_t k = 0; k < ch.size(); ++k) row[k] = z.per_node[ch[k]][i];
            lp.add_constraint(std::move(row), Relation::Equal, z.per_node[node][i]);
        }
        lp.add_constraint(Vector(ch.size(), Rational(1)), Relation::Equal, 1);
        Vector c(ch.size());
        for (auto& v : c) v = coef(rng);
        lp.set_objective(std::move(c), Sense::Maximize);
        const auto res = lp_solve(lp);
        if (res.status != LpStatus::Optimal) throw InternalError("EMM vertex LP failed at node " + std::to_string(node));
        const Rational alpha(mix(rng), 10);
        for (std::size_t k = 0; k < ch.size(); ++k) {
            q[ch[k]] = (1 - alpha) * tree.conditional_probability(ch[k]) + alpha * res.point[k];
        }
    }
    return q;
}

bool is_emm(const Market& m, const ConditionalMeasure& q, const NodeVectors& z) {
    const auto& tree = m.tree();
    for (std::size_t node = 0; node < tree.node_count(); ++node) {
        const auto& ch = tree.node(node).children;
        if (ch.empty()) continue;
        Rational total = 0;
        Vector mean(m.assets(), Rational(0));
        for (auto c : ch) {
            if (q[c] <= 0) return false;
            total += q[c];
            axpy(q[c], z.per_node[c], mean);
        }
        if (total != 1 || mean != z.per_node[node]) return false;
    }
    return true;
}

std::vector<Rational> conditional_values(const Market& m, const ConditionalMeasure& q, const NodeVectors& z, const Claim& x) {
    const auto& tree = m.tree();
    std::vector<Rational> v(tree.node_count(), Rational(0));
    for (std::size_t l = 0; l < tree.leaf_count(); ++l) {
        const std::size_t node = tree.leaf_node(l);
        v[node] = dot(z.per_node[node], x.leaf(l));
    }
    for (unsigned t = tree.horizon(); t-- > 0;) {
        for (auto node : tree.nodes_at(t)) {
            Rational acc = 0;
            for (auto c : tree.node(node).children) acc += q[c] * v[c];
            v[node] = acc;
        }
    }
    return v;
}

} // namespace tcmax
