#include "tcmax/randomize.hpp"

#include "tcmax/errors.hpp"

#include <algorithm>

namespace tcmax {

TruncationSets TruncationSets::full(const FiltrationTree& tree) {
    TruncationSets g;
    g.events.resize(tree.horizon() + 1);
    for (unsigned t = 1; t <= tree.horizon(); ++t) g.events[t] = tree.nodes_at(t);
    return g;
}

std::vector<bool> TruncationSets::h_leaves(const FiltrationTree& tree, unsigned t) const {
    std::vector<bool> in(tree.leaf_count(), true);
    for (unsigned s = 1; s <= t && s < events.size(); ++s) {
        std::vector<bool> g(tree.leaf_count(), false);
        for (auto node : events[s]) {
            const auto [lo, hi] = tree.leaf_range(node);
            for (auto l = lo; l < hi; ++l) g[l] = true;
        }
        for (std::size_t l = 0; l < in.size(); ++l) in[l] = in[l] && g[l];
    }
    return in;
}

void TruncationSets::check_adapted(const FiltrationTree& tree) const {
    if (events.size() != tree.horizon() + 1) {
        throw ValidationError("truncation sets must list an event for every t = 1.." + std::to_string(tree.horizon()));
    }
    for (unsigned t = 1; t < events.size(); ++t) {
        for (auto node : events[t]) {
            if (node >= tree.node_count() || tree.node(node).time != t) {
                throw ValidationError("G_" + std::to_string(t) + " contains node " + std::to_string(node) +
                                      ", which is not a time-" + std::to_string(t) + " atom");
            }
        }
    }
}

Rational branch_weight(unsigned k, unsigned M) { return pow2_neg(k) / (1 - pow2_neg(M)); }

Rational truncation_tail(unsigned n, unsigned M) { return (pow2_neg(n) - pow2_neg(M)) / (1 - pow2_neg(M)); }

Claim RandomizedMarket::lift(const Market& base, const Claim& c) const {
    const auto& tree = market.tree();
    Claim out(market.assets(), tree.leaf_count());
    for (std::size_t l = 0; l < tree.leaf_count(); ++l) {
        out.set_leaf(l, c.leaf(base.tree().leaf_index(base_node[tree.leaf_node(l)])));
    }
    return out;
}

NodeVectors RandomizedMarket::lift(const NodeVectors& v) const {
    NodeVectors out;
    out.per_node.reserve(base_node.size());
    for (auto b : base_node) out.per_node.push_back(v.per_node.at(b));
    return out;
}

RandomizedMarket randomize_market(const Market& m, unsigned M, unsigned n, std::size_t node_budget) {
    if (M < 1) throw ValidationError("branching M must be at least 1");
    if (n < 1 || n > M) throw ValidationError("truncation index n must lie in 1..M");
    const auto& base = m.tree();
    const unsigned T = base.horizon();

    // Count before building.
    std::size_t total = 0;
    std::size_t draws_at_t = 1;
    for (unsigned t = 0; t <= T; ++t) {
        total += base.nodes_at(t).size() * draws_at_t;
        if (total > node_budget) {
            throw BudgetExceeded("randomized tree exceeds the node budget of " + std::to_string(node_budget));
        }
        draws_at_t *= M;
    }

    RandomizedMarket r;
    r.branching = M;
    r.truncation = n;
    std::vector<NodeSpec> specs;
    std::vector<NodeConeSpec> cones;
    specs.reserve(total);

    auto emit = [&](std::size_t base_id, std::vector<unsigned> draws, std::optional<std::size_t> parent, Rational prob) {
        NodeSpec s;
        s.id = specs.size();
        s.time = base.node(base_id).time;
        s.parent = parent;
        s.probability = std::move(prob);
        specs.push_back(std::move(s));
        cones.push_back(m.cone_specs()[base_id]);
        r.base_node.push_back(base_id);
        r.draws.push_back(std::move(draws));
        return specs.size() - 1;
    };

    emit(base.root(), {}, std::nullopt, Rational(1));
    std::vector<std::size_t> frontier{0};
    for (unsigned t = 1; t <= T; ++t) {
        std::vector<std::size_t> next;
        for (auto p : frontier) {
            const auto& pnode = base.node(r.base_node[p]);
            for (auto c : pnode.children) {
                for (unsigned k = 1; k <= M; ++k) {
                    auto draws = r.draws[p];
                    draws.push_back(k);
                    const Rational prob = specs[p].probability * base.conditional_probability(c) * branch_weight(k, M);
                    next.push_back(emit(c, std::move(draws), p, prob));
                }
            }
        }
        frontier = std::move(next);
    }

    auto tree = FiltrationTree::build(std::move(specs));
    r.market = Market::build(m.assets(), std::move(tree), std::move(cones), {}, NettingPolicy::Reject);
    for (const auto& [name, c] : m.claims()) r.market = r.market.with_claim(name, r.lift(m, c));

    r.g.events.assign(T + 1, {});
    for (unsigned t = 1; t <= T; ++t) {
        for (auto node : r.market.tree().nodes_at(t)) {
            if (r.draws[node].at(t - 1) <= n) r.g.events[t].push_back(node);
        }
    }
    return r;
}

} // namespace tcmax
