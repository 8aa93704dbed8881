#include "tcmax/market.hpp"

#include "tcmax/errors.hpp"

#include <algorithm>

namespace tcmax {

namespace {

std::string pi_name(std::size_t i, std::size_t j) {
    return "π^{" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "}";
}

void check_shape(const BidAskMatrix& pi, std::size_t node_id) {
    const std::size_t d = pi.size();
    if (d == 0) throw ValidationError("empty bid-ask matrix at node " + std::to_string(node_id));
    for (const auto& row : pi) {
        if (row.size() != d) throw ValidationError("bid-ask matrix at node " + std::to_string(node_id) + " is not square");
    }
}

// Cheapest chains with exactly `len` edges, with predecessor tracking.
struct ChainTable {
    Matrix cost;
    std::vector<std::vector<std::size_t>> pred;
};

std::vector<std::size_t> rebuild_chain(const std::vector<ChainTable>& tables, std::size_t len, std::size_t from, std::size_t to) {
    std::vector<std::size_t> chain{to};
    std::size_t cur = to;
    for (std::size_t l = len; l >= 2; --l) {
        cur = tables[l].pred[from][cur];
        chain.push_back(cur);
    }
    chain.push_back(from);
    std::reverse(chain.begin(), chain.end());
    return chain;
}

} // namespace

void validate_bidask(const BidAskMatrix& pi, std::size_t node_id) {
    check_shape(pi, node_id);
    const std::size_t d = pi.size();
    for (std::size_t i = 0; i < d; ++i) {
        if (pi[i][i] != 1) {
            throw ValidationError(pi_name(i, i) + " = " + to_string(pi[i][i]) + " ≠ 1 at node " + std::to_string(node_id) +
                                  " (requires π^{i,i}=1)");
        }
        for (std::size_t j = 0; j < d; ++j) {
            if (pi[i][j] <= 0) {
                throw ValidationError(pi_name(i, j) + " = " + to_string(pi[i][j]) + " is not strictly positive at node " +
                                      std::to_string(node_id));
            }
        }
    }
    // tables[len] = cheapest product over chains with exactly len edges.
    std::vector<ChainTable> tables(d + 1);
    tables[1].cost = pi;
    for (std::size_t len = 2; len <= d; ++len) {
        auto& cur = tables[len];
        const auto& prev = tables[len - 1];
        cur.cost.assign(d, Vector(d));
        cur.pred.assign(d, std::vector<std::size_t>(d, 0));
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = 0; b < d; ++b) {
                bool first = true;
                for (std::size_t m = 0; m < d; ++m) {
                    Rational c = prev.cost[a][m] * pi[m][b];
                    if (first || c < cur.cost[a][b]) {
                        cur.cost[a][b] = std::move(c);
                        cur.pred[a][b] = m;
                        first = false;
                    }
                }
            }
        }
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = 0; b < d; ++b) {
                if (cur.cost[a][b] < pi[a][b]) {
                    const auto chain = rebuild_chain(tables, len, a, b);
                    std::string path;
                    for (std::size_t k = 0; k < chain.size(); ++k) {
                        if (k) path += "→";
                        path += std::to_string(chain[k] + 1);
                    }
                    throw ValidationError("netting violated for chain " + path + " at node " + std::to_string(node_id) + ": " +
                                          pi_name(a, b) + " = " + to_string(pi[a][b]) + " > " + to_string(cur.cost[a][b]));
                }
            }
        }
    }
}

BidAskMatrix repair_netting(const BidAskMatrix& pi, std::size_t node_id) {
    check_shape(pi, node_id);
    const std::size_t d = pi.size();
    BidAskMatrix best = pi;
    for (std::size_t m = 0; m < d; ++m) {
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = 0; b < d; ++b) {
                Rational c = best[a][m] * best[m][b];
                if (c < best[a][b]) best[a][b] = std::move(c);
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        if (best[i][i] < 1) {
            throw ValidationError("cannot repair netting at node " + std::to_string(node_id) + ": a trading cycle through asset " +
                                  std::to_string(i + 1) + " is profitable");
        }
    }
    validate_bidask(best, node_id);
    return best;
}

std::vector<Vector> bidask_generators(const BidAskMatrix& pi) {
    const std::size_t d = pi.size();
    std::vector<Vector> gens;
    gens.reserve(d * d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (i == j) continue;
            Vector g(d, Rational(0));
            g[j] = 1;
            g[i] = -pi[i][j];
            gens.push_back(std::move(g));
        }
    }
    for (std::size_t k = 0; k < d; ++k) {
        Vector g(d, Rational(0));
        g[k] = -1;
        gens.push_back(std::move(g));
    }
    return gens;
}

TradingConeField::TradingConeField(std::size_t assets, std::vector<std::vector<Vector>> per_node, std::vector<bool> from_bidask)
    : assets_(assets), per_node_(std::move(per_node)), from_bidask_(std::move(from_bidask)) {
    if (from_bidask_.size() != per_node_.size()) throw std::invalid_argument("TradingConeField: size mismatch");
    for (std::size_t n = 0; n < per_node_.size(); ++n) {
        for (const auto& g : per_node_[n]) {
            if (g.size() != assets_) {
                throw ValidationError("generator at node " + std::to_string(n) + " has dimension " + std::to_string(g.size()) +
                                      ", expected " + std::to_string(assets_));
            }
        }
    }
}

TradingConeField build_trading_cones(const FiltrationTree& tree, const std::vector<BidAskMatrix>& bidask) {
    if (bidask.size() != tree.node_count()) throw std::invalid_argument("build_trading_cones: one matrix per node required");
    const std::size_t d = bidask.empty() ? 0 : bidask.front().size();
    std::vector<std::vector<Vector>> gens;
    gens.reserve(bidask.size());
    for (std::size_t n = 0; n < bidask.size(); ++n) {
        validate_bidask(bidask[n], n);
        if (bidask[n].size() != d) throw ValidationError("bid-ask matrix at node " + std::to_string(n) + " has wrong size");
        gens.push_back(bidask_generators(bidask[n]));
    }
    return TradingConeField(d, std::move(gens), std::vector<bool>(bidask.size(), true));
}

Claim::Claim(std::size_t assets, Vector flat) : assets_(assets), values_(std::move(flat)) {
    if (assets_ == 0 || values_.size() % assets_ != 0) throw std::invalid_argument("Claim: size is not a multiple of assets");
}

Claim Claim::constant(std::size_t leaves, std::span<const Rational> v) {
    Claim c(v.size(), leaves);
    for (std::size_t l = 0; l < leaves; ++l) c.set_leaf(l, v);
    return c;
}

void Claim::set_leaf(std::size_t l, std::span<const Rational> v) {
    if (v.size() != assets_) throw std::invalid_argument("Claim::set_leaf: dimension mismatch");
    std::copy(v.begin(), v.end(), values_.begin() + static_cast<std::ptrdiff_t>(l * assets_));
}

Market Market::build(std::size_t assets, FiltrationTree tree, std::vector<NodeConeSpec> cones,
                     std::map<std::string, Claim> claims, NettingPolicy policy) {
    if (assets == 0) throw ValidationError("market needs at least one asset");
    if (cones.size() != tree.node_count()) {
        throw ValidationError("expected a cone specification for each of the " + std::to_string(tree.node_count()) + " nodes, got " +
                              std::to_string(cones.size()));
    }
    std::vector<std::vector<Vector>> gens(cones.size());
    std::vector<bool> from_bidask(cones.size(), false);
    for (std::size_t n = 0; n < cones.size(); ++n) {
        if (auto* pi = std::get_if<BidAskMatrix>(&cones[n])) {
            if (pi->size() != assets) {
                throw ValidationError("bid-ask matrix at node " + std::to_string(n) + " must be " + std::to_string(assets) + "x" +
                                      std::to_string(assets));
            }
            if (policy == NettingPolicy::Repair) {
                *pi = repair_netting(*pi, n);
            } else {
                validate_bidask(*pi, n);
            }
            gens[n] = bidask_generators(*pi);
            from_bidask[n] = true;
        } else {
            gens[n] = std::get<GeneratorList>(cones[n]).generators;
        }
    }
    Market m;
    m.assets_ = assets;
    m.cones_ = TradingConeField(assets, std::move(gens), std::move(from_bidask));
    m.specs_ = std::move(cones);
    for (const auto& [name, c] : claims) {
        if (c.assets() != assets || c.leaves() != tree.leaf_count()) {
            throw ValidationError("claim \"" + name + "\" must have " + std::to_string(assets) + " assets on each of " +
                                  std::to_string(tree.leaf_count()) + " leaves");
        }
    }
    m.tree_ = std::move(tree);
    m.claims_ = std::move(claims);
    return m;
}

Claim Market::claim(const std::string& name) const {
    if (auto it = claims_.find(name); it != claims_.end()) return it->second;
    if (name == "zero") return zero_claim();
    throw std::out_of_range("unknown claim \"" + name + "\"");
}

Market Market::with_claim(const std::string& name, Claim c) const {
    if (c.assets() != assets_ || c.leaves() != tree_.leaf_count()) {
        throw ValidationError("claim \"" + name + "\" has the wrong shape");
    }
    Market m = *this;
    m.claims_[name] = std::move(c);
    return m;
}

Claim terminal_claim(const FiltrationTree& tree, std::size_t assets, const NodeVectors& legs) {
    if (legs.per_node.size() != tree.node_count()) throw std::invalid_argument("terminal_claim: one vector per node required");
    Claim out(assets, tree.leaf_count());
    for (std::size_t n = 0; n < tree.node_count(); ++n) {
        const auto& v = legs.per_node[n];
        if (v.empty() || is_zero(v)) continue;
        if (v.size() != assets) throw std::invalid_argument("terminal_claim: leg dimension mismatch");
        const auto [b, e] = tree.leaf_range(n);
        for (std::size_t l = b; l < e; ++l) {
            for (std::size_t i = 0; i < assets; ++i) out.at(l, i) += v[i];
        }
    }
    return out;
}

NodeVectors cumulative_position(const FiltrationTree& tree, std::size_t assets, const NodeVectors& legs) {
    NodeVectors out;
    out.per_node.assign(tree.node_count(), Vector(assets, Rational(0)));
    for (unsigned t = 0; t <= tree.horizon(); ++t) {
        for (auto n : tree.nodes_at(t)) {
            Vector acc = legs.per_node.at(n).empty() ? Vector(assets, Rational(0)) : legs.per_node[n];
            if (const auto& p = tree.node(n).parent) acc = added(acc, out.per_node[*p]);
            out.per_node[n] = std::move(acc);
        }
    }
    return out;
}

} // namespace tcmax
