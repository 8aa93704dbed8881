#pragma once

#include "tcmax/filtration_tree.hpp"
#include "tcmax/linalg.hpp"

#include <map>
#include <variant>

namespace tcmax {

/// d x d matrix of exchange rates at one node: entry (i, j) is the number of
/// units of asset i paid for one unit of asset j.
using BidAskMatrix = Matrix;

enum class NettingPolicy {
    Reject, ///< chains cheaper than the direct rate are a validation error
    Repair, ///< replace each rate by the cheapest chain
};

/// Checks diagonal, positivity and netting; throws ValidationError naming the violation.
void validate_bidask(const BidAskMatrix& pi, std::size_t node_id);

/// Replaces every rate by the cheapest chain; throws if a cycle is profitable.
BidAskMatrix repair_netting(const BidAskMatrix& pi, std::size_t node_id);

/// Generators {e_j - pi(i,j) e_i : i != j} (pairs in lexicographic order),
/// followed by {-e_k}.
std::vector<Vector> bidask_generators(const BidAskMatrix& pi);

/// Per-node generator lists of the trading cones K_t(node). Coefficients are
/// independent per atom, so the cone at time t is finitely F_t-generated.
class TradingConeField {
public:
    TradingConeField() = default;
    TradingConeField(std::size_t assets, std::vector<std::vector<Vector>> per_node, std::vector<bool> from_bidask);

    std::size_t assets() const { return assets_; }
    std::size_t node_count() const { return per_node_.size(); }
    const std::vector<Vector>& generators(std::size_t node) const { return per_node_.at(node); }
    bool derived_from_bidask(std::size_t node) const { return from_bidask_.at(node); }

private:
    std::size_t assets_ = 0;
    std::vector<std::vector<Vector>> per_node_;
    std::vector<bool> from_bidask_;
};

/// Bid-ask matrices for every node of the tree.
TradingConeField build_trading_cones(const FiltrationTree& tree, const std::vector<BidAskMatrix>& bidask);

/// A terminal portfolio: one R^d vector per leaf, stored leaf-major.
class Claim {
public:
    Claim() = default;
    Claim(std::size_t assets, std::size_t leaves) : assets_(assets), values_(assets * leaves, Rational(0)) {}
    Claim(std::size_t assets, Vector flat);

    /// Same vector on every leaf.
    static Claim constant(std::size_t leaves, std::span<const Rational> v);

    std::size_t assets() const { return assets_; }
    std::size_t leaves() const { return assets_ == 0 ? 0 : values_.size() / assets_; }

    Rational& at(std::size_t leaf, std::size_t asset) { return values_.at(leaf * assets_ + asset); }
    const Rational& at(std::size_t leaf, std::size_t asset) const { return values_.at(leaf * assets_ + asset); }

    std::span<const Rational> leaf(std::size_t l) const {
        return std::span<const Rational>(values_).subspan(l * assets_, assets_);
    }
    void set_leaf(std::size_t l, std::span<const Rational> v);

    const Vector& flat() const { return values_; }

    friend bool operator==(const Claim&, const Claim&) = default;

private:
    std::size_t assets_ = 0;
    Vector values_;
};

/// One vector per tree node: the value at node n belongs to time time(n).
/// Houses adapted processes (hedging legs xi_t, price processes Z_t).
struct NodeVectors {
    std::vector<Vector> per_node;

    friend bool operator==(const NodeVectors&, const NodeVectors&) = default;
};

/// Hand-built generator list for one node (netting is not checked).
struct GeneratorList {
    std::vector<Vector> generators;

    friend bool operator==(const GeneratorList&, const GeneratorList&) = default;
};

/// Per-node cone specification: a bid-ask matrix or a hand-built generator list.
using NodeConeSpec = std::variant<BidAskMatrix, GeneratorList>;

/// A validated finite market with transaction costs.
class Market {
public:
    static Market build(std::size_t assets, FiltrationTree tree, std::vector<NodeConeSpec> cones,
                        std::map<std::string, Claim> claims = {}, NettingPolicy policy = NettingPolicy::Reject);

    std::size_t assets() const { return assets_; }
    const FiltrationTree& tree() const { return tree_; }
    const TradingConeField& cones() const { return cones_; }
    const std::vector<NodeConeSpec>& cone_specs() const { return specs_; }
    const std::map<std::string, Claim>& claims() const { return claims_; }

    unsigned horizon() const { return tree_.horizon(); }
    std::size_t leaf_count() const { return tree_.leaf_count(); }
    std::size_t claim_dimension() const { return assets_ * tree_.leaf_count(); }

    /// Named claim; "zero" resolves to the zero claim unless the document defines it.
    Claim claim(const std::string& name) const;

    Claim zero_claim() const { return Claim(assets_, tree_.leaf_count()); }

    Market with_claim(const std::string& name, Claim c) const;

private:
    std::size_t assets_ = 0;
    FiltrationTree tree_;
    std::vector<NodeConeSpec> specs_;
    TradingConeField cones_;
    std::map<std::string, Claim> claims_;
};

/// Lifts an adapted strategy to the terminal claim sum_t xi_t.
Claim terminal_claim(const FiltrationTree& tree, std::size_t assets, const NodeVectors& legs);

/// X_t(node) = sum of legs on the path root..node.
NodeVectors cumulative_position(const FiltrationTree& tree, std::size_t assets, const NodeVectors& legs);

} // namespace tcmax
