#pragma once

#include "tcmax/market.hpp"

namespace tcmax {

/// Per time t in 1..T an F_t-measurable event given as a set of time-t nodes.
/// Index 0 is unused.
struct TruncationSets {
    std::vector<std::vector<std::size_t>> events;

    /// Everything at every time.
    static TruncationSets full(const FiltrationTree& tree);

    /// Leaves of H_t = G_1 and ... and G_t (t = 0 gives every leaf).
    std::vector<bool> h_leaves(const FiltrationTree& tree, unsigned t) const;

    /// Throws ValidationError if some event is not a set of time-t nodes.
    void check_adapted(const FiltrationTree& tree) const;
};

inline constexpr std::size_t kDefaultNodeBudget = 10000;

/// Product of a base market with T independent draws from {1..M}, draw t being
/// revealed at time t. Branch k has weight 2^-k / (1 - 2^-M).
struct RandomizedMarket {
    Market market;
    unsigned branching = 1;
    unsigned truncation = 1;
    std::vector<std::size_t> base_node;          ///< per product node
    std::vector<std::vector<unsigned>> draws;    ///< per product node: i_1..i_t (1-based)
    TruncationSets g;                            ///< G^n_t = {i_t <= n}

    Claim lift(const Market& base, const Claim& c) const;
    NodeVectors lift(const NodeVectors& v) const;
};

/// Renormalized weight of branch k out of M.
Rational branch_weight(unsigned k, unsigned M);

/// P(i_t > n) under the truncated weights: (2^-n - 2^-M) / (1 - 2^-M).
Rational truncation_tail(unsigned n, unsigned M);

/// Throws BudgetExceeded above node_budget product nodes; claims are lifted.
RandomizedMarket randomize_market(const Market& m, unsigned M, unsigned n, std::size_t node_budget = kDefaultNodeBudget);

} // namespace tcmax
