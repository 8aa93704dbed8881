#pragma once

#include "tcmax/rational.hpp"

#include <optional>
#include <utility>

namespace tcmax {

struct NodeSpec {
    std::size_t id = 0;
    unsigned time = 0;
    std::optional<std::size_t> parent;
    Rational probability;
};

/// A finite filtered probability space: a rooted tree whose time-t nodes are the
/// atoms of F_t. Probabilities are unconditional.
///
/// Leaves are numbered in depth-first order (children visited by increasing id),
/// so every node covers a contiguous range of leaf indices.
class FiltrationTree {
public:
    struct Node {
        std::size_t id = 0;
        unsigned time = 0;
        std::optional<std::size_t> parent;
        Rational probability;
        std::vector<std::size_t> children;
        std::size_t leaf_begin = 0;
        std::size_t leaf_end = 0;
    };

    /// Validates and builds; throws ValidationError / ProbabilityError.
    static FiltrationTree build(std::vector<NodeSpec> nodes);

    /// Single-node tree (T = 0).
    static FiltrationTree trivial();

    unsigned horizon() const { return horizon_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t leaf_count() const { return leaves_.size(); }
    std::size_t root() const { return root_; }

    const Node& node(std::size_t id) const { return nodes_.at(id); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<std::size_t>& nodes_at(unsigned t) const { return by_time_.at(t); }

    std::size_t leaf_node(std::size_t leaf_index) const { return leaves_.at(leaf_index); }
    std::size_t leaf_index(std::size_t node_id) const;
    bool is_leaf(std::size_t id) const { return nodes_.at(id).children.empty(); }

    std::pair<std::size_t, std::size_t> leaf_range(std::size_t id) const {
        const auto& n = nodes_.at(id);
        return {n.leaf_begin, n.leaf_end};
    }

    /// Ancestor (or self) of `id` at time t <= time(id).
    std::size_t ancestor_at(std::size_t id, unsigned t) const;

    /// The time-t atom containing a given leaf.
    std::size_t atom_of_leaf(std::size_t leaf_index, unsigned t) const {
        return ancestor_at(leaf_node(leaf_index), t);
    }

    /// P(child | parent).
    Rational conditional_probability(std::size_t id) const;

    std::vector<NodeSpec> specs() const;

private:
    std::vector<Node> nodes_;
    std::vector<std::vector<std::size_t>> by_time_;
    std::vector<std::size_t> leaves_;
    std::vector<std::size_t> leaf_of_node_;
    std::size_t root_ = 0;
    unsigned horizon_ = 0;
};

} // namespace tcmax
