#include "tcmax/filtration_tree.hpp"

#include "tcmax/errors.hpp"

#include <algorithm>
#include <limits>

namespace tcmax {

namespace {
constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
}

FiltrationTree FiltrationTree::build(std::vector<NodeSpec> specs) {
    if (specs.empty()) throw ValidationError("tree has no nodes");
    const std::size_t n = specs.size();

    FiltrationTree tree;
    tree.nodes_.resize(n);
    std::vector<bool> seen(n, false);
    for (auto& s : specs) {
        if (s.id >= n) {
            throw ValidationError("node ids must be dense 0.." + std::to_string(n - 1) + "; got " + std::to_string(s.id));
        }
        if (seen[s.id]) throw ValidationError("duplicate node id " + std::to_string(s.id));
        seen[s.id] = true;
        auto& node = tree.nodes_[s.id];
        node.id = s.id;
        node.time = s.time;
        node.parent = s.parent;
        node.probability = s.probability;
    }

    std::size_t root = npos;
    for (auto& node : tree.nodes_) {
        if (node.probability <= 0) {
            throw ValidationError("probability of node " + std::to_string(node.id) + " must be strictly positive");
        }
        if (!node.parent) {
            if (root != npos) throw ValidationError("more than one root (nodes " + std::to_string(root) + " and " + std::to_string(node.id) + ")");
            root = node.id;
            continue;
        }
        const std::size_t p = *node.parent;
        if (p >= n || p == node.id) throw ValidationError("node " + std::to_string(node.id) + " has invalid parent");
        if (tree.nodes_[p].time + 1 != node.time) {
            throw ValidationError("node " + std::to_string(node.id) + " at time " + std::to_string(node.time) +
                                  " is not one period after its parent");
        }
        tree.nodes_[p].children.push_back(node.id);
    }
    if (root == npos) throw ValidationError("tree has no root");
    if (tree.nodes_[root].time != 0) throw ValidationError("root must be at time 0");
    if (tree.nodes_[root].probability != 1) throw ProbabilityError("root probability must be 1");
    tree.root_ = root;

    unsigned horizon = 0;
    for (const auto& node : tree.nodes_) horizon = std::max(horizon, node.time);
    tree.horizon_ = horizon;
    tree.by_time_.assign(horizon + 1, {});

    // Depth-first traversal: reachability, leaf ordering, contiguous leaf ranges.
    std::vector<bool> visited(n, false);
    tree.leaf_of_node_.assign(n, npos);
    struct Frame { std::size_t id; std::size_t next_child; };
    std::vector<Frame> stack{{root, 0}};
    visited[root] = true;
    for (auto& node : tree.nodes_) std::sort(node.children.begin(), node.children.end());
    tree.nodes_[root].leaf_begin = 0;
    while (!stack.empty()) {
        auto& frame = stack.back();
        auto& node = tree.nodes_[frame.id];
        if (frame.next_child == 0 && node.children.empty()) {
            if (node.time != horizon) {
                throw ValidationError("node " + std::to_string(node.id) + " at time " + std::to_string(node.time) +
                                      " has no children but horizon is " + std::to_string(horizon));
            }
            node.leaf_begin = tree.leaves_.size();
            tree.leaf_of_node_[node.id] = tree.leaves_.size();
            tree.leaves_.push_back(node.id);
            node.leaf_end = tree.leaves_.size();
            stack.pop_back();
            continue;
        }
        if (frame.next_child == node.children.size()) {
            node.leaf_end = tree.leaves_.size();
            Rational sum = 0;
            for (auto c : node.children) sum += tree.nodes_[c].probability;
            if (sum != node.probability) {
                throw ProbabilityError("children of node " + std::to_string(node.id) + " have total probability " +
                                       to_string(sum) + " but the node has " + to_string(node.probability));
            }
            stack.pop_back();
            continue;
        }
        if (frame.next_child == 0) node.leaf_begin = tree.leaves_.size();
        const std::size_t child = node.children[frame.next_child++];
        if (visited[child]) throw ValidationError("node " + std::to_string(child) + " reached twice");
        visited[child] = true;
        stack.push_back({child, 0});
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!visited[i]) throw ValidationError("node " + std::to_string(i) + " is not connected to the root");
        tree.by_time_[tree.nodes_[i].time].push_back(i);
    }
    return tree;
}

FiltrationTree FiltrationTree::trivial() {
    return build({NodeSpec{0, 0, std::nullopt, Rational(1)}});
}

std::size_t FiltrationTree::leaf_index(std::size_t node_id) const {
    const auto idx = leaf_of_node_.at(node_id);
    if (idx == npos) throw std::invalid_argument("node " + std::to_string(node_id) + " is not a leaf");
    return idx;
}

std::size_t FiltrationTree::ancestor_at(std::size_t id, unsigned t) const {
    const Node* node = &nodes_.at(id);
    if (t > node->time) throw std::invalid_argument("ancestor_at: time after node");
    while (node->time > t) node = &nodes_[*node->parent];
    return node->id;
}

Rational FiltrationTree::conditional_probability(std::size_t id) const {
    const auto& node = nodes_.at(id);
    if (!node.parent) return Rational(1);
    return node.probability / nodes_[*node.parent].probability;
}

std::vector<NodeSpec> FiltrationTree::specs() const {
    std::vector<NodeSpec> out;
    out.reserve(nodes_.size());
    for (const auto& node : nodes_) out.push_back({node.id, node.time, node.parent, node.probability});
    return out;
}

} // namespace tcmax
