#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcts_xray {

// Index into the action alphabet. -1 marks "no action" (the root's edge).
using ActionId = std::int32_t;
inline constexpr ActionId kNoAction = -1;

struct ActionAlphabet {
    int size = 0;
    std::vector<std::string> names;  // empty, or one label per action

    ActionAlphabet() = default;
    explicit ActionAlphabet(int n) : size(n) { check(); }
    ActionAlphabet(int n, std::vector<std::string> labels) : size(n), names(std::move(labels)) { check(); }

    void check() const {
        if (size < 2)
            throw std::invalid_argument("action alphabet must have at least 2 actions");
        if (!names.empty() && static_cast<int>(names.size()) != size)
            throw std::invalid_argument("action alphabet needs one name per action");
    }

    std::string name(ActionId a) const {
        if (a < 0 || a >= size) return "a" + std::to_string(a);
        return names.empty() ? "a" + std::to_string(a) : names[static_cast<std::size_t>(a)];
    }
};

// Which bookkeeping a traversal reads: the fields written during search, or
// the parallel "summarized" mirrors that reductions mutate. Originals are
// never destroyed, so one tree instance can be reported before/after.
enum class View : std::uint8_t { original, summarized };

struct TreeNode {
    ActionId action = kNoAction;     // edge from parent; kNoAction at root
    TreeNode* parent = nullptr;

    double reward = 0.0;             // immediate reward on the transition into this node
    double value = 0.0;              // last back-propagated value
    double value_sum = 0.0;          // cumulative back-propagated value, drives mean-Q
    std::int64_t visits = 0;
    std::vector<std::int64_t> child_visits;            // length |A|
    std::vector<std::unique_ptr<TreeNode>> children;   // length |A|; slot empty until expansion
    bool terminal = false;
    double terminal_value = 0.0;     // backed up when a terminal leaf is selected again
    double prior = 0.0;              // evaluator prior on this node's edge (puct mode)

    double entropy = 0.0;            // subtree entropy in bits, maintained by back-prop
    int depth = 0;                   // max edge-count depth of the subtree below this node
    int max_branching = 1;           // most distinct child actions in use anywhere below

    // Reduction mirrors; meaningful only after init_summarized().
    std::int64_t visits_summarized = 0;
    std::vector<std::int64_t> child_visits_summarized;
    std::vector<TreeNode*> children_summarized;        // non-owning; removal nulls the slot
    double entropy_summarized = 0.0;
    int depth_summarized = 0;
    int max_branching_summarized = 1;

    explicit TreeNode(int alphabet_size)
        : child_visits(static_cast<std::size_t>(alphabet_size), 0),
          children(static_cast<std::size_t>(alphabet_size)) {}

    int alphabet_size() const { return static_cast<int>(child_visits.size()); }

    std::int64_t visits_in(View v) const { return v == View::original ? visits : visits_summarized; }
    double entropy_in(View v) const { return v == View::original ? entropy : entropy_summarized; }
    int depth_in(View v) const { return v == View::original ? depth : depth_summarized; }
    int max_branching_in(View v) const {
        return v == View::original ? max_branching : max_branching_summarized;
    }
    const std::vector<std::int64_t>& child_visits_in(View v) const {
        return v == View::original ? child_visits : child_visits_summarized;
    }

    // A child belongs to the tree once it has been visited; unvisited slots are
    // search bookkeeping, not tree structure.
    TreeNode* tree_child(ActionId a, View v = View::original) const {
        const auto idx = static_cast<std::size_t>(a);
        if (a < 0 || a >= alphabet_size()) return nullptr;
        if (v == View::original)
            return child_visits[idx] > 0 ? children[idx].get() : nullptr;
        if (children_summarized.empty()) return nullptr;
        return child_visits_summarized[idx] > 0 ? children_summarized[idx] : nullptr;
    }

    int tree_child_count(View v = View::original) const {
        int n = 0;
        for (ActionId a = 0; a < alphabet_size(); ++a)
            if (tree_child(a, v)) ++n;
        return n;
    }

    bool is_leaf(View v = View::original) const { return tree_child_count(v) == 0; }

    // Most visited tree child, lowest ActionId on ties; kNoAction for a leaf.
    ActionId main_child(View v = View::original) const {
        ActionId best = kNoAction;
        std::int64_t best_visits = 0;
        const auto& counts = child_visits_in(v);
        for (ActionId a = 0; a < alphabet_size(); ++a)
            if (tree_child(a, v) && counts[static_cast<std::size_t>(a)] > best_visits) {
                best = a;
                best_visits = counts[static_cast<std::size_t>(a)];
            }
        return best;
    }
};

// Probability vector over the action alphabet, proportional to child visits.
struct TreePolicy {
    std::vector<double> probs;

    double sum() const {
        double s = 0.0;
        for (double p : probs) s += p;
        return s;
    }
};

struct Tree {
    ActionAlphabet alphabet;
    std::unique_ptr<TreeNode> root;
    bool summarized_ready = false;

    Tree() = default;
    Tree(ActionAlphabet a, std::unique_ptr<TreeNode> r) : alphabet(std::move(a)), root(std::move(r)) {}
    Tree(Tree&&) = default;
    Tree& operator=(Tree&&) = default;
};

// treePolicy extraction: child counts scaled by 1/visits, conditioned by a
// divide-by-max step, then renormalized to sum 1. The conditioning step does
// not change the result; it is kept as written in the update it mirrors.
inline TreePolicy tree_policy(const TreeNode& node, View v = View::original) {
    const auto& counts = node.child_visits_in(v);
    TreePolicy policy;
    policy.probs.assign(counts.size(), 0.0);

    std::int64_t total = 0;
    for (auto c : counts) total += c;
    if (total <= 0) return policy;

    const double denom =
        node.visits_in(v) > 0 ? static_cast<double>(node.visits_in(v)) : static_cast<double>(total);
    double max_p = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        policy.probs[i] = static_cast<double>(counts[i]) / denom;
        max_p = std::max(max_p, policy.probs[i]);
    }
    double sum = 0.0;
    for (double& p : policy.probs) {
        p /= max_p;
        sum += p;
    }
    for (double& p : policy.probs) p /= sum;
    return policy;
}

inline std::int64_t node_count(const TreeNode& node, View v = View::original) {
    std::int64_t n = 1;
    for (ActionId a = 0; a < node.alphabet_size(); ++a)
        if (const TreeNode* child = node.tree_child(a, v)) n += node_count(*child, v);
    return n;
}

inline std::int64_t node_count(const Tree& tree, View v = View::original) {
    return tree.root ? node_count(*tree.root, v) : 0;
}

// True max edge-depth below the node, by traversal (ignores the stored field).
inline int subtree_depth(const TreeNode& node, View v = View::original) {
    int deepest = -1;
    for (ActionId a = 0; a < node.alphabet_size(); ++a)
        if (const TreeNode* child = node.tree_child(a, v))
            deepest = std::max(deepest, subtree_depth(*child, v));
    return deepest + 1;
}

// True |A_in_use| below the node, by traversal.
inline int subtree_max_branching(const TreeNode& node, View v = View::original) {
    int best = std::max(1, node.tree_child_count(v));
    for (ActionId a = 0; a < node.alphabet_size(); ++a)
        if (const TreeNode* child = node.tree_child(a, v))
            best = std::max(best, subtree_max_branching(*child, v));
    return best;
}

inline std::string path_to_string(const std::vector<ActionId>& path) {
    if (path.empty()) return "/";
    std::string s;
    for (ActionId a : path) {
        s += '/';
        s += std::to_string(a);
    }
    return s;
}

// Action path from the root to a node, following parent pointers.
inline std::vector<ActionId> path_from_root(const TreeNode& node) {
    std::vector<ActionId> path;
    for (const TreeNode* n = &node; n->parent != nullptr; n = n->parent) path.push_back(n->action);
    return {path.rbegin(), path.rend()};
}

inline TreeNode* node_at_path(const Tree& tree, const std::vector<ActionId>& path,
                              View v = View::original) {
    TreeNode* node = tree.root.get();
    for (ActionId a : path) {
        if (node == nullptr) return nullptr;
        node = node->tree_child(a, v);
    }
    return node;
}

struct Violation {
    std::vector<ActionId> path;
    std::string message;

    std::string to_string() const { return path_to_string(path) + ": " + message; }
};

namespace detail {

inline void validate_node(const TreeNode& node, int alphabet_size, bool is_root, View v,
                          std::vector<ActionId>& path, std::vector<Violation>& out) {
    if (node.alphabet_size() != alphabet_size) {
        out.push_back({path, "child table size " + std::to_string(node.alphabet_size()) +
                                 " does not match alphabet size " + std::to_string(alphabet_size)});
        return;  // child slots are not trustworthy past this point
    }

    const auto& counts = node.child_visits_in(v);
    std::int64_t count_sum = 0;
    int used = 0;
    for (ActionId a = 0; a < alphabet_size; ++a) {
        const auto idx = static_cast<std::size_t>(a);
        const TreeNode* child = node.tree_child(a, v);
        count_sum += counts[idx];
        if (child != nullptr) ++used;
        if (counts[idx] > 0 && child == nullptr)
            out.push_back({path, "childNumberVisits[" + std::to_string(a) + "] = " +
                                     std::to_string(counts[idx]) + " but no child is stored there"});
        if (counts[idx] < 0)
            out.push_back({path, "negative childNumberVisits[" + std::to_string(a) + "]"});
        if (child != nullptr && child->action != a)
            out.push_back({path, "child stored under action " + std::to_string(a) +
                                     " carries action " + std::to_string(child->action)});
    }

    if (node.visits_in(v) >= 1 && used >= 1 && node.visits_in(v) != count_sum + 1)
        out.push_back({path, "numberVisits " + std::to_string(node.visits_in(v)) +
                                 " != sum(childNumberVisits) + 1 = " + std::to_string(count_sum + 1)});
    if (!is_root && node.visits_in(v) < 1)
        out.push_back({path, "non-root node with zero visits"});

    if (node.entropy_in(v) < 0.0)
        out.push_back({path, "negative entropy"});
    if (used == 0 && node.entropy_in(v) != 0.0)
        out.push_back({path, "leaf with nonzero entropy"});

    int deepest_child = -1;
    for (ActionId a = 0; a < alphabet_size; ++a)
        if (const TreeNode* child = node.tree_child(a, v))
            deepest_child = std::max(deepest_child, child->depth_in(v));
    if (node.depth_in(v) != deepest_child + 1)
        out.push_back({path, "depth " + std::to_string(node.depth_in(v)) + " != " +
                                 std::to_string(deepest_child + 1) + " (1 + max child depth)"});

    if (node.max_branching_in(v) < 1 || node.max_branching_in(v) > alphabet_size)
        out.push_back({path, "maxBranching " + std::to_string(node.max_branching_in(v)) +
                                 " outside [1, |A|]"});

    for (ActionId a = 0; a < alphabet_size; ++a) {
        const TreeNode* child = node.tree_child(a, v);
        if (child == nullptr) continue;
        if (child->visits_in(v) != counts[static_cast<std::size_t>(a)]) {
            path.push_back(a);
            out.push_back({path, "node visits " + std::to_string(child->visits_in(v)) +
                                     " != parent childNumberVisits entry " +
                                     std::to_string(counts[static_cast<std::size_t>(a)])});
            path.pop_back();
        }
        path.push_back(a);
        validate_node(*child, alphabet_size, false, v, path, out);
        path.pop_back();
    }
}

}  // namespace detail

// Structural invariant check. Empty result means every count, depth, entropy
// sign and parent/child relation holds throughout the (possibly summarized) tree.
inline std::vector<Violation> validate(const Tree& tree, View v = View::original) {
    std::vector<Violation> out;
    if (tree.root == nullptr) {
        out.push_back({{}, "tree has no root"});
        return out;
    }
    if (v == View::summarized && !tree.summarized_ready) {
        out.push_back({{}, "summarized fields were never initialized"});
        return out;
    }
    std::vector<ActionId> path;
    detail::validate_node(*tree.root, tree.alphabet.size, true, v, path, out);
    return out;
}

namespace detail {

inline std::unique_ptr<TreeNode> clone_node(const TreeNode& src, TreeNode* parent) {
    auto dst = std::make_unique<TreeNode>(src.alphabet_size());
    dst->action = src.action;
    dst->parent = parent;
    dst->reward = src.reward;
    dst->value = src.value;
    dst->value_sum = src.value_sum;
    dst->visits = src.visits;
    dst->child_visits = src.child_visits;
    dst->terminal = src.terminal;
    dst->terminal_value = src.terminal_value;
    dst->prior = src.prior;
    dst->entropy = src.entropy;
    dst->depth = src.depth;
    dst->max_branching = src.max_branching;
    for (ActionId a = 0; a < src.alphabet_size(); ++a) {
        const auto idx = static_cast<std::size_t>(a);
        if (src.children[idx])
            dst->children[idx] = clone_node(*src.children[idx], dst.get());
    }
    return dst;
}

}  // namespace detail

// Deep copy of the search-time fields (summarized mirrors are not copied;
// call init_summarized on the clone if reduction state is needed).
inline Tree clone(const Tree& tree) {
    Tree out;
    out.alphabet = tree.alphabet;
    if (tree.root) out.root = detail::clone_node(*tree.root, nullptr);
    return out;
}

namespace detail {

inline void init_summarized_node(TreeNode& node) {
    node.visits_summarized = node.visits;
    node.child_visits_summarized = node.child_visits;
    node.children_summarized.assign(static_cast<std::size_t>(node.alphabet_size()), nullptr);
    node.entropy_summarized = node.entropy;
    node.depth_summarized = node.depth;
    node.max_branching_summarized = node.max_branching;
    for (ActionId a = 0; a < node.alphabet_size(); ++a)
        if (TreeNode* child = node.tree_child(a, View::original)) {
            node.children_summarized[static_cast<std::size_t>(a)] = child;
            init_summarized_node(*child);
        }
}

}  // namespace detail

// Resets the summarized mirrors to the original tree. Reductions mutate only
// the mirrors, so calling this again rewinds any previous reduction.
inline void init_summarized(Tree& tree) {
    if (tree.root == nullptr) throw std::invalid_argument("init_summarized: empty tree");
    detail::init_summarized_node(*tree.root);
    tree.summarized_ready = true;
}

}  // namespace mcts_xray
