#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mcts_xray/tree.hpp"

namespace mcts_xray {

// All entropies are in bits (log base 2) and 0*log(0) is taken as 0.

inline double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("binary_entropy: p must lie in [0, 1]");
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

inline double local_entropy(const TreePolicy& policy) {
    double h = 0.0;
    for (double p : policy.probs)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

namespace detail {

// Shared arithmetic for every incremental entropy update: treePolicy from the
// counts (scaled by 1/visits, conditioned by 1/max, renormalized to sum 1),
// then local entropy plus the policy-weighted child entropies. Removal
// predictions run the exact same sequence of operations, which is what makes
// prediction and post-removal state agree to the last bit.
template <typename ChildEntropyFn>
double entropy_over_counts(std::span<const std::int64_t> counts, std::int64_t visits,
                           ChildEntropyFn&& child_entropy) {
    std::int64_t total = 0;
    for (std::int64_t c : counts) total += c;
    if (total <= 0) return 0.0;

    const double denom = visits > 0 ? static_cast<double>(visits) : static_cast<double>(total);
    std::vector<double> policy(counts.size(), 0.0);
    double max_p = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        policy[i] = static_cast<double>(counts[i]) / denom;
        max_p = std::max(max_p, policy[i]);
    }
    double sum = 0.0;
    for (double& p : policy) {
        p /= max_p;
        sum += p;
    }

    double h_local = 0.0;
    double h_children = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double p = policy[i] / sum;
        if (p > 0.0) {
            h_local -= p * std::log2(p);
            h_children += p * child_entropy(static_cast<ActionId>(i));
        }
    }
    return h_local + h_children;
}

}  // namespace detail

// The back-propagation entropy step: recomputes a node's subtree entropy from
// its child counts and the children's (already current) entropies.
inline void update_entropy(TreeNode& node, View v = View::original) {
    const double h = detail::entropy_over_counts(
        node.child_visits_in(v), node.visits_in(v), [&](ActionId a) {
            const TreeNode* child = node.tree_child(a, v);
            return child != nullptr ? child->entropy_in(v) : 0.0;
        });
    if (v == View::original)
        node.entropy = h;
    else
        node.entropy_summarized = h;
}

// Reference implementation: full recursive descent, probabilities taken
// directly as count fractions. Every incremental and closed-form computation
// in this module is checked against this function. Deliberately shares no
// code with update_entropy.
inline double subtree_entropy_recursive(const TreeNode& node, View v = View::original) {
    const auto& counts = node.child_visits_in(v);
    std::int64_t total = 0;
    for (std::int64_t c : counts) total += c;
    if (total <= 0) return 0.0;

    double h_local = 0.0;
    double h_subtrees = 0.0;
    for (ActionId a = 0; a < node.alphabet_size(); ++a) {
        const std::int64_t c = counts[static_cast<std::size_t>(a)];
        if (c <= 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h_local -= p * std::log2(p);
        if (const TreeNode* child = node.tree_child(a, v))
            h_subtrees += p * subtree_entropy_recursive(*child, v);
    }
    return h_local + h_subtrees;
}

// Smallest edge-depth a subtree of n nodes can have when no node uses more
// than `branching` child actions; equals the true depth for full even trees
// and for single trajectories.
inline double depth_lower_bound(std::int64_t n, int branching) {
    if (n < 1) throw std::domain_error("depth_lower_bound: node count must be >= 1");
    if (branching < 1) throw std::domain_error("depth_lower_bound: branching must be >= 1");
    if (branching == 1) return static_cast<double>(n - 1);
    const double b = static_cast<double>(branching);
    return std::log2(static_cast<double>(n) * (b - 1.0) + 1.0) / std::log2(b) - 1.0;
}

struct EntropyReport {
    double entropy = 0.0;      // bits
    int depth = 0;             // edges
    double depth_lb = 0.0;
    double per_step_lower = 0.0;
    double per_step_upper = 0.0;
    int alphabet_used = 1;     // |A_in_use| over the subtree
};

// Brackets the per-step (per tree level) entropy: dividing by the true depth
// underestimates, dividing by the depth lower bound overestimates.
inline EntropyReport per_step_bounds(const TreeNode& node, View v = View::original) {
    EntropyReport r;
    r.entropy = node.entropy_in(v);
    r.depth = node.depth_in(v);
    r.alphabet_used = node.max_branching_in(v);
    r.depth_lb = depth_lower_bound(node_count(node, v), r.alphabet_used);
    if (r.depth == 0) {
        r.per_step_lower = 0.0;
        r.per_step_upper = 0.0;
        return r;
    }
    r.per_step_lower = r.entropy / static_cast<double>(r.depth);
    r.per_step_upper = r.depth_lb > 0.0 ? r.entropy / r.depth_lb : r.per_step_lower;
    return r;
}

// Local entropy after deleting one outcome and renormalizing the rest:
// (H(p) - H_b(p_k)) / (1 - p_k). Identical to recomputing the entropy of the
// renormalized remaining vector.
inline double local_entropy_after_full_removal(const TreePolicy& policy, ActionId k) {
    if (k < 0 || static_cast<std::size_t>(k) >= policy.probs.size())
        throw std::invalid_argument("local_entropy_after_full_removal: action out of range");
    const double p_k = policy.probs[static_cast<std::size_t>(k)];
    if (p_k == 0.0) return local_entropy(policy);
    if (p_k >= 1.0)
        throw std::domain_error(
            "local_entropy_after_full_removal: removing the only outcome leaves a point mass; "
            "the node becomes a leaf with entropy 0");
    return (local_entropy(policy) - binary_entropy(p_k)) / (1.0 - p_k);
}

// Subtree entropy of a node after removing child k (with its whole subtree)
// and renormalizing the remaining counts:
//   H~ = (H - H_b(p_k) - p_k * H_k) / (1 - p_k).
// Matches a from-scratch recomputation over the surviving children.
inline double node_entropy_after_child_removal(const TreeNode& node, ActionId k,
                                               View v = View::original) {
    const TreeNode* child = node.tree_child(k, v);
    if (child == nullptr)
        throw std::invalid_argument("node_entropy_after_child_removal: no such child in the tree");
    const TreePolicy policy = tree_policy(node, v);
    const double p_k = policy.probs[static_cast<std::size_t>(k)];
    if (p_k >= 1.0) return 0.0;  // only child removed; the node becomes a leaf
    return (node.entropy_in(v) - binary_entropy(p_k) - p_k * child->entropy_in(v)) / (1.0 - p_k);
}

// The same update as published (coefficient 1 on the removed child's entropy
// instead of p_k). Kept only so tests can pin down how far it drifts from the
// consistent form above; never used by the reduction path.
inline double uncorrected_child_removal_entropy(double node_entropy, double p_k,
                                                double child_entropy) {
    return node_entropy +
           (p_k * node_entropy - binary_entropy(p_k) - child_entropy) / (1.0 - p_k);
}

// Renormalization parameter of a parent's probability vector when child ell's
// own children lose removed_visits counts: p_hat = p~ * (p_ell - 1/N_p) with
// p~ the removed fraction of the child's children counts. The parent's new
// ell-probability is (p_ell - p_hat)/(1 - p_hat) and every sibling scales by
// 1/(1 - p_hat), exactly as direct count renormalization gives.
struct RenormParameter {
    double p_hat = 0.0;
    double p_ell = 0.0;
    std::int64_t removed_visits = 0;
};

inline RenormParameter renorm_parameter(const TreeNode& parent, ActionId ell,
                                        std::int64_t removed_visits, View v = View::original) {
    const TreeNode* child = parent.tree_child(ell, v);
    if (child == nullptr)
        throw std::invalid_argument("renorm_parameter: no such child in the tree");

    std::int64_t child_children_sum = 0;
    for (std::int64_t c : child->child_visits_in(v)) child_children_sum += c;
    if (removed_visits < 0 || removed_visits > child_children_sum)
        throw std::domain_error("renorm_parameter: removed visits exceed the child's children counts");

    std::int64_t parent_children_sum = 0;
    for (std::int64_t c : parent.child_visits_in(v)) parent_children_sum += c;

    RenormParameter r;
    r.removed_visits = removed_visits;
    r.p_ell = static_cast<double>(parent.child_visits_in(v)[static_cast<std::size_t>(ell)]) /
              static_cast<double>(parent_children_sum);
    const double p_tilde = child_children_sum > 0 ? static_cast<double>(removed_visits) /
                                                        static_cast<double>(child_children_sum)
                                                  : 0.0;
    r.p_hat = p_tilde * (r.p_ell - 1.0 / static_cast<double>(parent_children_sum));
    return r;
}

// Root entropy the tree would have after deleting the given children of the
// node at node_path. Pure prediction: recomputes the local entropy at the
// modified node over the surviving counts, then walks the path to the root
// updating one count slot per ancestor and recombining with the stored
// sibling entropies. O(|A| * path length), no mutation.
inline double predicted_root_entropy_after_removal(const Tree& tree,
                                                   const std::vector<ActionId>& node_path,
                                                   const std::vector<ActionId>& removed_children,
                                                   View v = View::original) {
    if (tree.root == nullptr)
        throw std::invalid_argument("predicted_root_entropy_after_removal: empty tree");

    std::vector<TreeNode*> chain;
    chain.push_back(tree.root.get());
    for (ActionId a : node_path) {
        TreeNode* next = chain.back()->tree_child(a, v);
        if (next == nullptr)
            throw std::invalid_argument("predicted_root_entropy_after_removal: path step " +
                                        std::to_string(a) + " is not in the tree");
        chain.push_back(next);
    }
    if (removed_children.empty()) return tree.root->entropy_in(v);

    TreeNode& node = *chain.back();
    std::int64_t removed_visits = 0;
    std::vector<std::int64_t> counts(node.child_visits_in(v).begin(),
                                     node.child_visits_in(v).end());
    for (ActionId k : removed_children) {
        if (node.tree_child(k, v) == nullptr)
            throw std::invalid_argument("predicted_root_entropy_after_removal: removed child " +
                                        std::to_string(k) + " is not in the tree");
        removed_visits += counts[static_cast<std::size_t>(k)];
        counts[static_cast<std::size_t>(k)] = 0;
    }

    std::int64_t total = 0;
    for (std::int64_t c : counts) total += c;
    double h = detail::entropy_over_counts(counts, total + 1, [&](ActionId a) {
        const TreeNode* child = node.tree_child(a, v);
        return child != nullptr ? child->entropy_in(v) : 0.0;
    });

    for (int i = static_cast<int>(chain.size()) - 2; i >= 0; --i) {
        TreeNode& ancestor = *chain[static_cast<std::size_t>(i)];
        const ActionId step = node_path[static_cast<std::size_t>(i)];
        counts.assign(ancestor.child_visits_in(v).begin(), ancestor.child_visits_in(v).end());
        counts[static_cast<std::size_t>(step)] -= removed_visits;
        total = 0;
        for (std::int64_t c : counts) total += c;
        const double h_below = h;
        h = detail::entropy_over_counts(counts, total + 1, [&](ActionId a) {
            if (a == step) return h_below;
            const TreeNode* child = ancestor.tree_child(a, v);
            return child != nullptr ? child->entropy_in(v) : 0.0;
        });
    }
    return h;
}

// Published single-step propagation of an entropy change to the parent. Like
// uncorrected_child_removal_entropy this exists for documentation tests only;
// the prediction path above recomputes exactly instead.
inline double uncorrected_propagated_entropy(double node_entropy, double p_hat, double p_ell,
                                             double child_entropy_new, double child_entropy_old) {
    return node_entropy + (p_hat * node_entropy - binary_entropy(p_hat) +
                           (p_ell - p_hat) * (child_entropy_new - child_entropy_old)) /
                              (1.0 - p_hat);
}

}  // namespace mcts_xray
