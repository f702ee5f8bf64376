#pragma once

// Finite trees of cells on a probability space and the maximal operator they
// induce. A tree is stored as parallel arrays indexed by node id; ids are a
// topological order (parent id < child id) with the root at 0.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace maxbell {

using NodeId = std::size_t;

/// Absolute tolerance for structural measure identities.
inline constexpr double kMeasureTolerance = 1e-12;

class TreeSpace {
 public:
  /// Validates: root mass 1, positive masses, >= 2 children per internal node,
  /// children masses summing to the parent mass. Throws StructuralError or
  /// MeasureError.
  TreeSpace(std::vector<std::vector<NodeId>> children, std::vector<double> measure);

  std::size_t node_count() const noexcept { return measure_.size(); }
  std::size_t leaf_count() const noexcept { return leaves_.size(); }

  std::optional<NodeId> parent(NodeId node) const;
  std::span<const NodeId> children(NodeId node) const;
  double measure(NodeId node) const;
  int depth(NodeId node) const;
  int max_depth() const noexcept { return max_depth_; }
  bool is_leaf(NodeId node) const;

  /// Leaf node ids in increasing id order; leaf functions are indexed by
  /// position in this list.
  std::span<const NodeId> leaves() const noexcept { return leaves_; }
  std::size_t leaf_index(NodeId node) const;
  const Eigen::VectorXd& leaf_measures() const noexcept { return leaf_measures_; }

  /// Raw adjacency, as accepted by the constructor.
  const std::vector<std::vector<NodeId>>& adjacency() const noexcept { return children_; }

 private:
  void check_node(NodeId node) const;

  std::vector<std::vector<NodeId>> children_;
  std::vector<double> measure_;
  std::vector<std::optional<NodeId>> parent_;
  std::vector<int> depth_;
  std::vector<NodeId> leaves_;
  std::vector<std::size_t> leaf_slot_;
  Eigen::VectorXd leaf_measures_;
  int max_depth_ = 0;
};

using TreeHandle = std::shared_ptr<const TreeSpace>;

/// A nonnegative function constant on the leaves of a tree.
class LeafFunction {
 public:
  LeafFunction(TreeHandle tree, Eigen::VectorXd values);

  static LeafFunction constant(TreeHandle tree, double value);

  const TreeSpace& tree() const noexcept { return *tree_; }
  const TreeHandle& tree_handle() const noexcept { return tree_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t leaf) const { return values_[static_cast<Eigen::Index>(leaf)]; }

  /// Same tree, new values.
  LeafFunction with_values(Eigen::VectorXd values) const {
    return LeafFunction(tree_, std::move(values));
  }

 private:
  TreeHandle tree_;
  Eigen::VectorXd values_;
};

enum class SAlphaNodeKind { kSNode, kAnnulus, kTail };

/// Binary realization of the S_alpha family: every S-node I of rank m < cutoff
/// has an annulus leaf A_I of mass alpha*mu(I) and two S-children of mass
/// (1-alpha)*mu(I)/2. S-nodes at the cutoff rank stand for their whole
/// infinite subtree and are split into two equal tail leaves, so a leaf
/// function can match two moments of the tail exactly.
struct SAlphaTree {
  TreeHandle tree;
  double alpha = 0.0;
  int rank_cutoff = 0;
  std::vector<SAlphaNodeKind> kind;  // per node
  std::vector<int> rank;             // S-node rank; annulus/tail leaves carry the owner's rank
  std::vector<NodeId> owner;         // owning S-node for leaves, self for S-nodes
};

TreeHandle build_uniform_tree(int depth, int arity);

SAlphaTree build_salpha(double alpha, int rank_cutoff);

/// Integral over `node` of phi against nu dmu.
double node_integral(NodeId node, const LeafFunction& phi, const LeafFunction& nu);

/// node_integral for every node at once (bottom-up accumulation).
Eigen::VectorXd node_integrals(const LeafFunction& phi, const LeafFunction& nu);

/// Node masses under the measure nu dmu.
Eigen::VectorXd node_masses(const LeafFunction& nu);

/// x -> max over cells I containing x of (1/nu(I)) * int_I phi dnu.
LeafFunction maximal_function(const LeafFunction& phi, const LeafFunction& nu);

/// Unweighted maximal operator (nu == 1).
LeafFunction maximal_function(const LeafFunction& phi);

/// int_X phi^q nu dmu.
double integral_power(const LeafFunction& phi, double q, const LeafFunction& nu);
double integral_power(const LeafFunction& phi, double q);

}  // namespace maxbell
