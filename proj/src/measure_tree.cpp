#include "maxbell/measure_tree.hpp"

#include <cmath>
#include <string>

#include "maxbell/errors.hpp"

namespace maxbell {

namespace {

void require_same_tree(const LeafFunction& a, const LeafFunction& b) {
  if (a.tree_handle() != b.tree_handle()) {
    throw StructuralError("leaf functions live on different trees");
  }
}

}  // namespace

TreeSpace::TreeSpace(std::vector<std::vector<NodeId>> children, std::vector<double> measure)
    : children_(std::move(children)), measure_(std::move(measure)) {
  const std::size_t n = measure_.size();
  if (n == 0) throw StructuralError("tree has no nodes");
  if (children_.size() != n) {
    throw StructuralError("children list count " + std::to_string(children_.size()) +
                          " does not match measure count " + std::to_string(n));
  }
  parent_.assign(n, std::nullopt);
  depth_.assign(n, 0);
  for (NodeId id = 0; id < n; ++id) {
    if (!std::isfinite(measure_[id]) || measure_[id] <= 0.0) {
      throw MeasureError("node " + std::to_string(id) + " has non-positive measure");
    }
    const auto& kids = children_[id];
    if (kids.size() == 1) {
      throw StructuralError("internal node " + std::to_string(id) + " has a single child");
    }
    double sum = 0.0;
    for (NodeId child : kids) {
      if (child >= n || child <= id) {
        throw StructuralError("child index " + std::to_string(child) + " of node " +
                              std::to_string(id) + " breaks topological order");
      }
      if (parent_[child]) {
        throw StructuralError("node " + std::to_string(child) + " has two parents");
      }
      parent_[child] = id;
      depth_[child] = depth_[id] + 1;
      sum += measure_[child];
    }
    if (!kids.empty() && std::abs(sum - measure_[id]) > kMeasureTolerance) {
      throw MeasureError("children of node " + std::to_string(id) +
                         " do not partition its measure");
    }
  }
  for (NodeId id = 1; id < n; ++id) {
    if (!parent_[id]) throw StructuralError("node " + std::to_string(id) + " is unreachable");
  }
  if (std::abs(measure_[0] - 1.0) > kMeasureTolerance) {
    throw MeasureError("root measure must be 1");
  }

  leaf_slot_.assign(n, n);
  for (NodeId id = 0; id < n; ++id) {
    max_depth_ = std::max(max_depth_, depth_[id]);
    if (children_[id].empty()) {
      leaf_slot_[id] = leaves_.size();
      leaves_.push_back(id);
    }
  }
  leaf_measures_.resize(static_cast<Eigen::Index>(leaves_.size()));
  for (std::size_t i = 0; i < leaves_.size(); ++i) {
    leaf_measures_[static_cast<Eigen::Index>(i)] = measure_[leaves_[i]];
  }
}

void TreeSpace::check_node(NodeId node) const {
  if (node >= measure_.size()) {
    throw StructuralError("unknown node " + std::to_string(node));
  }
}

std::optional<NodeId> TreeSpace::parent(NodeId node) const {
  check_node(node);
  return parent_[node];
}

std::span<const NodeId> TreeSpace::children(NodeId node) const {
  check_node(node);
  return children_[node];
}

double TreeSpace::measure(NodeId node) const {
  check_node(node);
  return measure_[node];
}

int TreeSpace::depth(NodeId node) const {
  check_node(node);
  return depth_[node];
}

bool TreeSpace::is_leaf(NodeId node) const {
  check_node(node);
  return children_[node].empty();
}

std::size_t TreeSpace::leaf_index(NodeId node) const {
  check_node(node);
  if (!children_[node].empty()) {
    throw StructuralError("node " + std::to_string(node) + " is not a leaf");
  }
  return leaf_slot_[node];
}

LeafFunction::LeafFunction(TreeHandle tree, Eigen::VectorXd values)
    : tree_(std::move(tree)), values_(std::move(values)) {
  if (!tree_) throw StructuralError("leaf function without a tree");
  if (static_cast<std::size_t>(values_.size()) != tree_->leaf_count()) {
    throw StructuralError("leaf function has " + std::to_string(values_.size()) +
                          " values for " + std::to_string(tree_->leaf_count()) + " leaves");
  }
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      throw DomainError("leaf value " + std::to_string(i) + " is negative or not finite");
    }
  }
}

LeafFunction LeafFunction::constant(TreeHandle tree, double value) {
  const auto n = static_cast<Eigen::Index>(tree->leaf_count());
  return LeafFunction(std::move(tree), Eigen::VectorXd::Constant(n, value));
}

TreeHandle build_uniform_tree(int depth, int arity) {
  if (depth < 1) throw DomainError("depth must be >= 1");
  if (arity < 2) throw DomainError("arity must be >= 2");
  constexpr double kMaxLeaves = 16777216.0;  // 2^24
  if (std::pow(static_cast<double>(arity), depth) > kMaxLeaves) {
    throw InstanceTooLargeError("arity^depth exceeds 2^24 leaves");
  }

  std::vector<std::vector<NodeId>> children(1);
  std::vector<double> measure{1.0};
  std::vector<NodeId> level{0};
  for (int d = 0; d < depth; ++d) {
    const double child_mass = std::pow(static_cast<double>(arity), -(d + 1));
    std::vector<NodeId> next;
    next.reserve(level.size() * static_cast<std::size_t>(arity));
    for (NodeId node : level) {
      for (int j = 0; j < arity; ++j) {
        const NodeId id = measure.size();
        children[node].push_back(id);
        children.emplace_back();
        measure.push_back(child_mass);
        next.push_back(id);
      }
    }
    level = std::move(next);
  }
  return std::make_shared<const TreeSpace>(std::move(children), std::move(measure));
}

SAlphaTree build_salpha(double alpha, int rank_cutoff) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  if (rank_cutoff < 1) throw DomainError("rank cutoff must be >= 1");
  if (rank_cutoff > 23) throw InstanceTooLargeError("2^rank_cutoff exceeds 2^23 S-nodes");

  SAlphaTree out;
  out.alpha = alpha;
  out.rank_cutoff = rank_cutoff;

  std::vector<std::vector<NodeId>> children(1);
  std::vector<double> measure{1.0};
  auto add = [&](NodeId parent, double mass, SAlphaNodeKind kind, int rank, NodeId owner) {
    const NodeId id = measure.size();
    children[parent].push_back(id);
    children.emplace_back();
    measure.push_back(mass);
    out.kind.push_back(kind);
    out.rank.push_back(rank);
    out.owner.push_back(kind == SAlphaNodeKind::kSNode ? id : owner);
    return id;
  };
  out.kind.push_back(SAlphaNodeKind::kSNode);
  out.rank.push_back(0);
  out.owner.push_back(0);

  const double half_keep = 0.5 * (1.0 - alpha);
  std::vector<NodeId> level{0};
  for (int m = 0; m < rank_cutoff; ++m) {
    // Closed form rather than repeated products keeps rank-m masses exact to rounding.
    const double node_mass = std::pow(half_keep, m);
    const double child_mass = std::pow(half_keep, m + 1);
    std::vector<NodeId> next;
    next.reserve(2 * level.size());
    for (NodeId node : level) {
      add(node, alpha * node_mass, SAlphaNodeKind::kAnnulus, m, node);
      next.push_back(add(node, child_mass, SAlphaNodeKind::kSNode, m + 1, 0));
      next.push_back(add(node, child_mass, SAlphaNodeKind::kSNode, m + 1, 0));
    }
    level = std::move(next);
  }
  const double tail_mass = 0.5 * std::pow(half_keep, rank_cutoff);
  for (NodeId node : level) {
    add(node, tail_mass, SAlphaNodeKind::kTail, rank_cutoff, node);
    add(node, tail_mass, SAlphaNodeKind::kTail, rank_cutoff, node);
  }
  out.tree = std::make_shared<const TreeSpace>(std::move(children), std::move(measure));
  return out;
}

Eigen::VectorXd node_integrals(const LeafFunction& phi, const LeafFunction& nu) {
  require_same_tree(phi, nu);
  const TreeSpace& tree = phi.tree();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(tree.node_count()));
  const auto leaves = tree.leaves();
  const Eigen::VectorXd& mass = tree.leaf_measures();
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    acc[static_cast<Eigen::Index>(leaves[i])] = phi.values()[k] * nu.values()[k] * mass[k];
  }
  for (NodeId id = tree.node_count(); id-- > 1;) {
    acc[static_cast<Eigen::Index>(*tree.parent(id))] += acc[static_cast<Eigen::Index>(id)];
  }
  return acc;
}

double node_integral(NodeId node, const LeafFunction& phi, const LeafFunction& nu) {
  require_same_tree(phi, nu);
  if (node >= phi.tree().node_count()) {
    throw StructuralError("unknown node " + std::to_string(node));
  }
  return node_integrals(phi, nu)[static_cast<Eigen::Index>(node)];
}

Eigen::VectorXd node_masses(const LeafFunction& nu) {
  return node_integrals(LeafFunction::constant(nu.tree_handle(), 1.0), nu);
}

LeafFunction maximal_function(const LeafFunction& phi, const LeafFunction& nu) {
  require_same_tree(phi, nu);
  const TreeSpace& tree = phi.tree();
  const Eigen::VectorXd integral = node_integrals(phi, nu);
  const Eigen::VectorXd mass = node_masses(nu);

  Eigen::VectorXd best(static_cast<Eigen::Index>(tree.node_count()));
  for (NodeId id = 0; id < tree.node_count(); ++id) {
    const auto k = static_cast<Eigen::Index>(id);
    if (!(mass[k] > 0.0)) {
      throw MeasureError("node " + std::to_string(id) + " has zero nu-mass");
    }
    const double average = integral[k] / mass[k];
    const auto parent = tree.parent(id);
    best[k] = parent ? std::max(best[static_cast<Eigen::Index>(*parent)], average) : average;
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(tree.leaf_count()));
  const auto leaves = tree.leaves();
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = best[static_cast<Eigen::Index>(leaves[i])];
  }
  return phi.with_values(std::move(out));
}

LeafFunction maximal_function(const LeafFunction& phi) {
  return maximal_function(phi, LeafFunction::constant(phi.tree_handle(), 1.0));
}

double integral_power(const LeafFunction& phi, double q, const LeafFunction& nu) {
  require_same_tree(phi, nu);
  return (phi.values().array().pow(q) * nu.values().array() *
          phi.tree().leaf_measures().array())
      .sum();
}

double integral_power(const LeafFunction& phi, double q) {
  return (phi.values().array().pow(q) * phi.tree().leaf_measures().array()).sum();
}

}  // namespace maxbell
