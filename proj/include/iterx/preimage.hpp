#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "iterx/complex_roots.hpp"
#include "iterx/rational_map.hpp"

namespace iterx {

struct PreimageNode {
  int id = 0;
  int level = 0;
  int parent = -1;
  bool infinite = false;
  Complex z;
  std::optional<Rat> exact;    // set when the node is known to be this rational
  int local_multiplicity = 1;  // multiplicity as a root of its own fiber
  long multiplicity = 1;       // product of local multiplicities back to the root
  double parent_error = 0;     // |phi(z) - parent| / max(1, |parent|), 0 for exact nodes
  double radius = 0;           // certified distance to a true root of the fiber polynomial
};

struct PreimageOptions {
  RootOptions roots;
  double drop_tol = 1e-10;  // leading coefficients below this (relative) count as a degree drop
  long max_nodes = 1L << 16;
};

/// phi^-k(b) for k = 0..depth with parent links. Level k carries d^k roots
/// counted with multiplicity; fibers are sorted lexicographically.
class PreimageTree {
 public:
  PreimageTree(RatMap phi, ProjPoint<Rat> base, int depth, PreimageOptions opt = {})
      : phi_(std::move(phi)), base_(std::move(base)), opt_(opt) {
    if (phi_.degree() < 2) fail(ErrorCode::ConstantMap, "preimage trees need degree >= 2");
    if (depth < 0) fail(ErrorCode::InvalidInput, "negative depth");
    PreimageNode root;
    if (base_) {
      root.exact = *base_;
      root.z = base_->get_d();
    } else {
      root.infinite = true;
    }
    nodes_.push_back(root);
    levels_.push_back({0});
    children_.emplace_back();
    for (int k = 1; k <= depth; ++k) extend();
  }

  const RatMap& map() const { return phi_; }
  const ProjPoint<Rat>& base() const { return base_; }
  int depth() const { return static_cast<int>(levels_.size()) - 1; }
  const PreimageNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  const std::vector<PreimageNode>& nodes() const { return nodes_; }
  const std::vector<int>& level(int k) const { return levels_[static_cast<std::size_t>(k)]; }
  const std::vector<int>& children(int id) const { return children_[static_cast<std::size_t>(id)]; }

  /// Descendants of `id` exactly `k` levels below it.
  std::vector<int> descendants(int id, int k) const {
    std::vector<int> cur{id};
    for (int s = 0; s < k; ++s) {
      std::vector<int> next;
      for (int c : cur) {
        const auto& ch = children(c);
        next.insert(next.end(), ch.begin(), ch.end());
      }
      cur = std::move(next);
    }
    return cur;
  }

  long multiplicity_sum(int k) const {
    long s = 0;
    for (int id : level(k)) s += node(id).multiplicity;
    return s;
  }

  /// Largest |phi^k(z) - b| / max(1, |b|) over finite level-k nodes, evaluated in double precision.
  double forward_error(int k) const {
    double worst = 0;
    for (int id : level(k)) {
      const auto& nd = node(id);
      if (nd.infinite) continue;
      Complex x = nd.z;
      bool inf = false;
      for (int s = 0; s < k && !inf; ++s) {
        auto y = eval_complex(x);
        if (!y) inf = true;
        else x = *y;
      }
      if (inf != !base_) {
        worst = std::max(worst, 1.0);
        continue;
      }
      if (!inf) worst = std::max(worst, std::abs(x - nodes_[0].z) / std::max(1.0, std::abs(nodes_[0].z)));
    }
    return worst;
  }

  std::optional<Complex> eval_complex(Complex x) const {
    auto conv = [](const Rat& c) { return Complex(c.get_d()); };
    Complex g = phi_.den.eval_with(x, conv);
    Complex f = phi_.num.eval_with(x, conv);
    if (std::abs(g) == 0) return std::nullopt;
    return f / g;
  }

 private:
  void extend() {
    const int d = phi_.degree();
    std::vector<int> next;
    long count = static_cast<long>(nodes_.size());
    for (int pid : levels_.back()) {
      if (count + d > opt_.max_nodes) fail(ErrorCode::InvalidInput, "preimage tree exceeds the node budget");
      auto fiber = fiber_of(nodes_[static_cast<std::size_t>(pid)]);
      for (auto& child : fiber) {
        child.id = static_cast<int>(nodes_.size());
        child.level = depth() + 1;
        child.parent = pid;
        child.multiplicity = nodes_[static_cast<std::size_t>(pid)].multiplicity * child.local_multiplicity;
        children_[static_cast<std::size_t>(pid)].push_back(child.id);
        next.push_back(child.id);
        nodes_.push_back(child);
        children_.emplace_back();
        ++count;
      }
    }
    levels_.push_back(std::move(next));
  }

  std::vector<PreimageNode> fiber_of(const PreimageNode& parent) const {
    const int d = phi_.degree();
    std::vector<PreimageNode> out;
    int inf_mult = 0;
    if (parent.infinite || parent.exact) {
      Poly<Rat> p = parent.infinite ? phi_.den : phi_.num - (*parent.exact) * phi_.den;
      inf_mult = d - p.degree();
      if (p.degree() > 0)
        for (const auto& r : roots_certified(p, opt_.roots)) {
          PreimageNode c;
          c.z = r.z;
          c.local_multiplicity = r.multiplicity;
          c.radius = r.radius;
          if (auto q = recognize_rational_root(p, r.z)) {
            c.exact = *q;
            c.z = q->get_d();
            c.radius = 0;
          }
          out.push_back(c);
        }
    } else {
      auto conv = [](const Rat& c) { return Complex(c.get_d()); };
      Poly<Complex> f = phi_.num.map<Complex>(conv), g = phi_.den.map<Complex>(conv);
      std::vector<Complex> a = (f - parent.z * g).coeffs();
      double scale = 0;
      for (const auto& c : a) scale = std::max(scale, std::abs(c));
      while (!a.empty() && std::abs(a.back()) <= opt_.drop_tol * scale) a.pop_back();
      Poly<Complex> p(a);
      inf_mult = d - p.degree();
      if (p.degree() > 0)
        for (const auto& r : roots_certified(p, opt_.roots)) {
          PreimageNode c;
          c.z = r.z;
          c.local_multiplicity = r.multiplicity;
          c.radius = r.radius;
          auto y = eval_complex(r.z);
          c.parent_error = y ? std::abs(*y - parent.z) / std::max(1.0, std::abs(parent.z)) : 1.0;
          out.push_back(c);
        }
    }
    if (inf_mult > 0) {
      PreimageNode c;
      c.infinite = true;
      c.local_multiplicity = inf_mult;
      out.push_back(c);
    }
    return out;
  }

  RatMap phi_;
  ProjPoint<Rat> base_;
  PreimageOptions opt_;
  std::vector<PreimageNode> nodes_;
  std::vector<std::vector<int>> levels_;
  std::vector<std::vector<int>> children_;
};

inline PreimageTree preimage_tree(const RatMap& phi, const ProjPoint<Rat>& b, int depth, const PreimageOptions& opt = {}) {
  return PreimageTree(phi, b, depth, opt);
}

}  // namespace iterx
