#pragma once

#include <cassert>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ltgen/term.hpp"

namespace ltgen {

/// Handle into a TypeStore. Valid only while the node it names is live
/// (i.e. until a rollback past its creation point).
using TypeId = uint32_t;

/// Simple types: type variables and right-associative arrows, held in a
/// store with destructive unification and an undo trail.
///
/// Binding a variable pushes its id on the trail; rollback(snapshot) unbinds
/// everything bound since the snapshot and releases nodes created since, so
/// a backtracking search can take a snapshot at each choice point and undo
/// in O(work since the snapshot). No path compression is performed: chains
/// are only ever shortened by rollback, never rewritten, which keeps undo
/// exact.
class TypeStore {
 public:
  struct Snapshot {
    uint32_t trail_size;
    uint32_t node_count;
  };

  TypeStore() { nodes_.reserve(256); }

  /// A type variable never bound before (fresh for the current horizon).
  TypeId fresh_var() {
    nodes_.push_back(Node{Tag::unbound, 0, 0});
    return static_cast<TypeId>(nodes_.size() - 1);
  }

  TypeId make_arrow(TypeId lhs, TypeId rhs) {
    nodes_.push_back(Node{Tag::arrow, lhs, rhs});
    return static_cast<TypeId>(nodes_.size() - 1);
  }

  bool is_arrow(TypeId t) const { return nodes_[t].tag == Tag::arrow; }
  TypeId arrow_lhs(TypeId t) const { return nodes_[t].a; }
  TypeId arrow_rhs(TypeId t) const { return nodes_[t].b; }

  /// Follows bound-variable links to the representative node.
  TypeId resolve(TypeId t) const {
    while (nodes_[t].tag == Tag::bound) t = nodes_[t].a;
    return t;
  }

  Snapshot snapshot() const {
    return {static_cast<uint32_t>(trail_.size()),
            static_cast<uint32_t>(nodes_.size())};
  }

  /// Restores the binding state at snapshot time. Nodes created after the
  /// snapshot are released; their ids must not be used afterwards.
  void rollback(Snapshot snap) {
    while (trail_.size() > snap.trail_size) {
      nodes_[trail_.back()].tag = Tag::unbound;
      trail_.pop_back();
    }
    nodes_.resize(snap.node_count);
  }

  void clear() {
    nodes_.clear();
    trail_.clear();
  }

  size_t live_nodes() const { return nodes_.size(); }
  size_t trail_size() const { return trail_.size(); }

  /// Unification with occurs check. On success the store holds the most
  /// general unifier; on failure all bindings made by this call are undone.
  bool unify_occurs(TypeId a, TypeId b) {
    Snapshot snap = snapshot();
    if (unify_rec(a, b)) return true;
    rollback(snap);
    return false;
  }

  /// Views t as an arrow: decomposes a bound arrow, or binds an unbound
  /// variable to a fresh arrow (recorded on the trail). This is how an
  /// abstraction node refines the type demanded of it; no occurs check is
  /// needed because the two sides of the new arrow are fresh.
  std::pair<TypeId, TypeId> demand_arrow(TypeId t) {
    t = resolve(t);
    if (nodes_[t].tag == Tag::arrow) return {nodes_[t].a, nodes_[t].b};
    TypeId lhs = fresh_var();
    TypeId rhs = fresh_var();
    TypeId arrow = make_arrow(lhs, rhs);
    bind(t, arrow);
    return {lhs, rhs};
  }

  /// Renders the resolved type with unresolved variables lettered A, B, C,
  /// ... in first-occurrence order (A1, B1, ... past 26). Arrows are
  /// right-associative; arrow types are parenthesized, bare variables not.
  /// Two types are equal up to variable renaming iff displays are equal.
  std::string display(TypeId t) const {
    std::vector<TypeId> seen;
    std::string out;
    display_rec(t, seen, out, /*paren_arrow=*/true);
    return out;
  }

 private:
  enum class Tag : uint8_t { unbound, bound, arrow };
  struct Node {
    Tag tag;
    TypeId a;  // bound: target; arrow: lhs
    TypeId b;  // arrow: rhs
  };

  void bind(TypeId var, TypeId target) {
    assert(nodes_[var].tag == Tag::unbound);
    nodes_[var].tag = Tag::bound;
    nodes_[var].a = target;
    trail_.push_back(var);
  }

  bool unify_rec(TypeId a, TypeId b) {
    a = resolve(a);
    b = resolve(b);
    if (a == b) return true;
    if (nodes_[a].tag == Tag::unbound) {
      if (occurs(a, b)) return false;
      bind(a, b);
      return true;
    }
    if (nodes_[b].tag == Tag::unbound) {
      if (occurs(b, a)) return false;
      bind(b, a);
      return true;
    }
    // both arrows
    return unify_rec(nodes_[a].a, nodes_[b].a) &&
           unify_rec(nodes_[a].b, nodes_[b].b);
  }

  // var must be resolved and unbound; t resolved.
  bool occurs(TypeId var, TypeId t) const {
    scratch_.clear();
    scratch_.push_back(t);
    while (!scratch_.empty()) {
      TypeId cur = resolve(scratch_.back());
      scratch_.pop_back();
      if (cur == var) return true;
      if (nodes_[cur].tag == Tag::arrow) {
        scratch_.push_back(nodes_[cur].a);
        scratch_.push_back(nodes_[cur].b);
      }
    }
    return false;
  }

  // Arrows are parenthesized at top level and as the left operand of an
  // arrow; right operands chain without parens (right associativity).
  void display_rec(TypeId t, std::vector<TypeId>& seen, std::string& out,
                   bool paren_arrow) const {
    t = resolve(t);
    if (nodes_[t].tag != Tag::arrow) {
      size_t i = 0;
      while (i < seen.size() && seen[i] != t) ++i;
      if (i == seen.size()) seen.push_back(t);
      out += static_cast<char>('A' + i % 26);
      if (i >= 26) out += std::to_string(i / 26);
      return;
    }
    if (paren_arrow) out += '(';
    display_rec(nodes_[t].a, seen, out, true);
    out += "->";
    display_rec(nodes_[t].b, seen, out, false);
    if (paren_arrow) out += ')';
  }

  std::vector<Node> nodes_;
  std::vector<TypeId> trail_;
  mutable std::vector<TypeId> scratch_;
};

/// Principal-type inference for closed terms: returns the type of t in
/// store, or nullopt when t has a free index or is untypable. All
/// unifications run with the occurs check, so cyclic (infinite) types are
/// rejected, e.g. self-application.
inline std::optional<TypeId> infer_type(const Term& t, TypeStore& store) {
  struct Rec {
    TypeStore& store;
    std::vector<TypeId> env;
    std::optional<TypeId> go(const Term& t) {
      switch (t.kind()) {
        case Term::Kind::index: {
          int k = t.var_index();
          if (k >= static_cast<int>(env.size())) return std::nullopt;
          return env[env.size() - 1 - static_cast<size_t>(k)];
        }
        case Term::Kind::abs: {
          TypeId arg = store.fresh_var();
          env.push_back(arg);
          auto body = go(t.body());
          env.pop_back();
          if (!body) return std::nullopt;
          return store.make_arrow(arg, *body);
        }
        case Term::Kind::app: {
          auto fun = go(t.fun());
          if (!fun) return std::nullopt;
          auto arg = go(t.arg());
          if (!arg) return std::nullopt;
          TypeId result = store.fresh_var();
          if (!store.unify_occurs(*fun, store.make_arrow(*arg, result)))
            return std::nullopt;
          return result;
        }
      }
      return std::nullopt;
    }
  };
  Rec rec{store, {}};
  return rec.go(t);
}

/// Inference for possibly-open terms: free indices draw fresh variables
/// from a shared ambient environment, so all occurrences of the same free
/// index must agree on one type (typability in some environment).
inline std::optional<TypeId> infer_type_plain(const Term& t,
                                              TypeStore& store) {
  struct Rec {
    TypeStore& store;
    std::vector<TypeId> env;
    std::vector<TypeId> ambient;
    std::optional<TypeId> go(const Term& t) {
      switch (t.kind()) {
        case Term::Kind::index: {
          int k = t.var_index();
          if (k < static_cast<int>(env.size()))
            return env[env.size() - 1 - static_cast<size_t>(k)];
          size_t j = static_cast<size_t>(k) - env.size();
          while (ambient.size() <= j) ambient.push_back(store.fresh_var());
          return ambient[j];
        }
        case Term::Kind::abs: {
          TypeId arg = store.fresh_var();
          env.push_back(arg);
          auto body = go(t.body());
          env.pop_back();
          if (!body) return std::nullopt;
          return store.make_arrow(arg, *body);
        }
        case Term::Kind::app: {
          auto fun = go(t.fun());
          if (!fun) return std::nullopt;
          auto arg = go(t.arg());
          if (!arg) return std::nullopt;
          TypeId result = store.fresh_var();
          if (!store.unify_occurs(*fun, store.make_arrow(*arg, result)))
            return std::nullopt;
          return result;
        }
      }
      return std::nullopt;
    }
  };
  Rec rec{store, {}, {}};
  return rec.go(t);
}

/// Convenience wrapper: display of the principal type, or nullopt.
inline std::optional<std::string> principal_type(const Term& t) {
  TypeStore store;
  auto ty = infer_type(t, store);
  if (!ty) return std::nullopt;
  return store.display(*ty);
}

inline std::optional<std::string> principal_type_plain(const Term& t) {
  TypeStore store;
  auto ty = infer_type_plain(t, store);
  if (!ty) return std::nullopt;
  return store.display(*ty);
}

}  // namespace ltgen
