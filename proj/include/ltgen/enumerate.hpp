#pragma once

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ltgen/term.hpp"
#include "ltgen/type_system.hpp"

namespace ltgen {

using BigInt = boost::multiprecision::cpp_int;

namespace detail {

/// Non-owning type-erased callable reference. Breaks the template recursion
/// that nested continuation lambdas would otherwise cause.
template <class Sig>
class FnRef;

template <class R, class... Args>
class FnRef<R(Args...)> {
 public:
  template <class F>
  FnRef(F& f)  // NOLINT: implicit by design
      : obj_(&f), call_([](void* o, Args... a) -> R {
          return (*static_cast<F*>(o))(std::forward<Args>(a)...);
        }) {}
  R operator()(Args... a) const { return call_(obj_, std::forward<Args>(a)...); }

 private:
  void* obj_;
  R (*call_)(void*, Args...);
};

/// Depth-first enumeration of one term family with an exact unit budget.
///
/// Alternatives are explored in fixed clause order -- de Bruijn index
/// (0 first, then longer successor chains), then abstraction, then
/// application with all budget splits in recursion order -- so the output
/// stream is deterministic and matches the order of the backtracking
/// generators the counting sequences were produced with.
///
/// The budget is threaded like a difference list: a subterm may consume any
/// prefix of what is available unless `must` is set, in which case it has to
/// consume the budget exactly. `must` holds on the rightmost spine only,
/// which prunes every index choice there down to a single chain length.
///
/// For typed families, inference is interleaved: every node refines the
/// type demanded of it before children are explored, and the store is
/// rolled back when a choice point is exhausted (anticipated rejection).
class Generator {
 public:
  using Sink = std::function<bool(const Term&, const std::string&)>;

  Generator(TermClass cls, bool build_terms)
      : traits_(class_traits(cls)), build_(build_terms) {}

  /// Enumerates all terms of exactly `units` unit-size. Returns the number
  /// of solutions; invokes sink (when given) per solution in order. The
  /// sink returns false to stop early.
  unsigned long long run(int units, const Sink* sink, bool with_types) {
    count_ = 0;
    stopped_ = false;
    sink_ = sink;
    with_types_ = with_types;
    store_.clear();
    ambient_.clear();
    stack_.clear();
    root_ = traits_.typed ? store_.fresh_var() : 0;
    auto done = [&](int used) {
      (void)used;
      emit();
    };
    gen(units, /*must=*/true, /*neutral=*/false, nullptr, root_,
        FnRef<void(int)>(done));
    return count_;
  }

 private:
  // The binder environment is an immutable list threaded through calls and
  // continuations, exactly like the variable list of a backtracking
  // generator: the argument of an application must see the environment of
  // the application node even though its enumeration runs inside the
  // dynamic extent of the function subterm. Cells live on the C++ stack of
  // the abstraction frame that introduced them.
  struct EnvNode {
    TypeId type;
    const EnvNode* up;
    int depth;  // number of binders in this chain
  };

  static int depth_of(const EnvNode* env) { return env ? env->depth : 0; }

  void emit() {
    ++count_;
    if (!sink_) return;
    static const Term dummy = Term::index(0);
    const Term& t = build_ ? stack_.back() : dummy;
    std::string type;
    if (traits_.typed && with_types_) type = store_.display(root_);
    if (!(*sink_)(t, type)) stopped_ = true;
  }

  void gen(int avail, bool must, bool neutral, const EnvNode* env,
           TypeId demanded, FnRef<void(int)> k) {
    if (stopped_) return;
    gen_index(avail, must, env, demanded, k);
    if (!neutral && avail >= 1) gen_abs(avail, must, env, demanded, k);
    if (avail >= 2) gen_app(avail, must, env, demanded, k);
  }

  void gen_index(int avail, bool must, const EnvNode* env, TypeId demanded,
                 FnRef<void(int)> k) {
    int depth = depth_of(env);
    int lo = must ? avail : 0;
    const EnvNode* walk = env;
    for (int skip = 0; skip < lo && walk; ++skip) walk = walk->up;
    for (int idx = lo; idx <= avail && !stopped_; ++idx) {
      if (traits_.closed && idx >= depth) break;  // deeper indices unbound too
      if (traits_.typed) {
        TypeStore::Snapshot snap = store_.snapshot();
        size_t ambient_mark = ambient_.size();
        TypeId target;
        if (idx < depth) {
          target = walk->type;
        } else {
          size_t j = static_cast<size_t>(idx - depth);
          while (ambient_.size() <= j) ambient_.push_back(store_.fresh_var());
          target = ambient_[j];
        }
        if (store_.unify_occurs(demanded, target)) {
          yield_index(idx, k);
          store_.rollback(snap);
        }
        ambient_.resize(ambient_mark);
      } else {
        yield_index(idx, k);
      }
      if (walk) walk = walk->up;
    }
  }

  void yield_index(int idx, FnRef<void(int)>& k) {
    if (build_) stack_.push_back(Term::index(idx));
    k(idx);
    if (build_) stack_.pop_back();
  }

  void gen_abs(int avail, bool must, const EnvNode* env, TypeId demanded,
               FnRef<void(int)> k) {
    auto wrap = [&](int used) {
      if (build_) {
        Term body = std::move(stack_.back());
        stack_.pop_back();
        stack_.push_back(Term::abs(body));
        k(used + 1);
        stack_.pop_back();
        stack_.push_back(std::move(body));
      } else {
        k(used + 1);
      }
    };
    if (traits_.typed) {
      TypeStore::Snapshot snap = store_.snapshot();
      auto [lhs, rhs] = store_.demand_arrow(demanded);
      EnvNode extended{lhs, env, depth_of(env) + 1};
      gen(avail - 1, must, false, &extended, rhs, FnRef<void(int)>(wrap));
      store_.rollback(snap);
    } else {
      EnvNode extended{0, env, depth_of(env) + 1};
      gen(avail - 1, must, false, &extended, demanded,
          FnRef<void(int)>(wrap));
    }
  }

  void gen_app(int avail, bool must, const EnvNode* env, TypeId demanded,
               FnRef<void(int)> k) {
    TypeStore::Snapshot snap = store_.snapshot();
    TypeId arg_ty = 0;
    TypeId fun_ty = 0;
    if (traits_.typed) {
      arg_ty = store_.fresh_var();
      fun_ty = store_.make_arrow(arg_ty, demanded);
    }
    // in normal-form families every application is a neutral term, so its
    // function part is generated in the neutral state wherever it sits
    bool fun_neutral = traits_.normal_form;
    auto after_fun = [&](int used_fun) {
      auto after_arg = [&](int used_arg) {
        if (build_) {
          Term arg = std::move(stack_.back());
          stack_.pop_back();
          Term fun = std::move(stack_.back());
          stack_.pop_back();
          stack_.push_back(Term::app(fun, arg));
          k(used_fun + used_arg + 2);
          stack_.pop_back();
          stack_.push_back(std::move(fun));
          stack_.push_back(std::move(arg));
        } else {
          k(used_fun + used_arg + 2);
        }
      };
      gen(avail - 2 - used_fun, must, false, env, arg_ty,
          FnRef<void(int)>(after_arg));
    };
    gen(avail - 2, /*must=*/false, fun_neutral, env, fun_ty,
        FnRef<void(int)>(after_fun));
    if (traits_.typed) store_.rollback(snap);
  }

  ClassTraits traits_;
  bool build_;
  bool with_types_ = false;
  bool stopped_ = false;
  const Sink* sink_ = nullptr;
  unsigned long long count_ = 0;
  TypeStore store_;
  TypeId root_ = 0;
  std::vector<TypeId> ambient_;  // free-index types (plain typed classes)
  std::vector<Term> stack_;      // partial term under construction
};

}  // namespace detail

/// Streams every term of the class with exactly `units` unit-size, in the
/// canonical clause order, each exactly once. The sink returns false to
/// stop. For typed classes the second argument carries the principal type
/// display (empty when with_types is false).
inline void for_each_term(
    TermClass cls, int units,
    const std::function<bool(const Term&, const std::string&)>& sink,
    bool with_types = true) {
  if (units < 0) return;
  detail::Generator g(cls, /*build_terms=*/true);
  g.run(units, &sink, with_types);
}

struct EnumeratedTerm {
  Term term;
  std::string type;  // empty for untyped classes
};

/// Materializes the full enumeration at `units` (small sizes only).
inline std::vector<EnumeratedTerm> enumerate_terms(TermClass cls, int units,
                                                   bool with_types = true) {
  std::vector<EnumeratedTerm> out;
  for_each_term(
      cls, units,
      [&](const Term& t, const std::string& ty) {
        out.push_back({t, ty});
        return true;
      },
      with_types);
  return out;
}

/// Number of terms of the given natural size, by exhaustive enumeration.
/// Works for every class; the only way to count the typable families.
inline BigInt count_by_enumeration(TermClass cls, int natural_size) {
  if (natural_size <= 0) return 0;
  detail::Generator g(cls, /*build_terms=*/false);
  return BigInt(g.run(natural_size - 1, nullptr, false));
}

/// Memoized-recurrence counts for the three untyped classes; an
/// enumeration-free oracle. Throws std::invalid_argument for typable
/// classes, which admit no size-local recurrence.
inline BigInt count_dp(TermClass cls, int natural_size) {
  if (natural_size <= 0) return 0;
  int u = natural_size - 1;
  switch (cls) {
    case TermClass::plain: {
      // P(u) = 1 [index s^u(0)] + P(u-1) [abs] + sum P(i) P(u-2-i) [app]
      std::vector<BigInt> p(static_cast<size_t>(u) + 1);
      for (int n = 0; n <= u; ++n) {
        BigInt total = 1;
        if (n >= 1) total += p[static_cast<size_t>(n - 1)];
        for (int i = 0; i + 2 <= n; ++i)
          total += p[static_cast<size_t>(i)] * p[static_cast<size_t>(n - 2 - i)];
        p[static_cast<size_t>(n)] = total;
      }
      return p[static_cast<size_t>(u)];
    }
    case TermClass::closed: {
      // C(u, d): index iff u < d; abs C(u-1, d+1); app splits at depth d.
      // For d > u every index fits, so columns are clamped to d = u+1.
      std::vector<std::vector<BigInt>> c(static_cast<size_t>(u) + 1);
      auto get = [&](int n, int d) -> const BigInt& {
        return c[static_cast<size_t>(n)]
                [static_cast<size_t>(std::min(d, n + 1))];
      };
      for (int n = 0; n <= u; ++n) {
        c[static_cast<size_t>(n)].resize(static_cast<size_t>(n) + 2);
        for (int d = 0; d <= n + 1; ++d) {
          BigInt total = (n < d) ? 1 : 0;
          if (n >= 1) total += get(n - 1, d + 1);
          for (int i = 0; i + 2 <= n; ++i)
            total += get(i, d) * get(n - 2 - i, d);
          c[static_cast<size_t>(n)][static_cast<size_t>(d)] = total;
        }
      }
      return get(u, 0);
    }
    case TermClass::plain_nf: {
      // N(u) = M(u) + N(u-1);  M(u) = 1 + sum M(i) N(u-2-i)
      std::vector<BigInt> nf(static_cast<size_t>(u) + 1);
      std::vector<BigInt> ne(static_cast<size_t>(u) + 1);
      for (int n = 0; n <= u; ++n) {
        BigInt m = 1;
        for (int i = 0; i + 2 <= n; ++i)
          m += ne[static_cast<size_t>(i)] * nf[static_cast<size_t>(n - 2 - i)];
        ne[static_cast<size_t>(n)] = m;
        nf[static_cast<size_t>(n)] =
            m + (n >= 1 ? nf[static_cast<size_t>(n - 1)] : 0);
      }
      return nf[static_cast<size_t>(u)];
    }
    default:
      throw std::invalid_argument(
          "count_dp: no recurrence for typable classes");
  }
}

/// Exact count of terms of the given natural size: recurrence for the
/// untyped classes, exhaustive generation for the typable ones.
inline BigInt count(TermClass cls, int natural_size) {
  switch (cls) {
    case TermClass::plain:
    case TermClass::closed:
    case TermClass::plain_nf:
      return count_dp(cls, natural_size);
    default:
      return count_by_enumeration(cls, natural_size);
  }
}

/// Counting sequence of a class, indexed by natural size (counts[0] = 0).
struct CountTable {
  TermClass cls = TermClass::plain;
  std::vector<BigInt> counts;
};

inline CountTable count_table(TermClass cls, int upto_natural) {
  CountTable table;
  table.cls = cls;
  table.counts.reserve(static_cast<size_t>(upto_natural) + 1);
  for (int n = 0; n <= upto_natural; ++n)
    table.counts.push_back(count(cls, n));
  return table;
}

/// One row of the typability density table.
struct DensityRow {
  int size = 0;                   // natural size
  BigInt typed_count;             // closed simply-typed terms
  BigInt typed_nf_count;          // closed simply-typed normal forms
  double plain_per_typed = 0.0;   // plain / typed
  double nf_per_typed_nf = 0.0;   // normal forms / typed normal forms
  double density_ratio = 0.0;     // the two ratios divided
  bool ratios_valid = false;      // false when a denominator count is 0
};

/// Densities of the typed families inside the corresponding untyped ones,
/// for natural sizes 1..upto. Counts are exact, ratios double precision.
inline std::vector<DensityRow> density_table(int upto) {
  std::vector<DensityRow> rows;
  for (int n = 1; n <= upto; ++n) {
    DensityRow row;
    row.size = n;
    row.typed_count = count(TermClass::closed_typable, n);
    row.typed_nf_count = count(TermClass::closed_typable_nf, n);
    if (row.typed_count > 0 && row.typed_nf_count > 0) {
      row.ratios_valid = true;
      row.plain_per_typed = count_dp(TermClass::plain, n).convert_to<double>() /
                            row.typed_count.convert_to<double>();
      row.nf_per_typed_nf =
          count_dp(TermClass::plain_nf, n).convert_to<double>() /
          row.typed_nf_count.convert_to<double>();
      row.density_ratio = row.plain_per_typed / row.nf_per_typed_nf;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ltgen
