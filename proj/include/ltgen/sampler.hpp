#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ltgen/analytic.hpp"
#include "ltgen/term.hpp"
#include "ltgen/type_system.hpp"

namespace ltgen {

/// Deterministic, platform-independent 64-bit generator (splitmix64).
/// Identical seeds give identical draw sequences everywhere. One uniform is
/// consumed per constructor decision and one per size unit.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

/// The splitmix64 output mix as a standalone hash; used to derive
/// statistically independent per-worker seeds from a base seed.
inline uint64_t splitmix64_mix(uint64_t v) {
  uint64_t z = v + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

enum class SampleClass { typed, typed_nf };

/// How the normal-form sampler branches.
///
/// grammar_faithful is the default: two mutually recursive states matching
/// the grammar N = M | lambda N, M = M N | D, so the function position of
/// an application is generated in the neutral state and the output is a
/// normal form by construction.
///
/// paper_flattened reproduces the published single-state recursion: one
/// draw is tested against the lambda and index cutoffs in turn, and both
/// application children are generated in that same state. That recursion
/// can build redexes, so completed terms failing the normal-form check are
/// rejected and count as a restart.
enum class NfMode { grammar_faithful, paper_flattened };

struct SamplerConfig {
  SampleClass cls = SampleClass::typed;
  // Accept when min_units <= final unit size <= max_units; the max is
  // enforced during construction, before each unit is consumed. Reported
  // natural size is units + 1.
  int min_units = 120;
  int max_units = 150;
  long long max_steps = 10000000;
  uint64_t seed = 0;
  NfMode nf_mode = NfMode::grammar_faithful;
  PlainThresholds plain;  // used when cls == typed
  NfThresholds nf;        // used when cls == typed_nf
};

/// Config with the published defaults for the class: thresholds calibrated
/// for expected natural size 120, size window [120,150] units for typed
/// terms and [60,80] units for typed normal forms, 10^7 restarts.
inline SamplerConfig default_sampler_config(SampleClass cls,
                                            uint64_t seed = 0) {
  SamplerConfig cfg;
  cfg.cls = cls;
  cfg.seed = seed;
  if (cls == SampleClass::typed) {
    cfg.plain = solve_for_target(Family::plain, 120.0).plain;
    cfg.min_units = 120;
    cfg.max_units = 150;
  } else {
    cfg.nf = solve_for_target(Family::nf, 120.0).nf;
    cfg.min_units = 60;
    cfg.max_units = 80;
  }
  return cfg;
}

struct SampleResult {
  Term term = Term::index(0);
  std::string type;          // principal type display
  long long natural_size = 0;
  long long steps = 0;       // attempts including the successful one
  uint64_t seed = 0;
};

namespace sampler_detail {

struct AttemptResult {
  Term term = Term::index(0);
  TypeId type = 0;
  int units = 0;
};

/// One top-down construction attempt for a closed typable term. Aborts
/// (nullopt) as soon as the unit budget would be exceeded, an index cannot
/// be bound (empty environment or occurs-check failure), leaving restart to
/// the caller. The environment walk in pick_index only offers binders in
/// scope, which is what makes every completed term closed.
template <class Rng>
class TypedAttempt {
 public:
  TypedAttempt(const PlainThresholds& th, int max_units, Rng& rng,
               TypeStore& store, std::vector<TypeId>& env)
      : th_(th), max_units_(max_units), rng_(rng), store_(store), env_(env) {}

  std::optional<AttemptResult> run() {
    store_.clear();
    env_.clear();
    units_ = 0;
    TypeId root = store_.fresh_var();
    double r = rng_.uniform();
    auto term = build(r, root);
    if (!term) return std::nullopt;
    return AttemptResult{std::move(*term), root, units_};
  }

 private:
  bool consume_unit() {
    if (units_ >= max_units_) return false;
    ++units_;
    return true;
  }

  std::optional<Term> build(double r, TypeId demanded) {
    if (r < th_.index_cum) {
      double r2 = rng_.uniform();
      return pick_index(r2, demanded);
    }
    if (r < th_.lambda_cum) {
      if (!consume_unit()) return std::nullopt;
      double r2 = rng_.uniform();
      auto [lhs, rhs] = store_.demand_arrow(demanded);
      env_.push_back(lhs);
      auto body = build(r2, rhs);
      env_.pop_back();
      if (!body) return std::nullopt;
      return Term::abs(std::move(*body));
    }
    if (!consume_unit()) return std::nullopt;
    double r1 = rng_.uniform();
    TypeId arg_ty = store_.fresh_var();
    TypeId fun_ty = store_.make_arrow(arg_ty, demanded);
    auto fun = build(r1, fun_ty);
    if (!fun) return std::nullopt;
    if (!consume_unit()) return std::nullopt;
    double r2 = rng_.uniform();
    auto arg = build(r2, arg_ty);
    if (!arg) return std::nullopt;
    return Term::app(std::move(*fun), std::move(*arg));
  }

  std::optional<Term> pick_index(double r, TypeId demanded) {
    size_t pos = 0;
    while (true) {
      if (pos >= env_.size()) return std::nullopt;  // ran out of binders
      if (r < th_.leaf) {
        TypeId target = env_[env_.size() - 1 - pos];
        if (!store_.unify_occurs(demanded, target)) return std::nullopt;
        return Term::index(static_cast<int>(pos));
      }
      if (!consume_unit()) return std::nullopt;
      r = rng_.uniform();
      ++pos;
    }
  }

  const PlainThresholds& th_;
  int max_units_;
  Rng& rng_;
  TypeStore& store_;
  std::vector<TypeId>& env_;
  int units_ = 0;
};

/// One attempt for a closed typable normal form, in either mode.
template <class Rng>
class NfAttempt {
 public:
  NfAttempt(const NfThresholds& th, int max_units, NfMode mode, Rng& rng,
            TypeStore& store, std::vector<TypeId>& env)
      : th_(th), max_units_(max_units), mode_(mode), rng_(rng), store_(store),
        env_(env) {}

  std::optional<AttemptResult> run() {
    store_.clear();
    env_.clear();
    units_ = 0;
    TypeId root = store_.fresh_var();
    double r = rng_.uniform();
    auto term = mode_ == NfMode::grammar_faithful ? build_normal(r, root)
                                                  : build_flat(r, root);
    if (!term) return std::nullopt;
    if (mode_ == NfMode::paper_flattened && !is_normal_form(*term))
      return std::nullopt;
    return AttemptResult{std::move(*term), root, units_};
  }

 private:
  bool consume_unit() {
    if (units_ >= max_units_) return false;
    ++units_;
    return true;
  }

  // State N: abstraction with probability x, otherwise a neutral term.
  std::optional<Term> build_normal(double r, TypeId demanded) {
    if (r < th_.lambda) {
      if (!consume_unit()) return std::nullopt;
      double r2 = rng_.uniform();
      auto [lhs, rhs] = store_.demand_arrow(demanded);
      env_.push_back(lhs);
      auto body = build_normal(r2, rhs);
      env_.pop_back();
      if (!body) return std::nullopt;
      return Term::abs(std::move(*body));
    }
    return build_neutral(rng_.uniform(), demanded);
  }

  // State M: an index with probability D/M, otherwise an application whose
  // function part is again neutral. No abstraction can appear here, so the
  // output never contains a redex.
  std::optional<Term> build_neutral(double r, TypeId demanded) {
    if (r < th_.index_m) {
      double r2 = rng_.uniform();
      return pick_index(r2, demanded);
    }
    if (!consume_unit()) return std::nullopt;
    double r1 = rng_.uniform();
    TypeId arg_ty = store_.fresh_var();
    TypeId fun_ty = store_.make_arrow(arg_ty, demanded);
    auto fun = build_neutral(r1, fun_ty);
    if (!fun) return std::nullopt;
    if (!consume_unit()) return std::nullopt;
    double r2 = rng_.uniform();
    auto arg = build_normal(r2, arg_ty);
    if (!arg) return std::nullopt;
    return Term::app(std::move(*fun), std::move(*arg));
  }

  // The published single-state recursion: one draw cascades through both
  // cutoffs, and both application children reuse this state.
  std::optional<Term> build_flat(double r, TypeId demanded) {
    if (r < th_.lambda) {
      if (!consume_unit()) return std::nullopt;
      double r2 = rng_.uniform();
      auto [lhs, rhs] = store_.demand_arrow(demanded);
      env_.push_back(lhs);
      auto body = build_flat(r2, rhs);
      env_.pop_back();
      if (!body) return std::nullopt;
      return Term::abs(std::move(*body));
    }
    if (r < th_.index_m) {
      double r2 = rng_.uniform();
      return pick_index(r2, demanded);
    }
    if (!consume_unit()) return std::nullopt;
    double r1 = rng_.uniform();
    TypeId arg_ty = store_.fresh_var();
    TypeId fun_ty = store_.make_arrow(arg_ty, demanded);
    auto fun = build_flat(r1, fun_ty);
    if (!fun) return std::nullopt;
    if (!consume_unit()) return std::nullopt;
    double r2 = rng_.uniform();
    auto arg = build_flat(r2, arg_ty);
    if (!arg) return std::nullopt;
    return Term::app(std::move(*fun), std::move(*arg));
  }

  std::optional<Term> pick_index(double r, TypeId demanded) {
    size_t pos = 0;
    while (true) {
      if (pos >= env_.size()) return std::nullopt;
      if (r < th_.leaf) {
        TypeId target = env_[env_.size() - 1 - pos];
        if (!store_.unify_occurs(demanded, target)) return std::nullopt;
        return Term::index(static_cast<int>(pos));
      }
      if (!consume_unit()) return std::nullopt;
      r = rng_.uniform();
      ++pos;
    }
  }

  const NfThresholds& th_;
  int max_units_;
  NfMode mode_;
  Rng& rng_;
  TypeStore& store_;
  std::vector<TypeId>& env_;
  int units_ = 0;
};

}  // namespace sampler_detail

/// Single construction attempt against a scripted or pseudo-random source;
/// exposed for tests and diagnostics. The store is cleared first and holds
/// the result type on success.
template <class Rng>
std::optional<sampler_detail::AttemptResult> run_typed_attempt(
    const PlainThresholds& th, int max_units, Rng& rng, TypeStore& store) {
  std::vector<TypeId> env;
  return sampler_detail::TypedAttempt<Rng>(th, max_units, rng, store, env)
      .run();
}

template <class Rng>
std::optional<sampler_detail::AttemptResult> run_nf_attempt(
    const NfThresholds& th, int max_units, NfMode mode, Rng& rng,
    TypeStore& store) {
  std::vector<TypeId> env;
  return sampler_detail::NfAttempt<Rng>(th, max_units, mode, rng, store, env)
      .run();
}

/// Boltzmann sampler with anticipated rejection and full-restart semantics:
/// any failure inside an attempt throws the whole attempt away, and the
/// random stream continues into the next one. A Sampler owns its store and
/// random source; instances are independent.
class Sampler {
 public:
  explicit Sampler(const SamplerConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  /// Runs attempts until one completes with min_units <= units (the max is
  /// enforced during construction), or max_steps attempts are spent
  /// (nullopt). `cancel`, when given, is polled once per attempt.
  /// `attempts_out` reports attempts performed regardless of outcome.
  std::optional<SampleResult> run(const std::atomic<bool>* cancel = nullptr,
                                  long long* attempts_out = nullptr) {
    long long attempts = 0;
    std::optional<SampleResult> out;
    for (long long step = 1; step <= cfg_.max_steps; ++step) {
      if (cancel && cancel->load(std::memory_order_relaxed)) break;
      ++attempts;
      std::optional<sampler_detail::AttemptResult> attempt;
      if (cfg_.cls == SampleClass::typed) {
        attempt = sampler_detail::TypedAttempt<SplitMix64>(
                      cfg_.plain, cfg_.max_units, rng_, store_, env_)
                      .run();
      } else {
        attempt = sampler_detail::NfAttempt<SplitMix64>(
                      cfg_.nf, cfg_.max_units, cfg_.nf_mode, rng_, store_, env_)
                      .run();
      }
      if (attempt && attempt->units >= cfg_.min_units) {
        out = SampleResult{std::move(attempt->term),
                           store_.display(attempt->type), attempt->units + 1,
                           step, cfg_.seed};
        break;
      }
    }
    if (attempts_out) *attempts_out = attempts;
    return out;
  }

  const SamplerConfig& config() const { return cfg_; }

 private:
  SamplerConfig cfg_;
  SplitMix64 rng_;
  TypeStore store_;
  std::vector<TypeId> env_;
};

/// Convenience one-shot: sample with the given config.
inline std::optional<SampleResult> sample(const SamplerConfig& cfg) {
  return Sampler(cfg).run();
}

}  // namespace ltgen
