#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "ltgen/parallel_search.hpp"
#include "ltgen/type_system.hpp"

using namespace ltgen;

TEST_CASE("worker seeds are pairwise distinct and mixed") {
  std::set<uint64_t> seen;
  for (unsigned i = 0; i < 1024; ++i)
    seen.insert(derive_worker_seed(42, i));
  CHECK(seen.size() == 1024);
  CHECK(seen.count(42) == 0);
}

TEST_CASE("one worker reproduces the plain sampler on the derived seed") {
  ParallelConfig cfg;
  cfg.base = default_sampler_config(SampleClass::typed, 77);
  cfg.base.min_units = 8;
  cfg.base.max_units = 16;
  cfg.workers = 1;

  auto par = first_solution(cfg);
  REQUIRE(par.has_value());
  CHECK(par->winner == 0);

  SamplerConfig direct = cfg.base;
  direct.seed = derive_worker_seed(77, 0);
  auto seq = sample(direct);
  REQUIRE(seq.has_value());
  CHECK(print_term(par->result.term) == print_term(seq->term));
  CHECK(par->result.steps == seq->steps);
  CHECK(par->result.type == seq->type);
}

TEST_CASE("racing workers returns one valid result") {
  ParallelConfig cfg;
  cfg.base = default_sampler_config(SampleClass::typed, 5);
  cfg.base.min_units = 6;
  cfg.base.max_units = 14;
  cfg.workers = 4;
  for (int round = 0; round < 20; ++round) {
    cfg.base.seed = static_cast<uint64_t>(round);
    auto res = first_solution(cfg);
    REQUIRE(res.has_value());
    CHECK(is_closed(res->result.term));
    auto ty = principal_type(res->result.term);
    REQUIRE(ty.has_value());
    CHECK(*ty == res->result.type);
    CHECK(res->result.natural_size >= 7);
    CHECK(res->result.natural_size <= 15);
    CHECK(res->winner < 4);
    CHECK(res->attempts_total >= res->result.steps);
  }
}

TEST_CASE("stress: sixty-four workers on a trivial window") {
  ParallelConfig cfg;
  cfg.base = default_sampler_config(SampleClass::typed, 11);
  cfg.base.min_units = 0;
  cfg.base.max_units = 30;
  cfg.workers = 64;
  for (int round = 0; round < 20; ++round) {
    cfg.base.seed = static_cast<uint64_t>(round) * 7919;
    auto res = first_solution(cfg);
    REQUIRE(res.has_value());
    CHECK(is_closed(res->result.term));
    CHECK(principal_type(res->result.term) == res->result.type);
  }
}

TEST_CASE("exhaustion only when every worker exhausts") {
  ParallelConfig cfg;
  cfg.base = default_sampler_config(SampleClass::typed, 3);
  cfg.base.min_units = 0;
  cfg.base.max_units = 0;  // unsatisfiable
  cfg.base.max_steps = 200;
  cfg.workers = 8;
  auto res = first_solution(cfg);
  CHECK_FALSE(res.has_value());
}

TEST_CASE("normal-form class works through the parallel path") {
  ParallelConfig cfg;
  cfg.base = default_sampler_config(SampleClass::typed_nf, 13);
  cfg.base.min_units = 6;
  cfg.base.max_units = 14;
  cfg.workers = 3;
  auto res = first_solution(cfg);
  REQUIRE(res.has_value());
  CHECK(is_normal_form(res->result.term));
  CHECK(is_closed(res->result.term));
}
