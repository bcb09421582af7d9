// Command-line front end: exact counting, exhaustive enumeration, density
// tables, sampler calibration, and random generation of closed simply-typed
// lambda terms in de Bruijn form.
//
// Size conventions: count/enumerate/densities take natural sizes (every
// constructor weighs 1); sample --min/--max are unit sizes (arity weights),
// matching the counters the sampler runs on. A sample of final unit size u
// reports natural size u + 1.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ltgen/ltgen.hpp"

namespace {

using nlohmann::json;

enum ExitStatus : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_exhausted = 2,
  exit_usage = 3,
  exit_parse = 4,
};

std::string full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Ratios in the density table are truncated to three decimals, matching the
// published table (5.666, not 5.667).
std::string ratio3(double v, bool valid) {
  if (!valid) return "na";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", std::trunc(v * 1000.0) / 1000.0);
  return buf;
}

int run_count(const std::string& cls_name, int size, bool upto) {
  ltgen::TermClass cls;
  if (!ltgen::term_class_from_string(cls_name, cls)) {
    std::cerr << "unknown class: " << cls_name << "\n";
    return exit_usage;
  }
  if (upto) {
    ltgen::CountTable table = ltgen::count_table(cls, size);
    for (int n = 0; n <= size; ++n)
      std::cout << n << " " << table.counts[static_cast<size_t>(n)] << "\n";
  } else {
    std::cout << ltgen::count(cls, size) << "\n";
  }
  return exit_ok;
}

int run_enumerate(const std::string& cls_name, int size, bool with_types) {
  ltgen::TermClass cls;
  if (!ltgen::term_class_from_string(cls_name, cls)) {
    std::cerr << "unknown class: " << cls_name << "\n";
    return exit_usage;
  }
  if (size < 1) return exit_ok;
  ltgen::for_each_term(
      cls, size - 1,
      [&](const ltgen::Term& t, const std::string& type) {
        std::cout << ltgen::print_term(t);
        if (with_types && !type.empty()) std::cout << "\t" << type;
        std::cout << "\n";
        return true;
      },
      with_types);
  return exit_ok;
}

int run_densities(int upto, const std::string& format) {
  auto rows = ltgen::density_table(upto);
  if (format == "csv") {
    std::cout << "size,A,B,C,D,E\n";
    for (const auto& r : rows)
      std::cout << r.size << "," << r.typed_count << ","
                << ratio3(r.plain_per_typed, r.ratios_valid) << ","
                << r.typed_nf_count << ","
                << ratio3(r.nf_per_typed_nf, r.ratios_valid) << ","
                << ratio3(r.density_ratio, r.ratios_valid) << "\n";
  } else if (format == "text") {
    std::printf("%5s %12s %10s %12s %10s %8s\n", "size", "typed",
                "plain/typed", "typed-nf", "nf/t-nf", "ratio");
    for (const auto& r : rows)
      std::printf("%5d %12s %10s %12s %10s %8s\n", r.size,
                  r.typed_count.str().c_str(),
                  ratio3(r.plain_per_typed, r.ratios_valid).c_str(),
                  r.typed_nf_count.str().c_str(),
                  ratio3(r.nf_per_typed_nf, r.ratios_valid).c_str(),
                  ratio3(r.density_ratio, r.ratios_valid).c_str());
  } else {  // json
    json out = json::array();
    for (const auto& r : rows) {
      json row;
      row["size"] = r.size;
      row["typed"] = r.typed_count.str();
      row["typed_nf"] = r.typed_nf_count.str();
      if (r.ratios_valid) {
        row["plain_per_typed"] = r.plain_per_typed;
        row["nf_per_typed_nf"] = r.nf_per_typed_nf;
        row["density_ratio"] = r.density_ratio;
      }
      out.push_back(row);
    }
    std::cout << out.dump(2) << "\n";
  }
  return exit_ok;
}

void write_config(const std::string& path, const ltgen::TuningResult& t) {
  std::ofstream out(path);
  out << "family=" << (t.family == ltgen::Family::plain ? "plain" : "nf")
      << "\n";
  out << "x=" << full(t.x) << "\n";
  if (t.family == ltgen::Family::plain) {
    out << "t_index=" << full(t.plain.index_cum) << "\n";
    out << "t_lambda=" << full(t.plain.lambda_cum) << "\n";
    out << "t_leaf=" << full(t.plain.leaf) << "\n";
  } else {
    out << "nf_lambda=" << full(t.nf.lambda) << "\n";
    out << "nf_index=" << full(t.nf.index_m) << "\n";
    out << "nf_leaf=" << full(t.nf.leaf) << "\n";
  }
}

int run_tune(const std::string& cls_name, double target, double tolerance,
             const std::string& emit_path) {
  ltgen::Family family;
  if (cls_name == "plain") family = ltgen::Family::plain;
  else if (cls_name == "nf") family = ltgen::Family::nf;
  else {
    std::cerr << "unknown class: " << cls_name << " (expected plain|nf)\n";
    return exit_usage;
  }
  ltgen::TuningResult t = ltgen::solve_for_target(family, target, tolerance);
  std::cout << "class=" << cls_name << "\n";
  std::cout << "x=" << full(t.x) << "\n";
  std::cout << "rho=" << full(t.rho) << "\n";
  std::cout << "expected_size_units=" << full(t.expected_units) << "\n";
  std::cout << "expected_natural_size=" << full(t.expected_units + 1.0)
            << "\n";
  std::cout << "std_dev_units=" << full(t.std_dev_units) << "\n";
  if (family == ltgen::Family::plain) {
    std::cout << "t_index=" << full(t.plain.index_cum) << "\n";
    std::cout << "t_lambda=" << full(t.plain.lambda_cum) << "\n";
    std::cout << "t_leaf=" << full(t.plain.leaf) << "\n";
  } else {
    std::cout << "nf_lambda=" << full(t.nf.lambda) << "\n";
    std::cout << "nf_index=" << full(t.nf.index_m) << "\n";
    std::cout << "nf_leaf=" << full(t.nf.leaf) << "\n";
  }
  if (!emit_path.empty()) write_config(emit_path, t);
  return exit_ok;
}

// key=value lines as written by tune --emit.
std::optional<std::map<std::string, std::string>> read_config(
    const std::string& path, std::string& error) {
  std::ifstream in(path);
  if (!in) {
    error = "cannot open " + path;
    return std::nullopt;
  }
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      error = path + ":" + std::to_string(lineno) + ": expected key=value";
      return std::nullopt;
    }
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

bool config_double(const std::map<std::string, std::string>& kv,
                   const std::string& key, double& out, std::string& error) {
  auto it = kv.find(key);
  if (it == kv.end()) {
    error = "missing key: " + key;
    return false;
  }
  try {
    size_t used = 0;
    out = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    error = "bad value for " + key + ": " + it->second;
    return false;
  }
  return true;
}

int run_sample(const std::string& cls_name, std::optional<int> min_units,
               std::optional<int> max_units, long long max_steps,
               uint64_t seed, const std::string& nf_mode_name, bool as_json,
               std::optional<unsigned> threads,
               const std::string& config_path) {
  ltgen::SampleClass cls;
  if (cls_name == "typed") cls = ltgen::SampleClass::typed;
  else if (cls_name == "typed-nf") cls = ltgen::SampleClass::typed_nf;
  else {
    std::cerr << "unknown class: " << cls_name
              << " (expected typed|typed-nf)\n";
    return exit_usage;
  }

  ltgen::SamplerConfig cfg = ltgen::default_sampler_config(cls, seed);
  cfg.max_steps = max_steps;
  if (min_units) cfg.min_units = *min_units;
  if (max_units) cfg.max_units = *max_units;
  if (cfg.min_units > cfg.max_units) {
    std::cerr << "--min must not exceed --max\n";
    return exit_usage;
  }
  if (nf_mode_name == "faithful") cfg.nf_mode = ltgen::NfMode::grammar_faithful;
  else if (nf_mode_name == "paper") cfg.nf_mode = ltgen::NfMode::paper_flattened;
  else {
    std::cerr << "unknown nf-mode: " << nf_mode_name << "\n";
    return exit_usage;
  }

  if (!config_path.empty()) {
    std::string error;
    auto kv = read_config(config_path, error);
    if (!kv) {
      std::cerr << "config parse error: " << error << "\n";
      return exit_parse;
    }
    std::string want = cls == ltgen::SampleClass::typed ? "plain" : "nf";
    auto fam = kv->find("family");
    if (fam == kv->end() || fam->second != want) {
      std::cerr << "config parse error: family must be " << want
                << " for class " << cls_name << "\n";
      return exit_parse;
    }
    bool ok = cls == ltgen::SampleClass::typed
                  ? config_double(*kv, "t_index", cfg.plain.index_cum, error) &&
                        config_double(*kv, "t_lambda", cfg.plain.lambda_cum,
                                      error) &&
                        config_double(*kv, "t_leaf", cfg.plain.leaf, error)
                  : config_double(*kv, "nf_lambda", cfg.nf.lambda, error) &&
                        config_double(*kv, "nf_index", cfg.nf.index_m, error) &&
                        config_double(*kv, "nf_leaf", cfg.nf.leaf, error);
    if (!ok) {
      std::cerr << "config parse error: " << error << "\n";
      return exit_parse;
    }
  }

  std::optional<ltgen::SampleResult> result;
  std::optional<unsigned> winner;
  std::optional<double> elapsed_ms;
  if (threads) {
    ltgen::ParallelConfig pc;
    pc.base = cfg;
    pc.workers = *threads;
    auto pr = ltgen::first_solution(pc);
    if (pr) {
      result = pr->result;
      winner = pr->winner;
      elapsed_ms = pr->elapsed_ms;
    }
  } else {
    result = ltgen::sample(cfg);
  }

  if (!result) {
    std::cerr << "exhausted " << cfg.max_steps
              << " attempts without an accepted term\n";
    return exit_exhausted;
  }

  if (as_json) {
    json out;
    out["term"] = ltgen::print_term(result->term);
    out["type"] = result->type;
    out["natural_size"] = result->natural_size;
    out["steps"] = result->steps;
    out["seed"] = result->seed;
    if (winner) out["winner"] = *winner;
    if (elapsed_ms) out["elapsed_ms"] = *elapsed_ms;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "term: " << ltgen::print_term(result->term) << "\n";
    std::cout << "type: " << result->type << "\n";
    std::cout << "size: " << result->natural_size << "\n";
    std::cout << "steps: " << result->steps << "\n";
    std::cout << "seed: " << result->seed << "\n";
    if (winner) std::cout << "winner: " << *winner << "\n";
    if (elapsed_ms) std::cout << "elapsed_ms: " << *elapsed_ms << "\n";
  }
  return exit_ok;
}

// Golden self-check: the published counting sequences, density rows and
// sampler constants, reported one line per item.
int run_selftest() {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok,
                    const std::string& detail = "") {
    std::cout << (ok ? "ok   " : "FAIL ") << name;
    if (!ok && !detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  };

  auto check_sequence = [&](const std::string& name, ltgen::TermClass cls,
                            const std::vector<long long>& expect) {
    for (size_t n = 0; n < expect.size(); ++n) {
      ltgen::BigInt got = ltgen::count(cls, static_cast<int>(n));
      if (got != expect[n]) {
        report(name, false,
               "n=" + std::to_string(n) + " got " + got.str() + " want " +
                   std::to_string(expect[n]));
        return;
      }
    }
    report(name, true);
  };

  check_sequence("counts closed-typable n<=13", ltgen::TermClass::closed_typable,
                 {0, 0, 1, 1, 2, 5, 13, 27, 74, 198, 508, 1371, 3809, 10477});
  check_sequence("counts plain-typable n<=12", ltgen::TermClass::plain_typable,
                 {0, 1, 2, 3, 8, 17, 42, 106, 287, 747, 2069, 5732, 16012});
  check_sequence("counts plain-nf n<=14", ltgen::TermClass::plain_nf,
                 {0, 1, 2, 4, 8, 17, 38, 89, 216, 539, 1374, 3562, 9360, 24871,
                  66706});
  check_sequence("counts closed-typable-nf n<=14",
                 ltgen::TermClass::closed_typable_nf,
                 {0, 0, 1, 1, 2, 3, 7, 11, 25, 52, 110, 241, 537, 1219, 2767});

  auto rows = ltgen::density_table(15);
  auto row_ok = [&](int size, long long a, double b, long long c, double d,
                    double e) {
    const auto& r = rows[static_cast<size_t>(size - 1)];
    return r.typed_count == a && r.typed_nf_count == c &&
           std::fabs(r.plain_per_typed - b) < 0.001 &&
           std::fabs(r.nf_per_typed_nf - d) < 0.001 &&
           std::fabs(r.density_ratio - e) < 0.001;
  };
  report("density row 5", row_ok(5, 5, 4.4, 3, 17.0 / 3.0, 0.7764));
  report("density row 10", row_ok(10, 508, 6.98818, 110, 12.49090, 0.55946));
  report("density row 15", row_ok(15, 82419, 10.56804, 6439, 28.00745, 0.37733));

  auto near = [](double got, double want, double tol) {
    return std::fabs(got - want) <= tol;
  };
  ltgen::TuningResult plain = ltgen::solve_for_target(ltgen::Family::plain, 120.0);
  ltgen::TuningResult nf = ltgen::solve_for_target(ltgen::Family::nf, 120.0);
  report("constant x plain", near(plain.x, 0.29558095907, 5e-10));
  report("constant index threshold",
         near(plain.plain.index_cum, 0.35700035696434995, 5e-13));
  report("constant lambda threshold",
         near(plain.plain.lambda_cum, 0.6525813160382378, 5e-13));
  report("constant leaf threshold",
         near(plain.plain.leaf, 0.7044190409261122, 5e-13));
  report("constant x nf", near(nf.x, 0.3333158264186935, 5e-13));
  report("constant nf index threshold",
         near(nf.nf.index_m, 0.5062759837493023, 5e-13));
  report("constant nf leaf threshold",
         near(nf.nf.leaf, 0.6666841735813065, 5e-13));

  std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failures == 0 ? exit_ok : exit_failure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Generation, counting and uniform random sampling of closed "
      "simply-typed lambda terms in de Bruijn notation"};
  app.require_subcommand(1);

  // count
  auto* count_cmd =
      app.add_subcommand("count", "Exact number of terms of a natural size");
  std::string count_class;
  int count_size = 0;
  bool count_upto = false;
  count_cmd->add_option("--class", count_class, "term class (kebab-case)")
      ->required();
  count_cmd->add_option("--size", count_size, "natural size")
      ->required()
      ->check(CLI::NonNegativeNumber);
  count_cmd->add_flag("--upto", count_upto, "all sizes 0..N");

  // enumerate
  auto* enum_cmd = app.add_subcommand(
      "enumerate", "Stream all terms of a natural size in canonical order");
  std::string enum_class;
  int enum_size = 0;
  bool enum_types = false;
  enum_cmd->add_option("--class", enum_class, "term class (kebab-case)")
      ->required();
  enum_cmd->add_option("--size", enum_size, "natural size")
      ->required()
      ->check(CLI::NonNegativeNumber);
  enum_cmd->add_flag("--with-types", enum_types,
                     "append the principal type, tab-separated");

  // densities
  auto* dens_cmd = app.add_subcommand(
      "densities", "Typability density table (counts exact, ratios 3 dp)");
  int dens_upto = 0;
  std::string dens_format = "csv";
  dens_cmd->add_option("--upto", dens_upto, "last natural size")
      ->required()
      ->check(CLI::PositiveNumber);
  dens_cmd->add_option("--format", dens_format, "csv|text|json")
      ->check(CLI::IsMember({"csv", "text", "json"}));

  // tune
  auto* tune_cmd = app.add_subcommand(
      "tune", "Calibrate the Boltzmann parameter and branching thresholds");
  std::string tune_class;
  double tune_target = 120.0;
  double tune_tol = 1e-6;
  std::string tune_emit;
  tune_cmd->add_option("--class", tune_class, "plain|nf")->required();
  tune_cmd->add_option("--target-size", tune_target,
                       "expected natural size of samples");
  tune_cmd->add_option("--tolerance", tune_tol,
                       "bound on |E - target| at the solution");
  tune_cmd->add_option("--emit", tune_emit,
                       "write a sampler config file (key=value lines)");

  // sample
  auto* sample_cmd = app.add_subcommand(
      "sample", "Draw a uniformly random term via Boltzmann sampling");
  std::string sample_class = "typed";
  int sample_min = -1, sample_max = -1;
  long long sample_steps = 10000000;
  uint64_t sample_seed = 0;
  std::string sample_nf_mode = "faithful";
  bool sample_json = false;
  int sample_threads = -1;
  std::string sample_config;
  sample_cmd->add_option("--class", sample_class, "typed|typed-nf");
  sample_cmd->add_option("--min", sample_min,
                         "minimum unit size (natural size - 1)")
      ->check(CLI::NonNegativeNumber);
  sample_cmd->add_option("--max", sample_max, "maximum unit size")
      ->check(CLI::NonNegativeNumber);
  sample_cmd->add_option("--max-steps", sample_steps, "restart budget")
      ->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", sample_seed, "64-bit seed");
  sample_cmd->add_option("--nf-mode", sample_nf_mode,
                         "faithful|paper (typed-nf only)")
      ->check(CLI::IsMember({"faithful", "paper"}));
  sample_cmd->add_flag("--json", sample_json, "machine-readable output");
  sample_cmd->add_option("--threads", sample_threads,
                         "race this many workers (0 = auto-detect)")
      ->check(CLI::Range(0, 4096));
  sample_cmd->add_option("--config", sample_config,
                         "thresholds file from tune --emit");

  // selftest
  app.add_subcommand("selftest",
                     "Verify published counts, densities and constants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (count_cmd->parsed()) return run_count(count_class, count_size, count_upto);
    if (enum_cmd->parsed()) return run_enumerate(enum_class, enum_size, enum_types);
    if (dens_cmd->parsed()) return run_densities(dens_upto, dens_format);
    if (tune_cmd->parsed())
      return run_tune(tune_class, tune_target, tune_tol, tune_emit);
    if (sample_cmd->parsed()) {
      std::optional<int> min_u, max_u;
      if (sample_min >= 0) min_u = sample_min;
      if (sample_max >= 0) max_u = sample_max;
      std::optional<unsigned> threads;
      if (sample_threads >= 0) threads = static_cast<unsigned>(sample_threads);
      return run_sample(sample_class, min_u, max_u, sample_steps, sample_seed,
                        sample_nf_mode, sample_json, threads, sample_config);
    }
    return run_selftest();
  } catch (const ltgen::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return exit_parse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
}
