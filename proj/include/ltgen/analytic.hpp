#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ltgen {

/// The two term families with algebraic generating functions used for
/// sampler calibration: all terms, and beta-normal forms.
enum class Family { plain, nf };

/// Value of a generating function at a point inside its disc of
/// convergence, with first derivative.
struct GenFunValue {
  double z = 0.0;
  double value = 0.0;
  double derivative = 0.0;
};

/// Cumulative branching thresholds for the plain-term Boltzmann sampler.
/// One uniform draw R decides: R < index_cum picks a de Bruijn index,
/// R < lambda_cum an abstraction, anything else an application. Inside an
/// index, a draw below leaf stops the successor chain.
struct PlainThresholds {
  double index_cum = 0.0;   // D(x)/L(x)
  double lambda_cum = 0.0;  // D(x)/L(x) + x
  double leaf = 0.0;        // 1 - x
};

/// Branching thresholds for the normal-form sampler over the two-state
/// grammar  N = M | lambda N,  M = M N | D.
struct NfThresholds {
  double lambda = 0.0;   // P(abstraction) in state N: x
  double index_m = 0.0;  // P(index) in state M: D(x)/M(x)
  double leaf = 0.0;     // 1 - x
};

struct AsymptoticParams {
  double rho = 0.0;
  double growth_constant = 0.0;  // the C in (1/rho)^n * C / n^(3/2)
};

/// Calibration output for one family: the parameter x at which the
/// Boltzmann model has the requested expected size, plus everything a
/// sampler needs.
struct TuningResult {
  Family family = Family::plain;
  double x = 0.0;
  double rho = 0.0;
  double expected_units = 0.0;  // x A'(x)/A(x); natural size is this + 1
  double std_dev_units = 0.0;
  PlainThresholds plain;  // valid when family == plain
  NfThresholds nf;        // valid when family == nf
};

namespace analytic_detail {

struct Eval3 {
  double v, d1, d2;
};

// Number of plain terms of unit size n, in doubles (exact through n ~ 30,
// relative error ~1e-16 beyond; used only for the small-z series path).
inline const std::array<double, 48>& plain_count_table() {
  static const std::array<double, 48> table = [] {
    std::array<double, 48> p{};
    for (size_t n = 0; n < p.size(); ++n) {
      double total = 1.0;  // the index s^n(0)
      if (n >= 1) total += p[n - 1];
      for (size_t i = 0; i + 2 <= n; ++i) total += p[i] * p[n - 2 - i];
      p[n] = total;
    }
    return p;
  }();
  return table;
}

// Number of normal forms of unit size n.
inline const std::array<double, 48>& nf_count_table() {
  static const std::array<double, 48> table = [] {
    std::array<double, 48> nf{};
    std::array<double, 48> ne{};
    for (size_t n = 0; n < nf.size(); ++n) {
      double m = 1.0;
      for (size_t i = 0; i + 2 <= n; ++i) m += ne[i] * nf[n - 2 - i];
      ne[n] = m;
      nf[n] = m + (n >= 1 ? nf[n - 1] : 0.0);
    }
    return nf;
  }();
  return table;
}

template <size_t N>
inline Eval3 series_eval(const std::array<double, N>& coeff, double z) {
  double v = 0.0, d1 = 0.0, d2 = 0.0;
  double zn = 1.0;
  for (size_t n = 0; n < N; ++n) {
    v += coeff[n] * zn;
    if (n >= 1) d1 += static_cast<double>(n) * coeff[n] * zn / z;
    if (n >= 2)
      d2 += static_cast<double>(n) * static_cast<double>(n - 1) * coeff[n] *
            zn / (z * z);
    zn *= z;
  }
  if (z == 0.0) {
    d1 = coeff[1];
    d2 = 2.0 * coeff[2];
  }
  return {v, d1, d2};
}

// Direct formulas lose accuracy at both ends of the interval: near 0 the
// closed form is 0/0, near rho the radicand cancels. The series handles the
// former; factoring the known root out of the radicand handles the latter.
constexpr double kSeriesCutoff = 0.01;

inline double bisect_to_ulp(double lo, double hi, bool (*below)(double)) {
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (below(mid)) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Smallest positive root of 1 - 3z - z^2 - z^3 (radius of convergence of
// the plain-term generating function).
inline double plain_rho() {
  static const double rho = bisect_to_ulp(0.25, 0.35, [](double z) {
    return 1.0 - 3.0 * z - z * z - z * z * z > 0.0;
  });
  return rho;
}

// Smallest positive root of the normal-form discriminant
// (1-z)^2 - 4z^2 = (1-3z)(1+z), i.e. 1/3.
inline double nf_rho() {
  static const double rho = bisect_to_ulp(
      0.25, 0.5, [](double z) { return std::fma(-3.0, z, 1.0) > 0.0; });
  return rho;
}

// L(z) = (1 - z - sqrt(P/Q)) / (2 z^2) with P = 1-3z-z^2-z^3, Q = 1-z.
// P is evaluated as (rho - z) * (z^2 + (1+rho) z + (3+rho+rho^2)), which
// keeps full relative accuracy as z approaches the singularity.
inline Eval3 plain_eval3(double z) {
  if (z < kSeriesCutoff) return series_eval(plain_count_table(), z);
  const double rho = plain_rho();
  const double qb = 1.0 + rho;
  const double qc = 3.0 + rho + rho * rho;
  double p = (rho - z) * ((z + qb) * z + qc);
  double pp = -3.0 - 2.0 * z - 3.0 * z * z;
  double ppp = -2.0 - 6.0 * z;
  double q = 1.0 - z;
  double s = p / q;
  double sp = pp / q + p / (q * q);  // Q' = -1
  double spp = ppp / q + 2.0 * pp / (q * q) + 2.0 * p / (q * q * q);
  double r = std::sqrt(s);
  double rp = sp / (2.0 * r);
  double rpp = spp / (2.0 * r) - rp * rp / r;
  double num = 1.0 - z - r;
  double nump = -1.0 - rp;
  double numpp = -rpp;
  double z2 = z * z;
  double z3 = z2 * z;
  double v = num / (2.0 * z2);
  double d1 = (nump * z - 2.0 * num) / (2.0 * z3);
  double d2 = numpp / (2.0 * z2) - 2.0 * nump / z3 + 3.0 * num / (z2 * z2);
  return {v, d1, d2};
}

// N(z) = ((1-z) - G) / (2 z^2 (1-z)) with G = sqrt((1-3z)(1+z)); the fma
// keeps 1-3z fully accurate next to the singularity at 1/3.
inline Eval3 nf_eval3(double z) {
  if (z < kSeriesCutoff) return series_eval(nf_count_table(), z);
  double u = 1.0 - z;
  double g2 = std::fma(-3.0, z, 1.0) * (1.0 + z);
  double g = std::sqrt(g2);
  double gp = -(1.0 + 3.0 * z) / g;
  double gpp = -(3.0 * g2 + (1.0 + 3.0 * z) * (1.0 + 3.0 * z)) / (g2 * g);
  double h = u - g;
  double hp = -1.0 - gp;
  double hpp = -gpp;
  double den = 2.0 * z * z * u;
  double denp = 4.0 * z - 6.0 * z * z;
  double denpp = 4.0 - 12.0 * z;
  double v = h / den;
  double d1 = (hp * den - h * denp) / (den * den);
  double d2 = hpp / den - 2.0 * hp * denp / (den * den) -
              h * denpp / (den * den) +
              2.0 * h * denp * denp / (den * den * den);
  return {v, d1, d2};
}

inline Eval3 eval3(Family family, double z) {
  return family == Family::plain ? plain_eval3(z) : nf_eval3(z);
}

inline void check_domain(Family family, double z, bool exclusive_zero) {
  double rho = family == Family::plain ? plain_rho() : nf_rho();
  if (z < 0.0 || z >= rho || (exclusive_zero && z == 0.0))
    throw std::domain_error("argument outside [0, rho) for this family");
}

}  // namespace analytic_detail

/// Radius of convergence of the family's counting series, located by
/// bracketing bisection to machine precision.
inline double dominant_singularity(Family family) {
  return family == Family::plain ? analytic_detail::plain_rho()
                                 : analytic_detail::nf_rho();
}

/// L(z), the generating function of plain terms by unit size, with
/// derivative. L(0) = 1 (the term 0 has unit size 0). Throws
/// std::domain_error outside [0, rho).
inline GenFunValue eval_plain_gf(double z) {
  analytic_detail::check_domain(Family::plain, z, false);
  auto e = analytic_detail::plain_eval3(z);
  return {z, e.v, e.d1};
}

struct NfGenFun {
  GenFunValue normal;   // N(z): normal forms
  GenFunValue neutral;  // M(z) = (1-z) N(z): neutral terms
};

/// The normal-form pair N(z), M(z) with derivatives. Throws
/// std::domain_error outside [0, 1/3).
inline NfGenFun eval_nf_gf(double z) {
  analytic_detail::check_domain(Family::nf, z, false);
  auto e = analytic_detail::nf_eval3(z);
  GenFunValue n{z, e.v, e.d1};
  // M = (1-z) N, M' = (1-z) N' - N
  GenFunValue m{z, (1.0 - z) * e.v, (1.0 - z) * e.d1 - e.v};
  return {n, m};
}

/// Expected size, in units, of the Boltzmann model at parameter x:
/// E = x A'(x)/A(x). The natural size of a sample is one more than its
/// unit size, so the expected reported size is this value + 1.
inline double expected_size(Family family, double x) {
  analytic_detail::check_domain(family, x, true);
  auto e = analytic_detail::eval3(family, x);
  return x * e.d1 / e.v;
}

/// Standard deviation of the size, in units, at parameter x.
inline double std_dev_size(Family family, double x) {
  analytic_detail::check_domain(family, x, true);
  auto e = analytic_detail::eval3(family, x);
  double mean = x * e.d1 / e.v;
  return std::sqrt((x * x * e.d2 + x * e.d1) / e.v - mean * mean);
}

/// Branch probabilities of the calibrated samplers, from the generating
/// function values at x. For plain terms the grammar L = D | lambda L | L L
/// yields cumulative cutoffs D/L, D/L + x and leaf probability 1-x; the
/// three probabilities D/L, x and x^2 L sum to one. For normal forms the
/// two-state grammar gives P(lambda)=x in state N and P(index)=D/M in
/// state M.
inline PlainThresholds plain_thresholds(double x) {
  analytic_detail::check_domain(Family::plain, x, true);
  auto e = analytic_detail::plain_eval3(x);
  double d = 1.0 / (1.0 - x);
  return {d / e.v, d / e.v + x, 1.0 - x};
}

inline NfThresholds nf_thresholds(double x) {
  analytic_detail::check_domain(Family::nf, x, true);
  auto e = analytic_detail::nf_eval3(x);
  double m = (1.0 - x) * e.v;
  double d = 1.0 / (1.0 - x);
  return {x, d / m, 1.0 - x};
}

/// Calibrates the Boltzmann parameter so the expected *natural* size of a
/// sample equals target_size: solves x A'(x)/A(x) = target_size - 1 by
/// bracketing bisection (the expectation is increasing in x and diverges
/// at rho). tolerance bounds |E - target| at the returned x.
inline TuningResult solve_for_target(Family family, double target_size,
                                     double tolerance = 1e-6) {
  if (target_size <= 1.0)
    throw std::invalid_argument("target size must exceed 1");
  double target_units = target_size - 1.0;
  double rho = dominant_singularity(family);
  double lo = 1e-9;
  double hi = rho * (1.0 - 1e-14);
  if (expected_size(family, lo) > target_units ||
      expected_size(family, hi) < target_units)
    throw std::runtime_error("target size out of solvable range");
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (expected_size(family, mid) < target_units) lo = mid;
    else hi = mid;
  }
  double x = 0.5 * (lo + hi);
  double e = expected_size(family, x);
  if (std::abs(e - target_units) > tolerance)
    throw std::runtime_error("bisection failed to reach tolerance");
  TuningResult result;
  result.family = family;
  result.x = x;
  result.rho = rho;
  result.expected_units = e;
  result.std_dev_units = std_dev_size(family, x);
  if (family == Family::plain) result.plain = plain_thresholds(x);
  else result.nf = nf_thresholds(x);
  return result;
}

/// Asymptotic parameters of the plain-term counts: [z^n]L(z) ~
/// (1/rho)^n * C / n^(3/2). The constant C is taken as given, not derived.
inline AsymptoticParams asymptotic_params() {
  return {analytic_detail::plain_rho(), 0.60676};
}

/// Asymptotic approximation of the number of plain terms of natural size n
/// (the published growth constant is calibrated against the natural-size
/// counting sequence).
inline double asymptotic_count(int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  AsymptoticParams p = asymptotic_params();
  return std::pow(1.0 / p.rho, n) * p.growth_constant /
         (static_cast<double>(n) * std::sqrt(static_cast<double>(n)));
}

}  // namespace ltgen
