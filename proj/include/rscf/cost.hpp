#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rscf {

// Exact rational FLOP count. Keeps the m^3/3 inversion terms drift-free;
// magnitudes stay far below the int64 range for any plausible array size.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n) : num(n) {}  // NOLINT: implicit by design
  Rational(std::int64_t n, std::int64_t d);

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  bool operator==(const Rational& o) const {
    return num == o.num && den == o.den;
  }
  bool operator!=(const Rational& o) const { return !(*this == o); }

  bool is_integer() const { return den == 1; }
  double to_double() const;
  std::string str() const;  // "59280" or "4/3"
};

// 8lmn - 2ln FLOPs for an (l x m)(m x n) complex product.
Rational flops_matmul(std::int64_t l, std::int64_t m, std::int64_t n);

// (4/3)m^3 FLOPs for an m x m inversion.
Rational flops_inverse(std::int64_t m);

// Per-step counts plus the aggregate closed form. The documented itemization
// and the aggregate disagree by a constant; both are carried and the gap is
// reported instead of reconciled, with the aggregate authoritative.
struct CostReport {
  std::int64_t n_t = 0;
  std::int64_t k = 0;
  std::int64_t i_t = 0;

  Rational common_precoder;  // one-off direction solve
  Rational init_p_bar;       // iterate 0
  Rational step_f;           // scaling factor, per pass
  Rational step_p_p;         // scaled precoder, per pass
  Rational step_lambda;      // multiplier, per pass
  Rational iter_p_bar;       // iterate i >= 1

  Rational itemized_per_iteration;  // iter_p_bar + f + p_p + lambda
  Rational itemized_setup;          // common + init_p_bar + f + p_p + lambda
  Rational itemized_total;

  Rational per_iteration;  // aggregate slope in i_t
  Rational setup;          // aggregate i_t = 0 value
  Rational c_f;            // authoritative total

  Rational discrepancy;  // itemized_total - c_f
};

// Aggregate per-iteration slope of C_f.
Rational per_iteration_cost(std::int64_t n_t, std::int64_t k);

// Closed-form total: i_t * per_iteration_cost + setup terms.
Rational total_cost(std::int64_t n_t, std::int64_t k, std::int64_t i_t);

CostReport cost_report(std::int64_t n_t, std::int64_t k, std::int64_t i_t);

// Rows for each (n_t, k, i_t) triple; aligned text or CSV.
std::string cost_table(const std::vector<std::int64_t>& n_t_list,
                       const std::vector<std::int64_t>& k_list,
                       const std::vector<std::int64_t>& i_t_list, bool csv);

}  // namespace rscf
