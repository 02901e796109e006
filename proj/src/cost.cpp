#include "rscf/cost.hpp"

#include <cstdio>
#include <numeric>
#include "rscf/errors.hpp"

namespace rscf {

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (den == 0) throw ConfigError("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

Rational Rational::operator+(const Rational& o) const {
  return Rational(num * o.den + o.num * den, den * o.den);
}

Rational Rational::operator-(const Rational& o) const {
  return Rational(num * o.den - o.num * den, den * o.den);
}

Rational Rational::operator*(const Rational& o) const {
  return Rational(num * o.num, den * o.den);
}

double Rational::to_double() const {
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational flops_matmul(std::int64_t l, std::int64_t m, std::int64_t n) {
  if (l < 1 || m < 1 || n < 1)
    throw ConfigError("flops_matmul: dimensions must be >= 1");
  return Rational(8 * l * m * n - 2 * l * n);
}

Rational flops_inverse(std::int64_t m) {
  if (m < 1) throw ConfigError("flops_inverse: dimension must be >= 1");
  return Rational(4 * m * m * m, 3);
}

Rational per_iteration_cost(std::int64_t n_t, std::int64_t k) {
  const Rational n(n_t), kk(k);
  return Rational(4, 3) * n * n * n + Rational(24) * n * n * kk +
         Rational(2) * n * n + Rational(13) * n * kk + Rational(2) * n +
         Rational(12);
}

static Rational setup_cost(std::int64_t n_t, std::int64_t k) {
  const Rational n(n_t), kk(k);
  return Rational(8, 3) * n * n * n + Rational(32) * n * n * kk +
         Rational(21) * n * kk - Rational(2) * n * n - Rational(2) * n +
         Rational(12);
}

Rational total_cost(std::int64_t n_t, std::int64_t k, std::int64_t i_t) {
  if (n_t < 1 || k < 1) throw ConfigError("total_cost: bad dims");
  if (i_t < 0) throw ConfigError("total_cost: i_t must be >= 0");
  return Rational(i_t) * per_iteration_cost(n_t, k) + setup_cost(n_t, k);
}

CostReport cost_report(std::int64_t n_t, std::int64_t k, std::int64_t i_t) {
  if (n_t < 1 || k < 1) throw ConfigError("cost_report: bad dims");
  if (i_t < 0) throw ConfigError("cost_report: i_t must be >= 0");
  const Rational n(n_t), kk(k);

  CostReport r;
  r.n_t = n_t;
  r.k = k;
  r.i_t = i_t;

  r.common_precoder = Rational(4, 3) * n * n * n + Rational(8) * n * n * kk +
                      Rational(8) * n * kk - Rational(4) * n + Rational(1);
  r.init_p_bar = Rational(4, 3) * n * n * n + Rational(16) * n * n * kk -
                 Rational(2) * n * n - Rational(2) * n * kk + Rational(2) * n +
                 Rational(3);
  r.step_f = Rational(8) * n * kk + Rational(2);
  r.step_p_p = n * kk + Rational(1);
  r.step_lambda = Rational(8) * n * n * kk + Rational(6) * n * kk + Rational(6);
  r.iter_p_bar = Rational(4, 3) * n * n * n + Rational(16) * n * n * kk +
                 Rational(2) * n * n - Rational(2) * n * kk + Rational(2) * n +
                 Rational(3);

  r.itemized_per_iteration =
      r.iter_p_bar + r.step_f + r.step_p_p + r.step_lambda;
  r.itemized_setup =
      r.common_precoder + r.init_p_bar + r.step_f + r.step_p_p + r.step_lambda;
  r.itemized_total = Rational(i_t) * r.itemized_per_iteration + r.itemized_setup;

  r.per_iteration = per_iteration_cost(n_t, k);
  r.setup = setup_cost(n_t, k);
  r.c_f = total_cost(n_t, k, i_t);
  r.discrepancy = r.itemized_total - r.c_f;
  return r;
}

std::string cost_table(const std::vector<std::int64_t>& n_t_list,
                       const std::vector<std::int64_t>& k_list,
                       const std::vector<std::int64_t>& i_t_list, bool csv) {
  std::string out;
  if (csv) {
    out = "n_t,k,i_t,common_precoder,init_p_bar,step_f,step_p_p,step_lambda,"
          "iter_p_bar,per_iteration,setup,c_f,itemized_total,discrepancy\n";
    for (auto n : n_t_list)
      for (auto k : k_list)
        for (auto it : i_t_list) {
          const CostReport r = cost_report(n, k, it);
          out += std::to_string(n) + "," + std::to_string(k) + "," +
                 std::to_string(it) + "," + r.common_precoder.str() + "," +
                 r.init_p_bar.str() + "," + r.step_f.str() + "," +
                 r.step_p_p.str() + "," + r.step_lambda.str() + "," +
                 r.iter_p_bar.str() + "," + r.per_iteration.str() + "," +
                 r.setup.str() + "," + r.c_f.str() + "," +
                 r.itemized_total.str() + "," + r.discrepancy.str() + "\n";
        }
    return out;
  }

  char buf[256];
  std::snprintf(buf, sizeof(buf), "%5s %4s %4s %14s %14s %14s %12s\n", "n_t",
                "k", "i_t", "per_iter", "setup", "c_f", "item-c_f");
  out = buf;
  for (auto n : n_t_list)
    for (auto k : k_list)
      for (auto it : i_t_list) {
        const CostReport r = cost_report(n, k, it);
        std::snprintf(buf, sizeof(buf), "%5lld %4lld %4lld %14s %14s %14s %12s\n",
                      static_cast<long long>(n), static_cast<long long>(k),
                      static_cast<long long>(it), r.per_iteration.str().c_str(),
                      r.setup.str().c_str(), r.c_f.str().c_str(),
                      r.discrepancy.str().c_str());
        out += buf;
      }
  return out;
}

}  // namespace rscf
