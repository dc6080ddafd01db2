#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace ylab {

// The lp index. Infinity is a distinguished state, not a large float, so
// norm and phi_p formulas switch branches bit-exactly.
class PNorm {
 public:
  static PNorm finite(double p);
  static PNorm inf();

  // Parses "1", "2.5", "inf" (also "Inf"/"INF").
  static PNorm parse(const std::string& text);

  bool is_inf() const { return inf_; }
  double value() const { return p_; }  // only meaningful when finite
  std::string to_string() const;

  bool operator==(const PNorm& other) const {
    return inf_ == other.inf_ && (inf_ || p_ == other.p_);
  }

 private:
  PNorm(double p, bool inf) : p_(p), inf_(inf) {}
  double p_ = 2.0;
  bool inf_ = false;
};

// Standard lp norm of a vector; p = inf gives the max absolute entry.
double lp_norm(std::span<const double> v, const PNorm& p);

// phi_p(d): sqrt(p * d^(2/p)) for finite p, sqrt(2 log 2d) for p = inf.
// Dominates E||Z||_p for Z ~ N(0, I_d).
double phi_p(const PNorm& p, std::size_t d);

// Operator norm of a square row-major matrix induced by the lp vector norm.
// Exact for p in {1, 2, inf}; other finite p use the Riesz-Thorin
// interpolation bound ||A||_p <= ||A||_1^(1/p) * ||A||_inf^(1-1/p).
double matrix_opnorm(std::span<const double> a, std::size_t dim, const PNorm& p);

}  // namespace ylab
