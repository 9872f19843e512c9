#pragma once

// Hybrid Gauss-trapezoidal corrections for periodic integrands with a
// logarithmic singularity at the target node. Each rule drops the trapezoid
// nodes with offset |k| < a and replaces them by j symmetric pairs of
// off-grid nodes at t_i +- x_q h with weights h w_q. The pairs integrate
// x^p and x^p log|x| exactly for even p < 2j, so the rule is of order 2j.

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fdim/common.hpp"

namespace fdi {

struct AlpertRule {
  int order = 0;
  int a = 0;  // first trapezoid offset kept
  std::vector<double> x;
  std::vector<double> w;
};

namespace detail {

inline AlpertRule make_rule(int order, int a, std::span<const std::array<double, 2>> xw) {
  AlpertRule r{order, a, {}, {}};
  for (const auto& p : xw) {
    r.x.push_back(p[0]);
    r.w.push_back(p[1]);
  }
  return r;
}

inline constexpr std::array<std::array<double, 2>, 2> rule4 = {{
    {0.16086493382289307386, 0.49912404222861055606},
    {0.99308610757861861677, 1.0008759577713894439},
}};

inline constexpr std::array<std::array<double, 2>, 4> rule8 = {{
    {0.11773897079214479221, 0.37472828829667425132},
    {0.8289112915890683044, 0.97278178877030730943},
    {1.9147435731934292034, 1.1253512265699601576},
    {2.9929094240920734087, 1.0271386963630582816},
}};

inline constexpr std::array<std::array<double, 2>, 6> rule12 = {{
    {0.19032303634907186688, 0.61031050339283219605},
    {1.4018690589012815427, 1.7399895033705881136},
    {3.527614759268958527, 2.4213988106103667743},
    {6.0443208842680231839, 2.5065709372494070184},
    {8.3381254746380008317, 1.992559411078846819},
    {9.9348374809261645584, 1.2291708342979590787},
}};

inline constexpr std::array<std::array<double, 2>, 8> rule16 = {{
    {0.083113374204691975873, 0.2672970760882102773},
    {0.62318248758863843214, 0.79033464972273757811},
    {1.6263749209174679012, 1.191465055150859526},
    {2.9488306106945072856, 1.4214205614597759507},
    {4.4015219981527547913, 1.4496507758440291563},
    {5.7850758482386995881, 1.292486382422730631},
    {6.9673076924624247265, 1.0827721355585035911},
    {7.9990687324744624576, 1.0045733637531532895},
}};

}  // namespace detail

inline constexpr int default_quadrature_order = 16;

/// Supported orders are 4, 8, 12 and 16.
inline const AlpertRule& alpert_rule(int order) {
  static const AlpertRule r4 = detail::make_rule(4, 2, detail::rule4);
  static const AlpertRule r8 = detail::make_rule(8, 4, detail::rule8);
  static const AlpertRule r12 = detail::make_rule(12, 11, detail::rule12);
  static const AlpertRule r16 = detail::make_rule(16, 9, detail::rule16);
  switch (order) {
    case 4: return r4;
    case 8: return r8;
    case 12: return r12;
    case 16: return r16;
    default:
      throw ConfigError("unsupported quadrature order " + std::to_string(order) +
                        " (expected 4, 8, 12 or 16)");
  }
}

/// Lagrange weights that interpolate a periodic grid function at the
/// fractional offset s (in grid spacings) from a reference node. The stencil
/// holds `points` consecutive offsets starting at `first`.
struct Stencil {
  int first = 0;
  std::vector<double> weights;
};

inline Stencil lagrange_stencil(double s, int points) {
  Stencil st;
  const int base = static_cast<int>(std::floor(s));
  st.first = base - points / 2 + 1;
  st.weights.assign(points, 1.0);
  for (int m = 0; m < points; ++m) {
    const double xm = st.first + m;
    for (int n = 0; n < points; ++n) {
      if (n == m) continue;
      const double xn = st.first + n;
      st.weights[m] *= (s - xn) / (xm - xn);
    }
  }
  return st;
}

/// One correction node of a rule, with both sign choices precomputed.
struct CorrectionNode {
  double offset;  // signed, in grid spacings
  double weight;  // w_q, multiply by h
  Stencil stencil;
};

/// All 2j correction nodes for a rule, with the interpolation stencils used
/// to pull the density onto them.
inline std::vector<CorrectionNode> correction_nodes(const AlpertRule& rule) {
  std::vector<CorrectionNode> nodes;
  const int points = rule.order;
  for (std::size_t q = 0; q < rule.x.size(); ++q) {
    for (double sign : {1.0, -1.0}) {
      const double s = sign * rule.x[q];
      nodes.push_back({s, rule.w[q], lagrange_stencil(s, points)});
    }
  }
  return nodes;
}

/// Minimum number of nodes per curve for the rule's stencils not to wrap
/// onto the excluded region from the other side.
inline int minimum_nodes(const AlpertRule& rule) {
  double xmax = 0.0;
  for (double x : rule.x) xmax = std::max(xmax, x);
  return 2 * std::max(rule.a, static_cast<int>(std::ceil(xmax)) + rule.order / 2) + 2;
}

}  // namespace fdi
