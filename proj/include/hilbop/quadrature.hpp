#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "error.hpp"

namespace hilbop {

/// Gauss-Legendre rule on [-1, 1], nodes in increasing order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

template <unsigned N>
GaussRule make_gauss_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  GaussRule r;
  // Boost stores the nonnegative half; for odd N the first entry is the centre node.
  const bool odd = (N % 2) == 1;
  for (std::size_t i = x.size(); i-- > (odd ? 1u : 0u);) {
    r.nodes.push_back(-x[i]);
    r.weights.push_back(w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.nodes.push_back(x[i]);
    r.weights.push_back(w[i]);
  }
  return r;
}

}  // namespace detail

/// Shared Gauss-Legendre rules. Supported orders: 4, 6, 8, 10, 15, 20, 30.
inline const GaussRule& gauss_rule(int n) {
  static const GaussRule r4 = detail::make_gauss_rule<4>();
  static const GaussRule r6 = detail::make_gauss_rule<6>();
  static const GaussRule r8 = detail::make_gauss_rule<8>();
  static const GaussRule r10 = detail::make_gauss_rule<10>();
  static const GaussRule r15 = detail::make_gauss_rule<15>();
  static const GaussRule r20 = detail::make_gauss_rule<20>();
  static const GaussRule r30 = detail::make_gauss_rule<30>();
  switch (n) {
    case 4: return r4;
    case 6: return r6;
    case 8: return r8;
    case 10: return r10;
    case 15: return r15;
    case 20: return r20;
    case 30: return r30;
    default: throw parameter_error("quadrature", "unsupported Gauss-Legendre order");
  }
}

/// Next supported order above n (for node-doubling refinement).
inline int refined_order(int n) {
  constexpr std::array<int, 7> orders{4, 6, 8, 10, 15, 20, 30};
  for (int o : orders)
    if (o >= 2 * n) return o;
  return 30;
}

/// Integral of f over [a, b] with one Gauss-Legendre panel.
template <class F>
auto gauss_panel(F&& f, double a, double b, const GaussRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  using R = decltype(f(mid));
  R sum{};
  for (int i = 0; i < rule.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

/// A flat list of nodes and weights, built once and reused across integrands.
struct NodeSet {
  std::vector<double> x;
  std::vector<double> w;
  void add_panel(double a, double b, const GaussRule& rule) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (int i = 0; i < rule.size(); ++i) {
      x.push_back(mid + half * rule.nodes[i]);
      w.push_back(half * rule.weights[i]);
    }
  }
  std::size_t size() const { return x.size(); }
};

/// Nodes for the integral of g(y) y^gamma over [0, X] (gamma > -1), absorbing the
/// endpoint power with y = X v^{1/(gamma+1)}. Returned weights already include y^gamma.
inline NodeSet power_endpoint_nodes(double X, double gamma, const GaussRule& rule) {
  NodeSet ns;
  const double e = 1.0 / (gamma + 1.0);
  const double scale = std::pow(X, gamma + 1.0) * e;
  for (int i = 0; i < rule.size(); ++i) {
    const double v = 0.5 * (rule.nodes[i] + 1.0);
    ns.x.push_back(X * std::pow(v, e));
    ns.w.push_back(0.5 * rule.weights[i] * scale);
  }
  return ns;
}

}  // namespace hilbop
