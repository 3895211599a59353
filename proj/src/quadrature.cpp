#include "fracstick/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <stdexcept>

namespace fracstick {
namespace {

template <unsigned N>
GaussRule expand() {
  using rule = boost::math::quadrature::gauss<double, N>;
  const auto& abscissa = rule::abscissa();
  const auto& weights = rule::weights();
  GaussRule out;
  // boost stores the non-negative half; odd N includes the centre node once.
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    if (abscissa[i] == 0.0) {
      out.x.push_back(0.0);
      out.w.push_back(weights[i]);
    } else {
      out.x.push_back(-abscissa[i]);
      out.w.push_back(weights[i]);
      out.x.push_back(abscissa[i]);
      out.w.push_back(weights[i]);
    }
  }
  return out;
}

}  // namespace

const GaussRule& gauss_rule(int points) {
  static const GaussRule r7 = expand<7>();
  static const GaussRule r10 = expand<10>();
  static const GaussRule r15 = expand<15>();
  static const GaussRule r20 = expand<20>();
  static const GaussRule r25 = expand<25>();
  static const GaussRule r30 = expand<30>();
  switch (points) {
    case 7: return r7;
    case 10: return r10;
    case 15: return r15;
    case 20: return r20;
    case 25: return r25;
    case 30: return r30;
    default: throw std::invalid_argument("gauss_rule: unsupported point count");
  }
}

}  // namespace fracstick
