#pragma once

// Scattering coefficients from effective susceptibilities of a point
// scatterer. Frequencies are written as signed harmonic indices, so
// omega_2, -omega_1 is {2, -1}.

#include <algorithm>
#include <map>
#include <vector>

#include "fdim/scene.hpp"

namespace fdi {

class SusceptibilitySet {
 public:
  using Key = std::vector<int>;

  /// Stores eta at the multiset of frequencies; the order of the arguments
  /// does not matter.
  SusceptibilitySet& set(Key freqs, double value) {
    std::sort(freqs.begin(), freqs.end());
    values_[std::move(freqs)] = value;
    return *this;
  }
  double get(Key freqs) const {
    std::sort(freqs.begin(), freqs.end());
    const auto it = values_.find(freqs);
    return it == values_.end() ? 0.0 : it->second;
  }
  bool has(Key freqs) const {
    std::sort(freqs.begin(), freqs.end());
    return values_.count(freqs) > 0;
  }

 private:
  std::map<Key, double> values_;
};

inline ScattererCoefficients coefficients_from_susceptibilities(const SusceptibilitySet& s,
                                                                const HarmonicSet& harmonics,
                                                                Nonlinearity order) {
  const double k1 = harmonics.wavenumber(1);
  ScattererCoefficients c;
  c.lin1 = 4.0 * pi * k1 * k1 * s.get({1});
  if (order == Nonlinearity::linear) return c;

  const int h = higher_harmonic(order);
  const double kh = harmonics.wavenumber(h);
  c.lin2 = 4.0 * pi * kh * kh * s.get({h});
  if (order == Nonlinearity::quadratic) {
    c.nl1 = 8.0 * pi * k1 * k1 * s.get({2, -1});
    c.nl2 = 4.0 * pi * kh * kh * s.get({1, 1});
  } else {
    c.nl1 = 12.0 * pi * k1 * k1 * s.get({1, 1, -1});
    c.nl2 = 12.0 * pi * k1 * k1 * s.get({3, -1, -1});
    c.nl3 = 4.0 * pi * kh * kh * s.get({1, 1, 1});
  }
  return c;
}

}  // namespace fdi
