#pragma once

#include <complex>

#include "trbie/errors.hpp"

namespace trbie {

/// Axis-aligned rectangle in the complex plane.
struct Rect {
  double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;

  bool contains(std::complex<double> z) const {
    return z.real() > re_min && z.real() < re_max && z.imag() > im_min && z.imag() < im_max;
  }
  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  std::complex<double> center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
  void validate() const {
    if (!(re_min < re_max) || !(im_min < im_max)) throw ConfigError("rectangle needs re_min < re_max and im_min < im_max");
  }
};

}  // namespace trbie
