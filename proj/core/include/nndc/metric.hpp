#pragma once

#include <cmath>
#include <cstddef>

#include "nndc/dataset.hpp"

namespace nndc {

/// L_p metric, p > 0. For p < 1 this is not a norm, but the distance
/// (sum |x_j - y_j|^p)^(1/p) is still well defined and used for contrast.
class Metric {
 public:
  explicit Metric(double p);

  double p() const { return p_; }

  /// sum_j |x_j - y_j|^p, i.e. D(x, y)^p.
  double powered(const PointView& x, const PointView& y) const;

  /// (sum_j |x_j - y_j|^p)^(1/p).
  double distance(const PointView& x, const PointView& y) const;

  /// Maps D^p back to D.
  double root(double powered_distance) const;

  /// |v|^p for one coordinate difference.
  double term(double diff) const {
    const double a = std::fabs(diff);
    switch (kind_) {
      case Kind::kL1: return a;
      case Kind::kL2: return a * a;
      default: return std::pow(a, p_);
    }
  }

 private:
  enum class Kind { kL1, kL2, kGeneral };

  double p_;
  Kind kind_;
};

/// (sum_j |x_j - y_j|^p)^(1/p). Throws InvalidArgument on dimension
/// mismatch or p <= 0.
double lp_distance(const PointView& x, const PointView& y, double p);

}  // namespace nndc
