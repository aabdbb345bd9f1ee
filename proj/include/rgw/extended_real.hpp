#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "rgw/errors.hpp"

namespace rgw {

/// A real number that may be +inf or -inf but never NaN.
class ExtendedReal {
  public:
    constexpr ExtendedReal() = default;

    explicit ExtendedReal(double v) : v_(v) {
        if (std::isnan(v)) throw NumericError("NaN produced where an extended real was expected");
    }

    static ExtendedReal plus_infinity() { return ExtendedReal(std::numeric_limits<double>::infinity()); }
    static ExtendedReal minus_infinity() { return ExtendedReal(-std::numeric_limits<double>::infinity()); }

    double value() const noexcept { return v_; }
    bool is_finite() const noexcept { return std::isfinite(v_); }
    bool is_plus_infinity() const noexcept { return v_ == std::numeric_limits<double>::infinity(); }
    bool is_minus_infinity() const noexcept { return v_ == -std::numeric_limits<double>::infinity(); }

    friend auto operator<=>(const ExtendedReal&, const ExtendedReal&) = default;

  private:
    double v_ = 0.0;
};

} // namespace rgw
