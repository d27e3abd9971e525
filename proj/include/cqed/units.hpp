#pragma once

#include <numbers>

namespace cqed {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Angular frequency in rad/us. Config files speak ordinary frequency in MHz;
/// conversion happens once, when a record is validated.
class Frequency {
public:
  constexpr Frequency() = default;

  static constexpr Frequency from_MHz(double mhz) { return Frequency(two_pi * mhz); }
  static constexpr Frequency from_rad(double rad_per_us) { return Frequency(rad_per_us); }

  constexpr double rad() const { return value_; }
  constexpr double MHz() const { return value_ / two_pi; }

  friend constexpr bool operator==(Frequency, Frequency) = default;
  friend constexpr Frequency operator+(Frequency a, Frequency b) { return Frequency(a.value_ + b.value_); }
  friend constexpr Frequency operator-(Frequency a, Frequency b) { return Frequency(a.value_ - b.value_); }
  friend constexpr Frequency operator-(Frequency a) { return Frequency(-a.value_); }
  friend constexpr Frequency operator*(double k, Frequency a) { return Frequency(k * a.value_); }

private:
  constexpr explicit Frequency(double v) : value_(v) {}
  double value_ = 0.0;
};

} // namespace cqed
