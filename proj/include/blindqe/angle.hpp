#pragma once

#include <cstdint>
#include <numbers>
#include <ostream>

namespace blindqe {

/// An element of the angle set {j*pi/4 : j = 0..7}, stored as j mod 8.
///
/// All protocol arithmetic on measurement and rotation angles happens here,
/// so sums of secret angles never accumulate floating-point error.
class Angle8 {
 public:
  constexpr Angle8() = default;
  constexpr explicit Angle8(int eighths) : value_(reduce(eighths)) {}

  static constexpr Angle8 zero() { return Angle8{0}; }
  static constexpr Angle8 pi() { return Angle8{4}; }
  static constexpr Angle8 half_pi() { return Angle8{2}; }

  constexpr int value() const { return value_; }
  constexpr double radians() const { return value_ * (std::numbers::pi / 4.0); }

  /// (-1)^flip * angle.
  constexpr Angle8 signed_by(bool flip) const { return flip ? -*this : *this; }
  /// angle + bit * pi.
  constexpr Angle8 plus_pi_if(bool bit) const { return bit ? *this + pi() : *this; }

  constexpr Angle8 operator-() const { return Angle8{-value_}; }
  constexpr Angle8 operator+(Angle8 o) const { return Angle8{value_ + o.value_}; }
  constexpr Angle8 operator-(Angle8 o) const { return Angle8{value_ - o.value_}; }
  constexpr Angle8& operator+=(Angle8 o) { return *this = *this + o; }
  constexpr Angle8& operator-=(Angle8 o) { return *this = *this - o; }
  constexpr bool operator==(const Angle8&) const = default;
  constexpr auto operator<=>(const Angle8&) const = default;

 private:
  static constexpr std::uint8_t reduce(int j) { return static_cast<std::uint8_t>(((j % 8) + 8) % 8); }

  std::uint8_t value_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, Angle8 a) { return os << a.value() << "pi/4"; }

}  // namespace blindqe
