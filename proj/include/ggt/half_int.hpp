#pragma once

#include <cstdint>
#include <compare>
#include <string>

namespace ggt {

// Exact half-integer arithmetic. Stored as twice the value so that
// attaching-edge lengths of 1/2 and Gromov products never round.
struct HalfInt {
  std::int64_t twice = 0;

  static constexpr HalfInt of(std::int64_t whole) { return HalfInt{2 * whole}; }
  static constexpr HalfInt halves(std::int64_t n) { return HalfInt{n}; }
  static constexpr HalfInt half() { return HalfInt{1}; }

  constexpr bool is_integer() const { return twice % 2 == 0; }
  constexpr double value() const { return static_cast<double>(twice) / 2.0; }

  friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return HalfInt{a.twice + b.twice}; }
  friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return HalfInt{a.twice - b.twice}; }
  friend constexpr HalfInt operator-(HalfInt a) { return HalfInt{-a.twice}; }
  constexpr HalfInt& operator+=(HalfInt b) { twice += b.twice; return *this; }
  constexpr HalfInt& operator-=(HalfInt b) { twice -= b.twice; return *this; }
  friend constexpr auto operator<=>(const HalfInt&, const HalfInt&) = default;

  std::string str() const {
    if (is_integer()) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
  }
};

}  // namespace ggt
