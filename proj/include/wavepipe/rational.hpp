/* Copyright 2026 The wavepipe Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef WAVEPIPE_RATIONAL_HPP_
#define WAVEPIPE_RATIONAL_HPP_

#include <cassert>
#include <cstdint>
#include <numeric>
#include <string>

namespace wavepipe {

// Exact fraction with canonical form: gcd(num, den) == 1, den > 0.
// Magnitudes stay tiny here (device counts, wave counts, unit fractions),
// so int64 components with reduction before multiplication are plenty.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  constexpr Rational(int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(int64_t n, int64_t d) : num_(n), den_(d) {
    assert(den_ != 0);
    normalize();
  }

  int64_t num() const { return num_; }
  int64_t den() const { return den_; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    int64_t g = std::gcd(a.den_, b.den_);
    int64_t den = a.den_ / g * b.den_;
    return Rational(a.num_ * (b.den_ / g) + b.num_ * (a.den_ / g), den);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + Rational(-b.num_, b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    int64_t g1 = std::gcd(std::abs(a.num_), b.den_);
    int64_t g2 = std::gcd(std::abs(b.num_), a.den_);
    return Rational((a.num_ / g1) * (b.num_ / g2), (a.den_ / g2) * (b.den_ / g1));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    assert(b.num_ != 0);
    return a * Rational(b.den_, b.num_);
  }
  Rational operator-() const { return Rational(-num_, den_); }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    // Cross-multiply on reduced terms; components are small enough that the
    // products stay far below the int64 range at every call site we have.
    return a.num_ * b.den_ < b.num_ * a.den_;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return a == b || a < b; }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  // "3/4", or "3" when the denominator is 1.
  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    int64_t g = std::gcd(std::abs(num_), den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  int64_t num_;
  int64_t den_;
};

}  // namespace wavepipe

#endif  // WAVEPIPE_RATIONAL_HPP_
