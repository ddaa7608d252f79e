#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace polyball {

/// Signed dyadic rational num / 2^exp with exact arithmetic.
///
/// Canonical form: num is odd or zero whenever exp > 0, and exp == 0 when
/// num == 0, so value equality is field equality. Results that stop fitting
/// the 64-bit numerator or the exponent cap throw std::overflow_error; no
/// operation ever rounds.
class Dyadic {
 public:
  static constexpr int kMaxExponent = 62;

  constexpr Dyadic() = default;
  Dyadic(std::int64_t num, int exp) { assign(num, exp); }

  /// 1 / 2^k.
  static Dyadic half_power(int k) { return Dyadic(1, k); }

  std::int64_t num() const { return num_; }
  int exp() const { return exp_; }

  bool is_zero() const { return num_ == 0; }
  bool negative() const { return num_ < 0; }
  bool is_integer() const { return exp_ == 0; }

  double to_double() const { return std::ldexp(static_cast<double>(num_), -exp_); }

  /// Exact rendering as "k" or "k/2^e" with the power spelled out, e.g. "5/8".
  std::string to_fraction() const {
    if (exp_ == 0) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(std::uint64_t(1) << exp_);
  }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    const int e = a.exp_ > b.exp_ ? a.exp_ : b.exp_;
    const __int128 n = (static_cast<__int128>(a.num_) << (e - a.exp_)) +
                       (static_cast<__int128>(b.num_) << (e - b.exp_));
    Dyadic r;
    r.assign(n, e);
    return r;
  }

  friend Dyadic operator-(const Dyadic& a) {
    Dyadic r;
    r.num_ = -a.num_;
    r.exp_ = a.exp_;
    return r;
  }

  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    Dyadic r;
    r.assign(static_cast<__int128>(a.num_) * b.num_, a.exp_ + b.exp_);
    return r;
  }

  Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
  Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
  Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.num_ == b.num_ && a.exp_ == b.exp_;
  }

  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    const int e = a.exp_ > b.exp_ ? a.exp_ : b.exp_;
    const __int128 x = static_cast<__int128>(a.num_) << (e - a.exp_);
    const __int128 y = static_cast<__int128>(b.num_) << (e - b.exp_);
    if (x < y) return std::strong_ordering::less;
    if (x > y) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  void assign(__int128 n, int e) {
    if (e < 0) throw std::overflow_error("dyadic: negative exponent");
    while (n != 0 && (n & 1) == 0 && e > 0) {
      n >>= 1;
      --e;
    }
    if (n == 0) e = 0;
    if (e > kMaxExponent)
      throw std::overflow_error("dyadic: exponent exceeds " + std::to_string(kMaxExponent));
    // INT64_MIN is excluded so negation can never overflow.
    constexpr __int128 kMaxNum = std::numeric_limits<std::int64_t>::max();
    if (n > kMaxNum || n < -kMaxNum) throw std::overflow_error("dyadic: numerator overflow");
    num_ = static_cast<std::int64_t>(n);
    exp_ = e;
  }

  std::int64_t num_ = 0;
  int exp_ = 0;
};

inline Dyadic abs(const Dyadic& a) { return a.negative() ? -a : a; }

inline Dyadic dyadic_int(std::int64_t n) { return Dyadic(n, 0); }

}  // namespace polyball
