#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>

#include "dlab/errors.hpp"

namespace dlab {

__extension__ typedef __int128 int128;
__extension__ typedef unsigned __int128 uint128;

/// Exact rational number on 64-bit numerator/denominator. All arithmetic
/// routes through 128-bit intermediates and throws ArithmeticOverflow instead
/// of wrapping; comparisons are exact cross multiplications. The denominator
/// is always positive and gcd(num, den) == 1.
class Rational {
  public:
    Rational() = default;
    Rational(std::int64_t value) : num_(value) {}  // NOLINT(google-explicit-constructor)

    Rational(std::int64_t num, std::int64_t den) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num, den);
        num_ = g ? num / g : num;
        den_ = g ? den / g : den;
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string to_string() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        const int128 n = int128(a.num_) * b.den_ + int128(b.num_) * a.den_;
        const int128 d = int128(a.den_) * b.den_;
        return from_wide(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        const int128 n = int128(a.num_) * b.den_ - int128(b.num_) * a.den_;
        const int128 d = int128(a.den_) * b.den_;
        return from_wide(n, d);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_wide(int128(a.num_) * b.num_, int128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::invalid_argument("Rational: division by zero");
        return from_wide(int128(a.num_) * b.den_, int128(a.den_) * b.num_);
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return int128(a.num_) * b.den_ < int128(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
        return os << r.to_string();
    }

  private:
    static Rational from_wide(int128 n, int128 d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const int128 g = gcd_wide(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        constexpr int128 lo = -int128(UINT64_C(1) << 63);
        constexpr int128 hi = int128((UINT64_C(1) << 63) - 1);
        if (n < lo || n > hi || d > hi)
            throw ArithmeticOverflow("Rational: value exceeds 64-bit range after reduction");
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }

    static int128 gcd_wide(int128 a, int128 b) {
        while (b != 0) {
            const int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace dlab
