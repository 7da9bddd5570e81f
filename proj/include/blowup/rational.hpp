#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace blowup {

// Exact rational on int64 with 128-bit intermediates. All threshold
// comparisons of the form `count < c * N` go through this type so verdicts
// do not depend on floating-point rounding.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        reduce();
    }
    Rational(std::int64_t value) : num_(value), den_(1) {} // NOLINT: implicit by design

    /// Parses a decimal literal ("0.25", "1", ".5", "3/7") exactly.
    static Rational parse(const std::string& text);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    Rational operator+(const Rational& o) const { return combine(o, +1); }
    Rational operator-(const Rational& o) const { return combine(o, -1); }
    Rational operator*(const Rational& o) const;
    Rational operator-() const { return Rational(-num_, den_); }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const {
        return static_cast<__int128>(num_) * o.den_ < static_cast<__int128>(o.num_) * den_;
    }
    bool operator<=(const Rational& o) const { return !(o < *this); }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return !(*this < o); }

    Rational abs() const { return Rational(num_ < 0 ? -num_ : num_, den_); }

    /// count < this * scale, exactly.
    bool scaled_above(std::int64_t count, std::int64_t scale) const {
        return static_cast<__int128>(count) * den_ < static_cast<__int128>(num_) * scale;
    }
    /// count <= this * scale, exactly.
    bool scaled_at_least(std::int64_t count, std::int64_t scale) const {
        return static_cast<__int128>(count) * den_ <= static_cast<__int128>(num_) * scale;
    }

    std::string str() const;

private:
    Rational combine(const Rational& o, int sign) const;
    void reduce();

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace blowup
