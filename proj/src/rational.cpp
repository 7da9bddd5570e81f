#include "blowup/rational.hpp"

#include <cctype>
#include <numeric>

namespace blowup {

namespace {

std::int64_t checked_cast(__int128 v, const char* what) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error(std::string("Rational overflow in ") + what);
    return static_cast<std::int64_t>(v);
}

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a == 0 ? 1 : a;
}

} // namespace

void Rational::reduce() {
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
    if (num_ == 0) den_ = 1;
}

Rational Rational::combine(const Rational& o, int sign) const {
    __int128 n = static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(sign) * o.num_ * den_;
    __int128 d = static_cast<__int128>(den_) * o.den_;
    __int128 g = gcd128(n, d);
    return Rational(checked_cast(n / g, "add"), checked_cast(d / g, "add"));
}

Rational Rational::operator*(const Rational& o) const {
    __int128 n = static_cast<__int128>(num_) * o.num_;
    __int128 d = static_cast<__int128>(den_) * o.den_;
    __int128 g = gcd128(n, d);
    return Rational(checked_cast(n / g, "mul"), checked_cast(d / g, "mul"));
}

Rational Rational::parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("Rational::parse: empty string");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    }
    bool negative = false;
    std::size_t i = 0;
    if (text[0] == '+' || text[0] == '-') {
        negative = text[0] == '-';
        i = 1;
    }
    __int128 num = 0;
    __int128 den = 1;
    bool seen_dot = false, seen_digit = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_dot) throw std::invalid_argument("Rational::parse: bad literal " + text);
            seen_dot = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw std::invalid_argument("Rational::parse: bad literal " + text);
        seen_digit = true;
        num = num * 10 + (c - '0');
        if (seen_dot) den *= 10;
        if (den > INT64_MAX || num > static_cast<__int128>(INT64_MAX) * 2)
            throw std::overflow_error("Rational::parse: literal too precise " + text);
    }
    if (!seen_digit) throw std::invalid_argument("Rational::parse: bad literal " + text);
    __int128 g = gcd128(num, den);
    std::int64_t n = checked_cast(num / g, "parse");
    return Rational(negative ? -n : n, checked_cast(den / g, "parse"));
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

} // namespace blowup
