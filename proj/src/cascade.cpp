#include "blowup/cascade.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace blowup {

const std::array<const char*, 7>& ParameterCascade::names() {
    static const std::array<const char*, 7> n{"d1", "d2", "d3", "eps3", "eps2", "eps1", "eps"};
    return n;
}

ParameterCascade compute_cascade(const Rational& d, const Rational& delta, int max_degree,
                                 std::size_t r, DerivedValues overrides) {
    const Rational zero(0), one(1);
    if (!(zero < d) || d > one) throw std::invalid_argument("compute_cascade: d must be in (0,1]");
    if (!(zero < delta) || delta > one) throw std::invalid_argument("compute_cascade: delta must be in (0,1]");
    if (max_degree < 1) throw std::invalid_argument("compute_cascade: max degree must be at least 1");
    if (r < 2) throw std::invalid_argument("compute_cascade: r must be at least 2");

    ParameterCascade cascade;
    cascade.d = d;
    cascade.delta = delta;
    cascade.max_degree = max_degree;
    cascade.r = r;
    cascade.log10_base = std::log10(delta.to_double()) + max_degree * std::log10(d.to_double()) -
                         std::log10(8.0 * static_cast<double>(r) * max_degree);
    for (std::size_t k = 0; k < 7; ++k)
        cascade.log10_derived[k] = ParameterCascade::exponents[k] * cascade.log10_base;
    cascade.overrides = overrides;
    cascade.mode = overrides.any() ? CascadeMode::practical_override : CascadeMode::paper_exact;
    return cascade;
}

std::string ParameterCascade::describe() const {
    std::ostringstream ss;
    ss << "base: log10 = " << log10_base << "\n";
    const std::optional<Rational>* ov[7] = {&overrides.d1,   &overrides.d2,   &overrides.d3,
                                            &overrides.eps3, &overrides.eps2, &overrides.eps1,
                                            &overrides.eps};
    for (std::size_t k = 0; k < 7; ++k) {
        ss << names()[k] << ": log10 = " << log10_derived[k] << " (base^" << exponents[k] << ")";
        if (*ov[k]) ss << "  override = " << (*ov[k])->str();
        ss << "\n";
    }
    ss << "mode: " << (mode == CascadeMode::paper_exact ? "paper-exact" : "practical-override") << "\n";
    return ss.str();
}

} // namespace blowup
