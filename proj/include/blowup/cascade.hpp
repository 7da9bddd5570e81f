#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "blowup/rational.hpp"

namespace blowup {

enum class CascadeMode { paper_exact, practical_override };

// Derived tolerance tower, smallest to largest:
//   eps  <= eps1 <= eps2 <= eps3 <= d3 <= d2 <= d1
// Roles at runtime: d1 sizes the buffers and the starvation reorder
// threshold; d2 sets the reorder period and the buffer-coverage threshold;
// d3 is the matching-stage floor; eps is the degree tolerance of the
// selection conditions and of the low-degree scan; eps1 caps the tolerated
// share of misbehaving candidate-intersection pairs. eps2/eps3 only gate
// diagnostics.
struct DerivedValues {
    std::optional<Rational> d1, d2, d3, eps3, eps2, eps1, eps;
    bool any() const { return d1 || d2 || d3 || eps3 || eps2 || eps1 || eps; }
};

struct ParameterCascade {
    Rational d{1, 2};
    Rational delta{1, 2};
    int max_degree = 1;        // pattern degree bound
    std::size_t r = 2;         // reduced-graph order

    /// log10 of delta * d^max_degree / (8 * r * max_degree)
    double log10_base = 0.0;
    /// log10 of (d1, d2, d3, eps3, eps2, eps1, eps): base to the powers
    /// 1, 3, 6, 12, 50, 164, 328
    std::array<double, 7> log10_derived{};

    CascadeMode mode = CascadeMode::paper_exact;
    DerivedValues overrides;

    static constexpr std::array<int, 7> exponents{1, 3, 6, 12, 50, 164, 328};
    static const std::array<const char*, 7>& names();

    double log10_epsilon() const { return log10_derived[6]; }
    std::string describe() const;
};

/// Computes the tower in log space (the paper-exact values underflow any
/// machine float); overrides replace individual runtime values and flip the
/// mode.
ParameterCascade compute_cascade(const Rational& d, const Rational& delta, int max_degree,
                                 std::size_t r, DerivedValues overrides = {});

} // namespace blowup
