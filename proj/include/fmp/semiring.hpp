#pragma once
#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include <fmp/error.hpp>

namespace fmp {

enum class SemiringKind { max_product, max_sum, min_sum };

/// An ordered semiring: "addition" picks the better of two values and
/// "multiplication" (combine) is monotone under that order, i.e.
/// a < b and c < d imply combine(a, c) < combine(b, d).
///
/// Everything is templated on the scalar so the same object drives
/// double tables, float tables or integer test fixtures.
struct Semiring {
    SemiringKind kind = SemiringKind::max_sum;

    template <class T>
    constexpr T combine(T a, T b) const
    {
        return kind == SemiringKind::max_product ? a * b : a + b;
    }

    /// Strict order: true when `a` beats `b`.
    template <class T>
    constexpr bool better(T a, T b) const
    {
        return kind == SemiringKind::min_sum ? a < b : a > b;
    }

    template <class T = double>
    constexpr T identity() const
    {
        return kind == SemiringKind::max_product ? T(1) : T(0);
    }

    /// Value every finite entry beats; seeds a running best.
    template <class T = double>
    constexpr T worst() const
    {
        return kind == SemiringKind::min_sum ? std::numeric_limits<T>::infinity()
                                             : -std::numeric_limits<T>::infinity();
    }

    template <class T>
    constexpr bool admits(T v) const
    {
        if (std::isnan(static_cast<double>(v))) return false;
        return kind != SemiringKind::max_product || v >= T(0);
    }

    std::string_view name() const
    {
        switch (kind) {
            case SemiringKind::max_product: return "max-product";
            case SemiringKind::max_sum: return "max-sum";
            case SemiringKind::min_sum: return "min-sum";
        }
        return "?";
    }

    static Semiring parse(std::string_view text)
    {
        if (text == "max-product") return {SemiringKind::max_product};
        if (text == "max-sum") return {SemiringKind::max_sum};
        if (text == "min-sum") return {SemiringKind::min_sum};
        throw domain_error("unknown semiring '" + std::string(text) + "'");
    }

    friend constexpr bool operator==(Semiring, Semiring) = default;
};

inline constexpr Semiring max_product{SemiringKind::max_product};
inline constexpr Semiring max_sum{SemiringKind::max_sum};
inline constexpr Semiring min_sum{SemiringKind::min_sum};

} // namespace fmp
