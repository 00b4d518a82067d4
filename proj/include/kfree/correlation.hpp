#pragma once

// Autocorrelation coefficients eta(x): the closed form for the visible
// points of Z^2 and a windowed pair-counting estimate for every spec.

#include "pointsets.hpp"

namespace kfree::correlation
{

using pointsets::FreenessSpec;

struct AutocorrSample
{
    Vec shift;
    double value = 0.0;
    double radius_used = 0.0; // empirical estimates only
};

// Internal precision of the two Euler constants in the closed form.
constexpr double kClosedFormRelErr = 1e-10;

// prod_p (1 - 2 p^-2), the coefficient of the empty product.
inline double xi_constant()
{
    static const double xi =
        arith::rational_prime_product(2, 2, 1, kClosedFormRelErr).value;
    return xi;
}

// eta(0) = prod_p (1 - p^-2) = 1/zeta(2), the density of the visible points.
inline double inv_zeta2()
{
    static const double v =
        arith::rational_prime_product(1, 2, 1, kClosedFormRelErr).value;
    return v;
}

// Closed-form autocorrelation coefficient of the visible points of Z^2:
//   eta(x) = xi * prod_{p | gcd(x)} (1 + 1/(p^2 - 2)),   eta(0) = 1/zeta(2).
inline double autocorr_closed_visible(const Vec& x)
{
    if (x.size() != 2)
        throw domain_error("autocorr_closed_visible: defined on Z^2 only");
    i64 g = std::gcd(std::abs(x[0]), std::abs(x[1]));
    if (g == 0)
        return inv_zeta2();
    double v = xi_constant();
    for (auto [p, e] : arith::factorize(g))
    {
        (void)e;
        double p2 = static_cast<double>(p) * static_cast<double>(p);
        v *= 1.0 + 1.0 / (p2 - 2.0);
    }
    return v;
}

// Pair-counting estimate  |V n (-x+V) n B_R(0)| / vol(B_R)  with a single
// sieve pass over the hull of B_R(0) and B_R(0)+x and a shifted probe.
inline AutocorrSample autocorr_empirical(const FreenessSpec& spec, const Vec& x,
                                         double radius,
                                         i64 cap = pointsets::kDefaultWindowCap)
{
    if (static_cast<int>(x.size()) != spec.dimension)
        throw domain_error("autocorr_empirical: shift dimension does not match spec");
    if (radius <= 0)
        throw domain_error("autocorr_empirical: radius must be positive");
    const int n = spec.dimension;
    const i64 sq = ball_sq_bound(radius);
    const i64 b = pointsets::int_root(sq, 2);

    Vec lo(n), hi(n);
    for (int d = 0; d < n; ++d)
    {
        lo[d] = -b + std::min<i64>(0, x[d]);
        hi[d] = b + std::max<i64>(0, x[d]);
    }
    auto grid = pointsets::build_grid(spec, lo, hi, cap);

    i64 count = 0;
    i64 shift_off = 0;
    for (int d = 0; d < n; ++d)
        shift_off += x[d] * grid.stride[d];

    Vec y(n, -b);
    while (true)
    {
        if (norm_sq(y) <= sq)
        {
            i64 idx = static_cast<i64>(grid.index(y));
            if (grid.member[idx] && grid.member[idx + shift_off])
                ++count;
        }
        int d = n - 1;
        for (; d >= 0; --d)
        {
            if (++y[d] <= b)
                break;
            y[d] = -b;
        }
        if (d < 0)
            break;
    }
    return {x, static_cast<double>(count) / ball_volume(n, radius), radius};
}

// Batch driver over a list of shifts.
inline std::vector<AutocorrSample> autocorr_table(const FreenessSpec& spec,
                                                  const std::vector<Vec>& shifts,
                                                  double radius,
                                                  i64 cap = pointsets::kDefaultWindowCap)
{
    std::vector<AutocorrSample> out;
    out.reserve(shifts.size());
    for (const Vec& x : shifts)
        out.push_back(autocorr_empirical(spec, x, radius, cap));
    return out;
}

} // namespace kfree::correlation
