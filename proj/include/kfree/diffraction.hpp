#pragma once

// Closed-form diffraction intensities I(l), Fourier-Bohr support enumeration
// over a window, and a finite-volume Fourier-sum estimate used as the
// empirical oracle for both.

#include <complex>

#include "pointsets.hpp"

namespace kfree::diffraction
{

using pointsets::FreenessSpec;

// A point of Q Lambda* = Q^n stored as numerator vector over a positive
// denominator, normalized so den is the smallest m with m*point integral.
struct RationalPoint
{
    Vec numerator;
    i64 den = 1;

    static RationalPoint from(Vec num, i64 den)
    {
        if (den <= 0)
            throw domain_error("RationalPoint: denominator must be positive");
        i64 g = den;
        for (i64 c : num)
            g = std::gcd(g, c < 0 ? -c : c);
        for (i64& c : num)
            c /= g;
        return {std::move(num), den / g};
    }

    static RationalPoint zero(int n) { return {Vec(n, 0), 1}; }

    int dimension() const { return static_cast<int>(numerator.size()); }

    double coordinate(int d) const
    {
        return static_cast<double>(numerator[d]) / static_cast<double>(den);
    }

    bool operator==(const RationalPoint& o) const
    {
        return den == o.den && numerator == o.numerator;
    }
    bool operator<(const RationalPoint& o) const
    {
        if (den != o.den)
            return den < o.den;
        return numerator < o.numerator;
    }
};

struct DiffractionAtom
{
    RationalPoint position;
    double intensity = 0.0;
};

constexpr double kDefaultRelErr = 1e-8;

// 1/zeta(nk) as a certified Euler product (cached).
inline double density_factor(const FreenessSpec& spec, double rel_err = kDefaultRelErr)
{
    if (spec.kind == FreenessSpec::Kind::KFree)
        return arith::rational_prime_product(1, spec.dimension * spec.power, 1, rel_err)
            .value;
    double d = 1.0;
    for (i64 b : spec.moduli)
        d *= 1.0 - 1.0 / std::pow(static_cast<double>(b), spec.dimension);
    return d;
}

namespace detail
{

// k-free case: 0 unless den is (k+1)-free; the supported prime factors of den
// are returned for the intensity product.
inline bool kfree_support(i64 den, int k, std::vector<i64>& primes)
{
    primes.clear();
    for (auto [p, e] : arith::factorize(den))
    {
        if (e >= k + 1)
            return false;
        primes.push_back(p);
    }
    return true;
}

// B-free case: den must divide a product of distinct b's, i.e. every prime
// power p^e || den must divide one element of B. Collects the touched b's.
inline bool bfree_support(i64 den, const std::vector<i64>& moduli,
                          std::vector<i64>& touched)
{
    touched.clear();
    for (auto [p, e] : arith::factorize(den))
    {
        i64 pe = 1;
        for (int i = 0; i < e; ++i)
            pe *= p;
        bool found = false;
        for (i64 b : moduli)
            if (b % p == 0)
            {
                found = b % pe == 0;
                break; // at most one b can contain p (pairwise coprime)
            }
        if (!found)
            return false;
    }
    for (i64 b : moduli)
        if (std::gcd(b, den) != 1)
            touched.push_back(b);
    return true;
}

} // namespace detail

// Diffraction intensity at a rational point. Unsupported positions carry no
// atom and yield 0; I(0) = density^2.
inline double intensity(const FreenessSpec& spec, const RationalPoint& l,
                        double rel_err = kDefaultRelErr)
{
    if (l.dimension() != spec.dimension)
        throw domain_error("intensity: point dimension does not match spec");
    const double dens = density_factor(spec, rel_err);
    double amp = dens;
    if (spec.kind == FreenessSpec::Kind::KFree)
    {
        std::vector<i64> ps;
        if (!detail::kfree_support(l.den, spec.power, ps))
            return 0.0;
        const int nk = spec.dimension * spec.power;
        for (i64 p : ps)
            amp /= std::pow(static_cast<double>(p), nk) - 1.0;
    }
    else
    {
        std::vector<i64> bs;
        if (!detail::bfree_support(l.den, spec.moduli, bs))
            return 0.0;
        for (i64 b : bs)
            amp /= std::pow(static_cast<double>(b), spec.dimension) - 1.0;
    }
    return amp * amp;
}

// Axis-aligned real box; when half_open, each axis covers [lo, hi).
struct FrequencyBox
{
    std::vector<double> lo, hi;
    bool half_open = false;

    int dimension() const { return static_cast<int>(lo.size()); }
};

namespace detail
{

// Integer numerator range for one axis at denominator d.
inline std::pair<i64, i64> numerator_range(double lo, double hi, i64 d, bool half_open)
{
    double l = lo * static_cast<double>(d);
    double h = hi * static_cast<double>(d);
    i64 from = static_cast<i64>(std::ceil(l - 1e-9));
    i64 to = static_cast<i64>(std::floor(h + 1e-9));
    if (half_open && std::abs(h - static_cast<double>(to)) < 1e-9)
        --to;
    return {from, to};
}

template <class Fn>
void scan_numerators(const FrequencyBox& box, i64 d, Fn&& fn)
{
    int n = box.dimension();
    std::vector<std::pair<i64, i64>> ranges(n);
    for (int i = 0; i < n; ++i)
    {
        ranges[i] = numerator_range(box.lo[i], box.hi[i], d, box.half_open);
        if (ranges[i].first > ranges[i].second)
            return;
    }
    Vec m(n);
    for (int i = 0; i < n; ++i)
        m[i] = ranges[i].first;
    while (true)
    {
        fn(m);
        int i = n - 1;
        for (; i >= 0; --i)
        {
            if (++m[i] <= ranges[i].second)
                break;
            m[i] = ranges[i].first;
        }
        if (i < 0)
            break;
    }
}

} // namespace detail

// All atoms in the window with I(l)/I(0) >= rel_threshold, none missing.
// Denominators are enumerated with the monotone weight bound
// prod_{p|d}(p^{nk}-1)^2 <= 1/rel_threshold (resp. the B-free analogue);
// numerators are scanned per denominator. Output ordered by
// (den, lexicographic numerator).
inline std::vector<DiffractionAtom> enumerate_atoms(const FreenessSpec& spec,
                                                    const FrequencyBox& box,
                                                    double rel_threshold,
                                                    double rel_err = kDefaultRelErr)
{
    if (!(rel_threshold > 0.0) || rel_threshold > 1.0)
        throw domain_error("enumerate_atoms: rel_threshold must lie in (0,1]");
    if (box.dimension() != spec.dimension ||
        static_cast<int>(box.hi.size()) != spec.dimension)
        throw domain_error("enumerate_atoms: window dimension does not match spec");
    const double wmax = 1.0 / rel_threshold;

    std::vector<DiffractionAtom> atoms;
    auto emit_for_den = [&](i64 d) {
        detail::scan_numerators(box, d, [&](const Vec& m) {
            i64 g = d;
            for (i64 c : m)
                g = std::gcd(g, c < 0 ? -c : c);
            if (g != 1)
                return; // den(m/d) < d; handled at the smaller denominator
            RationalPoint pos{m, d};
            atoms.push_back({pos, intensity(spec, pos, rel_err)});
        });
    };

    if (spec.kind == FreenessSpec::Kind::KFree)
    {
        const int nk = spec.dimension * spec.power;
        // primes usable at all under the weight bound
        std::vector<i64> ps;
        arith::for_each_prime(
            static_cast<i64>(std::pow(std::sqrt(wmax) + 1.0, 1.0 / nk)) + 1,
            [&](i64 p) { ps.push_back(p); });
        // depth-first over ascending primes; exponents 1..k share one weight
        auto rec = [&](auto&& self, std::size_t i, i64 d, double weight) -> void {
            emit_for_den(d);
            for (std::size_t j = i; j < ps.size(); ++j)
            {
                double f = std::pow(static_cast<double>(ps[j]), nk) - 1.0;
                double w = weight * f * f;
                if (w > wmax * (1.0 + 1e-12))
                    break; // primes ascend, so all later ones fail too
                i64 m = d;
                for (int e = 1; e <= spec.power; ++e)
                {
                    m *= ps[j];
                    self(self, j + 1, m, w);
                }
            }
        };
        rec(rec, 0, 1, 1.0);
    }
    else
    {
        const int n = spec.dimension;
        auto rec = [&](auto&& self, std::size_t i, i64 d, double weight) -> void {
            emit_for_den(d);
            for (std::size_t j = i; j < spec.moduli.size(); ++j)
            {
                i64 b = spec.moduli[j];
                double f = std::pow(static_cast<double>(b), n) - 1.0;
                double w = weight * f * f;
                if (w > wmax * (1.0 + 1e-12))
                    break; // moduli ascend
                for (i64 div = 2; div <= b; ++div)
                    if (b % div == 0)
                        self(self, j + 1, d * div, w);
            }
        };
        rec(rec, 0, 1, 1.0);
    }

    std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) {
        return a.position < b.position;
    });
    return atoms;
}

// Finite-volume Fourier estimate |(1/vol B_R) sum_{x in V n B_R} e^{-2 pi i l.x}|^2.
// Direct summation at exact rational phases, fixed lexicographic order.
inline double intensity_empirical(const FreenessSpec& spec, const RationalPoint& l,
                                  double radius,
                                  i64 cap = pointsets::kDefaultWindowCap)
{
    if (l.dimension() != spec.dimension)
        throw domain_error("intensity_empirical: point dimension does not match spec");
    if (radius <= 0)
        throw domain_error("intensity_empirical: radius must be positive");
    const int n = spec.dimension;
    const i64 sq = ball_sq_bound(radius);
    const i64 b = pointsets::int_root(sq, 2);
    Vec lo(n, -b), hi(n, b);
    auto grid = pointsets::build_grid(spec, lo, hi, cap);

    const i64 d = l.den;
    std::vector<std::complex<double>> cis(d);
    for (i64 j = 0; j < d; ++j)
    {
        double phi = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(d);
        cis[j] = {std::cos(phi), std::sin(phi)};
    }

    std::complex<double> sum = 0.0;
    Vec x(n, -b);
    while (true)
    {
        if (norm_sq(x) <= sq && grid.test(x))
        {
            i64 phase = 0;
            for (int i = 0; i < n; ++i)
                phase = pos_mod(phase + pos_mod(l.numerator[i], d) * pos_mod(x[i], d), d);
            sum += cis[phase];
        }
        int i = n - 1;
        for (; i >= 0; --i)
        {
            if (++x[i] <= b)
                break;
            x[i] = -b;
        }
        if (i < 0)
            break;
    }
    double vol = ball_volume(n, radius);
    return std::norm(sum) / (vol * vol);
}

} // namespace kfree::diffraction
