#pragma once

// Patches of k-free / B-free point sets: extraction, closed-form frequencies
// via the alternating sum over fillings of the window, containment measures,
// empirical estimation, census over a window, and patch counting entropy.
//
// The closed formulas multiply one factor (1 - |S_m|/m^n) per exclusion
// modulus m. Once m exceeds the patch diameter the reduction of S modulo m
// is injective, so |S_m| = |S| and the remaining factors collapse into a
// single certified Euler product with constant numerator; that stabilization
// is what makes the formulas computable.

#include <map>

#include "pointsets.hpp"

namespace kfree::patches
{

using pointsets::FreenessSpec;
using pointsets::LatticeWindow;
using pointsets::PointSet;

// Lattice points of the ball B_rho(0), lexicographic.
inline std::vector<Vec> ball_offsets(int dimension, double rho)
{
    std::vector<Vec> pts;
    const i64 sq = ball_sq_bound(rho);
    const i64 b = pointsets::int_root(sq, 2);
    Vec x(dimension, -b);
    while (true)
    {
        if (norm_sq(x) <= sq)
            pts.push_back(x);
        int d = dimension - 1;
        for (; d >= 0; --d)
        {
            if (++x[d] <= b)
                break;
            x[d] = -b;
        }
        if (d < 0)
            break;
    }
    return pts;
}

// A finite origin-centered configuration within radius rho, canonical order.
struct Patch
{
    double radius = 0.0;
    std::vector<Vec> points; // sorted lexicographically

    static Patch make(double rho, std::vector<Vec> pts)
    {
        const i64 sq = ball_sq_bound(rho);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        for (const Vec& p : pts)
            if (norm_sq(p) > sq)
                throw domain_error("Patch: point " + vec_to_string(p) +
                                   " lies outside the ball of radius " +
                                   std::to_string(rho));
        return {rho, std::move(pts)};
    }

    bool operator==(const Patch& o) const { return points == o.points; }
    bool operator<(const Patch& o) const { return points < o.points; }
};

// The rho-patch of a generated point set at t: (set - t) n B_rho(0).
inline Patch extract_patch(const PointSet& ps, const Vec& t, double rho)
{
    if (static_cast<int>(t.size()) != ps.spec.dimension)
        throw domain_error("extract_patch: translate dimension mismatch");
    auto offsets = ball_offsets(ps.spec.dimension, rho);
    std::vector<Vec> hit;
    for (const Vec& w : offsets)
    {
        Vec y(t.size());
        for (std::size_t d = 0; d < t.size(); ++d)
            y[d] = t[d] + w[d];
        if (!ps.window.contains(y))
            throw domain_error("extract_patch: window does not cover the ball of radius " +
                               std::to_string(rho) + " at " + vec_to_string(t));
        if (ps.contains(y))
            hit.push_back(w);
    }
    return Patch::make(rho, std::move(hit));
}

struct FrequencyResult
{
    double value = 0.0;
    i64 term_count = 0;
    double tail_error = 0.0; // certified bound from Euler-product truncation
};

struct MeasureResult
{
    double value = 0.0;
    double tail_error = 0.0;
};

constexpr double kTailRelErr = 1e-7;

namespace detail
{

inline i64 pow_i64(i64 b, int e)
{
    i64 v = 1;
    for (int i = 0; i < e; ++i)
        v *= b;
    return v;
}

// Head cutoff: moduli above it have injective reduction on S (m > diameter)
// and satisfy m^n > 2|S| so the Euler tail bound applies.
inline i64 head_modulus_bound(i64 diameter, i64 set_size, int dimension)
{
    return std::max(diameter, pointsets::int_root(2 * set_size, dimension));
}

} // namespace detail

// nu(B_S): the measure of hull elements whose patch at 0 contains S, i.e.
// prod_m (1 - |S_m|/m^n) over all exclusion moduli. Vanishes iff S is not
// admissible. Works for arbitrary finite S (not only origin-centered).
inline MeasureResult containment_measure(const FreenessSpec& spec,
                                         const std::vector<Vec>& points,
                                         double rel_err = kTailRelErr)
{
    std::vector<Vec> s(points);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    const i64 c = static_cast<i64>(s.size());
    if (c == 0)
        return {1.0, 0.0};
    const int n = spec.dimension;

    if (spec.kind == FreenessSpec::Kind::BFree)
    {
        double v = 1.0;
        for (i64 b : spec.moduli)
        {
            i64 full = detail::pow_i64(b, n);
            v *= 1.0 - static_cast<double>(pointsets::detail::count_residues(s, b)) /
                           static_cast<double>(full);
        }
        return {v, 0.0};
    }

    const int k = spec.power;
    const int nk = n * k;
    // gcds of coordinate differences decide which moduli can merge residues
    std::vector<i64> pair_gcds;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
        {
            i64 g = 0;
            for (int d = 0; d < n; ++d)
                g = std::gcd(g, std::abs(s[i][d] - s[j][d]));
            pair_gcds.push_back(g);
        }

    const i64 m0 = pointsets::int_root(2 * c, n); // tail factors stay above 1/2
    const i64 tau = pointsets::int_root(m0, k);

    auto tail = arith::rational_prime_product(c, nk, tau, rel_err);
    double value = tail.value;

    for (i64 p = 2; p <= tau; p = arith::next_prime(p + 1))
    {
        i64 m = detail::pow_i64(p, k);
        double full = std::pow(static_cast<double>(p), nk);
        value *= 1.0 - static_cast<double>(pointsets::detail::count_residues(s, m)) / full;
    }

    // moduli past tau whose reduction is not injective: p^k divides some
    // pairwise difference; replace the generic tail factor by the exact one
    std::vector<i64> affected;
    for (i64 g : pair_gcds)
        for (auto [p, e] : arith::factorize(g))
            if (p > tau && e >= k)
                affected.push_back(p);
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
    for (i64 p : affected)
    {
        i64 m = detail::pow_i64(p, k);
        double full = std::pow(static_cast<double>(p), nk);
        double generic = 1.0 - static_cast<double>(c) / full;
        double exact =
            1.0 - static_cast<double>(pointsets::detail::count_residues(s, m)) / full;
        value *= exact / generic;
    }

    return {value, std::abs(value) * std::expm1(tail.certified_bound)};
}

// Closed-form patch frequency: the alternating sum over fillings F of the
// window complement,
//   nu(P) = sum_{F subset W \ P} (-1)^|F| prod_m (1 - |(P u F)_m| / m^n).
// Returns 0 for non-admissible P (a zero factor survives in every term).
inline FrequencyResult frequency_closed(const FreenessSpec& spec, const Patch& patch,
                                        int complement_cap = 20,
                                        double rel_err = kTailRelErr)
{
    const int n = spec.dimension;
    auto window = ball_offsets(n, patch.radius);
    for (const Vec& p : patch.points)
        if (!std::binary_search(window.begin(), window.end(), p))
            throw domain_error("frequency_closed: patch point outside its window");
    std::vector<Vec> complement;
    for (const Vec& w : window)
        if (!std::binary_search(patch.points.begin(), patch.points.end(), w))
            complement.push_back(w);
    const int cc = static_cast<int>(complement.size());
    if (cc > complement_cap)
        throw resource_error(
            "frequency_closed: window complement has " + std::to_string(cc) +
            " points (cap " + std::to_string(complement_cap) +
            "); use frequency_empirical instead");

    const i64 r = pointsets::int_root(ball_sq_bound(patch.radius), 2);
    const i64 wsize = static_cast<i64>(window.size());
    const i64 m0 = detail::head_modulus_bound(2 * r, wsize, n);

    std::vector<i64> head; // exact moduli
    spec.for_each_exclusion_modulus(m0, [&](i64 m) { head.push_back(m); });
    i64 tau = 0;
    const bool kfree = spec.kind == FreenessSpec::Kind::KFree;
    if (kfree)
        tau = pointsets::int_root(m0, spec.power);
    else
        for (i64 b : spec.moduli) // no analytic tail: all moduli are exact
            if (b > m0)
                head.push_back(b);

    double value = 0.0;
    double tail_error = 0.0;
    std::vector<Vec> s;
    const i64 terms = 1ll << cc;
    for (i64 mask = 0; mask < terms; ++mask)
    {
        s = patch.points;
        for (int i = 0; i < cc; ++i)
            if (mask & (1ll << i))
                s.push_back(complement[i]);
        double term = 1.0;
        for (i64 m : head)
        {
            double full = std::pow(static_cast<double>(m), n);
            term *= 1.0 -
                    static_cast<double>(pointsets::detail::count_residues(s, m)) / full;
            if (term == 0.0)
                break;
        }
        double bound = 0.0;
        if (kfree && term != 0.0)
        {
            auto tail = arith::rational_prime_product(static_cast<i64>(s.size()),
                                                      n * spec.power, tau, rel_err);
            term *= tail.value;
            bound = tail.certified_bound;
        }
        if (std::popcount(static_cast<std::uint64_t>(mask)) & 1)
            term = -term;
        value += term;
        tail_error += std::abs(term) * std::expm1(bound);
    }
    return {value, terms, tail_error};
}

// Empirical frequency: the density of translates t in B_R(center) whose
// rho-patch equals P.
inline double frequency_empirical(const FreenessSpec& spec, const Patch& patch,
                                  double radius, const Vec& center = {},
                                  i64 cap = pointsets::kDefaultWindowCap)
{
    const int n = spec.dimension;
    Vec c = center.empty() ? Vec(n, 0) : center;
    if (static_cast<int>(c.size()) != n)
        throw domain_error("frequency_empirical: center dimension mismatch");
    auto offsets = ball_offsets(n, patch.radius);
    std::vector<char> wanted(offsets.size());
    for (std::size_t i = 0; i < offsets.size(); ++i)
        wanted[i] = std::binary_search(patch.points.begin(), patch.points.end(),
                                       offsets[i]);

    const i64 br = pointsets::int_root(ball_sq_bound(radius), 2);
    const i64 pr = pointsets::int_root(ball_sq_bound(patch.radius), 2);
    Vec lo(n), hi(n);
    for (int d = 0; d < n; ++d)
    {
        lo[d] = c[d] - br - pr;
        hi[d] = c[d] + br + pr;
    }
    auto grid = pointsets::build_grid(spec, lo, hi, cap);
    std::vector<i64> off_idx(offsets.size());
    for (std::size_t i = 0; i < offsets.size(); ++i)
    {
        i64 o = 0;
        for (int d = 0; d < n; ++d)
            o += offsets[i][d] * grid.stride[d];
        off_idx[i] = o;
    }

    const i64 sq = ball_sq_bound(radius);
    i64 count = 0;
    Vec t(n);
    for (int d = 0; d < n; ++d)
        t[d] = c[d] - br;
    while (true)
    {
        i64 nsq = 0;
        for (int d = 0; d < n; ++d)
            nsq += (t[d] - c[d]) * (t[d] - c[d]);
        if (nsq <= sq)
        {
            i64 base = static_cast<i64>(grid.index(t));
            bool match = true;
            for (std::size_t i = 0; i < offsets.size(); ++i)
                if (grid.member[base + off_idx[i]] != wanted[i])
                {
                    match = false;
                    break;
                }
            if (match)
                ++count;
        }
        int d = n - 1;
        for (; d >= 0; --d)
        {
            if (++t[d] <= c[d] + br)
                break;
            t[d] = c[d] - br;
        }
        if (d < 0)
            break;
    }
    return static_cast<double>(count) / ball_volume(n, radius);
}

struct CensusEntry
{
    Patch patch;
    i64 count = 0;
};

struct CensusResult
{
    std::vector<CensusEntry> entries; // ordered by patch point list
    i64 translates_scanned = 0;
    double volume = 0.0;

    i64 observed() const { return static_cast<i64>(entries.size()); }
};

// Exhaustive census of rho-patches over t in B_R(0).
inline CensusResult patch_census(const FreenessSpec& spec, double rho, double radius,
                                 i64 cap = pointsets::kDefaultWindowCap)
{
    const int n = spec.dimension;
    auto offsets = ball_offsets(n, rho);
    if (offsets.size() > 63)
        throw resource_error("patch_census: ball has " +
                             std::to_string(offsets.size()) +
                             " offsets; only up to 63 supported");

    const i64 br = pointsets::int_root(ball_sq_bound(radius), 2);
    const i64 pr = pointsets::int_root(ball_sq_bound(rho), 2);
    Vec lo(n, -br - pr), hi(n, br + pr);
    auto grid = pointsets::build_grid(spec, lo, hi, cap);
    std::vector<i64> off_idx(offsets.size());
    for (std::size_t i = 0; i < offsets.size(); ++i)
    {
        i64 o = 0;
        for (int d = 0; d < n; ++d)
            o += offsets[i][d] * grid.stride[d];
        off_idx[i] = o;
    }

    const i64 sq = ball_sq_bound(radius);
    std::map<std::uint64_t, i64> counts;
    i64 scanned = 0;
    Vec t(n, -br);
    while (true)
    {
        if (norm_sq(t) <= sq)
        {
            ++scanned;
            std::uint64_t mask = 0;
            i64 base = static_cast<i64>(grid.index(t));
            for (std::size_t i = 0; i < offsets.size(); ++i)
                if (grid.member[base + off_idx[i]])
                    mask |= 1ull << i;
            ++counts[mask];
        }
        int d = n - 1;
        for (; d >= 0; --d)
        {
            if (++t[d] <= br)
                break;
            t[d] = -br;
        }
        if (d < 0)
            break;
    }

    CensusResult res;
    res.translates_scanned = scanned;
    res.volume = ball_volume(n, radius);
    for (const auto& [mask, cnt] : counts)
    {
        std::vector<Vec> pts;
        for (std::size_t i = 0; i < offsets.size(); ++i)
            if (mask & (1ull << i))
                pts.push_back(offsets[i]);
        res.entries.push_back({Patch::make(rho, std::move(pts)), cnt});
    }
    std::sort(res.entries.begin(), res.entries.end(),
              [](const auto& a, const auto& b) { return a.patch < b.patch; });
    return res;
}

// Patch counting entropy h_pc = log(2) * dens(V); with base-2 logarithms the
// prefactor becomes 1.
inline double patch_counting_entropy(const FreenessSpec& spec, bool base2 = false,
                                     double rel_err = 1e-8)
{
    double dens;
    if (spec.kind == FreenessSpec::Kind::KFree)
        dens = arith::rational_prime_product(1, spec.dimension * spec.power, 1, rel_err)
                   .value;
    else
    {
        dens = 1.0;
        for (i64 b : spec.moduli)
            dens *= 1.0 - 1.0 / std::pow(static_cast<double>(b), spec.dimension);
    }
    return dens * (base2 ? 1.0 : std::numbers::ln2);
}

} // namespace kfree::patches
