#pragma once

// Visible / k-free / B-free lattice point sets over Z^n: membership tests,
// windowed generation by divisibility sieve, admissibility (hull membership),
// and lattice-periodic hole construction via the CRT.

#include <optional>
#include <set>

#include "arith.hpp"
#include "types.hpp"

namespace kfree::pointsets
{

inline i64 ceil_div(i64 a, i64 b) // b > 0
{
    return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

inline i64 int_root(i64 x, int k) // floor(x^(1/k)) for x >= 0
{
    if (x < 0)
        return -1;
    if (k == 1)
        return x;
    i64 r = static_cast<i64>(std::pow(static_cast<double>(x), 1.0 / k));
    while (r > 0 && [&] {
        i64 v = 1;
        for (int i = 0; i < k; ++i)
        {
            if (v > x / r)
                return true;
            v *= r;
        }
        return v > x;
    }())
        --r;
    while ([&] {
        i64 v = 1;
        for (int i = 0; i < k; ++i)
        {
            if (v > x / (r + 1))
                return false;
            v *= (r + 1);
        }
        return v <= x;
    }())
        ++r;
    return r;
}

// Which point set: k-free points of Z^n (visible points = k=1, n=2) or
// B-free points for a finite ascending list of pairwise coprime moduli.
struct FreenessSpec
{
    enum class Kind
    {
        KFree,
        BFree
    };

    Kind kind = Kind::KFree;
    int dimension = 2;
    int power = 1;            // k (KFree only)
    std::vector<i64> moduli;  // B (BFree only), ascending

    static FreenessSpec visible() { return kfree(2, 1); }

    static FreenessSpec kfree(int n, int k)
    {
        if (n < 1 || k < 1)
            throw domain_error("kfree spec: need n >= 1 and k >= 1");
        if (n * k <= 1)
            throw domain_error("kfree spec: the case n = k = 1 is excluded");
        FreenessSpec s;
        s.kind = Kind::KFree;
        s.dimension = n;
        s.power = k;
        return s;
    }

    static FreenessSpec bfree(int n, std::vector<i64> b)
    {
        if (n < 1)
            throw domain_error("bfree spec: need n >= 1");
        for (std::size_t i = 0; i < b.size(); ++i)
        {
            if (b[i] < 2)
                throw domain_error("bfree spec: moduli must be >= 2");
            if (i && b[i] <= b[i - 1])
                throw domain_error("bfree spec: moduli must be strictly ascending");
        }
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t j = i + 1; j < b.size(); ++j)
                if (std::gcd(b[i], b[j]) != 1)
                    throw domain_error("bfree spec: moduli " + std::to_string(b[i]) +
                                       " and " + std::to_string(b[j]) +
                                       " are not coprime");
        FreenessSpec s;
        s.kind = Kind::BFree;
        s.dimension = n;
        s.moduli = std::move(b);
        return s;
    }

    // Exclusion moduli m <= limit, increasing: p^k over primes p for KFree,
    // the elements of B for BFree. x is excluded iff m | gcd(x) for some m.
    template <class Fn>
    void for_each_exclusion_modulus(i64 limit, Fn&& fn) const
    {
        if (kind == Kind::KFree)
        {
            arith::for_each_prime(int_root(limit, power), [&](i64 p) {
                i64 m = 1;
                for (int i = 0; i < power; ++i)
                    m *= p;
                fn(m);
            });
        }
        else
        {
            for (i64 b : moduli)
                if (b <= limit)
                    fn(b);
        }
    }

    std::string to_string() const
    {
        if (kind == Kind::KFree)
            return "kfree:" + std::to_string(dimension) + "," + std::to_string(power);
        std::string s = "bfree:" + std::to_string(dimension);
        for (i64 b : moduli)
            s += "," + std::to_string(b);
        return s;
    }
};

// Ball or box window in Z^n (box bounds inclusive).
struct LatticeWindow
{
    enum class Shape
    {
        Ball,
        Box
    };

    Shape shape = Shape::Ball;
    int dimension = 2;
    double radius = 0.0;
    Vec lo, hi;

    static LatticeWindow ball(int n, double r)
    {
        if (r < 0)
            throw domain_error("window: negative radius");
        LatticeWindow w;
        w.shape = Shape::Ball;
        w.dimension = n;
        w.radius = r;
        return w;
    }

    static LatticeWindow box(Vec lo_, Vec hi_)
    {
        if (lo_.size() != hi_.size() || lo_.empty())
            throw domain_error("window: box bounds dimension mismatch");
        LatticeWindow w;
        w.shape = Shape::Box;
        w.dimension = static_cast<int>(lo_.size());
        w.lo = std::move(lo_);
        w.hi = std::move(hi_);
        return w;
    }

    i64 sq_bound() const { return ball_sq_bound(radius); }

    void bounding_box(Vec& blo, Vec& bhi) const
    {
        if (shape == Shape::Box)
        {
            blo = lo;
            bhi = hi;
        }
        else
        {
            i64 r = int_root(sq_bound(), 2);
            blo.assign(dimension, -r);
            bhi.assign(dimension, r);
        }
    }

    bool contains(const Vec& x) const
    {
        if (static_cast<int>(x.size()) != dimension)
            return false;
        if (shape == Shape::Ball)
            return norm_sq(x) <= sq_bound();
        for (int d = 0; d < dimension; ++d)
            if (x[d] < lo[d] || x[d] > hi[d])
                return false;
        return true;
    }

    double point_count_estimate() const
    {
        Vec blo, bhi;
        bounding_box(blo, bhi);
        double v = 1;
        for (int d = 0; d < dimension; ++d)
        {
            if (bhi[d] < blo[d])
                return 0;
            v *= static_cast<double>(bhi[d] - blo[d] + 1);
        }
        return v;
    }

    std::string to_string() const
    {
        if (shape == Shape::Ball)
        {
            std::ostringstream os;
            os << "ball:" << radius;
            return os.str();
        }
        return "box:" + vec_to_string(lo) + ":" + vec_to_string(hi);
    }
};

constexpr i64 kDefaultWindowCap = 100'000'000;

// True iff x belongs to the point set: x nonzero and no exclusion modulus
// divides gcd(x). Single-point queries go gcd-then-factor; bulk generation
// uses the divisibility sieve below instead.
inline bool is_member(const FreenessSpec& spec, const Vec& x)
{
    if (static_cast<int>(x.size()) != spec.dimension)
        throw domain_error("is_member: point dimension does not match spec");
    i64 g = 0;
    for (i64 c : x)
        g = std::gcd(g, c < 0 ? -c : c);
    if (g == 0)
        return false; // 0 lies in every exclusion class
    if (spec.kind == FreenessSpec::Kind::KFree)
        return spec.power == 1 ? g == 1 : arith::is_power_free(g, spec.power);
    for (i64 b : spec.moduli)
        if (g % b == 0)
            return false;
    return true;
}

namespace detail
{

// Calls fn(x) for every x in the box [lo,hi] with m | x componentwise.
template <class Fn>
void for_each_common_multiple(const Vec& lo, const Vec& hi, i64 m, Fn&& fn)
{
    int n = static_cast<int>(lo.size());
    Vec x(n);
    auto rec = [&](auto&& self, int d) -> void {
        if (d == n)
        {
            fn(x);
            return;
        }
        for (i64 v = ceil_div(lo[d], m) * m; v <= hi[d]; v += m)
        {
            x[d] = v;
            self(self, d + 1);
        }
    };
    rec(rec, 0);
}

} // namespace detail

// Dense membership table over an integer box; the bulk counterpart of
// is_member used by generation, correlation counting and patch scans.
struct MembershipGrid
{
    Vec lo, hi;
    std::vector<i64> stride;
    std::vector<char> member;
    int dimension = 0;

    std::size_t index(const Vec& x) const
    {
        std::size_t idx = 0;
        for (int d = 0; d < dimension; ++d)
            idx += static_cast<std::size_t>(x[d] - lo[d]) * stride[d];
        return idx;
    }

    bool in_box(const Vec& x) const
    {
        for (int d = 0; d < dimension; ++d)
            if (x[d] < lo[d] || x[d] > hi[d])
                return false;
        return true;
    }

    bool test(const Vec& x) const { return member[index(x)] != 0; }
};

inline MembershipGrid build_grid(const FreenessSpec& spec, const Vec& lo, const Vec& hi,
                                 i64 cap = kDefaultWindowCap)
{
    MembershipGrid g;
    g.dimension = spec.dimension;
    if (static_cast<int>(lo.size()) != spec.dimension ||
        static_cast<int>(hi.size()) != spec.dimension)
        throw domain_error("build_grid: box dimension does not match spec");
    g.lo = lo;
    g.hi = hi;
    i64 total = 1;
    for (int d = 0; d < g.dimension; ++d)
    {
        i64 extent = hi[d] >= lo[d] ? hi[d] - lo[d] + 1 : 0;
        if (extent == 0)
            return g;
        if (total > cap / extent)
            throw resource_error("window of " + std::to_string(total) + "x" +
                                 std::to_string(extent) +
                                 " points exceeds the cap of " + std::to_string(cap));
        total *= extent;
    }
    g.stride.assign(g.dimension, 1);
    for (int d = g.dimension - 2; d >= 0; --d)
        g.stride[d] = g.stride[d + 1] * (hi[d + 1] - lo[d + 1] + 1);
    g.member.assign(static_cast<std::size_t>(total), 1);

    i64 max_abs = 0;
    for (int d = 0; d < g.dimension; ++d)
        max_abs = std::max({max_abs, std::abs(lo[d]), std::abs(hi[d])});
    spec.for_each_exclusion_modulus(max_abs, [&](i64 m) {
        detail::for_each_common_multiple(lo, hi, m,
                                         [&](const Vec& x) { g.member[g.index(x)] = 0; });
    });
    Vec zero(g.dimension, 0);
    if (g.in_box(zero))
        g.member[g.index(zero)] = 0;
    return g;
}

// A generated point set together with the spec and window that produced it.
struct PointSet
{
    FreenessSpec spec;
    LatticeWindow window;
    std::vector<Vec> points; // lexicographic

    bool contains(const Vec& x) const
    {
        return std::binary_search(points.begin(), points.end(), x);
    }
};

// Exactly { x in window | is_member(spec, x) }, in lexicographic order.
inline PointSet generate(const FreenessSpec& spec, const LatticeWindow& window,
                         i64 cap = kDefaultWindowCap)
{
    if (window.dimension != spec.dimension)
        throw domain_error("generate: window dimension does not match spec");
    PointSet out{spec, window, {}};
    Vec lo, hi;
    window.bounding_box(lo, hi);
    for (int d = 0; d < spec.dimension; ++d)
        if (hi[d] < lo[d])
            return out;
    double est = window.point_count_estimate();
    if (est > static_cast<double>(cap))
        throw resource_error("generate: window needs a cap of at least " +
                             std::to_string(static_cast<i64>(est)) + " points");
    MembershipGrid grid = build_grid(spec, lo, hi, cap);

    const bool ball = window.shape == LatticeWindow::Shape::Ball;
    const i64 sq = window.sq_bound();
    Vec x = lo;
    std::size_t idx = 0;
    const std::size_t total = grid.member.size();
    while (idx < total)
    {
        if (grid.member[idx] && (!ball || norm_sq(x) <= sq))
            out.points.push_back(x);
        ++idx;
        for (int d = spec.dimension - 1; d >= 0; --d)
        {
            if (++x[d] <= hi[d])
                break;
            x[d] = lo[d];
        }
    }
    return out;
}

struct AdmissibilityResult
{
    bool admissible = true;
    std::optional<i64> witness; // first modulus whose residue classes are all hit
};

namespace detail
{

// Number of distinct componentwise reductions of A modulo m.
inline i64 count_residues(const std::vector<Vec>& a, i64 m)
{
    std::vector<i64> keys;
    keys.reserve(a.size());
    for (const Vec& x : a)
    {
        i64 key = 0;
        for (i64 c : x)
            key = key * m + pos_mod(c, m);
        keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return static_cast<i64>(keys.size());
}

} // namespace detail

// A finite set is admissible iff it misses a residue class modulo every
// exclusion modulus m (|A_m| < m^n). Only moduli with m^n <= |A| can fail.
inline AdmissibilityResult is_admissible(const FreenessSpec& spec,
                                         const std::vector<Vec>& a)
{
    AdmissibilityResult r;
    if (a.empty())
        return r;
    const int n = spec.dimension;
    const i64 size = static_cast<i64>(a.size());
    i64 max_m = int_root(size, n);
    std::vector<i64> moduli;
    spec.for_each_exclusion_modulus(max_m, [&](i64 m) { moduli.push_back(m); });
    for (i64 m : moduli)
    {
        i64 full = 1;
        for (int d = 0; d < n; ++d)
            full *= m;
        if (full > size)
            continue;
        if (detail::count_residues(a, m) == full)
        {
            r.admissible = false;
            r.witness = m;
            return r;
        }
    }
    return r;
}

struct Hole
{
    Vec center;
    i64 period;
};

// Constructs a translate t such that t + B_rho(0) contains no member, and a
// lattice period for which every translate of t by period * Z^n also works:
// the i-th ball point is pushed into the i-th exclusion class by the CRT.
// The returned period is the product of the chosen moduli; it is a valid
// period of the construction but is not claimed to be minimal.
inline Hole find_hole(const FreenessSpec& spec, double inradius)
{
    if (inradius <= 0)
        throw domain_error("find_hole: inradius must be positive");
    LatticeWindow ball = LatticeWindow::ball(spec.dimension, inradius);
    Vec lo, hi;
    ball.bounding_box(lo, hi);
    std::vector<Vec> pts;
    const i64 sq = ball.sq_bound();
    Vec x = lo;
    while (true)
    {
        if (norm_sq(x) <= sq)
            pts.push_back(x);
        int d = spec.dimension - 1;
        for (; d >= 0; --d)
        {
            if (++x[d] <= hi[d])
                break;
            x[d] = lo[d];
        }
        if (d < 0)
            break;
    }

    std::vector<i64> ms;
    if (spec.kind == FreenessSpec::Kind::KFree)
    {
        i64 p = 2;
        while (ms.size() < pts.size())
        {
            i64 m = 1;
            for (int i = 0; i < spec.power; ++i)
            {
                if (m > INT64_MAX / p)
                    throw resource_error("find_hole: modulus overflow");
                m *= p;
            }
            ms.push_back(m);
            p = arith::next_prime(p + 1);
        }
    }
    else
    {
        if (spec.moduli.size() < pts.size())
            throw domain_error("find_hole: B too small for requested inradius (need " +
                               std::to_string(pts.size()) + " moduli, have " +
                               std::to_string(spec.moduli.size()) + ")");
        ms.assign(spec.moduli.begin(), spec.moduli.begin() + pts.size());
    }

    std::vector<arith::ResidueVector> congruences;
    congruences.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        Vec target(spec.dimension);
        for (int d = 0; d < spec.dimension; ++d)
            target[d] = pos_mod(-pts[i][d], ms[i]);
        congruences.push_back({std::move(target), ms[i]});
    }
    auto sol = arith::crt_solve(congruences);
    return {std::move(sol.solution), sol.modulus};
}

} // namespace kfree::pointsets
