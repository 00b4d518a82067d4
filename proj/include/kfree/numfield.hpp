#pragma once

// The quadratic ring Z[sqrt2] of Q(sqrt2): exact arithmetic, prime ideal
// classification by p mod 8, valuations, the k-free sieve, the Minkowski
// embedding, the Dedekind zeta function, denominator ideals of points of
// Q L*, and diffraction intensities of the embedded k-free integers.
//
// Z[sqrt2] is a norm-Euclidean PID, so ideals are handled through
// generators and ideal arithmetic is element arithmetic up to units.

#include "arith.hpp"
#include "diffraction.hpp"
#include "types.hpp"

namespace kfree::numfield
{

// a + b*sqrt(2) with exact integer coordinates.
struct QuadInt
{
    i64 a = 0, b = 0;

    QuadInt() = default;
    QuadInt(i64 a_, i64 b_) : a(a_), b(b_) {}

    QuadInt conj() const { return {a, -b}; }
    i64 norm() const { return a * a - 2 * b * b; }
    i64 trace() const { return 2 * a; }
    bool is_zero() const { return a == 0 && b == 0; }
    bool is_unit() const { return norm() == 1 || norm() == -1; }

    QuadInt operator+(const QuadInt& o) const { return {a + o.a, b + o.b}; }
    QuadInt operator-(const QuadInt& o) const { return {a - o.a, b - o.b}; }
    QuadInt operator-() const { return {-a, -b}; }
    QuadInt operator*(const QuadInt& o) const
    {
        return {a * o.a + 2 * b * o.b, a * o.b + b * o.a};
    }
    bool operator==(const QuadInt& o) const { return a == o.a && b == o.b; }
    bool operator!=(const QuadInt& o) const { return !(*this == o); }

    std::string to_string() const
    {
        std::ostringstream os;
        os << a;
        if (b >= 0)
            os << "+" << b << "*sqrt2";
        else
            os << b << "*sqrt2";
        return os.str();
    }
};

inline i64 floor_div(i64 n, i64 d)
{
    i64 q = n / d, r = n % d;
    return (r != 0 && ((r < 0) != (d < 0))) ? q - 1 : q;
}

inline i64 round_div(i64 n, i64 d) // nearest integer to n/d
{
    if (d < 0)
    {
        n = -n;
        d = -d;
    }
    return floor_div(2 * n + d, 2 * d);
}

// alpha / beta when the quotient lies in Z[sqrt2].
inline std::optional<QuadInt> divide_exact(const QuadInt& alpha, const QuadInt& beta)
{
    if (beta.is_zero())
        throw domain_error("divide_exact: division by zero");
    i64 nb = beta.norm();
    i64 na = alpha.a * beta.a - 2 * alpha.b * beta.b; // alpha * conj(beta)
    i64 nb2 = alpha.b * beta.a - alpha.a * beta.b;
    if (na % nb || nb2 % nb)
        return std::nullopt;
    return QuadInt{na / nb, nb2 / nb};
}

// Euclidean step: quotient by rounding the exact rational coordinates; the
// remainder norm drops strictly (|N| <= 1/2 |N(beta)| for Z[sqrt2]).
inline QuadInt euclid_quotient(const QuadInt& alpha, const QuadInt& beta)
{
    i64 nb = beta.norm();
    i64 u = alpha.a * beta.a - 2 * alpha.b * beta.b;
    i64 v = alpha.b * beta.a - alpha.a * beta.b;
    return {round_div(u, nb), round_div(v, nb)};
}

inline QuadInt gcd(QuadInt x, QuadInt y)
{
    while (!y.is_zero())
    {
        QuadInt q = euclid_quotient(x, y);
        QuadInt r = x - q * y;
        x = y;
        y = r;
    }
    return x;
}

inline bool is_associate(const QuadInt& x, const QuadInt& y)
{
    if (x.is_zero() || y.is_zero())
        return x.is_zero() && y.is_zero();
    auto q = divide_exact(x, y);
    return q && q->is_unit();
}

// Deterministic generator choice: scale by powers of the fundamental unit
// 1+sqrt2 until max(|x|,|x'|) is minimal, then fix the sign.
inline QuadInt unit_normalize(QuadInt g)
{
    if (g.is_zero())
        return g;
    const QuadInt u{1, 1}, uinv{-1, 1}; // (1+sqrt2)(-1+sqrt2) = 1
    auto score = [](const QuadInt& z) {
        double x = static_cast<double>(z.a) + std::numbers::sqrt2 * z.b;
        double xp = static_cast<double>(z.a) - std::numbers::sqrt2 * z.b;
        return std::max(std::abs(x), std::abs(xp));
    };
    while (true)
    {
        QuadInt up = g * u, down = g * uinv;
        if (score(up) < score(g))
            g = up;
        else if (score(down) < score(g))
            g = down;
        else
            break;
    }
    double x = static_cast<double>(g.a) + std::numbers::sqrt2 * g.b;
    if (x < 0 || (x == 0 && g.b < 0))
        g = -g;
    return g;
}

// Point of the Minkowski embedding j(x) = (x, x').
struct EmbeddedPoint
{
    double x = 0.0, x_conj = 0.0;
};

inline EmbeddedPoint minkowski_embed(const QuadInt& alpha)
{
    return {static_cast<double>(alpha.a) + std::numbers::sqrt2 * alpha.b,
            static_cast<double>(alpha.a) - std::numbers::sqrt2 * alpha.b};
}

enum class IdealClass
{
    Ramified, // p = 2
    Split,    // p = +-1 (mod 8)
    Inert     // p = +-3 (mod 8)
};

struct PrimeIdealZr2
{
    IdealClass cls = IdealClass::Inert;
    i64 rational_prime = 0;
    QuadInt generator;
    i64 norm = 0; // 2 for (sqrt2), p for split, p^2 for inert
};

inline IdealClass classify_prime(i64 p)
{
    if (p == 2)
        return IdealClass::Ramified;
    i64 r = p % 8;
    return (r == 1 || r == 7) ? IdealClass::Split : IdealClass::Inert;
}

// Generator with |a^2 - 2b^2| = p for a split prime, by bounded search.
inline QuadInt split_generator(i64 p)
{
    i64 amax = static_cast<i64>(std::ceil(std::sqrt(3.0 * static_cast<double>(p))));
    i64 bmax = static_cast<i64>(std::ceil(std::sqrt(2.0 * static_cast<double>(p))));
    for (i64 a = 0; a <= amax; ++a)
        for (i64 b = 0; b <= bmax; ++b)
        {
            i64 n = a * a - 2 * b * b;
            if (n == p || n == -p)
                return {a, b};
        }
    throw resource_error("split_generator: no generator found for p=" +
                         std::to_string(p) + " within the search bound");
}

// The prime ideals above a rational prime (one, or a conjugate pair).
inline std::vector<PrimeIdealZr2> ideals_above(i64 p)
{
    switch (classify_prime(p))
    {
    case IdealClass::Ramified:
        return {{IdealClass::Ramified, 2, {0, 1}, 2}};
    case IdealClass::Split:
    {
        QuadInt g = split_generator(p);
        return {{IdealClass::Split, p, g, p},
                {IdealClass::Split, p, g.conj(), p}};
    }
    default:
        return {{IdealClass::Inert, p, {p, 0}, p * p}};
    }
}

// All prime ideals with norm <= bound, ascending norm.
inline std::vector<PrimeIdealZr2> prime_ideals_up_to(i64 norm_bound)
{
    if (norm_bound < 2)
        throw domain_error("prime_ideals_up_to: bound must be >= 2");
    std::vector<PrimeIdealZr2> out;
    arith::for_each_prime(norm_bound, [&](i64 p) {
        for (auto& ideal : ideals_above(p))
            if (ideal.norm <= norm_bound)
                out.push_back(ideal);
    });
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.norm != y.norm)
            return x.norm < y.norm;
        if (x.rational_prime != y.rational_prime)
            return x.rational_prime < y.rational_prime;
        return x.generator.b > y.generator.b;
    });
    return out;
}

// Largest j with generator^j dividing alpha; bounded by v_p(|N(alpha)|).
inline int ideal_valuation(QuadInt alpha, const PrimeIdealZr2& ideal)
{
    if (alpha.is_zero())
        throw domain_error("ideal_valuation: argument must be nonzero");
    int v = 0;
    while (true)
    {
        auto q = divide_exact(alpha, ideal.generator);
        if (!q)
            return v;
        alpha = *q;
        ++v;
    }
}

// k-free: no prime ideal power p^k divides (alpha). Units are k-free.
inline bool is_kfree(const QuadInt& alpha, int k)
{
    if (alpha.is_zero())
        throw domain_error("is_kfree: zero is excluded");
    if (k < 2)
        throw domain_error("is_kfree: need k >= 2");
    i64 n = std::abs(alpha.norm());
    if (n == 1)
        return true;
    for (auto [p, e] : arith::factorize(n))
    {
        switch (classify_prime(p))
        {
        case IdealClass::Ramified:
            if (e >= k && ideal_valuation(alpha, ideals_above(2).front()) >= k)
                return false;
            break;
        case IdealClass::Split:
            if (e >= k)
                for (const auto& ideal : ideals_above(p))
                    if (ideal_valuation(alpha, ideal) >= k)
                        return false;
            break;
        case IdealClass::Inert:
            // valuation is e/2; it reaches k only when e >= 2k
            if (e >= 2 * k)
                return false;
            break;
        }
    }
    return true;
}

struct EmbeddedQuadInt
{
    QuadInt value;
    EmbeddedPoint point;
};

// j(V) n B_R(0) for V the k-free integers of Z[sqrt2]. The ball constraint
// x^2 + x'^2 <= R^2 reads 2a^2 + 4b^2 <= R^2, exact in integers.
inline std::vector<EmbeddedQuadInt> generate(int k, double radius,
                                             i64 cap = pointsets::kDefaultWindowCap)
{
    const i64 sq = ball_sq_bound(radius);
    const i64 amax = pointsets::int_root(sq / 2, 2);
    const i64 bmax = pointsets::int_root(sq / 4, 2);
    if ((2 * amax + 1) * (2 * bmax + 1) > cap)
        throw resource_error("generate: window exceeds the cap");
    std::vector<EmbeddedQuadInt> out;
    for (i64 a = -amax; a <= amax; ++a)
        for (i64 b = -bmax; b <= bmax; ++b)
        {
            if (a == 0 && b == 0)
                continue;
            if (2 * a * a + 4 * b * b > sq)
                continue;
            QuadInt alpha{a, b};
            if (is_kfree(alpha, k))
                out.push_back({alpha, minkowski_embed(alpha)});
        }
    return out;
}

// zeta_K(s) = 1/(1-2^-s) prod_{p=+-1(8)} (1-p^-s)^-2 prod_{p=+-3(8)} (1-p^-2s)^-1
// as a certified truncated Euler product over rational primes.
inline arith::EulerProduct dedekind_zeta(double s, double rel_err = 1e-8)
{
    if (s <= 1.0)
        throw domain_error("dedekind_zeta: need s > 1");
    using Key = std::pair<double, double>;
    static std::map<Key, arith::EulerProduct> memo;
    static std::mutex mu;
    {
        std::scoped_lock lock(mu);
        if (auto it = memo.find({s, rel_err}); it != memo.end())
            return it->second;
    }
    auto factor = [s](i64 p) {
        double ps = std::pow(static_cast<double>(p), -s);
        switch (classify_prime(p))
        {
        case IdealClass::Ramified:
            return 1.0 - ps;
        case IdealClass::Split:
            return (1.0 - ps) * (1.0 - ps);
        default:
            return 1.0 - ps * ps;
        }
    };
    // |1 - factor(p)| <= 2 p^-s in every class
    auto inv = arith::euler_product_over(factor, 2.0, s, 1, rel_err);
    arith::EulerProduct res{1.0 / inv.value, inv.certified_bound, inv.prime_cutoff};
    std::scoped_lock lock(mu);
    memo[{s, rel_err}] = res;
    return res;
}

// Exact element of K = Q(sqrt2) in common-denominator form (a + b sqrt2)/den.
struct QuadRational
{
    i64 a = 0, b = 0;
    i64 den = 1;

    static QuadRational make(i64 a, i64 b, i64 den)
    {
        if (den == 0)
            throw domain_error("QuadRational: zero denominator");
        if (den < 0)
        {
            a = -a;
            b = -b;
            den = -den;
        }
        i64 g = std::gcd(std::gcd(std::abs(a), std::abs(b)), den);
        return {a / g, b / g, den / g};
    }

    bool is_zero() const { return a == 0 && b == 0; }

    EmbeddedPoint embed() const
    {
        double d = static_cast<double>(den);
        return {(static_cast<double>(a) + std::numbers::sqrt2 * b) / d,
                (static_cast<double>(a) - std::numbers::sqrt2 * b) / d};
    }
};

struct IdealPower
{
    PrimeIdealZr2 ideal;
    int exponent = 0;
};

struct DenominatorIdeal
{
    QuadInt generator{1, 0};       // unit-normalized
    std::vector<IdealPower> factors; // classified, ascending ideal norm

    bool is_trivial() const { return generator == QuadInt{1, 0}; }
};

namespace detail
{

// Prime ideal factorization of a nonzero quadratic integer, via |N|.
inline std::vector<IdealPower> factor_ideal(const QuadInt& gamma)
{
    std::vector<IdealPower> out;
    i64 n = std::abs(gamma.norm());
    for (auto [p, e] : arith::factorize(n))
    {
        (void)e;
        for (const auto& ideal : ideals_above(p))
        {
            int v = ideal_valuation(gamma, ideal);
            if (v > 0)
                out.push_back({ideal, v});
            if (ideal.cls != IdealClass::Split)
                break; // one ideal above p
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.ideal.norm != y.ideal.norm)
            return x.ideal.norm < y.ideal.norm;
        return x.ideal.generator.b > y.ideal.generator.b;
    });
    return out;
}

} // namespace detail

// den(lambda) = {x in O_K : x * lambda in O_K*}. With O_K* = (sqrt2/4) O_K
// this is the denominator ideal of mu = 2 sqrt2 lambda, computed by clearing
// mu = alpha/m to lowest terms in the PID.
inline DenominatorIdeal denominator_ideal(const QuadRational& lambda)
{
    if (lambda.is_zero())
        return {};
    // mu = 2 sqrt2 * (a + b sqrt2)/den = (4b + 2a sqrt2)/den
    QuadInt alpha{4 * lambda.b, 2 * lambda.a};
    QuadInt m{lambda.den, 0};
    QuadInt g = gcd(alpha, m);
    auto q = divide_exact(m, g);
    if (!q)
        throw domain_error("denominator_ideal: internal gcd failure");
    DenominatorIdeal out;
    out.generator = unit_normalize(*q);
    out.factors = detail::factor_ideal(out.generator);
    return out;
}

// I(l) = ( (1/(2 sqrt2)) (1/zeta_K(k)) prod_{p >= den(l)} 1/(N(p)^k - 1) )^2,
// zero unless den(l) is (k+1)-free.
inline double intensity(const QuadRational& lambda, int k, double rel_err = 1e-8)
{
    if (k < 2)
        throw domain_error("intensity: need k >= 2");
    auto den = denominator_ideal(lambda);
    double amp = 1.0 / (2.0 * std::numbers::sqrt2) / dedekind_zeta(k, rel_err).value;
    for (const auto& f : den.factors)
    {
        if (f.exponent >= k + 1)
            return 0.0;
        amp /= std::pow(static_cast<double>(f.ideal.norm), k) - 1.0;
    }
    return amp * amp;
}

struct NfAtom
{
    QuadRational position; // exact preimage in K
    EmbeddedPoint point;
    double intensity = 0.0;
};

// Diffraction support of the embedded k-free integers inside a planar box:
// denominator ideals are enumerated by the monotone weight bound
// prod (N(p)^k - 1)^2 <= 1/rel_threshold, numerators by a lattice box scan
// with a coprimality test. Ordered by (norm of den, position).
inline std::vector<NfAtom> enumerate_atoms(int k, const diffraction::FrequencyBox& box,
                                           double rel_threshold, double rel_err = 1e-8)
{
    if (!(rel_threshold > 0.0) || rel_threshold > 1.0)
        throw domain_error("enumerate_atoms: rel_threshold must lie in (0,1]");
    if (box.dimension() != 2)
        throw domain_error("enumerate_atoms: planar windows only");
    if (k < 2)
        throw domain_error("enumerate_atoms: need k >= 2");
    const double wmax = 1.0 / rel_threshold;

    // prime ideals usable under the weight bound
    i64 max_norm = static_cast<i64>(std::pow(std::sqrt(wmax) + 1.0, 1.0 / k)) + 1;
    auto ideals = prime_ideals_up_to(std::max<i64>(2, max_norm));

    std::vector<NfAtom> atoms;
    auto scan_numerators = [&](const QuadInt& delta) {
        // lambda = sqrt2 * beta / (4 delta) with gcd(beta, delta) a unit;
        // beta = 2 sqrt2 lambda delta has embedding coordinates
        //   y = 2 sqrt2 * dx * lx,   y' = -2 sqrt2 * dx' * lx'
        auto demb = minkowski_embed(delta);
        double c = 2.0 * std::numbers::sqrt2;
        double y_lo = c * demb.x * box.lo[0], y_hi = c * demb.x * box.hi[0];
        if (y_lo > y_hi)
            std::swap(y_lo, y_hi);
        double yp_lo = -c * demb.x_conj * box.lo[1],
               yp_hi = -c * demb.x_conj * box.hi[1];
        if (yp_lo > yp_hi)
            std::swap(yp_lo, yp_hi);
        // beta = (u + v sqrt2): u = (y+y')/2, v = (y-y')/(2 sqrt2)
        const double eps = 1e-9;
        i64 u_lo = static_cast<i64>(std::floor((y_lo + yp_lo) / 2.0 - eps));
        i64 u_hi = static_cast<i64>(std::ceil((y_hi + yp_hi) / 2.0 + eps));
        i64 v_lo = static_cast<i64>(
            std::floor((y_lo - yp_hi) / (2.0 * std::numbers::sqrt2) - eps));
        i64 v_hi = static_cast<i64>(
            std::ceil((y_hi - yp_lo) / (2.0 * std::numbers::sqrt2) + eps));
        i64 ndelta = std::abs(delta.norm());
        for (i64 u = u_lo; u <= u_hi; ++u)
            for (i64 v = v_lo; v <= v_hi; ++v)
            {
                QuadInt beta{u, v};
                // lambda = sqrt2 beta conj(delta) / (4 N(delta)), exact
                QuadInt num = QuadInt{0, 1} * beta * delta.conj();
                auto lambda = QuadRational::make(
                    num.a, num.b, 4 * (delta.norm() < 0 ? -ndelta : ndelta));
                auto p = lambda.embed();
                bool inside =
                    p.x > box.lo[0] - eps && p.x_conj > box.lo[1] - eps &&
                    (box.half_open ? (p.x < box.hi[0] - eps && p.x_conj < box.hi[1] - eps)
                                   : (p.x < box.hi[0] + eps && p.x_conj < box.hi[1] + eps));
                if (!inside)
                    continue;
                if (!gcd(beta, delta).is_unit())
                    continue; // den(lambda) is a proper divisor of (delta)
                atoms.push_back({lambda, p, intensity(lambda, k, rel_err)});
            }
    };

    // depth-first over ideals ascending by norm, exponents 1..k
    auto rec = [&](auto&& self, std::size_t i, QuadInt delta, double weight) -> void {
        scan_numerators(delta);
        for (std::size_t j = i; j < ideals.size(); ++j)
        {
            double f = std::pow(static_cast<double>(ideals[j].norm), k) - 1.0;
            double w = weight * f * f;
            if (w > wmax * (1.0 + 1e-12))
                break; // norms ascend
            QuadInt d = delta;
            for (int e = 1; e <= k; ++e)
            {
                d = d * ideals[j].generator;
                self(self, j + 1, d, w);
            }
        }
    };
    rec(rec, 0, QuadInt{1, 0}, 1.0);

    std::sort(atoms.begin(), atoms.end(), [](const NfAtom& x, const NfAtom& y) {
        if (x.point.x != y.point.x)
            return x.point.x < y.point.x;
        return x.point.x_conj < y.point.x_conj;
    });
    return atoms;
}

} // namespace kfree::numfield
