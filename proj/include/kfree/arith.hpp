#pragma once

// Exact integer / rational number theory shared by every other module:
// prime generation, Moebius function, componentwise vector CRT, and
// certified truncated Euler products.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>
#include <tuple>
#include <utility>

#include "types.hpp"

namespace kfree::arith
{

namespace detail
{

// Flags for odd numbers in [0, limit]; flags[i] refers to 2i+1, bit set = composite.
// Plain sieve used for base primes (limit ~ sqrt of the segmented range).
inline std::vector<std::uint64_t> odd_sieve_flags(i64 limit)
{
    i64 nbits = limit >= 1 ? (limit + 1) / 2 : 0;
    std::vector<std::uint64_t> flags((nbits + 63) / 64, 0);
    for (i64 p = 3; p * p <= limit; p += 2)
    {
        if (flags[(p >> 1) >> 6] & (1ull << ((p >> 1) & 63)))
            continue;
        for (i64 m = p * p; m <= limit; m += 2 * p)
        {
            i64 idx = m >> 1;
            flags[idx >> 6] |= 1ull << (idx & 63);
        }
    }
    return flags;
}

inline std::vector<i64> base_primes(i64 limit)
{
    std::vector<i64> ps;
    if (limit >= 2)
        ps.push_back(2);
    auto flags = odd_sieve_flags(limit);
    for (i64 p = 3; p <= limit; p += 2)
    {
        i64 idx = p >> 1;
        if (!(flags[idx >> 6] & (1ull << (idx & 63))))
            ps.push_back(p);
    }
    return ps;
}

// Presieve pattern for the odd primes {3,5,7,11,13} in odd-index space.
// The composite mask is periodic with period 15015 bits; since gcd(64,15015)=1
// the 64-bit words of the mask cycle with period 15015 words, so a segment can
// be seeded with two memcpy-style runs instead of five marking loops.
constexpr i64 kPresievePeriod = 3ll * 5 * 7 * 11 * 13; // 15015
constexpr int kPresievePrimes[] = {3, 5, 7, 11, 13};

inline const std::vector<std::uint64_t>& presieve_words()
{
    static const std::vector<std::uint64_t> table = [] {
        std::vector<std::uint64_t> w(kPresievePeriod, 0);
        for (i64 t = 0; t < kPresievePeriod; ++t)
        {
            for (int b = 0; b < 64; ++b)
            {
                i64 index = t * 64 + b; // odd number 2*index+1
                for (int p : kPresievePrimes)
                    if ((2 * index + 1) % p == 0)
                    {
                        w[t] |= 1ull << b;
                        break;
                    }
            }
        }
        return w;
    }();
    return table;
}

// Rolling sieve state over a contiguous range of segments.
struct SegmentSieve
{
    static constexpr i64 kSegmentBits = 1 << 20; // odds per segment (128 KiB bitmap)

    std::vector<i64> primes;      // odd base primes only
    std::vector<i64> next_index;  // absolute odd-index of next multiple to mark
    std::vector<std::uint64_t> bits;

    SegmentSieve(const std::vector<i64>& base, i64 first_index)
        : bits(kSegmentBits / 64)
    {
        for (i64 p : base)
        {
            if (p == 2)
                continue;
            primes.push_back(p);
            i64 start = p * p; // odd
            i64 idx = start >> 1;
            if (idx < first_index)
            {
                // first odd multiple of p with index >= first_index
                i64 k = (first_index - idx + p - 1) / p;
                idx += k * p;
            }
            next_index.push_back(idx);
        }
    }

    // Sieve odd indices [seg_begin, seg_begin + kSegmentBits); seg_begin is a
    // multiple of 64.
    void run(i64 seg_begin)
    {
        i64 seg_end = seg_begin + kSegmentBits;
        if (seg_begin >= kSegmentBits)
        {
            // seed from the periodic presieve pattern (valid once all numbers
            // in the segment exceed 13)
            const auto& pat = presieve_words();
            i64 t = (seg_begin / 64) % kPresievePeriod;
            std::size_t filled = 0;
            while (filled < bits.size())
            {
                std::size_t run = std::min<std::size_t>(bits.size() - filled,
                                                        kPresievePeriod - t);
                std::copy_n(pat.begin() + t, run, bits.begin() + filled);
                filled += run;
                t = 0;
            }
        }
        else
        {
            std::fill(bits.begin(), bits.end(), 0);
            if (seg_begin == 0)
                bits[0] |= 1; // index 0 is the unit 1
        }
        for (std::size_t i = 0; i < primes.size(); ++i)
        {
            i64 p = primes[i];
            bool presieved = seg_begin >= kSegmentBits && p <= 13;
            i64 idx = next_index[i];
            if (!presieved)
            {
                for (; idx < seg_end; idx += p)
                    bits[(idx - seg_begin) >> 6] |= 1ull << ((idx - seg_begin) & 63);
            }
            else if (idx < seg_end)
            {
                idx += (seg_end - idx + p - 1) / p * p;
            }
            next_index[i] = idx;
        }
    }
};

} // namespace detail

// Calls fn(p) for every prime p <= limit in increasing order.
template <class Fn>
void for_each_prime(i64 limit, Fn&& fn)
{
    if (limit < 2)
        return;
    fn(static_cast<i64>(2));
    i64 root = static_cast<i64>(std::sqrt(static_cast<double>(limit))) + 2;
    auto base = detail::base_primes(root);
    detail::SegmentSieve sieve(base, 0);
    i64 total_bits = (limit + 1) / 2; // odd indices 0 .. total_bits-1, number 2i+1
    for (i64 seg = 0; seg * detail::SegmentSieve::kSegmentBits < total_bits; ++seg)
    {
        i64 begin = seg * detail::SegmentSieve::kSegmentBits;
        sieve.run(begin);
        i64 end = std::min(begin + detail::SegmentSieve::kSegmentBits, total_bits);
        for (i64 w = 0; w * 64 + begin < end; ++w)
        {
            std::uint64_t word = ~sieve.bits[w];
            while (word)
            {
                int b = std::countr_zero(word);
                word &= word - 1;
                i64 idx = begin + w * 64 + b;
                if (idx >= end)
                    break;
                fn(2 * idx + 1);
            }
        }
    }
}

// Exactly the primes <= limit, ascending. limit 0/1 yields an empty list.
inline std::vector<i64> primes_up_to(i64 limit)
{
    std::vector<i64> out;
    if (limit >= 2)
        out.reserve(static_cast<std::size_t>(
            limit / std::max(1.0, std::log(static_cast<double>(limit)) - 1.2) + 16));
    for_each_prime(limit, [&](i64 p) { out.push_back(p); });
    return out;
}

inline bool is_prime(i64 n)
{
    if (n < 2)
        return false;
    if (n % 2 == 0)
        return n == 2;
    for (i64 d = 3; d * d <= n; d += 2)
        if (n % d == 0)
            return false;
    return true;
}

inline i64 next_prime(i64 n)
{
    if (n <= 2)
        return 2;
    if (n % 2 == 0)
        ++n;
    while (!is_prime(n))
        n += 2;
    return n;
}

// Prime factorization by trial division (desk-scale inputs only).
inline std::vector<std::pair<i64, int>> factorize(i64 n)
{
    if (n < 1)
        throw domain_error("factorize: argument must be positive");
    std::vector<std::pair<i64, int>> fs;
    for (i64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2))
    {
        if (n % p)
            continue;
        int e = 0;
        while (n % p == 0)
        {
            n /= p;
            ++e;
        }
        fs.emplace_back(p, e);
    }
    if (n > 1)
        fs.emplace_back(n, 1);
    return fs;
}

// Standard Moebius function; mu(1) = 1, zero on non-square-free arguments.
inline int moebius(i64 n)
{
    if (n < 1)
        throw domain_error("moebius: argument must be positive");
    int sign = 1;
    for (auto [p, e] : factorize(n))
    {
        if (e > 1)
            return 0;
        sign = -sign;
        (void)p;
    }
    return sign;
}

inline bool is_squarefree(i64 n)
{
    return moebius(n) != 0;
}

// True when no prime power p^k divides n (k-free integer).
inline bool is_power_free(i64 n, int k)
{
    if (n < 1)
        throw domain_error("is_power_free: argument must be positive");
    for (auto [p, e] : factorize(n))
    {
        (void)p;
        if (e >= k)
            return false;
    }
    return true;
}

inline i64 mul_mod(i64 a, i64 b, i64 m)
{
    return static_cast<i64>(static_cast<i128>(a) * b % m);
}

// One congruence t = coordinates (mod modulus * Z^n).
struct ResidueVector
{
    Vec coordinates; // each reduced into [0, modulus)
    i64 modulus = 1;

    int dimension() const { return static_cast<int>(coordinates.size()); }
};

struct CrtSolution
{
    Vec solution; // canonical representative, coordinates in [0, modulus)
    i64 modulus = 1;
};

namespace detail
{
inline i64 inverse_mod(i64 a, i64 m)
{
    i64 t = 0, new_t = 1, r = m, new_r = pos_mod(a, m);
    while (new_r != 0)
    {
        i64 q = r / new_r;
        std::tie(t, new_t) = std::make_pair(new_t, t - q * new_t);
        std::tie(r, new_r) = std::make_pair(new_r, r - q * new_r);
    }
    return pos_mod(t, m);
}
} // namespace detail

// Simultaneous solution of t = x_i (mod m_i * Z^n) for pairwise coprime m_i.
// The solutions form exactly one coset of (prod m_i) Z^n; the canonical
// representative is returned together with the combined modulus.
inline CrtSolution crt_solve(const std::vector<ResidueVector>& congruences)
{
    if (congruences.empty())
        throw domain_error("crt_solve: need at least one congruence");
    int n = congruences.front().dimension();
    for (const auto& c : congruences)
    {
        if (c.dimension() != n)
            throw domain_error("crt_solve: congruence dimensions differ");
        if (c.modulus < 1)
            throw domain_error("crt_solve: moduli must be positive");
    }
    for (std::size_t i = 0; i < congruences.size(); ++i)
        for (std::size_t j = i + 1; j < congruences.size(); ++j)
            if (std::gcd(congruences[i].modulus, congruences[j].modulus) != 1)
                throw domain_error("crt_solve: moduli " +
                                   std::to_string(congruences[i].modulus) + " and " +
                                   std::to_string(congruences[j].modulus) +
                                   " are not coprime");

    Vec t(n, 0);
    i64 modulus = 1;
    for (const auto& c : congruences)
    {
        i64 m = c.modulus;
        if (static_cast<i128>(modulus) * m > static_cast<i128>(INT64_MAX))
            throw resource_error("crt_solve: combined modulus overflows 64 bits");
        i64 inv = detail::inverse_mod(modulus % m, m);
        for (int d = 0; d < n; ++d)
        {
            i64 target = pos_mod(c.coordinates[d], m);
            i64 diff = pos_mod(target - t[d], m);
            t[d] += modulus * mul_mod(diff, inv, m);
        }
        modulus *= m;
    }
    for (auto& coord : t)
        coord = pos_mod(coord, modulus);
    return {std::move(t), modulus};
}

// ---------------------------------------------------------------------------
// Certified truncated Euler products.
//
// For a factor function f with f(p) in (0,1] and |1 - f(p)| <= C p^(-s) for
// all primes beyond decay_threshold, the tail past a cutoff P satisfies
//   |log prod_{p>P} f(p)| <= sum_{n>P} 2C n^(-s) <= 2C P^(1-s)/(s-1),
// using |log(1-x)| <= 2x for x <= 1/2. The cutoff is the smallest prime P
// whose tail bound certifies relative error <= rel_err. certified_bound is
// that analytic truncation bound (floating rounding is not modelled).
// ---------------------------------------------------------------------------

struct EulerFactorSpec
{
    std::function<double(i64)> factor; // prime -> factor in (0,1]
    double decay_c = 1.0;              // C
    double decay_s = 2.0;              // s > 1
    i64 decay_threshold = 1;           // decay bound holds for p > threshold
};

struct EulerProduct
{
    double value = 1.0;
    double certified_bound = 0.0; // bound on |log tail|
    i64 prime_cutoff = 0;         // last prime included
};

namespace detail
{

constexpr i64 kMaxCutoff = 1ll << 40;

inline i64 required_cutoff(double C, double s, i64 threshold, double rel_err)
{
    if (rel_err <= 0)
        throw domain_error("euler_product: rel_err must be positive");
    if (s <= 1.0)
        throw domain_error("euler_product: decay exponent must exceed 1");
    double target = std::log1p(rel_err);
    i64 cutoff = 2;
    if (C > 0)
    {
        double pr = std::pow(2.0 * C / ((s - 1.0) * target), 1.0 / (s - 1.0));
        if (pr > static_cast<double>(kMaxCutoff))
            throw resource_error("euler_product: requested rel_err needs prime cutoff " +
                                 std::to_string(pr) + ", beyond the supported range");
        cutoff = std::max<i64>(cutoff, static_cast<i64>(std::ceil(pr)));
    }
    cutoff = std::max(cutoff, threshold + 1);
    return next_prime(cutoff);
}

// Product of factor(p) over primes p <= cutoff. Parallel over contiguous
// segment ranges; per-segment partial products are combined in segment order,
// so the result is independent of the worker count.
template <class F>
double prime_product(i64 cutoff, F&& factor)
{
    constexpr i64 seg_bits = SegmentSieve::kSegmentBits;
    double value = factor(static_cast<i64>(2));
    if (value <= 0.0 || value > 1.0)
        throw domain_error("euler_product: factor out of (0,1] at p=2");
    if (cutoff < 3)
        return value;

    i64 root = static_cast<i64>(std::sqrt(static_cast<double>(cutoff))) + 2;
    auto base = base_primes(root);
    i64 total_bits = (cutoff + 1) / 2;
    i64 n_segments = (total_bits + seg_bits - 1) / seg_bits;

    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned n_threads = static_cast<unsigned>(
        std::min<i64>(hw, std::max<i64>(1, n_segments / 4)));

    std::vector<double> seg_value(n_segments, 1.0);
    std::atomic<bool> failed{false};
    std::atomic<i64> bad_prime{0};

    auto work = [&](i64 seg_from, i64 seg_to) {
        SegmentSieve sieve(base, seg_from * seg_bits);
        for (i64 seg = seg_from; seg < seg_to && !failed.load(std::memory_order_relaxed);
             ++seg)
        {
            i64 begin = seg * seg_bits;
            sieve.run(begin);
            i64 end = std::min(begin + seg_bits, total_bits);
            double partial = 1.0;
            for (i64 w = 0; w * 64 + begin < end; ++w)
            {
                std::uint64_t word = ~sieve.bits[w];
                while (word)
                {
                    int b = std::countr_zero(word);
                    word &= word - 1;
                    i64 idx = begin + w * 64 + b;
                    if (idx >= end)
                        break;
                    double f = factor(2 * idx + 1);
                    if (f <= 0.0 || f > 1.0)
                    {
                        bad_prime.store(2 * idx + 1);
                        failed.store(true);
                        return;
                    }
                    partial *= f;
                }
            }
            seg_value[seg] = partial;
        }
    };

    if (n_threads <= 1)
    {
        work(0, n_segments);
    }
    else
    {
        std::vector<std::thread> pool;
        i64 chunk = (n_segments + n_threads - 1) / n_threads;
        for (unsigned t = 0; t < n_threads; ++t)
        {
            i64 from = t * chunk;
            i64 to = std::min<i64>(from + chunk, n_segments);
            if (from < to)
                pool.emplace_back(work, from, to);
        }
        for (auto& th : pool)
            th.join();
    }
    if (failed.load())
        throw domain_error("euler_product: factor out of (0,1] at p=" +
                           std::to_string(bad_prime.load()));
    for (i64 seg = 0; seg < n_segments; ++seg)
        value *= seg_value[seg];
    return value;
}

} // namespace detail

template <class F>
EulerProduct euler_product_over(F&& factor, double decay_c, double decay_s,
                                i64 decay_threshold, double rel_err)
{
    i64 cutoff = detail::required_cutoff(decay_c, decay_s, decay_threshold, rel_err);
    double value = detail::prime_product(cutoff, factor);
    double bound = decay_c > 0
                       ? 2.0 * decay_c * std::pow(static_cast<double>(cutoff), 1.0 - decay_s) /
                             (decay_s - 1.0)
                       : 0.0;
    return {value, bound, cutoff};
}

inline EulerProduct euler_product(const EulerFactorSpec& spec, double rel_err)
{
    if (!spec.factor)
        throw domain_error("euler_product: no factor function supplied");
    return euler_product_over(spec.factor, spec.decay_c, spec.decay_s,
                              spec.decay_threshold, rel_err);
}

// ---------------------------------------------------------------------------
// Cached products prod_{p > threshold} (1 - c p^(-e)).
//
// Every closed-form constant in this project (densities 1/zeta(nk), the
// autocorrelation constant prod (1 - 2 p^(-2)), patch-frequency tails) is of
// this shape. Results are memoised in-process and, when KFREE_CACHE_DIR is
// set, persisted there as hex-float text so repeated runs skip the sieve.
// ---------------------------------------------------------------------------

namespace detail
{

struct RationalFactor
{
    double c;
    int e;
    i64 threshold;

    double operator()(i64 p) const
    {
        if (p <= threshold)
            return 1.0;
        double ip = 1.0 / static_cast<double>(p);
        double x = ip;
        for (int i = 1; i < e; ++i)
            x *= ip;
        return 1.0 - c * x;
    }
};

inline std::filesystem::path cache_file()
{
    const char* dir = std::getenv("KFREE_CACHE_DIR");
    if (!dir || !*dir)
        return {};
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    return std::filesystem::path(dir) / "euler_products.txt";
}

} // namespace detail

inline EulerProduct rational_prime_product(i64 c, int e, i64 threshold, double rel_err)
{
    if (e < 2)
        throw domain_error("rational_prime_product: exponent must be >= 2");
    // The tail bound |log(1-x)| <= 2x needs c p^(-e) <= 1/2 past the cutoff;
    // the caller must keep moduli with m^e <= 2c in its exact head.
    using Key = std::tuple<i64, int, i64, double>;
    static std::map<Key, EulerProduct> memo;
    static std::mutex mu;
    Key key{c, e, threshold, rel_err};
    {
        std::scoped_lock lock(mu);
        if (auto it = memo.find(key); it != memo.end())
            return it->second;
    }

    auto path = detail::cache_file();
    std::string tag = "ratprod c=" + std::to_string(c) + " e=" + std::to_string(e) +
                      " thr=" + std::to_string(threshold);
    {
        char buf[64];
        std::snprintf(buf, sizeof(buf), " eps=%a", rel_err);
        tag += buf;
    }
    if (!path.empty())
    {
        std::ifstream in(path);
        std::string line;
        while (std::getline(in, line))
        {
            if (line.rfind(tag + " -> ", 0) == 0)
            {
                double v, b;
                long long cut;
                if (std::sscanf(line.c_str() + tag.size() + 4, "%la %la %lld", &v, &b,
                                &cut) == 3)
                {
                    EulerProduct r{v, b, cut};
                    std::scoped_lock lock(mu);
                    memo[key] = r;
                    return r;
                }
            }
        }
    }

    EulerProduct r = euler_product_over(
        detail::RationalFactor{static_cast<double>(c), e, threshold},
        static_cast<double>(c), static_cast<double>(e), threshold, rel_err);
    {
        std::scoped_lock lock(mu);
        memo[key] = r;
    }
    if (!path.empty())
    {
        std::ofstream out(path, std::ios::app);
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%a %a %lld", r.value, r.certified_bound,
                      static_cast<long long>(r.prime_cutoff));
        out << tag << " -> " << buf << "\n";
    }
    return r;
}

} // namespace kfree::arith
