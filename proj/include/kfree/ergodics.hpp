#pragma once

// Exact combinatorics on the finite residue groups (Z^n)_m underpinning the
// ergodicity of the patch frequency measure, Cesaro averages of containment
// measures, and the finite-truncation torus parametrization (configurations
// from coset data and back).

#include "patches.hpp"

namespace kfree::ergodics
{

using patches::Patch;
using pointsets::FreenessSpec;
using pointsets::LatticeWindow;

// Classification of the m^n residues r by the exact subset S of the reduced
// set P_m for which r lies in Q_m - s. Counts q_S partition the group, so
// sum_S q_S = m^n.
struct OverlapPartition
{
    i64 modulus = 1;
    int dimension = 2;
    std::vector<Vec> p_residues;          // canonical order of P_m
    std::map<std::uint64_t, i64> counts;  // subset mask over p_residues -> size

    i64 total() const
    {
        i64 t = 0;
        for (const auto& [mask, c] : counts)
            t += c;
        return t;
    }

    i64 p_size() const { return static_cast<i64>(p_residues.size()); }
};

namespace detail
{

inline std::vector<Vec> reduce_mod(const std::vector<Vec>& pts, i64 m)
{
    std::vector<Vec> out;
    out.reserve(pts.size());
    for (const Vec& x : pts)
    {
        Vec r(x.size());
        for (std::size_t d = 0; d < x.size(); ++d)
            r[d] = pos_mod(x[d], m);
        out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline i64 residue_index(const Vec& r, i64 m)
{
    i64 idx = 0;
    for (i64 c : r)
        idx = idx * m + c;
    return idx;
}

} // namespace detail

inline OverlapPartition overlap_partition(const std::vector<Vec>& p,
                                          const std::vector<Vec>& q, i64 m,
                                          int dimension = 2)
{
    if (m < 2)
        throw domain_error("overlap_partition: modulus must be >= 2");
    i64 cells = 1;
    for (int d = 0; d < dimension; ++d)
    {
        if (cells > 1000000 / m)
            throw resource_error("overlap_partition: m^n exceeds the enumeration cap");
        cells *= m;
    }
    OverlapPartition part;
    part.modulus = m;
    part.dimension = dimension;
    part.p_residues = detail::reduce_mod(p, m);
    if (part.p_residues.size() > 63)
        throw resource_error("overlap_partition: more than 63 reduced points");

    std::vector<char> in_q(cells, 0);
    for (const Vec& r : detail::reduce_mod(q, m))
        in_q[detail::residue_index(r, m)] = 1;

    Vec r(dimension, 0);
    Vec sum(dimension);
    while (true)
    {
        std::uint64_t mask = 0;
        for (std::size_t i = 0; i < part.p_residues.size(); ++i)
        {
            for (int d = 0; d < dimension; ++d)
            {
                sum[d] = r[d] + part.p_residues[i][d];
                if (sum[d] >= m)
                    sum[d] -= m;
            }
            if (in_q[detail::residue_index(sum, m)])
                mask |= 1ull << i;
        }
        ++part.counts[mask];
        int d = dimension - 1;
        for (; d >= 0; --d)
        {
            if (++r[d] < m)
                break;
            r[d] = 0;
        }
        if (d < 0)
            break;
    }
    return part;
}

// sum_S |S| q_S = |P_m| |Q_m|, exactly in integers.
inline bool check_partition_weight_identity(const std::vector<Vec>& p,
                                            const std::vector<Vec>& q, i64 m,
                                            int dimension = 2)
{
    auto part = overlap_partition(p, q, m, dimension);
    i64 lhs = 0;
    for (const auto& [mask, c] : part.counts)
        lhs += static_cast<i64>(std::popcount(mask)) * c;
    i64 qm = static_cast<i64>(detail::reduce_mod(q, m).size());
    return lhs == part.p_size() * qm;
}

// For square-free d, the multi-sum over exponent tuples (nu_p) of
//   prod_{p|d} (nu_p + |Q_p|) * (number of residues covered exactly
//   |P_p| - nu_p times) equals prod_{p|d} (p^n |P_p| + p^n |Q_p| - |P_p||Q_p|).
inline bool check_partition_product_identity(const std::vector<Vec>& p,
                                             const std::vector<Vec>& q, i64 d,
                                             int dimension = 2)
{
    if (d < 2 || !arith::is_squarefree(d))
        throw domain_error("check_partition_product_identity: d must be square-free and >= 2");
    std::vector<i64> primes;
    for (auto [pr, e] : arith::factorize(d))
    {
        (void)e;
        primes.push_back(pr);
    }

    struct PerPrime
    {
        i64 p_size, q_size, cells;
        std::vector<i64> count_by_overlap; // index nu -> sum of q_S with |S| = |P_p|-nu
    };
    std::vector<PerPrime> data;
    for (i64 pr : primes)
    {
        auto part = overlap_partition(p, q, pr, dimension);
        PerPrime pp;
        pp.p_size = part.p_size();
        pp.q_size = static_cast<i64>(detail::reduce_mod(q, pr).size());
        pp.cells = 1;
        for (int i = 0; i < dimension; ++i)
            pp.cells *= pr;
        pp.count_by_overlap.assign(pp.p_size + 1, 0);
        for (const auto& [mask, c] : part.counts)
            pp.count_by_overlap[pp.p_size - std::popcount(mask)] += c;
        data.push_back(std::move(pp));
    }

    // left side: multi-sum over tuples (nu_p), exact integers
    i64 lhs = 0;
    std::vector<i64> nu(primes.size(), 0);
    while (true)
    {
        i64 term = 1;
        for (std::size_t i = 0; i < primes.size(); ++i)
            term *= (nu[i] + data[i].q_size) * data[i].count_by_overlap[nu[i]];
        lhs += term;
        int i = static_cast<int>(primes.size()) - 1;
        for (; i >= 0; --i)
        {
            if (++nu[i] <= data[i].p_size)
                break;
            nu[i] = 0;
        }
        if (i < 0)
            break;
    }

    i64 rhs = 1;
    for (const auto& pp : data)
        rhs *= pp.cells * pp.p_size + pp.cells * pp.q_size - pp.p_size * pp.q_size;
    return lhs == rhs;
}

// Cesaro residual of the ergodic identity for the visible points of Z^2:
//   | avg_{x in B_R n Z^2} nu(B_{(x+P) u Q})  -  nu(B_P) nu(B_Q) |.
// The finite-R average runs over the lattice points of the ball (their count
// replaces vol B_R = pi R^2, which it approaches; this keeps the empty-patch
// identity exact at every R).
inline double cesaro_residual(const Patch& p, const Patch& q, double radius,
                              double rel_err = patches::kTailRelErr)
{
    auto vis = FreenessSpec::visible();
    if (!pointsets::is_admissible(vis, p.points).admissible ||
        !pointsets::is_admissible(vis, q.points).admissible)
        throw domain_error("cesaro_residual: patches must be admissible");

    const i64 b = pointsets::int_root(ball_sq_bound(radius), 2);
    const i64 sq = ball_sq_bound(radius);
    double sum = 0.0;
    i64 scanned = 0;
    std::vector<Vec> s;
    s.reserve(p.points.size() + q.points.size());
    Vec x{-b, -b};
    while (true)
    {
        if (x[0] * x[0] + x[1] * x[1] <= sq)
        {
            ++scanned;
            s = q.points;
            for (const Vec& pt : p.points)
                s.push_back({pt[0] + x[0], pt[1] + x[1]});
            sum += patches::containment_measure(vis, s, rel_err).value;
        }
        if (++x[1] > b)
        {
            x[1] = -b;
            if (++x[0] > b)
                break;
        }
    }
    double avg = sum / static_cast<double>(scanned);
    double target = patches::containment_measure(vis, p.points, rel_err).value *
                    patches::containment_measure(vis, q.points, rel_err).value;
    return std::abs(avg - target);
}

// One coset per truncation modulus (a point of the truncated internal group).
struct ResidueConfiguration
{
    std::vector<arith::ResidueVector> cosets; // ascending moduli

    static ResidueConfiguration zero(const std::vector<i64>& moduli, int dimension)
    {
        ResidueConfiguration cfg;
        for (i64 m : moduli)
            cfg.cosets.push_back({Vec(dimension, 0), m});
        return cfg;
    }

    // translate action: every coset shifts by t
    ResidueConfiguration translated(const Vec& t) const
    {
        ResidueConfiguration out = *this;
        for (auto& c : out.cosets)
            for (std::size_t d = 0; d < c.coordinates.size(); ++d)
                c.coordinates[d] = pos_mod(c.coordinates[d] + t[d], c.modulus);
        return out;
    }

    bool operator==(const ResidueConfiguration& o) const
    {
        if (cosets.size() != o.cosets.size())
            return false;
        for (std::size_t i = 0; i < cosets.size(); ++i)
            if (cosets[i].modulus != o.cosets[i].modulus ||
                cosets[i].coordinates != o.cosets[i].coordinates)
                return false;
        return true;
    }
};

// The configuration determined by coset data: window points not congruent to
// the chosen coset modulo any listed modulus. The result misses one full
// coset per modulus, so it is admissible with respect to the listed moduli.
inline std::vector<Vec> configuration_from_cosets(const ResidueConfiguration& cfg,
                                                  const LatticeWindow& window)
{
    Vec lo, hi;
    window.bounding_box(lo, hi);
    std::vector<Vec> out;
    if (lo.empty())
        return out;
    Vec x = lo;
    while (true)
    {
        if (window.contains(x))
        {
            bool excluded = false;
            for (const auto& c : cfg.cosets)
            {
                bool match = true;
                for (std::size_t d = 0; d < x.size(); ++d)
                    if (pos_mod(x[d], c.modulus) != c.coordinates[d])
                    {
                        match = false;
                        break;
                    }
                if (match)
                {
                    excluded = true;
                    break;
                }
            }
            if (!excluded)
                out.push_back(x);
        }
        int d = static_cast<int>(x.size()) - 1;
        for (; d >= 0; --d)
        {
            if (++x[d] <= hi[d])
                break;
            x[d] = lo[d];
        }
        if (d < 0)
            break;
    }
    return out;
}

// The inverse direction: for each listed modulus, the unique coset missed by
// the configuration. Errors when the window lacks a full residue system or
// when the number of missing cosets differs from one.
inline ResidueConfiguration cosets_from_configuration(const std::vector<Vec>& config,
                                                      const LatticeWindow& window,
                                                      const std::vector<i64>& moduli)
{
    Vec lo, hi;
    window.bounding_box(lo, hi);
    const int n = window.dimension;
    std::set<Vec> in_config(config.begin(), config.end());

    ResidueConfiguration out;
    for (i64 m : moduli)
    {
        i64 cells = 1;
        for (int d = 0; d < n; ++d)
        {
            if (cells > 1000000 / m)
                throw resource_error("cosets_from_configuration: m^n cap exceeded");
            cells *= m;
        }
        std::vector<char> window_hits(cells, 0), config_hits(cells, 0);
        Vec x = lo;
        while (true)
        {
            if (window.contains(x))
            {
                Vec r(n);
                for (int d = 0; d < n; ++d)
                    r[d] = pos_mod(x[d], m);
                i64 idx = detail::residue_index(r, m);
                window_hits[idx] = 1;
                if (in_config.count(x))
                    config_hits[idx] = 1;
            }
            int d = n - 1;
            for (; d >= 0; --d)
            {
                if (++x[d] <= hi[d])
                    break;
                x[d] = lo[d];
            }
            if (d < 0)
                break;
        }
        for (i64 i = 0; i < cells; ++i)
            if (!window_hits[i])
                throw domain_error("cosets_from_configuration: window lacks a full "
                                   "residue system modulo " +
                                   std::to_string(m));
        std::vector<i64> missing;
        for (i64 i = 0; i < cells; ++i)
            if (!config_hits[i])
                missing.push_back(i);
        if (missing.size() != 1)
            throw domain_error("cosets_from_configuration: not in A_1 at modulus " +
                               std::to_string(m) + " (" +
                               std::to_string(missing.size()) + " cosets missing)");
        Vec r(n);
        i64 idx = missing.front();
        for (int d = n - 1; d >= 0; --d)
        {
            r[d] = idx % m;
            idx /= m;
        }
        out.cosets.push_back({std::move(r), m});
    }
    return out;
}

} // namespace kfree::ergodics
