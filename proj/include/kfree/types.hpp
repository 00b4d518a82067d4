#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kfree
{

using i64 = std::int64_t;
using i128 = __int128;

// A lattice point of Z^n with exact integer coordinates.
using Vec = std::vector<i64>;

// Thrown when an argument is outside an operation's mathematical domain.
class domain_error : public std::invalid_argument
{
public:
    explicit domain_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Thrown when a request exceeds a configured desk-scale resource cap.
class resource_error : public std::runtime_error
{
public:
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline i64 norm_sq(const Vec& x)
{
    i64 s = 0;
    for (i64 c : x)
        s += c * c;
    return s;
}

// Squared-radius cutoff for ball membership: ||x||^2 <= floor(rho^2), with a
// snap to the nearest integer when rho^2 is integral up to floating noise.
// Makes window contents reproducible across platforms.
inline i64 ball_sq_bound(double radius)
{
    double r2 = radius * radius;
    double nearest = std::round(r2);
    if (std::abs(r2 - nearest) < 1e-9)
        return static_cast<i64>(nearest);
    return static_cast<i64>(std::floor(r2));
}

// Volume of the n-ball of radius R (pi R^2 in the plane).
inline double ball_volume(int dimension, double radius)
{
    double n = static_cast<double>(dimension);
    return std::pow(std::numbers::pi, n / 2.0) * std::pow(radius, n) /
           std::tgamma(n / 2.0 + 1.0);
}

inline std::string vec_to_string(const Vec& x, char sep = ',')
{
    std::ostringstream os;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        if (i)
            os << sep;
        os << x[i];
    }
    return os.str();
}

// Nonnegative remainder in [0, m).
inline i64 pos_mod(i64 a, i64 m)
{
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

} // namespace kfree
