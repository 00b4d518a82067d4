#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include <kfree/correlation.hpp>

using namespace kfree;
using namespace kfree::correlation;

TEST_CASE("closed form: eta(0) is the density 1/zeta(2)")
{
    const double inv_z2 = 6.0 / (std::numbers::pi * std::numbers::pi);
    CHECK(std::abs(autocorr_closed_visible({0, 0}) - inv_z2) < 1e-9);
}

TEST_CASE("closed form: eta at coprime shift is the empty product xi")
{
    double v = autocorr_closed_visible({1, 0});
    CHECK(v == xi_constant());
    CHECK(std::abs(v - 0.3226) < 1e-4);
}

TEST_CASE("closed form: gcd 2 and gcd 3 shifts")
{
    CHECK(autocorr_closed_visible({2, 0}) == Catch::Approx(1.5 * xi_constant()));
    CHECK(std::abs(autocorr_closed_visible({2, 0}) - 0.4839) < 1e-4);
    // gcd 3: factor 1 + 1/(9-2) = 8/7
    CHECK(autocorr_closed_visible({3, 3}) == Catch::Approx(xi_constant() * 8.0 / 7.0));
}

TEST_CASE("closed form: depends only on gcd of the shift")
{
    for (i64 g = 1; g <= 6; ++g)
    {
        double ref = autocorr_closed_visible({g, 0});
        for (Vec x : {Vec{0, g}, Vec{g, g}, Vec{3 * g, 2 * g}, Vec{-g, 5 * g}})
        {
            REQUIRE(std::gcd(std::abs(x[0]), std::abs(x[1])) == g);
            REQUIRE(autocorr_closed_visible(x) == ref);
        }
    }
}

TEST_CASE("empirical: eta(0) approximates the density")
{
    auto s = autocorr_empirical(FreenessSpec::visible(), {0, 0}, 600);
    CHECK(s.radius_used == 600);
    CHECK(std::abs(s.value - 0.6079271) / 0.6079271 < 0.01);
}

TEST_CASE("empirical: matches the closed form at moderate radius")
{
    auto spec = FreenessSpec::visible();
    for (Vec x : {Vec{1, 0}, Vec{2, 0}, Vec{3, 3}})
    {
        double closed = autocorr_closed_visible(x);
        double emp = autocorr_empirical(spec, x, 1000).value;
        REQUIRE(std::abs(emp - closed) / closed < 0.03);
    }
}

TEST_CASE("empirical: tiny window containing only the origin gives zero")
{
    // 0 is never a member, so the pair count is empty.
    auto s = autocorr_empirical(FreenessSpec::visible(), {0, 0}, 0.5);
    CHECK(s.value == 0.0);
}

TEST_CASE("empirical: symmetric in the shift up to boundary terms")
{
    auto spec = FreenessSpec::visible();
    for (Vec x : {Vec{1, 0}, Vec{2, 1}})
    {
        double a = autocorr_empirical(spec, x, 300).value;
        Vec neg{-x[0], -x[1]};
        double b = autocorr_empirical(spec, neg, 300).value;
        REQUIRE(std::abs(a - b) < 0.01);
    }
}

TEST_CASE("empirical: positive definiteness witness")
{
    auto spec = FreenessSpec::visible();
    std::vector<Vec> s{{0, 0}, {1, 0}, {0, 1}, {2, 1}};
    // cache the needed samples once
    std::map<Vec, double> eta;
    for (const Vec& a : s)
        for (const Vec& b : s)
        {
            Vec d{a[0] - b[0], a[1] - b[1]};
            if (!eta.count(d))
                eta[d] = autocorr_empirical(spec, d, 1000).value;
        }
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial)
    {
        std::vector<double> c(s.size());
        for (auto& v : c)
            v = coef(rng);
        double q = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = 0; j < s.size(); ++j)
                q += c[i] * c[j] * eta[{s[i][0] - s[j][0], s[i][1] - s[j][1]}];
        REQUIRE(q >= -0.02);
    }
}

TEST_CASE("autocorr_table: batch over shifts, empty list")
{
    auto spec = FreenessSpec::visible();
    auto rows = autocorr_table(spec, {{0, 0}, {1, 0}, {2, 0}}, 500);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows)
    {
        double closed = autocorr_closed_visible(r.shift);
        REQUIRE(std::abs(r.value - closed) / closed < 0.05);
    }
    CHECK(autocorr_table(spec, {}, 500).empty());
}

TEST_CASE("empirical: squarefree integers, counting bound")
{
    auto sf = FreenessSpec::kfree(1, 2);
    auto s = autocorr_empirical(sf, {4}, 100000);
    CHECK(s.value >= 0.0);
    CHECK(s.value <= 0.62); // bounded by the density 1/zeta(2)
}
