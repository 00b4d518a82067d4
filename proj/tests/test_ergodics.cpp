#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <kfree/ergodics.hpp>

using namespace kfree;
using namespace kfree::ergodics;

namespace
{

std::vector<Vec> random_points(std::mt19937& rng, i64 range, int count)
{
    std::vector<Vec> pts;
    for (int i = 0; i < count; ++i)
        pts.push_back({static_cast<i64>(rng() % range), static_cast<i64>(rng() % range)});
    return pts;
}

} // namespace

TEST_CASE("overlap_partition: empty P gives a single class of size m^2")
{
    auto part = overlap_partition({}, {{1, 1}, {0, 2}}, 3);
    REQUIRE(part.counts.size() == 1);
    CHECK(part.counts.at(0) == 9);
    CHECK(part.total() == 9);
}

TEST_CASE("overlap_partition: worked example at m=2")
{
    auto part = overlap_partition({{0, 0}}, {{0, 0}}, 2);
    // residue (0,0) lies in Q-0; the three others do not
    CHECK(part.counts.at(1) == 1);
    CHECK(part.counts.at(0) == 3);
    CHECK(part.total() == 4);
}

TEST_CASE("overlap_partition: class sizes always sum to m^n")
{
    std::mt19937 rng(2024);
    for (i64 m : {2, 3, 4, 5})
        for (int trial = 0; trial < 10; ++trial)
        {
            auto p = random_points(rng, 2 * m, static_cast<int>(rng() % 6));
            auto q = random_points(rng, 2 * m, static_cast<int>(rng() % 6));
            REQUIRE(overlap_partition(p, q, m).total() == m * m);
        }
}

TEST_CASE("weight identity: worked examples")
{
    // P = {(0,0)}, Q = {(0,0),(1,0)}, m = 2: sum |S| q_S = 1 * |Q_2| = 2
    CHECK(check_partition_weight_identity({{0, 0}}, {{0, 0}, {1, 0}}, 2));
    CHECK(check_partition_weight_identity({}, {{0, 0}, {5, 3}}, 4));
}

TEST_CASE("weight identity: randomized trials are exact")
{
    std::mt19937 rng(555);
    for (int trial = 0; trial < 100; ++trial)
    {
        i64 m = std::vector<i64>{2, 3, 5}[rng() % 3];
        auto p = random_points(rng, m, static_cast<int>(rng() % (m * m)));
        auto q = random_points(rng, m, static_cast<int>(rng() % (m * m)));
        REQUIRE(check_partition_weight_identity(p, q, m));
    }
}

TEST_CASE("product identity: worked example at d=2")
{
    // both sides equal p^2|P_p| + p^2|Q_p| - |P_p||Q_p| = 4 + 4 - 1 = 7
    CHECK(check_partition_product_identity({{0, 0}}, {{1, 1}}, 2));
}

TEST_CASE("product identity: empty sets and composite square-free d")
{
    CHECK(check_partition_product_identity({}, {}, 6));
    std::mt19937 rng(77);
    for (int trial = 0; trial < 20; ++trial)
    {
        auto p = random_points(rng, 6, static_cast<int>(rng() % 5));
        auto q = random_points(rng, 6, static_cast<int>(rng() % 5));
        REQUIRE(check_partition_product_identity(p, q, 6));
        REQUIRE(check_partition_product_identity(p, q, 30));
    }
    CHECK_THROWS_AS(check_partition_product_identity({}, {}, 12), domain_error);
}

TEST_CASE("cesaro_residual: empty patches give zero exactly")
{
    auto p = patches::Patch::make(0.5, {});
    CHECK(cesaro_residual(p, p, 100) == 0.0);
}

TEST_CASE("cesaro_residual: origin pair decreases with the radius")
{
    auto p = patches::Patch::make(0.5, {{0, 0}});
    double r100 = cesaro_residual(p, p, 100);
    double r300 = cesaro_residual(p, p, 300);
    CHECK(r300 < r100);
    CHECK(r300 < 0.05);
}

TEST_CASE("cesaro_residual: mixed pair is small at moderate radius")
{
    auto p = patches::Patch::make(0.5, {{0, 0}});
    auto q = patches::Patch::make(1.0, {{1, 0}});
    CHECK(cesaro_residual(p, q, 300) < 0.03);
}

TEST_CASE("cesaro_residual: rejects non-admissible patches")
{
    auto bad = patches::Patch::make(1.5, {{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    auto ok = patches::Patch::make(0.5, {{0, 0}});
    CHECK_THROWS_AS(cesaro_residual(bad, ok, 50), domain_error);
}

TEST_CASE("configuration_from_cosets: zero cosets modulo 2 and 3")
{
    auto cfg = ResidueConfiguration::zero({2, 3}, 2);
    auto window = pointsets::LatticeWindow::box({0, 0}, {5, 5});
    auto x = configuration_from_cosets(cfg, window);
    // oracle: direct divisibility check
    for (i64 a = 0; a <= 5; ++a)
        for (i64 b = 0; b <= 5; ++b)
        {
            bool excluded = (a % 2 == 0 && b % 2 == 0) || (a % 3 == 0 && b % 3 == 0);
            bool present = std::binary_search(x.begin(), x.end(), Vec{a, b});
            REQUIRE(present == !excluded);
        }
}

TEST_CASE("configuration_from_cosets: empty truncation keeps the whole window")
{
    ResidueConfiguration cfg;
    auto window = pointsets::LatticeWindow::box({-2, -2}, {2, 2});
    CHECK(configuration_from_cosets(cfg, window).size() == 25);
}

TEST_CASE("round trip: cosets -> configuration -> cosets")
{
    std::vector<i64> moduli{2, 3, 5};
    auto window = pointsets::LatticeWindow::box({0, 0}, {29, 29});
    std::mt19937 rng(31337);
    for (int trial = 0; trial < 50; ++trial)
    {
        ResidueConfiguration y;
        for (i64 m : moduli)
            y.cosets.push_back(
                {{static_cast<i64>(rng() % m), static_cast<i64>(rng() % m)}, m});
        auto x = configuration_from_cosets(y, window);
        auto back = cosets_from_configuration(x, window, moduli);
        REQUIRE(back == y);
        // the configuration always contains anything that maps to y
        REQUIRE(std::includes(x.begin(), x.end(), x.begin(), x.end()));
    }
}

TEST_CASE("cosets_from_configuration: visible points miss exactly the zero coset")
{
    auto vis = pointsets::FreenessSpec::visible();
    auto window = pointsets::LatticeWindow::box({0, 0}, {29, 29});
    auto ps = pointsets::generate(vis, window);
    auto cfg = cosets_from_configuration(ps.points, window, {2, 3, 5});
    for (const auto& c : cfg.cosets)
        REQUIRE(c.coordinates == Vec{0, 0});
}

TEST_CASE("cosets_from_configuration: several missing cosets is an error")
{
    auto window = pointsets::LatticeWindow::box({0, 0}, {3, 3});
    std::vector<Vec> x{{1, 1}};
    try
    {
        cosets_from_configuration(x, window, {2});
        FAIL("expected domain_error");
    }
    catch (const domain_error& e)
    {
        std::string msg = e.what();
        CHECK(msg.find("modulus 2") != std::string::npos);
        CHECK(msg.find("3 cosets") != std::string::npos);
    }
}

TEST_CASE("equivariance: translating the configuration shifts the cosets")
{
    std::vector<i64> moduli{2, 3, 5};
    auto window = pointsets::LatticeWindow::box({0, 0}, {29, 29});
    std::mt19937 rng(909);
    for (int trial = 0; trial < 20; ++trial)
    {
        ResidueConfiguration y;
        for (i64 m : moduli)
            y.cosets.push_back(
                {{static_cast<i64>(rng() % m), static_cast<i64>(rng() % m)}, m});
        auto x = configuration_from_cosets(y, window);
        Vec t{static_cast<i64>(rng() % 20) - 10, static_cast<i64>(rng() % 20) - 10};
        std::vector<Vec> xt;
        for (const Vec& v : x)
            xt.push_back({v[0] + t[0], v[1] + t[1]});
        auto shifted_window =
            pointsets::LatticeWindow::box({t[0], t[1]}, {29 + t[0], 29 + t[1]});
        auto cfg = cosets_from_configuration(xt, shifted_window, moduli);
        REQUIRE(cfg == y.translated(t));
    }
}

TEST_CASE("configuration contains every set that maps onto its cosets")
{
    // X subset of phi(theta(X)) at finite truncation
    auto vis = pointsets::FreenessSpec::visible();
    auto window = pointsets::LatticeWindow::box({0, 0}, {29, 29});
    auto ps = pointsets::generate(vis, window);
    auto y = cosets_from_configuration(ps.points, window, {2, 3, 5});
    auto phi = configuration_from_cosets(y, window);
    CHECK(std::includes(phi.begin(), phi.end(), ps.points.begin(), ps.points.end()));
}
