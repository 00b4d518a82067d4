#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include <kfree/figure.hpp>

using namespace kfree;
using namespace kfree::diffraction;

namespace
{

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::uint64_t fnv1a64(const std::string& s)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<DiffractionAtom> window_atoms(double thresh)
{
    return enumerate_atoms(pointsets::FreenessSpec::visible(),
                           FrequencyBox{{0.0, 0.0}, {2.0, 2.0}, false}, thresh);
}

} // namespace

TEST_CASE("golden: rendered diffraction figure is byte-identical to the snapshot")
{
    auto atoms = window_atoms(1e-3);
    std::string provenance =
        "spec=visible window=0,0,2,2 threshold=0.001 rel_err=1e-08";
    auto svg = render_svg(atoms, FigureStyle::AreaProportional, provenance);
    auto golden =
        read_file(std::string(KFREE_TEST_DATA) + "/visible_diffraction_small.svg");
    REQUIRE(svg == golden);
}

TEST_CASE("golden: the full threshold-1e-6 figure keeps its frozen fingerprint")
{
    auto atoms = window_atoms(1e-6);
    REQUIRE(atoms.size() == 30705);
    std::string provenance =
        "spec=visible window=0,0,2,2 threshold=1e-06 rel_err=1e-08";
    auto svg = render_svg(atoms, FigureStyle::AreaProportional, provenance);
    CHECK(svg.size() == 1823327);
    CHECK(fnv1a64(svg) == 0x065adbe56fafaef1ull);
}

TEST_CASE("quartic rescale radii follow I^(1/4)/20 exactly")
{
    std::vector<DiffractionAtom> atoms{
        {RationalPoint::from({0, 0}, 1), 0.36957536},
        {RationalPoint::from({1, 0}, 2), 0.04106393}};
    auto svg = render_svg(atoms, FigureStyle::QuarticRescale);
    // radius in px = 240 * I^(1/4) / 20 = 12 * I^(1/4)
    char expect[40];
    std::snprintf(expect, sizeof(expect), "r=\"%.6g\"", 12.0 * std::pow(0.36957536, 0.25));
    CHECK(svg.find(expect) != std::string::npos);
}
