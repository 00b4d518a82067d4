#pragma once

// Command-line surface. Every command is deterministic for a fixed config
// (including the seed of the randomized verification suites), echoes its
// full configuration into the output header, and reports certified error
// bounds next to the numbers that carry one.

#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "correlation.hpp"
#include "ergodics.hpp"
#include "figure.hpp"
#include "io.hpp"
#include "numfield.hpp"
#include "patches.hpp"

namespace kfree::cli
{

constexpr std::uint64_t kDefaultSeed = 271828;

struct RunConfig
{
    std::string spec = "visible";
    std::string window;
    std::string point;
    std::string points;
    std::string patch;
    std::string shifts;
    std::string input;
    std::string output;
    std::string format = "csv";
    std::string style = "area_proportional";
    std::string real_window; // "x0,y0,x1,y1"
    double rho = 1.0;
    double radius = 0.0;
    double threshold = 1e-6;
    double rel_err = 1e-8;
    double s_param = 2.0;
    int k_param = 2;
    i64 cap = pointsets::kDefaultWindowCap;
    std::uint64_t seed = kDefaultSeed;
    bool log2 = false;
    bool half_open = false;
};

namespace detail
{

inline std::string trim(const std::string& s)
{
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

// Config files start with the version line '# kfree-config v1'; the rest is
// key=value pairs using the long option names. Values given here act as
// defaults that explicit command-line flags override.
inline void apply_config_file(const std::string& path, RunConfig& cfg)
{
    std::ifstream in(path);
    if (!in)
        throw resource_error("cannot open config file '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || trim(line) != "# kfree-config v1")
        throw domain_error("config file must start with '# kfree-config v1'");
    int lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw domain_error("config line " + std::to_string(lineno) +
                               ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key == "spec")
            cfg.spec = value;
        else if (key == "window")
        {
            cfg.window = value;
            cfg.real_window = value;
        }
        else if (key == "point")
            cfg.point = value;
        else if (key == "points")
            cfg.points = value;
        else if (key == "patch")
            cfg.patch = value;
        else if (key == "shifts")
            cfg.shifts = value;
        else if (key == "in")
            cfg.input = value;
        else if (key == "out")
            cfg.output = value;
        else if (key == "format")
            cfg.format = value;
        else if (key == "style")
            cfg.style = value;
        else if (key == "rho")
            cfg.rho = std::stod(value);
        else if (key == "R")
            cfg.radius = std::stod(value);
        else if (key == "threshold")
            cfg.threshold = std::stod(value);
        else if (key == "rel-err")
            cfg.rel_err = std::stod(value);
        else if (key == "s")
            cfg.s_param = std::stod(value);
        else if (key == "k")
            cfg.k_param = static_cast<int>(io::parse_i64(value));
        else if (key == "cap")
            cfg.cap = io::parse_i64(value);
        else if (key == "seed")
            cfg.seed = static_cast<std::uint64_t>(io::parse_i64(value));
        else if (key == "log2")
            cfg.log2 = value == "true" || value == "1";
        else if (key == "half-open")
            cfg.half_open = value == "true" || value == "1";
        else
            throw domain_error("config line " + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
    }
}

struct OutputTarget
{
    std::ostream& stream;
    std::ofstream file;

    explicit OutputTarget(const std::string& path, std::ostream& fallback)
        : stream(path.empty() ? fallback : file)
    {
        if (!path.empty())
        {
            file.open(path, std::ios::binary);
            if (!file)
                throw resource_error("cannot open '" + path + "' for writing");
        }
    }
};

inline std::string fmt(double v, const char* spec = "%.6f")
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

inline diffraction::FigureStyle parse_style(const std::string& s)
{
    if (s == "area_proportional")
        return diffraction::FigureStyle::AreaProportional;
    if (s == "quartic_rescale")
        return diffraction::FigureStyle::QuarticRescale;
    throw domain_error("unknown style '" + s +
                       "' (area_proportional or quartic_rescale)");
}

inline diffraction::FrequencyBox parse_real_window(const std::string& s, bool half_open)
{
    auto parts = io::split(s, ',');
    if (parts.size() % 2 != 0 || parts.empty())
        throw domain_error("malformed window '" + s + "' (need lo...,hi...)");
    std::size_t n = parts.size() / 2;
    diffraction::FrequencyBox box;
    box.half_open = half_open;
    for (std::size_t i = 0; i < n; ++i)
        box.lo.push_back(std::stod(parts[i]));
    for (std::size_t i = 0; i < n; ++i)
        box.hi.push_back(std::stod(parts[n + i]));
    return box;
}

} // namespace detail

// ---------------------------------------------------------------------------
// command implementations
// ---------------------------------------------------------------------------

namespace detail
{

inline std::string echo(const std::string& command,
                        std::initializer_list<std::string> fields)
{
    std::ostringstream os;
    os << "# kfree " << command << " v1\n# ";
    bool first = true;
    for (const auto& f : fields)
    {
        if (!first)
            os << " ";
        first = false;
        os << f;
    }
    os << "\n";
    return os.str();
}

inline int cmd_gen(const RunConfig& cfg, std::ostream& out)
{
    if (cfg.window.empty())
        throw domain_error("gen: --window is required");
    auto spec = io::parse_spec(cfg.spec);
    auto window = io::parse_window(cfg.window, spec.dimension);
    auto ps = pointsets::generate(spec, window, cfg.cap);
    OutputTarget target(cfg.output, out);
    if (cfg.format == "bin")
        io::write_pointset_rle(target.stream, ps);
    else
        io::write_pointset_csv(target.stream, ps,
                               {"count=" + std::to_string(ps.points.size()),
                                "cap=" + std::to_string(cfg.cap)});
    return 0;
}

inline int cmd_member(const RunConfig& cfg, std::ostream& out)
{
    if (cfg.point.empty())
        throw domain_error("member: --point is required");
    auto spec = io::parse_spec(cfg.spec);
    bool m = pointsets::is_member(spec, io::parse_vec(cfg.point));
    out << (m ? "true" : "false") << "\n";
    return 0;
}

inline int cmd_admissible(const RunConfig& cfg, std::ostream& out)
{
    auto spec = io::parse_spec(cfg.spec);
    std::vector<Vec> pts;
    if (!cfg.input.empty())
    {
        std::ifstream in(cfg.input);
        if (!in)
            throw resource_error("cannot open '" + cfg.input + "'");
        pts = io::read_pointset_csv(in).points;
    }
    else
        pts = io::parse_points(cfg.points);
    auto res = pointsets::is_admissible(spec, pts);
    if (res.admissible)
        out << "true\n";
    else
        out << "false witness=" << *res.witness << "\n";
    return 0;
}

inline int cmd_hole(const RunConfig& cfg, std::ostream& out)
{
    auto spec = io::parse_spec(cfg.spec);
    auto hole = pointsets::find_hole(spec, cfg.rho);
    // sieve verification at the center and three period translates
    auto offsets = patches::ball_offsets(spec.dimension, cfg.rho);
    std::vector<Vec> translates{Vec(spec.dimension, 0)};
    for (int d = 0; d < std::min(spec.dimension, 2); ++d)
    {
        Vec t(spec.dimension, 0);
        t[d] = 1;
        translates.push_back(t);
    }
    translates.push_back(Vec(spec.dimension, 2));
    bool ok = true;
    for (const Vec& t : translates)
        for (const Vec& w : offsets)
        {
            Vec y(spec.dimension);
            for (int d = 0; d < spec.dimension; ++d)
                y[d] = hole.center[d] + t[d] * hole.period + w[d];
            if (pointsets::is_member(spec, y))
                ok = false;
        }
    out << "center=" << vec_to_string(hole.center) << " period=" << hole.period
        << " verified=" << (ok ? "true" : "false") << "\n";
    return ok ? 0 : 1;
}

inline int cmd_autocorr(const RunConfig& cfg, std::ostream& out)
{
    if (cfg.radius <= 0)
        throw domain_error("autocorr: --R must be positive");
    auto spec = io::parse_spec(cfg.spec);
    auto shifts = io::parse_points(cfg.shifts);
    auto rows = correlation::autocorr_table(spec, shifts, cfg.radius, cfg.cap);
    OutputTarget target(cfg.output, out);
    target.stream << echo("autocorr",
                          {"spec=" + cfg.spec, "R=" + fmt(cfg.radius, "%g"),
                           "cap=" + std::to_string(cfg.cap)});
    target.stream << "# shift..., eta, R\n";
    for (const auto& r : rows)
        target.stream << vec_to_string(r.shift) << "," << fmt(r.value, "%.9f") << ","
                      << fmt(r.radius_used, "%g") << "\n";
    return 0;
}

inline int cmd_diffract(const RunConfig& cfg, std::ostream& out)
{
    if (cfg.real_window.empty())
        throw domain_error("diffract: --window is required");
    auto spec = io::parse_spec(cfg.spec);
    auto box = parse_real_window(cfg.real_window, cfg.half_open);
    auto atoms = diffraction::enumerate_atoms(spec, box, cfg.threshold, cfg.rel_err);
    std::string provenance = "spec=" + cfg.spec + " window=" + cfg.real_window +
                             " threshold=" + fmt(cfg.threshold, "%g") +
                             " rel_err=" + fmt(cfg.rel_err, "%g");
    OutputTarget target(cfg.output, out);
    if (cfg.format == "svg")
        target.stream << diffraction::render_svg(atoms, parse_style(cfg.style),
                                                 provenance);
    else
        target.stream << diffraction::render_atoms_csv(atoms, provenance);
    return 0;
}

inline int cmd_figure(const RunConfig& cfg, std::ostream& out)
{
    if (cfg.input.empty())
        throw domain_error("figure: --in is required");
    std::ifstream in(cfg.input);
    if (!in)
        throw resource_error("cannot open '" + cfg.input + "'");
    auto atoms = io::read_atoms_csv(in);
    OutputTarget target(cfg.output, out);
    target.stream << diffraction::render_svg(atoms, parse_style(cfg.style),
                                             "source=" + cfg.input);
    return 0;
}

inline int cmd_freq(const RunConfig& cfg, std::ostream& out)
{
    auto spec = io::parse_spec(cfg.spec);
    auto patch = patches::Patch::make(cfg.rho, io::parse_points(cfg.patch));
    auto closed = patches::frequency_closed(spec, patch);
    OutputTarget target(cfg.output, out);
    target.stream << echo("freq",
                          {"spec=" + cfg.spec, "rho=" + fmt(cfg.rho, "%g"),
                           "patch=" + cfg.patch});
    target.stream << "closed=" << fmt(closed.value, "%.9f")
                  << " term_count=" << closed.term_count
                  << " tail_error=" << fmt(closed.tail_error, "%.3e") << "\n";
    if (cfg.radius > 0)
    {
        double emp = patches::frequency_empirical(spec, patch, cfg.radius, {}, cfg.cap);
        target.stream << "empirical=" << fmt(emp, "%.9f")
                      << " R=" << fmt(cfg.radius, "%g") << "\n";
    }
    return 0;
}

inline int cmd_census(const RunConfig& cfg, std::ostream& out)
{
    if (cfg.radius <= 0)
        throw domain_error("census: --R must be positive");
    auto spec = io::parse_spec(cfg.spec);
    auto census = patches::patch_census(spec, cfg.rho, cfg.radius, cfg.cap);
    OutputTarget target(cfg.output, out);
    target.stream << echo("census",
                          {"spec=" + cfg.spec, "rho=" + fmt(cfg.rho, "%g"),
                           "R=" + fmt(cfg.radius, "%g"),
                           "observed=" + std::to_string(census.observed())});
    target.stream << "# patch, count, frequency\n";
    for (const auto& e : census.entries)
    {
        std::string patch_str;
        for (std::size_t i = 0; i < e.patch.points.size(); ++i)
        {
            if (i)
                patch_str += ";";
            patch_str += vec_to_string(e.patch.points[i]);
        }
        target.stream << "\"" << patch_str << "\"," << e.count << ","
                      << fmt(static_cast<double>(e.count) / census.volume, "%.9f")
                      << "\n";
    }
    return 0;
}

inline int cmd_entropy(const RunConfig& cfg, std::ostream& out)
{
    auto spec = io::parse_spec(cfg.spec);
    double h = patches::patch_counting_entropy(spec, cfg.log2, cfg.rel_err);
    out << fmt(h, "%.6f") << "\n";
    out << "# certified_rel_err<=" << fmt(cfg.rel_err, "%g") << " log_base="
        << (cfg.log2 ? "2" : "e") << "\n";
    return 0;
}

inline int cmd_ergocheck(const RunConfig& cfg, std::ostream& out)
{
    std::mt19937_64 rng(cfg.seed);
    OutputTarget target(cfg.output, out);
    std::ostream& os = target.stream;
    os << echo("ergocheck",
               {"seed=" + std::to_string(cfg.seed),
                "R=" + fmt(cfg.radius > 0 ? cfg.radius : 300.0, "%g")});
    os << "# identity, params, pass, residual\n";
    bool all_ok = true;
    auto report = [&](const std::string& name, const std::string& params, bool pass,
                      double residual) {
        os << name << "," << params << "," << (pass ? "pass" : "FAIL") << ","
           << fmt(residual, "%.3e") << "\n";
        all_ok = all_ok && pass;
    };

    auto rand_points = [&](i64 range, int count) {
        std::vector<Vec> pts;
        for (int i = 0; i < count; ++i)
            pts.push_back({static_cast<i64>(rng() % range),
                           static_cast<i64>(rng() % range)});
        return pts;
    };

    // residue partition totals and the two counting identities
    for (i64 m : {2, 3, 4, 5})
    {
        auto p = rand_points(2 * m, static_cast<int>(rng() % 5));
        auto q = rand_points(2 * m, static_cast<int>(rng() % 5));
        auto part = ergodics::overlap_partition(p, q, m);
        report("partition_total", "m=" + std::to_string(m),
               part.total() == m * m, 0.0);
    }
    for (int trial = 0; trial < 25; ++trial)
    {
        i64 m = std::vector<i64>{2, 3, 5}[rng() % 3];
        auto p = rand_points(m, static_cast<int>(rng() % (m * m)));
        auto q = rand_points(m, static_cast<int>(rng() % (m * m)));
        report("weight_identity", "m=" + std::to_string(m) + " trial=" +
               std::to_string(trial),
               ergodics::check_partition_weight_identity(p, q, m), 0.0);
    }
    for (i64 d : {2, 3, 5, 6, 10, 15, 30})
    {
        auto p = rand_points(6, static_cast<int>(rng() % 5));
        auto q = rand_points(6, static_cast<int>(rng() % 5));
        report("product_identity", "d=" + std::to_string(d),
               ergodics::check_partition_product_identity(p, q, d), 0.0);
    }

    // Cesaro ladder
    double big_r = cfg.radius > 0 ? cfg.radius : 300.0;
    auto p0 = patches::Patch::make(0.5, {{0, 0}});
    double r_small = ergodics::cesaro_residual(p0, p0, big_r / 3.0);
    double r_big = ergodics::cesaro_residual(p0, p0, big_r);
    report("cesaro_decreasing", "R=" + fmt(big_r / 3.0, "%g") + "->" + fmt(big_r, "%g"),
           r_big < r_small, r_big);
    report("cesaro_small", "R=" + fmt(big_r, "%g"), r_big <= 0.02, r_big);

    // torus round trips and equivariance at truncation {2,3,5}
    std::vector<i64> moduli{2, 3, 5};
    auto window = pointsets::LatticeWindow::box({0, 0}, {29, 29});
    bool rt_ok = true, eq_ok = true;
    for (int trial = 0; trial < 20; ++trial)
    {
        ergodics::ResidueConfiguration y;
        for (i64 m : moduli)
            y.cosets.push_back({{static_cast<i64>(rng() % m),
                                 static_cast<i64>(rng() % m)}, m});
        auto x = ergodics::configuration_from_cosets(y, window);
        rt_ok = rt_ok && ergodics::cosets_from_configuration(x, window, moduli) == y;
        if (trial < 5)
        {
            Vec t{static_cast<i64>(rng() % 10) - 5, static_cast<i64>(rng() % 10) - 5};
            std::vector<Vec> xt;
            for (const Vec& v : x)
                xt.push_back({v[0] + t[0], v[1] + t[1]});
            auto wt = pointsets::LatticeWindow::box({t[0], t[1]},
                                                    {29 + t[0], 29 + t[1]});
            eq_ok = eq_ok && ergodics::cosets_from_configuration(xt, wt, moduli) ==
                                 y.translated(t);
        }
    }
    report("torus_round_trip", "truncation=2,3,5 trials=20", rt_ok, 0.0);
    report("torus_equivariance", "truncation=2,3,5 trials=5", eq_ok, 0.0);

    return all_ok ? 0 : 1;
}

inline int cmd_nf_gen(const RunConfig& cfg, std::ostream& out)
{
    if (cfg.radius <= 0)
        throw domain_error("nf-gen: --R must be positive");
    auto pts = numfield::generate(cfg.k_param, cfg.radius, cfg.cap);
    OutputTarget target(cfg.output, out);
    target.stream << echo("nf-gen",
                          {"k=" + std::to_string(cfg.k_param),
                           "R=" + fmt(cfg.radius, "%g"),
                           "count=" + std::to_string(pts.size())});
    target.stream << "# a, b, x, x_conj\n";
    for (const auto& e : pts)
        target.stream << e.value.a << "," << e.value.b << ","
                      << fmt(e.point.x, "%.9f") << "," << fmt(e.point.x_conj, "%.9f")
                      << "\n";
    return 0;
}

inline int cmd_nf_zeta(const RunConfig& cfg, std::ostream& out)
{
    auto z = numfield::dedekind_zeta(cfg.s_param, cfg.rel_err);
    out << fmt(z.value, "%.10f") << "\n";
    out << "# certified_rel_err<=" << fmt(z.certified_bound, "%.3e")
        << " prime_cutoff=" << z.prime_cutoff << "\n";
    return 0;
}

inline int cmd_nf_diffract(const RunConfig& cfg, std::ostream& out)
{
    if (cfg.real_window.empty())
        throw domain_error("nf-diffract: --window is required");
    auto box = parse_real_window(cfg.real_window, cfg.half_open);
    auto atoms =
        numfield::enumerate_atoms(cfg.k_param, box, cfg.threshold, cfg.rel_err);
    std::string provenance = "k=" + std::to_string(cfg.k_param) +
                             " window=" + cfg.real_window +
                             " threshold=" + fmt(cfg.threshold, "%g");
    OutputTarget target(cfg.output, out);
    if (cfg.format == "svg")
    {
        std::vector<diffraction::FigurePoint> pts;
        for (const auto& a : atoms)
            pts.push_back({a.point.x, a.point.x_conj, a.intensity});
        target.stream << diffraction::render_svg_points(pts, parse_style(cfg.style),
                                                        provenance);
    }
    else
    {
        target.stream << "# kfree-nf-atoms v1\n# " << provenance << "\n";
        target.stream << "# a, b, den, x, x_conj, intensity\n";
        for (const auto& a : atoms)
        {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.12g", a.intensity);
            target.stream << a.position.a << "," << a.position.b << ","
                          << a.position.den << "," << fmt(a.point.x, "%.9f") << ","
                          << fmt(a.point.x_conj, "%.9f") << "," << buf << "\n";
        }
    }
    return 0;
}

} // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"k-free and B-free lattice point sets: generation, "
                 "autocorrelation, diffraction, patch statistics, and the "
                 "Z[sqrt2] number-field case"};

    RunConfig cfg;
    std::string config_path;

    // config file values act as pre-parse defaults; flags override them
    try
    {
        for (std::size_t i = 0; i + 1 < args.size(); ++i)
            if (args[i] == "--config")
                config_path = args[i + 1];
        if (!config_path.empty())
            detail::apply_config_file(config_path, cfg);
    }
    catch (const domain_error& e)
    {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const resource_error& e)
    {
        err << "error: " << e.what() << "\n";
        return 3;
    }

    app.add_option("--config", config_path,
                   "config file starting with '# kfree-config v1'");
    app.require_subcommand(1);

    auto add_spec = [&](CLI::App* c) {
        c->add_option("--spec", cfg.spec, "point set: visible | kfree:n,k | bfree:n,b1,b2,...");
    };
    auto add_common = [&](CLI::App* c) {
        c->add_option("--cap", cfg.cap, "window point cap");
        c->add_option("--out", cfg.output, "output path (default stdout)");
    };

    auto* gen = app.add_subcommand("gen", "generate a point set over a window");
    add_spec(gen);
    add_common(gen);
    gen->add_option("--window", cfg.window, "ball:R or box:lo,..:hi,..");
    gen->add_option("--format", cfg.format, "csv | bin");

    auto* member = app.add_subcommand("member", "membership test for one point");
    add_spec(member);
    member->add_option("--point", cfg.point, "e.g. 3,4");

    auto* adm = app.add_subcommand("admissible", "hull membership of a finite set");
    add_spec(adm);
    adm->add_option("--points", cfg.points, "e.g. 0,0;1,0");
    adm->add_option("--in", cfg.input, "pointset CSV file");

    auto* hole = app.add_subcommand("hole", "construct and verify a periodic hole");
    add_spec(hole);
    hole->add_option("--rho", cfg.rho, "inradius");

    auto* autoc = app.add_subcommand("autocorr", "empirical autocorrelation table");
    add_spec(autoc);
    add_common(autoc);
    autoc->add_option("--shifts", cfg.shifts, "e.g. 0,0;1,0;2,0");
    autoc->add_option("--R", cfg.radius, "averaging radius");

    auto* diff = app.add_subcommand("diffract", "diffraction atoms in a window");
    add_spec(diff);
    add_common(diff);
    diff->add_option("--window", cfg.real_window, "x0,y0,x1,y1");
    diff->add_option("--threshold", cfg.threshold, "relative intensity threshold");
    diff->add_option("--format", cfg.format, "csv | svg");
    diff->add_option("--style", cfg.style, "area_proportional | quartic_rescale");
    diff->add_flag("--half-open", cfg.half_open, "treat the window as [lo,hi)");

    auto* fig = app.add_subcommand("figure", "render a stored atom CSV as SVG");
    add_common(fig);
    fig->add_option("--in", cfg.input, "atoms CSV file");
    fig->add_option("--style", cfg.style, "area_proportional | quartic_rescale");

    auto* freq = app.add_subcommand("freq", "closed-form patch frequency");
    add_spec(freq);
    add_common(freq);
    freq->add_option("--patch", cfg.patch, "patch points, e.g. 0,0;1,0 (may be empty)");
    freq->add_option("--rho", cfg.rho, "patch radius");
    freq->add_option("--R", cfg.radius, "also estimate empirically at this radius");

    auto* census = app.add_subcommand("census", "exhaustive patch census");
    add_spec(census);
    add_common(census);
    census->add_option("--rho", cfg.rho, "patch radius");
    census->add_option("--R", cfg.radius, "census radius");

    auto* entropy = app.add_subcommand("entropy", "patch counting entropy");
    add_spec(entropy);
    entropy->add_option("--rel-err", cfg.rel_err, "certified relative error");
    entropy->add_flag("--log2", cfg.log2, "report in base-2 logarithms");

    auto* ergo = app.add_subcommand("ergocheck", "verify the counting identities, "
                                                 "Cesaro averages and torus round trips");
    add_common(ergo);
    ergo->add_option("--seed", cfg.seed, "seed of the randomized trials");
    ergo->add_option("--R", cfg.radius, "Cesaro radius (default 300)");

    auto* nfgen = app.add_subcommand("nf-gen", "embedded k-free integers of Q(sqrt2)");
    add_common(nfgen);
    nfgen->add_option("--k", cfg.k_param, "freeness exponent (k >= 2)");
    nfgen->add_option("--R", cfg.radius, "ball radius");

    auto* nfzeta = app.add_subcommand("nf-zeta", "Dedekind zeta of Q(sqrt2)");
    nfzeta->add_option("--s", cfg.s_param, "argument (s > 1)");
    nfzeta->add_option("--rel-err", cfg.rel_err, "certified relative error");

    auto* nfdiff = app.add_subcommand("nf-diffract", "diffraction of the embedded "
                                                     "k-free integers");
    add_common(nfdiff);
    nfdiff->add_option("--k", cfg.k_param, "freeness exponent (k >= 2)");
    nfdiff->add_option("--window", cfg.real_window, "x0,y0,x1,y1");
    nfdiff->add_option("--threshold", cfg.threshold, "relative intensity threshold");
    nfdiff->add_option("--format", cfg.format, "csv | svg");
    nfdiff->add_option("--style", cfg.style, "area_proportional | quartic_rescale");
    nfdiff->add_flag("--half-open", cfg.half_open, "treat the window as [lo,hi)");

    for (auto* sub : app.get_subcommands({}))
        sub->fallthrough(); // parent options (--config) may follow the command

    std::reverse(args.begin(), args.end());
    try
    {
        app.parse(args);
    }
    catch (const CLI::ParseError& e)
    {
        if (e.get_exit_code() == 0)
        {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try
    {
        if (gen->parsed())
            return detail::cmd_gen(cfg, out);
        if (member->parsed())
            return detail::cmd_member(cfg, out);
        if (adm->parsed())
            return detail::cmd_admissible(cfg, out);
        if (hole->parsed())
            return detail::cmd_hole(cfg, out);
        if (autoc->parsed())
            return detail::cmd_autocorr(cfg, out);
        if (diff->parsed())
            return detail::cmd_diffract(cfg, out);
        if (fig->parsed())
            return detail::cmd_figure(cfg, out);
        if (freq->parsed())
            return detail::cmd_freq(cfg, out);
        if (census->parsed())
            return detail::cmd_census(cfg, out);
        if (entropy->parsed())
            return detail::cmd_entropy(cfg, out);
        if (ergo->parsed())
            return detail::cmd_ergocheck(cfg, out);
        if (nfgen->parsed())
            return detail::cmd_nf_gen(cfg, out);
        if (nfzeta->parsed())
            return detail::cmd_nf_zeta(cfg, out);
        if (nfdiff->parsed())
            return detail::cmd_nf_diffract(cfg, out);
        err << "error: no command given\n";
        return 2;
    }
    catch (const domain_error& e)
    {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const resource_error& e)
    {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace kfree::cli
