#pragma once

// Serialization: versioned CSV and compact binary run-length formats for
// point sets, CSV for diffraction atoms, and the string forms of specs,
// windows and point lists used by the CLI and the config file.

#include <istream>
#include <ostream>

#include "diffraction.hpp"
#include "pointsets.hpp"

namespace kfree::io
{

using pointsets::FreenessSpec;
using pointsets::LatticeWindow;
using pointsets::PointSet;

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s)
    {
        if (c == sep)
        {
            parts.push_back(cur);
            cur.clear();
        }
        else
            cur += c;
    }
    parts.push_back(cur);
    return parts;
}

inline i64 parse_i64(const std::string& s)
{
    std::size_t pos = 0;
    i64 v = std::stoll(s, &pos);
    if (pos != s.size())
        throw domain_error("malformed integer '" + s + "'");
    return v;
}

inline Vec parse_vec(const std::string& s)
{
    Vec v;
    for (const auto& part : split(s, ','))
        v.push_back(parse_i64(part));
    return v;
}

// "0,0;1,0;0,1" -> list of vectors
inline std::vector<Vec> parse_points(const std::string& s)
{
    std::vector<Vec> pts;
    if (s.empty())
        return pts;
    for (const auto& part : split(s, ';'))
        pts.push_back(parse_vec(part));
    return pts;
}

// "visible" | "kfree:n,k" | "bfree:n,b1,b2,..."
inline FreenessSpec parse_spec(const std::string& s)
{
    if (s == "visible")
        return FreenessSpec::visible();
    auto head = split(s, ':');
    if (head.size() == 2 && head[0] == "kfree")
    {
        auto nums = split(head[1], ',');
        if (nums.size() == 2)
            return FreenessSpec::kfree(static_cast<int>(parse_i64(nums[0])),
                                       static_cast<int>(parse_i64(nums[1])));
    }
    else if (head.size() == 2 && head[0] == "bfree")
    {
        auto nums = split(head[1], ',');
        if (nums.size() >= 1)
        {
            std::vector<i64> b;
            for (std::size_t i = 1; i < nums.size(); ++i)
                b.push_back(parse_i64(nums[i]));
            return FreenessSpec::bfree(static_cast<int>(parse_i64(nums[0])),
                                       std::move(b));
        }
    }
    throw domain_error("malformed spec '" + s +
                       "' (expected visible, kfree:n,k or bfree:n,b1,b2,...)");
}

// "ball:R" | "box:lo1,lo2:hi1,hi2"
inline LatticeWindow parse_window(const std::string& s, int dimension)
{
    auto parts = split(s, ':');
    if (parts.size() == 2 && parts[0] == "ball")
        return LatticeWindow::ball(dimension, std::stod(parts[1]));
    if (parts.size() == 3 && parts[0] == "box")
        return LatticeWindow::box(parse_vec(parts[1]), parse_vec(parts[2]));
    throw domain_error("malformed window '" + s +
                       "' (expected ball:R or box:lo,..:hi,..)");
}

// ---------------------------------------------------------------------------
// Point set CSV: '# kfree-pointset v1' header, spec and window echo, then one
// vector per line in lexicographic order.
// ---------------------------------------------------------------------------

inline void write_pointset_csv(std::ostream& out, const PointSet& ps,
                               const std::vector<std::string>& extra_header = {})
{
    out << "# kfree-pointset v1\n";
    out << "# spec=" << ps.spec.to_string() << "\n";
    out << "# window=" << ps.window.to_string() << "\n";
    for (const auto& line : extra_header)
        out << "# " << line << "\n";
    for (const Vec& p : ps.points)
        out << vec_to_string(p) << "\n";
}

inline PointSet read_pointset_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != "# kfree-pointset v1")
        throw domain_error("pointset CSV: missing version header");
    PointSet ps;
    bool have_spec = false, have_window = false;
    std::string window_str;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        if (line[0] == '#')
        {
            if (line.rfind("# spec=", 0) == 0)
            {
                ps.spec = parse_spec(line.substr(7));
                have_spec = true;
            }
            else if (line.rfind("# window=", 0) == 0)
            {
                window_str = line.substr(9);
                have_window = true;
            }
            continue;
        }
        ps.points.push_back(parse_vec(line));
    }
    if (!have_spec || !have_window)
        throw domain_error("pointset CSV: missing spec or window line");
    ps.window = parse_window(window_str, ps.spec.dimension);
    return ps;
}

// ---------------------------------------------------------------------------
// Binary run-length format: magic 'KFRL', version byte, spec and window
// strings, then varint run lengths of absent/present cells alternating
// (absent first) along the lexicographic traversal of the bounding box.
// ---------------------------------------------------------------------------

namespace detail
{

inline void write_varint(std::ostream& out, std::uint64_t v)
{
    while (v >= 0x80)
    {
        out.put(static_cast<char>((v & 0x7f) | 0x80));
        v >>= 7;
    }
    out.put(static_cast<char>(v));
}

inline std::uint64_t read_varint(std::istream& in)
{
    std::uint64_t v = 0;
    int shift = 0;
    while (true)
    {
        int c = in.get();
        if (c == EOF)
            throw domain_error("pointset RLE: truncated varint");
        v |= static_cast<std::uint64_t>(c & 0x7f) << shift;
        if (!(c & 0x80))
            return v;
        shift += 7;
    }
}

inline void write_string(std::ostream& out, const std::string& s)
{
    write_varint(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in)
{
    auto len = read_varint(in);
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    if (!in)
        throw domain_error("pointset RLE: truncated string");
    return s;
}

} // namespace detail

inline void write_pointset_rle(std::ostream& out, const PointSet& ps)
{
    out.write("KFRL", 4);
    out.put(1); // version
    out.put(static_cast<char>(ps.spec.dimension));
    detail::write_string(out, ps.spec.to_string());
    detail::write_string(out, ps.window.to_string());
    detail::write_varint(out, ps.points.size());

    Vec lo, hi;
    ps.window.bounding_box(lo, hi);
    // lexicographic cell index of a point within the bounding box
    auto cell_of = [&](const Vec& p) {
        std::uint64_t idx = 0;
        for (std::size_t d = 0; d < p.size(); ++d)
            idx = idx * static_cast<std::uint64_t>(hi[d] - lo[d] + 1) +
                  static_cast<std::uint64_t>(p[d] - lo[d]);
        return idx;
    };
    std::uint64_t cursor = 0;
    std::size_t i = 0;
    while (i < ps.points.size())
    {
        std::uint64_t cell = cell_of(ps.points[i]);
        std::uint64_t run = 1;
        while (i + run < ps.points.size() &&
               cell_of(ps.points[i + run]) == cell + run)
            ++run;
        detail::write_varint(out, cell - cursor); // absent run
        detail::write_varint(out, run);           // present run
        cursor = cell + run;
        i += run;
    }
}

inline PointSet read_pointset_rle(std::istream& in)
{
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "KFRL")
        throw domain_error("pointset RLE: bad magic");
    int version = in.get();
    if (version != 1)
        throw domain_error("pointset RLE: unsupported version " +
                           std::to_string(version));
    int dim = in.get();
    PointSet ps;
    ps.spec = parse_spec(detail::read_string(in));
    ps.window = parse_window(detail::read_string(in), dim);
    auto count = detail::read_varint(in);

    Vec lo, hi;
    ps.window.bounding_box(lo, hi);
    auto point_of = [&](std::uint64_t idx) {
        Vec p(static_cast<std::size_t>(dim));
        for (int d = dim - 1; d >= 0; --d)
        {
            std::uint64_t extent = static_cast<std::uint64_t>(hi[d] - lo[d] + 1);
            p[d] = lo[d] + static_cast<i64>(idx % extent);
            idx /= extent;
        }
        return p;
    };
    std::uint64_t cursor = 0;
    ps.points.reserve(count);
    while (ps.points.size() < count)
    {
        std::uint64_t absent = detail::read_varint(in);
        std::uint64_t present = detail::read_varint(in);
        cursor += absent;
        for (std::uint64_t i = 0; i < present; ++i)
            ps.points.push_back(point_of(cursor++));
    }
    return ps;
}

// Diffraction atom CSV reader (counterpart of render_atoms_csv).
inline std::vector<diffraction::DiffractionAtom> read_atoms_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != "# kfree-atoms v1")
        throw domain_error("atoms CSV: missing version header");
    std::vector<diffraction::DiffractionAtom> atoms;
    while (std::getline(in, line))
    {
        if (line.empty() || line[0] == '#')
            continue;
        auto parts = split(line, ',');
        if (parts.size() < 3)
            throw domain_error("atoms CSV: malformed row '" + line + "'");
        Vec num;
        for (std::size_t i = 0; i + 2 < parts.size(); ++i)
            num.push_back(parse_i64(parts[i]));
        i64 den = parse_i64(parts[parts.size() - 2]);
        double intensity = std::stod(parts.back());
        atoms.push_back({diffraction::RationalPoint{std::move(num), den}, intensity});
    }
    return atoms;
}

} // namespace kfree::io
