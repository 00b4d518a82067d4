#pragma once

// Figure emission for diffraction atom lists: SVG disks with area
// proportional to intensity (or the quartic rescale used for weak atoms),
// and a CSV alternative. Output is byte-stable for fixed input and style.

#include <fstream>

#include "diffraction.hpp"

namespace kfree::diffraction
{

enum class FigureStyle
{
    AreaProportional, // disk radius c * sqrt(I), area proportional to I
    QuarticRescale    // disk radius I^(1/4) / 20
};

enum class FigureFormat
{
    Svg,
    Csv
};

inline const char* style_name(FigureStyle s)
{
    return s == FigureStyle::AreaProportional ? "area_proportional" : "quartic_rescale";
}

// A positioned intensity, ready to draw.
struct FigurePoint
{
    double x = 0.0, y = 0.0;
    double intensity = 0.0;
};

namespace detail
{

inline std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace detail

inline std::string render_svg_points(const std::vector<FigurePoint>& points,
                                     FigureStyle style,
                                     const std::string& provenance = "")
{
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    double imax = 0;
    if (!points.empty())
    {
        xmin = ymin = 1e300;
        xmax = ymax = -1e300;
        for (const auto& p : points)
        {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
            imax = std::max(imax, p.intensity);
        }
    }
    const double margin = 0.25;
    xmin -= margin;
    ymin -= margin;
    xmax += margin;
    ymax += margin;
    const double scale = 240.0; // px per data unit
    const double w = (xmax - xmin) * scale;
    const double h = (ymax - ymin) * scale;

    // area-proportional radii are normalized so the strongest atom has
    // radius 0.2 data units
    const double area_coef = imax > 0 ? 0.2 / std::sqrt(imax) : 0.0;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fmt(w)
        << "\" height=\"" << detail::fmt(h) << "\" viewBox=\"0 0 " << detail::fmt(w)
        << " " << detail::fmt(h) << "\">\n";
    svg << "<!-- style=" << style_name(style) << " atoms=" << points.size();
    if (!provenance.empty())
        svg << " " << provenance;
    svg << " -->\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& p : points)
    {
        double r_data = style == FigureStyle::AreaProportional
                            ? area_coef * std::sqrt(p.intensity)
                            : std::pow(p.intensity, 0.25) / 20.0;
        double cx = (p.x - xmin) * scale;
        double cy = (ymax - p.y) * scale; // flip y
        svg << "<circle cx=\"" << detail::fmt(cx) << "\" cy=\"" << detail::fmt(cy)
            << "\" r=\"" << detail::fmt(r_data * scale) << "\" fill=\"black\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

inline std::vector<FigurePoint> to_figure_points(const std::vector<DiffractionAtom>& atoms)
{
    std::vector<FigurePoint> pts;
    pts.reserve(atoms.size());
    for (const auto& a : atoms)
        pts.push_back({a.position.coordinate(0),
                       a.position.dimension() >= 2 ? a.position.coordinate(1) : 0.0,
                       a.intensity});
    return pts;
}

inline std::string render_svg(const std::vector<DiffractionAtom>& atoms,
                              FigureStyle style, const std::string& provenance = "")
{
    return render_svg_points(to_figure_points(atoms), style, provenance);
}

inline std::string render_atoms_csv(const std::vector<DiffractionAtom>& atoms,
                                    const std::string& provenance = "")
{
    std::ostringstream csv;
    csv << "# kfree-atoms v1\n";
    if (!provenance.empty())
        csv << "# " << provenance << "\n";
    int dim = atoms.empty() ? 2 : atoms.front().position.dimension();
    csv << "#";
    for (int d = 0; d < dim; ++d)
        csv << " num" << d << ",";
    csv << " den, intensity\n";
    for (const auto& a : atoms)
    {
        char buf[40];
        csv << vec_to_string(a.position.numerator) << "," << a.position.den << ",";
        std::snprintf(buf, sizeof(buf), "%.12g", a.intensity);
        csv << buf << "\n";
    }
    return csv.str();
}

inline void emit_figure(const std::vector<DiffractionAtom>& atoms, FigureStyle style,
                        const std::string& path, FigureFormat format,
                        const std::string& provenance = "")
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("emit_figure: cannot open '" + path + "' for writing");
    out << (format == FigureFormat::Svg ? render_svg(atoms, style, provenance)
                                        : render_atoms_csv(atoms, provenance));
    if (!out)
        throw std::runtime_error("emit_figure: write to '" + path + "' failed");
}

} // namespace kfree::diffraction
