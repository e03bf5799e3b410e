#pragma once

#include <string>
#include <vector>

// File emission and re-reading for the CLI workbench: CSV tables with
// comment headers, JSON documents, and schematic SVG figures. Every file the
// tool writes can be read back through the readers here.

namespace paracav::io {

struct CsvTable {
    std::vector<std::string> comments;  // emitted as leading '# ' lines
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Fixed shortest-round-trip formatting used for every numeric field, so
/// identical configurations produce byte-identical payloads.
std::string format_number(double v);

void write_csv(const std::string& path, const CsvTable& table);

/// Parses a file produced by write_csv (RFC-4180-style quoting, '#' comment
/// prefix). Throws paracav::Error on malformed input.
CsvTable read_csv(const std::string& path);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

/// Minimal SVG scene: polylines and circles on a fitted viewport.
class SvgFigure {
public:
    SvgFigure(double width_px, double height_px);

    void add_polyline(const std::vector<std::pair<double, double>>& pts,
                      const std::string& stroke, double stroke_width = 1.0);
    void add_circle(double cx, double cy, double r, const std::string& stroke);

    /// Fit all added geometry into the pixel viewport (isotropic, 5% margin)
    /// and serialize.
    std::string render() const;

private:
    struct Polyline {
        std::vector<std::pair<double, double>> pts;
        std::string stroke;
        double width;
    };
    struct Circle {
        double cx, cy, r;
        std::string stroke;
    };
    double width_, height_;
    std::vector<Polyline> polylines_;
    std::vector<Circle> circles_;
};

/// Contour polylines of a grid field at one level via marching squares.
/// values is row-major values[i * nx + j] on the (x[j], y[i]) lattice.
std::vector<std::vector<std::pair<double, double>>> contour_lines(
    const std::vector<double>& x, const std::vector<double>& y,
    const std::vector<double>& values, double level);

}  // namespace paracav::io
