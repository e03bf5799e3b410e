#include "workbench_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "paracav/errors.hpp"

namespace paracav::io {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    // shortest representation that round-trips a double
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace {

bool needs_quoting(const std::string& field) {
    return field.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quote(const std::string& field) {
    if (!needs_quoting(field)) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (in_quotes) throw Error("read_csv: unterminated quoted field");
    fields.push_back(cur);
    return fields;
}

}  // namespace

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("write_csv: cannot open " + path);
    for (const std::string& c : table.comments) out << "# " << c << "\n";
    for (size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << quote(table.header[i]);
    out << "\n";
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << quote(row[i]);
        out << "\n";
    }
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("read_csv: cannot open " + path);
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            table.comments.push_back(line.size() > 2 ? line.substr(2) : "");
            continue;
        }
        auto fields = split_csv_line(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
        } else {
            if (fields.size() != table.header.size())
                throw Error("read_csv: ragged row in " + path);
            table.rows.push_back(std::move(fields));
        }
    }
    return table;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("write_text: cannot open " + path);
    out << content;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("read_text: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SvgFigure::SvgFigure(double w, double h) : width_(w), height_(h) {}

void SvgFigure::add_polyline(const std::vector<std::pair<double, double>>& pts,
                             const std::string& stroke, double stroke_width) {
    if (pts.size() >= 2) polylines_.push_back({pts, stroke, stroke_width});
}

void SvgFigure::add_circle(double cx, double cy, double r, const std::string& stroke) {
    circles_.push_back({cx, cy, r, stroke});
}

std::string SvgFigure::render() const {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto grow = [&](double x, double y) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    };
    for (const auto& pl : polylines_)
        for (const auto& [x, y] : pl.pts) grow(x, y);
    for (const auto& c : circles_) {
        grow(c.cx - c.r, c.cy - c.r);
        grow(c.cx + c.r, c.cy + c.r);
    }
    if (xmax < xmin) {
        xmin = ymin = 0;
        xmax = ymax = 1;
    }
    const double margin = 0.05;
    const double spanx = std::max(xmax - xmin, 1e-12);
    const double spany = std::max(ymax - ymin, 1e-12);
    const double scale = std::min(width_ * (1 - 2 * margin) / spanx,
                                  height_ * (1 - 2 * margin) / spany);
    auto X = [&](double x) { return width_ * margin + (x - xmin) * scale; };
    auto Y = [&](double y) {
        return height_ - (height_ * margin + (y - ymin) * scale);
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
        << "\" height=\"" << height_ << "\">\n";
    for (const auto& c : circles_)
        out << "  <circle cx=\"" << X(c.cx) << "\" cy=\"" << Y(c.cy) << "\" r=\""
            << c.r * scale << "\" fill=\"none\" stroke=\"" << c.stroke << "\"/>\n";
    for (const auto& pl : polylines_) {
        out << "  <polyline fill=\"none\" stroke=\"" << pl.stroke
            << "\" stroke-width=\"" << pl.width << "\" points=\"";
        for (const auto& [x, y] : pl.pts) out << X(x) << "," << Y(y) << " ";
        out << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::vector<std::vector<std::pair<double, double>>> contour_lines(
    const std::vector<double>& x, const std::vector<double>& y,
    const std::vector<double>& values, double level) {
    const size_t nx = x.size(), ny = y.size();
    std::vector<std::vector<std::pair<double, double>>> segments;
    auto v = [&](size_t i, size_t j) { return values[i * nx + j] - level; };
    // marching squares: collect edge crossings per cell, join in pairs
    for (size_t i = 0; i + 1 < ny; ++i) {
        for (size_t j = 0; j + 1 < nx; ++j) {
            std::vector<std::pair<double, double>> pts;
            auto edge = [&](double fa, double fb, double xa, double ya, double xb,
                            double yb) {
                if (!std::isfinite(fa) || !std::isfinite(fb)) return;
                if ((fa < 0) != (fb < 0)) {
                    const double t = fa / (fa - fb);
                    pts.push_back({xa + (xb - xa) * t, ya + (yb - ya) * t});
                }
            };
            const double f00 = v(i, j), f01 = v(i, j + 1);
            const double f10 = v(i + 1, j), f11 = v(i + 1, j + 1);
            edge(f00, f01, x[j], y[i], x[j + 1], y[i]);
            edge(f01, f11, x[j + 1], y[i], x[j + 1], y[i + 1]);
            edge(f11, f10, x[j + 1], y[i + 1], x[j], y[i + 1]);
            edge(f10, f00, x[j], y[i + 1], x[j], y[i]);
            for (size_t k = 0; k + 1 < pts.size(); k += 2)
                segments.push_back({pts[k], pts[k + 1]});
        }
    }
    return segments;
}

}  // namespace paracav::io
