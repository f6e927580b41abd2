#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "secant/basins.hpp"
#include "secant/secant_map.hpp"
#include "secant/types.hpp"

namespace secant {

struct IOFailure : Error {
    using Error::Error;
};

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Palette {
    std::vector<Rgb> root_colors;
    Rgb non_converged{0, 0, 0};
    Rgb singular{255, 255, 255};
    Rgb highlight{255, 130, 171};  // immediate-basin fill (pink)

    static Palette default_for(int n_roots) {
        static const std::vector<Rgb> base{
            {204, 51, 51},  {51, 102, 204}, {51, 170, 85},  {230, 159, 0},
            {136, 84, 208}, {0, 158, 115},  {213, 94, 0},   {86, 180, 233},
            {160, 120, 40}, {120, 180, 60}, {170, 68, 153}, {100, 100, 220}};
        Palette p;
        for (int i = 0; i < n_roots; ++i) {
            Rgb c = base[static_cast<std::size_t>(i) % base.size()];
            const int round = i / static_cast<int>(base.size());
            for (int k = 0; k < round; ++k) {
                c.r = static_cast<std::uint8_t>(c.r * 3 / 4);
                c.g = static_cast<std::uint8_t>(c.g * 3 / 4);
                c.b = static_cast<std::uint8_t>(c.b * 3 / 4);
            }
            p.root_colors.push_back(c);
        }
        return p;
    }

    Rgb color_for(const Cell& c) const {
        switch (c.tag) {
            case CellTag::Root:
                return root_colors[static_cast<std::size_t>(c.root) % root_colors.size()];
            case CellTag::Singular: return singular;
            case CellTag::NonConverged: return non_converged;
        }
        return non_converged;
    }
};

struct OverlayCurve {
    std::vector<PlanarPoint> points;
    Rgb color{255, 140, 0};
};

struct Overlays {
    std::vector<PlanarPoint> focal_points;           // 5x5 crosses
    std::vector<PlanarPoint> cycle_points;           // 3x3 squares
    std::vector<OverlayCurve> curves;                // 1-pixel polylines
    std::vector<std::vector<PlanarPoint>> delta_s;   // zero contour of q
    const ImmediateBasin* highlight = nullptr;       // mask fill
    Rgb focal_color{255, 255, 255};
    Rgb cycle_color{20, 20, 20};
    Rgb delta_s_color{90, 90, 90};
};

namespace detail {

class Raster {
  public:
    Raster(const BasinGrid& grid) : grid_(grid), w_(grid.width()), h_(grid.height()),
                                    px_(static_cast<std::size_t>(w_) * h_ * 3) {}

    void base_layer(const Palette& pal) {
        for (int iy = 0; iy < h_; ++iy)
            for (int ix = 0; ix < w_; ++ix) set(ix, iy, pal.color_for(grid_.at(ix, iy)));
    }

    void set(int ix, int iy, Rgb c) {
        if (ix < 0 || ix >= w_ || iy < 0 || iy >= h_) return;
        // top-down rows: iy = h-1 maps to the first pixel row
        const std::size_t row = static_cast<std::size_t>(h_ - 1 - iy);
        const std::size_t at = (row * static_cast<std::size_t>(w_) + static_cast<std::size_t>(ix)) * 3;
        px_[at] = c.r;
        px_[at + 1] = c.g;
        px_[at + 2] = c.b;
    }

    bool to_cell(const PlanarPoint& p, int& ix, int& iy) const { return grid_.locate(p, ix, iy); }

    void square(const PlanarPoint& p, int half, Rgb c) {
        int ix, iy;
        if (!to_cell(p, ix, iy)) return;
        for (int dy = -half; dy <= half; ++dy)
            for (int dx = -half; dx <= half; ++dx) set(ix + dx, iy + dy, c);
    }

    void cross(const PlanarPoint& p, int half, Rgb c) {
        int ix, iy;
        if (!to_cell(p, ix, iy)) return;
        for (int d = -half; d <= half; ++d) {
            set(ix + d, iy, c);
            set(ix, iy + d, c);
        }
    }

    void polyline(const std::vector<PlanarPoint>& pts, Rgb c) {
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) segment(pts[i], pts[i + 1], c);
        if (pts.size() == 1) {
            int ix, iy;
            if (to_cell(pts[0], ix, iy)) set(ix, iy, c);
        }
    }

    const std::vector<std::uint8_t>& pixels() const { return px_; }

  private:
    void segment(const PlanarPoint& a, const PlanarPoint& b, Rgb c) {
        int x0, y0, x1, y1;
        if (!to_cell(a, x0, y0) || !to_cell(b, x1, y1)) return;
        // Bresenham
        const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
        const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
        int err = dx + dy;
        while (true) {
            set(x0, y0, c);
            if (x0 == x1 && y0 == y1) break;
            const int e2 = 2 * err;
            if (e2 >= dy) {
                err += dy;
                x0 += sx;
            }
            if (e2 <= dx) {
                err += dx;
                y0 += sy;
            }
        }
    }

    const BasinGrid& grid_;
    int w_, h_;
    std::vector<std::uint8_t> px_;
};

}  // namespace detail

inline std::vector<std::uint8_t> render_to_buffer(const BasinGrid& grid, const Palette& palette,
                                                  const Overlays& overlays = {}) {
    detail::Raster r(grid);
    r.base_layer(palette);
    if (overlays.highlight) {
        for (int iy = 0; iy < grid.height(); ++iy)
            for (int ix = 0; ix < grid.width(); ++ix)
                if (overlays.highlight->mask[grid.index(ix, iy)]) r.set(ix, iy, palette.highlight);
    }
    for (const auto& line : overlays.delta_s) r.polyline(line, overlays.delta_s_color);
    for (const auto& curve : overlays.curves) r.polyline(curve.points, curve.color);
    for (const auto& q : overlays.focal_points) r.cross(q, 2, overlays.focal_color);
    for (const auto& z : overlays.cycle_points) r.square(z, 1, overlays.cycle_color);
    return r.pixels();
}

// Binary PPM (P6), header exactly "P6\n<width> <height>\n255\n", pixel rows
// top-down. Bit-identical across runs for identical inputs.
inline void render_ppm(const BasinGrid& grid, const Palette& palette, const Overlays& overlays,
                       const std::string& out_path) {
    const auto px = render_to_buffer(grid, palette, overlays);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IOFailure("render_ppm: cannot open " + out_path);
    out << "P6\n" << grid.width() << " " << grid.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
    if (!out) throw IOFailure("render_ppm: write failed for " + out_path);
}

// --- delta_S contour ----------------------------------------------------------
//
// Marching-squares extraction of { q(x,y) = 0 } over `resolution`^2 cells,
// with segment endpoints interpolated linearly along lattice edges and chained
// into polylines. The diagonal points (c,c) with p'(c) = 0 lie on this
// contour, as do all focal points.
inline std::vector<std::vector<PlanarPoint>> delta_s_contour(const SecantSystem& sys,
                                                             const Rect& bounds, int resolution) {
    const int n = resolution;
    const double dx = bounds.width() / n, dy = bounds.height() / n;
    std::vector<double> f(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int iy = 0; iy <= n; ++iy)
        for (int ix = 0; ix <= n; ++ix)
            f[static_cast<std::size_t>(iy) * (n + 1) + ix] =
                sys.q(bounds.x0 + ix * dx, bounds.y0 + iy * dy);

    // A vertex lives on a unique lattice edge; the key identifies it exactly.
    // orientation 0 = horizontal edge from (ix,iy) to (ix+1,iy), 1 = vertical.
    using EdgeKey = std::tuple<int, int, int>;
    struct Segment {
        EdgeKey e0, e1;
        PlanarPoint p0, p1;
    };
    std::vector<Segment> segments;

    auto fval = [&](int ix, int iy) { return f[static_cast<std::size_t>(iy) * (n + 1) + ix]; };
    auto interp = [&](int ix0, int iy0, int ix1, int iy1) {
        const double f0 = fval(ix0, iy0), f1 = fval(ix1, iy1);
        const double t = f0 / (f0 - f1);
        return PlanarPoint{bounds.x0 + (ix0 + t * (ix1 - ix0)) * dx,
                           bounds.y0 + (iy0 + t * (iy1 - iy0)) * dy};
    };

    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            const double f00 = fval(ix, iy), f10 = fval(ix + 1, iy);
            const double f01 = fval(ix, iy + 1), f11 = fval(ix + 1, iy + 1);
            const int c = (f00 >= 0) | ((f10 >= 0) << 1) | ((f11 >= 0) << 2) | ((f01 >= 0) << 3);
            if (c == 0 || c == 15) continue;
            const EdgeKey bottom{0, ix, iy}, top{0, ix, iy + 1};
            const EdgeKey left{1, ix, iy}, right{1, ix + 1, iy};
            auto pb = [&] { return interp(ix, iy, ix + 1, iy); };
            auto pt = [&] { return interp(ix, iy + 1, ix + 1, iy + 1); };
            auto pl = [&] { return interp(ix, iy, ix, iy + 1); };
            auto pr = [&] { return interp(ix + 1, iy, ix + 1, iy + 1); };
            auto add = [&](EdgeKey ea, PlanarPoint pa, EdgeKey eb, PlanarPoint pb2) {
                segments.push_back({ea, eb, pa, pb2});
            };
            switch (c) {
                case 1: case 14: add(bottom, pb(), left, pl()); break;
                case 2: case 13: add(bottom, pb(), right, pr()); break;
                case 4: case 11: add(top, pt(), right, pr()); break;
                case 8: case 7: add(top, pt(), left, pl()); break;
                case 3: case 12: add(left, pl(), right, pr()); break;
                case 6: case 9: add(bottom, pb(), top, pt()); break;
                case 5: case 10: {
                    // Saddle: resolve by the cell-center sign.
                    const double fc = sys.q(bounds.x0 + (ix + 0.5) * dx, bounds.y0 + (iy + 0.5) * dy);
                    const bool center_pos = fc >= 0;
                    const bool corner00_pos = f00 >= 0;
                    if ((c == 5) == (center_pos == corner00_pos)) {
                        add(bottom, pb(), left, pl());
                        add(top, pt(), right, pr());
                    } else {
                        add(bottom, pb(), right, pr());
                        add(top, pt(), left, pl());
                    }
                    break;
                }
                default: break;
            }
        }

    // Chain segments into polylines by shared lattice edges.
    std::map<EdgeKey, std::vector<std::pair<std::size_t, int>>> at_edge;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        at_edge[segments[i].e0].emplace_back(i, 0);
        at_edge[segments[i].e1].emplace_back(i, 1);
    }
    std::vector<char> used(segments.size(), 0);
    std::vector<std::vector<PlanarPoint>> polylines;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (used[s]) continue;
        used[s] = 1;
        std::vector<PlanarPoint> line{segments[s].p0, segments[s].p1};
        std::vector<EdgeKey> ends{segments[s].e0, segments[s].e1};
        for (int dir = 1; dir >= 0; --dir) {
            while (true) {
                const EdgeKey key = ends[static_cast<std::size_t>(dir)];
                std::size_t next = segments.size();
                int endpoint = 0;
                for (const auto& [idx, ep] : at_edge[key]) {
                    if (!used[idx]) {
                        next = idx;
                        endpoint = ep;
                        break;
                    }
                }
                if (next == segments.size()) break;
                used[next] = 1;
                const auto& seg = segments[next];
                const PlanarPoint grown = endpoint == 0 ? seg.p1 : seg.p0;
                const EdgeKey grown_edge = endpoint == 0 ? seg.e1 : seg.e0;
                if (dir == 1) {
                    line.push_back(grown);
                } else {
                    line.insert(line.begin(), grown);
                }
                ends[static_cast<std::size_t>(dir)] = grown_edge;
            }
        }
        polylines.push_back(std::move(line));
    }
    return polylines;
}

inline bool is_closed(const std::vector<PlanarPoint>& line, double tol) {
    return line.size() > 2 && distance(line.front(), line.back()) <= tol;
}

// CSV export "curve_id,x,y".
inline void write_polyline_csv(const std::vector<std::vector<PlanarPoint>>& lines,
                               const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IOFailure("write_polyline_csv: cannot open " + path);
    out << "curve_id,x,y\n";
    char buf[96];
    for (std::size_t id = 0; id < lines.size(); ++id)
        for (const auto& p : lines[id]) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", id, p.x, p.y);
            out << buf;
        }
    if (!out) throw IOFailure("write_polyline_csv: write failed for " + path);
}

}  // namespace secant
