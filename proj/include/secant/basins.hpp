#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "secant/cycles.hpp"
#include "secant/secant_map.hpp"
#include "secant/types.hpp"

namespace secant {

struct SeedNotInBasin : Error {
    using Error::Error;
};

enum class CellTag : std::uint8_t { Root = 0, NonConverged = 1, Singular = 2 };

struct Cell {
    CellTag tag = CellTag::NonConverged;
    std::int16_t root = -1;
    std::uint16_t iterations = 0;
    std::uint8_t q_sign_bits = 0;  // see OrbitResult::q_sign_bits
};

class BasinGrid {
  public:
    BasinGrid(Rect bounds, int width, int height)
        : bounds_(bounds), width_(width), height_(height),
          cells_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {}

    const Rect& bounds() const { return bounds_; }
    int width() const { return width_; }
    int height() const { return height_; }
    double dx() const { return bounds_.width() / width_; }
    double dy() const { return bounds_.height() / height_; }
    double cell_diagonal() const { return std::hypot(dx(), dy()); }

    // Row-major, iy = 0 at y_min.
    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(ix);
    }
    Cell& at(int ix, int iy) { return cells_[index(ix, iy)]; }
    const Cell& at(int ix, int iy) const { return cells_[index(ix, iy)]; }
    const std::vector<Cell>& cells() const { return cells_; }
    std::vector<Cell>& cells() { return cells_; }

    PlanarPoint cell_center(int ix, int iy) const {
        return {bounds_.x0 + (ix + 0.5) * dx(), bounds_.y0 + (iy + 0.5) * dy()};
    }
    bool locate(const PlanarPoint& p, int& ix, int& iy) const {
        ix = static_cast<int>(std::floor((p.x - bounds_.x0) / dx()));
        iy = static_cast<int>(std::floor((p.y - bounds_.y0) / dy()));
        return ix >= 0 && ix < width_ && iy >= 0 && iy < height_;
    }

  private:
    Rect bounds_;
    int width_, height_;
    std::vector<Cell> cells_;
};

// Classifies every cell center by its orbit. Cells are independent, so the
// result is identical for any worker count.
inline BasinGrid compute_grid(const SecantSystem& sys, const Rect& bounds, int width, int height,
                              int max_iter = -1, double tol = -1.0, int workers = 0) {
    BasinGrid grid(bounds, width, height);
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
    workers = std::min(workers, height);

    auto run_rows = [&](int y_begin, int y_end) {
        for (int iy = y_begin; iy < y_end; ++iy) {
            for (int ix = 0; ix < width; ++ix) {
                const OrbitResult r = sys.orbit(grid.cell_center(ix, iy), max_iter, tol);
                Cell& c = grid.at(ix, iy);
                c.iterations = static_cast<std::uint16_t>(std::min(r.iterations, 65535));
                c.q_sign_bits = r.q_sign_bits;
                switch (r.outcome) {
                    case OrbitResult::Outcome::Converged:
                        c.tag = CellTag::Root;
                        c.root = static_cast<std::int16_t>(r.root_index);
                        break;
                    case OrbitResult::Outcome::Singular:
                        c.tag = CellTag::Singular;
                        break;
                    case OrbitResult::Outcome::NonConverged:
                        c.tag = CellTag::NonConverged;
                        break;
                }
            }
        }
    };

    if (workers == 1) {
        run_rows(0, height);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (height + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int y0 = w * chunk, y1 = std::min(height, y0 + chunk);
            if (y0 >= y1) break;
            pool.emplace_back(run_rows, y0, y1);
        }
        for (auto& t : pool) t.join();
    }
    return grid;
}

// Immediate basin A*(alpha): the flood-filled component of Root(root_index)
// cells containing the cell of (alpha, alpha). Mask connectivity is
// 8-connected. Only orbit-sign-clean cells participate: on the true A*(alpha)
// every iterate keeps sign(q) equal to sign(p'(alpha)) (S^k(A*) is connected,
// contains the fixed point and avoids delta_S), so cells whose orbits cross
// or straddle delta_S at any step are certified foreign and excluded; this
// keeps the raster mask from gluing other components of the basin through
// focal-point pinches. Complement (hole) connectivity is 4-connected. A
// complement component counts as a hole only if it does not touch the grid
// frame and its area exceeds the noise floor
// max(1, floor_fraction * width * height); the sub-floor components are the
// raster shadows of the lobe bays, which are pinched open at focal points
// below pixel scale.
struct ImmediateBasin {
    int root_index = -1;
    Rect bounds;
    int width = 0, height = 0;
    std::vector<std::uint8_t> mask;        // 1 = basin cell
    long mask_cells = 0;
    int hole_count = 0;
    std::vector<long> hole_areas;          // counted holes, descending
    std::vector<long> subfloor_hole_areas; // enclosed components below the floor
    std::vector<std::pair<int, int>> boundary_cells;

    bool in_mask(int ix, int iy) const {
        return ix >= 0 && ix < width && iy >= 0 && iy < height &&
               mask[static_cast<std::size_t>(iy) * width + ix] != 0;
    }
};

inline ImmediateBasin immediate_basin(const BasinGrid& grid, const SecantSystem& sys,
                                      int root_index, double hole_floor_fraction = 0.01) {
    const int W = grid.width(), H = grid.height();
    ImmediateBasin ib;
    ib.root_index = root_index;
    ib.bounds = grid.bounds();
    ib.width = W;
    ib.height = H;
    ib.mask.assign(static_cast<std::size_t>(W) * H, 0);

    const double alpha = sys.roots()[root_index];
    int sx, sy;
    if (!grid.locate({alpha, alpha}, sx, sy))
        throw SeedNotInBasin("immediate_basin: (alpha,alpha) outside grid bounds");
    const Cell& seed = grid.at(sx, sy);
    if (seed.tag != CellTag::Root || seed.root != root_index)
        throw SeedNotInBasin("immediate_basin: seed cell not classified to the requested root");

    // sign(p'(alpha)) decides which q_sign_bits an A*-orbit may carry.
    const std::uint8_t allowed_bit = sys.dpoly()(alpha) < 0.0 ? 1 : 2;
    auto is_clean_root_cell = [&](int ix, int iy) {
        const Cell& c = grid.at(ix, iy);
        return c.tag == CellTag::Root && c.root == root_index &&
               (c.q_sign_bits & ~allowed_bit) == 0;
    };
    if (!is_clean_root_cell(sx, sy))
        throw SeedNotInBasin("immediate_basin: seed cell orbit is not sign-clean");

    // 8-connected flood fill from the seed.
    std::vector<std::pair<int, int>> stack{{sx, sy}};
    ib.mask[grid.index(sx, sy)] = 1;
    while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        ++ib.mask_cells;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int nx = cx + dx, ny = cy + dy;
                if (nx < 0 || nx >= W || ny < 0 || ny >= H) continue;
                const std::size_t ni = grid.index(nx, ny);
                if (ib.mask[ni] || !is_clean_root_cell(nx, ny)) continue;
                ib.mask[ni] = 1;
                stack.emplace_back(nx, ny);
            }
    }

    // 4-connected complement labeling; components touching the frame are the
    // outside, the rest are enclosed.
    std::vector<std::int32_t> label(static_cast<std::size_t>(W) * H, 0);
    std::int32_t next = 0;
    std::vector<long> areas;
    std::vector<std::uint8_t> touches;
    for (int iy = 0; iy < H; ++iy)
        for (int ix = 0; ix < W; ++ix) {
            const std::size_t i0 = grid.index(ix, iy);
            if (ib.mask[i0] || label[i0]) continue;
            const std::int32_t id = ++next;
            long area = 0;
            bool frame = false;
            std::vector<std::pair<int, int>> st{{ix, iy}};
            label[i0] = id;
            while (!st.empty()) {
                const auto [cx, cy] = st.back();
                st.pop_back();
                ++area;
                if (cx == 0 || cy == 0 || cx == W - 1 || cy == H - 1) frame = true;
                static constexpr int kD[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
                for (const auto& d : kD) {
                    const int nx = cx + d[0], ny = cy + d[1];
                    if (nx < 0 || nx >= W || ny < 0 || ny >= H) continue;
                    const std::size_t ni = grid.index(nx, ny);
                    if (ib.mask[ni] || label[ni]) continue;
                    label[ni] = id;
                    st.emplace_back(nx, ny);
                }
            }
            areas.push_back(area);
            touches.push_back(frame ? 1 : 0);
        }
    const long floor_cells =
        std::max<long>(1, static_cast<long>(hole_floor_fraction * static_cast<double>(W) * H));
    for (std::size_t k = 0; k < areas.size(); ++k) {
        if (touches[k]) continue;
        if (areas[k] > floor_cells)
            ib.hole_areas.push_back(areas[k]);
        else
            ib.subfloor_hole_areas.push_back(areas[k]);
    }
    std::sort(ib.hole_areas.rbegin(), ib.hole_areas.rend());
    std::sort(ib.subfloor_hole_areas.rbegin(), ib.subfloor_hole_areas.rend());
    ib.hole_count = static_cast<int>(ib.hole_areas.size());

    for (int iy = 0; iy < H; ++iy)
        for (int ix = 0; ix < W; ++ix) {
            if (!ib.mask[grid.index(ix, iy)]) continue;
            const bool edge = ix == 0 || iy == 0 || ix == W - 1 || iy == H - 1;
            const bool gap = !ib.in_mask(ix + 1, iy) || !ib.in_mask(ix - 1, iy) ||
                             !ib.in_mask(ix, iy + 1) || !ib.in_mask(ix, iy - 1);
            if (edge || gap) ib.boundary_cells.emplace_back(ix, iy);
        }
    return ib;
}

// Mask plus all enclosed complement components; the raster region bounded by
// the external boundary.
inline std::vector<std::uint8_t> filled_mask(const ImmediateBasin& ib) {
    const int W = ib.width, H = ib.height;
    std::vector<std::uint8_t> outside(static_cast<std::size_t>(W) * H, 0);
    std::vector<std::pair<int, int>> st;
    auto push = [&](int ix, int iy) {
        const std::size_t i = static_cast<std::size_t>(iy) * W + ix;
        if (!outside[i] && !ib.mask[i]) {
            outside[i] = 1;
            st.emplace_back(ix, iy);
        }
    };
    for (int ix = 0; ix < W; ++ix) {
        push(ix, 0);
        push(ix, H - 1);
    }
    for (int iy = 0; iy < H; ++iy) {
        push(0, iy);
        push(W - 1, iy);
    }
    while (!st.empty()) {
        const auto [cx, cy] = st.back();
        st.pop_back();
        static constexpr int kD[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& d : kD) {
            const int nx = cx + d[0], ny = cy + d[1];
            if (nx < 0 || nx >= W || ny < 0 || ny >= H) continue;
            push(nx, ny);
        }
    }
    std::vector<std::uint8_t> fill(static_cast<std::size_t>(W) * H);
    for (std::size_t i = 0; i < fill.size(); ++i) fill[i] = outside[i] ? 0 : 1;
    return fill;
}

// --- containment, hexagon-vertex and boundary-cycle checks -------------------

struct ContainmentReport {
    bool applicable = false;  // internal roots only
    bool ok = false;
    double max_violation = 0.0;  // how far mask cell centers exit R, in coords
    std::string note;
};

inline ContainmentReport check_containment_in_R(const ImmediateBasin& ib, const BasinGrid& grid,
                                                const SecantSystem& sys) {
    ContainmentReport rep;
    const RootSet& roots = sys.roots();
    if (!roots.is_internal(ib.root_index)) {
        rep.note = "external root: immediate basin unbounded, containment not applicable";
        return rep;
    }
    rep.applicable = true;
    const double lo = roots[ib.root_index - 1], hi = roots[ib.root_index + 1];
    double worst = -1e300;
    for (int iy = 0; iy < ib.height; ++iy)
        for (int ix = 0; ix < ib.width; ++ix) {
            if (!ib.mask[grid.index(ix, iy)]) continue;
            const PlanarPoint c = grid.cell_center(ix, iy);
            const double out = std::max(std::max(lo - c.x, c.x - hi), std::max(lo - c.y, c.y - hi));
            worst = std::max(worst, out);
        }
    rep.max_violation = std::max(0.0, worst);
    rep.ok = rep.max_violation <= grid.cell_diagonal();
    return rep;
}

struct HexagonReport {
    // Distances from Q_{i,j}, i != j over the consecutive triple, to the
    // nearest boundary cell center, in units of the cell diagonal. Order:
    // (i,j) = (0,1),(0,2),(1,0),(1,2),(2,0),(2,1) relative to the triple.
    std::array<double, 6> distances_diagonals{};
    bool pass = false;
};

// The discrete boundary interface has two cell layers, the mask-side one and
// the complement-side one; the continuum curve runs between them, so the
// vertex distances are measured against both.
inline HexagonReport check_hexagon_vertices(const ImmediateBasin& ib, const BasinGrid& grid,
                                            const SecantSystem& sys) {
    const RootSet& roots = sys.roots();
    if (!roots.is_internal(ib.root_index))
        throw Error("check_hexagon_vertices: internal root required");
    HexagonReport rep;
    const double tri[3] = {roots[ib.root_index - 1], roots[ib.root_index],
                           roots[ib.root_index + 1]};
    const double diag = grid.cell_diagonal();
    std::vector<PlanarPoint> layer;
    for (const auto& [bx, by] : ib.boundary_cells) {
        layer.push_back(grid.cell_center(bx, by));
        static constexpr int kD[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& d : kD) {
            const int nx = bx + d[0], ny = by + d[1];
            if (nx < 0 || nx >= ib.width || ny < 0 || ny >= ib.height) continue;
            if (!ib.mask[grid.index(nx, ny)]) layer.push_back(grid.cell_center(nx, ny));
        }
    }
    int k = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            const PlanarPoint q{tri[i], tri[j]};
            double best = 1e300;
            for (const auto& pt : layer) best = std::min(best, distance(pt, q));
            rep.distances_diagonals[static_cast<std::size_t>(k++)] = best / diag;
        }
    rep.pass = *std::max_element(rep.distances_diagonals.begin(), rep.distances_diagonals.end()) <=
               2.0;
    return rep;
}

// Max over the four orbit points of the distance to the nearest boundary cell
// center, in cell diagonals.
inline double boundary_cycle_distance(const ImmediateBasin& ib, const BasinGrid& grid,
                                      const FourCycle& cycle) {
    double worst = 0.0;
    for (const auto& pt : cycle.orbit_points()) {
        double best = 1e300;
        for (const auto& [bx, by] : ib.boundary_cells)
            best = std::min(best, distance(grid.cell_center(bx, by), pt));
        worst = std::max(worst, best);
    }
    return worst / grid.cell_diagonal();
}

struct ForwardInvarianceReport {
    bool applicable = false;  // requires a simply connected mask (hole_count 0)
    int samples = 0;
    int violations = 0;
    int singular_skips = 0;
};

// Applies S to random mask-cell centers and counts images landing outside the
// filled mask beyond a 1-cell slack. Images inside enclosed sub-floor bays are
// not violations: forward invariance concerns the external boundary.
inline ForwardInvarianceReport forward_invariance_check(const ImmediateBasin& ib,
                                                        const BasinGrid& grid,
                                                        const SecantSystem& sys, int sample_count) {
    ForwardInvarianceReport rep;
    if (ib.hole_count != 0) return rep;
    rep.applicable = true;
    const auto fill = filled_mask(ib);
    std::vector<std::uint32_t> mask_cells;
    for (std::uint32_t i = 0; i < ib.mask.size(); ++i)
        if (ib.mask[i]) mask_cells.push_back(i);
    if (mask_cells.empty()) return rep;
    std::mt19937_64 rng(0x5eca47u);
    std::uniform_int_distribution<std::size_t> pick(0, mask_cells.size() - 1);
    auto filled_at = [&](int ix, int iy) {
        return ix >= 0 && ix < ib.width && iy >= 0 && iy < ib.height &&
               fill[static_cast<std::size_t>(iy) * ib.width + ix] != 0;
    };
    for (int s = 0; s < sample_count; ++s) {
        const std::uint32_t idx = mask_cells[pick(rng)];
        const int ix = static_cast<int>(idx % static_cast<std::uint32_t>(ib.width));
        const int iy = static_cast<int>(idx / static_cast<std::uint32_t>(ib.width));
        const auto img = sys.step(grid.cell_center(ix, iy));
        ++rep.samples;
        if (!img) {
            ++rep.singular_skips;
            continue;
        }
        int jx, jy;
        grid.locate(*img, jx, jy);
        bool ok = false;
        for (int dy = -1; dy <= 1 && !ok; ++dy)
            for (int dx = -1; dx <= 1 && !ok; ++dx) ok = filled_at(jx + dx, jy + dy);
        if (!ok) ++rep.violations;
    }
    return rep;
}

// --- binary grid dump ---------------------------------------------------------
//
// Little-endian layout: magic "SBG1", width and height as uint32, bounds as 4
// doubles (x0, x1, y0, y1), then per cell (row-major from the y_min row) a tag
// byte (root index, 254 = non-converged, 255 = singular) and the iteration
// count as uint16.
inline void dump_sbg(const BasinGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("dump_sbg: cannot open " + path);
    out.write("SBG1", 4);
    auto put_u32 = [&](std::uint32_t v) {
        unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
        out.write(reinterpret_cast<const char*>(b), 4);
    };
    auto put_f64 = [&](double v) {
        static_assert(sizeof(double) == 8);
        out.write(reinterpret_cast<const char*>(&v), 8);
    };
    put_u32(static_cast<std::uint32_t>(grid.width()));
    put_u32(static_cast<std::uint32_t>(grid.height()));
    put_f64(grid.bounds().x0);
    put_f64(grid.bounds().x1);
    put_f64(grid.bounds().y0);
    put_f64(grid.bounds().y1);
    for (const Cell& c : grid.cells()) {
        unsigned char tag = 254;
        if (c.tag == CellTag::Root)
            tag = static_cast<unsigned char>(c.root);
        else if (c.tag == CellTag::Singular)
            tag = 255;
        const unsigned char it[2] = {static_cast<unsigned char>(c.iterations & 0xff),
                                     static_cast<unsigned char>(c.iterations >> 8)};
        out.put(static_cast<char>(tag));
        out.write(reinterpret_cast<const char*>(it), 2);
    }
    if (!out) throw Error("dump_sbg: write failed for " + path);
}

}  // namespace secant
