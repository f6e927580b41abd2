#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "secant/render.hpp"

using namespace secant;
using Catch::Approx;

namespace {
const double kRt3Half = std::sqrt(3.0) / 2.0;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("PPM format: 2x1 grid, exact bytes") {
    BasinGrid g({0.0, 2.0, 0.0, 1.0}, 2, 1);
    g.at(0, 0) = {CellTag::Root, 0, 1};
    g.at(1, 0) = {CellTag::NonConverged, -1, 500};
    const Palette pal = Palette::default_for(1);
    const std::string path = "render_2x1.ppm";
    render_ppm(g, pal, {}, path);
    const std::string bytes = slurp(path);
    REQUIRE(bytes.size() == 11 + 6);
    CHECK(bytes.substr(0, 11) == "P6\n2 1\n255\n");
    const auto* px = reinterpret_cast<const std::uint8_t*>(bytes.data() + 11);
    CHECK(px[0] == pal.root_colors[0].r);
    CHECK(px[1] == pal.root_colors[0].g);
    CHECK(px[2] == pal.root_colors[0].b);
    CHECK(px[3] == 0);
    CHECK(px[4] == 0);
    CHECK(px[5] == 0);
    std::remove(path.c_str());
}

TEST_CASE("PPM rows run top-down") {
    BasinGrid g({0.0, 1.0, 0.0, 2.0}, 1, 2);
    g.at(0, 0) = {CellTag::Root, 0, 1};       // bottom cell (y_min row)
    g.at(0, 1) = {CellTag::Singular, -1, 0};  // top cell
    const Palette pal = Palette::default_for(1);
    const auto px = render_to_buffer(g, pal);
    REQUIRE(px.size() == 6);
    // first emitted pixel is the TOP row: singular = white
    CHECK(px[0] == 255);
    CHECK(px[3] == pal.root_colors[0].r);
}

TEST_CASE("palette reserves distinct colors") {
    const Palette pal = Palette::default_for(30);
    REQUIRE(pal.root_colors.size() == 30);
    for (const Rgb& c : pal.root_colors) {
        CHECK(c != pal.non_converged);
        CHECK(c != pal.singular);
    }
}

TEST_CASE("rendering is bit-identical across runs and carries overlays") {
    SecantSystem sys(chebyshev(3));
    const BasinGrid g = compute_grid(sys, Rect::square(-1.2, 1.2), 96, 96);
    const Palette pal = Palette::default_for(3);
    Overlays ov;
    for (const auto& fp : sys.focal_points()) ov.focal_points.push_back(fp.location);
    ov.delta_s = delta_s_contour(sys, g.bounds(), 96);
    const auto p1 = render_to_buffer(g, pal, ov);
    const auto p2 = render_to_buffer(g, pal, ov);
    CHECK(p1 == p2);
    // overlays changed some pixels
    const auto base = render_to_buffer(g, pal, {});
    CHECK(p1 != base);
}

TEST_CASE("delta_S contour of T3") {
    SecantSystem sys(chebyshev(3));
    const Rect b = Rect::square(-1.1, 1.1);
    const auto lines = delta_s_contour(sys, b, 256);

    SECTION("a single closed curve (the ellipse)") {
        REQUIRE(lines.size() == 1);
        CHECK(is_closed(lines[0], 1e-9));
    }
    SECTION("vertices nearly satisfy q = 0") {
        // |q| at a contour vertex is bounded by max |q| over its cell corners
        // (linear interpolation along an edge); check against the coarse bound
        // max|grad q| * cell diagonal.
        const double cell = b.width() / 256.0;
        for (const auto& line : lines)
            for (const auto& v : line) CHECK(std::abs(sys.q(v.x, v.y)) < 12.0 * cell);
    }
    SECTION("passes within one cell of the diagonal critical points") {
        const double cell = b.width() / 256.0;
        for (const PlanarPoint c : {PlanarPoint{0.5, 0.5}, PlanarPoint{-0.5, -0.5}}) {
            double best = 1e300;
            for (const auto& line : lines)
                for (const auto& v : line) best = std::min(best, distance(v, c));
            CHECK(best <= cell * std::sqrt(2.0));
        }
    }
    SECTION("passes within one cell of every focal point") {
        const double cell = b.width() / 256.0;
        for (const auto& fp : sys.focal_points()) {
            double best = 1e300;
            for (const auto& line : lines)
                for (const auto& v : line) best = std::min(best, distance(v, fp.location));
            CHECK(best <= cell * std::sqrt(2.0));
        }
    }
}

TEST_CASE("marching-squares interpolation bound") {
    // every contour vertex v satisfies |q(v)| <= max(|q|) over its cell corners
    SecantSystem sys(Polynomial{{0.15, -0.05, 0.0, -1.0 / 3.0, 0.0, 0.2}});
    const Rect b = Rect::square(-1.6, 1.6);
    const int n = 128;
    const double dx = b.width() / n, dy = b.height() / n;
    const auto lines = delta_s_contour(sys, b, n);
    REQUIRE(!lines.empty());
    for (const auto& line : lines)
        for (const auto& v : line) {
            const int ix = std::min(n - 1, std::max(0, static_cast<int>((v.x - b.x0) / dx)));
            const int iy = std::min(n - 1, std::max(0, static_cast<int>((v.y - b.y0) / dy)));
            double corner_max = 0.0;
            for (int cx = 0; cx <= 1; ++cx)
                for (int cy = 0; cy <= 1; ++cy)
                    corner_max = std::max(
                        corner_max, std::abs(sys.q(b.x0 + (ix + cx) * dx, b.y0 + (iy + cy) * dy)));
            CHECK(std::abs(sys.q(v.x, v.y)) <= corner_max + 1e-12);
        }
}

TEST_CASE("polyline CSV") {
    const std::vector<std::vector<PlanarPoint>> lines{{{0.0, 1.0}, {2.0, 3.0}}, {{4.0, 5.0}}};
    const std::string path = "lines_test.csv";
    write_polyline_csv(lines, path);
    std::ifstream in(path);
    std::string l;
    std::getline(in, l);
    CHECK(l == "curve_id,x,y");
    std::getline(in, l);
    CHECK(l == "0,0,1");
    std::getline(in, l);
    CHECK(l == "0,2,3");
    std::getline(in, l);
    CHECK(l == "1,4,5");
    std::remove(path.c_str());
}

TEST_CASE("golden render of T3 with overlays") {
    // Frozen FNV-1a hash of this artifact's own 64x64 render; protects the
    // palette, the raster layout and the overlay draw order.
    SecantSystem sys(chebyshev(3));
    const BasinGrid g = compute_grid(sys, Rect::square(-1.5, 1.5), 64, 64);
    Overlays ov;
    std::vector<std::vector<PlanarPoint>> ds = delta_s_contour(sys, g.bounds(), 64);
    ov.delta_s = ds;
    for (const auto& fp : sys.focal_points()) ov.focal_points.push_back(fp.location);
    const auto px = render_to_buffer(g, Palette::default_for(3), ov);
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint8_t b : px) {
        h ^= b;
        h *= 1099511628211ull;
    }
    CHECK(h == 0x8a76e9be01fc14e3ull);
}
