// Command-line front end for the secant-map dynamics library.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "secant/acceptance.hpp"
#include "secant/secant.hpp"

using nlohmann::json;
using namespace secant;

namespace {

std::vector<double> parse_csv_doubles(const std::string& s, std::size_t expect,
                                      const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (expect != 0 && out.size() != expect)
        throw Error(std::string(what) + ": expected " + std::to_string(expect) + " values");
    return out;
}

json cycle_to_json(const FourCycle& c) {
    json j;
    j["points"] = json::array();
    for (const auto& p : c.orbit_points()) j["points"].push_back({p.x, p.y});
    j["base"] = {c.pts[0], c.pts[1], c.pts[2], c.pts[3]};
    j["lambda"] = c.lambda;
    j["type"] = to_string(c.type);
    j["multipliers"] = {{c.multipliers[0].real(), c.multipliers[0].imag()},
                        {c.multipliers[1].real(), c.multipliers[1].imag()}};
    j["residual"] = c.residual;
    return j;
}

const char* outcome_name(OrbitResult::Outcome o) {
    switch (o) {
        case OrbitResult::Outcome::Converged: return "converged";
        case OrbitResult::Outcome::NonConverged: return "non_converged";
        case OrbitResult::Outcome::Singular: return "singular";
    }
    return "?";
}

struct GridArgs {
    std::string bounds;
    int res = 512;
    int max_iter = -1;
    double tol = -1.0;
    int workers = 0;
};

Rect parse_bounds(const std::string& s) {
    const auto v = parse_csv_doubles(s, 4, "--bounds");
    return Rect{v[0], v[1], v[2], v[3]};
}

json summarize_grid(const BasinGrid& grid, const SecantSystem& sys) {
    std::vector<long> per_root(static_cast<std::size_t>(sys.roots().size()), 0);
    long nonconv = 0, singular = 0;
    for (const Cell& c : grid.cells()) {
        if (c.tag == CellTag::Root)
            ++per_root[static_cast<std::size_t>(c.root)];
        else if (c.tag == CellTag::Singular)
            ++singular;
        else
            ++nonconv;
    }
    const double total = static_cast<double>(grid.cells().size());
    json fr;
    for (int i = 0; i < sys.roots().size(); ++i)
        fr["root_" + std::to_string(i)] = per_root[static_cast<std::size_t>(i)] / total;
    fr["non_converged"] = nonconv / total;
    fr["singular"] = singular / total;
    json j;
    j["width"] = grid.width();
    j["height"] = grid.height();
    j["bounds"] = {grid.bounds().x0, grid.bounds().x1, grid.bounds().y0, grid.bounds().y1};
    j["fractions"] = fr;
    return j;
}

Overlays standard_overlays(const SecantSystem& sys, const BasinGrid& grid,
                           std::vector<std::vector<PlanarPoint>>& ds_store,
                           const ImmediateBasin* highlight, const FourCycle* cycle) {
    Overlays ov;
    ds_store = delta_s_contour(sys, grid.bounds(), std::max(grid.width(), 64));
    ov.delta_s = ds_store;
    for (const auto& fp : sys.focal_points()) ov.focal_points.push_back(fp.location);
    if (cycle)
        for (const auto& p : cycle->orbit_points()) ov.cycle_points.push_back(p);
    ov.highlight = highlight;
    return ov;
}

int run(int argc, char** argv) {
    CLI::App app{"secant-method plane dynamics: basins, focal points, 4-cycles"};
    app.require_subcommand(1);

    std::string poly_spec, seed_spec, out_path, ppm_path, interval_spec;

    // roots
    auto* roots_cmd = app.add_subcommand("roots", "print the real roots of p");
    roots_cmd->add_option("--poly", poly_spec, "coefficients a0,a1,... or cheb:k")->required();
    roots_cmd->add_option("--interval", interval_spec, "search interval lo,hi");

    // orbit
    auto* orbit_cmd = app.add_subcommand("orbit", "iterate the secant map from a seed");
    orbit_cmd->add_option("--poly", poly_spec, "polynomial spec")->required();
    orbit_cmd->add_option("--seed", seed_spec, "seed point x,y")->required();
    int orbit_max_iter = -1;
    double orbit_tol = -1.0;
    orbit_cmd->add_option("--max-iter", orbit_max_iter, "iteration cap");
    orbit_cmd->add_option("--tol", orbit_tol, "convergence tolerance");
    orbit_cmd->add_option("--out", out_path, "CSV trace path (iter,x,y)");

    // basin
    GridArgs ga;
    auto* basin_cmd = app.add_subcommand("basin", "classify a grid of seeds");
    basin_cmd->add_option("--poly", poly_spec, "polynomial spec")->required();
    basin_cmd->add_option("--bounds", ga.bounds, "x0,x1,y0,y1")->required();
    basin_cmd->add_option("--res", ga.res, "cells per side")->default_val(512);
    basin_cmd->add_option("--max-iter", ga.max_iter, "iteration cap");
    basin_cmd->add_option("--tol", ga.tol, "convergence tolerance");
    basin_cmd->add_option("--workers", ga.workers, "worker threads (0 = hardware)");
    basin_cmd->add_option("--out", out_path, "binary SBG1 dump path");
    basin_cmd->add_option("--ppm", ppm_path, "PPM image path");

    // immediate
    GridArgs ia;
    int im_root = 1, im_samples = 10000, im_density = 24;
    double im_floor = 0.01;
    auto* im_cmd = app.add_subcommand("immediate", "immediate-basin analysis");
    im_cmd->add_option("--poly", poly_spec, "polynomial spec")->required();
    im_cmd->add_option("--root", im_root, "root index")->required();
    im_cmd->add_option("--bounds", ia.bounds, "x0,x1,y0,y1 (default: R for internal roots)");
    im_cmd->add_option("--res", ia.res, "cells per side")->default_val(512);
    im_cmd->add_option("--max-iter", ia.max_iter, "iteration cap");
    im_cmd->add_option("--tol", ia.tol, "convergence tolerance");
    im_cmd->add_option("--workers", ia.workers, "worker threads");
    im_cmd->add_option("--hole-floor", im_floor, "hole area floor as a grid fraction");
    im_cmd->add_option("--samples", im_samples, "forward-invariance sample count");
    im_cmd->add_option("--cycle-density", im_density, "4-cycle search density");
    im_cmd->add_option("--out", out_path, "binary SBG1 dump path");
    im_cmd->add_option("--ppm", ppm_path, "PPM image path");

    // cycles find / construct
    auto* cycles_cmd = app.add_subcommand("cycles", "4-cycle search and synthesis");
    cycles_cmd->require_subcommand(1);
    auto* find_cmd = cycles_cmd->add_subcommand("find", "numerical 4-cycle search");
    find_cmd->add_option("--poly", poly_spec, "polynomial spec")->required();
    std::string rect_spec, bounds_spec;
    int find_density = 24;
    double find_newton_tol = 1e-12;
    find_cmd->add_option("--rect", rect_spec, "search interval lo,hi (all four values)");
    find_cmd->add_option("--bounds", bounds_spec, "search rect x0,x1,y0,y1");
    find_cmd->add_option("--density", find_density, "seeds per axis")->default_val(24);
    find_cmd->add_option("--newton-tol", find_newton_tol, "residual tolerance");

    auto* con_cmd = cycles_cmd->add_subcommand("construct", "build a cubic with a given cycle type");
    std::string type_spec = "I", base_spec;
    double con_scale = 0.0;
    bool scale_set = false;
    con_cmd->add_option("--type", type_spec, "I, II, III or IV")->required();
    con_cmd->add_option("--base", base_spec, "a,b,c (dynamical order)");
    con_cmd->add_option("--scale", con_scale, "free value p(d)")->each([&](const std::string&) {
        scale_set = true;
    });

    // curves
    GridArgs ca;
    int curve_root = 1, curve_samples = 1000;
    std::string ds_path;
    auto* curves_cmd = app.add_subcommand("curves", "Theta/Gamma and delta_S export");
    curves_cmd->add_option("--poly", poly_spec, "polynomial spec")->required();
    curves_cmd->add_option("--root", curve_root, "internal root index")->default_val(1);
    curves_cmd->add_option("--samples", curve_samples, "sample count")->default_val(1000);
    curves_cmd->add_option("--out", out_path, "CSV path for y,x_star,gamma");
    curves_cmd->add_option("--delta-s", ds_path, "polyline CSV path for the q = 0 contour");
    curves_cmd->add_option("--bounds", ca.bounds, "contour bounds x0,x1,y0,y1");
    curves_cmd->add_option("--res", ca.res, "contour resolution")->default_val(512);

    // verify
    app.add_subcommand("verify", "run the full acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);  // prints the message or help text
        return rc == 0 ? 0 : 1;     // usage errors exit 1
    }

    if (roots_cmd->parsed()) {
        const Polynomial p = parse_polynomial_spec(poly_spec);
        std::optional<std::pair<double, double>> interval;
        if (!interval_spec.empty()) {
            const auto v = parse_csv_doubles(interval_spec, 2, "--interval");
            interval = {v[0], v[1]};
        }
        const RootSet r = real_roots(p, interval);
        for (int i = 0; i < r.size(); ++i) std::printf(i ? " %.10g" : "%.10g", r[i]);
        std::printf("\n");
        return 0;
    }

    if (orbit_cmd->parsed()) {
        SecantSystem sys(parse_polynomial_spec(poly_spec));
        const auto sv = parse_csv_doubles(seed_spec, 2, "--seed");
        std::vector<PlanarPoint> trace;
        const OrbitResult r = sys.orbit({sv[0], sv[1]}, orbit_max_iter, orbit_tol, &trace);
        if (!out_path.empty()) {
            std::ofstream csv(out_path);
            if (!csv) throw Error("cannot open " + out_path);
            csv << "iter,x,y\n";
            char buf[96];
            for (std::size_t i = 0; i < trace.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, trace[i].x, trace[i].y);
                csv << buf;
            }
        }
        json j;
        j["outcome"] = outcome_name(r.outcome);
        j["root_index"] = r.root_index;
        j["iterations"] = r.iterations;
        j["final"] = {r.final_point.x, r.final_point.y};
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (basin_cmd->parsed()) {
        SecantSystem sys(parse_polynomial_spec(poly_spec));
        const Rect b = parse_bounds(ga.bounds);
        const BasinGrid grid =
            compute_grid(sys, b, ga.res, ga.res, ga.max_iter, ga.tol, ga.workers);
        if (!out_path.empty()) dump_sbg(grid, out_path);
        if (!ppm_path.empty()) {
            std::vector<std::vector<PlanarPoint>> ds;
            const Overlays ov = standard_overlays(sys, grid, ds, nullptr, nullptr);
            render_ppm(grid, Palette::default_for(sys.roots().size()), ov, ppm_path);
        }
        std::cout << summarize_grid(grid, sys).dump(2) << "\n";
        return 0;
    }

    if (im_cmd->parsed()) {
        SecantSystem sys(parse_polynomial_spec(poly_spec));
        const RootSet& roots = sys.roots();
        if (im_root < 0 || im_root >= roots.size()) throw Error("--root index out of range");
        Rect b;
        if (!ia.bounds.empty()) {
            b = parse_bounds(ia.bounds);
        } else if (roots.is_internal(im_root)) {
            b = Rect::square(roots[im_root - 1], roots[im_root + 1]);
        } else {
            throw Error("external root: pass --bounds explicitly");
        }
        const BasinGrid grid =
            compute_grid(sys, b, ia.res, ia.res, ia.max_iter, ia.tol, ia.workers);
        const ImmediateBasin ib = immediate_basin(grid, sys, im_root, im_floor);
        json j;
        j["root_index"] = im_root;
        j["bounds"] = {b.x0, b.x1, b.y0, b.y1};
        j["res"] = ia.res;
        j["mask_cells"] = ib.mask_cells;
        j["hole_count"] = ib.hole_count;
        j["hole_areas"] = ib.hole_areas;
        const auto cont = check_containment_in_R(ib, grid, sys);
        j["containment"] = {{"applicable", cont.applicable},
                            {"ok", cont.ok},
                            {"max_violation", cont.max_violation},
                            {"note", cont.note}};
        const FourCycle* type1 = nullptr;
        std::vector<FourCycle> cycles;
        if (roots.is_internal(im_root)) {
            const auto hex = check_hexagon_vertices(ib, grid, sys);
            j["hexagon"] = {{"distances_diagonals", hex.distances_diagonals}, {"pass", hex.pass}};
            const Rect R = Rect::square(roots[im_root - 1], roots[im_root + 1]);
            cycles = find_four_cycles(sys, R, im_density);
            for (const auto& c : cycles)
                if (c.type == CycleType::I) type1 = &c;
            json bc;
            bc["found"] = type1 != nullptr;
            if (type1) {
                bc["cycle"] = cycle_to_json(*type1);
                const double d = boundary_cycle_distance(ib, grid, *type1);
                bc["distance_diagonals"] = d;
                bc["pass"] = d <= 2.0;
            }
            j["boundary_cycle"] = bc;
        }
        const auto fwd = forward_invariance_check(ib, grid, sys, im_samples);
        j["forward_invariance"] = {{"applicable", fwd.applicable},
                                   {"samples", fwd.samples},
                                   {"violations", fwd.violations}};
        if (!out_path.empty()) dump_sbg(grid, out_path);
        if (!ppm_path.empty()) {
            std::vector<std::vector<PlanarPoint>> ds;
            const Overlays ov = standard_overlays(sys, grid, ds, &ib, type1);
            render_ppm(grid, Palette::default_for(roots.size()), ov, ppm_path);
        }
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (find_cmd->parsed()) {
        SecantSystem sys(parse_polynomial_spec(poly_spec));
        Rect rect;
        if (!rect_spec.empty()) {
            const auto v = parse_csv_doubles(rect_spec, 2, "--rect");
            rect = Rect::square(v[0], v[1]);
        } else if (!bounds_spec.empty()) {
            rect = parse_bounds(bounds_spec);
        } else {
            const double b = sys.roots().max_abs() + 1.5;
            rect = Rect::square(-b, b);
        }
        const auto cycles = find_four_cycles(sys, rect, find_density, find_newton_tol);
        json arr = json::array();
        for (const auto& c : cycles) {
            json cj = cycle_to_json(c);
            cj["stability"] = to_string(stability(sys, c).label);
            arr.push_back(cj);
        }
        std::cout << arr.dump(2) << "\n";
        return 0;
    }

    if (con_cmd->parsed()) {
        const auto type = cycle_type_from_string(type_spec);
        if (!type) throw Error("--type must be one of I, II, III, IV");
        std::array<double, 3> base = default_base(*type);
        if (!base_spec.empty()) {
            const auto v = parse_csv_doubles(base_spec, 3, "--base");
            base = {v[0], v[1], v[2]};
        }
        const double scale = scale_set ? con_scale : default_scale(*type);
        const auto res = construct_polynomial(*type, base, scale);
        SecantSystem sys(res.poly);
        json j;
        j["type"] = to_string(res.cycle.type);
        j["points"] = {res.points[0], res.points[1], res.points[2], res.points[3]};
        j["d"] = res.d;
        j["p_values"] = {res.p_values[0], res.p_values[1], res.p_values[2], res.p_values[3]};
        j["newton_nodes"] = res.newton.nodes;
        j["newton_coeffs"] = res.newton.coeffs;
        j["poly_coeffs"] = res.poly.coeffs();
        j["cycle"] = cycle_to_json(res.cycle);
        j["stability"] = to_string(stability(sys, res.cycle).label);
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (curves_cmd->parsed()) {
        SecantSystem sys(parse_polynomial_spec(poly_spec));
        const auto rep = theta_gamma(sys, curve_samples, curve_root);
        std::ostream* os = &std::cout;
        std::ofstream file;
        if (!out_path.empty()) {
            file.open(out_path);
            if (!file) throw Error("cannot open " + out_path);
            os = &file;
        }
        *os << "y,x_star,gamma\n";
        char buf[120];
        for (std::size_t i = 0; i < rep.theta.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", rep.theta[i].y, rep.theta[i].x,
                          rep.gamma[i].y);
            *os << buf;
        }
        if (!ds_path.empty()) {
            Rect b;
            if (!ca.bounds.empty()) {
                b = parse_bounds(ca.bounds);
            } else {
                const RootSet& r = sys.roots();
                b = Rect::square(r[curve_root - 1], r[curve_root + 1]);
            }
            write_polyline_csv(delta_s_contour(sys, b, ca.res), ds_path);
        }
        if (!out_path.empty()) {
            json j;
            j["gamma0"] = rep.gamma0;
            j["xi"] = rep.xi;
            j["pattern"] = rep.pattern;
            std::cout << j.dump(2) << "\n";
        }
        return 0;
    }

    // verify
    const auto results = acceptance::run_all(std::cout);
    for (const auto& r : results)
        if (!r.pass) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const secant::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
