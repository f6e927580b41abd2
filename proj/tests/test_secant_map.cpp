#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "secant/secant_map.hpp"

using namespace secant;
using Catch::Approx;

namespace {
const double kRt3Half = std::sqrt(3.0) / 2.0;

// Reference cubic carrying the Type-I cycle (1,2) -> (2,3) -> (3, d) -> (d, 1).
Polynomial cubic_I() {
    return NewtonForm{{1.0, 2.0, 3.0, 2.447213595},
                      {2.23606798, -1.11803390, -0.6909830, 3.27254249}}
        .to_polynomial();
}

Polynomial p2() { return Polynomial{{0.15, -0.05, 0.0, -1.0 / 3.0, 0.0, 0.2}}; }

std::mt19937_64 rng(987654321u);
}  // namespace

TEST_CASE("step: exact landing identities") {
    SecantSystem sys(chebyshev(3));
    std::uniform_real_distribution<double> xd(-1.4, 1.4);
    for (double alpha : sys.roots().roots) {
        for (int i = 0; i < 50; ++i) {
            const double x = xd(rng);
            if (std::abs(sys.polynomial()(x)) < 1e-6) continue;
            if (std::abs(sys.q(x, alpha)) < 1e-6) continue;
            const auto s1 = sys.step({x, alpha});
            REQUIRE(s1);
            CHECK(s1->x == Approx(alpha).margin(1e-12));
            CHECK(s1->y == Approx(alpha).margin(1e-12));
            const double y = xd(rng);
            if (std::abs(sys.q(alpha, y)) < 1e-6) continue;
            const auto s2 = sys.step({alpha, y});
            REQUIRE(s2);
            CHECK(s2->x == Approx(y).margin(1e-12));
            CHECK(s2->y == Approx(alpha).margin(1e-12));
        }
    }
}

TEST_CASE("step: hops along the reference Type-I cycle") {
    SecantSystem sys(cubic_I());
    const auto s1 = sys.step({1.0, 2.0});
    REQUIRE(s1);
    CHECK(s1->x == 2.0);
    CHECK(s1->y == Approx(3.0).margin(1e-5));
    const auto s2 = sys.step({3.0, 2.447213595});
    REQUIRE(s2);
    CHECK(s2->x == 2.447213595);
    CHECK(s2->y == Approx(1.0).margin(1e-6));
}

TEST_CASE("orbit outcomes") {
    SecantSystem sys(chebyshev(3));
    SECTION("near-fixed seed converges to the internal root") {
        const OrbitResult r = sys.orbit({1e-6, 1e-6});
        CHECK(r.outcome == OrbitResult::Outcome::Converged);
        CHECK(r.root_index == 1);
        CHECK(r.iterations <= 30);
    }
    SECTION("diagonal critical seed is singular") {
        const OrbitResult r = sys.orbit({0.5, 0.5});
        CHECK(r.outcome == OrbitResult::Outcome::Singular);
        CHECK(r.iterations <= 1);
    }
    SECTION("seeds on y = alpha_0 land in two steps") {
        const OrbitResult r = sys.orbit({0.3, -kRt3Half});
        CHECK(r.outcome == OrbitResult::Outcome::Converged);
        CHECK(r.root_index == 0);
        CHECK(r.iterations <= 2);
    }
}

TEST_CASE("newton map") {
    SecantSystem sys(chebyshev(3));
    SECTION("roots are fixed points") {
        for (double a : sys.roots().roots) CHECK(sys.newton_map(a) == Approx(a).margin(1e-14));
    }
    SECTION("diagonal of S is the Newton map") {
        std::uniform_real_distribution<double> xd(-1.3, 1.3);
        int done = 0;
        while (done < 100) {
            const double x = xd(rng);
            if (std::abs(sys.dpoly()(x)) < 1e-6) continue;
            const auto s = sys.step({x, x});
            REQUIRE(s);
            CHECK(s->y == Approx(sys.newton_map(x)).margin(1e-12 * (1.0 + std::abs(s->y))));
            ++done;
        }
    }
    SECTION("derivative formula vs central differences") {
        std::uniform_real_distribution<double> xd(-1.3, 1.3);
        int done = 0;
        while (done < 100) {
            const double x = xd(rng);
            if (std::abs(sys.dpoly()(x)) < 1e-2) continue;
            const double h = 1e-6;
            const double fd = (sys.newton_map(x + h) - sys.newton_map(x - h)) / (2 * h);
            CHECK(sys.newton_map_derivative(x) == Approx(fd).margin(1e-5 * (1.0 + std::abs(fd))));
            ++done;
        }
    }
    SECTION("critical point error") { CHECK_THROWS_AS(sys.newton_map(0.5), CriticalPoint); }
}

TEST_CASE("focal points and the slope/landing correspondence") {
    SecantSystem sys(chebyshev(3));
    const auto fps = sys.focal_points();
    REQUIRE(fps.size() == 6);
    for (const auto& fp : fps) {
        CHECK(std::abs(sys.polynomial()(fp.location.x)) <= 1e-10);
        CHECK(std::abs(sys.polynomial()(fp.location.y)) <= 1e-10);
        CHECK(fp.prefocal_x == sys.roots()[fp.j]);
    }
    const auto& q01 = *std::find_if(fps.begin(), fps.end(),
                                    [](const FocalPoint& f) { return f.i == 0 && f.j == 1; });
    CHECK(q01.prefocal_x == Approx(0.0).margin(1e-12));

    SECTION("limits of the Moebius map") {
        for (const auto& fp : fps) {
            CHECK(sys.slope_to_landing(fp, 0.0) == Approx(sys.roots()[fp.j]).margin(1e-12));
            CHECK(sys.slope_to_landing(fp, std::numeric_limits<double>::infinity()) ==
                  sys.roots()[fp.i]);
        }
    }
    SECTION("round trip on random slopes") {
        std::uniform_real_distribution<double> md(-10.0, 10.0);
        for (const auto& fp : fps) {
            for (int i = 0; i < 100; ++i) {
                const double m = md(rng);
                double y;
                try {
                    y = sys.slope_to_landing(fp, m);
                } catch (const PoleSlope&) {
                    continue;
                }
                const double back = sys.landing_to_slope(fp, y);
                CHECK(back == Approx(m).margin(1e-9 * (1.0 + std::abs(m))));
            }
        }
    }
}

TEST_CASE("phi: the one-dimensional slice of S") {
    SecantSystem sys(chebyshev(3));
    SECTION("phi at y0 = alpha_1 is constant") {
        for (double x : {-0.7, -0.3, 0.2, 0.8}) {
            const auto v = sys.phi(0.0, x);
            REQUIRE(v);
            CHECK(*v == Approx(0.0).margin(1e-14));
        }
    }
    SECTION("vertical asymptote abscissa for T3") {
        for (double y0 : {-0.8, -0.6, -0.45, -0.2, -0.05}) {
            const auto as = sys.asymptotes_in_interval(y0, -kRt3Half, 0.0);
            REQUIRE(as.size() == 1);
            const double expect = -(y0 + std::sqrt(3.0 * (1.0 - y0 * y0))) / 2.0;
            CHECK(as[0] == Approx(expect).margin(1e-8));
        }
    }
    SECTION("phi_prime vs finite differences") {
        std::uniform_real_distribution<double> xd(-1.2, 1.2);
        int done = 0;
        while (done < 100) {
            const double y0 = xd(rng), x = xd(rng);
            if (std::abs(sys.q(x, y0)) < 5e-2) continue;
            const double h = 1e-6;
            const auto f1 = sys.phi(y0, x + h), f0 = sys.phi(y0, x - h);
            const auto dp = sys.phi_prime(y0, x);
            if (!f1 || !f0 || !dp) continue;
            const double fd = (*f1 - *f0) / (2 * h);
            CHECK(*dp == Approx(fd).margin(1e-5 * (1.0 + std::abs(fd))));
            ++done;
        }
    }
}

TEST_CASE("x_star: the fold abscissa") {
    SecantSystem t3(chebyshev(3));
    SECTION("T3 closed form -y/2") {
        CHECK(t3.x_star(-0.5) == Approx(0.25).margin(1e-10));
        for (double y : {-0.7, -0.3, 0.1, 0.6}) CHECK(t3.x_star(y) == Approx(-y / 2).margin(1e-10));
        CHECK(t3.x_star(0.0) == Approx(0.0).margin(1e-10));
    }
    SECTION("tangency identity p'(x*) = q(x*, y)") {
        SecantSystem pI(cubic_I());
        const RootSet& r = pI.roots();
        std::uniform_real_distribution<double> yd(r[0] + 0.05, r[2] - 0.05);
        for (int i = 0; i < 100; ++i) {
            const double y = yd(rng);
            const double xs = pI.x_star(y);
            const double lhs = pI.dpoly()(xs);
            const double rhs = pI.q(xs, y);
            CHECK(lhs == Approx(rhs).margin(1e-9 * (1.0 + std::abs(rhs))));
        }
    }
}

TEST_CASE("Theta and Gamma critical curves") {
    SECTION("T3: Theta is the line x = -y/2 and Gamma is monotone with inflection") {
        SecantSystem sys(chebyshev(3));
        const auto rep = theta_gamma(sys, 400);
        for (const auto& pt : rep.theta) CHECK(pt.x == Approx(-pt.y / 2).margin(1e-9));
        for (std::size_t i = 0; i + 1 < rep.theta.size(); ++i)
            CHECK(rep.theta[i + 1].x < rep.theta[i].x);
        for (std::size_t i = 0; i + 1 < rep.gamma.size(); ++i)
            CHECK(rep.gamma[i + 1].y > rep.gamma[i].y);
        CHECK(rep.pattern == 0);
        CHECK(rep.xi == Approx(0.0).margin(1e-9));
        CHECK(rep.gamma0 == Approx(0.0).margin(1e-12));
    }
    SECTION("Type-I cubic: gamma_0 < alpha_1, min at gamma_0 and max at xi") {
        SecantSystem sys(cubic_I());
        const double alpha1 = sys.roots()[1];
        const auto rep = theta_gamma(sys, 400);
        CHECK(rep.pattern == -1);
        // Gamma contains (gamma_0, N_p(gamma_0)) and (xi, alpha_1).
        CHECK(sys.newton_map(sys.x_star(rep.xi)) == Approx(alpha1).margin(1e-8));
        const double g0 = rep.gamma0;
        const double at = sys.newton_map(sys.x_star(g0));
        for (double d : {1e-3, 5e-3}) {
            CHECK(sys.newton_map(sys.x_star(g0 + d)) >= at);
            CHECK(sys.newton_map(sys.x_star(g0 - d)) >= at);
            CHECK(sys.newton_map(sys.x_star(rep.xi + d)) <= alpha1 + 1e-12);
            CHECK(sys.newton_map(sys.x_star(rep.xi - d)) <= alpha1 + 1e-12);
        }
    }
    SECTION("Theta strictly decreasing over 1e4 samples") {
        for (auto poly : {chebyshev(3), cubic_I()}) {
            SecantSystem sys(poly);
            const auto theta = theta_curve(sys, 10000);
            bool decreasing = true;
            for (std::size_t i = 0; i + 1 < theta.size(); ++i)
                decreasing &= theta[i + 1].x < theta[i].x;
            CHECK(decreasing);
        }
    }
}

TEST_CASE("jacobian") {
    SECTION("matches central finite differences") {
        SecantSystem sys(chebyshev(3));
        std::uniform_real_distribution<double> xd(-1.5, 1.5);
        int done = 0;
        while (done < 100) {
            const PlanarPoint z{xd(rng), xd(rng)};
            if (std::abs(sys.q(z.x, z.y)) < 5e-2) continue;
            const double h = 1e-6;
            const auto fxp = sys.step({z.x + h, z.y}), fxm = sys.step({z.x - h, z.y});
            const auto fyp = sys.step({z.x, z.y + h}), fym = sys.step({z.x, z.y - h});
            if (!fxp || !fxm || !fyp || !fym) continue;
            const Mat2 J = sys.jacobian(z);
            const double fd21 = (fxp->y - fxm->y) / (2 * h);
            const double fd22 = (fyp->y - fym->y) / (2 * h);
            CHECK(J.a11 == 0.0);
            CHECK(J.a12 == 1.0);
            CHECK(J.a21 == Approx(fd21).margin(1e-4 * (1.0 + std::abs(fd21))));
            CHECK(J.a22 == Approx(fd22).margin(1e-4 * (1.0 + std::abs(fd22))));
            ++done;
        }
    }
    SECTION("DS^4 at (1,2) for the Type-I reference cubic") {
        SecantSystem sys(cubic_I());
        const Mat2 J = sys.jacobian_along_orbit({1.0, 2.0}, 4);
        CHECK(J.a11 == Approx(207.26).epsilon(0.01));
        CHECK(J.a12 == Approx(236.15).epsilon(0.01));
        CHECK(J.a21 == Approx(242.42).epsilon(0.01));
        CHECK(J.a22 == Approx(276.37).epsilon(0.01));
    }
    SECTION("fixed points are attracting") {
        for (auto poly : {chebyshev(3), p2()}) {
            SecantSystem sys(poly);
            for (double a : sys.roots().roots) {
                const auto eg = eigen(sys.jacobian({a, a}));
                CHECK(std::abs(eg.values[0]) < 1.0);
                CHECK(std::abs(eg.values[1]) < 1.0);
            }
        }
    }
}

namespace {
// Independent preimage count: scan phi_{x1} over (lo, hi) for crossings of
// y1, skipping asymptote subintervals (q changes sign).
int brute_preimage_count(const SecantSystem& sys, const PlanarPoint& target, double lo, double hi,
                         int n = 4000) {
    const double x1 = target.x, y1 = target.y;
    const double px1 = sys.polynomial()(x1);
    int count = 0;
    double wprev = lo + (hi - lo) * 1e-7;
    double qprev = sys.q(wprev, x1);
    auto gval = [&](double qv) { return (x1 - px1 / qv) - y1; };
    double gprev = gval(qprev);
    for (int i = 1; i <= n; ++i) {
        const double w = lo + (hi - lo) * (static_cast<double>(i) / (n + 1));
        const double qv = sys.q(w, x1);
        const double g = gval(qv);
        if ((qprev < 0) == (qv < 0) && (gprev < 0) != (g < 0)) ++count;
        wprev = w;
        qprev = qv;
        gprev = g;
    }
    return count;
}
}  // namespace

TEST_CASE("preimages") {
    SecantSystem t3(chebyshev(3));
    const Rect R = Rect::square(-kRt3Half, kRt3Half);

    SECTION("the root fixed point is a degenerate target") {
        CHECK_THROWS_AS(t3.preimages_in_rect({0.0, 0.0}, R), DegenerateTarget);
    }
    SECTION("T3 preimage count is 0..2, validated by the 1D scan") {
        std::uniform_real_distribution<double> xd(-kRt3Half + 1e-3, kRt3Half - 1e-3);
        int checked = 0;
        while (checked < 100) {
            const PlanarPoint target{xd(rng), xd(rng)};
            if (std::abs(t3.polynomial()(target.x)) < 1e-4) continue;
            const auto pre = t3.preimages_in_rect(target, R);
            CHECK(pre.size() <= 2);
            const int brute = brute_preimage_count(t3, target, -kRt3Half, kRt3Half);
            CHECK(static_cast<int>(pre.size()) == brute);
            for (const auto& w : pre) {
                const auto img = t3.step(w);
                REQUIRE(img);
                CHECK(img->x == Approx(target.x).margin(1e-9));
                CHECK(img->y == Approx(target.y).margin(1e-7));
            }
            ++checked;
        }
    }
    SECTION("1e3 random targets never exceed two preimages") {
        std::uniform_real_distribution<double> xd(-kRt3Half + 1e-3, kRt3Half - 1e-3);
        int checked = 0;
        while (checked < 1000) {
            const PlanarPoint target{xd(rng), xd(rng)};
            if (std::abs(t3.polynomial()(target.x)) < 1e-6) continue;
            CHECK(t3.preimages_in_rect(target, R).size() <= 2);
            ++checked;
        }
    }
    SECTION("p2 admits a target with three preimages") {
        SecantSystem sys(p2());
        const RootSet& r = sys.roots();
        const Rect R2 = Rect::square(r[0], r[2]);
        bool found = false;
        for (int i = 0; i < 40 && !found; ++i) {
            const double x1 = r[0] + (r[2] - r[0]) * (i + 0.5) / 40.0;
            if (std::abs(sys.polynomial()(x1)) < 1e-4) continue;
            for (int j = 0; j < 40 && !found; ++j) {
                const double y1 = r[0] + (r[2] - r[0]) * (j + 0.5) / 40.0;
                if (std::abs(x1 - y1) < 1e-6) continue;
                if (sys.preimages_in_rect({x1, y1}, R2).size() >= 3) found = true;
            }
        }
        CHECK(found);
    }
}
