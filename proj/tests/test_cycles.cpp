#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "secant/cycles.hpp"

using namespace secant;
using Catch::Approx;

namespace {
const double kRt3Half = std::sqrt(3.0) / 2.0;

Polynomial cubic_I() {
    return NewtonForm{{1.0, 2.0, 3.0, 2.447213595},
                      {2.23606798, -1.11803390, -0.6909830, 3.27254249}}
        .to_polynomial();
}
Polynomial cubic_II() {
    return NewtonForm{{1.0, 2.0, 3.0}, {2.818, -5.236, 4.3316, -16.106}}.to_polynomial();
}
Polynomial cubic_III() {
    return NewtonForm{{1.0, 2.0, 3.0}, {2.236, -1.118, 1.809, -0.4774}}.to_polynomial();
}
Polynomial cubic_IV() {
    return NewtonForm{{1.0, 2.0, 3.0}, {1.618, -2.118, 0.809, -1.7135}}.to_polynomial();
}

std::mt19937_64 rng(424242u);
}  // namespace

TEST_CASE("cross ratio") {
    CHECK(cross_ratio(1.0, 2.0, 3.0, 2.447213595) == Approx(0.6180339887).margin(1e-8));
    CHECK_THROWS_AS(cross_ratio(0.0, 1.0, 1.0, 2.0), DegenerateQuadruple);

    SECTION("exchange identities on random quadruples") {
        std::uniform_real_distribution<double> xd(-5.0, 5.0);
        int done = 0;
        while (done < 1000) {
            const double a = xd(rng), b = xd(rng), c = xd(rng), d = xd(rng);
            if (std::abs(c - b) < 1e-3 || std::abs(d - a) < 1e-3 || std::abs(c - d) < 1e-3 ||
                std::abs(b - a) < 1e-3)
                continue;
            const double lam = cross_ratio(a, b, c, d);
            if (std::abs(lam - 1.0) < 1e-6) continue;
            CHECK(cross_ratio(a, d, c, b) ==
                  Approx(lam / (lam - 1.0)).margin(1e-10 * (1.0 + std::abs(lam / (lam - 1.0)))));
            CHECK(cross_ratio(d, c, b, a) == Approx(lam).margin(1e-10 * (1.0 + std::abs(lam))));
            ++done;
        }
    }
}

TEST_CASE("classification by ordering") {
    SECTION("the reference Type-I cycle") {
        const std::array<double, 4> q{1.0, 2.0, 3.0, 2.447213595};
        std::array<double, 4> pv{};
        for (int i = 0; i < 4; ++i) pv[i] = cubic_I()(q[i]);
        CHECK(classify(q, pv) == CycleType::I);
    }
    SECTION("incompatible orderings") {
        CHECK_THROWS_AS(classify_ordering({1.0, 2.0, 3.0, 4.0}), Incompatible);  // a<b<c<d
        CHECK_THROWS_AS(classify_ordering({1.0, 4.0, 3.0, 2.0}), Incompatible);  // a<d<c<b
    }
    SECTION("exhaustive over the six orderings with fixed min") {
        // values 1<2<3<4 distributed over (b,c,d) in all permutations
        struct Case {
            std::array<double, 4> q;
            const char* expect;  // "I".."IV" or "star"
        };
        const Case cases[] = {
            {{1, 2, 3, 4}, "star"},  // a<b<c<d
            {{1, 2, 4, 3}, "I"},     // a<b<d<c
            {{1, 4, 2, 3}, "II"},    // a<c<d<b
            {{1, 3, 4, 2}, "III"},   // a<d<b<c
            {{1, 3, 2, 4}, "IV"},    // a<c<b<d
            {{1, 4, 3, 2}, "star"},  // a<d<c<b
        };
        for (const auto& c : cases) {
            if (std::string(c.expect) == "star") {
                CHECK_THROWS_AS(classify_ordering(c.q), Incompatible);
            } else {
                CHECK(std::string(to_string(classify_ordering(c.q))) == c.expect);
            }
        }
    }
    SECTION("Type III carries a one-signed p-pattern") {
        // The cycle of the Type-III reference cubic: all p-values share one sign.
        const std::array<double, 4> q{1.0, 2.0, 3.0, 1.5527864045};
        std::array<double, 4> pv{};
        for (int i = 0; i < 4; ++i) pv[i] = cubic_III()(q[i]);
        for (double v : pv) CHECK(v > 0.0);
        CHECK(classify(q, pv) == CycleType::III);
    }
    SECTION("sign-pattern mismatch is flagged") {
        // Type-I ordering but p-values violating the (+,+,-,-) pattern.
        CHECK_THROWS_AS(classify({1.0, 2.0, 4.0, 3.0}, {1.0, -1.0, 1.0, -1.0}),
                        SignPatternMismatch);
    }
    SECTION("canonical renaming rotates the cycle") {
        // Same cycle as p^I's, entered with b as the lead point.
        const std::array<double, 4> rotated{2.0, 3.0, 2.447213595, 1.0};
        std::array<double, 4> pv{};
        for (int i = 0; i < 4; ++i) pv[i] = cubic_I()(rotated[i]);
        CHECK(classify(rotated, pv) == CycleType::I);
        CHECK(canonicalize(rotated) == std::array<double, 4>{1.0, 2.0, 3.0, 2.447213595});
    }
}

TEST_CASE("find_four_cycles") {
    SECTION("recovers the reference Type-I cycle") {
        SecantSystem sys(cubic_I());
        const auto cycles = find_four_cycles(sys, Rect::square(0.5, 3.5), 20);
        bool found = false;
        for (const auto& c : cycles) {
            if (std::abs(c.pts[0] - 1.0) < 1e-6 && std::abs(c.pts[1] - 2.0) < 1e-6 &&
                std::abs(c.pts[2] - 3.0) < 1e-6 && std::abs(c.pts[3] - 2.447213595) < 1e-6) {
                found = true;
                CHECK(c.type == CycleType::I);
            }
            CHECK(c.residual <= 1e-9 * 4.5);
        }
        CHECK(found);
    }
    SECTION("every returned cycle has a golden cross ratio") {
        for (auto poly : {cubic_I(), cubic_II(), cubic_III(), cubic_IV()}) {
            SecantSystem sys(poly);
            const auto cycles = find_four_cycles(sys, Rect::square(-1.0, 4.0), 16);
            CHECK(!cycles.empty());
            for (const auto& c : cycles) {
                const bool golden = std::abs(c.lambda - kLambdaPositive) < 1e-8 ||
                                    std::abs(c.lambda - kLambdaNegative) < 1e-8;
                CHECK(golden);
                CHECK(std::abs(c.lambda * c.lambda / (1.0 - c.lambda) - 1.0) <= 1e-8);
            }
        }
    }
    SECTION("each reference cubic carries a cycle of its type") {
        struct Case {
            Polynomial poly;
            CycleType type;
        };
        const Case cases[] = {{cubic_II(), CycleType::II},
                              {cubic_III(), CycleType::III},
                              {cubic_IV(), CycleType::IV}};
        for (const auto& cs : cases) {
            SecantSystem sys(cs.poly);
            const auto cycles = find_four_cycles(sys, Rect::square(-1.0, 4.0), 16);
            bool match = false;
            for (const auto& c : cycles) match |= c.type == cs.type;
            CHECK(match);
        }
    }
    SECTION("T3 has a Type-I cycle inside R") {
        SecantSystem sys(chebyshev(3));
        const auto cycles = find_four_cycles(sys, Rect::square(-kRt3Half, kRt3Half), 16);
        bool found = false;
        for (const auto& c : cycles)
            if (c.type == CycleType::I) {
                found = true;
                CHECK(c.pts[0] == Approx(-0.6881909602).margin(1e-6));
                CHECK(c.pts[1] == Approx(-0.1624598481).margin(1e-6));
            }
        CHECK(found);
    }
    SECTION("turn/flip sign structure of y-x along the orbit") {
        // Types I and III turn around the diagonal ((+,+,-,-) pattern up to
        // rotation); types II and IV flip at every step.
        for (auto poly : {cubic_I(), cubic_II(), cubic_III(), cubic_IV()}) {
            SecantSystem sys(poly);
            for (const auto& c : find_four_cycles(sys, Rect::square(-1.0, 4.0), 16)) {
                const auto pts = c.orbit_points();
                std::array<int, 4> sign{};
                for (int i = 0; i < 4; ++i) sign[i] = pts[i].y > pts[i].x ? 1 : -1;
                int flips = 0;
                for (int i = 0; i < 4; ++i) flips += sign[i] != sign[(i + 1) % 4];
                if (c.type == CycleType::I || c.type == CycleType::III)
                    CHECK(flips == 2);
                else
                    CHECK(flips == 4);
            }
        }
    }
}

TEST_CASE("construct_polynomial") {
    SECTION("Type I reproduces the reference values") {
        const auto res = construct_polynomial(CycleType::I, {1.0, 2.0, 3.0}, -1.0);
        CHECK(res.d == Approx(2.447213595).margin(1e-8));
        CHECK(res.p_values[0] == Approx(2.23606798).margin(1e-6));
        CHECK(res.p_values[1] == Approx(1.118033989).margin(1e-6));
        CHECK(res.p_values[2] == Approx(-1.381966011).margin(1e-6));
        CHECK(res.p_values[3] == -1.0);
        CHECK(res.newton.coeffs[0] == Approx(2.23606798).margin(1e-6));
        CHECK(res.newton.coeffs[1] == Approx(-1.11803390).margin(1e-6));
        CHECK(res.newton.coeffs[2] == Approx(-0.6909830).margin(1e-6));
        CHECK(res.newton.coeffs[3] == Approx(3.27254249).margin(1e-6));
        CHECK(res.cycle.residual <= 1e-9 * 4.5);
        CHECK(res.cycle.type == CycleType::I);
        CHECK(res.cycle.lambda == Approx(kLambdaPositive).margin(1e-12));
    }
    SECTION("Type III with base (1,2,3) and scale +1 matches the reference cubic") {
        const auto res = construct_polynomial(CycleType::III, {1.0, 2.0, 3.0}, 1.0);
        CHECK(res.d == Approx(1.5527864045).margin(1e-8));
        CHECK(res.newton.coeffs[0] == Approx(2.236).margin(1e-3));
        CHECK(res.newton.coeffs[1] == Approx(-1.118).margin(1e-3));
        CHECK(res.newton.coeffs[2] == Approx(1.809).margin(1e-3));
        CHECK(res.newton.coeffs[3] == Approx(-0.4774).margin(1e-3));
        CHECK(res.cycle.type == CycleType::III);
    }
    SECTION("Type IV with base (1,sqrt5,2) matches the reference cubic") {
        const double rt5 = std::sqrt(5.0);
        const auto res = construct_polynomial(CycleType::IV, {1.0, rt5, 2.0}, -1.0);
        CHECK(res.d == Approx(3.0).margin(1e-9));
        const Polynomial printed = cubic_IV();
        for (int i = 0; i <= 3; ++i)
            CHECK(res.poly.coeff(i) == Approx(printed.coeff(i)).margin(2e-3));
        CHECK(res.cycle.type == CycleType::IV);
    }
    SECTION("all four default constructions verify and close") {
        for (CycleType t : {CycleType::I, CycleType::II, CycleType::III, CycleType::IV}) {
            const auto res = construct_polynomial(t, default_base(t), default_scale(t));
            CHECK(res.cycle.type == t);
            CHECK(res.cycle.residual <= 1e-9 * 10.0);
            const double expect_lambda =
                (t == CycleType::I || t == CycleType::II) ? kLambdaPositive : kLambdaNegative;
            CHECK(res.cycle.lambda == Approx(expect_lambda).margin(1e-9));
        }
    }
    SECTION("round trip: construct then find") {
        const auto res = construct_polynomial(CycleType::I, {1.0, 2.0, 3.0}, -1.0);
        SecantSystem sys(res.poly);
        const auto cycles = find_four_cycles(sys, Rect::square(0.5, 3.5), 20);
        bool found = false;
        for (const auto& c : cycles) {
            double err = 0.0;
            for (int i = 0; i < 4; ++i) err = std::max(err, std::abs(c.pts[i] - res.cycle.pts[i]));
            if (err < 1e-6) found = true;
        }
        CHECK(found);
    }
    SECTION("ordering violations are rejected") {
        // (1,3,2) with lambda > 0 realizes the Type-II ordering, not Type I.
        CHECK_THROWS_AS(construct_polynomial(CycleType::I, {1.0, 3.0, 2.0}, -1.0),
                        OrderingViolation);
        CHECK_THROWS_AS(construct_polynomial(CycleType::IV, {1.0, 3.0, 2.0}, -1.0),
                        OrderingViolation);
        CHECK_THROWS_AS(construct_polynomial(CycleType::I, {1.0, 1.0, 3.0}, -1.0),
                        OrderingViolation);
    }
}

TEST_CASE("stability of the reference Type-I cycle") {
    SecantSystem sys(cubic_I());
    const auto cycles = find_four_cycles(sys, Rect::square(0.5, 3.5), 20);
    const FourCycle* cyc = nullptr;
    for (const auto& c : cycles)
        if (c.type == CycleType::I) cyc = &c;
    REQUIRE(cyc != nullptr);
    const Stability st = stability(sys, *cyc);
    REQUIRE(st.eig.real);
    const double l1 = st.eig.values[0].real();
    const double l2 = st.eig.values[1].real();
    CHECK(l1 == Approx(483.55).epsilon(0.01));
    CHECK(l2 == Approx(0.054).margin(0.005));
    CHECK(st.label == Stability::Label::Saddle);

    SECTION("eigenvector directions match the reference up to sign") {
        const PlanarPoint refs[2] = {{-0.65, -0.76}, {-0.75, 0.66}};
        for (int k = 0; k < 2; ++k) {
            const PlanarPoint v = st.eig.vectors[k];
            const PlanarPoint r = refs[k];
            const double direct = std::max(std::abs(v.x - r.x), std::abs(v.y - r.y));
            const double flipped = std::max(std::abs(v.x + r.x), std::abs(v.y + r.y));
            CHECK(std::min(direct, flipped) <= 0.02);
        }
    }
    SECTION("eigenvalue product equals the determinant") {
        const double prod = (st.eig.values[0] * st.eig.values[1]).real();
        CHECK(prod == Approx(st.ds4.det()).epsilon(1e-8));
    }
}

TEST_CASE("no periodic orbits of period two or three") {
    for (auto poly : {chebyshev(3), cubic_I(),
                      Polynomial{{0.15, -0.05, 0.0, -1.0 / 3.0, 0.0, 0.2}}}) {
        SecantSystem sys(poly);
        const double b = sys.roots().max_abs() + 1.5;
        CHECK(find_period2_orbits(sys, -b, b, 48).empty());
        CHECK(find_period3_orbits(sys, -b, b, 24).empty());
    }
}
