#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "secant/polynomial.hpp"
#include "secant/secant_map.hpp"
#include "secant/types.hpp"

namespace secant {

struct DegenerateQuadruple : Error {
    using Error::Error;
};
struct Incompatible : Error {
    using Error::Error;
};
struct SignPatternMismatch : Error {
    using Error::Error;
};
struct OrderingViolation : Error {
    using Error::Error;
};
struct VerificationFailed : Error {
    using Error::Error;
};

inline constexpr double kLambdaPositive = 0.61803398874989484820;   // (sqrt(5)-1)/2
inline constexpr double kLambdaNegative = -1.61803398874989484820;  // -(1+sqrt(5))/2

enum class CycleType { I, II, III, IV };

inline const char* to_string(CycleType t) {
    switch (t) {
        case CycleType::I: return "I";
        case CycleType::II: return "II";
        case CycleType::III: return "III";
        case CycleType::IV: return "IV";
    }
    return "?";
}

inline std::optional<CycleType> cycle_type_from_string(const std::string& s) {
    if (s == "I") return CycleType::I;
    if (s == "II") return CycleType::II;
    if (s == "III") return CycleType::III;
    if (s == "IV") return CycleType::IV;
    return std::nullopt;
}

// Cross ratio lambda_(a,b;c,d) = ((c-a)(d-b)) / ((c-b)(d-a)).
inline double cross_ratio(double a, double b, double c, double d) {
    const double den = (c - b) * (d - a);
    if (den == 0.0) throw DegenerateQuadruple("cross_ratio: c == b or d == a");
    return ((c - a) * (d - b)) / den;
}

// A 4-cycle (a,b) -> (b,c) -> (c,d) -> (d,a), canonically rotated so that
// a = min{a,b,c,d}.
struct FourCycle {
    std::array<double, 4> pts{};  // a, b, c, d in dynamical order
    double lambda = 0.0;
    CycleType type = CycleType::I;
    std::array<std::complex<double>, 2> multipliers{};
    double residual = 0.0;

    std::array<PlanarPoint, 4> orbit_points() const {
        return {PlanarPoint{pts[0], pts[1]}, {pts[1], pts[2]}, {pts[2], pts[3]}, {pts[3], pts[0]}};
    }
};

// Rotate (a,b,c,d) cyclically so the smallest value comes first; the cycle
// dynamics are unchanged.
inline std::array<double, 4> canonicalize(std::array<double, 4> q) {
    int k = 0;
    for (int i = 1; i < 4; ++i)
        if (q[static_cast<std::size_t>(i)] < q[static_cast<std::size_t>(k)]) k = i;
    std::rotate(q.begin(), q.begin() + k, q.end());
    return q;
}

// Ordering classification per Table 1 (a assumed minimal):
//   a<b<d<c -> I,  a<c<d<b -> II,  a<d<b<c -> III,  a<c<b<d -> IV,
//   a<b<c<d and a<d<c<b are incompatible with a 4-cycle.
inline CycleType classify_ordering(const std::array<double, 4>& q) {
    const double b = q[1], c = q[2], d = q[3];
    if (q[0] > std::min({b, c, d}))
        throw Incompatible("classify: quadruple not canonicalized (a must be minimal)");
    auto rank = [&](double v) { return 1 + (b < v) + (c < v) + (d < v); };
    const int rb = rank(b), rc = rank(c), rd = rank(d);
    if (rb == 1 && rc == 3 && rd == 2) return CycleType::I;
    if (rb == 3 && rc == 1 && rd == 2) return CycleType::II;
    if (rb == 2 && rc == 3 && rd == 1) return CycleType::III;
    if (rb == 2 && rc == 1 && rd == 3) return CycleType::IV;
    throw Incompatible("classify: ordering incompatible with a 4-cycle");
}

// Full classification, cross-checking the sign pattern of the p-values
// against the case analysis. Patterns, up to a global sign flip:
//   I: (+,+,-,-)   II: (+,-,+,+)   III: (+,+,+,+)   IV: (+,-,-,-).
inline CycleType classify(const std::array<double, 4>& quad, const std::array<double, 4>& pvals) {
    const auto q = canonicalize(quad);
    // p-values follow the rotation applied to the points.
    std::array<double, 4> pv = pvals;
    {
        int k = 0;
        for (int i = 1; i < 4; ++i)
            if (quad[static_cast<std::size_t>(i)] < quad[static_cast<std::size_t>(k)]) k = i;
        std::rotate(pv.begin(), pv.begin() + k, pv.end());
    }
    const CycleType t = classify_ordering(q);
    static constexpr std::array<std::array<int, 4>, 4> kPatterns{{
        {+1, +1, -1, -1},  // I
        {+1, -1, +1, +1},  // II
        {+1, +1, +1, +1},  // III
        {+1, -1, -1, -1},  // IV
    }};
    const auto& pat = kPatterns[static_cast<std::size_t>(t)];
    bool direct = true, flipped = true;
    for (int i = 0; i < 4; ++i) {
        const double v = pv[static_cast<std::size_t>(i)];
        if (v == 0.0) throw SignPatternMismatch("classify: p vanishes at a cycle point");
        direct &= (v > 0.0) == (pat[static_cast<std::size_t>(i)] > 0);
        flipped &= (v > 0.0) == (pat[static_cast<std::size_t>(i)] < 0);
    }
    if (!direct && !flipped)
        throw SignPatternMismatch("classify: p-value signs contradict the Table-1 case analysis");
    return t;
}

// --- periodic-orbit search ---------------------------------------------------
//
// A period-n orbit x_0 -> x_1 -> ... -> x_{n-1} of the underlying secant
// recurrence satisfies p(x_i)/p(x_{i+1}) = (x_{i+2}-x_i)/(x_{i+2}-x_{i+1});
// cleared of denominators this is the residual system
//   G_i = p(x_i)(x_{i+2}-x_{i+1}) - p(x_{i+1})(x_{i+2}-x_i) = 0  (indices mod n).

namespace detail {

template <int N>
struct NewtonKernel {
    const Polynomial& p;
    const Polynomial& dp;

    void eval(const std::array<double, N>& x, std::array<double, N>& g) const {
        for (int i = 0; i < N; ++i) {
            const int i1 = (i + 1) % N, i2 = (i + 2) % N;
            g[i] = p(x[i]) * (x[i2] - x[i1]) - p(x[i1]) * (x[i2] - x[i]);
        }
    }

    void jacobian(const std::array<double, N>& x, std::array<std::array<double, N>, N>& J) const {
        for (auto& row : J) row.fill(0.0);
        for (int i = 0; i < N; ++i) {
            const int i1 = (i + 1) % N, i2 = (i + 2) % N;
            const double pi = p(x[i]), pi1 = p(x[i1]);
            J[i][i] += dp(x[i]) * (x[i2] - x[i1]) + pi1;
            J[i][i1] += -pi - dp(x[i1]) * (x[i2] - x[i]);
            J[i][i2] += pi - pi1;
        }
    }
};

template <int N>
bool solve_linear(std::array<std::array<double, N>, N> A, std::array<double, N>& b) {
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-300) return false;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < N; ++r) {
            const double f = A[r][col] / A[col][col];
            for (int c = col; c < N; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int r = N - 1; r >= 0; --r) {
        for (int c = r + 1; c < N; ++c) b[r] -= A[r][c] * b[c];
        b[r] /= A[r][r];
    }
    return true;
}

template <int N>
std::optional<std::array<double, N>> polish_seed(const NewtonKernel<N>& kern,
                                                 std::array<double, N> x, double tol,
                                                 double diverge_bound) {
    std::array<double, N> g{}, step{};
    std::array<std::array<double, N>, N> J{};
    auto norm2 = [](const std::array<double, N>& v) {
        double s = 0.0;
        for (double t : v) s += t * t;
        return std::sqrt(s);
    };
    for (int it = 0; it < 80; ++it) {
        kern.eval(x, g);
        double gmax = 0.0;
        for (double t : g) gmax = std::max(gmax, std::abs(t));
        if (gmax < tol) return x;
        kern.jacobian(x, J);
        step = g;
        for (double& t : step) t = -t;
        if (!solve_linear<N>(J, step)) return std::nullopt;
        // Damping by step halving.
        const double g0 = norm2(g);
        double t = 1.0;
        std::array<double, N> xn{};
        bool accepted = false;
        for (int h = 0; h < 8; ++h) {
            for (int i = 0; i < N; ++i) xn[i] = x[i] + t * step[i];
            std::array<double, N> gn{};
            kern.eval(xn, gn);
            if (norm2(gn) < g0) {
                x = xn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted)
            for (int i = 0; i < N; ++i) x[i] += step[i];
        for (double v : x)
            if (!std::isfinite(v) || std::abs(v) > diverge_bound) return std::nullopt;
    }
    return std::nullopt;
}

// Seeds x with x[0] minimal over a density^N grid, Newton-polished and
// verified by direct iteration of S. Returns orbits as value tuples, first
// entry minimal, deduplicated on the sorted tuple (max-norm 1e-7).
template <int N>
std::vector<std::array<double, N>> find_period_orbits(const SecantSystem& sys, double lo, double hi,
                                                      int density, double newton_tol) {
    const NewtonKernel<N> kern{sys.polynomial(), sys.dpoly()};
    const double diverge = 1e6 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    std::vector<std::array<double, N>> found;
    std::vector<std::array<double, N>> keys;

    std::array<int, N> idx{};
    idx.fill(0);
    const double span = hi - lo;
    auto value = [&](int i) { return lo + span * (idx[i] + 0.5) / density; };
    while (true) {
        std::array<double, N> seed{};
        for (int i = 0; i < N; ++i) seed[i] = value(i);
        bool minimal_first = true;
        for (int i = 1; i < N; ++i) minimal_first &= seed[0] <= seed[i];
        if (minimal_first) {
            auto sol = polish_seed<N>(kern, seed, newton_tol, diverge);
            if (sol) {
                std::array<double, N> x = *sol;
                // Discard fixed points and any orbit with repeated entries.
                double minsep = std::abs(hi - lo);
                for (int i = 0; i < N; ++i)
                    for (int j = i + 1; j < N; ++j) minsep = std::min(minsep, std::abs(x[i] - x[j]));
                if (minsep > 1e-6) {
                    int k = 0;
                    for (int i = 1; i < N; ++i)
                        if (x[i] < x[k]) k = i;
                    std::rotate(x.begin(), x.begin() + k, x.end());
                    bool in_range = true;
                    for (double v : x) in_range &= v >= lo && v <= hi;
                    // Verify by direct iteration of S.
                    bool ok = in_range;
                    if (ok) {
                        PlanarPoint z{x[0], x[1]};
                        const double vscale = 1.0 + std::abs(hi) + std::abs(lo);
                        for (int s = 0; s < N && ok; ++s) {
                            const auto nxt = sys.step(z);
                            if (!nxt) {
                                ok = false;
                                break;
                            }
                            z = *nxt;
                            const double ex = x[(s + 1) % N], ey = x[(s + 2) % N];
                            const double err = std::max(std::abs(z.x - ex), std::abs(z.y - ey));
                            if (s + 1 < N ? err > 1e-6 * vscale : err > 1e-9 * vscale) ok = false;
                        }
                    }
                    if (ok) {
                        std::array<double, N> key = x;
                        std::sort(key.begin(), key.end());
                        bool dup = false;
                        for (const auto& k2 : keys) {
                            double d = 0.0;
                            for (int i = 0; i < N; ++i) d = std::max(d, std::abs(k2[i] - key[i]));
                            if (d < 1e-7) {
                                dup = true;
                                break;
                            }
                        }
                        if (!dup) {
                            keys.push_back(key);
                            found.push_back(x);
                        }
                    }
                }
            }
        }
        int c = N - 1;
        while (c >= 0 && ++idx[c] == density) idx[c--] = 0;
        if (c < 0) break;
    }
    std::sort(found.begin(), found.end());
    return found;
}

}  // namespace detail

// --- stability ---------------------------------------------------------------

struct Stability {
    Mat2 ds4;
    Eigen2 eig;
    enum class Label { Attractor, Repeller, Saddle, Marginal } label = Label::Marginal;
};

inline const char* to_string(Stability::Label l) {
    switch (l) {
        case Stability::Label::Attractor: return "attractor";
        case Stability::Label::Repeller: return "repeller";
        case Stability::Label::Saddle: return "saddle";
        case Stability::Label::Marginal: return "marginal";
    }
    return "?";
}

inline Stability stability(const SecantSystem& sys, const FourCycle& cycle) {
    Stability st;
    st.ds4 = sys.jacobian_along_orbit({cycle.pts[0], cycle.pts[1]}, 4);
    st.eig = eigen(st.ds4);
    const double m0 = std::abs(st.eig.values[0]);
    const double m1 = std::abs(st.eig.values[1]);
    if (m0 < 1.0 && m1 < 1.0)
        st.label = Stability::Label::Attractor;
    else if (m0 > 1.0 && m1 > 1.0)
        st.label = Stability::Label::Repeller;
    else if ((m0 > 1.0) != (m1 > 1.0))
        st.label = Stability::Label::Saddle;
    return st;
}

// --- 4-cycle search ----------------------------------------------------------

// All 4-cycles whose four orbit points lie in `rect`, found by damped Newton
// iteration on the cleared residual system from a coarse grid of seeds.
// Survivors are S^4-verified (closure residual <= 1e-9 scale), canonically
// rotated, classified, and equipped with cross ratio and multipliers.
inline std::vector<FourCycle> find_four_cycles(const SecantSystem& sys, const Rect& rect,
                                               int density = 24, double newton_tol = 1e-12) {
    const double lo = std::max(rect.x0, rect.y0);
    const double hi = std::min(rect.x1, rect.y1);
    std::vector<FourCycle> out;
    if (!(lo < hi)) return out;
    for (const auto& x : detail::find_period_orbits<4>(sys, lo, hi, density, newton_tol)) {
        FourCycle c;
        c.pts = x;
        PlanarPoint z{x[0], x[1]};
        bool closed = true;
        for (int s = 0; s < 4 && closed; ++s) {
            const auto nxt = sys.step(z);
            if (!nxt) closed = false;
            else z = *nxt;
        }
        if (!closed) continue;
        c.residual = std::max(std::abs(z.x - x[0]), std::abs(z.y - x[1]));
        c.lambda = cross_ratio(x[0], x[1], x[2], x[3]);
        std::array<double, 4> pv{};
        for (int i = 0; i < 4; ++i) pv[static_cast<std::size_t>(i)] = sys.polynomial()(x[static_cast<std::size_t>(i)]);
        c.type = classify(x, pv);
        c.multipliers = stability(sys, c).eig.values;
        bool inside = true;
        for (const auto& pt : c.orbit_points()) inside &= rect.contains(pt);
        if (inside) out.push_back(c);
    }
    return out;
}

// Period-2 and period-3 searches (the secant map has no such orbits in the
// plane; the search should come back empty after fixed points are discarded).
inline std::vector<std::array<double, 2>> find_period2_orbits(const SecantSystem& sys, double lo,
                                                              double hi, int density = 48) {
    return detail::find_period_orbits<2>(sys, lo, hi, density, 1e-12);
}
inline std::vector<std::array<double, 3>> find_period3_orbits(const SecantSystem& sys, double lo,
                                                              double hi, int density = 32) {
    return detail::find_period_orbits<3>(sys, lo, hi, density, 1e-12);
}

// --- constructive synthesis --------------------------------------------------

struct ConstructResult {
    Polynomial poly;
    NewtonForm newton;
    std::array<double, 4> points{};    // a, b, c, d in dynamical order
    std::array<double, 4> p_values{};  // p(a), p(b), p(c), p(d)
    double d = 0.0;
    FourCycle cycle;
};

namespace detail {

inline bool matches_type_ordering(CycleType t, const std::array<double, 4>& q) {
    try {
        return classify_ordering(canonicalize(q)) == t;
    } catch (const Incompatible&) {
        return false;
    }
}

}  // namespace detail

// Builds a cubic whose secant map has a 4-cycle of the requested type on the
// base points (a,b,c) with d solved from the cross ratio. `scale` fixes the
// free value p(d) of the homogeneous linear system (conventionally -1 for
// Type I).
inline ConstructResult construct_polynomial(CycleType type, std::array<double, 3> base,
                                            double scale) {
    const double a = base[0], b = base[1], c = base[2];
    const double lambda =
        (type == CycleType::I || type == CycleType::II) ? kLambdaPositive : kLambdaNegative;
    if (a == b || b == c || a == c) throw OrderingViolation("construct: base points not distinct");
    if (scale == 0.0) throw OrderingViolation("construct: scale must be nonzero");
    const double den = lambda * (c - b) - (c - a);
    if (den == 0.0) throw OrderingViolation("construct: cross-ratio equation degenerate");
    const double d = (lambda * (c - b) * a - b * (c - a)) / den;
    const std::array<double, 4> pts{a, b, c, d};
    if (!detail::matches_type_ordering(type, pts))
        throw OrderingViolation("construct: base/d ordering does not realize the requested type");

    // Chain the homogeneous ratio system from p(d) = scale.
    const double pd = scale;
    const double pc = pd * (a - c) / (a - d);
    const double pb = pc * (d - b) / (d - c);
    const double pa = pb * (c - a) / (c - b);
    // Consistency of the fourth equation p(d)/p(a) = (b-d)/(b-a).
    if (std::abs(pd / pa - (b - d) / (b - a)) > 1e-9 * (1.0 + std::abs(pd / pa)))
        throw VerificationFailed("construct: ratio system inconsistent");

    ConstructResult res;
    res.points = pts;
    res.p_values = {pa, pb, pc, pd};
    res.d = d;
    res.newton = newton_interpolate({a, b, c, d}, {pa, pb, pc, pd});
    res.poly = res.newton.to_polynomial();

    SecantSystem sys(res.poly);
    PlanarPoint z{a, b};
    const double vscale = 1.0 + std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d);
    for (int s = 0; s < 4; ++s) {
        const auto nxt = sys.step(z);
        if (!nxt) throw VerificationFailed("construct: cycle hits the singular band");
        z = *nxt;
    }
    const double residual = std::max(std::abs(z.x - a), std::abs(z.y - b));
    if (residual > 1e-9 * vscale)
        throw VerificationFailed("construct: S^4 closure residual too large");

    FourCycle cyc;
    cyc.pts = canonicalize(pts);
    cyc.residual = residual;
    cyc.lambda = cross_ratio(cyc.pts[0], cyc.pts[1], cyc.pts[2], cyc.pts[3]);
    std::array<double, 4> pv{};
    for (int i = 0; i < 4; ++i) pv[static_cast<std::size_t>(i)] = res.poly(cyc.pts[static_cast<std::size_t>(i)]);
    cyc.type = classify(cyc.pts, pv);
    if (cyc.type != type) throw VerificationFailed("construct: classified type mismatch");
    cyc.multipliers = stability(sys, cyc).eig.values;
    res.cycle = cyc;
    return res;
}

// Default base triples realizing each type with small integers (Type I uses
// 1,2,3 with p(d) = -1).
inline std::array<double, 3> default_base(CycleType t) {
    switch (t) {
        case CycleType::I: return {1.0, 2.0, 3.0};
        case CycleType::II: return {1.0, 3.0, 2.0};
        case CycleType::III: return {1.0, 2.0, 3.0};
        case CycleType::IV: return {1.0, 2.5, 2.0};
    }
    return {1.0, 2.0, 3.0};
}

inline double default_scale(CycleType t) {
    return (t == CycleType::I || t == CycleType::IV) ? -1.0 : 1.0;
}

}  // namespace secant
