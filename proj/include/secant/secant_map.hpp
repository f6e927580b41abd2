#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "secant/polynomial.hpp"
#include "secant/types.hpp"

namespace secant {

struct CriticalPoint : Error {
    using Error::Error;
};
struct PoleSlope : Error {
    using Error::Error;
};
struct NotUnique : Error {
    using Error::Error;
};
struct DegenerateTarget : Error {
    using Error::Error;
};
struct SingularPoint : Error {
    using Error::Error;
};

struct FocalPoint {
    int i = 0, j = 0;          // distinct root indices
    PlanarPoint location;      // (alpha_i, alpha_j)
    double prefocal_x = 0.0;   // the prefocal line is x = alpha_j
};

struct OrbitResult {
    enum class Outcome { Converged, NonConverged, Singular };
    Outcome outcome = Outcome::NonConverged;
    int root_index = -1;
    int iterations = 0;
    PlanarPoint final_point;
    // Signs of q seen along the orbit before convergence: bit 1 = negative,
    // bit 2 = positive. On the immediate basin of alpha the sign stays equal
    // to sign(p'(alpha)) at every step (S^k(A*) is connected, contains the
    // fixed point and avoids delta_S), so a mixed or wrong-signed orbit
    // certifies a point outside A*.
    std::uint8_t q_sign_bits = 0;
};

struct SystemOptions {
    double sing_tol = 1e-12;      // relative band declaring delta_S proximity
    double conv_tol = 1e-10;      // default orbit convergence tolerance
    int max_iter = 500;           // default orbit iteration cap
    double escape_factor = 1e9;   // escape_bound = factor * (1 + max|root|)
};

// The secant map S(x,y) = (y, y - p(y)/q(x,y)) as a planar dynamical system,
// bundled with the roots of p and the focal-point machinery.
class SecantSystem {
  public:
    explicit SecantSystem(Polynomial poly, SystemOptions opts = {})
        : p_(std::move(poly)),
          dp_(p_.derivative()),
          ddp_(p_.derivative(2)),
          roots_(real_roots(p_)),
          opts_(opts) {
        escape_bound_ = opts_.escape_factor * (1.0 + roots_.max_abs());
    }

    const Polynomial& polynomial() const { return p_; }
    const Polynomial& dpoly() const { return dp_; }
    const RootSet& roots() const { return roots_; }
    double sing_tol() const { return opts_.sing_tol; }
    double conv_tol() const { return opts_.conv_tol; }
    int max_iter() const { return opts_.max_iter; }
    double escape_bound() const { return escape_bound_; }

    double q(double x, double y) const { return q_eval(p_, x, y); }
    double q_x(double x, double y) const { return q_x_eval(p_, x, y); }
    double q_y(double x, double y) const { return q_y_eval(p_, x, y); }

    bool near_singular(double qv, double py) const {
        return std::abs(qv) < opts_.sing_tol * (1.0 + std::abs(py));
    }

    // One secant step; nullopt when (x,y) is within the singular band of
    // delta_S (q too small relative to p(y)).
    std::optional<PlanarPoint> step(const PlanarPoint& pt) const {
        const double py = p_(pt.y);
        const double qv = q(pt.x, pt.y);
        if (near_singular(qv, py)) return std::nullopt;
        return PlanarPoint{pt.y, pt.y - py / qv};
    }

    OrbitResult orbit(PlanarPoint seed, int max_iter = -1, double tol = -1.0,
                      std::vector<PlanarPoint>* trace = nullptr) const {
        if (max_iter < 0) max_iter = opts_.max_iter;
        if (tol < 0.0) tol = opts_.conv_tol;
        OrbitResult res;
        PlanarPoint z = seed;
        if (trace) trace->push_back(z);
        for (int it = 0; it <= max_iter; ++it) {
            for (int i = 0; i < roots_.size(); ++i) {
                const double a = roots_[i];
                if (std::max(std::abs(z.x - a), std::abs(z.y - a)) <= tol) {
                    res.outcome = OrbitResult::Outcome::Converged;
                    res.root_index = i;
                    res.iterations = it;
                    res.final_point = z;
                    return res;
                }
            }
            if (it == max_iter) break;
            const double py = p_(z.y);
            const double qv = q(z.x, z.y);
            if (near_singular(qv, py)) {
                res.outcome = OrbitResult::Outcome::Singular;
                res.iterations = it;
                res.final_point = z;
                return res;
            }
            res.q_sign_bits |= qv < 0.0 ? 1 : 2;
            z = {z.y, z.y - py / qv};
            if (trace) trace->push_back(z);
            if (!std::isfinite(z.x) || !std::isfinite(z.y) || std::abs(z.x) > escape_bound_ ||
                std::abs(z.y) > escape_bound_) {
                res.outcome = OrbitResult::Outcome::NonConverged;
                res.iterations = it + 1;
                res.final_point = z;
                return res;
            }
        }
        res.outcome = OrbitResult::Outcome::NonConverged;
        res.iterations = max_iter;
        res.final_point = z;
        return res;
    }

    // Newton map N_p(x) = x - p(x)/p'(x); the secant map restricted to the
    // diagonal: S(x,x) = (x, N_p(x)).
    double newton_map(double x) const {
        const auto [f, df] = p_.eval_with_derivative(x);
        if (std::abs(df) < 1e-8 * p_.coeff_scale())
            throw CriticalPoint("newton_map: p' vanishes near x");
        return x - f / df;
    }

    // N_p'(x) = p(x) p''(x) / p'(x)^2.
    double newton_map_derivative(double x) const {
        const auto [f, df] = p_.eval_with_derivative(x);
        if (std::abs(df) < 1e-8 * p_.coeff_scale())
            throw CriticalPoint("newton_map_derivative: p' vanishes near x");
        return f * ddp_(x) / (df * df);
    }

    // All ordered pairs Q_{i,j} = (alpha_i, alpha_j), i != j.
    std::vector<FocalPoint> focal_points() const {
        std::vector<FocalPoint> out;
        for (int i = 0; i < roots_.size(); ++i)
            for (int j = 0; j < roots_.size(); ++j) {
                if (i == j) continue;
                out.push_back({i, j, {roots_[i], roots_[j]}, roots_[j]});
            }
        return out;
    }

    // Moebius correspondence between the approach slope m at Q_{i,j} and the
    // landing ordinate on the prefocal line x = alpha_j:
    //   y(m) = (alpha_j p'(a_i) - alpha_i p'(a_j) m) / (p'(a_i) - p'(a_j) m).
    // m may be +-infinity (landing at alpha_i).
    double slope_to_landing(const FocalPoint& fp, double m) const {
        const double di = dp_(roots_[fp.i]);
        const double dj = dp_(roots_[fp.j]);
        if (std::isinf(m)) return roots_[fp.i];
        const double den = di - dj * m;
        const double scale = std::abs(di) + std::abs(dj * m);
        if (std::abs(den) <= 1e-14 * scale)
            throw PoleSlope("slope_to_landing: landing at infinity");
        return (roots_[fp.j] * di - roots_[fp.i] * dj * m) / den;
    }

    // Inverse correspondence m(y) = p'(a_i)(alpha_j - y) / (p'(a_j)(alpha_i - y)).
    // Returns +-infinity for y = alpha_i.
    double landing_to_slope(const FocalPoint& fp, double y) const {
        const double di = dp_(roots_[fp.i]);
        const double dj = dp_(roots_[fp.j]);
        const double num = di * (roots_[fp.j] - y);
        const double den = dj * (roots_[fp.i] - y);
        if (den == 0.0)
            return num >= 0.0 ? std::numeric_limits<double>::infinity()
                              : -std::numeric_limits<double>::infinity();
        return num / den;
    }

    // phi_y0(x) = y0 - p(y0)/q(x,y0), the second component of S along the
    // horizontal line y = y0. nullopt at vertical asymptotes (q ~ 0).
    std::optional<double> phi(double y0, double x) const {
        const double py = p_(y0);
        const double qv = q(x, y0);
        if (near_singular(qv, py)) return std::nullopt;
        return y0 - py / qv;
    }

    // phi'(x) = p(y0) q_x(x,y0) / q(x,y0)^2.
    std::optional<double> phi_prime(double y0, double x) const {
        const double py = p_(y0);
        const double qv = q(x, y0);
        if (near_singular(qv, py)) return std::nullopt;
        return py * q_x(x, y0) / (qv * qv);
    }

    // Abscissas of the vertical asymptotes of phi_y0 inside [lo, hi]: the real
    // roots of x -> q(x, y0).
    std::vector<double> asymptotes_in_interval(double y0, double lo, double hi) const {
        const Polynomial qx = q_as_poly_in_x(p_, y0);
        if (qx.degree() < 1) return {};
        return real_roots(qx, std::make_pair(lo, hi), /*reject_multiple=*/false).roots;
    }

    // The unique solution of q_x(x, y) = 0 with x in (alpha_0, alpha_2) for
    // systems with one inflection point in that interval, taken over the
    // consecutive root triple around internal root `root_index`.
    double x_star(double y, int root_index = 1) const {
        if (!roots_.is_internal(root_index))
            throw NotUnique("x_star: root_index is not an internal root");
        const double lo = roots_[root_index - 1];
        const double hi = roots_[root_index + 1];
        // d/dx of q(., y): a polynomial of degree k-2.
        const Polynomial g = q_as_poly_in_x(p_, y).derivative();
        if (g.degree() < 0 || g.is_zero()) throw NotUnique("x_star: q_x identically zero");
        std::vector<double> rs =
            real_roots(g, std::make_pair(lo, hi), /*reject_multiple=*/false).roots;
        if (rs.size() >= 2) {
            // Merge numerically duplicated roots; keep the one with smaller |q_x|.
            std::vector<double> merged;
            for (double r : rs) {
                if (!merged.empty() && r - merged.back() < 1e-7) {
                    if (std::abs(q_x(r, y)) < std::abs(q_x(merged.back(), y))) merged.back() = r;
                } else {
                    merged.push_back(r);
                }
            }
            rs = std::move(merged);
        }
        if (rs.size() != 1)
            throw NotUnique("x_star: expected exactly one root of q_x in the interval, found " +
                            std::to_string(rs.size()));
        return rs[0];
    }

    // Analytic Jacobian of S at pt:
    //   DS = [[0, 1], [p(y) q_x / q^2, 1 - (p'(y) q - p(y) q_y)/q^2]].
    Mat2 jacobian(const PlanarPoint& pt) const {
        const double py = p_(pt.y);
        const double qv = q(pt.x, pt.y);
        if (near_singular(qv, py)) throw SingularPoint("jacobian: point within delta_S band");
        const double qx = q_x(pt.x, pt.y);
        const double qy = q_y(pt.x, pt.y);
        const double dpy = dp_(pt.y);
        const double q2 = qv * qv;
        return {0.0, 1.0, py * qx / q2, 1.0 - (dpy * qv - py * qy) / q2};
    }

    // Chain-rule product of DS along n steps; latest-step matrix leftmost.
    Mat2 jacobian_along_orbit(PlanarPoint pt, int n) const {
        Mat2 J = Mat2::identity();
        for (int k = 0; k < n; ++k) {
            J = jacobian(pt) * J;
            const auto next = step(pt);
            if (!next) throw SingularPoint("jacobian_along_orbit: orbit hit delta_S band");
            pt = *next;
        }
        return J;
    }

    // All preimages of target = (x1, y1) inside rect: the points (w, x1) with
    // S(w, x1) = (x1, y1), found as real roots of
    //   w -> q(w, x1) (x1 - y1) - p(x1),
    // each verified by a direct forward step.
    std::vector<PlanarPoint> preimages_in_rect(const PlanarPoint& target, const Rect& rect) const {
        const double x1 = target.x, y1 = target.y;
        const double px1 = p_(x1);
        const double scale = p_.coeff_scale();
        if (std::abs(px1) <= 1e-10 * scale && std::abs(x1 - y1) <= 1e-10)
            throw DegenerateTarget("preimages_in_rect: target is a root fixed point (alpha,alpha)");
        std::vector<PlanarPoint> out;
        if (x1 < rect.y0 || x1 > rect.y1) return out;  // preimages live on the line y = x1
        const Polynomial qw = q_as_poly_in_x(p_, x1);
        std::vector<double> g(qw.coeffs());
        for (double& c : g) c *= (x1 - y1);
        if (g.empty()) g.push_back(0.0);
        g[0] -= px1;
        const Polynomial gp{std::move(g)};
        if (gp.degree() < 1) return out;
        const auto cand = real_roots(gp, std::make_pair(rect.x0, rect.x1),
                                     /*reject_multiple=*/false);
        const double vtol = 1e-6 * (1.0 + std::abs(x1) + std::abs(y1));
        for (double w : cand.roots) {
            const auto img = step({w, x1});
            if (!img) continue;  // cleared-denominator artifact on delta_S
            if (std::abs(img->x - x1) <= vtol && std::abs(img->y - y1) <= vtol)
                out.push_back({w, x1});
        }
        return out;
    }

  private:
    Polynomial p_, dp_, ddp_;
    RootSet roots_;
    SystemOptions opts_;
    double escape_bound_ = 0.0;
};

// --- critical curves Theta (LC_{-1}) and Gamma (LC) --------------------------

struct ThetaGammaReport {
    std::vector<PlanarPoint> theta;  // (x*(y), y)
    std::vector<PlanarPoint> gamma;  // (y, N_p(x*(y)))
    double gamma0 = 0.0;             // the inflection point in (alpha_0, alpha_2)
    double xi = 0.0;                 // x*(xi) = alpha_1
    // Extremum structure of Gamma per the relative position of gamma0 and
    // alpha_1: -1 -> min at gamma0 / max at xi; +1 -> max at gamma0 / min at
    // xi; 0 -> strictly increasing with an inflection at (alpha_1, alpha_1).
    int pattern = 0;
};

inline ThetaGammaReport theta_gamma(const SecantSystem& sys, int samples, int root_index = 1) {
    const RootSet& roots = sys.roots();
    if (!roots.is_internal(root_index)) throw NotUnique("theta_gamma: internal root required");
    const double lo = roots[root_index - 1];
    const double hi = roots[root_index + 1];
    const double alpha1 = roots[root_index];
    const auto rep = critical_and_inflection_points(sys.polynomial(), lo, hi);
    if (!rep.one_inflection)
        throw NotUnique("theta_gamma: system does not satisfy the one-inflection hypothesis");
    ThetaGammaReport out;
    // The single interior inflection point.
    for (double g : rep.inflection.roots)
        if (g > lo && g < hi) out.gamma0 = g;
    const double h = (hi - lo) / (samples + 1);
    out.theta.reserve(static_cast<std::size_t>(samples));
    out.gamma.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double y = lo + (i + 1) * h;
        const double xs = sys.x_star(y, root_index);
        out.theta.push_back({xs, y});
        out.gamma.push_back({y, sys.newton_map(xs)});
    }
    // Solve x*(xi) = alpha_1 by bisection; Theta is strictly decreasing in y.
    double a = lo + h, b = hi - h;
    double fa = sys.x_star(a, root_index) - alpha1;
    for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = sys.x_star(mid, root_index) - alpha1;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    out.xi = 0.5 * (a + b);
    const double tol = 1e-9 * std::max(1.0, std::abs(hi - lo));
    out.pattern = std::abs(out.gamma0 - alpha1) <= tol ? 0 : (out.gamma0 < alpha1 ? -1 : +1);
    return out;
}

inline std::vector<PlanarPoint> theta_curve(const SecantSystem& sys, int samples,
                                            int root_index = 1) {
    return theta_gamma(sys, samples, root_index).theta;
}

inline std::vector<PlanarPoint> gamma_curve(const SecantSystem& sys, int samples,
                                            int root_index = 1) {
    return theta_gamma(sys, samples, root_index).gamma;
}

}  // namespace secant
