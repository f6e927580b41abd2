#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "secant/types.hpp"

namespace secant {

struct MultipleRootDetected : Error {
    using Error::Error;
};
struct DegreeZero : Error {
    using Error::Error;
};
struct DuplicateNodes : Error {
    using Error::Error;
};

// Real univariate polynomial, coefficients stored ascending (a_0 first).
// Coefficients are kept exactly as given; no monic rescaling.
class Polynomial {
  public:
    static constexpr int kMaxDegree = 64;

    Polynomial() : coeffs_{0.0} {}

    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
        if (coeffs_.empty()) coeffs_.push_back(0.0);
        if (degree() > kMaxDegree) throw Error("polynomial degree exceeds supported cap (64)");
    }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    double coeff(int i) const {
        return (i >= 0 && i < static_cast<int>(coeffs_.size())) ? coeffs_[i] : 0.0;
    }

    double operator()(double x) const {
        double y = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) y = y * x + *it;
        return y;
    }

    // Horner pass evaluating p and p' together.
    std::pair<double, double> eval_with_derivative(double x) const {
        double y = 0.0, dy = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            dy = dy * x + y;
            y = y * x + *it;
        }
        return {y, dy};
    }

    Polynomial derivative(int order = 1) const {
        std::vector<double> c = coeffs_;
        for (int o = 0; o < order; ++o) {
            if (c.size() <= 1) return Polynomial{{0.0}};
            std::vector<double> d(c.size() - 1);
            for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
            c = std::move(d);
        }
        return Polynomial{std::move(c)};
    }

    // Largest coefficient magnitude; scale factor for residual tolerances.
    double coeff_scale() const {
        double s = 0.0;
        for (double c : coeffs_) s = std::max(s, std::abs(c));
        return std::max(1.0, s);
    }

    // Cauchy bound: all real roots lie in [-B, B].
    double root_bound() const {
        const double ak = std::abs(coeffs_.back());
        if (ak == 0.0) return 1.0;
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < coeffs_.size(); ++i) m = std::max(m, std::abs(coeffs_[i]));
        return 1.0 + m / ak;
    }

  private:
    std::vector<double> coeffs_;
};

struct RootSet {
    std::vector<double> roots;  // strictly increasing, all simple

    int size() const { return static_cast<int>(roots.size()); }
    double operator[](int i) const { return roots[static_cast<std::size_t>(i)]; }
    bool is_internal(int i) const { return i > 0 && i + 1 < size(); }
    double max_abs() const {
        double m = 0.0;
        for (double r : roots) m = std::max(m, std::abs(r));
        return m;
    }
    int nearest_index(double x) const {
        int best = -1;
        double bd = 0.0;
        for (int i = 0; i < size(); ++i) {
            const double d = std::abs(roots[static_cast<std::size_t>(i)] - x);
            if (best < 0 || d < bd) best = i, bd = d;
        }
        return best;
    }
};

namespace detail {

// Running magnitude of the Horner evaluation; |p(x)| below ~1e-12 of this is
// numerically zero.
inline double eval_magnitude(const Polynomial& p, double x) {
    double s = 1.0, xp = 1.0;
    for (double c : p.coeffs()) {
        s += std::abs(c) * std::abs(xp);
        xp *= x;
    }
    return s;
}

inline double residual_tol(const Polynomial& p, double x) { return 1e-12 * eval_magnitude(p, x); }

inline double bisect_refine(const Polynomial& p, double lo, double hi, double flo) {
    // Bisection to absolute width 1e-13 (relative for large roots), then one
    // Newton polish clamped to the bracket.
    const double width_tol = 1e-13 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    while (hi - lo > width_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = p(mid);
        if (fm == 0.0) return mid;
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double r = 0.5 * (lo + hi);
    const auto [f, df] = p.eval_with_derivative(r);
    if (df != 0.0) {
        const double step = f / df;
        const double polished = r - step;
        if (polished > lo && polished < hi) r = polished;
    }
    return r;
}

// All real roots in [lo, hi] by recursive critical-point subdivision and
// sign-change bracketing. Does not reject multiple roots; even-multiplicity
// roots without a sign change are not found.
inline std::vector<double> real_roots_bracketed(const Polynomial& p, double lo, double hi) {
    std::vector<double> out;
    if (p.degree() <= 0 || lo >= hi) return out;
    if (p.degree() == 1) {
        const double r = -p.coeff(0) / p.coeff(1);
        if (r >= lo && r <= hi) out.push_back(r);
        return out;
    }
    std::vector<double> breaks{lo, hi};
    for (double c : real_roots_bracketed(p.derivative(), lo, hi)) breaks.push_back(c);
    std::sort(breaks.begin(), breaks.end());

    auto push = [&](double r) {
        if (!out.empty() && r - out.back() < 1e-12 * std::max(1.0, std::abs(r))) return;
        out.push_back(r);
    };
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        const double fa = p(a), fb = p(b);
        if (i == 0 && std::abs(fa) <= residual_tol(p, a)) push(a);
        if (std::abs(fb) <= residual_tol(p, b)) {
            push(b);
            continue;
        }
        if (std::abs(fa) <= residual_tol(p, a)) continue;
        if ((fa < 0.0) != (fb < 0.0)) push(bisect_refine(p, a, b, fa));
    }
    return out;
}

}  // namespace detail

// All real roots of p in `interval` (default: the Cauchy bound), refined to
// ~1e-12 residual. Throws MultipleRootDetected when p' vanishes at a root.
inline RootSet real_roots(const Polynomial& p,
                          std::optional<std::pair<double, double>> interval = std::nullopt,
                          bool reject_multiple = true) {
    if (p.is_zero()) throw DegreeZero("real_roots: polynomial is identically zero");
    if (p.degree() == 0) throw DegreeZero("real_roots: degree-zero polynomial has no roots");
    double lo, hi;
    if (interval) {
        lo = interval->first;
        hi = interval->second;
    } else {
        hi = p.root_bound();
        lo = -hi;
    }
    RootSet rs{detail::real_roots_bracketed(p, lo, hi)};
    if (reject_multiple) {
        const double scale = p.coeff_scale();
        const Polynomial dp = p.derivative();
        for (double r : rs.roots) {
            if (std::abs(dp(r)) < 1e-8 * (1.0 + std::abs(r) * scale))
                throw MultipleRootDetected("real_roots: derivative vanishes at root " +
                                           std::to_string(r));
        }
    }
    return rs;
}

struct CriticalInflectionReport {
    RootSet critical;    // roots of p' in the interval
    RootSet inflection;  // roots of p'' in the interval
    bool one_inflection = false;
};

// Roots of p' and p'' in the open interval; `one_inflection` reports whether
// exactly one root of p'' lies strictly inside.
inline CriticalInflectionReport critical_and_inflection_points(const Polynomial& p, double lo,
                                                               double hi) {
    if (!(lo < hi)) throw Error("critical_and_inflection_points: degenerate interval");
    CriticalInflectionReport rep;
    rep.critical = RootSet{detail::real_roots_bracketed(p.derivative(), lo, hi)};
    rep.inflection = RootSet{detail::real_roots_bracketed(p.derivative(2), lo, hi)};
    int inside = 0;
    const double edge = 1e-10 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    for (double g : rep.inflection.roots)
        if (g > lo + edge && g < hi - edge) ++inside;
    rep.one_inflection = inside == 1;
    return rep;
}

inline bool one_inflection(const Polynomial& p, double lo, double hi) {
    return critical_and_inflection_points(p, lo, hi).one_inflection;
}

// Chebyshev polynomial of the first kind, exact integer coefficients.
inline Polynomial chebyshev(int k) {
    std::vector<double> t0{1.0}, t1{0.0, 1.0};
    if (k <= 0) return Polynomial{t0};
    if (k == 1) return Polynomial{t1};
    for (int i = 1; i < k; ++i) {
        std::vector<double> t2(t1.size() + 1, 0.0);
        for (std::size_t j = 0; j < t1.size(); ++j) t2[j + 1] = 2.0 * t1[j];
        for (std::size_t j = 0; j < t0.size(); ++j) t2[j] -= t0[j];
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    return Polynomial{t1};
}

// Newton (divided-difference) form on the leading n-1 nodes.
struct NewtonForm {
    std::vector<double> nodes;
    std::vector<double> coeffs;

    double operator()(double x) const {
        double y = coeffs.back();
        for (std::size_t i = coeffs.size() - 1; i-- > 0;) y = y * (x - nodes[i]) + coeffs[i];
        return y;
    }

    Polynomial to_polynomial() const {
        std::vector<double> c{coeffs.back()};
        for (std::size_t i = coeffs.size() - 1; i-- > 0;) {
            std::vector<double> shifted(c.size() + 1, 0.0);
            for (std::size_t j = 0; j < c.size(); ++j) {
                shifted[j + 1] += c[j];
                shifted[j] -= c[j] * nodes[i];
            }
            shifted[0] += coeffs[i];
            c = std::move(shifted);
        }
        return Polynomial{std::move(c)};
    }
};

inline NewtonForm newton_interpolate(const std::vector<double>& nodes,
                                     const std::vector<double>& values) {
    if (nodes.size() != values.size() || nodes.empty())
        throw Error("newton_interpolate: nodes/values size mismatch");
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j)
            if (nodes[i] == nodes[j]) throw DuplicateNodes("newton_interpolate: duplicate nodes");
    std::vector<double> dd = values;
    std::vector<double> coeffs{dd[0]};
    for (std::size_t level = 1; level < nodes.size(); ++level) {
        for (std::size_t i = 0; i + level < nodes.size(); ++i)
            dd[i] = (dd[i + 1] - dd[i]) / (nodes[i + level] - nodes[i]);
        dd.resize(nodes.size() - level);
        coeffs.push_back(dd[0]);
    }
    return NewtonForm{nodes, coeffs};
}

// --- the secant-slope polynomial q -----------------------------------------
//
// q(x,y) is defined by p(x) - p(y) = q(x,y)(x - y) and evaluated through the
// expanded double sum  q = sum_k a_k sum_{i+j=k-1} x^i y^j,  never through the
// ratio, so the diagonal is regular and q(x,x) = p'(x). Terms are accumulated
// in a swap-symmetric order, so q(x,y) == q(y,x) bit-exactly.

namespace detail {

struct PowerTable {
    double v[Polynomial::kMaxDegree + 1];
    PowerTable(double x, int deg) {
        v[0] = 1.0;
        for (int i = 1; i <= deg; ++i) v[i] = v[i - 1] * x;
    }
};

}  // namespace detail

inline double q_eval(const Polynomial& p, double x, double y) {
    const int deg = p.degree();
    if (deg < 1) return 0.0;
    detail::PowerTable px(x, deg - 1), py(y, deg - 1);
    double total = 0.0;
    for (int k = 1; k <= deg; ++k) {
        const double ak = p.coeff(k);
        if (ak == 0.0) continue;
        const int m = k - 1;  // homogeneous degree of the inner sum
        double h = 0.0;
        for (int i = 0; 2 * i < m; ++i) h += px.v[i] * py.v[m - i] + px.v[m - i] * py.v[i];
        if (m % 2 == 0) h += px.v[m / 2] * py.v[m / 2];
        total += ak * h;
    }
    return total;
}

// dq/dx via the termwise-differentiated expansion; q_x(y,y) = p''(y)/2.
inline double q_x_eval(const Polynomial& p, double x, double y) {
    const int deg = p.degree();
    if (deg < 2) return 0.0;
    detail::PowerTable px(x, deg - 2), py(y, deg - 2);
    double total = 0.0;
    for (int k = 2; k <= deg; ++k) {
        const double ak = p.coeff(k);
        if (ak == 0.0) continue;
        double h = 0.0;
        for (int i = 1; i <= k - 1; ++i) h += static_cast<double>(i) * px.v[i - 1] * py.v[k - 1 - i];
        total += ak * h;
    }
    return total;
}

inline double q_y_eval(const Polynomial& p, double x, double y) { return q_x_eval(p, y, x); }

// q(., y) as a polynomial in the first argument (degree k-1).
inline Polynomial q_as_poly_in_x(const Polynomial& p, double y) {
    const int deg = p.degree();
    if (deg < 1) return Polynomial{{0.0}};
    std::vector<double> c(static_cast<std::size_t>(deg), 0.0);
    detail::PowerTable py(y, deg - 1);
    for (int i = 0; i < deg; ++i)
        for (int k = i + 1; k <= deg; ++k) c[static_cast<std::size_t>(i)] += p.coeff(k) * py.v[k - 1 - i];
    return Polynomial{std::move(c)};
}

// --- CLI text format --------------------------------------------------------
//
// Either comma-separated ascending coefficients ("0.15,-0.05,0,...") or the
// Chebyshev shorthand "cheb:5".
inline Polynomial parse_polynomial_spec(const std::string& spec) {
    if (spec.rfind("cheb:", 0) == 0) {
        const int k = std::stoi(spec.substr(5));
        if (k < 0 || k > Polynomial::kMaxDegree) throw Error("cheb: order out of range");
        return chebyshev(k);
    }
    std::vector<double> coeffs;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        coeffs.push_back(v);
    }
    if (coeffs.empty()) throw Error("empty polynomial spec");
    return Polynomial{std::move(coeffs)};
}

}  // namespace secant
