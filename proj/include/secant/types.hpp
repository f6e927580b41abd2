#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace secant {

// Base class for all numeric-failure exceptions thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PlanarPoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
};

inline double distance(const PlanarPoint& a, const PlanarPoint& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct Rect {
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    bool contains(const PlanarPoint& p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }
    static Rect square(double lo, double hi) { return {lo, hi, lo, hi}; }
};

// Row-major 2x2 real matrix, just enough linear algebra for Jacobians.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }

    friend Mat2 operator*(const Mat2& l, const Mat2& r) {
        return {l.a11 * r.a11 + l.a12 * r.a21, l.a11 * r.a12 + l.a12 * r.a22,
                l.a21 * r.a11 + l.a22 * r.a21, l.a21 * r.a12 + l.a22 * r.a22};
    }
    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
};

struct Eigen2 {
    std::array<std::complex<double>, 2> values;
    // Unit eigenvectors; meaningful only when the eigenvalues are real.
    std::array<PlanarPoint, 2> vectors;
    bool real = false;
};

inline Eigen2 eigen(const Mat2& m) {
    Eigen2 out;
    const double tr = m.trace();
    const double dt = m.det();
    const double disc = tr * tr - 4.0 * dt;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        out.values = {std::complex<double>((tr + s) / 2.0), std::complex<double>((tr - s) / 2.0)};
        out.real = true;
        for (int k = 0; k < 2; ++k) {
            const double lam = out.values[k].real();
            // Null vector of (m - lam I): pick the better-conditioned row.
            PlanarPoint v{m.a12, lam - m.a11};
            PlanarPoint w{lam - m.a22, m.a21};
            if (std::hypot(w.x, w.y) > std::hypot(v.x, v.y)) v = w;
            const double n = std::hypot(v.x, v.y);
            if (n > 0.0) v = {v.x / n, v.y / n};
            out.vectors[k] = v;
        }
    } else {
        const double s = std::sqrt(-disc);
        out.values = {std::complex<double>(tr / 2.0, s / 2.0), std::complex<double>(tr / 2.0, -s / 2.0)};
        out.real = false;
    }
    return out;
}

}  // namespace secant
