#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>

namespace hecke {

// Point x + iy on the upper half plane, y > 0.
struct SurfacePoint {
    double x = 0.0;
    double y = 1.0;
};

// Integer matrix of determinant one. Entries are exact so long words of
// generators never lose the group element.
struct GroupElement {
    mpz_class a = 1, b = 0, c = 0, d = 1;

    static GroupElement identity() { return {}; }
    mpz_class det() const { return a * d - b * c; }
};

inline GroupElement ge_mul(const GroupElement& g, const GroupElement& h) {
    return {g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d,
            g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d};
}

// Moebius action. The imaginary part is y / |cz + d|^2, which is positive by
// construction and free of cancellation; the real part groups the terms so
// the subtraction happens between like magnitudes.
inline SurfacePoint act(const GroupElement& g, const SurfacePoint& z) {
    double a = g.a.get_d(), b = g.b.get_d(), c = g.c.get_d(), d = g.d.get_d();
    double u = c * z.x + d;
    double den = u * u + c * c * z.y * z.y;
    if (den == 0.0) throw std::domain_error("act: image at infinity");
    double re = ((a * z.x + b) * u + a * c * z.y * z.y) / den;
    double im = z.y / den;
    return {re, im};
}

// Reduce z into the standard fundamental domain |x| <= 1/2, |z| >= 1 and
// report the group element carrying z there. Terminates because each
// inversion strictly increases the imaginary part while the point is inside
// the unit circle.
struct ReduceResult {
    SurfacePoint z;
    GroupElement gamma;
};

inline ReduceResult reduce(SurfacePoint z) {
    if (!(z.y > 0.0)) throw std::domain_error("reduce: not in the upper half plane");
    GroupElement g = GroupElement::identity();
    for (int iter = 0; iter < 10000; ++iter) {
        double shift = std::nearbyint(z.x);
        if (shift != 0.0) {
            z.x -= shift;
            GroupElement t{1, mpz_class(-static_cast<long>(shift)), 0, 1};
            g = ge_mul(t, g);
        }
        double r2 = z.x * z.x + z.y * z.y;
        if (r2 >= 1.0 - 1e-15) {
            // Tie break on the boundary so the output is a function: prefer
            // x >= 0 on |x| = 1/2 and on the arc.
            if (z.x < -0.5 + 1e-15 && std::abs(z.x + 0.5) < 1e-15) {
                z.x = 0.5;
                g = ge_mul(GroupElement{1, 1, 0, 1}, g);
            }
            return {z, g};
        }
        double nx = -z.x / r2, ny = z.y / r2;
        z = {nx, ny};
        g = ge_mul(GroupElement{0, -1, 1, 0}, g);
    }
    throw std::runtime_error("reduce: did not converge");
}

}  // namespace hecke
