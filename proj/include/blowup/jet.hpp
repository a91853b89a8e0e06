#pragma once

#include <cmath>
#include <functional>

#include "blowup/core_bubble.hpp"

namespace blowup {

/// Value of an axisymmetric space-time field together with the derivatives
/// the error operator needs. `lap` is the n-dimensional Laplacian
/// f_11 + f_ρρ + (n-2)/ρ f_ρ.
struct Jet {
    double v = 0.0;
    double dx1 = 0.0;
    double drho = 0.0;
    double lap = 0.0;
    double dt = 0.0;

    Jet& operator+=(const Jet& o) {
        v += o.v;
        dx1 += o.dx1;
        drho += o.drho;
        lap += o.lap;
        dt += o.dt;
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        v -= o.v;
        dx1 -= o.dx1;
        drho -= o.drho;
        lap -= o.lap;
        dt -= o.dt;
        return *this;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Jet& a, const Jet& b) {
        return {a.v * b.v, a.dx1 * b.v + a.v * b.dx1, a.drho * b.v + a.v * b.drho,
                a.lap * b.v + 2.0 * (a.dx1 * b.dx1 + a.drho * b.drho) + a.v * b.lap,
                a.dt * b.v + a.v * b.dt};
    }
    /// Multiplication by a function of time only, c(t) with derivative c'(t).
    [[nodiscard]] Jet scaled(double c, double dc) const {
        return {c * v, c * dx1, c * drho, c * lap, c * dt + dc * v};
    }
};

/// A space-time field evaluator x, t -> Jet.
using FieldFn = std::function<Jet(AxiPoint, double)>;

/// Radial profile F(r) with F', F'' at one point.
struct RadialSample {
    double f = 0.0, df = 0.0, d2f = 0.0;
};

/// Jet of A(t) F(|x - c(t)|/L(t)) for a center c = (c1(t), 0̄) on the axis.
struct MovingRadial {
    double amp = 1.0, amp_rate = 0.0;      // A, dA/dt
    double scale = 1.0, scale_rate = 0.0;  // L, dL/dt
    double center = 0.0, center_rate = 0.0;

    template <class Profile>
    [[nodiscard]] Jet jet(AxiPoint x, int n, const Profile& profile) const;
};

template <class Profile>
Jet MovingRadial::jet(AxiPoint x, int n, const Profile& profile) const {
    const double dx = x.x1 - center;
    const double dist = std::hypot(dx, x.rho);
    const double q = dist / scale;
    const RadialSample s = profile(q);
    Jet j;
    j.v = amp * s.f;
    if (dist > 0.0) {
        const double g = amp * s.df / scale;
        j.dx1 = g * dx / dist;
        j.drho = g * x.rho / dist;
        j.lap = amp / (scale * scale) * (s.d2f + (n - 1) * s.df / q);
        const double dq_dt = -q * scale_rate / scale - center_rate * (dx / dist) / scale;
        j.dt = amp_rate * s.f + amp * s.df * dq_dt;
    } else {
        j.lap = amp / (scale * scale) * n * s.d2f;
        j.dt = amp_rate * s.f;
    }
    return j;
}

}  // namespace blowup
