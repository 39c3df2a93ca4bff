#pragma once

// Trace coordinates on the space of PVI monodromy data: the affine cubic
// surface, braid actions, the trace maps induced by the symmetries that
// exchange critical points, the sigma <-> trace dictionary, and the 2x2
// residue matrices used by the matrix-constraint oracle.

#include <cmath>
#include <complex>

#include "errors.hpp"
#include "special.hpp"

namespace pvi {

struct PviCoefficients {
    cplx alpha{}, beta{}, gamma{}, delta{};
};

struct ThetaParams {
    cplx theta0{}, thetax{}, theta1{}, thetainf{};
};

// theta0^2 = -2 beta, thetax^2 = 1 - 2 delta, theta1^2 = 2 gamma,
// (thetainf - 1)^2 = 2 alpha.  Principal square roots; thetainf = 0 names
// the same equation as thetainf = 2, so the nonzero representative is used.
inline ThetaParams theta_from_coefficients(const PviCoefficients& c) {
    ThetaParams th;
    th.theta0   = std::sqrt(-2.0 * c.beta);
    th.thetax   = std::sqrt(1.0 - 2.0 * c.delta);
    th.theta1   = std::sqrt(2.0 * c.gamma);
    th.thetainf = 1.0 + std::sqrt(2.0 * c.alpha);
    if (std::abs(th.thetainf) < 1e-12) th.thetainf = 2.0;
    return th;
}

inline PviCoefficients coefficients_from_theta(const ThetaParams& th) {
    cplx tinf = th.thetainf;
    if (std::abs(tinf) < 1e-12) tinf = 2.0;
    PviCoefficients c;
    c.alpha = 0.5 * (tinf - 1.0) * (tinf - 1.0);
    c.beta  = -0.5 * th.theta0 * th.theta0;
    c.gamma = 0.5 * th.theta1 * th.theta1;
    c.delta = 0.5 * (1.0 - th.thetax * th.thetax);
    return c;
}

struct MonodromyTraces {
    cplx p0{}, px{}, p1{}, pinf{};   // p_mu = Tr M_mu = 2 cos(pi theta_mu)
    cplx p0x{}, p01{}, px1{};        // pairwise products Tr(M_i M_j)
};

inline MonodromyTraces make_traces(const ThetaParams& th,
                                   cplx p0x, cplx p01, cplx px1) {
    MonodromyTraces t;
    t.p0   = 2.0 * std::cos(pi * th.theta0);
    t.px   = 2.0 * std::cos(pi * th.thetax);
    t.p1   = 2.0 * std::cos(pi * th.theta1);
    t.pinf = 2.0 * std::cos(pi * th.thetainf);
    t.p0x = p0x;
    t.p01 = p01;
    t.px1 = px1;
    return t;
}

// Left side of the cubic surface equation; vanishes on consistent data.
inline cplx cubic_residual(const MonodromyTraces& t) {
    const cplx &p0 = t.p0, &px = t.px, &p1 = t.p1, &pinf = t.pinf;
    const cplx &p0x = t.p0x, &p01 = t.p01, &px1 = t.px1;
    return p0x * p0x + p01 * p01 + px1 * px1 + p0x * p01 * px1
           - (p0 * px + p1 * pinf) * p0x
           - (p0 * p1 + px * pinf) * p01
           - (px * p1 + p0 * pinf) * px1
           + p0 * p0 + p1 * p1 + px * px + pinf * pinf
           + p0 * px * p1 * pinf - 4.0;
}

enum class Regime { Generic, Oscillatory, InverseOscillatory, LogZero, LogOne };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Generic:             return "generic";
        case Regime::Oscillatory:         return "oscillatory";
        case Regime::InverseOscillatory:  return "inverse_oscillatory";
        case Regime::LogZero:             return "log_zero";
        case Regime::LogOne:              return "log_one";
    }
    return "?";
}

struct CriticalExponent {
    cplx sigma{};
    Regime regime = Regime::Generic;
    bool boundary_warning = false;   // Re sigma within (1e-9, 1e-6) of a strip edge
};

inline constexpr double regime_snap_tol = 1e-9;
inline constexpr double regime_warn_tol = 1e-6;

// Classify a sigma already lying in the strip 0 <= Re sigma <= 1 and put it
// in canonical form: Re snapped onto a boundary within 1e-9 of it, Im >= 0
// on the boundaries (the flip leaves the transcendent unchanged).
inline CriticalExponent classify_sigma(cplx sigma) {
    CriticalExponent out;
    const double re = sigma.real();
    if (std::abs(re) <= regime_snap_tol) {
        sigma = cplx(0.0, sigma.imag());
        if (sigma.imag() < 0.0) sigma = -sigma;
        if (std::abs(sigma.imag()) <= regime_snap_tol) {
            sigma = 0.0;
            out.regime = Regime::LogZero;
        } else {
            out.regime = Regime::Oscillatory;
        }
    } else if (std::abs(re - 1.0) <= regime_snap_tol) {
        sigma = cplx(1.0, sigma.imag());
        if (sigma.imag() < 0.0) sigma = 2.0 - sigma;
        if (std::abs(sigma.imag()) <= regime_snap_tol) {
            sigma = 1.0;
            out.regime = Regime::LogOne;
        } else {
            out.regime = Regime::InverseOscillatory;
        }
    } else if (re > -regime_snap_tol && re < 1.0 + regime_snap_tol) {
        out.regime = Regime::Generic;
        out.boundary_warning = (re < regime_warn_tol) || (re > 1.0 - regime_warn_tol);
    } else {
        fail(errc::bad_input, "sigma outside the strip 0 <= Re sigma <= 1");
    }
    out.sigma = sigma;
    return out;
}

// Solve 2 cos(pi sigma) = p on the strip 0 <= Re sigma <= 1.
inline CriticalExponent sigma_from_trace(cplx p) {
    return classify_sigma(std::acos(0.5 * p) / pi);
}

inline cplx trace_from_sigma(cplx sigma) { return 2.0 * std::cos(pi * sigma); }
inline cplx trace_from_sigma(const CriticalExponent& s) { return trace_from_sigma(s.sigma); }

// ---------------------------------------------------------------------------
// Braid actions.  The base point x circling the singular point 0 or 1
// conjugates the monodromy matrices; at trace level the actions close into
// polynomial maps that preserve the cubic surface.  p0, px, p1, pinf are
// untouched.

inline MonodromyTraces braid_around_0(MonodromyTraces t) {
    const cplx p0x = t.p0x, p01 = t.p01, px1 = t.px1;
    t.px1 = px1 * (p0x * p0x - 1.0) + p0x * p01
            - (t.pinf * t.px + t.p1 * t.p0) * p0x + t.pinf * t.p0 + t.p1 * t.px;
    t.p01 = -p01 - px1 * p0x + t.pinf * t.px + t.p1 * t.p0;
    return t;
}

inline MonodromyTraces braid_around_0_inverse(MonodromyTraces t) {
    const cplx p0x = t.p0x, p01p = t.p01, px1p = t.px1;
    t.px1 = -px1p - p0x * p01p + t.pinf * t.p0 + t.p1 * t.px;
    t.p01 = -p01p - t.px1 * p0x + t.pinf * t.px + t.p1 * t.p0;
    return t;
}

inline MonodromyTraces braid_around_1(MonodromyTraces t) {
    const cplx p0x = t.p0x, p01 = t.p01, px1 = t.px1;
    t.p01 = p01 * (px1 * px1 - 1.0) + p0x * px1
            - (t.pinf * t.p1 + t.p0 * t.px) * px1 + t.pinf * t.px + t.p0 * t.p1;
    t.p0x = -p0x - p01 * px1 + t.pinf * t.p1 + t.p0 * t.px;
    return t;
}

inline MonodromyTraces braid_around_1_inverse(MonodromyTraces t) {
    const cplx p0xp = t.p0x, p01p = t.p01, px1 = t.px1;
    t.p01 = -p01p - p0xp * px1 + t.pinf * t.px + t.p0 * t.p1;
    t.p0x = -p0xp - t.p01 * px1 + t.pinf * t.p1 + t.p0 * t.px;
    return t;
}

// ---------------------------------------------------------------------------
// Trace maps induced by the symmetries exchanging critical points.  Each
// comes with the matching relabeling of theta parameters.

inline ThetaParams theta_map_sigma01(const ThetaParams& th) {
    return {th.theta1, th.thetax, th.theta0, th.thetainf};
}

// Exchanges the roles of 0 and 1 (y -> 1 - y, x -> 1 - x).  Self-inverse.
inline MonodromyTraces trace_map_sigma01(MonodromyTraces t) {
    const cplx p0x = t.p0x, p01 = t.p01, px1 = t.px1;
    std::swap(t.p0, t.p1);
    t.p01 = -p01 - p0x * px1 + t.pinf * t.px + t.p1 * t.p0;
    t.p0x = px1;
    t.px1 = p0x;
    return t;
}

inline ThetaParams theta_map_sigmax1(const ThetaParams& th) {
    return {th.theta0, th.theta1, th.thetax, th.thetainf};
}

// Exchanges the roles of x and 1 (y -> y/x, x -> 1/x).  Not self-inverse:
// the printed inverse solves the forward relations and is exposed below.
inline MonodromyTraces trace_map_sigmax1(MonodromyTraces t) {
    const cplx p0x = t.p0x, p01 = t.p01, px1 = t.px1;
    std::swap(t.px, t.p1);
    t.p0x = -p01 - p0x * px1 + t.pinf * t.p1 + t.p0 * t.px;
    t.p01 = p0x;
    t.px1 = px1;
    return t;
}

inline MonodromyTraces trace_map_sigmax1_inverse(MonodromyTraces t) {
    const cplx p0xp = t.p0x, p01p = t.p01, px1p = t.px1;
    std::swap(t.px, t.p1);
    t.p01 = -p0xp - p01p * px1p + t.pinf * t.px + t.p0 * t.p1;
    t.p0x = p01p;
    t.px1 = px1p;
    return t;
}

inline ThetaParams theta_map_fractional_linear(const ThetaParams& th) {
    return {th.thetainf - 1.0, th.theta1, th.thetax, th.theta0 + 1.0};
}

// The fractional-linear symmetry relating the generic expansion to the
// Re sigma = 1 one: sign/permutation map on traces, exact involution.
inline MonodromyTraces trace_map_fractional_linear(MonodromyTraces t) {
    MonodromyTraces s;
    s.p0   = -t.pinf;
    s.px   = t.p1;
    s.p1   = t.px;
    s.pinf = -t.p0;
    s.p0x  = -t.p0x;
    s.p01  = -t.p01;
    s.px1  = t.px1;
    return s;
}

// ---------------------------------------------------------------------------
// Small dense 2x2 complex matrices, enough for the residue-matrix oracle and
// the test fixtures.

struct Mat2 {
    cplx a{}, b{}, c{}, d{};   // [[a, b], [c, d]]
};

inline Mat2 operator*(const Mat2& l, const Mat2& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
            l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
}

inline Mat2 operator+(const Mat2& l, const Mat2& r) {
    return {l.a + r.a, l.b + r.b, l.c + r.c, l.d + r.d};
}

inline Mat2 operator-(const Mat2& l, const Mat2& r) {
    return {l.a - r.a, l.b - r.b, l.c - r.c, l.d - r.d};
}

inline Mat2 operator*(cplx s, const Mat2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }

inline cplx trace(const Mat2& m) { return m.a + m.d; }
inline cplx det(const Mat2& m) { return m.a * m.d - m.b * m.c; }

inline Mat2 inverse(const Mat2& m) {
    const cplx dt = det(m);
    if (std::abs(dt) < 1e-300) fail(errc::singular_input, "2x2 matrix not invertible");
    const cplx s = 1.0 / dt;
    return {s * m.d, -s * m.b, -s * m.c, s * m.a};
}

inline double frobenius_norm(const Mat2& m) {
    return std::sqrt(std::norm(m.a) + std::norm(m.b) + std::norm(m.c) + std::norm(m.d));
}

struct HatMatrices {
    Mat2 hatA1, Lambda, hathatA0, hathatAx, G0;
};

// Residue matrices of the two reduced 2x2 Fuchsian systems whose local
// exponents carry (theta1, thetainf, sigma) and (theta0, thetax, sigma).
// They provide the linear-algebra constraints used to cross-check the
// connection formulas:
//   eig(hatA1) = +-theta1/2, eig(Lambda) = +-sigma/2,
//   Lambda + hatA1 = -(thetainf/2) sigma3,
//   eig(hathatA0) = +-theta0/2, eig(hathatAx) = +-thetax/2,
//   hathatA0 + hathatAx = (sigma/2) sigma3,
//   G0^{-1} Lambda G0 = (sigma/2) sigma3.
inline HatMatrices build_hat_matrices(const ThetaParams& th, cplx sigma,
                                      cplx r1, cplx r) {
    const cplx t0 = th.theta0, tx = th.thetax, t1 = th.theta1, ti = th.thetainf;
    if (std::abs(ti) < 1e-12)    fail(errc::singular_input, "thetainf = 0 in residue matrices");
    if (std::abs(sigma) < 1e-12) fail(errc::singular_input, "sigma = 0 in residue matrices");
    if (std::abs(r) < 1e-300)    fail(errc::singular_input, "r = 0 in residue matrices");
    if (std::abs(r1) < 1e-300)   fail(errc::singular_input, "r1 = 0 in residue matrices");

    const cplx s2 = sigma * sigma;
    const cplx q1 = (s2 - (t1 - ti) * (t1 - ti)) * (s2 - (t1 + ti) * (t1 + ti));
    const cplx q0 = (s2 - (t0 - tx) * (t0 - tx)) * (s2 - (t0 + tx) * (t0 + tx));

    HatMatrices h;
    {
        const cplx diag = (s2 - ti * ti - t1 * t1) / (4.0 * ti);
        h.hatA1 = {diag, -r1, q1 / (16.0 * ti * ti * r1), -diag};
    }
    {
        const cplx diag = (t1 * t1 - s2 - ti * ti) / (4.0 * ti);
        h.Lambda = {diag, r1, -q1 / (16.0 * ti * ti * r1), -diag};
    }
    {
        const cplx diag = (t0 * t0 - tx * tx + s2) / (4.0 * sigma);
        h.hathatA0 = {diag, r, -q0 / (16.0 * s2 * r), -diag};
    }
    {
        const cplx diag = (s2 + tx * tx - t0 * t0) / (4.0 * sigma);
        h.hathatAx = {diag, -r, q0 / (16.0 * s2 * r), -diag};
    }
    h.G0 = {1.0, 1.0,
            ((ti + sigma) * (ti + sigma) - t1 * t1) / (4.0 * ti * r1),
            ((ti - sigma) * (ti - sigma) - t1 * t1) / (4.0 * ti * r1)};
    return h;
}

}  // namespace pvi
