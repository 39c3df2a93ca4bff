#pragma once

// Explicit formulas linking monodromy traces to the integration constants of
// the critical behaviors at x = 0, 1, infinity, in all three finite-sigma
// regimes, plus the Frobenius-manifold specialization and the full
// connection pipeline.

#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "monodromy.hpp"
#include "special.hpp"

namespace pvi {

enum class Point { Zero, One, Infinity };

inline const char* point_name(Point p) {
    switch (p) {
        case Point::Zero:     return "zero";
        case Point::One:      return "one";
        case Point::Infinity: return "infinity";
    }
    return "?";
}

// Theta labels as seen from each critical point: the exchanges 0<->1 and
// x<->1 carry the expansion at 1 and at infinity back to an expansion at 0.
inline ThetaParams theta_at_point(const ThetaParams& th, Point pt) {
    switch (pt) {
        case Point::Zero:     return th;
        case Point::One:      return theta_map_sigma01(th);
        case Point::Infinity: return theta_map_sigmax1(th);
    }
    return th;
}

namespace detail {

inline cplx sq(cplx z) { return z * z; }

// Gamma with the connection-formula pole policy: arguments within 1e-9 of a
// non-positive integer are excluded loci of the trace parametrization.
inline cplx gamma_ng(cplx z) {
    if (near_nonpositive_integer(z, 1e-9))
        fail(errc::non_generic_data,
             "gamma argument at a non-positive integer in a connection formula");
    return complex_gamma(z);
}

inline cplx half_sin(cplx z) { return std::sin(0.5 * pi * z); }

// z / sin(pi z / 2): removable at z = 0 (value 2/pi), poles at the other
// even integers.  This grouping realizes the finite limits of the trace
// formulas on the degenerate loci without a 0/0.
inline cplx over_half_sin(cplx z) {
    if (std::abs(z) < 1e-9) {
        const cplx w2 = sq(0.5 * pi * z);
        return (2.0 / pi) * (1.0 + w2 / 6.0);
    }
    const double k = std::round(0.5 * z.real());
    if (k != 0.0 && std::abs(z - 2.0 * k) < 1e-9)
        fail(errc::non_generic_data,
             "connection formula argument at a nonzero even integer");
    return z / half_sin(z);
}

// Trace-bilinear numerator factor of the direct formula.
inline cplx u_factor(const ThetaParams& th, cplx sigma, cplx p01, cplx px1) {
    const cplx c0 = std::cos(pi * th.theta0), cx = std::cos(pi * th.thetax);
    const cplx c1 = std::cos(pi * th.theta1), ci = std::cos(pi * th.thetainf);
    const cplx half_i_sin = cplx(0.0, 0.5) * std::sin(pi * sigma);
    return (half_i_sin * px1 - cx * ci - c0 * c1) * std::exp(cplx(0.0, pi) * sigma)
           + half_i_sin * p01 + cx * c1 + ci * c0;
}

// Trace-bilinear numerator factor of the Re sigma = 1 formula.
inline cplx u_factor_inverse(const ThetaParams& th, cplx sigma, cplx p01, cplx p1x) {
    const cplx c0 = std::cos(pi * th.theta0), cx = std::cos(pi * th.thetax);
    const cplx c1 = std::cos(pi * th.theta1), ci = std::cos(pi * th.thetainf);
    const cplx half_i_sin = cplx(0.0, 0.5) * std::sin(pi * sigma);
    return -std::exp(cplx(0.0, -pi) * sigma) * (half_i_sin * p1x + cx * ci + c0 * c1)
           - half_i_sin * p01 + cx * c1 + ci * c0;
}

// Product of the eight Gamma factors of the direct formula.
inline cplx gamma_ratio(const ThetaParams& th, cplx s) {
    const cplx t0 = th.theta0, tx = th.thetax, t1 = th.theta1, ti = th.thetainf;
    const cplx num = sq(gamma_ng(1.0 + s)) * gamma_ng(0.5 * (t0 + tx - s) + 1.0)
                     * gamma_ng(0.5 * (tx - t0 - s) + 1.0);
    const cplx den = sq(gamma_ng(1.0 - s)) * gamma_ng(0.5 * (t0 + tx + s) + 1.0)
                     * gamma_ng(0.5 * (tx - t0 + s) + 1.0);
    const cplx num2 = gamma_ng(0.5 * (ti + t1 - s) + 1.0) * gamma_ng(0.5 * (t1 - ti - s) + 1.0);
    const cplx den2 = gamma_ng(0.5 * (ti + t1 + s) + 1.0) * gamma_ng(0.5 * (t1 - ti + s) + 1.0);
    return (num / den) * (num2 / den2);
}

// Product of the eight Gamma factors of the Re sigma = 1 formula.
inline cplx gamma_ratio_inverse(const ThetaParams& th, cplx s) {
    const cplx t0 = th.theta0, tx = th.thetax, t1 = th.theta1, ti = th.thetainf;
    const cplx num = sq(gamma_ng(2.0 - s)) * gamma_ng(0.5 * (ti + t1 + s))
                     * gamma_ng(0.5 * (t1 - ti + s) + 1.0);
    const cplx den = sq(gamma_ng(s)) * gamma_ng(0.5 * (ti + t1 - s) + 1.0)
                     * gamma_ng(0.5 * (t1 - ti - s) + 2.0);
    const cplx num2 = gamma_ng(0.5 * (t0 + tx + s) + 1.0) * gamma_ng(0.5 * (tx - t0 + s));
    const cplx den2 = gamma_ng(0.5 * (t0 + tx - s) + 2.0) * gamma_ng(0.5 * (tx - t0 - s) + 1.0);
    return (num / den) * (num2 / den2);
}

}  // namespace detail

// Integration constant r at x = 0 from (sigma, p01, px1), valid for
// 0 <= Re sigma < 1 (generic and oscillatory regimes).  The three removable
// pairings are factored through over_half_sin so the value extends
// continuously onto sigma = +-(theta0 +- thetax).
inline cplx r_generic(const ThetaParams& th, cplx sigma, cplx p01, cplx px1) {
    const cplx t0 = th.theta0, tx = th.thetax, t1 = th.theta1, ti = th.thetainf;
    if (std::abs(sigma) < 1e-12)
        fail(errc::non_generic_data, "sigma = 0 in the trace parametrization of r");
    if (std::abs(ti + t1 + sigma) < 1e-12)
        fail(errc::non_generic_data, "thetainf + theta1 + sigma = 0 in the r formula");
    const cplx s_last = detail::half_sin(ti - t1 + sigma);
    if (std::abs(s_last) < 1e-12)
        fail(errc::non_generic_data, "thetainf - theta1 + sigma at an even integer");
    const cplx U = detail::u_factor(th, sigma, p01, px1);
    const cplx g1 = detail::over_half_sin(t0 + tx - sigma);
    const cplx g2 = detail::over_half_sin(t0 - tx + sigma);
    const cplx g3 = detail::over_half_sin(ti + t1 - sigma);
    return U * g1 * g2 * g3
           / (16.0 * sigma * (ti + t1 + sigma) * s_last * detail::gamma_ratio(th, sigma));
}

// Integration constant r at x = 0 for Re sigma = 1 (inverse oscillatory
// regime), as printed, with the removable pairings grouped as above.
inline cplx r_inverse_oscillatory(const ThetaParams& th, cplx sigma, cplx p01, cplx px1) {
    const cplx t0 = th.theta0, tx = th.thetax, t1 = th.theta1, ti = th.thetainf;
    if (std::abs(1.0 - sigma) < 1e-12)
        fail(errc::non_generic_data, "sigma = 1 in the inverse-regime r formula");
    if (std::abs(t0 + tx + 2.0 - sigma) < 1e-12)
        fail(errc::non_generic_data, "theta0 + thetax + 2 - sigma = 0 in the inverse-regime r formula");
    const cplx s_rest = detail::half_sin(t0 - tx - sigma);
    if (std::abs(s_rest) < 1e-12)
        fail(errc::non_generic_data, "theta0 - thetax - sigma at an even integer");
    const cplx U = detail::u_factor_inverse(th, sigma, p01, px1);
    const cplx g1 = detail::over_half_sin(t0 + tx + sigma);
    const cplx g2 = detail::over_half_sin(ti - t1 - sigma);
    const cplx g3 = detail::over_half_sin(ti + t1 + sigma - 2.0);
    return -U * g1 * g2 * g3
           / (16.0 * (1.0 - sigma) * (t0 + tx + 2.0 - sigma) * s_rest
              * detail::gamma_ratio_inverse(th, sigma));
}

struct GCoefficients {
    cplx G1{}, G2{}, G3{}, G4{}, G5{}, G6{};
    bool reduced_precision = false;   // evaluated at a 1e-6 sigma offset near a singular locus
};

// The six coefficients of the trace parametrization
// px1 = G1/r + G2 + G3 r, p01 = G4/r + G5 + G6 r.
inline GCoefficients g_coefficients(const ThetaParams& th, cplx sigma) {
    const cplx t0 = th.theta0, tx = th.thetax, t1 = th.theta1, ti = th.thetainf;
    const cplx sx = std::sin(pi * tx), s1 = std::sin(pi * t1), s0 = std::sin(pi * t0);
    if (std::abs(sx) < 1e-12) fail(errc::singular_denominator, "sin(pi thetax) vanishes");
    if (std::abs(s1) < 1e-12) fail(errc::singular_denominator, "sin(pi theta1) vanishes");

    auto attempt = [&](cplx s) -> std::optional<GCoefficients> {
        using detail::half_sin;
        const cplx sins = std::sin(pi * s);
        if (std::abs(sins) < 1e-12) return std::nullopt;
        if (std::abs(s) < 1e-12 || std::abs(t0 - tx + s) < 1e-12 ||
            std::abs(t0 + tx - s) < 1e-12 || std::abs(ti + t1 - s) < 1e-12 ||
            std::abs(ti + t1 + s) < 1e-12)
            return std::nullopt;

        const cplx second_sum = half_sin(t1 + ti + s) * half_sin(t1 - ti + s)
                                + half_sin(t1 + ti - s) * half_sin(t1 - ti - s);
        const cplx second_dif = half_sin(t1 + ti + s) * half_sin(t1 - ti + s)
                                - half_sin(t1 + ti - s) * half_sin(t1 - ti - s);
        const cplx Xi  = (half_sin(t0 + tx + s) * half_sin(t0 - tx - s)
                          + half_sin(t0 - tx + s) * half_sin(t0 + tx - s)) * second_sum;
        const cplx Xi1 = (half_sin(t0 + tx + s) * half_sin(t0 - tx + s)
                          + half_sin(t0 + tx - s) * half_sin(t0 - tx - s)) * second_sum;
        const cplx Om  = (-half_sin(t0 + tx + s) * half_sin(t0 - tx - s)
                          + half_sin(t0 - tx + s) * half_sin(t0 + tx - s)) * second_dif;
        const cplx Om1 = (half_sin(t0 + tx + s) * half_sin(t0 - tx + s)
                          - half_sin(t0 + tx - s) * half_sin(t0 - tx - s)) * second_dif;
        if (std::abs(Om) < 1e-12 || std::abs(Om1) < 1e-12) return std::nullopt;

        cplx V, V1, calF;
        try {
            V  = 4.0 * half_sin(t0 + tx - s) * half_sin(t0 - tx + s)
                 * half_sin(ti + t1 - s) * half_sin(ti - t1 + s);
            V1 = 4.0 * half_sin(t0 + tx + s) * half_sin(t0 - tx - s)
                 * half_sin(ti + t1 + s) * half_sin(ti - t1 - s);
            calF = detail::gamma_ratio(th, s) * 4.0 * s * (ti + t1 + s)
                   / ((t0 - tx + s) * (t0 + tx - s) * (ti + t1 - s));
        } catch (const error&) {
            return std::nullopt;   // gamma pole on the locus: retry off it
        }

        GCoefficients g;
        const cplx c0 = std::cos(pi * t0), cx = std::cos(pi * tx), c1 = std::cos(pi * t1);
        g.G2 = 2.0 * (Om * cx * c1 - Xi * sx * s1) / (sins * sins * sx * s1);
        g.G5 = 2.0 * (c1 * c0 + (Xi1 / Om1) * s1 * s0);
        g.G1 = -(sx * s1 / Om) * V1 / calF;
        g.G3 = -(sx * s1 / Om) * V * calF;
        g.G4 = -std::exp(cplx(0.0, pi) * s) * (s0 / sx) * (Om / Om1) * g.G1;
        g.G6 = -std::exp(cplx(0.0, -pi) * s) * (s0 / sx) * (Om / Om1) * g.G3;
        return g;
    };

    if (auto g = attempt(sigma)) return *g;
    for (cplx off : {cplx(1e-6, 0.0), cplx(0.0, 1e-6)}) {
        if (auto g = attempt(sigma + off)) {
            g->reduced_precision = true;
            return *g;
        }
    }
    fail(errc::singular_denominator,
         "trace coefficients singular at sigma and at the offset retries");
}

// Traces from (sigma, r) at x = 0, generic/oscillatory regimes.
inline MonodromyTraces traces_from_r(const ThetaParams& th, cplx sigma, cplx r) {
    if (std::abs(r) < 1e-12) fail(errc::zero_r, "r = 0 has no trace parametrization");
    const GCoefficients g = g_coefficients(th, sigma);
    return make_traces(th, 2.0 * std::cos(pi * sigma),
                       g.G4 / r + g.G5 + g.G6 * r,
                       g.G1 / r + g.G2 + g.G3 * r);
}

// Traces from (sigma, r) at x = 0 in the inverse oscillatory regime: the
// coefficients of the fractional-linear transform at 1 - sigma, with the
// sign flip on the p01 line.
inline MonodromyTraces traces_from_r_inverse(const ThetaParams& th, cplx sigma, cplx r) {
    if (std::abs(r) < 1e-12) fail(errc::zero_r, "r = 0 has no trace parametrization");
    const GCoefficients g = g_coefficients(theta_map_fractional_linear(th), 1.0 - sigma);
    return make_traces(th, 2.0 * std::cos(pi * sigma),
                       -(g.G4 / r + g.G5 + g.G6 * r),
                       g.G1 / r + g.G2 + g.G3 * r);
}

// Specialization to theta = (0, 0, 0, thetainf), the Frobenius-manifold
// case, written in its compact closed form.
inline cplx frobenius_r(cplx thetainf, cplx sigma, cplx p01, cplx px1) {
    using detail::gamma_ng;
    const cplx cs = std::cos(pi * sigma), ci = std::cos(pi * thetainf);
    if (std::abs(cs - ci) < 1e-12)
        fail(errc::non_generic_data, "cos(pi sigma) = cos(pi thetainf) in the Frobenius r formula");
    const cplx sn = std::sin(pi * sigma);
    if (std::abs(sn) < 1e-12)
        fail(errc::non_generic_data, "sigma at an integer in the Frobenius r formula");
    const cplx G = std::pow(cplx(4.0), -sigma) * detail::sq(gamma_ng(0.5 * (1.0 - sigma)))
                   / (gamma_ng(1.0 - 0.5 * thetainf - 0.5 * sigma)
                      * gamma_ng(0.5 * thetainf - 0.5 * sigma));
    const cplx Fc = detail::sq(std::cos(0.5 * pi * sigma)) / (cs - ci);
    const cplx eip = std::exp(cplx(0.0, pi) * sigma);
    const cplx bracket = (1.0 + ci) * (1.0 - eip) + cplx(0.0, 0.5) * sn * (p01 + px1 * eip);
    return sigma * detail::sq(G) * detail::sq(Fc) / (sn * sn) * bracket;
}

struct AB { cplx A{}, B{}; };

// Amplitude/offset pair of the oscillatory parametrizations.
inline AB coefficients_AB(const ThetaParams& th, const CriticalExponent& s) {
    using detail::sq;
    AB out;
    if (s.regime == Regime::Oscillatory) {
        const cplx s2 = sq(s.sigma);
        out.B = (sq(th.theta0) - sq(th.thetax) + s2) / (2.0 * s2);
        out.A = std::sqrt(sq(th.theta0) / s2 - sq(out.B));
    } else if (s.regime == Regime::InverseOscillatory) {
        const cplx nu = (s.sigma - 1.0) / cplx(0.0, 1.0);
        const cplx n2 = sq(nu);
        const cplx tim1 = th.thetainf - 1.0;
        out.B = (n2 + sq(th.theta1) - sq(tim1)) / (2.0 * n2);
        out.A = cplx(0.0, 1.0) * std::sqrt(sq(tim1) / n2 + sq(out.B));
    } else {
        fail(errc::wrong_regime, "A, B are defined only in the oscillatory regimes");
    }
    return out;
}

// Coefficient of the x^{1-sigma} leading term in the generic regime.
inline cplx generic_a(const ThetaParams& th, cplx sigma, cplx r) {
    using detail::sq;
    if (std::abs(r) < 1e-300) fail(errc::zero_r, "r = 0 in the leading-coefficient formula");
    return (sq(sigma) - sq(th.theta0 - th.thetax)) * (sq(th.theta0 + th.thetax) - sq(sigma))
           / (16.0 * sigma * sq(sigma) * r);
}

// sigma within tol of +-(theta0 +- thetax): the x^{1-sigma} coefficient
// vanishes and the branch starts with the small-power form.
inline bool degenerate_sigma(const ThetaParams& th, cplx sigma, double tol = 1e-6) {
    const cplx sum = th.theta0 + th.thetax, dif = th.theta0 - th.thetax;
    return std::abs(sigma - sum) < tol || std::abs(sigma + sum) < tol ||
           std::abs(sigma - dif) < tol || std::abs(sigma + dif) < tol;
}

struct BranchData {
    Point point = Point::Zero;
    CriticalExponent sigma{};
    cplx r{};
    cplx a{};               // generic regime
    cplx A{}, B{}, phi{};   // oscillatory regimes
    bool degenerate = false;
};

struct ConnectionResult {
    BranchData at0, at1, atInf;
};

namespace detail {

inline BranchData branch_at(const ThetaParams& th, const MonodromyTraces& t, Point pt) {
    BranchData b;
    b.point = pt;
    b.sigma = sigma_from_trace(t.p0x);
    const cplx sig = b.sigma.sigma;

    switch (b.sigma.regime) {
        case Regime::LogZero:
        case Regime::LogOne:
            fail(errc::unsupported_regime,
                 "sigma in {0, 1}: logarithmic/Taylor branch; the leading form is available "
                 "via leading_behavior but its integration constant is out of scope");
        case Regime::Generic:
        case Regime::Oscillatory: {
            b.r = r_generic(th, sig, t.p01, t.px1);
            b.degenerate = degenerate_sigma(th, sig);
            if (b.sigma.regime == Regime::Generic) {
                if (std::abs(b.r) < 1e-12)
                    fail(errc::non_generic_data, "r vanishes; branch is not of power type");
                b.a = generic_a(th, sig, b.r);
            } else {
                const AB ab = coefficients_AB(th, b.sigma);
                b.A = ab.A;
                b.B = ab.B;
                if (!b.degenerate) {
                    if (std::abs(b.r) < 1e-12 || std::abs(ab.A) < 1e-12)
                        fail(errc::non_generic_data, "vanishing r or amplitude in the phase formula");
                    b.phi = cplx(0.0, 1.0) * std::log(2.0 * b.r / (sig * ab.A));
                }
            }
            break;
        }
        case Regime::InverseOscillatory: {
            b.r = r_inverse_oscillatory(th, sig, t.p01, t.px1);
            b.degenerate = degenerate_sigma(theta_map_fractional_linear(th), 1.0 - sig);
            const AB ab = coefficients_AB(th, b.sigma);
            b.A = ab.A;
            b.B = ab.B;
            if (!b.degenerate) {
                if (std::abs(b.r) < 1e-12 || std::abs(ab.A) < 1e-12)
                    fail(errc::non_generic_data, "vanishing r or amplitude in the phase formula");
                b.phi = cplx(0.0, 1.0) * std::log(2.0 * b.r / ((1.0 - sig) * ab.A));
            }
            break;
        }
    }
    return b;
}

}  // namespace detail

// The connection problem: critical data at all three points from one set of
// monodromy traces.  The expansion at 1 is the at-0 expansion of the 0<->1
// exchanged data, the expansion at infinity that of the x<->1 exchanged data.
inline ConnectionResult connect(const ThetaParams& th, const MonodromyTraces& t) {
    auto wrap = [](const ThetaParams& thp, const MonodromyTraces& tp, Point pt) -> BranchData {
        try {
            return detail::branch_at(thp, tp, pt);
        } catch (const error& e) {
            fail(e.code(), std::string("at ") + point_name(pt) + ": " + e.what());
        }
    };
    ConnectionResult res;
    res.at0 = wrap(th, t, Point::Zero);
    res.at1 = wrap(theta_map_sigma01(th), trace_map_sigma01(t), Point::One);
    res.atInf = wrap(theta_map_sigmax1(th), trace_map_sigmax1_inverse(t), Point::Infinity);
    return res;
}

// ---------------------------------------------------------------------------
// Structured description of the first orders of a branch at its point.

struct LeadingTerm {
    cplx coefficient{};
    cplx exponent{};     // power of the local variable z
    int log_power = 0;   // power of ln z riding on the term
};

struct LeadingBehavior {
    Point point = Point::Zero;
    Regime regime = Regime::Generic;
    bool reciprocal = false;         // terms describe 1/S rather than S
    bool constant_is_free = false;   // r below is a free constant, not from monodromy
    std::vector<LeadingTerm> terms;
    std::string description;
};

// First orders of the branch in the local variable z (z = x at 0, 1 - x at
// 1, 1/x at infinity), with the standard wrappers y = S, y = 1 - S, y = x S.
inline LeadingBehavior leading_behavior(const ThetaParams& theta, const BranchData& b) {
    using detail::sq;
    LeadingBehavior out;
    out.point = b.point;
    out.regime = b.sigma.regime;
    const ThetaParams th = theta_at_point(theta, b.point);
    const PviCoefficients co = coefficients_from_theta(th);
    const char* wrapper = b.point == Point::Zero ? "y(x) = S(x)"
                          : b.point == Point::One ? "y(x) = 1 - S(z), z = 1 - x"
                                                  : "y(x) = x S(z), z = 1/x";
    const cplx sig = b.sigma.sigma;

    switch (b.sigma.regime) {
        case Regime::Generic:
        case Regime::Oscillatory: {
            const cplx B = (sq(th.theta0) - sq(th.thetax) + sq(sig)) / (2.0 * sq(sig));
            if (b.degenerate) {
                out.terms = {{B, 1.0, 0}, {-b.r / sig, 1.0 + sig, 0}};
                out.description = std::string(wrapper) +
                    "; small-power branch S(z) = B z - (r/sigma) z^(1+sigma) + O(z^2), "
                    "sigma coincides with +-(theta0 +- thetax) at this point";
            } else {
                const cplx a = b.sigma.regime == Regime::Generic
                                   ? b.a
                                   : 0.5 * b.A * std::exp(cplx(0.0, 1.0) * b.phi);
                out.terms = {{a, 1.0 - sig, 0}, {B, 1.0, 0}, {-b.r / sig, 1.0 + sig, 0}};
                out.description = std::string(wrapper) +
                    "; S(z) = a z^(1-sigma) + B z - (r/sigma) z^(1+sigma) + O(z^2)" +
                    (b.sigma.regime == Regime::Oscillatory
                         ? "; equivalently S(z) = z (iA sin(i sigma ln z + phi) + B + O(z))"
                         : "");
            }
            break;
        }
        case Regime::InverseOscillatory: {
            out.reciprocal = true;
            if (b.degenerate) {
                out.terms = {{b.B, 0.0, 0}, {-b.r / (1.0 - sig), 1.0 - sig, 0}};
                out.description = std::string(wrapper) +
                    "; S(z) = 1 / (B - (r/(1-sigma)) z^(1-sigma) + O(z)), degenerate "
                    "inverse branch";
            } else {
                const cplx e = std::exp(cplx(0.0, 1.0) * b.phi);
                out.terms = {{0.5 * b.A * e, sig - 1.0, 0},
                             {b.B, 0.0, 0},
                             {-0.5 * b.A / e, 1.0 - sig, 0}};
                out.description = std::string(wrapper) +
                    "; S(z) = 1 / (iA sin(i(1-sigma) ln z + phi) + B + O(z)), terms list "
                    "the denominator";
            }
            break;
        }
        case Regime::LogZero: {
            out.constant_is_free = true;
            const cplx beta = co.beta, delta = co.delta;
            if (std::abs(beta) < 1e-9 && std::abs(delta - 0.5) < 1e-9) {
                out.terms = {{b.r, 1.0, 0},
                             {0.5 * b.r * (b.r - 1.0) * (2.0 * co.gamma - 2.0 * co.alpha - 1.0), 2.0, 0}};
                out.description = std::string(wrapper) +
                    "; Taylor branch S(z) = r z + r(r-1)(2 gamma - 2 alpha - 1)/2 z^2 + O(z^3), "
                    "r free";
            } else if (std::abs(2.0 * beta - (2.0 * delta - 1.0)) < 1e-9) {
                out.terms = {{b.r, 1.0, 0}, {std::sqrt(-2.0 * beta), 1.0, 1}};
                out.description = std::string(wrapper) +
                    "; S(z) = z (r + sqrt(-2 beta) ln z) + O(z^2 ln^2 z), r free, "
                    "sqrt sign is a branch choice";
            } else {
                const cplx c = 0.25 * (1.0 + 2.0 * beta - 2.0 * delta);
                const cplx kappa = (4.0 * b.r + 2.0 * std::sqrt(-2.0 * beta))
                                   / (2.0 * delta - 2.0 * beta - 1.0);
                out.terms = {{c, 1.0, 2},
                             {2.0 * c * kappa, 1.0, 1},
                             {c * sq(kappa) + 2.0 * beta / (2.0 * beta + 1.0 - 2.0 * delta), 1.0, 0}};
                out.description = std::string(wrapper) +
                    "; S(z) = z ((1+2 beta-2 delta)/4 (ln z + kappa)^2 + 2 beta/(2 beta+1-2 delta))"
                    " + O(z^2 ln^3 z), r free inside kappa";
            }
            break;
        }
        case Regime::LogOne: {
            out.constant_is_free = true;
            const cplx alpha = co.alpha, gamma = co.gamma;
            if (std::abs(alpha) < 1e-9 && std::abs(gamma) < 1e-9) {
                out.terms = {{b.r, 0.0, 0}, {(1.0 - b.r) * (co.delta - co.beta), 1.0, 0}};
                out.description = std::string(wrapper) +
                    "; Taylor branch S(z) = r + (1-r)(delta-beta) z + O(z^2), r free";
            } else if (std::abs(alpha - gamma) < 1e-9) {
                const cplx sa = std::sqrt(2.0 * alpha);
                out.terms = {{1.0 / sa, 0.0, -1}, {-b.r / (2.0 * alpha), 0.0, -2}};
                out.description = std::string(wrapper) +
                    "; S(z) = 1/(sqrt(2 alpha) ln z) (1 - r/(sqrt(2 alpha) ln z) + O(ln^-2 z)), "
                    "r free, sqrt sign is a branch choice";
            } else {
                const cplx d = gamma - alpha;
                out.terms = {{2.0 / d, 0.0, -2},
                             {2.0 * (4.0 * b.r + std::sqrt(8.0 * alpha)) / sq(d), 0.0, -3}};
                out.description = std::string(wrapper) +
                    "; S(z) = 2/((gamma-alpha) ln^2 z) (1 + (4r + sqrt(8 alpha))/((gamma-alpha) ln z)"
                    " + O(ln^-2 z)), r free";
            }
            break;
        }
    }
    return out;
}

}  // namespace pvi
