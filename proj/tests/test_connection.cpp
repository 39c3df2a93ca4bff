#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pvi/connection.hpp"
#include "support/matrix_triple.hpp"

using namespace pvi;
using Catch::Approx;

namespace {

double rel(cplx got, cplx want) {
    const double scale = std::max(1.0, std::abs(want));
    return std::abs(got - want) / scale;
}

struct Sampler {
    std::mt19937 rng;
    explicit Sampler(unsigned seed) : rng(seed) {}
    double u() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }
    cplx theta() { return cplx(0.15 + 0.6 * u(), 0.3 * (u() - 0.5)); }
    ThetaParams thetas() { return ThetaParams{theta(), theta(), theta(), theta()}; }
    cplx sigma_generic() { return cplx(0.25 + 0.5 * u(), 0.3 * (u() - 0.5)); }
    cplx sigma_inverse() { return cplx(1.0, 0.2 + u()); }
    cplx rvalue() {
        const double mag = std::pow(10.0, u() * 1.4 - 0.7);
        const double arg = 2.0 * pi * u();
        return mag * std::exp(cplx(0.0, arg));
    }
};

double trace_diff(const MonodromyTraces& a, const MonodromyTraces& b) {
    double m = 0.0;
    m = std::max(m, std::abs(a.p0x - b.p0x));
    m = std::max(m, std::abs(a.p01 - b.p01));
    m = std::max(m, std::abs(a.px1 - b.px1));
    return m;
}

}  // namespace

TEST_CASE("r and the trace parametrization are mutually inverse (generic strip)") {
    Sampler s(2026u);
    int done = 0;
    for (int k = 0; k < 120 && done < 100; ++k) {
        const ThetaParams th = s.thetas();
        const cplx sigma = s.sigma_generic();
        const cplx r0 = s.rvalue();
        MonodromyTraces t;
        try {
            t = traces_from_r(th, sigma, r0);
        } catch (const error&) {
            continue;   // sampled onto an excluded locus
        }
        CAPTURE(k, sigma, r0);
        REQUIRE(std::abs(cubic_residual(t)) < 1e-8);
        const cplx r1 = r_generic(th, sigma, t.p01, t.px1);
        REQUIRE(rel(r1, r0) < 1e-8);
        ++done;
    }
    REQUIRE(done == 100);
}

TEST_CASE("r and the trace parametrization are mutually inverse (inverse regime)") {
    Sampler s(2027u);
    int done = 0;
    for (int k = 0; k < 120 && done < 100; ++k) {
        const ThetaParams th = s.thetas();
        const cplx sigma = s.sigma_inverse();
        const cplx r0 = s.rvalue();
        MonodromyTraces t;
        try {
            t = traces_from_r_inverse(th, sigma, r0);
        } catch (const error&) {
            continue;
        }
        CAPTURE(k, sigma, r0);
        REQUIRE(std::abs(cubic_residual(t)) < 1e-8);
        REQUIRE(std::abs(t.p0x - 2.0 * std::cos(pi * sigma)) < 1e-10);
        const cplx r1 = r_inverse_oscillatory(th, sigma, t.p01, t.px1);
        REQUIRE(rel(r1, r0) < 1e-8);
        ++done;
    }
    REQUIRE(done == 100);
}

TEST_CASE("inverse-regime r equals the transformed direct formula") {
    // The Re sigma = 1 formula is the direct one evaluated on the
    // fractional-linear transform of the data: theta -> (thetainf-1, theta1,
    // thetax, theta0+1), sigma -> 1 - sigma, p01 -> -p01, px1 -> px1.
    Sampler s(2028u);
    int done = 0;
    for (int k = 0; k < 130 && done < 100; ++k) {
        const ThetaParams th = s.thetas();
        const cplx sigma = s.sigma_inverse();
        const cplx r0 = s.rvalue();
        cplx lhs, rhs;
        try {
            const MonodromyTraces t = traces_from_r_inverse(th, sigma, r0);
            lhs = r_inverse_oscillatory(th, sigma, t.p01, t.px1);
            rhs = r_generic(theta_map_fractional_linear(th), 1.0 - sigma, -t.p01, t.px1);
        } catch (const error&) {
            continue;
        }
        CAPTURE(k, sigma);
        REQUIRE(rel(lhs, rhs) < 1e-10);
        ++done;
    }
    REQUIRE(done == 100);
}

TEST_CASE("sigma flip fixes the traces when r is adjusted accordingly") {
    // The branch is unchanged under (sigma, r) -> (-sigma, sigma a) with
    // a the coefficient of z^{1-sigma}; the trace parametrization must agree.
    Sampler s(2029u);
    int done = 0;
    for (int k = 0; k < 80 && done < 60; ++k) {
        const ThetaParams th = s.thetas();
        const cplx sigma = s.sigma_generic();
        const cplx r0 = s.rvalue();
        MonodromyTraces t1, t2;
        try {
            t1 = traces_from_r(th, sigma, r0);
            const cplx rf = sigma * generic_a(th, sigma, r0);
            t2 = traces_from_r(th, -sigma, rf);
        } catch (const error&) {
            continue;
        }
        CAPTURE(k, sigma, r0);
        REQUIRE(trace_diff(t1, t2) < 1e-10);
        ++done;
    }
    REQUIRE(done == 60);
}

TEST_CASE("sigma -> 2 - sigma fixes the traces in the inverse regime") {
    Sampler s(2030u);
    int done = 0;
    for (int k = 0; k < 80 && done < 60; ++k) {
        const ThetaParams th = s.thetas();
        const cplx sigma = s.sigma_inverse();
        const cplx r0 = s.rvalue();
        MonodromyTraces t1, t2;
        try {
            t1 = traces_from_r_inverse(th, sigma, r0);
            const ThetaParams tht = theta_map_fractional_linear(th);
            const cplx rf = (1.0 - sigma) * generic_a(tht, 1.0 - sigma, r0);
            t2 = traces_from_r_inverse(th, 2.0 - sigma, rf);
        } catch (const error&) {
            continue;
        }
        CAPTURE(k, sigma, r0);
        REQUIRE(trace_diff(t1, t2) < 1e-10);
        ++done;
    }
    REQUIRE(done == 60);
}

TEST_CASE("Frobenius-manifold closed forms match the general formulas") {
    Sampler s(2031u);
    const ThetaParams th0{0.0, 0.0, 0.0, cplx(0.0)};

    SECTION("direct formula") {
        int done = 0;
        for (int k = 0; k < 60 && done < 40; ++k) {
            ThetaParams th = th0;
            th.thetainf = s.theta() + 0.2;
            const cplx sigma = s.sigma_generic();
            const cplx p01 = 2.0 * cplx(s.u() - 0.5, s.u() - 0.5);
            const cplx px1 = 2.0 * cplx(s.u() - 0.5, s.u() - 0.5);
            cplx general, compact;
            try {
                general = r_generic(th, sigma, p01, px1);
                compact = frobenius_r(th.thetainf, sigma, p01, px1);
            } catch (const error&) {
                continue;
            }
            CAPTURE(k, th.thetainf, sigma);
            REQUIRE(rel(compact, general) < 1e-9);
            ++done;
        }
        REQUIRE(done == 40);
    }

    SECTION("inverse-regime printed form") {
        // Compact closed form of the Re sigma = 1 formula at theta = (0,0,0,ti).
        auto frob_inverse = [](cplx ti, cplx sigma, cplx p01, cplx px1) {
            const cplx sn = std::sin(pi * sigma);
            const cplx pref = std::pow(cplx(16.0), sigma)
                              * detail::sq(complex_gamma(1.0 + 0.5 * (ti - sigma)))
                              * detail::sq(complex_gamma(2.0 - 0.5 * (ti + sigma)))
                              / (4.0 * std::pow(1.0 - sigma, 3) * sn * sn
                                 * detail::sq(detail::sq(complex_gamma(0.5 * (1.0 - sigma)))));
            const cplx eim = std::exp(cplx(0.0, -pi) * sigma);
            const cplx bracket = (1.0 + std::cos(pi * ti)) * (1.0 - eim)
                                 - cplx(0.0, 0.5) * sn * (p01 + px1 * eim);
            return pref * bracket;
        };
        int done = 0;
        for (int k = 0; k < 60 && done < 40; ++k) {
            ThetaParams th = th0;
            th.thetainf = s.theta() + 0.2;
            const cplx sigma = s.sigma_inverse();
            const cplx p01 = 2.0 * cplx(s.u() - 0.5, s.u() - 0.5);
            const cplx px1 = 2.0 * cplx(s.u() - 0.5, s.u() - 0.5);
            cplx general, compact;
            try {
                general = r_inverse_oscillatory(th, sigma, p01, px1);
                compact = frob_inverse(th.thetainf, sigma, p01, px1);
            } catch (const error&) {
                continue;
            }
            CAPTURE(k, th.thetainf, sigma);
            REQUIRE(rel(compact, general) < 1e-9);
            ++done;
        }
        REQUIRE(done == 40);
    }
}

TEST_CASE("r extends continuously onto the degenerate loci") {
    const ThetaParams th{cplx(0.31, 0.05), cplx(0.27, -0.04), cplx(0.42, 0.02), cplx(0.55, 0.01)};
    const cplx p01(0.4, 0.3), px1(-0.7, 0.2);

    for (cplx star : {th.theta0 + th.thetax, th.theta0 - th.thetax}) {
        CAPTURE(star);
        const cplx r_at = r_generic(th, star, p01, px1);
        const cplx d3 = r_generic(th, star + 1e-3, p01, px1) - r_at;
        const cplx d4 = r_generic(th, star + 1e-4, p01, px1) - r_at;
        const cplx d5 = r_generic(th, star + 1e-5, p01, px1) - r_at;
        REQUIRE(std::abs(d4) < 0.2 * std::abs(d3));
        REQUIRE(std::abs(d5) < 0.2 * std::abs(d4));
        REQUIRE(std::abs(d5) < 1e-3 * std::max(1.0, std::abs(r_at)));
    }
}

TEST_CASE("trace coefficients fall back to an offset near their singular loci") {
    const ThetaParams th{0.31, 0.27, 0.42, 0.55};
    const cplx star = th.theta0 + th.thetax;   // singular locus of the G machinery
    const GCoefficients g = g_coefficients(th, star);
    REQUIRE(g.reduced_precision);
    const GCoefficients g_near = g_coefficients(th, star + 1e-5);
    REQUIRE_FALSE(g_near.reduced_precision);
    REQUIRE(std::abs(g.G2 - g_near.G2) < 1e-2 * std::max(1.0, std::abs(g_near.G2)));
}

TEST_CASE("connect reproduces its input traces at every critical point") {
    Sampler s(2040u);
    int done = 0;
    for (unsigned seed = 1; seed <= 60 && done < 25; ++seed) {
        pvi::testing::MatrixTriple m;
        MonodromyTraces t;
        ConnectionResult res;
        try {
            m = pvi::testing::random_matrix_triple(cplx(0.15 + 0.6 * s.u(), 0.08 * (s.u() - 0.5)),
                                                   cplx(0.15 + 0.6 * s.u(), 0.08 * (s.u() - 0.5)),
                                                   cplx(0.15 + 0.6 * s.u(), 0.08 * (s.u() - 0.5)),
                                                   seed);
            t = pvi::testing::traces_of(m);
            res = connect(m.theta, t);
        } catch (const error&) {
            continue;   // regime or locus outside the generic setup
        }
        CAPTURE(seed);

        auto check = [&](const BranchData& b, const ThetaParams& thp, const MonodromyTraces& tp) {
            MonodromyTraces back;
            try {
                if (b.sigma.regime == Regime::InverseOscillatory)
                    back = traces_from_r_inverse(thp, b.sigma.sigma, b.r);
                else
                    back = traces_from_r(thp, b.sigma.sigma, b.r);
            } catch (const error&) {
                return false;
            }
            REQUIRE(trace_diff(back, tp) < 1e-7);
            return true;
        };
        if (check(res.at0, m.theta, t) &&
            check(res.at1, theta_map_sigma01(m.theta), trace_map_sigma01(t)) &&
            check(res.atInf, theta_map_sigmax1(m.theta), trace_map_sigmax1_inverse(t)))
            ++done;
    }
    REQUIRE(done == 25);
}

TEST_CASE("oscillatory amplitude, offset and phase") {
    SECTION("A^2 + B^2 sum rules") {
        Sampler s(2032u);
        for (int k = 0; k < 50; ++k) {
            const ThetaParams th{0.15 + 0.6 * s.u(), 0.15 + 0.6 * s.u(),
                                 0.15 + 0.6 * s.u(), 0.15 + 0.6 * s.u()};
            CriticalExponent ce;
            ce.sigma = cplx(0.0, 0.2 + s.u());
            ce.regime = Regime::Oscillatory;
            AB ab = coefficients_AB(th, ce);
            REQUIRE(rel(ab.A * ab.A + ab.B * ab.B,
                        detail::sq(th.theta0) / detail::sq(ce.sigma)) < 1e-12);

            ce.sigma = cplx(1.0, 0.2 + s.u());
            ce.regime = Regime::InverseOscillatory;
            ab = coefficients_AB(th, ce);
            const cplx oms = 1.0 - ce.sigma;
            REQUIRE(rel(ab.A * ab.A + ab.B * ab.B,
                        detail::sq(th.thetainf - 1.0) / detail::sq(oms)) < 1e-12);
        }
    }

    SECTION("special values of B") {
        CriticalExponent ce;
        ce.sigma = cplx(0.0, 0.7);
        ce.regime = Regime::Oscillatory;
        const AB ab = coefficients_AB(ThetaParams{0.4, 0.4, 0.3, 0.6}, ce);
        REQUIRE(rel(ab.B, 0.5) < 1e-14);

        CriticalExponent ci;
        ci.sigma = cplx(1.0, 0.9);
        ci.regime = Regime::InverseOscillatory;
        const AB abi = coefficients_AB(ThetaParams{0.4, 0.3, -0.35, 0.65}, ci);
        REQUIRE(rel(abi.B, 0.5) < 1e-14);
    }

    SECTION("wrong regime is rejected") {
        CriticalExponent ce;
        ce.sigma = cplx(0.5, 0.0);
        ce.regime = Regime::Generic;
        try {
            coefficients_AB(ThetaParams{0.3, 0.3, 0.3, 0.3}, ce);
            FAIL("expected wrong_regime");
        } catch (const error& e) {
            REQUIRE(e.code() == errc::wrong_regime);
        }
    }

    SECTION("sin form reproduces the three-power block") {
        // x (iA sin(i sigma ln x + phi) + B) = a x^{1-sigma} + B x - (r/sigma) x^{1+sigma}
        const ThetaParams th{0.35, 0.52, 0.44, 0.61};
        const cplx sigma(0.0, 0.55);
        const cplx r0(0.4, -0.2);
        const MonodromyTraces t = traces_from_r(th, sigma, r0);
        const BranchData b = detail::branch_at(th, t, Point::Zero);
        REQUIRE(b.sigma.regime == Regime::Oscillatory);
        REQUIRE(rel(b.r, r0) < 1e-9);

        const cplx I(0.0, 1.0);
        for (double x : {0.02, 0.005}) {
            const cplx lx = std::log(cplx(x));
            const cplx sinform = x * (I * b.A * std::sin(I * b.sigma.sigma * lx + b.phi) + b.B);
            const cplx a = 0.5 * b.A * std::exp(I * b.phi);
            const cplx block = a * std::pow(cplx(x), 1.0 - b.sigma.sigma)
                               + b.B * x
                               - (b.r / b.sigma.sigma) * std::pow(cplx(x), 1.0 + b.sigma.sigma);
            REQUIRE(std::abs(sinform - block) < 1e-13);
        }

        // the phase convention ties a to the closed-form coefficient
        const cplx a = 0.5 * b.A * std::exp(I * b.phi);
        REQUIRE(rel(a, generic_a(th, b.sigma.sigma, b.r)) < 1e-10);

        // (A, phi) -> (-A, phi + pi) and (sigma, phi) -> (-sigma, -phi + pi)
        // leave the sin form unchanged
        const cplx lx = std::log(cplx(0.01));
        const cplx base = I * b.A * std::sin(I * b.sigma.sigma * lx + b.phi) + b.B;
        const cplx flipA = I * (-b.A) * std::sin(I * b.sigma.sigma * lx + b.phi + pi) + b.B;
        const cplx flipS = I * b.A * std::sin(I * (-b.sigma.sigma) * lx + (-b.phi + pi)) + b.B;
        REQUIRE(std::abs(flipA - base) < 1e-12);
        REQUIRE(std::abs(flipS - base) < 1e-12);
    }
}

TEST_CASE("leading behavior in the power regimes") {
    SECTION("generic three-term block") {
        const ThetaParams th{0.31, 0.44, 0.39, 0.72};
        const cplx sigma(0.52, 0.08);
        const cplx r0(0.8, 0.25);
        const MonodromyTraces t = traces_from_r(th, sigma, r0);
        const BranchData b = detail::branch_at(th, t, Point::Zero);
        REQUIRE(b.sigma.regime == Regime::Generic);
        REQUIRE_FALSE(b.degenerate);
        const LeadingBehavior lb = leading_behavior(th, b);
        REQUIRE(lb.terms.size() == 3);
        REQUIRE(rel(lb.terms[0].coefficient, generic_a(th, sigma, r0)) < 1e-9);
        REQUIRE(rel(lb.terms[0].exponent, 1.0 - sigma) < 1e-12);
        REQUIRE(rel(lb.terms[2].coefficient, -r0 / sigma) < 1e-9);
        REQUIRE_FALSE(lb.reciprocal);
        REQUIRE_FALSE(lb.constant_is_free);
    }

    SECTION("degenerate small-power branch") {
        const ThetaParams th{0.3, 0.35, 0.4, 0.6};
        const cplx sigma = th.theta0 + th.thetax;
        BranchData b;
        b.point = Point::Zero;
        b.sigma = classify_sigma(sigma);
        b.r = cplx(0.5, -0.1);
        b.degenerate = true;
        const LeadingBehavior lb = leading_behavior(th, b);
        REQUIRE(lb.terms.size() == 2);
        REQUIRE(rel(lb.terms[0].coefficient, th.theta0 / (th.theta0 + th.thetax)) < 1e-12);
        REQUIRE(rel(lb.terms[0].exponent, 1.0) < 1e-14);
        REQUIRE(rel(lb.terms[1].coefficient, -b.r / sigma) < 1e-12);
        REQUIRE(rel(lb.terms[1].exponent, 1.0 + sigma) < 1e-12);
    }

    SECTION("degenerate flag is set by the pipeline") {
        const ThetaParams th{0.3, 0.35, 0.4, 0.6};
        const cplx sigma = th.theta0 + th.thetax;
        const MonodromyTraces t = traces_from_r(th, sigma, cplx(0.5, -0.1));
        const BranchData b = detail::branch_at(th, t, Point::Zero);
        REQUIRE(b.degenerate);
    }

    SECTION("inverse regime lists the reciprocal block") {
        const ThetaParams th{0.35, 0.52, 0.44, 0.61};
        const cplx sigma(1.0, 0.6);
        const cplx r0(0.9, 0.3);
        const MonodromyTraces t = traces_from_r_inverse(th, sigma, r0);
        const BranchData b = detail::branch_at(th, t, Point::Zero);
        REQUIRE(b.sigma.regime == Regime::InverseOscillatory);
        const LeadingBehavior lb = leading_behavior(th, b);
        REQUIRE(lb.reciprocal);
        REQUIRE(lb.terms.size() == 3);
        // denominator = iA sin(i(1-sigma) ln z + phi) + B at a sample point
        const cplx I(0.0, 1.0);
        const double z = 0.01;
        const cplx lz = std::log(cplx(z));
        const cplx direct = I * b.A * std::sin(I * (1.0 - sigma) * lz + b.phi) + b.B;
        cplx fromterms = 0.0;
        for (const auto& term : lb.terms)
            fromterms += term.coefficient * std::pow(cplx(z), term.exponent);
        REQUIRE(std::abs(direct - fromterms) < 1e-12);
    }
}

TEST_CASE("leading behavior in the logarithmic and Taylor regimes") {
    SECTION("log branch at sigma = 0") {
        const ThetaParams th{0.3, 0.52, 0.4, 0.7};   // theta0^2 != thetax^2
        const PviCoefficients co = coefficients_from_theta(th);
        BranchData b;
        b.point = Point::Zero;
        b.sigma = classify_sigma(cplx(0.0));
        b.r = cplx(0.35, 0.1);
        const LeadingBehavior lb = leading_behavior(th, b);
        REQUIRE(lb.regime == Regime::LogZero);
        REQUIRE(lb.constant_is_free);
        REQUIRE(lb.terms.size() == 3);
        REQUIRE(lb.terms[0].log_power == 2);
        REQUIRE(rel(lb.terms[0].coefficient,
                    0.25 * (1.0 + 2.0 * co.beta - 2.0 * co.delta)) < 1e-12);
    }

    SECTION("log-linear branch when 2 beta = 2 delta - 1") {
        const ThetaParams th{0.4, 0.4, 0.3, 0.65};
        BranchData b;
        b.point = Point::Zero;
        b.sigma = classify_sigma(cplx(0.0));
        b.r = cplx(0.7);
        const LeadingBehavior lb = leading_behavior(th, b);
        REQUIRE(lb.terms.size() == 2);
        REQUIRE(lb.terms[1].log_power == 1);
        // sqrt(-2 beta) = theta0
        REQUIRE(rel(lb.terms[1].coefficient, th.theta0) < 1e-12);
        REQUIRE(rel(lb.terms[0].coefficient, b.r) < 1e-14);
    }

    SECTION("Taylor branch at sigma = 1 with alpha = gamma = 0") {
        const ThetaParams th{0.3, 0.4, 0.0, 1.0};
        const PviCoefficients co = coefficients_from_theta(th);
        BranchData b;
        b.point = Point::Zero;
        b.sigma = classify_sigma(cplx(1.0));
        b.r = cplx(0.25);
        const LeadingBehavior lb = leading_behavior(th, b);
        REQUIRE(lb.regime == Regime::LogOne);
        REQUIRE(lb.terms.size() == 2);
        REQUIRE(rel(lb.terms[0].coefficient, 0.25) < 1e-14);
        REQUIRE(rel(lb.terms[1].coefficient, 0.75 * (co.delta - co.beta)) < 1e-12);
    }

    SECTION("inverse-log branch at sigma = 1 with alpha = gamma") {
        const ThetaParams th{0.3, 0.4, 0.5, 1.5};   // theta1^2 = (thetainf-1)^2
        const PviCoefficients co = coefficients_from_theta(th);
        REQUIRE(std::abs(co.alpha - co.gamma) < 1e-14);
        BranchData b;
        b.point = Point::Zero;
        b.sigma = classify_sigma(cplx(1.0));
        b.r = cplx(0.4);
        const LeadingBehavior lb = leading_behavior(th, b);
        REQUIRE(lb.terms.size() == 2);
        REQUIRE(lb.terms[0].log_power == -1);
        REQUIRE(rel(lb.terms[0].coefficient, 1.0 / std::sqrt(2.0 * co.alpha)) < 1e-12);
    }
}

TEST_CASE("error reporting") {
    const ThetaParams th{0.3, 0.4, 0.5, 0.6};

    SECTION("zero r") {
        try {
            traces_from_r(th, cplx(0.5), cplx(0.0));
            FAIL("expected zero_r");
        } catch (const error& e) {
            REQUIRE(e.code() == errc::zero_r);
        }
    }

    SECTION("sigma = 0 has no generic r") {
        try {
            r_generic(th, cplx(0.0), cplx(0.1), cplx(0.2));
            FAIL("expected non_generic_data");
        } catch (const error& e) {
            REQUIRE(e.code() == errc::non_generic_data);
        }
    }

    SECTION("vanishing sin(pi thetax)") {
        try {
            g_coefficients(ThetaParams{0.3, 0.0, 0.5, 0.6}, cplx(0.4));
            FAIL("expected singular_denominator");
        } catch (const error& e) {
            REQUIRE(e.code() == errc::singular_denominator);
        }
    }

    SECTION("connect rejects the logarithmic regimes with a point label") {
        const MonodromyTraces t = make_traces(th, cplx(2.0), cplx(0.3), cplx(0.4));
        try {
            connect(th, t);
            FAIL("expected unsupported_regime");
        } catch (const error& e) {
            REQUIRE(e.code() == errc::unsupported_regime);
            REQUIRE(std::string(e.what()).find("at zero") != std::string::npos);
        }
    }
}
