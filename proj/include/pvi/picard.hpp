#pragma once

// The closed-form solution family at theta = (0, 0, 0, 1): the elliptic
// representation with vanishing correction, y = p(nu1 w1 + nu2 w2) + (1+x)/3,
// and its catalog of critical behaviors indexed by the path parameter calV.

#include <cmath>

#include "errors.hpp"
#include "special.hpp"

namespace pvi {

struct PicardSpec {
    cplx nu1{};
    cplx nu2{};
    int N = 0;    // period shift: the same transcendent carries different
                  // behaviors on the domains selected by N
};

// p is 2 omega2 - periodic in u, so nu2 enters only through nu2 + 2N; the
// shift selects which Fourier domain the evaluation lives in.
inline cplx picard_solution(const PicardSpec& s, cplx x) {
    const HalfPeriods hp = half_periods(x);
    const cplx u = s.nu1 * hp.omega1 + (s.nu2 + 2.0 * cplx(s.N)) * hp.omega2;
    return weierstrass_p_fourier(u, hp) + (1.0 + x) / 3.0;
}

enum class PicardForm {
    Power,               // coefficient * x^exponent
    SinSquareTimesX,     // x * sin^2(slope ln(x/16) + offset)
    InverseSinSquare,    // sin^-2(slope ln(x/16) + offset [+ slope (F1/F + ln 16)])
};

struct PicardLeading {
    PicardForm form = PicardForm::Power;
    cplx coefficient{};
    cplx exponent{};
    cplx slope{};
    cplx offset{};
    bool hypergeometric_correction = false;
};

// Critical behavior as x -> 0 along the path selected by calV in [-2, 2].
// The negative-calV cases are the printed reductions to the nonnegative ones
// with N -> N+1; the boundary cases calV in {0, 1, 2} are the sin^2 forms
// (exact comparison intended: they are discrete catalog entries).
inline PicardLeading picard_leading(const PicardSpec& spec, double calV) {
    if (!(calV >= -2.0 && calV <= 2.0)) fail(errc::bad_input, "calV outside [-2, 2]");
    PicardSpec s = spec;
    double v = calV;
    if (v < 0.0) {
        s.N += 1;
        v += 2.0;
    }
    const cplx m = s.nu2 + 2.0 * cplx(s.N);
    PicardLeading out;
    if (v == 0.0) {
        out.form = PicardForm::InverseSinSquare;
        out.slope = cplx(0.0, -0.5) * m;
        out.offset = 0.5 * pi * s.nu1;
        out.hypergeometric_correction = true;
    } else if (v < 1.0) {
        out.form = PicardForm::Power;
        out.exponent = m;
        out.coefficient = -0.25 * std::exp(cplx(0.0, pi) * s.nu1) * std::pow(cplx(16.0), 1.0 - m);
    } else if (v == 1.0) {
        out.form = PicardForm::SinSquareTimesX;
        out.slope = cplx(0.0, 0.5) * (1.0 - m);
        out.offset = 0.5 * pi * s.nu1;
    } else if (v < 2.0) {
        out.form = PicardForm::Power;
        out.exponent = 2.0 - m;
        out.coefficient = -0.25 * std::exp(cplx(0.0, -pi) * s.nu1) * std::pow(cplx(16.0), m - 1.0);
    } else {
        out.form = PicardForm::InverseSinSquare;
        out.slope = cplx(0.0, 0.5) * (2.0 - m);
        out.offset = 0.5 * pi * s.nu1;
    }
    return out;
}

inline cplx leading_value(const PicardLeading& l, cplx x) {
    switch (l.form) {
        case PicardForm::Power:
            return l.coefficient * std::pow(x, l.exponent);
        case PicardForm::SinSquareTimesX: {
            const cplx sn = std::sin(l.slope * std::log(x / 16.0) + l.offset);
            return x * sn * sn;
        }
        case PicardForm::InverseSinSquare: {
            cplx arg = l.slope * std::log(x / 16.0) + l.offset;
            if (l.hypergeometric_correction)
                arg += l.slope * (hyper_F1(x) / hyper_F(x) + std::log(cplx(16.0)));
            const cplx sn = std::sin(arg);
            if (std::abs(sn) < 1e-10)
                fail(errc::near_pole, "leading-form denominator vanishes here");
            return 1.0 / (sn * sn);
        }
    }
    fail(errc::internal_inconsistency, "unhandled leading form");
}

}  // namespace pvi
