#pragma once

// Full critical expansions: the double-graded recursion for
// y = sum_{n>=1} x^n sum_{|m|<=n} c_{nm} x^{m sigma}, its inverse-regime
// (denominator) variant, evaluation and residual checks, and the
// oscillatory-bridge rewrite into a sin^2 phase series.

#include <array>
#include <map>
#include <string>
#include <utility>
#include <limits>
#include <vector>

#include "connection.hpp"
#include "errors.hpp"
#include "monodromy.hpp"
#include "special.hpp"

namespace pvi {

inline constexpr int series_default_order = 8;
inline constexpr int series_order_cap = 12;
inline constexpr double series_validity_radius = 0.05;
inline constexpr double series_audit_tol = 1e-10;

struct SeriesExpansion {
    Point point = Point::Zero;
    Regime regime = Regime::Generic;
    cplx sigma{};                              // exponent of the original classification
    cplx r{};
    int order = 0;                             // N
    std::map<std::pair<int, int>, cplx> coeffs;  // (n, m) -> c_nm (or d_nm, inverse regime)
    ThetaParams theta{};                       // equation solved by the evaluated function
};

namespace detail {

// Triangular double-graded coefficient table, |m| <= n <= cap.  The cone is
// closed under products, and the Euler operator x d/dx acts diagonally,
// which keeps the whole recursion in non-negative integer grades.
class Grid {
public:
    explicit Grid(int cap) : cap_(cap), rows_(cap + 1) {
        for (int n = 0; n <= cap_; ++n) rows_[n].assign(2 * n + 1, cplx(0.0));
    }
    int cap() const { return cap_; }
    cplx get(int n, int m) const {
        if (n < 0 || n > cap_ || std::abs(m) > n) return cplx(0.0);
        return rows_[n][m + n];
    }
    void set(int n, int m, cplx v) { rows_[n][m + n] = v; }
    void add(int n, int m, cplx v) { rows_[n][m + n] += v; }

    Grid& operator+=(const Grid& o) {
        for (int n = 0; n <= cap_; ++n)
            for (int m = -n; m <= n; ++m) rows_[n][m + n] += o.get(n, m);
        return *this;
    }
    Grid& operator-=(const Grid& o) {
        for (int n = 0; n <= cap_; ++n)
            for (int m = -n; m <= n; ++m) rows_[n][m + n] -= o.get(n, m);
        return *this;
    }
    Grid& operator*=(cplx s) {
        for (auto& row : rows_)
            for (auto& v : row) v *= s;
        return *this;
    }

private:
    int cap_;
    std::vector<std::vector<cplx>> rows_;
};

inline Grid operator+(Grid a, const Grid& b) { a += b; return a; }
inline Grid operator-(Grid a, const Grid& b) { a -= b; return a; }
inline Grid operator*(cplx s, Grid a) { a *= s; return a; }

inline Grid gmul(const Grid& a, const Grid& b) {
    const int cap = std::min(a.cap(), b.cap());
    Grid out(cap);
    for (int na = 0; na <= cap; ++na)
        for (int ma = -na; ma <= na; ++ma) {
            const cplx ca = a.get(na, ma);
            if (ca == cplx(0.0)) continue;
            for (int nb = 0; nb + na <= cap; ++nb)
                for (int mb = -nb; mb <= nb; ++mb) {
                    const cplx cb = b.get(nb, mb);
                    if (cb == cplx(0.0)) continue;
                    out.add(na + nb, ma + mb, ca * cb);
                }
        }
    return out;
}

inline Grid geuler(const Grid& a, cplx sigma) {   // x d/dx
    Grid out(a.cap());
    for (int n = 0; n <= a.cap(); ++n)
        for (int m = -n; m <= n; ++m)
            out.set(n, m, (cplx(n) + cplx(m) * sigma) * a.get(n, m));
    return out;
}

inline Grid gconst(cplx v, int cap) {
    Grid out(cap);
    out.set(0, 0, v);
    return out;
}

inline Grid gvar_x(int cap) {
    Grid out(cap);
    out.set(1, 0, cplx(1.0));
    return out;
}

inline Grid gresize(const Grid& a, int cap) {
    Grid out(cap);
    const int top = std::min(cap, a.cap());
    for (int n = 0; n <= top; ++n)
        for (int m = -n; m <= n; ++m) out.set(n, m, a.get(n, m));
    return out;
}

// The seven summands of the master polynomial: PVI times its denominator
// 2y(y-1)(y-x)x^2(x-1)^2, written in the Euler variables Y1 = x y',
// Y2 = x^2 y''.  Kept separate so level residuals can be compared against
// the cancellation scale of the level.
struct MasterTerms {
    std::array<Grid, 7> t;
    explicit MasterTerms(int cap) : t{Grid(cap), Grid(cap), Grid(cap), Grid(cap),
                                      Grid(cap), Grid(cap), Grid(cap)} {}
    cplx total(int n, int m) const {
        cplx s = 0.0;
        for (const auto& g : t) s += g.get(n, m);
        return s;
    }
};

inline MasterTerms master_terms(const Grid& Yin, cplx sigma, const PviCoefficients& co, int cap) {
    const Grid Y = gresize(Yin, cap);
    const Grid X = gvar_x(cap);
    const Grid one = gconst(1.0, cap);
    const Grid U = geuler(Y, sigma);
    const Grid W = geuler(U, sigma) - U;

    const Grid ym1 = Y - one;
    const Grid ymx = Y - X;
    const Grid xm1 = X - one;
    const Grid xm1sq = gmul(xm1, xm1);
    const Grid A2 = gmul(Y, ym1);
    const Grid C = gmul(A2, ymx);
    const Grid bracket2 = 3.0 * gmul(Y, Y) - 2.0 * gmul(one + X, Y) + X;
    const Grid bracket3 = gmul(ymx, xm1sq) + gmul(ymx, gmul(X, xm1)) + gmul(X, xm1sq);
    const Grid E5 = gmul(ym1, ymx);
    const Grid E6 = gmul(Y, ymx);

    MasterTerms mt(cap);
    mt.t[0] = 2.0 * gmul(gmul(C, xm1sq), W);
    mt.t[1] = cplx(-1.0) * gmul(gmul(xm1sq, bracket2), gmul(U, U));
    mt.t[2] = 2.0 * gmul(gmul(A2, bracket3), U);
    mt.t[3] = (-2.0 * co.alpha) * gmul(C, C);
    mt.t[4] = (-2.0 * co.beta) * gmul(X, gmul(E5, E5));
    mt.t[5] = (-2.0 * co.gamma) * gmul(xm1, gmul(E6, E6));
    mt.t[6] = (-2.0 * co.delta) * gmul(gmul(X, xm1), gmul(A2, A2));
    return mt;
}

inline Grid gabs(const Grid& a) {
    Grid out(a.cap());
    for (int n = 0; n <= a.cap(); ++n)
        for (int m = -n; m <= n; ++m) out.set(n, m, cplx(std::abs(a.get(n, m))));
    return out;
}

inline Grid geuler_mag(const Grid& a, cplx sigma) {
    Grid out(a.cap());
    for (int n = 0; n <= a.cap(); ++n)
        for (int m = -n; m <= n; ++m)
            out.set(n, m, std::abs(cplx(n) + cplx(m) * sigma) * a.get(n, m));
    return out;
}

// Magnitude shadow of master_terms: same convolution structure with every
// input replaced by its entrywise modulus and every subtraction by an
// addition.  The result bounds the total magnitude accumulated while forming
// a level value and is the honest cancellation scale for the audit.
inline Grid master_scale(const Grid& Yin, cplx sigma, const PviCoefficients& co, int cap) {
    const Grid Y = gabs(gresize(Yin, cap));
    const Grid X = gvar_x(cap);
    const Grid one = gconst(1.0, cap);
    const Grid U = geuler_mag(Y, sigma);
    const Grid W = geuler_mag(U, sigma) + U;

    const Grid yp1 = Y + one;
    const Grid ypx = Y + X;
    const Grid xp1 = X + one;
    const Grid xp1sq = gmul(xp1, xp1);
    const Grid A2 = gmul(Y, yp1);
    const Grid C = gmul(A2, ypx);
    const Grid bracket2 = 3.0 * gmul(Y, Y) + 2.0 * gmul(one + X, Y) + X;
    const Grid bracket3 = gmul(ypx, xp1sq) + gmul(ypx, gmul(X, xp1)) + gmul(X, xp1sq);
    const Grid E5 = gmul(yp1, ypx);
    const Grid E6 = gmul(Y, ypx);

    Grid s = 2.0 * gmul(gmul(C, xp1sq), W);
    s += gmul(gmul(xp1sq, bracket2), gmul(U, U));
    s += 2.0 * gmul(gmul(A2, bracket3), U);
    s += (2.0 * std::abs(co.alpha)) * gmul(C, C);
    s += (2.0 * std::abs(co.beta)) * gmul(X, gmul(E5, E5));
    s += (2.0 * std::abs(co.gamma)) * gmul(xp1, gmul(E6, E6));
    s += (2.0 * std::abs(co.delta)) * gmul(gmul(X, xp1), gmul(A2, A2));
    return s;
}

// Partial derivatives of the master polynomial with respect to (y, Y1, Y2),
// truncated at grade 2: exactly the data entering the linear level solve.
struct MasterPartials {
    Grid p0, p1, p2;
    MasterPartials() : p0(2), p1(2), p2(2) {}
};

inline MasterPartials master_partials(const Grid& Yfull, cplx sigma, const PviCoefficients& co) {
    const int cap = 2;
    const Grid Y = gresize(Yfull, cap);
    const Grid X = gvar_x(cap);
    const Grid one = gconst(1.0, cap);
    const Grid U = geuler(Y, sigma);
    const Grid W = geuler(U, sigma) - U;
    const Grid ym1 = Y - one;
    const Grid ymx = Y - X;
    const Grid xm1 = X - one;
    const Grid xm1sq = gmul(xm1, xm1);
    const Grid A2 = gmul(Y, ym1);
    const Grid C = gmul(A2, ymx);
    const Grid bracket2 = 3.0 * gmul(Y, Y) - 2.0 * gmul(one + X, Y) + X;
    const Grid bracket3 = gmul(ymx, xm1sq) + gmul(ymx, gmul(X, xm1)) + gmul(X, xm1sq);
    const Grid E5 = gmul(ym1, ymx);
    const Grid E6 = gmul(Y, ymx);

    MasterPartials mp;
    mp.p2 = 2.0 * gmul(C, xm1sq);
    mp.p1 = cplx(-2.0) * gmul(gmul(xm1sq, bracket2), U) + 2.0 * gmul(A2, bracket3);
    mp.p0 = 2.0 * gmul(gmul(xm1sq, W), bracket2)
            - gmul(gmul(xm1sq, 6.0 * Y - 2.0 * (one + X)), gmul(U, U))
            + 2.0 * gmul(gmul(2.0 * Y - one, bracket3) + gmul(A2, xm1sq + gmul(X, xm1)), U)
            + (-4.0 * co.alpha) * gmul(C, bracket2)
            + (-4.0 * co.beta) * gmul(gmul(X, E5), ymx + ym1)
            + (-4.0 * co.gamma) * gmul(gmul(xm1, E6), ymx + Y)
            + (-4.0 * co.delta) * gmul(gmul(gmul(X, xm1), A2), 2.0 * Y - one);
    return mp;
}

// Every row of the level is compared against the level's dominant magnitude
// plus a propagated first-order noise bound.  The presets carry double
// precision dust, and near a resonance (2 sigma close to an integer) the
// recursion amplifies it by many orders; `noisy` is the magnitude shadow
// evaluated on |c| + noise(c), so noisy - plain bounds the residual that
// dust alone can produce.  A transcription error in the master polynomial
// still surfaces at the full level scale.
inline void audit_level(const MasterTerms& mt, const Grid& plain, const Grid& noisy, int level,
                        const char* stage) {
    double scale = 1e-300;
    for (int k = -level; k <= level; ++k) scale = std::max(scale, std::abs(plain.get(level, k)));
    for (int k = -level; k <= level; ++k) {
        const double noise = std::abs(noisy.get(level, k)) - std::abs(plain.get(level, k));
        const double lim = series_audit_tol * scale + 10.0 * std::max(noise, 0.0);
        if (std::abs(mt.total(level, k)) > lim)
            fail(errc::internal_inconsistency,
                 std::string("level residual fails the vanishing check (") + stage + ")");
    }
}

// Core recursion at a formal exponent sigma (any non-integer complex value):
// grade 1 is preset from (theta, sigma, r), each higher grade is obtained by
// solving the level equations top-down in the sigma index, and every level
// is re-audited in full.
inline Grid expand_core(const ThetaParams& th, cplx sigma, cplx r, int N) {
    if (std::abs(sigma - std::round(sigma.real())) < 1e-9 && std::abs(sigma.imag()) < 1e-9)
        fail(errc::near_integer_sigma, "expansion requires sigma away from the integers");
    if (std::abs(r) < 1e-12) fail(errc::zero_r, "expansion requires r != 0");

    const PviCoefficients co = coefficients_from_theta(th);
    const cplx s2 = sigma * sigma;
    const cplx B = (s2 + sq(th.theta0) - sq(th.thetax)) / (2.0 * s2);

    const double peps = 8.0 * std::numeric_limits<double>::epsilon();
    Grid Y(N), noiseY(N);
    Y.set(1, -1, generic_a(th, sigma, r));
    Y.set(1, 0, B);
    Y.set(1, 1, -r / sigma);
    for (int m = -1; m <= 1; ++m) noiseY.set(1, m, cplx(peps * std::abs(Y.get(1, m))));

    audit_level(master_terms(Y, sigma, co, 3), master_scale(Y, sigma, co, 3),
                master_scale(gabs(Y) + noiseY, sigma, co, 3), 3, "preset block");
    const MasterPartials mp = master_partials(Y, sigma, co);

    double pscale = 1.0;
    for (int j = -2; j <= 2; ++j)
        pscale = std::max({pscale, std::abs(mp.p0.get(2, j)), std::abs(mp.p1.get(2, j)),
                           std::abs(mp.p2.get(2, j))});

    auto entry = [&](int n, int k, int mu) -> cplx {
        const cplx kap = cplx(n) + cplx(mu) * sigma;
        const int d = k - mu;
        return mp.p0.get(2, d) + kap * mp.p1.get(2, d) + kap * (kap - 1.0) * mp.p2.get(2, d);
    };

    for (int n = 2; n <= N; ++n) {
        const int level = n + 2;
        const MasterTerms mt = master_terms(Y, sigma, co, level);
        const Grid pre_plain = master_scale(Y, sigma, co, level);
        const Grid pre_noisy = master_scale(gabs(Y) + noiseY, sigma, co, level);
        for (int k = level; k >= -n + 2; --k) {
            const int mu = k - 2;
            cplx num = -mt.total(level, k);
            double linmag = 0.0, linnoise = 0.0;
            for (int mu2 = mu + 1; mu2 <= std::min(k + 2, n); ++mu2) {
                const cplx em = entry(n, k, mu2);
                num -= em * Y.get(n, mu2);
                linmag += std::abs(em) * std::abs(Y.get(n, mu2));
                linnoise += std::abs(em) * std::abs(noiseY.get(n, mu2));
            }
            const cplx diag = entry(n, k, mu);
            const double dscale = pscale * (1.0 + std::norm(cplx(n) + cplx(mu) * sigma));
            if (std::abs(diag) < 1e-10 * dscale)
                fail(errc::near_integer_sigma,
                     "resonant exponent: a level equation has a vanishing pivot");
            Y.set(n, mu, num / diag);

            const double pieces = std::abs(pre_plain.get(level, k));
            const double carried = std::abs(pre_noisy.get(level, k)) - pieces;
            noiseY.set(n, mu, cplx((peps * (pieces + linmag) + std::max(carried, 0.0) + linnoise)
                                   / std::abs(diag)));
        }
        audit_level(master_terms(Y, sigma, co, level), master_scale(Y, sigma, co, level),
                    master_scale(gabs(Y) + noiseY, sigma, co, level), level, "solved level");
    }
    return Y;
}

}  // namespace detail

// Full expansion at (theta, sigma, r).  For Re sigma = 1 the construction
// goes through the fractional-linear transform: the stored coefficients are
// the denominator table d_nm = c~_{n+1,m} at exponent 1 - sigma, and
// evaluation returns the reciprocal of the partial sum.
inline SeriesExpansion expand(const ThetaParams& th, cplx sigma, cplx r, int N) {
    if (N < 1 || N > series_order_cap)
        fail(errc::bad_input, "expansion order must lie in [1, 12]");

    SeriesExpansion e;
    e.point = Point::Zero;
    e.sigma = sigma;
    e.r = r;
    e.order = N;
    e.theta = th;

    const bool inverse = std::abs(sigma.real() - 1.0) < 1e-9 && std::abs(sigma.imag()) > 1e-9;
    if (inverse) {
        e.regime = Regime::InverseOscillatory;
        const detail::Grid Yt =
            detail::expand_core(theta_map_fractional_linear(th), 1.0 - sigma, r, N + 1);
        for (int n = 0; n <= N; ++n)
            for (int m = -(n + 1); m <= n + 1; ++m)
                e.coeffs[{n, m}] = Yt.get(n + 1, m);
    } else {
        e.regime = std::abs(sigma.real()) < 1e-9 ? Regime::Oscillatory : Regime::Generic;
        const detail::Grid Y = detail::expand_core(th, sigma, r, N);
        for (int n = 1; n <= N; ++n)
            for (int m = -n; m <= n; ++m) e.coeffs[{n, m}] = Y.get(n, m);
    }
    return e;
}

namespace detail {

struct LocalFrame {
    cplx z;        // local variable
    cplx exponent; // sigma of the stored powers (1 - sigma for inverse tables)
};

inline cplx local_variable(Point p, cplx x) {
    switch (p) {
        case Point::Zero:     return x;
        case Point::One:      return 1.0 - x;
        case Point::Infinity: return 1.0 / x;
    }
    return x;
}

// Partial sums of the stored table and its first two z-derivatives.
struct BlockValue {
    cplx f{}, df{}, ddf{};
};

inline BlockValue block_value(const SeriesExpansion& e, cplx z) {
    const cplx sig = e.regime == Regime::InverseOscillatory ? 1.0 - e.sigma : e.sigma;
    BlockValue out;
    for (const auto& [nm, c] : e.coeffs) {
        if (c == cplx(0.0)) continue;
        const cplx p = cplx(nm.first) + cplx(nm.second) * sig;
        const cplx zp = std::pow(z, p);
        out.f += c * zp;
        out.df += c * p * zp / z;
        out.ddf += c * p * (p - 1.0) * zp / (z * z);
    }
    return out;
}

inline void check_domain(const SeriesExpansion& e, cplx z) {
    if (std::abs(z) > series_validity_radius)
        fail(errc::outside_validity_radius, "evaluation point outside the validity radius");
    // Oscillatory domain: |e^{-2i phi} z^(sigma or 1-sigma)| must stay small.
    cplx top, bottom, ex;
    if (e.regime == Regime::Oscillatory) {
        auto i1 = e.coeffs.find({1, 1});
        auto i2 = e.coeffs.find({1, -1});
        if (i1 == e.coeffs.end() || i2 == e.coeffs.end()) return;
        top = -i1->second;
        bottom = i2->second;
        ex = e.sigma;
    } else if (e.regime == Regime::InverseOscillatory) {
        auto i1 = e.coeffs.find({0, 1});
        auto i2 = e.coeffs.find({0, -1});
        if (i1 == e.coeffs.end() || i2 == e.coeffs.end()) return;
        top = -i1->second;
        bottom = i2->second;
        ex = 1.0 - e.sigma;
    } else {
        return;
    }
    if (std::abs(bottom) < 1e-14 || std::abs(top) < 1e-14) return;   // degenerate branch
    if (std::abs(top / bottom * std::pow(z, ex)) > 0.5)
        fail(errc::outside_validity_radius,
             "oscillatory domain constraint |e^(-2i phi) z^s| <= 0.5 violated");
}

}  // namespace detail

// Partial sum of the expansion at the global point x (local wrappers
// y = S, y = 1 - S(1-x), y = x S(1/x) applied; reciprocal regime
// reciprocates after summation).
inline cplx evaluate(const SeriesExpansion& e, cplx x) {
    const cplx z = detail::local_variable(e.point, x);
    detail::check_domain(e, z);
    cplx S = detail::block_value(e, z).f;
    if (e.regime == Regime::InverseOscillatory) {
        if (std::abs(S) < 1e-10)
            fail(errc::near_pole, "inverse-regime denominator vanishes at this point");
        S = 1.0 / S;
    }
    switch (e.point) {
        case Point::Zero:     return S;
        case Point::One:      return 1.0 - S;
        case Point::Infinity: return x * S;
    }
    return S;
}

// Residual of the equation satisfied by the local branch S(z): PVI with the
// stored theta in the local variable.  Returned in the master orientation
// (right-hand side minus y''), plus a cross-check decomposition through the
// explicit numerator is available via pvi_residual_numerator.
namespace detail {

inline cplx pvi_rhs_value(const PviCoefficients& co, cplx x, cplx y, cplx yp) {
    const cplx ym1 = y - 1.0, ymx = y - x, xm1 = x - 1.0;
    const cplx half_sum = 0.5 * (1.0 / y + 1.0 / ym1 + 1.0 / ymx);
    const cplx lin = 1.0 / x + 1.0 / xm1 + 1.0 / ymx;
    const cplx rat = y * ym1 * ymx / (x * x * xm1 * xm1)
                     * (co.alpha + co.beta * x / (y * y) + co.gamma * xm1 / (ym1 * ym1)
                        + co.delta * x * xm1 / (ymx * ymx));
    return half_sum * yp * yp - lin * yp + rat;
}

inline BlockValue local_solution(const SeriesExpansion& e, cplx z) {
    BlockValue b = block_value(e, z);
    if (e.regime == Regime::InverseOscillatory) {
        if (std::abs(b.f) < 1e-10)
            fail(errc::near_pole, "inverse-regime denominator vanishes at this point");
        const cplx D = b.f, Dp = b.df, Dpp = b.ddf;
        b.f = 1.0 / D;
        b.df = -Dp / (D * D);
        b.ddf = (2.0 * Dp * Dp - Dpp * D) / (D * D * D);
    }
    return b;
}

}  // namespace detail

// Value and x-derivative of the branch at the global point; chain rule
// through the local wrapper.  Used to seed numerical integration.
inline std::pair<cplx, cplx> evaluate_with_derivative(const SeriesExpansion& e, cplx x) {
    const cplx z = detail::local_variable(e.point, x);
    detail::check_domain(e, z);
    const detail::BlockValue s = detail::local_solution(e, z);
    switch (e.point) {
        case Point::Zero:     return {s.f, s.df};
        case Point::One:      return {1.0 - s.f, s.df};
        case Point::Infinity: return {x * s.f, s.f - z * s.df};
    }
    return {s.f, s.df};
}

inline cplx pvi_residual(const SeriesExpansion& e, cplx x) {
    const cplx z = detail::local_variable(e.point, x);
    detail::check_domain(e, z);
    const detail::BlockValue s = detail::local_solution(e, z);
    const PviCoefficients co = coefficients_from_theta(e.theta);
    return detail::pvi_rhs_value(co, z, s.f, s.df) - s.ddf;
}

// Same residual assembled through the master polynomial (numerator over the
// written denominator); agreement of the two paths is a transcription check.
inline cplx pvi_residual_numerator(const SeriesExpansion& e, cplx x) {
    const cplx z = detail::local_variable(e.point, x);
    detail::check_domain(e, z);
    const detail::BlockValue s = detail::local_solution(e, z);
    const PviCoefficients co = coefficients_from_theta(e.theta);
    const cplx y = s.f, Y1 = z * s.df, Y2 = z * z * s.ddf;
    const cplx ym1 = y - 1.0, ymx = y - z, xm1 = z - 1.0, xm1sq = xm1 * xm1;
    const cplx A2 = y * ym1, C = A2 * ymx;
    const cplx bracket2 = 3.0 * y * y - 2.0 * (1.0 + z) * y + z;
    const cplx bracket3 = ymx * xm1sq + ymx * z * xm1 + z * xm1sq;
    const cplx N = 2.0 * C * xm1sq * Y2 - xm1sq * bracket2 * Y1 * Y1
                   + 2.0 * A2 * bracket3 * Y1 - 2.0 * co.alpha * C * C
                   - 2.0 * co.beta * z * detail::sq(ym1 * ymx)
                   - 2.0 * co.gamma * xm1 * detail::sq(y * ymx)
                   - 2.0 * co.delta * z * xm1 * detail::sq(A2);
    const cplx D = 2.0 * C * z * z * xm1sq;
    if (std::abs(D) < 1e-300)
        fail(errc::singular_denominator, "residual denominator vanishes at this point");
    return -N / D;
}

// Oscillatory expansion rewritten as the reciprocal (denominator) table:
// d_nm = c_{n+1,m} and sigma' = 1 - sigma.
inline SeriesExpansion transform_expansion_inverse(const SeriesExpansion& e) {
    if (e.regime != Regime::Oscillatory || e.point != Point::Zero)
        fail(errc::wrong_regime,
             "inverse transform applies to oscillatory expansions at zero");
    SeriesExpansion out;
    out.point = Point::Zero;
    out.regime = Regime::InverseOscillatory;
    out.sigma = 1.0 - e.sigma;
    out.r = e.r;
    out.order = e.order - 1;
    out.theta = theta_map_fractional_linear(e.theta);
    for (const auto& [nm, c] : e.coeffs)
        if (nm.first >= 1) out.coeffs[{nm.first - 1, nm.second}] = c;
    return out;
}

// Expansion in the local variable of the requested critical point, with the
// theta relabels and trace exchanges of the connection problem.
inline SeriesExpansion expansion_at_point(const ThetaParams& th, const MonodromyTraces& t,
                                          Point point, int N) {
    ThetaParams thp = th;
    MonodromyTraces tp = t;
    switch (point) {
        case Point::Zero: break;
        case Point::One:
            thp = theta_map_sigma01(th);
            tp = trace_map_sigma01(t);
            break;
        case Point::Infinity:
            thp = theta_map_sigmax1(th);
            tp = trace_map_sigmax1_inverse(t);
            break;
    }
    const BranchData b = detail::branch_at(thp, tp, point);
    SeriesExpansion e = expand(thp, b.sigma.sigma, b.r, N);
    e.point = point;
    return e;
}

// ---------------------------------------------------------------------------
// Oscillatory bridge: coefficients f_n with
//   sin^2(nu ln x / 2 + sum_n f_n x^{-i nu n}) = -2iA sin^2(nu ln x / 2 + psi) + iA + B.

namespace detail {

inline std::vector<cplx> poly_mul(const std::vector<cplx>& a, const std::vector<cplx>& b,
                                  std::size_t cap) {
    std::vector<cplx> out(cap, cplx(0.0));
    for (std::size_t i = 0; i < a.size() && i < cap; ++i) {
        if (a[i] == cplx(0.0)) continue;
        for (std::size_t j = 0; j < b.size() && i + j < cap; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

inline std::vector<cplx> poly_sqrt_one(const std::vector<cplx>& s, std::size_t cap) {
    // square root of a series with s[0] = 1, branch value 1
    std::vector<cplx> t(cap, cplx(0.0));
    t[0] = 1.0;
    for (std::size_t n = 1; n < cap; ++n) {
        cplx acc = n < s.size() ? s[n] : cplx(0.0);
        for (std::size_t j = 1; j < n; ++j) acc -= t[j] * t[n - j];
        t[n] = 0.5 * acc;
    }
    return t;
}

inline std::vector<cplx> poly_log_one(const std::vector<cplx>& L, std::size_t cap) {
    // logarithm of a series with L[0] = 1
    std::vector<cplx> l(cap, cplx(0.0));
    for (std::size_t n = 1; n < cap; ++n) {
        cplx acc = cplx(double(n)) * (n < L.size() ? L[n] : cplx(0.0));
        for (std::size_t j = 1; j < n; ++j) acc -= cplx(double(j)) * l[j] * L[n - j];
        l[n] = acc / cplx(double(n));
    }
    return l;
}

}  // namespace detail

inline std::vector<cplx> bridge_oscillatory(cplx A, cplx B, cplx psi, double nu, int terms) {
    if (terms < 1) fail(errc::bad_input, "bridge needs at least one coefficient");
    if (std::abs(A) < 1e-12)
        fail(errc::expansion_domain, "bridge requires a nonzero oscillation amplitude");
    (void)nu;   // the powers x^{-i nu n} carry nu; the coefficients do not

    const std::size_t cap = static_cast<std::size_t>(terms);
    const cplx I(0.0, 1.0);
    const cplx c1 = (2.0 * B - 1.0) / (I * A);

    // P(w) = 1 + c1 w + w^2,  L(w) = (P + sqrt(P^2 + w^2/A^2)) / 2,
    // f = psi + (1/2i) ln(-2iA) + (1/2i) ln L(e^{-2i psi} x^{-i nu})
    std::vector<cplx> P{cplx(1.0), c1, cplx(1.0)};
    std::vector<cplx> s = detail::poly_mul(P, P, std::max<std::size_t>(cap, 3));
    if (s.size() > 2) s[2] += 1.0 / (A * A);
    const std::vector<cplx> root = detail::poly_sqrt_one(s, cap);
    std::vector<cplx> L(cap, cplx(0.0));
    for (std::size_t n = 0; n < cap; ++n)
        L[n] = 0.5 * ((n < P.size() ? P[n] : cplx(0.0)) + root[n]);
    const std::vector<cplx> lg = detail::poly_log_one(L, cap);

    std::vector<cplx> f(cap, cplx(0.0));
    f[0] = psi + std::log(-2.0 * I * A) / (2.0 * I);
    const cplx fold = std::exp(-2.0 * I * psi);
    cplx foldn = 1.0;
    for (std::size_t n = 1; n < cap; ++n) {
        foldn *= fold;
        f[n] = foldn * lg[n] / (2.0 * I);
    }
    return f;
}

}  // namespace pvi
