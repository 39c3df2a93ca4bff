#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pvi/connection.hpp"
#include "pvi/ode.hpp"
#include "pvi/series.hpp"

namespace pvi {

// ---------------------------------------------------------------------------
// End-to-end verification of the connection formulas: expand at 0, integrate
// across the interval, fit the predicted local model at 1 and compare the
// constants.  All pieces (march, fits, corrected samples) are usable on their
// own, which is how the degenerate self-test at 0 is built.

struct VerifyConfig {
    double x_start = 1e-3;    // |x| of the seed; the march ends at |1-x| = x_start
    double ray_angle = 0.0;   // arg of the approach ray at both critical points
    double fit_x1 = 1e-3;     // two-point window of the generic exponent fit
    double fit_x2 = 2e-3;
    int order = series_default_order;
    double tolerance = 1e-10;
    double max_step = 5e-3;
    int max_detours = 6;
    int phased_samples = 16;  // LSQ samples across one period in ln z
};

struct FitResult {
    cplx sigma{};        // fitted exponent (two-point fit)
    cplx a{};            // leading coefficient; phased fits store the z^{-i nu} side here
    cplx B{};            // phased fits: constant term
    cplx conj_side{};    // phased fits: the z^{+i nu} coefficient
    cplx phi{};          // phased fits: fitted phase (see verify_connection)
    double residual = 0.0;
};

struct MarchOutcome {
    std::vector<OdeState> samples;   // one state per requested target, in order
    std::vector<cplx> waypoints;     // path of the successful attempt
    std::vector<IntegrationLog::PoleEvent> poles;
    int detours = 0;
    std::size_t steps = 0;
};

struct VerifyReport {
    ThetaParams theta{};
    MonodromyTraces traces{};
    VerifyConfig config{};
    BranchData predicted0{}, predicted1{};
    FitResult fitted1{};
    double sigma1_rel_error = 0.0;
    double coeff1_rel_error = 0.0;   // on a1, or on (A/2)e^{i phi} in phased regimes
    std::vector<cplx> waypoints;
    std::vector<IntegrationLog::PoleEvent> poles;
    int detours = 0;
    std::size_t steps = 0;
    std::string diagnostics;
};

// ---------------------------------------------------------------------------
// Fits.

// g ~ a z^p from two samples; returns sigma = 1 - p so that a power branch
// S = a z^(1-sigma) reports its exponent directly.
inline FitResult fit_power_two_point(cplx z1, cplx g1, cplx z2, cplx g2) {
    const double scale = std::max(std::abs(g1), std::abs(g2));
    if (scale < 1e-13 || std::abs(g1) < 1e-3 * scale || std::abs(g2) < 1e-3 * scale)
        fail(errc::fit_ill_conditioned,
             "two-point fit samples vanish or are wildly unbalanced");
    if (std::abs(std::log(std::abs(z1 / z2))) < 1e-6)
        fail(errc::fit_ill_conditioned, "two-point fit window has zero width");
    const cplx p = std::log(g1 / g2) / std::log(z1 / z2);
    FitResult f;
    f.sigma = 1.0 - p;
    f.a = g1 * std::pow(z1, -p);
    return f;
}

// Linear least squares for g(z) = c0 + c+ z^{i nu} + c- z^{-i nu} on a window
// of at least half a period in ln z.  The caller decides which of c+/c- is
// the model's leading side.
inline FitResult fit_phased(const std::vector<cplx>& z, const std::vector<cplx>& g, double nu) {
    if (z.size() != g.size() || z.size() < 4)
        fail(errc::fit_ill_conditioned, "phased fit needs at least four samples");
    double lmin = std::log(std::abs(z.front())), lmax = lmin;
    for (const cplx& zj : z) {
        const double l = std::log(std::abs(zj));
        lmin = std::min(lmin, l);
        lmax = std::max(lmax, l);
    }
    if (!(nu > 0.0) || nu * (lmax - lmin) < pi)
        fail(errc::fit_ill_conditioned, "phased fit window shorter than half a period");

    cplx M[3][3]{}, rhs[3]{};
    for (std::size_t j = 0; j < z.size(); ++j) {
        const cplx b[3] = {1.0, std::pow(z[j], cplx(0.0, nu)), std::pow(z[j], cplx(0.0, -nu))};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) M[r][c] += std::conj(b[r]) * b[c];
            rhs[r] += std::conj(b[r]) * g[j];
        }
    }
    // 3x3 Gaussian elimination with partial pivoting
    int perm[3] = {0, 1, 2};
    for (int k = 0; k < 3; ++k) {
        int piv = k;
        for (int r = k + 1; r < 3; ++r)
            if (std::abs(M[perm[r]][k]) > std::abs(M[perm[piv]][k])) piv = r;
        std::swap(perm[k], perm[piv]);
        if (std::abs(M[perm[k]][k]) < 1e-10 * z.size())
            fail(errc::fit_ill_conditioned, "phased fit normal equations are singular");
        for (int r = k + 1; r < 3; ++r) {
            const cplx m = M[perm[r]][k] / M[perm[k]][k];
            for (int c = k; c < 3; ++c) M[perm[r]][c] -= m * M[perm[k]][c];
            rhs[perm[r]] -= m * rhs[perm[k]];
        }
    }
    cplx sol[3];
    for (int k = 2; k >= 0; --k) {
        cplx s = rhs[perm[k]];
        for (int c = k + 1; c < 3; ++c) s -= M[perm[k]][c] * sol[c];
        sol[k] = s / M[perm[k]][k];
    }

    FitResult f;
    f.B = sol[0];
    f.conj_side = sol[1];
    f.a = sol[2];
    double ss = 0.0, gs = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        const cplx model = sol[0] + sol[1] * std::pow(z[j], cplx(0.0, nu)) +
                           sol[2] * std::pow(z[j], cplx(0.0, -nu));
        ss += std::norm(g[j] - model);
        gs += std::norm(g[j]);
    }
    f.residual = gs > 0.0 ? std::sqrt(ss / gs) : 0.0;
    return f;
}

// Data-side sample for the corrected two-point fit: the marched value minus
// every predicted order of the local expansion except the leading power.
// The remainder behaves like a z^(1-sigma) up to the first unmodeled order,
// so the pinned small window fits the leading constants without the
// O(z^min(Re sigma, 1-Re sigma)) contamination of raw samples.
inline cplx subtract_subleading(const SeriesExpansion& e, cplx x, cplx y) {
    if (e.regime != Regime::Generic)
        fail(errc::wrong_regime, "corrected samples are defined for the generic power branch");
    const cplx z = detail::local_variable(e.point, x);
    cplx s = y;
    switch (e.point) {
        case Point::Zero: break;
        case Point::One: s = 1.0 - y; break;
        case Point::Infinity: s = y / x; break;
    }
    cplx sub = 0.0;
    for (const auto& [nm, c] : e.coeffs) {
        if (nm.first == 1 && nm.second == -1) continue;
        sub += c * std::pow(z, cplx(nm.first) + cplx(nm.second) * e.sigma);
    }
    return s - sub;
}

// Same correction for the oscillatory fits: the marched value mapped into the
// block line (S for the oscillatory branch, 1/S for the inverse one), minus
// every predicted order above the leading block level, divided by the level
// power.  What remains is the three-term phase model plus unmodeled orders.
inline cplx phased_corrected_sample(const SeriesExpansion& e, cplx x, cplx y) {
    if (e.regime != Regime::Oscillatory && e.regime != Regime::InverseOscillatory)
        fail(errc::wrong_regime, "phased samples are defined for the oscillatory regimes");
    const cplx z = detail::local_variable(e.point, x);
    cplx s = y;
    switch (e.point) {
        case Point::Zero: break;
        case Point::One: s = 1.0 - y; break;
        case Point::Infinity: s = y / x; break;
    }
    if (e.regime == Regime::InverseOscillatory) {
        if (std::abs(s) < 1e-12)
            fail(errc::fit_ill_conditioned, "fit sample sits on a pole of the branch");
        s = 1.0 / s;
    }
    const cplx sig = e.regime == Regime::InverseOscillatory ? 1.0 - e.sigma : e.sigma;
    int nmin = std::numeric_limits<int>::max();
    for (const auto& [nm, c] : e.coeffs) nmin = std::min(nmin, nm.first);
    cplx sub = 0.0;
    for (const auto& [nm, c] : e.coeffs) {
        if (nm.first == nmin) continue;
        sub += c * std::pow(z, cplx(nm.first) + cplx(nm.second) * sig);
    }
    return (s - sub) / std::pow(z, cplx(nmin));
}

// ---------------------------------------------------------------------------
// March with automatic pole detours.

namespace detail {

struct Detour {
    double t = 0.0;       // position along the first segment
    double radius = 0.0;
};

inline std::vector<cplx> compose_waypoints(cplx from, const std::vector<cplx>& targets,
                                           std::vector<Detour> ds) {
    std::vector<cplx> wp{from};
    if (!targets.empty() && !ds.empty()) {
        const cplx seg = targets.front() - from;
        const double L = std::abs(seg);
        const cplx u = seg / L;
        std::sort(ds.begin(), ds.end(), [](const Detour& a, const Detour& b) { return a.t < b.t; });
        std::vector<std::pair<double, double>> arcs;
        for (const auto& d : ds) {
            const double ta = d.t - d.radius, tb = d.t + d.radius;
            if (!arcs.empty() && ta <= arcs.back().second)
                arcs.back().second = std::max(arcs.back().second, tb);
            else
                arcs.emplace_back(ta, tb);
        }
        for (const auto& [ta, tb] : arcs) {
            if (ta <= 0.0 || tb >= L)
                fail(errc::path_blocked, "pole detour collides with a path endpoint");
            const cplx center = from + 0.5 * (ta + tb) * u;
            const double radius = 0.5 * (tb - ta);
            // semicircle on the upper side of the segment, entry to exit
            for (int k = 0; k <= 8; ++k)
                wp.push_back(center + radius * std::polar(1.0, pi * (1.0 - k / 8.0)) * u);
        }
    }
    wp.insert(wp.end(), targets.begin(), targets.end());
    return wp;
}

}  // namespace detail

// Straight march from init to the target list; on a step collapse with a pole
// signature, retry from the seed with a semicircular detour (radius 10x the
// local pole-distance estimate) inserted around the estimate.  Overlapping or
// repeatedly offending detours merge and grow.  Poles are only routed around
// on the leg up to the first target: an estimate inside the fitting window or
// next to the seed is reported as a blocked path instead.
inline MarchOutcome integrate_with_detours(const PviCoefficients& co, const OdeState& init,
                                           const std::vector<cplx>& targets,
                                           const VerifyConfig& cfg) {
    if (targets.empty()) fail(errc::bad_input, "march needs at least one target");
    const cplx seg = targets.front() - init.x;
    const double L = std::abs(seg);
    if (L < 1e-12) fail(errc::bad_input, "first march target coincides with the seed");
    const cplx u = seg / L;

    std::vector<detail::Detour> ds;
    std::vector<IntegrationLog::PoleEvent> seen;
    for (int attempt = 0; attempt <= cfg.max_detours; ++attempt) {
        OdePath path;
        path.tolerance = cfg.tolerance;
        path.max_step = cfg.max_step;
        path.waypoints = detail::compose_waypoints(init.x, targets, ds);
        IntegrationLog log;
        try {
            const auto out = integrate(co, init, path, &log);
            MarchOutcome mo;
            mo.samples.assign(out.end() - static_cast<long>(targets.size()), out.end());
            mo.waypoints = std::move(path.waypoints);
            seen.insert(seen.end(), log.poles.begin(), log.poles.end());
            mo.poles = std::move(seen);
            mo.detours = static_cast<int>(ds.size());
            mo.steps = log.steps;
            return mo;
        } catch (const error& e) {
            if (e.code() != errc::step_collapse) throw;
            seen.insert(seen.end(), log.poles.begin(), log.poles.end());
            if (log.poles.empty())
                fail(errc::path_blocked,
                     std::string("integration collapsed without a pole signature: ") + e.what());
            const auto& ev = log.poles.back();
            const double local = std::max(std::abs(ev.pole_estimate - ev.x), 1e-4);
            const double radius = 10.0 * local;
            const double t = ((ev.pole_estimate - init.x) * std::conj(u)).real();
            if (t < 2.0 * cfg.x_start || t > L - 2.0 * cfg.x_start)
                fail(errc::path_blocked, "pole too close to the seed or the fitting window");
            bool merged = false;
            for (auto& d : ds) {
                if (std::abs(d.t - t) <= d.radius + radius) {
                    d.radius = std::max(2.0 * d.radius, std::abs(d.t - t) + radius);
                    merged = true;
                    break;
                }
            }
            if (!merged) ds.push_back({t, radius});
        }
    }
    fail(errc::path_blocked, "pole detours exhausted without a clear path");
}

// ---------------------------------------------------------------------------
// The verifier.

inline VerifyReport verify_connection(const ThetaParams& th, const MonodromyTraces& t,
                                      VerifyConfig cfg = {}) {
    VerifyReport rep;
    rep.theta = th;
    rep.traces = t;
    rep.config = cfg;

    const ConnectionResult con = connect(th, t);
    rep.predicted0 = con.at0;
    rep.predicted1 = con.at1;
    if (con.at1.degenerate)
        fail(errc::non_generic_data,
             "degenerate branch at 1: the leading power is not the fit target");

    const Regime reg1 = con.at1.sigma.regime;
    const cplx sig1 = con.at1.sigma.sigma;
    const cplx ray = std::polar(1.0, cfg.ray_angle);

    // fit samples in the local variable z = 1 - x, largest first
    std::vector<double> zs;
    double nu = 0.0;
    if (reg1 == Regime::Generic) {
        zs = {cfg.fit_x2, std::sqrt(cfg.fit_x1 * cfg.fit_x2), cfg.fit_x1};
    } else {
        nu = std::abs(reg1 == Regime::Oscillatory ? sig1.imag() : (sig1 - 1.0).imag());
        const int m = std::max(6, cfg.phased_samples);
        const double span = 2.0 * pi / nu;
        // the deepest sample must stay where the y chart still resolves
        // S = 1 - y (the branch shrinks like z, so digits cancel near 1);
        // slow phases push the window top upward instead
        const double z_top = std::max(cfg.fit_x2, 5e-4 * std::exp(span));
        if (!(nu > 0.0) || z_top > 0.02)
            fail(errc::fit_ill_conditioned,
                 "phase frequency too small: one period in ln z does not fit between the "
                 "integrator margin at 1 and the local neighborhood");
        for (int j = 0; j < m; ++j)
            zs.push_back(z_top * std::exp(-span * j / (m - 1.0)));
    }
    std::vector<cplx> targets;
    targets.reserve(zs.size());
    for (double z : zs) targets.push_back(1.0 - z * ray);

    // seed from the expansion at 0 and march
    const SeriesExpansion e0 = expansion_at_point(th, t, Point::Zero, cfg.order);
    const cplx x_seed = cfg.x_start * ray;
    const auto [y0, dy0] = evaluate_with_derivative(e0, x_seed);
    const PviCoefficients co = coefficients_from_theta(th);
    MarchOutcome mo = integrate_with_detours(co, {x_seed, y0, dy0}, targets, cfg);
    rep.waypoints = std::move(mo.waypoints);
    rep.poles = std::move(mo.poles);
    rep.detours = mo.detours;
    rep.steps = mo.steps;

    if (reg1 == Regime::Generic) {
        const SeriesExpansion e1 = expansion_at_point(th, t, Point::One, cfg.order);
        const cplx z1 = cfg.fit_x1 * ray, zm = zs[1] * ray, z2 = cfg.fit_x2 * ray;
        const cplx g2 = subtract_subleading(e1, mo.samples[0].x, mo.samples[0].y);
        const cplx gm = subtract_subleading(e1, mo.samples[1].x, mo.samples[1].y);
        const cplx g1 = subtract_subleading(e1, mo.samples[2].x, mo.samples[2].y);
        rep.fitted1 = fit_power_two_point(z1, g1, z2, g2);
        // held-out midpoint: two free parameters fitted from two samples leave
        // no residual, so a third sample is the only internal consistency check.
        // Samples still inside a pole's near field fail it instead of producing
        // a confident wrong exponent.
        const cplx model =
            rep.fitted1.a * std::exp((1.0 - rep.fitted1.sigma) * std::log(zm));
        const double holdout = std::abs(gm - model) / std::abs(gm);
        rep.fitted1.residual = holdout;
        if (holdout > 2e-3)
            fail(errc::fit_ill_conditioned,
                 "two-point fit fails the held-out midpoint check: the window samples do "
                 "not sit on a single power branch");
        rep.sigma1_rel_error = std::abs(rep.fitted1.sigma - sig1) / std::abs(sig1);
        rep.coeff1_rel_error = std::abs(rep.fitted1.a - con.at1.a) / std::abs(con.at1.a);
    } else {
        // S(z) side of the wrapper y = 1 - S; the oscillatory model lives in
        // S/z, the inverse-oscillatory model in 1/S (the denominator line).
        // Predicted orders above the leading block level are subtracted so the
        // shallow window does not contaminate the three fitted coefficients.
        const SeriesExpansion e1 = expansion_at_point(th, t, Point::One, cfg.order);
        std::vector<cplx> zv, gv;
        zv.reserve(zs.size());
        gv.reserve(zs.size());
        for (std::size_t j = 0; j < zs.size(); ++j) {
            gv.push_back(phased_corrected_sample(e1, mo.samples[j].x, mo.samples[j].y));
            zv.push_back(zs[j] * ray);
        }
        FitResult f = fit_phased(zv, gv, nu);
        const cplx a_pred = 0.5 * con.at1.A * std::exp(cplx(0.0, 1.0) * con.at1.phi);
        // leading side: z^{-i nu} for sigma = i nu, z^{+i nu} for sigma = 1 + i nu
        if (reg1 == Regime::InverseOscillatory) std::swap(f.a, f.conj_side);
        f.sigma = sig1;
        f.phi = con.at1.phi - cplx(0.0, 1.0) * std::log(f.a / a_pred);
        rep.fitted1 = f;
        rep.sigma1_rel_error = 0.0;
        rep.coeff1_rel_error = std::abs(f.a - a_pred) / std::abs(a_pred);
        rep.diagnostics =
            "phased fit: frequency fixed by the prediction; agreement measured on the "
            "amplitude-phase coefficient";
        const cplx conj_pred = reg1 == Regime::Oscillatory
                                   ? -con.at1.r / sig1
                                   : -0.5 * con.at1.A * std::exp(-cplx(0.0, 1.0) * con.at1.phi);
        if (std::abs(conj_pred) > 1e-12 &&
            std::abs(f.conj_side - conj_pred) > 0.05 * std::abs(conj_pred))
            rep.diagnostics += "; opposite-phase coefficient deviates above 5%";
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Batch driver: one isolated, deterministic run per job.

struct VerifyJob {
    ThetaParams theta{};
    MonodromyTraces traces{};
};

struct BatchEntry {
    bool ok = false;
    VerifyReport report{};
    errc code = errc::bad_input;   // meaningful when !ok
    std::string failure;
};

inline std::vector<BatchEntry> verify_batch(const std::vector<VerifyJob>& jobs,
                                            const VerifyConfig& cfg = {}) {
    std::vector<std::future<BatchEntry>> futs;
    futs.reserve(jobs.size());
    for (const auto& j : jobs) {
        futs.push_back(std::async(std::launch::async, [j, cfg]() {
            BatchEntry e;
            try {
                e.report = verify_connection(j.theta, j.traces, cfg);
                e.ok = true;
            } catch (const error& err) {
                e.code = err.code();
                e.failure = err.what();
            }
            return e;
        }));
    }
    std::vector<BatchEntry> out;
    out.reserve(futs.size());
    for (auto& f : futs) out.push_back(f.get());
    return out;
}

}  // namespace pvi
