#pragma once

// Direct numerical integration of PVI in the complex plane: embedded
// Dormand-Prince 5(4) with error control per unit arclength, and an
// automatic switch to the w = 1/y chart across movable poles.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "monodromy.hpp"

namespace pvi {

struct OdeState {
    cplx x{};
    cplx y{};
    cplx yprime{};
};

struct OdePath {
    std::vector<cplx> waypoints;   // straight segments between consecutive entries
    double max_step = 0.05;
    double tolerance = 1e-10;      // local error per unit arclength
};

// Chart-switch bookkeeping, one entry per pole passed.  The estimate is the
// first-order pole location x + y/y' taken at the switch point.
struct IntegrationLog {
    struct PoleEvent {
        cplx x;
        cplx pole_estimate;
    };
    std::vector<PoleEvent> poles;
    std::size_t steps = 0;
    std::size_t rejects = 0;
    std::size_t chart_switches = 0;
};

namespace detail {

struct RhsValue {
    cplx value;
    double mag;   // sum of the magnitudes of the assembled pieces
};

inline RhsValue rhs_with_mag(const PviCoefficients& c, cplx x, cplx y, cplx yp) {
    const struct { const char* name; cplx v; } factors[] = {
        {"y", y}, {"y-1", y - 1.0}, {"y-x", y - x}, {"x", x}, {"x-1", x - 1.0},
    };
    for (const auto& f : factors)
        if (std::abs(f.v) < 1e-12)
            fail(errc::singular_input, std::string("factor ") + f.name + " vanishes");
    const cplx ym1 = y - 1.0, ymx = y - x, xm1 = x - 1.0;
    const cplx quad = 0.5 * (1.0 / y + 1.0 / ym1 + 1.0 / ymx) * yp * yp;
    const cplx lin = (1.0 / x + 1.0 / xm1 + 1.0 / ymx) * yp;
    const cplx pref = y * ym1 * ymx / (x * x * xm1 * xm1);
    const cplx bracket = c.alpha + c.beta * x / (y * y) + c.gamma * xm1 / (ym1 * ym1)
                         + c.delta * x * xm1 / (ymx * ymx);
    return {quad - lin + pref * bracket,
            std::abs(quad) + std::abs(lin) + std::abs(pref) * std::abs(bracket)};
}

}  // namespace detail

// y'' from the equation.  The written form has simple factors y, y-1, y-x,
// x, x-1 in denominators; each is checked and named on failure.
inline cplx pvi_rhs(const PviCoefficients& c, const OdeState& s) {
    return detail::rhs_with_mag(c, s.x, s.y, s.yprime).value;
}

namespace detail {

// Movable poles of y are regular points of w = 1/y, so the flow is carried
// in whichever chart keeps the dependent variable moderate.
struct ChartState {
    bool inverted = false;
    cplx u{};    // y or 1/y
    cplx up{};   // du/dx
};

// mag bounds the rounding noise of dup: crossing a pole the 1/w pieces of
// the w-chart equation cancel down to an O(1) value, so the usable accuracy
// of a stage is eps * mag, not eps * |dup|.
struct ChartDeriv {
    cplx du, dup;
    double mag;
};

inline ChartDeriv chart_rhs(const PviCoefficients& c, bool inverted, cplx x, cplx u, cplx up) {
    if (!inverted) {
        const RhsValue r = rhs_with_mag(c, x, u, up);
        return {up, r.value, r.mag};
    }
    if (u == cplx(0.0)) fail(errc::near_pole, "stage landed exactly on a pole");
    const cplx y = 1.0 / u;
    const cplx yp = -up * y * y;
    const RhsValue r = rhs_with_mag(c, x, y, yp);
    const cplx lead = 2.0 * up * up / u;
    const double u2 = std::abs(u) * std::abs(u);
    return {up, lead - u * u * r.value, std::abs(lead) + u2 * r.mag};
}

inline OdeState to_state(const ChartState& s, cplx x) {
    if (!s.inverted) return {x, s.u, s.up};
    if (std::abs(s.u) < 1e-300) fail(errc::near_pole, "waypoint falls on a pole");
    const cplx y = 1.0 / s.u;
    return {x, y, -s.up * y * y};
}

inline constexpr double chart_trigger = 1e6;          // switch to 1/y above this |y|
inline constexpr double chart_release = chart_trigger / 4.0;

inline void maybe_switch_chart(ChartState& s, cplx x, IntegrationLog* log) {
    if (!s.inverted) {
        if (std::abs(s.u) > chart_trigger) {
            if (log) {
                log->chart_switches++;
                if (s.up != cplx(0.0)) log->poles.push_back({x, x + s.u / s.up});
            }
            const cplx w = 1.0 / s.u;
            s.up = -s.up * w * w;
            s.u = w;
            s.inverted = true;
        }
    } else if (std::abs(s.u) > 1.0 / chart_release) {
        if (log) log->chart_switches++;
        const cplx y = 1.0 / s.u;
        s.up = -s.up * y * y;
        s.u = y;
        s.inverted = false;
    }
}

}  // namespace detail

// Adaptive integration along the straight segments of path.waypoints.
// Returns the state at each waypoint; init must sit on the first one.
inline std::vector<OdeState> integrate(const PviCoefficients& c, const OdeState& init,
                                       const OdePath& path, IntegrationLog* log = nullptr) {
    if (path.waypoints.empty()) fail(errc::bad_input, "path needs at least one waypoint");
    if (!(path.max_step > 0.0) || !(path.tolerance > 0.0))
        fail(errc::bad_input, "max_step and tolerance must be positive");
    if (path.tolerance < 1e-13)
        fail(errc::bad_input, "tolerance below double-precision reach");
    for (cplx w : path.waypoints)
        if (std::abs(w) < 1e-4 || std::abs(w - 1.0) < 1e-4)
            fail(errc::bad_input, "waypoint within 1e-4 of a fixed critical point");
    if (std::abs(init.x - path.waypoints.front()) > 1e-12 * std::max(1.0, std::abs(init.x)))
        fail(errc::bad_input, "initial state not on the first waypoint");

    // Dormand-Prince 5(4), FSAL.
    static const double A[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
    };
    static const double C[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static const double E[7] = {71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920,
                                -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

    detail::ChartState s{false, init.y, init.yprime};
    cplx x = init.x;
    detail::maybe_switch_chart(s, x, log);

    std::vector<OdeState> out;
    out.reserve(path.waypoints.size());
    out.push_back(init);

    for (std::size_t seg = 1; seg < path.waypoints.size(); ++seg) {
        const cplx target = path.waypoints[seg];
        const double length = std::abs(target - x);
        if (length == 0.0) {
            out.push_back(detail::to_state(s, x));
            continue;
        }
        const cplx dir = (target - x) / length;
        double done = 0.0;
        double h = std::min(path.max_step, length);
        detail::ChartDeriv k[7];
        bool have_first = false;

        while (true) {
            const double remaining = length - done;
            if (remaining <= 1e-14 * std::max(1.0, length)) break;
            h = std::min(h, remaining);
            if (h < 1e-14) fail(errc::step_collapse, "step below 1e-14: integration breakdown");
            const cplx hc = h * dir;
            if (!have_first) k[0] = detail::chart_rhs(c, s.inverted, x, s.u, s.up);
            double magmax = k[0].mag;
            for (int i = 1; i < 7; ++i) {
                cplx ui = s.u, upi = s.up;
                for (int j = 0; j < i; ++j) {
                    ui += hc * A[i][j] * k[j].du;
                    upi += hc * A[i][j] * k[j].dup;
                }
                k[i] = detail::chart_rhs(c, s.inverted, x + C[i] * hc, ui, upi);
                magmax = std::max(magmax, k[i].mag);
            }
            // stage 7 is evaluated at the 5th-order result (row 7 = weights b)
            cplx u5 = s.u, up5 = s.up, eu = 0.0, eup = 0.0;
            for (int j = 0; j < 6; ++j) {
                u5 += hc * A[6][j] * k[j].du;
                up5 += hc * A[6][j] * k[j].dup;
            }
            for (int j = 0; j < 7; ++j) {
                eu += E[j] * k[j].du;
                eup += E[j] * k[j].dup;
            }
            // the dup components are only defined up to eps * magmax rounding
            // noise; grant that floor, but never more than 1e-6 relative, so
            // an equation going genuinely singular still rejects
            const double up_scale = std::max(1.0, std::abs(up5));
            const double noise = std::min(
                16.0 * std::numeric_limits<double>::epsilon() * magmax, 1e-6 * up_scale);
            const double err_u = std::abs(eu) / std::max(1.0, std::abs(u5));
            const double err_up = std::max(0.0, std::abs(eup) - noise) / up_scale;
            const double err = h * std::max(err_u, err_up);
            const double budget = path.tolerance * h;
            if (err <= budget) {
                s.u = u5;
                s.up = up5;
                x += hc;
                done += h;
                if (log) log->steps++;
                const bool was_inverted = s.inverted;
                detail::maybe_switch_chart(s, x, log);
                have_first = was_inverted == s.inverted;
                if (have_first) k[0] = k[6];
            } else {
                if (log) log->rejects++;
                have_first = false;
            }
            const double grow = err > 0.0 ? 0.9 * std::pow(budget / err, 0.2) : 5.0;
            h *= std::min(5.0, std::max(0.2, grow));
            h = std::min(h, path.max_step);
        }
        out.push_back(detail::to_state(s, x));
    }
    return out;
}

}  // namespace pvi
