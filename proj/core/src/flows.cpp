#include "aif/flows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aif {

namespace {

constexpr double kGrazingPosTol = 1e-10;
constexpr double kGrazingSlopeTol = 1e-8;
constexpr double kOverflowLimit = 1e300;

double sigma_of(Zone z) { return z == Zone::Left ? -1.0 : 1.0; }

// Exponential-mode form of the zone flow from s0:
//   x(t) = x_star + a_s*exp(rate_s*t)*u_s + a_f*exp(rate_f*t)*u_f.
// Grouping by mode keeps states with a_f == 0 exactly on the slow invariant
// line for arbitrary flight times, instead of cancelling two huge exp(t)
// terms.
struct ModeFlow {
    double rate_s = 0, rate_f = 0;
    Vec2 u_s{}, u_f{};
    Vec2 x_star{};
    double a_s = 0, a_f = 0;
};

ModeFlow decoupled_modes(double sigma, const State& s0, const ModelParams& p) {
    ModeFlow m;
    m.rate_f = sigma;
    m.rate_s = -p.eps;
    m.u_f = {1.0, 0.0};
    // eigenvector of -eps: (1, sigma + eps) for A = [[sigma,-1],[0,-eps]]
    const double wslope = sigma + p.eps;
    m.u_s = {1.0, wslope};
    m.x_star = {sigma * (p.b - p.I), p.b};
    m.a_s = (s0.w - p.b) / wslope;
    m.a_f = s0.v - m.x_star.x - m.a_s;
    return m;
}

bool coupled_modes(double sigma, const State& s0, const ModelParams& p, ModeFlow& m) {
    const double d = 0.25 - p.eps;
    if (d <= 1e-12) return false;  // complex or near-defective: matrix form instead
    const double r = std::sqrt(d);
    const double mu = sigma * 0.5;
    m.rate_s = mu - sigma * r;
    m.rate_f = mu + sigma * r;
    m.u_s = {m.rate_s, p.eps};
    m.u_f = {m.rate_f, p.eps};
    m.x_star = {p.b, sigma * p.b + p.I};
    const double dv = s0.v - m.x_star.x;
    const double dw = s0.w - m.x_star.y;
    const double det = p.eps * (m.rate_s - m.rate_f);
    m.a_s = (dv * p.eps - m.rate_f * dw) / det;
    m.a_f = (m.rate_s * dw - dv * p.eps) / det;
    return true;
}

State eval_modes(const ModeFlow& m, double t) {
    double v = m.x_star.x;
    double w = m.x_star.y;
    if (m.a_s != 0.0) {
        const double es = std::exp(m.rate_s * t);
        v += m.a_s * es * m.u_s.x;
        w += m.a_s * es * m.u_s.y;
    }
    if (m.a_f != 0.0) {
        const double ef = std::exp(m.rate_f * t);
        v += m.a_f * ef * m.u_f.x;
        w += m.a_f * ef * m.u_f.y;
    }
    return {v, w};
}

// Left-zone decoupled flow at eps == 1: the zone matrix is defective, use the
// confluent limit (e^-t - e^-eps t)/(1-eps) -> -t e^-t with a first-order
// correction in (1-eps).
State decoupled_left_defective(const State& s0, double t, const ModelParams& p) {
    const double delta = 1.0 - p.eps;
    const double et = std::exp(-t);
    const double eet = std::exp(-p.eps * t);
    const double f = -t * et * (1.0 + delta * t / 2.0);
    const double v = s0.v * et + (p.I - p.b) * (1.0 - et) + (s0.w - p.b) * f;
    const double w = p.b + (s0.w - p.b) * eet;
    return {v, w};
}

// e^{tA} for the coupled zone matrix A = [[sigma,-1],[eps,0]] via the scalar
// pair (ceff, seff) with e^{tA} = ceff*I + seff*(A - mu I). Stable across
// real, complex and repeated eigenvalues.
void coupled_exp_scalars(double sigma, double t, const ModelParams& p, double& ceff,
                         double& seff) {
    const double mu = sigma * 0.5;
    const double d = 0.25 - p.eps;
    if (std::abs(d) * t * t < 1e-12) {
        const double emu = std::exp(mu * t);
        ceff = emu * (1.0 + d * t * t / 2.0);
        seff = emu * t * (1.0 + d * t * t / 6.0);
        return;
    }
    if (d > 0) {
        const double r = std::sqrt(d);
        const double ef = std::exp((mu + r) * t);
        const double es = std::exp((mu - r) * t);
        ceff = 0.5 * (ef + es);
        seff = (ef - es) / (2.0 * r);
        return;
    }
    const double r = std::sqrt(-d);
    const double emu = std::exp(mu * t);
    ceff = emu * std::cos(r * t);
    seff = emu * std::sin(r * t) / r;
}

State coupled_matrix_flow(double sigma, const State& s0, double t, const ModelParams& p) {
    double ceff, seff;
    coupled_exp_scalars(sigma, t, p, ceff, seff);
    const double mu = sigma * 0.5;
    // M = ceff*I + seff*[[sigma-mu, -1],[eps, -mu]]
    const Mat2 M{ceff + seff * (sigma - mu), -seff, seff * p.eps, ceff - seff * mu};
    const double xv = p.b, xw = sigma * p.b + p.I;
    const double dv = s0.v - xv, dw = s0.w - xw;
    return {xv + M.a11 * dv + M.a12 * dw, xw + M.a21 * dv + M.a22 * dw};
}

State zone_flow_impl(double sigma, const State& s0, double t, const ModelParams& p) {
    if (t == 0.0) return s0;
    if (p.slow == SlowDynamics::DecoupledLinear) {
        if (sigma < 0 && std::abs(1.0 - p.eps) < 1e-9) {
            return decoupled_left_defective(s0, t, p);
        }
        return eval_modes(decoupled_modes(sigma, s0, p), t);
    }
    ModeFlow m;
    if (coupled_modes(sigma, s0, p, m)) return eval_modes(m, t);
    return coupled_matrix_flow(sigma, s0, t, p);
}

// Largest time the expanding mode(s) of the zone flow from s0 stay below the
// overflow limit; +inf when the zone flow is contracting.
double overflow_time(Zone zone, const State& s0, const ModelParams& p) {
    const double sigma = sigma_of(zone);
    double cap = std::numeric_limits<double>::infinity();
    auto cap_for = [&](double amp, double rate) {
        if (rate <= 0) return;
        const double a = std::max(std::abs(amp), 1e-300);
        cap = std::min(cap, (std::log(kOverflowLimit) - std::log(a)) / rate);
    };
    if (p.slow == SlowDynamics::DecoupledLinear) {
        if (sigma > 0) {
            const ModeFlow m = decoupled_modes(sigma, s0, p);
            cap_for(m.a_f, m.rate_f);
        }
        return cap;
    }
    ModeFlow m;
    if (coupled_modes(sigma, s0, p, m)) {
        cap_for(m.a_f * std::max(std::abs(m.u_f.x), std::abs(m.u_f.y)), m.rate_f);
        cap_for(m.a_s * std::max(std::abs(m.u_s.x), std::abs(m.u_s.y)), m.rate_s);
        return cap;
    }
    if (sigma > 0) {
        const double amp = std::hypot(s0.v - p.b, s0.w - (p.b + p.I));
        cap_for(amp, 0.5);
    }
    return cap;
}

}  // namespace

Vec2 field(Zone zone, const State& s, const ModelParams& p) {
    const double sigma = sigma_of(zone);
    const double vdot = sigma * s.v - s.w + p.I;
    const double wdot = p.slow == SlowDynamics::DecoupledLinear ? p.eps * (p.b - s.w)
                                                                : p.eps * (s.v - p.b);
    return {vdot, wdot};
}

State flow_plus(const State& s0, double t, const ModelParams& p) {
    return zone_flow_impl(1.0, s0, t, p);
}

State flow_minus(const State& s0, double t, const ModelParams& p) {
    return zone_flow_impl(-1.0, s0, t, p);
}

State zone_flow(Zone zone, const State& s0, double t, const ModelParams& p) {
    return zone_flow_impl(sigma_of(zone), s0, t, p);
}

Mat2 transition_matrix(Zone zone, double t, const ModelParams& p) {
    const double sigma = sigma_of(zone);
    if (p.slow == SlowDynamics::DecoupledLinear) {
        const double eet = std::exp(-p.eps * t);
        const double est = std::exp(sigma * t);
        double a12;
        if (sigma < 0 && std::abs(1.0 - p.eps) < 1e-9) {
            a12 = -t * std::exp(-t) * (1.0 + (1.0 - p.eps) * t / 2.0);
        } else {
            // (e^{-eps t} - e^{sigma t}) / (sigma + eps), cancellation-free
            a12 = (std::expm1(-p.eps * t) - std::expm1(sigma * t)) / (sigma + p.eps);
        }
        return {est, a12, 0.0, eet};
    }
    double ceff, seff;
    coupled_exp_scalars(sigma, t, p, ceff, seff);
    const double mu = sigma * 0.5;
    return {ceff + seff * (sigma - mu), -seff, seff * p.eps, ceff - seff * mu};
}

namespace {

double g_value(TargetLine target, const State& s, const ModelParams& p) {
    switch (target) {
        case TargetLine::Switching: return s.v;
        case TargetLine::Threshold: return s.v - p.v_thr;
        case TargetLine::ResetLine: return s.v - p.v_res;
        case TargetLine::SlowNullclineCrossing: return s.v + s.w - p.I;
    }
    return 0.0;
}

double g_slope(TargetLine target, Zone zone, const State& s, const ModelParams& p) {
    const Vec2 f = field(zone, s, p);
    if (target == TargetLine::SlowNullclineCrossing) return f.x + f.y;
    return f.x;
}

struct Sample {
    double t;
    State s;
    double g;
    double gd;
};

Zone infer_zone(const State& s0, const ModelParams& p) {
    const double rt = p.tol.root_tol;
    if (s0.v < -rt) return Zone::Left;
    if (s0.v > rt) return Zone::Right;
    // On the switching line the field is continuous; entry zone follows v'.
    const double vdot = p.I - s0.w;
    return vdot < 0.0 ? Zone::Left : Zone::Right;
}

}  // namespace

CrossingResult first_crossing(const State& s0, const CrossingQuery& q, const ModelParams& p) {
    if (!(q.t_max > 0)) throw std::invalid_argument("first_crossing: t_max must be > 0");
    if (!s0.finite()) throw std::invalid_argument("first_crossing: non-finite state");

    Zone zone = q.zone.value_or(infer_zone(s0, p));
    if (zone == Zone::OnSwitching || zone == Zone::OnThreshold) zone = infer_zone(s0, p);

    const double cap = overflow_time(zone, s0, p);
    const double t_end = std::min(q.t_max, cap);
    const bool capped = cap < q.t_max;

    auto at = [&](double t) -> Sample {
        const State s = zone_flow(zone, s0, t, p);
        return {t, s, g_value(q.target, s, p), g_slope(q.target, zone, s, p)};
    };

    auto direction_ok = [&](double gd) {
        switch (q.direction) {
            case CrossingDirection::Any: return true;
            case CrossingDirection::Increasing: return gd > 0.0;
            case CrossingDirection::Decreasing: return gd < 0.0;
        }
        return true;
    };

    // Bisection tightened by secant steps; returns the refined sample.
    auto refine_root = [&](Sample lo, Sample hi, bool on_slope) -> Sample {
        auto val = [&](const Sample& s) { return on_slope ? s.gd : s.g; };
        for (int it = 0; it < 200; ++it) {
            if (hi.t - lo.t <= 1e-12 * std::max(1.0, hi.t)) break;
            double tm = 0.5 * (lo.t + hi.t);
            const double denom = val(hi) - val(lo);
            if (denom != 0.0) {
                const double ts = hi.t - val(hi) * (hi.t - lo.t) / denom;
                if (ts > lo.t && ts < hi.t) tm = ts;
            }
            // guard stagnation at an endpoint
            const double span = hi.t - lo.t;
            tm = std::clamp(tm, lo.t + 0.01 * span, hi.t - 0.01 * span);
            Sample mid = at(tm);
            if ((val(mid) < 0) == (val(lo) < 0)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return std::abs(val(lo)) < std::abs(val(hi)) ? lo : hi;
    };

    Sample prev = at(0.0);
    int last_sign = prev.g == 0.0 ? 0 : (prev.g < 0 ? -1 : 1);
    Sample last_signed = prev;

    double t = 0.0;
    while (t < t_end) {
        const double speed = std::max(1.0, std::abs(prev.gd));
        double h = std::min(0.1, 0.5 / speed);
        h = std::min(h, t_end - t);
        if (h <= 0) break;
        Sample cur = at(t + h);

        const int sign = cur.g == 0.0 ? 0 : (cur.g < 0 ? -1 : 1);
        if (sign != 0 && last_sign != 0 && sign != last_sign) {
            Sample root = refine_root(last_signed, cur, false);
            if (root.t > 0.0) {
                if (std::abs(root.gd) <= kGrazingSlopeTol && std::abs(root.g) <= kGrazingPosTol) {
                    return {CrossingStatus::Grazing, root.t, root.s, false};
                }
                if (direction_ok(root.gd)) {
                    return {CrossingStatus::Crossed, root.t, root.s, false};
                }
            }
        } else if (prev.gd != 0.0 && cur.gd != 0.0 && (prev.gd < 0) != (cur.gd < 0)) {
            // extremum of g inside the step: tangency candidate
            Sample ext = refine_root(prev, cur, true);
            if (ext.t > 0.0 && std::abs(ext.g) <= kGrazingPosTol &&
                std::abs(ext.gd) <= kGrazingSlopeTol) {
                return {CrossingStatus::Grazing, ext.t, ext.s, false};
            }
        }

        if (sign != 0) {
            last_sign = sign;
            last_signed = cur;
        }
        prev = cur;
        t += h;
    }
    return {CrossingStatus::NoCrossing, t_end, prev.s, capped};
}

}  // namespace aif
