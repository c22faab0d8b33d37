#include "aif/model.hpp"

#include <cmath>

namespace aif {

namespace {

// Slow-eigenvalue invariant line of the coupled zone matrix [[sigma,-1],[eps,0]],
// through the zone's affine fixed point (b, sigma*b + I). Real eigenvalues need
// eps < 1/4; the slow direction has slope lambda_fast.
std::optional<Line> coupled_slow_line(double sigma, const ModelParams& p) {
    const double d = 0.25 - p.eps;
    if (d <= 0.0) return std::nullopt;
    const double r = std::sqrt(d);
    const double lambda_fast = sigma * 0.5 + sigma * r;  // sigma*(1/2 + r)
    return Line{p.b, sigma * p.b + p.I, lambda_fast};
}

}  // namespace

std::optional<Line> slow_manifold_line(Zone zone, const ModelParams& p) {
    if (zone != Zone::Left && zone != Zone::Right) {
        throw std::invalid_argument("slow_manifold_line expects Left or Right");
    }
    if (p.slow == SlowDynamics::DecoupledLinear) {
        if (zone == Zone::Right) {
            return Line{0.0, p.b + (1.0 + p.eps) * (p.I - p.b), 1.0 + p.eps};
        }
        return Line{0.0, p.b + (1.0 - p.eps) * (p.I - p.b), p.eps - 1.0};
    }
    return coupled_slow_line(zone == Zone::Right ? 1.0 : -1.0, p);
}

ManifoldGeometry ManifoldGeometry::for_params(const ModelParams& p) {
    ManifoldGeometry g;
    g.s0_plus = Line{0.0, p.I, 1.0};
    g.s0_minus = Line{0.0, p.I, -1.0};
    auto plus = slow_manifold_line(Zone::Right, p);
    auto minus = slow_manifold_line(Zone::Left, p);
    if (!plus || !minus) {
        throw std::invalid_argument("slow manifold lines undefined (coupled dynamics needs eps < 1/4)");
    }
    g.s_eps_plus = *plus;
    g.s_eps_minus = *minus;
    return g;
}

Zone classify_zone(const State& s, const ModelParams& p) {
    if (!s.finite()) throw std::invalid_argument("classify_zone: non-finite state");
    const double rt = p.tol.root_tol;
    if (std::abs(s.v) <= rt) return Zone::OnSwitching;
    if (std::abs(s.v - p.v_thr) <= rt) return Zone::OnThreshold;
    return s.v < 0.0 ? Zone::Left : Zone::Right;
}

std::vector<FastEquilibrium> fast_subsystem_equilibria(double w, const ModelParams& p) {
    std::vector<FastEquilibrium> out;
    if (w < p.I) return out;
    if (w == p.I) {
        out.push_back({State{0.0, w}, FastStability::SemistableCorner, true});
        return out;
    }
    const double dv = w - p.I;
    out.push_back({State{-dv, w}, FastStability::Stable, true});
    out.push_back({State{dv, w}, FastStability::Unstable, dv <= p.v_thr});
    return out;
}

FastSubsystemBifurcations fast_subsystem_bifurcations(const ModelParams& p) {
    return {p.I, p.v_res + p.I, p.v_res + p.I};
}

std::vector<SlowEquilibrium> slow_flow_equilibria(const ModelParams& p) {
    std::vector<SlowEquilibrium> out;
    if (p.slow == SlowDynamics::DecoupledLinear) {
        // w' = b - w restricted to S0: equilibria at w = b, so |v| = b - I.
        if (p.b < p.I) return out;
        if (p.b == p.I) {
            out.push_back({State{0.0, p.I}, SlowEquilibriumClass::Semistable});
            return out;
        }
        const double dv = p.b - p.I;
        out.push_back({State{-dv, p.b}, SlowEquilibriumClass::Stable});
        out.push_back({State{dv, p.b}, SlowEquilibriumClass::Unstable});
        return out;
    }
    // Coupled: w' = v - b on S0, equilibrium at v = b, w = |b| + I.
    SlowEquilibriumClass cls = SlowEquilibriumClass::Semistable;
    if (p.b > 0.0) cls = SlowEquilibriumClass::Unstable;
    if (p.b < 0.0) cls = SlowEquilibriumClass::Stable;
    out.push_back({State{p.b, std::abs(p.b) + p.I}, cls});
    return out;
}

}  // namespace aif
