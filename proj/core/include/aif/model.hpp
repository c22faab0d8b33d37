#pragma once

#include <optional>
#include <vector>

#include "aif/types.hpp"

namespace aif {

/// A straight line w = w_ref + slope*(v - v_ref) in the phase plane.
struct Line {
    double v_ref = 0.0;
    double w_ref = 0.0;
    double slope = 0.0;

    double w_at(double v) const { return w_ref + slope * (v - v_ref); }

    /// Euclidean point-to-line distance.
    double distance_to(const State& s) const {
        return std::abs(s.w - w_at(s.v)) / std::sqrt(1.0 + slope * slope);
    }
};

/// Critical manifold branches and the exact invariant (slow) lines of the two
/// zone flows. s_eps_plus is the repelling slow manifold of the right zone,
/// s_eps_minus the attracting slow manifold of the left zone.
struct ManifoldGeometry {
    Line s0_plus;      // w = v + I, v >= 0
    Line s0_minus;     // w = -v + I, v < 0
    Line s_eps_plus;   // exact invariant line of the right-zone flow
    Line s_eps_minus;  // exact invariant line of the left-zone flow

    static ManifoldGeometry for_params(const ModelParams& p);
};

/// Exact invariant slow line of the requested zone flow, when one exists.
/// For the coupled dynamics this is the eigenline of the slow eigenvalue and
/// requires eps < 1/4 (real eigenvalues); returns nullopt otherwise.
std::optional<Line> slow_manifold_line(Zone zone, const ModelParams& p);

Zone classify_zone(const State& s, const ModelParams& p);

enum class FastStability { Stable, Unstable, SemistableCorner };

struct FastEquilibrium {
    State state;
    FastStability stability;
    bool in_strip;  // v <= v_thr, i.e. inside the admissible strip
};

/// Equilibria of the layer problem v' = |v| - w + I at frozen w.
/// Empty for w < I, the corner (0, I) for w = I, one stable and one unstable
/// point for w > I.
std::vector<FastEquilibrium> fast_subsystem_equilibria(double w, const ModelParams& p);

struct FastSubsystemBifurcations {
    double saddle_node_w;        // = I
    double homoclinic_w;         // = v_res + I
    // the reset-induced limit cycle of the layer problem exists for
    // w < homoclinic_w (unbounded below)
    double cycle_interval_upper;
};

FastSubsystemBifurcations fast_subsystem_bifurcations(const ModelParams& p);

enum class SlowEquilibriumClass { Stable, Unstable, Semistable };

struct SlowEquilibrium {
    State state;
    SlowEquilibriumClass classification;
};

/// Equilibria of the reduced flow on the critical manifold, classified by the
/// one-dimensional slow dynamics along S0.
std::vector<SlowEquilibrium> slow_flow_equilibria(const ModelParams& p);

}  // namespace aif
