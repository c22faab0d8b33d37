#pragma once

#include <optional>

#include "aif/model.hpp"
#include "aif/types.hpp"

namespace aif {

/// 2x2 matrix, row-major. Enough linear algebra for variational products.
struct Mat2 {
    double a11 = 1, a12 = 0, a21 = 0, a22 = 1;

    friend Mat2 operator*(const Mat2& l, const Mat2& r) {
        return {l.a11 * r.a11 + l.a12 * r.a21, l.a11 * r.a12 + l.a12 * r.a22,
                l.a21 * r.a11 + l.a22 * r.a21, l.a21 * r.a12 + l.a22 * r.a22};
    }
    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }
};

struct Vec2 {
    double x = 0, y = 0;
};

inline Vec2 operator*(const Mat2& m, const Vec2& u) {
    return {m.a11 * u.x + m.a12 * u.y, m.a21 * u.x + m.a22 * u.y};
}

struct FlowResult {
    State state;
    double elapsed = 0.0;
};

/// Vector field (v', w') of the zone's linear system at s. The field is
/// continuous across the switching line, so zone only matters for the |v|
/// branch; Left/Right must be consistent with sign(v) up to the boundary.
Vec2 field(Zone zone, const State& s, const ModelParams& p);

/// Exact flow of the right-zone system (v' = v - w + I) for time t, negative
/// t allowed (backward evaluation). No zone-exit checking: the formula is
/// evaluated as-is and the caller owns zone bookkeeping.
State flow_plus(const State& s0, double t, const ModelParams& p);

/// Exact flow of the left-zone system (v' = -v - w + I). Mirror of flow_plus.
State flow_minus(const State& s0, double t, const ModelParams& p);

State zone_flow(Zone zone, const State& s0, double t, const ModelParams& p);

/// Exact state-transition (variational) matrix e^{tA} of the zone's linear
/// system over time t.
Mat2 transition_matrix(Zone zone, double t, const ModelParams& p);

enum class TargetLine {
    Switching,              // v = 0
    Threshold,              // v = v_thr
    ResetLine,              // v = v_res
    SlowNullclineCrossing,  // the S0^- line w = -v + I (left zone)
};

enum class CrossingDirection { Any, Increasing, Decreasing };

struct CrossingQuery {
    TargetLine target = TargetLine::Switching;
    double t_max = 1e4;
    CrossingDirection direction = CrossingDirection::Any;
    // Which zone flow applies. If unset it is inferred from s0 (and from the
    // field direction when s0 sits on the switching line).
    std::optional<Zone> zone{};
};

enum class CrossingStatus { Crossed, NoCrossing, Grazing };

struct CrossingResult {
    CrossingStatus status = CrossingStatus::NoCrossing;
    double t = 0.0;    // crossing (or tangency) time, valid unless NoCrossing
    State state{};     // state at t
    bool diverged = false;  // stopped because the expanding flow would overflow
};

/// First time t in (0, t_max] at which the zone flow from s0 meets the target
/// line, matching the requested crossing direction, located to the root
/// tolerance. Returns Grazing when the flow touches the line tangentially
/// (|g| < 1e-10 with |g'| < 1e-8 at a bracketed extremum of g).
CrossingResult first_crossing(const State& s0, const CrossingQuery& q, const ModelParams& p);

}  // namespace aif
