#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aif/flows.hpp"
#include "aif/model.hpp"
#include "aif/types.hpp"

namespace aif {

enum class SegmentEnd { SwitchToLeft, SwitchToRight, Reset, HorizonEnd, EquilibriumLike };

struct Segment {
    Zone zone;
    State start;
    double flight_time;
    State end_state;  // pre-event state; for Reset this is the v = v_thr hit
    SegmentEnd end_event;
};

struct ResetEvent {
    double t;     // absolute time of the threshold hit
    State pre;    // v = v_thr exactly
    State post;   // (v_res, pre.w + k) exactly
};

struct HybridTrajectory {
    State initial{};
    std::vector<Segment> segments;
    std::vector<ResetEvent> resets;
    double total_time = 0.0;
};

struct StepResult {
    Segment segment;
    std::optional<ResetEvent> reset;  // filled when segment ends in Reset
};

/// Flow from s to the first boundary event (switching line or threshold); the
/// reset rule is applied in zero time when v_thr is hit. t_horizon bounds the
/// segment's flight time.
StepResult step_hybrid(const State& s, const ModelParams& p, double t_horizon);

/// Event-driven simulation: composes step_hybrid until max_resets resets have
/// fired, max_time elapses, or the orbit parks at an equilibrium.
HybridTrajectory simulate(const State& s0, const ModelParams& p, int max_resets,
                          double max_time);

struct DetectorOptions {
    int max_period = 64;          // largest reset-count considered
    double tolerance = 1e-9;      // on post-reset w
    int transient_resets = 50;    // discard at most this many resets...
    double transient_time_over_eps = 10.0;  // ...or those before this/eps, whichever first
};

struct AttractorReport {
    enum class Kind { PeriodicNReset, EquilibriumLike, Undecided };
    Kind kind = Kind::Undecided;
    int n_resets = 0;
    double period = 0.0;
    double anchor_w = 0.0;  // largest post-reset w over one period
    int transient_resets_discarded = 0;
    std::vector<double> w_sequence;  // post-transient post-reset w values
    std::string diagnostic;
};

/// Reads the post-reset w sequence on {v = v_res}, discards a transient
/// prefix, and reports the minimal period N <= max_period under the detection
/// tolerance.
AttractorReport detect_attractor(const HybridTrajectory& traj, const ModelParams& p,
                                 const DetectorOptions& opts = {});

/// Total flight time the trajectory spends in the right zone within Euclidean
/// distance tube_delta of the repelling slow manifold.
double canard_segment_length(const HybridTrajectory& traj, const ModelParams& p,
                             double tube_delta);

}  // namespace aif
