#include "aif/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace aif {

namespace {

constexpr double kEquilibriumTol = 1e-12;

// Entry zone for a state that may sit on the switching line. The field is
// continuous across v = 0, so the sign of v' decides.
Zone entry_zone(const State& s, const ModelParams& p) {
    const Zone z = classify_zone(s, p);
    if (z == Zone::Left || z == Zone::Right) return z;
    if (z == Zone::OnThreshold) return Zone::Right;
    const double vdot = p.I - s.w;
    return vdot < 0.0 ? Zone::Left : Zone::Right;
}

bool nearly_stationary(Zone z, const State& s, const ModelParams& p, double tol) {
    const Vec2 f = field(z, s, p);
    return std::abs(f.x) < tol && std::abs(f.y) < tol;
}

}  // namespace

StepResult step_hybrid(const State& s, const ModelParams& p, double t_horizon) {
    if (!s.finite()) throw std::invalid_argument("step_hybrid: non-finite state");
    if (s.v > p.v_thr + p.tol.root_tol) {
        throw std::invalid_argument("step_hybrid: state beyond threshold");
    }
    const Zone zone = entry_zone(s, p);

    if (nearly_stationary(zone, s, p, kEquilibriumTol)) {
        return {Segment{zone, s, 0.0, s, SegmentEnd::EquilibriumLike}, std::nullopt};
    }

    CrossingQuery sw{TargetLine::Switching, t_horizon, CrossingDirection::Any, zone};
    CrossingResult best{};
    SegmentEnd end_kind = SegmentEnd::HorizonEnd;

    if (zone == Zone::Left) {
        // only exit: back to the switching line with v increasing
        sw.direction = CrossingDirection::Increasing;
        best = first_crossing(s, sw, p);
        end_kind = SegmentEnd::SwitchToRight;
    } else {
        sw.direction = CrossingDirection::Decreasing;
        const CrossingResult to_switch = first_crossing(s, sw, p);
        CrossingQuery th{TargetLine::Threshold, t_horizon, CrossingDirection::Increasing, zone};
        const CrossingResult to_thr = first_crossing(s, th, p);

        // A tangency within root tolerance of an event line counts as reaching
        // it: at exact tangency with v = v_thr the reset rule fires.
        const bool sw_ok = to_switch.status != CrossingStatus::NoCrossing;
        const bool th_ok = to_thr.status != CrossingStatus::NoCrossing;
        if (sw_ok && (!th_ok || to_switch.t < to_thr.t)) {
            best = to_switch;
            end_kind = SegmentEnd::SwitchToLeft;
        } else if (th_ok) {
            best = to_thr;
            end_kind = SegmentEnd::Reset;
        } else {
            best = to_thr.diverged ? to_thr : to_switch;
        }
    }

    if (best.status == CrossingStatus::NoCrossing) {
        const State s_end = best.state;
        const double t_end = best.t;
        if (best.diverged) {
            throw NumericalError("step_hybrid: flow diverged without reaching a boundary");
        }
        const SegmentEnd ek = nearly_stationary(zone, s_end, p, 1e-8)
                                  ? SegmentEnd::EquilibriumLike
                                  : SegmentEnd::HorizonEnd;
        return {Segment{zone, s, t_end, s_end, ek}, std::nullopt};
    }

    State hit = best.state;
    if (end_kind == SegmentEnd::Reset) {
        hit.v = p.v_thr;  // snap onto the event line; located to root tolerance
        const State post{p.v_res, hit.w + p.k};
        return {Segment{zone, s, best.t, hit, SegmentEnd::Reset},
                ResetEvent{best.t, hit, post}};
    }
    hit.v = 0.0;
    return {Segment{zone, s, best.t, hit, end_kind}, std::nullopt};
}

HybridTrajectory simulate(const State& s0, const ModelParams& p, int max_resets,
                          double max_time) {
    p.validate();
    if (!s0.finite()) throw std::invalid_argument("simulate: non-finite initial state");
    if (max_resets < 0 || !(max_time > 0)) {
        throw std::invalid_argument("simulate: need max_resets >= 0 and max_time > 0");
    }

    HybridTrajectory traj;
    traj.initial = s0;
    State s = s0;
    double t = 0.0;
    int resets = 0;

    while (t < max_time) {
        StepResult step = step_hybrid(s, p, max_time - t);
        if (step.segment.flight_time < 0) {
            throw NumericalError("simulate: negative flight time");
        }
        const double t_event = t + step.segment.flight_time;
        traj.segments.push_back(step.segment);
        t = t_event;
        if (step.reset) {
            ResetEvent ev = *step.reset;
            ev.t = t_event;  // absolute time
            traj.resets.push_back(ev);
            s = ev.post;
            if (max_resets > 0 && ++resets >= max_resets) break;
        } else {
            s = step.segment.end_state;
            if (step.segment.end_event == SegmentEnd::EquilibriumLike) break;
            if (step.segment.end_event == SegmentEnd::HorizonEnd) break;
        }
    }
    traj.total_time = t;
    return traj;
}

AttractorReport detect_attractor(const HybridTrajectory& traj, const ModelParams& p,
                                 const DetectorOptions& opts) {
    AttractorReport rep;

    const bool parked = !traj.segments.empty() &&
                        traj.segments.back().end_event == SegmentEnd::EquilibriumLike;

    // transient: at most transient_resets resets, and only those inside the
    // eps-scaled time budget, whichever cutoff comes first
    const double t_budget = opts.transient_time_over_eps / p.eps;
    int cut = 0;
    while (cut < static_cast<int>(traj.resets.size()) && cut < opts.transient_resets &&
           traj.resets[cut].t < t_budget) {
        ++cut;
    }
    rep.transient_resets_discarded = cut;

    std::vector<double> w;
    std::vector<double> times;
    for (std::size_t i = cut; i < traj.resets.size(); ++i) {
        w.push_back(traj.resets[i].post.w);
        times.push_back(traj.resets[i].t);
    }
    rep.w_sequence = w;

    if (parked && w.empty()) {
        rep.kind = AttractorReport::Kind::EquilibriumLike;
        return rep;
    }
    if (w.size() < 2) {
        rep.kind = AttractorReport::Kind::Undecided;
        rep.diagnostic = "insufficient post-transient resets (" + std::to_string(w.size()) + ")";
        return rep;
    }

    for (int n = 1; n <= opts.max_period; ++n) {
        if (static_cast<int>(w.size()) < 2 * n) break;
        bool ok = true;
        for (std::size_t j = 0; j + n < w.size(); ++j) {
            if (std::abs(w[j + n] - w[j]) >= opts.tolerance) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;

        rep.kind = AttractorReport::Kind::PeriodicNReset;
        rep.n_resets = n;
        double period_sum = 0.0;
        int period_count = 0;
        for (std::size_t j = 0; j + n < times.size(); ++j) {
            period_sum += times[j + n] - times[j];
            ++period_count;
        }
        rep.period = period_count ? period_sum / period_count : 0.0;
        rep.anchor_w = *std::max_element(w.end() - n, w.end());
        return rep;
    }

    if (parked) {
        rep.kind = AttractorReport::Kind::EquilibriumLike;
        return rep;
    }
    rep.kind = AttractorReport::Kind::Undecided;
    rep.diagnostic = "no period <= " + std::to_string(opts.max_period) +
                     " within tolerance over " + std::to_string(w.size()) + " resets";
    return rep;
}

double canard_segment_length(const HybridTrajectory& traj, const ModelParams& p,
                             double tube_delta) {
    if (!(tube_delta > 0)) throw std::invalid_argument("tube_delta must be > 0");
    const auto line = slow_manifold_line(Zone::Right, p);
    if (!line) return 0.0;

    double total = 0.0;
    for (const Segment& seg : traj.segments) {
        if (seg.zone != Zone::Right || seg.flight_time <= 0) continue;
        const double T = seg.flight_time;
        const int n = std::max(64, std::min(20000, static_cast<int>(T / 0.005)));
        const double dt = T / n;
        auto inside = [&](double t) {
            return line->distance_to(zone_flow(Zone::Right, seg.start, t, p)) < tube_delta;
        };
        bool prev_in = inside(0.0);
        double t_prev = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double t = i * dt;
            const bool in = inside(t);
            if (in && prev_in) {
                total += t - t_prev;
            } else if (in != prev_in) {
                // refine the tube boundary by bisection
                double lo = t_prev, hi = t;
                for (int it = 0; it < 60 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (inside(mid) == prev_in) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                total += prev_in ? (lo - t_prev) : (t - hi);
            }
            prev_in = in;
            t_prev = t;
        }
    }
    return total;
}

}  // namespace aif
