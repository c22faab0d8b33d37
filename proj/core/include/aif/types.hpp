#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace aif {

/// Which slow (adaptation) dynamics drives w.
///
/// DecoupledLinear: w' = eps*(b - w); the slow flow points down both branches
/// of the critical manifold when b = 0.
/// CoupledLinear:   w' = eps*(v - b); the slow flow points up the right branch
/// for v > b, which changes how canard segments terminate.
enum class SlowDynamics { DecoupledLinear, CoupledLinear };

enum class Zone { Left, Right, OnSwitching, OnThreshold };

struct Tolerances {
    double root_tol = 1e-10;    // boundary membership and crossing acceptance
    double newton_tol = 1e-9;   // fixed-point / corrector residual
    int max_iterations = 50;

    void validate() const {
        if (!(root_tol > 0) || !(newton_tol > 0) || max_iterations <= 0) {
            throw std::invalid_argument("tolerances must be positive");
        }
    }
};

struct ModelParams {
    double I = 0.1;       // applied current
    double eps = 0.01;    // timescale separation, eps > 0
    double b = 0.0;       // slow-dynamics offset
    double v_res = 0.2;   // reset voltage
    double v_thr = 1.0;   // threshold voltage
    double k = 0.05;      // reset increment on w
    SlowDynamics slow = SlowDynamics::DecoupledLinear;
    Tolerances tol{};

    void validate() const {
        if (!std::isfinite(I) || !std::isfinite(eps) || !std::isfinite(b) ||
            !std::isfinite(v_res) || !std::isfinite(v_thr) || !std::isfinite(k)) {
            throw std::invalid_argument("model parameters must be finite");
        }
        if (!(eps > 0)) throw std::invalid_argument("eps must be > 0");
        if (!(v_res > 0)) throw std::invalid_argument("v_res must be > 0");
        if (!(v_thr > v_res)) throw std::invalid_argument("v_thr must exceed v_res");
        if (!(k >= 0)) throw std::invalid_argument("k must be >= 0");
        tol.validate();
    }

    /// Several closed-form identities (post-reset recurrences, canard anchor
    /// condition) hold only for the b = 0 decoupled slow dynamics.
    void require_decoupled_b0(const char* what) const {
        if (slow != SlowDynamics::DecoupledLinear || b != 0.0) {
            throw std::invalid_argument(std::string(what) +
                                        " requires DecoupledLinear slow dynamics with b = 0");
        }
    }
};

struct State {
    double v = 0.0;
    double w = 0.0;

    bool finite() const { return std::isfinite(v) && std::isfinite(w); }
};

inline bool operator==(const State& a, const State& b) { return a.v == b.v && a.w == b.w; }

/// Base for failures of the numerical machinery (as opposed to invalid input,
/// which throws std::invalid_argument).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceError : NumericalError {
    using NumericalError::NumericalError;
};

struct OverflowError : NumericalError {
    using NumericalError::NumericalError;
};

/// An event became tangent where the machinery needs transversality
/// (saltation factors carry 1/v' at the event).
struct GrazingError : NumericalError {
    using NumericalError::NumericalError;
};

/// A prescribed itinerary could not be completed: some segment failed to reach
/// its boundary line. Carries which segment broke and why.
struct ItineraryError : NumericalError {
    int segment_index;
    ItineraryError(int segment, const std::string& what)
        : NumericalError("itinerary break at segment " + std::to_string(segment) + ": " + what),
          segment_index(segment) {}
};

}  // namespace aif
