#pragma once

// Aitken-style extrapolation of sequences sampled on a geometric schedule,
// with explicit divergence flags.  A sequence diverges when its last three
// magnitudes grow monotonically and either cross the absolute threshold or
// keep a sustained geometric growth ratio.

#include "nrat/field.hpp"
#include "nrat/error.hpp"

#include <cmath>
#include <vector>

namespace nrat {

enum class SeqStatus { converged, stationary, diverged, no_limit };

struct SeqLimit {
    Complex value;
    SeqStatus status = SeqStatus::no_limit;
    double err_est = 0.0;
    double ratio = 0.0;

    bool finite() const {
        return status == SeqStatus::converged || status == SeqStatus::stationary;
    }
};

struct ExtrapolateOpts {
    double div_threshold = 1e6;
    double growth_ratio = 1.25;
    double stationary_tol = 1e-40;
};

inline SeqLimit extrapolate(const std::vector<Complex>& u, const ExtrapolateOpts& opts = {}) {
    if (u.size() < 3)
        throw Error(ErrorCode::validation, "extrapolate: need at least 3 samples");
    size_t n = u.size();
    const Complex& u1 = u[n - 3];
    const Complex& u2 = u[n - 2];
    const Complex& u3 = u[n - 1];
    double g1 = FieldOps<Complex>::mag(u1);
    double g2 = FieldOps<Complex>::mag(u2);
    double g3 = FieldOps<Complex>::mag(u3);

    SeqLimit out;
    if (g3 > g2 && g2 > g1 && g1 > 0.0) {
        bool absolute = g3 > opts.div_threshold;
        bool sustained = (g3 / g2 >= opts.growth_ratio) && (g2 / g1 >= opts.growth_ratio);
        if (absolute || sustained) {
            out.status = SeqStatus::diverged;
            out.value = u3;
            return out;
        }
    }
    Complex d1 = u2 - u1;
    Complex d2 = u3 - u2;
    double scale = std::max(1.0, g3);
    if (FieldOps<Complex>::mag(d2) <= opts.stationary_tol * scale) {
        out.status = SeqStatus::stationary;
        out.value = u3;
        out.err_est = FieldOps<Complex>::mag(d2);
        return out;
    }
    if (FieldOps<Complex>::mag(d1) <= opts.stationary_tol * scale) {
        // restarted movement after a flat stretch: no usable model
        out.status = SeqStatus::no_limit;
        out.value = u3;
        return out;
    }
    Complex rho = d2 / d1;
    double r = FieldOps<Complex>::mag(rho);
    out.ratio = r;
    if (r < 0.95) {
        Complex one = FieldOps<Complex>::one_like(rho);
        Complex tail = d2 * rho / (one - rho);
        out.value = u3 + tail;
        out.err_est = FieldOps<Complex>::mag(tail) * r / std::max(1e-300, 1.0 - r);
        out.status = SeqStatus::converged;
        return out;
    }
    out.status = SeqStatus::no_limit;
    out.value = u3;
    return out;
}

}  // namespace nrat
