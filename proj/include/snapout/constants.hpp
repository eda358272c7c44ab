#pragma once

namespace snapout {

// Absolute constants behind the parameter scalings. The scalings themselves
// (s ~ sqrt(t), ell ~ ln(T/t) sqrt(t), ...) are fixed; these multipliers were
// frozen by a calibration run on the canonical disk-with-inner-circle
// scenario and can be overridden per experiment in the [constants] config
// section.
struct RecoveryConstants {
    // Fixed-frequency kernel-discontinuity detector (and its refinement).
    double fixed_sens = 0.9;   // sensitivity threshold s = fixed_sens * sqrt(t)
    double fixed_trunc = 2.0;  // truncation u = fixed_trunc * sqrt(t)
    double refine_len = 0.5;   // rectangle half-length ell = refine_len * sqrt(eps/kappa)

    // High-frequency visit/transition detector.
    double hf_ratio = 0.004;  // ratio threshold s
    double hf_grid = 1.0;     // grid scale eps = hf_grid * sqrt(t)
    double hf_len = 0.6;      // strip half-width ell = hf_len * ln(T/t) * sqrt(t)
    double hf_visits = 18.0;  // visit floor n0 = ceil(hf_visits * ln(T/t))
};

}  // namespace snapout
