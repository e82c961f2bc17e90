use std::f64::consts::FRAC_PI_2;



/// Closed-form minimum of C(δ) = a + b·cos δ + s·sin δ from C(0), C(π/2), C(−π/2).
///
/// Returns the shift δ* ∈ (−π, π] and the predicted minimum. A flat sinusoid
/// returns δ* = 0.
pub fn sinusoid_minimum(c0: f64, c_plus: f64, c_minus: f64) -> (f64, f64) {
    let a = 0.5 * (c_plus + c_minus);
    let s = 0.5 * (c_plus - c_minus);
    let b = c0 - a;
    let amp = b.hypot(s);
    if amp < 1e-14 {
        return (0.0, c0);
    }
    let delta = crate::qcore::wrap_angle((-s).atan2(-b));
    (delta, a - amp)
}

/// Evaluation offsets used by [`sinusoid_minimum`].
pub const PROBES: [f64; 2] = [FRAC_PI_2, -FRAC_PI_2];

/// Wrapped rotation angle with near-zero values snapped to exactly zero.
pub(crate) fn canonical_angle(theta: f64) -> f64 {
    let w = crate::qcore::wrap_angle(theta);
    if w.abs() < 1e-14 {
        0.0
    } else {
        w
    }
}
