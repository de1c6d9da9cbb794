//! Physical constants and the conversions used at reporting boundaries.
//!
//! Everything inside the crate is strict SI: henries, farads, joules,
//! radians, and angular frequencies in rad/s. Conversions to MHz/GHz or
//! nH/pH happen only where values leave the crate.

use std::f64::consts::PI;

/// Magnetic flux quantum h/2e in webers.
pub const FLUX_QUANTUM: f64 = 2.067833848e-15;

/// Reduced Planck constant in joule-seconds.
pub const HBAR: f64 = 1.054571817e-34;

/// Angular frequency (rad/s) to ordinary frequency in MHz.
pub fn rad_s_to_mhz(omega: f64) -> f64 {
    omega / (2.0 * PI) / 1e6
}

pub fn rad_s_to_ghz(omega: f64) -> f64 {
    omega / (2.0 * PI) / 1e9
}

pub fn rad_s_to_khz(omega: f64) -> f64 {
    omega / (2.0 * PI) / 1e3
}

pub fn rad_s_to_hz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

pub fn mhz_to_rad_s(f: f64) -> f64 {
    f * 1e6 * 2.0 * PI
}

pub fn ghz_to_rad_s(f: f64) -> f64 {
    f * 1e9 * 2.0 * PI
}

pub fn khz_to_rad_s(f: f64) -> f64 {
    f * 1e3 * 2.0 * PI
}

/// Wraps a phase into `[0, 2π)`.
pub fn wrap_two_pi(phase: f64) -> f64 {
    let w = phase.rem_euclid(2.0 * PI);
    // rem_euclid can return exactly 2π for tiny negative inputs
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// Wraps a phase into `[-π, π)`.
pub fn wrap_pi(phase: f64) -> f64 {
    wrap_two_pi(phase + PI) - PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_round_trip() {
        let w = ghz_to_rad_s(5.62);
        assert!((rad_s_to_ghz(w) - 5.62).abs() < 1e-15);
        assert!((rad_s_to_mhz(mhz_to_rad_s(21.0)) - 21.0).abs() < 1e-12);
        assert!((rad_s_to_khz(khz_to_rad_s(1.5)) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn wrapping() {
        assert_eq!(wrap_two_pi(0.0), 0.0);
        assert!((wrap_two_pi(-0.5) - (2.0 * PI - 0.5)).abs() < 1e-15);
        assert!((wrap_two_pi(2.0 * PI + 0.25) - 0.25).abs() < 1e-15);
        assert!(wrap_two_pi(-1e-300) < 2.0 * PI);
        assert!((wrap_pi(1.5 * PI) + 0.5 * PI).abs() < 1e-15);
    }
}
