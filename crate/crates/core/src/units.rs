//! Physical constants (CODATA 2018 exact values) and unit helpers.
//!
//! Everything inside the crate works in SI with angular frequencies in rad/s.
//! Conversions from the "/2π Hz" figures quoted on experiments happen at the
//! configuration boundary.

use std::f64::consts::PI;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;

/// Angular frequency (rad/s) for a frequency quoted in Hz.
pub fn hz_to_angular(f: f64) -> f64 {
    2.0 * PI * f
}

pub fn angular_to_hz(w: f64) -> f64 {
    w / (2.0 * PI)
}
