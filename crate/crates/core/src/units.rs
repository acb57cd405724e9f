//! Unit conversions. Frequencies are stored as angular frequencies in rad/s
//! and times in seconds; configuration and output use MHz and µs.

use std::f64::consts::TAU;

/// `(2π)·x MHz` expressed in rad/s.
pub fn mhz(x: f64) -> f64 {
    TAU * x * 1e6
}

/// rad/s back to the `(2π)·x MHz` figure.
pub fn to_mhz(omega: f64) -> f64 {
    omega / (TAU * 1e6)
}

pub fn us(x: f64) -> f64 {
    x * 1e-6
}

pub fn to_us(t: f64) -> f64 {
    t * 1e6
}

/// Electron gyromagnetic ratio, MHz per gauss.
pub const ELECTRON_GYRO_MHZ_PER_GAUSS: f64 = 2.8025;

/// NV ground-state zero-field splitting, MHz.
pub const NV_ZERO_FIELD_MHZ: f64 = 2870.0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mhz_round_trip() {
        let w = mhz(10.03);
        assert!((w - 2.0 * std::f64::consts::PI * 10.03e6).abs() < 1e-6);
        assert!((to_mhz(w) - 10.03).abs() < 1e-12);
        assert!((to_us(us(0.48)) - 0.48).abs() < 1e-15);
    }
}
