//! Physical constants in the crate's unit system (µeV, ps).

/// Reduced Planck constant in µeV·ps.
pub const HBAR_UEV_PS: f64 = 658.211_956_9;

/// `2·sqrt(2·ln 2)`: ratio of a Gaussian's FWHM to its standard deviation.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

/// Holder for the fixed constants, for callers that want them as a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
}

impl PhysicalConstants {
    pub const fn new() -> Self {
        Self { hbar: HBAR_UEV_PS }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::new()
    }
}
