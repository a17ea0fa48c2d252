//! Mixed absolute/relative comparison used throughout the crate.

/// Default comparison tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Tolerance that is absolute for magnitudes up to 1 and relative above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance(pub f64);

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(DEFAULT_TOL)
    }
}

impl Tolerance {
    pub fn scaled_diff(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1.0)
    }

    pub fn close(&self, a: f64, b: f64) -> bool {
        Self::scaled_diff(a, b) <= self.0
    }

    /// `value` measured against a reference magnitude rather than its own size.
    pub fn small(&self, value: f64, scale: f64) -> bool {
        value.abs() <= self.0 * scale.abs().max(1.0)
    }
}
