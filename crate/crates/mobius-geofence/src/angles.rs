//! Angle wrapping and congruence helpers.
//!
//! Convention everywhere in this crate: angles live in `(-pi, pi]`.

use std::f64::consts::PI;

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap(angle: f64) -> f64 {
    let a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a - 2.0 * PI
    } else {
        a
    }
}

/// Signed difference `a - b` wrapped into `(-pi, pi]`.
pub fn diff(a: f64, b: f64) -> f64 {
    wrap(a - b)
}

/// Residual of the congruence `a = b (mod pi)`, in `(-pi/2, pi/2]`.
///
/// Computed on doubled angles so both `b` and `b + pi` compare equal to `a`.
pub fn mod_pi_residual(a: f64, b: f64) -> f64 {
    wrap(2.0 * (a - b)) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_covers_half_open_interval() {
        assert_eq!(wrap(PI), PI);
        assert_eq!(wrap(-PI), PI);
        assert!((wrap(3.0 * PI) - PI).abs() < 1e-15);
        assert!((wrap(-0.5) + 0.5).abs() < 1e-15);
        assert!((wrap(7.0) - (7.0 - 2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn mod_pi_identifies_antipodal_headings() {
        assert!(mod_pi_residual(0.3, 0.3 + PI).abs() < 1e-12);
        assert!(mod_pi_residual(0.3, 0.3 - PI).abs() < 1e-12);
        assert!(mod_pi_residual(0.3, 0.3 + 5.0 * PI).abs() < 1e-12);
        assert!(mod_pi_residual(0.3, 0.9).abs() > 0.5);
    }
}
