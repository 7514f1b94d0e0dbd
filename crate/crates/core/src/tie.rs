//! Tie-aware comparisons shared by every solver.
//!
//! Values that agree to a relative `1e-12` count as equal. Rational inputs
//! produce exact ties (for example `n = 2, p = 0.4, p' = 0.2`, where stopping
//! on the first `+1` and continuing are worth the same), and every solver
//! breaks those ties toward stopping so all routes report the smallest
//! optimal thresholds.

pub(crate) const REL_TOL: f64 = 1e-12;

/// `a >= b` up to the relative tie tolerance.
#[inline]
pub(crate) fn at_least(a: f64, b: f64) -> bool {
    a >= b - REL_TOL * a.abs().max(b.abs())
}

/// `a < b` by more than the tie tolerance.
#[inline]
pub(crate) fn strictly_below(a: f64, b: f64) -> bool {
    !at_least(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_noise_is_a_tie() {
        let a = 0.6_f64;
        let b = 0.6000000000000001_f64;
        assert!(at_least(a, b));
        assert!(at_least(b, a));
        assert!(strictly_below(0.5, 0.6));
    }

    #[test]
    fn tiny_values_compare_relatively() {
        assert!(strictly_below(4.32e-11, 4.38e-11));
    }
}
