//! Central finite-difference gradient checks.

use crate::scalar::Real;

/// Central-difference step used throughout the test suite.
pub const STEP: f64 = 1e-5;

/// Gradient magnitudes below this are compared on an absolute scale: a
/// central difference with step 1e-5 carries roughly 1e-10 absolute error,
/// so relative agreement below 1e-6 is only meaningful above it.
pub const RELATIVE_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub max_abs_error: f64,
    pub worst_index: usize,
    pub checked: usize,
}

/// `|a - n| / max(|a|, |n|, RELATIVE_FLOOR)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(RELATIVE_FLOOR)
}

/// Compares `analytic` with central differences of `f` around `x`.
pub fn compare<T: Real>(
    f: &mut dyn FnMut(&[T]) -> T,
    x: &[T],
    analytic: &[T],
    step: f64,
) -> GradCheckReport {
    compare_indices(f, x, analytic, step, 0..x.len())
}

/// As [`compare`], restricted to the coordinates in `indices`.
pub fn compare_indices<T: Real>(
    f: &mut dyn FnMut(&[T]) -> T,
    x: &[T],
    analytic: &[T],
    step: f64,
    indices: impl IntoIterator<Item = usize>,
) -> GradCheckReport {
    assert_eq!(x.len(), analytic.len());
    let mut probe = x.to_vec();
    let mut rep = GradCheckReport {
        max_rel_error: 0.0,
        max_abs_error: 0.0,
        worst_index: 0,
        checked: 0,
    };
    let h = T::lit(step);
    for i in indices {
        let orig = probe[i];
        probe[i] = orig + h;
        let up = f(&probe).as_f64();
        probe[i] = orig - h;
        let down = f(&probe).as_f64();
        probe[i] = orig;
        let numeric = (up - down) / (2.0 * step);
        let a = analytic[i].as_f64();
        let rel = relative_error(a, numeric);
        rep.max_abs_error = rep.max_abs_error.max((a - numeric).abs());
        if rel > rep.max_rel_error {
            rep.max_rel_error = rel;
            rep.worst_index = i;
        }
        rep.checked += 1;
    }
    rep
}
