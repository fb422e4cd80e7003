//! Adaptive Simpson quadrature for the special-function and semigroup
//! integrals used throughout the crate.

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` with adaptive
/// Simpson refinement (Richardson-corrected).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    refine(&f, a, b, fa, fm, fb, whole, tol, 48)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        refine(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1)
            + refine(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial_exactly() {
        // Simpson is exact on cubics.
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12);
        assert!((v - (4.0 - 4.0 + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn integrates_exponential() {
        let v = adaptive_simpson(|x| (-x).exp(), 0.0, 10.0, 1e-10);
        assert!((v - (1.0 - (-10.0f64).exp())).abs() < 1e-9);
    }

    #[test]
    fn handles_oscillation() {
        let v = adaptive_simpson(|x| (5.0 * x).sin(), 0.0, std::f64::consts::PI, 1e-10);
        let exact = (1.0 - (5.0 * std::f64::consts::PI).cos()) / 5.0;
        assert!((v - exact).abs() < 1e-8);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(adaptive_simpson(|x| x, 1.0, 1.0, 1e-10), 0.0);
    }
}
