//! The linguistic definite integral.
//!
//! `∫_{h_a}^{h_b} f(h) dh` is evaluated by substituting `x = g(h)` and
//! integrating over the unit-space image `[g(h_a), g(h_b)]` with adaptive
//! Simpson quadrature.

use crate::error::{Error, Result};
use crate::scale::{LinguisticScale, TermCoord};

/// Absolute tolerance used for general densities, in unit space.
pub const QUADRATURE_TOLERANCE: f64 = 1e-9;

const MAX_DEPTH: u32 = 48;

/// Integrates a density between two terms of `scale`.
///
/// Swapping the bounds negates the result and equal bounds give zero.
pub fn linguistic_integral<F: Fn(f64) -> f64>(
    scale: &LinguisticScale,
    density: F,
    a: TermCoord,
    b: TermCoord,
) -> Result<f64> {
    integrate_unit(density, scale.to_unit(a)?, scale.to_unit(b)?, QUADRATURE_TOLERANCE)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` in unit space.
pub fn integrate_unit<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate_unit(f, b, a, tol).map(|v| -v);
    }
    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteDensity { at: x })
        }
    };
    let (fa, fb) = (eval(a)?, eval(b)?);
    let m = 0.5 * (a + b);
    let fm = eval(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&eval, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}
