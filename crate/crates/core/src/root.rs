//! Bracketed scalar root finding (Brent's method).

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Absolute bracket half-width at which to stop. A relative term of
    /// `4·ε·|x|` is always added.
    pub x_tol: f64,
    /// Stop as soon as `|f(x)| ≤ f_tol`. Zero disables the test.
    pub f_tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub f_x: f64,
    pub iterations: usize,
    /// Final bracket, `lo ≤ x ≤ hi`.
    pub lo: f64,
    pub hi: f64,
}

/// Finds `x` in `[lo, hi]` with `|f(x)| ≤ tol` or a bracket narrower than `tol`.
/// Requires `f(lo)` and `f(hi)` of opposite sign.
pub fn root_find_bracketed<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<Root> {
    brent(f, lo, hi, RootOptions { x_tol: tol, f_tol: tol, max_iter: MAX_ITERATIONS })
}

pub fn brent<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, opts: RootOptions) -> Result<Root> {
    brent_traced(f, lo, hi, opts, |_, _| {})
}

/// Brent's method, reporting the bracket after every iteration.
pub fn brent_traced<F, T>(mut f: F, lo: f64, hi: f64, opts: RootOptions, mut on_bracket: T) -> Result<Root>
where
    F: FnMut(f64) -> f64,
    T: FnMut(f64, f64),
{
    if !(lo < hi) {
        return Err(Error::Domain(format!("bracket [{lo}, {hi}] requires lo < hi")));
    }
    let rtol = 4.0 * f64::EPSILON;
    let (mut xpre, mut xcur) = (lo, hi);
    let (mut fpre, mut fcur) = (f(xpre), f(xcur));
    if fpre.is_nan() || fcur.is_nan() || fpre * fcur > 0.0 {
        return Err(Error::NoSignChange { lo, hi, f_lo: fpre, f_hi: fcur });
    }
    if fpre == 0.0 {
        return Ok(Root { x: xpre, f_x: fpre, iterations: 0, lo: xpre, hi: xpre });
    }
    if fcur == 0.0 {
        return Ok(Root { x: xcur, f_x: fcur, iterations: 0, lo: xcur, hi: xcur });
    }

    let (mut xblk, mut fblk) = (0.0, 0.0);
    let (mut spre, mut scur) = (0.0, 0.0);
    for iteration in 1..=opts.max_iter {
        if fpre != 0.0 && fcur != 0.0 && fpre.is_sign_negative() != fcur.is_sign_negative() {
            xblk = xpre;
            fblk = fpre;
            spre = xcur - xpre;
            scur = spre;
        }
        if fblk.abs() < fcur.abs() {
            xpre = xcur;
            xcur = xblk;
            xblk = xpre;
            fpre = fcur;
            fcur = fblk;
            fblk = fpre;
        }
        on_bracket(xcur.min(xblk), xcur.max(xblk));

        let delta = (opts.x_tol + rtol * xcur.abs()) / 2.0;
        let sbis = (xblk - xcur) / 2.0;
        if fcur == 0.0 || sbis.abs() < delta || fcur.abs() <= opts.f_tol {
            return Ok(Root { x: xcur, f_x: fcur, iterations: iteration, lo: xcur.min(xblk), hi: xcur.max(xblk) });
        }

        if spre.abs() > delta && fcur.abs() < fpre.abs() {
            let stry = if xpre == xblk {
                // secant
                -fcur * (xcur - xpre) / (fcur - fpre)
            } else {
                // inverse quadratic interpolation
                let dpre = (fpre - fcur) / (xpre - xcur);
                let dblk = (fblk - fcur) / (xblk - xcur);
                -fcur * (fblk * dblk - fpre * dpre) / (dblk * dpre * (fblk - fpre))
            };
            if 2.0 * stry.abs() < spre.abs().min(3.0 * sbis.abs() - delta) {
                spre = scur;
                scur = stry;
            } else {
                spre = sbis;
                scur = sbis;
            }
        } else {
            spre = sbis;
            scur = sbis;
        }

        xpre = xcur;
        fpre = fcur;
        if scur.abs() > delta {
            xcur += scur;
        } else {
            xcur += if sbis > 0.0 { delta } else { -delta };
        }
        fcur = f(xcur);
    }
    Err(Error::NotConverged { iterations: opts.max_iter })
}
