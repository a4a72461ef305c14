//! Bracketed scalar root finding (Brent).

use crate::error::{Error, Result};

/// A closed search interval with an absolute argument tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64, tol: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(crate::error::domain("Bracket::new", format!("need lo < hi, got [{lo}, {hi}]")));
        }
        if !(tol > 0.0) {
            return Err(crate::error::domain("Bracket::new", format!("tol = {tol} must be > 0")));
        }
        Ok(Self { lo, hi, tol })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Root of `f` on `b` by Brent's method.
///
/// Requires `f(lo)·f(hi) ≤ 0`. Iterates until the bracket is narrower than
/// `b.tol` (plus a few ulps) or `f` vanishes exactly.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, b: Bracket) -> Result<f64> {
    let (mut a, mut bb) = (b.lo, b.hi);
    let (mut fa, mut fb) = (f(a), f(bb));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(bb);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::NoSignChange { lo: b.lo, hi: b.hi, flo: fa, fhi: fb });
    }

    let mut c = bb;
    let mut fc = fb;
    let mut d = bb - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = bb - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = bb;
            bb = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * bb.abs() + 0.5 * b.tol;
        let xm = 0.5 * (c - bb);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(bb);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (bb - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = bb;
        fa = fb;
        bb += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(bb);
    }
    Ok(bb)
}

/// Scans `grid` for the first sign change of `f` and refines it with
/// [`find_root`]. Returns `None` when `f` keeps one sign on the whole grid.
pub fn first_sign_change<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64], tol: f64) -> Option<f64> {
    let mut prev: Option<(f64, f64)> = None;
    for &x in grid {
        let fx = f(x);
        if !fx.is_finite() {
            prev = None;
            continue;
        }
        if fx == 0.0 {
            return Some(x);
        }
        if let Some((xp, fp)) = prev {
            if (fp < 0.0) != (fx < 0.0) {
                let b = Bracket { lo: xp, hi: x, tol };
                return find_root(&mut f, b).ok();
            }
        }
        prev = Some((x, fx));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn br(lo: f64, hi: f64) -> Bracket {
        Bracket::new(lo, hi, 1e-13).unwrap()
    }

    #[test]
    fn linear_root() {
        let r = find_root(|s| s - 1.0, br(0.0, 2.0)).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_ratio() {
        let r = find_root(|s| s * s - s - 1.0, br(1.0, 2.0)).unwrap();
        assert!((r - 1.618_033_988_749_895).abs() < 1e-12);
    }

    #[test]
    fn omega_constant() {
        // Bisection oracle at 1e-9 gives 0.5671433.
        let r = find_root(|s| (-s).exp() - s, br(0.0, 1.0)).unwrap();
        assert!((r - 0.567_143_3).abs() < 1e-7);
    }

    #[test]
    fn invalid_bracket_is_reported() {
        let err = find_root(|s| s * s + 1.0, br(-1.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
        assert!(Bracket::new(1.0, 1.0, 1e-9).is_err());
        assert!(Bracket::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn sign_change_scan() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.05).collect();
        let r = first_sign_change(|s| (s - 2.345) * (s - 4.0), &grid, 1e-12).unwrap();
        assert!((r - 2.345).abs() < 1e-10);
        assert!(first_sign_change(|s| s + 1.0, &grid, 1e-12).is_none());
    }
}
