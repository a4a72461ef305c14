//! Continuous-layer (broadcast) expected rate of a point-to-point channel
//! whose gain has a tabulated distribution.
//!
//! With the optimal power distribution the expected rate is
//! `∫_{s0}^{s1} F̄(s)(2/s + f′(s)/f(s)) ds`, where `s1` solves
//! `F̄(s) = s·f(s)` and `s0` solves `F̄(s) = s(1 + κ·P·s)f(s)`. The `f′/f` term
//! is integrated by parts, `∫F̄ f′/f = [F̄ ln f] + ∫ f ln f`, so the tabulated
//! slope of `f` is never differentiated numerically a second time.

use super::RateResult;
use crate::error::{Error, Result};
use crate::gains::GainDistribution;
use crate::numerics::{first_sign_change, gauss_legendre};

/// Which equation fixes the lower boundary `s0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum S0Equation {
    /// `F̄(s0) = s0(1 + P·s0) f(s0)`.
    Standard,
    /// `F̄(s0) = s0(1 + e^(a_th)·P·s0) f(s0)`: relays that stay silent in the
    /// OFF state save power, which scales the effective SNR.
    PowerSaving { a_th: f64 },
}

impl S0Equation {
    fn power_scale(self) -> f64 {
        match self {
            S0Equation::Standard => 1.0,
            S0Equation::PowerSaving { a_th } => a_th.exp(),
        }
    }
}

const NODES_PER_CELL: usize = 4;

/// `prefactor · ∫_{s0}^{s1} F̄(s)(2/s + f′/f) ds` for the distribution `dist`.
pub fn continuous_expected_rate(
    dist: &GainDistribution,
    ps: f64,
    prefactor: f64,
    s0_equation: S0Equation,
) -> Result<RateResult> {
    if !(prefactor > 0.0 && prefactor <= 1.0 + 1e-12) {
        return Err(crate::error::domain("continuous_expected_rate", format!("prefactor {prefactor} outside (0, 1]")));
    }
    let kappa = s0_equation.power_scale() * ps;
    let grid = &dist.grid;
    let tol = 1e-12;
    let s1 = first_sign_change(
        |s| {
            let (cdf, f) = dist.eval(s);
            (1.0 - cdf) - s * f
        },
        grid,
        tol,
    )
    .ok_or_else(|| Error::BoundaryNotFound { which: "upper (s1)", detail: "F̄ − s·f keeps its sign on the grid".into() })?;
    let s0 = first_sign_change(
        |s| {
            let (cdf, f) = dist.eval(s);
            (1.0 - cdf) - s * (1.0 + kappa * s) * f
        },
        grid,
        tol,
    )
    .ok_or_else(|| Error::BoundaryNotFound {
        which: "lower (s0)",
        detail: "F̄ − s(1 + P·s)f keeps its sign on the grid".into(),
    })?;

    let mut out = RateResult::new(0.0, "continuous-layer").with_param("s0", s0).with_param("s1", s1);
    if s0 >= s1 {
        return Ok(out);
    }

    let (x, w) = gauss_legendre(NODES_PER_CELL);
    let mut cells: Vec<f64> = vec![s0];
    cells.extend(grid.iter().copied().filter(|&g| g > s0 && g < s1));
    cells.push(s1);
    let mut body = 0.0;
    for c in cells.windows(2) {
        let (a, b) = (c[0], c[1]);
        let (half, mid) = (0.5 * (b - a), 0.5 * (a + b));
        for (xi, wi) in x.iter().zip(&w) {
            let s = mid + half * xi;
            let (cdf, f) = dist.eval(s);
            let flnf = if f > 0.0 { f * f.ln() } else { 0.0 };
            body += half * wi * (2.0 * (1.0 - cdf) / s + flnf);
        }
    }
    let edge = |s: f64| {
        let (cdf, f) = dist.eval(s);
        if f > 0.0 {
            (1.0 - cdf) * f.ln()
        } else {
            0.0
        }
    };
    let value = prefactor * (body + edge(s1) - edge(s0));
    if !value.is_finite() {
        return Err(Error::NonFiniteIntegrand { at: s0 });
    }
    out.value_nats = value.max(0.0);
    out.evaluations = (cells.len() - 1) * NODES_PER_CELL;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gains::tabulate_quadrature;
    use crate::numerics::{exp_integral_e1, integrate};

    fn sum_table() -> GainDistribution {
        tabulate_quadrature(|s| (1.0 + s) * (-s).exp()).unwrap()
    }

    #[test]
    fn reproduces_two_branch_sum_closed_form() {
        let t = sum_table();
        let r = continuous_expected_rate(&t, 1.0, 1.0, S0Equation::Standard).unwrap();
        let golden = 0.5 * (1.0 + 5f64.sqrt());
        assert!((r.param("s1").unwrap() - golden).abs() < 1e-5, "{:?}", r.params);
        assert!((r.param("s0").unwrap() - 1.0).abs() < 1e-5);
        let e1 = |x: f64| exp_integral_e1(x).unwrap();
        let want = 3.0 * e1(1.0) - 3.0 * e1(golden) + (golden - 1.0) * (-golden).exp();
        assert!((r.value_nats - want).abs() < 1e-5, "{} vs {want}", r.value_nats);
        let quad = integrate(|s| (-s).exp() * (1.0 + s) * (3.0 / s - 1.0), 1.0, golden, 1e-12).unwrap();
        assert!((quad - want).abs() < 1e-9);
    }

    #[test]
    fn prefactor_is_linear() {
        let t = sum_table();
        let a = continuous_expected_rate(&t, 3.0, 1.0, S0Equation::Standard).unwrap().value_nats;
        let b = continuous_expected_rate(&t, 3.0, 0.5, S0Equation::Standard).unwrap().value_nats;
        assert!((b - 0.5 * a).abs() < 1e-15);
        assert!(continuous_expected_rate(&t, 3.0, 0.0, S0Equation::Standard).is_err());
    }

    #[test]
    fn power_saving_lowers_s0() {
        let t = sum_table();
        let a = continuous_expected_rate(&t, 1.0, 1.0, S0Equation::Standard).unwrap();
        let b = continuous_expected_rate(&t, 1.0, 1.0, S0Equation::PowerSaving { a_th: 0.3 }).unwrap();
        assert!(b.param("s0").unwrap() < a.param("s0").unwrap());
        assert!(b.value_nats > a.value_nats);
    }
}
