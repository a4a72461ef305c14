//! Closed-form upper bounds: cutset (throughput and continuous-layer expected
//! rate), relay cooperation, and the cutset of the DF upper-bound model.

use crate::channel::PowerConfig;
use crate::error::Result;
use crate::numerics::{exp_integral_e1, find_root, integrate, maximize_scalar, Bracket};
use crate::schemes::RateResult;

/// Golden ratio: root of `s² − s − 1`, the upper continuous-layer boundary of
/// a two-branch Rayleigh sum.
pub const GOLDEN: f64 = 1.618_033_988_749_894_8;

/// Constant of the first-hop DF-upper-bound expression.
pub const DFUB_FIRST_HOP_CONSTANT: f64 = 0.1157;
/// Constant of the second-hop DF-upper-bound expression.
pub const DFUB_SECOND_HOP_CONSTANT: f64 = 0.1296;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    CutsetThroughput,
    CutsetExpected,
    RcThroughput,
    DfubCutset,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] =
        [BoundKind::CutsetThroughput, BoundKind::CutsetExpected, BoundKind::RcThroughput, BoundKind::DfubCutset];

    pub fn tag(self) -> &'static str {
        match self {
            BoundKind::CutsetThroughput => "cutset-throughput",
            BoundKind::CutsetExpected => "cutset-expected",
            BoundKind::RcThroughput => "rc-throughput",
            BoundKind::DfubCutset => "dfub-cutset",
        }
    }

    pub fn evaluate(self, p: &PowerConfig) -> Result<RateResult> {
        match self {
            BoundKind::CutsetThroughput => Ok(cutset_throughput(p)),
            BoundKind::CutsetExpected => Ok(cutset_expected_rate(p)),
            BoundKind::RcThroughput => Ok(rc_throughput(p)),
            BoundKind::DfubCutset => dfub_cutset(p),
        }
    }
}

fn e1(x: f64) -> f64 {
    exp_integral_e1(x).expect("positive argument")
}

fn scalar_max<F: FnMut(f64) -> f64>(f: F, hi: f64, method: &'static str) -> RateResult {
    let r = maximize_scalar(f, Bracket { lo: hi * 1e-9, hi, tol: 1e-12 });
    let mut out = RateResult::new(r.value.max(0.0), method).with_param("s", r.argmax[0]);
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out
}

/// `max_s e^(−s)(1 + s)·ln(1 + P s)` with `P = min{P_s, P_r}`.
pub fn cutset_throughput(p: &PowerConfig) -> RateResult {
    let pm = p.ps.min(p.pr);
    scalar_max(|s| (-s).exp() * (1.0 + s) * (pm * s).ln_1p(), 10.0, "closed-form")
}

/// Positive root of `P s³ + s² − s − 1 = 0` by Cardano's formula, with the
/// trigonometric form when the cubic has three real roots, polished by Newton.
pub fn cardano_root(pw: f64) -> f64 {
    let a = 1.0 / (2.0 * pw) - 1.0 / (6.0 * pw * pw) - 1.0 / (27.0 * pw.powi(3));
    let b = 1.0 / (3.0 * pw) + 1.0 / (9.0 * pw * pw);
    let shift = 1.0 / (3.0 * pw);
    let disc = a * a - b.powi(3);
    let mut s = if disc >= 0.0 {
        let c = (disc.sqrt() + a).cbrt();
        c + b / c - shift
    } else {
        let phi = (a / b.powf(1.5)).clamp(-1.0, 1.0).acos();
        (0..3)
            .map(|k| 2.0 * b.sqrt() * ((phi - 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos() - shift)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    for _ in 0..4 {
        let f = ((pw * s + 1.0) * s - 1.0) * s - 1.0;
        let df = (3.0 * pw * s + 2.0) * s - 1.0;
        if df == 0.0 {
            break;
        }
        s -= f / df;
    }
    s
}

/// Continuous-layer rate of a two-branch Rayleigh sum between `s0` and the
/// golden ratio: `3E1(s0) − 3E1(s1) − (s0 − 1)e^(−s0) + (s1 − 1)e^(−s1)`.
fn two_branch_layered(s0: f64) -> f64 {
    let s1 = GOLDEN;
    3.0 * e1(s0) - 3.0 * e1(s1) - (s0 - 1.0) * (-s0).exp() + (s1 - 1.0) * (-s1).exp()
}

/// `∫_{s0}^{φ} e^(−s)(1 + s)(3/s − 1) ds` by adaptive quadrature.
pub fn cutset_expected_quadrature(pw: f64) -> Result<f64> {
    let s0 = cardano_root(pw);
    integrate(|s| (-s).exp() * (1.0 + s) * (3.0 / s - 1.0), s0, GOLDEN, 1e-12)
}

/// Continuous-layer cutset bound with `P = min{P_s, P_r}`.
pub fn cutset_expected_rate(p: &PowerConfig) -> RateResult {
    let pm = p.ps.min(p.pr);
    let s0 = cardano_root(pm);
    RateResult::new(two_branch_layered(s0).max(0.0), "closed-form").with_param("s0", s0).with_param("s1", GOLDEN)
}

/// Upper end of the relay-cooperation threshold search.
pub fn rc_threshold_cap(p: &PowerConfig) -> f64 {
    let (ps, pr) = (p.ps, p.pr);
    ((ps * ps + 4.0 * ps * pr + 20.0 * pr * pr).sqrt() - ps + 2.0 * pr) / (2.0 * ps + 4.0 * pr)
}

/// `max_s (1 + s)(1 + s·P_s/P_r)·e^(−s(1 + P_s/P_r))·ln(1 + P_s s)`.
pub fn rc_throughput(p: &PowerConfig) -> RateResult {
    let r = p.ps / p.pr;
    scalar_max(|s| (1.0 + s) * (1.0 + s * r) * (-s * (1.0 + r)).exp() * (p.ps * s).ln_1p(), rc_threshold_cap(p), "closed-form")
}

/// Both forms of the two DF-upper-bound cutset terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfubTerms {
    /// Lower boundary of the first-hop integral.
    pub s1: f64,
    /// Upper boundary of the first-hop integral.
    pub u: f64,
    /// Lower boundary of the second-hop integral.
    pub s2: f64,
    pub r1_closed: f64,
    pub r1_quadrature: f64,
    pub r2_closed: f64,
    pub r2_quadrature: f64,
}

/// `F̄ − s(1 + P s)f` for the maximum of two unit exponentials, divided by `e^(−s)`.
fn max_branch_boundary(s: f64, pw: f64) -> f64 {
    (2.0 - (-s).exp()) - 2.0 * s * (1.0 + pw * s) * (-(-s).exp_m1())
}

pub fn dfub_terms(p: &PowerConfig) -> Result<DfubTerms> {
    let u = find_root(|s| max_branch_boundary(s, 0.0), Bracket::new(0.5, 3.0, 1e-14)?)?;
    let s1 = find_root(|s| max_branch_boundary(s, p.ps), Bracket::new(1e-15, u, 1e-15)?)?;
    let em = (-s1).exp();
    let r1_closed = 4.0 * e1(s1) - 2.0 * e1(2.0 * s1) + em * em - 3.0 * em - (-(-s1).exp_m1()).ln() - DFUB_FIRST_HOP_CONSTANT;
    let r1_quadrature = integrate(
        |s| {
            let e = (-s).exp();
            e * (2.0 - e) * (2.0 / s + (2.0 * e - 1.0) / -(-s).exp_m1())
        },
        s1,
        u,
        1e-12,
    )?;
    let s2 = cardano_root(p.pr);
    let r2_closed = 3.0 * e1(s2) - (s2 - 1.0) * (-s2).exp() - DFUB_SECOND_HOP_CONSTANT;
    let r2_quadrature = cutset_expected_quadrature(p.pr)?;
    Ok(DfubTerms { s1, u, s2, r1_closed, r1_quadrature, r2_closed, r2_quadrature })
}

/// `min{R1, R2}` from the constant-bearing closed forms.
pub fn dfub_cutset(p: &PowerConfig) -> Result<RateResult> {
    let t = dfub_terms(p)?;
    Ok(RateResult::new(t.r1_closed.min(t.r2_closed).max(0.0), "closed-form")
        .with_param("R1", t.r1_closed)
        .with_param("R2", t.r2_closed)
        .with_param("s1", t.s1)
        .with_param("s2", t.s2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pc(ps: f64, pr: f64) -> PowerConfig {
        PowerConfig::new(ps, pr).unwrap()
    }

    #[test]
    fn cutset_throughput_at_unit_power() {
        let r = cutset_throughput(&pc(1.0, 5.0));
        assert!((r.param("s").unwrap() - 1.23998).abs() < 1e-4, "{:?}", r.params);
        assert!((r.value_nats - 0.52277).abs() < 1e-5, "{}", r.value_nats);
        assert!(cutset_throughput(&pc(1e-9, 1.0)).value_nats < 1e-8);
    }

    #[test]
    fn cardano_roots() {
        assert!((cardano_root(1.0) - 1.0).abs() < 1e-14);
        for pw in [0.01, 0.1, 0.7, 1.0, 3.0, 10.0, 1e3, 1e6] {
            let s = cardano_root(pw);
            assert!(s > 0.0 && s < GOLDEN);
            assert!((((pw * s + 1.0) * s - 1.0) * s - 1.0).abs() < 1e-12, "P={pw}: {s}");
        }
    }

    #[test]
    fn cutset_expected_closed_form_vs_quadrature() {
        for pw in [0.1, 1.0, 10.0, 100.0] {
            let closed = cutset_expected_rate(&pc(pw, pw)).value_nats;
            let quad = cutset_expected_quadrature(pw).unwrap();
            assert!((closed - quad).abs() < 1e-6, "P={pw}: {closed} vs {quad}");
        }
        let hi = cutset_expected_rate(&pc(1e6, 1e6)).value_nats;
        let lo = cutset_expected_rate(&pc(1e3, 1e3)).value_nats;
        assert!(hi > lo);
    }

    #[test]
    fn expected_dominates_throughput() {
        for pw in [0.05, 0.5, 1.0, 10.0, 1e3] {
            let p = pc(pw, 2.0 * pw);
            assert!(cutset_expected_rate(&p).value_nats >= cutset_throughput(&p).value_nats);
        }
    }

    #[test]
    fn rc_cap_and_argmax() {
        assert!((rc_threshold_cap(&pc(1.0, 1.0)) - 1.0).abs() < 1e-15);
        let r = rc_throughput(&pc(1.0, 1.0));
        let s = r.param("s").unwrap();
        assert!(s > 0.0 && s < 1.0);
        assert!((s - 0.8285).abs() < 1e-3 && (r.value_nats - 0.3848).abs() < 1e-3, "{s} {}", r.value_nats);
    }

    #[test]
    fn dfub_constants_match_quadrature() {
        for (ps, pr) in [(1.0, 1.0), (1.0, 10.0), (10.0, 1.0), (10.0, 10.0)] {
            let t = dfub_terms(&pc(ps, pr)).unwrap();
            assert!((t.u - 1.21188).abs() < 1e-4);
            assert!((t.r1_closed - t.r1_quadrature).abs() < 2e-3, "{t:?}");
            assert!((t.r2_closed - t.r2_quadrature).abs() < 2e-3, "{t:?}");
        }
    }

    #[test]
    fn bounds_grow_with_power() {
        let mut prev = [0.0; 4];
        for i in 0..20 {
            let p = pc(1.0, 10f64.powf(i as f64 * 0.3));
            for (j, kind) in BoundKind::ALL.iter().enumerate() {
                let v = kind.evaluate(&p).unwrap().value_nats;
                assert!(v >= prev[j] - 1e-6, "{} at step {i}", kind.tag());
                prev[j] = v;
            }
        }
    }
}
