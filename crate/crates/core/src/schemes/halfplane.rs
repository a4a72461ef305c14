//! Exact probability that two independent unit-mean exponentials `(a₁, a₂)`
//! fall inside an intersection of half-planes `u·a₁ + v·a₂ ≥ c`.
//!
//! Every successive-decoding event of the finite-layer engines is such an
//! intersection, so their success probabilities need no sampling. For fixed
//! `a₁` the admissible `a₂` form an interval whose ends are piecewise linear
//! in `a₁`; between breakpoints the integral of `e^(−a₁)(e^(−L) − e^(−U))`
//! is elementary.

/// The constraint `u·a₁ + v·a₂ ≥ c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub u: f64,
    pub v: f64,
    pub c: f64,
}

impl HalfPlane {
    pub fn new(u: f64, v: f64, c: f64) -> Self {
        Self { u, v, c }
    }

    fn holds(&self, a1: f64, a2: f64) -> bool {
        self.u * a1 + self.v * a2 >= self.c
    }
}

/// `a₂ = p + q·a₁`.
#[derive(Debug, Clone, Copy)]
struct Line {
    p: f64,
    q: f64,
}

impl Line {
    fn at(&self, x: f64) -> f64 {
        self.p + self.q * x
    }
}

/// `∫_{x0}^{x1} e^(−(p + k·x)) dx`, `x1` possibly infinite.
fn exp_segment(p: f64, k: f64, x0: f64, x1: f64) -> f64 {
    let head = (-(p + k * x0)).exp();
    if x1.is_infinite() {
        return if k > 0.0 { head / k } else { f64::INFINITY };
    }
    let w = x1 - x0;
    if (k * w).abs() < 1e-12 {
        head * w
    } else {
        head * -(-k * w).exp_m1() / k
    }
}

/// `Pr{u·a₁ + v·a₂ ≥ c for every constraint}` with `a₁, a₂ ~ Exp(1)` i.i.d.
pub fn prob_halfplanes(constraints: &[HalfPlane]) -> f64 {
    let mut x_lo = 0.0f64;
    let mut x_hi = f64::INFINITY;
    let mut lower: Vec<Line> = vec![Line { p: 0.0, q: 0.0 }];
    let mut upper: Vec<Line> = Vec::new();
    for h in constraints {
        if h.v == 0.0 {
            if h.u > 0.0 {
                x_lo = x_lo.max(h.c / h.u);
            } else if h.u < 0.0 {
                x_hi = x_hi.min(h.c / h.u);
            } else if h.c > 0.0 {
                return 0.0;
            }
        } else {
            let line = Line { p: h.c / h.v, q: -h.u / h.v };
            if h.v > 0.0 {
                lower.push(line);
            } else {
                upper.push(line);
            }
        }
    }
    if !(x_lo < x_hi) {
        return 0.0;
    }

    let mut cuts = Vec::new();
    let all: Vec<Line> = lower.iter().chain(upper.iter()).copied().collect();
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            if a.q != b.q {
                cuts.push((b.p - a.p) / (a.q - b.q));
            }
        }
    }
    cuts.retain(|&x| x.is_finite() && x > x_lo && x < x_hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.insert(0, x_lo);
    cuts.push(x_hi);

    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if !(x1 > x0) {
            continue;
        }
        let probe = if x1.is_finite() { 0.5 * (x0 + x1) } else { x0 + 1.0 };
        let lo = *lower.iter().max_by(|a, b| a.at(probe).total_cmp(&b.at(probe))).unwrap();
        let hi = upper.iter().min_by(|a, b| a.at(probe).total_cmp(&b.at(probe))).copied();
        if let Some(hi) = hi {
            if hi.at(probe) <= lo.at(probe) {
                continue;
            }
        }
        let mut part = exp_segment(lo.p, 1.0 + lo.q, x0, x1);
        if let Some(hi) = hi {
            part -= exp_segment(hi.p, 1.0 + hi.q, x0, x1);
        }
        total += part;
    }
    total.clamp(0.0, 1.0)
}

/// Monte Carlo counterpart of [`prob_halfplanes`], for tests.
#[doc(hidden)]
pub fn prob_halfplanes_sampled(constraints: &[HalfPlane], samples: &[(f64, f64)]) -> f64 {
    let hits = samples.iter().filter(|&&(a1, a2)| constraints.iter().all(|h| h.holds(a1, a2))).count();
    hits as f64 / samples.len() as f64
}
