//! Tabulated gain distributions.
//!
//! A table stores `F`, `f = F′` and `f′` on a log-spaced grid. The CDF is made
//! monotone by isotonic projection, then a monotone piecewise-cubic (PCHIP)
//! interpolant through every [`KNOT_STRIDE`]-th grid value is differentiated
//! to give `f`. Because each grid cell lies inside one cubic piece, cubic
//! Hermite interpolation of the stored `(F, f)` pairs reproduces that
//! interpolant exactly, so evaluation off-grid needs nothing but the table.

use crate::channel::{fold_chunks, FadingSample, PowerConfig, SeedSpec};
use crate::error::{domain, Error, Result};
use crate::numerics::{find_root, integrate, logspace, Bracket};

use super::{af_threshold, gain_af1, gain_af2, gain_daf};

/// Grid size of every table.
pub const GRID_POINTS: usize = 2048;
/// Smallest grid abscissa.
pub const GRID_LO: f64 = 1e-4;
/// Grid cells per interpolation knot for Monte Carlo tables; quadrature
/// tables are smooth already and interpolate every grid point.
pub const KNOT_STRIDE: usize = 16;
/// Minimum Monte Carlo budget.
pub const MIN_MC_SAMPLES: usize = 100_000;
/// Minimum number of retained samples for conditional tables.
const MIN_ACCEPTED: usize = 10_000;
/// Upper-tail mass beyond the last grid point.
const TAIL_MASS: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableSource {
    Quadrature,
    MonteCarlo,
}

impl TableSource {
    pub fn tag(self) -> &'static str {
        match self {
            TableSource::Quadrature => "quadrature",
            TableSource::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainDistribution {
    pub grid: Vec<f64>,
    pub cdf: Vec<f64>,
    pub pdf: Vec<f64>,
    pub pdf_slope: Vec<f64>,
    pub source: TableSource,
}

impl GainDistribution {
    /// Builds a table from raw (possibly noisy) CDF values on `grid`.
    pub fn from_cdf_values(grid: Vec<f64>, raw_cdf: &[f64], source: TableSource) -> Result<Self> {
        validate_grid(&grid)?;
        if raw_cdf.len() != grid.len() {
            return Err(domain("GainDistribution", "grid and cdf lengths differ"));
        }
        let mut iso: Vec<f64> = raw_cdf.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        isotonic_projection(&mut iso);

        let m = grid.len();
        let stride = match source {
            TableSource::MonteCarlo => KNOT_STRIDE,
            TableSource::Quadrature => 1,
        };
        let mut knots: Vec<usize> = (0..m).step_by(stride).collect();
        if *knots.last().unwrap() != m - 1 {
            knots.push(m - 1);
        }
        let kx: Vec<f64> = knots.iter().map(|&i| grid[i]).collect();
        let ky: Vec<f64> = knots.iter().map(|&i| iso[i]).collect();
        let kd = pchip_slopes(&kx, &ky);

        let mut cdf = vec![0.0; m];
        let mut pdf = vec![0.0; m];
        let mut piece = 0;
        for (i, &s) in grid.iter().enumerate() {
            while piece + 2 < kx.len() && s > kx[piece + 1] {
                piece += 1;
            }
            let (v, d) = hermite(kx[piece], kx[piece + 1], ky[piece], ky[piece + 1], kd[piece], kd[piece + 1], s);
            cdf[i] = v.clamp(0.0, 1.0);
            pdf[i] = d.max(0.0);
        }
        Ok(Self::from_exact(grid, cdf, pdf, source))
    }

    /// Wraps known `F` and `f` values; only `f′` is derived.
    pub fn from_exact(grid: Vec<f64>, cdf: Vec<f64>, pdf: Vec<f64>, source: TableSource) -> Self {
        let pdf_slope = central_differences(&grid, &pdf);
        Self { grid, cdf, pdf, pdf_slope, source }
    }

    pub fn lo(&self) -> f64 {
        self.grid[0]
    }

    pub fn hi(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// `(F(s), f(s))`. Below the grid `F` is a linear ramp from the origin;
    /// above it the table's last value is held and `f = 0`.
    pub fn eval(&self, s: f64) -> (f64, f64) {
        let g = &self.grid;
        if s < g[0] {
            let slope = self.cdf[0] / g[0];
            return ((slope * s.max(0.0)).min(self.cdf[0]), slope);
        }
        if s >= self.hi() {
            return (*self.cdf.last().unwrap(), 0.0);
        }
        let j = g.partition_point(|&x| x <= s).min(g.len() - 1);
        let i = j - 1;
        let (v, d) = hermite(g[i], g[j], self.cdf[i], self.cdf[j], self.pdf[i], self.pdf[j], s);
        (v.clamp(0.0, 1.0), d.max(0.0))
    }

    pub fn cdf_at(&self, s: f64) -> f64 {
        self.eval(s).0
    }

    pub fn survival_at(&self, s: f64) -> f64 {
        1.0 - self.eval(s).0
    }

    pub fn pdf_at(&self, s: f64) -> f64 {
        self.eval(s).1
    }

    /// Pointwise mixture `Σ wᵢ Fᵢ` re-smoothed on `grid`.
    pub fn mixture(parts: &[(f64, &GainDistribution)], grid: Vec<f64>, source: TableSource) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if !(total > 0.0) {
            return Err(domain("GainDistribution::mixture", "weights must sum to a positive value"));
        }
        let raw: Vec<f64> =
            grid.iter().map(|&s| parts.iter().map(|(w, d)| w * d.cdf_at(s)).sum::<f64>() / total).collect();
        Self::from_cdf_values(grid, &raw, source)
    }

    /// `∫ f` over the grid by the trapezoid rule.
    pub fn pdf_mass(&self) -> f64 {
        self.grid.windows(2).zip(self.pdf.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 * KNOT_STRIDE {
        return Err(domain("GainDistribution", format!("grid of {} points is too short", grid.len())));
    }
    if !(grid[0] > 0.0) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("GainDistribution", "grid must be positive and strictly ascending"));
    }
    Ok(())
}

/// Cubic Hermite value and derivative on `[x0, x1]`.
#[inline]
fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let v = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = (6.0 * t2 - 6.0 * t) / h;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = (-6.0 * t2 + 6.0 * t) / h;
    let dh11 = 3.0 * t2 - 2.0 * t;
    (v, dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1)
}

/// Fritsch–Butland slopes with shape-preserving one-sided end conditions.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let del: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = del[0];
        d[1] = del[0];
        return d;
    }
    for k in 1..n - 1 {
        if del[k - 1] * del[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
        }
    }
    let end = |h0: f64, h1: f64, m0: f64, m1: f64| {
        let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
        if d.signum() != m0.signum() || m0 == 0.0 {
            0.0
        } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
            3.0 * m0
        } else {
            d
        }
    };
    d[0] = end(h[0], h[1], del[0], del[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    d
}

fn central_differences(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (y[b] - y[a]) / (x[b] - x[a])
        })
        .collect()
}

/// Least-squares projection onto nondecreasing sequences (pool adjacent
/// violators), in place.
pub fn isotonic_projection(v: &mut [f64]) {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(v.len());
    for &x in v.iter() {
        let mut cur = (x, 1usize);
        while let Some(&(m, w)) = blocks.last() {
            if m <= cur.0 {
                break;
            }
            blocks.pop();
            let tw = w + cur.1;
            cur = ((m * w as f64 + cur.0 * cur.1 as f64) / tw as f64, tw);
        }
        blocks.push(cur);
    }
    let mut i = 0;
    for (m, w) in blocks {
        for slot in &mut v[i..i + w] {
            *slot = m;
        }
        i += w;
    }
}

/// Table from Monte Carlo draws of `gain`; `None` drops a realization, which
/// yields the distribution conditional on the retained event.
pub fn tabulate_monte_carlo<G>(gain: G, n: usize, seed: SeedSpec) -> Result<GainDistribution>
where
    G: Fn(&FadingSample) -> Option<f64> + Sync,
{
    if n < MIN_MC_SAMPLES {
        return Err(Error::InsufficientSamples { got: n, needed: MIN_MC_SAMPLES });
    }
    let parts = fold_chunks(seed, n, |stream, len| {
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            let x = stream.next_sample();
            if let Some(v) = gain(&x) {
                out.push(v);
            }
        }
        out
    });
    let mut values = parts.concat();
    ecdf_table(&mut values)
}

/// Empirical-CDF table of `values` (reordered in place).
pub(crate) fn ecdf_table(values: &mut [f64]) -> Result<GainDistribution> {
    let n = values.len();
    if n < MIN_ACCEPTED {
        return Err(Error::InsufficientSamples { got: n, needed: MIN_ACCEPTED });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(domain("tabulate", "gain evaluated to a non-finite value"));
    }
    let k = ((1.0 - TAIL_MASS) * n as f64).ceil() as usize - 1;
    let (_, q, _) = values.select_nth_unstable_by(k.min(n - 1), |a, b| a.total_cmp(b));
    let hi = q.max(GRID_LO * 2.0);
    let grid = logspace(GRID_LO, hi, GRID_POINTS);
    let raw = ecdf_on_grid(values, &grid);
    GainDistribution::from_cdf_values(grid, &raw, TableSource::MonteCarlo)
}

/// `#{v ≤ gⱼ}/n` on a log-spaced grid by direct binning.
pub(crate) fn ecdf_on_grid(values: &[f64], grid: &[f64]) -> Vec<f64> {
    let m = grid.len();
    let (l0, l1) = (grid[0].ln(), grid[m - 1].ln());
    let step = (l1 - l0) / (m - 1) as f64;
    let mut counts = vec![0u64; m];
    for &v in values {
        if v > grid[m - 1] {
            continue;
        }
        let j = if v <= grid[0] { 0 } else { (((v.ln() - l0) / step).ceil() as usize).min(m - 1) };
        // Guard the rounding of ln at cell edges.
        let j = if j > 0 && v <= grid[j - 1] { j - 1 } else if v > grid[j] { j + 1 } else { j };
        counts[j.min(m - 1)] += 1;
    }
    let n = values.len() as f64;
    let mut acc = 0u64;
    counts
        .iter()
        .map(|&c| {
            acc += c;
            acc as f64 / n
        })
        .collect()
}

/// Table from a survival function known by quadrature. The grid ends where
/// the survival drops to the tail mass.
pub fn tabulate_quadrature<S: Fn(f64) -> f64>(survival: S) -> Result<GainDistribution> {
    let mut hi = 1.0;
    while survival(hi) > TAIL_MASS {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(domain("tabulate_quadrature", "survival does not reach the tail mass"));
        }
    }
    let lo = (hi * 0.5).max(GRID_LO * 2.0);
    let hi = if survival(lo) > TAIL_MASS {
        find_root(|s| survival(s) - TAIL_MASS, Bracket::new(lo, hi, 1e-10)?)?
    } else {
        lo
    };
    let grid = logspace(GRID_LO, hi, GRID_POINTS);
    let raw: Vec<f64> = grid.iter().map(|&s| 1.0 - survival(s)).collect();
    GainDistribution::from_cdf_values(grid, &raw, TableSource::Quadrature)
}

/// Gains with a known tabulation recipe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainKind {
    /// `a_1` alone.
    A1,
    /// `a_1 + a_2`.
    SumA,
    /// `max(a_r1, a_r2)`.
    MaxAr,
    /// Single-relay AF on link 1; `gated` conditions on the relay being ON.
    Af1 { gated: bool },
    /// Two-relay AF; `gated` conditions on both relays being ON.
    Af2 { gated: bool },
    /// Hybrid gain with relay 1 decoded, relay 2 amplifying.
    Daf,
}

impl GainKind {
    pub fn tag(self) -> &'static str {
        match self {
            GainKind::A1 => "a1",
            GainKind::SumA => "sum-a",
            GainKind::MaxAr => "max-ar",
            GainKind::Af1 { gated: false } => "af1",
            GainKind::Af1 { gated: true } => "af1-on",
            GainKind::Af2 { gated: false } => "af2",
            GainKind::Af2 { gated: true } => "af2-on",
            GainKind::Daf => "daf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    MonteCarlo,
    Quadrature,
}

/// Tabulates `kind` at `p`. Quadrature is available for every kind except the
/// two-relay gains.
pub fn tabulate_distribution(
    kind: GainKind,
    p: &PowerConfig,
    method: Method,
    n: usize,
    seed: SeedSpec,
) -> Result<GainDistribution> {
    let p = *p;
    let ath = af_threshold(&p);
    match method {
        Method::MonteCarlo => tabulate_monte_carlo(
            move |x: &FadingSample| match kind {
                GainKind::A1 => Some(x.a1),
                GainKind::SumA => Some(x.a1 + x.a2),
                GainKind::MaxAr => Some(x.ar1.max(x.ar2)),
                GainKind::Af1 { gated } => (!gated || x.ar1 >= ath).then(|| gain_af1(x.ar1, x.a1, &p)),
                GainKind::Af2 { gated } => (!gated || (x.ar1 >= ath && x.ar2 >= ath)).then(|| gain_af2(x, &p)),
                GainKind::Daf => Some(gain_daf(x, &p)),
            },
            n,
            seed,
        ),
        Method::Quadrature => match kind {
            GainKind::A1 => tabulate_quadrature(|s| (-s).exp()),
            GainKind::SumA => tabulate_quadrature(|s| (1.0 + s) * (-s).exp()),
            GainKind::MaxAr => tabulate_quadrature(|s| (-s).exp() * (2.0 - (-s).exp())),
            GainKind::Af1 { gated } => tabulate_quadrature(|s| af1_survival(s, &p, if gated { ath } else { 0.0 })),
            GainKind::Af2 { .. } | GainKind::Daf => {
                Err(domain("tabulate_distribution", format!("no quadrature recipe for {}", kind.tag())))
            }
        },
    }
}

/// `Pr{a_AF,1 ≥ s | a_r ≥ gate}`. The inner integral over the forward gain
/// is closed form: for `a_r > s`, `a_AF,1 ≥ s ⇔ a ≥ s(1 + a_r P_s)/(P_r(a_r − s))`.
pub fn af1_survival(s: f64, p: &PowerConfig, gate: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    let lo = s.max(gate);
    let inner = |ar: f64| {
        if ar <= s {
            return 0.0;
        }
        (-ar - s * (1.0 + ar * p.ps) / (p.pr * (ar - s))).exp()
    };
    let upper = lo + 60.0;
    let q = integrate(inner, lo, upper, 1e-13).unwrap_or(f64::NAN);
    (q * gate.exp()).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotonic_projection_pools() {
        let mut v = vec![0.1, 0.3, 0.2, 0.2, 0.5, 0.4];
        isotonic_projection(&mut v);
        for w in v.windows(2) {
            assert!(w[0] <= w[1]);
        }
        assert!((v[1] - 0.7 / 3.0).abs() < 1e-15);
        assert!((v[4] - 0.45).abs() < 1e-15);
        let total: f64 = v.iter().sum();
        assert!((total - 1.7).abs() < 1e-14);
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let f = |x: f64| 0.3 * x * x * x - x * x + 2.0 * x - 1.0;
        let df = |x: f64| 0.9 * x * x - 2.0 * x + 2.0;
        let (v, d) = hermite(0.5, 2.0, f(0.5), f(2.0), df(0.5), df(2.0), 1.3);
        assert!((v - f(1.3)).abs() < 1e-13);
        assert!((d - df(1.3)).abs() < 1e-13);
    }

    #[test]
    fn exponential_by_quadrature() {
        let t = tabulate_quadrature(|s| (-s).exp()).unwrap();
        for &s in &[0.01, 0.3, 1.0, 2.5, 6.0] {
            assert!((t.cdf_at(s) - (1.0 - (-s).exp())).abs() < 1e-6);
            assert!((t.pdf_at(s) - (-s).exp()).abs() < 1e-3);
        }
        assert!((t.pdf_mass() - (t.cdf.last().unwrap() - t.cdf[0])).abs() < 1e-3);
    }

    #[test]
    fn grid_evaluation_matches_table() {
        let t = tabulate_quadrature(|s| (1.0 + s) * (-s).exp()).unwrap();
        for i in (0..t.grid.len()).step_by(97) {
            let (v, d) = t.eval(t.grid[i]);
            assert!((v - t.cdf[i]).abs() < 1e-12);
            assert!((d - t.pdf[i]).abs() < 1e-9 * (1.0 + t.pdf[i]));
        }
    }

    #[test]
    fn ecdf_binning_matches_counting() {
        let values: Vec<f64> = (1..=5000).map(|i| (i as f64 * 0.618).fract() * 3.0).collect();
        let grid = logspace(1e-3, 3.0, 300);
        let got = ecdf_on_grid(&values, &grid);
        for (j, &g) in grid.iter().enumerate() {
            let exact = values.iter().filter(|&&v| v <= g).count() as f64 / values.len() as f64;
            assert!((got[j] - exact).abs() < 1e-12, "j = {j}");
        }
    }

    #[test]
    fn af1_survival_limits() {
        let p = PowerConfig::new(1.0, 1.0).unwrap();
        assert_eq!(af1_survival(0.0, &p, 0.0), 1.0);
        let a = af1_survival(0.2, &p, 0.0);
        let b = af1_survival(0.4, &p, 0.0);
        assert!(a > b && b > 0.0);
        // Conditioning on the gate can only raise the survival.
        assert!(af1_survival(0.2, &p, 1.0 / 3.0) > a);
    }
}
