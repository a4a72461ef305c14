//! Derivative-free maximization: coarse-scan + golden section in one
//! dimension, multi-start bounded Nelder–Mead in several.

use super::roots::Bracket;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub argmax: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Points in the coarse scan that precedes golden-section refinement.
pub const COARSE_SCAN_POINTS: usize = 512;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// `true` when `(v, x)` beats `(best_v, best_x)`: larger value, ties broken
/// towards the lexicographically smaller argument.
fn improves(v: f64, x: &[f64], best_v: f64, best_x: &[f64]) -> bool {
    if !v.is_finite() {
        return false;
    }
    if !best_v.is_finite() || v > best_v {
        return true;
    }
    v == best_v && x.partial_cmp(best_x) == Some(std::cmp::Ordering::Less)
}

/// Global-ish maximum of `f` on `b`: a uniform scan locates the best cell,
/// then golden-section search refines inside its neighbours.
pub fn maximize_scalar<F: FnMut(f64) -> f64>(f: F, b: Bracket) -> OptimResult {
    maximize_scalar_with(f, b, COARSE_SCAN_POINTS)
}

/// [`maximize_scalar`] with a caller-chosen scan size, for objectives too
/// expensive for the default.
pub fn maximize_scalar_with<F: FnMut(f64) -> f64>(mut f: F, b: Bracket, scan_points: usize) -> OptimResult {
    let n = scan_points.max(3);
    let step = b.width() / (n - 1) as f64;
    let mut best_i = 0;
    let mut best_x = b.lo;
    let mut best_v = f64::NEG_INFINITY;
    let mut evals = 0;
    for i in 0..n {
        let x = if i == n - 1 { b.hi } else { b.lo + step * i as f64 };
        let v = f(x);
        evals += 1;
        if improves(v, &[x], best_v, &[best_x]) {
            best_i = i;
            best_x = x;
            best_v = v;
        }
    }
    if !best_v.is_finite() {
        return OptimResult { argmax: vec![b.lo], value: f64::NAN, evaluations: evals, converged: false };
    }

    let mut lo = b.lo + step * best_i.saturating_sub(1) as f64;
    let mut hi = (b.lo + step * (best_i + 1) as f64).min(b.hi);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    evals += 2;
    let mut iters = 0;
    while hi - lo > b.tol && iters < 200 {
        iters += 1;
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        evals += 1;
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if improves(v, &[x], best_v, &[best_x]) {
            best_x = x;
            best_v = v;
        }
    }
    OptimResult { argmax: vec![best_x], value: best_v, evaluations: evals, converged: hi - lo <= b.tol }
}

/// Settings for [`maximize_nd_with`].
#[derive(Debug, Clone)]
pub struct NdOptions {
    /// Total starts, the caller's `x0` included.
    pub starts: usize,
    /// Evaluation budget per start.
    pub max_evals: usize,
    /// Simplex-diameter tolerance, relative to the bound widths.
    pub xtol: f64,
    /// Spread tolerance on simplex values.
    pub ftol: f64,
    /// Extra starting points tried before the low-discrepancy ones.
    pub extra_starts: Vec<Vec<f64>>,
}

impl Default for NdOptions {
    fn default() -> Self {
        Self { starts: 8, max_evals: 2000, xtol: 1e-7, ftol: 1e-12, extra_starts: Vec::new() }
    }
}

/// Maximizes `f` inside the box `bounds` from `x0` with the default options.
pub fn maximize_nd<F: FnMut(&[f64]) -> f64>(f: F, x0: &[f64], bounds: &[Bracket]) -> OptimResult {
    maximize_nd_with(f, x0, bounds, &NdOptions::default())
}

/// Multi-start bounded Nelder–Mead. Starts are `x0`, then `extra_starts`,
/// then Halton points over the box. One-dimensional calls go through
/// [`maximize_scalar`].
pub fn maximize_nd_with<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    bounds: &[Bracket],
    opts: &NdOptions,
) -> OptimResult {
    assert_eq!(x0.len(), bounds.len(), "x0 and bounds must have equal length");
    let dim = x0.len();
    let x0: Vec<f64> = x0.iter().zip(bounds).map(|(&x, b)| x.clamp(b.lo, b.hi)).collect();
    let f0 = f(&x0);

    if dim == 1 {
        let mut r = maximize_scalar(|x| f(&[x]), bounds[0]);
        r.evaluations += 1;
        if improves(f0, &x0, r.value, &r.argmax) {
            r.argmax = x0;
            r.value = f0;
        }
        return r;
    }

    let mut best = OptimResult { argmax: x0.clone(), value: f0, evaluations: 1, converged: false };
    let mut starts: Vec<Vec<f64>> = vec![x0];
    starts.extend(opts.extra_starts.iter().map(|s| clamp_into(s, bounds)));
    let mut halton_index = 1u64;
    while starts.len() < opts.starts.max(1) {
        starts.push(halton_point(halton_index, bounds));
        halton_index += 1;
    }

    for start in &starts {
        let mut local = nelder_mead(&mut f, start, bounds, opts);
        // A restart from the converged vertex guards against simplex collapse.
        if local.converged {
            let again = nelder_mead(&mut f, &local.argmax, bounds, opts);
            local.evaluations += again.evaluations;
            if again.value >= local.value {
                local.argmax = again.argmax;
                local.value = again.value;
                local.converged = again.converged;
            }
        }
        best.evaluations += local.evaluations;
        if improves(local.value, &local.argmax, best.value, &best.argmax) {
            best.argmax = local.argmax;
            best.value = local.value;
            best.converged = local.converged;
        } else if local.value == best.value {
            best.converged |= local.converged;
        }
    }
    best
}

fn clamp_into(x: &[f64], bounds: &[Bracket]) -> Vec<f64> {
    x.iter().zip(bounds).map(|(&v, b)| v.clamp(b.lo, b.hi)).collect()
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

fn halton_point(index: u64, bounds: &[Bracket]) -> Vec<f64> {
    bounds
        .iter()
        .enumerate()
        .map(|(d, b)| {
            let u = radical_inverse(index, PRIMES[d % PRIMES.len()]);
            b.lo + u * b.width()
        })
        .collect()
}

fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    start: &[f64],
    bounds: &[Bracket],
    opts: &NdOptions,
) -> OptimResult {
    let dim = start.len();
    let widths: Vec<f64> = bounds.iter().map(|b| b.width()).collect();
    let mut eval = |x: &[f64], count: &mut usize| -> f64 {
        *count += 1;
        let v = f(x);
        if v.is_finite() { v } else { f64::NEG_INFINITY }
    };
    let mut evals = 0;

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for d in 0..dim {
        let mut v = start.to_vec();
        let step = 0.1 * widths[d];
        v[d] = if v[d] + step <= bounds[d].hi { v[d] + step } else { v[d] - step };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evals)).collect();

    let mut converged = false;
    while evals < opts.max_evals {
        // Descending order by value; ties keep the lexicographically smaller vertex first.
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&i, &j| {
            values[j]
                .partial_cmp(&values[i])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| simplex[i].partial_cmp(&simplex[j]).unwrap_or(std::cmp::Ordering::Equal))
        });
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[0] - values[dim];
        let diameter = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).zip(&widths).map(|((a, b), w)| (a - b).abs() / w))
            .fold(0.0, f64::max);
        if (spread.is_finite() && spread <= opts.ftol && diameter <= opts.xtol.sqrt()) || diameter <= opts.xtol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; dim];
        for v in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / dim as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            let raw: Vec<f64> = centroid.iter().zip(&simplex[dim]).map(|(c, w)| c + t * (c - w)).collect();
            clamp_into(&raw, bounds)
        };

        let xr = along(1.0);
        let fr = eval(&xr, &mut evals);
        if fr > values[0] {
            let xe = along(2.0);
            let fe = eval(&xe, &mut evals);
            if fe > fr {
                simplex[dim] = xe;
                values[dim] = fe;
            } else {
                simplex[dim] = xr;
                values[dim] = fr;
            }
        } else if fr > values[dim - 1] {
            simplex[dim] = xr;
            values[dim] = fr;
        } else {
            let (xc, fc) = if fr > values[dim] {
                let xc = along(0.5);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(-0.5);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc > values[dim].max(fr) {
                simplex[dim] = xc;
                values[dim] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=dim {
                    let shrunk: Vec<f64> = simplex[i].iter().zip(&best).map(|(x, b)| b + 0.5 * (x - b)).collect();
                    values[i] = eval(&shrunk, &mut evals);
                    simplex[i] = shrunk;
                }
            }
        }
    }

    let mut bi = 0;
    for i in 1..=dim {
        if improves(values[i], &simplex[i], values[bi], &simplex[bi]) {
            bi = i;
        }
    }
    OptimResult { argmax: simplex[bi].clone(), value: values[bi], evaluations: evals, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn br(lo: f64, hi: f64) -> Bracket {
        Bracket::new(lo, hi, 1e-10).unwrap()
    }

    #[test]
    fn scalar_quadratic() {
        let r = maximize_scalar(|x| -(x - 2.0) * (x - 2.0), br(0.0, 5.0));
        assert!((r.argmax[0] - 2.0).abs() < 1e-8);
        assert!(r.value.abs() < 1e-15);
        assert!(r.converged);
    }

    #[test]
    fn scalar_cutset_objective() {
        // Dense 10⁶-point grid oracle: argmax 1.23998, the root of s·ln(1+s) = 1.
        let r = maximize_scalar(|s| (-s).exp() * (1.0 + s) * (1.0 + s).ln(), br(0.0, 5.0));
        assert!((r.argmax[0] - 1.239_98).abs() < 1e-4, "{:?}", r);
    }

    #[test]
    fn scalar_boundary_max() {
        let r = maximize_scalar(|x| x * x * x, br(0.0, 1.0));
        assert_eq!(r.argmax[0], 1.0);
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn scalar_ties_prefer_smallest() {
        let r = maximize_scalar(|_| 1.0, br(0.0, 1.0));
        assert_eq!(r.argmax[0], 0.0);
    }

    #[test]
    fn nd_separable_quadratic() {
        let b = [br(-5.0, 5.0), br(-5.0, 5.0)];
        let r = maximize_nd(|x| -(x[0] - 1.0).powi(2) - (x[1] + 2.0).powi(2), &[0.0, 0.0], &b);
        assert!((r.argmax[0] - 1.0).abs() < 1e-4 && (r.argmax[1] + 2.0).abs() < 1e-4, "{:?}", r);
    }

    #[test]
    fn nd_rosenbrock() {
        let b = [br(-2.0, 2.0), br(-2.0, 2.0)];
        let r = maximize_nd(|x| -((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)), &[0.0, 0.0], &b);
        assert!(r.value > -1e-4, "{:?}", r);
    }

    #[test]
    fn nd_one_dimensional_matches_scalar() {
        let f = |s: f64| (-s).exp() * (1.0 + s) * (1.0 + s).ln();
        let a = maximize_scalar(f, br(0.0, 5.0));
        let b = maximize_nd(|x| f(x[0]), &[0.5], &[br(0.0, 5.0)]);
        assert_eq!(a.argmax, b.argmax);
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn nd_never_worse_than_start() {
        let b = [br(0.0, 1.0), br(0.0, 1.0), br(0.0, 1.0)];
        let f = |x: &[f64]| (x[0] * 40.0).sin() * (x[1] * 31.0).cos() + x[2];
        let x0 = [0.3, 0.2, 0.9];
        let r = maximize_nd(f, &x0, &b);
        assert!(r.value >= f(&x0));
    }
}
