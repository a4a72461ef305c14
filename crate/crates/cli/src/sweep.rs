//! Parameter sweeps over `(P_s, P_r)` grids in dB.

use rayon::prelude::*;

use diamondbc::channel::PowerConfig;
use diamondbc::schemes::McSettings;

use crate::eval::{evaluate, BoundTag, EvalOptions, Item, Layers, Metric, SchemeTag};
use crate::output::CsvRow;
use crate::{usage, UsageError};

/// `start:stop:step` (both ends inclusive, steps counted from `start`) or a
/// single value.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, UsageError> {
    let num = |s: &str| -> Result<f64, UsageError> {
        let v: f64 = s.trim().parse().map_err(|_| usage(format!("invalid number '{s}' in grid '{text}'")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(usage(format!("non-finite value in grid '{text}'")))
        }
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [one] => Ok(vec![num(one)?]),
        [a, b, c] => {
            let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
            if !(step > 0.0) {
                return Err(usage(format!("grid '{text}': step must be > 0")));
            }
            if stop < start {
                return Err(usage(format!("grid '{text}': stop must be ≥ start")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > 100_000 {
                return Err(usage(format!("grid '{text}' has too many points")));
            }
            // Rounded to 1e-9 so that 0.1-type steps print cleanly.
            Ok((0..count).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect())
        }
        _ => Err(usage(format!("grid '{text}' must be a value or start:stop:step"))),
    }
}

/// Comma-separated tags; the empty string is the empty list.
pub fn parse_list<T: std::str::FromStr<Err = UsageError> + Ord>(text: &str) -> Result<Vec<T>, UsageError> {
    let mut out: Vec<T> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse).collect::<Result<_, _>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub ps_db: Vec<f64>,
    pub pr_db: Vec<f64>,
    pub schemes: Vec<SchemeTag>,
    pub bounds: Vec<BoundTag>,
    pub metric: Metric,
    pub layers: Option<Layers>,
    pub options: EvalOptions,
}

impl SweepSpec {
    /// Items with the layer count each runs at; rejects invalid combinations.
    pub fn items(&self) -> Result<Vec<(Item, Layers)>, UsageError> {
        let mut out = Vec::new();
        for &s in &self.schemes {
            out.push((Item::Scheme(s), s.layers(self.metric, self.layers)?));
        }
        for &b in &self.bounds {
            b.kind(self.metric)?;
            let l = match self.metric {
                Metric::Throughput => Layers::Finite(1),
                Metric::Expected => Layers::Inf,
            };
            out.push((Item::Bound(b), l));
        }
        if out.is_empty() {
            return Err(usage("nothing to evaluate: give at least one scheme or bound"));
        }
        Ok(out)
    }
}

/// Result of a sweep: rows sorted by `(pr_db, item, ps_db)` and the failure
/// messages of rows whose value is NaN.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<CsvRow>,
    pub failures: Vec<String>,
}

pub fn run_sweep(spec: &SweepSpec, mc: &McSettings) -> Result<SweepOutcome, UsageError> {
    let items = spec.items()?;
    let mut jobs = Vec::new();
    for &ps in &spec.ps_db {
        for &pr in &spec.pr_db {
            for &(item, layers) in &items {
                jobs.push((ps, pr, item, layers));
            }
        }
    }
    let results: Vec<(usize, CsvRow, Option<String>)> = jobs
        .par_iter()
        .map(|&(ps_db, pr_db, item, layers)| {
            let uses_mc = matches!(item, Item::Scheme(s) if s.uses_mc(spec.metric));
            let res = PowerConfig::from_db(ps_db, pr_db)
                .and_then(|p| evaluate(item, spec.metric, layers, &p, mc, &spec.options));
            let (value, params, err) = match res {
                Ok(r) => (r.value_nats, r.params_string(), None),
                Err(e) => {
                    let msg = format!("{} at ps_db={ps_db}, pr_db={pr_db}: {e}", item.tag());
                    (f64::NAN, format!("error={e}"), Some(msg))
                }
            };
            let row = CsvRow {
                ps_db,
                pr_db,
                scheme: item.tag(),
                metric: spec.metric.to_string(),
                layers: layers.to_string(),
                value_nats: value,
                params,
                n_mc: if uses_mc { mc.n } else { 0 },
                seed: mc.master_seed,
            };
            (item_rank(item), row, err)
        })
        .collect();
    let mut keyed = results;
    keyed.sort_by(|a, b| {
        a.1.pr_db.total_cmp(&b.1.pr_db).then(a.0.cmp(&b.0)).then(a.1.ps_db.total_cmp(&b.1.ps_db))
    });
    let failures = keyed.iter().filter_map(|k| k.2.clone()).collect();
    Ok(SweepOutcome { rows: keyed.into_iter().map(|k| k.1).collect(), failures })
}

fn item_rank(item: Item) -> usize {
    match item {
        Item::Scheme(s) => SchemeTag::ALL.iter().position(|&t| t == s).unwrap_or(0),
        Item::Bound(b) => SchemeTag::ALL.len() + BoundTag::ALL.iter().position(|&t| t == b).unwrap_or(0),
    }
}

/// Series for the chart: one per item (and per `P_s` when several).
pub fn chart_series(rows: &[CsvRow]) -> Vec<(String, Vec<(f64, f64)>)> {
    let many_ps = rows.iter().any(|r| r.ps_db != rows[0].ps_db);
    let mut keys: Vec<(usize, u64, String)> = Vec::new();
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for r in rows {
        let name = if many_ps { format!("{} (P_s={} dB)", r.scheme, r.ps_db) } else { r.scheme.to_string() };
        let rank = SchemeTag::ALL
            .iter()
            .map(|s| s.tag())
            .chain(BoundTag::ALL.iter().map(|b| b.tag()))
            .position(|t| t == r.scheme)
            .unwrap_or(usize::MAX);
        let key = (rank, r.ps_db.to_bits(), name.clone());
        match keys.iter().position(|k| *k == key) {
            Some(i) => series[i].1.push((r.pr_db, r.value_nats)),
            None => {
                keys.push(key);
                series.push((name, vec![(r.pr_db, r.value_nats)]));
            }
        }
    }
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].0.cmp(&keys[b].0).then(f64::from_bits(keys[a].1).total_cmp(&f64::from_bits(keys[b].1))));
    order.into_iter().map(|i| series[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_are_inclusive() {
        assert_eq!(parse_grid("0:60:2").unwrap().len(), 31);
        assert_eq!(parse_grid("0:60:6").unwrap().last(), Some(&60.0));
        assert_eq!(parse_grid("0:1:0.1").unwrap()[3], 0.3);
        assert_eq!(parse_grid("5").unwrap(), vec![5.0]);
        assert_eq!(parse_grid("0:5:2").unwrap(), vec![0.0, 2.0, 4.0]);
        assert!(parse_grid("0:5:0").is_err());
        assert!(parse_grid("5:0:1").is_err());
        assert!(parse_grid("a").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn lists() {
        let s: Vec<SchemeTag> = parse_list("cf,df, af").unwrap();
        assert_eq!(s, vec![SchemeTag::Df, SchemeTag::Af, SchemeTag::Cf]);
        assert!(parse_list::<SchemeTag>("").unwrap().is_empty());
        assert!(parse_list::<BoundTag>("cutset,foo").is_err());
    }

    #[test]
    fn bounds_only_sweep_is_sorted() {
        let spec = SweepSpec {
            ps_db: vec![0.0],
            pr_db: parse_grid("0:20:10").unwrap(),
            schemes: vec![],
            bounds: vec![BoundTag::Cutset, BoundTag::Rc],
            metric: Metric::Throughput,
            layers: None,
            options: EvalOptions::default(),
        };
        let out = run_sweep(&spec, &McSettings::new(0, 1)).unwrap();
        assert!(out.failures.is_empty());
        let tags: Vec<(f64, &str)> = out.rows.iter().map(|r| (r.pr_db, r.scheme)).collect();
        assert_eq!(tags[..4], [(0.0, "cutset"), (0.0, "rc"), (10.0, "cutset"), (10.0, "rc")]);
        assert_eq!(chart_series(&out.rows).len(), 2);
    }
}
