//! Scheme and bound tags, and dispatch to the engines.

use std::fmt;
use std::str::FromStr;

use diamondbc::bounds::BoundKind;
use diamondbc::channel::PowerConfig;
use diamondbc::schemes::{
    af_expected_rate_with, af_throughput_with, cf_expected_rate_with, cf_throughput_with, daf_finite_expected_rate,
    daf_throughput, daf_throughput_closed_form_with, df_finite_expected_rate, df_throughput, McSettings, RateResult,
    MAX_LAYERS,
};

use crate::{usage, UsageError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeTag {
    Df,
    Af,
    Daf,
    /// The three-branch DAF closed form over tabulated gains, kept for
    /// comparison with the exact protocol.
    DafClosed,
    Cf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundTag {
    Cutset,
    Rc,
    Dfub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Throughput,
    Expected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layers {
    Finite(usize),
    Inf,
}

/// Anything that produces one CSV row per point. The derived order is the
/// row and color order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Item {
    Scheme(SchemeTag),
    Bound(BoundTag),
}

impl SchemeTag {
    pub const ALL: [SchemeTag; 5] = [SchemeTag::Df, SchemeTag::Af, SchemeTag::Daf, SchemeTag::DafClosed, SchemeTag::Cf];

    pub fn tag(self) -> &'static str {
        match self {
            SchemeTag::Df => "df",
            SchemeTag::Af => "af",
            SchemeTag::Daf => "daf",
            SchemeTag::DafClosed => "daf-closed",
            SchemeTag::Cf => "cf",
        }
    }

    /// Whether the value comes from Monte Carlo tables.
    pub fn uses_mc(self, metric: Metric) -> bool {
        match self {
            SchemeTag::Df | SchemeTag::Daf => false,
            SchemeTag::DafClosed => metric == Metric::Throughput,
            SchemeTag::Af | SchemeTag::Cf => true,
        }
    }

    /// Layer count the scheme runs with, given the `--layers` flag.
    pub fn layers(self, metric: Metric, flag: Option<Layers>) -> Result<Layers, UsageError> {
        match (self, metric, flag) {
            (_, Metric::Throughput, None | Some(Layers::Finite(1))) => Ok(Layers::Finite(1)),
            (_, Metric::Throughput, Some(l)) => Err(usage(format!("throughput is single-layer; got --layers {l}"))),
            (SchemeTag::DafClosed, Metric::Expected, _) => {
                Err(usage("daf-closed has no expected-rate form; use daf with --layers 1..3"))
            }
            (SchemeTag::Df | SchemeTag::Daf, Metric::Expected, None) => Ok(Layers::Finite(MAX_LAYERS)),
            (SchemeTag::Df | SchemeTag::Daf, Metric::Expected, Some(Layers::Inf)) => {
                Err(usage(format!("{} supports finite layers only (1..{MAX_LAYERS})", self.tag())))
            }
            (SchemeTag::Df | SchemeTag::Daf, Metric::Expected, Some(l)) => Ok(l),
            (SchemeTag::Af | SchemeTag::Cf, Metric::Expected, None | Some(Layers::Inf)) => Ok(Layers::Inf),
            (SchemeTag::Af | SchemeTag::Cf, Metric::Expected, Some(l)) => {
                Err(usage(format!("{} expected rate uses continuous layering; got --layers {l}", self.tag())))
            }
        }
    }
}

impl BoundTag {
    pub const ALL: [BoundTag; 3] = [BoundTag::Cutset, BoundTag::Rc, BoundTag::Dfub];

    pub fn tag(self) -> &'static str {
        match self {
            BoundTag::Cutset => "cutset",
            BoundTag::Rc => "rc",
            BoundTag::Dfub => "dfub",
        }
    }

    pub fn kind(self, metric: Metric) -> Result<BoundKind, UsageError> {
        match (self, metric) {
            (BoundTag::Cutset, Metric::Throughput) => Ok(BoundKind::CutsetThroughput),
            (BoundTag::Cutset, Metric::Expected) => Ok(BoundKind::CutsetExpected),
            (BoundTag::Rc, Metric::Throughput) => Ok(BoundKind::RcThroughput),
            (BoundTag::Dfub, Metric::Expected) => Ok(BoundKind::DfubCutset),
            (b, m) => Err(usage(format!("bound {} has no {} form", b.tag(), m))),
        }
    }

    /// Whether the bound holds for `scheme` (the rc and dfub bounds assume
    /// relays that decode).
    pub fn applies_to(self, scheme: SchemeTag) -> bool {
        match self {
            BoundTag::Cutset => true,
            BoundTag::Rc => matches!(scheme, SchemeTag::Df | SchemeTag::Daf),
            BoundTag::Dfub => scheme == SchemeTag::Df,
        }
    }
}

impl Item {
    pub fn tag(self) -> &'static str {
        match self {
            Item::Scheme(s) => s.tag(),
            Item::Bound(b) => b.tag(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Throughput => "throughput",
            Metric::Expected => "expected",
        })
    }
}

impl fmt::Display for Layers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Layers::Finite(k) => write!(f, "{k}"),
            Layers::Inf => f.write_str("inf"),
        }
    }
}

impl FromStr for SchemeTag {
    type Err = UsageError;
    fn from_str(s: &str) -> Result<Self, UsageError> {
        SchemeTag::ALL
            .into_iter()
            .find(|t| t.tag() == s)
            .ok_or_else(|| usage(format!("unknown scheme '{s}' (expected one of df, af, daf, daf-closed, cf)")))
    }
}

impl FromStr for BoundTag {
    type Err = UsageError;
    fn from_str(s: &str) -> Result<Self, UsageError> {
        BoundTag::ALL
            .into_iter()
            .find(|t| t.tag() == s)
            .ok_or_else(|| usage(format!("unknown bound '{s}' (expected one of cutset, rc, dfub)")))
    }
}

impl FromStr for Metric {
    type Err = UsageError;
    fn from_str(s: &str) -> Result<Self, UsageError> {
        match s {
            "throughput" => Ok(Metric::Throughput),
            "expected" => Ok(Metric::Expected),
            _ => Err(usage(format!("unknown metric '{s}' (expected throughput or expected)"))),
        }
    }
}

impl FromStr for Layers {
    type Err = UsageError;
    fn from_str(s: &str) -> Result<Self, UsageError> {
        if s == "inf" {
            return Ok(Layers::Inf);
        }
        match s.parse::<usize>() {
            Ok(k) if (1..=MAX_LAYERS).contains(&k) => Ok(Layers::Finite(k)),
            _ => Err(usage(format!("invalid --layers '{s}' (expected 1, 2, 3 or inf)"))),
        }
    }
}

/// Options that change what an item computes.
#[derive(Debug, Clone, Default)]
pub struct EvalOptions {
    /// AF expected rate with the power-saving lower boundary.
    pub power_saving: bool,
}

/// Evaluates one item at one power pair. `layers` must come from
/// [`SchemeTag::layers`].
pub fn evaluate(
    item: Item,
    metric: Metric,
    layers: Layers,
    p: &PowerConfig,
    mc: &McSettings,
    opts: &EvalOptions,
) -> diamondbc::error::Result<RateResult> {
    use Metric::*;
    match item {
        Item::Bound(b) => b.kind(metric).map_err(|e| domain_error(e.0))?.evaluate(p),
        Item::Scheme(s) => match (s, metric, layers) {
            (SchemeTag::Df, Throughput, _) => Ok(df_throughput(p)),
            (SchemeTag::Df, Expected, Layers::Finite(k)) => df_finite_expected_rate(k, p),
            (SchemeTag::Daf, Throughput, _) => Ok(daf_throughput(p)),
            (SchemeTag::Daf, Expected, Layers::Finite(k)) => daf_finite_expected_rate(k, p),
            (SchemeTag::DafClosed, Throughput, _) => daf_throughput_closed_form_with(p, mc),
            (SchemeTag::Af, Throughput, _) => af_throughput_with(p, mc),
            (SchemeTag::Af, Expected, _) => af_expected_rate_with(p, opts.power_saving, mc),
            (SchemeTag::Cf, Throughput, _) => cf_throughput_with(p, mc),
            (SchemeTag::Cf, Expected, _) => cf_expected_rate_with(p, mc),
            (s, m, l) => Err(domain_error(format!("{} has no {m} form with {l} layers", s.tag()))),
        },
    }
}

fn domain_error(detail: String) -> diamondbc::error::Error {
    diamondbc::error::Error::Domain { op: "evaluate", detail }
}

/// Rough standard error of an MC-backed rate: each realization decodes at
/// most `r_max` nats, so the per-sample variance is at most `v(r_max − v)`.
pub fn mc_std_error(r: &RateResult, ps: f64, n: usize) -> f64 {
    let v = r.value_nats;
    let top = r.param("s").or_else(|| r.param("s1")).map(|s| (ps * s).ln_1p()).unwrap_or(v);
    (v * (top - v)).max(0.0).sqrt() / (n.max(1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for s in SchemeTag::ALL {
            assert_eq!(s.tag().parse::<SchemeTag>().unwrap(), s);
        }
        for b in BoundTag::ALL {
            assert_eq!(b.tag().parse::<BoundTag>().unwrap(), b);
        }
        assert!("xf".parse::<SchemeTag>().is_err());
        assert_eq!("inf".parse::<Layers>().unwrap(), Layers::Inf);
        assert!("4".parse::<Layers>().is_err());
    }

    #[test]
    fn layer_rules() {
        use Metric::*;
        assert_eq!(SchemeTag::Df.layers(Throughput, None).unwrap(), Layers::Finite(1));
        assert!(SchemeTag::Df.layers(Throughput, Some(Layers::Finite(2))).is_err());
        assert!(SchemeTag::Df.layers(Expected, Some(Layers::Inf)).is_err());
        assert_eq!(SchemeTag::Cf.layers(Expected, None).unwrap(), Layers::Inf);
        assert!(SchemeTag::Af.layers(Expected, Some(Layers::Finite(2))).is_err());
        assert!(BoundTag::Rc.kind(Expected).is_err());
        assert!(BoundTag::Dfub.kind(Throughput).is_err());
    }
}
