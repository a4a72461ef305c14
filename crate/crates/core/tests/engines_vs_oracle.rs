//! Engines against the protocol simulation and against each other, at
//! sample sizes small enough for the default test run.

use diamondbc::bounds::{cutset_expected_quadrature, cutset_expected_rate, cutset_throughput, rc_throughput};
use diamondbc::gains::af_threshold;
use diamondbc::mc_oracle::{simulate_af_single, simulate_cf, simulate_daf_single, simulate_df_single, DafCase};
use diamondbc::schemes::{
    af_throughput_with, cf_throughput_with, daf_throughput, df_finite_expected_rate, df_throughput, CfParams,
    McSettings,
};
use diamondbc::{PowerConfig, SeedSpec};

const N: usize = 300_000;

fn pc(ps: f64, pr: f64) -> PowerConfig {
    PowerConfig::new(ps, pr).unwrap()
}

fn oracle(k: u64) -> SeedSpec {
    SeedSpec::new(7, 1000 + k)
}

#[test]
fn df_matches_oracle() {
    for (i, (ps, pr)) in [(1.0, 1.0), (0.5, 10.0), (4.0, 2.0)].into_iter().enumerate() {
        let p = pc(ps, pr);
        let a = df_throughput(&p);
        let r = simulate_df_single(&p, a.param("s").unwrap(), N, oracle(i as u64));
        let z = r.z_score(a.value_nats, 0.0);
        assert!(z.abs() < 4.0, "({ps}, {pr}): {} vs {}, z={z}", a.value_nats, r.estimate);
    }
}

#[test]
fn af_matches_oracle() {
    let p = pc(1.0, 10.0);
    let a = af_throughput_with(&p, &McSettings::new(N, 7)).unwrap();
    let r = simulate_af_single(&p, a.param("s").unwrap(), af_threshold(&p), N, oracle(10));
    let z = r.z_score(a.value_nats, r.std_error);
    assert!(z.abs() < 4.0, "{} vs {}, z={z}", a.value_nats, r.estimate);
}

#[test]
fn daf_matches_oracle_and_dominates_df() {
    let p = pc(1.0, 3.0);
    let a = daf_throughput(&p);
    let r = simulate_daf_single(&p, a.param("s").unwrap(), DafCase::Natural, N, oracle(20));
    assert!(r.z_score(a.value_nats, 0.0).abs() < 4.0, "{} vs {}", a.value_nats, r.estimate);
    assert!(a.value_nats >= df_throughput(&p).value_nats - 1e-9);
}

#[test]
fn cf_matches_oracle() {
    let p = pc(1.0, 100.0);
    let a = cf_throughput_with(&p, &McSettings::new(N, 7)).unwrap();
    let c = CfParams::new(a.param("D").unwrap(), a.param("Rr").unwrap()).unwrap();
    let r = simulate_cf(&p, &c, a.param("s").unwrap(), N, oracle(30));
    let z = r.z_score(a.value_nats, r.std_error);
    assert!(z.abs() < 4.0, "{} vs {}, z={z}", a.value_nats, r.estimate);
}

#[test]
fn bounds_order_and_reference_values() {
    let p = pc(1.0, 1.0);
    assert!((cutset_throughput(&p).value_nats - 0.52277).abs() < 1e-4);
    let closed = cutset_expected_rate(&p).value_nats;
    assert!((closed - cutset_expected_quadrature(1.0).unwrap()).abs() < 1e-6);
    for pr in [1.0, 10.0, 1000.0] {
        let p = pc(1.0, pr);
        let cut = cutset_throughput(&p).value_nats;
        assert!(rc_throughput(&p).value_nats <= cut + 1e-12);
        assert!(df_throughput(&p).value_nats <= rc_throughput(&p).value_nats + 1e-9);
    }
}

#[test]
fn layering_never_loses() {
    let p = pc(1.0, 10.0);
    let one = df_throughput(&p).value_nats;
    let two = df_finite_expected_rate(2, &p).unwrap().value_nats;
    assert!(two >= one - 1e-4, "{two} < {one}");
}
