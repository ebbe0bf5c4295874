//! Integration tests for the cooperation scheme, its baselines, and the
//! report bookkeeping.

use hiercoop::channel::ChannelParams;
use hiercoop::cutset::dense_simo_upper_bound;
use hiercoop::derive_seed;
use hiercoop::hierarchy::{
    failure_rate, per_node_power_audit, run_bursty_extended, run_hierarchical, run_multihop_baseline, SchemeConfig,
};
use hiercoop::net::{NetworkInstance, Regime};

fn paired(n: usize, regime: Regime, seed: u64) -> NetworkInstance {
    NetworkInstance::sample(n, regime, seed).unwrap().with_random_pairing(derive_seed(seed, &[1]))
}

#[test]
fn tdma_report_is_flat_rate_with_exact_power_share() {
    let params = ChannelParams::new(1.0, 3.0, 100.0, 1.0).unwrap();
    let inst = paired(256, Regime::Dense, 3);
    let report = run_hierarchical(&inst, &params, &SchemeConfig::new(0)).unwrap();
    assert_eq!(report.scheme, "tdma");
    assert!(report.m_per_level.is_empty());
    assert!(report.aggregate_rate > 0.1, "TDMA rate should be order 1");
    assert!((report.per_node_avg_power - params.power / 256.0).abs() < 1e-12);
    let audit = per_node_power_audit(&report, &params, Regime::Dense);
    assert!(audit.pass);
}

#[test]
fn hierarchical_requires_dense_regime_and_real_pairing() {
    let params = ChannelParams::unit();
    let ext = paired(64, Regime::Extended, 1);
    assert!(run_hierarchical(&ext, &params, &SchemeConfig::new(1)).is_err());
    let unpaired = NetworkInstance::sample(64, Regime::Dense, 1).unwrap();
    assert!(run_hierarchical(&unpaired, &params, &SchemeConfig::new(1)).is_err());
}

#[test]
fn report_rate_matches_top_level_accounting() {
    // aggregate_rate = n * M * L / (T1 + T2 + T3) at the top level, and the
    // run is reproducible for a fixed seed.
    let params = ChannelParams::new(1.0, 3.0, 1e4, 1.0).unwrap();
    let inst = paired(256, Regime::Dense, 17);
    let cfg = SchemeConfig::new(1);
    let report = run_hierarchical(&inst, &params, &cfg).unwrap();
    let [t1, t2, t3] = report.phase_durations[0];
    let m = report.m_per_level[0];
    let predicted = 256.0 * m * cfg.block_bits / (t1 + t2 + t3);
    assert!((report.aggregate_rate - predicted).abs() < 1e-9 * predicted);

    let again = run_hierarchical(&inst, &params, &cfg).unwrap();
    assert_eq!(report.aggregate_rate, again.aggregate_rate);
    assert_eq!(report.to_json().unwrap(), again.to_json().unwrap());

    // exponent bookkeeping follows b_{j+1} = 1/(2 - b_j) from 0
    let mut expect = 0.0f64;
    for &b in report.b_per_level.iter() {
        assert!((b - expect).abs() < 1e-12);
        expect = 1.0 / (2.0 - expect);
    }
}

#[test]
fn engineered_lattice_never_fails() {
    // 16 nodes per cell on a 4x4 grid, placed well inside each half-cell.
    let g = 4usize;
    let mut positions = Vec::new();
    for cx in 0..g {
        for cy in 0..g {
            for i in 0..4 {
                for j in 0..4 {
                    positions.push([
                        (cx as f64 + 0.13 + 0.25 * i as f64) / g as f64,
                        (cy as f64 + 0.13 + 0.25 * j as f64) / g as f64,
                    ]);
                }
            }
        }
    }
    let n = positions.len();
    let pairing: Vec<usize> = (0..n).map(|i| (i + n / 2) % n).collect();
    let inst = NetworkInstance::from_positions(Regime::Dense, positions, Some(pairing), 0).unwrap();
    let params = ChannelParams::new(1.0, 3.0, 1e4, 1.0).unwrap();
    let report = run_hierarchical(&inst, &params, &SchemeConfig::new(1)).unwrap();
    assert!(!report.failure, "lattice placement must not trip the occupancy gate: {:?}", report.failure_reason);
}

#[test]
fn failure_fraction_small_and_nonincreasing_in_n() {
    let params = ChannelParams::new(1.0, 3.0, 1e4, 1.0).unwrap();
    let cfg = SchemeConfig::new(1);
    let f1024 = failure_rate(&params, &cfg, 1024, 200, 99).unwrap();
    assert!(f1024 <= 0.05, "failure fraction {f1024} at n=1024 exceeds 0.05");
    let f2048 = failure_rate(&params, &cfg, 2048, 200, 99).unwrap();
    // non-increasing within a generous binomial confidence allowance
    assert!(f2048 <= f1024 + 0.03, "failure fraction grew: {f1024} -> {f2048}");
}

#[test]
fn bursty_duty_cycle_and_identity() {
    let cfg = SchemeConfig::new(1);
    // alpha = 3, n = 100: duty cycle n^(-1/2) = 0.1
    let params = ChannelParams::new(1.0, 3.0, 1e4, 1.0).unwrap();
    let inst = paired(100, Regime::Extended, 5);
    let report = run_bursty_extended(&inst, &params, &cfg).unwrap();
    assert!((report.duty_cycle - 0.1).abs() < 1e-12);

    // alpha = 2: duty cycle 1 and bit-identical to the rescaled dense run
    let params2 = ChannelParams::new(1.0, 2.0, 1e4, 1.0).unwrap();
    let inst2 = paired(256, Regime::Extended, 6);
    let bursty = run_bursty_extended(&inst2, &params2, &cfg).unwrap();
    let dense = run_hierarchical(&inst2.rescaled_dense(), &params2, &cfg).unwrap();
    assert_eq!(bursty.duty_cycle, 1.0);
    assert_eq!(bursty.aggregate_rate, dense.aggregate_rate);
    assert_eq!(bursty.phase_durations, dense.phase_durations);

    // the bursty variant rejects dense instances
    assert!(run_bursty_extended(&inst2.rescaled_dense(), &params2, &cfg).is_err());
}

#[test]
fn bursty_rate_is_duty_times_dense_rate() {
    let cfg = SchemeConfig::new(2);
    let params = ChannelParams::new(1.0, 2.5, 1e4, 1.0).unwrap();
    let inst = paired(1024, Regime::Extended, 9);
    let bursty = run_bursty_extended(&inst, &params, &cfg).unwrap();
    let dense = run_hierarchical(&inst.rescaled_dense(), &params, &cfg).unwrap();
    let duty = 1024f64.powf(-(2.5 / 2.0 - 1.0));
    assert!((bursty.aggregate_rate - duty * dense.aggregate_rate).abs() < 1e-12 * dense.aggregate_rate);
}

#[test]
fn multihop_single_route_accounting_is_deterministic_and_exact() {
    // Engineered instance: 16 nodes in a 4 x 4 extended square, one per
    // unit squarelet; a single left-to-right pair plus self-contained
    // short pairs elsewhere.
    let mut positions = Vec::new();
    for x in 0..4 {
        for y in 0..4 {
            positions.push([x as f64 + 0.5, y as f64 + 0.5]);
        }
    }
    // node index = 4x + y; pair node 1 (0,1) with node 13 (3,1), others swap
    let mut pairing: Vec<usize> = (0..16).collect();
    pairing.swap(1, 13);
    pairing.swap(0, 4);
    pairing.swap(8, 12);
    pairing.swap(2, 6);
    pairing.swap(10, 14);
    pairing.swap(3, 7);
    pairing.swap(11, 15);
    pairing.swap(5, 9);
    let inst = NetworkInstance::from_positions(Regime::Extended, positions, Some(pairing), 0).unwrap();
    let params = ChannelParams::new(1.0, 3.0, 100.0, 1.0).unwrap();
    let a = run_multihop_baseline(&inst, &params).unwrap();
    let b = run_multihop_baseline(&inst, &params).unwrap();
    assert_eq!(a.aggregate_rate, b.aggregate_rate);
    assert!(!a.failure);
    assert!(a.aggregate_rate > 0.0);
    let audit = per_node_power_audit(&a, &params, Regime::Extended);
    assert!(audit.pass);
}

#[test]
fn multihop_requires_extended() {
    let params = ChannelParams::unit();
    let dense = paired(64, Regime::Dense, 2);
    assert!(run_multihop_baseline(&dense, &params).is_err());
}

#[test]
fn dense_bound_dominates_scheme_on_same_instance() {
    let params = ChannelParams::new(1.0, 3.0, 1e4, 1.0).unwrap();
    let inst = paired(256, Regime::Dense, 21);
    let bound = dense_simo_upper_bound(&inst, &params).unwrap();
    for h in 0..=2 {
        let report = run_hierarchical(&inst, &params, &SchemeConfig::new(h)).unwrap();
        assert!(report.aggregate_rate <= bound);
    }
}

#[test]
fn deeper_levels_produce_level_stats_chain() {
    let params = ChannelParams::new(1.0, 3.0, 1e4, 1.0).unwrap();
    let inst = paired(1024, Regime::Dense, 33);
    let report = run_hierarchical(&inst, &params, &SchemeConfig::new(2)).unwrap();
    assert_eq!(report.levels.len(), 2);
    assert_eq!(report.m_per_level.len(), 2);
    // cluster sizes strictly decrease down the hierarchy
    assert!(report.m_per_level[0] > report.m_per_level[1]);
    // durations positive at every level
    for [t1, t2, t3] in &report.phase_durations {
        assert!(*t1 > 0.0 && *t2 > 0.0 && *t3 > 0.0);
    }
}
