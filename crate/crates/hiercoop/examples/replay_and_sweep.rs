//! Reproducibility plumbing: serialize an instance to JSON and replay it,
//! then run a small sweep twice through the library API and confirm the CSV
//! outputs are byte-identical.
//!
//!     cargo run --release --example replay_and_sweep

use hiercoop::experiment::{run_sweep, Scheme, SweepConfig};
use hiercoop::net::{NetworkInstance, Regime};

fn main() {
    let inst = NetworkInstance::sample(64, Regime::Extended, 42)
        .unwrap()
        .with_random_pairing(7);
    let json = inst.to_json().unwrap();
    let replayed = NetworkInstance::from_json(&json).unwrap();
    let same = (0..64).all(|i| inst.position(i) == replayed.position(i)) && inst.pairing() == replayed.pairing();
    println!("instance JSON round-trip exact: {same} ({} bytes)", json.len());

    let cfg = SweepConfig {
        n_list: vec![64, 128, 256],
        alpha_list: vec![2.5],
        schemes: vec![Scheme::Tdma, Scheme::Hierarchical, Scheme::Multihop, Scheme::Cutset],
        levels_h: 1,
        trials: 2,
        seed: 2024,
        output_path: None,
        gain_const: 1.0,
        power: 1e4,
        noise: 1.0,
        epsilon: 0.05,
        record_timings: false,
    };
    let a = run_sweep(&cfg).unwrap();
    let b = run_sweep(&cfg).unwrap();
    println!("sweep rows: {}, byte-identical across two executions: {}", a.rows.len(), a.csv == b.csv);
    for s in &a.summary.summaries {
        if let Some(fit) = &s.fit {
            println!(
                "  {} (alpha {}): slope {:+.3}, failure fraction {:.3}",
                s.scheme.name(),
                s.alpha,
                fit.slope,
                s.failure_fraction
            );
        }
    }
    println!("\nfirst CSV lines:");
    for line in a.csv.lines().take(4) {
        println!("  {line}");
    }
}
