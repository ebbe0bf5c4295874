//! Dense-network capacity scaling: runs TDMA and the hierarchical scheme at
//! depths 1..3 over a geometric ladder of network sizes, fits the scaling
//! exponent of each, and checks every rate against the per-source SIMO
//! upper bound evaluated on the same instance.
//!
//!     cargo run --release --example dense_scaling [seeds]

use hiercoop::channel::ChannelParams;
use hiercoop::cutset::dense_simo_upper_bound;
use hiercoop::derive_seed;
use hiercoop::experiment::fit_scaling_exponent;
use hiercoop::hierarchy::{run_hierarchical, SchemeConfig};
use hiercoop::net::{NetworkInstance, Regime};

fn main() {
    let seeds: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    let params = ChannelParams::new(1.0, 3.0, 1e4, 1.0).unwrap();
    let ns = [64usize, 128, 256, 512, 1024, 2048, 4096];

    println!("dense scaling, alpha = {}, GP/N0 = {} ({} seeds/point)", params.alpha, params.power, seeds);
    for h in 0..=3usize {
        let mut points = Vec::new();
        let mut sandwich_ok = true;
        for &n in &ns {
            let mut acc = 0.0;
            for t in 0..seeds {
                let seed = derive_seed(1, &[n as u64, t as u64]);
                let inst = NetworkInstance::sample(n, Regime::Dense, seed)
                    .unwrap()
                    .with_random_pairing(derive_seed(seed, &[2]));
                let report = run_hierarchical(&inst, &params, &SchemeConfig::new(h)).unwrap();
                if t == 0 && n <= 256 {
                    let bound = dense_simo_upper_bound(&inst, &params).unwrap();
                    sandwich_ok &= report.aggregate_rate <= bound;
                }
                acc += report.aggregate_rate;
            }
            points.push((n as f64, acc / seeds as f64));
        }
        // depth 3 needs every level's cluster size >= 4, which caps the
        // smallest usable n at 256
        let pts = if h == 3 { &points[2..] } else { &points[..] };
        let fit = fit_scaling_exponent(pts, None).unwrap();
        println!(
            "  h={h}: slope {:+.3} (theory {:.3})  r²={:.4}  rate(n={}) = {:.3e}  below SIMO bound: {sandwich_ok}",
            fit.slope,
            h as f64 / (h + 1) as f64,
            fit.r_squared,
            ns[ns.len() - 1],
            points.last().unwrap().1,
        );
    }
}
