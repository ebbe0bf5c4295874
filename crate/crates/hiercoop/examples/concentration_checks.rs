//! Geometry concentration checks: cell occupancy against the
//! large-deviation band, squarelet statistics of extended networks, the
//! median-cut crossing count, and the minimum pairwise distance tail.
//!
//!     cargo run --release --example concentration_checks [seeds]

use hiercoop::derive_seed;
use hiercoop::net::{occupancy_exponent, ClusterGrid, NetworkInstance, Regime};

fn main() {
    let seeds: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let delta = 0.5;

    let n = 10_000usize;
    for m in [100usize, 1000] {
        let mut violations = 0;
        for t in 0..seeds {
            let inst = NetworkInstance::sample(n, Regime::Dense, derive_seed(1, &[m as u64, t as u64])).unwrap();
            let stats = ClusterGrid::build(&inst, m).unwrap().occupancy_stats();
            let lo = (1.0 - delta) * m as f64;
            let hi = (1.0 + delta) * m as f64;
            if (stats.min_count as f64) < lo || (stats.max_count as f64) > hi {
                violations += 1;
            }
        }
        let bound = (n as f64 / m as f64) * (-occupancy_exponent(delta) * m as f64).exp();
        println!(
            "occupancy band (1±{delta})M at n={n}, M={m}: {violations}/{seeds} violations, analytic bound {bound:.2e}/seed"
        );
    }

    let n = 1024usize;
    let mut occ = 0;
    let mut cover = 0;
    let mut crossing = 0;
    for t in 0..seeds {
        let seed = derive_seed(2, &[t as u64]);
        let inst = NetworkInstance::sample(n, Regime::Extended, seed)
            .unwrap()
            .with_random_pairing(derive_seed(seed, &[1]));
        let st = inst.squarelet_checks().unwrap();
        occ += usize::from((st.max_unit_occupancy as f64) < (n as f64).ln());
        cover += usize::from(st.all_2logn_occupied);
        let quarter = n as f64 / 4.0;
        crossing += usize::from((st.crossing_count as f64 - quarter).abs() <= 0.25 * quarter);
    }
    println!("squarelets at n={n}: unit occupancy < ln n in {occ}/{seeds}; area-2ln(n) all occupied in {cover}/{seeds}");
    println!("median-cut crossings within (1±0.25)n/4 in {crossing}/{seeds}");

    let n = 1000usize;
    let threshold = (n as f64).powf(-1.5);
    let mut close = 0;
    for t in 0..seeds {
        let inst = NetworkInstance::sample(n, Regime::Dense, derive_seed(3, &[t as u64])).unwrap();
        close += usize::from(inst.min_pairwise_distance() < threshold);
    }
    let union_bound = (n * (n - 1)) as f64 / 2.0 * std::f64::consts::PI * (n as f64).powf(-3.0);
    println!(
        "min pairwise distance < n^-1.5 at n={n}: {close}/{seeds} seeds, pair union bound {union_bound:.2e}/seed"
    );
}
