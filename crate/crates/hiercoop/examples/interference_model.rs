//! Inter-cluster interference under the 9-color TDMA schedule: the
//! ring-grouping bound against the interference actually received at every
//! probe node, the closed-form limit of the ring sum, and the
//! cross-correlation between two probes in the same cell.
//!
//!     cargo run --release --example interference_model

use hiercoop::channel::{
    interference_bound, interference_bound_limit, interference_power_mean, measured_interference, ChannelParams,
};
use hiercoop::net::{ClusterGrid, NetworkInstance, Regime};

fn main() {
    for alpha in [2.0f64, 2.5, 3.0, 4.0] {
        let params = ChannelParams::unit().with_alpha(alpha);
        print!("alpha = {alpha}: ring sum at 10^6 terms = {:.5}", interference_bound(&params, 1.0, 1_000_000));
        match interference_bound_limit(&params, 1.0) {
            Ok(limit) => println!(", closed-form limit = {limit:.5}"),
            Err(_) => println!(" (diverges like (8/9) ln terms at alpha = 2)"),
        }
    }

    let n = 4096;
    let m = 64;
    let params = ChannelParams::unit().with_alpha(3.0);
    let inst = NetworkInstance::sample(n, Regime::Dense, 5).unwrap();
    let grid = ClusterGrid::build(&inst, m).unwrap();
    let bound = interference_bound(&params, params.power, n / m);
    let mut worst = 0.0f64;
    let mut probes = 0;
    for cell in 0..grid.num_cells() {
        for &probe in grid.members(cell).iter().take(1) {
            let v = interference_power_mean(&inst, &grid, grid.color(cell), probe, &params).unwrap();
            worst = worst.max(v);
            probes += 1;
        }
    }
    println!("\nn = {n}, M = {m}, alpha = 3: worst probe interference {worst:.4} vs ring bound {bound:.4} ({probes} probes)");

    let cell = (0..grid.num_cells()).find(|&c| grid.members(c).len() >= 2).unwrap();
    let probe = grid.members(cell)[0];
    let stats = measured_interference(&inst, &grid, grid.color(cell), probe, &params, 11, 20_000).unwrap();
    println!(
        "Monte Carlo at one probe: mean power {:.4}, cross-correlation ratio {:.4} (uncorrelated across nodes)",
        stats.mean_power,
        stats.cross_correlation / stats.mean_power
    );
}
