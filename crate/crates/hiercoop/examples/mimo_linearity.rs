//! Cluster-to-cluster MIMO mutual information as the array size grows:
//! linear growth above the Paley-Zygmund floor, the quantized channel with
//! per-observation noise, and the log-scaled variant under growing
//! interference. Also reports the normalized-amplitude eigenvalue moments
//! against their analytic bounds.
//!
//!     cargo run --release --example mimo_linearity

use hiercoop::channel::{ChannelGains, ChannelParams};
use hiercoop::mimo::{
    eigen_moment_stats, log_m_scaled_quantized_mi, mimo_mutual_information, paley_zygmund_bound,
    quantized_mutual_information, received_power_bounds, rho_range, QuantizerSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn session(m: usize, seed: u64, params: &ChannelParams) -> (ChannelGains, f64, f64) {
    // M transmit nodes in cell (0,0), M receive nodes in cell (2,0) of a
    // 4x4 unit-square grid: the closest non-neighboring separation.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = 0.25;
    let tx: Vec<[f64; 2]> = (0..m).map(|_| [rng.gen::<f64>() * w, rng.gen::<f64>() * w]).collect();
    let rx: Vec<[f64; 2]> = (0..m).map(|_| [2.0 * w + rng.gen::<f64>() * w, rng.gen::<f64>() * w]).collect();
    let r_sd = 2.0 * w;
    let sigma_sq = params.power * r_sd.powf(params.alpha) / m as f64;
    (ChannelGains::new(params, &tx, &rx).unwrap(), sigma_sq, r_sd)
}

fn main() {
    let params = ChannelParams::unit();
    let (a, b) = rho_range(params.alpha);
    let (p1, p2) = received_power_bounds(&params);
    let q = QuantizerSpec::for_power_bound(p2, p2, 0.1).unwrap();
    let snr = params.gain_const * params.power / params.noise;
    println!("alpha = {}, SNR = {snr}, rho in [{a:.4}, {b:.4}], received power in [{p1:.4}, {p2:.4}]", params.alpha);
    println!("quantizer: delta^2 = P2 = {p2:.4}, Q = {:.3} bits/observation", q.rate_q);
    println!("{:>4} {:>10} {:>12} {:>12} {:>14} {:>10} {:>10}", "M", "MI", "MI/M", "PZ floor", "quantized MI", "scaled MI", "E[λ],E[λ²]");

    for (i, m) in [4usize, 8, 16, 32, 64].into_iter().enumerate() {
        let (gains, sigma_sq, r_sd) = session(m, 1000 + i as u64, &params);
        let mi = mimo_mutual_information(&gains, sigma_sq, params.noise, 200, 7).unwrap();
        let floor = paley_zygmund_bound(a, b, snr, m, a / 2.0).unwrap();
        let qmi = quantized_mutual_information(&gains, sigma_sq, params.noise, &q, 200, 8).unwrap();
        let smi =
            log_m_scaled_quantized_mi(&gains, sigma_sq, params.noise, (m as f64).ln(), &q, p2, 200, 9).unwrap();
        let rho = gains.scaled(1.0 / (params.gain_const.sqrt() * r_sd.powf(-params.alpha / 2.0)));
        let mom = eigen_moment_stats(&rho, 100, 11);
        println!(
            "{m:>4} {:>10.3} {:>12.4} {:>12.3e} {:>14.3} {:>10.3} {:>7.2},{:.2}",
            mi.mean,
            mi.mean / m as f64,
            floor,
            qmi.mean,
            smi.mean,
            mom.mean_lambda,
            mom.mean_lambda_sq
        );
        assert!(mi.mean >= floor, "mutual information fell below the achievability floor");
        assert!(mom.mean_lambda >= a * a - 0.05 && mom.mean_lambda_sq <= 2.0 * b.powi(4) + 0.05);
    }
}
