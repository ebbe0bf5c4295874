//! Distributed MIMO mutual information between cooperating clusters:
//! Monte Carlo log-det evaluation over phase fading, the Paley-Zygmund
//! linear-growth lower bound, received-power bounds for the long-range
//! phase, and the quantize-and-forward channel variants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelGains, ChannelParams};
use crate::cmatrix::{logdet2_eye_plus_gram, CMatrix};
use crate::error::{Error, Result};
use crate::net::{ClusterGrid, Direction, NetworkInstance};

/// Closed-form bounds on the power received by each destination node during
/// a long-range MIMO session with per-node transmit power P r_SD^alpha / M:
///
///   P1 = (sqrt2/(sqrt2+1))^alpha G P + N0
///   P2 = (sqrt2/(sqrt2-1))^alpha G P + N0
pub fn received_power_bounds(params: &ChannelParams) -> (f64, f64) {
    received_power_bounds_raw(params.gain_const * params.power, params.noise, params.alpha)
}

pub fn received_power_bounds_raw(gp: f64, n0: f64, alpha: f64) -> (f64, f64) {
    let s = 2f64.sqrt();
    let p1 = (s / (s + 1.0)).powf(alpha) * gp + n0;
    let p2 = (s / (s - 1.0)).powf(alpha) * gp + n0;
    (p1, p2)
}

/// Extremes of the normalized amplitude rho_ik = (r_SD / r_ik)^(alpha/2)
/// over non-neighbor session geometries with r_SD >= 2 sqrt(A_c):
/// a = (sqrt2/(sqrt2+1))^(alpha/2), b = (sqrt2/(sqrt2-1))^(alpha/2).
pub fn rho_range(alpha: f64) -> (f64, f64) {
    let s = 2f64.sqrt();
    ((s / (s + 1.0)).powf(alpha / 2.0), (s / (s - 1.0)).powf(alpha / 2.0))
}

/// Mutual-information estimate in bits per symbol, with the Monte Carlo
/// standard error of the mean.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MiEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

fn mi_monte_carlo(gains: &ChannelGains, coeff: f64, trials: usize, seed: u64) -> Result<MiEstimate> {
    if gains.nrows() == 0 || gains.ncols() == 0 {
        return Err(Error::invalid("empty channel matrix"));
    }
    if !coeff.is_finite() {
        return Err(Error::numeric(format!("non-finite SNR coefficient {coeff}")));
    }
    let trials = trials.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let h = gains.realize(&mut rng);
        let v = logdet2_eye_plus_gram(&h, coeff)?;
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / trials as f64;
    let var = (sum_sq / trials as f64 - mean * mean).max(0.0);
    let std_error = if trials > 1 { (var / (trials - 1) as f64).sqrt() } else { f64::INFINITY };
    Ok(MiEstimate {
        mean,
        std_error,
        trials,
    })
}

/// Monte Carlo average over fading draws of log2 det(I + (sigma^2/noise) HH*),
/// the mutual information of the M x M cluster-to-cluster channel with
/// per-node transmit power sigma^2 and receiver noise power `noise`.
pub fn mimo_mutual_information(
    gains: &ChannelGains,
    sigma_sq: f64,
    noise: f64,
    trials: usize,
    seed: u64,
) -> Result<MiEstimate> {
    if !(noise > 0.0) {
        return Err(Error::invalid(format!("noise power {noise} must be positive")));
    }
    if sigma_sq < 0.0 {
        return Err(Error::invalid(format!("signal power {sigma_sq} must be nonnegative")));
    }
    mi_monte_carlo(gains, sigma_sq / noise, trials, seed)
}

/// log2 det(I + c HH*) for a single realization; used by invariance tests.
pub fn mi_single_realization(h: &CMatrix, coeff: f64) -> Result<f64> {
    logdet2_eye_plus_gram(h, coeff)
}

/// Paley-Zygmund lower bound on the MIMO mutual information:
/// M log2(1 + SNR t) (a^2 - t)^2 / (2 b^4), valid for 0 <= t < a^2.
pub fn paley_zygmund_bound(a: f64, b: f64, snr: f64, m: usize, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t < a * a) {
        return Err(Error::invalid(format!("threshold t={t} outside [0, a^2) with a^2 = {}", a * a)));
    }
    let frac = (a * a - t).powi(2) / (2.0 * b.powi(4));
    Ok(m as f64 * (1.0 + snr * t).log2() * frac)
}

/// Moments of a uniformly chosen eigenvalue of (1/M) F F* where F has the
/// normalized amplitudes rho_ik and i.i.d. phases. The first moment is
/// phase-free (trace identity); the second is averaged over draws.
pub fn eigen_moment_stats(rho: &ChannelGains, trials: usize, seed: u64) -> EigenMoments {
    let m = rho.nrows().max(rho.ncols()) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lambda_acc = 0.0;
    let mut lambda_sq_acc = 0.0;
    let trials = trials.max(1);
    for _ in 0..trials {
        let f = rho.realize(&mut rng);
        let g = f.small_gram();
        lambda_acc += g.trace_re() / (m * m);
        lambda_sq_acc += g.frobenius_sq() / (m * m * m);
    }
    EigenMoments {
        mean_lambda: lambda_acc / trials as f64,
        mean_lambda_sq: lambda_sq_acc / trials as f64,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EigenMoments {
    pub mean_lambda: f64,
    pub mean_lambda_sq: f64,
}

/// Fixed-rate quantizer model: observations are reproduced with independent
/// additive noise of variance delta_sq, at rate_q bits per observation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuantizerSpec {
    pub delta_sq: f64,
    pub rate_q: f64,
}

impl QuantizerSpec {
    /// Spec with rate log2(1 + p2/delta_sq) + eps for upper received power p2.
    pub fn for_power_bound(p2: f64, delta_sq: f64, eps: f64) -> Result<Self> {
        Ok(QuantizerSpec {
            delta_sq,
            rate_q: quantizer_rate(p2, delta_sq, eps)?,
        })
    }
}

/// Bits per observation needed by the additive-noise test channel:
/// log2(1 + p2 / delta_sq) + eps.
pub fn quantizer_rate(p2: f64, delta_sq: f64, eps: f64) -> Result<f64> {
    if !(delta_sq > 0.0) {
        return Err(Error::invalid(format!("quantization noise variance {delta_sq} must be positive")));
    }
    if p2 < 0.0 || eps < 0.0 {
        return Err(Error::invalid("p2 and eps must be nonnegative"));
    }
    Ok((1.0 + p2 / delta_sq).log2() + eps)
}

/// Mutual information of the quantized MIMO channel Yhat = HX + Z + D with
/// D of variance delta_sq per output: the effective noise is
/// noise + delta_sq.
pub fn quantized_mutual_information(
    gains: &ChannelGains,
    sigma_sq: f64,
    noise: f64,
    q: &QuantizerSpec,
    trials: usize,
    seed: u64,
) -> Result<MiEstimate> {
    if !(q.delta_sq > 0.0) {
        return Err(Error::invalid("delta_sq must be positive"));
    }
    mimo_mutual_information(gains, sigma_sq, noise + q.delta_sq, trials, seed)
}

/// Mutual information of the scaled quantized channel Yhat = s(HX + Z) + D
/// with s^2 = p2 / (p2 + interference), used when the received signal
/// carries unbounded (log-growing) interference: scaling first keeps the
/// quantizer rate fixed. Effective SNR coefficient:
///
///   s^2 sigma^2 / (s^2 (noise + interference) + delta_sq)
pub fn log_m_scaled_quantized_mi(
    gains: &ChannelGains,
    sigma_sq: f64,
    noise: f64,
    interference: f64,
    q: &QuantizerSpec,
    p2: f64,
    trials: usize,
    seed: u64,
) -> Result<MiEstimate> {
    if interference < 0.0 {
        return Err(Error::invalid("interference power must be nonnegative"));
    }
    if !(noise > 0.0) {
        return Err(Error::invalid("noise power must be positive"));
    }
    let s_sq = p2 / (p2 + interference);
    let coeff = s_sq * sigma_sq / (s_sq * (noise + interference) + q.delta_sq);
    mi_monte_carlo(gains, coeff, trials, seed)
}

/// A long-range MIMO session between a source and a destination cluster.
/// For neighboring clusters the participating nodes are the two far halves;
/// otherwise both full cells take part.
#[derive(Debug, Clone)]
pub struct MimoSession {
    pub src_cell: usize,
    pub dst_cell: usize,
    pub tx_nodes: Vec<usize>,
    pub rx_nodes: Vec<usize>,
    /// Distance between the cell mid-points.
    pub r_sd: f64,
    /// P r_SD^alpha / M with M the session antenna count.
    pub per_node_power: f64,
    pub neighbor_mode: bool,
}

impl MimoSession {
    /// Assemble the session for a cluster pair. Fails for identical cells
    /// (those pairs skip the long-range phase) and for empty participant
    /// sets.
    pub fn build(
        instance: &NetworkInstance,
        grid: &ClusterGrid,
        params: &ChannelParams,
        src_cell: usize,
        dst_cell: usize,
    ) -> Result<Self> {
        if src_cell == dst_cell {
            return Err(Error::invalid("source and destination cluster coincide"));
        }
        let cheb = grid.cell_chebyshev(src_cell, dst_cell);
        let neighbor_mode = cheb <= 1;
        let (tx_nodes, rx_nodes) = if neighbor_mode {
            let (sx, sy) = grid.cell_xy(src_cell);
            let (dx, dy) = grid.cell_xy(dst_cell);
            // Split along the axis with the larger offset; ties go to x.
            let toward_dst = if dx.abs_diff(sx) >= dy.abs_diff(sy) {
                if dx >= sx {
                    Direction::XPos
                } else {
                    Direction::XNeg
                }
            } else if dy >= sy {
                Direction::YPos
            } else {
                Direction::YNeg
            };
            let (_, tx_far) = grid.halves(src_cell, toward_dst);
            let (_, rx_far) = grid.halves(dst_cell, toward_dst.opposite());
            (tx_far.to_vec(), rx_far.to_vec())
        } else {
            (grid.members(src_cell).to_vec(), grid.members(dst_cell).to_vec())
        };
        if tx_nodes.is_empty() || rx_nodes.is_empty() {
            return Err(Error::invalid("session has an empty participant set"));
        }
        let side = instance.side();
        let sc = grid.cell_center(src_cell, side);
        let dc = grid.cell_center(dst_cell, side);
        let r_sd = ((sc[0] - dc[0]).powi(2) + (sc[1] - dc[1]).powi(2)).sqrt();
        let per_node_power = params.power * r_sd.powf(params.alpha) / tx_nodes.len() as f64;
        Ok(MimoSession {
            src_cell,
            dst_cell,
            tx_nodes,
            rx_nodes,
            r_sd,
            per_node_power,
            neighbor_mode,
        })
    }

    pub fn antennas(&self) -> usize {
        self.tx_nodes.len().min(self.rx_nodes.len())
    }

    /// Channel amplitudes rx x tx for this session.
    pub fn gains(&self, instance: &NetworkInstance, params: &ChannelParams) -> Result<ChannelGains> {
        let tx: Vec<[f64; 2]> = self.tx_nodes.iter().map(|&i| instance.position(i)).collect();
        let rx: Vec<[f64; 2]> = self.rx_nodes.iter().map(|&i| instance.position(i)).collect();
        ChannelGains::new(params, &tx, &rx)
    }

    /// Normalized amplitudes rho_ik = (r_SD / r_ik)^(alpha/2); with the
    /// session power these make the MI coefficient SNR/M with
    /// SNR = G P / noise.
    pub fn normalized_rho(&self, instance: &NetworkInstance, params: &ChannelParams) -> Result<ChannelGains> {
        let gains = self.gains(instance, params)?;
        let scale = 1.0 / (params.gain_const.sqrt() * self.r_sd.powf(-params.alpha / 2.0));
        Ok(gains.scaled(scale))
    }

    /// Closed-form mean received power at destination node index `d` (into
    /// `rx_nodes`): sum_s (G P / M) (r_SD / r_sd)^alpha + N0.
    pub fn expected_rx_power(&self, instance: &NetworkInstance, params: &ChannelParams, d: usize) -> f64 {
        let rx = self.rx_nodes[d];
        let gp_over_m = params.gain_const * params.power / self.tx_nodes.len() as f64;
        let mut total = params.noise;
        for &s in &self.tx_nodes {
            let ratio = self.r_sd / instance.distance(s, rx);
            total += gp_over_m * ratio.powf(params.alpha);
        }
        total
    }

    /// Monte Carlo mean received power at destination `d` over phase and
    /// symbol draws (oracle cross-check for `expected_rx_power`).
    pub fn measured_rx_power(
        &self,
        instance: &NetworkInstance,
        params: &ChannelParams,
        d: usize,
        trials: usize,
        seed: u64,
    ) -> Result<f64> {
        use rand_distr::StandardNormal;
        let rx_pos = instance.position(self.rx_nodes[d]);
        let tx: Vec<[f64; 2]> = self.tx_nodes.iter().map(|&i| instance.position(i)).collect();
        let gains = ChannelGains::new(params, &tx, &[rx_pos])?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = (self.per_node_power / 2.0).sqrt();
        let noise_scale = (params.noise / 2.0).sqrt();
        let mut acc = 0.0;
        for _ in 0..trials.max(1) {
            let h = gains.realize(&mut rng);
            let mut y = num_complex::Complex64::new(
                rng.sample::<f64, _>(StandardNormal) * noise_scale,
                rng.sample::<f64, _>(StandardNormal) * noise_scale,
            );
            for (k, _) in self.tx_nodes.iter().enumerate() {
                let x = num_complex::Complex64::new(
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                ) * scale;
                y += h.get(0, k) * x;
            }
            acc += y.norm_sqr();
        }
        Ok(acc / trials.max(1) as f64)
    }
}

impl Direction {
    pub fn opposite(self) -> Direction {
        match self {
            Direction::XNeg => Direction::XPos,
            Direction::XPos => Direction::XNeg,
            Direction::YNeg => Direction::YPos,
            Direction::YPos => Direction::YNeg,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::Regime;
    use num_complex::Complex64;

    #[test]
    fn received_power_bounds_noise_only() {
        let (p1, p2) = received_power_bounds_raw(0.0, 1.0, 2.0);
        assert_eq!((p1, p2), (1.0, 1.0));
    }

    #[test]
    fn received_power_bounds_closed_form_alpha2() {
        let (p1, p2) = received_power_bounds_raw(1.0, 0.0, 2.0);
        assert!((p1 - 0.3431).abs() < 5e-5, "p1 = {p1}");
        assert!((p2 - 11.657).abs() < 5e-3, "p2 = {p2}");
    }

    #[test]
    fn rho_range_alpha2() {
        let (a, b) = rho_range(2.0);
        assert!((a - 0.5858).abs() < 5e-5);
        assert!((b - 3.4142).abs() < 5e-5);
    }

    #[test]
    fn rho_product_identity() {
        // (sqrt2+1)(sqrt2-1) = 1, so a*b = 2^(alpha/2).
        for alpha in [2.0, 2.5, 3.0, 4.0] {
            let (a, b) = rho_range(alpha);
            assert!((a * b - 2f64.powf(alpha / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn scalar_mi_is_one_bit() {
        let gains = ChannelGains::from_amplitudes(1, 1, vec![1.0]);
        let mi = mimo_mutual_information(&gains, 1.0, 1.0, 10, 0).unwrap();
        assert!((mi.mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_power_gives_zero_mi() {
        let gains = ChannelGains::from_amplitudes(2, 2, vec![1.0, 0.5, 0.3, 0.9]);
        let mi = mimo_mutual_information(&gains, 0.0, 1.0, 5, 0).unwrap();
        assert_eq!(mi.mean, 0.0);
    }

    #[test]
    fn mi_rejects_nonpositive_noise() {
        let gains = ChannelGains::from_amplitudes(1, 1, vec![1.0]);
        assert!(mimo_mutual_information(&gains, 1.0, 0.0, 1, 0).is_err());
    }

    #[test]
    fn mi_monotone_in_power_and_noise() {
        let gains = ChannelGains::from_amplitudes(3, 3, vec![1.0, 0.4, 0.2, 0.7, 1.1, 0.3, 0.5, 0.6, 0.9]);
        let lo = mimo_mutual_information(&gains, 0.5, 1.0, 40, 7).unwrap().mean;
        let hi = mimo_mutual_information(&gains, 1.5, 1.0, 40, 7).unwrap().mean;
        assert!(hi > lo);
        let noisy = mimo_mutual_information(&gains, 0.5, 2.0, 40, 7).unwrap().mean;
        assert!(noisy < lo);
    }

    #[test]
    fn mi_invariant_under_row_phase_rotation() {
        let gains = ChannelGains::from_amplitudes(2, 2, vec![1.0, 0.4, 0.7, 1.2]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = gains.realize(&mut rng);
        let base = mi_single_realization(&h, 0.8).unwrap();
        let mut rotated = h.clone();
        let phase = Complex64::from_polar(1.0, 2.3);
        for k in 0..2 {
            rotated.set(1, k, rotated.get(1, k) * phase);
        }
        let v = mi_single_realization(&rotated, 0.8).unwrap();
        assert!((v - base).abs() < 1e-10);
    }

    #[test]
    fn paley_zygmund_hand_value() {
        let v = paley_zygmund_bound(1.0, 1.0, 1.0, 10, 0.5).unwrap();
        assert!((v - 10.0 * 1.5f64.log2() * 0.25 / 2.0).abs() < 1e-12);
        assert!((v - 0.7312).abs() < 5e-5);
    }

    #[test]
    fn paley_zygmund_vacuous_at_zero_threshold() {
        assert_eq!(paley_zygmund_bound(0.7, 1.3, 2.0, 16, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn paley_zygmund_linear_in_m() {
        let v1 = paley_zygmund_bound(0.6, 3.4, 1.0, 8, 0.1).unwrap();
        let v2 = paley_zygmund_bound(0.6, 3.4, 1.0, 16, 0.1).unwrap();
        assert!((v2 - 2.0 * v1).abs() < 1e-12);
    }

    #[test]
    fn paley_zygmund_rejects_threshold_at_a_sq() {
        assert!(paley_zygmund_bound(0.6, 3.4, 1.0, 8, 0.36).is_err());
    }

    #[test]
    fn eigen_moments_single_unit_antenna() {
        let rho = ChannelGains::from_amplitudes(1, 1, vec![1.0]);
        let m = eigen_moment_stats(&rho, 8, 0);
        assert!((m.mean_lambda - 1.0).abs() < 1e-12);
        assert!((m.mean_lambda_sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_mean_is_exact_trace_identity() {
        let amps = vec![0.9, 1.4, 0.6, 1.1, 0.8, 1.2, 1.0, 0.7, 1.3];
        let rho = ChannelGains::from_amplitudes(3, 3, amps.clone());
        let m = eigen_moment_stats(&rho, 3, 5);
        let expect: f64 = amps.iter().map(|a| a * a).sum::<f64>() / 9.0;
        assert!((m.mean_lambda - expect).abs() < 1e-12);
    }

    #[test]
    fn quantizer_rate_hand_values() {
        assert!((quantizer_rate(3.0, 1.0, 0.0).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(quantizer_rate(0.0, 2.0, 0.0).unwrap(), 0.0);
        // default setup: alpha = 2, G = P = N0 = 1, delta^2 = P2, eps = 0.1
        let params = ChannelParams::unit();
        let (_, p2) = received_power_bounds(&params);
        let q = quantizer_rate(p2, p2, 0.1).unwrap();
        assert!((q - 1.1).abs() < 1e-12);
    }

    #[test]
    fn quantized_mi_recovers_unquantized_in_the_limit() {
        let gains = ChannelGains::from_amplitudes(2, 2, vec![1.0, 0.3, 0.4, 0.8]);
        let plain = mimo_mutual_information(&gains, 1.0, 1.0, 50, 9).unwrap().mean;
        let q = QuantizerSpec {
            delta_sq: 1e-9,
            rate_q: 30.0,
        };
        let quant = quantized_mutual_information(&gains, 1.0, 1.0, &q, 50, 9).unwrap().mean;
        assert!((plain - quant).abs() < 1e-6);
    }

    #[test]
    fn quantizer_noise_halves_effective_snr() {
        let gains = ChannelGains::from_amplitudes(1, 1, vec![1.0]);
        let q = QuantizerSpec {
            delta_sq: 1.0,
            rate_q: 1.0,
        };
        let mi = quantized_mutual_information(&gains, 1.0, 1.0, &q, 4, 0).unwrap();
        assert!((mi.mean - 1.5f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn scaled_quantized_mi_reduces_to_quantized_without_interference() {
        let gains = ChannelGains::from_amplitudes(2, 2, vec![0.9, 0.5, 0.4, 1.1]);
        let q = QuantizerSpec {
            delta_sq: 2.0,
            rate_q: 1.5,
        };
        let a = quantized_mutual_information(&gains, 1.0, 1.0, &q, 30, 3).unwrap().mean;
        let b = log_m_scaled_quantized_mi(&gains, 1.0, 1.0, 0.0, &q, 12.0, 30, 3).unwrap().mean;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn scaled_quantized_mi_decreases_with_interference() {
        let gains = ChannelGains::from_amplitudes(2, 2, vec![0.9, 0.5, 0.4, 1.1]);
        let q = QuantizerSpec {
            delta_sq: 2.0,
            rate_q: 1.5,
        };
        let lo = log_m_scaled_quantized_mi(&gains, 1.0, 1.0, 2.0, &q, 12.0, 30, 3).unwrap().mean;
        let hi = log_m_scaled_quantized_mi(&gains, 1.0, 1.0, 4.0, &q, 12.0, 30, 3).unwrap().mean;
        assert!(hi < lo);
    }

    fn far_session(n: usize, m: usize, alpha: f64, seed: u64) -> (NetworkInstance, ClusterGrid, MimoSession, ChannelParams) {
        let params = ChannelParams::unit().with_alpha(alpha);
        let inst = NetworkInstance::sample(n, Regime::Dense, seed).unwrap();
        let grid = ClusterGrid::build(&inst, m).unwrap();
        // pick two cells at maximal index separation
        let src = 0;
        let dst = grid.num_cells() - 1;
        let session = MimoSession::build(&inst, &grid, &params, src, dst).unwrap();
        (inst, grid, session, params)
    }

    #[test]
    fn session_rho_values_lie_in_range() {
        let (inst, _grid, session, params) = far_session(512, 32, 2.0, 4);
        assert!(!session.neighbor_mode);
        let (a, b) = rho_range(params.alpha);
        let rho = session.normalized_rho(&inst, &params).unwrap();
        for &v in rho.amplitudes() {
            assert!(v >= a - 1e-12 && v <= b + 1e-12, "rho {v} outside [{a}, {b}]");
        }
    }

    #[test]
    fn session_eigen_moments_match_appendix_bounds() {
        let (inst, _grid, session, params) = far_session(512, 32, 2.0, 8);
        let rho = session.normalized_rho(&inst, &params).unwrap();
        let (a, b) = rho_range(params.alpha);
        let m = eigen_moment_stats(&rho, 60, 11);
        assert!(m.mean_lambda >= a * a - 1e-9);
        assert!(m.mean_lambda_sq <= 2.0 * b.powi(4) + 1e-9);
    }

    #[test]
    fn session_received_power_within_bounds_and_matches_monte_carlo() {
        let (inst, _grid, session, params) = far_session(512, 32, 2.0, 15);
        let (p1, p2) = received_power_bounds(&params);
        for d in 0..session.rx_nodes.len() {
            let exact = session.expected_rx_power(&inst, &params, d);
            assert!(exact >= p1 - 1e-9 && exact <= p2 + 1e-9, "power {exact} outside [{p1}, {p2}]");
        }
        let exact = session.expected_rx_power(&inst, &params, 0);
        let mc = session.measured_rx_power(&inst, &params, 0, 4000, 21).unwrap();
        // 3-sigma-ish agreement; |Y|^2 has variance ~ 2 E^2 / trials here.
        assert!((mc - exact).abs() < 3.0 * exact * (2.0 / 4000f64).sqrt() + 1e-9);
    }

    #[test]
    fn session_mi_above_paley_zygmund() {
        let (inst, _grid, session, params) = far_session(512, 32, 2.0, 23);
        let gains = session.gains(&inst, &params).unwrap();
        let mi = mimo_mutual_information(&gains, session.per_node_power, params.noise, 60, 5).unwrap();
        let (a, b) = rho_range(params.alpha);
        let snr = params.gain_const * params.power / params.noise;
        let t = 0.5 * a.min(a * a);
        let bound = paley_zygmund_bound(a, b, snr, session.antennas(), t).unwrap();
        assert!(mi.mean >= bound, "MI {} below PZ bound {bound}", mi.mean);
    }

    #[test]
    fn neighbor_session_uses_far_halves() {
        let params = ChannelParams::unit();
        let inst = NetworkInstance::sample(1024, Regime::Dense, 3).unwrap();
        let grid = ClusterGrid::build(&inst, 64).unwrap();
        let src = grid.cell_index(1, 1);
        let dst = grid.cell_index(2, 1);
        let session = MimoSession::build(&inst, &grid, &params, src, dst).unwrap();
        assert!(session.neighbor_mode);
        // far half of src is its low-x half; far half of dst is its high-x half
        for &i in &session.tx_nodes {
            assert!(inst.unit_position(i)[0] < (1.0 + 0.5) / grid.dim() as f64);
        }
        for &i in &session.rx_nodes {
            assert!(inst.unit_position(i)[0] >= (2.0 + 0.5) / grid.dim() as f64);
        }
    }

    #[test]
    fn same_cell_session_is_rejected() {
        let params = ChannelParams::unit();
        let inst = NetworkInstance::sample(256, Regime::Dense, 3).unwrap();
        let grid = ClusterGrid::build(&inst, 16).unwrap();
        assert!(MimoSession::build(&inst, &grid, &params, 2, 2).is_err());
    }
}
