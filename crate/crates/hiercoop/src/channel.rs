//! Physical channel model: power-law path loss with i.i.d. uniform random
//! phases, plus the inter-cluster interference accounting used by the
//! 9-color TDMA schedule.
//!
//! An entry of the channel matrix between transmit node k and receive node i
//! is sqrt(G) * r_ik^(-alpha/2) * exp(j theta_ik); magnitudes are fixed by
//! the geometry and only the phases are redrawn across fading realizations.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cmatrix::CMatrix;
use crate::error::{Error, Result};
use crate::net::{ClusterGrid, NetworkInstance};

/// Distances below this are treated as a violated far-field assumption
/// rather than as huge gains.
pub const NEAR_FIELD_LIMIT: f64 = 1e-9;

/// Physical-layer constants: gain constant G, path loss exponent alpha,
/// per-node power budget P, and noise power N0 per symbol.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ChannelParams {
    pub gain_const: f64,
    pub alpha: f64,
    pub power: f64,
    pub noise: f64,
}

impl ChannelParams {
    pub fn new(gain_const: f64, alpha: f64, power: f64, noise: f64) -> Result<Self> {
        if !(alpha >= 2.0) {
            return Err(Error::invalid(format!("path loss exponent {alpha} must be >= 2")));
        }
        if !(gain_const > 0.0 && power > 0.0 && noise > 0.0) {
            return Err(Error::invalid("G, P and N0 must be positive"));
        }
        Ok(ChannelParams {
            gain_const,
            alpha,
            power,
            noise,
        })
    }

    /// G = 1, alpha = 2, P = 1 W, N0 = 1 W.
    pub fn unit() -> Self {
        ChannelParams {
            gain_const: 1.0,
            alpha: 2.0,
            power: 1.0,
            noise: 1.0,
        }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        ChannelParams { alpha, ..self }
    }
}

/// Path-loss power gain G * r^(-alpha).
pub fn gain(params: &ChannelParams, r: f64) -> Result<f64> {
    if !(r >= NEAR_FIELD_LIMIT) {
        return Err(Error::NearField(r));
    }
    Ok(params.gain_const * pow_neg_alpha(r, params.alpha))
}

/// r^(-alpha) with the common exponents special-cased; `powf` dominates the
/// O(n^2) distance sums otherwise.
#[inline]
pub fn pow_neg_alpha(r: f64, alpha: f64) -> f64 {
    let r2 = r * r;
    if alpha == 2.0 {
        1.0 / r2
    } else if alpha == 4.0 {
        1.0 / (r2 * r2)
    } else if alpha == 3.0 {
        1.0 / (r2 * r)
    } else if alpha == 2.5 {
        1.0 / (r2 * r.sqrt())
    } else if alpha == 3.5 {
        1.0 / (r2 * r * r.sqrt())
    } else {
        r.powf(-alpha)
    }
}

/// The deterministic part of a channel matrix: per-entry amplitudes
/// sqrt(G) * r^(-alpha/2) for a fixed transmit/receive geometry. Fading
/// realizations redraw only the phases.
#[derive(Debug, Clone)]
pub struct ChannelGains {
    nrows: usize,
    ncols: usize,
    amplitudes: Vec<f64>,
}

impl ChannelGains {
    /// rows = receive positions, cols = transmit positions.
    pub fn new(params: &ChannelParams, tx: &[[f64; 2]], rx: &[[f64; 2]]) -> Result<Self> {
        let mut amplitudes = Vec::with_capacity(tx.len() * rx.len());
        for r in rx {
            for t in tx {
                let dx = r[0] - t[0];
                let dy = r[1] - t[1];
                let dist = (dx * dx + dy * dy).sqrt();
                amplitudes.push(gain(params, dist)?.sqrt());
            }
        }
        Ok(ChannelGains {
            nrows: rx.len(),
            ncols: tx.len(),
            amplitudes,
        })
    }

    /// Build directly from amplitude values (row-major).
    pub fn from_amplitudes(nrows: usize, ncols: usize, amplitudes: Vec<f64>) -> Self {
        assert_eq!(amplitudes.len(), nrows * ncols);
        ChannelGains {
            nrows,
            ncols,
            amplitudes,
        }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn amplitude(&self, i: usize, k: usize) -> f64 {
        self.amplitudes[i * self.ncols + k]
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// One fading realization: amplitudes with fresh i.i.d. uniform phases.
    pub fn realize(&self, rng: &mut impl Rng) -> CMatrix {
        let mut m = CMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                m.set(i, k, Complex64::from_polar(self.amplitude(i, k), theta));
            }
        }
        m
    }

    /// Scale every amplitude by a positive factor.
    pub fn scaled(&self, factor: f64) -> Self {
        ChannelGains {
            nrows: self.nrows,
            ncols: self.ncols,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }
}

/// One realized channel matrix between explicit node position lists.
pub fn sample_channel_matrix(
    params: &ChannelParams,
    tx: &[[f64; 2]],
    rx: &[[f64; 2]],
    seed: u64,
) -> Result<CMatrix> {
    let gains = ChannelGains::new(params, tx, rx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(gains.realize(&mut rng))
}

/// Worst-case interference power received under the 9-TDMA schedule when
/// every active node transmits at `per_node_power`: the ring-grouping sum
/// sum_{i=1}^{terms} 8 i G p / (3i - 1)^alpha.
///
/// Converges for alpha > 2 and grows logarithmically at alpha = 2. The
/// grouping over-counts at network edges, so measured interference sits
/// below this value.
pub fn interference_bound(params: &ChannelParams, per_node_power: f64, terms: usize) -> f64 {
    let gp = params.gain_const * per_node_power;
    let mut sum = 0.0;
    for i in 1..=terms {
        let ring = 3.0 * i as f64 - 1.0;
        sum += 8.0 * i as f64 * gp * pow_neg_alpha(ring, params.alpha);
    }
    sum
}

/// Closed-form limit of `interference_bound` as terms -> infinity, valid for
/// alpha > 2:
///
///   8 G p / 3^alpha * ( zeta(alpha - 1, 2/3) + zeta(alpha, 2/3) / 3 )
///
/// via sum 8 i (3i-1)^(-alpha) = 8/3^alpha sum (k + 1/3 k^0)(k)^-... with
/// k = i - 1/3, evaluated with the Hurwitz zeta function.
pub fn interference_bound_limit(params: &ChannelParams, per_node_power: f64) -> Result<f64> {
    if params.alpha <= 2.0 {
        return Err(Error::invalid("interference sum diverges for alpha <= 2"));
    }
    let gp = params.gain_const * per_node_power;
    let a = params.alpha;
    let z1 = hurwitz_zeta(a - 1.0, 2.0 / 3.0)?;
    let z2 = hurwitz_zeta(a, 2.0 / 3.0)?;
    Ok(8.0 * gp / 3f64.powf(a) * (z1 + z2 / 3.0))
}

/// Hurwitz zeta via Euler-Maclaurin: direct terms plus integral tail and
/// the first two correction terms. Accurate to ~1e-12 for s >= 1.1.
fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    if s <= 1.0 || a <= 0.0 {
        return Err(Error::invalid(format!("hurwitz_zeta requires s > 1, a > 0; got s={s}, a={a}")));
    }
    let n = 64usize;
    let mut sum = 0.0;
    for k in 0..n {
        sum += (k as f64 + a).powf(-s);
    }
    let x = n as f64 + a;
    sum += x.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * x.powf(-s);
    sum += s / 12.0 * x.powf(-s - 1.0);
    sum -= s * (s + 1.0) * (s + 2.0) / 720.0 * x.powf(-s - 3.0);
    Ok(sum)
}

/// Exact mean interference power at `probe` when all nodes in other cells of
/// the same color transmit independent symbols at power P A_c^(alpha/2) / M:
/// phases cancel in expectation, leaving sum_j |H_pj|^2 p_j.
pub fn interference_power_mean(
    instance: &NetworkInstance,
    grid: &ClusterGrid,
    color: u8,
    probe: usize,
    params: &ChannelParams,
) -> Result<f64> {
    let probe_cell = grid.cell_of(instance, probe);
    if grid.color(probe_cell) != color {
        return Err(Error::invalid(format!("probe {probe} is not in a cell of color {color}")));
    }
    let p_node = params.power * grid.cell_area().powf(params.alpha / 2.0) / grid.target_m() as f64;
    let mut total = 0.0;
    for cell in 0..grid.num_cells() {
        if cell == probe_cell || grid.color(cell) != color {
            continue;
        }
        for &j in grid.members(cell) {
            total += gain(params, instance.distance(probe, j))? * p_node;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InterferenceStats {
    /// Monte Carlo estimate of E |I_v|^2 at the probe.
    pub mean_power: f64,
    /// |E I_v conj(I_v')| for a second probe in the same cell.
    pub cross_correlation: f64,
}

/// Monte Carlo interference at a probe node under the 9-TDMA schedule:
/// per trial, active nodes draw fresh phases and fresh circularly symmetric
/// Gaussian symbols. Also estimates the cross-correlation with a second
/// probe in the same cell, which should vanish.
pub fn measured_interference(
    instance: &NetworkInstance,
    grid: &ClusterGrid,
    color: u8,
    probe: usize,
    params: &ChannelParams,
    seed: u64,
    trials: usize,
) -> Result<InterferenceStats> {
    let probe_cell = grid.cell_of(instance, probe);
    if grid.color(probe_cell) != color {
        return Err(Error::invalid(format!("probe {probe} is not in a cell of color {color}")));
    }
    let second = grid.members(probe_cell).iter().copied().find(|&j| j != probe);
    let p_node = params.power * grid.cell_area().powf(params.alpha / 2.0) / grid.target_m() as f64;

    // Gather interferer amplitudes toward both probes once; only phases and
    // symbols are redrawn per trial.
    let mut amp_v = Vec::new();
    let mut amp_w = Vec::new();
    for cell in 0..grid.num_cells() {
        if cell == probe_cell || grid.color(cell) != color {
            continue;
        }
        for &j in grid.members(cell) {
            amp_v.push(gain(params, instance.distance(probe, j))?.sqrt());
            if let Some(w) = second {
                amp_w.push(gain(params, instance.distance(w, j))?.sqrt());
            }
        }
    }
    if amp_v.is_empty() {
        return Ok(InterferenceStats {
            mean_power: 0.0,
            cross_correlation: 0.0,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbol_scale = (p_node / 2.0).sqrt();
    let mut power_acc = 0.0;
    let mut cross_acc = Complex64::new(0.0, 0.0);
    for _ in 0..trials.max(1) {
        let mut iv = Complex64::new(0.0, 0.0);
        let mut iw = Complex64::new(0.0, 0.0);
        for (j, &av) in amp_v.iter().enumerate() {
            let x = Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
                * symbol_scale;
            let tv = rng.gen::<f64>() * std::f64::consts::TAU;
            iv += Complex64::from_polar(av, tv) * x;
            if second.is_some() {
                let tw = rng.gen::<f64>() * std::f64::consts::TAU;
                iw += Complex64::from_polar(amp_w[j], tw) * x;
            }
        }
        power_acc += iv.norm_sqr();
        cross_acc += iv * iw.conj();
    }
    let t = trials.max(1) as f64;
    Ok(InterferenceStats {
        mean_power: power_acc / t,
        cross_correlation: (cross_acc / t).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::Regime;

    #[test]
    fn gain_unit_case() {
        let p = ChannelParams::unit();
        assert!((gain(&p, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gain_inverse_power() {
        let p = ChannelParams::new(1.0, 4.0, 1.0, 1.0).unwrap();
        assert!((gain(&p, 2.0).unwrap() - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn gain_matches_friis_free_space() {
        // G = Gtx Grx lambda^2 / (16 pi^2) with unit antenna gains and
        // lambda = 0.1 m; |H|^2 at r = 10 m should equal 1/(4 pi r/lambda)^2.
        let lambda: f64 = 0.1;
        let g = lambda * lambda / (16.0 * std::f64::consts::PI.powi(2));
        let p = ChannelParams::new(g, 2.0, 1.0, 1.0).unwrap();
        let friis = 1.0 / (4.0 * std::f64::consts::PI * 10.0 / lambda).powi(2);
        let got = gain(&p, 10.0).unwrap();
        assert!((got - friis).abs() < 1e-18);
        assert!((got - 6.33e-7).abs() / friis < 2e-3);
    }

    #[test]
    fn gain_rejects_near_field() {
        let p = ChannelParams::unit();
        assert!(matches!(gain(&p, 0.0), Err(Error::NearField(_))));
        assert!(matches!(gain(&p, -1.0), Err(Error::NearField(_))));
        assert!(matches!(gain(&p, 1e-12), Err(Error::NearField(_))));
    }

    #[test]
    fn gain_monotonicity() {
        let p = ChannelParams::unit();
        // decreasing in r
        assert!(gain(&p, 1.5).unwrap() > gain(&p, 2.0).unwrap());
        // decreasing in alpha for r > 1, increasing for r < 1
        let p3 = p.with_alpha(3.0);
        assert!(gain(&p3, 2.0).unwrap() < gain(&p, 2.0).unwrap());
        assert!(gain(&p3, 0.5).unwrap() > gain(&p, 0.5).unwrap());
    }

    #[test]
    fn matrix_single_entry_modulus() {
        let p = ChannelParams::unit();
        let m = sample_channel_matrix(&p, &[[0.0, 0.0]], &[[1.0, 0.0]], 3).unwrap();
        assert!((m.get(0, 0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_is_deterministic_per_seed() {
        let p = ChannelParams::unit();
        let tx = [[0.0, 0.0], [0.5, 0.2]];
        let rx = [[1.0, 0.0], [0.8, 0.9], [0.1, 0.7]];
        let a = sample_channel_matrix(&p, &tx, &rx, 42).unwrap();
        let b = sample_channel_matrix(&p, &tx, &rx, 42).unwrap();
        for i in 0..3 {
            for k in 0..2 {
                assert_eq!(a.get(i, k), b.get(i, k));
            }
        }
    }

    #[test]
    fn matrix_rejects_coincident_nodes() {
        let p = ChannelParams::unit();
        let err = sample_channel_matrix(&p, &[[0.3, 0.3]], &[[0.3, 0.3]], 0);
        assert!(matches!(err, Err(Error::NearField(_))));
    }

    #[test]
    fn magnitudes_are_deterministic_across_realizations() {
        let p = ChannelParams::unit().with_alpha(3.0);
        let tx = [[0.0, 0.0], [0.4, 0.1]];
        let rx = [[1.0, 0.3], [0.9, 0.8]];
        let gains = ChannelGains::new(&p, &tx, &rx).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let deterministic: f64 = gains.amplitudes().iter().map(|a| a * a).sum();
        for _ in 0..5 {
            let m = gains.realize(&mut rng);
            let total: f64 = (0..2).flat_map(|i| (0..2).map(move |k| (i, k))).map(|(i, k)| m.get(i, k).norm_sqr()).sum();
            assert!((total - deterministic).abs() < 1e-10);
        }
    }

    #[test]
    fn interference_bound_single_term() {
        let p = ChannelParams::unit();
        assert!((interference_bound(&p, 1.0, 1) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn interference_bound_two_terms_alpha3() {
        let p = ChannelParams::unit().with_alpha(3.0);
        let expect = 1.0 + 16.0 / 125.0;
        assert!((interference_bound(&p, 1.0, 2) - expect).abs() < 1e-12);
    }

    #[test]
    fn interference_bound_is_monotone_and_cauchy_for_alpha3() {
        let p = ChannelParams::unit().with_alpha(3.0);
        let mut prev = 0.0;
        for terms in [1, 2, 4, 16, 256, 4096] {
            let v = interference_bound(&p, 1.0, terms);
            assert!(v > prev);
            prev = v;
        }
        let tail = interference_bound(&p, 1.0, 200_000) - interference_bound(&p, 1.0, 100_000);
        assert!(tail < 1e-4);
    }

    #[test]
    fn interference_limit_matches_large_truncation_to_4sf() {
        for alpha in [2.5, 3.0, 4.0] {
            let p = ChannelParams::unit().with_alpha(alpha);
            let limit = interference_bound_limit(&p, 1.0).unwrap();
            let truncated = interference_bound(&p, 1.0, 1_000_000);
            assert!(
                (limit - truncated).abs() / limit < 5e-4,
                "alpha={alpha}: limit {limit} vs truncation {truncated}"
            );
        }
        assert!(interference_bound_limit(&ChannelParams::unit(), 1.0).is_err());
    }

    #[test]
    fn interference_alpha2_grows_like_log_terms() {
        let p = ChannelParams::unit();
        let r1 = interference_bound(&p, 1.0, 10_000) / (10_000f64).ln();
        let r2 = interference_bound(&p, 1.0, 100_000) / (100_000f64).ln();
        let r3 = interference_bound(&p, 1.0, 1_000_000) / (1_000_000f64).ln();
        // value / ln(terms) settles: increments shrink toward the 8/9
        // leading coefficient (the early terms leave a decaying offset)
        assert!((r2 - r3).abs() < (r1 - r2).abs());
        assert!(r3 > 8.0 / 9.0 && r3 < 8.0 / 9.0 + 0.2, "r3 = {r3}");
    }

    #[test]
    fn measured_interference_zero_without_same_colored_cells() {
        let inst = NetworkInstance::sample(36, Regime::Dense, 1).unwrap();
        // 3x3 grid: all nine colors distinct, so no simultaneous clusters.
        let grid = ClusterGrid::build(&inst, 4).unwrap();
        assert_eq!(grid.dim(), 3);
        let probe = grid.members(0)[0];
        let stats = measured_interference(&inst, &grid, grid.color(0), probe, &ChannelParams::unit(), 0, 10).unwrap();
        assert_eq!(stats.mean_power, 0.0);
        assert_eq!(stats.cross_correlation, 0.0);
    }

    #[test]
    fn measured_interference_agrees_with_exact_mean() {
        let inst = NetworkInstance::sample(432, Regime::Dense, 11).unwrap();
        let grid = ClusterGrid::build(&inst, 12).unwrap();
        assert!(grid.dim() >= 4);
        let params = ChannelParams::unit().with_alpha(3.0);
        let cell = 0;
        let probe = grid.members(cell)[0];
        let color = grid.color(cell);
        let exact = interference_power_mean(&inst, &grid, color, probe, &params).unwrap();
        let stats = measured_interference(&inst, &grid, color, probe, &params, 5, 4000).unwrap();
        // Monte Carlo mean of |I|^2 concentrates on the phase-averaged value.
        assert!((stats.mean_power - exact).abs() < 0.15 * exact + 1e-12);
        assert!(stats.cross_correlation < 0.08 * exact.max(1e-30));
    }

    #[test]
    fn measured_interference_below_ring_bound() {
        let inst = NetworkInstance::sample(1024, Regime::Dense, 3).unwrap();
        let grid = ClusterGrid::build(&inst, 16).unwrap();
        let params = ChannelParams::unit().with_alpha(3.0);
        let bound = interference_bound(&params, params.power, 1024 / 16);
        for cell in 0..grid.num_cells() {
            for &probe in grid.members(cell).iter().take(1) {
                let v = interference_power_mean(&inst, &grid, grid.color(cell), probe, &params).unwrap();
                assert!(v <= bound, "probe {probe}: measured {v} above bound {bound}");
            }
        }
    }
}
