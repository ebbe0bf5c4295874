//! Information-theoretic upper bounds.
//!
//! Dense networks: the per-source SIMO bound summed over sources, giving the
//! n log n ceiling. Extended networks: the cutset bound across the vertical
//! bisection, split into a strip term (explicit MISO sums for nodes within
//! unit distance of the cut) and a far term proportional to the total power
//! received across the cut. The far term's conditioning argument runs
//! through the column-equalized matrix: unit-norm columns, spectral-norm
//! control, and Catalan trace moments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{gain, pow_neg_alpha, ChannelParams};
use crate::cmatrix::{self, CMatrix};
use crate::error::{Error, Result};
use crate::net::{NetworkInstance, Regime};

/// Sum over sources of the SIMO capacity toward the rest of the network:
/// sum_s log2(1 + (P/N0) sum_{i != s} G r_is^(-alpha)).
pub fn dense_simo_upper_bound(instance: &NetworkInstance, params: &ChannelParams) -> Result<f64> {
    if instance.regime() != Regime::Dense {
        return Err(Error::InvalidRegime("dense"));
    }
    let n = instance.n();
    let mut total = 0.0;
    for s in 0..n {
        let mut received = 0.0;
        for i in 0..n {
            if i != s {
                received += gain(params, instance.distance(i, s))?;
            }
        }
        total += (1.0 + params.power / params.noise * received).log2();
    }
    Ok(total)
}

/// The vertical bisection of an extended network: sources S on the left,
/// destinations D on the right, with V_D the nodes in the 1 x sqrt(n) strip
/// immediately right of the cut and D_far the remainder.
#[derive(Debug, Clone)]
pub struct CutGeometry {
    pub cut_x: f64,
    pub left: Vec<usize>,
    pub strip: Vec<usize>,
    pub far: Vec<usize>,
}

impl CutGeometry {
    pub fn right_count(&self) -> usize {
        self.strip.len() + self.far.len()
    }
}

pub fn compute_cut(instance: &NetworkInstance) -> Result<CutGeometry> {
    if instance.regime() != Regime::Extended {
        return Err(Error::InvalidRegime("extended"));
    }
    let side = instance.side();
    let cut_x = side / 2.0;
    let mut left = Vec::new();
    let mut strip = Vec::new();
    let mut far = Vec::new();
    for i in 0..instance.n() {
        let x = instance.position(i)[0];
        if x < cut_x {
            left.push(i);
        } else if x <= cut_x + 1.0 {
            strip.push(i);
        } else {
            far.push(i);
        }
    }
    Ok(CutGeometry {
        cut_x,
        left,
        strip,
        far,
    })
}

/// Total received-power weight of source k across the cut:
/// d_k = sum_{i in D_far} r_ik^(-alpha).
pub fn d_weight(instance: &NetworkInstance, cut: &CutGeometry, k: usize, alpha: f64) -> f64 {
    cut.far.iter().map(|&i| pow_neg_alpha(instance.distance(i, k), alpha)).sum()
}

/// The same weight on the displaced regular lattice: left node at grid
/// offset (k_x, k_y), right nodes at (i_x, i_y) for i ranging over the
/// sqrt(n) x sqrt(n) grid, exact summation.
pub fn d_regular(k_x: usize, k_y: usize, sqrt_n: usize, alpha: f64) -> f64 {
    let mut sum = 0.0;
    for ix in 1..=sqrt_n {
        let dx = (ix + k_x - 1) as f64;
        let dx2 = dx * dx;
        for iy in 1..=sqrt_n {
            let dy = iy as f64 - k_y as f64;
            sum += pow_neg_alpha((dx2 + dy * dy).sqrt(), alpha);
        }
    }
    sum
}

/// sum over (k_x, k_y) of d_regular, the regular-lattice total that upper
/// bounds the random-network power transfer after node displacement.
pub fn d_regular_grid_sum(sqrt_n: usize, alpha: f64) -> f64 {
    let mut total = 0.0;
    for kx in 1..=sqrt_n {
        // d_regular is symmetric in k_y around the grid midline but not
        // constant; sum it exactly.
        for ky in 1..=sqrt_n {
            total += d_regular(kx, ky, sqrt_n, alpha);
        }
    }
    total
}

/// Computed sandwich for d_{k_x, k_y}: integral comparison bounds with all
/// constants evaluated numerically.
///
/// Upper: k_x^-alpha + (1+pi) k_x^(1-alpha) + angular integral over the
/// half-annulus [k_x, 3 sqrt(n)]. Lower: arctan(1/2) sector integral over
/// [sqrt(2) k_x, k_x + sqrt(n) - 1] minus the single-row boundary term. The
/// lower expression can be vacuous (negative) for large alpha at small k_x;
/// it is a valid bound either way.
pub fn dk_closed_bounds(k_x: usize, n: usize, alpha: f64) -> (f64, f64) {
    let kx = k_x as f64;
    let sqrt_n = (n as f64).sqrt();
    let r_hi = 3.0 * sqrt_n;
    let pi = std::f64::consts::PI;

    let radial_upper = if alpha == 2.0 {
        pi * (r_hi / kx).ln()
    } else {
        pi / (alpha - 2.0) * (kx.powf(2.0 - alpha) - r_hi.powf(2.0 - alpha))
    };
    let upper = kx.powf(-alpha) + (1.0 + pi) * kx.powf(1.0 - alpha) + radial_upper;

    let r_outer = kx + sqrt_n - 1.0;
    let sector = 0.5f64.atan();
    let radial_lower = if alpha == 2.0 {
        sector * (r_outer / (2f64.sqrt() * kx)).ln()
    } else {
        sector / (alpha - 2.0) * ((2f64.sqrt() * kx).powf(2.0 - alpha) - r_outer.powf(2.0 - alpha))
    };
    let boundary = (r_outer.powf(1.0 - alpha) - kx.powf(1.0 - alpha)) / (alpha - 1.0);
    let lower = radial_lower + boundary;

    (lower, upper)
}

/// Total power received by D_far under independent full-power transmissions
/// from every source in S: P G sum_k d_k.
pub fn p_tot(instance: &NetworkInstance, cut: &CutGeometry, params: &ChannelParams) -> f64 {
    let pg = params.power * params.gain_const;
    cut.left
        .iter()
        .map(|&k| pg * d_weight(instance, cut, k, params.alpha))
        .sum()
}

/// The cut channel matrix with every column scaled to unit norm:
/// H~_ik = e^(j theta) r_ik^(-alpha/2) / sqrt(d_k). Columns with zero weight
/// are dropped and recorded.
#[derive(Debug, Clone)]
pub struct EqualizedMatrix {
    /// Amplitudes |H~_ik| (row-major, rows = D_far, cols = kept sources).
    amplitudes: Vec<f64>,
    nrows: usize,
    ncols: usize,
    /// Column weights d_k for the kept sources.
    pub d: Vec<f64>,
    /// Sources in S whose column was dropped (d_k = 0).
    pub dropped: Vec<usize>,
    /// One phase realization, built at construction.
    pub realized: CMatrix,
}

impl EqualizedMatrix {
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn amplitude(&self, i: usize, k: usize) -> f64 {
        self.amplitudes[i * self.ncols + k]
    }

    /// Fresh phase draw over the same amplitudes.
    pub fn realize(&self, rng: &mut impl Rng) -> CMatrix {
        let mut m = CMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                m.set(i, k, num_complex::Complex64::from_polar(self.amplitude(i, k), theta));
            }
        }
        m
    }

    pub fn column_norm_sq(&self, k: usize) -> f64 {
        (0..self.nrows).map(|i| self.amplitude(i, k).powi(2)).sum()
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        (0..self.ncols).map(|k| self.amplitude(i, k).powi(2)).sum()
    }

    pub fn max_row_norm_sq(&self) -> f64 {
        (0..self.nrows).map(|i| self.row_norm_sq(i)).fold(0.0, f64::max)
    }
}

pub fn build_equalized_matrix(
    instance: &NetworkInstance,
    cut: &CutGeometry,
    alpha: f64,
    seed: u64,
) -> Result<EqualizedMatrix> {
    if cut.far.is_empty() {
        return Err(Error::invalid("D_far is empty; no equalized matrix"));
    }
    let nrows = cut.far.len();
    let mut kept = Vec::new();
    let mut d = Vec::new();
    let mut dropped = Vec::new();
    for &k in &cut.left {
        let dk = d_weight(instance, cut, k, alpha);
        if dk > 0.0 {
            kept.push(k);
            d.push(dk);
        } else {
            dropped.push(k);
        }
    }
    if kept.is_empty() {
        return Err(Error::invalid("all columns have zero weight"));
    }
    let ncols = kept.len();
    let mut amplitudes = Vec::with_capacity(nrows * ncols);
    for &i in &cut.far {
        for (kk, &k) in kept.iter().enumerate() {
            let r = instance.distance(i, k);
            amplitudes.push((pow_neg_alpha(r, alpha) / d[kk]).sqrt());
        }
    }
    let mut m = EqualizedMatrix {
        amplitudes,
        nrows,
        ncols,
        d,
        dropped,
        realized: CMatrix::zeros(0, 0),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    m.realized = m.realize(&mut rng);
    Ok(m)
}

/// Largest singular value squared of the realized equalized matrix, via
/// power iteration to relative tolerance 1e-8.
pub fn spectral_norm_sq(m: &EqualizedMatrix) -> Result<f64> {
    cmatrix::spectral_norm_sq(&m.realized, 1e-8, 50_000)
}

/// Monte Carlo estimate over phase draws of E Tr((H~* H~)^l), l in 1..=3.
pub fn trace_moment(m: &EqualizedMatrix, l: usize, trials: usize, seed: u64) -> Result<f64> {
    if l < 1 || l > 3 {
        return Err(Error::invalid(format!("trace moment order {l} not supported (use 1..=3)")));
    }
    // l = 1 is phase-free: the trace of H~*H~ is the sum of column norms.
    if l == 1 {
        return Ok((0..m.ncols()).map(|k| m.column_norm_sq(k)).sum());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = trials.max(1);
    let mut acc = 0.0;
    for _ in 0..trials {
        let h = m.realize(&mut rng);
        let g = h.small_gram();
        acc += match l {
            2 => g.frobenius_sq(),
            _ => {
                let g2 = g.matmul(&g);
                // Tr(G^3) = sum_ij G2_ij G_ji
                let mut t = 0.0;
                for i in 0..g.nrows() {
                    for j in 0..g.ncols() {
                        t += (g2.get(i, j) * g.get(j, i)).re;
                    }
                }
                t
            }
        };
    }
    Ok(acc / trials as f64)
}

/// Exact phase expectation of Tr((H~* H~)^2): only conjugate-paired index
/// patterns survive, leaving
/// sum_{i1,i2,k} |H_{i1 k}|^2 |H_{i2 k}|^2 + sum_{i, k1 != k2} |H_{i k1}|^2 |H_{i k2}|^2.
pub fn trace_moment_exact_l2(m: &EqualizedMatrix) -> f64 {
    let mut first = 0.0;
    for k in 0..m.ncols() {
        let col: f64 = m.column_norm_sq(k);
        first += col * col;
    }
    let mut second = 0.0;
    for i in 0..m.nrows() {
        let row: f64 = m.row_norm_sq(i);
        let row_sq: f64 = (0..m.ncols()).map(|k| m.amplitude(i, k).powi(4)).sum();
        second += row * row - row_sq;
    }
    first + second
}

/// Catalan number (2l)! / (l! (l+1)!) in exact integer arithmetic.
pub fn catalan(l: usize) -> Result<u64> {
    let mut c: u128 = 1;
    for i in 0..l {
        // c_{i+1} = c_i * 2(2i+1) / (i+2), an exact division
        c = c
            .checked_mul(2 * (2 * i as u128 + 1))
            .ok_or_else(|| Error::Overflow(format!("catalan({l})")))?
            / (i as u128 + 2);
    }
    u64::try_from(c).map_err(|_| Error::Overflow(format!("catalan({l}) exceeds u64")))
}

/// The cutset upper bound on total throughput T(n): four times the bound on
/// the left-to-right cut sum-rate, which splits into an explicit MISO sum
/// over the strip V_D plus the conditioned far-term n^eps P_tot / N0 (in
/// bits).
pub fn cutset_upper_bound(
    instance: &NetworkInstance,
    cut: &CutGeometry,
    params: &ChannelParams,
    epsilon: f64,
) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let n = instance.n() as f64;
    // Strip term: per-receiver MISO capacity upper bound with coherent
    // combining, log2(1 + (P/N0) G (sum_k r_ik^(-alpha/2))^2).
    let mut strip_term = 0.0;
    for &i in &cut.strip {
        let mut amp = 0.0;
        for &k in &cut.left {
            let r = instance.distance(i, k);
            if r < crate::channel::NEAR_FIELD_LIMIT {
                return Err(Error::NearField(r));
            }
            amp += pow_neg_alpha(r, params.alpha / 2.0);
        }
        strip_term += (1.0 + params.power / params.noise * params.gain_const * amp * amp).log2();
    }
    let far_term = if cut.far.is_empty() {
        0.0
    } else {
        n.powf(epsilon) * p_tot(instance, cut, params) / params.noise / std::f64::consts::LN_2
    };
    Ok(4.0 * (strip_term + far_term))
}

/// The extended-network scaling exponent: 2 - alpha/2 for 2 <= alpha <= 3,
/// then 1/2.
pub fn scaling_exponent_theory(alpha: f64) -> Result<f64> {
    if alpha < 2.0 {
        return Err(Error::invalid(format!("alpha {alpha} below the model range")));
    }
    Ok(if alpha <= 3.0 { 2.0 - alpha / 2.0 } else { 0.5 })
}

/// Summary record for one cut evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct CutsetReport {
    pub n: usize,
    pub alpha: f64,
    pub seed: u64,
    pub left_count: usize,
    pub strip_count: usize,
    pub far_count: usize,
    pub p_tot: f64,
    pub d_weights: Vec<f64>,
    pub spectral_norm_sq: Option<f64>,
    pub bound: f64,
    pub epsilon: f64,
    pub theory_exponent: f64,
}

/// Evaluate the full cutset pipeline on a fresh extended instance.
pub fn cutset_report(
    n: usize,
    params: &ChannelParams,
    seed: u64,
    epsilon: f64,
    with_spectral_norm: bool,
) -> Result<CutsetReport> {
    let instance = NetworkInstance::sample(n, Regime::Extended, seed)?.with_random_pairing(seed);
    let cut = compute_cut(&instance)?;
    let p = p_tot(&instance, &cut, params);
    let d_weights: Vec<f64> = cut
        .left
        .iter()
        .map(|&k| d_weight(&instance, &cut, k, params.alpha))
        .collect();
    let spectral = if with_spectral_norm && !cut.far.is_empty() && !cut.left.is_empty() {
        let m = build_equalized_matrix(&instance, &cut, params.alpha, seed ^ 0x5eed)?;
        Some(spectral_norm_sq(&m)?)
    } else {
        None
    };
    let bound = cutset_upper_bound(&instance, &cut, params, epsilon)?;
    Ok(CutsetReport {
        n,
        alpha: params.alpha,
        seed,
        left_count: cut.left.len(),
        strip_count: cut.strip.len(),
        far_count: cut.far.len(),
        p_tot: p,
        d_weights,
        spectral_norm_sq: spectral,
        bound,
        epsilon,
        theory_exponent: scaling_exponent_theory(params.alpha)?,
    })
}
