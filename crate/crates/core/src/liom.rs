//! Diagnostics and saturation predictions built on `S^z_j` as local integrals
//! of motion: averaged magnetization and nearest-neighbour correlation, the
//! nearest-neighbour generalized Gibbs ensemble, and its Scrooge (pure-state)
//! realization.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::{purity_sum_naive, wre_from_purity_sum, LN_6PI};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hilbert::{haar_random, spin_z, PureState, SubsetMask};
use crate::rng::SeededRng;
use crate::C64;

/// Phases `alpha_j, beta_j in {0, pi}` frozen from the bare product state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignConvention {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

fn phase_of(v: f64) -> f64 {
    if v < 0.0 {
        std::f64::consts::PI
    } else {
        0.0
    }
}

fn sign_of_phase(phase: f64) -> f64 {
    if phase == 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Connected nearest-neighbour correlators `<Sz_j Sz_j+1> - <Sz_j><Sz_j+1>`.
pub fn nn_connected(state: &PureState) -> Vec<f64> {
    let m = state.magnetizations();
    state.nn_zz().iter().enumerate().map(|(j, zz)| zz - m[j] * m[j + 1]).collect()
}

impl SignConvention {
    /// `alpha_j` makes the rotated bare magnetization positive. `beta_j`
    /// makes the rotated bare connected correlator positive; when that
    /// correlator vanishes (always the case for z-product states) the sign
    /// of the bare `<Sz_j Sz_j+1>` is used instead, i.e.
    /// `beta_j = alpha_j + alpha_{j+1}`. Zeros map to phase 0.
    pub fn from_reference(psi0: &PureState) -> Self {
        let m = psi0.magnetizations();
        let zz = psi0.nn_zz();
        let alpha = m.iter().map(|&v| phase_of(v)).collect();
        let beta = zz
            .iter()
            .enumerate()
            .map(|(j, &raw)| {
                let connected = raw - m[j] * m[j + 1];
                if connected.abs() > 1e-14 {
                    phase_of(connected)
                } else {
                    phase_of(raw)
                }
            })
            .collect();
        Self { alpha, beta }
    }
}

/// `(1/L) sum_j e^{i alpha_j} <Sz_j>`.
pub fn m_av(state: &PureState, conv: &SignConvention) -> Result<f64> {
    let m = state.magnetizations();
    if conv.alpha.len() != m.len() {
        return Err(Error::LengthMismatch { expected: m.len(), got: conv.alpha.len() });
    }
    Ok(m.iter().zip(&conv.alpha).map(|(v, &a)| sign_of_phase(a) * v).sum::<f64>() / m.len() as f64)
}

/// `(1/(L-1)) sum_j e^{i beta_j} (<Sz_j Sz_j+1> - <Sz_j><Sz_j+1>)`.
pub fn g_av(state: &PureState, conv: &SignConvention) -> Result<f64> {
    let c = nn_connected(state);
    if conv.beta.len() != c.len() {
        return Err(Error::LengthMismatch { expected: c.len(), got: conv.beta.len() });
    }
    Ok(c.iter().zip(&conv.beta).map(|(v, &b)| sign_of_phase(b) * v).sum::<f64>() / c.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GgeParams {
    pub lambda: Vec<f64>,
    /// Nearest-neighbour couplings `xi_{j,j+1}`.
    pub xi: Vec<f64>,
    pub residual_inf_norm: f64,
    pub iterations: usize,
    /// Objective `ln Z - theta . targets` after every accepted step.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objective_trace: Vec<f64>,
}

impl GgeParams {
    pub fn n_sites(&self) -> usize {
        self.lambda.len()
    }

    fn theta(&self) -> Vec<f64> {
        self.lambda.iter().chain(&self.xi).copied().collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FitOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Box bound on every parameter.
    pub clamp: f64,
    /// Magnetizations with `|m| > 1/2 - pin_margin` are pinned to `lambda = ±clamp`.
    pub pin_margin: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_iterations: 200, clamp: 40.0, pin_margin: 1e-9 }
    }
}

/// Fit targets plus the audit record written next to fitted parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GgeFitRecord {
    pub targets_m: Vec<f64>,
    pub targets_c: Vec<f64>,
    pub params: GgeParams,
}

/// Sufficient statistics `(s_1..s_L, s_1 s_2, .., s_{L-1} s_L)` of every
/// basis state, row-major.
fn statistics(n_sites: usize) -> Vec<f64> {
    let p = 2 * n_sites - 1;
    let mut t = Vec::with_capacity(p << n_sites);
    for x in 0..1usize << n_sites {
        t.extend((0..n_sites).map(|j| spin_z(x, j)));
        t.extend((0..n_sites - 1).map(|j| spin_z(x, j) * spin_z(x, j + 1)));
    }
    t
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + v.iter().map(|e| (e - max).exp()).sum::<f64>().ln()
}

struct Family {
    n_params: usize,
    stats: Vec<f64>,
}

struct Moments {
    log_z: f64,
    probs: Vec<f64>,
    mean: Vec<f64>,
}

impl Family {
    fn new(n_sites: usize) -> Self {
        Self { n_params: 2 * n_sites - 1, stats: statistics(n_sites) }
    }

    fn row(&self, x: usize) -> &[f64] {
        &self.stats[x * self.n_params..(x + 1) * self.n_params]
    }

    fn moments(&self, theta: &[f64]) -> Moments {
        let n = self.stats.len() / self.n_params;
        let energies: Vec<f64> =
            (0..n).map(|x| self.row(x).iter().zip(theta).map(|(s, t)| s * t).sum()).collect();
        let log_z = log_sum_exp(&energies);
        let probs: Vec<f64> = energies.iter().map(|e| (e - log_z).exp()).collect();
        let mut mean = vec![0.0; self.n_params];
        for (x, &p) in probs.iter().enumerate() {
            for (m, s) in mean.iter_mut().zip(self.row(x)) {
                *m += p * s;
            }
        }
        Moments { log_z, probs, mean }
    }

    fn covariance(&self, mom: &Moments, free: &[usize]) -> DMatrix<f64> {
        let k = free.len();
        let mut cov = DMatrix::zeros(k, k);
        for (x, &p) in mom.probs.iter().enumerate() {
            let row = self.row(x);
            for a in 0..k {
                let da = row[free[a]] - mom.mean[free[a]];
                for b in a..k {
                    cov[(a, b)] += p * da * (row[free[b]] - mom.mean[free[b]]);
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                cov[(a, b)] = cov[(b, a)];
            }
        }
        cov
    }
}

fn objective(mom: &Moments, theta: &[f64], targets: &[f64]) -> f64 {
    mom.log_z - theta.iter().zip(targets).map(|(t, g)| t * g).sum::<f64>()
}

/// Newton solve of `C delta = -g` with a growing ridge if `C` is singular.
fn newton_direction(cov: DMatrix<f64>, grad: &DVector<f64>) -> DVector<f64> {
    let scale = cov.diagonal().max().max(1e-300);
    let mut ridge = 0.0;
    loop {
        let mut m = cov.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += ridge;
        }
        if let Some(ch) = m.cholesky() {
            return -ch.solve(grad);
        }
        ridge = if ridge == 0.0 { 1e-14 * scale } else { ridge * 10.0 };
    }
}

/// Maximum-entropy fit of `rho ∝ exp(sum lambda_j s_j + sum xi_j s_j s_{j+1})`
/// to target magnetizations and connected nearest-neighbour correlations.
pub fn fit_gge(targets_m: &[f64], targets_c: &[f64]) -> Result<GgeParams> {
    fit_gge_with(targets_m, targets_c, &FitOptions::default())
}

pub fn fit_gge_with(targets_m: &[f64], targets_c: &[f64], opts: &FitOptions) -> Result<GgeParams> {
    let l = targets_m.len();
    if l == 0 || l > crate::hilbert::MAX_SITES {
        return Err(Error::InvalidInput(format!("cannot fit a GGE on {l} sites")));
    }
    if targets_c.len() != l - 1 {
        return Err(Error::LengthMismatch { expected: l - 1, got: targets_c.len() });
    }
    if targets_m.iter().any(|m| !(m.abs() <= 0.5)) {
        return Err(Error::InvalidInput("magnetization targets must lie in [-1/2, 1/2]".into()));
    }
    if targets_c.iter().any(|c| !(c.abs() <= 0.25)) {
        return Err(Error::InvalidInput("correlation targets must lie in [-1/4, 1/4]".into()));
    }

    // Raw second moments once the magnetizations are matched.
    let targets: Vec<f64> = targets_m
        .iter()
        .copied()
        .chain((0..l - 1).map(|j| targets_c[j] + targets_m[j] * targets_m[j + 1]))
        .collect();

    let family = Family::new(l);
    let n_params = family.n_params;
    let mut theta = vec![0.0; n_params];
    let mut pinned = vec![false; n_params];
    for (j, &m) in targets_m.iter().enumerate() {
        if m.abs() > 0.5 - opts.pin_margin {
            theta[j] = opts.clamp * m.signum();
            pinned[j] = true;
            if j > 0 {
                pinned[l + j - 1] = true;
            }
            if j + 1 < l {
                pinned[l + j] = true;
            }
        }
    }
    let free: Vec<usize> = (0..n_params).filter(|&k| !pinned[k]).collect();

    let residual = |mom: &Moments| {
        free.iter().map(|&k| (mom.mean[k] - targets[k]).abs()).fold(0.0, f64::max)
    };

    let mut mom = family.moments(&theta);
    let mut f = objective(&mom, &theta, &targets);
    let mut trace = vec![f];
    let mut iterations = 0;
    let mut res = residual(&mom);

    while res > opts.tolerance {
        if iterations >= opts.max_iterations {
            return Err(Error::FitNonConvergence { iterations, residual: res });
        }
        iterations += 1;
        let grad = DVector::from_iterator(free.len(), free.iter().map(|&k| mom.mean[k] - targets[k]));
        let step = newton_direction(family.covariance(&mom, &free), &grad);
        let slope = grad.dot(&step);

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial = theta.clone();
            for (i, &k) in free.iter().enumerate() {
                trial[k] = (theta[k] + alpha * step[i]).clamp(-opts.clamp, opts.clamp);
            }
            let m2 = family.moments(&trial);
            let f2 = objective(&m2, &trial, &targets);
            // Near the optimum the decrease drops below the resolution of f;
            // then a step that stays level and shrinks the residual is taken.
            let level = f2 <= f + 4.0 * f64::EPSILON * f.abs().max(1.0);
            if f2 <= f + 1e-4 * alpha * slope || (level && residual(&m2) < res) {
                accepted = Some((trial, m2, f2));
                break;
            }
            alpha *= 0.5;
        }
        let Some((t2, m2, f2)) = accepted else {
            return Err(Error::FitNonConvergence { iterations, residual: res });
        };
        theta = t2;
        mom = m2;
        f = f2;
        trace.push(f);
        res = residual(&mom);
    }

    Ok(GgeParams {
        lambda: theta[..l].to_vec(),
        xi: theta[l..].to_vec(),
        residual_inf_norm: res,
        iterations,
        objective_trace: trace,
    })
}

/// Probabilities of a z-diagonal density matrix over the `2^L` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalEnsemble {
    n_sites: usize,
    probabilities: Vec<f64>,
}

impl DiagonalEnsemble {
    pub fn new(n_sites: usize, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != 1 << n_sites {
            return Err(Error::LengthMismatch { expected: 1 << n_sites, got: probabilities.len() });
        }
        if probabilities.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidInput("probabilities must be non-negative".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("probabilities sum to {total}")));
        }
        Ok(Self { n_sites, probabilities })
    }

    pub fn uniform(n_sites: usize) -> Self {
        let d = 1usize << n_sites;
        Self { n_sites, probabilities: vec![1.0 / d as f64; d] }
    }

    pub fn point_mass(n_sites: usize, index: usize) -> Result<Self> {
        let mut p = vec![0.0; 1 << n_sites];
        *p.get_mut(index).ok_or_else(|| Error::InvalidInput(format!("index {index} out of range")))? = 1.0;
        Ok(Self { n_sites, probabilities: p })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn magnetizations(&self) -> Vec<f64> {
        (0..self.n_sites)
            .map(|j| self.probabilities.iter().enumerate().map(|(x, p)| p * spin_z(x, j)).sum())
            .collect()
    }

    pub fn nn_connected(&self) -> Vec<f64> {
        let m = self.magnetizations();
        (0..self.n_sites - 1)
            .map(|j| {
                let zz: f64 = self
                    .probabilities
                    .iter()
                    .enumerate()
                    .map(|(x, p)| p * spin_z(x, j) * spin_z(x, j + 1))
                    .sum();
                zz - m[j] * m[j + 1]
            })
            .collect()
    }

    /// `tr[rho_A^2]` of the marginal on `mask` (diagonal, so a sum of squared
    /// marginal probabilities).
    pub fn marginal_purity(&self, mask: SubsetMask) -> f64 {
        let keep = mask.deposit_table();
        let trace_out = mask.complement(self.n_sites).deposit_table();
        keep.iter()
            .map(|&a| {
                let pa: f64 = trace_out.iter().map(|&b| self.probabilities[a | b]).sum();
                pa * pa
            })
            .sum()
    }

    /// Larger of the purities of `mask` and its complement.
    pub fn max_purity(&self, mask: SubsetMask) -> f64 {
        self.marginal_purity(mask).max(self.marginal_purity(mask.complement(self.n_sites)))
    }
}

/// `p_x ∝ exp(sum lambda_j s_j + sum xi_j s_j s_{j+1})`, normalized by log-sum-exp.
pub fn gge_probabilities(params: &GgeParams) -> DiagonalEnsemble {
    let l = params.n_sites();
    let family = Family::new(l);
    let probs = family.moments(&params.theta()).probs;
    DiagonalEnsemble { n_sites: l, probabilities: probs }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GgePrediction {
    pub s_hc: f64,
    pub s_w: f64,
}

/// Saturation entropies with `e^{-S_A} = max(tr rho_A^2, tr rho_B^2)` per
/// subset; the WRE prediction sums that over all `2^L` subsets.
pub fn gge_saturation_entropies(ens: &DiagonalEnsemble) -> GgePrediction {
    gge_saturation_entropies_with(ens, Exec::default())
}

pub fn gge_saturation_entropies_with(ens: &DiagonalEnsemble, exec: Exec) -> GgePrediction {
    let l = ens.n_sites;
    let half = 1usize << (l - 1);
    let sum = 2.0 * exec.sum(half, |m| ens.max_purity(SubsetMask((m << 1) as u32)));
    let hc = if l >= 2 { 0.0 - ens.max_purity(SubsetMask::half_chain(l)).ln() } else { 0.0 };
    GgePrediction { s_hc: hc, s_w: l as f64 * LN_6PI - sum.ln() }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScroogeEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

const BOOTSTRAP_RESAMPLES: usize = 200;

/// Importance-weighted mean and bootstrap standard error of `values` under
/// `weights`.
pub fn weighted_mean_with_bootstrap(values: &[f64], weights: &[f64], rng: &mut SeededRng) -> Result<(f64, f64)> {
    let mean_of = |idx: &mut dyn Iterator<Item = usize>| {
        let (mut num, mut den) = (0.0, 0.0);
        for i in idx {
            num += weights[i] * values[i];
            den += weights[i];
        }
        (num, den)
    };
    let (num, den) = mean_of(&mut (0..values.len()));
    if !(den > 0.0) {
        return Err(Error::ZeroWeights);
    }
    let mean = num / den;
    let n = values.len();
    let boots: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .filter_map(|_| {
            let picks: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let (nu, de) = mean_of(&mut picks.into_iter());
            (de > 0.0).then(|| nu / de)
        })
        .collect();
    let bm = boots.iter().sum::<f64>() / boots.len() as f64;
    let var = boots.iter().map(|b| (b - bm).powi(2)).sum::<f64>() / (boots.len() as f64 - 1.0);
    Ok((mean, var.sqrt()))
}

/// One Scrooge draw: `|psi_phi> = sqrt(rho)|phi> / sqrt(p_rho(phi))` with
/// `|phi>` Haar, together with its weight `p_rho(phi) = <phi|rho|phi>`.
pub fn scrooge_state(ens: &DiagonalEnsemble, rng: &mut SeededRng) -> Result<(PureState, f64)> {
    let phi = haar_random(rng, ens.n_sites)?;
    let amps: Vec<C64> = phi
        .amplitudes()
        .iter()
        .zip(&ens.probabilities)
        .map(|(a, p)| a * p.sqrt())
        .collect();
    let weight: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    Ok((PureState::normalized(ens.n_sites, amps)?, weight))
}

/// `p_rho`-weighted mean WRE over `n_samples` Scrooge draws.
pub fn scrooge_wre(ens: &DiagonalEnsemble, rng: &mut SeededRng, n_samples: usize) -> Result<ScroogeEstimate> {
    scrooge_wre_with(ens, rng, n_samples, Exec::default())
}

pub fn scrooge_wre_with(
    ens: &DiagonalEnsemble,
    rng: &mut SeededRng,
    n_samples: usize,
    exec: Exec,
) -> Result<ScroogeEstimate> {
    if n_samples < 2 {
        return Err(Error::InvalidInput("Scrooge estimate needs at least 2 samples".into()));
    }
    let streams: Vec<SeededRng> = (0..n_samples).map(|_| rng.fork()).collect();
    let draws = exec.map(n_samples, |i| -> Result<(f64, f64)> {
        let mut r = streams[i].clone();
        let (psi, w) = scrooge_state(ens, &mut r)?;
        let s = wre_from_purity_sum(purity_sum_naive(&psi, Exec::Sequential), ens.n_sites);
        Ok((s, w))
    });
    let (values, weights): (Vec<f64>, Vec<f64>) = draws.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    let mut boot_rng = rng.fork();
    let (mean, std_error) = weighted_mean_with_bootstrap(&values, &weights, &mut boot_rng)?;
    Ok(ScroogeEstimate { mean, std_error, n_samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{make_xy_alternating, make_z_product, Spin};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn bare_state_conventions() {
        let psi0 = make_z_product(&[Spin::Up, Spin::Down, Spin::Down, Spin::Up]).unwrap();
        let conv = SignConvention::from_reference(&psi0);
        assert_eq!(m_av(&psi0, &conv).unwrap(), 0.5);
        assert_eq!(g_av(&psi0, &conv).unwrap(), 0.0);
    }

    #[test]
    fn xy_state_magnetization_vanishes() {
        let psi = make_xy_alternating(6).unwrap();
        let conv = SignConvention::from_reference(&psi);
        assert_eq!(m_av(&psi, &conv).unwrap(), 0.0);
        assert!(conv.alpha.iter().all(|&a| a == 0.0));
    }

    #[test]
    fn bell_pair_correlation_rotated_positive() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for amps in [vec![c(s), c(0.0), c(0.0), c(s)], vec![c(0.0), c(s), c(s), c(0.0)]] {
            let b = PureState::from_amplitudes(2, amps).unwrap();
            let conv = SignConvention::from_reference(&b);
            assert!((g_av(&b, &conv).unwrap() - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_targets_give_infinite_temperature() {
        let p = fit_gge(&[0.0; 4], &[0.0; 3]).unwrap();
        assert!(p.lambda.iter().chain(&p.xi).all(|v| v.abs() < 1e-12));
        let ens = gge_probabilities(&p);
        assert!(ens.probabilities().iter().all(|&q| (q - 1.0 / 16.0).abs() < 1e-15));
    }

    #[test]
    fn single_site_closed_form() {
        // <Sz> = tanh(lambda/2)/2 inverted by bisection.
        let target = 0.231059;
        let (mut lo, mut hi) = (0.0f64, 10.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 0.5 * (0.5 * mid).tanh() < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p = fit_gge(&[target], &[]).unwrap();
        assert!((p.lambda[0] - lo).abs() < 1e-8);
        assert!((p.lambda[0] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn saturated_magnetization_is_pinned() {
        let p = fit_gge(&[0.5, -0.5, 0.1], &[0.0, 0.0]).unwrap();
        assert_eq!(p.lambda[0], 40.0);
        assert_eq!(p.lambda[1], -40.0);
        let m = gge_probabilities(&p).magnetizations();
        assert!((m[0] - 0.5).abs() < 1e-8 && (m[1] + 0.5).abs() < 1e-8);
        assert!((m[2] - 0.1).abs() < 1e-10);
    }

    #[test]
    fn bad_targets_rejected() {
        assert!(fit_gge(&[0.6, 0.0], &[0.0]).is_err());
        assert!(fit_gge(&[0.0, 0.0], &[]).is_err());
    }

    #[test]
    fn objective_decreases_monotonically() {
        let p = fit_gge(&[0.3, -0.2, 0.1, 0.25, -0.4], &[0.02, -0.05, 0.01, -0.01]).unwrap();
        assert!(p.objective_trace.windows(2).all(|w| w[1] <= w[0] + 1e-14), "{:?}", p.objective_trace);
        assert!(p.residual_inf_norm <= 1e-8);
    }

    #[test]
    fn saturation_of_single_lambda() {
        let p = GgeParams {
            lambda: vec![40.0, 0.0, 0.0],
            xi: vec![0.0, 0.0],
            residual_inf_norm: 0.0,
            iterations: 0,
            objective_trace: vec![],
        };
        let m = gge_probabilities(&p).magnetizations();
        assert!((m[0] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn uniform_two_site_prediction() {
        let ens = DiagonalEnsemble::uniform(2);
        assert!((ens.marginal_purity(SubsetMask(1)) - 0.5).abs() < 1e-15);
        assert!((ens.max_purity(SubsetMask(1)) - 0.5).abs() < 1e-15);
        let pred = gge_saturation_entropies(&ens);
        assert!((pred.s_hc - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn point_mass_prediction() {
        let ens = DiagonalEnsemble::point_mass(6, 0b101100).unwrap();
        let pred = gge_saturation_entropies(&ens);
        assert!((pred.s_w - 6.0 * (3.0 * std::f64::consts::PI).ln()).abs() < 1e-12);
        assert_eq!(pred.s_hc, 0.0);
    }

    #[test]
    fn max_rule_is_complement_symmetric() {
        let p = fit_gge(&[0.3, -0.2, 0.1, 0.25, -0.4], &[0.02, -0.05, 0.01, -0.01]).unwrap();
        let ens = gge_probabilities(&p);
        for m in 0..32u32 {
            let a = SubsetMask(m);
            assert_eq!(ens.max_purity(a), ens.max_purity(a.complement(5)));
        }
    }

    #[test]
    fn scrooge_point_mass_is_deterministic() {
        let ens = DiagonalEnsemble::point_mass(4, 6).unwrap();
        let est = scrooge_wre(&ens, &mut SeededRng::new(1, 1), 20).unwrap();
        assert!((est.mean - 4.0 * (3.0 * std::f64::consts::PI).ln()).abs() < 1e-12);
        assert!(est.std_error < 1e-12);
        assert!(scrooge_wre(&ens, &mut SeededRng::new(1, 1), 1).is_err());
    }

    #[test]
    fn zero_weights_reported() {
        let mut rng = SeededRng::new(0, 0);
        assert!(matches!(weighted_mean_with_bootstrap(&[1.0, 2.0], &[0.0, 0.0], &mut rng), Err(Error::ZeroWeights)));
    }

    #[test]
    fn ensemble_validation() {
        assert!(DiagonalEnsemble::new(2, vec![0.5, 0.5, 0.0, 0.0]).is_ok());
        assert!(DiagonalEnsemble::new(2, vec![0.5, 0.6, 0.0, 0.0]).is_err());
        assert!(DiagonalEnsemble::new(2, vec![1.5, -0.5, 0.0, 0.0]).is_err());
    }
}
