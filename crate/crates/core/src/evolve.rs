//! Spectral decomposition and exact quench propagation,
//! `|psi(T)> = exp(-i H_t T) exp(-i H_Th T0) |psi_0>`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hilbert::{PureState, Sector};
use crate::models::HamiltonianMatrix;
use crate::C64;

pub mod cache;

/// `2 pi` split into a double-double pair.
const TWO_PI_HI: f64 = std::f64::consts::TAU;
const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `energy * t` reduced into `[-pi, pi]`.
///
/// The product is carried as an exact double-double and reduced against a
/// double-double `2 pi`, so the result stays accurate to ~1e-15 rad even when
/// `energy * t` is of order 1e14. A naive `(energy * t) % TAU` loses every
/// digit below ~0.01 rad at that magnitude.
pub fn reduced_phase(energy: f64, t: f64) -> f64 {
    let (p, p_err) = two_prod(energy, t);
    let q = (p / TWO_PI_HI).round();
    let (a, a_err) = two_prod(q, TWO_PI_HI);
    // p and a agree to within a few units of 2 pi, so this subtraction is exact.
    let r = p - a;
    let r = r - a_err + p_err - q * TWO_PI_LO;
    if r > std::f64::consts::PI {
        r - TWO_PI_HI
    } else if r < -std::f64::consts::PI {
        r + TWO_PI_HI
    } else {
        r
    }
}

/// `exp(-i energy t)`.
#[inline]
pub fn phase_factor(energy: f64, t: f64) -> C64 {
    let theta = reduced_phase(energy, t);
    C64::new(theta.cos(), -theta.sin())
}

#[derive(Clone, Debug)]
pub struct SectorEigen {
    pub sector: Sector,
    /// Ascending.
    pub energies: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `energies`.
    pub vectors: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub n_sites: usize,
    pub blocks: Vec<SectorEigen>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    pub fn has_sector(&self, n_up: usize) -> bool {
        self.blocks.iter().any(|b| b.sector.n_up == n_up)
    }

    /// All eigenvalues, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.blocks.iter().flat_map(|b| b.energies.iter().copied()).collect();
        all.sort_by(f64::total_cmp);
        all
    }
}

fn eigen_block(block: &crate::models::SectorBlock) -> Result<SectorEigen> {
    let dim = block.sector.dim();
    let eig = SymmetricEigen::try_new(block.matrix.clone(), f64::EPSILON, 1000 * dim.max(10))
        .ok_or(Error::EigenNonConvergence { n_up: block.sector.n_up, dim })?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SectorEigen { sector: block.sector.clone(), energies, vectors })
}

/// Diagonalizes every sector block.
pub fn diagonalize(h: &HamiltonianMatrix) -> Result<EigenSystem> {
    diagonalize_where(h, |_| true)
}

/// Diagonalizes only the sectors selected by `keep`. States with weight
/// outside those sectors are rejected by [`propagate`].
pub fn diagonalize_where(h: &HamiltonianMatrix, keep: impl Fn(&Sector) -> bool) -> Result<EigenSystem> {
    let selected: Vec<_> = h.blocks.iter().filter(|b| keep(&b.sector)).collect();
    // Largest blocks first.
    let mut order: Vec<usize> = (0..selected.len()).collect();
    order.sort_by_key(|&k| std::cmp::Reverse(selected[k].sector.dim()));
    let solved = crate::Exec::default().map(order.len(), |i| eigen_block(selected[order[i]]));
    let mut blocks = solved.into_iter().collect::<Result<Vec<_>>>()?;
    blocks.sort_by_key(|b| b.sector.n_up);
    Ok(EigenSystem { n_sites: h.n_sites, blocks })
}

/// A state expanded in an eigenbasis, ready to be evolved to many times.
#[derive(Clone, Debug)]
pub struct SpectralState<'a> {
    eig: &'a EigenSystem,
    /// Per block: eigenbasis coefficients.
    coeffs: Vec<Vec<C64>>,
}

impl<'a> SpectralState<'a> {
    pub fn new(state: &PureState, eig: &'a EigenSystem) -> Result<Self> {
        if state.dim() != eig.dim() {
            return Err(Error::DimensionMismatch { state: state.dim(), operator: eig.dim() });
        }
        for (n_up, w) in state.sector_weights().into_iter().enumerate() {
            if w > 0.0 && !eig.has_sector(n_up) {
                return Err(Error::MissingSector(n_up));
            }
        }
        let amps = state.amplitudes();
        let coeffs = eig
            .blocks
            .iter()
            .map(|b| {
                let idx = &b.sector.basis_indices;
                let re = DVector::from_iterator(idx.len(), idx.iter().map(|&x| amps[x].re));
                let im = DVector::from_iterator(idx.len(), idx.iter().map(|&x| amps[x].im));
                let cre = b.vectors.tr_mul(&re);
                let cim = b.vectors.tr_mul(&im);
                cre.iter().zip(cim.iter()).map(|(&r, &i)| C64::new(r, i)).collect()
            })
            .collect();
        Ok(Self { eig, coeffs })
    }

    pub fn at(&self, t: f64) -> PureState {
        let mut out = vec![C64::new(0.0, 0.0); self.eig.dim()];
        for (b, c) in self.eig.blocks.iter().zip(&self.coeffs) {
            let n = c.len();
            let (mut re, mut im) = (DVector::zeros(n), DVector::zeros(n));
            for k in 0..n {
                let z = c[k] * phase_factor(b.energies[k], t);
                re[k] = z.re;
                im[k] = z.im;
            }
            let vre = &b.vectors * re;
            let vim = &b.vectors * im;
            for (k, &x) in b.sector.basis_indices.iter().enumerate() {
                out[x] = C64::new(vre[k], vim[k]);
            }
        }
        PureState::from_amplitudes(self.eig.n_sites, out).expect("dimension checked on construction")
    }
}

/// `exp(-i H t) |state>` via the eigenbasis.
pub fn propagate(state: &PureState, eig: &EigenSystem, t: f64) -> Result<PureState> {
    Ok(SpectralState::new(state, eig)?.at(t))
}

/// `exp(-i H t) |state>` for `H` diagonal in the z basis with `energies`.
pub fn propagate_diagonal(state: &PureState, energies: &[f64], t: f64) -> Result<PureState> {
    if energies.len() != state.dim() {
        return Err(Error::DimensionMismatch { state: state.dim(), operator: energies.len() });
    }
    let out = state
        .amplitudes()
        .iter()
        .zip(energies)
        .map(|(&a, &e)| a * phase_factor(e, t))
        .collect();
    PureState::from_amplitudes(state.n_sites(), out)
}

/// Either an eigendecomposed Hamiltonian or a z-diagonal one.
#[derive(Clone, Debug)]
pub enum Propagator {
    Spectral(EigenSystem),
    Diagonal(Vec<f64>),
}

impl Propagator {
    pub fn evolve(&self, state: &PureState, t: f64) -> Result<PureState> {
        match self {
            Propagator::Spectral(eig) => propagate(state, eig, t),
            Propagator::Diagonal(e) => propagate_diagonal(state, e, t),
        }
    }

    /// Evolves one state to every time in `times`.
    pub fn evolve_many(&self, state: &PureState, times: &[f64]) -> Result<Vec<PureState>> {
        match self {
            Propagator::Spectral(eig) => {
                let s = SpectralState::new(state, eig)?;
                Ok(times.iter().map(|&t| s.at(t)).collect())
            }
            Propagator::Diagonal(e) => times.iter().map(|&t| propagate_diagonal(state, e, t)).collect(),
        }
    }
}

/// `|psi_ini> = exp(-i H_Th T0) |psi_0>`.
pub fn prepare_structured(psi0: &PureState, prep: &Propagator, t0: f64) -> Result<PureState> {
    if !(t0 >= 0.0) || !t0.is_finite() {
        return Err(Error::InvalidInput(format!("preparation time must be finite and >= 0, got {t0}")));
    }
    if t0 == 0.0 {
        return Ok(psi0.clone());
    }
    prep.evolve(psi0, t0)
}

/// Two-stage quench: preparation for `t0`, then target evolution over `times`.
#[derive(Clone, Debug)]
pub struct QuenchPlan {
    pub prep: Propagator,
    pub target: Propagator,
    pub t0: f64,
    pub times: Vec<f64>,
}

impl QuenchPlan {
    pub fn validate(&self) -> Result<()> {
        if self.times.is_empty() {
            return Err(Error::InvalidInput("time grid is empty".into()));
        }
        if self.times.iter().any(|t| !t.is_finite() || *t < 0.0) || !self.times.windows(2).all(|w| w[0] <= w[1]) {
            return Err(Error::InvalidInput("time grid must be ascending, finite and >= 0".into()));
        }
        Ok(())
    }

    pub fn run(&self, psi0: &PureState) -> Result<(PureState, Vec<PureState>)> {
        self.validate()?;
        let ini = prepare_structured(psi0, &self.prep, self.t0)?;
        let states = self.target.evolve_many(&ini, &self.times)?;
        Ok((ini, states))
    }
}

/// `{0} ∪ logspace(lo, hi, n)`.
pub fn log_time_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut grid = vec![0.0];
    let (a, b) = (lo.log10(), hi.log10());
    grid.extend((0..n).map(|k| {
        if n == 1 {
            lo
        } else {
            10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64)
        }
    }));
    grid
}

/// 48 log-spaced points from 0.1 to 1e4, plus t = 0.
pub fn default_time_grid() -> Vec<f64> {
    log_time_grid(0.1, 1e4, 48)
}
