//! Random-field XXZ chain and the diagonal LIOM phenomenological model.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hilbert::{sector_decompose, spin_z, PureState, Sector};
use crate::rng::SeededRng;

pub const DEFAULT_JZ: f64 = 0.5;

/// `H = sum_i (Sx Sx + Sy Sy + Jz Sz Sz)_{i,i+1} + sum_i h_i Sz_i`, open chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XxzSpec {
    pub n_sites: usize,
    pub jz: f64,
    pub w: f64,
    pub fields: Vec<f64>,
}

impl XxzSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidInput("XXZ chain needs at least two sites".into()));
        }
        if self.fields.len() != self.n_sites {
            return Err(Error::LengthMismatch { expected: self.n_sites, got: self.fields.len() });
        }
        if !(self.w >= 0.0) || self.fields.iter().any(|h| h.abs() > self.w) {
            return Err(Error::InvalidInput(format!("fields must lie in [-{0}, {0}]", self.w)));
        }
        Ok(())
    }

    /// Diagonal energy of basis state `x`.
    pub fn diagonal_energy(&self, x: usize) -> f64 {
        let bonds: f64 = (0..self.n_sites - 1).map(|i| spin_z(x, i) * spin_z(x, i + 1)).sum();
        let field: f64 = self.fields.iter().enumerate().map(|(i, h)| h * spin_z(x, i)).sum();
        self.jz * bonds + field
    }
}

/// `H_eff = sum_i g_i Sz_i + sum_{i<j} J_ij Sz_i Sz_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhenoSpec {
    pub n_sites: usize,
    pub j0: f64,
    pub xi: f64,
    pub g0: f64,
    /// Symmetric `L x L` coupling table, zero diagonal.
    pub couplings: Vec<Vec<f64>>,
    pub fields: Vec<f64>,
}

impl PhenoSpec {
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[i][j]
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.n_sites;
        if self.couplings.len() != l || self.couplings.iter().any(|r| r.len() != l) {
            return Err(Error::InvalidInput("coupling table must be L x L".into()));
        }
        if self.fields.len() != l {
            return Err(Error::LengthMismatch { expected: l, got: self.fields.len() });
        }
        for i in 0..l {
            for j in i + 1..l {
                let envelope = self.j0 * (-((j - i) as f64) / self.xi).exp();
                if self.couplings[i][j] != self.couplings[j][i] || self.couplings[i][j].abs() > envelope {
                    return Err(Error::InvalidInput(format!("coupling ({i},{j}) violates the envelope")));
                }
            }
        }
        if self.fields.iter().any(|g| g.abs() > self.g0) {
            return Err(Error::InvalidInput(format!("fields must lie in [-{0}, {0}]", self.g0)));
        }
        Ok(())
    }
}

/// One Hermitian block per magnetization sector.
#[derive(Clone, Debug)]
pub struct SectorBlock {
    pub sector: Sector,
    pub matrix: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    pub n_sites: usize,
    pub blocks: Vec<SectorBlock>,
}

impl HamiltonianMatrix {
    /// Block form of a Hamiltonian that is diagonal in the z basis.
    pub fn from_diagonal(n_sites: usize, energies: &[f64]) -> Result<Self> {
        if energies.len() != 1 << n_sites {
            return Err(Error::LengthMismatch { expected: 1 << n_sites, got: energies.len() });
        }
        let blocks = sector_decompose(n_sites)?
            .into_iter()
            .map(|sector| {
                let diag = DVector::from_iterator(
                    sector.dim(),
                    sector.basis_indices.iter().map(|&x| energies[x]),
                );
                SectorBlock { matrix: DMatrix::from_diagonal(&diag), sector }
            })
            .collect();
        Ok(Self { n_sites, blocks })
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// `H |psi>` assembled block by block.
    pub fn apply(&self, state: &PureState) -> Result<Vec<crate::C64>> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch { state: state.dim(), operator: self.dim() });
        }
        let amps = state.amplitudes();
        let mut out = vec![crate::C64::new(0.0, 0.0); self.dim()];
        for block in &self.blocks {
            let idx = &block.sector.basis_indices;
            let re = DVector::from_iterator(idx.len(), idx.iter().map(|&x| amps[x].re));
            let im = DVector::from_iterator(idx.len(), idx.iter().map(|&x| amps[x].im));
            let hre = &block.matrix * re;
            let him = &block.matrix * im;
            for (k, &x) in idx.iter().enumerate() {
                out[x] = crate::C64::new(hre[k], him[k]);
            }
        }
        Ok(out)
    }

    /// `<psi|H|psi>`.
    pub fn expectation(&self, state: &PureState) -> Result<f64> {
        let h = self.apply(state)?;
        Ok(state.amplitudes().iter().zip(&h).map(|(a, b)| (a.conj() * b).re).sum())
    }

    /// Dense `2^L x 2^L` assembly. Only sensible for small chains.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut full = DMatrix::zeros(self.dim(), self.dim());
        for block in &self.blocks {
            let idx = &block.sector.basis_indices;
            for (r, &x) in idx.iter().enumerate() {
                for (c, &y) in idx.iter().enumerate() {
                    full[(x, y)] = block.matrix[(r, c)];
                }
            }
        }
        full
    }
}

/// Draws `h_i = W (2u_i - 1)`, `u_i` uniform on `[0, 1)`.
pub fn sample_xxz(rng: &mut SeededRng, n_sites: usize, jz: f64, w: f64) -> Result<XxzSpec> {
    if !(w >= 0.0) {
        return Err(Error::InvalidInput(format!("disorder strength must be >= 0, got {w}")));
    }
    let fields = (0..n_sites).map(|_| w * (2.0 * rng.random::<f64>() - 1.0)).collect();
    let spec = XxzSpec { n_sites, jz, w, fields };
    spec.validate()?;
    Ok(spec)
}

/// Draws `J_ij = J~_ij exp(-|i-j|/xi)` for every pair `i < j` with `J~` uniform
/// on `[-J0, J0]`, then `g_i` uniform on `[-g0, g0]`.
pub fn sample_pheno(rng: &mut SeededRng, n_sites: usize, j0: f64, xi: f64, g0: f64) -> Result<PhenoSpec> {
    if !(j0 > 0.0 && xi > 0.0 && g0 >= 0.0) {
        return Err(Error::InvalidInput("need J0 > 0, xi > 0, g0 >= 0".into()));
    }
    let mut couplings = vec![vec![0.0; n_sites]; n_sites];
    for i in 0..n_sites {
        for j in i + 1..n_sites {
            let bare = j0 * (2.0 * rng.random::<f64>() - 1.0);
            let v = bare * (-((j - i) as f64) / xi).exp();
            couplings[i][j] = v;
            couplings[j][i] = v;
        }
    }
    let fields = (0..n_sites).map(|_| g0 * (2.0 * rng.random::<f64>() - 1.0)).collect();
    Ok(PhenoSpec { n_sites, j0, xi, g0, couplings, fields })
}

/// Per-sector dense blocks of the XXZ Hamiltonian in the z basis.
pub fn build_xxz_matrix(spec: &XxzSpec) -> Result<HamiltonianMatrix> {
    spec.validate()?;
    let l = spec.n_sites;
    let blocks = sector_decompose(l)?
        .into_iter()
        .map(|sector| {
            let dim = sector.dim();
            let mut m = DMatrix::zeros(dim, dim);
            for (r, &x) in sector.basis_indices.iter().enumerate() {
                m[(r, r)] = spec.diagonal_energy(x);
                for i in 0..l - 1 {
                    if ((x >> i) & 1) != ((x >> (i + 1)) & 1) {
                        let y = x ^ (0b11 << i);
                        let c = sector.basis_indices.binary_search(&y).expect("flip-flop stays in sector");
                        m[(r, c)] = 0.5;
                    }
                }
            }
            SectorBlock { sector, matrix: m }
        })
        .collect();
    Ok(HamiltonianMatrix { n_sites: l, blocks })
}

/// `E(x) = sum_i g_i s_i + sum_{i<j} J_ij s_i s_j` for every basis index.
pub fn build_pheno_diagonal(spec: &PhenoSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let l = spec.n_sites;
    Ok((0..1usize << l)
        .map(|x| {
            let mut e = 0.0;
            for i in 0..l {
                let si = spin_z(x, i);
                e += spec.fields[i] * si;
                for j in i + 1..l {
                    e += spec.couplings[i][j] * si * spin_z(x, j);
                }
            }
            e
        })
        .collect())
}

/// `<psi|H_XXZ|psi>` summed bond by bond from local expectation values.
///
/// Each local term is reduced separately so states with dyadic amplitudes
/// (product states along x/y) yield exact zeros rather than round-off.
pub fn xxz_energy(spec: &XxzSpec, state: &PureState) -> Result<f64> {
    spec.validate()?;
    if state.n_sites() != spec.n_sites {
        return Err(Error::LengthMismatch { expected: spec.n_sites, got: state.n_sites() });
    }
    let amps = state.amplitudes();
    let l = spec.n_sites;
    let mut energy = 0.0;
    for i in 0..l - 1 {
        let mut flip = 0.0;
        let mut zz = 0.0;
        for (x, a) in amps.iter().enumerate() {
            zz += a.norm_sqr() * spin_z(x, i) * spin_z(x, i + 1);
            if ((x >> i) & 1) == 1 && ((x >> (i + 1)) & 1) == 0 {
                // <S+_i S-_{i+1} + h.c.>/2 = Re <x| ... = Re conj(psi_x) psi_y
                let y = x ^ (0b11 << i);
                flip += (a.conj() * amps[y]).re;
            }
        }
        energy += flip + spec.jz * zz;
    }
    for (i, h) in spec.fields.iter().enumerate() {
        let mz: f64 = amps.iter().enumerate().map(|(x, a)| a.norm_sqr() * spin_z(x, i)).sum();
        energy += h * mz;
    }
    Ok(energy)
}

/// Serializable record of one disorder draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderRealization {
    #[serde(rename = "L")]
    pub n_sites: usize,
    #[serde(rename = "Jz", skip_serializing_if = "Option::is_none", default)]
    pub jz: Option<f64>,
    #[serde(rename = "W", skip_serializing_if = "Option::is_none", default)]
    pub w: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub h: Vec<f64>,
    #[serde(rename = "J", skip_serializing_if = "Vec::is_empty", default)]
    pub couplings: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub g: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub j0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub g0: Option<f64>,
    pub seed: u64,
    pub stream_id: u64,
}

impl DisorderRealization {
    pub fn from_xxz(spec: &XxzSpec, seed: u64, stream_id: u64) -> Self {
        Self {
            n_sites: spec.n_sites,
            jz: Some(spec.jz),
            w: Some(spec.w),
            h: spec.fields.clone(),
            couplings: Vec::new(),
            g: Vec::new(),
            j0: None,
            xi: None,
            g0: None,
            seed,
            stream_id,
        }
    }

    pub fn from_pheno(spec: &PhenoSpec, seed: u64, stream_id: u64) -> Self {
        Self {
            n_sites: spec.n_sites,
            jz: None,
            w: None,
            h: Vec::new(),
            couplings: spec.couplings.clone(),
            g: spec.fields.clone(),
            j0: Some(spec.j0),
            xi: Some(spec.xi),
            g0: Some(spec.g0),
            seed,
            stream_id,
        }
    }

    pub fn xxz(&self) -> Option<XxzSpec> {
        Some(XxzSpec { n_sites: self.n_sites, jz: self.jz?, w: self.w?, fields: self.h.clone() })
    }

    pub fn pheno(&self) -> Option<PhenoSpec> {
        Some(PhenoSpec {
            n_sites: self.n_sites,
            j0: self.j0?,
            xi: self.xi?,
            g0: self.g0?,
            couplings: self.couplings.clone(),
            fields: self.g.clone(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// SHA-256 of the compact JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("realization serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
