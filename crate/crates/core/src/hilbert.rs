//! Bit-indexed Hilbert-space bookkeeping for spin-1/2 chains.
//!
//! Site `j` (1-indexed) lives on bit `j - 1` of a basis index; a set bit means
//! spin up (`S^z = +1/2`). Basis states are ordered by the integer value of
//! their bitstring.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::C64;

/// Largest chain this crate will allocate a state for.
pub const MAX_SITES: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn sz(self) -> f64 {
        match self {
            Spin::Up => 0.5,
            Spin::Down => -0.5,
        }
    }
}

/// `s_j = bit_j - 1/2` for site index `site` (0-based).
#[inline]
pub fn spin_z(x: usize, site: usize) -> f64 {
    if (x >> site) & 1 == 1 {
        0.5
    } else {
        -0.5
    }
}

/// A subsystem given as a bit mask over sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub fn new(mask: u32, n_sites: usize) -> Result<Self> {
        if n_sites < 32 && (mask as u64) >= (1u64 << n_sites) {
            return Err(Error::InvalidInput(format!(
                "mask {mask:#b} has bits beyond {n_sites} sites"
            )));
        }
        Ok(SubsetMask(mask))
    }

    /// Sites `first..first + len` (0-based).
    pub fn window(first: usize, len: usize) -> Self {
        SubsetMask((((1u64 << len) - 1) << first) as u32)
    }

    /// Left half of an even chain, sites `1..=L/2`.
    pub fn half_chain(n_sites: usize) -> Self {
        Self::window(0, n_sites / 2)
    }

    pub fn full(n_sites: usize) -> Self {
        SubsetMask(((1u64 << n_sites) - 1) as u32)
    }

    pub fn complement(self, n_sites: usize) -> Self {
        SubsetMask(!self.0 & Self::full(n_sites).0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, site: usize) -> bool {
        (self.0 >> site) & 1 == 1
    }

    /// Basis-index offsets obtained by depositing each integer `0..2^|mask|`
    /// into the mask's bit positions, in ascending order.
    pub fn deposit_table(self) -> Vec<usize> {
        let bits: Vec<usize> = (0..32).filter(|&b| self.contains(b)).collect();
        let mut table = vec![0usize; 1 << bits.len()];
        for (k, &b) in bits.iter().enumerate() {
            let half = 1 << k;
            for a in 0..half {
                table[a + half] = table[a] | (1 << b);
            }
        }
        table
    }
}

/// Fixed-magnetization block of the Hilbert space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sector {
    pub n_up: usize,
    pub basis_indices: Vec<usize>,
}

impl Sector {
    pub fn dim(&self) -> usize {
        self.basis_indices.len()
    }

    /// Total `S^z` of every state in the sector.
    pub fn total_sz(&self, n_sites: usize) -> f64 {
        self.n_up as f64 - n_sites as f64 / 2.0
    }
}

/// Splits the `2^L` basis into the `L + 1` magnetization sectors.
pub fn sector_decompose(n_sites: usize) -> Result<Vec<Sector>> {
    check_sites(n_sites)?;
    let mut sectors: Vec<Sector> = (0..=n_sites)
        .map(|n_up| Sector { n_up, basis_indices: Vec::new() })
        .collect();
    for x in 0..1usize << n_sites {
        sectors[x.count_ones() as usize].basis_indices.push(x);
    }
    Ok(sectors)
}

fn check_sites(n_sites: usize) -> Result<()> {
    if !(2..=MAX_SITES).contains(&n_sites) {
        return Err(Error::InvalidInput(format!(
            "chain length must be in 2..={MAX_SITES}, got {n_sites}"
        )));
    }
    Ok(())
}

fn check_even(n_sites: usize) -> Result<()> {
    check_sites(n_sites)?;
    if !n_sites.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("chain length must be even, got {n_sites}")));
    }
    Ok(())
}

/// Pure state over the full `2^L` computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_sites: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps raw amplitudes without normalizing.
    pub fn from_amplitudes(n_sites: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_sites(n_sites)?;
        if amplitudes.len() != 1 << n_sites {
            return Err(Error::LengthMismatch { expected: 1 << n_sites, got: amplitudes.len() });
        }
        Ok(Self { n_sites, amplitudes })
    }

    /// Wraps raw amplitudes and rescales them to unit norm.
    pub fn normalized(n_sites: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidInput("cannot normalize a zero or non-finite vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(n_sites, amplitudes)
    }

    pub fn basis_state(n_sites: usize, index: usize) -> Result<Self> {
        check_sites(n_sites)?;
        if index >= 1 << n_sites {
            return Err(Error::InvalidInput(format!("basis index {index} out of range")));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n_sites];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { n_sites, amplitudes })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Probability weight per magnetization sector (index = number of up spins).
    pub fn sector_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n_sites + 1];
        for (x, a) in self.amplitudes.iter().enumerate() {
            w[x.count_ones() as usize] += a.norm_sqr();
        }
        w
    }

    /// `<S^z_j>` for every site (0-based `j`).
    pub fn magnetizations(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n_sites];
        for (x, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            for (j, mj) in m.iter_mut().enumerate() {
                *mj += p * spin_z(x, j);
            }
        }
        m
    }

    /// `<S^z_j S^z_{j+1}>` for `j = 0..L-1`.
    pub fn nn_zz(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.n_sites - 1];
        for (x, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            for (j, cj) in c.iter_mut().enumerate() {
                *cj += p * spin_z(x, j) * spin_z(x, j + 1);
            }
        }
        c
    }

    /// Relabels sites: site `j` of `self` becomes site `perm[j]` of the result.
    pub fn permute_sites(&self, perm: &[usize]) -> Result<PureState> {
        if perm.len() != self.n_sites {
            return Err(Error::LengthMismatch { expected: self.n_sites, got: perm.len() });
        }
        let mut seen = vec![false; self.n_sites];
        for &p in perm {
            if p >= self.n_sites || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidInput(format!("{perm:?} is not a permutation")));
            }
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (x, &a) in self.amplitudes.iter().enumerate() {
            let y = (0..self.n_sites)
                .filter(|&j| (x >> j) & 1 == 1)
                .fold(0usize, |y, j| y | (1 << perm[j]));
            out[y] = a;
        }
        Ok(PureState { n_sites: self.n_sites, amplitudes: out })
    }

    /// Applies a 2x2 matrix `u` (rows/columns ordered down, up) to one site.
    pub fn apply_single_site(&self, site: usize, u: [[C64; 2]; 2]) -> Result<PureState> {
        if site >= self.n_sites {
            return Err(Error::InvalidInput(format!("site {site} out of range")));
        }
        let bit = 1 << site;
        let mut out = self.amplitudes.clone();
        for x in (0..self.dim()).filter(|x| x & bit == 0) {
            let (a0, a1) = (self.amplitudes[x], self.amplitudes[x | bit]);
            out[x] = u[0][0] * a0 + u[0][1] * a1;
            out[x | bit] = u[1][0] * a0 + u[1][1] * a1;
        }
        Ok(PureState { n_sites: self.n_sites, amplitudes: out })
    }
}

/// Product state in the z basis.
pub fn make_z_product(spins: &[Spin]) -> Result<PureState> {
    let index = spins
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == Spin::Up)
        .fold(0usize, |x, (j, _)| x | (1 << j));
    PureState::basis_state(spins.len(), index)
}

/// Recovers the spin configuration of a basis index.
pub fn spins_of(index: usize, n_sites: usize) -> Vec<Spin> {
    (0..n_sites)
        .map(|j| if (index >> j) & 1 == 1 { Spin::Up } else { Spin::Down })
        .collect()
}

/// Random z-product state with exactly `L/2` up spins, the up sites chosen
/// uniformly by a partial Fisher-Yates shuffle.
pub fn make_random_half_filled(rng: &mut SeededRng, n_sites: usize) -> Result<PureState> {
    check_even(n_sites)?;
    let mut sites: Vec<usize> = (0..n_sites).collect();
    for k in 0..n_sites / 2 {
        let pick = rng.random_range(k..n_sites);
        sites.swap(k, pick);
    }
    let index = sites[..n_sites / 2].iter().fold(0usize, |x, &j| x | (1 << j));
    PureState::basis_state(n_sites, index)
}

/// `|+x, +y, +x, +y, ...>`: odd sites (1-indexed) along +x, even sites along +y.
///
/// Amplitudes are built as `2^{-L/2} i^k` with `k` the number of even sites
/// pointing down, so every entry is exact in binary floating point.
pub fn make_xy_alternating(n_sites: usize) -> Result<PureState> {
    check_even(n_sites)?;
    let scale = 0.5f64.powi(n_sites as i32 / 2);
    let phases = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
    let even_sites: usize = (0..n_sites).filter(|j| j % 2 == 1).fold(0, |m, j| m | (1 << j));
    let amplitudes = (0..1usize << n_sites)
        .map(|x| {
            let downs = (!x & even_sites).count_ones() as usize;
            phases[downs % 4] * scale
        })
        .collect();
    PureState::from_amplitudes(n_sites, amplitudes)
}

/// Haar-random state: normalized i.i.d. standard complex Gaussian amplitudes.
pub fn haar_random(rng: &mut SeededRng, n_sites: usize) -> Result<PureState> {
    check_sites(n_sites)?;
    let amplitudes = (0..1usize << n_sites)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::normalized(n_sites, amplitudes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn z_product_index_convention() {
        let s = make_z_product(&[Spin::Up, Spin::Up]).unwrap();
        assert_eq!(s.amplitudes()[3], C64::new(1.0, 0.0));
        let s = make_z_product(&[Spin::Up, Spin::Down]).unwrap();
        assert_eq!(s.amplitudes()[1], C64::new(1.0, 0.0));
        assert_eq!(s.norm(), 1.0);
    }

    #[test]
    fn z_product_rejects_single_site() {
        assert!(make_z_product(&[Spin::Up]).is_err());
    }

    #[test]
    fn sectors_small() {
        let s = sector_decompose(2).unwrap();
        assert_eq!(s.iter().map(Sector::dim).collect::<Vec<_>>(), vec![1, 2, 1]);
        assert_eq!(s[1].basis_indices, vec![1, 2]);
    }

    #[test]
    fn sectors_l14() {
        let s = sector_decompose(14).unwrap();
        assert_eq!(s.iter().map(Sector::dim).max(), Some(3432));
        assert_eq!(s.iter().map(Sector::dim).sum::<usize>(), 1 << 14);
    }

    #[test]
    fn sector_partition_is_exact() {
        let l = 8;
        let mut seen = vec![0u8; 1 << l];
        for sec in sector_decompose(l).unwrap() {
            assert!(sec.basis_indices.windows(2).all(|w| w[0] < w[1]));
            for &x in &sec.basis_indices {
                assert_eq!(x.count_ones() as usize, sec.n_up);
                seen[x] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn half_filled_l2_hits_both_states() {
        let mut counts = [0usize; 4];
        for seed in 0..400 {
            let mut rng = SeededRng::new(seed, 0);
            let s = make_random_half_filled(&mut rng, 2).unwrap();
            let x = s.amplitudes().iter().position(|a| a.re == 1.0).unwrap();
            counts[x] += 1;
        }
        assert_eq!(counts[0] + counts[3], 0);
        // Binomial(400, 1/2): 5 sigma is 50.
        assert!((counts[1] as i64 - 200).abs() < 50, "{counts:?}");
    }

    #[test]
    fn half_filled_uniform_over_l4_configurations() {
        let mut counts = std::collections::BTreeMap::new();
        let mut rng = SeededRng::new(11, 4);
        let n = 6000;
        for _ in 0..n {
            let s = make_random_half_filled(&mut rng, 4).unwrap();
            let x = s.amplitudes().iter().position(|a| a.re == 1.0).unwrap();
            *counts.entry(x).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        for (&x, &c) in &counts {
            assert_eq!(x.count_ones(), 2);
            // 1000 expected, sd ~ 29.
            assert!((c as f64 - 1000.0).abs() < 150.0, "{counts:?}");
        }
    }

    #[test]
    fn half_filled_rejects_odd() {
        let mut rng = SeededRng::new(0, 0);
        assert!(make_random_half_filled(&mut rng, 5).is_err());
        assert!(make_xy_alternating(3).is_err());
    }

    #[test]
    fn half_filled_has_zero_total_sz_and_is_deterministic() {
        let a = make_random_half_filled(&mut SeededRng::new(5, 9), 10).unwrap();
        let b = make_random_half_filled(&mut SeededRng::new(5, 9), 10).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.magnetizations().iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn xy_state_l2() {
        let s = make_xy_alternating(2).unwrap();
        let a = s.amplitudes();
        // site 1 along +x, site 2 along +y: amplitude i/2 when site 2 is down.
        assert_eq!(a[0], C64::new(0.0, 0.5));
        assert_eq!(a[1], C64::new(0.0, 0.5));
        assert_eq!(a[2], C64::new(0.5, 0.0));
        assert_eq!(a[3], C64::new(0.5, 0.0));
        assert!(a.iter().all(|z| z.norm() == 0.5));
    }

    #[test]
    fn xy_state_has_zero_magnetization() {
        let s = make_xy_alternating(8).unwrap();
        assert!(s.magnetizations().iter().all(|&m| m == 0.0));
        assert_eq!(s.norm(), 1.0);
    }

    #[test]
    fn haar_state_is_normalized() {
        let s = haar_random(&mut SeededRng::new(3, 3), 6).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deposit_table_matches_mask_bits() {
        let m = SubsetMask(0b1010);
        assert_eq!(m.deposit_table(), vec![0, 2, 8, 10]);
        assert_eq!(SubsetMask(0).deposit_table(), vec![0]);
    }

    #[test]
    fn permutation_moves_excitation() {
        let s = make_z_product(&[Spin::Up, Spin::Down, Spin::Down]).unwrap();
        let p = s.permute_sites(&[2, 0, 1]).unwrap();
        assert_eq!(p.amplitudes()[4], C64::new(1.0, 0.0));
        assert!(s.permute_sites(&[0, 0, 1]).is_err());
    }

    proptest! {
        #[test]
        fn z_product_round_trip(l in 2usize..10, raw in any::<u32>()) {
            let x = (raw as usize) & ((1 << l) - 1);
            let s = make_z_product(&spins_of(x, l)).unwrap();
            prop_assert_eq!(s.amplitudes()[x], C64::new(1.0, 0.0));
            prop_assert_eq!(s.norm(), 1.0);
        }

        #[test]
        fn constructors_are_unit_norm(seed in any::<u64>(), half in 1usize..6) {
            let l = 2 * half;
            let mut rng = SeededRng::new(seed, 1);
            prop_assert!((make_random_half_filled(&mut rng, l).unwrap().norm() - 1.0).abs() < 1e-12);
            prop_assert!((make_xy_alternating(l).unwrap().norm() - 1.0).abs() < 1e-12);
            prop_assert!((haar_random(&mut rng, l).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }
}
