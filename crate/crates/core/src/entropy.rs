//! Rényi-2 entanglement functionals of pure states.
//!
//! Subset purities use a bit-gather: the amplitude list is viewed as a
//! `d_small x d_big` matrix `M` (rows over the smaller side of the cut), and
//! `tr rho^2 = sum_{a,a'} |sum_b M_ab conj(M_a'b)|^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hilbert::{PureState, SubsetMask};
use crate::C64;

/// `ln(6 pi)`, the per-site offset of the equal-weight normalization `(6 pi)^L`.
pub const LN_6PI: f64 = 2.936_489_355_077_455_3;

/// Largest `L` for which the doubled-state WRE buffer (`2^(2L)` amplitudes)
/// is allocated by default: 256 MiB at `L = 12`.
pub const DEFAULT_WRE_FAST_CAP: usize = 12;

/// Which WRE algorithm to run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WrePath {
    #[default]
    Naive,
    Fast,
    /// Run both, fail if they disagree beyond 1e-9, report the naive value.
    Both,
    None,
}

/// `tr[rho_A^2]` for `rho_A = tr_B |psi><psi|`.
pub fn subset_purity(state: &PureState, mask: SubsetMask) -> f64 {
    let l = state.n_sites();
    let comp = mask.complement(l);
    // The smaller side indexes rows; ties keep A.
    let (small, big) = if mask.len() <= comp.len() { (mask, comp) } else { (comp, mask) };
    let rows = small.deposit_table();
    let cols = big.deposit_table();
    let (d_s, d_b) = (rows.len(), cols.len());
    let amps = state.amplitudes();

    let mut re = vec![0.0; d_s * d_b];
    let mut im = vec![0.0; d_s * d_b];
    for (a, &ra) in rows.iter().enumerate() {
        let (row_re, row_im) = (&mut re[a * d_b..(a + 1) * d_b], &mut im[a * d_b..(a + 1) * d_b]);
        for (b, &cb) in cols.iter().enumerate() {
            let z = amps[ra | cb];
            row_re[b] = z.re;
            row_im[b] = z.im;
        }
    }

    let mut purity = 0.0;
    for a in 0..d_s {
        let (ar, ai) = (&re[a * d_b..(a + 1) * d_b], &im[a * d_b..(a + 1) * d_b]);
        let diag: f64 = ar.iter().zip(ai).map(|(r, i)| r * r + i * i).sum();
        purity += diag * diag;
        for a2 in a + 1..d_s {
            let (br, bi) = (&re[a2 * d_b..(a2 + 1) * d_b], &im[a2 * d_b..(a2 + 1) * d_b]);
            let (mut sr, mut si) = (0.0, 0.0);
            for b in 0..d_b {
                sr += ar[b] * br[b] + ai[b] * bi[b];
                si += ai[b] * br[b] - ar[b] * bi[b];
            }
            purity += 2.0 * (sr * sr + si * si);
        }
    }
    purity
}

/// `S_A = -ln tr[rho_A^2]`.
pub fn renyi2(state: &PureState, mask: SubsetMask) -> f64 {
    // Clamp the round-off that can push a product-state purity past 1.
    (-subset_purity(state, mask).ln()).max(0.0)
}

/// Half-chain Rényi-2 entropy, subsystem = sites `1..=L/2`.
pub fn hcee(state: &PureState) -> Result<f64> {
    if !state.n_sites().is_multiple_of(2) {
        return Err(Error::InvalidInput("half-chain entropy needs even L".into()));
    }
    Ok(renyi2(state, SubsetMask::half_chain(state.n_sites())))
}

/// Mean Rényi-2 entropy over the `L - n + 1` contiguous windows of `n` sites.
pub fn nqee(state: &PureState, n: usize) -> Result<f64> {
    let l = state.n_sites();
    if n == 0 || n > l {
        return Err(Error::InvalidInput(format!("window size must be in 1..={l}, got {n}")));
    }
    let windows = l - n + 1;
    let total: f64 = (0..windows).map(|j| renyi2(state, SubsetMask::window(j, n))).sum();
    Ok(total / windows as f64)
}

/// `sum_A tr[rho_A^2]` over all `2^L` subsets, enumerating only masks with
/// site 1 outside `A` and doubling (complements have equal purity).
pub fn purity_sum_naive(state: &PureState, exec: Exec) -> f64 {
    let half = 1usize << (state.n_sites() - 1);
    2.0 * exec.sum(half, |m| subset_purity(state, SubsetMask((m << 1) as u32)))
}

/// Converts a subset-purity sum into the Wehrl-Rényi entropy
/// `-ln(sum / (6 pi)^L)`.
pub fn wre_from_purity_sum(sum: f64, n_sites: usize) -> f64 {
    n_sites as f64 * LN_6PI - sum.ln()
}

pub fn wre_naive(state: &PureState) -> f64 {
    wre_naive_with(state, Exec::default())
}

pub fn wre_naive_with(state: &PureState, exec: Exec) -> f64 {
    wre_from_purity_sum(purity_sum_naive(state, exec), state.n_sites())
}

/// `sum_A tr[rho_A^2] = <psi psi| prod_i (1 + SWAP_i) |psi psi>` on the
/// doubled state, with `SWAP_i` exchanging site `i` between the copies.
pub fn purity_sum_doubled(state: &PureState, cap: usize, exec: Exec) -> Result<f64> {
    let l = state.n_sites();
    if l > cap {
        return Err(Error::StateTooLarge { n_sites: l, cap });
    }
    let d = state.dim();
    let amps = state.amplitudes();
    // phi[y * d + x] = psi_x psi_y
    let mut phi: Vec<C64> = Vec::with_capacity(d * d);
    for &ay in amps {
        phi.extend(amps.iter().map(|&ax| ax * ay));
    }
    for site in 0..l {
        let bit = 1usize << site;
        // Rows y0 (bit clear) and y0 | bit share one aligned chunk of 2 * bit rows.
        exec.for_each_chunk_mut(&mut phi, 2 * bit * d, |chunk| {
            for r in 0..bit {
                let (lo, hi) = chunk.split_at_mut(bit * d);
                let row0 = &mut lo[r * d..(r + 1) * d];
                let row1 = &mut hi[r * d..(r + 1) * d];
                for x in 0..d {
                    if x & bit == 0 {
                        row0[x] *= 2.0;
                        // (x, y0 | bit) <-> (x | bit, y0)
                        let s = row1[x] + row0[x | bit];
                        row1[x] = s;
                        row0[x | bit] = s;
                    } else {
                        row1[x] *= 2.0;
                    }
                }
            }
        });
    }
    let mut total = 0.0;
    for (y, &ay) in amps.iter().enumerate() {
        let row = &phi[y * d..(y + 1) * d];
        total += amps.iter().zip(row).map(|(&ax, &p)| ((ax * ay).conj() * p).re).sum::<f64>();
    }
    Ok(total)
}

pub fn wre_fast(state: &PureState) -> Result<f64> {
    wre_fast_with(state, DEFAULT_WRE_FAST_CAP, Exec::default())
}

pub fn wre_fast_with(state: &PureState, cap: usize, exec: Exec) -> Result<f64> {
    Ok(wre_from_purity_sum(purity_sum_doubled(state, cap, exec)?, state.n_sites()))
}

/// Dispatches on `path`. `WrePath::None` yields `Ok(None)`.
pub fn wre(state: &PureState, path: WrePath, cap: usize, exec: Exec) -> Result<Option<f64>> {
    match path {
        WrePath::None => Ok(None),
        WrePath::Naive => Ok(Some(wre_naive_with(state, exec))),
        WrePath::Fast => wre_fast_with(state, cap, exec).map(Some),
        WrePath::Both => {
            let naive = wre_naive_with(state, exec);
            let fast = wre_fast_with(state, cap, exec)?;
            if (naive - fast).abs() > 1e-9 {
                return Err(Error::Invariant(format!("WRE paths disagree: naive {naive}, doubled {fast}")));
            }
            Ok(Some(naive))
        }
    }
}

/// `(S(T) - S(0)) / (S(inf) - S(0))`.
pub fn r_value(s: f64, s0: f64, s_inf: f64) -> Result<f64> {
    let span = s_inf - s0;
    if span.abs() < 1e-12 {
        return Err(Error::DegenerateNormalization(span.abs()));
    }
    Ok((s - s0) / span)
}

pub fn normalize_r(series: &[f64], s0: f64, s_inf: f64) -> Result<Vec<f64>> {
    series.iter().map(|&s| r_value(s, s0, s_inf)).collect()
}

/// Entanglement measures of one state at one time, raw and r-normalized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementRecord {
    pub t: f64,
    pub s_hc: f64,
    /// `(n, S_nQ)` pairs.
    pub s_nq: Vec<(usize, f64)>,
    pub s_w: Option<f64>,
    pub r_hc: Option<f64>,
    pub r_nq: Vec<Option<f64>>,
    pub r_w: Option<f64>,
}

impl EntanglementRecord {
    pub fn measure(
        state: &PureState,
        t: f64,
        n_list: &[usize],
        path: WrePath,
        cap: usize,
        exec: Exec,
    ) -> Result<Self> {
        let s_nq = n_list.iter().map(|&n| Ok((n, nqee(state, n)?))).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            t,
            s_hc: hcee(state)?,
            r_nq: vec![None; s_nq.len()],
            s_nq,
            s_w: wre(state, path, cap, exec)?,
            r_hc: None,
            r_w: None,
        })
    }

    /// Element-wise mean of records taken at different times (used for the
    /// averaged saturation estimate). `t` is set to the mean time.
    pub fn mean(records: &[EntanglementRecord]) -> Option<EntanglementRecord> {
        let first = records.first()?;
        let k = records.len() as f64;
        let avg = |f: &dyn Fn(&EntanglementRecord) -> f64| records.iter().map(f).sum::<f64>() / k;
        Some(EntanglementRecord {
            t: avg(&|r| r.t),
            s_hc: avg(&|r| r.s_hc),
            s_nq: first
                .s_nq
                .iter()
                .enumerate()
                .map(|(i, &(n, _))| (n, avg(&|r| r.s_nq[i].1)))
                .collect(),
            s_w: first.s_w.map(|_| avg(&|r| r.s_w.unwrap_or(f64::NAN))),
            r_hc: None,
            r_nq: vec![None; first.s_nq.len()],
            r_w: None,
        })
    }

    /// Fills the `r_*` fields against `start` (T = 0) and `saturated`
    /// (T -> inf). Degenerate normalizations leave the field empty.
    pub fn normalize(&mut self, start: &EntanglementRecord, saturated: &EntanglementRecord) {
        self.r_hc = r_value(self.s_hc, start.s_hc, saturated.s_hc).ok();
        self.r_nq = self
            .s_nq
            .iter()
            .zip(start.s_nq.iter().zip(&saturated.s_nq))
            .map(|(&(_, s), (&(_, s0), &(_, si)))| r_value(s, s0, si).ok())
            .collect();
        self.r_w = match (self.s_w, start.s_w, saturated.s_w) {
            (Some(s), Some(s0), Some(si)) => r_value(s, s0, si).ok(),
            _ => None,
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{haar_random, make_z_product, Spin};
    use crate::rng::SeededRng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bell() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::from_amplitudes(2, vec![c(s), c(0.0), c(0.0), c(s)]).unwrap()
    }

    fn ghz(l: usize) -> PureState {
        let mut a = vec![c(0.0); 1 << l];
        a[0] = c(std::f64::consts::FRAC_1_SQRT_2);
        a[(1 << l) - 1] = c(std::f64::consts::FRAC_1_SQRT_2);
        PureState::from_amplitudes(l, a).unwrap()
    }

    #[test]
    fn product_state_purities_are_one() {
        let s = make_z_product(&[Spin::Up, Spin::Down, Spin::Down, Spin::Up]).unwrap();
        for m in 0..16 {
            assert!((subset_purity(&s, SubsetMask(m)) - 1.0).abs() < 1e-15);
        }
        assert_eq!(hcee(&s).unwrap(), 0.0);
    }

    #[test]
    fn bell_pair_values() {
        let b = bell();
        assert!((subset_purity(&b, SubsetMask(1)) - 0.5).abs() < 1e-15);
        assert!((renyi2(&b, SubsetMask(1)) - 2f64.ln()).abs() < 1e-14);
        assert!((wre_naive(&b) - (2.0 * LN_6PI - 3f64.ln())).abs() < 1e-12);
        assert!((wre_naive(&b) - 4.7744).abs() < 1e-4);
    }

    #[test]
    fn ghz_marginals() {
        let g = ghz(3);
        for m in 1..7 {
            assert!((subset_purity(&g, SubsetMask(m)) - 0.5).abs() < 1e-15);
        }
        assert!((wre_naive(&g) - (3.0 * LN_6PI - 5f64.ln())).abs() < 1e-12);
        assert!((wre_naive(&g) - 7.2001).abs() < 1e-4);
        assert!((nqee(&ghz(4), 2).unwrap() - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn nqee_edges() {
        let s = haar_random(&mut SeededRng::new(1, 2), 6).unwrap();
        assert!(nqee(&s, 6).unwrap() < 1e-12);
        assert!(nqee(&s, 0).is_err());
        assert!(nqee(&s, 7).is_err());
        let p = make_z_product(&[Spin::Up; 6]).unwrap();
        for n in 1..=6 {
            assert_eq!(nqee(&p, n).unwrap(), 0.0);
        }
    }

    #[test]
    fn product_wre_closed_form() {
        let ln_3pi = (3.0 * std::f64::consts::PI).ln();
        let p = make_z_product(&[Spin::Down; 8]).unwrap();
        assert!((wre_naive(&p) - 8.0 * ln_3pi).abs() < 1e-12);
        assert!((wre_fast(&p).unwrap() - 8.0 * ln_3pi).abs() < 1e-12);
    }

    #[test]
    fn fast_path_refuses_large_states() {
        let p = make_z_product(&[Spin::Down; 6]).unwrap();
        assert!(matches!(wre_fast_with(&p, 4, Exec::Sequential), Err(Error::StateTooLarge { .. })));
    }

    #[test]
    fn fast_matches_naive() {
        let mut rng = SeededRng::new(42, 0);
        for l in [2, 3, 4, 5, 6] {
            let s = haar_random(&mut rng, l).unwrap();
            let a = wre_naive(&s);
            let b = wre_fast(&s).unwrap();
            assert!((a - b).abs() < 1e-10, "L={l}: {a} vs {b}");
        }
    }

    #[test]
    fn haar_purity_bounds() {
        let s = haar_random(&mut SeededRng::new(4, 4), 6).unwrap();
        for m in 0..64u32 {
            let k = m.count_ones().min(6 - m.count_ones());
            let p = subset_purity(&s, SubsetMask(m));
            assert!(p >= 0.5f64.powi(k as i32) - 1e-12 && p <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn r_normalization() {
        assert_eq!(normalize_r(&[1.0, 3.0, 2.0], 1.0, 3.0).unwrap(), vec![0.0, 1.0, 0.5]);
        assert!(matches!(r_value(1.0, 2.0, 2.0), Err(Error::DegenerateNormalization(_))));
    }

    #[test]
    fn record_normalization_fills_fields() {
        let mk = |v: f64| EntanglementRecord {
            t: v,
            s_hc: v,
            s_nq: vec![(3, 2.0 * v)],
            s_w: Some(v + 1.0),
            r_hc: None,
            r_nq: vec![None],
            r_w: None,
        };
        let (s0, si) = (mk(0.0), mk(2.0));
        let mut r = mk(1.0);
        r.normalize(&s0, &si);
        assert_eq!(r.r_hc, Some(0.5));
        assert_eq!(r.r_nq, vec![Some(0.5)]);
        assert_eq!(r.r_w, Some(0.5));
        let mut flat = mk(1.0);
        flat.normalize(&s0, &s0);
        assert_eq!(flat.r_hc, None);
    }
}
