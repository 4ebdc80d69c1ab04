//! Dense reference constructions built from explicit Kronecker products.
//! Site `j` (0-based) is bit `j` of the basis index; the single-site basis is
//! ordered (down, up).

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub type CMat = DMatrix<C64>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn sz() -> CMat {
    CMat::from_row_slice(2, 2, &[c(-0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)])
}

pub fn sx() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)])
}

pub fn sy() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(0.0, 0.0)])
}

/// `op` acting on `site` of an `l`-site chain.
pub fn site_op(op: &CMat, site: usize, l: usize) -> CMat {
    let mut m = CMat::identity(1, 1);
    for j in (0..l).rev() {
        let f = if j == site { op.clone() } else { CMat::identity(2, 2) };
        m = m.kronecker(&f);
    }
    m
}

pub fn dense_xxz(l: usize, jz: f64, fields: &[f64]) -> CMat {
    let n = 1 << l;
    let mut h = CMat::zeros(n, n);
    let (x, y, z) = (sx(), sy(), sz());
    for j in 0..l - 1 {
        h += site_op(&x, j, l) * site_op(&x, j + 1, l);
        h += site_op(&y, j, l) * site_op(&y, j + 1, l);
        h += site_op(&z, j, l) * site_op(&z, j + 1, l) * c(jz, 0.0);
    }
    for (j, &hj) in fields.iter().enumerate() {
        h += site_op(&z, j, l) * c(hj, 0.0);
    }
    h
}

pub fn dense_pheno(l: usize, couplings: &[Vec<f64>], fields: &[f64]) -> CMat {
    let n = 1 << l;
    let z = sz();
    let mut h = CMat::zeros(n, n);
    for i in 0..l {
        h += site_op(&z, i, l) * c(fields[i], 0.0);
        for j in i + 1..l {
            h += site_op(&z, i, l) * site_op(&z, j, l) * c(couplings[i][j], 0.0);
        }
    }
    h
}

/// `exp(-i H t) psi` through a full dense Hermitian eigendecomposition.
pub fn dense_evolve(h: &CMat, psi: &[C64], t: f64) -> Vec<C64> {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let coeffs = v.adjoint() * nalgebra::DVector::from_column_slice(psi);
    let phased = nalgebra::DVector::from_iterator(
        coeffs.len(),
        coeffs.iter().zip(eig.eigenvalues.iter()).map(|(a, &e)| a * C64::from_polar(1.0, -e * t)),
    );
    (v * phased).iter().copied().collect()
}

/// `tr rho_A^2` via the explicit partial trace of `|psi><psi|`.
pub fn dense_purity(psi: &[C64], l: usize, mask: u32) -> f64 {
    let n = 1usize << l;
    let a_sites: Vec<usize> = (0..l).filter(|j| mask >> j & 1 == 1).collect();
    let da = 1usize << a_sites.len();
    let a_index = |x: usize| a_sites.iter().enumerate().fold(0, |acc, (k, &j)| acc | ((x >> j & 1) << k));
    let b_mask = !(mask as usize) & (n - 1);
    let mut rho_a = CMat::zeros(da, da);
    for x in 0..n {
        for y in 0..n {
            if x & b_mask == y & b_mask {
                rho_a[(a_index(x), a_index(y))] += psi[x] * psi[y].conj();
            }
        }
    }
    (&rho_a * &rho_a).trace().re
}

/// Magnetizations and raw nearest-neighbour `<SzSz>` of
/// `rho ∝ exp(sum lambda_j Sz_j + sum xi_j Sz_j Sz_j+1)` from dense traces.
pub fn dense_gge_moments(lambda: &[f64], xi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let l = lambda.len();
    let z = sz();
    let n = 1 << l;
    let mut k = CMat::zeros(n, n);
    for j in 0..l {
        k += site_op(&z, j, l) * c(lambda[j], 0.0);
    }
    for j in 0..l - 1 {
        k += site_op(&z, j, l) * site_op(&z, j + 1, l) * c(xi[j], 0.0);
    }
    let mut rho = CMat::zeros(n, n);
    for i in 0..n {
        rho[(i, i)] = k[(i, i)].exp();
    }
    let tr = rho.trace();
    rho /= tr;
    let m = (0..l).map(|j| (&rho * site_op(&z, j, l)).trace().re).collect();
    let zz = (0..l - 1)
        .map(|j| (&rho * site_op(&z, j, l) * site_op(&z, j + 1, l)).trace().re)
        .collect();
    (m, zz)
}

/// SU(2) element from three angles.
pub fn su2(a: f64, b: f64, g: f64) -> [[C64; 2]; 2] {
    let (ca, sa) = (a.cos(), a.sin());
    [
        [C64::from_polar(ca, b), C64::from_polar(sa, g)],
        [-C64::from_polar(sa, -g), C64::from_polar(ca, -b)],
    ]
}
