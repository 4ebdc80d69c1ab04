//! Binary on-disk cache for [`EigenSystem`]s, keyed by the hash of the
//! disorder realization that produced the Hamiltonian.
//!
//! Layout (little endian): magic `EIGC`, format version `u32`, 64-byte ASCII
//! hex spec hash, `n_sites u32`, `n_blocks u32`, then per block `n_up u32`,
//! `dim u32`, `dim` energies `f64`, `dim * dim` eigenvector entries `f64`
//! (column major).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use super::{EigenSystem, SectorEigen};
use crate::error::{Error, Result};
use crate::hilbert::sector_decompose;

const MAGIC: &[u8; 4] = b"EIGC";
const VERSION: u32 = 1;

pub fn save(path: &Path, eig: &EigenSystem, spec_hash: &str) -> Result<()> {
    if spec_hash.len() != 64 {
        return Err(Error::Cache(format!("spec hash must be 64 hex chars, got {}", spec_hash.len())));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(spec_hash.as_bytes())?;
    w.write_all(&(eig.n_sites as u32).to_le_bytes())?;
    w.write_all(&(eig.blocks.len() as u32).to_le_bytes())?;
    for b in &eig.blocks {
        w.write_all(&(b.sector.n_up as u32).to_le_bytes())?;
        w.write_all(&(b.energies.len() as u32).to_le_bytes())?;
        for e in &b.energies {
            w.write_all(&e.to_le_bytes())?;
        }
        for v in b.vectors.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64s(r: &mut impl Read, n: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; 8 * n];
    r.read_exact(&mut buf)?;
    Ok(buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

/// Loads a cached system. Returns `Ok(None)` when the file is absent and an
/// error when it exists but was written for a different spec.
pub fn load(path: &Path, spec_hash: &str) -> Result<Option<EigenSystem>> {
    if !path.exists() {
        return Ok(None);
    }
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC || read_u32(&mut r)? != VERSION {
        return Err(Error::Cache(format!("{} is not an eigen cache file", path.display())));
    }
    let mut hash = [0u8; 64];
    r.read_exact(&mut hash)?;
    if hash != spec_hash.as_bytes() {
        return Err(Error::Cache(format!(
            "{} was built for spec {}, expected {spec_hash}",
            path.display(),
            String::from_utf8_lossy(&hash)
        )));
    }
    let n_sites = read_u32(&mut r)? as usize;
    let n_blocks = read_u32(&mut r)? as usize;
    let sectors = sector_decompose(n_sites)?;
    let mut blocks = Vec::with_capacity(n_blocks);
    for _ in 0..n_blocks {
        let n_up = read_u32(&mut r)? as usize;
        let dim = read_u32(&mut r)? as usize;
        let sector = sectors
            .get(n_up)
            .filter(|s| s.dim() == dim)
            .ok_or_else(|| Error::Cache(format!("corrupt block n_up = {n_up}, dim = {dim}")))?
            .clone();
        let energies = read_f64s(&mut r, dim)?;
        let vectors = DMatrix::from_vec(dim, dim, read_f64s(&mut r, dim * dim)?);
        blocks.push(SectorEigen { sector, energies, vectors });
    }
    Ok(Some(EigenSystem { n_sites, blocks }))
}
