//! Output formats: binary field dumps, CSV tables, PGM label images and the
//! content hash stamped into reports.

use std::io::{Read, Write};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::operator::Eigenpair;

pub const FIELD_MAGIC: &[u8; 4] = b"SPFD";
pub const FIELD_HEADER_LEN: usize = 16;

/// Writes values over the full window: magic, dimension, two axis counts
/// (the second is 1 in 1-D), then little-endian `f64`s in row-major order.
pub fn write_field_dump<W: Write>(mut w: W, counts: &[usize], values: &[f64]) -> Result<()> {
    if counts.is_empty() || counts.len() > 2 || counts.iter().product::<usize>() != values.len() {
        return Err(Error::InvalidGrid(format!("{} values do not fill counts {counts:?}", values.len())));
    }
    let mut buf = Vec::with_capacity(FIELD_HEADER_LEN + 8 * values.len());
    buf.extend_from_slice(FIELD_MAGIC);
    buf.extend_from_slice(&(counts.len() as u32).to_le_bytes());
    buf.extend_from_slice(&(counts[0] as u32).to_le_bytes());
    buf.extend_from_slice(&(counts.get(1).copied().unwrap_or(1) as u32).to_le_bytes());
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// A decoded field dump.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldDump {
    pub counts: Vec<usize>,
    pub values: Vec<f64>,
}

pub fn read_field_dump<R: Read>(mut r: R) -> Result<FieldDump> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < FIELD_HEADER_LEN || &bytes[..4] != FIELD_MAGIC {
        return Err(Error::InvalidConfig("not a field dump".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().unwrap()) as usize;
    let dim = word(1);
    if dim == 0 || dim > 2 {
        return Err(Error::InvalidConfig(format!("field dump dimension {dim}")));
    }
    let counts: Vec<usize> = [word(2), word(3)][..dim].to_vec();
    let n: usize = counts.iter().product();
    let body = &bytes[FIELD_HEADER_LEN..];
    if body.len() != 8 * n {
        return Err(Error::InvalidConfig(format!("field dump body has {} bytes, expected {}", body.len(), 8 * n)));
    }
    let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(FieldDump { counts, values })
}

/// `index,lambda,residual` with 1-based indices.
pub fn eigen_csv(pairs: &[Eigenpair]) -> String {
    let mut s = String::from("index,lambda,residual\n");
    for (i, p) in pairs.iter().enumerate() {
        s.push_str(&format!("{},{:.15e},{:.6e}\n", i + 1, p.lambda, p.residual));
    }
    s
}

/// Binary PGM (P5) of per-point labels; 2-D grids only, first axis as rows.
pub fn write_label_pgm<W: Write>(mut w: W, counts: &[usize], labels: &[u32]) -> Result<()> {
    if counts.len() != 2 || counts[0] * counts[1] != labels.len() {
        return Err(Error::InvalidGrid("PGM export needs a 2-D label array".into()));
    }
    let max = labels.iter().copied().max().unwrap_or(0).max(1);
    if max > 65535 {
        return Err(Error::InvalidConfig(format!("{max} labels exceed the PGM range")));
    }
    write!(w, "P5\n{} {}\n{}\n", counts[1], counts[0], max)?;
    if max < 256 {
        w.write_all(&labels.iter().map(|&l| l as u8).collect::<Vec<_>>())?;
    } else {
        let body: Vec<u8> = labels.iter().flat_map(|&l| (l as u16).to_be_bytes()).collect();
        w.write_all(&body)?;
    }
    Ok(())
}

/// Git blob hash (`"blob <len>\0" + bytes`) with SHA-256, lower-case hex.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
