//! Slot layouts for square matrices and column-replicated vectors.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::ckks::{Ciphertext, CkksContext, PublicKey, SecretKey};
use crate::error::{Error, Result};

/// Slot `d·i+j` holds `m[i][j]`.
pub fn encode_matrix(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Dimension(format!("expected a square matrix, got {}×{}", m.nrows(), m.ncols())));
    }
    Ok(super::flatten(m))
}

/// Slot `d·i+j` holds `v[i]` for every column `j`.
pub fn encode_vector_replicated(v: &DVector<f64>) -> Vec<f64> {
    let d = v.len();
    (0..d * d).map(|t| v[t / d]).collect()
}

pub fn decode_matrix(slots: &[f64], d: usize) -> Result<DMatrix<f64>> {
    check_slots(slots.len(), d)?;
    Ok(DMatrix::from_row_slice(d, d, &slots[..d * d]))
}

/// Reads a column-replicated vector, averaging the `d` copies of each entry
/// when `average` is set and taking column 0 otherwise.
pub fn decode_vector(slots: &[f64], d: usize, average: bool) -> Result<DVector<f64>> {
    check_slots(slots.len(), d)?;
    Ok(DVector::from_fn(d, |i, _| {
        let row = &slots[d * i..d * (i + 1)];
        if average {
            row.iter().sum::<f64>() / d as f64
        } else {
            row[0]
        }
    }))
}

fn check_slots(len: usize, d: usize) -> Result<()> {
    if d == 0 || d * d > len {
        return Err(Error::Dimension(format!("{d}×{d} grid does not fit in {len} slots")));
    }
    Ok(())
}

fn check_fits(ctx: &CkksContext, d: usize) -> Result<()> {
    if d == 0 || d * d > ctx.slots() {
        return Err(Error::Dimension(format!("{d}×{d} grid does not fit in {} slots", ctx.slots())));
    }
    Ok(())
}

/// Objects carrying a ciphertext over a `d×d` slot grid.
pub trait GridCiphertext: Sized {
    fn ciphertext(&self) -> &Ciphertext;
    fn dim(&self) -> usize;
    fn with_ciphertext(&self, ct: Ciphertext) -> Self;
}

/// Row-major encrypted `d×d` matrix.
#[derive(Clone, Debug)]
pub struct EncodedMatrix {
    pub ct: Ciphertext,
    pub d: usize,
}

impl EncodedMatrix {
    pub fn new(ct: Ciphertext, d: usize) -> Self {
        Self { ct, d }
    }

    /// Encrypts at the top level with the default scale.
    pub fn encrypt<R: Rng + ?Sized>(ctx: &CkksContext, m: &DMatrix<f64>, pk: &PublicKey, rng: &mut R) -> Result<Self> {
        let slots = encode_matrix(m)?;
        check_fits(ctx, m.nrows())?;
        Ok(Self { ct: ctx.encrypt_real(&slots, pk, rng)?, d: m.nrows() })
    }

    pub fn decrypt(&self, ctx: &CkksContext, sk: &SecretKey) -> Result<DMatrix<f64>> {
        decode_matrix(&ctx.decrypt_real(&self.ct, sk)?, self.d)
    }
}

/// Column-replicated encrypted vector of length `d`.
#[derive(Clone, Debug)]
pub struct EncodedVector {
    pub ct: Ciphertext,
    pub d: usize,
}

impl EncodedVector {
    pub fn new(ct: Ciphertext, d: usize) -> Self {
        Self { ct, d }
    }

    pub fn encrypt<R: Rng + ?Sized>(ctx: &CkksContext, v: &DVector<f64>, pk: &PublicKey, rng: &mut R) -> Result<Self> {
        check_fits(ctx, v.len())?;
        Ok(Self { ct: ctx.encrypt_real(&encode_vector_replicated(v), pk, rng)?, d: v.len() })
    }

    /// Decrypts and averages the replicated copies.
    pub fn decrypt(&self, ctx: &CkksContext, sk: &SecretKey) -> Result<DVector<f64>> {
        decode_vector(&ctx.decrypt_real(&self.ct, sk)?, self.d, true)
    }

    /// Decrypts the full grid without averaging.
    pub fn decrypt_grid(&self, ctx: &CkksContext, sk: &SecretKey) -> Result<DMatrix<f64>> {
        decode_matrix(&ctx.decrypt_real(&self.ct, sk)?, self.d)
    }
}

impl GridCiphertext for EncodedMatrix {
    fn ciphertext(&self) -> &Ciphertext {
        &self.ct
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn with_ciphertext(&self, ct: Ciphertext) -> Self {
        Self { ct, d: self.d }
    }
}

impl GridCiphertext for EncodedVector {
    fn ciphertext(&self) -> &Ciphertext {
        &self.ct
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn with_ciphertext(&self, ct: Ciphertext) -> Self {
        Self { ct, d: self.d }
    }
}
