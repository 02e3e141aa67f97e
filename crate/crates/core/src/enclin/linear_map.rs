//! Linear maps on flattened `d×d` slot grids, stored by generalized
//! diagonals `u_l[t] = U[t, (t+l) mod n]`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A linear map `U` on vectors of length `dim`, keeping only its nonzero
/// generalized diagonals.
#[derive(Clone, Debug, PartialEq)]
pub struct PlainLinearMap {
    dim: usize,
    diagonals: BTreeMap<usize, Vec<f64>>,
}

impl PlainLinearMap {
    pub fn from_dense(u: &DMatrix<f64>) -> Result<Self> {
        let dim = u.nrows();
        if u.ncols() != dim || dim == 0 {
            return Err(Error::Dimension(format!("linear map must be square, got {}×{}", u.nrows(), u.ncols())));
        }
        let mut diagonals = BTreeMap::new();
        for l in 0..dim {
            let diag: Vec<f64> = (0..dim).map(|t| u[(t, (t + l) % dim)]).collect();
            if diag.iter().any(|&x| x != 0.0) {
                diagonals.insert(l, diag);
            }
        }
        Ok(Self { dim, diagonals })
    }

    /// Builds the map sending input index `source(t)` to output index `t`,
    /// scaled by `a`.
    fn from_permutation(dim: usize, a: f64, source: impl Fn(usize) -> usize) -> Self {
        let mut diagonals: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        if a != 0.0 {
            for t in 0..dim {
                let l = (source(t) + dim - t) % dim;
                diagonals.entry(l).or_insert_with(|| vec![0.0; dim])[t] = a;
            }
        }
        Self { dim, diagonals }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_permutation(dim, 1.0, |t| t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nonzero diagonals keyed by offset `l ∈ [0, dim)`.
    pub fn diagonals(&self) -> &BTreeMap<usize, Vec<f64>> {
        &self.diagonals
    }

    pub fn diagonal_count(&self) -> usize {
        self.diagonals.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for (&l, diag) in &self.diagonals {
            for t in 0..n {
                m[(t, (t + l) % n)] += diag[t];
            }
        }
        m
    }

    /// `Σ_l u_l ⊙ rot(x, l)`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim;
        if x.len() != n {
            return Err(Error::Dimension(format!("map of dim {n} applied to length {}", x.len())));
        }
        let mut y = vec![0.0; n];
        for (&l, diag) in &self.diagonals {
            for t in 0..n {
                y[t] += diag[t] * x[(t + l) % n];
            }
        }
        Ok(y)
    }

    /// Text dump, one `offset: values` line per stored diagonal.
    pub fn dump(&self) -> String {
        let mut out = format!("dim {}\n", self.dim);
        for (l, diag) in &self.diagonals {
            let vals: Vec<String> = diag.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(out, "{l}: {}", vals.join(" "));
        }
        out
    }
}

fn check_k(d: usize, k: usize) -> Result<()> {
    if d == 0 || k >= d {
        return Err(Error::contract(format!("permutation index k={k} outside [0, {d})")));
    }
    Ok(())
}

/// `V_k` scaled by `a`: output slot `d·i+j` reads input `d·i + [i+j+k]_d`.
pub fn make_vk(d: usize, k: usize, a: f64) -> Result<PlainLinearMap> {
    check_k(d, k)?;
    Ok(PlainLinearMap::from_permutation(d * d, a, |t| {
        let (i, j) = (t / d, t % d);
        d * i + (i + j + k) % d
    }))
}

/// `W_k`: output slot `d·i+j` reads input `d·[i+j+k]_d + j`.
pub fn make_wk(d: usize, k: usize) -> Result<PlainLinearMap> {
    check_k(d, k)?;
    Ok(PlainLinearMap::from_permutation(d * d, 1.0, |t| {
        let (i, j) = (t / d, t % d);
        d * ((i + j + k) % d) + j
    }))
}

/// `Σ_k (V_k(a)·x) ⊙ (W_k·y)` on row-major flattened matrices, entirely
/// in plaintext. Equals the flattening of `a·X·Y`.
pub fn permuted_product(x: &DMatrix<f64>, y: &DMatrix<f64>, a: f64) -> Result<DMatrix<f64>> {
    let d = x.nrows();
    if x.ncols() != d || y.nrows() != d || y.ncols() != d {
        return Err(Error::Dimension("permuted product needs two d×d matrices".into()));
    }
    let xf = flatten(x);
    let yf = flatten(y);
    let mut acc = vec![0.0; d * d];
    for k in 0..d {
        let xk = make_vk(d, k, a)?.apply(&xf)?;
        let yk = make_wk(d, k)?.apply(&yf)?;
        for (s, (p, q)) in acc.iter_mut().zip(xk.iter().zip(&yk)) {
            *s += p * q;
        }
    }
    Ok(DMatrix::from_row_slice(d, d, &acc))
}

/// Row-major flattening.
pub fn flatten(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().iter().copied().collect()
}
