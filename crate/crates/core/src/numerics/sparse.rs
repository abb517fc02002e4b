//! Compressed sparse rows and a banded LU factorization.
//!
//! Structured P1 grids produce matrices whose bandwidth is one grid row
//! (2D) or one node (1D), so a banded LU with partial pivoting is a direct,
//! deterministic solver with linear cost in the node count.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries; explicit zeros are kept so that matrices built
    /// from the same element loop share one pattern.
    pub fn from_triplets(nrows: usize, ncols: usize, mut trip: Vec<(usize, usize, f64)>) -> Self {
        trip.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0; nrows + 1];
        let mut col_idx = Vec::with_capacity(trip.len());
        let mut values: Vec<f64> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trip {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&DVector::from_element(n, 1.0))
    }

    pub fn diagonal(d: &DVector<f64>) -> Self {
        let n = d.len();
        CsrMatrix {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: d.iter().copied().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Iterates `(row, col, value)` over stored entries.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let row = &self.col_idx[self.row_ptr[r]..self.row_ptr[r + 1]];
        match row.binary_search(&c) {
            Ok(k) => self.values[self.row_ptr[r] + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.ncols);
        DVector::from_iterator(
            self.nrows,
            (0..self.nrows).map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.values[k] * x[self.col_idx[k]])
                    .sum::<f64>()
            }),
        )
    }

    /// `Aᵀx`.
    pub fn tr_mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = DVector::zeros(self.ncols);
        for (r, c, v) in self.triplets() {
            y[c] += v * x[r];
        }
        y
    }

    /// `xᵀ A x`.
    pub fn quad(&self, x: &DVector<f64>) -> f64 {
        x.dot(&self.mul_vec(x))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.triplets().map(|(r, c, v)| (c, r, v)).collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `Σ cᵢ Aᵢ` over matrices of equal shape.
    pub fn lincomb(terms: &[(f64, &CsrMatrix)]) -> Self {
        let (nrows, ncols) = (terms[0].1.nrows, terms[0].1.ncols);
        let mut trip = Vec::new();
        for (c, m) in terms {
            assert_eq!((m.nrows, m.ncols), (nrows, ncols));
            trip.extend(m.triplets().map(|(r, k, v)| (r, k, c * v)));
        }
        Self::from_triplets(nrows, ncols, trip)
    }

    pub fn row_sums(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.nrows,
            (0..self.nrows).map(|r| self.values[self.row_ptr[r]..self.row_ptr[r + 1]].iter().sum()),
        )
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            d[(r, c)] += v;
        }
        d
    }

    /// Largest `|Aᵢⱼ − Aⱼᵢ|`.
    pub fn asymmetry(&self) -> f64 {
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r)).abs())
            .fold(0.0, f64::max)
    }

    /// Lower and upper bandwidths.
    pub fn bandwidth(&self) -> (usize, usize) {
        self.triplets().fold((0, 0), |(kl, ku), (r, c, _)| {
            if r > c {
                (kl.max(r - c), ku)
            } else {
                (kl, ku.max(c - r))
            }
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// LU factors of a square banded matrix with row pivoting.
///
/// Row `i` stores columns `i − kl ..= i + ku + kl`; the extra `kl` columns
/// hold fill from pivoting.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    width: usize,
    band: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        if a.nrows != a.ncols {
            return Err(Error::Input(format!(
                "cannot factor a {}×{} matrix",
                a.nrows, a.ncols
            )));
        }
        let n = a.nrows;
        let (kl, ku) = a.bandwidth();
        let width = 2 * kl + ku + 1;
        let mut lu = BandedLu {
            n,
            kl,
            width,
            band: vec![0.0; n * width],
            pivots: vec![0; n],
        };
        for (r, c, v) in a.triplets() {
            let k = lu.slot(r, c);
            lu.band[k] += v;
        }
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        let reach = ku + kl;
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = lu.band[lu.slot(k, k)].abs();
            for r in k + 1..=last {
                let v = lu.band[lu.slot(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            lu.pivots[k] = p;
            if !(best > 1e-14 * scale) {
                return Err(Error::Singular {
                    row: k,
                    pivot: best,
                });
            }
            let cmax = (k + reach).min(n - 1);
            if p != k {
                for c in k..=cmax {
                    let (i, j) = (lu.slot(k, c), lu.slot(p, c));
                    lu.band.swap(i, j);
                }
            }
            let d = lu.band[lu.slot(k, k)];
            for r in k + 1..=last {
                let irk = lu.slot(r, k);
                let l = lu.band[irk] / d;
                lu.band[irk] = l;
                if l != 0.0 {
                    for c in k + 1..=cmax {
                        let u = lu.band[lu.slot(k, c)];
                        let i = lu.slot(r, c);
                        lu.band[i] -= l * u;
                    }
                }
            }
        }
        Ok(lu)
    }

    #[inline]
    fn slot(&self, r: usize, c: usize) -> usize {
        r * self.width + (c + self.kl - r)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x = b.clone();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap_rows(k, p);
            }
            let xk = x[k];
            for r in k + 1..=(k + self.kl).min(n.saturating_sub(1)) {
                x[r] -= self.band[self.slot(r, k)] * xk;
            }
        }
        let reach = self.width - 1 - self.kl;
        for k in (0..n).rev() {
            let mut s = x[k];
            for c in k + 1..=(k + reach).min(n - 1) {
                s -= self.band[self.slot(k, c)] * x[c];
            }
            x[k] = s / self.band[self.slot(k, k)];
        }
        x
    }
}

/// Solves `A x = b` by banded LU.
///
/// ```
/// use kwcopt::numerics::{solve_sparse, CsrMatrix};
/// use nalgebra::DVector;
/// let a = CsrMatrix::identity(3);
/// let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
/// assert_eq!(solve_sparse(&a, &b).unwrap(), b);
/// ```
pub fn solve_sparse(a: &CsrMatrix, b: &DVector<f64>) -> Result<DVector<f64>> {
    if b.len() != a.nrows {
        return Err(Error::Input(format!(
            "right side has length {}, matrix has {} rows",
            b.len(),
            a.nrows
        )));
    }
    Ok(BandedLu::factor(a)?.solve(b))
}
