//! Dense exact matrices.
//!
//! [`RationalMatrix`] is the user-facing dense form of a kernel.
//! [`ScaledMatrix`] stores `numerators / denominator` with a single shared
//! denominator, which keeps repeated products free of per-entry gcds.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::rational::{common_denominator, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Domain("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Checks square shape, nonnegative entries and exact unit row sums.
    pub fn check_stochastic(&self) -> Result<()> {
        if !self.is_square() || self.rows == 0 {
            return Err(Error::Domain(format!(
                "transition matrix must be square and nonempty, got {}x{}",
                self.rows, self.cols
            )));
        }
        for i in 0..self.rows {
            let row = self.row(i);
            if let Some(j) = row.iter().position(|v| *v < Rational::zero()) {
                return Err(Error::Domain(format!("negative entry at ({i},{j})")));
            }
            let sum: Rational = row.iter().sum();
            if !sum.is_one() {
                return Err(Error::Domain(format!("row {i} sums to {sum}")));
            }
        }
        Ok(())
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        // new index perm[i] holds old state i
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(perm[i], perm[j])] = self[(i, j)].clone();
            }
        }
        out
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

/// Square matrix `numer / denom` with integer numerators.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledMatrix {
    n: usize,
    numer: Vec<BigInt>,
    denom: BigInt,
}

impl ScaledMatrix {
    pub fn from_rational(m: &RationalMatrix) -> Self {
        assert!(m.is_square());
        let denom = common_denominator(&m.data);
        let numer = m
            .data
            .iter()
            .map(|v| v.numer() * (&denom / v.denom()))
            .collect();
        Self {
            n: m.rows,
            numer,
            denom,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut numer = vec![BigInt::zero(); n * n];
        for i in 0..n {
            numer[i * n + i] = BigInt::one();
        }
        Self {
            n,
            numer,
            denom: BigInt::one(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    pub fn numer(&self, i: usize, j: usize) -> &BigInt {
        &self.numer[i * self.n + j]
    }

    pub fn entry(&self, i: usize, j: usize) -> Rational {
        Rational::new(self.numer(i, j).clone(), self.denom.clone())
    }

    pub fn row(&self, i: usize) -> Vec<Rational> {
        (0..self.n).map(|j| self.entry(i, j)).collect()
    }

    /// Largest bit length over numerators and the denominator.
    pub fn max_bits(&self) -> u64 {
        self.numer
            .iter()
            .map(BigInt::bits)
            .chain(std::iter::once(self.denom.bits()))
            .max()
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut numer = vec![BigInt::zero(); n * n];
        for i in 0..n {
            let out = &mut numer[i * n..(i + 1) * n];
            for k in 0..n {
                let a = &self.numer[i * n + k];
                if a.is_zero() {
                    continue;
                }
                let brow = &other.numer[k * n..(k + 1) * n];
                for (o, b) in out.iter_mut().zip(brow) {
                    if !b.is_zero() {
                        *o += a * b;
                    }
                }
            }
        }
        Self {
            n,
            numer,
            denom: &self.denom * &other.denom,
        }
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix {
            rows: self.n,
            cols: self.n,
            data: (0..self.n * self.n)
                .map(|k| Rational::new(self.numer[k].clone(), self.denom.clone()))
                .collect(),
        }
    }
}
