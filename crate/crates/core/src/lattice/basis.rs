use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Row basis of a lattice with exact rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    rows: Vec<Vec<BigRational>>,
}

impl LatticeBasis {
    /// Checks shape and linear independence.
    pub fn new(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let basis = Self::unchecked(rows)?;
        if basis.gram_determinant().is_zero() {
            return Err(Error::DependentBasis);
        }
        Ok(basis)
    }

    /// Caller guarantees shape and independence.
    pub(crate) fn trusted(rows: Vec<Vec<BigRational>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == rows[0].len()));
        LatticeBasis { rows }
    }

    pub fn from_integers(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        Self::new(rows.into_iter().map(|r| r.into_iter().map(BigRational::from_integer).collect()).collect())
    }

    fn unchecked(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::InvalidBasis("no rows".into()));
        };
        let cols = first.len();
        if cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidBasis("rows must be nonempty and of equal length".into()));
        }
        if rows.len() > cols {
            return Err(Error::DependentBasis);
        }
        Ok(LatticeBasis { rows })
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    /// (rows, columns).
    pub fn dimension(&self) -> (usize, usize) {
        (self.rows.len(), self.rows[0].len())
    }

    /// Integer rows `s * b_i` for the least common denominator `s`.
    pub fn to_integers(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let scale = self.rows.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let rows = self.rows.iter().map(|r| r.iter().map(|x| (x * &scale).to_integer()).collect()).collect();
        (rows, scale)
    }

    /// `rows / scale`; inverse of [`Self::to_integers`].
    pub(crate) fn from_scaled(rows: Vec<Vec<BigInt>>, scale: &BigInt) -> Result<Self> {
        Self::unchecked(
            rows.into_iter().map(|r| r.into_iter().map(|x| BigRational::new(x, scale.clone())).collect()).collect(),
        )
    }

    /// `det(B Bᵀ)` by fraction-free elimination; zero iff the rows are
    /// dependent.
    pub fn gram_determinant(&self) -> BigRational {
        let (ints, scale) = self.to_integers();
        let k = ints.len();
        let gram: Vec<Vec<BigInt>> = (0..k).map(|i| (0..k).map(|j| dot(&ints[i], &ints[j])).collect()).collect();
        let scale_pow = num_traits::pow(scale, 2 * k);
        BigRational::new(bareiss_determinant(gram), scale_pow)
    }
}

pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Determinant of a square integer matrix (Bareiss).
fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}
