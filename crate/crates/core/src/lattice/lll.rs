use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::basis::{dot, LatticeBasis};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionParams {
    /// Lovász parameter δ in (1/4, 1].
    #[serde(with = "fraction")]
    pub lovasz_delta: BigRational,
}

/// Rationals as `"p/q"` strings.
mod fraction {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl Default for ReductionParams {
    fn default() -> Self {
        ReductionParams { lovasz_delta: BigRational::new(3.into(), 4.into()) }
    }
}

impl ReductionParams {
    pub fn new(lovasz_delta: BigRational) -> Result<Self> {
        let quarter = BigRational::new(1.into(), 4.into());
        if lovasz_delta <= quarter || lovasz_delta > BigRational::one() {
            return Err(Error::InvalidParameter(format!("lovasz_delta {lovasz_delta} is outside (1/4, 1]")));
        }
        Ok(ReductionParams { lovasz_delta })
    }

    pub fn strong() -> Self {
        ReductionParams { lovasz_delta: BigRational::new(99.into(), 100.into()) }
    }
}

/// LLL-reduces the rows of `basis` with exact arithmetic.
pub fn lll_reduce(basis: &LatticeBasis, params: &ReductionParams) -> Result<LatticeBasis> {
    lll_reduce_until(basis, params, None)
}

/// [`lll_reduce`] that gives up with [`Error::DeadlineExceeded`] once
/// `deadline` passes.
pub fn lll_reduce_until(
    basis: &LatticeBasis,
    params: &ReductionParams,
    deadline: Option<Instant>,
) -> Result<LatticeBasis> {
    let (rows, scale) = basis.to_integers();
    let reduced = IntegralLll::new(rows, params).run(deadline)?;
    LatticeBasis::from_scaled(reduced, &scale)
}

/// Integer-only LLL on Gram-Schmidt numerators: `d[i]` is the Gram
/// determinant of the first `i` rows and `lambda[k][j] = d[j+1] μ_{k,j}`.
/// Indices into `d` are shifted by one so that `d[0] = 1`.
struct IntegralLll {
    b: Vec<Vec<BigInt>>,
    d: Vec<BigInt>,
    lambda: Vec<Vec<BigInt>>,
    p: BigInt,
    q: BigInt,
}

impl IntegralLll {
    fn new(b: Vec<Vec<BigInt>>, params: &ReductionParams) -> Self {
        let n = b.len();
        IntegralLll {
            b,
            d: vec![BigInt::one(); n + 1],
            lambda: vec![vec![BigInt::zero(); n]; n],
            p: params.lovasz_delta.numer().clone(),
            q: params.lovasz_delta.denom().clone(),
        }
    }

    fn run(mut self, deadline: Option<Instant>) -> Result<Vec<Vec<BigInt>>> {
        let n = self.b.len();
        self.extend_gram_schmidt(0)?;
        let mut kmax = 0;
        let mut k = 1;
        while k < n {
            if deadline.is_some_and(|t| Instant::now() >= t) {
                return Err(Error::DeadlineExceeded);
            }
            if k > kmax {
                kmax = k;
                self.extend_gram_schmidt(k)?;
            }
            self.size_reduce(k, k - 1);
            if self.lovasz_fails(k) {
                self.swap(k, kmax);
                k = (k - 1).max(1);
            } else {
                for l in (0..k - 1).rev() {
                    self.size_reduce(k, l);
                }
                k += 1;
            }
        }
        Ok(self.b)
    }

    fn extend_gram_schmidt(&mut self, k: usize) -> Result<()> {
        for j in 0..=k {
            let mut u = dot(&self.b[k], &self.b[j]);
            for i in 0..j {
                u = (&self.d[i + 1] * &u - &self.lambda[k][i] * &self.lambda[j][i]) / &self.d[i];
            }
            if j < k {
                self.lambda[k][j] = u;
            } else {
                if u.is_zero() {
                    return Err(Error::DependentBasis);
                }
                self.d[k + 1] = u;
            }
        }
        Ok(())
    }

    fn size_reduce(&mut self, k: usize, l: usize) {
        let dl = &self.d[l + 1];
        if (&self.lambda[k][l] * 2u8).abs() <= *dl {
            return;
        }
        // nearest integer to lambda / d, halves rounded up
        let q = (&self.lambda[k][l] * 2u8 + dl).div_floor(&(dl * 2u8));
        let (head, tail) = self.b.split_at_mut(k);
        for (x, y) in tail[0].iter_mut().zip(&head[l]) {
            *x -= &q * y;
        }
        self.lambda[k][l] -= &q * dl;
        for i in 0..l {
            let t = &q * &self.lambda[l][i];
            self.lambda[k][i] -= t;
        }
    }

    /// `δ d_{k-1}² - λ² > d_k d_{k-2}` with δ = p/q, all scaled by q.
    fn lovasz_fails(&self, k: usize) -> bool {
        let (dk, dk1, dk2) = (&self.d[k + 1], &self.d[k], &self.d[k - 1]);
        let lam = &self.lambda[k][k - 1];
        &self.q * dk * dk2 < &self.p * dk1 * dk1 - &self.q * lam * lam
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.b.swap(k, k - 1);
        for j in 0..k - 1 {
            let t = std::mem::take(&mut self.lambda[k][j]);
            self.lambda[k][j] = std::mem::replace(&mut self.lambda[k - 1][j], t);
        }
        let lam = self.lambda[k][k - 1].clone();
        let (dk, dk1, dk2) = (self.d[k + 1].clone(), self.d[k].clone(), self.d[k - 1].clone());
        let new_dk1 = (&dk2 * &dk + &lam * &lam) / &dk1;
        for i in k + 1..=kmax {
            let t = self.lambda[i][k].clone();
            let lik = (&dk * &self.lambda[i][k - 1] - &lam * &t) / &dk1;
            self.lambda[i][k - 1] = (&new_dk1 * &t + &lam * &lik) / &dk;
            self.lambda[i][k] = lik;
        }
        self.d[k] = new_dk1;
    }
}
