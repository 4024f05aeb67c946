//! Coefficients of `(Re z)^{2m−1} = Σ_{j<m} (Re z)^j Re(α_j z^{2m−1−j})`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{Scalar, SparsePoly};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

fn binom(n: u32, k: u32) -> BigRational {
    BigRational::from_integer(binomial(BigInt::from(n), BigInt::from(k)))
}

fn pow2(e: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << e)
}

/// The `m × m` matching system on the monomials `z^{2m−1−b} z̄^b`, `b = 0..m−1`:
/// entry `(b, j)` is the contribution of `α_j`, nonzero only for `j ≥ b`.
pub fn lemtub_system(m: u32) -> (Matrix<BigRational>, Vec<BigRational>) {
    let size = m as usize;
    let mut a = Matrix::zeros(size, size);
    let mut rhs = Vec::with_capacity(size);
    for b in 0..m {
        for j in b..m {
            a.set(b as usize, j as usize, binom(j, b) / pow2(j + 1));
        }
        rhs.push(binom(2 * m - 1, b) / pow2(2 * m - 1));
    }
    (a, rhs)
}

/// Solve the triangular system by descending substitution and re-verify the identity.
pub fn lemtub_coefficients(m: u32) -> Result<Vec<Scalar>> {
    assert!(m >= 1, "lemtub coefficients need m ≥ 1");
    let (a, rhs) = lemtub_system(m);
    let size = m as usize;
    let mut alpha = vec![BigRational::zero(); size];
    for b in (0..size).rev() {
        let mut acc = rhs[b].clone();
        for (j, aj) in alpha.iter().enumerate().skip(b + 1) {
            acc -= a.get(b, j) * aj;
        }
        alpha[b] = acc / a.get(b, b);
    }
    let out: Vec<Scalar> = alpha.into_iter().map(Scalar::real).collect();
    if !lemtub_residual(m, &out).is_zero() {
        return Err(Error::InternalRankDrop(format!("lemtub identity fails for m = {m}")));
    }
    Ok(out)
}

/// `Σ_j (Re z)^j Re(α_j z^{2m−1−j}) − (Re z)^{2m−1}` expanded in `z, z̄`.
pub fn lemtub_residual(m: u32, alpha: &[Scalar]) -> SparsePoly {
    let z = SparsePoly::z(1, 0);
    let half = Scalar::from_frac(1, 2);
    let x = (&z + &z.conjugate()).scale(&half);
    let mut rhs = SparsePoly::zero(1);
    for (j, a) in alpha.iter().enumerate() {
        let hol = z.pow(2 * m - 1 - j as u32).scale(a);
        let re = (&hol + &hol.conjugate()).scale(&half);
        rhs = &rhs + &(&x.pow(j as u32) * &re);
    }
    &rhs - &x.pow(2 * m - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(lemtub_coefficients(1).unwrap(), vec![Scalar::from(1)]);
        assert_eq!(lemtub_coefficients(2).unwrap(), vec![Scalar::from_frac(-1, 2), Scalar::from_frac(3, 2)]);
        for m in 1..=6 {
            let a = lemtub_coefficients(m).unwrap();
            assert!(a.iter().all(|c| !c.is_zero()));
            assert!(lemtub_residual(m, &a).is_zero());
            assert_eq!(lemtub_system(m).0.rank(), m as usize);
        }
    }
}
