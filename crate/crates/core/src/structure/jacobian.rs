//! Jacobian determinants of holomorphic polynomial maps.

use num_traits::Zero;

use crate::algebra::{SparsePoly, Var};
use crate::error::{Error, Result};

/// `∂R_i/∂z_{vars[k]}`, rows indexed by `i`.
pub fn jacobian_matrix(r: &[SparsePoly], vars: &[usize]) -> Result<Vec<Vec<SparsePoly>>> {
    if r.len() != vars.len() {
        return Err(Error::DimensionMismatch { expected: vars.len(), found: r.len() });
    }
    Ok(r.iter().map(|p| vars.iter().map(|&k| p.partial(Var::Z(k))).collect()).collect())
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &[Vec<SparsePoly>], n: usize) -> SparsePoly {
    match m.len() {
        0 => SparsePoly::one(n),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        size => {
            let mut out = SparsePoly::zero(n);
            for col in 0..size {
                if m[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<SparsePoly>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != col).map(|(_, p)| p.clone()).collect()).collect();
                let term = &m[0][col] * &determinant(&minor, n);
                out = if col % 2 == 0 { &out + &term } else { &out - &term };
            }
            out
        }
    }
}

fn nvars_of(r: &[SparsePoly]) -> usize {
    r.first().map_or(0, SparsePoly::nvars)
}

/// `Δ(R) = det(∂R_i/∂z_{vars[k]})`.
pub fn jacobian_delta(r: &[SparsePoly], vars: &[usize]) -> Result<SparsePoly> {
    Ok(determinant(&jacobian_matrix(r, vars)?, nvars_of(r)))
}

/// `Δ_j^H(R)`: the Jacobian determinant with column `j` (0-based) replaced by `H`.
pub fn jacobian_delta_h(r: &[SparsePoly], h: &[SparsePoly], j: usize, vars: &[usize]) -> Result<SparsePoly> {
    if h.len() != r.len() {
        return Err(Error::DimensionMismatch { expected: r.len(), found: h.len() });
    }
    if j >= vars.len() {
        return Err(Error::DimensionMismatch { expected: vars.len(), found: j + 1 });
    }
    let mut m = jacobian_matrix(r, vars)?;
    for (row, hi) in m.iter_mut().zip(h) {
        row[j] = hi.clone();
    }
    Ok(determinant(&m, nvars_of(r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Scalar;

    #[test]
    fn small_determinants() {
        let z = |j| SparsePoly::z(3, j);
        assert_eq!(jacobian_delta(&[z(1).pow(2)], &[1]).unwrap(), z(1).scale(&Scalar::from(2)));
        assert_eq!(jacobian_delta(&[z(1), z(2)], &[1, 2]).unwrap(), SparsePoly::one(3));
        let r = [&z(1) * &z(2), z(2).pow(2)];
        let h = [z(2), SparsePoly::zero(3)];
        assert_eq!(jacobian_delta_h(&r, &h, 0, &[1, 2]).unwrap(), z(2).pow(2).scale(&Scalar::from(2)));
        assert_eq!(jacobian_delta(&r, &[1, 2]).unwrap(), z(2).pow(2).scale(&Scalar::from(2)));
        assert!(matches!(jacobian_delta(&r, &[1]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn cofactor_matches_product_rule() {
        // Triangular 3×3 map: determinant is the product of the diagonal partials.
        let z = |j| SparsePoly::z(3, j);
        let r = [z(0).pow(2), &z(1) + &z(0).pow(3), &z(2).pow(3) + &(&z(0) * &z(1))];
        let d = jacobian_delta(&r, &[0, 1, 2]).unwrap();
        let expected = &(&z(0).scale(&Scalar::from(2)) * &SparsePoly::one(3)) * &z(2).pow(2).scale(&Scalar::from(3));
        assert_eq!(d, expected);
    }
}
