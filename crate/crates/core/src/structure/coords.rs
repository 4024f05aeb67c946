//! Weight-preserving polynomial changes of coordinates
//! `z* = Φ(z)`, `w* = s·w + h(z)` with `s` real and `Φ` polynomially invertible.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{rational_str, Scalar, SparsePoly, Var};
use crate::tangency::VectorField;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CoordinateChange {
    pub label: String,
    /// `z*_j = z_forward[j](z)`.
    pub z_forward: Vec<SparsePoly>,
    /// `z_j = z_inverse[j](z*)`.
    pub z_inverse: Vec<SparsePoly>,
    #[serde(with = "rational_str")]
    pub w_scale: BigRational,
    /// `h(z)`, holomorphic.
    pub w_shift: SparsePoly,
}

impl CoordinateChange {
    fn identity(n: usize, label: String) -> Self {
        CoordinateChange {
            label,
            z_forward: SparsePoly::identity_z(n),
            z_inverse: SparsePoly::identity_z(n),
            w_scale: BigRational::one(),
            w_shift: SparsePoly::zero(n),
        }
    }

    /// `z*_l = c·z_l`.
    pub fn scale_z(n: usize, l: usize, c: &Scalar) -> Self {
        let mut ch = CoordinateChange::identity(n, format!("z{} → ({c})·z{}", l + 1, l + 1));
        ch.z_forward[l] = SparsePoly::z(n, l).scale(c);
        ch.z_inverse[l] = SparsePoly::z(n, l).scale(&c.inv());
        ch
    }

    /// `z*_l = z_l + q(z')` with `q` free of `z_l`.
    pub fn translate_z(n: usize, l: usize, q: &SparsePoly) -> Self {
        assert_eq!(q.partial(Var::Z(l)), SparsePoly::zero(n), "translation must not involve the translated variable");
        let mut ch = CoordinateChange::identity(n, format!("z{} → z{} + {q}", l + 1, l + 1));
        ch.z_forward[l] = &SparsePoly::z(n, l) + q;
        ch.z_inverse[l] = &SparsePoly::z(n, l) - q;
        ch
    }

    /// `w* = w + h(z)`.
    pub fn shift_w(n: usize, h: &SparsePoly) -> Self {
        let mut ch = CoordinateChange::identity(n, format!("w → w + {h}"));
        ch.w_shift = h.clone();
        ch
    }

    /// `w* = s·w`.
    pub fn scale_w(n: usize, s: &BigRational) -> Self {
        let mut ch = CoordinateChange::identity(n, format!("w → ({})·w", Scalar::real(s.clone())));
        ch.w_scale = s.clone();
        ch
    }

    fn n(&self) -> usize {
        self.z_forward.len()
    }

    fn s(&self) -> Scalar {
        Scalar::real(self.w_scale.clone())
    }

    /// Old `w` in new coordinates: `(w* − h(Ψ(z*)))/s`.
    fn w_inverse(&self) -> SparsePoly {
        let n = self.n();
        let h_new = self.w_shift.substitute(&self.z_inverse, &SparsePoly::w(n));
        (&SparsePoly::w(n) - &h_new).scale(&self.s().inv())
    }

    /// New `w*` in old coordinates.
    fn w_forward(&self) -> SparsePoly {
        &SparsePoly::w(self.n()).scale(&self.s()) + &self.w_shift
    }

    /// `P*` with `{Im w = P}` mapped onto `{Im w* = P*}`.
    pub fn transform_p(&self, p: &SparsePoly) -> SparsePoly {
        let n = self.n();
        let old = &p.scale(&self.s()) + &self.w_shift.imag_part();
        old.substitute(&self.z_inverse, &SparsePoly::w(n))
    }

    /// Express a field written in the new coordinates in the old ones.
    pub fn pullback(&self, y: &VectorField) -> VectorField {
        let n = self.n();
        let (zf, wf) = (&self.z_forward, self.w_forward());
        let f_new: Vec<SparsePoly> = y.f.iter().map(|p| p.substitute(zf, &wf)).collect();
        let g_new = y.g.substitute(zf, &wf);
        let f: Vec<SparsePoly> = (0..n)
            .map(|k| {
                // Y(z_k) = Σ_j ∂Ψ_k/∂z*_j · F̃_j, evaluated at the old point.
                (0..n).fold(SparsePoly::zero(n), |acc, j| {
                    let d = self.z_inverse[k].partial(Var::Z(j));
                    if d.is_zero() {
                        acc
                    } else {
                        &acc + &(&d.substitute(zf, &wf) * &f_new[j])
                    }
                })
            })
            .collect();
        let mut g = g_new;
        for (j, fj) in f.iter().enumerate() {
            g = &g - &(&self.w_shift.partial(Var::Z(j)) * fj);
        }
        VectorField { f, g: g.scale(&self.s().inv()), weight: y.weight }
    }

    /// Express a field written in the old coordinates in the new ones.
    pub fn forward(&self, y: &VectorField) -> VectorField {
        let n = self.n();
        let zi = &self.z_inverse;
        let wi = self.w_inverse();
        let f: Vec<SparsePoly> = self.z_forward.iter().map(|phi| y.apply(phi).substitute(zi, &wi)).collect();
        let g = y.apply(&self.w_forward()).substitute(zi, &wi);
        debug_assert_eq!(f.len(), n);
        VectorField { f, g, weight: y.weight }
    }
}

/// Apply a sequence of changes to `P`.
pub fn transform_p_all(changes: &[CoordinateChange], p: &SparsePoly) -> SparsePoly {
    changes.iter().fold(p.clone(), |acc, c| c.transform_p(&acc))
}

/// Pull a field back through a sequence of changes (applied in order).
pub fn pullback_all(changes: &[CoordinateChange], y: &VectorField) -> VectorField {
    changes.iter().rev().fold(y.clone(), |acc, c| c.pullback(&acc))
}

pub fn forward_all(changes: &[CoordinateChange], y: &VectorField) -> VectorField {
    changes.iter().fold(y.clone(), |acc, c| c.forward(&acc))
}
