//! The tangency equation and the graded decomposition of `aut(M_H, 0)`.
//!
//! A field `Y = Σ F_j ∂_{z_j} + G ∂_w` is an infinitesimal automorphism of
//! `{Im w = P}` when `Re Y (Im w − P) = 0` on the model, i.e. when
//! `½ Im G − Re Σ F_j P_{z_j}` vanishes after `w ↦ u + iP`.

mod field;

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{holo_monomials_of_weight, substitute_w_unchecked, weight_str, Monomial, Scalar, SparsePoly, Var, Weight};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, SparseEchelon};
use crate::model::{is_holomorphically_nondegenerate, ModelHypersurface, NondegeneracyVerdict, DEFAULT_DEGENERACY_BOUND};

pub use field::{lie_bracket, VectorField};

/// Residual of `Y` on `{Im w = P}` for any real `P` (weights are not checked).
pub fn residual_for(y: &VectorField, p: &SparsePoly) -> SparsePoly {
    let half_over_i = Scalar::new(BigRational::zero(), -BigRational::new(1.into(), 2.into()));
    let mut e = y.g.scale(&half_over_i);
    for (j, f) in y.f.iter().enumerate() {
        if !f.is_zero() {
            e = &e - &(f * &p.partial(Var::Z(j)));
        }
    }
    substitute_w_unchecked(&e, p).real_part()
}

/// `½ Im G − Re Σ F_j ∂P/∂z_j` on `w = u + iP`; zero iff `Y ∈ aut(M_H, 0)`.
pub fn tangency_residual(y: &VectorField, m: &ModelHypersurface) -> Result<SparsePoly> {
    if y.nvars() != m.n {
        return Err(Error::DimensionMismatch { expected: m.n, found: y.nvars() });
    }
    if !y.has_weights(m.lambdas()) {
        return Err(Error::WeightMismatch(format!("field {y} is not homogeneous of weight {}", y.weight)));
    }
    Ok(residual_for(y, &m.p))
}

pub fn is_tangent(y: &VectorField, m: &ModelHypersurface) -> bool {
    tangency_residual(y, m).map(|r| r.is_zero()).unwrap_or(false)
}

/// All weights in `[−1, 1]` carried by some monomial field.
pub fn candidate_weights(m: &ModelHypersurface) -> Vec<Weight> {
    candidate_weights_for(m.lambdas())
}

pub fn candidate_weights_for(lambdas: &[Weight]) -> Vec<Weight> {
    let one = Weight::one();
    let two = Weight::from_integer(2);
    let mut sums = BTreeSet::new();
    let mut frontier = vec![Weight::zero()];
    sums.insert(Weight::zero());
    while let Some(s) = frontier.pop() {
        for step in lambdas.iter().chain(std::iter::once(&one)) {
            let t = s + step;
            if t <= two && sums.insert(t) {
                frontier.push(t);
            }
        }
    }
    let mut out = BTreeSet::new();
    for s in &sums {
        for shift in lambdas.iter().chain(std::iter::once(&one)) {
            let mu = s - shift;
            if mu >= -one && mu <= one {
                out.insert(mu);
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GradedComponent {
    #[serde(with = "weight_str")]
    pub weight: Weight,
    pub basis: Vec<VectorField>,
}

impl GradedComponent {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }
}

/// Slot of one complex unknown: the coefficient of `mono` in `F_j` (`Some(j)`) or in `G` (`None`).
#[derive(Clone, Debug)]
struct Slot {
    target: Option<usize>,
    mono: Monomial,
}

fn slots(lambdas: &[Weight], mu: Weight) -> Vec<Slot> {
    let mut out = Vec::new();
    for (j, l) in lambdas.iter().enumerate() {
        if mu + l >= Weight::zero() {
            for mono in holo_monomials_of_weight(lambdas, mu + l) {
                out.push(Slot { target: Some(j), mono });
            }
        }
    }
    if mu + Weight::one() >= Weight::zero() {
        for mono in holo_monomials_of_weight(lambdas, mu + Weight::one()) {
            out.push(Slot { target: None, mono });
        }
    }
    out
}

fn slot_field(n: usize, mu: Weight, s: &Slot, c: &Scalar) -> VectorField {
    let mut y = VectorField::zero(n, mu);
    match s.target {
        Some(j) => y.f[j].add_term(s.mono.clone(), c),
        None => y.g.add_term(s.mono.clone(), c),
    }
    y
}

/// Kernel of the tangency system at weight `μ` over ℝ, as vectors of real unknowns
/// `(Re c_0, Im c_0, Re c_1, …)` indexed like `slots`.
fn tangency_kernel(m: &ModelHypersurface, slots: &[Slot], order: &[usize]) -> Vec<Vec<BigRational>> {
    let n = m.n;
    let dz: Vec<SparsePoly> = (0..n).map(|j| m.p.partial(Var::Z(j))).collect();
    let max_w = slots.iter().map(|s| s.mono.p).max().unwrap_or(0);
    let w_sub = &crate::algebra::re_w(n) + &m.p.scale(&Scalar::i());
    let mut w_pows = vec![SparsePoly::one(n)];
    for k in 1..=max_w as usize {
        w_pows.push(&w_pows[k - 1] * &w_sub);
    }
    let half_over_i = Scalar::new(BigRational::zero(), -BigRational::new(1.into(), 2.into()));

    // Column index for unknown (slot k, part r) after reordering.
    let mut position = vec![0usize; slots.len()];
    for (pos, &k) in order.iter().enumerate() {
        position[k] = pos;
    }
    let mut rows: BTreeMap<(Monomial, bool), BTreeMap<usize, BigRational>> = BTreeMap::new();
    for (k, s) in slots.iter().enumerate() {
        let z_part = Monomial::holo(s.mono.alpha.clone(), 0);
        let base = &w_pows[s.mono.p as usize];
        let e = match s.target {
            Some(j) => (&dz[j] * base).mul_monomial(&z_part, &Scalar::from(-1)),
            None => base.mul_monomial(&z_part, &half_over_i),
        };
        // Re(c·E) = Re c · Re E − Im c · Im E, with Re E, Im E real-type polynomials.
        let re_e = e.real_part();
        let im_e = e.imag_part();
        for (part, poly, sign) in [(0usize, &re_e, 1i64), (1, &im_e, -1)] {
            let col = 2 * position[k] + part;
            for (mono, c) in poly.terms() {
                for (is_im, v) in [(false, &c.re), (true, &c.im)] {
                    if !v.is_zero() {
                        let v = if sign < 0 { -v.clone() } else { v.clone() };
                        rows.entry((mono.clone(), is_im)).or_default().insert(col, v);
                    }
                }
            }
        }
    }
    let mut ech = SparseEchelon::new(2 * slots.len());
    for (_, row) in rows {
        ech.insert(row);
    }
    ech.kernel()
        .into_iter()
        .map(|v| {
            let mut out = vec![BigRational::zero(); v.len()];
            for (k, &pos) in position.iter().enumerate() {
                out[2 * k] = v[2 * pos].clone();
                out[2 * k + 1] = v[2 * pos + 1].clone();
            }
            out
        })
        .collect()
}

fn field_from_vector(n: usize, mu: Weight, slots: &[Slot], v: &[BigRational]) -> VectorField {
    let mut y = VectorField::zero(n, mu);
    for (k, s) in slots.iter().enumerate() {
        let c = Scalar::new(v[2 * k].clone(), v[2 * k + 1].clone());
        if !c.is_zero() {
            y = y.add(&slot_field(n, mu, s, &c));
        }
    }
    y
}

/// Basis of the weight-`μ` component of `aut(M_H, 0)`.
pub fn graded_component(m: &ModelHypersurface, mu: Weight) -> GradedComponent {
    let sl = slots(m.lambdas(), mu);
    let order: Vec<usize> = (0..sl.len()).collect();
    let basis = tangency_kernel(m, &sl, &order).iter().map(|v| field_from_vector(m.n, mu, &sl, v)).collect();
    GradedComponent { weight: mu, basis }
}

/// Weight-`μ` kernel split into the rigid subspace and representatives of the
/// complement, the latter pivoting on the highest power of `w`.
pub fn split_component(m: &ModelHypersurface, mu: Weight) -> (GradedComponent, GradedComponent) {
    let sl = slots(m.lambdas(), mu);
    let mut order: Vec<usize> = (0..sl.len()).collect();
    order.sort_by_key(|&k| (std::cmp::Reverse(sl[k].mono.p), k));
    let kernel = tangency_kernel(m, &sl, &order);
    let mut rigid = GradedComponent { weight: mu, basis: Vec::new() };
    let mut nonrigid = GradedComponent { weight: mu, basis: Vec::new() };
    if kernel.is_empty() {
        return (rigid, nonrigid);
    }
    // Re-express the kernel basis with columns in pivot order and reduce: rows whose
    // pivot falls past the w-dependent block vanish on every w-dependent unknown.
    let permuted: Vec<Vec<BigRational>> =
        kernel.iter().map(|v| order.iter().flat_map(|&k| [v[2 * k].clone(), v[2 * k + 1].clone()]).collect()).collect();
    let (r, pivots) = Matrix::from_rows(permuted).rref();
    let w_block = 2 * order.iter().take_while(|&&k| sl[k].mono.p > 0).count();
    for (i, &pc) in pivots.iter().enumerate() {
        let mut v = vec![BigRational::zero(); 2 * sl.len()];
        for (pos, &k) in order.iter().enumerate() {
            v[2 * k] = r.get(i, 2 * pos).clone();
            v[2 * k + 1] = r.get(i, 2 * pos + 1).clone();
        }
        let y = field_from_vector(m.n, mu, &sl, &v);
        if pc < w_block {
            nonrigid.basis.push(y);
        } else {
            rigid.basis.push(y);
        }
    }
    (rigid, nonrigid)
}

/// The decomposition `g_{−1} ⊕ ⊕ g_{−μ_j} ⊕ g_0 ⊕ g_c ⊕ g_nc ⊕ g_1`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AutDecomposition {
    /// Every nonzero graded component, ascending in weight.
    pub components: Vec<GradedComponent>,
    /// Rigid part of each weight in `(0, 1)`: the generalized rotations.
    pub rigid: Vec<GradedComponent>,
    /// Representatives of the non-rigid part modulo the rigid one, weights in `(0, 1)`.
    pub nc: Vec<GradedComponent>,
    /// `g_1 ≠ 0`.
    pub transversal: bool,
}

impl AutDecomposition {
    pub fn component(&self, mu: Weight) -> Option<&GradedComponent> {
        self.components.iter().find(|c| c.weight == mu)
    }

    pub fn dim_at(&self, mu: Weight) -> usize {
        self.component(mu).map_or(0, GradedComponent::dim)
    }

    pub fn total_dim(&self) -> usize {
        self.components.iter().map(GradedComponent::dim).sum()
    }

    pub fn g_c_dim(&self) -> usize {
        self.rigid.iter().map(GradedComponent::dim).sum()
    }

    pub fn g_nc_dim(&self) -> usize {
        self.nc.iter().map(GradedComponent::dim).sum()
    }

    pub fn g1_dim(&self) -> usize {
        self.dim_at(Weight::one())
    }

    /// Shifts of weight strictly between −1 and 0.
    pub fn shifts(&self) -> impl Iterator<Item = &GradedComponent> {
        self.components.iter().filter(|c| c.weight > -Weight::one() && c.weight < Weight::zero())
    }

    pub fn g_c_fields(&self) -> impl Iterator<Item = &VectorField> {
        self.rigid.iter().flat_map(|c| c.basis.iter())
    }

    pub fn g_nc_fields(&self) -> impl Iterator<Item = &VectorField> {
        self.nc.iter().flat_map(|c| c.basis.iter())
    }

    pub fn all_fields(&self) -> impl Iterator<Item = &VectorField> {
        self.components.iter().flat_map(|c| c.basis.iter())
    }
}

/// Full decomposition after a nondegeneracy check with the default weight bound.
pub fn full_decomposition(m: &ModelHypersurface) -> Result<AutDecomposition> {
    full_decomposition_bounded(m, DEFAULT_DEGENERACY_BOUND)
}

pub fn full_decomposition_bounded(m: &ModelHypersurface, max_degeneracy_weight: Weight) -> Result<AutDecomposition> {
    match is_holomorphically_nondegenerate(m, max_degeneracy_weight) {
        NondegeneracyVerdict::Degenerate { .. } => Err(Error::Degenerate),
        NondegeneracyVerdict::NondegenerateUpTo { .. } => Ok(decompose(m)),
    }
}

/// The decomposition without the nondegeneracy guard.
pub fn decompose(m: &ModelHypersurface) -> AutDecomposition {
    let weights = candidate_weights(m);
    let zero = Weight::zero();
    let one = Weight::one();
    let solve = |mu: &Weight| -> (GradedComponent, Option<(GradedComponent, GradedComponent)>) {
        if *mu > zero && *mu < one {
            let (r, nr) = split_component(m, *mu);
            let mut all = r.basis.clone();
            all.extend(nr.basis.iter().cloned());
            (GradedComponent { weight: *mu, basis: all }, Some((r, nr)))
        } else {
            (graded_component(m, *mu), None)
        }
    };
    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        weights.par_iter().map(solve).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = weights.iter().map(solve).collect();

    let mut out = AutDecomposition { components: Vec::new(), rigid: Vec::new(), nc: Vec::new(), transversal: false };
    for (comp, split) in results {
        if comp.is_empty() {
            continue;
        }
        if comp.weight == one {
            out.transversal = true;
        }
        if let Some((r, nr)) = split {
            if !r.is_empty() {
                out.rigid.push(r);
            }
            if !nr.is_empty() {
                out.nc.push(nr);
            }
        }
        out.components.push(comp);
    }
    out
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldClass {
    Shift,
    Rotation,
    GeneralizedRotation,
    /// `[∂_w, …[∂_w, Y]]` taken `l` times is the rigid field `rigid`.
    Integration {
        l: u32,
        rigid: VectorField,
    },
    /// Weight one: a 2-integration of `∂_w`.
    Transversal {
        l: u32,
        rigid: VectorField,
    },
}

pub fn classify_field(y: &VectorField, m: &ModelHypersurface) -> Result<FieldClass> {
    if !tangency_residual(y, m)?.is_zero() {
        return Err(Error::NotTangent);
    }
    let one = Weight::one();
    let integrate = || {
        let mut x = y.clone();
        let mut l = 0;
        while !x.is_rigid() {
            x = x.w_derivative();
            l += 1;
        }
        (l, x)
    };
    if y.weight == one {
        let (l, rigid) = integrate();
        return Ok(FieldClass::Transversal { l, rigid });
    }
    if !y.is_rigid() {
        let (l, rigid) = integrate();
        return Ok(FieldClass::Integration { l, rigid });
    }
    Ok(if y.weight < Weight::zero() {
        FieldClass::Shift
    } else if y.weight == Weight::zero() {
        FieldClass::Rotation
    } else {
        FieldClass::GeneralizedRotation
    })
}

/// Rank test: does `y` lie in the real span of `basis`?
pub fn in_real_span(y: &VectorField, basis: &[VectorField]) -> bool {
    let coords = |f: &VectorField| -> BTreeMap<(Option<usize>, Monomial, bool), BigRational> {
        let mut out = BTreeMap::new();
        let mut put = |t: Option<usize>, p: &SparsePoly| {
            for (mono, c) in p.terms() {
                out.insert((t, mono.clone(), false), c.re.clone());
                out.insert((t, mono.clone(), true), c.im.clone());
            }
        };
        for (j, p) in f.f.iter().enumerate() {
            put(Some(j), p);
        }
        put(None, &f.g);
        out
    };
    let vecs: Vec<_> = basis.iter().chain(std::iter::once(y)).map(coords).collect();
    let keys: BTreeSet<_> = vecs.iter().flat_map(|v| v.keys().cloned()).collect();
    let row = |v: &BTreeMap<_, BigRational>| keys.iter().map(|k| v.get(k).cloned().unwrap_or_default()).collect::<Vec<_>>();
    let without = Matrix::from_rows(vecs[..basis.len()].iter().map(row).collect());
    let with = Matrix::from_rows(vecs.iter().map(row).collect());
    let r0 = if basis.is_empty() { 0 } else { without.rank() };
    if keys.is_empty() {
        return true;
    }
    with.rank() == r0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_model, WeightVector};

    fn wv(ws: &[(i64, i64)]) -> WeightVector {
        WeightVector::new(ws.iter().map(|&(a, b)| Weight::new(a, b)).collect())
    }

    fn abs2(n: usize, j: usize) -> SparsePoly {
        &SparsePoly::z(n, j) * &SparsePoly::zbar(n, j)
    }

    fn re_cubic() -> ModelHypersurface {
        let t = &SparsePoly::z(2, 0) * &SparsePoly::zbar(2, 1).pow(3);
        let p = (&t + &t.conjugate()).scale(&Scalar::from_frac(1, 2));
        validate_model(&p, &wv(&[(1, 4), (1, 4)])).unwrap()
    }

    #[test]
    fn residual_examples() {
        let m = re_cubic();
        assert!(tangency_residual(&VectorField::d_w(2), &m).unwrap().is_zero());
        let mut y = VectorField::zero(2, Weight::new(1, 2));
        y.f[0] = SparsePoly::z(2, 1).pow(3).scale(&Scalar::i());
        assert!(tangency_residual(&y, &m).unwrap().is_zero());

        let h = validate_model(&abs2(1, 0), &wv(&[(1, 2)])).unwrap();
        let mut s = VectorField::zero(1, Weight::zero());
        s.f[0] = SparsePoly::z(1, 0);
        assert_eq!(tangency_residual(&s, &h).unwrap(), abs2(1, 0).scale(&Scalar::from(-1)));
        let mut bad = VectorField::zero(1, Weight::zero());
        bad.f[0] = SparsePoly::one(1);
        assert!(matches!(tangency_residual(&bad, &h), Err(Error::WeightMismatch(_))));
    }

    #[test]
    fn candidates() {
        let c = candidate_weights_for(&[Weight::new(1, 2)]);
        for x in [(-1, 1), (-1, 2), (0, 1), (1, 2), (1, 1)] {
            assert!(c.contains(&Weight::new(x.0, x.1)));
        }
        let c = candidate_weights_for(&[Weight::new(1, 4), Weight::new(1, 4), Weight::new(1, 16)]);
        assert!(c.contains(&Weight::new(3, 4)));
    }

    #[test]
    fn sphere_dimensions() {
        let h1 = validate_model(&abs2(1, 0), &wv(&[(1, 2)])).unwrap();
        let d = full_decomposition(&h1).unwrap();
        assert_eq!(d.total_dim(), 8);
        assert_eq!(d.dim_at(Weight::zero()), 2);
        assert_eq!(d.component(-Weight::one()).unwrap().basis, vec![VectorField::d_w(1)]);
        let h2 = validate_model(&(&abs2(2, 0) + &abs2(2, 1)), &wv(&[(1, 2), (1, 2)])).unwrap();
        assert_eq!(full_decomposition(&h2).unwrap().total_dim(), 15);
    }

    #[test]
    fn cubic_decomposition() {
        let m = re_cubic();
        let d = full_decomposition(&m).unwrap();
        assert!(d.g_c_dim() >= 1);
        assert!(d.g_nc_dim() >= 1);
        assert_eq!(d.g1_dim(), 1);
        for y in d.all_fields() {
            assert!(tangency_residual(y, &m).unwrap().is_zero(), "{y}");
        }
        let mut rot = VectorField::zero(2, Weight::new(1, 2));
        rot.f[0] = SparsePoly::z(2, 1).pow(3).scale(&Scalar::i());
        assert!(in_real_span(&rot, &d.rigid[0].basis));
        assert!(d.g_c_fields().all(VectorField::is_rigid));
        assert!(d.g_nc_fields().all(|y| !y.is_rigid()));
        let scaling = VectorField::euler(m.lambdas());
        assert!(tangency_residual(&scaling, &m).unwrap().is_zero());
    }

    #[test]
    fn classification() {
        let m = re_cubic();
        assert_eq!(classify_field(&VectorField::d_w(2), &m).unwrap(), FieldClass::Shift);
        let mut rot = VectorField::zero(2, Weight::new(1, 2));
        rot.f[0] = SparsePoly::z(2, 1).pow(3).scale(&Scalar::i());
        assert_eq!(classify_field(&rot, &m).unwrap(), FieldClass::GeneralizedRotation);
        let mut s = VectorField::zero(2, Weight::zero());
        s.f[0] = SparsePoly::z(2, 0);
        assert_eq!(classify_field(&s, &m), Err(Error::NotTangent));
    }
}
