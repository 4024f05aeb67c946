//! Holomorphic polynomial maps of models into hyperquadrics, with the pushed-forward symmetry.
//!
//! Target variables are `ζ_1, …, ζ_K'` (stored as `z` variables of the target ring) and `η`
//! (stored as `w`). Every construction returns a certificate recomputed from scratch.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{Monomial, Scalar, SparsePoly, Weight};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{strip_pluriharmonic, ModelHypersurface};
use crate::structure::{
    expand_in_x, verify_chain, BalancedCertificate, ChainDecomposition, CoordinateChange, HermitianForm, NcCase, NcReport,
};
use crate::tangency::{residual_for, VectorField};

/// `Re(c·ζ_i·conj(ζ_j))`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Pairing {
    pub i: usize,
    pub j: usize,
    pub coeff: Scalar,
}

/// `{Im η = Re Σ c·ζ_i conj(ζ_j)}`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Hyperquadric {
    pub zeta_count: usize,
    /// Reported dimension count `K = zeta_count + 1`.
    pub k: usize,
    pub pairing: Vec<Pairing>,
}

impl Hyperquadric {
    pub fn new(zeta_count: usize, pairing: Vec<Pairing>) -> Self {
        Hyperquadric { zeta_count, k: zeta_count + 1, pairing }
    }

    /// `H` with `Re Σ c ζ_i ζ̄_j = Σ H_ab ζ_a ζ̄_b`.
    pub fn hermitian_matrix(&self) -> Matrix<Scalar> {
        let mut h: Matrix<Scalar> = Matrix::zeros(self.zeta_count, self.zeta_count);
        let half = Scalar::from_frac(1, 2);
        for p in &self.pairing {
            let a = h.get(p.i, p.j) + &(&p.coeff * &half);
            h.set(p.i, p.j, a);
            let b = h.get(p.j, p.i) + &(&p.coeff.conj() * &half);
            h.set(p.j, p.i, b);
        }
        h
    }

    /// The right-hand side as a polynomial in `ζ`.
    pub fn defining_poly(&self) -> SparsePoly {
        let k = self.zeta_count;
        let h = self.hermitian_matrix();
        let mut out = SparsePoly::zero(k);
        for a in 0..k {
            for b in 0..k {
                let c = h.get(a, b);
                if !c.is_zero() {
                    out = &out + &(&SparsePoly::z(k, a) * &SparsePoly::zbar(k, b)).scale(c);
                }
            }
        }
        out
    }

    /// `(positive, negative)` eigenvalue counts of the Hermitian form.
    pub fn signature(&self) -> (usize, usize) {
        signature(&self.hermitian_matrix())
    }
}

/// Inertia of a Hermitian matrix by congruence diagonalization.
pub fn signature(h: &Matrix<Scalar>) -> (usize, usize) {
    let mut m = h.clone();
    let n = m.rows();
    let (mut pos, mut neg) = (0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| !m.get(i, i).is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                let pair =
                    active.iter().flat_map(|&i| active.iter().map(move |&j| (i, j))).find(|&(i, j)| i != j && !m.get(i, j).is_zero());
                let Some((i, j)) = pair else { break };
                // Row/column i += t·(row/column j) with t chosen so the new diagonal is 2 Re(t̄ h_ij) ≠ 0.
                let t = m.get(i, j).clone();
                add_congruence(&mut m, i, j, &t);
                i
            }
        };
        let d = m.get(p, p).clone();
        if d.re > num_rational::BigRational::zero() {
            pos += 1;
        } else {
            neg += 1;
        }
        for &q in active.iter().filter(|&&q| q != p) {
            let factor = -(m.get(q, p) / &d);
            add_congruence(&mut m, q, p, &factor);
        }
        active.retain(|&q| q != p);
    }
    (pos, neg)
}

/// Row `i` += `t`·row `j`, then column `i` += `conj(t)`·column `j`.
fn add_congruence(m: &mut Matrix<Scalar>, i: usize, j: usize, t: &Scalar) {
    let n = m.rows();
    for c in 0..n {
        let v = m.get(i, c) + &(t * m.get(j, c));
        m.set(i, c, v);
    }
    let tc = t.conj();
    for r in 0..n {
        let v = m.get(r, i) + &(&tc * m.get(r, j));
        m.set(r, i, v);
    }
}

/// `η = eta(z, w)`, `ζ_i = zeta[i](z)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PolyMap {
    pub eta: SparsePoly,
    pub zeta: Vec<SparsePoly>,
}

impl PolyMap {
    /// Compose a target polynomial with the map.
    pub fn compose(&self, q: &SparsePoly) -> SparsePoly {
        q.substitute(&self.zeta, &self.eta)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RelatednessCertificate {
    pub map: PolyMap,
    pub source_field: VectorField,
    pub target_field: VectorField,
    /// `Q ∘ f = P` and `η ∘ f = w`.
    pub pullback_ok: bool,
    /// `Y(f_i) = Z_i ∘ f` for every component.
    pub related_ok: bool,
    /// `Z` is tangent to the quadric.
    pub target_tangent_ok: bool,
    pub full_rank: bool,
    pub signature: (usize, usize),
}

impl RelatednessCertificate {
    pub fn ok(&self) -> bool {
        self.pullback_ok && self.related_ok && self.target_tangent_ok && self.full_rank
    }
}

pub fn verify_certificate(q: &Hyperquadric, f: &PolyMap, p: &SparsePoly, y: &VectorField, z: &VectorField) -> RelatednessCertificate {
    let n = p.nvars();
    let shapes = f.zeta.len() == q.zeta_count && z.nvars() == q.zeta_count && y.nvars() == n;
    let pullback_ok = shapes && f.compose(&q.defining_poly()) == *p && f.eta == SparsePoly::w(n);
    let related_ok = shapes && f.zeta.iter().zip(&z.f).all(|(fi, zi)| y.apply(fi) == f.compose(zi)) && y.apply(&f.eta) == f.compose(&z.g);
    let target_tangent_ok = shapes && residual_for(z, &q.defining_poly()).is_zero();
    let h = q.hermitian_matrix();
    RelatednessCertificate {
        map: f.clone(),
        source_field: y.clone(),
        target_field: z.clone(),
        pullback_ok,
        related_ok,
        target_tangent_ok,
        full_rank: q.zeta_count == 0 || h.is_invertible(),
        signature: signature(&h),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingKind {
    Chain,
    Balanced,
    NonrigidM1,
    NonrigidM2,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Embedding {
    pub kind: EmbeddingKind,
    /// The model polynomial in the coordinates the map is written in.
    pub source_p: SparsePoly,
    pub quadric: Hyperquadric,
    pub certificate: RelatednessCertificate,
}

fn linear_field(k: usize, weight: Weight, rows: &[(usize, usize, Scalar)]) -> VectorField {
    let mut z = VectorField::zero(k, weight);
    for (target, source, c) in rows {
        if !c.is_zero() {
            z.f[*target] = &z.f[*target] + &SparsePoly::z(k, *source).scale(c);
        }
    }
    z
}

/// ζ-blocks `U^{(1)}, …, U^{(l)}, V^{(1)}, …, V^{(l)}` per pair, `Z` linear with blocks `A` and `B`.
pub fn build_chain_embedding(m: &ModelHypersurface, d: &ChainDecomposition) -> Result<Embedding> {
    let check = verify_chain(m, &d.field, d);
    if !check.ok {
        return Err(Error::InvalidChain(check.violations.join("; ")));
    }
    let mut zeta = Vec::new();
    let mut pairing = Vec::new();
    let mut rows = Vec::new();
    for pair in &d.pairs {
        let (s, l) = (pair.s, pair.l);
        let start = zeta.len();
        let u_idx = |k: usize, i: usize| start + k * s + i;
        let v_idx = |k: usize, i: usize| start + l * s + k * s + i;
        for block in pair.u.iter().chain(&pair.v) {
            zeta.extend(block.iter().cloned());
        }
        for k in 0..l {
            for i in 0..s {
                pairing.push(Pairing { i: u_idx(k, i), j: v_idx(l - 1 - k, i), coeff: Scalar::one() });
            }
        }
        for k in 0..l.saturating_sub(1) {
            for i in 0..s {
                for j in 0..s {
                    rows.push((u_idx(k, i), u_idx(k + 1, j), pair.a[k].get(i, j).clone()));
                    rows.push((v_idx(k, i), v_idx(k + 1, j), pair.b[k].get(i, j).clone()));
                }
            }
        }
    }
    let quadric = Hyperquadric::new(zeta.len(), pairing);
    let z = linear_field(zeta.len(), d.field.weight, &rows);
    let f = PolyMap { eta: SparsePoly::w(m.n), zeta };
    let certificate = verify_certificate(&quadric, &f, &m.p, &d.field, &z);
    Ok(Embedding { kind: EmbeddingKind::Chain, source_p: m.p.clone(), quadric, certificate })
}

/// `(Σ λ'_j z_j ∂_{z_j}) w + w² ∂_w`.
pub fn balanced_transversal_field(cert: &BalancedCertificate) -> VectorField {
    let n = cert.y0.nvars();
    let w = SparsePoly::w(n);
    VectorField { f: cert.y0.f.iter().map(|c| c * &w).collect(), g: w.pow(2), weight: Weight::one() }
}

/// `ζ_j = z^{α_j}`, `ζ'_j = Σ_k conj(A_jk/A_j1) z^{β_k}` per distinct `α_j`, `Z = η·Σ ζ∂_ζ + η²∂_η`.
pub fn build_balanced_embedding(m: &ModelHypersurface, cert: &BalancedCertificate) -> Embedding {
    let n = m.n;
    let mut rows: BTreeMap<Vec<u32>, Vec<(Vec<u32>, Scalar)>> = BTreeMap::new();
    for (mono, c) in m.p.terms() {
        rows.entry(mono.alpha.clone()).or_default().push((mono.beta.clone(), c.clone()));
    }
    let r = rows.len();
    let mut zeta = vec![SparsePoly::zero(n); 2 * r];
    let mut pairing = Vec::new();
    for (j, (alpha, terms)) in rows.into_iter().enumerate() {
        zeta[j] = SparsePoly::term(Monomial::holo(alpha, 0), Scalar::one());
        let lead = terms[0].1.clone();
        zeta[r + j] = SparsePoly::from_terms(n, terms.iter().map(|(b, c)| (Monomial::holo(b.clone(), 0), (c / &lead).conj())));
        pairing.push(Pairing { i: j, j: r + j, coeff: lead });
    }
    let k = 2 * r;
    let eta = SparsePoly::w(k);
    let z = VectorField { f: (0..k).map(|i| &SparsePoly::z(k, i) * &eta).collect(), g: eta.pow(2), weight: Weight::one() };
    let quadric = Hyperquadric::new(k, pairing);
    let y = balanced_transversal_field(cert);
    let f = PolyMap { eta: SparsePoly::w(n), zeta };
    let certificate = verify_certificate(&quadric, &f, &m.p, &y, &z);
    Embedding { kind: EmbeddingKind::Balanced, source_p: m.p.clone(), quadric, certificate }
}

/// Embedding of the canonical non-rigid field, written in the normalized coordinates with all
/// pluriharmonic terms removed.
pub fn build_nc_embedding(report: &NcReport) -> Option<Embedding> {
    let (l, p, y) = (report.l?, report.normalized_p.as_ref()?, report.canonical_y.as_ref()?);
    let n = p.nvars();
    let (_, harmonic) = strip_pluriharmonic(p);
    let strip = (!harmonic.is_zero()).then(|| {
        let hol = harmonic.partition(Monomial::is_holomorphic).0;
        CoordinateChange::shift_w(n, &hol.scale(&Scalar::from_ints(0, -2)))
    });
    let (ps, ys) = match &strip {
        Some(ch) => (ch.transform_p(p), ch.forward(y)),
        None => (p.clone(), y.clone()),
    };
    let p0 = expand_in_x(p, l)?.first().cloned().unwrap_or_else(|| SparsePoly::zero(n));
    let form = HermitianForm::of(&p0).ok()?;
    let r = form.rank();
    let zl = SparsePoly::z(n, l);
    let (kind, head, head_pairing, k) = match report.case {
        NcCase::M1Canonical => {
            let q1 = report.q1.clone()?;
            (EmbeddingKind::NonrigidM1, vec![zl, q1], Pairing { i: 0, j: 1, coeff: Scalar::from_frac(1, 2) }, 2)
        }
        NcCase::M2Balanced => (EmbeddingKind::NonrigidM2, vec![zl], Pairing { i: 0, j: 0, coeff: Scalar::from_frac(1, 2) }, 1),
        NcCase::Unsupported(_) => return None,
    };
    let total = k + r;
    let mut zeta = head;
    zeta.extend(form.basis.iter().cloned());
    let mut pairing = vec![head_pairing];
    for i in 0..r {
        for j in 0..r {
            let c = form.k.get(i, j);
            if !c.is_zero() && i <= j {
                // Re(c ζ_i ζ̄_j) counted once per unordered pair; diagonal entries are real.
                let coeff = if i == j { c.clone() } else { c * &Scalar::from(2) };
                pairing.push(Pairing { i: k + i, j: k + j, coeff });
            }
        }
    }
    let eta = SparsePoly::w(total);
    let zv = |i: usize| SparsePoly::z(total, i);
    let half = Scalar::from_frac(1, 2);
    let mut z = VectorField::zero(total, y.weight);
    match kind {
        EmbeddingKind::NonrigidM1 => {
            let h1 = zv(1).scale(&half);
            z.f[0] = &eta.scale(&Scalar::i()) + &(&h1 * &zv(0));
            z.f[1] = &h1 * &zv(1);
            for i in 0..r {
                z.f[k + i] = &h1 * &zv(k + i);
            }
            z.g = &h1 * &eta;
        }
        _ => {
            z.f[0] = &eta.scale(&Scalar::i()) + &zv(0).pow(2);
            for i in 0..r {
                z.f[k + i] = &zv(0) * &zv(k + i);
            }
            z.g = &zv(0) * &eta;
        }
    }
    let quadric = Hyperquadric::new(total, pairing);
    let f = PolyMap { eta: SparsePoly::w(n), zeta };
    let certificate = verify_certificate(&quadric, &f, &ps, &ys, &z);
    Some(Embedding { kind, source_p: ps, quadric, certificate })
}
