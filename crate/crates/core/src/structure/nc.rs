//! Canonical forms of models whose symmetry algebra has a non-rigid part.
//!
//! A non-rigid generalized rotation `Y` integrates the shift `X = [∂_w, Y]`.
//! When `X` translates a single coordinate `z_l`, the model is put in
//! coordinates where `X = i∂_{z_l}`, `P = Σ_{k≤m} x_l^k P_k(z')`, and the
//! canonical `Y` is built and checked for `m = 2` and for `m = 1`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::balanced::{balanced_weights, diagonal_field};
use super::coords::{forward_all, pullback_all, transform_p_all, CoordinateChange};
use super::hermitian::HermitianForm;
use super::jacobian::{jacobian_delta, jacobian_delta_h};
use crate::algebra::{Monomial, Scalar, SparsePoly, Weight};
use crate::linalg::Matrix;
use crate::model::{strip_pluriharmonic, ModelHypersurface};
use crate::tangency::{decompose, residual_for, tangency_residual, AutDecomposition, VectorField};

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "reason", rename_all = "snake_case")]
pub enum NcCase {
    M2Balanced,
    M1Canonical,
    Unsupported(String),
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct NcCondition {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct NcReport {
    /// Index of the distinguished variable (0-based).
    pub l: Option<usize>,
    /// Top power of `x_l` in the expansion.
    pub m: Option<u32>,
    pub case: NcCase,
    /// The non-rigid field found by the solver, in the given coordinates.
    pub symmetry: Option<VectorField>,
    /// `[∂_w, symmetry]`.
    pub shift: Option<VectorField>,
    pub changes: Vec<CoordinateChange>,
    pub normalized_p: Option<SparsePoly>,
    /// `P_0, …, P_m` in the normalized coordinates.
    pub expansion: Vec<SparsePoly>,
    pub q1: Option<SparsePoly>,
    /// The `z'` part `S` of the canonical field.
    pub s_field: Option<VectorField>,
    pub a: Option<Scalar>,
    pub b: Option<Scalar>,
    /// Canonical field in the normalized coordinates.
    pub canonical_y: Option<VectorField>,
    /// The same field pulled back to the given coordinates.
    pub canonical_y_original: Option<VectorField>,
    pub conditions: Vec<NcCondition>,
}

impl NcReport {
    fn empty() -> Self {
        NcReport {
            l: None,
            m: None,
            case: NcCase::Unsupported(String::new()),
            symmetry: None,
            shift: None,
            changes: Vec::new(),
            normalized_p: None,
            expansion: Vec::new(),
            q1: None,
            s_field: None,
            a: None,
            b: None,
            canonical_y: None,
            canonical_y_original: None,
            conditions: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> bool {
        self.conditions.push(NcCondition { name: name.into(), passed, detail: detail.into() });
        passed
    }

    fn unsupported(mut self, reason: &str) -> Self {
        self.case = NcCase::Unsupported(reason.into());
        self
    }

    pub fn is_canonical(&self) -> bool {
        matches!(self.case, NcCase::M2Balanced | NcCase::M1Canonical)
    }
}

/// Analyze `g_nc` after computing the decomposition.
pub fn nc_analysis(m: &ModelHypersurface) -> NcReport {
    nc_analysis_with(m, &decompose(m))
}

/// `Some((l, c))` when `X = c∂_{z_l} + g(z)∂_w`.
fn single_translation(x: &VectorField) -> Option<(usize, Scalar)> {
    let n = x.nvars();
    let nonzero: Vec<usize> = (0..n).filter(|&j| !x.f[j].is_zero()).collect();
    if nonzero.len() != 1 || !x.is_rigid() {
        return None;
    }
    let l = nonzero[0];
    constant_of(&x.f[l]).map(|c| (l, c))
}

fn constant_of(p: &SparsePoly) -> Option<Scalar> {
    let one = Monomial::one(p.nvars());
    p.terms().all(|(m, _)| *m == one).then(|| p.coeff(&one))
}

/// `∫ p dz_l` on holomorphic monomials.
fn integrate_z(p: &SparsePoly, l: usize) -> SparsePoly {
    let mut out = SparsePoly::zero(p.nvars());
    for (m, c) in p.terms() {
        let mut m2 = m.clone();
        m2.alpha[l] += 1;
        out.add_term(m2.clone(), &c.scale(&BigRational::new(1.into(), (m2.alpha[l] as i64).into())));
    }
    out
}

/// Group `P` by total degree in `z_l, z̄_l`, valid when `P` depends on `z_l` only through `x_l`.
pub fn expand_in_x(p: &SparsePoly, l: usize) -> Option<Vec<SparsePoly>> {
    let n = p.nvars();
    let mut parts: Vec<SparsePoly> = Vec::new();
    for (m, c) in p.terms() {
        let k = (m.alpha[l] + m.beta[l]) as usize;
        if parts.len() <= k {
            parts.resize(k + 1, SparsePoly::zero(n));
        }
        let mut m2 = m.clone();
        m2.alpha[l] = 0;
        m2.beta[l] = 0;
        parts[k].add_term(m2, c);
    }
    while parts.last().is_some_and(Zero::is_zero) {
        parts.pop();
    }
    (recombine(&parts, l, n) == *p).then_some(parts)
}

fn x_var(n: usize, l: usize) -> SparsePoly {
    (&SparsePoly::z(n, l) + &SparsePoly::zbar(n, l)).scale(&Scalar::from_frac(1, 2))
}

fn recombine(parts: &[SparsePoly], l: usize, n: usize) -> SparsePoly {
    let x = x_var(n, l);
    parts.iter().enumerate().fold(SparsePoly::zero(n), |acc, (k, pk)| &acc + &(&x.pow(k as u32) * pk))
}

fn holo_part(p: &SparsePoly) -> SparsePoly {
    p.partition(Monomial::is_holomorphic).0
}

fn is_pluriharmonic(p: &SparsePoly) -> bool {
    p.terms().all(|(m, _)| m.is_pluriharmonic())
}

/// `w* = w − 2i·hol(H)` removes the pluriharmonic part `H` of `P`.
fn strip_change(p: &SparsePoly) -> Option<CoordinateChange> {
    let (_, h) = strip_pluriharmonic(p);
    if h.is_zero() {
        return None;
    }
    Some(CoordinateChange::shift_w(p.nvars(), &holo_part(&h).scale(&Scalar::from_ints(0, -2))))
}

/// Complex coefficients `c_k` with `base + Σ c_k dirs[k]` tangent to `{Im w = P}`.
pub fn solve_affine(p: &SparsePoly, base: &VectorField, dirs: &[VectorField]) -> Option<Vec<Scalar>> {
    let r0 = residual_for(base, p);
    let cols: Vec<SparsePoly> = dirs.iter().flat_map(|d| [residual_for(d, p), residual_for(&d.scale(&Scalar::i()), p)]).collect();
    let mut monos: Vec<Monomial> = r0.terms().map(|(m, _)| m.clone()).collect();
    for c in &cols {
        monos.extend(c.terms().map(|(m, _)| m.clone()));
    }
    monos.sort();
    monos.dedup();
    if monos.is_empty() {
        return Some(vec![Scalar::zero(); dirs.len()]);
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for m in &monos {
        let at: Vec<Scalar> = cols.iter().map(|c| c.coeff(m)).collect();
        let target = -r0.coeff(m);
        rows.push(at.iter().map(|s| s.re.clone()).collect::<Vec<BigRational>>());
        rhs.push(target.re.clone());
        rows.push(at.iter().map(|s| s.im.clone()).collect());
        rhs.push(target.im);
    }
    let x = Matrix::from_rows(rows).solve(&rhs)?;
    Some(x.chunks(2).map(|c| Scalar::new(c[0].clone(), c[1].clone())).collect())
}

pub fn nc_analysis_with(m: &ModelHypersurface, dec: &AutDecomposition) -> NcReport {
    let report = NcReport::empty();
    if dec.nc.is_empty() {
        return report.unsupported("g_nc is trivial");
    }
    let mut comps: Vec<_> = dec.nc.iter().collect();
    comps.sort_by_key(|c| std::cmp::Reverse(c.weight));
    let found = comps.iter().flat_map(|c| c.basis.iter()).find_map(|y| {
        let x = y.w_derivative();
        single_translation(&x).map(|(l, c)| (y.clone(), x, l, c))
    });
    let Some((symmetry, shift, l, c)) = found else {
        return report.unsupported("no nontransversal shift is a single coordinate translation");
    };
    let mut report = NcReport { l: Some(l), symmetry: Some(symmetry), shift: Some(shift.clone()), ..report };
    analyze_at(m, report.clone(), &shift, l, &c).unwrap_or_else(|reason| {
        report.case = NcCase::Unsupported(reason);
        report
    })
}

type Step<T> = std::result::Result<T, String>;

fn analyze_at(m: &ModelHypersurface, mut report: NcReport, shift: &VectorField, l: usize, c: &Scalar) -> Step<NcReport> {
    let n = m.n;
    let mut changes = vec![CoordinateChange::scale_z(n, l, &(&Scalar::i() / c))];
    let g = forward_all(&changes, shift).g;
    let phi = integrate_z(&g, l).scale(&Scalar::i());
    if !phi.is_zero() {
        changes.push(CoordinateChange::shift_w(n, &phi));
    }
    let x = forward_all(&changes, shift);
    let translation = VectorField::d_z(n, l, Scalar::i(), m.lambdas());
    if x.f != translation.f || !x.g.is_zero() {
        return Err("could not straighten the shift to i∂_{z_l}".into());
    }
    let mut p = transform_p_all(&changes, &m.p);
    let parts = expand_in_x(&p, l).ok_or("model depends on Im z_l after straightening the shift")?;
    let top = parts.len().saturating_sub(1) as u32;
    report.m = Some(top);
    if !report.check("m ≤ 2", top <= 2, format!("m = {top}")) {
        report.changes = changes;
        return Ok(report.unsupported(&format!("m = {top} exceeds 2")));
    }
    if top == 0 {
        return Err("model does not depend on z_l".into());
    }

    let lambda_l = m.lambdas()[l];
    let mu = Weight::one() - lambda_l;
    let reapply = |changes: &Vec<CoordinateChange>| transform_p_all(changes, &m.p);

    if top == 2 {
        let c2 = constant_of(&parts[2]).filter(Scalar::is_real);
        if !report.check("P_2 is a real constant", c2.is_some(), format!("P_2 = {}", parts[2])) {
            report.changes = changes;
            return Ok(report.unsupported("P_2 is not a real constant"));
        }
        let c2 = c2.unwrap().re;
        if !c2.is_one() {
            changes.push(CoordinateChange::scale_w(n, &(BigRational::one() / &c2)));
            p = reapply(&changes);
        }
        let p1 = expand_in_x(&p, l).ok_or("expansion lost")?.get(1).cloned().unwrap_or_else(|| SparsePoly::zero(n));
        if !p1.is_zero() {
            if !report.check("P_1 is pluriharmonic", is_pluriharmonic(&p1), format!("P_1 = {p1}")) {
                report.changes = changes;
                return Ok(report.unsupported("P_1 is not pluriharmonic"));
            }
            changes.push(CoordinateChange::translate_z(n, l, &holo_part(&p1)));
            p = reapply(&changes);
        }
        let parts = expand_in_x(&p, l).ok_or("expansion lost")?;
        if let Some(ch) = strip_change(&parts[0]) {
            changes.push(ch);
            p = reapply(&changes);
        }
        let parts = expand_in_x(&p, l).ok_or("expansion lost")?;
        let p0 = parts[0].clone();
        if parts.len() != 3 || !parts[1].is_zero() || parts[2] != SparsePoly::one(n) {
            return Err("normalization to x_l² + P_0 failed".into());
        }
        let s = if p0.is_zero() {
            VectorField::zero(n, Weight::zero())
        } else {
            let lp = balanced_weights(&p0);
            let detail = lp.as_ref().map_or("no solution".to_string(), |v| format!("{v:?}"));
            if !report.check("P_0 is balanced", lp.is_some(), detail) {
                report.changes = changes;
                report.normalized_p = Some(p);
                return Ok(report.unsupported("P_0 is not balanced"));
            }
            diagonal_field(&lp.unwrap())
        };
        let zl = SparsePoly::z(n, l);
        let mut base = VectorField::zero(n, mu);
        base.f[l] = SparsePoly::w(n).scale(&Scalar::i());
        for j in 0..n {
            if j != l && !s.f[j].is_zero() {
                base.f[j] = &zl * &s.f[j];
            }
        }
        let mut da = VectorField::zero(n, mu);
        da.f[l] = zl.pow(2);
        let mut db = VectorField::zero(n, mu);
        db.g = zl.pow(3);
        let coeffs = solve_affine(&p, &base, &[da.clone(), db.clone()]).ok_or("no tangent field of the canonical m = 2 shape")?;
        let y = base.add(&da.scale(&coeffs[0])).add(&db.scale(&coeffs[1]));
        report.check("a, b nonzero", !coeffs[0].is_zero() && !coeffs[1].is_zero(), format!("a = {}, b = {}", coeffs[0], coeffs[1]));
        report.a = Some(coeffs[0].clone());
        report.b = Some(coeffs[1].clone());
        report.s_field = Some(VectorField { weight: Weight::zero(), ..s });
        report.expansion = parts;
        return finish(m, report, changes, p, y, l, NcCase::M2Balanced);
    }

    // m = 1
    let p1 = parts[1].clone();
    let plh = report.check("P_1 = Re Q_1 with Q_1 holomorphic", is_pluriharmonic(&p1), format!("P_1 = {p1}"));
    if !m.weights.is_uniform() {
        report.changes = changes;
        report.normalized_p = Some(p);
        report.expansion = parts;
        return Ok(report.unsupported("unequal weights: canonical form not guaranteed"));
    }
    if !plh {
        report.changes = changes;
        return Ok(report.unsupported("P_1 is not pluriharmonic"));
    }
    let q1 = holo_part(&p1).scale(&Scalar::from(2));
    if let Some(ch) = strip_change(&parts[0]) {
        changes.push(ch);
        p = reapply(&changes);
    }
    let parts = expand_in_x(&p, l).ok_or("expansion lost")?;
    let p0 = parts[0].clone();
    let form = HermitianForm::of(&p0).map_err(|e| e.to_string())?;
    let mut qs = vec![q1.clone()];
    qs.extend(form.basis.iter().cloned());
    let vars: Vec<usize> = (0..n).filter(|&j| j != l).collect();
    let chosen = subsets(qs.len(), vars.len()).into_iter().find_map(|idx| {
        let r: Vec<SparsePoly> = idx.iter().map(|&i| qs[i].clone()).collect();
        let d = jacobian_delta(&r, &vars).ok()?;
        (!d.is_zero()).then_some((r, d))
    });
    report.q1 = Some(q1.clone());
    report.expansion = parts.clone();
    report.changes = changes.clone();
    report.normalized_p = Some(p.clone());
    let Some((r, delta)) = chosen else {
        report.check("Q_1, …, Q_s generating", false, "every Jacobian of n−1 of them vanishes");
        return Ok(report.unsupported("Q_1, …, Q_s are not generating"));
    };
    let half_q1 = q1.scale(&Scalar::from_frac(1, 2));
    let mut s = VectorField::zero(n, mu);
    let mut divisible = true;
    for (k, &j) in vars.iter().enumerate() {
        let num = &half_q1 * &jacobian_delta_h(&r, &r, k, &vars).map_err(|e| e.to_string())?;
        match num.exact_div(&delta) {
            Some(q) => s.f[j] = q,
            None => divisible = false,
        }
    }
    if !report.check("½Q_1Δ_j^Q divisible by Δ", divisible, format!("Δ = {delta}")) {
        return Ok(report.unsupported("½Q_1Δ_j^Q is not divisible by Δ"));
    }
    let relations = s.apply(&q1) == &half_q1 * &q1 && form.basis.iter().all(|e| s.apply(e) == &half_q1 * e);
    if !report.check("S(Q_k) = ½Q_1Q_k for all k", relations, format!("S = {s}")) {
        return Ok(report.unsupported("the Cramer field does not satisfy S(Q_k) = ½Q_1Q_k"));
    }
    let zl = SparsePoly::z(n, l);
    let mut y = s.clone();
    y.f[l] = &SparsePoly::w(n).scale(&Scalar::i()) + &(&q1 * &zl);
    y.g = (&q1.pow(2) * &zl).scale(&Scalar::from_ints(0, 1).scale(&BigRational::new(1.into(), 2.into())));
    report.s_field = Some(s);
    finish(m, report, changes, p, y, l, NcCase::M1Canonical)
}

fn finish(
    m: &ModelHypersurface,
    mut report: NcReport,
    changes: Vec<CoordinateChange>,
    p: SparsePoly,
    y: VectorField,
    l: usize,
    case: NcCase,
) -> Step<NcReport> {
    let n = m.n;
    let tangent = residual_for(&y, &p).is_zero();
    report.check("canonical field tangent (normalized coordinates)", tangent, "");
    let integ = y.w_derivative();
    let integ_ok = integ.f.iter().enumerate().all(|(j, f)| if j == l { *f == SparsePoly::constant(n, Scalar::i()) } else { f.is_zero() })
        && integ.g.is_zero();
    report.check("[∂_w, Y] = i∂_{z_l}", integ_ok, "");
    let original = pullback_all(&changes, &y);
    let back = tangency_residual(&original, m).map(|r| r.is_zero()).unwrap_or(false);
    report.check("pulled-back field tangent (given coordinates)", back, "");
    report.changes = changes;
    report.normalized_p = Some(p);
    report.canonical_y = Some(y);
    report.canonical_y_original = Some(original);
    if !(tangent && integ_ok && back) {
        return Err("canonical field failed verification".into());
    }
    report.case = case;
    Ok(report)
}

/// Index subsets of size `k` of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}
