//! Sparse polynomials in `z_1..z_n, z̄_1..z̄_n, w, w̄` over Gaussian rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::scalar::{rat, Scalar};

/// Weighted degrees and weights are small rationals.
pub type Weight = Rational64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    Z(usize),
    Zbar(usize),
    W,
    Wbar,
}

/// Exponent record `z^alpha · z̄^beta · w^p · w̄^q`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Monomial {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub p: u32,
    pub q: u32,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial { alpha: vec![0; n], beta: vec![0; n], p: 0, q: 0 }
    }

    pub fn holo(alpha: Vec<u32>, p: u32) -> Self {
        let n = alpha.len();
        Monomial { alpha, beta: vec![0; n], p, q: 0 }
    }

    pub fn mixed(alpha: Vec<u32>, beta: Vec<u32>) -> Self {
        Monomial { alpha, beta, p: 0, q: 0 }
    }

    pub fn var(n: usize, v: Var) -> Self {
        let mut m = Monomial::one(n);
        match v {
            Var::Z(j) => m.alpha[j] = 1,
            Var::Zbar(j) => m.beta[j] = 1,
            Var::W => m.p = 1,
            Var::Wbar => m.q = 1,
        }
        m
    }

    pub fn nvars(&self) -> usize {
        self.alpha.len()
    }

    pub fn degree(&self) -> u32 {
        self.alpha.iter().sum::<u32>() + self.beta.iter().sum::<u32>() + self.p + self.q
    }

    pub fn exponent(&self, v: Var) -> u32 {
        match v {
            Var::Z(j) => self.alpha[j],
            Var::Zbar(j) => self.beta[j],
            Var::W => self.p,
            Var::Wbar => self.q,
        }
    }

    fn exponent_mut(&mut self, v: Var) -> &mut u32 {
        match v {
            Var::Z(j) => &mut self.alpha[j],
            Var::Zbar(j) => &mut self.beta[j],
            Var::W => &mut self.p,
            Var::Wbar => &mut self.q,
        }
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial {
            alpha: self.alpha.iter().zip(&o.alpha).map(|(a, b)| a + b).collect(),
            beta: self.beta.iter().zip(&o.beta).map(|(a, b)| a + b).collect(),
            p: self.p + o.p,
            q: self.q + o.q,
        }
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.alpha.iter().zip(&o.alpha).all(|(a, b)| a <= b)
            && self.beta.iter().zip(&o.beta).all(|(a, b)| a <= b)
            && self.p <= o.p
            && self.q <= o.q
    }

    /// `o / self`, assuming `self.divides(o)`.
    pub fn quotient_of(&self, o: &Monomial) -> Monomial {
        Monomial {
            alpha: o.alpha.iter().zip(&self.alpha).map(|(a, b)| a - b).collect(),
            beta: o.beta.iter().zip(&self.beta).map(|(a, b)| a - b).collect(),
            p: o.p - self.p,
            q: o.q - self.q,
        }
    }

    pub fn conj(&self) -> Monomial {
        Monomial { alpha: self.beta.clone(), beta: self.alpha.clone(), p: self.q, q: self.p }
    }

    pub fn is_holomorphic(&self) -> bool {
        self.q == 0 && self.beta.iter().all(|&b| b == 0)
    }

    pub fn is_antiholomorphic(&self) -> bool {
        self.p == 0 && self.alpha.iter().all(|&a| a == 0)
    }

    /// Pluriharmonic in `z`: no `z̄` or no `z` exponent (w exponents ignored).
    pub fn is_pluriharmonic(&self) -> bool {
        self.alpha.iter().all(|&a| a == 0) || self.beta.iter().all(|&b| b == 0)
    }

    pub fn is_w_free(&self) -> bool {
        self.p == 0 && self.q == 0
    }

    /// κ = (p+q) + Σ (α_i+β_i) λ_i.
    pub fn weighted_degree(&self, lambdas: &[Weight]) -> Weight {
        let mut k = Weight::from_integer((self.p + self.q) as i64);
        for (i, l) in lambdas.iter().enumerate() {
            k += *l * Weight::from_integer((self.alpha[i] + self.beta[i]) as i64);
        }
        k
    }

    /// Σ α_i λ_i + p: the weight of the holomorphic part.
    pub fn holo_weight(&self, lambdas: &[Weight]) -> Weight {
        let mut k = Weight::from_integer(self.p as i64);
        for (i, l) in lambdas.iter().enumerate() {
            k += *l * Weight::from_integer(self.alpha[i] as i64);
        }
        k
    }

    pub fn antiholo_weight(&self, lambdas: &[Weight]) -> Weight {
        self.conj().holo_weight(lambdas)
    }
}

impl Ord for Monomial {
    /// Graded lexicographic on `(α, β, p, q)`.
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then_with(|| self.alpha.cmp(&o.alpha))
            .then_with(|| self.beta.cmp(&o.beta))
            .then_with(|| self.p.cmp(&o.p))
            .then_with(|| self.q.cmp(&o.q))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "PolyRepr", into = "PolyRepr")]
pub struct SparsePoly {
    n: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    nvars: usize,
    terms: Vec<(Monomial, Scalar)>,
}

impl From<PolyRepr> for SparsePoly {
    fn from(r: PolyRepr) -> Self {
        SparsePoly::from_terms(r.nvars, r.terms)
    }
}

impl From<SparsePoly> for PolyRepr {
    fn from(p: SparsePoly) -> Self {
        PolyRepr { nvars: p.n, terms: p.terms.into_iter().collect() }
    }
}

impl SparsePoly {
    pub fn zero(n: usize) -> Self {
        SparsePoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        SparsePoly::term(Monomial::one(n), c)
    }

    pub fn one(n: usize) -> Self {
        SparsePoly::constant(n, Scalar::one())
    }

    pub fn var(n: usize, v: Var) -> Self {
        SparsePoly::term(Monomial::var(n, v), Scalar::one())
    }

    pub fn z(n: usize, j: usize) -> Self {
        SparsePoly::var(n, Var::Z(j))
    }

    pub fn zbar(n: usize, j: usize) -> Self {
        SparsePoly::var(n, Var::Zbar(j))
    }

    pub fn w(n: usize) -> Self {
        SparsePoly::var(n, Var::W)
    }

    pub fn wbar(n: usize) -> Self {
        SparsePoly::var(n, Var::Wbar)
    }

    pub fn term(m: Monomial, c: Scalar) -> Self {
        let n = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        SparsePoly { n, terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Scalar)>>(n: usize, it: I) -> Self {
        let mut p = SparsePoly::zero(n);
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Largest term in graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        debug_assert_eq!(m.nvars(), self.n, "variable count mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero(self.n);
        }
        SparsePoly { n: self.n, terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Scalar) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero(self.n);
        }
        SparsePoly { n: self.n, terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> SparsePoly {
        let mut acc = SparsePoly::one(self.n);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Swap `z ↔ z̄`, `w ↔ w̄` and conjugate coefficients.
    pub fn conjugate(&self) -> SparsePoly {
        SparsePoly { n: self.n, terms: self.terms.iter().map(|(m, c)| (m.conj(), c.conj())).collect() }
    }

    /// `(p + p̄)/2`.
    pub fn real_part(&self) -> SparsePoly {
        (self + &self.conjugate()).scale(&Scalar::from_frac(1, 2))
    }

    /// `(p − p̄)/2i`.
    pub fn imag_part(&self) -> SparsePoly {
        (self - &self.conjugate()).scale(&Scalar::new(rat(0, 1), rat(-1, 2)))
    }

    pub fn partial(&self, v: Var) -> SparsePoly {
        let mut out = SparsePoly::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            *m2.exponent_mut(v) -= 1;
            out.add_term(m2, &c.scale(&super::scalar::rat_int(e as i64)));
        }
        out
    }

    /// coeff(α,β,p,q) = conj(coeff(β,α,q,p)) for every term.
    pub fn is_real_type(&self) -> bool {
        self.terms.iter().all(|(m, c)| self.coeff(&m.conj()) == c.conj())
    }

    pub fn is_holomorphic_type(&self) -> bool {
        self.terms.keys().all(Monomial::is_holomorphic)
    }

    pub fn is_w_free(&self) -> bool {
        self.terms.keys().all(Monomial::is_w_free)
    }

    pub fn max_w_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.p.max(m.q)).max().unwrap_or(0)
    }

    /// Split off terms satisfying `pred`.
    pub fn partition<F: Fn(&Monomial) -> bool>(&self, pred: F) -> (SparsePoly, SparsePoly) {
        let mut yes = SparsePoly::zero(self.n);
        let mut no = SparsePoly::zero(self.n);
        for (m, c) in &self.terms {
            if pred(m) {
                yes.terms.insert(m.clone(), c.clone());
            } else {
                no.terms.insert(m.clone(), c.clone());
            }
        }
        (yes, no)
    }

    /// Ring homomorphism `z_j ↦ z_subs[j]`, `w ↦ w_sub`, with `z̄_j`, `w̄` mapped to the conjugates.
    /// The result lives in the variable count of the substitutes.
    pub fn substitute(&self, z_subs: &[SparsePoly], w_sub: &SparsePoly) -> SparsePoly {
        assert_eq!(z_subs.len(), self.n, "one substitute per z variable");
        let target_n = w_sub.nvars();
        let zbar_subs: Vec<SparsePoly> = z_subs.iter().map(SparsePoly::conjugate).collect();
        let wbar_sub = w_sub.conjugate();
        let mut cache: BTreeMap<(Var, u32), SparsePoly> = BTreeMap::new();
        let mut power = |v: Var, e: u32| -> SparsePoly {
            if let Some(p) = cache.get(&(v, e)) {
                return p.clone();
            }
            let base = match v {
                Var::Z(j) => &z_subs[j],
                Var::Zbar(j) => &zbar_subs[j],
                Var::W => w_sub,
                Var::Wbar => &wbar_sub,
            };
            let p = base.pow(e);
            cache.insert((v, e), p.clone());
            p
        };
        let mut out = SparsePoly::zero(target_n);
        for (m, c) in &self.terms {
            let mut acc = SparsePoly::constant(target_n, c.clone());
            for j in 0..self.n {
                if m.alpha[j] > 0 {
                    acc = &acc * &power(Var::Z(j), m.alpha[j]);
                }
                if m.beta[j] > 0 {
                    acc = &acc * &power(Var::Zbar(j), m.beta[j]);
                }
            }
            if m.p > 0 {
                acc = &acc * &power(Var::W, m.p);
            }
            if m.q > 0 {
                acc = &acc * &power(Var::Wbar, m.q);
            }
            out = &out + &acc;
        }
        out
    }

    /// Identity substitutes for the z variables.
    pub fn identity_z(n: usize) -> Vec<SparsePoly> {
        (0..n).map(|j| SparsePoly::z(n, j)).collect()
    }

    /// Embed into a polynomial ring with `n2 ≥ n` z-variables (extra variables absent).
    pub fn widen(&self, n2: usize) -> SparsePoly {
        assert!(n2 >= self.n);
        let pad = |v: &Vec<u32>| {
            let mut v = v.clone();
            v.resize(n2, 0);
            v
        };
        SparsePoly {
            n: n2,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial { alpha: pad(&m.alpha), beta: pad(&m.beta), p: m.p, q: m.q }, c.clone()))
                .collect(),
        }
    }

    /// Multivariate division by a single divisor in graded-lex order.
    /// For one divisor the remainder vanishes iff the divisor divides `self`.
    pub fn div_rem(&self, d: &SparsePoly) -> (SparsePoly, SparsePoly) {
        let (lm, lc) = d.leading_term().expect("division by zero polynomial");
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rest = self.clone();
        let mut quot = SparsePoly::zero(self.n);
        let mut rem = SparsePoly::zero(self.n);
        while let Some((m, c)) = rest.leading_term() {
            let (m, c) = (m.clone(), c.clone());
            if lm.divides(&m) {
                let qm = lm.quotient_of(&m);
                let qc = &c / &lc;
                rest = &rest - &d.mul_monomial(&qm, &qc);
                quot.add_term(qm, &qc);
            } else {
                rest.terms.remove(&m);
                rem.add_term(m, &c);
            }
        }
        (quot, rem)
    }

    /// Exact quotient if `d` divides `self`.
    pub fn exact_div(&self, d: &SparsePoly) -> Option<SparsePoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }
}

impl Zero for SparsePoly {
    fn zero() -> Self {
        SparsePoly::zero(0)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<'a> Add<&'a SparsePoly> for &'a SparsePoly {
    type Output = SparsePoly;
    fn add(self, o: &SparsePoly) -> SparsePoly {
        let (mut acc, other) = if self.terms.len() >= o.terms.len() { (self.clone(), o) } else { (o.clone(), self) };
        for (m, c) in &other.terms {
            acc.add_term(m.clone(), c);
        }
        acc
    }
}

impl<'a> Sub<&'a SparsePoly> for &'a SparsePoly {
    type Output = SparsePoly;
    fn sub(self, o: &SparsePoly) -> SparsePoly {
        let mut acc = self.clone();
        for (m, c) in &o.terms {
            acc.add_term(m.clone(), &-c);
        }
        acc
    }
}

impl<'a> Mul<&'a SparsePoly> for &'a SparsePoly {
    type Output = SparsePoly;
    fn mul(self, o: &SparsePoly) -> SparsePoly {
        let mut acc = SparsePoly::zero(self.n.max(o.n));
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                acc.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        acc
    }
}

impl Add for SparsePoly {
    type Output = SparsePoly;
    fn add(self, o: SparsePoly) -> SparsePoly {
        &self + &o
    }
}

impl Sub for SparsePoly {
    type Output = SparsePoly;
    fn sub(self, o: SparsePoly) -> SparsePoly {
        &self - &o
    }
}

impl Mul for SparsePoly {
    type Output = SparsePoly;
    fn mul(self, o: SparsePoly) -> SparsePoly {
        &self * &o
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        self.scale(&Scalar::from(-1))
    }
}

impl Neg for SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        -&self
    }
}

fn write_factor(f: &mut fmt::Formatter<'_>, first: &mut bool, name: &str, e: u32) -> fmt::Result {
    if e == 0 {
        return Ok(());
    }
    if !*first {
        write!(f, "*")?;
    }
    *first = false;
    if e == 1 {
        write!(f, "{name}")
    } else {
        write!(f, "{name}^{e}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, &a) in self.alpha.iter().enumerate() {
            write_factor(f, &mut first, &format!("z{}", j + 1), a)?;
        }
        for (j, &b) in self.beta.iter().enumerate() {
            write_factor(f, &mut first, &format!("conj(z{})", j + 1), b)?;
        }
        write_factor(f, &mut first, "w", self.p)?;
        write_factor(f, &mut first, "conj(w)", self.q)?;
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

impl fmt::Display for SparsePoly {
    /// Renders in the model-expression syntax accepted by the parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let is_one_mon = m.degree() == 0;
            let negative = (c.is_real() && c.re < super::scalar::rat_int(0)) || (c.is_imaginary() && c.im < super::scalar::rat_int(0));
            let (sign, mag) = if negative { ("-", -c) } else { ("+", c.clone()) };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag.is_one() && !is_one_mon {
                write!(f, "{m}")?;
            } else if is_one_mon {
                write!(f, "{mag}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
