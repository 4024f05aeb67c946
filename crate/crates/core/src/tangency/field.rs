//! Holomorphic polynomial vector fields `Σ F_j ∂_{z_j} + G ∂_w`.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{weight_str, Monomial, Scalar, SparsePoly, Var, Weight};

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct VectorField {
    /// Coefficients of `∂_{z_1}, …, ∂_{z_n}`.
    pub f: Vec<SparsePoly>,
    /// Coefficient of `∂_w`.
    pub g: SparsePoly,
    #[serde(with = "weight_str")]
    pub weight: Weight,
}

impl VectorField {
    pub fn new(f: Vec<SparsePoly>, g: SparsePoly, weight: Weight) -> Self {
        assert!(f.iter().all(|c| c.nvars() == g.nvars()), "coefficient ring mismatch");
        VectorField { f, g, weight }
    }

    pub fn zero(n: usize, weight: Weight) -> Self {
        VectorField { f: vec![SparsePoly::zero(n); n], g: SparsePoly::zero(n), weight }
    }

    /// `∂_w`, weight −1.
    pub fn d_w(n: usize) -> Self {
        let mut y = VectorField::zero(n, Weight::from_integer(-1));
        y.g = SparsePoly::one(n);
        y
    }

    /// `c·∂_{z_j}` with weight `−λ_j`.
    pub fn d_z(n: usize, j: usize, c: Scalar, lambdas: &[Weight]) -> Self {
        let mut y = VectorField::zero(n, -lambdas[j]);
        y.f[j] = SparsePoly::constant(n, c);
        y
    }

    /// The weighted Euler field `Σ λ_j z_j ∂_{z_j} + w ∂_w`.
    pub fn euler(lambdas: &[Weight]) -> Self {
        let n = lambdas.len();
        let f = (0..n).map(|j| SparsePoly::z(n, j).scale(&Scalar::from_frac(*lambdas[j].numer(), *lambdas[j].denom()))).collect();
        VectorField { f, g: SparsePoly::w(n), weight: Weight::from_integer(0) }
    }

    pub fn nvars(&self) -> usize {
        self.f.len()
    }

    pub fn is_zero(&self) -> bool {
        self.g.is_zero() && self.f.iter().all(Zero::is_zero)
    }

    /// No coefficient depends on `w`.
    pub fn is_rigid(&self) -> bool {
        self.g.is_w_free() && self.f.iter().all(SparsePoly::is_w_free)
    }

    pub fn is_holomorphic(&self) -> bool {
        self.g.is_holomorphic_type() && self.f.iter().all(SparsePoly::is_holomorphic_type)
    }

    pub fn max_w_degree(&self) -> u32 {
        self.f.iter().chain(std::iter::once(&self.g)).map(SparsePoly::max_w_degree).max().unwrap_or(0)
    }

    /// True when every `F_j` has weight `weight + λ_j` and `G` has weight `weight + 1`.
    pub fn has_weights(&self, lambdas: &[Weight]) -> bool {
        let one = Weight::from_integer(1);
        self.f.len() == lambdas.len()
            && self.f.iter().zip(lambdas).all(|(c, l)| homogeneous(c, lambdas, self.weight + l))
            && homogeneous(&self.g, lambdas, self.weight + one)
    }

    /// Apply the field as a derivation: `Σ F_j ∂p/∂z_j + G ∂p/∂w`.
    pub fn apply(&self, p: &SparsePoly) -> SparsePoly {
        let mut out = &self.g * &p.partial(Var::W);
        for (j, c) in self.f.iter().enumerate() {
            if !c.is_zero() {
                out = &out + &(c * &p.partial(Var::Z(j)));
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        VectorField { f: self.f.iter().map(|p| p.scale(c)).collect(), g: self.g.scale(c), weight: self.weight }
    }

    /// Sum of two fields of the same weight.
    pub fn add(&self, o: &VectorField) -> Self {
        VectorField { f: self.f.iter().zip(&o.f).map(|(a, b)| a + b).collect(), g: &self.g + &o.g, weight: self.weight }
    }

    pub fn sub(&self, o: &VectorField) -> Self {
        self.add(&o.scale(&Scalar::from(-1)))
    }

    /// `[∂_w, Y]`: differentiate every coefficient in `w`; weight drops by one.
    pub fn w_derivative(&self) -> Self {
        VectorField {
            f: self.f.iter().map(|p| p.partial(Var::W)).collect(),
            g: self.g.partial(Var::W),
            weight: self.weight - Weight::from_integer(1),
        }
    }

    /// Split off the part of every coefficient that does not depend on `w`.
    pub fn rigid_part(&self) -> Self {
        let keep = |p: &SparsePoly| p.partition(Monomial::is_w_free).0;
        VectorField { f: self.f.iter().map(keep).collect(), g: keep(&self.g), weight: self.weight }
    }
}

fn homogeneous(p: &SparsePoly, lambdas: &[Weight], deg: Weight) -> bool {
    p.terms().all(|(m, _)| m.weighted_degree(lambdas) == deg)
}

/// `[Y1, Y2] = Σ (Y1(F2_k) − Y2(F1_k)) ∂_k + (Y1(G2) − Y2(G1)) ∂_w`.
pub fn lie_bracket(y1: &VectorField, y2: &VectorField) -> VectorField {
    let f = y1.f.iter().zip(&y2.f).map(|(f1, f2)| &y1.apply(f2) - &y2.apply(f1)).collect();
    let g = &y1.apply(&y2.g) - &y2.apply(&y1.g);
    VectorField { f, g, weight: y1.weight + y2.weight }
}

fn coefficient(p: &SparsePoly) -> String {
    if p.len() == 1 {
        let (m, c) = p.terms().next().unwrap();
        if *m == Monomial::one(p.nvars()) {
            return match c.to_string().as_str() {
                "1" => String::new(),
                s => format!("{s}*"),
            };
        }
    }
    format!("({p})*")
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (j, c) in self.f.iter().enumerate() {
            if !c.is_zero() {
                parts.push(format!("{}∂z{}", coefficient(c), j + 1));
            }
        }
        if !self.g.is_zero() {
            parts.push(format!("{}∂w", coefficient(&self.g)));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}
