//! The analysis pipeline and its JSON and text reports.

mod parse;
mod text;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{weight_str, SparsePoly, Weight};
use crate::embed::{balanced_transversal_field, build_balanced_embedding, build_chain_embedding, build_nc_embedding, Embedding};
use crate::error::{Error, Result};
use crate::model::{
    infer_weights, is_holomorphically_nondegenerate, strip_pluriharmonic, validate_model, ModelHypersurface, NondegeneracyVerdict,
    WeightVector, DEFAULT_DEGENERACY_BOUND,
};
use crate::structure::{
    balanced_test, chain_decomposition, diagonal_reproducing, nc_analysis_with, verify_chain, BalancedCertificate, ChainDecomposition,
    ChainVerification, NcReport,
};
use crate::tangency::{decompose, in_real_span, is_tangent, residual_for, split_component, AutDecomposition, GradedComponent, VectorField};

pub use parse::{parse_expr, parse_model, parse_weight_list, ModelSource};
pub use text::render_text;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AnalyzeOptions {
    pub weights: Option<WeightVector>,
    pub max_degeneracy_weight: Weight,
    pub skip_embedding: bool,
    /// Restrict the solve to a single weight.
    pub component: Option<Weight>,
    /// Drop pluriharmonic terms before validation.
    pub strip_pluriharmonic: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            weights: None,
            max_degeneracy_weight: DEFAULT_DEGENERACY_BOUND,
            skip_embedding: false,
            component: None,
            strip_pluriharmonic: false,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum WeightsSource {
    Declared,
    /// Chosen as the first admissible vertex.
    Inferred {
        vertices: Vec<WeightVector>,
    },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DimensionEntry {
    #[serde(with = "weight_str")]
    pub weight: Weight,
    pub dim: usize,
    /// For weights in `(0, 1)`: dimension of the rigid part.
    pub rigid: Option<usize>,
    pub nonrigid: Option<usize>,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ChainEntry {
    pub field: VectorField,
    pub decomposition: Option<ChainDecomposition>,
    pub verification: Option<ChainVerification>,
    pub error: Option<String>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BalancedEntry {
    pub certificate: Option<BalancedCertificate>,
    /// The independent diagonal-field solver agrees with the exponent system.
    pub solvers_agree: bool,
    /// `(Σ λ'_j z_j∂_j) w + w²∂_w` is tangent and lies in `g_1`.
    pub transversal_field_in_g1: Option<bool>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub balanced: bool,
    pub chain_hypersurface: bool,
    /// Neither balanced nor chain: automorphisms are determined by their 1-jets.
    pub one_jet_determined: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    /// The right-hand side as written.
    pub model: String,
    pub polynomial: SparsePoly,
    pub n: usize,
    pub weights: WeightVector,
    pub weights_source: WeightsSource,
    pub stripped_pluriharmonic: Option<SparsePoly>,
    pub nondegeneracy: NondegeneracyVerdict,
    pub dimensions: Vec<DimensionEntry>,
    pub total_dim: Option<usize>,
    pub g_c_dim: Option<usize>,
    pub g_nc_dim: Option<usize>,
    pub g1_dim: Option<usize>,
    pub decomposition: Option<AutDecomposition>,
    /// Single-weight query result.
    pub component: Option<GradedComponent>,
    pub balanced: Option<BalancedEntry>,
    pub chains: Vec<ChainEntry>,
    pub nc: Option<NcReport>,
    pub embeddings: Vec<Embedding>,
    pub verdict: Option<Verdict>,
}

impl AnalysisReport {
    pub fn is_degenerate(&self) -> bool {
        self.nondegeneracy.is_degenerate()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        render_text(self)
    }
}

/// Exit status for a failed analysis: 2 invalid model, 4 internal invariant violation.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InternalRankDrop(_) | Error::InvalidChain(_) => 4,
        Error::Degenerate => 3,
        _ => 2,
    }
}

/// Exit status of a completed report: 3 for a degenerate model, else 0.
pub fn report_exit_code(r: &AnalysisReport) -> i32 {
    if r.is_degenerate() {
        3
    } else {
        0
    }
}

fn choose_weights(p: &SparsePoly, declared: Option<WeightVector>) -> Result<(WeightVector, WeightsSource)> {
    if let Some(w) = declared {
        return Ok((w, WeightsSource::Declared));
    }
    let vertices = infer_weights(p)?;
    // Fall back to the first vertex so that validation reports the actual defect.
    let chosen = vertices
        .iter()
        .find(|w| validate_model(p, w).is_ok())
        .or(vertices.first())
        .cloned()
        .ok_or_else(|| Error::InvalidModelPolynomial("no admissible weight vector".into()))?;
    Ok((chosen, WeightsSource::Inferred { vertices }))
}

fn ensure_tangent(m: &ModelHypersurface, y: &VectorField, what: &str) -> Result<()> {
    if is_tangent(y, m) {
        Ok(())
    } else {
        Err(Error::InternalRankDrop(format!("{what} {y} failed the tangency re-check")))
    }
}

pub fn analyze(src: &ModelSource, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let (mut p, declared) = parse_model(src)?;
    let mut stripped = None;
    if opts.strip_pluriharmonic {
        let (rest, h) = strip_pluriharmonic(&p);
        if !h.is_zero() {
            stripped = Some(h);
        }
        p = rest;
    }
    let declared = opts.weights.clone().or(declared);
    if let Some(w) = &declared {
        if w.len() > p.nvars() {
            p = p.widen(w.len());
        }
    }
    let (weights, weights_source) = choose_weights(&p, declared)?;
    let m = validate_model(&p, &weights)?;
    let nondegeneracy = is_holomorphically_nondegenerate(&m, opts.max_degeneracy_weight);
    let mut report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        model: src.rhs()?.to_string(),
        polynomial: m.p.clone(),
        n: m.n,
        weights,
        weights_source,
        stripped_pluriharmonic: stripped,
        nondegeneracy,
        dimensions: Vec::new(),
        total_dim: None,
        g_c_dim: None,
        g_nc_dim: None,
        g1_dim: None,
        decomposition: None,
        component: None,
        balanced: None,
        chains: Vec::new(),
        nc: None,
        embeddings: Vec::new(),
        verdict: None,
    };
    if report.is_degenerate() {
        return Ok(report);
    }
    if let Some(mu) = opts.component {
        let (rigid, nonrigid) = split_component(&m, mu);
        let mut basis = rigid.basis.clone();
        basis.extend(nonrigid.basis.iter().cloned());
        for y in &basis {
            ensure_tangent(&m, y, "field")?;
        }
        let inside = mu > Weight::from_integer(0) && mu < Weight::from_integer(1);
        report.dimensions.push(DimensionEntry {
            weight: mu,
            dim: basis.len(),
            rigid: inside.then_some(rigid.dim()),
            nonrigid: inside.then_some(nonrigid.dim()),
        });
        report.component = Some(GradedComponent { weight: mu, basis });
        return Ok(report);
    }

    let dec = decompose(&m);
    for y in dec.all_fields() {
        ensure_tangent(&m, y, "field")?;
    }
    report.dimensions = dec
        .components
        .iter()
        .map(|c| {
            let r = dec.rigid.iter().find(|x| x.weight == c.weight).map(GradedComponent::dim);
            let nr = dec.nc.iter().find(|x| x.weight == c.weight).map(GradedComponent::dim);
            let inside = c.weight > Weight::from_integer(0) && c.weight < Weight::from_integer(1);
            DimensionEntry {
                weight: c.weight,
                dim: c.dim(),
                rigid: inside.then(|| r.unwrap_or(0)),
                nonrigid: inside.then(|| nr.unwrap_or(0)),
            }
        })
        .collect();
    report.total_dim = Some(dec.total_dim());
    report.g_c_dim = Some(dec.g_c_dim());
    report.g_nc_dim = Some(dec.g_nc_dim());
    report.g1_dim = Some(dec.g1_dim());

    // Balanced test by two independent routes.
    let cert = balanced_test(&m).filter(|c| c.check(&m.p));
    let diag = diagonal_reproducing(&m.p);
    let transversal = cert.as_ref().map(|c| {
        let y = balanced_transversal_field(c);
        is_tangent(&y, &m) && dec.component(Weight::from_integer(1)).is_some_and(|g1| in_real_span(&y, &g1.basis))
    });
    if transversal == Some(false) {
        return Err(Error::InternalRankDrop("balanced transversal field is not in g_1".into()));
    }
    report.balanced = Some(BalancedEntry {
        certificate: cert.clone(),
        solvers_agree: cert.is_some() == diag.is_some(),
        transversal_field_in_g1: transversal,
    });

    for y in dec.g_c_fields() {
        let entry = match chain_decomposition(&m, y) {
            Ok(d) => {
                let v = verify_chain(&m, y, &d);
                if !v.ok {
                    return Err(Error::InvalidChain(v.violations.join("; ")));
                }
                if !opts.skip_embedding {
                    report.embeddings.push(build_chain_embedding(&m, &d)?);
                }
                ChainEntry { field: y.clone(), decomposition: Some(d), verification: Some(v), error: None }
            }
            Err(e @ Error::InternalRankDrop(_)) => return Err(e),
            Err(e) => ChainEntry { field: y.clone(), decomposition: None, verification: None, error: Some(e.to_string()) },
        };
        report.chains.push(entry);
    }

    let nc = nc_analysis_with(&m, &dec);
    for y in [&nc.symmetry, &nc.shift, &nc.canonical_y_original].into_iter().flatten() {
        ensure_tangent(&m, y, "non-rigid field")?;
    }
    if let (Some(y), Some(p)) = (&nc.canonical_y, &nc.normalized_p) {
        if !residual_for(y, p).is_zero() {
            return Err(Error::InternalRankDrop(format!("canonical field {y} is not tangent in normalized coordinates")));
        }
    }
    if !opts.skip_embedding && nc.is_canonical() {
        if let Some(e) = build_nc_embedding(&nc) {
            report.embeddings.push(e);
        }
    }
    report.nc = Some(nc);

    if let (Some(c), false) = (&cert, opts.skip_embedding) {
        report.embeddings.push(build_balanced_embedding(&m, c));
    }
    if let Some(bad) = report.embeddings.iter().find(|e| !e.certificate.ok()) {
        return Err(Error::InternalRankDrop(format!("{:?} embedding failed its certificate", bad.kind)));
    }

    let balanced = cert.is_some();
    let chain = dec.g_c_dim() > 0;
    let mut notes = vec!["balanced test and weights are checked in the given coordinates only".to_string()];
    if !report.chains.iter().all(|c| c.decomposition.is_some()) {
        notes.push("some rigid fields are not generalized rotations with vanishing ∂w part; no chain decomposition for them".into());
    }
    report.verdict = Some(Verdict { balanced, chain_hypersurface: chain, one_jet_determined: !balanced && !chain, notes });
    report.decomposition = Some(dec);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(s: &str) -> AnalysisReport {
        analyze(&ModelSource::new(s), &AnalyzeOptions::default()).unwrap()
    }

    #[test]
    fn heisenberg() {
        let r = run("Im w = |z1|^2");
        assert_eq!(r.total_dim, Some(8));
        assert!(r.verdict.as_ref().unwrap().balanced);
        let back = AnalysisReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn one_jet_verdict() {
        let r = run("Im w = |z1|^4 + Re(z1*conj(z1)^3)");
        let v = r.verdict.unwrap();
        assert!(!v.balanced && !v.chain_hypersurface && v.one_jet_determined);
    }

    #[test]
    fn degenerate_and_invalid() {
        let r = run("Im w = |z1*z2|^2");
        assert!(r.is_degenerate());
        assert_eq!(report_exit_code(&r), 3);
        let e = analyze(&ModelSource::new("Im w = z1^2"), &AnalyzeOptions::default()).unwrap_err();
        assert_eq!(exit_code(&e), 2);
    }
}
