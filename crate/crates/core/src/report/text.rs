use std::fmt::Write;

use crate::algebra::{rat_to_string, weight_to_string, Weight};
use crate::model::NondegeneracyVerdict;
use crate::structure::NcCase;

use super::{AnalysisReport, WeightsSource};

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn label(mu: Weight) -> String {
    format!("g_{{{}}}", weight_to_string(&mu))
}

pub fn render_text(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "model: Im w = {}", r.polynomial);
    let src = match &r.weights_source {
        WeightsSource::Declared => "declared".to_string(),
        WeightsSource::Inferred { vertices } => format!("inferred, {} vertex candidate(s)", vertices.len()),
    };
    let _ = writeln!(s, "n = {}, weights {} ({src})", r.n, r.weights);
    if let Some(h) = &r.stripped_pluriharmonic {
        let _ = writeln!(s, "stripped pluriharmonic terms: {h}");
    }
    match &r.nondegeneracy {
        NondegeneracyVerdict::NondegenerateUpTo { bound } => {
            let _ = writeln!(s, "holomorphically nondegenerate (searched up to weight {})", weight_to_string(bound));
        }
        NondegeneracyVerdict::Degenerate { witness } => {
            let _ = writeln!(s, "holomorphically DEGENERATE: {witness} annihilates P");
            return s;
        }
    }

    if !r.dimensions.is_empty() {
        let _ = writeln!(s, "\ngraded components:");
        for d in &r.dimensions {
            let _ = write!(s, "  {:<10} weight {:>6}  dim {}", label(d.weight), weight_to_string(&d.weight), d.dim);
            if let (Some(a), Some(b)) = (d.rigid, d.nonrigid) {
                let _ = write!(s, "  (rigid {a}, non-rigid {b})");
            }
            s.push('\n');
        }
    }
    if let Some(c) = &r.component {
        for y in &c.basis {
            let _ = writeln!(s, "    {y}");
        }
    }
    if let Some(t) = r.total_dim {
        let _ = writeln!(
            s,
            "dim hol(M) = {t}; dim g_c = {}, dim g_nc = {}, dim g_1 = {}",
            r.g_c_dim.unwrap_or(0),
            r.g_nc_dim.unwrap_or(0),
            r.g1_dim.unwrap_or(0)
        );
    }

    if let Some(b) = &r.balanced {
        match &b.certificate {
            Some(c) => {
                let lp: Vec<String> = c.lambda_prime.iter().map(rat_to_string).collect();
                let _ = writeln!(s, "\nbalanced: yes, Λ' = ({})", lp.join(", "));
            }
            None => {
                let _ = writeln!(s, "\nbalanced: no");
            }
        }
        if !b.solvers_agree {
            let _ = writeln!(s, "  warning: balanced solvers disagree");
        }
    }
    for c in &r.chains {
        let _ = writeln!(s, "rigid field {}", c.field);
        match (&c.decomposition, &c.error) {
            (Some(d), _) => {
                for (k, p) in d.pairs.iter().enumerate() {
                    let _ = writeln!(s, "  chain pair {}: s = {}, length {}", k + 1, p.s, p.l);
                }
                if let Some(v) = &c.verification {
                    let _ = writeln!(s, "  verification: {}", if v.ok { "ok" } else { "FAILED" });
                }
            }
            (None, Some(e)) => {
                let _ = writeln!(s, "  no chain decomposition: {e}");
            }
            _ => {}
        }
    }
    if let Some(nc) = &r.nc {
        match &nc.case {
            NcCase::Unsupported(reason) if nc.l.is_none() => {
                let _ = writeln!(s, "non-rigid: {reason}");
            }
            NcCase::Unsupported(reason) => {
                let _ = writeln!(s, "non-rigid: unsupported ({reason})");
            }
            case => {
                let _ = writeln!(s, "non-rigid: {case:?}, m = {}", nc.m.unwrap_or(0));
                if let Some(y) = &nc.canonical_y {
                    let _ = writeln!(s, "  canonical field: {y}");
                }
            }
        }
        for c in nc.conditions.iter().filter(|c| !c.passed) {
            let _ = writeln!(s, "  condition failed: {} ({})", c.name, c.detail);
        }
    }
    for e in &r.embeddings {
        let q = &e.quadric;
        let (pos, neg) = q.signature();
        let _ = writeln!(
            s,
            "embedding {:?}: hyperquadric in C^{}, signature ({pos}, {neg}), certificate {}",
            e.kind,
            q.k,
            if e.certificate.ok() { "ok" } else { "FAILED" }
        );
    }
    if let Some(v) = &r.verdict {
        let _ = writeln!(s, "\nchain hypersurface: {}", yes_no(v.chain_hypersurface));
        let _ = writeln!(s, "balanced: {}", yes_no(v.balanced));
        if v.one_jet_determined {
            let _ = writeln!(s, "automorphisms determined by 1-jets");
        }
        for n in &v.notes {
            let _ = writeln!(s, "note: {n}");
        }
    }
    s
}
