//! End-to-end analysis of a single equation and its serializable report.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fuchs::{decide, FuchsRelation, PointEvidence, Verdict};
use crate::ode::{normalize, parse_ode, LinearODE};
use crate::tolerances::Tolerances;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub version: String,
    /// The input as given.
    pub equation: String,
    /// Canonical form after removing common factors of the coefficients.
    pub normalized: String,
    pub order: usize,
    pub tolerances: Tolerances,
    pub verdict: Verdict,
    pub points: Vec<PointEvidence>,
    pub fuchs_relation: Option<FuchsRelation>,
    pub warnings: Vec<String>,
}

/// parse → normalize → singular points → classification → exponents → verdict.
pub fn analyze(text: &str, tol: &Tolerances) -> Result<AnalysisReport> {
    let ode = parse_ode(text)?;
    analyze_ode(text, &ode, tol)
}

pub fn analyze_ode(text: &str, ode: &LinearODE, tol: &Tolerances) -> Result<AnalysisReport> {
    tol.validate()?;
    let normalized = normalize(ode, tol)?;
    let verdict = decide(&normalized, tol)?;
    Ok(AnalysisReport {
        version: VERSION.to_string(),
        equation: text.trim().to_string(),
        normalized: normalized.to_canonical_string(),
        order: normalized.order(),
        tolerances: *tol,
        verdict: verdict.verdict,
        points: verdict.points,
        fuchs_relation: verdict.fuchs_relation,
        warnings: verdict.warnings,
    })
}

impl AnalysisReport {
    /// Short human-readable summary.
    pub fn to_text(&self) -> String {
        let mut out = format!("equation: {}\norder: {}\nverdict: {:?}\n", self.equation, self.order, self.verdict);
        for p in &self.points {
            out.push_str(&format!("  {}: {:?}", p.point, p.classification.kind));
            if let Some(ex) = &p.exponents {
                let vals: Vec<String> = ex
                    .exponents
                    .iter()
                    .map(|e| {
                        let v = crate::poly::fmt_complex(e.value);
                        if e.multiplicity > 1 { format!("{v} (x{})", e.multiplicity) } else { v }
                    })
                    .collect();
                out.push_str(&format!(" exponents [{}]", vals.join(", ")));
            }
            if let Some(g) = p.min_real_gap {
                out.push_str(&format!(" min real gap {g:.6}"));
            }
            out.push_str(&format!(" — {}\n", p.note));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trips() {
        let tol = Tolerances::default();
        for eq in ["z^2*y'' + z*y' - y = 0", "z^2*y'' + z*y' + y = 0", "y'' - z*y = 0"] {
            let r = analyze(eq, &tol).unwrap();
            let json = serde_json::to_string(&r).unwrap();
            let back: AnalysisReport = serde_json::from_str(&json).unwrap();
            assert_eq!(back, r);
        }
    }

    #[test]
    fn verdicts() {
        let tol = Tolerances::default();
        assert_eq!(analyze("z^2*y'' + z*y' - y = 0", &tol).unwrap().verdict, Verdict::GloballyNonOscillating);
        let osc = analyze("z^2*y'' + z*y' + y = 0", &tol).unwrap();
        assert_eq!(osc.verdict, Verdict::Oscillating);
        assert!(osc.to_text().contains("share real part"));
        let airy = analyze("y'' - z*y = 0", &tol).unwrap();
        assert!(airy.points.iter().any(|p| p.note == "irregular singular point at infinity"));
    }
}
