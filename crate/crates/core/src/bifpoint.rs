//! Tagged bifurcation points shared by the analyses and the JSON artifacts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BifKind {
    SaddleNode,
    HopfSubcritical,
    HopfSupercritical,
    HopfDegenerate,
    Cusp,
    BogdanovTakens,
    Bautin,
    DegenerateBt,
    FoldOfCycles,
    CuspOfCycles,
    SnicCandidate,
}

impl BifKind {
    pub fn is_hopf(self) -> bool {
        matches!(self, BifKind::HopfSubcritical | BifKind::HopfSupercritical | BifKind::HopfDegenerate)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BifKind::SaddleNode => "saddle_node",
            BifKind::HopfSubcritical => "hopf_subcritical",
            BifKind::HopfSupercritical => "hopf_supercritical",
            BifKind::HopfDegenerate => "hopf_degenerate",
            BifKind::Cusp => "cusp",
            BifKind::BogdanovTakens => "bogdanov_takens",
            BifKind::Bautin => "bautin",
            BifKind::DegenerateBt => "degenerate_bt",
            BifKind::FoldOfCycles => "fold_of_cycles",
            BifKind::CuspOfCycles => "cusp_of_cycles",
            BifKind::SnicCandidate => "snic_candidate",
        }
    }
}

/// Parameter plane (or single parameter) a point lives in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plane {
    pub names: Vec<String>,
}

impl Plane {
    pub fn new(names: &[&str]) -> Self {
        Plane { names: names.iter().map(|s| s.to_string()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationPoint {
    pub kind: BifKind,
    pub plane: Plane,
    /// Parameter values and the equilibrium abscissa `X`.
    pub coords: BTreeMap<String, f64>,
    pub diagnostics: BTreeMap<String, f64>,
    /// Short tag for special points of a diagram (for instance `GH` or `CLC`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl BifurcationPoint {
    pub fn new(kind: BifKind, plane: &[&str]) -> Self {
        BifurcationPoint {
            kind,
            plane: Plane::new(plane),
            coords: BTreeMap::new(),
            diagnostics: BTreeMap::new(),
            label: None,
            warnings: Vec::new(),
        }
    }

    pub fn coord(mut self, name: &str, v: f64) -> Self {
        self.coords.insert(name.to_string(), v);
        self
    }

    /// Adds a diagnostic; non-finite values are dropped so the JSON stays valid.
    pub fn diag(mut self, name: &str, v: f64) -> Self {
        if v.is_finite() {
            self.diagnostics.insert(name.to_string(), v);
        }
        self
    }

    pub fn labelled(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn warn(mut self, msg: impl Into<String>) -> Self {
        self.warnings.push(msg.into());
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.coords.get(name).copied()
    }

    pub fn get_diag(&self, name: &str) -> Option<f64> {
        self.diagnostics.get(name).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_match_serde() {
        for k in [BifKind::SaddleNode, BifKind::DegenerateBt, BifKind::SnicCandidate, BifKind::HopfSubcritical] {
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.as_str()));
        }
    }

    #[test]
    fn json_round_trip() {
        let p = BifurcationPoint::new(BifKind::Bautin, &["j", "P"])
            .coord("j", 12.48)
            .coord("X", 3.3)
            .diag("omega", 0.5)
            .diag("bad", f64::NAN)
            .labelled("GH");
        let s = serde_json::to_string(&p).unwrap();
        let back: BifurcationPoint = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(back.get_diag("bad").is_none());
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
