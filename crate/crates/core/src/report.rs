//! Result records shared by the computation paths and the CLI.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::enclosure::Enclosure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    YukawaSeries,
    Volterra,
    Variational,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::YukawaSeries => "yukawa_series",
            Method::Volterra => "volterra",
            Method::Variational => "variational",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "resonance_not_L2")]
    ResonanceNotL2,
    #[serde(rename = "eigenstate_L2")]
    EigenstateL2,
    #[serde(rename = "outside_theorem_hypotheses")]
    OutsideHypotheses,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::ResonanceNotL2 => "resonance_not_L2",
            Classification::EigenstateL2 => "eigenstate_L2",
            Classification::OutsideHypotheses => "outside_theorem_hypotheses",
        }
    }
}

/// A classification together with the rule that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedState {
    pub classification: Classification,
    pub rule: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub n: u32,
    pub potential: String,
    pub kappa_star: Enclosure,
    pub method: Method,
    pub classification: ClassifiedState,
    pub diagnostics: Map<String, Value>,
}

impl ResonanceReport {
    pub fn estimate(&self) -> f64 {
        self.kappa_star.mid()
    }
}
