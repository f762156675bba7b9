use serde::{Deserialize, Serialize};

/// Index and sign conventions every report is computed under.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub anchor: String,
    pub compatibility: String,
    pub canonical_j: String,
    pub omega: String,
    pub divergence: String,
    pub tangent_j: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            anchor: "(π♯α)^j = α_i π^{ij}".into(),
            compatibility: "π(α, β) = ⟨α, Jβ⟩, i.e. Π = G·J with G the cometric".into(),
            canonical_j: "J = G⁻¹·Π".into(),
            omega: "ω = −π⁻¹ on the leaves".into(),
            divergence: "(div π)^i = |g|^{-1/2} ∂_j(|g|^{1/2} π^{ij}), so (div π)(f) = div X_f; \
                         the frame sum −Σ_a ε_a⟨∇^{α_a}dx^i, α_a⟩ is the cross-check"
                .into(),
            tangent_j: "J' = −♯ ∘ J ∘ ♭ on vectors".into(),
        }
    }
}

/// Envelope shared by the `check`, `identities` and `submersion` reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument<R> {
    pub tool: String,
    pub version: String,
    pub command_line: Vec<String>,
    pub target: String,
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub conventions: Conventions,
    pub reports: Vec<R>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub expectations: Vec<ExpectationRow>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_s: Option<f64>,
}

/// Declared outcome of a check on a gallery entry next to what was measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectationRow {
    pub check: String,
    pub expected: String,
    pub status: String,
    pub matches: Option<bool>,
}
