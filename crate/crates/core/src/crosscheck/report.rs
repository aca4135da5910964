//! Serializable reports shared by the example, compute and check commands.

use serde::{Deserialize, Serialize};

use super::paper::Table;
use crate::geometry::{IdentityKind, Status};

pub const SCHEMA: &str = "supersurf-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Canonical symbolic value equals the transcribed paper value.
    Match,
    /// Symbolic and substituted-exact pipelines agree; the paper differs.
    EngineConsistentPaperDiffers,
    /// Symbolic and substituted-exact pipelines disagree.
    EngineInconsistent,
    /// Engine-consistent component the transcription does not state.
    Unlisted,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Match => "match",
            Verdict::EngineConsistentPaperDiffers => "engine-consistent-paper-differs",
            Verdict::EngineInconsistent => "engine-inconsistent",
            Verdict::Unlisted => "unlisted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub tensor: Table,
    /// 1-based, storage order (`Γ_IJ^L` as `[I, J, L]`).
    pub indices: Vec<usize>,
    pub label: String,
    pub backend_value: String,
    pub paper_value: Option<String>,
    /// Exact-backend value under the first binding set.
    pub oracle_value: String,
    pub verdict: Verdict,
    pub low_confidence: bool,
    /// Whether the paper value, substituted, equals the exact pipeline under
    /// every binding set; `None` when the paper value mentions unbound atoms.
    pub paper_matches_oracle: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub matched: usize,
    pub paper_differs: usize,
    pub inconsistent: usize,
    pub unlisted: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub schema: String,
    pub source: String,
    pub order: u32,
    pub bindings: Vec<u32>,
    pub conventions: Vec<String>,
    pub rows: Vec<ComparisonRow>,
    pub summary: Summary,
}

impl ExampleReport {
    pub fn rows_in(&self, t: Table) -> impl Iterator<Item = &ComparisonRow> {
        self.rows.iter().filter(move |r| r.tensor == t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentValue {
    pub indices: Vec<usize>,
    pub label: String,
    pub value: String,
    /// `even`, `odd`, `zero` or `mixed`.
    pub parity: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorTable {
    pub tensor: Table,
    pub components: Vec<ComponentValue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComputeReport {
    pub schema: String,
    pub source: String,
    pub backend: String,
    pub order: u32,
    pub graded_symmetric: bool,
    pub conventions: Vec<String>,
    pub tables: Vec<TensorTable>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residual {
    pub indices: Vec<usize>,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub identity: IdentityKind,
    pub status: Status,
    pub reason: Option<String>,
    pub components: usize,
    pub residuals: Vec<Residual>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema: String,
    pub source: String,
    pub backend: String,
    pub order: u32,
    pub graded_symmetric: bool,
    pub identities: Vec<IdentityRow>,
}

impl CheckReport {
    /// True iff no applicable identity failed.
    pub fn all_pass(&self) -> bool {
        self.identities.iter().all(|r| r.status != Status::Fail)
    }
}
