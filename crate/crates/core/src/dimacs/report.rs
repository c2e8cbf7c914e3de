//! JSON run reports.
//!
//! Field names are fixed; see `docs/report-format.md` for the full layout.
//! Masks are hex strings in the normal cell order (bit `i` is the cell whose
//! index is `i`), e.g. `{"triple":[1,2,3],"mask":"0xDF"}`.

use serde::{Deserialize, Serialize};

use crate::bitspace::Partition;
use crate::clausal::{ClausalState, Instance, Triple};
use crate::oracle::OracleVerdict;
use crate::propagate::{PropagationResult, Stats, TraceRecord, Verdict};

pub const TOOL: &str = "cubeprop";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeRecord {
    pub triple: [u32; 3],
    pub mask: String,
}

impl CubeRecord {
    pub fn new(t: &Triple, p: &Partition) -> Self {
        CubeRecord {
            triple: *t.vars(),
            mask: p.to_hex(),
        }
    }

    /// Parses the hex mask back into a byte.
    pub fn mask_byte(&self) -> Option<u8> {
        u8::from_str_radix(self.mask.strip_prefix("0x")?, 16).ok()
    }
}

pub fn cube_records(state: &ClausalState) -> Vec<CubeRecord> {
    state.cubes().iter().map(|(t, p)| CubeRecord::new(t, p)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineVerdict {
    NoEmptyCube,
    UnsatByEmptyCube,
    UnsatByEmptyClause,
}

impl EngineVerdict {
    pub fn of(verdict: Verdict) -> Self {
        match verdict {
            Verdict::NoEmptyCube => EngineVerdict::NoEmptyCube,
            Verdict::EmptyCube(_) => EngineVerdict::UnsatByEmptyCube,
        }
    }

    pub fn claims_unsat(self) -> bool {
        self != EngineVerdict::NoEmptyCube
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub source: String,
    pub num_vars: u32,
    pub num_clauses: usize,
    pub tautologies_dropped: usize,
    pub has_empty_clause: bool,
    pub unconstrained_vars: Vec<u32>,
    pub phantom_vars: Vec<u32>,
}

impl InstanceMeta {
    pub fn new(source: impl Into<String>, instance: &Instance, phantoms: &[u32]) -> Self {
        InstanceMeta {
            source: source.into(),
            num_vars: instance.num_vars(),
            num_clauses: instance.clauses().len(),
            tautologies_dropped: instance.tautologies_dropped(),
            has_empty_clause: instance.has_empty_clause(),
            unconstrained_vars: instance.unconstrained_vars().iter().copied().collect(),
            phantom_vars: phantoms.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub generator: Option<u64>,
    /// `fifo` or `random:<seed>`.
    pub order: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleStatus {
    Ran,
    Skipped,
    Off,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub status: OracleStatus,
    pub satisfiable: Option<bool>,
    pub solution_count: Option<u64>,
    pub note: Option<String>,
}

impl OracleRecord {
    pub fn ran(v: &OracleVerdict) -> Self {
        OracleRecord {
            status: OracleStatus::Ran,
            satisfiable: Some(v.satisfiable),
            solution_count: v.solution_count,
            note: None,
        }
    }

    pub fn skipped(note: impl Into<String>) -> Self {
        OracleRecord {
            status: OracleStatus::Skipped,
            satisfiable: None,
            solution_count: None,
            note: Some(note.into()),
        }
    }

    pub fn off() -> Self {
        OracleRecord {
            status: OracleStatus::Off,
            satisfiable: None,
            solution_count: None,
            note: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StatsRecord {
    pub passes: usize,
    pub edge_applications: usize,
    pub changing_applications: usize,
    pub cells_removed: usize,
    pub cubes: usize,
    pub edges: usize,
}

impl StatsRecord {
    pub fn new(stats: &Stats, cubes: usize, edges: usize) -> Self {
        StatsRecord {
            passes: stats.passes,
            edge_applications: stats.edge_applications,
            changing_applications: stats.changing_applications,
            cells_removed: stats.cells_removed,
            cubes,
            edges,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionStatus {
    Found,
    GaveUp,
    NotAttempted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionRecord {
    pub status: ExtractionStatus,
    /// Signed DIMACS literals for variables `1..=num_vars`.
    pub literals: Option<Vec<i64>>,
    pub verified: Option<bool>,
}

/// Output of `solve`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub tool: String,
    pub version: String,
    pub instance: InstanceMeta,
    pub seeds: Seeds,
    pub engine_verdict: EngineVerdict,
    pub empty_cube: Option<[u32; 3]>,
    pub oracle: OracleRecord,
    pub oracle_agrees: Option<bool>,
    pub extraction: ExtractionRecord,
    pub stats: StatsRecord,
    pub cubes: Vec<CubeRecord>,
}

impl SolveReport {
    /// Agreement between an engine verdict and an oracle that ran.
    pub fn agreement(engine: EngineVerdict, oracle: &OracleRecord) -> Option<bool> {
        oracle.satisfiable.map(|sat| sat != engine.claims_unsat())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplicationRecord {
    pub source: [u32; 3],
    pub target: [u32; 3],
    pub removed: u32,
    pub before: String,
    pub after: String,
}

impl From<&TraceRecord> for ApplicationRecord {
    fn from(r: &TraceRecord) -> Self {
        ApplicationRecord {
            source: *r.source.vars(),
            target: *r.target.vars(),
            removed: r.removed,
            before: format!("0x{:02X}", r.before),
            after: format!("0x{:02X}", r.after),
        }
    }
}

/// Output of `trace`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceReport {
    pub tool: String,
    pub version: String,
    pub instance: InstanceMeta,
    pub seeds: Seeds,
    pub engine_verdict: EngineVerdict,
    pub initial: Vec<CubeRecord>,
    pub applications: Vec<ApplicationRecord>,
    pub fixpoint: Vec<CubeRecord>,
    pub stats: StatsRecord,
}

impl TraceReport {
    pub fn new(instance: InstanceMeta, seeds: Seeds, initial: &ClausalState, result: &PropagationResult, edges: usize) -> Self {
        TraceReport {
            tool: TOOL.into(),
            version: VERSION.into(),
            instance,
            seeds,
            engine_verdict: EngineVerdict::of(result.verdict),
            initial: cube_records(initial),
            applications: result.trace.iter().map(ApplicationRecord::from).collect(),
            fixpoint: cube_records(&result.fixpoint),
            stats: StatsRecord::new(&result.stats, result.fixpoint.len(), edges),
        }
    }
}

/// One clause count of a `bench` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub num_vars: u32,
    pub num_clauses: usize,
    pub ratio: f64,
    pub instances: usize,
    pub engine_unsat: usize,
    pub engine_open: usize,
    pub oracle_ran: usize,
    pub oracle_skipped: usize,
    pub oracle_sat: usize,
    pub oracle_unsat: usize,
    pub agreements: usize,
    /// Engine found an empty cube but the oracle found a solution.
    pub soundness_violations: usize,
    /// No empty cube but the oracle proved the instance unsatisfiable.
    pub completeness_gaps: usize,
    /// Agreements over instances the oracle decided; null when none ran.
    pub agreement_rate: Option<f64>,
    pub extraction_found: usize,
    pub extraction_gave_up: usize,
    pub mean_passes: f64,
    pub mean_changing_applications: f64,
    pub mean_cells_removed: f64,
    pub termination_bound_violations: usize,
}

/// A disagreement between engine and oracle that `solve` reproduces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub kind: String,
    pub gen: String,
    pub seed: u64,
    /// Arguments that make `solve` reproduce the disagreement.
    pub solve_args: String,
    pub dimacs: String,
}

/// Output of `bench`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub tool: String,
    pub version: String,
    pub base_seed: u64,
    pub order: String,
    pub rows: Vec<BenchRow>,
    pub counterexamples: Vec<Counterexample>,
}

/// Pretty JSON with a trailing newline.
pub fn write_report<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report types serialize");
    s.push('\n');
    s
}
