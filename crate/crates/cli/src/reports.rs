//! Machine- and human-readable analysis reports.
//!
//! Every report is a plain struct serialized as JSON with a fixed
//! field order, so identical inputs, seed, and flags produce
//! byte-identical output — except for the `meta` object, which carries
//! the timestamp and wall-clock timings and is the only part allowed
//! to vary between runs. Text rendering prints each numeric field
//! through the same JSON formatter, so the two modes agree to printed
//! precision.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

/// Volatile run information: the one part of a report that may differ
/// between byte-identical runs.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    /// Seconds since the Unix epoch at report time.
    pub timestamp_unix: u64,
    /// Tool version.
    pub version: &'static str,
    /// Wall-clock stage timings in milliseconds.
    pub timings_ms: Vec<(String, u128)>,
}

impl Meta {
    /// Stamps a meta block with the current time and given timings.
    pub fn now(timings_ms: Vec<(String, u128)>) -> Self {
        Meta {
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            version: env!("CARGO_PKG_VERSION"),
            timings_ms,
        }
    }
}

/// Formats a float exactly as the JSON serializer does.
pub fn num(v: f64) -> String {
    serde_json::to_string(&v).unwrap_or_else(|_| "null".into())
}

/// Geometric lower-bound section.
#[derive(Debug, Clone, Serialize)]
pub struct GeometricEntry {
    /// The lower bound: the minimal real factor degree over the pairs
    /// tried.
    pub bound: usize,
    /// Real irreducible factor degrees of the best pair's curve.
    pub real_factor_degrees: Vec<usize>,
    /// Monodromy orbit sizes of that curve.
    pub complex_orbit_sizes: Vec<usize>,
    /// Number of random pairs drawn (0 when the file's own pair was
    /// used directly).
    pub draws: usize,
}

/// Compression-scheme verification section.
#[derive(Debug, Clone, Serialize)]
pub struct SchemeEntry {
    /// Compressed dimension `d`.
    pub dimension: usize,
    /// Classical register size `n`.
    pub classical_states: usize,
    /// Number of Kraus operators of the compression channel.
    pub kraus_compress: usize,
    /// Number of Kraus operators of the decompression channel.
    pub kraus_decompress: usize,
    /// Worst expectation-value residual over the canonical operators.
    pub op_residual: f64,
    /// Worst residual over random verification states.
    pub state_residual: f64,
    /// Worst residual overall (including CPTP diagnostics).
    pub worst_residual: f64,
    /// Number of random states checked.
    pub states_checked: usize,
    /// Tolerance the verdict compares against.
    pub tol: f64,
    /// Whether the worst residual is within tolerance.
    pub pass: bool,
}

/// Full analysis report.
#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    /// Command name.
    pub command: &'static str,
    /// Input path as given.
    pub input: String,
    /// Seed all randomness flowed from.
    pub seed: u64,
    /// Ambient dimension `D`.
    pub dim: usize,
    /// Number of canonical operators (after adding the identity and
    /// dropping dependent operators).
    pub operators: usize,
    /// Whether the identity was added during canonicalization.
    pub identity_added: bool,
    /// Block structure as `[dimension, multiplicity]` pairs, sorted by
    /// descending dimension.
    pub blocks: Vec<[usize; 2]>,
    /// Worst deviation of a conjugated canonical operator from the
    /// certified block pattern.
    pub block_residual: f64,
    /// Minimal compression dimension `d`.
    pub dimension: usize,
    /// Classical register size `n`.
    pub classical_states: usize,
    /// Indices of the surviving blocks.
    pub kept_blocks: Vec<usize>,
    /// Indices of the eliminated blocks.
    pub redundant_blocks: Vec<usize>,
    /// Geometric lower bound (absent when the span has no pair).
    pub geometric: Option<GeometricEntry>,
    /// Synthesized scheme and its verification.
    pub scheme: SchemeEntry,
    /// Volatile run information.
    pub meta: Meta,
}

impl AnalyzeReport {
    /// Human-readable rendering.
    pub fn text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "observable set: dim {} with {} canonical operators{}\n",
            self.dim,
            self.operators,
            if self.identity_added {
                " (identity added)"
            } else {
                ""
            }
        ));
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| format!("({},{})", b[0], b[1]))
            .collect();
        s.push_str(&format!(
            "block structure: {} with residual {}\n",
            blocks.join(" "),
            num(self.block_residual)
        ));
        s.push_str(&format!(
            "compression dimension: d = {} with n = {} classical states\n",
            self.dimension, self.classical_states
        ));
        s.push_str(&format!(
            "kept blocks: {:?}; redundant blocks: {:?}\n",
            self.kept_blocks, self.redundant_blocks
        ));
        match &self.geometric {
            Some(g) => s.push_str(&format!(
                "geometric lower bound: {} (real factor degrees {:?}, orbit sizes {:?}, draws {})\n",
                g.bound, g.real_factor_degrees, g.complex_orbit_sizes, g.draws
            )),
            None => s.push_str("geometric lower bound: not applicable (no operator pair)\n"),
        }
        s.push_str(&scheme_text(&self.scheme));
        s
    }
}

/// Renders the scheme section.
pub fn scheme_text(sch: &SchemeEntry) -> String {
    format!(
        "scheme: d = {}, n = {}, {}+{} Kraus operators; residuals op {} state {} worst {} over {} states (tol {}): {}\n",
        sch.dimension,
        sch.classical_states,
        sch.kraus_compress,
        sch.kraus_decompress,
        num(sch.op_residual),
        num(sch.state_residual),
        num(sch.worst_residual),
        sch.states_checked,
        num(sch.tol),
        if sch.pass { "PASS" } else { "FAIL" }
    )
}

/// Report of the `lower-bound` command.
#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundReport {
    /// Command name.
    pub command: &'static str,
    /// Input path as given.
    pub input: String,
    /// Seed all randomness flowed from.
    pub seed: u64,
    /// Ambient dimension `D`.
    pub dim: usize,
    /// The geometric section.
    pub geometric: GeometricEntry,
    /// Volatile run information.
    pub meta: Meta,
}

impl LowerBoundReport {
    /// Human-readable rendering.
    pub fn text(&self) -> String {
        format!(
            "geometric lower bound: {} on dim {} (real factor degrees {:?}, orbit sizes {:?}, draws {})\n",
            self.geometric.bound,
            self.dim,
            self.geometric.real_factor_degrees,
            self.geometric.complex_orbit_sizes,
            self.geometric.draws
        )
    }
}

/// Report of the `compress` command.
#[derive(Debug, Clone, Serialize)]
pub struct CompressReport {
    /// Command name.
    pub command: &'static str,
    /// Input path as given.
    pub input: String,
    /// Seed all randomness flowed from.
    pub seed: u64,
    /// Ambient dimension `D`.
    pub dim: usize,
    /// Scheme file the channels were written to.
    pub scheme_out: String,
    /// The scheme and its self-check.
    pub scheme: SchemeEntry,
    /// Volatile run information.
    pub meta: Meta,
}

impl CompressReport {
    /// Human-readable rendering.
    pub fn text(&self) -> String {
        format!(
            "compressed dim {} into the scheme at {}\n{}",
            self.dim,
            self.scheme_out,
            scheme_text(&self.scheme)
        )
    }
}

/// Report of the `verify` command.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    /// Command name.
    pub command: &'static str,
    /// Input path as given.
    pub input: String,
    /// Scheme path as given.
    pub scheme_path: String,
    /// Seed all randomness flowed from.
    pub seed: u64,
    /// Ambient dimension `D`.
    pub dim: usize,
    /// The scheme and its verification.
    pub scheme: SchemeEntry,
    /// Volatile run information.
    pub meta: Meta,
}

impl VerifyReport {
    /// Human-readable rendering.
    pub fn text(&self) -> String {
        format!(
            "verified the scheme at {} against {}\n{}",
            self.scheme_path,
            self.input,
            scheme_text(&self.scheme)
        )
    }
}

/// Report of the `two-proj` command.
#[derive(Debug, Clone, Serialize)]
pub struct TwoProjReport {
    /// Command name.
    pub command: &'static str,
    /// Input path as given.
    pub input: String,
    /// Ambient dimension `D`.
    pub dim: usize,
    /// Corner dimensions `[ran∩ran, ran∩ker, ker∩ran, ker∩ker]`.
    pub corner_dims: [usize; 4],
    /// Angle parameters of the generic blocks, ascending.
    pub angles: Vec<f64>,
    /// Worst template residual.
    pub residual: f64,
    /// Volatile run information.
    pub meta: Meta,
}

impl TwoProjReport {
    /// Human-readable rendering.
    pub fn text(&self) -> String {
        let angles: Vec<String> = self.angles.iter().map(|&a| num(a)).collect();
        format!(
            "two-projection form on dim {}: corners {:?}, angles [{}], residual {}\n",
            self.dim,
            self.corner_dims,
            angles.join(", "),
            num(self.residual)
        )
    }
}
