//! Implementations of the CLI subcommands.
//!
//! Each command loads its inputs, delegates to the library, prints a
//! report (JSON with `--json`, text otherwise), and returns the
//! process exit code: 0 for success, 2 for parse errors, 3 for
//! numerical failures, 4 for dimension mismatches, and 5 for
//! verification failures.

use std::path::Path;
use std::time::Instant;

use qcdim::channelsynth::{build_optimal_scheme, two_projection_form, CompressionScheme};
use qcdim::curvebound::{geometric_lower_bound, GeometricBound, PairStrategy};
use qcdim::dimension::compression_dimension;
use qcdim::fixtures::{
    degree3_pair, irreducible_pair, planted_qubit_block, planted_scalar_reconstruction,
    planted_scalar_remainder, two_projections,
};
use qcdim::channelsynth::{verify_scheme, SchemeDiagnostics};
use qcdim::tol::EPS_STAT;
use qcdim::{HermitianOperator, ObservableSet};

use crate::files::{
    load_observables, load_operators, load_scheme, observable_file, scheme_to_file, write_json,
};
use crate::reports::{
    AnalyzeReport, CompressReport, GeometricEntry, LowerBoundReport, Meta, SchemeEntry,
    TwoProjReport, VerifyReport,
};
use crate::CliError;

/// Default number of random pairs for the multi-draw bound strategy.
const DEFAULT_DRAWS: usize = 4;

/// Milliseconds elapsed since an instant.
fn ms(t: Instant) -> u128 {
    t.elapsed().as_millis()
}

/// The file's own operator pair, when the canonical span is generated
/// by exactly two operators besides the identity.
fn span_pair(obs: &ObservableSet) -> Option<(HermitianOperator, HermitianOperator)> {
    let ops = obs.ops();
    match (obs.identity_added(), ops.len()) {
        (true, 3) => Some((ops[1].clone(), ops[2].clone())),
        (false, 2) => Some((ops[0].clone(), ops[1].clone())),
        _ => None,
    }
}

/// Runs the geometric bound with the given or defaulted strategy.
///
/// When the file provides exactly one pair and no draw count is
/// forced, the pair itself is used (draws reported as 0); otherwise
/// random span combinations are drawn.
fn run_geometric(
    obs: &ObservableSet,
    seed: u64,
    forced_draws: Option<usize>,
) -> Result<(GeometricBound, usize), CliError> {
    let (strategy, draws) = match (forced_draws, span_pair(obs)) {
        (Some(n), _) => (PairStrategy::Random { draws: n.max(1) }, n.max(1)),
        (None, Some((a, b))) => (PairStrategy::Given(a, b), 0),
        (None, None) => (
            PairStrategy::Random {
                draws: DEFAULT_DRAWS,
            },
            DEFAULT_DRAWS,
        ),
    };
    let bound = geometric_lower_bound(obs, strategy, seed)?;
    Ok((bound, draws))
}

/// Builds the geometric report section.
fn geometric_entry(bound: &GeometricBound, draws: usize) -> GeometricEntry {
    GeometricEntry {
        bound: bound.bound,
        real_factor_degrees: bound.factorization.real_factor_degrees.clone(),
        complex_orbit_sizes: bound.factorization.complex_orbit_sizes.clone(),
        draws,
    }
}

/// Builds the scheme report section.
fn scheme_entry(
    scheme: &CompressionScheme,
    diag: &SchemeDiagnostics,
    states: usize,
    tol: f64,
) -> SchemeEntry {
    let worst = diag.worst();
    SchemeEntry {
        dimension: scheme.dimension,
        classical_states: scheme.classical_states,
        kraus_compress: scheme.compress.kraus().len(),
        kraus_decompress: scheme.decompress.kraus().len(),
        op_residual: diag.op_residual,
        state_residual: diag.state_residual,
        worst_residual: worst,
        states_checked: states,
        tol,
        pass: worst <= tol,
    }
}

/// Prints a report as JSON or text.
fn emit<T: serde::Serialize>(report: &T, text: String, json: bool) -> Result<(), CliError> {
    if json {
        write_json(report, None)
    } else {
        print!("{text}");
        Ok(())
    }
}

/// Full analysis: block structure, dimension, geometric bound, scheme.
pub fn cmd_analyze(
    input: &Path,
    seed: u64,
    json: bool,
    trials: usize,
    tol: Option<f64>,
) -> Result<i32, CliError> {
    let tol = tol.unwrap_or(EPS_STAT);
    let mut timings = Vec::new();

    let t = Instant::now();
    let obs = load_observables(input)?;
    timings.push(("load".to_string(), ms(t)));

    let t = Instant::now();
    let analysis = compression_dimension(&obs, seed)?;
    timings.push(("dimension".to_string(), ms(t)));

    let t = Instant::now();
    let scheme = build_optimal_scheme(&analysis)?;
    let diag = verify_scheme(&scheme, &obs, trials, seed)?;
    timings.push(("scheme".to_string(), ms(t)));

    let t = Instant::now();
    let geometric = if obs.len() >= 2 {
        let (bound, draws) = run_geometric(&obs, seed, None)?;
        Some(geometric_entry(&bound, draws))
    } else {
        None
    };
    timings.push(("geometric".to_string(), ms(t)));

    let structure = analysis.reduced.structure();
    let block_residual = obs
        .ops()
        .iter()
        .map(|op| structure.pattern_residual(op.mat()))
        .fold(0.0f64, f64::max);
    let report = AnalyzeReport {
        command: "analyze",
        input: input.display().to_string(),
        seed,
        dim: obs.dim(),
        operators: obs.len(),
        identity_added: obs.identity_added(),
        blocks: structure.blocks().iter().map(|&(d, m)| [d, m]).collect(),
        block_residual,
        dimension: analysis.report.dimension,
        classical_states: analysis.report.classical_states,
        kept_blocks: analysis.report.kept.clone(),
        redundant_blocks: analysis.report.redundant.clone(),
        geometric,
        scheme: scheme_entry(&scheme, &diag, trials, tol),
        meta: Meta::now(timings),
    };
    emit(&report, report.text(), json)?;
    Ok(0)
}

/// Scheme synthesis: write the channels to a scheme file.
pub fn cmd_compress(
    input: &Path,
    scheme_out: &Path,
    seed: u64,
    json: bool,
    tol: Option<f64>,
) -> Result<i32, CliError> {
    let tol = tol.unwrap_or(EPS_STAT);
    let mut timings = Vec::new();

    let t = Instant::now();
    let obs = load_observables(input)?;
    timings.push(("load".to_string(), ms(t)));

    let t = Instant::now();
    let analysis = compression_dimension(&obs, seed)?;
    let scheme = build_optimal_scheme(&analysis)?;
    timings.push(("synthesis".to_string(), ms(t)));

    let t = Instant::now();
    let self_check_states = 10;
    let diag = verify_scheme(&scheme, &obs, self_check_states, seed)?;
    timings.push(("self-check".to_string(), ms(t)));

    write_json(&scheme_to_file(obs.dim(), &scheme), Some(scheme_out))?;
    let report = CompressReport {
        command: "compress",
        input: input.display().to_string(),
        seed,
        dim: obs.dim(),
        scheme_out: scheme_out.display().to_string(),
        scheme: scheme_entry(&scheme, &diag, self_check_states, tol),
        meta: Meta::now(timings),
    };
    emit(&report, report.text(), json)?;
    Ok(0)
}

/// Scheme verification: replay the residual checks on fresh states.
pub fn cmd_verify(
    input: &Path,
    scheme_path: &Path,
    trials: usize,
    seed: u64,
    tol: Option<f64>,
    json: bool,
) -> Result<i32, CliError> {
    let tol = tol.unwrap_or(EPS_STAT);
    let mut timings = Vec::new();

    let t = Instant::now();
    let obs = load_observables(input)?;
    let scheme = load_scheme(scheme_path, obs.dim())?;
    timings.push(("load".to_string(), ms(t)));

    let t = Instant::now();
    let diag = verify_scheme(&scheme, &obs, trials, seed)?;
    timings.push(("verify".to_string(), ms(t)));

    let entry = scheme_entry(&scheme, &diag, trials, tol);
    let pass = entry.pass;
    let report = VerifyReport {
        command: "verify",
        input: input.display().to_string(),
        scheme_path: scheme_path.display().to_string(),
        seed,
        dim: obs.dim(),
        scheme: entry,
        meta: Meta::now(timings),
    };
    emit(&report, report.text(), json)?;
    Ok(if pass { 0 } else { 5 })
}

/// Parses one positional generator parameter.
fn param<T: std::str::FromStr>(params: &[String], idx: usize, what: &str) -> Result<T, CliError> {
    let raw = params
        .get(idx)
        .ok_or_else(|| CliError::Parse(format!("missing parameter: {what}")))?;
    raw.parse()
        .map_err(|_| CliError::Parse(format!("invalid {what}: '{raw}'")))
}

/// Example generator: writes a named fixture as an observable file.
pub fn cmd_gen(name: &str, params: &[String], out: Option<&Path>) -> Result<i32, CliError> {
    let expect_params = |n: usize| -> Result<(), CliError> {
        if params.len() != n {
            return Err(CliError::Parse(format!(
                "example '{name}' takes {n} parameter(s), got {}",
                params.len()
            )));
        }
        Ok(())
    };
    let file = match name {
        "degree3" => {
            expect_params(0)?;
            let (a, b) = degree3_pair();
            observable_file(3, &[("A".into(), a.mat()), ("B".into(), b.mat())])
        }
        "irred" => {
            expect_params(1)?;
            let d: usize = param(params, 0, "dimension")?;
            if d < 2 {
                return Err(CliError::Parse("dimension must be at least 2".into()));
            }
            let (a, b) = irreducible_pair(d);
            observable_file(d, &[("A".into(), a.mat()), ("B".into(), b.mat())])
        }
        "twoproj" => {
            expect_params(2)?;
            let d: usize = param(params, 0, "dimension")?;
            let seed: u64 = param(params, 1, "seed")?;
            if d < 2 {
                return Err(CliError::Parse("dimension must be at least 2".into()));
            }
            let (p, q) = two_projections(d, d / 2, d / 2, seed)?;
            observable_file(d, &[("P".into(), p.mat()), ("Q".into(), q.mat())])
        }
        "planted" => {
            expect_params(1)?;
            let instance = match params[0].as_str() {
                "reconstruction" => planted_scalar_reconstruction(),
                "qubit" => planted_qubit_block(),
                "remainder" => planted_scalar_remainder(),
                other => {
                    return Err(CliError::Parse(format!(
                        "unknown planted variant '{other}' (expected reconstruction, qubit, remainder)"
                    )));
                }
            };
            let named: Vec<(String, &qcdim::ComplexMatrix)> = instance
                .observables
                .ops()
                .iter()
                .enumerate()
                .map(|(i, op)| (format!("E{i}"), op.mat()))
                .collect();
            observable_file(instance.observables.dim(), &named)
        }
        other => {
            return Err(CliError::Parse(format!(
                "unknown example '{other}' (expected degree3, irred, twoproj, planted)"
            )));
        }
    };
    write_json(&file, out)?;
    Ok(0)
}

/// Geometric lower bound from the associated plane curve.
pub fn cmd_lower_bound(
    input: &Path,
    seed: u64,
    trials: Option<usize>,
    json: bool,
) -> Result<i32, CliError> {
    let mut timings = Vec::new();

    let t = Instant::now();
    let obs = load_observables(input)?;
    timings.push(("load".to_string(), ms(t)));

    let t = Instant::now();
    let (bound, draws) = run_geometric(&obs, seed, trials)?;
    timings.push(("bound".to_string(), ms(t)));

    let report = LowerBoundReport {
        command: "lower-bound",
        input: input.display().to_string(),
        seed,
        dim: obs.dim(),
        geometric: geometric_entry(&bound, draws),
        meta: Meta::now(timings),
    };
    emit(&report, report.text(), json)?;
    Ok(0)
}

/// Canonical form of a pair of projections.
pub fn cmd_two_proj(input: &Path, json: bool) -> Result<i32, CliError> {
    let mut timings = Vec::new();

    let t = Instant::now();
    let (dim, ops) = load_operators(input)?;
    timings.push(("load".to_string(), ms(t)));
    if ops.len() != 2 {
        return Err(CliError::Parse(format!(
            "two-proj needs a file with exactly 2 operators, got {}",
            ops.len()
        )));
    }

    let t = Instant::now();
    let form = two_projection_form(&ops[0], &ops[1])?;
    timings.push(("canonical-form".to_string(), ms(t)));

    let report = TwoProjReport {
        command: "two-proj",
        input: input.display().to_string(),
        dim,
        corner_dims: form.corner_dims,
        angles: form.angles.clone(),
        residual: form.residual,
        meta: Meta::now(timings),
    };
    emit(&report, report.text(), json)?;
    Ok(0)
}
