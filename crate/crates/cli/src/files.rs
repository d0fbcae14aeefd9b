//! On-disk JSON formats: observable sets and compression schemes.
//!
//! Complex matrices are stored as separate real tables `re` and `im`
//! (no complex literals), so the files are portable and trivially
//! parseable. Hermiticity is *checked* on load rather than trusted.
//! Both formats carry a `format_version` field; serialization is
//! deterministic, so identical data produces byte-identical files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use qcdim::channelsynth::CompressionScheme;
use qcdim::mat::cmatrix::C64;
use qcdim::{ComplexMatrix, HermitianOperator, ObservableSet, QuantumChannel};

use crate::CliError;

/// Version tag written into every file this tool produces.
pub const FORMAT_VERSION: &str = "1";

/// One named operator as a pair of real tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorEntry {
    /// Display name, preserved round-trip.
    pub name: String,
    /// Real parts, row major.
    pub re: Vec<Vec<f64>>,
    /// Imaginary parts, row major.
    pub im: Vec<Vec<f64>>,
}

/// A set of Hermitian observables on a common space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObservableFile {
    /// File format version.
    pub format_version: String,
    /// Ambient dimension `D`.
    pub dim: usize,
    /// The observables.
    pub operators: Vec<OperatorEntry>,
}

/// One channel as Kraus operators plus its dimension data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    /// Input dimension.
    pub dim_in: usize,
    /// Quantum output dimension.
    pub dim_out: usize,
    /// Classical register size.
    pub classical_register: usize,
    /// Kraus operators, each `(dim_out * classical_register) x dim_in`.
    pub kraus: Vec<OperatorEntry>,
}

/// A serialized compression scheme.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeFile {
    /// File format version.
    pub format_version: String,
    /// Ambient dimension `D` the scheme compresses from.
    pub dim: usize,
    /// Compressed dimension `d`.
    pub d: usize,
    /// Classical register size `n`.
    pub n: usize,
    /// Indices of the surviving blocks.
    pub kept_blocks: Vec<usize>,
    /// The compression channel.
    pub compress: ChannelFile,
    /// The decompression channel.
    pub decompress: ChannelFile,
}

/// Splits a complex matrix into real tables.
pub fn matrix_to_tables(m: &ComplexMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let re = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect())
        .collect();
    let im = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect())
        .collect();
    (re, im)
}

/// Rebuilds a complex matrix from real tables of the given shape.
pub fn tables_to_matrix(
    entry: &OperatorEntry,
    rows: usize,
    cols: usize,
) -> Result<ComplexMatrix, CliError> {
    let check = |table: &Vec<Vec<f64>>, part: &str| -> Result<(), CliError> {
        if table.len() != rows || table.iter().any(|r| r.len() != cols) {
            return Err(CliError::Parse(format!(
                "operator '{}': {part} table is not {rows}x{cols}",
                entry.name
            )));
        }
        Ok(())
    };
    check(&entry.re, "re")?;
    check(&entry.im, "im")?;
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        C64::new(entry.re[i][j], entry.im[i][j])
    }))
}

/// Builds an operator entry from a matrix.
pub fn entry_from_matrix(name: impl Into<String>, m: &ComplexMatrix) -> OperatorEntry {
    let (re, im) = matrix_to_tables(m);
    OperatorEntry {
        name: name.into(),
        re,
        im,
    }
}

/// Builds an observable file from named Hermitian operators.
pub fn observable_file(dim: usize, ops: &[(String, &ComplexMatrix)]) -> ObservableFile {
    ObservableFile {
        format_version: FORMAT_VERSION.into(),
        dim,
        operators: ops
            .iter()
            .map(|(name, m)| entry_from_matrix(name.clone(), m))
            .collect(),
    }
}

/// Reads and validates an observable file into raw Hermitian operators
/// (file order, no canonicalization).
pub fn load_operators(path: &Path) -> Result<(usize, Vec<HermitianOperator>), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let file: ObservableFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    if file.format_version != FORMAT_VERSION {
        return Err(CliError::Parse(format!(
            "{}: unsupported format_version '{}' (expected '{FORMAT_VERSION}')",
            path.display(),
            file.format_version
        )));
    }
    if file.operators.is_empty() {
        return Err(CliError::Parse(format!(
            "{}: no operators in file",
            path.display()
        )));
    }
    let mut ops = Vec::with_capacity(file.operators.len());
    for entry in &file.operators {
        let m = tables_to_matrix(entry, file.dim, file.dim)?;
        let op = HermitianOperator::new(m).map_err(|e| {
            CliError::Parse(format!("operator '{}' is not Hermitian: {e}", entry.name))
        })?;
        ops.push(op);
    }
    Ok((file.dim, ops))
}

/// Reads an observable file into a canonicalized observable set.
pub fn load_observables(path: &Path) -> Result<ObservableSet, CliError> {
    let (_, ops) = load_operators(path)?;
    ObservableSet::new(ops).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Serializes a compression scheme.
pub fn scheme_to_file(dim: usize, scheme: &CompressionScheme) -> SchemeFile {
    let channel = |ch: &QuantumChannel, tag: &str| ChannelFile {
        dim_in: ch.dim_in(),
        dim_out: ch.dim_out(),
        classical_register: ch.classical_register(),
        kraus: ch
            .kraus()
            .iter()
            .enumerate()
            .map(|(i, k)| entry_from_matrix(format!("{tag}{i}"), k))
            .collect(),
    };
    SchemeFile {
        format_version: FORMAT_VERSION.into(),
        dim,
        d: scheme.dimension,
        n: scheme.classical_states,
        kept_blocks: scheme.kept.clone(),
        compress: channel(&scheme.compress, "C"),
        decompress: channel(&scheme.decompress, "D"),
    }
}

/// Rebuilds one channel, validating shapes and trace preservation.
fn channel_from_file(ch: &ChannelFile) -> Result<QuantumChannel, CliError> {
    let out_total = ch.dim_out * ch.classical_register;
    let mut kraus = Vec::with_capacity(ch.kraus.len());
    for entry in &ch.kraus {
        kraus.push(tables_to_matrix(entry, out_total, ch.dim_in).map_err(|_| {
            CliError::Core(qcdim::Error::dims(
                format!("{out_total}x{}", ch.dim_in),
                format!("{}x{}", entry.re.len(), entry.re.first().map_or(0, |r| r.len())),
                "Kraus operator table",
            ))
        })?);
    }
    QuantumChannel::cptp(ch.dim_in, ch.dim_out, ch.classical_register, kraus)
        .map_err(CliError::Core)
}

/// Reads and validates a scheme file against an ambient dimension.
pub fn load_scheme(path: &Path, ambient_dim: usize) -> Result<CompressionScheme, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let file: SchemeFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    if file.format_version != FORMAT_VERSION {
        return Err(CliError::Parse(format!(
            "{}: unsupported format_version '{}' (expected '{FORMAT_VERSION}')",
            path.display(),
            file.format_version
        )));
    }
    if file.dim != ambient_dim {
        return Err(CliError::Core(qcdim::Error::dims(
            format!("{ambient_dim}"),
            format!("{}", file.dim),
            "scheme ambient dimension",
        )));
    }
    if file.compress.dim_in != file.dim
        || file.compress.dim_out != file.d
        || file.compress.classical_register != file.n
        || file.decompress.dim_out != file.dim
    {
        return Err(CliError::Core(qcdim::Error::dims(
            format!("compress {}->{}x{}", file.dim, file.d, file.n),
            format!(
                "compress {}->{}x{}",
                file.compress.dim_in, file.compress.dim_out, file.compress.classical_register
            ),
            "scheme channel dimensions",
        )));
    }
    Ok(CompressionScheme {
        compress: channel_from_file(&file.compress)?,
        decompress: channel_from_file(&file.decompress)?,
        dimension: file.d,
        classical_states: file.n,
        kept: file.kept_blocks,
    })
}

/// Writes a serializable value as pretty JSON, to a file or stdout.
pub fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Parse(format!("serialization failed: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcdim::fixtures::degree3_pair;

    #[test]
    fn observable_round_trip_preserves_entries() {
        let (a, b) = degree3_pair();
        let file = observable_file(
            3,
            &[("A".to_string(), a.mat()), ("B".to_string(), b.mat())],
        );
        let text = serde_json::to_string_pretty(&file).unwrap();
        let back: ObservableFile = serde_json::from_str(&text).unwrap();
        let a2 = tables_to_matrix(&back.operators[0], 3, 3).unwrap();
        assert_eq!(a2, *a.mat());
        assert_eq!(back.operators[1].name, "B");
    }

    #[test]
    fn shape_mismatch_is_a_parse_error() {
        let entry = OperatorEntry {
            name: "X".into(),
            re: vec![vec![0.0; 2]; 3],
            im: vec![vec![0.0; 3]; 3],
        };
        assert!(tables_to_matrix(&entry, 3, 3).is_err());
    }
}
