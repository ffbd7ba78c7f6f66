//! Command-line driver: matrix files, the search pipeline and its artifacts.
//!
//! Matrix files look like
//!
//! ```text
//! dim 2 complex
//! 0.70710678118654757,0 0,0.70710678118654757
//! 0,0.70710678118654757 0.70710678118654757,0
//! ```
//!
//! A `real` file has plain numbers instead of `re,im` pairs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;

use crate::benchgen::{cayley_tree, dtqw_step, qft_matrix, random_orthogonal, random_unitary, star_graph};
use crate::circuit::{evaluate, DEFAULT_SIMULATION_CAP};
use crate::csd::Branch;
use crate::error::{Error, Result};
use crate::export::{format_g17, to_gatelist};
use crate::linalg::{expand_to_power_of_two, UnitaryMatrix, C64, UNITARY_TOL};
use crate::optimizer::{parallel_search, AnnealConfig, CostBreakdown, CostModel, SearchResult};

/// Largest deviation accepted when the exported circuit is simulated.
pub const VERIFY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum BranchChoice {
    /// Real iff every imaginary part of the input is exactly zero.
    #[default]
    Auto,
    Real,
    Complex,
}

impl BranchChoice {
    pub fn resolve(self, u: &UnitaryMatrix) -> Branch {
        match self {
            BranchChoice::Auto => Branch::detect(u),
            BranchChoice::Real => Branch::Real,
            BranchChoice::Complex => Branch::Complex,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub branch: BranchChoice,
    pub anneal: AnnealConfig,
    /// Artifacts are written to `<prefix>.circuit` and friends.
    pub prefix: PathBuf,
    pub verify: bool,
    /// Unitarity tolerance for the input.
    pub tol: f64,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, prefix: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            branch: BranchChoice::Auto,
            anneal: AnnealConfig::default(),
            prefix: prefix.into(),
            verify: false,
            tol: UNITARY_TOL,
        }
    }
}

fn parse_number(token: &str, line: usize, column: usize) -> Result<f64> {
    match token.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::parse(line, column, format!("invalid number `{token}`"))),
    }
}

/// Parses the matrix file grammar and checks unitarity at `tol`.
pub fn parse_matrix(text: &str, tol: f64) -> Result<UnitaryMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, 1, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (m, complex) = match fields.as_slice() {
        ["dim", m, kind] => {
            let column = header.find(m).unwrap_or(0) + 1;
            let m: usize = m
                .parse()
                .ok()
                .filter(|&m| m > 0)
                .ok_or_else(|| Error::parse(1, column, format!("invalid dimension `{m}`")))?;
            let complex = match *kind {
                "real" => false,
                "complex" => true,
                other => {
                    let column = header.rfind(other).unwrap_or(0) + 1;
                    return Err(Error::parse(1, column, format!("expected `real` or `complex`, got `{other}`")));
                }
            };
            (m, complex)
        }
        _ => return Err(Error::parse(1, 1, "expected `dim <m> <real|complex>`")),
    };
    let mut entries = DMatrix::<C64>::zeros(m, m);
    for row in 0..m {
        let line_no = row + 2;
        let (_, line) = lines
            .next()
            .ok_or_else(|| Error::parse(line_no, 1, format!("missing row {} of {m}", row + 1)))?;
        let mut col = 0;
        let mut pos = 0;
        for token in line.split_whitespace() {
            let column = line[pos..].find(token).map_or(1, |off| pos + off + 1);
            pos = column - 1 + token.len();
            if col == m {
                return Err(Error::parse(line_no, column, format!("more than {m} entries")));
            }
            let value = if complex {
                let (re, im) = token
                    .split_once(',')
                    .ok_or_else(|| Error::parse(line_no, column, format!("expected `re,im`, got `{token}`")))?;
                C64::new(
                    parse_number(re, line_no, column)?,
                    parse_number(im, line_no, column + re.len() + 1)?,
                )
            } else {
                C64::new(parse_number(token, line_no, column)?, 0.0)
            };
            entries[(row, col)] = value;
            col += 1;
        }
        if col < m {
            return Err(Error::parse(line_no, line.len() + 1, format!("expected {m} entries, found {col}")));
        }
    }
    for (line_no, line) in lines {
        if !line.trim().is_empty() {
            return Err(Error::parse(line_no, 1, "unexpected content after the last row"));
        }
    }
    UnitaryMatrix::with_tolerance(entries, tol)
}

pub fn parse_matrix_file(path: &Path, tol: f64) -> Result<UnitaryMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix(&text, tol)
}

/// Serialises `u` in the matrix file grammar, `real` iff `u` has no
/// imaginary parts. Entries use `%.17g` so parsing is exact.
pub fn write_matrix(u: &UnitaryMatrix) -> String {
    let m = u.dim();
    let real = u.is_real();
    let mut out = format!("dim {m} {}\n", if real { "real" } else { "complex" });
    for i in 0..m {
        let row: Vec<String> = (0..m)
            .map(|j| {
                let z = u.matrix()[(i, j)];
                if real {
                    format_g17(z.re)
                } else {
                    format!("{},{}", format_g17(z.re), format_g17(z.im))
                }
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_matrix_file(u: &UnitaryMatrix, path: &Path) -> Result<()> {
    fs::write(path, write_matrix(u)).map_err(|e| Error::io(path, e))
}

/// Files written by [`run_pipeline`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifacts {
    pub circuit: PathBuf,
    /// History of the best worker.
    pub history: PathBuf,
    /// One history per worker, indexed by worker id.
    pub worker_histories: Vec<PathBuf>,
    pub summary: PathBuf,
}

impl Artifacts {
    pub fn new(prefix: &Path, workers: usize) -> Self {
        let with = |suffix: &str| {
            let mut s = prefix.as_os_str().to_owned();
            s.push(suffix);
            PathBuf::from(s)
        };
        Self {
            circuit: with(".circuit"),
            history: with(".history.csv"),
            worker_histories: (0..workers).map(|w| with(&format!(".history.w{w}.csv"))).collect(),
            summary: with(".summary.txt"),
        }
    }

    pub fn all(&self) -> impl Iterator<Item = &PathBuf> {
        [&self.circuit, &self.history, &self.summary]
            .into_iter()
            .chain(&self.worker_histories)
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub original_dim: usize,
    pub branch: Branch,
    pub result: SearchResult,
    /// Max deviation of the simulated circuit, when verification ran.
    pub deviation: Option<f64>,
    pub summary: String,
    pub artifacts: Artifacts,
}

fn stage_line(label: &str, b: &CostBreakdown) -> String {
    format!("{label}: {b} gates\n")
}

fn summary_text(cfg: &RunConfig, original_dim: usize, branch: Branch, r: &SearchResult, deviation: Option<f64>) -> String {
    let dim = r.p.len();
    let mut s = String::new();
    let _ = writeln!(s, "input: {}", cfg.input.display());
    if dim == original_dim {
        let _ = writeln!(s, "dimension: {dim}");
    } else {
        let _ = writeln!(s, "dimension: {original_dim} (expanded to {dim})");
    }
    let _ = writeln!(s, "qubits: {}", r.q.n_qubits());
    let branch = match branch {
        Branch::Real => "real",
        Branch::Complex => "complex",
    };
    let _ = writeln!(s, "branch: {branch}");
    let a = &cfg.anneal;
    let _ = writeln!(
        s,
        "search: workers={} seed={} i_max={} j_max={} alpha={}",
        a.workers, a.seed, a.i_max, a.j_max, a.alpha
    );
    s.push_str("cost (swap + P + U' + P^T + swap):\n");
    s.push_str(&stage_line("No optimisation", &r.unoptimised));
    s.push_str(&stage_line(
        "After selection of an optimised qubit permutation",
        &r.best_selection().selected_cost(),
    ));
    s.push_str(&stage_line("After simulated annealing", &r.breakdown));
    let _ = writeln!(s, "best worker: {}", r.best_worker);
    let _ = writeln!(s, "q: {}", r.q);
    let _ = writeln!(s, "p: {}", r.p);
    match deviation {
        Some(d) => {
            let _ = writeln!(s, "verification: max deviation {d:.3e}");
        }
        None => s.push_str("verification: skipped\n"),
    }
    s
}

fn write_all(files: &[(&Path, String)]) -> Result<()> {
    for (path, contents) in files {
        fs::write(path, contents).map_err(|e| Error::io(*path, e))?;
    }
    Ok(())
}

/// Parse, expand, search, export and (optionally) verify.
///
/// Files are written only after the search finished; if anything fails
/// afterwards, whatever was written is removed again.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunReport> {
    cfg.anneal.validate()?;
    let input = parse_matrix_file(&cfg.input, cfg.tol)?;
    let original_dim = input.dim();
    let u = expand_to_power_of_two(&input);
    let branch = cfg.branch.resolve(&u);
    let model = CostModel::new(&u, branch)?;
    let result = parallel_search(&model, &cfg.anneal)?;
    let artifacts = Artifacts::new(&cfg.prefix, cfg.anneal.workers);
    let outcome = (|| {
        let deviation = if cfg.verify && model.n_qubits() <= DEFAULT_SIMULATION_CAP {
            let d = evaluate(&result.circuit.flatten())?.max_deviation(u.matrix());
            if !(d <= VERIFY_TOL) {
                return Err(Error::Verification {
                    deviation: d,
                    tolerance: VERIFY_TOL,
                });
            }
            Some(d)
        } else {
            None
        };
        let summary = summary_text(cfg, original_dim, branch, &result, deviation);
        let best = &result.workers[result.best_worker];
        let mut files: Vec<(&Path, String)> = vec![
            (&artifacts.circuit, to_gatelist(&result.circuit)),
            (&artifacts.history, best.history_csv()),
            (&artifacts.summary, summary.clone()),
        ];
        for (path, w) in artifacts.worker_histories.iter().zip(&result.workers) {
            files.push((path, w.history_csv()));
        }
        write_all(&files)?;
        Ok((deviation, summary))
    })();
    match outcome {
        Ok((deviation, summary)) => Ok(RunReport {
            original_dim,
            branch,
            result,
            deviation,
            summary,
            artifacts,
        }),
        Err(e) => {
            for path in artifacts.all() {
                let _ = fs::remove_file(path);
            }
            Err(e)
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "csdperm", version, about = "Compile unitaries to CSD circuits and search for cheaper permuted forms")]
#[command(args_conflicts_with_subcommands = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Matrix file to compile.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BranchChoice::Auto)]
    pub branch: BranchChoice,
    /// Annealing iterations per worker.
    #[arg(long, default_value_t = 40_000)]
    pub imax: usize,
    /// Qubit-permutation probes per worker.
    #[arg(long, default_value_t = 1_000)]
    pub jmax: usize,
    /// Threshold fraction in [0, 1).
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output prefix; defaults to the input path without its extension.
    #[arg(long)]
    pub prefix: Option<PathBuf>,
    /// Simulate the exported circuit and compare it with the input.
    #[arg(long)]
    pub verify: bool,
    /// Unitarity tolerance for the input.
    #[arg(long, default_value_t = UNITARY_TOL)]
    pub tol: f64,
}

impl RunArgs {
    pub fn into_config(self) -> Result<RunConfig> {
        let input = self
            .input
            .ok_or_else(|| Error::Config("--input is required unless a subcommand is given".into()))?;
        let prefix = self.prefix.unwrap_or_else(|| input.with_extension(""));
        let defaults = AnnealConfig::default();
        Ok(RunConfig {
            input,
            branch: self.branch,
            anneal: AnnealConfig {
                i_max: self.imax,
                j_max: self.jmax,
                alpha: self.alpha,
                seed: self.seed,
                workers: self.workers.unwrap_or(defaults.workers),
            },
            prefix,
            verify: self.verify,
            tol: self.tol,
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a benchmark matrix in the matrix file format.
    Gen {
        #[command(subcommand)]
        matrix: GenMatrix,
        /// Destination file; stdout if absent.
        #[arg(long, global = true)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum GenMatrix {
    /// Quantum Fourier transform of dimension N.
    Qft { dim: usize },
    /// Walk step on the star graph with K leaves.
    Star { leaves: usize },
    /// Walk step on the Cayley tree of degree D with G generations.
    Cayley { degree: usize, generations: usize },
    /// Haar-random orthogonal matrix of dimension N.
    Orthogonal {
        dim: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Haar-random unitary matrix of dimension N.
    Unitary {
        dim: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

impl GenMatrix {
    pub fn generate(&self) -> Result<UnitaryMatrix> {
        match *self {
            GenMatrix::Qft { dim } => qft_matrix(dim),
            GenMatrix::Star { leaves } => dtqw_step(&star_graph(leaves)?),
            GenMatrix::Cayley { degree, generations } => dtqw_step(&cayley_tree(degree, generations)?),
            GenMatrix::Orthogonal { dim, seed } => random_orthogonal(dim, seed),
            GenMatrix::Unitary { dim, seed } => random_unitary(dim, seed),
        }
    }
}

/// Runs the parsed command line; the returned text goes to stdout.
pub fn execute(cli: Cli) -> Result<String> {
    match cli.command {
        Some(Command::Gen { matrix, output }) => {
            let u = matrix.generate()?;
            match output {
                Some(path) => {
                    write_matrix_file(&u, &path)?;
                    Ok(String::new())
                }
                None => Ok(write_matrix(&u)),
            }
        }
        None => {
            let cfg = cli.run.into_config()?;
            Ok(run_pipeline(&cfg)?.summary)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_file() {
        let u = parse_matrix("dim 2 real\n1 0\n0 1\n", UNITARY_TOL).unwrap();
        assert_eq!(u, UnitaryMatrix::identity(2));
    }

    #[test]
    fn missing_row_reports_its_line() {
        let err = parse_matrix("dim 3 real\n1 0 0\n0 1 0\n", UNITARY_TOL).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err:?}");
    }

    #[test]
    fn bad_entry_column() {
        let err = parse_matrix("dim 2 real\n1 x\n0 1\n", UNITARY_TOL).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: 3, .. }), "{err:?}");
        let err = parse_matrix("dim 2 complex\n1,0 0,y\n0,0 1,0\n", UNITARY_TOL).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: 7, .. }), "{err:?}");
    }

    #[test]
    fn short_and_long_rows() {
        let err = parse_matrix("dim 2 real\n1\n0 1\n", UNITARY_TOL).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_matrix("dim 2 real\n1 0 0\n0 1\n", UNITARY_TOL).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: 5, .. }));
        let err = parse_matrix("dim 2 real\n1 0\n0 1\n1 1\n", UNITARY_TOL).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));
    }

    #[test]
    fn header_errors() {
        assert!(matches!(parse_matrix("", 1e-10), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse_matrix("dim 2 quaternion\n", 1e-10),
            Err(Error::Parse { line: 1, column: 7, .. })
        ));
        assert!(matches!(parse_matrix("dim x real\n", 1e-10), Err(Error::Parse { line: 1, column: 5, .. })));
    }

    #[test]
    fn non_unitary_reports_deviation() {
        let err = parse_matrix("dim 2 real\n1 0\n0 2\n", UNITARY_TOL).unwrap_err();
        match err {
            Error::NotUnitary { deviation, .. } => assert!((deviation - 3.0).abs() < 1e-12),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn scientific_notation_accepted() {
        let u = parse_matrix("dim 1 complex\n1e0,0.0E+00\n", UNITARY_TOL).unwrap();
        assert_eq!(u.dim(), 1);
    }

    #[test]
    fn qft_round_trip() {
        let q = qft_matrix(8).unwrap();
        let back = parse_matrix(&write_matrix(&q), UNITARY_TOL).unwrap();
        assert!(back.max_deviation(q.matrix()) <= 1e-15);
        assert!(write_matrix(&q).starts_with("dim 8 complex\n"));
    }

    #[test]
    fn auto_branch() {
        let q = qft_matrix(4).unwrap();
        assert_eq!(BranchChoice::Auto.resolve(&q), Branch::Complex);
        assert_eq!(BranchChoice::Auto.resolve(&UnitaryMatrix::identity(4)), Branch::Real);
    }

    #[test]
    fn artifact_names() {
        let a = Artifacts::new(Path::new("out/run"), 2);
        assert_eq!(a.circuit, PathBuf::from("out/run.circuit"));
        assert_eq!(a.worker_histories[1], PathBuf::from("out/run.history.w1.csv"));
        assert_eq!(a.all().count(), 5);
    }

    #[test]
    fn cli_flags_parse() {
        let cli = Cli::try_parse_from([
            "csdperm", "--input", "m.txt", "--branch", "real", "--imax", "10", "--jmax", "2", "--alpha", "0", "--seed",
            "5", "--workers", "3", "--prefix", "x", "--verify", "--tol", "1e-9",
        ])
        .unwrap();
        let cfg = cli.run.into_config().unwrap();
        assert_eq!(cfg.branch, BranchChoice::Real);
        assert_eq!(cfg.anneal.i_max, 10);
        assert_eq!(cfg.anneal.workers, 3);
        assert!(cfg.verify);
        let gen = Cli::try_parse_from(["csdperm", "gen", "cayley", "3", "3"]).unwrap();
        assert!(matches!(
            gen.command,
            Some(Command::Gen {
                matrix: GenMatrix::Cayley {
                    degree: 3,
                    generations: 3
                },
                ..
            })
        ));
    }
}
