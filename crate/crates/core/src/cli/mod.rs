//! The `nebmap` command-line tool.
//!
//! Exit codes: 0 success, 1 I/O or parse failure, 2 a mathematical precondition
//! does not hold (non-CP map asked for Kraus operators, mismatched bases, failed
//! basis verification, ...). Numbers are printed with 17 significant digits.

pub mod format;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::algebra::compose;
use crate::channels::{depolarizing_d, diag_expectation_d, identity_d, reduction_d, transpose_d};
use crate::classify::{classify, ClassificationReport, ClassifyOptions, Positivity, SearchBudget};
use crate::linalg::{CMatrix, DEFAULT_TOL};
use crate::linmap::{
    choi_of_map, d_to_choi, kraus_from_d, superop_of_map, to_coeff, CoeffMatrix, LinearMap, MapForm,
};
use crate::neb::{central_type_basis, quaternion_basis, verify_neb, weyl_basis, NiceErrorBasis};
use crate::Error;

use format::{parse_state, FormatError, Loaded, MapFile};

#[derive(Debug, Parser)]
#[command(
    name = "nebmap",
    version,
    about = "Linear maps on M_n(C) in nice-error-basis coordinates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a nice error basis, verify it and write it as a "neb" file.
    Gen(GenArgs),
    /// Convert a map file to another representation.
    Convert(ConvertArgs),
    /// Print the positivity classification of a map.
    Classify(ClassifyArgs),
    /// Write the coefficient matrix of a∘b.
    Compose(ComposeArgs),
    /// Apply a map to a matrix and print the result.
    Apply(ApplyArgs),
    /// Write the coefficient matrix of a named standard map.
    Example(ExampleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Weyl,
    Quaternion,
    #[value(name = "central_type", alias = "central-type")]
    CentralType,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Dmatrix,
    Choi,
    Kraus,
    Superop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    Identity,
    Depolarizing,
    Transpose,
    DiagExpectation,
    Reduction,
    NegIdentity,
}

/// Basis selection for commands that need coefficient matrices.
#[derive(Clone, Debug, Default, Args)]
pub struct BasisArgs {
    /// Basis family; defaults to the input's own basis, else the Weyl basis.
    #[arg(long)]
    pub kind: Option<Family>,
    /// Weyl dimension or central-type parameter.
    #[arg(long)]
    pub n: Option<usize>,
    /// A "neb" file to use as the basis.
    #[arg(long, conflicts_with = "kind")]
    pub basis_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub kind: Family,
    /// Weyl dimension or central-type parameter (dimension 2^(n-2)).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub to: Target,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
}

#[derive(Debug, Args)]
pub struct ComposeArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// JSON matrix `[[[re, im], ...], ...]` or a file with such a `data` field.
    #[arg(long)]
    pub state: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    #[arg(long)]
    pub name: ExampleName,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Written to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failed command, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    Io(String),
    Parse(String),
    Math(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Io(_) | Failure::Parse(_) => 1,
            Failure::Math(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Parse(m) | Failure::Math(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotPositiveSemidefinite { min_eigenvalue } => Failure::Math(format!(
                "map is not completely positive: coefficient matrix has min eigenvalue {}",
                num(min_eigenvalue)
            )),
            other => Failure::Math(other.to_string()),
        }
    }
}

fn parse_failure(path: &Path, e: FormatError) -> Failure {
    Failure::Parse(format!("{}: {e}", path.display()))
}

type CmdResult = std::result::Result<(), Failure>;

/// `x` with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn complex(z: Complex64) -> String {
    format!("[{}, {}]", num(z.re), num(z.im))
}

fn vector(v: &[Complex64]) -> String {
    let parts: Vec<String> = v.iter().copied().map(complex).collect();
    format!("[{}]", parts.join(", "))
}

/// Row-major JSON matrix with 17-digit entries; readable back as a state.
pub fn matrix_text(m: &CMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| format!("  {}", vector(m.row(i))))
        .collect();
    format!("[\n{}\n]", rows.join(",\n"))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, file: &MapFile) -> CmdResult {
    let mut text = file.to_json_string();
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let text = read_file(path)?;
    let file = MapFile::from_json_str(&text).map_err(|e| parse_failure(path, e))?;
    file.load().map_err(|e| parse_failure(path, e))
}

fn load_map(path: &Path) -> Result<MapForm, Failure> {
    match load(path)? {
        Loaded::Map(m) => Ok(m),
        Loaded::Basis(_) => Err(Failure::Parse(format!(
            "{}: expected a map file, found a basis",
            path.display()
        ))),
    }
}

fn family_basis(
    family: Family,
    n: Option<usize>,
    default_dim: Option<usize>,
) -> Result<NiceErrorBasis, Failure> {
    let need = |what: &str| Failure::Math(format!("--n is required for {what}"));
    Ok(match family {
        Family::Weyl => weyl_basis(n.or(default_dim).ok_or_else(|| need("the Weyl basis"))?)?,
        Family::Quaternion => quaternion_basis(),
        Family::CentralType => {
            central_type_basis(n.ok_or_else(|| need("the central-type basis"))?)?
        }
    })
}

impl BasisArgs {
    /// The requested basis, if any was requested, checked against `dim`.
    fn resolve(&self, dim: Option<usize>) -> Result<Option<Arc<NiceErrorBasis>>, Failure> {
        let basis = if let Some(path) = &self.basis_file {
            match load(path)? {
                Loaded::Basis(b) => b,
                Loaded::Map(_) => {
                    return Err(Failure::Parse(format!(
                        "{}: expected a basis file",
                        path.display()
                    )))
                }
            }
        } else if let Some(family) = self.kind {
            family_basis(family, self.n, dim)?
        } else if let Some(n) = self.n {
            weyl_basis(n)?
        } else {
            return Ok(None);
        };
        if let Some(d) = dim {
            if basis.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: basis.dim(),
                }
                .into());
            }
        }
        Ok(Some(Arc::new(basis)))
    }
}

/// Coefficient matrix of `map`: in `basis` if given, else its own or the Weyl basis.
fn coeff_of(map: &MapForm, basis: Option<Arc<NiceErrorBasis>>) -> Result<CoeffMatrix, Failure> {
    Ok(match (map, basis) {
        (_, Some(b)) => to_coeff(map, &b)?,
        (MapForm::Coeff(d), None) => d.clone(),
        (_, None) => to_coeff(map, &Arc::new(weyl_basis(map.dim())?))?,
    })
}

fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> CmdResult {
    let basis = family_basis(args.kind, args.n, None)?;
    let report = verify_neb(&basis, args.tol);
    let _ = write!(out, "{report}");
    if !report.passed {
        return Err(Failure::Math("basis failed verification".into()));
    }
    write_file(&args.out, &MapFile::from_basis(&basis))?;
    let _ = writeln!(
        out,
        "wrote {} unitaries of size {2}x{2} to {1}",
        basis.len(),
        args.out.display(),
        basis.dim()
    );
    Ok(())
}

fn cmd_convert(args: &ConvertArgs, out: &mut dyn Write) -> CmdResult {
    let map = load_map(&args.input)?;
    let basis = args.basis.resolve(Some(map.dim()))?;
    let converted = match args.to {
        Target::Dmatrix => MapForm::Coeff(coeff_of(&map, basis)?),
        Target::Choi => MapForm::Choi(match &map {
            MapForm::Coeff(d) => d_to_choi(d)?,
            other => choi_of_map(other)?,
        }),
        Target::Superop => MapForm::SuperOp(superop_of_map(&map)?),
        Target::Kraus => MapForm::Kraus(kraus_from_d(&coeff_of(&map, basis)?, args.tol)?),
    };
    let file = MapFile::from_map(&converted);
    write_file(&args.out, &file)?;
    let _ = writeln!(
        out,
        "wrote {} (dim {}) to {}",
        file.kind.name(),
        file.dim,
        args.out.display()
    );
    Ok(())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// One line per property.
pub fn report_text(r: &ClassificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "hermiticity-preserving: {} (deviation {})",
        yes_no(r.hermiticity_preserving),
        num(r.hermiticity_deviation)
    );
    let rank =
        r.cp.kraus_rank
            .map(|k| format!(", kraus rank {k}"))
            .unwrap_or_default();
    let _ = writeln!(
        s,
        "completely-positive: {} (min eigenvalue {}{rank})",
        yes_no(r.cp.is_cp),
        num(r.cp.min_eigenvalue)
    );
    match &r.ccp {
        Some(c) => {
            let _ = writeln!(
                s,
                "completely-co-positive: {} (min eigenvalue {})",
                yes_no(c.is_ccp),
                num(c.min_eigenvalue)
            );
        }
        None => s.push_str("completely-co-positive: not applicable (needs a Weyl basis)\n"),
    }
    match &r.positive {
        Positivity::ImpliedByCp => s.push_str("positive: yes (implied by complete positivity)\n"),
        Positivity::Violated { u, v, value } => {
            let _ = writeln!(
                s,
                "positive: no (violated: <v, a(uu*) v> = {}, u = {}, v = {})",
                num(*value),
                vector(u),
                vector(v)
            );
        }
        Positivity::NoViolationFound { best_value, budget } => {
            let _ = writeln!(
                s,
                "positive: no violation found (best value {}, {} restarts x {} iterations, seed {})",
                num(*best_value),
                budget.restarts,
                budget.iters,
                budget.seed
            );
        }
        Positivity::NotApplicable => {
            s.push_str("positive: not applicable (map is not hermiticity-preserving)\n")
        }
    }
    let _ = writeln!(
        s,
        "trace-preserving: {} (defect {})",
        yes_no(r.trace_preserving.holds),
        num(r.trace_preserving.max_defect)
    );
    let _ = writeln!(
        s,
        "unital: {} (defect {}, direct defect {})",
        yes_no(r.unital.holds),
        num(r.unital.max_defect),
        num(r.unital.direct_defect)
    );
    match &r.eb_2x2 {
        Some(eb) => {
            let cert = match &eb.certificate {
                Some(k) => format!("rank-one certificate with {} operators", k.len()),
                None => "no rank-one certificate".into(),
            };
            let _ = writeln!(
                s,
                "entanglement-breaking: {} ({cert})",
                yes_no(eb.is_entanglement_breaking)
            );
        }
        None => {
            s.push_str("entanglement-breaking: not applicable (needs n = 2 and a Weyl basis)\n")
        }
    }
    s
}

fn cmd_classify(args: &ClassifyArgs, out: &mut dyn Write) -> CmdResult {
    let map = load_map(&args.input)?;
    let basis = args.basis.resolve(Some(map.dim()))?;
    let d = coeff_of(&map, basis)?;
    let opts = ClassifyOptions {
        tol: args.tol,
        budget: SearchBudget {
            restarts: args.restarts,
            iters: args.iters,
            seed: args.seed,
        },
    };
    let report = classify(&d, &opts)?;
    let _ = write!(out, "{}", report_text(&report));
    Ok(())
}

fn cmd_compose(args: &ComposeArgs, out: &mut dyn Write) -> CmdResult {
    let a = load_map(&args.a)?;
    let b = load_map(&args.b)?;
    let (da, db) = match (&a, &b) {
        (MapForm::Coeff(da), MapForm::Coeff(db)) => (da.clone(), db.clone()),
        (MapForm::Coeff(da), other) => (da.clone(), to_coeff(other, da.basis())?),
        (other, MapForm::Coeff(db)) => (to_coeff(other, db.basis())?, db.clone()),
        _ => {
            let basis = Arc::new(weyl_basis(a.dim())?);
            (to_coeff(&a, &basis)?, to_coeff(&b, &basis)?)
        }
    };
    let composed = compose(&da, &db)?;
    write_file(&args.out, &MapFile::from_coeff(&composed))?;
    let _ = writeln!(
        out,
        "wrote dmatrix (dim {}) to {}",
        composed.dim(),
        args.out.display()
    );
    Ok(())
}

fn cmd_apply(args: &ApplyArgs, out: &mut dyn Write) -> CmdResult {
    let map = load_map(&args.map)?;
    let text = read_file(&args.state)?;
    let x = parse_state(&text).map_err(|e| parse_failure(&args.state, e))?;
    let y = map.apply(&x)?;
    let _ = writeln!(out, "{}", matrix_text(&y));
    Ok(())
}

/// Coefficient matrix of a named standard map.
pub fn example_d(name: ExampleName, basis: &Arc<NiceErrorBasis>) -> crate::Result<CoeffMatrix> {
    Ok(match name {
        ExampleName::Identity => identity_d(basis),
        ExampleName::Depolarizing => depolarizing_d(basis),
        ExampleName::Transpose => transpose_d(basis)?,
        ExampleName::DiagExpectation => diag_expectation_d(basis)?,
        ExampleName::Reduction => reduction_d(basis),
        ExampleName::NegIdentity => identity_d(basis).scale(Complex64::new(-1.0, 0.0)),
    })
}

fn cmd_example(args: &ExampleArgs, out: &mut dyn Write) -> CmdResult {
    let basis = match args.basis.resolve(None)? {
        Some(b) => b,
        None => Arc::new(weyl_basis(2)?),
    };
    let file = MapFile::from_coeff(&example_d(args.name, &basis)?);
    match &args.out {
        Some(path) => {
            write_file(path, &file)?;
            let _ = writeln!(
                out,
                "wrote dmatrix (dim {}) to {}",
                file.dim,
                path.display()
            );
        }
        None => {
            let _ = writeln!(out, "{}", file.to_json_string());
        }
    }
    Ok(())
}

/// Runs one command, writing normal output to `out` and diagnostics to `err`.
/// Returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Convert(a) => cmd_convert(a, out),
        Command::Classify(a) => cmd_classify(a, out),
        Command::Compose(a) => cmd_compose(a, out),
        Command::Apply(a) => cmd_apply(a, out),
        Command::Example(a) => cmd_example(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let cli =
            Cli::try_parse_from(std::iter::once("nebmap").chain(args.iter().copied())).unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&cli, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn number_format_has_17_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-0.5), "-5.0000000000000000e-1");
        assert_eq!(num(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn matrix_text_reparses() {
        let m = CMatrix::from_fn(2, 2, |i, j| {
            Complex64::new(1.0 / (i + j + 1) as f64, -0.1 * j as f64)
        });
        assert_eq!(parse_state(&matrix_text(&m)).unwrap(), m);
    }

    #[test]
    fn central_type_with_trivial_dimension_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.json");
        let (code, _, err) = run_args(&[
            "gen",
            "--kind",
            "central_type",
            "--n",
            "2",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 2, "{err}");
        assert!(!path.exists());
    }

    #[test]
    fn example_to_stdout_parses() {
        let (code, out, _) = run_args(&["example", "--name", "transpose", "--n", "2"]);
        assert_eq!(code, 0);
        let file = MapFile::from_json_str(&out).unwrap();
        assert!(file.load().is_ok());
    }

    #[test]
    fn transpose_report_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        let p = path.to_str().unwrap();
        assert_eq!(
            run_args(&["example", "--name", "transpose", "--out", p]).0,
            0
        );
        let (code, out, _) = run_args(&["classify", "--in", p]);
        assert_eq!(code, 0);
        assert!(out.contains("hermiticity-preserving: yes"));
        assert!(out.contains("completely-positive: no (min eigenvalue -5.0000000000000000e-1)"));
        assert!(out.contains("completely-co-positive: yes"));
        assert!(out.contains("positive: no violation found"));
        assert!(out.contains("trace-preserving: yes"));
        assert!(out.contains("unital: yes"));
        assert!(out.contains("entanglement-breaking: no"));
    }
}
