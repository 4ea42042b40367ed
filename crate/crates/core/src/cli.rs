//! Command-line front end. Every command writes one table as CSV or JSON.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{invalid, Error, Result};
use crate::euclid_acf::{phi_functional, EuclidField, TwoPhasePair};
use crate::euclid_eigen::{cap_eigenvalue, psi, EuclidCap};
use crate::heis_eigen::{alpha_h1, euclid_bridge, sl_eigen, PhiInterval};
use crate::heis_mono::{
    boundary_quotient, cap_field, j_beta, j_log_derivative, linear_minus, linear_plus, t_minus, t_plus, HTwoPhasePair,
};
use crate::heisenberg_core::HField;
use crate::quadrature::Resolution;
use crate::sturm::MAX_MESH;
use crate::verify::{run_all, VerifyConfig};

const MIN_MESH: usize = 16;
const MAX_NODES: usize = 4096;

#[derive(Debug, Parser, Serialize)]
#[command(name = "acf", version, about = "Monotonicity-formula computations in ℝ³ and ℍ¹")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: GlobalOpts,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalOpts {
    /// Finite-element mesh size for eigenvalue solves.
    #[arg(long, global = true, default_value_t = 2048, value_parser = clap::value_parser!(u64).range(MIN_MESH as u64..=MAX_MESH as u64))]
    pub mesh: u64,
    #[arg(long, global = true, default_value_t = 64, value_parser = node_count)]
    pub n_rho: usize,
    #[arg(long, global = true, default_value_t = 128, value_parser = node_count)]
    pub n_phi: usize,
    #[arg(long, global = true, default_value_t = 128, value_parser = node_count)]
    pub n_theta: usize,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn node_count(s: &str) -> std::result::Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if !(2..=MAX_NODES).contains(&n) {
        return Err(format!("must lie in 2..={MAX_NODES}"));
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EuclidPairKind {
    /// `(x₃⁺, x₃⁻)`.
    HalfSpace,
    /// Eigenfunction caps of half-angles `φ₀` (north) and `π − φ₀` (south).
    Caps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HPairKind {
    /// `((ax + by)⁺, (ax + by)⁻)`.
    Linear,
    /// `(a·t⁺, b·t⁻)`.
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HFieldKind {
    /// `(ax + by)⁺`.
    Linear,
    /// `a·t⁺`.
    T,
    /// `ρ^α f(φ)` with `f` the first eigenfunction on `(0, φ₀)`.
    Cap,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// First Dirichlet eigenvalue of a spherical cap in S^{n−1}.
    EigenCap {
        #[arg(long)]
        phi0: f64,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// First eigenvalue of 4(sin φ f′)′ = −λ sin φ f on (φ₀, φ₁).
    EigenSl {
        #[arg(long)]
        phi0: f64,
        #[arg(long)]
        phi1: f64,
    },
    /// Ratio of the ℍ¹ φ-eigenvalue to the S² cap eigenvalue.
    Bridge {
        #[arg(long, value_delimiter = ',', required = true)]
        phi0: Vec<f64>,
    },
    /// The Euclidean functional Φ(r).
    Phi {
        #[arg(long, value_enum, default_value_t = EuclidPairKind::HalfSpace)]
        pair: EuclidPairKind,
        #[arg(long, default_value_t = PI / 2.0)]
        phi0: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,1")]
        r: Vec<f64>,
    },
    /// The ℍ¹ functional J_β(r) and its log-derivative at r = 1.
    Jbeta {
        #[arg(long, value_enum, default_value_t = HPairKind::T)]
        pair: HPairKind,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 4.0)]
        beta: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,1")]
        r: Vec<f64>,
    },
    /// Boundary Rayleigh quotient on the unit Korányi sphere.
    Quotient {
        #[arg(long, value_enum, default_value_t = HFieldKind::Linear)]
        field: HFieldKind,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 0.0)]
        b: f64,
        #[arg(long, default_value_t = PI / 2.0)]
        phi0: f64,
    },
    /// ψ(s) on s = k/(points + 1), together with s = 1/4 and 1/2.
    PsiTable {
        #[arg(long, default_value_t = 99, value_parser = clap::value_parser!(u64).range(1..=1_000_000))]
        points: u64,
    },
    /// Runs the acceptance checks; exits 1 if any fails.
    Verify {
        /// Monte Carlo samples for the volume oracle.
        #[arg(long, default_value_t = 10_000_000)]
        samples: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::EigenCap { .. } => "eigen-cap",
            Command::EigenSl { .. } => "eigen-sl",
            Command::Bridge { .. } => "bridge",
            Command::Phi { .. } => "phi",
            Command::Jbeta { .. } => "jbeta",
            Command::Quotient { .. } => "quotient",
            Command::PsiTable { .. } => "psi-table",
            Command::Verify { .. } => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(k) => k.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(x) => json!(x.to_string()),
            Cell::Int(k) => json!(k),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(k: usize) -> Self {
        Cell::Int(k as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io_err = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        w.write_record(&self.columns).map_err(io_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let map: Map<String, Value> =
                        self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                    Value::Object(map)
                })
                .collect(),
        )
    }
}

fn resolution(opts: &GlobalOpts) -> Result<Resolution> {
    Resolution::new(opts.n_rho, opts.n_phi, opts.n_theta)
}

fn euclid_pair(kind: EuclidPairKind, phi0: f64, mesh: usize) -> Result<TwoPhasePair> {
    match kind {
        EuclidPairKind::HalfSpace => TwoPhasePair::new(EuclidField::half_space_plus(), EuclidField::half_space_minus()),
        EuclidPairKind::Caps => {
            let north = cap_eigenvalue(EuclidCap::new(phi0, 3)?, mesh)?;
            let south = cap_eigenvalue(EuclidCap::new(PI - phi0, 3)?, mesh)?;
            TwoPhasePair::new(
                EuclidField::cap_eigenfield(phi0, &north, true)?,
                EuclidField::cap_eigenfield(PI - phi0, &south, false)?,
            )
        }
    }
}

fn h_pair(kind: HPairKind, a: f64, b: f64) -> Result<HTwoPhasePair> {
    match kind {
        HPairKind::Linear => HTwoPhasePair::new(linear_plus(a, b)?, linear_minus(a, b)?),
        HPairKind::T => HTwoPhasePair::new(t_plus(a)?, t_minus(b)?),
    }
}

fn h_field(kind: HFieldKind, a: f64, b: f64, phi0: f64, mesh: usize) -> Result<HField> {
    match kind {
        HFieldKind::Linear => linear_plus(a, b),
        HFieldKind::T => t_plus(a),
        HFieldKind::Cap => {
            let sol = sl_eigen(PhiInterval::new(0.0, phi0)?, mesh)?;
            cap_field(phi0, sol.lambda, alpha_h1(sol.lambda)?, true)
        }
    }
}

/// Runs a parsed command. The flag tells whether every check passed.
pub fn execute(cli: &Cli) -> Result<(Table, bool)> {
    let opts = &cli.opts;
    let mesh = opts.mesh as usize;
    let res = resolution(opts)?;
    let mut ok = true;
    let table = match &cli.command {
        Command::EigenCap { phi0, n } => {
            let sol = cap_eigenvalue(EuclidCap::new(*phi0, *n)?, mesh)?;
            let mut t = Table::new(&["phi0", "n", "lambda", "alpha", "mesh_size", "est_error"]);
            t.push(vec![
                (*phi0).into(),
                (*n).into(),
                sol.lambda.into(),
                sol.alpha.into(),
                sol.mesh_size.into(),
                sol.est_error.into(),
            ]);
            t
        }
        Command::EigenSl { phi0, phi1 } => {
            let sol = sl_eigen(PhiInterval::new(*phi0, *phi1)?, mesh)?;
            let mut t = Table::new(&["phi0", "phi1", "lambda", "alpha", "mesh_size", "est_error"]);
            t.push(vec![
                (*phi0).into(),
                (*phi1).into(),
                sol.lambda.into(),
                sol.alpha.into(),
                sol.mesh_size.into(),
                sol.est_error.into(),
            ]);
            t
        }
        Command::Bridge { phi0 } => {
            let mut t = Table::new(&["phi0", "lambda_h", "lambda_e", "ratio", "eigenfunction_gap", "est_error"]);
            for &p in phi0 {
                let b = euclid_bridge(p, mesh)?;
                t.push(vec![
                    p.into(),
                    b.lambda_h.into(),
                    b.lambda_e.into(),
                    b.ratio.into(),
                    b.eigenfunction_gap.into(),
                    b.est_error.into(),
                ]);
            }
            t
        }
        Command::Phi { pair, phi0, r } => {
            let pair = euclid_pair(*pair, *phi0, mesh)?;
            let mut t = Table::new(&["r", "phi"]);
            for &ri in r {
                t.push(vec![ri.into(), phi_functional(&pair, ri, res)?.into()]);
            }
            t
        }
        Command::Jbeta { pair, a, b, beta, r } => {
            let pair = h_pair(*pair, *a, *b)?;
            let dlog = j_log_derivative(&pair, *beta, res)?;
            let mut t = Table::new(&["r", "beta", "j", "log_derivative_at_1"]);
            for &ri in r {
                t.push(vec![ri.into(), (*beta).into(), j_beta(&pair, ri, *beta, res)?.into(), dlog.into()]);
            }
            t
        }
        Command::Quotient { field, a, b, phi0 } => {
            let u = h_field(*field, *a, *b, *phi0, mesh)?;
            let mut t = Table::new(&["field", "quotient"]);
            let name = match field {
                HFieldKind::Linear => "linear",
                HFieldKind::T => "t",
                HFieldKind::Cap => "cap",
            };
            t.push(vec![name.into(), boundary_quotient(&u, res)?.into()]);
            t
        }
        Command::PsiTable { points } => {
            let m = *points as usize + 1;
            let mut s: Vec<f64> = (1..m).map(|k| k as f64 / m as f64).collect();
            s.extend([0.25, 0.5]);
            s.sort_by(f64::total_cmp);
            s.dedup();
            let mut t = Table::new(&["s", "psi"]);
            for si in s {
                t.push(vec![si.into(), psi(si)?.into()]);
            }
            t
        }
        Command::Verify { samples } => {
            if *samples == 0 {
                return invalid("need at least one Monte Carlo sample");
            }
            let checks = run_all(VerifyConfig { res, mesh, mc_samples: *samples })?;
            let mut t = Table::new(&["id", "name", "measured", "expected", "tolerance", "pass"]);
            for c in checks {
                ok &= c.pass;
                t.push(vec![
                    c.id.as_str().into(),
                    c.name.as_str().into(),
                    c.measured.into(),
                    c.expected.into(),
                    c.tolerance.into(),
                    c.pass.into(),
                ]);
            }
            t
        }
    };
    Ok((table, ok))
}

pub fn render(cli: &Cli, table: &Table) -> Result<String> {
    match cli.opts.format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let doc = json!({
                "command": cli.command.name(),
                "config": serde_json::to_value(cli).expect("config serializes"),
                "rows": table.json_rows(),
                "versions": { env!("CARGO_PKG_NAME"): env!("CARGO_PKG_VERSION") },
            });
            Ok(serde_json::to_string_pretty(&doc).expect("json serializes") + "\n")
        }
    }
}

fn print_checks(table: &Table) {
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        let verdict = if row[5] == Cell::Bool(true) { "PASS" } else { "FAIL" };
        eprintln!(
            "{verdict} [{}] {}: measured {} expected {} tol {}",
            cells[0], cells[1], cells[2], cells[3], cells[4]
        );
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (table, ok) = match execute(&cli) {
        Ok(v) => v,
        Err(e @ (Error::InvalidArgument(_) | Error::UnsupportedDimension(_))) => {
            eprintln!("error: {e}");
            return 2;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if matches!(cli.command, Command::Verify { .. }) {
        print_checks(&table);
    }
    let text = match render(&cli, &table) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let written = match &cli.opts.out {
        Some(path) => File::create(path).and_then(|mut f| f.write_all(text.as_bytes())),
        None => io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return 1;
    }
    if ok {
        0
    } else {
        1
    }
}
