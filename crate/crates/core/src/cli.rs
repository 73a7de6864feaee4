//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage, input
//! or numerical errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::floquet::Stability;
use crate::gauge::{reduce_to_canonical, GaugeSummary};
use crate::pauli::C64;
use crate::potential::{Potential, PotentialFile};
use crate::propagator::normalized_asymptotic_defect;
use crate::spectrum::{
    bc_zeros, default_points, instability_intervals, scan_with, BoundaryCondition, SpectralScan,
    DEFAULT_GAP_TOLERANCE,
};
use crate::verify::{verify_claim, Claim, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Column names of the scan table.
pub const SCAN_HEADER: [&str; 6] = [
    "lambda",
    "delta_re",
    "delta_im",
    "delta_reduced",
    "ddelta_dlambda",
    "stability",
];

#[derive(Parser, Debug)]
#[command(name = "dirac-floquet", version, about = "Floquet spectra of periodic 2x2 Dirac systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduced discriminant and its derivative on a uniform λ grid.
    Scan(Common),
    /// Eigenvalues for one of the boundary conditions bc1..bc4.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "bc1")]
        bc: BcArg,
    },
    /// Instability intervals and zero multiplicities.
    Gaps(Common),
    /// Gauge data and the reduced canonical potential.
    Gauge(Common),
    /// Runs one verification claim and prints its report.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        claim: String,
    },
    /// Normalised large-|λ| defect along the imaginary axis.
    Asymptotics {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_values_t = vec![10.0, 20.0, 40.0])]
        zeta: Vec<f64>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Potential file (JSON).
    #[arg(long)]
    potential: PathBuf,
    #[arg(long, allow_negative_numbers = true, default_value_t = -8.0)]
    lo: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 8.0)]
    hi: f64,
    /// Grid points (default: 200 per unit of λ).
    #[arg(long)]
    n: Option<usize>,
    /// Gap-length tolerance for double zeros.
    #[arg(long, default_value_t = DEFAULT_GAP_TOLERANCE)]
    tol: f64,
    /// Output path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    parallel: bool,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BcArg {
    Bc1,
    Bc2,
    Bc3,
    Bc4,
}

impl From<BcArg> for BoundaryCondition {
    fn from(b: BcArg) -> Self {
        match b {
            BcArg::Bc1 => BoundaryCondition::BC1,
            BcArg::Bc2 => BoundaryCondition::BC2,
            BcArg::Bc3 => BoundaryCondition::BC3,
            BcArg::Bc4 => BoundaryCondition::BC4,
        }
    }
}

/// Failure that maps to an exit status.
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Verification,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::Verification) => EXIT_FAILED,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

struct Loaded {
    potential: Potential,
    name: Option<String>,
}

fn load(path: &Path) -> Result<Loaded> {
    let file = PotentialFile::read(path).with_context(|| format!("potential file {}", path.display()))?;
    let potential = file
        .to_potential()
        .with_context(|| format!("potential file {}", path.display()))?;
    Ok(Loaded {
        potential,
        name: file.name,
    })
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn points(c: &Common) -> usize {
    c.n.unwrap_or_else(|| default_points(c.lo, c.hi))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Scan(c) => {
            let q = load(&c.potential)?;
            let s = scan_with(&q.potential, c.lo, c.hi, points(&c), c.parallel).map_err(anyhow::Error::from)?;
            match c.format.unwrap_or(Format::Csv) {
                Format::Csv => write_scan_csv(sink(&c.out)?, &s)?,
                Format::Json => write_json(&c.out, &scan_rows(&s))?,
            }
        }
        Command::Spectrum { common: c, bc } => {
            let q = load(&c.potential)?;
            let zeros = bc_zeros(&q.potential, bc.into(), c.lo, c.hi, points(&c)).map_err(anyhow::Error::from)?;
            match c.format.unwrap_or(Format::Json) {
                Format::Json => write_json(&c.out, &zeros)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(sink(&c.out)?);
                    w.write_record(["lambda", "multiplicity", "residual", "slope"])
                        .map_err(anyhow::Error::from)?;
                    for z in &zeros {
                        w.write_record([
                            format!("{:.16e}", z.lambda),
                            format!("{:?}", z.multiplicity).to_lowercase(),
                            format!("{:.3e}", z.residual),
                            format!("{:.16e}", z.slope),
                        ])
                        .map_err(anyhow::Error::from)?;
                    }
                    w.flush().map_err(anyhow::Error::from)?;
                }
            }
        }
        Command::Gaps(c) => {
            let q = load(&c.potential)?;
            let s = scan_with(&q.potential, c.lo, c.hi, points(&c), c.parallel).map_err(anyhow::Error::from)?;
            let report = instability_intervals(&s, c.tol).map_err(anyhow::Error::from)?;
            match c.format.unwrap_or(Format::Json) {
                Format::Json => write_json(&c.out, &report)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(sink(&c.out)?);
                    w.write_record(["lo", "hi", "length", "side", "truncated"])
                        .map_err(anyhow::Error::from)?;
                    for g in &report.gaps {
                        w.write_record([
                            format!("{:.16e}", g.lo),
                            format!("{:.16e}", g.hi),
                            format!("{:.16e}", g.length),
                            serde_json::to_value(g.side)
                                .map_err(anyhow::Error::from)?
                                .as_str()
                                .unwrap_or_default()
                                .to_string(),
                            g.truncated.to_string(),
                        ])
                        .map_err(anyhow::Error::from)?;
                    }
                    w.flush().map_err(anyhow::Error::from)?;
                }
            }
        }
        Command::Gauge(c) => {
            let q = load(&c.potential)?;
            let red = reduce_to_canonical(&q.potential);
            let n = c.n.unwrap_or(4096);
            let out = GaugeOutput {
                gauge: red.gauge.summary(),
                q2: [red.gauge.mean_c0, 0.0, red.gauge.mean_c2, 0.0],
                reduced: PotentialFile::grid_from(&red.q1, n, q.name.map(|s| format!("{s} (reduced)"))),
            };
            write_json(&c.out, &out)?;
        }
        Command::Verify { common: c, claim } => {
            let claim: Claim = claim.parse().map_err(anyhow::Error::msg)?;
            let q = load(&c.potential)?;
            let opts = VerifyOptions {
                lo: c.lo,
                hi: c.hi,
                n: c.n,
                tol: c.tol,
                parallel: c.parallel,
                name: q.name,
                ..Default::default()
            };
            let report = verify_claim(claim, &q.potential, &opts).map_err(anyhow::Error::from)?;
            write_json(&c.out, &report)?;
            if !report.verdict {
                return Err(Failure::Verification);
            }
        }
        Command::Asymptotics { common: c, zeta } => {
            let q = load(&c.potential)?;
            let rows = zeta
                .iter()
                .map(|&z| {
                    normalized_asymptotic_defect(&q.potential, C64::new(0.0, z), std::f64::consts::PI)
                        .map(|d| AsymptoticRow { zeta: z, defect: d })
                        .map_err(anyhow::Error::from)
                })
                .collect::<Result<Vec<_>>>()?;
            match c.format.unwrap_or(Format::Json) {
                Format::Json => write_json(&c.out, &rows)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(sink(&c.out)?);
                    for r in &rows {
                        w.serialize(r).map_err(anyhow::Error::from)?;
                    }
                    w.flush().map_err(anyhow::Error::from)?;
                }
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct GaugeOutput {
    gauge: GaugeSummary,
    /// Pauli coefficients of the constant Q̃₂.
    q2: [f64; 4],
    reduced: PotentialFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub zeta: f64,
    pub defect: f64,
}

/// One line of the scan table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub lambda: f64,
    pub delta_re: f64,
    pub delta_im: f64,
    pub delta_reduced: f64,
    pub ddelta_dlambda: f64,
    pub stability: Stability,
}

pub fn scan_rows(s: &SpectralScan) -> Vec<ScanRow> {
    (0..s.len())
        .map(|k| ScanRow {
            lambda: s.lambdas[k],
            delta_re: s.delta[k].re,
            delta_im: s.delta[k].im,
            delta_reduced: s.delta_reduced[k],
            ddelta_dlambda: s.derivative[k],
            stability: s.stability[k],
        })
        .collect()
}

/// Writes the scan table with 17 significant digits.
pub fn write_scan_csv<W: Write>(w: W, s: &SpectralScan) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(SCAN_HEADER)?;
    for r in scan_rows(s) {
        w.write_record([
            format!("{:.16e}", r.lambda),
            format!("{:.16e}", r.delta_re),
            format!("{:.16e}", r.delta_im),
            format!("{:.16e}", r.delta_reduced),
            format!("{:.16e}", r.ddelta_dlambda),
            r.stability.code().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a scan table written by [`write_scan_csv`].
pub fn read_scan_csv<R: io::Read>(r: R) -> Result<Vec<ScanRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    anyhow::ensure!(header == SCAN_HEADER, "unexpected scan header {header:?}");
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let num = |k: usize| -> Result<f64> {
            rec[k]
                .parse()
                .with_context(|| format!("line {}: column {}", i + 2, SCAN_HEADER[k]))
        };
        let code = rec[5].chars().next().unwrap_or(' ');
        let stability = Stability::from_code(code)
            .with_context(|| format!("line {}: bad stability code `{}`", i + 2, &rec[5]))?;
        rows.push(ScanRow {
            lambda: num(0)?,
            delta_re: num(1)?,
            delta_im: num(2)?,
            delta_reduced: num(3)?,
            ddelta_dlambda: num(4)?,
            stability,
        });
    }
    Ok(rows)
}
