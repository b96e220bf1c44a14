//! Command-line front end.

mod domain_file;
mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{best_bound, m_function, BoundCertificate, BoundConfig};
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::one_dim::{
    radial_eigenvalue_with_mesh, radial_fd_oracle_with_mesh, Arrangement, Exponent, RadialEigenProblem,
    DEFAULT_MESH,
};
use crate::oracle::{build_grid, laplace_eigen_p2, rayleigh_minimize_p, Grid, ScalarField};

pub use domain_file::{DomainFile, LoadedDomain, RingFile, SuperdomainFile};
pub use format::{csv_num, sig, table_num};

/// Exit code for bad input or a failed computation.
pub const EXIT_ERROR: i32 = 1;
/// Exit code when a bound exceeds the oracle estimate.
pub const EXIT_VIOLATION: i32 = 2;

fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
            a / b
        }
        None => s.trim().parse().map_err(|e| format!("{e}"))?,
    };
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{s} is not a positive number"))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Sweep {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        (0..self.n)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / (self.n - 1) as f64)
            .collect()
    }
}

fn parse_sweep(s: &str) -> std::result::Result<Sweep, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err("expected LO:HI:N".into());
    }
    let lo = parse_real(parts[0])?;
    let hi = parse_real(parts[1])?;
    let n: usize = parts[2].parse().map_err(|e| format!("{e}"))?;
    if n == 0 || hi < lo {
        return Err("need N >= 1 and LO <= HI".into());
    }
    Ok(Sweep { lo, hi, n })
}

#[derive(Parser, Debug)]
#[command(name = "plap-bounds", version, about = "Lower bounds for the fundamental p-Laplacian eigenvalue")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunFlags {
    /// Grid spacing; fractions such as 1/128 are accepted.
    #[arg(long, default_value = "1/128", value_parser = parse_real)]
    pub grid_h: f64,
    /// Directions used for the averaged distance.
    #[arg(long, default_value_t = 720)]
    pub angles: usize,
    #[arg(long, default_value_t = 2048)]
    pub boundary_samples: usize,
    /// Relative admissibility tolerance.
    #[arg(long, default_value = "1e-9", value_parser = parse_real)]
    pub tol: f64,
    #[arg(long, default_value_t = 65)]
    pub gamma_steps: usize,
    /// Emit CSV instead of a table.
    #[arg(long)]
    pub csv: bool,
    /// Write output to a file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunFlags {
    fn config(&self, superdomain: Option<Domain>) -> BoundConfig {
        BoundConfig {
            grid_h: self.grid_h,
            n_angles: self.angles,
            n_boundary_samples: self.boundary_samples,
            tol: self.tol,
            gamma_steps: self.gamma_steps,
            superdomain,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArrangementArg {
    /// Neumann inner, Dirichlet outer.
    Alpha,
    /// Dirichlet inner, Neumann outer.
    Beta,
    Both,
}

impl From<ArrangementArg> for Arrangement {
    fn from(a: ArrangementArg) -> Self {
        match a {
            ArrangementArg::Alpha => Arrangement::NeumannInnerDirichletOuter,
            ArrangementArg::Beta => Arrangement::DirichletInnerNeumannOuter,
            ArrangementArg::Both => Arrangement::DirichletBoth,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute every bound for a domain file.
    Bound {
        file: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Estimate the eigenvalue on a grid.
    Oracle {
        file: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
        /// Write the eigenfunction as x,y,value rows.
        #[arg(long)]
        eigenfunction: Option<PathBuf>,
    },
    /// Check every bound against the oracle estimate.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
        /// Multiplies every bound before checking (harness self-test).
        #[arg(long, hide = true)]
        corrupt_factor: Option<f64>,
    },
    /// Radial annulus eigenvalue by shooting.
    Annulus {
        #[arg(long, value_parser = parse_real)]
        r_inner: f64,
        #[arg(long, value_parser = parse_real)]
        r_outer: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long, value_enum, default_value = "alpha")]
        arrangement: ArrangementArg,
        #[arg(long, default_value = "1e-10", value_parser = parse_real)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MESH)]
        mesh: usize,
        /// Sweep the outer radius over LO:HI:N.
        #[arg(long, value_parser = parse_sweep)]
        sweep: Option<Sweep>,
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the averaged-distance weight at every grid node as CSV.
    Mfield {
        file: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
}

/// Eigenvalue estimate with a discretization band.
#[derive(Clone, Debug)]
pub struct OracleEstimate {
    pub solver: &'static str,
    pub h: f64,
    pub value: f64,
    /// Estimate at spacing `2h`, when that grid resolves the domain.
    pub coarse: Option<f64>,
    /// `max(0.01 value, |value - coarse|)`.
    pub band: f64,
    pub iterations: usize,
    pub warning: Option<String>,
}

struct Solve {
    value: f64,
    iterations: usize,
    warning: Option<String>,
    u: ScalarField,
}

fn solve(grid: &Grid, p: Exponent) -> Result<Solve> {
    if p.p() == 2.0 {
        let r = laplace_eigen_p2(grid)?;
        Ok(Solve {
            value: r.eigenvalue,
            iterations: r.iterations,
            warning: r.warning,
            u: r.eigenfunction,
        })
    } else {
        let r = rayleigh_minimize_p(grid, p.p(), None)?;
        Ok(Solve {
            value: r.eigenvalue,
            iterations: r.iterations,
            warning: r.warning,
            u: r.minimizer,
        })
    }
}

fn solver_name(p: Exponent) -> &'static str {
    if p.p() == 2.0 {
        "laplace"
    } else {
        "rayleigh"
    }
}

/// Oracle estimate at `h` with a band from the `2h` solve.
pub fn oracle_estimate(domain: &Domain, p: Exponent, h: f64) -> Result<OracleEstimate> {
    let grid = build_grid(domain, h)?;
    let fine = solve(&grid, p)?;
    let coarse = match build_grid(domain, 2.0 * h) {
        Ok(g) => Some(solve(&g, p)?.value),
        Err(_) => None,
    };
    let spread = coarse.map_or(0.0, |c| (fine.value - c).abs());
    Ok(OracleEstimate {
        solver: solver_name(p),
        h,
        value: fine.value,
        coarse,
        band: (0.01 * fine.value).max(spread),
        iterations: fine.iterations,
        warning: fine.warning,
    })
}

/// Verdict of one verification run.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub estimate: OracleEstimate,
    pub certificates: Vec<BoundCertificate>,
    /// `value <= estimate + 3 band` per certificate (true when inapplicable).
    pub within: Vec<bool>,
}

impl VerifyReport {
    pub fn ceiling(&self) -> f64 {
        self.estimate.value + 3.0 * self.estimate.band
    }

    pub fn passed(&self) -> bool {
        self.within.iter().all(|w| *w)
    }
}

pub fn verify(loaded: &LoadedDomain, config: &BoundConfig, corrupt_factor: Option<f64>) -> Result<VerifyReport> {
    let estimate = oracle_estimate(&loaded.domain, loaded.p, config.grid_h)?;
    let mut certificates = best_bound(&loaded.domain, loaded.p, loaded.d, config)?;
    if let Some(f) = corrupt_factor {
        certificates = certificates.into_iter().map(|c| c.corrupted(f)).collect();
    }
    let ceiling = estimate.value + 3.0 * estimate.band;
    let within = certificates.iter().map(|c| c.value.is_none_or(|v| v <= ceiling)).collect();
    Ok(VerifyReport {
        estimate,
        certificates,
        within,
    })
}

fn params_string(c: &BoundCertificate, num: fn(f64) -> String) -> String {
    c.parameters
        .iter()
        .map(|(k, v)| format!("{k}={}", num(*v)))
        .collect::<Vec<_>>()
        .join(";")
}

const CERT_HEADER: [&str; 8] = [
    "method",
    "detail",
    "applicable",
    "value",
    "parameters",
    "witness_x",
    "witness_y",
    "reason",
];

fn cert_record(c: &BoundCertificate) -> [String; 8] {
    let (wx, wy) = c
        .infimum_witness
        .map_or((String::new(), String::new()), |w| (csv_num(w.x), csv_num(w.y)));
    [
        c.method.name().into(),
        c.detail.clone(),
        c.is_applicable().to_string(),
        c.value.map(csv_num).unwrap_or_default(),
        params_string(c, csv_num),
        wx,
        wy,
        c.failure_reason().unwrap_or_default(),
    ]
}

fn csv_bytes<R: IntoIterator<Item = S>, S: AsRef<[u8]>>(header: R, rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
}

fn cert_table(certs: &[BoundCertificate], marks: Option<&[bool]>) -> String {
    let mut s = String::new();
    s.push_str(&format!("{:<13} {:<32} {:<14} {}\n", "method", "detail", "value", "witness / parameters"));
    for (i, c) in certs.iter().enumerate() {
        let value = match c.value {
            Some(v) => table_num(v),
            None => "INAPPLICABLE".into(),
        };
        let mut tail = match (c.value, c.infimum_witness) {
            (Some(_), Some(w)) => format!("at ({}, {}) ", table_num(w.x), table_num(w.y)),
            _ => String::new(),
        };
        match c.failure_reason() {
            Some(r) if c.value.is_none() => tail.push_str(&format!("({r})")),
            _ => tail.push_str(&params_string(c, table_num)),
        }
        let mark = match marks {
            Some(m) if !m[i] => " VIOLATION",
            _ => "",
        };
        s.push_str(&format!("{:<13} {:<32} {:<14} {}{mark}\n", c.method.name(), c.detail, value, tail));
    }
    s
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidArgument(format!("output: {e}"));
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(io),
        None => std::io::stdout().write_all(bytes).map_err(io),
    }
}

fn load(file: &Path) -> Result<LoadedDomain> {
    DomainFile::read(file)?.load()
}

fn cmd_bound(file: &Path, flags: &RunFlags) -> Result<i32> {
    let loaded = load(file)?;
    let certs = best_bound(&loaded.domain, loaded.p, loaded.d, &flags.config(loaded.superdomain.clone()))?;
    let bytes = if flags.csv {
        csv_bytes(CERT_HEADER, certs.iter().map(|c| cert_record(c).to_vec()).collect())?
    } else {
        let mut s = format!(
            "{}: p = {}, d = {}, h = {}\n",
            loaded.name,
            table_num(loaded.p.p()),
            loaded.d,
            table_num(flags.grid_h)
        );
        s.push_str(&cert_table(&certs, None));
        s.into_bytes()
    };
    emit(&flags.out, &bytes)?;
    Ok(0)
}

fn cmd_oracle(file: &Path, flags: &RunFlags, eigenfunction: &Option<PathBuf>) -> Result<i32> {
    let loaded = load(file)?;
    let grid = build_grid(&loaded.domain, flags.grid_h)?;
    let mut rows: Vec<(&str, Solve)> = Vec::new();
    if loaded.p.p() == 2.0 {
        rows.push(("laplace", solve(&grid, loaded.p)?));
        let r = rayleigh_minimize_p(&grid, 2.0, None)?;
        rows.push((
            "rayleigh",
            Solve {
                value: r.eigenvalue,
                iterations: r.iterations,
                warning: r.warning,
                u: r.minimizer,
            },
        ));
    } else {
        rows.push(("rayleigh", solve(&grid, loaded.p)?));
    }
    let bytes = if flags.csv {
        let data = rows
            .iter()
            .map(|(name, s)| {
                vec![
                    name.to_string(),
                    csv_num(s.value),
                    csv_num(flags.grid_h),
                    s.iterations.to_string(),
                    s.warning.clone().unwrap_or_default(),
                ]
            })
            .collect();
        csv_bytes(["solver", "eigenvalue", "h", "iterations", "warning"], data)?
    } else {
        let mut s = format!("{}: p = {}, h = {}\n", loaded.name, table_num(loaded.p.p()), table_num(flags.grid_h));
        for (name, r) in &rows {
            s.push_str(&format!("{name:<9} {:<14} {} iterations\n", table_num(r.value), r.iterations));
            if let Some(w) = &r.warning {
                s.push_str(&format!("  warning: {w}\n"));
            }
        }
        s.into_bytes()
    };
    emit(&flags.out, &bytes)?;
    if let Some(path) = eigenfunction {
        let u = &rows[0].1.u;
        let data = grid
            .positions()
            .zip(u.values())
            .map(|(x, v)| vec![csv_num(x.x), csv_num(x.y), csv_num(*v)])
            .collect();
        emit(&Some(path.clone()), &csv_bytes(["x", "y", "value"], data)?)?;
    }
    Ok(0)
}

fn cmd_verify(file: &Path, flags: &RunFlags, corrupt: Option<f64>) -> Result<i32> {
    let loaded = load(file)?;
    let report = verify(&loaded, &flags.config(loaded.superdomain.clone()), corrupt)?;
    let est = &report.estimate;
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    let bytes = if flags.csv {
        let mut rows: Vec<Vec<String>> = report
            .certificates
            .iter()
            .zip(&report.within)
            .map(|(c, ok)| {
                let mut r = cert_record(c).to_vec();
                r.push(ok.to_string());
                r
            })
            .collect();
        rows.push(vec![
            "oracle".into(),
            est.solver.into(),
            "true".into(),
            csv_num(est.value),
            format!("band={};ceiling={}", csv_num(est.band), csv_num(report.ceiling())),
            String::new(),
            String::new(),
            est.warning.clone().unwrap_or_default(),
            report.passed().to_string(),
        ]);
        let mut header = CERT_HEADER.to_vec();
        header.push("within");
        csv_bytes(header, rows)?
    } else {
        let mut s = format!(
            "{}: oracle ({}) {} band {} at h = {}\n",
            loaded.name,
            est.solver,
            table_num(est.value),
            table_num(est.band),
            table_num(est.h)
        );
        if let Some(w) = &est.warning {
            s.push_str(&format!("warning: {w}\n"));
        }
        s.push_str(&cert_table(&report.certificates, Some(&report.within)));
        s.push_str(&format!("{verdict}: every applicable bound <= {}\n", table_num(report.ceiling())));
        s.into_bytes()
    };
    emit(&flags.out, &bytes)?;
    Ok(if report.passed() { 0 } else { EXIT_VIOLATION })
}

#[allow(clippy::too_many_arguments)]
fn cmd_annulus(
    r_inner: f64,
    r_outer: f64,
    p: f64,
    d: u32,
    arrangement: ArrangementArg,
    tol: f64,
    mesh: usize,
    sweep: Option<Sweep>,
    csv: bool,
    out: &Option<PathBuf>,
) -> Result<i32> {
    let outers = sweep.map_or_else(|| vec![r_outer], |s| s.values());
    let mut rows = Vec::new();
    for big_r in outers {
        let problem = RadialEigenProblem::new(r_inner, big_r, p, d, arrangement.into())?;
        let res = radial_eigenvalue_with_mesh(&problem, tol, mesh)?;
        let fd = if p == 2.0 {
            Some(radial_fd_oracle_with_mesh(&problem, mesh)?)
        } else {
            None
        };
        rows.push((big_r, res, fd));
    }
    let name = match arrangement {
        ArrangementArg::Alpha => "alpha",
        ArrangementArg::Beta => "beta",
        ArrangementArg::Both => "both",
    };
    let bytes = if csv {
        let data = rows
            .iter()
            .map(|(big_r, res, fd)| {
                vec![
                    csv_num(r_inner),
                    csv_num(*big_r),
                    csv_num(p),
                    d.to_string(),
                    name.into(),
                    csv_num(res.eigenvalue),
                    csv_num(res.shooting_residual),
                    fd.map(csv_num).unwrap_or_default(),
                    fd.map(|f| csv_num((res.eigenvalue - f).abs() / res.eigenvalue)).unwrap_or_default(),
                ]
            })
            .collect();
        csv_bytes(
            ["r", "R", "p", "d", "arrangement", "eigenvalue", "shooting_residual", "fd", "relative_gap"],
            data,
        )?
    } else {
        let mut s = String::new();
        for (big_r, res, fd) in &rows {
            s.push_str(&format!(
                "{name}(r = {}, R = {}, p = {}, d = {d}) = {}\n  mesh {}, shooting residual {}\n",
                table_num(r_inner),
                table_num(*big_r),
                table_num(p),
                table_num(res.eigenvalue),
                res.mesh_size,
                table_num(res.shooting_residual)
            ));
            if let Some(f) = fd {
                s.push_str(&format!(
                    "  finite differences {} (relative gap {})\n",
                    table_num(*f),
                    table_num((res.eigenvalue - f).abs() / res.eigenvalue)
                ));
            }
        }
        s.into_bytes()
    };
    emit(out, &bytes)?;
    Ok(0)
}

fn cmd_mfield(file: &Path, flags: &RunFlags) -> Result<i32> {
    let loaded = load(file)?;
    let grid = build_grid(&loaded.domain, flags.grid_h)?;
    let data = grid
        .positions()
        .map(|x| {
            let w = m_function(&loaded.domain, x, loaded.p, flags.angles);
            vec![csv_num(x.x), csv_num(x.y), csv_num(w)]
        })
        .collect();
    emit(&flags.out, &csv_bytes(["x", "y", "weight"], data)?)?;
    Ok(0)
}

pub fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Bound { file, flags } => cmd_bound(file, flags),
        Command::Oracle {
            file,
            flags,
            eigenfunction,
        } => cmd_oracle(file, flags, eigenfunction),
        Command::Verify {
            file,
            flags,
            corrupt_factor,
        } => cmd_verify(file, flags, *corrupt_factor),
        Command::Annulus {
            r_inner,
            r_outer,
            p,
            d,
            arrangement,
            tol,
            mesh,
            sweep,
            csv,
            out,
        } => cmd_annulus(*r_inner, *r_outer, *p, *d, *arrangement, *tol, *mesh, *sweep, *csv, out),
        Command::Mfield { file, flags } => cmd_mfield(file, flags),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_and_sweeps() {
        assert_eq!(parse_real("1/128").unwrap(), 1.0 / 128.0);
        assert!(parse_real("-1").is_err());
        let s = parse_sweep("2:3:3").unwrap();
        assert_eq!(s.values(), vec![2.0, 2.5, 3.0]);
        assert!(parse_sweep("2:3").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["plap-bounds", "bound"]), EXIT_ERROR);
        assert_eq!(run(["plap-bounds", "annulus", "--r-inner", "1", "--r-outer", "0.5", "--p", "2"]), EXIT_ERROR);
    }
}
