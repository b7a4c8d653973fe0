use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use trigl1::closed_forms::{self, ApproxResult, Method, Width, FAVARD_TOL};
use trigl1::verify::{self, Suite, VerifyOptions};
use trigl1::{oracle, signs, Error};

#[derive(Parser)]
#[command(name = "trigl1", version, about = "Best L1 trigonometric approximation of box kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// E_n(chi~_h^j)_1 for one width.
    EnChi {
        #[arg(long)]
        n: usize,
        /// Width, decimal or `p/q`.
        #[arg(long)]
        h: Width,
        /// Convolution power (oracle only when j != 1).
        #[arg(long, default_value_t = 1)]
        j: u32,
        /// Use the discretized LP oracle.
        #[arg(long)]
        oracle: bool,
        #[arg(long, env = "TRIGL1_GRID", default_value_t = 4096)]
        grid: usize,
        #[arg(long)]
        json: bool,
    },
    /// Table of E_n(chi~_h)_1 over an equispaced range of widths.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h_min: f64,
        #[arg(long)]
        h_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = SweepMethod::Auto)]
        method: SweepMethod,
        #[arg(long, env = "TRIGL1_GRID", default_value_t = 4096)]
        grid: usize,
        /// Also write a JSON mirror next to the CSV.
        #[arg(long)]
        json: bool,
    },
    /// Limit constant and Favard constants.
    Constants,
    /// Run an acceptance suite.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, env = "TRIGL1_GRID", default_value_t = 4096)]
        grid: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepMethod {
    Auto,
    Dual,
    Oracle,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Command failures, mapped to exit codes.
enum Failure {
    Verify,
    Args(String),
    Inconsistent(String),
    Io(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Inconsistency(_) => Failure::Inconsistent(e.to_string()),
            Error::InvalidArgument(_) => Failure::Args(e.to_string()),
            other => Failure::Inconsistent(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::EnChi { n, h, j, oracle, grid, json } => en_chi(n, h, j, oracle, grid, json),
        Command::Sweep { n, h_min, h_max, steps, out, method, grid, json } => {
            sweep(n, h_min, h_max, steps, &out, method, grid, json)
        }
        Command::Constants => {
            constants();
            Ok(())
        }
        Command::Verify { suite, grid, seed } => run_verify(suite, grid, seed),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Args(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Inconsistent(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(4)
        }
    }
}

fn en_chi(n: usize, h: Width, j: u32, use_oracle: bool, grid: usize, json: bool) -> Result<(), Failure> {
    if n < 2 {
        return Err(Failure::Args(format!("n must be at least 2, got {n}")));
    }
    let res = if use_oracle || j != 1 {
        if j == 0 {
            return Err(Failure::Args("j must be at least 1".into()));
        }
        let hv = h.value();
        if !(hv > 0.0 && hv <= 1.0) {
            return Err(Failure::Args(format!("the oracle needs 0 < h <= 1, got {hv}")));
        }
        let (_, fit) = oracle::en_chi_oracle_fit(n, hv, j, grid)?;
        ApproxResult {
            value: fit.value,
            method: Method::LpOracle,
            certificate: None,
            error_bound: fit.value - fit.lower_bound,
        }
    } else {
        closed_forms::en_chi(n, h)?
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&res).expect("serializable"));
    } else {
        println!("value       {:.12}", res.value);
        println!("method      {}", res.method);
        if let Some(c) = &res.certificate {
            println!("certificate {c}");
        }
        println!("error bound {:.3e}", res.error_bound);
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    h: f64,
    e: f64,
    he: f64,
    method: Method,
}

#[derive(Serialize)]
struct SweepTable<'a> {
    n: usize,
    grid: usize,
    rows: &'a [SweepRow],
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    n: usize,
    h_min: f64,
    h_max: f64,
    steps: usize,
    out: &PathBuf,
    method: SweepMethod,
    grid: usize,
    json: bool,
) -> Result<(), Failure> {
    if n < 2 || steps < 2 || !(h_min > 0.0 && h_min < h_max && h_max <= 1.0) {
        return Err(Failure::Args("sweep needs n >= 2, steps >= 2 and 0 < h-min < h-max <= 1".into()));
    }
    let rows: Result<Vec<SweepRow>, Error> = (0..steps)
        .into_par_iter()
        .map(|i| {
            let h = h_min + (h_max - h_min) * i as f64 / (steps - 1) as f64;
            let h = if i == steps - 1 { h_max } else { h };
            let (e, method) = match method {
                SweepMethod::Auto => {
                    let r = closed_forms::en_chi(n, Width::Decimal(h))?;
                    (r.value, r.method)
                }
                SweepMethod::Dual => (signs::lower_bound_via_duality(n, h)?.value, Method::DualMax),
                SweepMethod::Oracle => (oracle::en_chi_oracle(n, h, 1, grid)?, Method::LpOracle),
            };
            Ok(SweepRow { h, e, he: h * e, method })
        })
        .collect();
    let rows = rows?;
    write_csv(out, &rows).map_err(Failure::Io)?;
    if json {
        let path = out.with_extension("json");
        let table = SweepTable { n, grid, rows: &rows };
        let text = serde_json::to_string_pretty(&table).expect("serializable");
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display())).map_err(Failure::Io)?;
    }
    Ok(())
}

fn write_csv(out: &PathBuf, rows: &[SweepRow]) -> anyhow::Result<()> {
    let file = File::create(out).with_context(|| format!("creating {}", out.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "h,E,hE,method")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", sig15(r.h), sig15(r.e), sig15(r.he), r.method)?;
    }
    w.flush()?;
    Ok(())
}

/// Decimal with 15 significant digits.
fn sig15(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let digits = 14 - x.abs().log10().floor() as i32;
    format!("{:.*}", digits.max(0) as usize, x)
}

fn constants() {
    let v0 = closed_forms::v0();
    println!("v0                 {v0:.15}");
    println!("1-2v0              {:.15}   (reference 0.3817350529)", closed_forms::theorem_c_limit());
    for j in 0..=10 {
        println!("F_{j:<2}               {:.15}", closed_forms::favard_f(j, FAVARD_TOL));
    }
    println!("sum_0^60 F_j       {:.15}   (reference 3.408223443)", closed_forms::favard_sum(60));
    println!("sec(1)+tan(1)      {:.15}", 1.0 / 1f64.cos() + 1f64.tan());
}

fn run_verify(suite: Suite, grid: usize, seed: u64) -> Result<(), Failure> {
    let opts = VerifyOptions { grid, seed };
    let results = verify::run_suite(suite, &opts, |r| println!("{r}"));
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).collect();
    if failed.is_empty() {
        println!("all {} criteria passed", results.len());
        Ok(())
    } else {
        println!("{} of {} criteria failed:", failed.len(), results.len());
        for r in failed {
            println!("  {:>2} {:<32} {}", r.id, r.name, r.detail);
        }
        Err(Failure::Verify)
    }
}
