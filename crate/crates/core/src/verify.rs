//! Acceptance suites, shared by the `verify` subcommand and the acceptance
//! test target. Each criterion reports pass/fail with a one-line detail.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::closed_forms::{self, Width, FAVARD_TOL};
use crate::error::{Error, Result};
use crate::inequalities::{self, SeriesPath, TauFamily, SUP_GRID};
use crate::kernels::{self, BoxKernel, BoxPowerKernel, BoxPowerLine};
use crate::oracle;
use crate::signs::{self, SignFunction};
use crate::stechkin::{self, StechkinKernel};
use crate::trig::{self, CompactKernel, TrigPoly};

/// Options shared by all criteria.
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Oracle grid size.
    pub grid: usize,
    /// Seed of every randomized family.
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { grid: 4096, seed: 42 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    ClosedForms,
    Duality,
    Favard,
    Jackson,
    Stechkin,
    All,
}

impl Suite {
    pub fn criteria(self) -> Vec<u8> {
        match self {
            Suite::ClosedForms => vec![1, 2, 5, 10],
            Suite::Duality => vec![6, 9],
            Suite::Favard => vec![3, 4, 8],
            Suite::Jackson => vec![7],
            Suite::Stechkin => vec![11, 12],
            Suite::All => (1..=12).collect(),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "closed-forms" => Suite::ClosedForms,
            "duality" => Suite::Duality,
            "favard" => Suite::Favard,
            "jackson" => Suite::Jackson,
            "stechkin" => Suite::Stechkin,
            "all" => Suite::All,
            _ => return Err(Error::InvalidArgument(format!("unknown suite '{s}'"))),
        })
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {} ({:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

pub fn criterion_name(id: u8) -> &'static str {
    match id {
        1 => "closed forms on the lattice",
        2 => "monotone limit at h = 1/n",
        3 => "Favard constants",
        4 => "convolution-power constants",
        5 => "sign-function structure",
        6 => "duality sandwich",
        7 => "Jackson-type inequality",
        8 => "extrapolation bound",
        9 => "periodization identity",
        10 => "Markov certificates",
        11 => "Stechkin layer",
        12 => "exploratory probes",
        _ => "unknown",
    }
}

/// Runs one criterion. Internal errors count as failures.
pub fn run_criterion(id: u8, opts: &VerifyOptions) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => closed_forms_lattice(opts),
        2 => monotone_limit(),
        3 => favard_constants(),
        4 => convolution_powers(opts),
        5 => sign_structure(),
        6 => duality_sandwich(opts),
        7 => jackson(opts),
        8 => extrapolation(opts),
        9 => periodization(opts),
        10 => markov(opts),
        11 => stechkin_layer(opts),
        12 => probes(opts),
        _ => Err(Error::InvalidArgument(format!("no criterion {id}"))),
    };
    let (passed, detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult { id, name: criterion_name(id), passed, detail, elapsed: start.elapsed() }
}

/// Runs a suite, reporting each criterion through `report` as it finishes.
pub fn run_suite(suite: Suite, opts: &VerifyOptions, mut report: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    suite
        .criteria()
        .into_iter()
        .map(|id| {
            let r = run_criterion(id, opts);
            report(&r);
            r
        })
        .collect()
}

type Outcome = Result<(bool, String)>;

/// Lattice of criterion 1: `(n, h, expected)`.
pub fn closed_form_points() -> Vec<(usize, f64, f64)> {
    let mut pts = Vec::new();
    for n in 2..=8usize {
        let nf = n as f64;
        pts.push((n, 1.0 / (4.0 * nf), 1.0));
        pts.push((n, 1.0 / (2.0 * nf), 1.0));
        for j in 2..=n {
            let h = (2 * j - 1) as f64 / (2.0 * nf);
            pts.push((n, h, 1.0 / (2.0 * nf * h)));
        }
        for h in [1.0 - 1.0 / (4.0 * nf), 1.0] {
            pts.push((n, h, (1.0 - h) / h));
        }
    }
    pts
}

fn closed_forms_lattice(opts: &VerifyOptions) -> Outcome {
    let rows: Result<Vec<(f64, f64)>> = closed_form_points()
        .into_par_iter()
        .map(|(n, h, want)| {
            let engine = signs::lower_bound_via_duality(n, h)?.value;
            let lp = oracle::en_chi_oracle(n, h, 1, opts.grid)?;
            Ok(((engine - want).abs(), (lp - want).abs()))
        })
        .collect();
    let rows = rows?;
    let engine = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let lp = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok((
        engine <= 1e-6 && lp <= 2e-3,
        format!("{} points, max engine error {engine:.2e} (tol 1e-6), max oracle error {lp:.2e} (tol 2e-3)", rows.len()),
    ))
}

/// Published digits of `1 - 2 v0`.
pub const LIMIT_DIGITS: f64 = 0.381_735_052_9;

fn monotone_limit() -> Outcome {
    let values: Result<Vec<f64>> =
        (2..=64usize).into_par_iter().map(|n| Ok(closed_forms::en_chi(n, Width::Decimal(1.0 / n as f64))?.value)).collect();
    let values = values?;
    let margin = values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let limit = closed_forms::theorem_c_limit();
    let ok = margin >= 1e-9 && top < LIMIT_DIGITS && (limit - LIMIT_DIGITS).abs() <= 1e-9;
    Ok((
        ok,
        format!(
            "n=2..64: min increment {margin:.3e}, E_64 = {:.12}, limit 1-2v0 = {limit:.12} (|diff| {:.1e})",
            values[values.len() - 1],
            (limit - LIMIT_DIGITS).abs()
        ),
    ))
}

fn favard_constants() -> Outcome {
    let want = [1.0, 0.5, 1.0 / 3.0, 5.0 / 24.0, 2.0 / 15.0];
    let worst = (1..=5).map(|j| (closed_forms::favard_f(j, FAVARD_TOL) - want[j as usize - 1]).abs()).fold(0.0, f64::max);
    let sum = closed_forms::favard_sum(60);
    let exact = 1.0 / 1f64.cos() + 1f64.tan();
    let ok = worst <= 1e-12 && (sum - exact).abs() <= 1e-9 && (sum - 3.408_223_443).abs() <= 1e-9;
    Ok((ok, format!("max |F_j - exact| {worst:.1e} (tol 1e-12), sum_0^60 F_j = {sum:.12}, |sum - (sec 1 + tan 1)| {:.1e}", (sum - exact).abs())))
}

fn convolution_powers(opts: &VerifyOptions) -> Outcome {
    let cases: Vec<(usize, u32)> = [2usize, 4].iter().flat_map(|&n| (1..=5).map(move |j| (n, j))).collect();
    let errs: Result<Vec<f64>> = cases
        .par_iter()
        .map(|&(n, j)| {
            let v = oracle::en_chi_oracle(n, 0.5 / n as f64, j, opts.grid)?;
            Ok((v - closed_forms::favard_f(j, FAVARD_TOL)).abs())
        })
        .collect();
    let worst = errs?.into_iter().fold(0.0, f64::max);
    Ok((worst <= 2e-3, format!("n in {{2,4}}, j=1..5: max |oracle - F_j| {worst:.2e} (tol 2e-3)")))
}

/// The 21 values of `q` used for the root-structure checks.
pub fn q_values() -> Vec<f64> {
    (0..21).map(|i| -0.95 + 0.095 * i as f64).collect()
}

fn sign_structure() -> Outcome {
    let cases: Vec<(usize, f64)> = (2..=16usize).flat_map(|n| q_values().into_iter().map(move |q| (n, q))).collect();
    let rows: Result<Vec<(bool, f64, f64)>> = cases
        .par_iter()
        .map(|&(n, q)| {
            let roots = signs::eq3_roots(n, q)?;
            let count_ok = roots.len() == n + 1;
            let q0 = if q.abs() < 1e-12 {
                roots
                    .iter()
                    .enumerate()
                    .map(|(m, &t)| (t - (2 * m + 1) as f64 / (4 * (n + 1)) as f64).abs())
                    .fold(0.0, f64::max)
            } else {
                0.0
            };
            let g = SignFunction::from_q(n, q, 1.0)?;
            let orth = (0..n).map(|k| g.orthogonality_residual(k).abs()).fold(0.0, f64::max);
            Ok((count_ok, q0, orth))
        })
        .collect();
    let rows = rows?;
    let counts = rows.iter().all(|r| r.0);
    let q0 = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let orth = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    Ok((
        counts && q0 <= 1e-13 && orth <= 1e-10,
        format!("{} (n, q) cases: root counts {}, q=0 error {q0:.1e} (tol 1e-13), max orthogonality residual {orth:.1e} (tol 1e-10)", rows.len(), if counts { "ok" } else { "WRONG" }),
    ))
}

/// 60 `(n, h)` pairs: `n = 2..7`, ten widths spread over `(0, 1)`.
pub fn duality_lattice() -> Vec<(usize, f64)> {
    (2..=7usize).flat_map(|n| (0..10).map(move |i| (n, 0.05 + 0.095 * i as f64))).collect()
}

fn duality_sandwich(opts: &VerifyOptions) -> Outcome {
    let rows: Result<Vec<(f64, f64)>> = duality_lattice()
        .into_par_iter()
        .map(|(n, h)| {
            let d = signs::lower_bound_via_duality(n, h)?.value;
            let lp = oracle::en_chi_oracle(n, h, 1, opts.grid)?;
            Ok((d - closed_forms::upper_bound(n, h), (d - lp).abs()))
        })
        .collect();
    let rows = rows?;
    let excess = rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let gap = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok((
        excess <= 1e-12 && gap <= 2e-3,
        format!("{} pairs: max (dual - ceiling) {excess:.2e} (tol 1e-12), max |dual - oracle| {gap:.2e} (tol 2e-3)", rows.len()),
    ))
}

/// Function family of the Jackson-type criteria: 50 seeded polynomials
/// with frequencies `0..=4n`.
pub fn jackson_family(n: usize, seed: u64) -> Vec<TrigPoly> {
    (0..50).map(|t| inequalities::random_trig(&mut inequalities::seeded(seed ^ (n as u64) << 32, t), 0, 4 * n)).collect()
}

/// `E_n(f)_1` by the oracle for every member of the family.
fn family_errors(fam: &[TrigPoly], n: usize, grid: usize) -> Result<Vec<f64>> {
    fam.par_iter().map(|f| inequalities::en_oracle(f, n, grid)).collect()
}

fn jackson(opts: &VerifyOptions) -> Outcome {
    let mut worst_thm = f64::NEG_INFINITY;
    let mut worst_residual = f64::NEG_INFINITY;
    for n in [4usize, 8] {
        let fam = jackson_family(n, opts.seed);
        let errs = family_errors(&fam, n, opts.grid)?;
        for h in [1.0 / n as f64, 1.5 / n as f64] {
            let constant = inequalities::favard_constant(n, h)?;
            let (_, fit) = oracle::en_chi_oracle_fit(n, h, 1, opts.grid)?;
            let rows: Result<Vec<(f64, f64)>> = fam
                .par_iter()
                .zip(&errs)
                .map(|(f, &e)| {
                    let w2 = kernels::w2_norm_poly(f, h, SUP_GRID);
                    let tau = inequalities::jackson_polynomial_with(f, h, &fit.tau)?;
                    let lhs = f.sub(&tau).sup_norm(SUP_GRID);
                    Ok((e - (constant * w2 + 2e-3), lhs - w2 / (1.0 - fit.value) * (1.0 + 1e-9)))
                })
                .collect();
            for (a, b) in rows? {
                worst_thm = worst_thm.max(a);
                worst_residual = worst_residual.max(b);
            }
        }
    }
    Ok((
        worst_thm <= 0.0 && worst_residual <= 0.0,
        format!("200 checks: max (E_n(f)_1 - bound) {worst_thm:.3e}, max (||f - tau_f|| - W_2/(1-c)) {worst_residual:.3e} (both must be <= 0)"),
    ))
}

fn extrapolation(opts: &VerifyOptions) -> Outcome {
    let partial: f64 = (0..=20).map(|j| closed_forms::favard_f(j, FAVARD_TOL)).sum();
    let mut worst_series: f64 = 0.0;
    for n in [2usize, 4] {
        let r = inequalities::extrapolation_series_via(n, 0.5 / n as f64, 20, opts.grid, SeriesPath::Oracle)?;
        worst_series = worst_series.max((r.partial_sum - partial).abs());
    }
    let mut worst_tau = f64::NEG_INFINITY;
    for n in [4usize, 8] {
        let fam = TauFamily::new(n, 0.5 / n as f64, 6, opts.grid)?;
        let excess = jackson_family(n, opts.seed)
            .par_iter()
            .map(|f| {
                let r = inequalities::jackson_tau_n_with(f, &fam);
                r.measured - (r.bound + 2e-3)
            })
            .reduce(|| f64::NEG_INFINITY, f64::max);
        worst_tau = worst_tau.max(excess);
    }
    Ok((
        worst_series <= 5e-3 && worst_tau <= 0.0,
        format!("J=20 oracle series vs sum F_j: max gap {worst_series:.2e} (tol 5e-3); N=6 construction: max (measured - bound) {worst_tau:.3e} (must be <= 0)"),
    ))
}

fn periodization(opts: &VerifyOptions) -> Outcome {
    use rand::Rng;
    let worst = (0..20u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = inequalities::seeded(opts.seed.wrapping_add(9), t);
            let f = inequalities::random_trig(&mut rng, 0, 6);
            let fe = |x: f64| f.eval(x);
            let h = rng.gen_range(0.05..1.6);
            let kern: Box<dyn CompactKernel> =
                if t % 2 == 0 { Box::new(BoxKernel { h }) } else { Box::new(BoxPowerLine { h, j: 2 + (t % 3) as u32 }) };
            let periodic = trig::convolve_periodic(&fe, kern.as_ref());
            (0..8)
                .map(|i| {
                    let x = rng.gen_range(0.0..1.0) + i as f64 * 0.01;
                    (periodic(x) - trig::convolve_line(&fe, kern.as_ref(), x)).abs()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok((worst <= 1e-9, format!("20 random (f, h) pairs: max pointwise difference {worst:.2e} (tol 1e-9)")))
}

fn markov(opts: &VerifyOptions) -> Outcome {
    let mut cases: Vec<(usize, f64, u32)> = closed_form_points().into_iter().map(|(n, h, _)| (n, h, 1)).collect();
    cases.extend([2usize, 4].iter().flat_map(|&n| (1..=5).map(move |j| (n, 0.5 / n as f64, j))));
    let rows: Result<Vec<Option<f64>>> = cases
        .par_iter()
        .map(|&(n, h, j)| {
            let (prob, fit) = oracle::en_chi_oracle_fit(n, h, j, opts.grid)?;
            let cert = oracle::markov_certificate(&prob, &fit.tau);
            Ok(if cert.degenerate || fit.value <= 1e-12 { None } else { Some(cert.max_residual) })
        })
        .collect();
    let rows = rows?;
    let checked = rows.iter().flatten().count();
    let worst = rows.iter().flatten().copied().fold(0.0, f64::max);
    Ok((worst <= 5e-3, format!("{checked} optima with nonzero residual (of {}): max Fourier residual {worst:.2e} (tol 5e-3)", rows.len())))
}

fn stechkin_layer(opts: &VerifyOptions) -> Outcome {
    // k = 1 reductions
    let h = 0.125;
    let kern1 = StechkinKernel::new(1, h)?;
    let mut ident: f64 = 0.0;
    for i in 0..200 {
        let x = -0.5 + i as f64 / 199.0;
        ident = ident.max((kern1.u_line(x) - kernels::box_power_line(h, 2, x)).abs());
    }
    for j in 1..=3u32 {
        let up = stechkin::UPower::new(&kern1, j)?;
        let bp = BoxPowerKernel::new(h, 2 * j)?;
        for i in 0..256 {
            let x = (i as f64 + 0.37) / 256.0;
            ident = ident.max((up.eval(x) - bp.eval(x)?).abs());
        }
    }
    // unit mass
    let mut mass: f64 = 0.0;
    for k in 1..=8 {
        mass = mass.max((stechkin::u_fourier(&StechkinKernel::new(k, 0.1)?, 0) - 1.0).abs());
    }
    // inequality with alpha = 2
    let mut worst_ratio: f64 = 0.0;
    let mut all_hold = true;
    let mut dominated = true;
    for n in [4usize, 8] {
        let fam = jackson_family(n, opts.seed);
        let errs = family_errors(&fam, n, opts.grid)?;
        for k in [1u32, 2] {
            let checks: Result<Vec<_>> =
                fam.par_iter().zip(&errs).map(|(f, &e)| stechkin::stechkin_check_with(e, n, k, 2.0, f)).collect();
            for c in checks? {
                all_hold &= c.holds;
                dominated &= c.odd_order_dominates;
                worst_ratio = worst_ratio.max(c.ratio);
            }
        }
    }
    let ok = ident <= 1e-8 && mass <= 1e-12 && all_hold;
    Ok((
        ok,
        format!(
            "k=1 identities {ident:.1e} (tol 1e-8); |U^(0) - 1| {mass:.1e} for k<=8; alpha=2 inequality on 200 checks {} (worst ratio {worst_ratio:.3}); odd-order comparison {}",
            if all_hold { "holds" } else { "FAILS" },
            if dominated { "holds" } else { "fails (reported only)" }
        ),
    ))
}

fn probes(opts: &VerifyOptions) -> Outcome {
    let c4 = inequalities::conjecture_probe(4, 50, opts.seed)?;
    let c8 = inequalities::conjecture_probe(8, 50, opts.seed)?;
    let t6 = stechkin::theorem6_probe(4, 2, None, opts.grid.min(2048), 20, opts.seed)?;
    let kern = StechkinKernel::new(1, 0.125)?;
    let series = stechkin::stechkin_series(4, &kern, 6, opts.grid.min(2048))?;
    Ok((
        true,
        format!(
            "not asserted: ||g||/W_2 max {:.4} (n=4), {:.4} (n=8) vs conjectured 3; bracket [{:.4}, {:.4}] with mu={:.4} vs empirical {:.4} (cos uniform {:.4}); k=1 series J=6 sum {:.4} vs cos-bound {:.4}",
            c4.max_ratio, c8.max_ratio, t6.lower_bracket, t6.upper_bracket, t6.mu, t6.empirical_lower, t6.cosine_uniform_ratio, series.partial_sum, t6.series_bound
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_parse_and_cover_all() {
        assert_eq!("closed-forms".parse::<Suite>().unwrap(), Suite::ClosedForms);
        assert!("nope".parse::<Suite>().is_err());
        let mut ids: Vec<u8> = [Suite::ClosedForms, Suite::Duality, Suite::Favard, Suite::Jackson, Suite::Stechkin]
            .iter()
            .flat_map(|s| s.criteria())
            .collect();
        ids.sort_unstable();
        assert_eq!(ids, Suite::All.criteria());
    }

    #[test]
    fn lattices_have_the_stated_sizes() {
        assert_eq!(duality_lattice().len(), 60);
        assert_eq!(q_values().len(), 21);
        assert!(q_values().iter().any(|q| q.abs() < 1e-12));
        assert_eq!(jackson_family(4, 1).len(), 50);
    }

    #[test]
    fn quick_criteria_pass() {
        let opts = VerifyOptions::default();
        for id in [3u8, 9] {
            let r = run_criterion(id, &opts);
            assert!(r.passed, "{r}");
        }
        assert!(!run_criterion(13, &opts).passed);
    }
}
