//! Favard- and Jackson-type constants and constructions.
//!
//! Test functions are trigonometric polynomials: every construction here
//! is spectral, and sup norms of polynomials are evaluated with refined
//! grid searches.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_forms::{self, Method, Width};
use crate::error::{Error, Result};
use crate::kernels;
use crate::oracle::{self, L1FitProblem};
use crate::trig::{sinc, Complex, TrigPoly};

/// Points used for sup-norm searches of polynomials.
pub const SUP_GRID: usize = 2048;

/// `(1 - c(h, n))^{-1}`, the constant of the Favard-type inequality
/// `||g|| <= (1 - c)^{-1} W_2(g, h)` on `T_{2n-1}`-orthogonal functions.
/// Finite only for `h > 1/(2n)`.
pub fn favard_constant(n: usize, h: f64) -> Result<f64> {
    if !(h > 1.0 / (2.0 * n as f64) + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "favard_constant needs h > 1/(2n) = {}, got {h}",
            1.0 / (2.0 * n as f64)
        )));
    }
    let c = closed_forms::en_chi(n, Width::Decimal(h))?.value;
    Ok(1.0 / (1.0 - c))
}

/// Terms `E_n(chi~_h^j)_1`, `j = 0..=J`, of the extrapolation series.
#[derive(Debug, Clone, Serialize)]
pub struct FavardSeriesResult {
    pub terms: Vec<f64>,
    pub partial_sum: f64,
    pub methods: Vec<Method>,
}

impl FavardSeriesResult {
    fn from_terms(terms: Vec<(f64, Method)>) -> Self {
        let partial_sum = terms.iter().map(|t| t.0).sum();
        let (terms, methods) = terms.into_iter().unzip();
        Self { terms, partial_sum, methods }
    }
}

/// How series terms are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesPath {
    /// Closed forms at `h = 1/(2n)`, the engine for `j = 1`, oracle beyond.
    Auto,
    /// LP oracle for every `j >= 1`.
    Oracle,
}

/// `sum_{j=0}^J E_n(chi~_h^j)_1` with the automatic path.
pub fn extrapolation_series(n: usize, h: f64, last: u32, m: usize) -> Result<FavardSeriesResult> {
    extrapolation_series_via(n, h, last, m, SeriesPath::Auto)
}

/// Extrapolation series with an explicit term path. The `j = 0` term (the
/// point mass) is 1.
pub fn extrapolation_series_via(n: usize, h: f64, last: u32, m: usize, path: SeriesPath) -> Result<FavardSeriesResult> {
    if last < 1 {
        return Err(Error::InvalidArgument("the series needs J >= 1".into()));
    }
    let principal = (h - 1.0 / (2.0 * n as f64)).abs() <= 1e-12;
    let terms: Result<Vec<(f64, Method)>> = (0..=last)
        .into_par_iter()
        .map(|j| {
            if j == 0 {
                return Ok((1.0, Method::ClosedForm));
            }
            match path {
                SeriesPath::Auto if principal => Ok((closed_forms::favard_f(j, closed_forms::FAVARD_TOL), Method::ClosedForm)),
                SeriesPath::Auto if j == 1 => {
                    let r = closed_forms::en_chi(n, Width::Decimal(h))?;
                    Ok((r.value, r.method))
                }
                _ => Ok((oracle::en_chi_oracle(n, h, j, m)?, Method::LpOracle)),
            }
        })
        .collect();
    Ok(FavardSeriesResult::from_terms(terms?))
}

/// Spectral Jackson polynomial
/// `tau_f = sum_{|k|<n} f^(k) tau^(k) / (1 - chi^(k) + tau^(k)) e(kx)`
/// built from an approximant `tau_h` of `chi~_h` in `T_{2n-1}`.
pub fn jackson_polynomial_with(f: &TrigPoly, h: f64, tau_h: &TrigPoly) -> Result<TrigPoly> {
    let n = tau_h.n();
    let mut coeffs = Vec::with_capacity(n);
    for k in 0..n as i64 {
        let t = tau_h.coeff(k);
        let denom = Complex::real(1.0 - sinc(std::f64::consts::PI * k as f64 * h)) + t;
        if denom.norm() < 1e-12 {
            return Err(Error::VanishingDenominator { k, value: denom.norm() });
        }
        coeffs.push((f.coeff(k) * t).div(denom));
    }
    Ok(TrigPoly::from_fourier(&coeffs))
}

/// Jackson polynomial with its best-approximation input.
#[derive(Debug, Clone)]
pub struct JacksonPolynomial {
    pub tau: TrigPoly,
    /// Discrete `||chi~_h - tau_h||_1` of the approximant used.
    pub c: f64,
}

/// [`jackson_polynomial_with`] with `tau_h` from the LP oracle on an
/// `m`-cell grid. Needs `h > 1/(2n)`.
pub fn jackson_polynomial(f: &TrigPoly, n: usize, h: f64, m: usize) -> Result<JacksonPolynomial> {
    if !(h > 1.0 / (2.0 * n as f64)) {
        return Err(Error::InvalidArgument(format!("jackson_polynomial needs h > 1/(2n), got {h}")));
    }
    let (_, fit) = oracle::en_chi_oracle_fit(n, h, 1, m)?;
    Ok(JacksonPolynomial { tau: jackson_polynomial_with(f, h, &fit.tau)?, c: fit.value })
}

/// Best approximants `tau_h^j` of `chi~_h^j`, `j = 1..=N`, and the errors
/// `E_n(chi~_h^j)_1` for `j = 0..=N` (the `j = 0` entry is 1).
#[derive(Debug, Clone)]
pub struct TauFamily {
    pub n: usize,
    pub h: f64,
    pub taus: Vec<TrigPoly>,
    pub errors: Vec<f64>,
}

impl TauFamily {
    pub fn new(n: usize, h: f64, big_n: u32, m: usize) -> Result<Self> {
        if big_n < 1 {
            return Err(Error::InvalidArgument("N must be >= 1".into()));
        }
        let fits: Result<Vec<_>> = (1..=big_n).into_par_iter().map(|j| oracle::en_chi_oracle_fit(n, h, j, m)).collect();
        let mut taus = Vec::new();
        let mut errors = vec![1.0];
        for (_, fit) in fits? {
            errors.push(fit.value);
            taus.push(fit.tau);
        }
        Ok(Self { n, h, taus, errors })
    }

    pub fn big_n(&self) -> usize {
        self.taus.len()
    }
}

/// Truncated Jackson construction and its a-priori bound.
#[derive(Debug, Clone)]
pub struct TauNResult {
    pub tau: TrigPoly,
    /// Grid estimate of `||f - tau_{f,N}||`.
    pub measured: f64,
    /// `(sum_{j<N} E_j) W_2(f, h) + E_N ||f||`.
    pub bound: f64,
}

/// `tau_{f,N} = sum_{j=1}^{N-1} tau_h^j (.) (f - f * chi_h) + tau_h^N (.) f`
/// (the `j = 0` approximant is 0).
pub fn jackson_tau_n_with(f: &TrigPoly, fam: &TauFamily) -> TauNResult {
    let big_n = fam.big_n();
    let w2f = kernels::w2_poly(f, fam.h);
    let mut tau = fam.taus[big_n - 1].convolve(f);
    for tj in &fam.taus[..big_n - 1] {
        tau = tau.add(&tj.convolve(&w2f));
    }
    let measured = f.sub(&tau).sup_norm(SUP_GRID);
    let head: f64 = fam.errors[..big_n].iter().sum();
    let bound = head * w2f.sup_norm(SUP_GRID) + fam.errors[big_n] * f.sup_norm(SUP_GRID);
    TauNResult { tau, measured, bound }
}

/// [`jackson_tau_n_with`] computing the family on the fly.
pub fn jackson_tau_n(f: &TrigPoly, n: usize, h: f64, big_n: u32, m: usize) -> Result<TauNResult> {
    Ok(jackson_tau_n_with(f, &TauFamily::new(n, h, big_n, m)?))
}

/// Trig polynomial with frequencies `lo..=hi` and coefficients uniform in
/// `[-1, 1]` (the constant term included when `lo = 0`).
pub fn random_trig<R: Rng>(rng: &mut R, lo: usize, hi: usize) -> TrigPoly {
    let mut a = vec![0.0; hi + 1];
    let mut b = vec![0.0; hi];
    for k in lo..=hi {
        a[k] = rng.gen_range(-1.0..=1.0);
        if k >= 1 {
            b[k - 1] = rng.gen_range(-1.0..=1.0);
        }
    }
    TrigPoly::new(a, b).expect("consistent lengths")
}

/// Random element of the orthogonal complement of `T_{2n-1}`: frequencies
/// in `[n, 4n]`. A strict subset of the complement.
pub fn random_perp<R: Rng>(rng: &mut R, n: usize) -> TrigPoly {
    random_trig(rng, n, 4 * n)
}

/// Worst ratios of the classical second-derivative inequalities.
#[derive(Debug, Clone, Serialize)]
pub struct ClassicalReport {
    pub n: usize,
    pub trials: usize,
    /// `max W_2(f, h) / ((h^2/24) ||D^2 f||)` over trials and widths.
    pub jackson_worst_ratio: f64,
    /// `max ||g|| / (||D^2 g|| / (32 n^2))` over orthogonal `g`.
    pub favard_worst_ratio: f64,
}

/// Checks `W_2(f, h) <= (h^2/24) ||D^2 f||` for `h` in
/// `{1/(2n), 1/n, 3/(2n)}` and the sharp Favard bound
/// `||g|| <= ||D^2 g|| / (32 n^2)` on random polynomials with frequencies
/// in `[n, 3n]`.
pub fn classical_consequences_check(n: usize, trials: usize, seed: u64) -> Result<ClassicalReport> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    let nf = n as f64;
    let widths = [0.5 / nf, 1.0 / nf, 1.5 / nf];
    let ratios: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded(seed, t as u64);
            let f = random_trig(&mut rng, n, 3 * n);
            let d2 = f.second_derivative().sup_norm(SUP_GRID);
            let jackson = widths
                .iter()
                .map(|&h| kernels::w2_norm_poly(&f, h, SUP_GRID) / (h * h / 24.0 * d2))
                .fold(0.0, f64::max);
            let favard = f.sup_norm(SUP_GRID) / (d2 / (32.0 * nf * nf));
            (jackson, favard)
        })
        .collect();
    Ok(ClassicalReport {
        n,
        trials,
        jackson_worst_ratio: ratios.iter().map(|r| r.0).fold(0.0, f64::max),
        favard_worst_ratio: ratios.iter().map(|r| r.1).fold(0.0, f64::max),
    })
}

/// Exploratory report on `||g|| <= 3 W_2(g, 1/(2n))` for orthogonal `g`.
#[derive(Debug, Clone, Serialize)]
pub struct ConjectureReport {
    /// Always true: the bound is a conjecture and nothing is asserted.
    pub conjecture: bool,
    pub n: usize,
    pub trials: usize,
    pub max_ratio: f64,
    /// Ratio for `cos(2 pi n x)`, analytically `(1 - 2/pi)^{-1}`.
    pub cosine_ratio: f64,
}

pub fn conjecture_probe(n: usize, trials: usize, seed: u64) -> Result<ConjectureReport> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    let h = 0.5 / n as f64;
    let ratio = |g: &TrigPoly| g.sup_norm(SUP_GRID) / kernels::w2_norm_poly(g, h, SUP_GRID);
    let max_ratio = (0..trials)
        .into_par_iter()
        .map(|t| ratio(&random_perp(&mut seeded(seed, t as u64), n)))
        .reduce(|| 0.0, f64::max);
    let mut a = vec![0.0; n + 1];
    a[n] = 1.0;
    let cosine = TrigPoly::new(a, vec![0.0; n]).expect("consistent lengths");
    Ok(ConjectureReport { conjecture: true, n, trials, max_ratio, cosine_ratio: ratio(&cosine) })
}

/// Per-trial generator: independent streams from one seed.
pub fn seeded(seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Oracle value of `E_n(f)_1` for a polynomial on an `m`-cell grid.
pub fn en_oracle(f: &TrigPoly, n: usize, m: usize) -> Result<f64> {
    let prob = L1FitProblem::offset_grid(m, n, |x| f.eval(x))?;
    Ok(oracle::best_l1_approx(&prob)?.value)
}
