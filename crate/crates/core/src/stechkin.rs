//! Higher-order smoothness: symmetric and forward differences, the kernel
//! `U = 2 sum_j (-1)^{j+1} a_j phi_j` built from dilations of the base
//! kernel `phi = chi_h^2`, its convolution powers, and the Stechkin-type
//! series and inequalities.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::closed_forms::Method;
use crate::error::{Error, Result};
use crate::inequalities::{self, FavardSeriesResult};
use crate::kernels::{box_power_line, BoxPowerKernel, ModulusGrid};
use crate::oracle::{self, L1FitProblem};
use crate::quadrature;
use crate::trig::{sinc, CompactKernel, GridFunction, TrigPoly};

/// Exact nonnegative rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Ratio {
    pub num: u128,
    pub den: u128,
}

impl Ratio {
    fn new(num: u128, den: u128) -> Self {
        let g = gcd(num, den);
        Self { num: num / g, den: den / g }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Binomial coefficient; exact for `n <= 120`.
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c * (n - i) is divisible by (i + 1) after the multiplication
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// `gamma_r^* = 1/C(2k, k)` for `r = 2k`, `1/C(2k-1, k-1)` for `r = 2k-1`.
pub fn gamma_star(r: u32) -> Result<Ratio> {
    if r == 0 || r > 120 {
        return Err(Error::InvalidArgument(format!("gamma_star needs 1 <= r <= 120, got {r}")));
    }
    let k = r.div_ceil(2);
    let den = if r.is_multiple_of(2) { binomial(2 * k, k) } else { binomial(2 * k - 1, k - 1) };
    Ok(Ratio::new(1, den))
}

/// Lower-bound factor `c' = r/(r+1)` for odd `r`, 1 for even `r`.
pub fn c_prime(r: u32) -> Ratio {
    if r.is_multiple_of(2) {
        Ratio::new(1, 1)
    } else {
        Ratio::new(r as u128, r as u128 + 1)
    }
}

/// Symmetric difference `sum_{j=-k}^k (-1)^j C(2k, k+j) f(x + j t)`.
pub fn sym_diff<F: Fn(f64) -> f64>(f: &F, t: f64, k: u32, x: f64) -> f64 {
    let mut s = 0.0;
    for j in -(k as i64)..=k as i64 {
        let c = binomial(2 * k, (k as i64 + j) as u32) as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * c * f(x + j as f64 * t);
    }
    s
}

/// Forward difference `sum_{j=0}^r (-1)^j C(r, j) f(x + j t)`.
pub fn forward_diff<F: Fn(f64) -> f64>(f: &F, t: f64, r: u32, x: f64) -> f64 {
    (0..=r)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(r, j) as f64 * f(x + j as f64 * t)
        })
        .sum()
}

/// Modulus `omega_r(f, h) = sup_{0 < t <= h} ||Delta_t^r f||` on an
/// `(x, t)` grid; a lower estimate of the sup.
pub fn omega_r<F: Fn(f64) -> f64 + Sync>(f: &F, r: u32, h: f64, grid: ModulusGrid) -> f64 {
    (1..=grid.t_points)
        .into_par_iter()
        .map(|i| {
            let t = h * i as f64 / grid.t_points as f64;
            (0..grid.x_points)
                .map(|l| forward_diff(f, t, r, l as f64 / grid.x_points as f64).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Kernel data for smoothness order `2k` with base `phi = chi_h^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct StechkinKernel {
    pub k: u32,
    pub h: f64,
    /// `a_j = C(2k, k+j) / C(2k, k)` for `j = 1..=k` (`a[0]` is `a_1`).
    pub a: Vec<f64>,
}

impl StechkinKernel {
    pub fn new(k: u32, h: f64) -> Result<Self> {
        if k == 0 || k > 60 {
            return Err(Error::InvalidArgument(format!("k must be in 1..=60, got {k}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("h must be positive, got {h}")));
        }
        let mid = binomial(2 * k, k) as f64;
        let a = (1..=k).map(|j| binomial(2 * k, k + j) as f64 / mid).collect();
        Ok(Self { k, h, a })
    }

    /// Signed weight `2 (-1)^{j+1} a_j` of the dilation `phi_j`.
    fn weight(&self, j: usize) -> f64 {
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        2.0 * sign * self.a[j - 1]
    }

    /// Base kernel `phi = chi_h^2` (triangle of half-width `h`).
    pub fn phi(&self) -> Triangle {
        Triangle { half_width: self.h }
    }

    /// `U` on the line.
    pub fn u_line(&self, x: f64) -> f64 {
        (1..=self.k as usize).map(|j| self.weight(j) * box_power_line(j as f64 * self.h, 2, x)).sum()
    }

    /// Periodized `U`, exact (sum of periodized triangles).
    pub fn u_periodic(&self, x: f64) -> f64 {
        (1..=self.k as usize)
            .map(|j| {
                let tri = BoxPowerKernel::new(j as f64 * self.h, 2).expect("positive width");
                self.weight(j) * tri.eval(x).expect("j = 2")
            })
            .sum()
    }

    /// Bound `B` with `|U^(freq)| <= B / freq^2`.
    fn decay_constant(&self) -> f64 {
        (1..=self.k as usize).map(|j| self.weight(j).abs() / (PI * j as f64 * self.h).powi(2)).sum()
    }
}

/// `chi_h^2` on the line.
#[derive(Debug, Clone, Copy)]
pub struct Triangle {
    pub half_width: f64,
}

impl CompactKernel for Triangle {
    fn eval(&self, t: f64) -> f64 {
        box_power_line(self.half_width, 2, t)
    }
    fn support(&self) -> (f64, f64) {
        (-self.half_width, self.half_width)
    }
    fn breaks(&self) -> Vec<f64> {
        vec![-self.half_width, 0.0, self.half_width]
    }
}

/// `U^(freq) = 2 sum_j (-1)^{j+1} a_j sinc^2(pi freq j h)`.
pub fn u_fourier(kern: &StechkinKernel, freq: i64) -> f64 {
    (1..=kern.k as usize)
        .map(|j| kern.weight(j) * sinc(PI * freq as f64 * j as f64 * kern.h).powi(2))
        .sum()
}

const PANEL: f64 = 1.0 / 128.0;

/// `W_{2k}(f, phi, x) = C(2k, k)^{-1} int Delta^_t^{2k} f(x) phi(t) dt` for
/// any even unit-mass kernel `phi`.
pub fn w2k_value_with<F, K>(f: &F, k: u32, phi: &K, x: f64) -> f64
where
    F: Fn(f64) -> f64,
    K: CompactKernel + ?Sized,
{
    let (lo, hi) = phi.support();
    let integrand = |t: f64| sym_diff(f, t, k, x) * phi.eval(t);
    quadrature::integrate(&integrand, lo, hi, &phi.breaks(), PANEL) / binomial(2 * k, k) as f64
}

/// `W_{2k}(f, chi_h^2, x)`.
pub fn w2k_value<F: Fn(f64) -> f64>(f: &F, kern: &StechkinKernel, x: f64) -> f64 {
    w2k_value_with(f, kern.k, &kern.phi(), x)
}

/// `f - U * f` for a polynomial, via the exact multiplier.
pub fn w2k_poly(p: &TrigPoly, kern: &StechkinKernel) -> TrigPoly {
    p.sub(&p.multiply(|k| u_fourier(kern, k as i64)))
}

/// Cutoff `K` with `2 B^j K^{1-2j} / (2j - 1) < tol`, and that bound.
fn synthesis_cutoff(kern: &StechkinKernel, j: u32, tol: f64) -> (usize, f64) {
    let b = kern.decay_constant();
    let e = 2.0 * j as f64 - 1.0;
    let tail = |k: f64| 2.0 * b.powi(j as i32) * k.powf(-e) / e;
    let mut k = ((2.0 * b.powi(j as i32) / (e * tol)).powf(1.0 / e)).ceil().max(1.0);
    while tail(k) >= tol {
        k += 1.0;
    }
    (k as usize, tail(k))
}

/// Tail tolerance of the Fourier synthesis of `U~^j`.
pub const SYNTHESIS_TOL: f64 = 1e-10;

/// Evaluator for the periodized power `U~^j`: exact for `j = 1`, Fourier
/// synthesis with a certified tail below [`SYNTHESIS_TOL`] for `j >= 2`.
#[derive(Debug, Clone)]
pub struct UPower {
    kern: StechkinKernel,
    j: u32,
    coeffs: Vec<f64>,
    pub tail_bound: f64,
}

impl UPower {
    pub fn new(kern: &StechkinKernel, j: u32) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidArgument("U^0 is the point mass and has no values".into()));
        }
        if j == 1 {
            return Ok(Self { kern: kern.clone(), j, coeffs: Vec::new(), tail_bound: 0.0 });
        }
        let (cutoff, tail_bound) = synthesis_cutoff(kern, j, SYNTHESIS_TOL);
        let coeffs = (0..=cutoff as i64).map(|v| u_fourier(kern, v).powi(j as i32)).collect();
        Ok(Self { kern: kern.clone(), j, coeffs, tail_bound })
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.j == 1 {
            return self.kern.u_periodic(x);
        }
        // cos(2 pi v x) by the Chebyshev recurrence, restarted every 64
        // steps to keep rounding in check
        let mut s = self.coeffs[0];
        let theta = 2.0 * PI * x;
        let mut v = 1;
        while v < self.coeffs.len() {
            let (mut c_prev, mut c) = ((theta * (v - 1) as f64).cos(), (theta * v as f64).cos());
            let two_cos = 2.0 * theta.cos();
            let end = (v + 64).min(self.coeffs.len());
            while v < end {
                s += 2.0 * self.coeffs[v] * c;
                (c_prev, c) = (c, two_cos * c - c_prev);
                v += 1;
            }
        }
        s
    }
}

/// Samples of `U~^j` at `i/m`. The synthesis is evaluated pointwise, so
/// any `m >= 2` works.
pub fn u_power_samples(kern: &StechkinKernel, j: u32, m: usize) -> Result<GridFunction> {
    let up = UPower::new(kern, j)?;
    GridFunction::new((0..m).into_par_iter().map(|i| up.eval(i as f64 / m as f64)).collect())
}

/// `sum_{j=0}^J E_n(U~^j)_1` by the LP oracle (`j = 0` contributes 1).
pub fn stechkin_series(n: usize, kern: &StechkinKernel, last: u32, m: usize) -> Result<FavardSeriesResult> {
    if last < 1 {
        return Err(Error::InvalidArgument("the series needs J >= 1".into()));
    }
    let terms: Result<Vec<f64>> = (0..=last)
        .into_par_iter()
        .map(|j| {
            if j == 0 {
                return Ok(1.0);
            }
            let up = UPower::new(kern, j)?;
            let prob = L1FitProblem::offset_grid(m, n, |x| up.eval(x))?;
            Ok(oracle::best_l1_approx(&prob)?.value)
        })
        .collect();
    let terms = terms?;
    let mut methods = vec![Method::LpOracle; terms.len()];
    methods[0] = Method::ClosedForm;
    Ok(FavardSeriesResult { partial_sum: terms.iter().sum(), terms, methods })
}

/// `(cos(pi / (2 alpha)))^{-1}` for `alpha > 1`.
pub fn theorem5_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must exceed 1, got {alpha}")));
    }
    Ok(1.0 / (PI / (2.0 * alpha)).cos())
}

/// Grid used by the inequality checks (coarser than the default modulus
/// grid; polynomials of degree `<= 4n` are resolved comfortably).
pub const CHECK_GRID: ModulusGrid = ModulusGrid { x_points: 512, t_points: 128 };

/// One evaluation of `E_n(f)_1 <= C_alpha gamma_{2k}^* omega_{2k}(f, alpha/(2n))`.
#[derive(Debug, Clone, Serialize)]
pub struct StechkinCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub holds: bool,
    /// `gamma_{2k}^* omega_{2k} <= gamma_{2k-1}^* omega_{2k-1}` (with slack 1e-6).
    pub odd_order_dominates: bool,
}

/// Slack added to the right-hand side of the checked inequality.
pub const STECHKIN_SLACK: f64 = 2e-3;

pub fn stechkin_inequality_check(n: usize, k: u32, alpha: f64, f: &TrigPoly, m: usize) -> Result<StechkinCheck> {
    let lhs = inequalities::en_oracle(f, n, m)?;
    stechkin_check_with(lhs, n, k, alpha, f)
}

/// Same as [`stechkin_inequality_check`] with a precomputed `E_n(f)_1`.
pub fn stechkin_check_with(lhs: f64, n: usize, k: u32, alpha: f64, f: &TrigPoly) -> Result<StechkinCheck> {
    let delta = alpha / (2.0 * n as f64);
    let eval = |x: f64| f.eval(x);
    let even = gamma_star(2 * k)?.value() * omega_r(&eval, 2 * k, delta, CHECK_GRID);
    let odd = gamma_star(2 * k - 1)?.value() * omega_r(&eval, 2 * k - 1, delta, CHECK_GRID);
    let rhs = theorem5_constant(alpha)? * even;
    Ok(StechkinCheck {
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { f64::INFINITY },
        holds: lhs <= rhs + STECHKIN_SLACK,
        odd_order_dominates: even <= odd + 1e-6,
    })
}

/// Default `mu_{2k} = (1 - (2k)^{-1/2})^{1/2}`, an approximation.
pub fn default_mu(r: u32) -> f64 {
    (1.0 - (r as f64).powf(-0.5)).sqrt()
}

/// Exploratory comparison of an empirical lower estimate of
/// `K^*_{n,r}(chi^2_{1/(2n)})` with the bracket
/// `gamma/(1 - mu^2) * [1, 4/pi]`. Nothing here is asserted.
#[derive(Debug, Clone, Serialize)]
pub struct Theorem6Report {
    /// Always true: `mu` is only approximately known.
    pub approximate: bool,
    pub n: usize,
    pub r: u32,
    pub mu: f64,
    pub gamma_star: Ratio,
    pub c_prime: Ratio,
    pub lower_bracket: f64,
    pub upper_bracket: f64,
    /// `max_f E_n(f)_1 / ||W_{2k}(f, phi, .)||` over the test family.
    pub empirical_lower: f64,
    /// Same ratio with the uniform error `E_n(cos 2 pi n x) = 1`.
    pub cosine_uniform_ratio: f64,
    pub within_upper: bool,
    /// `(cos(pi rho / 2))^{-1}` with `rho = mu`, reported only.
    pub series_bound: f64,
}

pub fn theorem6_probe(n: usize, r: u32, mu: Option<f64>, m: usize, trials: usize, seed: u64) -> Result<Theorem6Report> {
    if r == 0 || r % 2 == 1 {
        return Err(Error::InvalidArgument(format!("r must be even and positive, got {r}")));
    }
    let k = r / 2;
    let mu = mu.unwrap_or_else(|| default_mu(r));
    let gamma = gamma_star(r)?;
    let kern = StechkinKernel::new(k, 0.5 / n as f64)?;
    let lower_bracket = gamma.value() / (1.0 - mu * mu);
    let upper_bracket = 4.0 / PI * lower_bracket;

    let mut a = vec![0.0; n + 1];
    a[n] = 1.0;
    let cosine = TrigPoly::new(a, vec![0.0; n]).expect("consistent lengths");
    let mut family = vec![cosine.clone()];
    for t in 0..trials {
        let mut rng = inequalities::seeded(seed, t as u64);
        family.push(inequalities::random_perp(&mut rng, n));
    }
    let ratios: Result<Vec<f64>> = family
        .par_iter()
        .map(|f| {
            let w = w2k_poly(f, &kern).sup_norm(inequalities::SUP_GRID);
            Ok(inequalities::en_oracle(f, n, m)? / w)
        })
        .collect();
    let empirical_lower = ratios?.into_iter().fold(0.0, f64::max);
    let cosine_uniform_ratio = 1.0 / w2k_poly(&cosine, &kern).sup_norm(inequalities::SUP_GRID);
    Ok(Theorem6Report {
        approximate: true,
        n,
        r,
        mu,
        gamma_star: gamma,
        c_prime: c_prime(r),
        lower_bracket,
        upper_bracket,
        empirical_lower,
        cosine_uniform_ratio,
        within_upper: empirical_lower <= upper_bracket + 2e-3,
        series_bound: 1.0 / (PI * mu / 2.0).cos(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{self, BoxKernel};

    fn random_poly(seed: u64, deg: usize) -> TrigPoly {
        inequalities::random_trig(&mut inequalities::seeded(seed, 0), 0, deg)
    }

    #[test]
    fn gamma_star_values() {
        assert_eq!(gamma_star(2).unwrap(), Ratio { num: 1, den: 2 });
        assert_eq!(gamma_star(4).unwrap(), Ratio { num: 1, den: 6 });
        assert_eq!(gamma_star(3).unwrap(), Ratio { num: 1, den: 3 });
        assert_eq!(gamma_star(1).unwrap(), Ratio { num: 1, den: 1 });
        assert!(gamma_star(0).is_err());
        assert_eq!(c_prime(4), Ratio { num: 1, den: 1 });
        assert_eq!(c_prime(3), Ratio { num: 3, den: 4 });
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
    }

    #[test]
    fn sym_diff_examples() {
        assert_eq!(sym_diff(&|_| 3.0, 0.2, 2, 0.1), 0.0);
        let f = |x: f64| (2.0 * PI * x).cos();
        let t = 0.13;
        assert!((sym_diff(&f, t, 1, 0.0) - (2.0 - 2.0 * (2.0 * PI * t).cos())).abs() < 1e-14);
        assert!(sym_diff(&f, 0.0, 3, 0.4).abs() < 1e-12);
    }

    #[test]
    fn coefficients_and_unit_mass() {
        for k in 1..=8 {
            let kern = StechkinKernel::new(k, 0.1).unwrap();
            assert!(kern.a.windows(2).all(|w| w[0] > w[1]));
            assert!(kern.a.iter().all(|&a| a > 0.0 && a <= 1.0));
            assert!((u_fourier(&kern, 0) - 1.0).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn k1_reduces_to_triangle() {
        let kern = StechkinKernel::new(1, 0.15).unwrap();
        for i in 0..50 {
            let x = -0.5 + i as f64 / 49.0;
            assert!((kern.u_line(x) - box_power_line(0.15, 2, x)).abs() < 1e-14);
            let want = BoxPowerKernel::new(0.15, 2).unwrap().eval(x).unwrap();
            assert!((kern.u_periodic(x) - want).abs() < 1e-12);
        }
        for v in 0..20 {
            assert!((u_fourier(&kern, v) - kernels::chi_fourier(0.15, v, 2)).abs() < 1e-15);
        }
    }

    #[test]
    fn u_fourier_matches_quadrature() {
        let kern = StechkinKernel::new(2, 0.25).unwrap();
        let (lo, hi) = (-0.5, 0.5);
        let breaks: Vec<f64> = [-0.5, -0.25, 0.0, 0.25, 0.5].to_vec();
        let direct = quadrature::integrate(&|x: f64| kern.u_line(x) * (2.0 * PI * x).cos(), lo, hi, &breaks, 1.0 / 64.0);
        assert!((direct - u_fourier(&kern, 1)).abs() < 1e-9);
    }

    #[test]
    fn powers_match_box_powers_for_k1() {
        let h = 0.125;
        let kern = StechkinKernel::new(1, h).unwrap();
        for j in 2..=3 {
            let up = UPower::new(&kern, j).unwrap();
            let bp = BoxPowerKernel::new(h, 2 * j).unwrap();
            for i in 0..64 {
                let x = i as f64 / 64.0 + 0.003;
                assert!((up.eval(x) - bp.eval(x).unwrap()).abs() < 1e-8, "j={j} x={x}");
            }
        }
    }

    #[test]
    fn samples_have_unit_mass() {
        // the grid mass is sum_l U^(l m)^j: aliasing is negligible for
        // j >= 2, and vanishes for j = 1 when the kinks sit on the grid
        let mass = |kern: &StechkinKernel, j| {
            let g = u_power_samples(kern, j, 4096).unwrap();
            g.values().iter().sum::<f64>() / 4096.0
        };
        let kern = StechkinKernel::new(2, 0.2).unwrap();
        for j in 2..=3 {
            assert!((mass(&kern, j) - 1.0).abs() < 1e-9, "j={j}");
        }
        assert!((mass(&kern, 1) - 1.0).abs() < 1e-6);
        let aligned = StechkinKernel::new(2, 0.125).unwrap();
        assert!((mass(&aligned, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn w_identity_and_k1_case() {
        let f = random_poly(9, 12);
        let eval = |x: f64| f.eval(x);
        for k in 1..=3 {
            let kern = StechkinKernel::new(k, 0.07).unwrap();
            let w = w2k_poly(&f, &kern);
            for i in 0..10 {
                let x = i as f64 * 0.093;
                assert!((w2k_value(&eval, &kern, x) - w.eval(x)).abs() < 1e-9, "k={k}");
            }
        }
        // phi = chi_h gives W_2(f, h, x)
        let h = 0.2;
        for i in 0..10 {
            let x = i as f64 * 0.11;
            let a = w2k_value_with(&eval, 1, &BoxKernel { h }, x);
            assert!((a - kernels::w2(&eval, h, x)).abs() < 1e-9);
        }
        assert!(w2k_value(&|_| 1.0, &StechkinKernel::new(2, 0.1).unwrap(), 0.3).abs() < 1e-14);
    }

    #[test]
    fn theorem5_constant_values() {
        assert!((theorem5_constant(2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((theorem5_constant(1.5).unwrap() - 2.0).abs() < 1e-12);
        assert!((theorem5_constant(1e9).unwrap() - 1.0).abs() < 1e-12);
        assert!(theorem5_constant(1.0).is_err());
        assert!(theorem5_constant(0.5).is_err());
    }

    #[test]
    fn omega_examples() {
        let f = |x: f64| (2.0 * PI * x).cos();
        assert_eq!(omega_r(&|_| 2.0, 3, 0.3, CHECK_GRID), 0.0);
        let w1 = omega_r(&f, 1, 0.5, ModulusGrid { x_points: 1024, t_points: 256 });
        assert!((w1 - 2.0).abs() < 1e-4);
        // second order against the centered modulus with halved argument
        let h = 0.2;
        let a = omega_r(&f, 2, h / 2.0, ModulusGrid { x_points: 1024, t_points: 256 });
        let b = kernels::omega2(&f, h, ModulusGrid { x_points: 1024, t_points: 256 });
        assert!((a - b).abs() < 1e-3, "{a} vs {b}");
    }

    #[test]
    fn series_k1_matches_even_favard_constants() {
        let kern = StechkinKernel::new(1, 0.125).unwrap();
        let r = stechkin_series(4, &kern, 3, 4096).unwrap();
        let want = [1.0, 0.5, 5.0 / 24.0, crate::closed_forms::favard_f(6, 1e-15)];
        for (t, w) in r.terms.iter().zip(want) {
            assert!((t - w).abs() < 2e-3, "{t} vs {w}");
        }
        assert!(r.terms.iter().all(|&t| t >= 0.0));
    }

    #[test]
    fn inequality_on_cosine() {
        let mut a = vec![0.0; 9];
        a[8] = 1.0;
        let f = TrigPoly::new(a, vec![0.0; 8]).unwrap();
        let c = stechkin_inequality_check(8, 1, 2.0, &f, 4096).unwrap();
        assert!(c.holds && c.odd_order_dominates, "{c:?}");
    }

    #[test]
    fn theorem6_probe_reports_bracket() {
        let r = theorem6_probe(4, 2, None, 2048, 4, 1).unwrap();
        assert!(r.approximate);
        assert!((r.mu - 0.5412).abs() < 1e-4);
        assert!((r.lower_bracket - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3);
        assert!((r.upper_bracket - 0.9003).abs() < 1e-3);
        assert_eq!(r.c_prime, Ratio { num: 1, den: 1 });
        assert!(r.empirical_lower > 0.0);
    }
}
