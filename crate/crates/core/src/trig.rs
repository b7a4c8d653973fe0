//! Trigonometric polynomials on the circle `T = R/Z`, uniform grid functions,
//! Fourier coefficients and periodic convolution.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::quadrature;

/// Reduce `x` to `[0, 1)`.
#[inline]
pub fn reduce(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Reduce `x` to `[-1/2, 1/2)`.
#[inline]
pub fn reduce_centered(x: f64) -> f64 {
    let r = reduce(x + 0.5) - 0.5;
    if r < -0.5 {
        -0.5
    } else {
        r
    }
}

/// `sin(u)/u` with the continuous value 1 at the origin.
#[inline]
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-8 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// A complex number as a plain `(re, im)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };
    pub const ONE: Complex = Complex { re: 1.0, im: 0.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn norm(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.re * s, self.im * s)
    }

    pub fn div(self, other: Complex) -> Self {
        let d = other.re * other.re + other.im * other.im;
        Self::new(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, o: Complex) -> Complex {
        Complex::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

/// Real trigonometric polynomial of degree at most `n - 1`:
/// `sum a_j cos(2 pi j x) + sum b_j sin(2 pi j x)`.
///
/// `a` holds `a_0..a_{n-1}`, `b` holds `b_1..b_{n-1}` (so `b[0]` is `b_1`).
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl TrigPoly {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidArgument("a trig polynomial needs n >= 1".into()));
        }
        if b.len() + 1 != a.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} sine coefficients for n = {}, got {}",
                a.len() - 1,
                a.len(),
                b.len()
            )));
        }
        Ok(Self { a, b })
    }

    pub fn zero(n: usize) -> Self {
        assert!(n >= 1);
        Self { a: vec![0.0; n], b: vec![0.0; n - 1] }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let mut p = Self::zero(n);
        p.a[0] = c;
        p
    }

    /// Builds a polynomial from its complex coefficients `c_0..c_{n-1}`
    /// (the negative frequencies are fixed by conjugate symmetry).
    pub fn from_fourier(coeffs: &[Complex]) -> Self {
        let n = coeffs.len();
        assert!(n >= 1);
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n - 1];
        a[0] = coeffs[0].re;
        for k in 1..n {
            a[k] = 2.0 * coeffs[k].re;
            b[k - 1] = -2.0 * coeffs[k].im;
        }
        Self { a, b }
    }

    /// The space index: the polynomial lives in `T_{2n-1}`.
    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.a
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.b
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = reduce(x);
        let mut s = self.a[0];
        for j in 1..self.a.len() {
            let (sn, cs) = (TAU * j as f64 * x).sin_cos();
            s += self.a[j] * cs + self.b[j - 1] * sn;
        }
        s
    }

    /// Exact Fourier coefficient `p^(k)` for any integer `k`.
    pub fn coeff(&self, k: i64) -> Complex {
        let ka = k.unsigned_abs() as usize;
        if ka >= self.a.len() {
            return Complex::ZERO;
        }
        if ka == 0 {
            return Complex::real(self.a[0]);
        }
        let c = Complex::new(0.5 * self.a[ka], -0.5 * self.b[ka - 1]);
        if k > 0 {
            c
        } else {
            c.conj()
        }
    }

    /// Applies a real even multiplier `m(k)` to every frequency.
    pub fn multiply<M: Fn(usize) -> f64>(&self, m: M) -> Self {
        let a = self.a.iter().enumerate().map(|(k, &v)| v * m(k)).collect();
        let b = self.b.iter().enumerate().map(|(k, &v)| v * m(k + 1)).collect();
        Self { a, b }
    }

    /// Central Steklov mean `p * chi_h` (multiplier `sinc(pi k h)`).
    pub fn steklov(&self, h: f64) -> Self {
        self.multiply(|k| sinc(PI * k as f64 * h))
    }

    pub fn second_derivative(&self) -> Self {
        self.multiply(|k| -(TAU * k as f64).powi(2))
    }

    /// Re-embed into `T_{2m-1}`, truncating or zero-padding.
    pub fn resized(&self, m: usize) -> Self {
        let mut p = Self::zero(m);
        for k in 0..m.min(self.n()) {
            p.a[k] = self.a[k];
            if k >= 1 {
                p.b[k - 1] = self.b[k - 1];
            }
        }
        p
    }

    /// Periodic convolution with another polynomial, truncated to `T_{2n-1}`
    /// where `n` is `self.n()`.
    pub fn convolve(&self, other: &TrigPoly) -> Self {
        let n = self.n();
        let coeffs: Vec<Complex> = (0..n as i64).map(|k| self.coeff(k) * other.coeff(k)).collect();
        Self::from_fourier(&coeffs)
    }

    pub fn sub(&self, other: &TrigPoly) -> Self {
        let n = self.n().max(other.n());
        let (x, y) = (self.resized(n), other.resized(n));
        Self {
            a: x.a.iter().zip(&y.a).map(|(u, v)| u - v).collect(),
            b: x.b.iter().zip(&y.b).map(|(u, v)| u - v).collect(),
        }
    }

    pub fn add(&self, other: &TrigPoly) -> Self {
        let n = self.n().max(other.n());
        let (x, y) = (self.resized(n), other.resized(n));
        Self {
            a: x.a.iter().zip(&y.a).map(|(u, v)| u + v).collect(),
            b: x.b.iter().zip(&y.b).map(|(u, v)| u + v).collect(),
        }
    }

    /// Samples at `i/m`.
    pub fn sample(&self, m: usize) -> GridFunction {
        GridFunction::from_fn(m, |x| self.eval(x))
    }

    /// Maximum of `|p|` over the `m` grid points refined by a local search
    /// around the largest samples. Still a lower estimate of the sup norm.
    pub fn sup_norm(&self, m: usize) -> f64 {
        refined_sup(&|x| self.eval(x), m)
    }
}

/// Values of a function at the uniform abscissae `i/m`, `i = 0..m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument("a grid function needs m >= 2 samples".into()));
        }
        Ok(Self { values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(m: usize, f: F) -> Self {
        assert!(m >= 2);
        Self { values: (0..m).map(|i| f(i as f64 / m as f64)).collect() }
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn abscissa(&self, i: usize) -> f64 {
        i as f64 / self.values.len() as f64
    }

    /// Rectangle-rule Fourier coefficient; exact for trig polynomials of
    /// degree below `m/2`.
    pub fn fourier_coeff(&self, k: i64) -> Result<Complex> {
        let m = self.m();
        if 2 * k.unsigned_abs() as usize >= m {
            return Err(Error::AboveNyquist { k, m });
        }
        Ok(rectangle_coeff(&self.values, k))
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.values)
    }

    pub fn l1_norm(&self) -> f64 {
        l1_norm(&self.values)
    }
}

fn rectangle_coeff(values: &[f64], k: i64) -> Complex {
    let m = values.len();
    // exact angle table indexing avoids drift for large k*i
    let km = k.rem_euclid(m as i64) as usize;
    let mut re = 0.0;
    let mut im = 0.0;
    for (i, v) in values.iter().enumerate() {
        let idx = (km * i) % m;
        let (s, c) = (TAU * idx as f64 / m as f64).sin_cos();
        re += v * c;
        im -= v * s;
    }
    Complex::new(re / m as f64, im / m as f64)
}

/// Rectangle-rule Fourier coefficient of a 1-periodic function handle on `m`
/// uniform points.
pub fn fourier_coeff_fn<F: Fn(f64) -> f64>(f: F, k: i64, m: usize) -> Complex {
    let values: Vec<f64> = (0..m).map(|i| f(i as f64 / m as f64)).collect();
    rectangle_coeff(&values, k)
}

pub fn sup_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn l1_norm(values: &[f64]) -> f64 {
    values.iter().map(|v| v.abs()).sum::<f64>() / values.len() as f64
}

/// Real Dirichlet kernel `sum_{|k| < n} e^{2 pi i k x}`.
pub fn dirichlet_kernel(n: usize, x: f64) -> f64 {
    assert!(n >= 1);
    let x = reduce(x);
    let s = (PI * x).sin();
    if s.abs() < 1e-12 {
        return (2 * n - 1) as f64;
    }
    (((2 * n - 1) as f64) * PI * x).sin() / s
}

/// Grid maximum of `|f|` on `i/m`, refined by golden-section search in the
/// two cells around the few largest samples.
pub fn refined_sup<F: Fn(f64) -> f64>(f: &F, m: usize) -> f64 {
    let vals: Vec<f64> = (0..m).map(|i| f(i as f64 / m as f64).abs()).collect();
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let mut best = vals[idx[0]];
    let h = 1.0 / m as f64;
    for &i in idx.iter().take(8) {
        let c = i as f64 * h;
        let g = |x: f64| f(x).abs();
        best = best.max(golden_max(&g, c - h, c + h, 1e-13));
    }
    best
}

/// Golden-section maximization of `f` on `[a, b]`; returns the best value seen.
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = fc.max(fd);
    while (b - a) > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        best = best.max(fc).max(fd);
    }
    best
}

/// A kernel on `R` with bounded support, described by its support interval
/// and the points where it is non-smooth.
pub trait CompactKernel: Sync {
    fn eval(&self, t: f64) -> f64;
    fn support(&self) -> (f64, f64);
    fn breaks(&self) -> Vec<f64>;
}

/// Periodization `g~(t) = sum_l g(t + l)`.
pub fn periodize<K: CompactKernel + ?Sized>(g: &K, t: f64) -> f64 {
    let (lo, hi) = g.support();
    let t = reduce_centered(t);
    let lmin = (lo - t).floor() as i64;
    let lmax = (hi - t).ceil() as i64;
    (lmin..=lmax)
        .map(|l| t + l as f64)
        .filter(|&s| s >= lo && s <= hi)
        .map(|s| g.eval(s))
        .sum()
}

const PANEL: f64 = 1.0 / 128.0;

/// `x -> (f ⊙ g~)(x) = int_T f(x - t) g~(t) dt`, by quadrature over one
/// period split at the (reduced) break points of the periodized kernel.
pub fn convolve_periodic<'a, F, K>(f: &'a F, g: &'a K) -> impl Fn(f64) -> f64 + 'a
where
    F: Fn(f64) -> f64,
    K: CompactKernel + ?Sized,
{
    let mut breaks: Vec<f64> = g.breaks().into_iter().map(reduce_centered).collect();
    breaks.sort_by(f64::total_cmp);
    move |x| {
        let integrand = |t: f64| f(x - t) * periodize(g, t);
        quadrature::integrate(&integrand, -0.5, 0.5, &breaks, PANEL)
    }
}

/// `(f * g)(x) = int_R f(x - t) g(t) dt` over the support of `g`.
pub fn convolve_line<F, K>(f: &F, g: &K, x: f64) -> f64
where
    F: Fn(f64) -> f64,
    K: CompactKernel + ?Sized,
{
    let (lo, hi) = g.support();
    let integrand = |t: f64| f(x - t) * g.eval(t);
    quadrature::integrate(&integrand, lo, hi, &g.breaks(), PANEL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let p = TrigPoly::new(vec![1.0], vec![]).unwrap();
        assert_eq!(p.eval(0.37), 1.0);
        let p = TrigPoly::new(vec![0.0, 1.0], vec![0.0]).unwrap();
        assert!(p.eval(0.25).abs() < 1e-15);
        let p = TrigPoly::new(vec![0.0, 0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert!((p.eval(0.1) - 0.309_016_994_374_947_45).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(TrigPoly::new(vec![], vec![]).is_err());
        assert!(TrigPoly::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(GridFunction::new(vec![1.0]).is_err());
    }

    #[test]
    fn periodic_for_large_arguments() {
        let p = TrigPoly::new(vec![0.1, 0.7, -0.3], vec![0.2, 0.9]).unwrap();
        for x in [0.123, 0.9, 0.5] {
            assert!((p.eval(x) - p.eval(x + 1.0e6)).abs() < 1e-9);
            assert!((p.eval(x) - p.eval(x - 3.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_examples() {
        let one = GridFunction::from_fn(16, |_| 1.0);
        assert!((one.fourier_coeff(0).unwrap().re - 1.0).abs() < 1e-15);
        let c = GridFunction::from_fn(64, |x| (TAU * x).cos());
        let c1 = c.fourier_coeff(1).unwrap();
        assert!((c1.re - 0.5).abs() < 1e-15 && c1.im.abs() < 1e-15);
        assert!(matches!(c.fourier_coeff(32), Err(Error::AboveNyquist { .. })));
        assert!(c.fourier_coeff(-31).is_ok());
    }

    #[test]
    fn dirichlet_examples() {
        assert!((dirichlet_kernel(1, 0.3) - 1.0).abs() < 1e-15);
        assert_eq!(dirichlet_kernel(3, 0.0), 5.0);
        assert!(dirichlet_kernel(4, 1.0 / 7.0).abs() < 1e-14);
        // direct summation
        for &(n, x) in &[(5usize, 0.13), (7, 0.41), (2, 0.77)] {
            let direct: f64 = (-(n as i64 - 1)..n as i64).map(|k| (TAU * k as f64 * x).cos()).sum();
            assert!((dirichlet_kernel(n, x) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn norms() {
        let z = GridFunction::new(vec![0.0; 8]).unwrap();
        assert_eq!((z.sup_norm(), z.l1_norm()), (0.0, 0.0));
        let pm = GridFunction::new(vec![1.0, -1.0]).unwrap();
        assert_eq!((pm.sup_norm(), pm.l1_norm()), (1.0, 1.0));
        let c = GridFunction::from_fn(1024, |x| (TAU * x).cos());
        assert_eq!(c.sup_norm(), 1.0);
        assert!((c.l1_norm() - 2.0 / PI).abs() < 1e-5);
    }

    #[test]
    fn coeff_conventions() {
        let p = TrigPoly::new(vec![0.5, 2.0, -1.0], vec![3.0, 0.25]).unwrap();
        let g = p.sample(32);
        for k in -2..=2i64 {
            let want = p.coeff(k);
            let got = g.fourier_coeff(k).unwrap();
            assert!((want - got).norm() < 1e-14, "k={k}");
        }
        assert_eq!(p.coeff(3), Complex::ZERO);
        assert_eq!(TrigPoly::from_fourier(&[p.coeff(0), p.coeff(1), p.coeff(2)]), p);
    }

    #[test]
    fn refined_sup_beats_grid() {
        let p = TrigPoly::new(vec![0.0, 1.0], vec![0.0]).unwrap();
        let shifted = |x: f64| p.eval(x - 0.013);
        let v = refined_sup(&shifted, 16);
        assert!((v - 1.0).abs() < 1e-12);
    }
}
