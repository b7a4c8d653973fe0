//! The normalized box `chi_h`, its periodization, periodized convolution
//! powers, Steklov means and the smoothness functionals `W_2` and `omega_2`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::trig::{self, CompactKernel, TrigPoly};

/// Fourier coefficient of the periodized `j`-fold power: `sinc(pi k h)^j`.
pub fn chi_fourier(h: f64, k: i64, j: u32) -> f64 {
    trig::sinc(PI * k as f64 * h).powi(j as i32)
}

/// Reduce to the fundamental half period `[0, 1/2]` symmetrically, so that
/// `x` and `-x` map to the same bits.
#[inline]
fn fold_even(x: f64) -> f64 {
    let t = trig::reduce(x.abs());
    if t > 0.5 {
        1.0 - t
    } else {
        t
    }
}

/// Centered cardinal B-spline of order `j` (degree `j-1`) scaled to width
/// `j*h` and unit mass; this is the `j`-fold convolution power of `chi_h` on
/// the line.
pub fn box_power_line(h: f64, j: u32, x: f64) -> f64 {
    let u = x / h + j as f64 / 2.0;
    cardinal_bspline(j as usize, u) / h
}

/// Cardinal B-spline `N_j` supported on `[0, j]`, via the Cox–de Boor
/// recursion (all terms nonnegative).
fn cardinal_bspline(j: usize, u: f64) -> f64 {
    if !(0.0..=j as f64).contains(&u) {
        return 0.0;
    }
    // vals[s] = N_d(u - s)
    let mut vals = vec![0.0; j];
    let cell = u.floor() as usize;
    if cell < j {
        vals[cell] = 1.0;
    }
    for d in 2..=j {
        let df = d as f64;
        let mut next = vec![0.0; j];
        for s in 0..j {
            let v = u - s as f64;
            let left = vals[s];
            let right = if s + 1 < j { vals[s + 1] } else { 0.0 };
            next[s] = (v * left + (df - v) * right) / (df - 1.0);
        }
        vals = next;
    }
    vals[0]
}

/// The periodized `j`-fold convolution power of the normalized box of width
/// `h`. `j = 0` stands for the periodic Dirac delta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxPowerKernel {
    pub h: f64,
    pub j: u32,
}

impl BoxPowerKernel {
    pub fn new(h: f64, j: u32) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("box width must be positive, got {h}")));
        }
        Ok(Self { h, j })
    }

    pub fn fourier(&self, k: i64) -> f64 {
        chi_fourier(self.h, k, self.j)
    }

    /// Pointwise value of the periodized power.
    ///
    /// `j = 1` is piecewise constant with the midpoint value `1/(2h)` at
    /// jumps; `j >= 2` is evaluated exactly from the periodized B-spline.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if self.j == 0 {
            return Err(Error::InvalidArgument("the Dirac power j = 0 has no pointwise values".into()));
        }
        let t = fold_even(x);
        let half = self.j as f64 * self.h / 2.0;
        let lmax = (half + 1.0).ceil() as i64;
        let mut s = 0.0;
        for l in -lmax..=lmax {
            let y = (t + l as f64).abs();
            if y > half {
                continue;
            }
            s += if self.j == 1 {
                if y == half {
                    0.5 / self.h
                } else {
                    1.0 / self.h
                }
            } else {
                box_power_line(self.h, self.j, y)
            };
        }
        Ok(s)
    }

    /// Knots of the kernel on one period (reduced to `[-1/2, 1/2)`).
    pub fn knots(&self) -> Vec<f64> {
        let mut v: Vec<f64> = (0..=self.j)
            .map(|i| self.h * (i as f64 - self.j as f64 / 2.0))
            .map(trig::reduce_centered)
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// Truncated Fourier synthesis of the periodized power, with the cutoff `K`
/// chosen so that `2 sum_{k>K} (pi k h)^{-j} < tol`. Returns the value and the
/// certified tail bound actually achieved (the cutoff is capped at
/// `max_terms`).
pub fn box_power_fourier(h: f64, j: u32, x: f64, tol: f64, max_terms: usize) -> (f64, f64) {
    assert!(j >= 2);
    let jf = j as f64;
    let scale = (PI * h).powf(-jf);
    // 2 scale K^{1-j}/(j-1) < tol
    let k_needed = (2.0 * scale / ((jf - 1.0) * tol)).powf(1.0 / (jf - 1.0)).ceil();
    let cutoff = (k_needed as usize).clamp(1, max_terms);
    let tail = 2.0 * scale * (cutoff as f64).powf(1.0 - jf) / (jf - 1.0);
    let mut s = 1.0;
    for k in 1..=cutoff {
        s += 2.0 * chi_fourier(h, k as i64, j) * (2.0 * PI * k as f64 * x).cos();
    }
    (s, tail)
}

/// The normalized box `chi_h` on the line.
#[derive(Debug, Clone, Copy)]
pub struct BoxKernel {
    pub h: f64,
}

impl CompactKernel for BoxKernel {
    fn eval(&self, t: f64) -> f64 {
        let y = t.abs();
        let half = self.h / 2.0;
        if y < half {
            1.0 / self.h
        } else if y == half {
            0.5 / self.h
        } else {
            0.0
        }
    }
    fn support(&self) -> (f64, f64) {
        (-self.h / 2.0, self.h / 2.0)
    }
    fn breaks(&self) -> Vec<f64> {
        vec![-self.h / 2.0, self.h / 2.0]
    }
}

/// `chi_h^j` on the line (B-spline).
#[derive(Debug, Clone, Copy)]
pub struct BoxPowerLine {
    pub h: f64,
    pub j: u32,
}

impl CompactKernel for BoxPowerLine {
    fn eval(&self, t: f64) -> f64 {
        box_power_line(self.h, self.j, t)
    }
    fn support(&self) -> (f64, f64) {
        let half = self.j as f64 * self.h / 2.0;
        (-half, half)
    }
    fn breaks(&self) -> Vec<f64> {
        (0..=self.j).map(|i| self.h * (i as f64 - self.j as f64 / 2.0)).collect()
    }
}

const PANEL: f64 = 1.0 / 128.0;

/// Central Steklov mean `(1/h) int_{x-h/2}^{x+h/2} f`.
pub fn steklov_mean<F: Fn(f64) -> f64>(f: &F, h: f64, x: f64) -> f64 {
    steklov_mean_with_breaks(f, h, x, &[])
}

/// Steklov mean of a function with known jump/kink locations (on one period;
/// all integer translates are honoured).
pub fn steklov_mean_with_breaks<F: Fn(f64) -> f64>(f: &F, h: f64, x: f64, breaks: &[f64]) -> f64 {
    let (a, b) = (x - h / 2.0, x + h / 2.0);
    let mut cuts = Vec::new();
    for &p in breaks {
        let first = (a - p).floor() as i64;
        let last = (b - p).ceil() as i64;
        for l in first..=last {
            cuts.push(p + l as f64);
        }
    }
    quadrature::integrate(f, a, b, &cuts, PANEL) / h
}

/// `W_2(f, h, x) = f(x) - (f * chi_h)(x)`.
pub fn w2<F: Fn(f64) -> f64>(f: &F, h: f64, x: f64) -> f64 {
    f(x) - steklov_mean(f, h, x)
}

/// Grid estimate of `sup_x |W_2(f, h, x)|` over `m` points with local
/// refinement around the largest samples. A lower estimate of the sup.
pub fn w2_norm<F: Fn(f64) -> f64>(f: &F, h: f64, m: usize) -> f64 {
    trig::refined_sup(&|x| w2(f, h, x), m)
}

/// `f - f * chi_h` for a trig polynomial, computed with the exact multiplier.
pub fn w2_poly(p: &TrigPoly, h: f64) -> TrigPoly {
    p.sub(&p.steklov(h))
}

/// Same as [`w2_norm`] for a trig polynomial (exact multiplier path).
pub fn w2_norm_poly(p: &TrigPoly, h: f64, m: usize) -> f64 {
    w2_poly(p, h).sup_norm(m)
}

/// Grid sizes for the `omega_2` search.
#[derive(Debug, Clone, Copy)]
pub struct ModulusGrid {
    pub x_points: usize,
    pub t_points: usize,
}

impl Default for ModulusGrid {
    fn default() -> Self {
        Self { x_points: 1024, t_points: 256 }
    }
}

/// `omega_2(f, h/2) = sup_{x, 0<t<h} |f(x - t/2) - 2 f(x) + f(x + t/2)|` on an
/// `(x, t)` product grid (lower estimate).
pub fn omega2<F: Fn(f64) -> f64>(f: &F, h: f64, grid: ModulusGrid) -> f64 {
    let mut best = 0.0f64;
    for i in 0..grid.x_points {
        let x = i as f64 / grid.x_points as f64;
        let fx = f(x);
        for k in 1..=grid.t_points {
            let t = h * k as f64 / grid.t_points as f64;
            let d = f(x - t / 2.0) - 2.0 * fx + f(x + t / 2.0);
            best = best.max(d.abs());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn fourier_examples() {
        assert_eq!(chi_fourier(0.3, 0, 4), 1.0);
        assert!((chi_fourier(0.5, 1, 1) - 2.0 / PI).abs() < 1e-15);
        assert!((chi_fourier(0.25, 2, 2) - 4.0 / (PI * PI)).abs() < 1e-15);
        for j in 1..6 {
            let v = chi_fourier(0.37, 3, j);
            assert_eq!(v, chi_fourier(0.37, 3, 1).powi(j as i32));
        }
    }

    #[test]
    fn fourier_against_numeric_integral() {
        // int e^{-2 pi i t} over (-1/4, 1/4) divided by 1/2
        let v = quadrature::integrate(&|t: f64| (TAU * t).cos(), -0.25, 0.25, &[], 0.01) / 0.5;
        assert!((v - chi_fourier(0.5, 1, 1)).abs() < 1e-14);
    }

    #[test]
    fn eval_examples() {
        let k = BoxPowerKernel::new(0.5, 1).unwrap();
        assert_eq!(k.eval(0.0).unwrap(), 2.0);
        assert_eq!(k.eval(0.4).unwrap(), 0.0);
        assert_eq!(k.eval(0.25).unwrap(), 1.0);
        let k2 = BoxPowerKernel::new(0.25, 2).unwrap();
        assert!((k2.eval(0.0).unwrap() - 4.0).abs() < 1e-14);
        assert!(BoxPowerKernel::new(0.25, 0).unwrap().eval(0.1).is_err());
        assert!(BoxPowerKernel::new(-1.0, 1).is_err());
    }

    #[test]
    fn triangle_closed_form() {
        // chi_h^2 on the line is (h - |x|)_+ / h^2
        let h = 0.3;
        for &x in &[0.0, 0.05, 0.17, 0.29, 0.31] {
            let want = ((h - f64::abs(x)) / (h * h)).max(0.0);
            assert!((box_power_line(h, 2, x) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn wide_boxes_keep_unit_mass() {
        for &(h, j) in &[(1.3, 1u32), (0.7, 3), (2.5, 2)] {
            let k = BoxPowerKernel::new(h, j).unwrap();
            let m = 4096;
            let mass: f64 = (0..m).map(|i| k.eval((i as f64 + 0.5) / m as f64).unwrap()).sum::<f64>() / m as f64;
            assert!((mass - 1.0).abs() < 2e-3, "h={h} j={j} mass={mass}");
        }
    }

    #[test]
    fn steklov_examples() {
        let five = |_: f64| 5.0;
        assert!((steklov_mean(&five, 0.37, 0.2) - 5.0).abs() < 1e-13);
        let c = |x: f64| (TAU * x).cos();
        assert!((steklov_mean(&c, 0.5, 0.0) - 2.0 / PI).abs() < 1e-14);
        let bx = BoxPowerKernel::new(0.2, 1).unwrap();
        let f = |x: f64| bx.eval(x).unwrap();
        let v = steklov_mean_with_breaks(&f, 0.2, 0.0, &[-0.1, 0.1]);
        assert!((v - 5.0).abs() < 1e-12);
        assert!((v - BoxPowerKernel::new(0.2, 2).unwrap().eval(0.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn w2_examples() {
        let c = |_: f64| 2.5;
        assert!(w2(&c, 0.3, 0.1).abs() < 1e-13);
        let cs = |x: f64| (TAU * x).cos();
        assert!((w2(&cs, 0.5, 0.0) - (1.0 - 2.0 / PI)).abs() < 1e-14);
        let sn = |x: f64| (TAU * x).sin();
        assert!(w2(&sn, 0.37, 0.0).abs() < 1e-14);
        assert!(w2_norm(&c, 0.3, 64) < 1e-13);
        assert!((w2_norm(&cs, 0.5, 256) - (1.0 - 2.0 / PI)).abs() < 1e-10);
        let n = 5.0;
        let cn = |x: f64| (TAU * n * x).cos();
        assert!((w2_norm(&cn, 1.0 / n, 256) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn w2_poly_matches_quadrature() {
        let p = TrigPoly::new(vec![0.3, -0.2, 0.7, 0.1], vec![0.5, -0.4, 0.2]).unwrap();
        let wp = w2_poly(&p, 0.21);
        let f = |x: f64| p.eval(x);
        for &x in &[0.0, 0.13, 0.5, 0.77] {
            assert!((wp.eval(x) - w2(&f, 0.21, x)).abs() < 1e-12);
        }
    }

    #[test]
    fn omega2_examples() {
        let c = |_: f64| 1.0;
        assert_eq!(omega2(&c, 0.5, ModulusGrid::default()), 0.0);
        let cs = |x: f64| (TAU * x).cos();
        let v = omega2(&cs, 0.5, ModulusGrid::default());
        assert!((v - 2.0).abs() < 1e-12, "{v}");
    }
}
