//! Extremal sign functions orthogonal to the even polynomials of degree
//! below `n`, and their pairings with the periodized box.
//!
//! For `q` in `(-1, 1)` the zeros on `(0, 1/2)` of
//!
//! ```text
//! cos 2pi(n+1)t - 2q cos 2pi n t + q^2 cos 2pi(n-1)t = 0
//! ```
//!
//! are exactly `n + 1` points, and the even `±1` step function that flips
//! sign at them is orthogonal to `cos 2pi k t` for `k < n`. Pairing such a
//! function with `chi_h` at the origin gives a lower bound for the best L1
//! error of the periodized box; maximizing over `q` (plus the classical
//! `sign cos 2pi n t`) recovers the exact value.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::trig;

/// Left-hand side of the breakpoint equation.
///
/// Evaluated through the factorization
/// `Re(e^{2pi i (n-1) t} (e^{2pi i t} - q)^2)`, which is algebraically
/// identical and keeps full relative accuracy of the `(1 -+ q)^2` terms when
/// `|q|` is close to one.
pub fn eq3_residual(n: usize, q: f64, t: f64) -> f64 {
    let (s, c) = (TAU * t).sin_cos();
    let re = if c >= 0.0 {
        let sp = (PI * t).sin();
        (1.0 - q) - 2.0 * sp * sp
    } else {
        let cp = (PI * t).cos();
        2.0 * cp * cp - (1.0 + q)
    };
    let (x, y) = (re * re - s * s, 2.0 * re * s);
    let (sn, cn) = (TAU * (n as f64 - 1.0) * t).sin_cos();
    x * cn - y * sn
}

/// The expanded form, kept for cross-checking.
pub fn eq3_residual_expanded(n: usize, q: f64, t: f64) -> f64 {
    let nf = n as f64;
    (TAU * (nf + 1.0) * t).cos() - 2.0 * q * (TAU * nf * t).cos() + q * q * (TAU * (nf - 1.0) * t).cos()
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64, width: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if b - a <= width || mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// All zeros of the breakpoint equation on `(0, 1/2)`, ascending.
///
/// Scans `16(n+1)` uniform cells, doubling the density up to three times if
/// the count differs from `n + 1`, then bisects each bracket to width
/// `1e-14`.
pub fn eq3_roots(n: usize, q: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    if !(q > -1.0 && q < 1.0) {
        return Err(Error::InvalidArgument(format!("q must lie in (-1, 1), got {q}")));
    }
    let f = |t: f64| eq3_residual(n, q, t);
    let mut cells = 16 * (n + 1);
    let mut found = 0;
    for _ in 0..4 {
        let step = 0.5 / cells as f64;
        let mut roots = Vec::with_capacity(n + 1);
        let mut a = 0.0;
        let mut fa = f(a);
        for i in 1..=cells {
            let b = if i == cells { 0.5 } else { i as f64 * step };
            let fb = f(b);
            if fb == 0.0 && i < cells {
                // exact hit on a grid node; nudge the bracket end
                roots.push(b);
                a = b;
                fa = f(b + 0.25 * step);
                continue;
            }
            if (fa > 0.0) != (fb > 0.0) && fa != 0.0 {
                roots.push(bisect(&f, a, b, fa, 1e-14));
            }
            a = b;
            fa = fb;
        }
        found = roots.len();
        if found == n + 1 {
            return Ok(roots);
        }
        cells *= 2;
    }
    Err(Error::RootCount { n, q, expected: n + 1, found })
}

/// Which family a sign function comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignKind {
    /// Built from the zeros of the breakpoint equation at parameter `q`.
    Lemma { q: f64 },
    /// `sign(cos 2 pi n t)`.
    Classical,
}

/// An even 1-periodic `±1` step function described by its breakpoints on
/// `(0, 1/2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignFunction {
    pub n: usize,
    pub kind: SignKind,
    pub breakpoints: Vec<f64>,
    /// Value on `(0, t_0)`.
    pub orientation: f64,
}

impl SignFunction {
    pub fn from_q(n: usize, q: f64, orientation: f64) -> Result<Self> {
        let breakpoints = eq3_roots(n, q)?;
        Ok(Self { n, kind: SignKind::Lemma { q }, breakpoints, orientation: orientation.signum() })
    }

    pub fn classical(n: usize, orientation: f64) -> Self {
        let breakpoints = (1..=n).map(|j| (2 * j - 1) as f64 / (4 * n) as f64).collect();
        Self { n, kind: SignKind::Classical, breakpoints, orientation: orientation.signum() }
    }

    pub fn flipped(&self) -> Self {
        Self { orientation: -self.orientation, ..self.clone() }
    }

    /// Value at `x`; 0 exactly on a breakpoint.
    pub fn eval(&self, x: f64) -> f64 {
        let mut t = trig::reduce(x.abs());
        if t > 0.5 {
            t = 1.0 - t;
        }
        let mut crossings = 0;
        for &b in &self.breakpoints {
            if t == b {
                return 0.0;
            }
            if b < t {
                crossings += 1;
            }
        }
        if crossings % 2 == 0 {
            self.orientation
        } else {
            -self.orientation
        }
    }

    /// Constant pieces `(a, b, sign)` covering `[0, 1/2]`.
    fn pieces(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.breakpoints.len() + 1);
        let mut a = 0.0;
        let mut s = self.orientation;
        for &b in &self.breakpoints {
            out.push((a, b, s));
            a = b;
            s = -s;
        }
        out.push((a, 0.5, s));
        out
    }

    /// `2 int_0^{1/2} g(t) cos(2 pi k t) dt`, in closed form.
    pub fn orthogonality_residual(&self, k: usize) -> f64 {
        let mut total = 0.0;
        for (a, b, s) in self.pieces() {
            let piece = if k == 0 {
                b - a
            } else {
                let w = TAU * k as f64;
                ((w * b).sin() - (w * a).sin()) / w
            };
            total += s * piece;
        }
        2.0 * total
    }

    /// `int_0^u g(t) dt` for `u` in `[0, 1/2]`.
    pub fn integral_to(&self, u: f64) -> f64 {
        let mut total = 0.0;
        for (a, b, s) in self.pieces() {
            if a >= u {
                break;
            }
            total += s * (b.min(u) - a);
        }
        total
    }

    /// Signed pairing `(g * chi_h)(0) = (2/h) int_0^{h/2} g`.
    pub fn signed_pairing(&self, h: f64) -> f64 {
        2.0 / h * self.integral_to(h / 2.0)
    }

    /// `|(g * chi_h)(0)|`, computed exactly from the breakpoints.
    pub fn pairing_value(&self, h: f64) -> Result<f64> {
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::InvalidArgument(format!("pairing needs 0 < h <= 1, got {h}")));
        }
        Ok(self.signed_pairing(h).abs())
    }
}

/// Result of the dual maximization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualBound {
    pub value: f64,
    pub kind: SignKind,
    /// Orientation of the maximizer that makes the pairing positive.
    pub orientation: f64,
}

/// Number of coarse `q` samples in the dual maximization.
pub const Q_GRID: usize = 513;
const Q_MAX: f64 = 0.998;

fn q_at(i: usize) -> f64 {
    -Q_MAX + 2.0 * Q_MAX * i as f64 / (Q_GRID - 1) as f64
}

/// Lower bound for `E_n(chi~_h)_1` as the best pairing over the Lemma
/// family (coarse grid, golden-section refinement, and exact crossings of
/// a breakpoint through `h/2`) and the classical sign function.
pub fn lower_bound_via_duality(n: usize, h: f64) -> Result<DualBound> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::InvalidArgument(format!("need 0 < h <= 1, got {h}")));
    }
    let classical = SignFunction::classical(n, 1.0);
    let cl = classical.signed_pairing(h);
    let mut best = DualBound { value: cl.abs(), kind: SignKind::Classical, orientation: sign_or_one(cl) };

    let grid: Vec<(f64, Vec<f64>)> = (0..Q_GRID)
        .into_par_iter()
        .map(|i| {
            let q = q_at(i);
            eq3_roots(n, q).map(|r| (q, r))
        })
        .collect::<Result<_>>()?;

    let pairing_of = |q: f64| -> Result<f64> { Ok(SignFunction::from_q(n, q, 1.0)?.signed_pairing(h)) };
    let consider = |q: f64, signed: f64, best: &mut DualBound| {
        let v = signed.abs();
        let better = match best.kind {
            SignKind::Lemma { q: bq } => v > best.value || (v == best.value && q < bq),
            SignKind::Classical => v > best.value,
        };
        if better {
            *best = DualBound { value: v, kind: SignKind::Lemma { q }, orientation: sign_or_one(signed) };
        }
    };

    let values: Vec<f64> = grid
        .iter()
        .map(|(q, r)| {
            let g = SignFunction { n, kind: SignKind::Lemma { q: *q }, breakpoints: r.clone(), orientation: 1.0 };
            g.signed_pairing(h)
        })
        .collect();
    let mut coarse_best = 0;
    for (i, v) in values.iter().enumerate() {
        if v.abs() > values[coarse_best].abs() {
            coarse_best = i;
        }
        consider(grid[i].0, *v, &mut best);
    }

    // golden-section refinement around the best cell
    let lo = q_at(coarse_best.saturating_sub(1));
    let hi = q_at((coarse_best + 1).min(Q_GRID - 1));
    let (qg, vg) = golden_argmax(&|q| pairing_of(q).map(f64::abs).unwrap_or(0.0), lo, hi, 1e-10);
    if vg > 0.0 {
        consider(qg, pairing_of(qg)?, &mut best);
    }

    // exact crossings t_j(q) = h/2: the pairing has its kinks there
    let target = h / 2.0;
    for j in 0..=n {
        for i in 0..Q_GRID - 1 {
            let (qa, ra) = (&grid[i].0, &grid[i].1);
            let (qb, rb) = (&grid[i + 1].0, &grid[i + 1].1);
            let (da, db) = (ra[j] - target, rb[j] - target);
            if (da > 0.0) == (db > 0.0) {
                continue;
            }
            let q = bisect_q(&|q| eq3_roots(n, q).map(|r| r[j] - target).unwrap_or(f64::NAN), *qa, *qb, da);
            consider(q, pairing_of(q)?, &mut best);
        }
    }
    Ok(best)
}

fn sign_or_one(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn golden_argmax<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
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
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn bisect_q<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm.is_nan() {
            break;
        }
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Solution of `t_1(q) = h/2` together with the resulting value
/// `1 - 2 t_0 / t_1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremBSolution {
    pub value: f64,
    pub q: f64,
    pub t0: f64,
    pub t1: f64,
}

/// Half-width of the `atanh(q)` scan used by the inversion.
const S_MAX: f64 = 9.0;
const S_CELLS: usize = 144;

/// Exact value of `E_n(chi~_h)_1` for `1/(2n) < h < 3/(2n)`: the second
/// breakpoint of the extremal sign function sits at the edge `h/2` of the
/// box, and the value is `1 - 2 t_0/t_1`.
///
/// The parameter is found by scanning `q = tanh(s)` and bisecting the
/// bracketing cell; no monotonicity in `q` is assumed.
pub fn theorem_b(n: usize, h: f64) -> Result<TheoremBSolution> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    let nf = n as f64;
    if !(h > 1.0 / (2.0 * nf) && h < 3.0 / (2.0 * nf)) {
        return Err(Error::InvalidArgument(format!("h = {h} outside (1/(2n), 3/(2n)) for n = {n}")));
    }
    let target = h / 2.0;
    let t1_minus = |s: f64| -> Result<f64> { Ok(eq3_roots(n, s.tanh())?[1] - target) };
    let fail = |reason: String| Error::Inversion { n, h, reason };

    let svals: Vec<f64> = (0..=S_CELLS).map(|i| -S_MAX + 2.0 * S_MAX * i as f64 / S_CELLS as f64).collect();
    let dvals: Vec<f64> = svals.par_iter().map(|&s| t1_minus(s)).collect::<Result<_>>()?;
    let cell = (0..S_CELLS)
        .find(|&i| dvals[i] == 0.0 || (dvals[i] > 0.0) != (dvals[i + 1] > 0.0))
        .ok_or_else(|| fail("no sign change of t_1(q) - h/2 on the scan".into()))?;
    let s = if dvals[cell] == 0.0 {
        svals[cell]
    } else {
        bisect_q(&|s| t1_minus(s).unwrap_or(f64::NAN), svals[cell], svals[cell + 1], dvals[cell])
    };
    let q = s.tanh();
    let roots = eq3_roots(n, q)?;
    let (t0, t1) = (roots[0], roots[1]);
    if (t1 - target).abs() > 1e-11 {
        return Err(fail(format!("|t_1 - h/2| = {:e} after bisection", (t1 - target).abs())));
    }
    Ok(TheoremBSolution { value: 1.0 - 2.0 * t0 / t1, q, t0, t1 })
}

/// Convenience wrapper returning only the value.
pub fn theorem_b_value(n: usize, h: f64) -> Result<f64> {
    theorem_b(n, h).map(|s| s.value)
}
