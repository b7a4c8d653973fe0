//! Closed-form constants and the dispatcher for `c(h, n) = E_n(chi~_h)_1`.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::signs::{self, SignKind};

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    TheoremB,
    DualMax,
    LpOracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::TheoremB => "theoremB",
            Method::DualMax => "dual_max",
            Method::LpOracle => "lp_oracle",
        })
    }
}

/// Supporting data for a computed constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    /// Extremal sign function attaining the value.
    Sign { kind: SignKind, orientation: f64 },
    /// Breakpoints `t_0, t_1` of the Theorem B sign function.
    Breakpoints { q: f64, t0: f64, t1: f64 },
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Sign { kind: SignKind::Lemma { q }, orientation } => {
                write!(f, "sign function, q = {q:.12}, orientation {orientation:+}")
            }
            Certificate::Sign { kind: SignKind::Classical, orientation } => {
                write!(f, "sign(cos 2 pi n t), orientation {orientation:+}")
            }
            Certificate::Breakpoints { q, t0, t1 } => write!(f, "q = {q:.12}, t0 = {t0:.12}, t1 = {t1:.12}"),
        }
    }
}

/// A best-approximation constant together with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxResult {
    pub value: f64,
    pub method: Method,
    pub certificate: Option<Certificate>,
    pub error_bound: f64,
}

/// Box width, either a float or an exact ratio `num/den`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Width {
    Decimal(f64),
    Ratio { num: u64, den: u64 },
}

impl Width {
    pub fn value(&self) -> f64 {
        match *self {
            Width::Decimal(h) => h,
            Width::Ratio { num, den } => num as f64 / den as f64,
        }
    }

    /// Fractional part, exact for ratios.
    fn fract(&self) -> Width {
        match *self {
            Width::Decimal(h) => Width::Decimal(h - h.floor()),
            Width::Ratio { num, den } => Width::Ratio { num: num % den, den },
        }
    }

    fn is_zero(&self) -> bool {
        match *self {
            Width::Decimal(h) => h.abs() <= 1e-12,
            Width::Ratio { num, .. } => num == 0,
        }
    }

    fn exceeds_one(&self) -> bool {
        match *self {
            Width::Decimal(h) => h > 1.0,
            Width::Ratio { num, den } => num > den,
        }
    }
}

impl std::str::FromStr for Width {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse box width '{s}'"));
        let w = if let Some((a, b)) = s.split_once('/') {
            let num: u64 = a.trim().parse().map_err(|_| bad())?;
            let den: u64 = b.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            Width::Ratio { num, den }
        } else {
            Width::Decimal(s.trim().parse().map_err(|_| bad())?)
        };
        if !(w.value() > 0.0 && w.value().is_finite()) {
            return Err(Error::InvalidArgument(format!("box width must be positive, got '{s}'")));
        }
        Ok(w)
    }
}

const LATTICE_TOL: f64 = 1e-12;

fn closed_in_unit(n: usize, h: Width) -> Option<f64> {
    let nn = n as u64;
    match h {
        Width::Ratio { num, den } => {
            // compare num/den against k/(2n) exactly
            let twice = 2 * nn * num;
            if twice <= den {
                return Some(1.0);
            }
            if (2 * nn - 1) * den < twice && num <= den {
                let hv = h.value();
                return Some((1.0 - hv) / hv);
            }
            if twice.is_multiple_of(den) {
                let k = twice / den;
                if k % 2 == 1 && (3..=2 * nn - 1).contains(&k) {
                    return Some(1.0 / (2.0 * n as f64 * h.value()));
                }
            }
            None
        }
        Width::Decimal(hv) => {
            let nf = n as f64;
            if hv <= 1.0 / (2.0 * nf) + LATTICE_TOL {
                return Some(1.0);
            }
            if hv > 1.0 - 1.0 / (2.0 * nf) + LATTICE_TOL && hv <= 1.0 + LATTICE_TOL {
                return Some(((1.0 - hv) / hv).max(0.0));
            }
            for j in 2..=n {
                let lattice = (2 * j - 1) as f64 / (2.0 * nf);
                if (hv - lattice).abs() <= LATTICE_TOL {
                    return Some(1.0 / (2.0 * nf * hv));
                }
            }
            None
        }
    }
}

/// Closed-form value of `E_n(chi~_h)_1` where one is known: the flat region
/// `(0, 1/(2n)]`, the lattice `(2j-1)/(2n)`, the top interval
/// `(1 - 1/(2n), 1]`, and integer `h` (value 0). For other `h > 1` the
/// fractional reduction applies and a value is returned only when the
/// reduced width itself has a closed form.
pub fn en_chi_closed(n: usize, h: Width) -> Option<f64> {
    if h.exceeds_one() {
        let frac = h.fract();
        if frac.is_zero() {
            return Some(0.0);
        }
        return closed_in_unit(n, frac).map(|v| frac.value() / h.value() * v);
    }
    closed_in_unit(n, h)
}

/// Ceiling `min(1, 1/(2nh))`.
pub fn upper_bound(n: usize, h: f64) -> f64 {
    (1.0 / (2.0 * n as f64 * h)).min(1.0)
}

/// Dispatcher for `c(h, n) = E_n(chi~_h)_1`: closed form when available,
/// Theorem B on `(1/(2n), 3/(2n))`, otherwise maximization over extremal
/// sign functions. Checked against the ceiling `min(1, 1/(2nh))`.
pub fn en_chi(n: usize, h: Width) -> Result<ApproxResult> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    let hv = h.value();
    if !(hv > 0.0 && hv.is_finite()) {
        return Err(Error::InvalidArgument(format!("box width must be positive, got {hv}")));
    }
    let result = if h.exceeds_one() {
        let frac = h.fract();
        if frac.is_zero() {
            ApproxResult { value: 0.0, method: Method::ClosedForm, certificate: None, error_bound: 0.0 }
        } else {
            let inner = en_chi(n, frac)?;
            let s = frac.value() / hv;
            ApproxResult { value: s * inner.value, error_bound: s * inner.error_bound, ..inner }
        }
    } else if let Some(v) = closed_in_unit(n, h) {
        ApproxResult { value: v, method: Method::ClosedForm, certificate: None, error_bound: 1e-15 }
    } else if hv > 1.0 / (2.0 * n as f64) && hv < 3.0 / (2.0 * n as f64) {
        let sol = signs::theorem_b(n, hv)?;
        ApproxResult {
            value: sol.value,
            method: Method::TheoremB,
            certificate: Some(Certificate::Breakpoints { q: sol.q, t0: sol.t0, t1: sol.t1 }),
            error_bound: 1e-11,
        }
    } else {
        let b = signs::lower_bound_via_duality(n, hv)?;
        ApproxResult {
            value: b.value,
            method: Method::DualMax,
            certificate: Some(Certificate::Sign { kind: b.kind, orientation: b.orientation }),
            error_bound: 1e-9,
        }
    };
    let ceiling = upper_bound(n, hv);
    if result.value > ceiling + 1e-9 {
        return Err(Error::Inconsistency(format!(
            "E_{n}(chi_{hv}) = {} exceeds the ceiling {ceiling}",
            result.value
        )));
    }
    Ok(result)
}

/// `sec(pi v) - tan(pi v) - v`, written as `cos/(1 + sin) - v` for stability.
fn v0_equation(v: f64) -> f64 {
    let (s, c) = (PI * v).sin_cos();
    c / (1.0 + s) - v
}

/// First positive root of `sec(pi v) - tan(pi v) = v`.
pub fn v0() -> f64 {
    let (mut a, mut b) = (1e-9, 0.499);
    let fa = v0_equation(a);
    while b - a > 1e-14 {
        let mid = 0.5 * (a + b);
        if (v0_equation(mid) > 0.0) == (fa > 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// `lim E_n(chi~_{1/n})_1 = 1 - 2 v0`.
pub fn theorem_c_limit() -> f64 {
    1.0 - 2.0 * v0()
}

/// Default per-pair tolerance of the Favard series.
pub const FAVARD_TOL: f64 = 1e-15;

/// Bernoulli numbers `B_2, B_4, ..., B_10`.
const BERNOULLI: [f64; 5] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];

/// `d^r/dx^r (4x + c)^{-s}`.
fn power_derivative(x: f64, c: f64, s: f64, r: usize) -> f64 {
    let mut coef = 1.0;
    for i in 0..r {
        coef *= -4.0 * (s + i as f64);
    }
    coef * (4.0 * x + c).powf(-s - r as f64)
}

/// Euler–Maclaurin tail `sum_{k >= a} G(k)` of the paired terms
/// `G(k) = (4k+1)^{-s} + (-1)^s (4k-1)^{-s}`.
fn paired_tail(a: f64, s: u32) -> f64 {
    let sf = s as f64;
    let sgn = if s.is_multiple_of(2) { 1.0 } else { -1.0 };
    let g = |x: f64| (4.0 * x + 1.0).powf(-sf) + sgn * (4.0 * x - 1.0).powf(-sf);
    let integral = if s == 1 {
        -0.25 * ((4.0 * a + 1.0) / (4.0 * a - 1.0)).ln()
    } else {
        ((4.0 * a + 1.0).powf(1.0 - sf) + sgn * (4.0 * a - 1.0).powf(1.0 - sf)) / (4.0 * (sf - 1.0))
    };
    let mut total = integral + 0.5 * g(a);
    let mut fact = 1.0;
    for (i, b) in BERNOULLI.iter().enumerate() {
        let r = 2 * i + 1;
        fact *= (r * (r + 1)) as f64;
        let deriv = power_derivative(a, 1.0, sf, r) + sgn * power_derivative(a, -1.0, sf, r);
        total -= b / fact * deriv;
    }
    total
}

/// Favard constant `F_j = 2 (2/pi)^{j+1} sum_{k in Z} (4k+1)^{-j-1}`.
///
/// Terms `k` and `-k` are paired; direct summation runs until a pair falls
/// below `tol` (or 64 pairs), and the remainder is added by Euler–Maclaurin.
/// The pairing makes the conditionally convergent `j = 0` series well
/// defined.
pub fn favard_f(j: u32, tol: f64) -> f64 {
    let s = j + 1;
    let sf = s as f64;
    let sgn = if s.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut sum = 1.0;
    let mut k = 1u32;
    loop {
        let kf = k as f64;
        let pair = (4.0 * kf + 1.0).powf(-sf) + sgn * (4.0 * kf - 1.0).powf(-sf);
        sum += pair;
        k += 1;
        if pair.abs() < tol || k > 64 {
            break;
        }
    }
    sum += paired_tail(k as f64, s);
    2.0 * (2.0 / PI).powi(s as i32) * sum
}

/// `K_j = F_j (pi/2)^j`.
pub fn favard_k(j: u32) -> f64 {
    favard_f(j, FAVARD_TOL) * (PI / 2.0).powi(j as i32)
}

/// `sum_{j=0}^{last} F_j`.
pub fn favard_sum(last: u32) -> f64 {
    (0..=last).map(|j| favard_f(j, FAVARD_TOL)).sum()
}
