//! Brute-force best L1 approximation on a discretized circle. This is the
//! ground truth every closed form and dual bound is checked against.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::BoxPowerKernel;
use crate::simplex::{self, Design};
use crate::trig::{self, GridFunction, TrigPoly};

/// A discretized L1 fitting problem on the circle: nodes with quadrature
/// weights summing to one, target values, and the space `T_{2n-1}`.
#[derive(Debug, Clone)]
pub struct L1FitProblem {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<f64>,
    n: usize,
}

impl L1FitProblem {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, values: Vec<f64>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be >= 1".into()));
        }
        if nodes.len() != weights.len() || nodes.len() != values.len() {
            return Err(Error::InvalidArgument("nodes, weights and values differ in length".into()));
        }
        if nodes.len() < 8 * n {
            return Err(Error::InvalidArgument(format!(
                "{} nodes is below the 8n = {} resolution floor",
                nodes.len(),
                8 * n
            )));
        }
        Ok(Self { nodes, weights, values, n })
    }

    /// Uniform weights `1/m` on the abscissae `i/m` of a grid function.
    pub fn from_grid(f: &GridFunction, n: usize) -> Result<Self> {
        let m = f.m();
        let nodes = (0..m).map(|i| f.abscissa(i)).collect();
        Self::new(nodes, vec![1.0 / m as f64; m], f.values().to_vec(), n)
    }

    /// Uniform weights on the half-cell-offset abscissae `(i + 1/2)/m`.
    pub fn offset_grid<F: Fn(f64) -> f64>(m: usize, n: usize, f: F) -> Result<Self> {
        let nodes: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect();
        let values = nodes.iter().map(|&x| f(x)).collect();
        Self::new(nodes, vec![1.0 / m as f64; m], values, n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Weighted L1 norm of the target (the error of `tau = 0`).
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| w * v.abs()).sum()
    }

    /// Weighted L1 distance from the target to `tau`.
    pub fn error_of(&self, tau: &TrigPoly) -> f64 {
        self.nodes
            .iter()
            .zip(&self.values)
            .zip(&self.weights)
            .map(|((&x, &v), &w)| w * (v - tau.eval(x)).abs())
            .sum()
    }

    fn design(&self) -> Design {
        let p = 2 * self.n - 1;
        let mut data = Vec::with_capacity(self.nodes.len() * p);
        for &x in &self.nodes {
            data.extend(basis_row(self.n, x));
        }
        Design { rows: self.nodes.len(), cols: p, data }
    }

    pub fn pivot_cap(&self) -> usize {
        50 * (self.nodes.len() + 2 * self.n)
    }
}

/// `[1, cos 2pi x, sin 2pi x, ..., cos 2pi(n-1)x, sin 2pi(n-1)x]`.
fn basis_row(n: usize, x: f64) -> Vec<f64> {
    let mut row = Vec::with_capacity(2 * n - 1);
    row.push(1.0);
    for k in 1..n {
        let (s, c) = (TAU * k as f64 * x).sin_cos();
        row.push(c);
        row.push(s);
    }
    row
}

fn poly_from_basis(n: usize, c: &[f64]) -> TrigPoly {
    let mut a = vec![c[0]];
    let mut b = Vec::with_capacity(n - 1);
    for k in 1..n {
        a.push(c[2 * k - 1]);
        b.push(c[2 * k]);
    }
    TrigPoly::new(a, b).expect("basis layout")
}

/// Optimum of a discretized fitting problem.
#[derive(Debug, Clone)]
pub struct L1Fit {
    pub value: f64,
    /// Dual lower bound; below `value` only when the solver had to fall
    /// back to a perturbed optimum.
    pub lower_bound: f64,
    pub tau: TrigPoly,
    /// LP dual: a generalized sign of the residual, orthogonal to the space.
    pub dual_sign: Vec<f64>,
    pub pivots: usize,
}

/// Exact optimum of the discretized problem, via linear programming.
pub fn best_l1_approx(prob: &L1FitProblem) -> Result<L1Fit> {
    let design = prob.design();
    let sol = simplex::solve_l1(&design, &prob.values, &prob.weights, prob.pivot_cap())?;
    let dual_sign = sol.dual.iter().zip(&prob.weights).map(|(y, w)| y / w).collect();
    Ok(L1Fit { value: sol.objective, lower_bound: sol.lower_bound, tau: poly_from_basis(prob.n, &sol.coeffs), dual_sign, pivots: sol.pivots })
}

/// Discretization of `chi~_h^j` for the oracle.
///
/// Nodes sit at the half-cell offsets `(i + 1/2)/m`. For `j = 1` the cells
/// that contain a jump of the periodized box are split at the jump, so every
/// node carries the exact value of its (sub)cell and the weights are the
/// (sub)cell lengths.
pub fn box_power_problem(n: usize, h: f64, j: u32, m: usize) -> Result<L1FitProblem> {
    let kern = BoxPowerKernel::new(h, j)?;
    if j == 0 {
        return Err(Error::InvalidArgument("the Dirac power j = 0 cannot be sampled".into()));
    }
    if j >= 2 {
        return L1FitProblem::offset_grid(m, n, |x| kern.eval(x).expect("j >= 1"));
    }
    let mut jumps: Vec<f64> = [h / 2.0, -h / 2.0].iter().map(|&x| trig::reduce(x)).collect();
    jumps.sort_by(f64::total_cmp);
    jumps.dedup();
    let mut nodes = Vec::with_capacity(m + 2);
    let mut weights = Vec::with_capacity(m + 2);
    let cell = 1.0 / m as f64;
    for i in 0..m {
        let (a, b) = (i as f64 * cell, (i + 1) as f64 * cell);
        let mut cuts = vec![a];
        cuts.extend(jumps.iter().copied().filter(|&t| t > a && t < b));
        cuts.push(b);
        for w in cuts.windows(2) {
            nodes.push(0.5 * (w[0] + w[1]));
            weights.push(w[1] - w[0]);
        }
    }
    let values = nodes.iter().map(|&x| kern.eval(x).expect("j = 1")).collect();
    L1FitProblem::new(nodes, weights, values, n)
}

/// `E_n(chi~_h^j)_1` by the LP oracle on an `m`-cell grid.
///
/// For `j = 0` the kernel is the unit point mass, whose distance to any
/// polynomial in total variation is `1 + ||tau||_1`, so the value is 1.
pub fn en_chi_oracle(n: usize, h: f64, j: u32, m: usize) -> Result<f64> {
    if j == 0 {
        BoxPowerKernel::new(h, 0)?;
        if m < 8 * n {
            return Err(Error::InvalidArgument(format!("grid m = {m} below 8n = {}", 8 * n)));
        }
        return Ok(1.0);
    }
    Ok(en_chi_oracle_fit(n, h, j, m)?.1.value)
}

/// Same as [`en_chi_oracle`], also returning the problem and the optimal
/// polynomial (the best approximant `tau_h^j`).
pub fn en_chi_oracle_fit(n: usize, h: f64, j: u32, m: usize) -> Result<(L1FitProblem, L1Fit)> {
    if m < 8 * n {
        return Err(Error::InvalidArgument(format!("grid m = {m} below 8n = {}", 8 * n)));
    }
    let prob = box_power_problem(n, h, j, m)?;
    let fit = best_l1_approx(&prob)?;
    Ok((prob, fit))
}

/// Fourier residuals of the residual sign at an L1 optimum.
#[derive(Debug, Clone, Serialize)]
pub struct MarkovCertificate {
    /// Set when the residual vanishes identically and the sign is undefined.
    pub degenerate: bool,
    /// `int g cos 2pi k x`, `k = 0..n-1`.
    pub cos_residuals: Vec<f64>,
    /// `int g sin 2pi k x`, `k = 1..n-1`.
    pub sin_residuals: Vec<f64>,
    /// Largest magnitude above, with `g` filled on the zero set.
    pub max_residual: f64,
    /// Largest magnitude with `g = 0` on the zero set.
    pub max_residual_plain: f64,
    /// Number of nodes where the residual is zero.
    pub zero_set: usize,
}

/// Markov sign certificate for `tau` as best L1 approximant of the target.
///
/// Off the zero set of `f - tau` the certificate function is
/// `sign(f - tau)`; on the zero set it may take any value in `[-1, 1]`, and
/// those values are chosen by box-constrained least squares to minimize the
/// low-order Fourier residual. Near-zero residuals certify optimality.
pub fn markov_certificate(prob: &L1FitProblem, tau: &TrigPoly) -> MarkovCertificate {
    let n = prob.n;
    let p = 2 * n - 1;
    let scale = prob.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let zero_tol = 1e-9 * scale;
    let resid: Vec<f64> = prob.nodes.iter().zip(&prob.values).map(|(&x, &v)| v - tau.eval(x)).collect();
    let zero: Vec<usize> = (0..resid.len()).filter(|&i| resid[i].abs() <= zero_tol).collect();
    if zero.len() == resid.len() {
        return MarkovCertificate {
            degenerate: true,
            cos_residuals: vec![],
            sin_residuals: vec![],
            max_residual: 0.0,
            max_residual_plain: 0.0,
            zero_set: zero.len(),
        };
    }
    let rows: Vec<Vec<f64>> = prob.nodes.iter().map(|&x| basis_row(n, x)).collect();
    let mut g: Vec<f64> =
        resid.iter().map(|&r| if r.abs() <= zero_tol { 0.0 } else { r.signum() }).collect();
    let accumulate = |g: &[f64]| -> Vec<f64> {
        let mut acc = vec![0.0; p];
        for (i, row) in rows.iter().enumerate() {
            let wg = prob.weights[i] * g[i];
            if wg != 0.0 {
                for (a, r) in acc.iter_mut().zip(row) {
                    *a += wg * r;
                }
            }
        }
        acc
    };
    let plain = accumulate(&g);
    let mut acc = plain.clone();
    for _sweep in 0..400 {
        let mut moved = 0.0f64;
        for &i in &zero {
            let w = prob.weights[i];
            let u = &rows[i];
            let uu: f64 = u.iter().map(|v| w * w * v * v).sum();
            if uu == 0.0 {
                continue;
            }
            let ur: f64 = u.iter().zip(&acc).map(|(v, a)| w * v * a).sum();
            let new = (g[i] - ur / uu).clamp(-1.0, 1.0);
            let delta = new - g[i];
            if delta != 0.0 {
                for (a, v) in acc.iter_mut().zip(u) {
                    *a += delta * w * v;
                }
                g[i] = new;
                moved = moved.max(delta.abs());
            }
        }
        if moved < 1e-14 {
            break;
        }
    }
    let split = |v: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let cos = std::iter::once(v[0]).chain((1..n).map(|k| v[2 * k - 1])).collect();
        let sin = (1..n).map(|k| v[2 * k]).collect();
        (cos, sin)
    };
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let (cos_residuals, sin_residuals) = split(&acc);
    MarkovCertificate {
        degenerate: false,
        cos_residuals,
        sin_residuals,
        max_residual: max_abs(&acc),
        max_residual_plain: max_abs(&plain),
        zero_set: zero.len(),
    }
}

/// Certificate for a uniform grid function (abscissae `i/m`).
pub fn markov_certificate_grid(f: &GridFunction, tau: &TrigPoly, n: usize) -> Result<MarkovCertificate> {
    let prob = L1FitProblem::from_grid(f, n)?;
    Ok(markov_certificate(&prob, tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn member_of_space_is_reproduced() {
        let p = TrigPoly::new(vec![0.3, -1.0, 0.5], vec![0.25, 2.0]).unwrap();
        let prob = L1FitProblem::from_grid(&p.sample(64), 3).unwrap();
        let fit = best_l1_approx(&prob).unwrap();
        assert!(fit.value < 1e-12);
        for (x, y) in fit.tau.cos_coeffs().iter().zip(p.cos_coeffs()) {
            assert!((x - y).abs() < 1e-10);
        }
        for (x, y) in fit.tau.sin_coeffs().iter().zip(p.sin_coeffs()) {
            assert!((x - y).abs() < 1e-10);
        }
        let cert = markov_certificate(&prob, &fit.tau);
        assert!(cert.degenerate);
    }

    #[test]
    fn cosine_at_the_cutoff_frequency() {
        let n = 4;
        let f = GridFunction::from_fn(8 * n * 16, |x| (TAU * n as f64 * x).cos());
        let prob = L1FitProblem::from_grid(&f, n).unwrap();
        let fit = best_l1_approx(&prob).unwrap();
        assert!((fit.value - 2.0 / PI).abs() < 2e-3, "{}", fit.value);
        assert!(fit.value <= prob.l1_norm() + 1e-12);
        let zero = TrigPoly::zero(n);
        let cert = markov_certificate_grid(&f, &zero, n).unwrap();
        assert!(cert.max_residual <= 5e-3);
        let cert_n1 = markov_certificate_grid(&f, &TrigPoly::zero(n + 1), n + 1).unwrap();
        assert!((cert_n1.cos_residuals[n] - 2.0 / PI).abs() < 5e-3);
    }

    #[test]
    fn rejects_coarse_grids() {
        assert!(en_chi_oracle(8, 0.2, 1, 32).is_err());
        let f = GridFunction::from_fn(16, |x| x);
        assert!(L1FitProblem::from_grid(&f, 4).is_err());
    }

    #[test]
    fn split_cells_keep_unit_mass() {
        for &h in &[0.05, 0.3, 3.0 / 14.0, 0.9, 1.37] {
            let prob = box_power_problem(7, h, 1, 512).unwrap();
            let wsum: f64 = prob.weights().iter().sum();
            assert!((wsum - 1.0).abs() < 1e-12);
            assert!((prob.l1_norm() - 1.0).abs() < 1e-12, "h={h}: {}", prob.l1_norm());
        }
    }

    #[test]
    fn flat_region_and_m_n_point() {
        let v = en_chi_oracle(2, 0.05, 1, 1024).unwrap();
        assert!((v - 1.0).abs() < 2e-3, "{v}");
        let v = en_chi_oracle(8, 3.0 / 16.0, 1, 4096).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 2e-3, "{v}");
    }

    #[test]
    fn degenerate_widths_terminate() {
        // narrow boxes and near-full boxes have massively tied residuals
        for &(n, h, want) in &[(5usize, 1.0 / 12.0, 1.0), (8, 1.0 / 32.0, 1.0), (4, 11.0 / 12.0, 1.0 / 11.0)] {
            let (_, fit) = en_chi_oracle_fit(n, h, 1, 4096).unwrap();
            assert!((fit.value - want).abs() < 2e-3, "n={n} h={h}: {}", fit.value);
            assert!(fit.lower_bound <= fit.value + 1e-12);
        }
        assert_eq!(en_chi_oracle(4, 0.125, 0, 4096).unwrap(), 1.0);
    }

    #[test]
    fn optimum_reproduces_itself() {
        let (prob, fit) = en_chi_oracle_fit(3, 0.3, 1, 256).unwrap();
        let again = L1FitProblem::new(
            prob.nodes().to_vec(),
            prob.weights().to_vec(),
            prob.nodes().iter().map(|&x| fit.tau.eval(x)).collect(),
            3,
        )
        .unwrap();
        assert!(best_l1_approx(&again).unwrap().value <= 1e-12);
    }
}
