//! Weighted discrete L1 fitting by a bounded-variable dual simplex.
//!
//! Minimizes `sum_i w_i |f_i - a_i . c|` over `c in R^p`. The LP dual is
//!
//! ```text
//! maximize sum_i f_i y_i   subject to   sum_i y_i a_i = 0,   |y_i| <= w_i,
//! ```
//!
//! whose basis is a `p x p` interpolation matrix: the basic rows are the
//! points where the fit interpolates `f`. Every iterate keeps the nonbasic
//! `y_i` at the bound matching the sign of the residual (dual feasible for
//! the fitting problem); a basic `y_s` outside `[-w_s, w_s]` leaves, and the
//! entering row is chosen by a ratio test along the edge that releases the
//! interpolation at `s`. In the default mode the ratio test takes the long
//! step (passing breakpoints while the directional derivative stays
//! negative, as in Barrodale–Roberts); after a run of degenerate pivots the
//! solver switches to Bland's smallest-index rule with short steps until
//! the objective moves again.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Optimal fit and dual certificate.
#[derive(Debug, Clone)]
pub struct L1Solution {
    pub objective: f64,
    /// Dual objective `sum_i y_i f_i`; equals `objective` up to rounding
    /// unless the perturbed fallback was used.
    pub lower_bound: f64,
    pub coeffs: Vec<f64>,
    /// Dual variables `y_i` with `|y_i| <= w_i` and `sum y_i a_i = 0`.
    pub dual: Vec<f64>,
    pub basis: Vec<usize>,
    pub pivots: usize,
}

/// Dense row-major design matrix.
#[derive(Debug, Clone)]
pub struct Design {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Design {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn dot(&self, i: usize, v: &[f64]) -> f64 {
        self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()
    }
}

const DEGENERATE_STREAK: usize = 20;

struct Basis {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    lu_t: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

fn factor(design: &Design, basis: &[usize]) -> Result<Basis> {
    let p = design.cols;
    let mut data = Vec::with_capacity(p * p);
    for &i in basis {
        data.extend_from_slice(design.row(i));
    }
    let m = DMatrix::from_row_slice(p, p, &data);
    let lu = m.clone().lu();
    if !lu.is_invertible() {
        return Err(Error::SingularBasis);
    }
    let lu_t = m.transpose().lu();
    Ok(Basis { lu, lu_t })
}

fn solve(lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>, rhs: Vec<f64>) -> Result<Vec<f64>> {
    let v = DVector::from_vec(rhs);
    lu.solve(&v).map(|x| x.iter().copied().collect()).ok_or(Error::SingularBasis)
}

fn initial_basis(design: &Design) -> Result<Vec<usize>> {
    let (m, p) = (design.rows, design.cols);
    for shift in 0..m.min(64) {
        let basis: Vec<usize> =
            (0..p).map(|k| (((k as f64 + 0.5) * m as f64 / p as f64) as usize + shift) % m).collect();
        let mut sorted = basis.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() == p && factor(design, &basis).is_ok() {
            return Ok(basis);
        }
    }
    Err(Error::SingularBasis)
}

/// Solves the weighted L1 fit. `max_pivots` caps the number of basis
/// changes; reaching it is an error.
///
/// Heavily degenerate data (many residuals vanishing together, as for
/// narrow boxes) makes floating-point pivoting stall, so the solve first
/// runs on data with a small deterministic perturbation and then restarts
/// from that basis and sign pattern on the original data, which normally
/// needs few pivots. Should the restart stall too, the perturbed optimum is
/// returned evaluated on the original data: its dual stays feasible, so
/// `lower_bound <= optimum <= objective` still brackets the true value.
pub fn solve_l1(design: &Design, f: &[f64], w: &[f64], max_pivots: usize) -> Result<L1Solution> {
    let (m, p) = (design.rows, design.cols);
    if f.len() != m || w.len() != m || m < p || p == 0 {
        return Err(Error::InvalidArgument(format!("bad L1 problem shape: m={m}, p={p}")));
    }
    if w.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidArgument("L1 weights must be positive".into()));
    }
    let scale = f.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let mut used = 0;
    for eps in PERTURBATIONS {
        let perturbed: Vec<f64> = f.iter().enumerate().map(|(i, v)| v + eps * scale * jitter(i)).collect();
        let mut state = State::new(design, initial_basis(design)?);
        let first = match run(design, &perturbed, w, &mut state, max_pivots - used) {
            Ok(sol) => sol,
            Err(Error::IterationCap { .. }) if used < max_pivots => {
                used = max_pivots.min(used + state.pivots);
                continue;
            }
            Err(e) => return Err(e),
        };
        used += first.pivots;
        let snapshot = state.basis.clone();
        return match run(design, f, w, &mut state, max_pivots.saturating_sub(used)) {
            Ok(mut sol) => {
                sol.pivots += used;
                Ok(sol)
            }
            Err(Error::IterationCap { .. } | Error::SingularBasis) => {
                let mut sol = evaluate(design, f, w, &snapshot, &first.dual)?;
                sol.pivots = used;
                Ok(sol)
            }
            Err(e) => Err(e),
        };
    }
    Err(Error::IterationCap { cap: max_pivots })
}

/// Relative perturbation sizes tried in turn.
const PERTURBATIONS: [f64; 3] = [1e-8, 1e-6, 1e-4];

/// Pivots without objective progress before a run is declared stalled.
const STALL_WINDOW: usize = 4000;

/// Fit interpolating `f` on `basis`, with the given dual.
fn evaluate(design: &Design, f: &[f64], w: &[f64], basis: &[usize], dual: &[f64]) -> Result<L1Solution> {
    let fact = factor(design, basis)?;
    let coeffs = solve(&fact.lu, basis.iter().map(|&i| f[i]).collect())?;
    let objective = (0..design.rows).map(|i| w[i] * (f[i] - design.dot(i, &coeffs)).abs()).sum();
    let lower_bound = dual.iter().zip(f).map(|(y, v)| y * v).sum();
    Ok(L1Solution { objective, lower_bound, coeffs, dual: dual.to_vec(), basis: basis.to_vec(), pivots: 0 })
}

/// Deterministic value in `[-1, 1)`.
fn jitter(i: usize) -> f64 {
    let mut z = (i as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

struct State {
    basis: Vec<usize>,
    in_basis: Vec<usize>,
    status: Vec<f64>,
    pivots: usize,
}

impl State {
    fn new(design: &Design, basis: Vec<usize>) -> Self {
        let mut in_basis = vec![usize::MAX; design.rows];
        for (pos, &i) in basis.iter().enumerate() {
            in_basis[i] = pos;
        }
        State { basis, in_basis, status: vec![1.0; design.rows], pivots: 0 }
    }
}

/// Pivots from `state` to optimality; `state` keeps the final basis, sign
/// pattern and pivot count. Stalling counts as reaching the cap.
fn run(design: &Design, f: &[f64], w: &[f64], state: &mut State, max_pivots: usize) -> Result<L1Solution> {
    let (m, p) = (design.rows, design.cols);
    let scale = f.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let zero_tol = 1e-11 * scale;
    let State { basis, in_basis, status, pivots } = state;
    *pivots = 0;
    let mut degenerate = 0;
    let mut best = f64::INFINITY;
    let mut last_progress = 0;
    let mut residual = vec![0.0; m];

    loop {
        let fact = factor(design, basis)?;
        let coeffs = solve(&fact.lu, basis.iter().map(|&i| f[i]).collect())?;
        for i in 0..m {
            residual[i] = if in_basis[i] != usize::MAX { 0.0 } else { f[i] - design.dot(i, &coeffs) };
            if in_basis[i] == usize::MAX && residual[i].abs() > zero_tol {
                status[i] = residual[i].signum();
            }
        }
        // basic duals from sum_i y_i a_i = 0
        let mut v = vec![0.0; p];
        for i in 0..m {
            if in_basis[i] == usize::MAX {
                let y = w[i] * status[i];
                for (vk, ak) in v.iter_mut().zip(design.row(i)) {
                    *vk += y * ak;
                }
            }
        }
        let y_basic = solve(&fact.lu_t, v.iter().map(|x| -x).collect())?;

        let bland = degenerate >= DEGENERATE_STREAK;
        let mut leave: Option<usize> = None;
        let mut worst = 0.0;
        for (pos, &i) in basis.iter().enumerate() {
            let excess = (y_basic[pos].abs() - w[i]) / w[i];
            if excess > 1e-10 {
                let pick = if bland {
                    leave.is_none_or(|l| i < basis[l])
                } else {
                    excess > worst
                };
                if pick {
                    leave = Some(pos);
                    worst = excess;
                }
            }
        }
        let Some(pos) = leave else {
            let objective = (0..m).map(|i| w[i] * residual[i].abs()).sum();
            let mut dual = vec![0.0; m];
            for i in 0..m {
                dual[i] = if in_basis[i] == usize::MAX { w[i] * status[i] } else { y_basic[in_basis[i]] };
            }
            let lower_bound = dual.iter().zip(f).map(|(y, v)| y * v).sum();
            return Ok(L1Solution { objective, lower_bound, coeffs, dual, basis: basis.clone(), pivots: *pivots });
        };
        let objective: f64 = (0..m).map(|i| w[i] * residual[i].abs()).sum();
        if objective < best - 1e-13 * (1.0 + best.abs()) {
            best = objective;
            last_progress = *pivots;
        }
        if *pivots >= max_pivots || *pivots - last_progress > STALL_WINDOW {
            return Err(Error::IterationCap { cap: max_pivots });
        }

        let s = basis[pos];
        let ys = y_basic[pos];
        let sigma = if ys > 0.0 { -1.0 } else { 1.0 };
        let mut e = vec![0.0; p];
        e[pos] = 1.0;
        let d = solve(&fact.lu, e)?;

        let mut cands: Vec<(f64, usize, f64)> = Vec::new();
        for i in 0..m {
            if in_basis[i] != usize::MAX {
                continue;
            }
            let alpha = sigma * design.dot(i, &d);
            if alpha.abs() < 1e-13 || status[i] * alpha <= 0.0 {
                continue;
            }
            let r = if residual[i].abs() <= zero_tol { 0.0 } else { residual[i].abs() };
            cands.push((r / alpha.abs(), i, alpha.abs()));
        }
        if cands.is_empty() {
            return Err(Error::Inconsistency("L1 dual ratio test found no entering row".into()));
        }
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut chosen = 0;
        if !bland {
            let mut slope = w[s] - ys.abs();
            for (k, &(_, i, a)) in cands.iter().enumerate() {
                slope += 2.0 * w[i] * a;
                chosen = k;
                if slope >= 0.0 {
                    break;
                }
            }
        }
        for &(_, i, _) in &cands[..chosen] {
            status[i] = -status[i];
        }
        let (theta, enter, _) = cands[chosen];
        if theta * cands[chosen].2 <= zero_tol {
            degenerate += 1;
        } else {
            degenerate = 0;
        }
        status[s] = ys.signum();
        in_basis[s] = usize::MAX;
        in_basis[enter] = pos;
        basis[pos] = enter;
        *pivots += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Design {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for k in 0..cols {
                data.push(f(i, k));
            }
        }
        Design { rows, cols, data }
    }

    /// Brute force: the optimum interpolates at `p` of the points.
    fn brute(des: &Design, f: &[f64], w: &[f64]) -> f64 {
        let (m, p) = (des.rows, des.cols);
        let mut best = f64::INFINITY;
        let mut idx: Vec<usize> = (0..p).collect();
        loop {
            let mut data = Vec::new();
            for &i in &idx {
                data.extend_from_slice(des.row(i));
            }
            let mat = DMatrix::from_row_slice(p, p, &data);
            if let Some(c) = mat.lu().solve(&DVector::from_iterator(p, idx.iter().map(|&i| f[i]))) {
                let obj: f64 = (0..m).map(|i| w[i] * (f[i] - des.dot(i, c.as_slice())).abs()).sum();
                best = best.min(obj);
            }
            // next combination
            let mut k = p;
            while k > 0 {
                k -= 1;
                if idx[k] < m - p + k {
                    idx[k] += 1;
                    for l in k + 1..p {
                        idx[l] = idx[l - 1] + 1;
                    }
                    break;
                }
                if k == 0 {
                    return best;
                }
            }
        }
    }

    #[test]
    fn median_for_constant_fit() {
        let f = [3.0, -1.0, 7.0, 2.0, 10.0];
        let des = design(5, 1, |_, _| 1.0);
        let sol = solve_l1(&des, &f, &[1.0; 5], 100).unwrap();
        assert!((sol.coeffs[0] - 3.0).abs() < 1e-12);
        assert!((sol.objective - (0.0 + 4.0 + 4.0 + 1.0 + 7.0)).abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force_on_small_problems() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..25 {
            let m = 9 + trial % 5;
            let p = 1 + trial % 3;
            let des = design(m, p, |i, k| ((i as f64 * 0.37 + 0.1) * (k as f64 + 1.0)).cos());
            let f: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..1.0)).collect();
            let sol = solve_l1(&des, &f, &w, 10_000).unwrap();
            let want = brute(&des, &f, &w);
            assert!((sol.objective - want).abs() < 1e-10, "trial {trial}: {} vs {want}", sol.objective);
            // dual certificate: feasible and tight
            let dual_obj: f64 = sol.dual.iter().zip(&f).map(|(y, v)| y * v).sum();
            assert!((dual_obj - sol.objective).abs() < 1e-10);
            assert!((sol.lower_bound - dual_obj).abs() < 1e-12);
            for (y, wi) in sol.dual.iter().zip(&w) {
                assert!(y.abs() <= wi * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn exact_fit_has_zero_objective() {
        let des = design(40, 3, |i, k| (i as f64 * 0.1).powi(k as i32));
        let f: Vec<f64> = (0..40).map(|i| 1.0 - 2.0 * (i as f64 * 0.1) + 0.5 * (i as f64 * 0.1).powi(2)).collect();
        let sol = solve_l1(&des, &f, &[0.025; 40], 1000).unwrap();
        assert!(sol.objective < 1e-12);
        assert!((sol.coeffs[1] + 2.0).abs() < 1e-10);
    }

    #[test]
    fn evaluate_brackets_the_optimum() {
        // a deliberately non-optimal basis still yields a valid bracket
        let des = design(30, 2, |i, k| ((i as f64 * 0.21) * k as f64).cos());
        let f: Vec<f64> = (0..30).map(|i| (i as f64 * 0.7).sin()).collect();
        let w = vec![1.0; 30];
        let opt = solve_l1(&des, &f, &w, 10_000).unwrap();
        let bad = evaluate(&des, &f, &w, &[0, 1], &opt.dual).unwrap();
        assert!(bad.objective >= opt.objective - 1e-12);
        assert!(bad.lower_bound <= opt.objective + 1e-12);
    }

    #[test]
    fn jitter_is_bounded() {
        for i in 0..1000 {
            let j = jitter(i);
            assert!((-1.0..1.0).contains(&j));
        }
    }

    #[test]
    fn shape_errors() {
        let des = design(3, 2, |_, _| 1.0);
        assert!(solve_l1(&des, &[1.0; 2], &[1.0; 3], 10).is_err());
    }
}
