//! Bounded Levenberg–Marquardt on the unit box with forward-difference Jacobians.
//!
//! Only improving steps are accepted and the search path does not depend on
//! the budget, so a larger budget never returns a higher cost. Identity
//! damping keeps every step in the row space of the Jacobian: directions the
//! data cannot see stay at their initial values.

use nalgebra::{DMatrix, DVector};

use crate::error::{MmmError, Result};

pub trait LeastSquares {
    fn dim(&self) -> usize;

    /// Residuals at a point of the unit box; `false` marks an infeasible point.
    fn residuals(&self, u: &[f64], out: &mut Vec<f64>) -> bool;
}

#[derive(Clone, Debug, PartialEq)]
pub struct LmOptions {
    /// Objective evaluations after the initial one.
    pub budget: usize,
    pub fd_step: f64,
    pub initial_damping: f64,
    /// Stop when the projected gradient falls below this.
    pub gradient_tol: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            budget: 2000,
            fd_step: 1e-6,
            initial_damping: 1e-3,
            gradient_tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LmResult {
    pub u: Vec<f64>,
    /// Sum of squared residuals.
    pub cost: f64,
    pub initial_cost: f64,
    pub evaluations: usize,
    pub iterations: usize,
}

fn sumsq(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

pub fn levenberg_marquardt<P: LeastSquares + ?Sized>(problem: &P, u0: &[f64], opts: &LmOptions) -> Result<LmResult> {
    let n = problem.dim();
    if u0.len() != n {
        return Err(MmmError::Data(format!("start point has {} entries, problem has {n}", u0.len())));
    }
    let mut u: Vec<f64> = u0.iter().map(|x| x.clamp(0.0, 1.0)).collect();
    let mut r = Vec::new();
    if !problem.residuals(&u, &mut r) || !r.iter().all(|x| x.is_finite()) {
        return Err(MmmError::Numerical("objective is not finite at the start point".into()));
    }
    let m = r.len();
    let mut cost = sumsq(&r);
    let initial_cost = cost;
    let mut evals = 0usize;
    let mut iterations = 0usize;
    let mut lambda = opts.initial_damping;
    let mut jac = DMatrix::<f64>::zeros(m, n);
    let mut probe = u.clone();
    let mut rp = Vec::with_capacity(m);

    'outer: while n > 0 && m > 0 {
        // Jacobian by forward differences, stepping inward at the upper bound.
        for j in 0..n {
            if evals >= opts.budget {
                break 'outer;
            }
            let h = if u[j] + opts.fd_step <= 1.0 { opts.fd_step } else { -opts.fd_step };
            probe.copy_from_slice(&u);
            probe[j] += h;
            evals += 1;
            let mut ok = problem.residuals(&probe, &mut rp) && rp.iter().all(|x| x.is_finite());
            let mut step = h;
            if !ok && evals < opts.budget && u[j] - h >= 0.0 && u[j] - h <= 1.0 {
                probe[j] = u[j] - h;
                evals += 1;
                step = -h;
                ok = problem.residuals(&probe, &mut rp) && rp.iter().all(|x| x.is_finite());
            }
            for i in 0..m {
                jac[(i, j)] = if ok { (rp[i] - r[i]) / step } else { 0.0 };
            }
        }
        iterations += 1;
        let rv = DVector::from_column_slice(&r);
        let g = jac.tr_mul(&rv);
        let free: Vec<usize> = (0..n)
            .filter(|&j| !((u[j] <= 0.0 && g[j] > 0.0) || (u[j] >= 1.0 && g[j] < 0.0)))
            .collect();
        let gmax = free.iter().map(|&j| g[j].abs()).fold(0.0, f64::max);
        if free.is_empty() || gmax <= opts.gradient_tol {
            break;
        }
        let jf = jac.select_columns(free.iter());
        let a = jf.tr_mul(&jf);
        let gf = DVector::from_iterator(free.len(), free.iter().map(|&j| g[j]));
        loop {
            if evals >= opts.budget {
                break 'outer;
            }
            let mut damped = a.clone();
            for k in 0..free.len() {
                damped[(k, k)] += lambda;
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 10.0;
                if lambda > 1e12 {
                    break 'outer;
                }
                continue;
            };
            let delta = chol.solve(&(-&gf));
            if delta.iter().any(|d| !d.is_finite()) {
                break 'outer;
            }
            probe.copy_from_slice(&u);
            for (k, &j) in free.iter().enumerate() {
                probe[j] = (u[j] + delta[k]).clamp(0.0, 1.0);
            }
            evals += 1;
            let ok = problem.residuals(&probe, &mut rp) && rp.iter().all(|x| x.is_finite());
            let new_cost = if ok { sumsq(&rp) } else { f64::INFINITY };
            if new_cost < cost {
                let gain = cost - new_cost;
                u.copy_from_slice(&probe);
                std::mem::swap(&mut r, &mut rp);
                cost = new_cost;
                lambda = (lambda / 3.0).max(1e-12);
                if gain <= 1e-15 * (1.0 + cost) {
                    break 'outer;
                }
                break;
            }
            lambda *= 4.0;
            if lambda > 1e12 {
                break 'outer;
            }
        }
    }
    Ok(LmResult {
        u,
        cost,
        initial_cost,
        evaluations: evals,
        iterations,
    })
}

struct Scalar<'a, F: Fn(&[f64]) -> f64> {
    f: &'a F,
    lower: &'a [f64],
    upper: &'a [f64],
    shift: f64,
}

impl<F: Fn(&[f64]) -> f64> Scalar<'_, F> {
    fn physical(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.lower.iter().zip(self.upper))
            .map(|(&u, (&lo, &hi))| lo + u * (hi - lo))
            .collect()
    }
}

impl<F: Fn(&[f64]) -> f64> LeastSquares for Scalar<'_, F> {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn residuals(&self, u: &[f64], out: &mut Vec<f64>) -> bool {
        let v = (self.f)(&self.physical(u));
        out.clear();
        out.push((v - self.shift).max(0.0).sqrt());
        v.is_finite()
    }
}

/// Minimizes a scalar objective within box bounds, starting from `init`.
/// The returned point lies within the bounds and its cost never exceeds the
/// cost at `init`. The search is deterministic; `_seed` is accepted for
/// interface uniformity.
pub fn optimize<F: Fn(&[f64]) -> f64>(
    objective: F,
    init: &[f64],
    lower: &[f64],
    upper: &[f64],
    budget: usize,
    _seed: u64,
) -> Result<(Vec<f64>, f64)> {
    if init.len() != lower.len() || init.len() != upper.len() {
        return Err(MmmError::Data("start point and bounds differ in length".into()));
    }
    if lower.iter().zip(upper).any(|(l, u)| !(l < u)) {
        return Err(MmmError::Data("every lower bound must be below its upper bound".into()));
    }
    let f0 = objective(init);
    if !f0.is_finite() {
        return Err(MmmError::Numerical("objective is not finite at the start point".into()));
    }
    let problem = Scalar {
        f: &objective,
        lower,
        upper,
        shift: f0.min(0.0) - 1.0,
    };
    let u0: Vec<f64> = init
        .iter()
        .zip(lower.iter().zip(upper))
        .map(|(&x, (&lo, &hi))| ((x - lo) / (hi - lo)).clamp(0.0, 1.0))
        .collect();
    let opts = LmOptions {
        budget,
        ..LmOptions::default()
    };
    let res = levenberg_marquardt(&problem, &u0, &opts)?;
    if res.evaluations == 0 || res.u == u0 {
        return Ok((init.to_vec(), f0));
    }
    let x = problem.physical(&res.u);
    let fx = objective(&x);
    if fx < f0 {
        Ok((x, fx))
    } else {
        Ok((init.to_vec(), f0))
    }
}
