//! Sufficient stability condition for the switched cognition dynamics.
//!
//! Every realized weight matrix is bounded entrywise in magnitude by
//! `W_max`; when `rho(W_max) < 1` the state decays geometrically for zero input.
//! The same bound covers the sequential (fresh-value) update order because the
//! split of `I - W_max` into earlier and later stages is a regular splitting.

use nalgebra::{DMatrix, Schur};

use super::params::ParameterSet;
use super::spec::{Structure, VarKind};
use crate::error::{MmmError, Result};

/// Entry `(to, from)` holds the largest weight magnitude of that linkage,
/// scaled by the trait gain when the target is an emotion; the diagonal holds w_ii.
pub fn max_weight_matrix(structure: &Structure, params: &ParameterSet) -> DMatrix<f64> {
    let dims = structure.dims();
    let n = dims.state_len();
    let mut w = DMatrix::zeros(n, n);
    for (l, link) in structure.links().iter().enumerate() {
        let gain = match link.to.kind {
            VarKind::Emotion => params.trait_gains[link.to.index].abs(),
            _ => 1.0,
        };
        let (i, j) = (dims.flat(link.to), dims.flat(link.from));
        w[(i, j)] += params.linkages[l].max_abs() * gain;
    }
    for kind in [VarKind::Belief, VarKind::Goal, VarKind::Emotion, VarKind::Bias, VarKind::PerceivedKnowledge] {
        for index in 0..dims.len(kind) {
            let v = super::spec::VarRef { kind, index };
            let f = dims.flat(v);
            w[(f, f)] = structure.self_weight(v).abs();
        }
    }
    w
}

pub fn spectral_radius(w: &DMatrix<f64>) -> f64 {
    if w.is_empty() {
        return 0.0;
    }
    if w.iter().any(|x| !x.is_finite()) {
        return f64::INFINITY;
    }
    match Schur::try_new(w.clone(), f64::EPSILON, 10_000) {
        Some(schur) => schur
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max),
        None => f64::NAN,
    }
}

/// For entrywise nonnegative `w`: `rho(w) < 1` exactly when `I - w` is a
/// nonsingular M-matrix, i.e. Gaussian elimination without pivoting on
/// `I - w` yields only positive pivots.
pub fn is_contractive(w: &DMatrix<f64>) -> bool {
    let n = w.nrows();
    let mut a = DMatrix::<f64>::identity(n, n) - w;
    for k in 0..n {
        let pivot = a[(k, k)];
        if !(pivot > 1e-12) {
            return false;
        }
        for i in k + 1..n {
            let f = a[(i, k)] / pivot;
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                a[(i, j)] -= f * a[(k, j)];
            }
        }
    }
    true
}

pub fn is_stable(structure: &Structure, params: &ParameterSet) -> bool {
    is_contractive(&max_weight_matrix(structure, params))
}

pub fn check_stability(structure: &Structure, params: &ParameterSet) -> Result<()> {
    let w = max_weight_matrix(structure, params);
    if is_contractive(&w) {
        Ok(())
    } else {
        Err(MmmError::Unstable {
            radius: spectral_radius(&w),
        })
    }
}
