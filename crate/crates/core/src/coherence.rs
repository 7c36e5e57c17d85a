//! The l1-norm of coherence and coherence profiles.
//!
//! All coherences are taken in the computational basis of the stored index
//! order.

use serde::Serialize;

use crate::qmatrix::{
    partial_trace, DenseMatrix, DensityMatrix, StateVector, HERMITICITY_TOL, TRACE_TOL,
};
use crate::{Error, Result};

/// Profile entries below this are reported as exactly zero.
pub const ZERO_THRESHOLD: f64 = 1e-13;

/// Sum of `|a_ij|` over off-diagonal entries, without any validation.
pub fn off_diagonal_l1(m: &DenseMatrix) -> f64 {
    let d = m.dim();
    let mut s = 0.0;
    for (idx, z) in m.entries().iter().enumerate() {
        if idx / d != idx % d {
            s += z.norm();
        }
    }
    s
}

/// l1-norm of coherence `sum_{i != j} |rho_ij|`.
///
/// Only the O(d²) Hermiticity and trace checks are repeated here; positivity
/// is the caller's responsibility (see [`crate::qmatrix::validate_density`]).
pub fn c_l1(rho: &DensityMatrix) -> Result<f64> {
    let m = rho.matrix();
    let herm = m.hermiticity_defect();
    let tr = m.trace();
    if herm > HERMITICITY_TOL || (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::input(format!(
            "not a density matrix (hermiticity defect {herm:.3e}, trace {tr})"
        )));
    }
    Ok(off_diagonal_l1(m))
}

/// l1-norm of coherence of `|psi><psi|`, computed as `(sum_i |psi_i|)^2 - 1`.
pub fn c_l1_pure(psi: &StateVector) -> f64 {
    let s: f64 = psi.amplitudes().iter().map(|z| z.norm()).sum();
    (s * s - 1.0).max(0.0)
}

fn thresholded(v: f64) -> f64 {
    if v < ZERO_THRESHOLD {
        0.0
    } else {
        v
    }
}

/// Marginal and tail coherences of a state under a party ordering.
///
/// With parties relabelled `A_1..A_n` by `ordering`, `marginals[i]` is the
/// coherence of `A_{i+1}` alone and `tails[i]` the coherence of the joint
/// marginal of `A_{i+2}..A_n` (both zero-based). `tails` therefore has
/// `n - 1` entries and its last entry equals the last marginal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceProfile {
    pub ordering: Vec<usize>,
    pub marginals: Vec<f64>,
    pub tails: Vec<f64>,
    pub full: f64,
}

impl CoherenceProfile {
    /// Builds a profile from raw values (for synthetic profiles and tests).
    pub fn from_values(marginals: Vec<f64>, tails: Vec<f64>, full: f64) -> Result<Self> {
        let n = marginals.len();
        if n < 2 || tails.len() != n - 1 {
            return Err(Error::input(format!(
                "profile needs n >= 2 marginals and n - 1 tails, got {} and {}",
                n,
                tails.len()
            )));
        }
        let all_ok = marginals
            .iter()
            .chain(&tails)
            .chain(std::iter::once(&full))
            .all(|v| v.is_finite() && *v >= 0.0);
        if !all_ok {
            return Err(Error::input(
                "profile entries must be finite and nonnegative",
            ));
        }
        if (tails[n - 2] - marginals[n - 1]).abs() > 1e-12 {
            return Err(Error::input(
                "last tail coherence must equal the last marginal coherence",
            ));
        }
        Ok(Self {
            ordering: (0..n).collect(),
            marginals,
            tails,
            full,
        })
    }

    pub fn n(&self) -> usize {
        self.marginals.len()
    }
}

/// Coherence profile of `rho` with parties taken in `ordering` (a
/// permutation of `0..n`).
pub fn coherence_profile(rho: &DensityMatrix, ordering: &[usize]) -> Result<CoherenceProfile> {
    let n = rho.n_qubits();
    if n < 2 {
        return Err(Error::input(
            "a coherence profile needs at least two qubits",
        ));
    }
    let mut seen = vec![false; n];
    if ordering.len() != n
        || ordering
            .iter()
            .any(|&q| q >= n || std::mem::replace(&mut seen[q], true))
    {
        return Err(Error::input(format!(
            "{ordering:?} is not an ordering of {n} parties"
        )));
    }
    let full = thresholded(c_l1(rho)?);
    // C_l1 is invariant under qubit relabelling, so marginals can be taken in
    // ascending qubit order without permuting the state.
    let marginals = ordering
        .iter()
        .map(|&q| {
            Ok(thresholded(off_diagonal_l1(
                partial_trace(rho, &[q])?.matrix(),
            )))
        })
        .collect::<Result<Vec<_>>>()?;
    let tails = (1..n)
        .map(|i| {
            let tail = partial_trace(rho, &ordering[i..])?;
            Ok(thresholded(off_diagonal_l1(tail.matrix())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherenceProfile {
        ordering: ordering.to_vec(),
        marginals,
        tails,
        full,
    })
}

/// `(C(rho_q), C(rho_rest))` for the split of qubit `q` against all others.
pub fn qubit_vs_rest(rho: &DensityMatrix, q: usize) -> Result<(f64, f64)> {
    let n = rho.n_qubits();
    if q >= n || n < 2 {
        return Err(Error::input(format!(
            "cannot split qubit {q} from {n} qubits"
        )));
    }
    let rest: Vec<usize> = (0..n).filter(|&p| p != q).collect();
    let a = off_diagonal_l1(partial_trace(rho, &[q])?.matrix());
    let b = off_diagonal_l1(partial_trace(rho, &rest)?.matrix());
    Ok((a, b))
}
