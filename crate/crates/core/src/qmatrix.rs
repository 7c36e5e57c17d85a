//! Dense complex matrix algebra for multiqubit states.
//!
//! Matrices are square and stored row-major. Basis indices follow the
//! big-endian convention: qubit 0 is the most significant bit, so
//! `kron(q0, kron(q1, q2))` lists basis states in the same order as the
//! qubit labels.

use num_complex::Complex64;

use crate::{Error, Result};

/// Largest dimension [`kron`] will produce unless a different limit is passed.
pub const DEFAULT_MAX_DIM: usize = 1 << 12;

/// Entrywise tolerance for `|a_ij - conj(a_ji)|` in a density matrix.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Tolerance for `|tr(rho) - 1|`.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted as "nonnegative".
pub const EIGENVALUE_FLOOR: f64 = -1e-9;
/// Tolerance on `sum |psi_i|^2 - 1` for pure states.
pub const NORM_TOL: f64 = 1e-12;

/// Hermiticity tolerance required before the eigensolver runs.
pub const EIGEN_HERMITICITY_TOL: f64 = 1e-8;
/// Off-diagonal Frobenius norm at which Jacobi sweeps stop (relative to
/// `max(1, ||A||_F)`).
pub const JACOBI_TOL: f64 = 1e-12;
/// Sweep cap for the Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries. Rejects wrong lengths and
    /// non-finite entries.
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("matrix dimension must be positive"));
        }
        if data.len() != dim * dim {
            return Err(Error::input(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::input("matrix entries must be finite"));
        }
        Ok(Self { dim, data })
    }

    /// Builds a real matrix from nested rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::input("rows must form a square matrix"));
            }
            data.extend(row.iter().map(|&v| Complex64::new(v, 0.0)));
        }
        Self::from_row_major(dim, data)
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::input(format!(
                "cannot multiply {0}x{0} by {1}x{1}",
                self.dim, other.dim
            )));
        }
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        Ok(out)
    }

    /// Largest entrywise `|a_ij - conj(a_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise `|a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Kronecker product with the default dimension cap.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    kron_with_limit(a, b, DEFAULT_MAX_DIM)
}

/// Kronecker product `a ⊗ b`; fails if the result would exceed `max_dim`.
pub fn kron_with_limit(a: &DenseMatrix, b: &DenseMatrix, max_dim: usize) -> Result<DenseMatrix> {
    let dim = a
        .dim
        .checked_mul(b.dim)
        .filter(|&d| d <= max_dim)
        .ok_or(Error::Size {
            dim: a.dim.saturating_mul(b.dim),
            max: max_dim,
        })?;
    let mut out = DenseMatrix::zeros(dim);
    let db = b.dim;
    for i in 0..a.dim {
        for j in 0..a.dim {
            let aij = a.get(i, j);
            for k in 0..db {
                for l in 0..db {
                    out.data[(i * db + k) * dim + (j * db + l)] = aij * b.get(k, l);
                }
            }
        }
    }
    Ok(out)
}

pub fn dagger(a: &DenseMatrix) -> DenseMatrix {
    DenseMatrix::from_fn(a.dim, |i, j| a.get(j, i).conj())
}

/// A normalised pure state of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalised to within [`NORM_TOL`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::input("amplitudes must be finite"));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::input(format!(
                "state is not normalised: sum |psi_i|^2 = {norm_sqr}"
            )));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Rescales arbitrary (nonzero) amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::input("cannot normalise a zero or non-finite vector"));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(amplitudes)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let dim = self.amplitudes.len() * other.amplitudes.len();
        if dim > DEFAULT_MAX_DIM {
            return Err(Error::Size {
                dim,
                max: DEFAULT_MAX_DIM,
            });
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes,
        })
    }
}

/// A density matrix on `n_qubits` qubits.
///
/// Construction only checks the shape; call [`validate_density`] (or use
/// [`DensityMatrix::checked`]) to enforce Hermiticity, unit trace and
/// positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: DenseMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        let n_qubits = qubits_for_dim(matrix.dim())?;
        Ok(Self { n_qubits, matrix })
    }

    /// Like [`DensityMatrix::new`] but also requires the validation report to pass.
    pub fn checked(matrix: DenseMatrix) -> Result<Self> {
        let rho = Self::new(matrix)?;
        let report = validate_density(&rho);
        if !report.ok {
            return Err(Error::input(format!(
                "not a valid density matrix: {report:?}"
            )));
        }
        Ok(rho)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    /// `self ⊗ other`, appending the qubits of `other` after those of `self`.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(kron(&self.matrix, &other.matrix)?)
    }
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::input(format!(
            "dimension {dim} is not 2^n for a positive number of qubits"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::input(format!(
            "permutation has {} entries but the state has {n} qubits",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::input(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Relabels qubits so that qubit `i` of the result is qubit `perm[i]` of the
/// input. Swapping the two halves of `σ ⊗ τ` with `perm = [1, 0]` yields
/// `τ ⊗ σ`.
pub fn permute_qubits(rho: &DensityMatrix, perm: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits;
    check_permutation(perm, n)?;
    let dim = rho.dim();
    // old index of each new basis index
    let old_index: Vec<usize> = (0..dim)
        .map(|new| {
            let mut old = 0;
            for (i, &p) in perm.iter().enumerate() {
                let bit = (new >> (n - 1 - i)) & 1;
                old |= bit << (n - 1 - p);
            }
            old
        })
        .collect();
    let m = &rho.matrix;
    let out = DenseMatrix::from_fn(dim, |i, j| m.get(old_index[i], old_index[j]));
    Ok(DensityMatrix {
        n_qubits: n,
        matrix: out,
    })
}

/// Reduced state on the qubits in `keep`, listed in ascending order in the
/// result regardless of the order given.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits;
    if keep.is_empty() {
        return Err(Error::input("partial trace must keep at least one qubit"));
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::input(format!("duplicate qubit in {keep:?}")));
    }
    if let Some(&bad) = kept.iter().find(|&&q| q >= n) {
        return Err(Error::input(format!(
            "qubit {bad} out of range for {n} qubits"
        )));
    }
    if kept.len() == n {
        return Ok(rho.clone());
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();

    // Scatter the bits of a compact index onto the listed qubit positions.
    let scatter = |compact: usize, qubits: &[usize]| -> usize {
        let k = qubits.len();
        qubits.iter().enumerate().fold(0, |acc, (pos, &q)| {
            acc | (((compact >> (k - 1 - pos)) & 1) << (n - 1 - q))
        })
    };
    let kept_offsets: Vec<usize> = (0..1usize << kept.len())
        .map(|c| scatter(c, &kept))
        .collect();
    let traced_offsets: Vec<usize> = (0..1usize << traced.len())
        .map(|c| scatter(c, &traced))
        .collect();

    let d = kept_offsets.len();
    let m = &rho.matrix;
    let mut out = DenseMatrix::zeros(d);
    for (i, &oi) in kept_offsets.iter().enumerate() {
        for (j, &oj) in kept_offsets.iter().enumerate() {
            let s: Complex64 = traced_offsets.iter().map(|&t| m.get(oi | t, oj | t)).sum();
            out.set(i, j, s);
        }
    }
    Ok(DensityMatrix {
        n_qubits: kept.len(),
        matrix: out,
    })
}

/// `|psi><psi|`.
pub fn pure_to_density(psi: &StateVector) -> DensityMatrix {
    let a = psi.amplitudes();
    DensityMatrix {
        n_qubits: psi.n_qubits(),
        matrix: DenseMatrix::from_fn(a.len(), |i, j| a[i] * a[j].conj()),
    }
}

/// Eigenvalues of a Hermitian matrix in nondecreasing order, computed with
/// cyclic complex Jacobi rotations.
pub fn hermitian_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    let defect = a.hermiticity_defect();
    if defect > EIGEN_HERMITICITY_TOL {
        return Err(Error::input(format!(
            "matrix is not Hermitian (defect {defect:.3e})"
        )));
    }
    // Work on the exact Hermitian part so tiny asymmetries do not accumulate.
    let d = a.dim();
    let mut w = DenseMatrix::from_fn(d, |i, j| {
        if i == j {
            Complex64::new(a.get(i, i).re, 0.0)
        } else {
            (a.get(i, j) + a.get(j, i).conj()) * 0.5
        }
    });
    let threshold = JACOBI_TOL * w.frobenius_norm().max(1.0);

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&w) <= threshold {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                jacobi_rotate(&mut w, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&w) > threshold {
        return Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }
    let mut eig: Vec<f64> = (0..d).map(|i| w.get(i, i).re).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

fn off_diagonal_norm(w: &DenseMatrix) -> f64 {
    let d = w.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += w.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Applies `W <- V^† W V` with `V` the unitary that zeroes `W[p][q]`.
///
/// `V = diag(1, e^{-iφ}) · R(θ)` on the `(p, q)` plane, where the phase makes
/// the pivot real and `R` is the classical real Jacobi rotation.
fn jacobi_rotate(w: &mut DenseMatrix, p: usize, q: usize) {
    let apq = w.get(p, q);
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = w.get(p, p).re;
    let aqq = w.get(q, q).re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let phase_conj = phase.conj();
    let v_pp = Complex64::new(c, 0.0);
    let v_pq = Complex64::new(s, 0.0);
    let v_qp = phase_conj * (-s);
    let v_qq = phase_conj * c;

    let d = w.dim();
    // W <- W V
    for k in 0..d {
        let wp = w.get(k, p);
        let wq = w.get(k, q);
        w.set(k, p, wp * v_pp + wq * v_qp);
        w.set(k, q, wp * v_pq + wq * v_qq);
    }
    // W <- V^† W
    for k in 0..d {
        let pw = w.get(p, k);
        let qw = w.get(q, k);
        w.set(p, k, v_pp.conj() * pw + v_qp.conj() * qw);
        w.set(q, k, v_pq.conj() * pw + v_qq.conj() * qw);
    }
    w.set(p, q, Complex64::new(0.0, 0.0));
    w.set(q, p, Complex64::new(0.0, 0.0));
    let wpp = w.get(p, p).re;
    let wqq = w.get(q, q).re;
    w.set(p, p, Complex64::new(wpp, 0.0));
    w.set(q, q, Complex64::new(wqq, 0.0));
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub ok: bool,
}

/// Checks the three density-matrix invariants. The eigenvalues are taken
/// from the Hermitian part when the input is not Hermitian.
pub fn validate_density(rho: &DensityMatrix) -> ValidationReport {
    let m = &rho.matrix;
    let hermiticity_defect = m.hermiticity_defect();
    let tr = m.trace();
    let trace_defect = (tr - Complex64::new(1.0, 0.0)).norm();
    let herm_part = DenseMatrix::from_fn(m.dim(), |i, j| (m.get(i, j) + m.get(j, i).conj()) * 0.5);
    let min_eigenvalue = match hermitian_eigenvalues(&herm_part) {
        Ok(eig) => eig[0],
        Err(_) => f64::NAN,
    };
    let ok = hermiticity_defect <= HERMITICITY_TOL
        && trace_defect <= TRACE_TOL
        && min_eigenvalue >= EIGENVALUE_FLOOR;
    ValidationReport {
        hermiticity_defect,
        trace_defect,
        min_eigenvalue,
        ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn density(rows: &[&[f64]]) -> DensityMatrix {
        DensityMatrix::new(DenseMatrix::from_real_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn kron_identities_and_diagonals() {
        let i2 = DenseMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), DenseMatrix::identity(4));
        let a = DenseMatrix::from_diagonal(&[1.0, 0.0]);
        let b = DenseMatrix::from_diagonal(&[0.0, 1.0]);
        assert_eq!(
            kron(&a, &b).unwrap(),
            DenseMatrix::from_diagonal(&[0.0, 1.0, 0.0, 0.0])
        );
    }

    #[test]
    fn kron_index_layout() {
        let a = DenseMatrix::from_fn(2, |i, j| c((i * 2 + j) as f64 + 1.0, 0.0));
        let b = DenseMatrix::from_fn(3, |i, j| c(0.0, (i * 3 + j) as f64 + 1.0));
        let k = kron(&a, &b).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..3 {
                    for q in 0..3 {
                        assert_eq!(k.get(i * 3 + p, j * 3 + q), a.get(i, j) * b.get(p, q));
                    }
                }
            }
        }
    }

    #[test]
    fn kron_rejects_oversized_result() {
        let a = DenseMatrix::identity(64);
        let b = DenseMatrix::identity(128);
        assert!(matches!(kron(&a, &b), Err(Error::Size { dim: 8192, .. })));
        assert!(kron_with_limit(&DenseMatrix::identity(4), &DenseMatrix::identity(4), 8).is_err());
    }

    #[test]
    fn dagger_examples() {
        let i3 = DenseMatrix::identity(3);
        assert_eq!(dagger(&i3), i3);
        let a = DenseMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let expected = DenseMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(dagger(&a), expected);
        let z = DenseMatrix::from_fn(3, |i, j| {
            c(i as f64 - 0.5 * j as f64, (i * j) as f64 + 0.25)
        });
        assert_eq!(dagger(&dagger(&z)), z);
        assert_eq!(dagger(&z).get(0, 2), z.get(2, 0).conj());
    }

    #[test]
    fn from_row_major_rejects_bad_input() {
        assert!(DenseMatrix::from_row_major(2, vec![c(0.0, 0.0); 3]).is_err());
        assert!(DenseMatrix::from_row_major(1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(DenseMatrix::from_row_major(0, vec![]).is_err());
    }

    #[test]
    fn permutation_identity_and_involution() {
        let rho = DensityMatrix::new(DenseMatrix::from_fn(8, |i, j| {
            c((i + 2 * j) as f64, i as f64 - j as f64)
        }))
        .unwrap();
        assert_eq!(permute_qubits(&rho, &[0, 1, 2]).unwrap(), rho);
        let once = permute_qubits(&rho, &[1, 0, 2]).unwrap();
        assert_ne!(once, rho);
        assert_eq!(permute_qubits(&once, &[1, 0, 2]).unwrap(), rho);
    }

    #[test]
    fn permutation_swaps_product_factors() {
        let sigma = density(&[&[0.7, 0.2], &[0.2, 0.3]]);
        let tau = DensityMatrix::new(
            DenseMatrix::from_row_major(
                2,
                vec![c(0.4, 0.0), c(0.1, 0.3), c(0.1, -0.3), c(0.6, 0.0)],
            )
            .unwrap(),
        )
        .unwrap();
        let st = sigma.tensor(&tau).unwrap();
        let ts = tau.tensor(&sigma).unwrap();
        let swapped = permute_qubits(&st, &[1, 0]).unwrap();
        // brute-force relabelling: |a b> -> |b a>
        for i in 0..4 {
            for j in 0..4 {
                let (a, b) = (i >> 1, i & 1);
                let (cc, d) = (j >> 1, j & 1);
                let relabelled = st.matrix().get(b * 2 + a, d * 2 + cc);
                assert_eq!(swapped.matrix().get(i, j), relabelled);
            }
        }
        assert!(swapped.matrix().max_abs_diff(ts.matrix()) < 1e-15);
    }

    #[test]
    fn permutation_rejects_non_bijection() {
        let rho = pure_to_density(&StateVector::normalized(vec![c(1.0, 0.0); 4]).unwrap());
        assert!(permute_qubits(&rho, &[0, 0]).is_err());
        assert!(permute_qubits(&rho, &[0]).is_err());
        assert!(permute_qubits(&rho, &[0, 2]).is_err());
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let s = 1.0 / 2f64.sqrt();
        let bell = StateVector::new(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
        let rho = pure_to_density(&bell);
        let half = DenseMatrix::identity(2).scaled(0.5);
        for q in 0..2 {
            let r = partial_trace(&rho, &[q]).unwrap();
            assert!(r.matrix().max_abs_diff(&half) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let sigma = density(&[&[0.7, 0.2], &[0.2, 0.3]]);
        let tau = density(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let rho = sigma.tensor(&tau).unwrap();
        let a = partial_trace(&rho, &[0]).unwrap();
        let b = partial_trace(&rho, &[1]).unwrap();
        assert!(a.matrix().max_abs_diff(sigma.matrix()) < 1e-15);
        assert!(b.matrix().max_abs_diff(tau.matrix()) < 1e-15);
        assert_eq!(partial_trace(&rho, &[1, 0]).unwrap(), rho);
    }

    #[test]
    fn partial_trace_rejects_bad_keep() {
        let rho = pure_to_density(&StateVector::normalized(vec![c(1.0, 0.0); 8]).unwrap());
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[3]).is_err());
        assert!(partial_trace(&rho, &[1, 1]).is_err());
    }

    #[test]
    fn pure_to_density_examples() {
        let zero = StateVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(
            pure_to_density(&zero).into_matrix(),
            DenseMatrix::from_diagonal(&[1.0, 0.0])
        );
        let plus = StateVector::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let rho = pure_to_density(&plus);
        for z in rho.matrix().entries() {
            assert!((z - c(0.5, 0.0)).norm() < 1e-15);
        }
        let sq = rho.matrix().matmul(rho.matrix()).unwrap();
        assert!(sq.max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn state_vector_rejects_unnormalised() {
        assert!(StateVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(StateVector::new(vec![c(1.0, 0.0)]).is_err());
        assert!(StateVector::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).is_err());
        assert!(StateVector::normalized(vec![c(0.0, 0.0); 2]).is_err());
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(
            hermitian_eigenvalues(&DenseMatrix::identity(4)).unwrap(),
            vec![1.0; 4]
        );
        let x = DenseMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let e = hermitian_eigenvalues(&x).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);

        let psi =
            StateVector::normalized(vec![c(0.3, 0.1), c(-0.2, 0.5), c(0.7, 0.0), c(0.1, -0.4)])
                .unwrap();
        let e = hermitian_eigenvalues(pure_to_density(&psi).matrix()).unwrap();
        for (got, want) in e.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{e:?}");
        }
    }

    #[test]
    fn eigenvalues_reject_non_hermitian() {
        let a = DenseMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&a), Err(Error::Input(_))));
    }

    #[test]
    fn eigenvalues_of_complex_hermitian_3x3() {
        // diag(1,2,3) conjugated by a fixed unitary built from a Householder reflection
        let v = [c(0.5, 0.5), c(-0.5, 0.0), c(0.0, 0.5)];
        let h = DenseMatrix::from_fn(3, |i, j| {
            let id = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
            id - v[i] * v[j].conj() * 2.0
        });
        let d = DenseMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let a = h.matmul(&d).unwrap().matmul(&dagger(&h)).unwrap();
        let e = hermitian_eigenvalues(&a).unwrap();
        for (got, want) in e.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12, "{e:?}");
        }
    }

    #[test]
    fn validation_examples() {
        let mixed = DensityMatrix::new(DenseMatrix::identity(2).scaled(0.5)).unwrap();
        assert!(validate_density(&mixed).ok);

        let r = validate_density(&density(&[&[0.6, 0.0], &[0.0, 0.6]]));
        assert!(!r.ok);
        assert!((r.trace_defect - 0.2).abs() < 1e-15);

        let r = validate_density(&density(&[&[0.5, 0.7], &[0.7, 0.5]]));
        assert!(!r.ok);
        assert!((r.min_eigenvalue + 0.2).abs() < 1e-12);
        assert_eq!(r.trace_defect, 0.0);

        let skew = DensityMatrix::new(
            DenseMatrix::from_row_major(
                2,
                vec![c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)],
            )
            .unwrap(),
        )
        .unwrap();
        let r = validate_density(&skew);
        assert!(!r.ok);
        assert!((r.hermiticity_defect - 0.1).abs() < 1e-15);
        assert!(DensityMatrix::checked(skew.into_matrix()).is_err());
    }
}
