//! Seeded random states and the named three-qubit example.
//!
//! Every generator is a pure function of its [`SeedSpec`]; see [`crate::rng`]
//! for the exact generator.

use num_complex::Complex64;

use crate::qmatrix::{DenseMatrix, DensityMatrix, StateVector};
use crate::rng::{SeedSpec, Xoshiro256PlusPlus};
use crate::{Error, Result};

pub const MAX_QUBITS: usize = 10;

fn check_qubits(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::input(format!(
            "qubit count {n} outside [1, {MAX_QUBITS}]"
        )))
    }
}

fn complex_gaussian(rng: &mut Xoshiro256PlusPlus) -> Complex64 {
    let (re, im) = rng.normal_pair();
    Complex64::new(re, im)
}

fn gaussian_state(rng: &mut Xoshiro256PlusPlus, dim: usize) -> Result<StateVector> {
    let amps = (0..dim).map(|_| complex_gaussian(rng)).collect();
    StateVector::normalized(amps)
}

/// Normalised vector of independent complex Gaussians (unitarily invariant).
pub fn random_pure(n: usize, seed: SeedSpec) -> Result<StateVector> {
    check_qubits(n)?;
    gaussian_state(&mut seed.rng(), 1 << n)
}

/// `G G^† / tr(G G^†)` with `G` a `2^n x rank` complex Gaussian matrix.
pub fn random_density(n: usize, rank: usize, seed: SeedSpec) -> Result<DensityMatrix> {
    check_qubits(n)?;
    let dim = 1usize << n;
    if !(1..=dim).contains(&rank) {
        return Err(Error::input(format!("rank {rank} outside [1, {dim}]")));
    }
    let mut rng = seed.rng();
    let g: Vec<Complex64> = (0..dim * rank)
        .map(|_| complex_gaussian(&mut rng))
        .collect();
    let row = |i: usize| &g[i * rank..(i + 1) * rank];

    let mut m = DenseMatrix::zeros(dim);
    let mut trace = 0.0;
    for i in 0..dim {
        let diag: f64 = row(i).iter().map(|z| z.norm_sqr()).sum();
        m.set(i, i, Complex64::new(diag, 0.0));
        trace += diag;
        for j in (i + 1)..dim {
            let v: Complex64 = row(i).iter().zip(row(j)).map(|(a, b)| a * b.conj()).sum();
            m.set(i, j, v);
            m.set(j, i, v.conj());
        }
    }
    DensityMatrix::new(m.scaled(1.0 / trace))
}

/// Tensor product of `n` independent random single-qubit pure states.
pub fn random_product_pure(n: usize, seed: SeedSpec) -> Result<StateVector> {
    check_qubits(n)?;
    let mut rng = seed.rng();
    let mut state = gaussian_state(&mut rng, 2)?;
    for _ in 1..n {
        state = state.tensor(&gaussian_state(&mut rng, 2)?)?;
    }
    Ok(state)
}

/// Gaussian amplitudes damped by `decay^(i * b_i)` on qubit `i`, then
/// normalised. Coherence is concentrated on the leading qubits, which is the
/// regime where the tiered hypotheses `C_i >= T_i / x` can hold.
pub fn random_graded_pure(n: usize, decay: f64, seed: SeedSpec) -> Result<StateVector> {
    check_qubits(n)?;
    if !(decay > 0.0 && decay <= 1.0) {
        return Err(Error::input(format!(
            "decay must lie in (0, 1], got {decay}"
        )));
    }
    let mut rng = seed.rng();
    let amps = (0..1usize << n)
        .map(|b| {
            let weight: f64 = (0..n)
                .filter(|&i| (b >> (n - 1 - i)) & 1 == 1)
                .map(|i| decay.powi(i as i32))
                .product();
            complex_gaussian(&mut rng) * weight
        })
        .collect();
    StateVector::normalized(amps)
}

/// `(|0> + |1>)/√2 ⊗ |0> ⊗ (|0> + 3|1>)/√10`.
pub fn paper_example_state() -> StateVector {
    let a = 1.0 / 20f64.sqrt();
    let b = 3.0 / 20f64.sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0b000] = Complex64::new(a, 0.0);
    amps[0b001] = Complex64::new(b, 0.0);
    amps[0b100] = Complex64::new(a, 0.0);
    amps[0b101] = Complex64::new(b, 0.0);
    StateVector::new(amps).expect("example state is normalised")
}
