//! Density matrices on a [`FockBasis`], expectation values and exact ergotropy.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::FockBasis;
use crate::error::{Error, Result};
use crate::gaussian::MomentState;

pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-8;
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

/// Dense row-major density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn vacuum(basis: &FockBasis) -> Self {
        let mut rho = Self::zeros(basis.dim());
        rho.data[0] = Complex64::new(1.0, 0.0);
        rho
    }

    /// `|ψ⟩⟨ψ|` for `ψ = Σ c |n_a, n_b⟩`, normalized.
    pub fn pure(basis: &FockBasis, amplitudes: &[(usize, usize, Complex64)]) -> Result<Self> {
        let mut psi = vec![Complex64::new(0.0, 0.0); basis.dim()];
        for &(na, nb, c) in amplitudes {
            let i = basis
                .index(na, nb)
                .ok_or_else(|| Error::InvalidInput(format!("|{na},{nb}⟩ is outside the truncated basis")))?;
            psi[i] += c;
        }
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidInput("zero state vector".into()));
        }
        let n = basis.dim();
        let mut rho = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                rho.data[r * n + c] = psi[r] * psi[c].conj() / (norm * norm);
            }
        }
        Ok(rho)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|ρ[r,c] − ρ[c,r]*|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(self.to_dmatrix()).into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Trace and Hermiticity checks; positivity too when `positivity` is set.
    pub fn check_invariants(&self, positivity: bool) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::Unphysical(format!("density matrix trace {tr}")));
        }
        let herm = self.hermiticity_error();
        if herm > HERMITICITY_TOLERANCE {
            return Err(Error::Unphysical(format!("density matrix Hermiticity error {herm:.3e}")));
        }
        if positivity {
            let min = self.min_eigenvalue();
            if min < -POSITIVITY_TOLERANCE {
                return Err(Error::Unphysical(format!("density matrix eigenvalue {min:.3e}")));
            }
        }
        Ok(())
    }

    /// `Tr(ρO)` for an operator that maps basis state `i` to `amp·|j⟩`.
    fn expect_shift(&self, basis: &FockBasis, da: i32, db: i32) -> Complex64 {
        (0..self.dim)
            .filter_map(|i| basis.shift(i, da, db).map(|(j, amp)| self.get(i, j) * amp))
            .sum()
    }

    fn expect_diagonal(&self, basis: &FockBasis, f: impl Fn(usize, usize) -> f64) -> f64 {
        basis
            .states()
            .iter()
            .enumerate()
            .map(|(i, &(na, nb))| f(na, nb) * self.get(i, i).re)
            .sum()
    }

    /// Populations of the highest retained charger and battery levels.
    pub fn top_level_populations(&self, basis: &FockBasis) -> (f64, f64) {
        let top_a = basis.cutoff_a() - 1;
        let top_b = basis.top_b();
        let pa = self.expect_diagonal(basis, |na, _| if na == top_a { 1.0 } else { 0.0 });
        let pb = self.expect_diagonal(basis, |_, nb| if nb == top_b { 1.0 } else { 0.0 });
        (pa, pb)
    }

    /// `⟨2a†a + b†b⟩`, conserved by the two-photon coupling alone.
    pub fn excitation_charge(&self, basis: &FockBasis) -> f64 {
        self.expect_diagonal(basis, |na, nb| (2 * na + nb) as f64)
    }
}

/// Eigenvalues of a Hermitian matrix, unsorted.
pub fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    m.symmetric_eigenvalues().iter().copied().collect()
}

/// All six first and second moments by trace contraction.
pub fn extract_moments(rho: &DensityMatrix, basis: &FockBasis, time: f64) -> Result<MomentState> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            actual: rho.dim(),
        });
    }
    Ok(MomentState {
        a_mean: rho.expect_shift(basis, -1, 0),
        a_num: rho.expect_diagonal(basis, |na, _| na as f64),
        a_sq: rho.expect_shift(basis, -2, 0),
        b_mean: rho.expect_shift(basis, 0, -1),
        b_num: rho.expect_diagonal(basis, |_, nb| nb as f64),
        b_sq: rho.expect_shift(basis, 0, -2),
        time,
    })
}

/// Battery state `Tr_a ρ` on the full `cutoff_b` ladder.
pub fn reduced_battery(rho: &DensityMatrix, basis: &FockBasis) -> Result<DMatrix<Complex64>> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            actual: rho.dim(),
        });
    }
    let nb = basis.cutoff_b();
    let block = basis.battery_block();
    let mut out = DMatrix::zeros(nb, nb);
    for na in 0..basis.cutoff_a() {
        let base = na * block;
        for r in 0..block {
            let (_, br) = basis.state(base + r);
            for c in 0..block {
                let (_, bc) = basis.state(base + c);
                out[(br, bc)] += rho.get(base + r, base + c);
            }
        }
    }
    Ok(out)
}

/// `E − E_passive` of a single-mode state with level spacing `omega_b`.
///
/// The passive energy pairs the eigenvalues of `rho_b`, sorted in descending
/// order, with the ascending ladder energies `0, ω_b, 2ω_b, …`.
pub fn exact_ergotropy(rho_b: &DMatrix<Complex64>, omega_b: f64) -> Result<f64> {
    if rho_b.nrows() != rho_b.ncols() {
        return Err(Error::DimensionMismatch {
            expected: rho_b.nrows(),
            actual: rho_b.ncols(),
        });
    }
    let energy: f64 = (0..rho_b.nrows()).map(|n| n as f64 * omega_b * rho_b[(n, n)].re).sum();
    let mut eig = hermitian_eigenvalues(rho_b.clone());
    if let Some(&min) = eig.iter().min_by(|a, b| a.total_cmp(b)) {
        if min < -POSITIVITY_TOLERANCE {
            return Err(Error::Unphysical(format!("battery state has eigenvalue {min:.3e}")));
        }
    }
    // integration noise of either sign sits at the tolerance level; only the
    // negative part could push the passive energy below zero
    eig.iter_mut().for_each(|r| *r = r.max(0.0));
    eig.sort_by(|a, b| b.total_cmp(a));
    let passive: f64 = eig.iter().enumerate().map(|(n, &r)| n as f64 * omega_b * r).sum();
    Ok(energy - passive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::basis::BatteryLevels;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn vacuum_moments_vanish() {
        let basis = FockBasis::new(3, 3, BatteryLevels::All);
        let m = extract_moments(&DensityMatrix::vacuum(&basis), &basis, 0.0).unwrap();
        assert_eq!(m, MomentState::vacuum(0.0));
    }

    #[test]
    fn single_battery_photon() {
        let basis = FockBasis::new(3, 3, BatteryLevels::All);
        let rho = DensityMatrix::pure(&basis, &[(0, 1, c(1.0))]).unwrap();
        let m = extract_moments(&rho, &basis, 0.0).unwrap();
        assert_eq!(m.b_num, 1.0);
        assert_eq!(m.b_mean.norm() + m.b_sq.norm() + m.a_num + m.a_mean.norm(), 0.0);
        let rho_b = reduced_battery(&rho, &basis).unwrap();
        assert!((exact_ergotropy(&rho_b, 1.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn superposition_moments() {
        // (|0⟩ + |1⟩)/√2 in the charger: ⟨a⟩ = 1/2
        let basis = FockBasis::new(3, 2, BatteryLevels::All);
        let rho = DensityMatrix::pure(&basis, &[(0, 0, c(1.0)), (1, 0, c(1.0))]).unwrap();
        let m = extract_moments(&rho, &basis, 0.0).unwrap();
        assert!((m.a_mean - c(0.5)).norm() < 1e-15);
        assert!((m.a_num - 0.5).abs() < 1e-15);
        // |0⟩ + |2⟩: ⟨aa⟩ = √2/2
        let rho = DensityMatrix::pure(&basis, &[(0, 0, c(1.0)), (2, 0, c(1.0))]).unwrap();
        let m = extract_moments(&rho, &basis, 0.0).unwrap();
        assert!((m.a_sq - c(2f64.sqrt() / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn ergotropy_examples() {
        let vac = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(0.0)]));
        assert_eq!(exact_ergotropy(&vac, 1.0).unwrap(), 0.0);
        let passive = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.6), c(0.4)]));
        assert!(exact_ergotropy(&passive, 1.0).unwrap().abs() < 1e-15);
        let inverted = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.4), c(0.6)]));
        assert!((exact_ergotropy(&inverted, 2.0).unwrap() - 0.4).abs() < 1e-15);
        let bad = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.1), c(-0.1)]));
        assert!(matches!(exact_ergotropy(&bad, 1.0), Err(Error::Unphysical(_))));
    }

    #[test]
    fn partial_trace_on_even_ladder() {
        let basis = FockBasis::new(2, 5, BatteryLevels::Even);
        let rho = DensityMatrix::pure(&basis, &[(0, 0, c(1.0)), (1, 2, c(1.0)), (0, 4, c(1.0))]).unwrap();
        let rho_b = reduced_battery(&rho, &basis).unwrap();
        assert_eq!(rho_b.nrows(), 5);
        assert!((rho_b[(2, 2)].re - 1.0 / 3.0).abs() < 1e-15);
        assert!((rho_b[(0, 4)].re - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(rho_b[(0, 2)].norm(), 0.0);
        assert!((rho_b.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invariant_checks() {
        let basis = FockBasis::new(2, 2, BatteryLevels::All);
        let rho = DensityMatrix::pure(&basis, &[(0, 0, c(1.0)), (1, 1, Complex64::new(0.0, 1.0))]).unwrap();
        rho.check_invariants(true).unwrap();
        let mut broken = rho.clone();
        broken.as_mut_slice()[1] += c(1e-6);
        assert!(broken.check_invariants(false).is_err());
        assert!(DensityMatrix::zeros(4).check_invariants(false).is_err());
    }
}
