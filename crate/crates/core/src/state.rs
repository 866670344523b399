//! Validated quantum state types and their decompositions.
//!
//! Bipartite index convention, fixed once and used everywhere: the
//! composite index is row-major, `i * d_B + j  <->  |i>_A |j>_B`.

use num_complex::Complex64;

use crate::error::{QError, Result};
use crate::linalg::{
    self, eigh_hermitian, fix_phase, reassemble, CMat, CVec, NEGATIVITY_FLOOR,
};

const HERMITICITY_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-6;
const NORM_TOL: f64 = 1e-6;
const SCHMIDT_COEFF_CUTOFF: f64 = 1e-12;

fn check_subsystem_dims(dim: usize, subsystem_dims: &[usize]) -> Result<()> {
    if subsystem_dims.is_empty() || subsystem_dims.len() > 2 {
        return Err(QError::DimMismatch(format!(
            "expected 1 or 2 subsystem dims, got {}",
            subsystem_dims.len()
        )));
    }
    if subsystem_dims.iter().any(|&d| d == 0) {
        return Err(QError::DimMismatch("zero subsystem dimension".into()));
    }
    let product: usize = subsystem_dims.iter().product();
    if product != dim {
        return Err(QError::DimMismatch(format!(
            "subsystem dims {subsystem_dims:?} do not multiply to {dim}"
        )));
    }
    Ok(())
}

/// A validated Hermitian, positive-semidefinite, unit-trace matrix.
///
/// Construction clips eigenvalues in `[-1e-10, 0)` to zero and renormalizes
/// the trace, so every instance satisfies the invariants exactly (up to
/// roundoff in the reassembly).
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    subsystem_dims: Vec<usize>,
    mat: CMat,
}

impl DensityMatrix {
    /// Validate raw entries into a density matrix.
    pub fn new(entries: CMat, subsystem_dims: &[usize]) -> Result<Self> {
        let (eigenvalues, vectors) = Self::validate(&entries, subsystem_dims)?;
        let clipped: Vec<f64> = eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Err(QError::TraceMismatch(total));
        }
        let normalized: Vec<f64> = clipped.iter().map(|&l| l / total).collect();
        Ok(Self {
            subsystem_dims: subsystem_dims.to_vec(),
            mat: reassemble(&normalized, &vectors),
        })
    }

    /// Validate entries but keep them verbatim instead of re-synthesizing
    /// from the clipped spectrum. File loaders use this so that
    /// parse(serialize(rho)) returns `rho` bit for bit; the spectral
    /// helpers clip roundoff negatives on the fly either way.
    pub fn from_exact(entries: CMat, subsystem_dims: &[usize]) -> Result<Self> {
        Self::validate(&entries, subsystem_dims)?;
        Ok(Self {
            subsystem_dims: subsystem_dims.to_vec(),
            mat: entries,
        })
    }

    fn validate(entries: &CMat, subsystem_dims: &[usize]) -> Result<(Vec<f64>, CMat)> {
        if entries.nrows() != entries.ncols() {
            return Err(QError::DimMismatch(format!(
                "matrix is {}x{}, expected square",
                entries.nrows(),
                entries.ncols()
            )));
        }
        check_subsystem_dims(entries.nrows(), subsystem_dims)?;

        let herm_defect = linalg::hermiticity_defect(entries);
        if herm_defect > HERMITICITY_TOL {
            return Err(QError::NotHermitian(herm_defect));
        }
        let trace = linalg::trace_re(entries);
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(QError::TraceMismatch(trace));
        }

        let (eigenvalues, vectors) = eigh_hermitian(entries);
        if let Some(&lowest) = eigenvalues.last() {
            if lowest < NEGATIVITY_FLOOR {
                return Err(QError::NotPositive(lowest));
            }
        }
        Ok((eigenvalues, vectors))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn subsystem_dims(&self) -> &[usize] {
        &self.subsystem_dims
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    /// Local dimensions (d_A, d_B); error for single-system states.
    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.subsystem_dims.as_slice() {
            [a, b] => Ok((*a, *b)),
            _ => Err(QError::NotBipartite),
        }
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(subsystem_dims: &[usize]) -> Self {
        let dim: usize = subsystem_dims.iter().product();
        let mat = linalg::identity(dim) * Complex64::new(1.0 / dim as f64, 0.0);
        Self {
            subsystem_dims: subsystem_dims.to_vec(),
            mat,
        }
    }

    /// Diagonal state from a probability vector (renormalized).
    pub fn from_probabilities(probs: &[f64], subsystem_dims: &[usize]) -> Result<Self> {
        let dim = probs.len();
        let mut mat = CMat::zeros(dim, dim);
        for (j, &p) in probs.iter().enumerate() {
            mat[(j, j)] = Complex64::new(p, 0.0);
        }
        Self::new(mat, subsystem_dims)
    }

    /// Spectral decomposition with descending eigenvalues.
    pub fn eigh(&self) -> SpectralDecomposition {
        eigh(self)
    }

    /// rho^t with the support cutoff of [`linalg::matrix_power`].
    pub fn power(&self, t: f64) -> CMat {
        linalg::matrix_power(&self.mat, t).expect("validated state is PSD")
    }

    /// Tr rho^q (real by Hermiticity).
    pub fn trace_power(&self, q: f64) -> f64 {
        let spectral = self.eigh();
        spectral
            .eigenvalues
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| l.powf(q))
            .sum()
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigh().eigenvalues.iter().filter(|&&l| l > tol).count()
    }

    /// Off-diagonal l1 mass in the given orthonormal basis columns.
    pub fn offdiagonal_mass(&self, basis: &CMat) -> f64 {
        let rotated = basis.adjoint() * &self.mat * basis;
        let mut mass = 0.0;
        for i in 0..rotated.nrows() {
            for j in 0..rotated.ncols() {
                if i != j {
                    mass += rotated[(i, j)].norm();
                }
            }
        }
        mass
    }
}

/// A unit-norm state vector.
#[derive(Debug, Clone)]
pub struct PureState {
    subsystem_dims: Vec<usize>,
    amplitudes: CVec,
}

impl PureState {
    pub fn new(amplitudes: CVec, subsystem_dims: &[usize]) -> Result<Self> {
        check_subsystem_dims(amplitudes.len(), subsystem_dims)?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QError::NormMismatch(norm));
        }
        Ok(Self {
            subsystem_dims: subsystem_dims.to_vec(),
            amplitudes: amplitudes / Complex64::new(norm, 0.0),
        })
    }

    /// Basis vector |j>.
    pub fn basis_state(j: usize, subsystem_dims: &[usize]) -> Result<Self> {
        let dim: usize = subsystem_dims.iter().product();
        if j >= dim {
            return Err(QError::IndexOutOfRange { index: j, dim });
        }
        let mut amplitudes = CVec::zeros(dim);
        amplitudes[j] = Complex64::new(1.0, 0.0);
        Self::new(amplitudes, subsystem_dims)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn subsystem_dims(&self) -> &[usize] {
        &self.subsystem_dims
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.subsystem_dims.as_slice() {
            [a, b] => Ok((*a, *b)),
            _ => Err(QError::NotBipartite),
        }
    }

    /// The projector |psi><psi| as a validated density matrix.
    pub fn projector(&self) -> DensityMatrix {
        let d = self.dim();
        let mut mat = CMat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                mat[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityMatrix::new(mat, &self.subsystem_dims).expect("projector of a unit vector is a state")
    }

    /// |<j|psi>|^2 for the columns of an orthonormal basis.
    pub fn probabilities_in_basis(&self, basis: &CMat) -> Vec<f64> {
        (0..basis.ncols())
            .map(|j| {
                let mut amp = Complex64::new(0.0, 0.0);
                for i in 0..self.dim() {
                    amp += basis[(i, j)].conj() * self.amplitudes[i];
                }
                amp.norm_sqr()
            })
            .collect()
    }
}

/// Eigenvalues (descending, clipped to >= 0) and orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Eigenvector k is column k.
    pub eigenvectors: CMat,
}

impl SpectralDecomposition {
    /// Build from raw parts, checking orthonormality and nonnegativity.
    /// Used by audit code that substitutes a specific eigenbasis for a
    /// degenerate spectrum.
    pub fn from_parts(eigenvalues: Vec<f64>, eigenvectors: CMat) -> Result<Self> {
        if eigenvalues.len() != eigenvectors.ncols() {
            return Err(QError::DimMismatch(format!(
                "{} eigenvalues vs {} eigenvectors",
                eigenvalues.len(),
                eigenvectors.ncols()
            )));
        }
        let defect = linalg::unitarity_defect(&eigenvectors);
        if defect > 1e-10 {
            return Err(QError::NotIsometry(defect));
        }
        if let Some(&worst) = eigenvalues
            .iter()
            .min_by(|a, b| a.partial_cmp(b).expect("finite"))
        {
            if worst < NEGATIVITY_FLOOR {
                return Err(QError::NegativeEigenvalue(worst));
            }
        }
        Ok(Self {
            eigenvalues: eigenvalues.iter().map(|&l| l.max(0.0)).collect(),
            eigenvectors,
        })
    }

    pub fn reconstruct(&self) -> CMat {
        reassemble(&self.eigenvalues, &self.eigenvectors)
    }

    /// Indices of eigenvalues above the cutoff.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.eigenvalues.len())
            .filter(|&k| self.eigenvalues[k] > tol)
            .collect()
    }

    pub fn eigenvector(&self, k: usize) -> CVec {
        CVec::from_iterator(
            self.eigenvectors.nrows(),
            self.eigenvectors.column(k).iter().cloned(),
        )
    }
}

/// Spectral decomposition of a validated state.
pub fn eigh(rho: &DensityMatrix) -> SpectralDecomposition {
    let (eigenvalues, eigenvectors) = eigh_hermitian(rho.matrix());
    SpectralDecomposition {
        eigenvalues: eigenvalues.iter().map(|&l| l.max(0.0)).collect(),
        eigenvectors,
    }
}

/// Schmidt form of a bipartite pure state: descending coefficients > 1e-12
/// and orthonormal local vectors, `psi = sum_n alpha_n xi_n^A (x) xi_n^B`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left_vectors: Vec<CVec>,
    pub right_vectors: Vec<CVec>,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn reconstruct(&self) -> CVec {
        let d_a = self.left_vectors[0].len();
        let d_b = self.right_vectors[0].len();
        let mut out = CVec::zeros(d_a * d_b);
        for (n, &alpha) in self.coefficients.iter().enumerate() {
            for i in 0..d_a {
                for j in 0..d_b {
                    out[i * d_b + j] +=
                        Complex64::new(alpha, 0.0) * self.left_vectors[n][i] * self.right_vectors[n][j];
                }
            }
        }
        out
    }
}

/// Schmidt decomposition via SVD of the d_A x d_B amplitude matrix.
///
/// Degenerate coefficients come back in the SVD's deterministic rotation;
/// each left vector's phase is fixed (largest component real positive) and
/// the right vector absorbs the inverse phase.
pub fn schmidt_decompose(psi: &PureState) -> Result<SchmidtDecomposition> {
    let (d_a, d_b) = psi.bipartite_dims()?;
    let mut coeff = CMat::zeros(d_a, d_b);
    for i in 0..d_a {
        for j in 0..d_b {
            coeff[(i, j)] = psi.amplitudes()[i * d_b + j];
        }
    }
    let svd = coeff.svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .expect("finite")
    });

    let mut coefficients = Vec::new();
    let mut left_vectors = Vec::new();
    let mut right_vectors = Vec::new();
    for &n in &order {
        let alpha = svd.singular_values[n];
        if alpha <= SCHMIDT_COEFF_CUTOFF {
            continue;
        }
        let mut left = CVec::from_iterator(d_a, u.column(n).iter().cloned());
        // v_t rows are the (unconjugated) right factors.
        let mut right = CVec::from_iterator(d_b, v_t.row(n).iter().cloned());
        let before = left.clone();
        fix_phase(&mut left);
        // phase moved out of `left` must be pushed into `right`
        if let Some(k) = (0..d_a).find(|&k| before[k].norm() > 1e-12) {
            let phase = before[k] / left[k];
            right *= phase;
        }
        coefficients.push(alpha);
        left_vectors.push(left);
        right_vectors.push(right);
    }
    Ok(SchmidtDecomposition {
        coefficients,
        left_vectors,
        right_vectors,
    })
}

/// <i|_A M |i>_A for a Hermitian operator on A (x) B: the d_B x d_B block
/// conditioned on basis vector i of the given A-basis columns.
pub fn conditional_operator(
    m: &CMat,
    subsystem_dims: &[usize],
    i: usize,
    basis_a: &CMat,
) -> Result<CMat> {
    let (d_a, d_b) = match subsystem_dims {
        [a, b] => (*a, *b),
        _ => return Err(QError::NotBipartite),
    };
    if m.nrows() != d_a * d_b || m.ncols() != d_a * d_b {
        return Err(QError::DimMismatch(format!(
            "operator is {}x{}, expected {}",
            m.nrows(),
            m.ncols(),
            d_a * d_b
        )));
    }
    if i >= d_a {
        return Err(QError::IndexOutOfRange { index: i, dim: d_a });
    }
    let a = basis_a.column(i);
    let mut out = CMat::zeros(d_b, d_b);
    for k in 0..d_a {
        let ak = a[k].conj();
        if ak.norm_sqr() == 0.0 {
            continue;
        }
        for l in 0..d_a {
            let w = ak * a[l];
            if w.norm_sqr() == 0.0 {
                continue;
            }
            for r in 0..d_b {
                for c in 0..d_b {
                    out[(r, c)] += w * m[(k * d_b + r, l * d_b + c)];
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use approx::assert_abs_diff_eq;

    fn cm(rows: usize, cols: usize, data: &[(f64, f64)]) -> CMat {
        let entries: Vec<Complex64> = data.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        CMat::from_row_slice(rows, cols, &entries)
    }

    fn cv(data: &[(f64, f64)]) -> CVec {
        CVec::from_iterator(data.len(), data.iter().map(|&(re, im)| Complex64::new(re, im)))
    }

    #[test]
    fn identity_over_four_is_accepted() {
        let m = linalg::identity(4) * Complex64::new(0.25, 0.0);
        let rho = DensityMatrix::new(m, &[2, 2]).unwrap();
        let spectral = rho.eigh();
        for l in &spectral.eigenvalues {
            assert_abs_diff_eq!(*l, 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonal_state_accepted() {
        let m = cm(2, 2, &[(0.6, 0.0), (0.0, 0.0), (0.0, 0.0), (0.4, 0.0)]);
        assert!(DensityMatrix::new(m, &[2]).is_ok());
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let m = cm(2, 2, &[(1.2, 0.0), (0.0, 0.0), (0.0, 0.0), (-0.2, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(m, &[2]),
            Err(QError::NotPositive(_))
        ));
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = cm(2, 2, &[(0.5, 0.0), (0.3, 0.0), (0.0, 0.0), (0.5, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(m, &[2]),
            Err(QError::NotHermitian(_))
        ));
    }

    #[test]
    fn trace_mismatch_rejected() {
        let m = cm(2, 2, &[(0.9, 0.0), (0.0, 0.0), (0.0, 0.0), (0.9, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(m, &[2]),
            Err(QError::TraceMismatch(_))
        ));
    }

    #[test]
    fn bad_subsystem_dims_rejected() {
        let m = linalg::identity(4) * Complex64::new(0.25, 0.0);
        assert!(matches!(
            DensityMatrix::new(m, &[2, 3]),
            Err(QError::DimMismatch(_))
        ));
    }

    #[test]
    fn eigh_diag_and_pure() {
        let rho =
            DensityMatrix::new(cm(2, 2, &[(0.75, 0.0), (0.0, 0.0), (0.0, 0.0), (0.25, 0.0)]), &[2])
                .unwrap();
        let s = rho.eigh();
        assert_abs_diff_eq!(s.eigenvalues[0], 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(s.eigenvalues[1], 0.25, epsilon = 1e-12);

        let psi = PureState::new(cv(&[(1.0, 0.0), (0.0, 0.0)]), &[2]).unwrap();
        let s = psi.projector().eigh();
        assert_abs_diff_eq!(s.eigenvalues[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.eigenvalues[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn schmidt_bell_state() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::new(cv(&[(r, 0.0), (0.0, 0.0), (0.0, 0.0), (r, 0.0)]), &[2, 2]).unwrap();
        let schmidt = schmidt_decompose(&psi).unwrap();
        assert_eq!(schmidt.rank(), 2);
        assert_abs_diff_eq!(schmidt.coefficients[0], r, epsilon = 1e-12);
        assert_abs_diff_eq!(schmidt.coefficients[1], r, epsilon = 1e-12);
        let rec = schmidt.reconstruct();
        // reconstruction matches up to the (fixed) phase convention
        let overlap: Complex64 = rec
            .iter()
            .zip(psi.amplitudes().iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn schmidt_product_state_rank_one() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // |0> (x) |+>
        let psi = PureState::new(cv(&[(r, 0.0), (r, 0.0), (0.0, 0.0), (0.0, 0.0)]), &[2, 2]).unwrap();
        let schmidt = schmidt_decompose(&psi).unwrap();
        assert_eq!(schmidt.rank(), 1);
        assert_abs_diff_eq!(schmidt.coefficients[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn schmidt_asymmetric_coefficients() {
        let a = 0.8f64.sqrt();
        let b = 0.2f64.sqrt();
        let psi = PureState::new(cv(&[(a, 0.0), (0.0, 0.0), (0.0, 0.0), (b, 0.0)]), &[2, 2]).unwrap();
        let schmidt = schmidt_decompose(&psi).unwrap();
        assert_abs_diff_eq!(schmidt.coefficients[0], a, epsilon = 1e-12);
        assert_abs_diff_eq!(schmidt.coefficients[1], b, epsilon = 1e-12);
    }

    #[test]
    fn schmidt_rejects_single_system() {
        let psi = PureState::new(cv(&[(1.0, 0.0), (0.0, 0.0)]), &[2]).unwrap();
        assert!(matches!(schmidt_decompose(&psi), Err(QError::NotBipartite)));
    }

    #[test]
    fn conditional_operator_bell_block() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::new(cv(&[(r, 0.0), (0.0, 0.0), (0.0, 0.0), (r, 0.0)]), &[2, 2]).unwrap();
        let rho = psi.projector();
        let basis = linalg::identity(2);
        let block = conditional_operator(rho.matrix(), &[2, 2], 0, &basis).unwrap();
        assert_abs_diff_eq!(block[(0, 0)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(block[(1, 1)].re, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn conditional_operator_identity_and_zero_cases() {
        let rho = DensityMatrix::maximally_mixed(&[2, 2]);
        let basis = linalg::identity(2);
        for i in 0..2 {
            let block = conditional_operator(rho.matrix(), &[2, 2], i, &basis).unwrap();
            assert_abs_diff_eq!(block[(0, 0)].re, 0.25, epsilon = 1e-12);
            assert_abs_diff_eq!(block[(1, 1)].re, 0.25, epsilon = 1e-12);
            assert_abs_diff_eq!(block[(0, 1)].norm(), 0.0, epsilon = 1e-12);
        }

        // M = |01><01|, i = 1 -> zero block
        let psi = PureState::basis_state(1, &[2, 2]).unwrap();
        let block = conditional_operator(psi.projector().matrix(), &[2, 2], 1, &basis).unwrap();
        assert!(linalg::max_abs(&block) < 1e-12);

        assert!(matches!(
            conditional_operator(rho.matrix(), &[2, 2], 5, &basis),
            Err(QError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn spectral_from_parts_validates() {
        let ok = SpectralDecomposition::from_parts(vec![0.5, 0.5], linalg::identity(2));
        assert!(ok.is_ok());
        let bad_vectors = cm(2, 2, &[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        assert!(SpectralDecomposition::from_parts(vec![0.5, 0.5], bad_vectors).is_err());
    }

    #[test]
    fn reconstruction_error_is_small() {
        let m = cm(
            2,
            2,
            &[(0.7, 0.0), (0.1, 0.2), (0.1, -0.2), (0.3, 0.0)],
        );
        let rho = DensityMatrix::new(m, &[2]).unwrap();
        let rec = rho.eigh().reconstruct();
        assert!(max_abs_diff(&rec, rho.matrix()) < 1e-10);
    }
}
