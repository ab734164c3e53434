//! Dense complex linear algebra for small tensor-product Hilbert spaces.
//!
//! Everything here is exact (double precision, no truncation) and sized for
//! desk-scale dimensions. The tensor index convention is fixed once and
//! inherited by every other module: the leftmost factor is the
//! slowest-varying index, so a basis vector |i⟩|j⟩|k⟩ over dimensions
//! [d0, d1, d2] lands at flat index (i·d1 + j)·d2 + k.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Absolute tolerance for state-vector normalization.
pub const TOL_NORM: f64 = 1e-10;
/// Absolute tolerance for Hermiticity checks.
pub const TOL_HERM: f64 = 1e-10;
/// Absolute tolerance for unit-trace checks.
pub const TOL_TRACE: f64 = 1e-10;
/// Eigenvalues above -TOL_PSD are accepted as non-negative.
pub const TOL_PSD: f64 = 1e-10;

/// Ordered list of subsystem dimensions, e.g. [2, 2, 3] for
/// a two-qubit laboratory register joined with a three-level probe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceStructure {
    dims: Vec<usize>,
}

impl SpaceStructure {
    /// Dimensions must all be positive; 1-dimensional factors are allowed.
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument(
                "space must have at least one factor".into(),
            ));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidArgument(
                "factor dimensions must be positive".into(),
            ));
        }
        Ok(Self { dims })
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Product of the dimensions of the given factors.
    pub fn sub_dim(&self, factors: &[usize]) -> usize {
        factors.iter().map(|&f| self.dims[f]).product()
    }

    /// Flat index of a multi-index, leftmost factor slowest.
    pub fn ravel(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        idx.iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    /// Inverse of [`ravel`](Self::ravel).
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for (slot, &d) in idx.iter_mut().zip(&self.dims).rev() {
            *slot = flat % d;
            flat /= d;
        }
        idx
    }
}

/// A normalized pure state on a labeled tensor-product space.
#[derive(Clone, Debug)]
pub struct StateVector {
    space: SpaceStructure,
    amplitudes: ComplexVector,
}

impl StateVector {
    pub fn new(space: SpaceStructure, amplitudes: ComplexVector) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.total_dim(),
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::NotNormalized((norm - 1.0).abs()));
        }
        Ok(Self { space, amplitudes })
    }

    /// Basis state |i⟩ over the given space.
    pub fn basis(space: SpaceStructure, flat_index: usize) -> Result<Self> {
        let n = space.total_dim();
        if flat_index >= n {
            return Err(Error::InvalidArgument(format!(
                "basis index {flat_index} out of range for dimension {n}"
            )));
        }
        let mut amps = ComplexVector::zeros(n);
        amps[flat_index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            space,
            amplitudes: amps,
        })
    }

    pub fn space(&self) -> &SpaceStructure {
        &self.space
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    /// The pure density operator |v⟩⟨v|.
    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            space: self.space.clone(),
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// A positive, Hermitian, unit-trace operator on a labeled space.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    space: SpaceStructure,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, positivity and unit trace at the module
    /// tolerances before accepting the matrix.
    pub fn new(space: SpaceStructure, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() != space.total_dim() || !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: space.total_dim(),
                got: matrix.nrows(),
            });
        }
        let verdict = validate_density(&matrix, TOL_PSD);
        if !verdict.valid {
            return Err(Error::InvalidDensity(verdict.summary()));
        }
        Ok(Self { space, matrix })
    }

    /// For internal use where validity is guaranteed by construction
    /// (e.g. the output of a completeness-checked channel).
    pub(crate) fn new_unchecked(space: SpaceStructure, matrix: ComplexMatrix) -> Self {
        Self { space, matrix }
    }

    pub fn space(&self) -> &SpaceStructure {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(space: SpaceStructure) -> Self {
        let d = space.total_dim();
        let m = ComplexMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0);
        Self { space, matrix: m }
    }
}

/// Kronecker product, consistent with the leftmost-slowest index convention.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Entrywise max-modulus of a matrix; the norm used for all deviation checks.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Reduced density operator on the kept factors, obtained by tracing out
/// the complement. Keeping every factor is the identity operation.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let space = rho.space();
    let n = space.num_factors();
    if keep.is_empty() {
        return Err(Error::InvalidArgument(
            "partial trace requires a nonempty set of kept factors".into(),
        ));
    }
    let mut seen = vec![false; n];
    for &f in keep {
        if f >= n {
            return Err(Error::InvalidArgument(format!(
                "factor index {f} out of range for {n} factors"
            )));
        }
        if seen[f] {
            return Err(Error::InvalidArgument(format!("duplicate factor index {f}")));
        }
        seen[f] = true;
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    let traced: Vec<usize> = (0..n).filter(|f| !seen[*f]).collect();

    let kept_dims: Vec<usize> = keep.iter().map(|&f| space.factor_dims()[f]).collect();
    let kept_space = SpaceStructure::new(kept_dims)?;
    let kd = kept_space.total_dim();

    if traced.is_empty() {
        return Ok(DensityOperator::new_unchecked(
            kept_space,
            rho.matrix().clone(),
        ));
    }

    let traced_dims: Vec<usize> = traced.iter().map(|&f| space.factor_dims()[f]).collect();
    let traced_space = SpaceStructure::new(traced_dims)?;
    let td = traced_space.total_dim();

    let mut out = ComplexMatrix::zeros(kd, kd);
    let mut full_row = vec![0usize; n];
    let mut full_col = vec![0usize; n];
    for r in 0..kd {
        let r_idx = kept_space.unravel(r);
        for c in 0..kd {
            let c_idx = kept_space.unravel(c);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..td {
                let t_idx = traced_space.unravel(t);
                for (slot, &f) in keep.iter().enumerate() {
                    full_row[f] = r_idx[slot];
                    full_col[f] = c_idx[slot];
                }
                for (slot, &f) in traced.iter().enumerate() {
                    full_row[f] = t_idx[slot];
                    full_col[f] = t_idx[slot];
                }
                acc += rho.matrix()[(space.ravel(&full_row), space.ravel(&full_col))];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(DensityOperator::new_unchecked(kept_space, out))
}

/// The rank-1 projector |v⟩⟨v| of a normalized state.
pub fn projector_from_vector(v: &StateVector) -> ComplexMatrix {
    v.amplitudes() * v.amplitudes().adjoint()
}

/// Outcome of a density-operator validity check; records how far each of
/// the three defining properties is from holding.
#[derive(Clone, Debug)]
pub struct DensityVerdict {
    /// max |m - m†| entrywise.
    pub hermiticity_deviation: f64,
    /// Smallest eigenvalue of the Hermitian-symmetrized matrix.
    pub min_eigenvalue: f64,
    /// |Tr m - 1|.
    pub trace_deviation: f64,
    pub hermitian: bool,
    pub positive: bool,
    pub unit_trace: bool,
    pub valid: bool,
}

impl DensityVerdict {
    pub fn summary(&self) -> String {
        let mut fails = Vec::new();
        if !self.hermitian {
            fails.push(format!(
                "hermiticity off by {:e}",
                self.hermiticity_deviation
            ));
        }
        if !self.positive {
            fails.push(format!("min eigenvalue {:e}", self.min_eigenvalue));
        }
        if !self.unit_trace {
            fails.push(format!("trace off by {:e}", self.trace_deviation));
        }
        if fails.is_empty() {
            "valid".into()
        } else {
            fails.join("; ")
        }
    }
}

/// Checks Hermiticity, positivity (via eigendecomposition of the
/// symmetrized matrix) and unit trace against the given absolute tolerance.
pub fn validate_density(m: &ComplexMatrix, tol: f64) -> DensityVerdict {
    let herm_dev = max_abs(&(m - m.adjoint()));
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eigs = sym.symmetric_eigen().eigenvalues;
    let min_eig = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    let trace_dev = (m.trace() - Complex64::new(1.0, 0.0)).norm();

    let hermitian = herm_dev <= tol;
    let positive = min_eig >= -tol;
    let unit_trace = trace_dev <= tol;
    DensityVerdict {
        hermiticity_deviation: herm_dev,
        min_eigenvalue: min_eig,
        trace_deviation: trace_dev,
        hermitian,
        positive,
        unit_trace,
        valid: hermitian && positive && unit_trace,
    }
}
