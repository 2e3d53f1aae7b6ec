//! Complex linear algebra over factorized Hilbert spaces.
//!
//! Composite basis indices are row-major with subsystem 0 as the most
//! significant digit: for dims `[n0, n1, n2]` the basis state `|a b c>` has
//! index `(a * n1 + b) * n2 + c`.
//!
//! Subsystems are numbered from 0 throughout the library.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{bail, Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance for normalization, trace and Hermiticity checks on ingestion.
pub const INGEST_TOL: f64 = 1e-8;
/// Tolerance used for internal consistency checks.
pub const INTERNAL_TOL: f64 = 1e-10;
/// Eigenvalues in `[-NEG_EIGEN_TOL, 0)` are clipped on ingestion.
pub const NEG_EIGEN_TOL: f64 = 1e-10;

/// Local dimensions of an N-partite system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemShape {
    dims: Vec<usize>,
}

impl SystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            bail!(Shape, "a system needs at least one subsystem");
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            bail!(Shape, "subsystem dimension {d} is not physical (need >= 2)");
        }
        Ok(Self { dims })
    }

    /// `n` subsystems of equal dimension `d`.
    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::uniform(n, 2)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of subsystems N.
    pub fn arity(&self) -> usize {
        self.dims.len()
    }

    /// Total dimension D = prod n_i.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major strides of the composite index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    /// Splits a composite index into per-subsystem digits.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&x, &d)| acc * d + x)
    }

    /// Concatenation: the shape of a tensor product.
    pub fn concat(&self, other: &SystemShape) -> SystemShape {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        SystemShape { dims }
    }

    /// Shape restricted to the given subsystems, in the given order.
    pub fn select(&self, members: &[usize]) -> SystemShape {
        SystemShape {
            dims: members.iter().map(|&i| self.dims[i]).collect(),
        }
    }

    pub fn ensure_same(&self, other: &SystemShape) -> Result<()> {
        if self != other {
            bail!(Shape, "shape mismatch: {:?} vs {:?}", self.dims, other.dims);
        }
        Ok(())
    }
}

/// Pure state amplitudes over the product space.
///
/// Vectors with squared norm in `(0, 1 + 1e-8]` are accepted; ensemble
/// members of a mixed state are subnormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    shape: SystemShape,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(shape: SystemShape, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != shape.total_dim() {
            bail!(
                Shape,
                "{} amplitudes for total dimension {}",
                amplitudes.len(),
                shape.total_dim()
            );
        }
        let n2 = amplitudes.norm_squared();
        if !n2.is_finite() || n2 <= 0.0 || n2 > 1.0 + INGEST_TOL {
            bail!(Validation, "squared norm {n2} outside (0, 1]");
        }
        Ok(Self { shape, amplitudes })
    }

    /// Like [`StateVector::new`] but insists on unit norm.
    pub fn normalized(shape: SystemShape, amplitudes: CVector) -> Result<Self> {
        let state = Self::new(shape, amplitudes)?;
        if !state.is_normalized() {
            bail!(
                Validation,
                "state is not normalized: <psi|psi> = {}",
                state.norm_sqr()
            );
        }
        Ok(state)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn from_unnormalized(shape: SystemShape, amplitudes: CVector) -> Result<Self> {
        let n = amplitudes.norm();
        if !n.is_finite() || n == 0.0 {
            bail!(Validation, "cannot normalize a zero vector");
        }
        Self::normalized(shape, amplitudes.unscale(n))
    }

    /// Computational basis state with the given digits.
    pub fn basis(shape: SystemShape, digits: &[usize]) -> Result<Self> {
        if digits.len() != shape.arity() || digits.iter().zip(shape.dims()).any(|(&x, &d)| x >= d)
        {
            bail!(Shape, "basis digits {digits:?} do not fit shape {:?}", shape.dims());
        }
        let mut amps = CVector::zeros(shape.total_dim());
        amps[shape.index_of(digits)] = Complex64::new(1.0, 0.0);
        Self::normalized(shape, amps)
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_parts(shape: SystemShape, amplitudes: CVector) -> Self {
        debug_assert_eq!(amplitudes.len(), shape.total_dim());
        Self { shape, amplitudes }
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= INGEST_TOL
    }

    /// Multiplies the amplitudes by a real factor; the result must still be
    /// subnormalized.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.shape.clone(), self.amplitudes.scale(t))
    }

    /// Applies a linear map on the full space.
    pub fn apply(&self, op: &CMatrix) -> Result<Self> {
        let d = self.shape.total_dim();
        if op.nrows() != d || op.ncols() != d {
            bail!(Shape, "operator is {}x{}, state dimension {d}", op.nrows(), op.ncols());
        }
        Self::new(self.shape.clone(), op * &self.amplitudes)
    }

    /// The projector `|psi><psi|` (requires unit norm).
    pub fn projector(&self) -> Result<DensityMatrix> {
        if !self.is_normalized() {
            bail!(Validation, "projector of a non-normalized state");
        }
        let m = &self.amplitudes * self.amplitudes.adjoint();
        Ok(DensityMatrix::from_parts(self.shape.clone(), m))
    }
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    shape: SystemShape,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates a candidate density matrix.
    ///
    /// Hermiticity and trace are checked at 1e-8. Eigenvalues in
    /// `[-1e-10, 0)` are clipped to zero and the matrix rebuilt and
    /// renormalized (rounding-level negatives are left alone); anything
    /// more negative is rejected.
    pub fn new(shape: SystemShape, matrix: CMatrix) -> Result<Self> {
        let d = shape.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            bail!(Shape, "matrix is {}x{}, expected {d}x{d}", matrix.nrows(), matrix.ncols());
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            bail!(Validation, "matrix has non-finite entries");
        }
        let herm_err = hermiticity_error(&matrix);
        if herm_err > INGEST_TOL {
            bail!(Validation, "matrix is not Hermitian (deviation {herm_err:e})");
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > INGEST_TOL || tr.im.abs() > INGEST_TOL {
            bail!(Validation, "trace {tr} is not 1");
        }
        // (A + A^H)/2 reproduces an exactly Hermitian input bit for bit.
        let matrix = (&matrix + matrix.adjoint()).unscale(2.0);
        let eig = SymmetricEigen::new(matrix.clone());
        let min = eig.eigenvalues.min();
        if min < -NEG_EIGEN_TOL {
            bail!(Validation, "matrix is not positive semidefinite (eigenvalue {min:e})");
        }
        // Eigenvalues at rounding level are zero already; rebuilding would
        // only move the noise around and break bit-exact round trips.
        let roundoff = 16.0 * d as f64 * f64::EPSILON;
        if min < -roundoff {
            let clipped = eig.eigenvalues.map(|l| l.max(0.0));
            let total: f64 = clipped.sum();
            let v = &eig.eigenvectors;
            let rebuilt = v
                * CMatrix::from_diagonal(&clipped.map(|l| Complex64::new(l / total, 0.0)))
                * v.adjoint();
            return Ok(Self { shape, matrix: rebuilt });
        }
        Ok(Self { shape, matrix })
    }

    pub(crate) fn from_parts(shape: SystemShape, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), shape.total_dim());
        Self { shape, matrix }
    }

    pub fn maximally_mixed(shape: SystemShape) -> Self {
        let d = shape.total_dim();
        let m = CMatrix::identity(d, d).unscale(d as f64);
        Self { shape, matrix: m }
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Kronecker product of two density matrices.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            shape: self.shape.concat(&other.shape),
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Convex combination `sum_i p_i rho_i`; weights must be nonnegative
    /// and sum to one.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            bail!(Domain, "empty mixture");
        };
        let shape = first.shape.clone();
        let d = shape.total_dim();
        let mut m = CMatrix::zeros(d, d);
        let mut total = 0.0;
        for (p, rho) in parts {
            if *p < 0.0 {
                bail!(Domain, "negative mixture weight {p}");
            }
            shape.ensure_same(&rho.shape)?;
            m += rho.matrix.scale(*p);
            total += p;
        }
        if (total - 1.0).abs() > INGEST_TOL {
            bail!(Domain, "mixture weights sum to {total}");
        }
        Self::new(shape, m)
    }

    /// Unitary conjugation `U rho U^H`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        let d = self.shape.total_dim();
        if u.nrows() != d || u.ncols() != d {
            bail!(Shape, "operator is {}x{}, state dimension {d}", u.nrows(), u.ncols());
        }
        Ok(Self::from_parts(self.shape.clone(), u * &self.matrix * u.adjoint()))
    }
}

/// Largest entry of `|A - A^H|`.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    let mut err = 0.0_f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            err = err.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    err
}

/// A nonempty proper subset of the subsystems, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemSubset {
    members: Vec<usize>,
}

impl SubsystemSubset {
    pub fn new(mut members: Vec<usize>, arity: usize) -> Result<Self> {
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            bail!(Shape, "duplicate subsystem index in {members:?}");
        }
        if members.is_empty() || members.len() >= arity {
            bail!(Shape, "subset {members:?} is not a nonempty proper subset of {arity} subsystems");
        }
        if let Some(i) = members.iter().find(|&&i| i >= arity) {
            bail!(Shape, "subsystem index {i} out of range for {arity} subsystems");
        }
        Ok(Self { members })
    }

    /// Subset whose members are the set bits of `mask`.
    pub fn from_mask(mask: u64, arity: usize) -> Result<Self> {
        let members = (0..arity).filter(|&i| mask >> i & 1 == 1).collect();
        Self::new(members, arity)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn complement(&self, arity: usize) -> SubsystemSubset {
        SubsystemSubset {
            members: (0..arity).filter(|i| !self.members.contains(i)).collect(),
        }
    }
}

/// Kronecker product of two states; shapes concatenate.
pub fn tensor_product(a: &StateVector, b: &StateVector) -> StateVector {
    StateVector::from_parts(
        a.shape.concat(&b.shape),
        a.amplitudes.kronecker(&b.amplitudes),
    )
}

/// For each full index, its (kept, traced) index pair.
fn split_indices(shape: &SystemShape, keep: &[usize]) -> (Vec<(usize, usize)>, usize, usize) {
    let traced: Vec<usize> = (0..shape.arity()).filter(|i| !keep.contains(i)).collect();
    let keep_shape = shape.select(keep);
    let traced_dims: Vec<usize> = traced.iter().map(|&i| shape.dims()[i]).collect();
    let dk = keep_shape.total_dim();
    let dt: usize = traced_dims.iter().product();
    let map = (0..shape.total_dim())
        .map(|idx| {
            let digits = shape.digits(idx);
            let k = keep.iter().fold(0, |acc, &i| acc * shape.dims()[i] + digits[i]);
            let t = traced.iter().fold(0, |acc, &i| acc * shape.dims()[i] + digits[i]);
            (k, t)
        })
        .collect();
    (map, dk, dt)
}

/// Reduced density matrix on `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &SubsystemSubset) -> Result<DensityMatrix> {
    let shape = rho.shape();
    let members = keep.members();
    if members.iter().any(|&i| i >= shape.arity()) || members.len() >= shape.arity() {
        bail!(Shape, "subset {members:?} invalid for {} subsystems", shape.arity());
    }
    let (map, dk, dt) = split_indices(shape, members);
    // full[k][t] = composite index
    let mut full = vec![0usize; dk * dt];
    for (idx, &(k, t)) in map.iter().enumerate() {
        full[k * dt + t] = idx;
    }
    let m = rho.matrix();
    let reduced = CMatrix::from_fn(dk, dk, |i, j| {
        (0..dt).map(|t| m[(full[i * dt + t], full[j * dt + t])]).sum()
    });
    Ok(DensityMatrix::from_parts(shape.select(members), reduced))
}

/// Reshapes a pure state into the `d_keep x d_rest` coefficient matrix.
fn bipartite_coefficients(psi: &StateVector, keep: &[usize]) -> CMatrix {
    let (map, dk, dt) = split_indices(psi.shape(), keep);
    let mut m = CMatrix::zeros(dk, dt);
    for (idx, &(k, t)) in map.iter().enumerate() {
        m[(k, t)] = psi.amplitudes()[idx];
    }
    m
}

/// Reduced density matrix of a pure state (not renormalized).
pub fn reduced_from_pure(psi: &StateVector, keep: &SubsystemSubset) -> Result<CMatrix> {
    let members = keep.members();
    if members.iter().any(|&i| i >= psi.shape().arity()) || members.len() >= psi.shape().arity() {
        bail!(Shape, "subset {members:?} invalid for {} subsystems", psi.shape().arity());
    }
    let m = bipartite_coefficients(psi, members);
    Ok(&m * m.adjoint())
}

/// `Tr rho^2`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    matrix_purity(rho.matrix())
}

/// `Tr A^2` for a Hermitian matrix, as the squared Frobenius norm.
pub fn matrix_purity(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Permutation taking the two-copy index `a * D + b` to the index on
/// `(H_0 x H_0) x (H_1 x H_1) x ...` with digits `(a_0 b_0 a_1 b_1 ...)`.
pub fn two_copy_permutation(shape: &SystemShape) -> Vec<usize> {
    let d = shape.total_dim();
    let dims = shape.dims();
    let mut pair_strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        pair_strides[i] = pair_strides[i + 1] * dims[i + 1] * dims[i + 1];
    }
    let digits: Vec<Vec<usize>> = (0..d).map(|i| shape.digits(i)).collect();
    let mut perm = Vec::with_capacity(d * d);
    for a in &digits {
        for b in &digits {
            let idx = (0..dims.len())
                .map(|i| (a[i] * dims[i] + b[i]) * pair_strides[i])
                .sum();
            perm.push(idx);
        }
    }
    perm
}

fn check_doubled(v: &CVector, shape: &SystemShape) -> Result<()> {
    let d = shape.total_dim();
    if v.len() != d * d {
        bail!(Shape, "doubled-space vector has length {}, expected {}", v.len(), d * d);
    }
    Ok(())
}

/// Re-indexes a vector on `(x_i H_i) x (x_i H_i)` onto `x_i (H_i x H_i)`.
pub fn two_copy_reorder(psi_psi: &CVector, shape: &SystemShape) -> Result<CVector> {
    check_doubled(psi_psi, shape)?;
    let perm = two_copy_permutation(shape);
    let mut out = CVector::zeros(psi_psi.len());
    for (src, &dst) in perm.iter().enumerate() {
        out[dst] = psi_psi[src];
    }
    Ok(out)
}

/// Inverse of [`two_copy_reorder`].
pub fn two_copy_restore(paired: &CVector, shape: &SystemShape) -> Result<CVector> {
    check_doubled(paired, shape)?;
    let perm = two_copy_permutation(shape);
    Ok(CVector::from_iterator(
        paired.len(),
        perm.iter().map(|&src| paired[src]),
    ))
}

/// Reorders subsystems: subsystem `i` of the input lands at position
/// `placement[i]` of the output.
pub fn permute_subsystems(psi: &StateVector, placement: &[usize]) -> Result<StateVector> {
    let shape = psi.shape();
    let n = shape.arity();
    let mut seen = vec![false; n];
    if placement.len() != n {
        bail!(Shape, "placement has {} entries for {n} subsystems", placement.len());
    }
    for &p in placement {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            bail!(Shape, "placement {placement:?} is not a permutation");
        }
    }
    let mut out_dims = vec![0; n];
    for (i, &p) in placement.iter().enumerate() {
        out_dims[p] = shape.dims()[i];
    }
    let out_shape = SystemShape::new(out_dims)?;
    let mut out = CVector::zeros(shape.total_dim());
    let mut target = vec![0; n];
    for idx in 0..shape.total_dim() {
        let digits = shape.digits(idx);
        for (i, &p) in placement.iter().enumerate() {
            target[p] = digits[i];
        }
        out[out_shape.index_of(&target)] = psi.amplitudes()[idx];
    }
    Ok(StateVector::from_parts(out_shape, out))
}

/// Kronecker product of per-subsystem operators, subsystem 0 leftmost.
pub fn local_operator(factors: &[CMatrix]) -> Result<CMatrix> {
    let Some(first) = factors.first() else {
        return Err(Error::Shape("no local factors".into()));
    };
    Ok(factors[1..]
        .iter()
        .fold(first.clone(), |acc, f| acc.kronecker(f)))
}
