//! Dense complex linear algebra for registers of at most three qubits.
//!
//! Conventions used everywhere in the crate:
//!
//! * qubit 1 is the leftmost (slowest-varying) tensor factor, so the label
//!   `"10"` means qubit 1 excited and qubit 2 in its ground state;
//! * within a qubit, index 0 is `|0⟩` (ground) and index 1 is `|1⟩` (excited),
//!   hence the excitation number of a basis state is the popcount of its index.
//!
//! Matrices are stored row-major in a flat `Vec`. Eigendecompositions are
//! delegated to `nalgebra`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest register handled by this crate.
pub const MAX_QUBITS: usize = 3;

/// Numerical tolerances shared by validation and property tests.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub normalization: f64,
    pub positivity: f64,
}

pub const TOL: Tolerances = Tolerances {
    hermiticity: 1e-10,
    trace: 1e-9,
    normalization: 1e-12,
    positivity: 1e-10,
};

fn qubits_for_dim(dim: usize) -> Result<usize> {
    match dim {
        2 => Ok(1),
        4 => Ok(2),
        8 => Ok(3),
        _ => Err(Error::InvalidParams(format!(
            "register dimension must be 2, 4 or 8, got {dim}"
        ))),
    }
}

/// Bit-string label of a computational basis index, qubit 1 first.
pub fn basis_label(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|q| {
            if index >> (n_qubits - 1 - q) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Total excitation number of a basis index.
pub fn excitation(index: usize) -> usize {
    index.count_ones() as usize
}

/// Square complex matrix. No structure is assumed: non-Hermitian
/// Hamiltonians live here too.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let data = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self { dim, data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::NotSquare {
                rows: dim,
                cols: bad.len(),
            });
        }
        Ok(Self {
            dim,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Build from a row-major slice of length `dim * dim`.
    pub fn from_row_major(dim: usize, data: &[C64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(Self {
            dim,
            data: data.to_vec(),
        })
    }

    /// `|0⟩⟨1|`
    pub fn lowering() -> Self {
        Self::from_fn(2, |i, j| if i == 0 && j == 1 { ONE } else { ZERO })
    }

    /// `|1⟩⟨0|`
    pub fn raising() -> Self {
        Self::from_fn(2, |i, j| if i == 1 && j == 0 { ONE } else { ZERO })
    }

    /// `|1⟩⟨1|`
    pub fn excited_projector() -> Self {
        Self::from_fn(2, |i, j| if i == 1 && j == 1 { ONE } else { ZERO })
    }

    pub fn pauli_y() -> Self {
        Self::from_fn(2, |i, j| match (i, j) {
            (0, 1) => -I,
            (1, 0) => I,
            _ => ZERO,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `(M + M†)/2`
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    /// `(M − M†)/2`
    pub fn anti_hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| {
            (self.get(i, j) - self.get(j, i).conj()) * 0.5
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }

    /// Restriction to the given basis indices, in the order given.
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), |a, b| self.get(indices[a], indices[b]))
    }
}

/// Kronecker product `a ⊗ b`; `a` is the slower-varying factor.
pub fn tensor_product(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    let (m, n) = (a.dim, b.dim);
    OperatorMatrix::from_fn(m * n, |i, j| a.get(i / n, j / n) * b.get(i % n, j % n))
}

/// Embed a single-qubit operator on qubit `j` (1-based) of an
/// `n_qubits` register.
pub fn embed_single(n_qubits: usize, j: usize, op: &OperatorMatrix) -> Result<OperatorMatrix> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS || j == 0 || j > n_qubits {
        return Err(Error::QubitIndex { index: j, n_qubits });
    }
    let id = OperatorMatrix::identity(2);
    let mut out = OperatorMatrix::identity(1);
    for q in 1..=n_qubits {
        out = tensor_product(&out, if q == j { op } else { &id });
    }
    Ok(out)
}

/// `σⱼ⁻ = |0⟩ⱼ⟨1|` on qubit `j` of an `n_qubits` register.
pub fn embed_lowering(n_qubits: usize, j: usize) -> Result<OperatorMatrix> {
    embed_single(n_qubits, j, &OperatorMatrix::lowering())
}

pub fn embed_raising(n_qubits: usize, j: usize) -> Result<OperatorMatrix> {
    embed_single(n_qubits, j, &OperatorMatrix::raising())
}

/// Amplitude vector over the computational basis. May be unnormalized
/// (the no-jump state carries its survival probability in its norm).
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<C64>,
}

impl PureState {
    pub fn from_amps(amps: Vec<C64>) -> Result<Self> {
        qubits_for_dim(amps.len())?;
        Ok(Self { amps })
    }

    /// Computational basis state from a label such as `"10"` or `"100"`.
    pub fn basis(label: &str) -> Result<Self> {
        let n = label.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidParams(format!("bad basis label {label:?}")));
        }
        let index = usize::from_str_radix(label, 2)
            .map_err(|_| Error::InvalidParams(format!("bad basis label {label:?}")))?;
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Ok(Self { amps })
    }

    /// Superposition `Σ cₖ |labelₖ⟩`, not normalized.
    pub fn superposition(terms: &[(C64, &str)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidParams("empty superposition".into()))?;
        let mut out = Self::basis(first.1)?.scaled(ZERO);
        for &(c, label) in terms {
            let k = Self::basis(label)?;
            if k.dim() != out.dim() {
                return Err(Error::DimensionMismatch {
                    expected: out.dim(),
                    got: k.dim(),
                });
            }
            for (o, a) in out.amps.iter_mut().zip(&k.amps) {
                *o += c * a;
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amp(&self, label: &str) -> Result<C64> {
        let index = usize::from_str_radix(label, 2)
            .map_err(|_| Error::InvalidParams(format!("bad basis label {label:?}")))?;
        if label.len() != self.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits(),
                got: label.len(),
            });
        }
        Ok(self.amps[index])
    }

    pub fn basis_labels(&self) -> Vec<String> {
        let n = self.n_qubits();
        (0..self.dim()).map(|i| basis_label(i, n)).collect()
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            amps: self.amps.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n2 = norm_squared(self);
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::Numeric(format!(
                "cannot normalize state with norm² {n2}"
            )));
        }
        Ok(self.scaled(C64::from(1.0 / n2.sqrt())))
    }

    pub fn is_normalized(&self) -> bool {
        (norm_squared(self) - 1.0).abs() <= TOL.normalization
    }
}

pub fn norm_squared(s: &PureState) -> f64 {
    s.amps.iter().map(|a| a.norm_sqr()).sum()
}

/// `⟨a|b⟩`
pub fn inner(a: &PureState, b: &PureState) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

pub fn apply(op: &OperatorMatrix, s: &PureState) -> Result<PureState> {
    if op.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            got: s.dim(),
        });
    }
    let n = op.dim();
    let amps = (0..n)
        .map(|i| (0..n).map(|j| op.get(i, j) * s.amps[j]).sum())
        .collect();
    Ok(PureState { amps })
}

/// `|s⟩⟨s|` as a density matrix. The state is used as given, so an
/// unnormalized input yields a matrix whose trace is its norm².
pub fn outer(s: &PureState) -> OperatorMatrix {
    let n = s.dim();
    OperatorMatrix::from_fn(n, |i, j| s.amps[i] * s.amps[j].conj())
}

pub fn pure_to_density(s: &PureState) -> Result<DensityMatrix> {
    if !s.is_normalized() {
        return Err(Error::InvalidDensity(format!(
            "state has norm² {}, expected 1",
            norm_squared(s)
        )));
    }
    Ok(DensityMatrix { m: outer(s) })
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &OperatorMatrix) -> Vec<f64> {
    let herm = m.hermitian_part().to_nalgebra();
    let mut ev: Vec<f64> = SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: OperatorMatrix,
}

impl DensityMatrix {
    /// Validate against [`TOL`] and wrap.
    pub fn new(m: OperatorMatrix) -> Result<Self> {
        qubits_for_dim(m.dim())?;
        if !m.is_finite() {
            return Err(Error::InvalidDensity("non-finite entries".into()));
        }
        let herm = m.hermiticity_error();
        if herm > TOL.hermiticity {
            return Err(Error::InvalidDensity(format!("hermiticity error {herm:e}")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TOL.trace || tr.im.abs() > TOL.trace {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min_ev = hermitian_eigenvalues(&m)[0];
        if min_ev < -TOL.positivity {
            return Err(Error::InvalidDensity(format!("eigenvalue {min_ev:e}")));
        }
        Ok(Self { m })
    }

    /// Wrap without validation; for integrator outputs checked by callers.
    pub fn new_unchecked(m: OperatorMatrix) -> Self {
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn n_qubits(&self) -> usize {
        self.m.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> OperatorMatrix {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m.get(i, j)
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    /// Population of a basis state, e.g. `population("10")`.
    pub fn population(&self, label: &str) -> Result<f64> {
        let index = usize::from_str_radix(label, 2)
            .map_err(|_| Error::InvalidParams(format!("bad basis label {label:?}")))?;
        if label.len() != self.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits(),
                got: label.len(),
            });
        }
        Ok(self.m.get(index, index).re)
    }
}

/// `½ Tr|ρ − σ|`
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let diff = a.m.sub(&b.m)?;
    Ok(0.5
        * hermitian_eigenvalues(&diff)
            .iter()
            .map(|e| e.abs())
            .sum::<f64>())
}

/// Reduced density matrix on the qubits in `keep` (1-based, any order;
/// the output keeps them in increasing order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() >= n || kept.iter().any(|&q| q == 0 || q > n) {
        return Err(Error::InvalidSubset(format!(
            "keep {keep:?} must be a nonempty strict subset of 1..={n}"
        )));
    }
    let traced: Vec<usize> = (1..=n).filter(|q| !kept.contains(q)).collect();
    let bit = |q: usize| n - q;
    // scatter sub-register indices into full-register bit positions
    let compose = |sub: usize, qubits: &[usize]| -> usize {
        qubits.iter().enumerate().fold(0usize, |acc, (pos, &q)| {
            let b = sub >> (qubits.len() - 1 - pos) & 1;
            acc | b << bit(q)
        })
    };
    let dk = 1usize << kept.len();
    let dt = 1usize << traced.len();
    let m = OperatorMatrix::from_fn(dk, |i, j| {
        let (fi, fj) = (compose(i, &kept), compose(j, &kept));
        (0..dt)
            .map(|k| {
                let fk = compose(k, &traced);
                rho.get(fi | fk, fj | fk)
            })
            .sum()
    });
    Ok(DensityMatrix { m })
}

/// `(σy ⊗ σy) ρ* (σy ⊗ σy)`
pub fn spin_flip(rho: &DensityMatrix) -> Result<OperatorMatrix> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let yy = tensor_product(&OperatorMatrix::pauli_y(), &OperatorMatrix::pauli_y());
    yy.matmul(&rho.m.conj())?.matmul(&yy)
}

/// Wootters concurrence of a two-qubit density matrix.
///
/// The square roots of the eigenvalues of `ρ ρ̃` are the singular values of
/// `√ρ √ρ̃`, which avoids taking square roots of roundoff-level eigenvalues.
/// Eigenvalues of `ρ` below `1e-14` of the largest are treated as zero.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let herm = rho.m.hermiticity_error();
    if herm > TOL.hermiticity {
        return Err(Error::InvalidDensity(format!("hermiticity error {herm:e}")));
    }
    let eig = SymmetricEigen::new(rho.m.hermitian_part().to_nalgebra());
    let (min, max) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if min < -TOL.positivity {
        return Err(Error::InvalidDensity(format!("eigenvalue {min:e}")));
    }
    let floor = 1e-14 * max;
    let sqrt_vals = eig
        .eigenvalues
        .map(|v| C64::from(if v > floor { v.sqrt() } else { 0.0 }));
    let sqrt_rho =
        &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();
    let yy = tensor_product(&OperatorMatrix::pauli_y(), &OperatorMatrix::pauli_y()).to_nalgebra();
    let sqrt_flipped = &yy * sqrt_rho.conjugate() * &yy;
    let mut mu: Vec<f64> = (&sqrt_rho * sqrt_flipped)
        .singular_values()
        .iter()
        .copied()
        .collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).clamp(0.0, 1.0))
}
