//! Two-spin operators, the row-major vectorization convention, the Heisenberg
//! superoperator `sigma_H` with its exact spectral decomposition, and matrix
//! functions lifted from scalar kernels.
//!
//! A density matrix is flattened one row at a time, so for 4×4 matrices
//! `vec(A B C) = (A ⊗ C^T) vec(B)` and the Liouvillian of a Hamiltonian `H`
//! is `-i (H ⊗ I - I ⊗ H^T)`.
//!
//! `sigma_H = H̄ ⊗ I - I ⊗ H̄^T` with `H̄ = σ₁·σ₂` has eigenvalues
//! {-4, 0, +4} with multiplicities {3, 10, 3}, and because its minimal
//! polynomial is `s(s-4)(s+4)` the three eigenprojectors are exact
//! polynomials in `sigma_H`:
//!
//! ```text
//! P(0)  = I - sigma_H²/16
//! P(±4) = (sigma_H² ± 4 sigma_H)/32
//! ```
//!
//! Every channel in this crate is a function of `sigma_H`, so matrix
//! functions are evaluated spectrally (`Σ f(s) P(s)`) rather than through a
//! general eigensolver.

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use ndarray::{Array1, Array2};

use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// `σ₁·σ₂ = σx⊗σx + σy⊗σy + σz⊗σz` in the computational basis.
pub fn heisenberg_hamiltonian() -> Array2<C64> {
    let i = C64::new(0.0, 1.0);
    let sx = ndarray::array![[ZERO, ONE], [ONE, ZERO]];
    let sy = ndarray::array![[ZERO, -i], [i, ZERO]];
    let sz = ndarray::array![[ONE, ZERO], [ZERO, -ONE]];
    let mut h = Array2::zeros((4, 4));
    for p in [&sx, &sy, &sz] {
        h = h + kron(p, p);
    }
    h
}

/// Kronecker product, row-major blocks.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    ndarray::linalg::kron(a, b)
}

/// Flatten a matrix into a column vector one row at a time.
pub fn vectorize(m: &Array2<C64>) -> Array1<C64> {
    Array1::from_iter(m.iter().cloned())
}

/// Inverse of [`vectorize`] for the two-spin case; rejects lengths ≠ 16.
pub fn devectorize(v: &Array1<C64>) -> Result<Array2<C64>> {
    if v.len() != 16 {
        return Err(Error::Dimension {
            expected: "length-16".into(),
            got: format!("length-{}", v.len()),
        });
    }
    Ok(Array2::from_shape_fn((4, 4), |(i, j)| v[4 * i + j]))
}

fn check_4x4(m: &Array2<C64>, what: &str) -> Result<()> {
    if m.dim() != (4, 4) {
        return Err(Error::Dimension {
            expected: format!("4x4 {what}"),
            got: format!("{}x{}", m.dim().0, m.dim().1),
        });
    }
    Ok(())
}

/// Two-spin state: 4×4, Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Array2<C64>);

impl DensityMatrix {
    pub const HERMITICITY_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-12;
    pub const EIGENVALUE_FLOOR: f64 = -1e-10;

    pub fn new(m: Array2<C64>) -> Result<Self> {
        check_4x4(&m, "density matrix")?;
        let mut herm_defect: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                herm_defect = herm_defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if herm_defect > Self::HERMITICITY_TOL {
            return Err(Error::NotDensityMatrix {
                reason: format!("hermiticity defect {herm_defect:.2e}"),
            });
        }
        let trace: C64 = (0..4).map(|i| m[(i, i)]).sum();
        if (trace - ONE).norm() > Self::TRACE_TOL {
            return Err(Error::NotDensityMatrix {
                reason: format!("trace {trace} differs from 1"),
            });
        }
        let min_eig = eig::hermitian_min_eigenvalue(&m);
        if min_eig < Self::EIGENVALUE_FLOOR {
            return Err(Error::NotDensityMatrix {
                reason: format!("minimum eigenvalue {min_eig:.2e}"),
            });
        }
        Ok(Self(m))
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩` for a 4-component state vector.
    pub fn from_pure(psi: &Array1<C64>) -> Result<Self> {
        if psi.len() != 4 {
            return Err(Error::Dimension {
                expected: "length-4".into(),
                got: format!("length-{}", psi.len()),
            });
        }
        let norm_sq: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::NotDensityMatrix {
                reason: "zero state vector".into(),
            });
        }
        let m = Array2::from_shape_fn((4, 4), |(i, j)| psi[i] * psi[j].conj() / norm_sq);
        Self::new(m)
    }

    pub fn maximally_mixed() -> Self {
        Self(Array2::from_diag_elem(4, C64::new(0.25, 0.0)))
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.0
    }
}

/// Linear map on vectorized two-spin states (16×16).
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    mat: Array2<C64>,
}

impl SuperOperator {
    pub const DIM: usize = 16;

    pub fn from_matrix(mat: Array2<C64>) -> Result<Self> {
        if mat.dim() != (16, 16) {
            return Err(Error::Dimension {
                expected: "16x16 superoperator".into(),
                got: format!("{}x{}", mat.dim().0, mat.dim().1),
            });
        }
        if mat.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Invalid(
                "superoperator has non-finite entries".into(),
            ));
        }
        Ok(Self { mat })
    }

    pub(crate) fn from_matrix_unchecked(mat: Array2<C64>) -> Self {
        debug_assert_eq!(mat.dim(), (16, 16));
        Self { mat }
    }

    pub fn identity() -> Self {
        Self {
            mat: Array2::eye(16),
        }
    }

    pub fn zero() -> Self {
        Self {
            mat: Array2::zeros((16, 16)),
        }
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.mat
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            mat: self.mat.mapv(|x| x * c),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.t().mapv(|c| c.conj()),
        }
    }

    pub fn apply_vec(&self, v: &Array1<C64>) -> Result<Array1<C64>> {
        if v.len() != 16 {
            return Err(Error::Dimension {
                expected: "length-16".into(),
                got: format!("length-{}", v.len()),
            });
        }
        Ok(self.mat.dot(v))
    }

    /// Image of a state under the map (not validated as a density matrix:
    /// generators and term-by-term pieces produce non-physical images).
    pub fn apply(&self, rho: &DensityMatrix) -> Array2<C64> {
        let v = self.mat.dot(&vectorize(rho.matrix()));
        devectorize(&v).expect("16-vector by construction")
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest violation of `tr(S ρ) = tr(ρ)` over all inputs: the diagonal
    /// rows of a trace-preserving map must sum column-wise to the flattened
    /// identity.
    pub fn trace_preservation_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..16 {
            let col_sum: C64 = (0..4).map(|k| self.mat[(5 * k, j)]).sum();
            let expected = if j % 5 == 0 { ONE } else { ZERO };
            worst = worst.max((col_sum - expected).norm());
        }
        worst
    }

    /// Largest violation of `S(ρ†) = S(ρ)†`, checked entry-wise via
    /// `S[(i,j),(m,n)] = conj(S[(j,i),(n,m)])`.
    pub fn hermiticity_preservation_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                for m in 0..4 {
                    for n in 0..4 {
                        let a = self.mat[(4 * i + j, 4 * m + n)];
                        let b = self.mat[(4 * j + i, 4 * n + m)].conj();
                        worst = worst.max((a - b).norm());
                    }
                }
            }
        }
        worst
    }

    /// Choi matrix under the row-major convention:
    /// `C[(m,k),(n,l)] = S[(k,l),(m,n)]`.
    pub fn choi(&self) -> Array2<C64> {
        let mut c = Array2::zeros((16, 16));
        for m in 0..4 {
            for k in 0..4 {
                for n in 0..4 {
                    for l in 0..4 {
                        c[(4 * m + k, 4 * n + l)] = self.mat[(4 * k + l, 4 * m + n)];
                    }
                }
            }
        }
        c
    }

    /// Minimum eigenvalue of the Choi matrix; ≥ 0 (to tolerance) iff the map
    /// is completely positive.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        eig::hermitian_min_eigenvalue(&self.choi())
    }
}

impl Mul for &SuperOperator {
    type Output = SuperOperator;
    fn mul(self, rhs: &SuperOperator) -> SuperOperator {
        SuperOperator {
            mat: self.mat.dot(&rhs.mat),
        }
    }
}

impl Add for &SuperOperator {
    type Output = SuperOperator;
    fn add(self, rhs: &SuperOperator) -> SuperOperator {
        SuperOperator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &SuperOperator {
    type Output = SuperOperator;
    fn sub(self, rhs: &SuperOperator) -> SuperOperator {
        SuperOperator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

/// Liouvillian of a (time-independent) Hamiltonian: `-i (H ⊗ I - I ⊗ H^T)`.
pub fn hamiltonian_superoperator(h: &Array2<C64>) -> Result<SuperOperator> {
    check_4x4(h, "Hamiltonian")?;
    let eye = Array2::eye(4);
    let comm = kron(h, &eye) - kron(&eye, &h.t().to_owned());
    Ok(SuperOperator::from_matrix_unchecked(
        comm.mapv(|c| c * C64::new(0.0, -1.0)),
    ))
}

/// The Heisenberg interaction in superoperator form,
/// `sigma_H = H̄ ⊗ I - I ⊗ H̄^T`; Hermitian with entries in {0, ±2}.
pub fn sigma_h() -> &'static SuperOperator {
    static SIGMA_H: OnceLock<SuperOperator> = OnceLock::new();
    SIGMA_H.get_or_init(|| {
        let h = heisenberg_hamiltonian();
        let eye = Array2::eye(4);
        let m = kron(&h, &eye) - kron(&eye, &h.t().to_owned());
        SuperOperator::from_matrix_unchecked(m)
    })
}

/// Spectral decomposition of `sigma_H`, grouped by distinct eigenvalue.
#[derive(Clone, Debug)]
pub struct SigmaHSpectrum {
    /// Distinct eigenvalues in ascending order: [-4, 0, +4].
    pub eigenvalues: [f64; 3],
    /// Orthogonal projectors aligned with `eigenvalues`.
    pub projectors: [Array2<C64>; 3],
    /// Eigenspace dimensions: [3, 10, 3].
    pub multiplicities: [usize; 3],
}

impl SigmaHSpectrum {
    /// `Σ f(s) P(s)` over the three distinct eigenvalues.
    pub fn lift<F: Fn(f64) -> C64>(&self, f: F) -> SuperOperator {
        let mut acc: Array2<C64> = Array2::zeros((16, 16));
        for (s, p) in self.eigenvalues.iter().zip(&self.projectors) {
            let fs = f(*s);
            acc.zip_mut_with(p, |a, b| *a += fs * b);
        }
        SuperOperator::from_matrix_unchecked(acc)
    }
}

/// Exact eigenprojectors of `sigma_H`, built once from its annihilating
/// polynomial; all entries are small integer multiples of 1/32.
pub fn sigma_h_spectrum() -> &'static SigmaHSpectrum {
    static SPECTRUM: OnceLock<SigmaHSpectrum> = OnceLock::new();
    SPECTRUM.get_or_init(|| {
        let s = sigma_h().matrix();
        let s2 = s.dot(s);
        let eye: Array2<C64> = Array2::eye(16);
        let p_zero = &eye - &s2.mapv(|c| c / 16.0);
        let p_plus = (&s2 + &s.mapv(|c| c * 4.0)).mapv(|c| c / 32.0);
        let p_minus = (&s2 - &s.mapv(|c| c * 4.0)).mapv(|c| c / 32.0);
        let spectrum = SigmaHSpectrum {
            eigenvalues: [-4.0, 0.0, 4.0],
            projectors: [p_minus, p_zero, p_plus],
            multiplicities: [3, 10, 3],
        };
        for (p, m) in spectrum.projectors.iter().zip(spectrum.multiplicities) {
            let tr: C64 = (0..16).map(|i| p[(i, i)]).sum();
            debug_assert!((tr.re - m as f64).abs() < 1e-12 && tr.im.abs() < 1e-12);
        }
        spectrum
    })
}

/// Lift a scalar kernel to a matrix function of `sigma_H`.
///
/// Exact for polynomials; a kernel returning non-finite values yields a
/// superoperator with non-finite entries (callers validate where needed).
pub fn apply_scalar_kernel<F: Fn(f64) -> C64>(f: F, spec: &SigmaHSpectrum) -> SuperOperator {
    spec.lift(f)
}

/// Matrix exponential by scaling and squaring with a Taylor core.
///
/// Accurate to ~1e-14 relative for the well-conditioned ≤16×16 matrices used
/// here (norms are scaled below 1/4 before the series).
pub fn matrix_exp(m: &Array2<C64>) -> Array2<C64> {
    let n = m.dim().0;
    assert_eq!(m.dim().0, m.dim().1, "matrix_exp requires a square matrix");
    let norm = m.iter().map(|c| c.norm()).fold(0.0, f64::max) * n as f64;
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings as i32);
    let scaled = m.mapv(|c| c * scale);

    let mut result: Array2<C64> = Array2::eye(n);
    let mut term: Array2<C64> = Array2::eye(n);
    for k in 1..=24 {
        term = term.dot(&scaled).mapv(|c| c / k as f64);
        result += &term;
        if term.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// `U ⊗ conj(U)`: the superoperator acting as `ρ ↦ U ρ U†`.
pub fn unitary_to_superop(u: &Array2<C64>) -> Result<SuperOperator> {
    check_4x4(u, "unitary")?;
    let gram = u.t().mapv(|c| c.conj()).dot(u);
    let mut defect: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let expected = if i == j { ONE } else { ZERO };
            defect = defect.max((gram[(i, j)] - expected).norm());
        }
    }
    const TOL: f64 = 1e-8;
    if defect > TOL {
        return Err(Error::NotUnitary {
            deviation: defect,
            tolerance: TOL,
        });
    }
    Ok(SuperOperator::from_matrix_unchecked(kron(
        u,
        &u.mapv(|c| c.conj()),
    )))
}

pub(crate) mod eig {
    //! Minimal dense symmetric eigensolver (cyclic Jacobi, values only), used
    //! to validate density matrices and Choi positivity. Hermitian inputs go
    //! through the real embedding `[[Re, -Im], [Im, Re]]`, which doubles each
    //! eigenvalue's multiplicity but preserves the spectrum.

    use ndarray::Array2;

    use crate::C64;

    pub fn symmetric_eigenvalues(a: &Array2<f64>) -> Vec<f64> {
        let n = a.dim().0;
        debug_assert_eq!(a.dim().0, a.dim().1);
        let mut m = a.clone();
        for _sweep in 0..64 {
            let mut off: f64 = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += m[(p, q)] * m[(p, q)];
                }
            }
            if off.sqrt() < 1e-14 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = m[(p, q)];
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let mkp = m[(k, p)];
                        let mkq = m[(k, q)];
                        m[(k, p)] = c * mkp - s * mkq;
                        m[(k, q)] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let mpk = m[(p, k)];
                        let mqk = m[(q, k)];
                        m[(p, k)] = c * mpk - s * mqk;
                        m[(q, k)] = s * mpk + c * mqk;
                    }
                }
            }
        }
        let mut eigs: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        eigs
    }

    pub fn hermitian_eigenvalues_doubled(m: &Array2<C64>) -> Vec<f64> {
        let n = m.dim().0;
        let mut emb = Array2::zeros((2 * n, 2 * n));
        for i in 0..n {
            for j in 0..n {
                emb[(i, j)] = m[(i, j)].re;
                emb[(i + n, j + n)] = m[(i, j)].re;
                emb[(i, j + n)] = -m[(i, j)].im;
                emb[(i + n, j)] = m[(i, j)].im;
            }
        }
        symmetric_eigenvalues(&emb)
    }

    pub fn hermitian_min_eigenvalue(m: &Array2<C64>) -> f64 {
        hermitian_eigenvalues_doubled(m)[0]
    }
}
