//! Qubit ⊗ truncated-boson spaces and the canonical operators on them.
//!
//! Ordering is fixed crate-wide: the qubit is the slow index, then mode `a`,
//! then (if present) the readout mode `b`. Qubit index 0 is the excited
//! state `|e⟩` (σ_z = +1) and index 1 the ground state `|g⟩` (σ_z = −1).

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, I, ONE, ZERO};

/// Two-level basis state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Qubit {
    Excited,
    Ground,
}

impl Qubit {
    pub fn index(self) -> usize {
        match self {
            Qubit::Excited => 0,
            Qubit::Ground => 1,
        }
    }
}

/// Truncation of the composite qubit ⊗ boson(s) space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HilbertSpec {
    /// Levels `0..n_fock` of mode `a`.
    pub n_fock: usize,
    /// Levels of the readout mode `b`, when present.
    pub n_fock_b: Option<usize>,
}

impl HilbertSpec {
    pub fn new(n_fock: usize) -> Result<Self> {
        if n_fock < 2 {
            return Err(Error::Config(format!("n_fock must be at least 2, got {n_fock}")));
        }
        Ok(Self { n_fock, n_fock_b: None })
    }

    pub fn two_mode(n_fock: usize, n_fock_b: usize) -> Result<Self> {
        if n_fock < 2 || n_fock_b < 2 {
            return Err(Error::Config(format!(
                "both cutoffs must be at least 2, got ({n_fock}, {n_fock_b})"
            )));
        }
        Ok(Self {
            n_fock,
            n_fock_b: Some(n_fock_b),
        })
    }

    /// Cutoff heuristic `max(24, ⌈4η² + 6η + 12⌉)`.
    pub fn default_cutoff(eta: f64) -> usize {
        let h = (4.0 * eta * eta + 6.0 * eta + 12.0).ceil() as usize;
        h.max(24)
    }

    /// Single-mode space sized by [`HilbertSpec::default_cutoff`].
    pub fn for_coupling(eta: f64) -> Self {
        Self {
            n_fock: Self::default_cutoff(eta),
            n_fock_b: None,
        }
    }

    pub fn with_n_fock(self, n_fock: usize) -> Result<Self> {
        match self.n_fock_b {
            None => Self::new(n_fock),
            Some(nb) => Self::two_mode(n_fock, nb),
        }
    }

    pub fn b_dim(&self) -> usize {
        self.n_fock_b.unwrap_or(1)
    }

    /// Dimension of the bosonic factor.
    pub fn boson_dim(&self) -> usize {
        self.n_fock * self.b_dim()
    }

    /// Composite dimension `2 · n_fock (· n_fock_b)`.
    pub fn dim(&self) -> usize {
        2 * self.boson_dim()
    }

    pub fn index(&self, q: Qubit, n: usize) -> usize {
        self.index_two_mode(q, n, 0)
    }

    pub fn index_two_mode(&self, q: Qubit, na: usize, nb: usize) -> usize {
        assert!(na < self.n_fock && nb < self.b_dim(), "Fock index outside truncation");
        q.index() * self.boson_dim() + na * self.b_dim() + nb
    }

    /// Qubit and mode-`a` occupation of a composite index.
    pub fn decompose(&self, idx: usize) -> (Qubit, usize, usize) {
        let q = if idx / self.boson_dim() == 0 {
            Qubit::Excited
        } else {
            Qubit::Ground
        };
        let rem = idx % self.boson_dim();
        (q, rem / self.b_dim(), rem % self.b_dim())
    }

    /// Composite indices whose mode-`a` occupation is below `n_fock / 2`.
    /// Cross-gauge entrywise comparisons are restricted to this block.
    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.decompose(i).1 < self.n_fock / 2)
            .collect()
    }

    /// Bare product state `|q, n⟩` (mode `b`, if any, in vacuum).
    pub fn basis_state(&self, q: Qubit, n: usize) -> Vec<C64> {
        let mut v = vec![ZERO; self.dim()];
        v[self.index(q, n)] = ONE;
        v
    }
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| if i != j { ONE } else { ZERO })
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => -I,
        (1, 0) => I,
        _ => ZERO,
    })
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
}

/// `σ₊ = |e⟩⟨g|`.
pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| if (i, j) == (0, 1) { ONE } else { ZERO })
}

pub fn sigma_minus() -> ComplexMatrix {
    sigma_plus().adjoint()
}

/// Truncated annihilation operator on `n` levels.
pub fn annihilation(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

pub fn number(n: usize) -> ComplexMatrix {
    let d: Vec<f64> = (0..n).map(|k| k as f64).collect();
    ComplexMatrix::from_real_diagonal(&d)
}

/// `a + a†` on `n` levels.
pub fn quadrature_x(n: usize) -> ComplexMatrix {
    let a = annihilation(n);
    &a + &a.adjoint()
}

/// `i(a − a†)` on `n` levels.
pub fn quadrature_p(n: usize) -> ComplexMatrix {
    let a = annihilation(n);
    (&a - &a.adjoint()).scale(I)
}

/// Embeds a 2x2 qubit operator into the composite space.
pub fn lift_qubit(op: &ComplexMatrix, spec: &HilbertSpec) -> ComplexMatrix {
    kron(op, &ComplexMatrix::identity(spec.boson_dim()))
}

/// Embeds an operator on mode `a` into the composite space.
pub fn lift_mode_a(op: &ComplexMatrix, spec: &HilbertSpec) -> ComplexMatrix {
    let on_bosons = kron(op, &ComplexMatrix::identity(spec.b_dim()));
    kron(&ComplexMatrix::identity(2), &on_bosons)
}

/// Embeds an operator on mode `b` into the composite space.
pub fn lift_mode_b(op: &ComplexMatrix, spec: &HilbertSpec) -> ComplexMatrix {
    let on_bosons = kron(&ComplexMatrix::identity(spec.n_fock), op);
    kron(&ComplexMatrix::identity(2), &on_bosons)
}

/// Canonical operators lifted to the composite space.
#[derive(Clone, Debug)]
pub struct CanonicalOperators {
    pub spec: HilbertSpec,
    pub a: ComplexMatrix,
    pub a_dag: ComplexMatrix,
    /// `a + a†`
    pub x: ComplexMatrix,
    /// `i(a − a†)`
    pub p: ComplexMatrix,
    /// `a†a`
    pub n: ComplexMatrix,
    pub sx: ComplexMatrix,
    pub sy: ComplexMatrix,
    pub sz: ComplexMatrix,
    pub s_plus: ComplexMatrix,
    pub s_minus: ComplexMatrix,
    /// Readout-mode annihilation operator; present only for two-mode specs.
    pub b: Option<ComplexMatrix>,
}

impl CanonicalOperators {
    pub fn identity(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.spec.dim())
    }

    /// `σ₊σ₋`, the excited-state projector.
    pub fn excited_projector(&self) -> ComplexMatrix {
        self.s_plus.matmul(&self.s_minus)
    }

    /// `Π = σ_z exp(iπ a†a)` (times `exp(iπ b†b)` with a readout mode).
    pub fn parity(&self) -> ComplexMatrix {
        let spec = self.spec;
        let d: Vec<f64> = (0..spec.dim())
            .map(|i| {
                let (q, na, nb) = spec.decompose(i);
                let s = if q == Qubit::Excited { 1.0 } else { -1.0 };
                if (na + nb) % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect();
        ComplexMatrix::from_real_diagonal(&d)
    }
}

/// Builds every canonical operator for `spec`.
pub fn build_space(spec: &HilbertSpec) -> Result<CanonicalOperators> {
    if spec.n_fock < 2 || spec.n_fock_b.is_some_and(|nb| nb < 2) {
        return Err(Error::Config(format!("cutoffs too small in {spec:?}")));
    }
    let a1 = annihilation(spec.n_fock);
    let a = lift_mode_a(&a1, spec);
    let a_dag = a.adjoint();
    let x = &a + &a_dag;
    let p = (&a - &a_dag).scale(I);
    let n = lift_mode_a(&number(spec.n_fock), spec);
    Ok(CanonicalOperators {
        spec: *spec,
        x,
        p,
        n,
        sx: lift_qubit(&sigma_x(), spec),
        sy: lift_qubit(&sigma_y(), spec),
        sz: lift_qubit(&sigma_z(), spec),
        s_plus: lift_qubit(&sigma_plus(), spec),
        s_minus: lift_qubit(&sigma_minus(), spec),
        b: spec.n_fock_b.map(|nb| lift_mode_b(&annihilation(nb), spec)),
        a,
        a_dag,
    })
}

/// Truncated coherent state `|α⟩` on mode `a` alone (length `n_fock`).
///
/// Fails when `|α|² > n_fock / 4` or when more than `1e-12` of the
/// probability would fall outside the truncation.
pub fn coherent_state(alpha: C64, n_fock: usize) -> Result<Vec<C64>> {
    let mean = alpha.norm_sqr();
    if mean > n_fock as f64 / 4.0 {
        return Err(Error::Truncation(format!(
            "|alpha|² = {mean} exceeds n_fock/4 = {}",
            n_fock as f64 / 4.0
        )));
    }
    let mut amps = Vec::with_capacity(n_fock);
    let mut c = C64::new((-0.5 * mean).exp(), 0.0);
    for k in 0..n_fock {
        if k > 0 {
            c = c * alpha / (k as f64).sqrt();
        }
        amps.push(c);
    }
    let kept: f64 = amps.iter().map(C64::norm_sqr).sum();
    if 1.0 - kept > 1e-12 {
        return Err(Error::Truncation(format!(
            "coherent state loses {:e} of its weight at n_fock = {n_fock}",
            1.0 - kept
        )));
    }
    let s = kept.sqrt();
    Ok(amps.into_iter().map(|z| z / s).collect())
}
