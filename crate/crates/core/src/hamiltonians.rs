//! Quantum Rabi and circuit-QED Hamiltonians in the Coulomb, dipole, flux and
//! charge gauges, plus the unitaries relating them. Units: ħ = 1 and all
//! frequencies are expressed as multiples of the cavity frequency.
//!
//! The dipole and flux gauge Hamiltonians carry the constant self-polarization
//! energy `ω_c η²`. It does not affect any energy difference or eigenvector,
//! but with it `T H_C T† = H_D` and `R H_cg R† = H_fg` hold as operator
//! identities, not only up to a shift.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{
    build_space, lift_mode_a, number, quadrature_x, sigma_x, sigma_y, sigma_z, CanonicalOperators, HilbertSpec,
};
use crate::linalg::{hermitian_eig, kron, matrix_function_complex, ComplexMatrix, EigenDecomposition};

/// Angles below this are treated as the symmetry point `θ = 0`.
pub const THETA_ZERO_TOL: f64 = 1e-12;

/// Cavity-QED parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RabiParams {
    pub omega_c: f64,
    pub omega_0: f64,
    /// Normalized coupling `g / ω_c`.
    pub eta: f64,
}

impl RabiParams {
    pub fn new(omega_c: f64, omega_0: f64, eta: f64) -> Result<Self> {
        if !(omega_c > 0.0) || !(omega_0 >= 0.0) || !(eta >= 0.0) {
            return Err(Error::Config(format!(
                "need omega_c > 0, omega_0 >= 0, eta >= 0; got ({omega_c}, {omega_0}, {eta})"
            )));
        }
        Ok(Self { omega_c, omega_0, eta })
    }

    /// `ω_0 = ω_c = 1`.
    pub fn resonant(eta: f64) -> Self {
        Self {
            omega_c: 1.0,
            omega_0: 1.0,
            eta,
        }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        Self { eta, ..self }
    }

    pub fn g(&self) -> f64 {
        self.omega_c * self.eta
    }
}

/// Flux-qubit–LC-oscillator parameters in the two-level approximation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircuitParams {
    pub omega_c: f64,
    pub omega_0: f64,
    /// `ω_c η = L_c I_p I_zpf`, in units of `ω_c`.
    pub eta: f64,
    /// Flux angle `θ = arcsin(ε / ω_0)`.
    pub theta: f64,
    /// Flux bias `ε = ω_0 sin θ`.
    pub epsilon: f64,
    /// Tunnel splitting `Δ = ω_0 cos θ`.
    pub delta_tunnel: f64,
}

impl CircuitParams {
    /// Symmetry point, `ε = 0`.
    pub fn symmetric(omega_c: f64, omega_0: f64, eta: f64) -> Result<Self> {
        Self::with_theta(omega_c, omega_0, eta, 0.0)
    }

    pub fn with_theta(omega_c: f64, omega_0: f64, eta: f64, theta: f64) -> Result<Self> {
        RabiParams::new(omega_c, omega_0, eta)?;
        if !(theta.abs() <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::Config(format!("theta = {theta} outside [-π/2, π/2]")));
        }
        Ok(Self {
            omega_c,
            omega_0,
            eta,
            theta,
            epsilon: omega_0 * theta.sin(),
            delta_tunnel: omega_0 * theta.cos(),
        })
    }

    /// From tunnel splitting and flux bias, `ω_0 = √(Δ² + ε²)`.
    pub fn from_bias(omega_c: f64, delta_tunnel: f64, epsilon: f64, eta: f64) -> Result<Self> {
        let omega_0 = delta_tunnel.hypot(epsilon);
        if omega_0 == 0.0 {
            return Err(Error::Config("Δ and ε cannot both vanish".into()));
        }
        let mut p = Self::with_theta(omega_c, omega_0, eta, (epsilon / omega_0).asin())?;
        p.epsilon = epsilon;
        p.delta_tunnel = delta_tunnel;
        Ok(p)
    }

    pub fn resonant(eta: f64) -> Self {
        Self {
            omega_c: 1.0,
            omega_0: 1.0,
            eta,
            theta: 0.0,
            epsilon: 0.0,
            delta_tunnel: 1.0,
        }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        Self { eta, ..self }
    }

    pub fn is_symmetric(&self) -> bool {
        self.theta.abs() < THETA_ZERO_TOL
    }

    /// Qubit operator the oscillator couples to, `cos θ σ_x − sin θ σ_z`.
    pub fn coupling_axis(&self) -> ComplexMatrix {
        let (s, c) = self.theta.sin_cos();
        &sigma_x().scale_real(c) - &sigma_z().scale_real(s)
    }
}

/// Weakly coupled readout mode `b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReadoutMode {
    pub omega_b: f64,
    /// `η_b = g_b / ω_0`.
    pub eta_b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gauge {
    Coulomb,
    Dipole,
    Flux,
    Charge,
}

impl Gauge {
    pub fn tag(self) -> &'static str {
        match self {
            Gauge::Coulomb => "coulomb",
            Gauge::Dipole => "dipole",
            Gauge::Flux => "flux",
            Gauge::Charge => "charge",
        }
    }

    /// The gauge on the other side of the relevant unitary.
    pub fn partner(self) -> Gauge {
        match self {
            Gauge::Coulomb => Gauge::Dipole,
            Gauge::Dipole => Gauge::Coulomb,
            Gauge::Flux => Gauge::Charge,
            Gauge::Charge => Gauge::Flux,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelParams {
    Rabi(RabiParams),
    Circuit(CircuitParams),
    TwoMode { a: RabiParams, b: ReadoutMode },
}

impl ModelParams {
    pub fn eta(&self) -> f64 {
        match self {
            ModelParams::Rabi(p) => p.eta,
            ModelParams::Circuit(p) => p.eta,
            ModelParams::TwoMode { a, .. } => a.eta,
        }
    }

    pub fn omega_c(&self) -> f64 {
        match self {
            ModelParams::Rabi(p) => p.omega_c,
            ModelParams::Circuit(p) => p.omega_c,
            ModelParams::TwoMode { a, .. } => a.omega_c,
        }
    }

    pub fn omega_0(&self) -> f64 {
        match self {
            ModelParams::Rabi(p) => p.omega_0,
            ModelParams::Circuit(p) => p.omega_0,
            ModelParams::TwoMode { a, .. } => a.omega_0,
        }
    }

    /// `θ` for circuits, zero otherwise.
    pub fn theta(&self) -> f64 {
        match self {
            ModelParams::Circuit(p) => p.theta,
            _ => 0.0,
        }
    }

    pub fn with_eta(&self, eta: f64) -> Self {
        match *self {
            ModelParams::Rabi(p) => ModelParams::Rabi(p.with_eta(eta)),
            ModelParams::Circuit(p) => ModelParams::Circuit(p.with_eta(eta)),
            ModelParams::TwoMode { a, b } => ModelParams::TwoMode { a: a.with_eta(eta), b },
        }
    }
}

/// A Hermitian Hamiltonian matrix tagged with its gauge, parameters and space.
#[derive(Clone, Debug)]
pub struct GaugeHamiltonian {
    pub matrix: ComplexMatrix,
    pub gauge: Gauge,
    pub params: ModelParams,
    pub spec: HilbertSpec,
}

impl GaugeHamiltonian {
    pub fn new(matrix: ComplexMatrix, gauge: Gauge, params: ModelParams, spec: HilbertSpec) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
            gauge,
            params,
            spec,
        }
    }
}

/// Spectral calculus on the boson quadrature `x = a + a†` of one mode,
/// decomposed once and reused for any coupling strength.
#[derive(Clone, Debug)]
pub struct QuadratureCalculus {
    eig: EigenDecomposition,
}

impl QuadratureCalculus {
    pub fn new(n_fock: usize) -> Result<Self> {
        Ok(Self {
            eig: hermitian_eig(&quadrature_x(n_fock))?,
        })
    }

    /// `(cos(k x), sin(k x))` on the mode alone.
    pub fn cos_sin(&self, k: f64) -> (ComplexMatrix, ComplexMatrix) {
        (
            self.eig.map_real(|x| (k * x).cos()),
            self.eig.map_real(|x| (k * x).sin()),
        )
    }
}

fn self_polarization(omega_c: f64, eta: f64, spec: &HilbertSpec) -> ComplexMatrix {
    ComplexMatrix::identity(spec.dim()).scale_real(omega_c * eta * eta)
}

/// `ω_c a†a + (ω_0/2) σ_z`.
pub fn build_free(omega_c: f64, omega_0: f64, spec: &HilbertSpec) -> ComplexMatrix {
    let ops_n = lift_mode_a(&number(spec.n_fock), spec);
    let sz = kron(&sigma_z(), &ComplexMatrix::identity(spec.boson_dim()));
    &ops_n.scale_real(omega_c) + &sz.scale_real(0.5 * omega_0)
}

/// Coulomb-gauge Hamiltonian for a given quadrature calculus; shared by the
/// static builder and the time-dependent propagator.
pub(crate) fn coulomb_matrix(
    omega_c: f64,
    omega_0: f64,
    eta: f64,
    calc: &QuadratureCalculus,
    spec: &HilbertSpec,
) -> ComplexMatrix {
    if eta == 0.0 {
        return build_free(omega_c, omega_0, spec);
    }
    let (c, s) = calc.cos_sin(2.0 * eta);
    let qubit = &kron(&sigma_z(), &c) + &kron(&sigma_y(), &s);
    let mut h = build_free(omega_c, 0.0, spec);
    h += &qubit.scale_real(0.5 * omega_0);
    h.hermitian_part()
}

fn single_mode(spec: &HilbertSpec) -> Result<()> {
    if spec.n_fock_b.is_some() {
        return Err(Error::Config("expected a single-mode Hilbert space".into()));
    }
    Ok(())
}

/// `H_C = ω_c a†a + (ω_0/2){σ_z cos[2η(a+a†)] + σ_y sin[2η(a+a†)]}`.
pub fn build_coulomb(params: &RabiParams, spec: &HilbertSpec) -> Result<GaugeHamiltonian> {
    single_mode(spec)?;
    let calc = QuadratureCalculus::new(spec.n_fock)?;
    let m = coulomb_matrix(params.omega_c, params.omega_0, params.eta, &calc, spec);
    Ok(GaugeHamiltonian::new(
        m,
        Gauge::Coulomb,
        ModelParams::Rabi(*params),
        *spec,
    ))
}

/// Dipole interaction `V_D = i η ω_c (a† − a) σ_x`.
pub fn dipole_interaction(params: &RabiParams, ops: &CanonicalOperators) -> ComplexMatrix {
    (&ops.a_dag - &ops.a)
        .matmul(&ops.sx)
        .scale(C64::new(0.0, params.eta * params.omega_c))
}

/// `H_D = ω_c a†a + (ω_0/2)σ_z + i η ω_c (a† − a)σ_x + ω_c η²`.
pub fn build_dipole(params: &RabiParams, spec: &HilbertSpec) -> Result<GaugeHamiltonian> {
    single_mode(spec)?;
    let ops = build_space(spec)?;
    let mut h = build_free(params.omega_c, params.omega_0, spec);
    h += &dipole_interaction(params, &ops);
    h += &self_polarization(params.omega_c, params.eta, spec);
    Ok(GaugeHamiltonian::new(
        h,
        Gauge::Dipole,
        ModelParams::Rabi(*params),
        *spec,
    ))
}

/// Gauge generator `F = −η σ_x (a + a†)`.
pub fn gauge_generator(eta: f64, ops: &CanonicalOperators) -> ComplexMatrix {
    ops.sx.matmul(&ops.x).scale_real(-eta)
}

/// `T = exp(iF)`, mapping Coulomb-gauge states to dipole-gauge states.
pub fn build_gauge_t(params: &RabiParams, spec: &HilbertSpec) -> Result<ComplexMatrix> {
    let ops = build_space(spec)?;
    gauge_t_from_generator(&gauge_generator(params.eta, &ops))
}

pub(crate) fn gauge_t_from_generator(f: &ComplexMatrix) -> Result<ComplexMatrix> {
    matrix_function_complex(&f.hermitian_part(), |v| C64::from_polar(1.0, v))
}

/// `H_fg = (ω_0/2)σ_z + ω_c a†a + ω_c η (a+a†)(cos θ σ_x − sin θ σ_z) + ω_c η²`.
pub fn build_flux_gauge(params: &CircuitParams, spec: &HilbertSpec) -> Result<GaugeHamiltonian> {
    single_mode(spec)?;
    let ops = build_space(spec)?;
    let axis = kron(&params.coupling_axis(), &ComplexMatrix::identity(spec.boson_dim()));
    let mut h = build_free(params.omega_c, params.omega_0, spec);
    h += &ops.x.matmul(&axis).scale_real(params.omega_c * params.eta);
    h += &self_polarization(params.omega_c, params.eta, spec);
    Ok(GaugeHamiltonian::new(
        h,
        Gauge::Flux,
        ModelParams::Circuit(*params),
        *spec,
    ))
}

/// `R = exp[η σ_θ (a − a†)]` with `σ_θ` the coupling axis; at `θ = 0` this
/// is the two-level charge-gauge unitary `exp[η σ_x (a − a†)]`.
pub fn build_charge_rotation(params: &CircuitParams, spec: &HilbertSpec) -> Result<ComplexMatrix> {
    let ops = build_space(spec)?;
    let axis = kron(&params.coupling_axis(), &ComplexMatrix::identity(spec.boson_dim()));
    // η σ_θ (a − a†) = −i η σ_θ p with p = i(a − a†)
    let gen = axis.matmul(&ops.p).scale_real(params.eta).hermitian_part();
    matrix_function_complex(&gen, |v| C64::from_polar(1.0, -v))
}

/// Charge gauge `H_cg = ω_c a†a + R† (ω_0/2) σ_z R`, i.e.
/// `ω_c a†a + (ω_0/2){σ_z cosh[2η(a−a†)] + iσ_y sinh[2η(a−a†)]}`.
/// Only defined at the symmetry point `θ = 0`.
pub fn build_charge_gauge(params: &CircuitParams, spec: &HilbertSpec) -> Result<GaugeHamiltonian> {
    single_mode(spec)?;
    if !params.is_symmetric() {
        return Err(Error::UnsupportedParameter(format!(
            "charge gauge is built at θ = 0 only, got θ = {}",
            params.theta
        )));
    }
    let r = build_charge_rotation(params, spec)?;
    let sz = kron(&sigma_z(), &ComplexMatrix::identity(spec.boson_dim()));
    let qubit = r.adjoint().matmul(&sz).matmul(&r).scale_real(0.5 * params.omega_0);
    let mut h = build_free(params.omega_c, 0.0, spec);
    h += &qubit;
    Ok(GaugeHamiltonian::new(
        h,
        Gauge::Charge,
        ModelParams::Circuit(*params),
        *spec,
    ))
}

/// Mutual-inductance coupling in the charge gauge: the flux-gauge
/// Hamiltonian conjugated by `R(θ)`, which turns the coordinate-coordinate
/// coupling into a momentum-momentum one. Any `θ` is accepted.
pub fn build_mutual_inductance_charge(params: &CircuitParams, spec: &HilbertSpec) -> Result<GaugeHamiltonian> {
    let hfg = build_flux_gauge(params, spec)?;
    let r = build_charge_rotation(params, spec)?;
    let m = r.adjoint().matmul(&hfg.matrix).matmul(&r);
    Ok(GaugeHamiltonian::new(
        m,
        Gauge::Charge,
        ModelParams::Circuit(*params),
        *spec,
    ))
}

fn two_mode_spec(spec: &HilbertSpec) -> Result<usize> {
    spec.n_fock_b
        .ok_or_else(|| Error::Config("two-mode Hamiltonian needs a readout-mode cutoff".into()))
}

fn warn_if_not_weak(a: &RabiParams, b: &ReadoutMode) {
    if b.eta_b > 0.1 * a.eta {
        log::warn!(
            "readout coupling eta_b = {} is not small against eta_a = {}",
            b.eta_b,
            a.eta
        );
    }
}

/// Two-mode Coulomb Hamiltonian
/// `ω_a a†a + ω_b b†b + (ω_0/2){σ_z cos[2η_a x_a + 2η_b x_b] + σ_y sin[…]}`.
pub fn build_two_mode_coulomb(
    params_a: &RabiParams,
    params_b: &ReadoutMode,
    spec: &HilbertSpec,
) -> Result<GaugeHamiltonian> {
    let nb = two_mode_spec(spec)?;
    warn_if_not_weak(params_a, params_b);
    let ia = ComplexMatrix::identity(spec.n_fock);
    let ib = ComplexMatrix::identity(nb);
    let arg = &kron(&quadrature_x(spec.n_fock), &ib).scale_real(2.0 * params_a.eta)
        + &kron(&ia, &quadrature_x(nb)).scale_real(2.0 * params_b.eta_b);
    let eig = hermitian_eig(&arg.hermitian_part())?;
    let (c, s) = (eig.map_real(f64::cos), eig.map_real(f64::sin));
    let bosons = &kron(&number(spec.n_fock), &ib).scale_real(params_a.omega_c)
        + &kron(&ia, &number(nb)).scale_real(params_b.omega_b);
    let mut h = kron(&ComplexMatrix::identity(2), &bosons);
    h += &(&kron(&sigma_z(), &c) + &kron(&sigma_y(), &s)).scale_real(0.5 * params_a.omega_0);
    Ok(GaugeHamiltonian::new(
        h,
        Gauge::Coulomb,
        ModelParams::TwoMode {
            a: *params_a,
            b: *params_b,
        },
        *spec,
    ))
}

/// Small-angle form `ω_a a†a + ω_b b†b + (ω_0/2)σ'_z + η_b ω_0 (b + b†) σ'_y`
/// with `σ'_j = T_a† σ_j T_a`.
pub fn build_two_mode_coulomb_reduced(
    params_a: &RabiParams,
    params_b: &ReadoutMode,
    spec: &HilbertSpec,
) -> Result<GaugeHamiltonian> {
    let nb = two_mode_spec(spec)?;
    warn_if_not_weak(params_a, params_b);
    let ib = ComplexMatrix::identity(nb);
    let ia = ComplexMatrix::identity(spec.n_fock);
    let (c, s) = QuadratureCalculus::new(spec.n_fock)?.cos_sin(2.0 * params_a.eta);
    let (c, s) = (kron(&c, &ib), kron(&s, &ib));
    let sz_p = &kron(&sigma_z(), &c) + &kron(&sigma_y(), &s);
    let sy_p = &kron(&sigma_y(), &c) - &kron(&sigma_z(), &s);
    let xb = kron(&ComplexMatrix::identity(2), &kron(&ia, &quadrature_x(nb)));
    let bosons = &kron(&number(spec.n_fock), &ib).scale_real(params_a.omega_c)
        + &kron(&ia, &number(nb)).scale_real(params_b.omega_b);
    let mut h = kron(&ComplexMatrix::identity(2), &bosons);
    h += &sz_p.scale_real(0.5 * params_a.omega_0);
    h += &xb.matmul(&sy_p).scale_real(params_b.eta_b * params_a.omega_0);
    Ok(GaugeHamiltonian::new(
        h,
        Gauge::Coulomb,
        ModelParams::TwoMode {
            a: *params_a,
            b: *params_b,
        },
        *spec,
    ))
}

/// The unitary `U` with `O_partner = U O U†` for operators moving from
/// `from` to its partner gauge: `T` for Coulomb → dipole, `R` for
/// charge → flux, and their adjoints for the reverse directions.
pub fn gauge_unitary(from: Gauge, params: &ModelParams, spec: &HilbertSpec) -> Result<ComplexMatrix> {
    let forward = match (from, params) {
        (Gauge::Coulomb | Gauge::Dipole, ModelParams::Rabi(p)) => build_gauge_t(p, spec)?,
        (Gauge::Coulomb | Gauge::Dipole, ModelParams::TwoMode { a, .. }) => {
            let ops = build_space(spec)?;
            gauge_t_from_generator(&gauge_generator(a.eta, &ops))?
        }
        (Gauge::Flux | Gauge::Charge, ModelParams::Circuit(p)) => build_charge_rotation(p, spec)?,
        _ => {
            return Err(Error::UnsupportedParameter(format!(
                "{} gauge does not apply to {params:?}",
                from.tag()
            )))
        }
    };
    Ok(match from {
        Gauge::Coulomb | Gauge::Charge => forward,
        Gauge::Dipole | Gauge::Flux => forward.adjoint(),
    })
}

/// Re-expresses an operator defined in gauge `defined_in` in the frame of
/// gauge `target` (identity when they coincide).
pub fn operator_in_gauge(
    op: &ComplexMatrix,
    defined_in: Gauge,
    target: Gauge,
    params: &ModelParams,
    spec: &HilbertSpec,
) -> Result<ComplexMatrix> {
    if defined_in == target {
        return Ok(op.clone());
    }
    if defined_in.partner() != target {
        return Err(Error::UnsupportedParameter(format!(
            "no transformation from {} to {}",
            defined_in.tag(),
            target.tag()
        )));
    }
    let u = gauge_unitary(defined_in, params, spec)?;
    Ok(u.matmul(op).matmul(&u.adjoint()))
}
