//! Time-dependent switching of the light-matter coupling, `η → λ(t) η`.
//!
//! In the dipole gauge a time-dependent gauge transformation adds `−λ̇ F`
//! with `F = −η σ_x (a + a†)`. Dropping it gives the "wrong dipole"
//! comparator.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonians::{
    build_free, coulomb_matrix, dipole_interaction, gauge_generator, gauge_t_from_generator, Gauge, GaugeHamiltonian,
    ModelParams, QuadratureCalculus, RabiParams,
};
use crate::hilbert::{build_space, CanonicalOperators, HilbertSpec};
use crate::linalg::{fidelity, hermitian_eig, norm, ComplexMatrix, EigenDecomposition};
use crate::observables::positive_frequency_part;
use crate::spectra::diagonalize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RampShape {
    Linear,
    /// `(1 − cos πu) / 2`.
    RaisedCosine,
}

impl RampShape {
    fn value(self, u: f64) -> f64 {
        match self {
            RampShape::Linear => u,
            RampShape::RaisedCosine => 0.5 * (1.0 - (PI * u).cos()),
        }
    }

    fn slope(self, u: f64) -> f64 {
        match self {
            RampShape::Linear => 1.0,
            RampShape::RaisedCosine => 0.5 * PI * (PI * u).sin(),
        }
    }

    fn max_slope(self) -> f64 {
        match self {
            RampShape::Linear => 1.0,
            RampShape::RaisedCosine => 0.5 * PI,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    On,
    Off,
}

/// One ramp starting at `start` and lasting the protocol's `ramp_t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwitchEvent {
    pub start: f64,
    pub direction: Direction,
}

/// Piecewise switching function `λ(t) ∈ [0, 1]` with analytic `λ̇`.
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchProtocol {
    /// `λ` before the first event.
    pub initial: f64,
    pub events: Vec<SwitchEvent>,
    pub ramp_t: f64,
    pub shape: RampShape,
}

impl SwitchProtocol {
    /// Constant coupling.
    pub fn constant(lambda: f64) -> Self {
        Self {
            initial: lambda,
            events: Vec::new(),
            ramp_t: 1.0,
            shape: RampShape::RaisedCosine,
        }
    }

    /// `λ = 1` until `t0`, then a ramp to zero over `ramp_t`.
    pub fn off(t0: f64, ramp_t: f64, shape: RampShape) -> Result<Self> {
        Self::new(
            1.0,
            vec![SwitchEvent {
                start: t0,
                direction: Direction::Off,
            }],
            ramp_t,
            shape,
        )
    }

    /// `λ = 0` until `t1`, ramp up, plateau, ramp down starting at `t2`.
    pub fn on_off(t1: f64, t2: f64, ramp_t: f64, shape: RampShape) -> Result<Self> {
        Self::new(
            0.0,
            vec![
                SwitchEvent {
                    start: t1,
                    direction: Direction::On,
                },
                SwitchEvent {
                    start: t2,
                    direction: Direction::Off,
                },
            ],
            ramp_t,
            shape,
        )
    }

    pub fn new(initial: f64, events: Vec<SwitchEvent>, ramp_t: f64, shape: RampShape) -> Result<Self> {
        if !(ramp_t > 0.0) || !ramp_t.is_finite() {
            return Err(Error::Config(format!("ramp duration {ramp_t} must be positive")));
        }
        if !(0.0..=1.0).contains(&initial) {
            return Err(Error::Config(format!("initial λ = {initial} outside [0, 1]")));
        }
        let mut level = initial;
        for (i, e) in events.iter().enumerate() {
            if i > 0 && e.start < events[i - 1].start + ramp_t {
                return Err(Error::Config("switch ramps overlap or are out of order".into()));
            }
            let (from, to) = match e.direction {
                Direction::On => (0.0, 1.0),
                Direction::Off => (1.0, 0.0),
            };
            if level != from {
                return Err(Error::Config(format!(
                    "{:?} switch at t = {} starts from λ = {level}",
                    e.direction, e.start
                )));
            }
            level = to;
        }
        Ok(Self {
            initial,
            events,
            ramp_t,
            shape,
        })
    }

    fn event_at(&self, t: f64) -> Option<(&SwitchEvent, f64)> {
        self.events
            .iter()
            .find(|e| t > e.start && t < e.start + self.ramp_t)
            .map(|e| (e, (t - e.start) / self.ramp_t))
    }

    pub fn lambda(&self, t: f64) -> f64 {
        if let Some((e, u)) = self.event_at(t) {
            let s = self.shape.value(u);
            return match e.direction {
                Direction::On => s,
                Direction::Off => 1.0 - s,
            };
        }
        let mut level = self.initial;
        for e in &self.events {
            if t >= e.start + self.ramp_t {
                level = if e.direction == Direction::On { 1.0 } else { 0.0 };
            }
        }
        level
    }

    /// Zero outside ramps.
    pub fn lambda_dot(&self, t: f64) -> f64 {
        match self.event_at(t) {
            Some((e, u)) => {
                let d = self.shape.slope(u) / self.ramp_t;
                if e.direction == Direction::On {
                    d
                } else {
                    -d
                }
            }
            None => 0.0,
        }
    }

    /// Ramp intervals `[start, start + T]`.
    pub fn ramps(&self) -> Vec<(f64, f64)> {
        self.events.iter().map(|e| (e.start, e.start + self.ramp_t)).collect()
    }

    /// End of the last ramp, or `−∞` without events.
    pub fn last_switch_end(&self) -> f64 {
        self.events.last().map_or(f64::NEG_INFINITY, |e| e.start + self.ramp_t)
    }
}

/// Gauge in which a time-dependent propagation is carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SwitchGauge {
    Coulomb,
    /// Dipole gauge with the `−λ̇F` term.
    Dipole,
    /// Dipole gauge with the coupling simply scaled by `λ(t)`.
    WrongDipole,
}

impl SwitchGauge {
    pub fn gauge(self) -> Gauge {
        match self {
            SwitchGauge::Coulomb => Gauge::Coulomb,
            SwitchGauge::Dipole | SwitchGauge::WrongDipole => Gauge::Dipole,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            SwitchGauge::Coulomb => "coulomb",
            SwitchGauge::Dipole => "dipole",
            SwitchGauge::WrongDipole => "wrong-dipole",
        }
    }
}

/// Operators reused at every time step.
struct SwitchSystem {
    params: RabiParams,
    spec: HilbertSpec,
    gauge: SwitchGauge,
    ops: CanonicalOperators,
    free: ComplexMatrix,
    v_d: ComplexMatrix,
    f: ComplexMatrix,
    calc: QuadratureCalculus,
}

impl SwitchSystem {
    fn new(params: &RabiParams, spec: &HilbertSpec, gauge: SwitchGauge) -> Result<Self> {
        if spec.n_fock_b.is_some() {
            return Err(Error::Config("switch dynamics uses a single mode".into()));
        }
        let ops = build_space(spec)?;
        Ok(Self {
            params: *params,
            spec: *spec,
            gauge,
            free: build_free(params.omega_c, params.omega_0, spec),
            v_d: dipole_interaction(params, &ops),
            f: gauge_generator(params.eta, &ops),
            calc: QuadratureCalculus::new(spec.n_fock)?,
            ops,
        })
    }

    /// Hamiltonian at coupling `λ` without the `−λ̇F` term.
    fn static_h(&self, lambda: f64) -> ComplexMatrix {
        let p = &self.params;
        match self.gauge {
            SwitchGauge::Coulomb => coulomb_matrix(p.omega_c, p.omega_0, lambda * p.eta, &self.calc, &self.spec),
            SwitchGauge::Dipole | SwitchGauge::WrongDipole => {
                let shift = lambda * lambda * p.eta * p.eta * p.omega_c;
                let mut h = &self.free + &self.v_d.scale_real(lambda);
                h += &ComplexMatrix::identity(self.spec.dim()).scale_real(shift);
                h
            }
        }
    }

    fn h(&self, lambda: f64, lambda_dot: f64) -> ComplexMatrix {
        let mut h = self.static_h(lambda);
        if self.gauge == SwitchGauge::Dipole && lambda_dot != 0.0 {
            h += &self.f.scale_real(-lambda_dot);
        }
        h
    }

    /// Upper bound on the spectral radius over a ramp.
    fn radius_bound(&self, max_lambda_dot: f64) -> f64 {
        let mut r = self.free.inf_norm();
        r += match self.gauge {
            SwitchGauge::Coulomb => self.params.omega_0,
            _ => self.v_d.inf_norm() + self.params.eta * self.params.eta * self.params.omega_c,
        };
        if self.gauge == SwitchGauge::Dipole {
            r += max_lambda_dot * self.f.inf_norm();
        }
        r
    }

    /// Field operator `Y = i(a − a†)` in this gauge at coupling `λ`.
    fn field(&self, lambda: f64) -> ComplexMatrix {
        match self.gauge {
            SwitchGauge::Dipole => &self.ops.p - &self.ops.sx.scale_real(2.0 * lambda * self.params.eta),
            _ => self.ops.p.clone(),
        }
    }
}

/// Hamiltonian of `gauge` at time `t`. Parameters carry the instantaneous
/// coupling `λ(t) η`.
pub fn hamiltonian_at(
    t: f64,
    gauge: SwitchGauge,
    params: &RabiParams,
    protocol: &SwitchProtocol,
    spec: &HilbertSpec,
) -> Result<GaugeHamiltonian> {
    let sys = SwitchSystem::new(params, spec, gauge)?;
    let lambda = protocol.lambda(t);
    let m = sys.h(lambda, protocol.lambda_dot(t));
    Ok(GaugeHamiltonian::new(
        m,
        gauge.gauge(),
        ModelParams::Rabi(params.with_eta(lambda * params.eta)),
        *spec,
    ))
}

/// Step-size control for the ramp integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    /// Largest `dt · ρ(H)` per midpoint step.
    pub max_phase: f64,
    pub min_steps_per_ramp: usize,
    /// Largest accepted change of the end-of-ramp fidelity when the step
    /// count is doubled.
    pub halving_tol: f64,
    pub max_refinements: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            max_phase: 0.05,
            min_steps_per_ramp: 200,
            halving_tol: 1e-8,
            max_refinements: 4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PropagationResult {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
    pub gauge: SwitchGauge,
    pub params: RabiParams,
    pub spec: HilbertSpec,
    pub protocol: SwitchProtocol,
    /// `⟨a†a⟩` with `a` as it appears in the propagation frame.
    pub photon_number: Vec<f64>,
    /// `⟨σ₊σ₋⟩` in the propagation frame.
    pub excited_population: Vec<f64>,
    /// `⟨Y⁻Y⁺⟩`.
    pub emission: Vec<f64>,
}

impl PropagationResult {
    pub fn final_state(&self) -> &[C64] {
        self.states.last().expect("at least one sample")
    }

    /// Mean of a record over samples with `t ≥ from`.
    pub fn mean_after(&self, record: &[f64], from: f64) -> f64 {
        let v: Vec<f64> = self
            .times
            .iter()
            .zip(record)
            .filter(|(t, _)| **t >= from)
            .map(|(_, x)| *x)
            .collect();
        v.iter().sum::<f64>() / v.len().max(1) as f64
    }
}

fn midpoint_run(
    sys: &SwitchSystem,
    protocol: &SwitchProtocol,
    psi: &[C64],
    a: f64,
    b: f64,
    steps: usize,
) -> Result<Vec<C64>> {
    let dt = (b - a) / steps as f64;
    let mut out = psi.to_vec();
    for k in 0..steps {
        let tm = a + (k as f64 + 0.5) * dt;
        let eig = hermitian_eig(&sys.h(protocol.lambda(tm), protocol.lambda_dot(tm)))?;
        out = eig.evolve(&out, dt);
    }
    Ok(out)
}

struct Propagator<'a> {
    sys: SwitchSystem,
    protocol: &'a SwitchProtocol,
    control: StepControl,
    static_cache: HashMap<u64, EigenDecomposition>,
}

impl Propagator<'_> {
    fn static_eig(&mut self, lambda: f64) -> Result<&EigenDecomposition> {
        let key = lambda.to_bits();
        if !self.static_cache.contains_key(&key) {
            let eig = hermitian_eig(&self.sys.static_h(lambda))?;
            self.static_cache.insert(key, eig);
        }
        Ok(&self.static_cache[&key])
    }

    fn ramp_piece(&self, psi: &[C64], a: f64, b: f64) -> Result<Vec<C64>> {
        let p = self.protocol;
        let c = self.control;
        let rho = self.sys.radius_bound(p.shape.max_slope() / p.ramp_t);
        let by_phase = ((b - a) * rho / c.max_phase).ceil() as usize;
        let by_floor = ((b - a) / p.ramp_t * c.min_steps_per_ramp as f64).ceil() as usize;
        let mut steps = by_phase.max(by_floor).max(1);
        let mut coarse = midpoint_run(&self.sys, p, psi, a, b, steps)?;
        let mut change = f64::NAN;
        for _ in 0..=c.max_refinements {
            steps *= 2;
            let fine = midpoint_run(&self.sys, p, psi, a, b, steps)?;
            change = 1.0 - fidelity(&coarse, &fine);
            if change.abs() < c.halving_tol {
                return Ok(fine);
            }
            coarse = fine;
        }
        Err(Error::StepSize { steps, change })
    }

    fn advance(&mut self, psi: &[C64], from: f64, to: f64) -> Result<Vec<C64>> {
        let mut cuts = vec![from, to];
        for (s, e) in self.protocol.ramps() {
            cuts.extend([s, e].into_iter().filter(|&x| x > from && x < to));
        }
        cuts.sort_by(f64::total_cmp);
        let mut out = psi.to_vec();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let mid = 0.5 * (a + b);
            if self.protocol.event_at(mid).is_some() {
                out = self.ramp_piece(&out, a, b)?;
            } else {
                let lambda = self.protocol.lambda(mid);
                out = self.static_eig(lambda)?.evolve(&out, b - a);
            }
        }
        Ok(out)
    }
}

/// Propagates `initial` from `times[0]` and records the state at every
/// entry of `times` (ascending).
pub fn propagate(
    initial: &[C64],
    gauge: SwitchGauge,
    params: &RabiParams,
    spec: &HilbertSpec,
    protocol: &SwitchProtocol,
    times: &[f64],
    control: StepControl,
) -> Result<PropagationResult> {
    if times.is_empty() || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("sample times must be non-empty and ascending".into()));
    }
    if initial.len() != spec.dim() {
        return Err(Error::Shape(format!(
            "state length {} vs dimension {}",
            initial.len(),
            spec.dim()
        )));
    }
    if (norm(initial) - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition("initial state is not normalized".into()));
    }
    let sys = SwitchSystem::new(params, spec, gauge)?;
    let mut prop = Propagator {
        sys,
        protocol,
        control,
        static_cache: HashMap::new(),
    };
    let mut states = Vec::with_capacity(times.len());
    let mut psi = initial.to_vec();
    states.push(psi.clone());
    for w in times.windows(2) {
        psi = prop.advance(&psi, w[0], w[1])?;
        let defect = (norm(&psi) - 1.0).abs();
        if defect > 1e-8 {
            return Err(Error::Numerical {
                what: "norm drift".into(),
                residual: defect,
            });
        }
        states.push(psi.clone());
    }
    let ops = &prop.sys.ops;
    let photon_number = states.iter().map(|s| ops.n.expectation(s).re).collect();
    let excited_population = states
        .iter()
        .map(|s| ops.excited_projector().expectation(s).re)
        .collect();
    let mut result = PropagationResult {
        times: times.to_vec(),
        states,
        gauge,
        params: *params,
        spec: *spec,
        protocol: protocol.clone(),
        photon_number,
        excited_population,
        emission: Vec::new(),
    };
    result.emission = emission_signal(&result)?;
    Ok(result)
}

/// `⟨Y⁻Y⁺⟩(t) = ‖Y⁺ψ(t)‖²`, with `Y⁺` taken in the eigenbasis of the
/// instantaneous static Hamiltonian and `Y` transformed with the gauge.
pub fn emission_signal(result: &PropagationResult) -> Result<Vec<f64>> {
    let sys = SwitchSystem::new(&result.params, &result.spec, result.gauge)?;
    let mut cache: HashMap<u64, ComplexMatrix> = HashMap::new();
    let mut out = Vec::with_capacity(result.times.len());
    for (t, psi) in result.times.iter().zip(&result.states) {
        let lambda = result.protocol.lambda(*t);
        let key = lambda.to_bits();
        if let std::collections::hash_map::Entry::Vacant(slot) = cache.entry(key) {
            let h = GaugeHamiltonian::new(
                sys.static_h(lambda),
                result.gauge.gauge(),
                ModelParams::Rabi(result.params.with_eta(lambda * result.params.eta)),
                result.spec,
            );
            let spectrum = diagonalize(h)?;
            slot.insert(positive_frequency_part(&sys.field(lambda), &spectrum)?);
        }
        let y_plus = cache[&key].apply(psi);
        out.push(y_plus.iter().map(C64::norm_sqr).sum());
    }
    Ok(out)
}

/// `T → 0` limit of a single switch applied to `initial`: the dipole gauge
/// picks up `T†` (off) or `T` (on); the Coulomb and wrong-dipole states are
/// unchanged.
pub fn sudden_switch_limit(
    initial: &[C64],
    gauge: SwitchGauge,
    params: &RabiParams,
    spec: &HilbertSpec,
    direction: Direction,
) -> Result<Vec<C64>> {
    if gauge != SwitchGauge::Dipole {
        return Ok(initial.to_vec());
    }
    let ops = build_space(spec)?;
    let t = gauge_t_from_generator(&gauge_generator(params.eta, &ops))?;
    Ok(match direction {
        Direction::Off => t.adjoint().apply(initial),
        Direction::On => t.apply(initial),
    })
}

/// Evenly spaced sample times over `[t_start, t_end]`.
pub fn uniform_times(t_start: f64, t_end: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![t_start];
    }
    (0..n)
        .map(|k| t_start + (t_end - t_start) * k as f64 / (n - 1) as f64)
        .collect()
}
