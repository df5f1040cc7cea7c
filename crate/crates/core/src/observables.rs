//! Measurable quantities: photodetection and sensor rates, qubit
//! populations, photon numbers, entanglement entropy, circuit voltage rates
//! and positive-frequency operator parts.
//!
//! Every operator here is first defined in a reference frame (the Coulomb
//! gauge for cavities, the flux gauge for circuits) and then carried into the
//! gauge of the spectrum at hand. Passing the "wrong" frame on purpose
//! reproduces the gauge-inconsistent comparators.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonians::{operator_in_gauge, Gauge, ModelParams};
use crate::hilbert::{build_space, CanonicalOperators};
use crate::linalg::{commutator, eigenvalues_2x2, kron, reduced_qubit_state, ComplexMatrix, I};
use crate::spectra::Spectrum;

/// Relative energy window inside which two levels count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// One named measured value.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableReport {
    pub name: String,
    pub gauge: Gauge,
    pub params: ModelParams,
    pub value: f64,
    /// `(j, k)` for transition quantities.
    pub transition: Option<(usize, usize)>,
}

fn degenerate(a: f64, b: f64) -> bool {
    (a - b).abs() <= DEGENERACY_TOL * a.abs().max(b.abs()).max(1.0)
}

/// `O⁺ = Σ_{E_k < E_j} ⟨k|O|j⟩ |k⟩⟨j|` in the eigenbasis of `spectrum`,
/// returned in the computational basis. Elements between degenerate levels
/// are left out of both `O⁺` and `O⁻`.
pub fn positive_frequency_part(o: &ComplexMatrix, spectrum: &Spectrum) -> Result<ComplexMatrix> {
    let v = &spectrum.states;
    if o.rows() != v.rows() || !o.is_square() {
        return Err(Error::Shape(format!(
            "operator is {}x{}, spectrum dimension {}",
            o.rows(),
            o.cols(),
            v.rows()
        )));
    }
    let e = &spectrum.energies;
    let m = v.adjoint().matmul(o).matmul(v);
    let plus = ComplexMatrix::from_fn(m.rows(), m.cols(), |k, j| {
        if e[k] < e[j] && !degenerate(e[k], e[j]) {
            m[(k, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(v.matmul(&plus).matmul(&v.adjoint()))
}

fn rabi_eta(spectrum: &Spectrum) -> Result<f64> {
    match spectrum.params() {
        ModelParams::Rabi(p) => Ok(p.eta),
        other => Err(Error::Precondition(format!(
            "expected cavity parameters, got {other:?}"
        ))),
    }
}

fn check_transition(spectrum: &Spectrum, j: usize, k: usize) -> Result<()> {
    if j <= k {
        return Err(Error::Precondition(format!("transition needs j > k, got ({j}, {k})")));
    }
    spectrum.require_converged(j)
}

fn transition_rate(spectrum: &Spectrum, op: &ComplexMatrix, j: usize, k: usize) -> f64 {
    op.matrix_element(&spectrum.state(k), &spectrum.state(j)).norm_sqr()
}

/// Coulomb-gauge field operator `𝒫 = i(a − a†)` expressed in the gauge of
/// `spectrum`: unchanged in the Coulomb gauge and `𝒫 − 2ησ_x` in the dipole
/// gauge.
pub fn field_operator(spectrum: &Spectrum, ops: &CanonicalOperators) -> Result<ComplexMatrix> {
    let eta = rabi_eta(spectrum)?;
    match spectrum.gauge() {
        Gauge::Coulomb => Ok(ops.p.clone()),
        Gauge::Dipole => Ok(&ops.p - &ops.sx.scale_real(2.0 * eta)),
        g => Err(Error::Precondition(format!("{} gauge is not a cavity gauge", g.tag()))),
    }
}

/// Photodetection rate `W_{j,k} = |⟨k|𝒫|j⟩|²`, gauge invariant: the field
/// operator is transformed together with the states.
pub fn photodetection_w(spectrum: &Spectrum, j: usize, k: usize) -> Result<f64> {
    check_transition(spectrum, j, k)?;
    let ops = build_space(spectrum.spec())?;
    Ok(transition_rate(spectrum, &field_operator(spectrum, &ops)?, j, k))
}

/// The naive rate `W′_{j,k} = |⟨k|i(a − a†)|j⟩|²` with the operator left
/// untransformed. In the dipole gauge this is the gauge-inconsistent
/// result; in the Coulomb gauge it coincides with `W`.
pub fn photodetection_w_prime(spectrum: &Spectrum, j: usize, k: usize) -> Result<f64> {
    check_transition(spectrum, j, k)?;
    rabi_eta(spectrum)?;
    let ops = build_space(spectrum.spec())?;
    Ok(transition_rate(spectrum, &ops.p, j, k))
}

/// Golden-rule rate of a dipole-coupled sensor, including the term that
/// follows from the gauge transformation of the sensor interaction:
/// `|⟨l_D|𝒫 − 2ησ_x|j_D⟩|²`.
pub fn sensor_rate_corrected(spectrum_d: &Spectrum, j: usize, l: usize) -> Result<f64> {
    require_gauge(spectrum_d, Gauge::Dipole)?;
    photodetection_w(spectrum_d, j, l)
}

/// Standard sensor rate without the correction term, `|⟨l_D|𝒫|j_D⟩|²`.
pub fn sensor_rate_standard(spectrum_d: &Spectrum, j: usize, l: usize) -> Result<f64> {
    require_gauge(spectrum_d, Gauge::Dipole)?;
    photodetection_w_prime(spectrum_d, j, l)
}

fn require_gauge(spectrum: &Spectrum, gauge: Gauge) -> Result<()> {
    if spectrum.gauge() != gauge {
        return Err(Error::Precondition(format!(
            "expected a {} gauge spectrum, got {}",
            gauge.tag(),
            spectrum.gauge().tag()
        )));
    }
    Ok(())
}

/// Expectation in level `idx` of an operator defined in frame `frame`.
pub fn expectation_in_frame(spectrum: &Spectrum, op: &ComplexMatrix, frame: Gauge, idx: usize) -> Result<f64> {
    spectrum.require_converged(idx)?;
    let mapped = operator_in_gauge(op, frame, spectrum.gauge(), spectrum.params(), spectrum.spec())?;
    Ok(mapped.expectation(&spectrum.state(idx)).re)
}

/// Excited-state population `⟨σ₊σ₋⟩` of level `idx`, with the projector
/// defined in `frame`. The dispersive readout measures the dipole-frame
/// population; `Gauge::Coulomb` gives the bare Coulomb-frame value.
pub fn qubit_population(spectrum: &Spectrum, idx: usize, frame: Gauge) -> Result<f64> {
    let ops = build_space(spectrum.spec())?;
    let v = expectation_in_frame(spectrum, &ops.excited_projector(), frame, idx)?;
    Ok(v.clamp(0.0, 1.0))
}

/// `⟨σ_z⟩` of level `idx` with `σ_z` defined in `frame`.
pub fn qubit_inversion(spectrum: &Spectrum, idx: usize, frame: Gauge) -> Result<f64> {
    let ops = build_space(spectrum.spec())?;
    expectation_in_frame(spectrum, &ops.sz, frame, idx)
}

/// Ground-state `⟨a†a⟩` with `a` defined in `frame`. The physical photon
/// number uses the Coulomb (cavity) or flux (circuit) frame; the dipole
/// frame reproduces the wrong-gauge comparator.
pub fn ground_photon_number(spectrum: &Spectrum, frame: Gauge) -> Result<f64> {
    let ops = build_space(spectrum.spec())?;
    Ok(expectation_in_frame(spectrum, &ops.n, frame, 0)?.max(0.0))
}

/// Qubit entropy `S = −Tr ρ_q log₂ ρ_q` of a normalized pure state.
pub fn entanglement_entropy(state: &[C64]) -> Result<f64> {
    let rho = reduced_qubit_state(state)?;
    let s: f64 = eigenvalues_2x2(&rho)
        .iter()
        .map(|&p| p.clamp(0.0, 1.0))
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    Ok(s.clamp(0.0, 1.0))
}

/// Dimensionless voltage rates out of the ground state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VoltageRates {
    /// `|⟨j|V_L|0⟩|² / (ω_c Φ_zpf)²`.
    pub v_l: f64,
    /// `|⟨j|a − a†|0⟩|²`.
    pub v_c: f64,
}

/// Inductor flux `Φ_L / Φ_zpf` in the gauge of `spectrum`: `x + 2ησ_θ` in
/// the flux gauge, which `R` maps to plain `x` in the charge gauge.
pub fn inductor_flux(spectrum: &Spectrum, ops: &CanonicalOperators) -> Result<ComplexMatrix> {
    let p = match spectrum.params() {
        ModelParams::Circuit(p) => *p,
        other => {
            return Err(Error::Precondition(format!(
                "expected circuit parameters, got {other:?}"
            )))
        }
    };
    match spectrum.gauge() {
        Gauge::Flux => {
            let axis = kron(
                &p.coupling_axis(),
                &ComplexMatrix::identity(spectrum.spec().boson_dim()),
            );
            Ok(&ops.x + &axis.scale_real(2.0 * p.eta))
        }
        Gauge::Charge => Ok(ops.x.clone()),
        g => Err(Error::Precondition(format!("{} gauge is not a circuit gauge", g.tag()))),
    }
}

/// Inductor voltage `V_L = Φ̇_L = −i[Φ_L, H]`, in units of `ω_c Φ_zpf`.
pub fn inductor_voltage(spectrum: &Spectrum, ops: &CanonicalOperators) -> Result<ComplexMatrix> {
    let phi = inductor_flux(spectrum, ops)?;
    let omega_c = spectrum.params().omega_c();
    Ok(commutator(&phi, &spectrum.hamiltonian.matrix).scale(-I / omega_c))
}

/// `𝒱^L` and `𝒱^C` for the transition `j → 0̃`, from a flux- or
/// charge-gauge spectrum. The capacitor operator `a − a†` is unchanged by
/// `R`, so the same matrix serves both gauges.
pub fn circuit_voltage_rates(spectrum: &Spectrum, j: usize) -> Result<VoltageRates> {
    check_transition(spectrum, j, 0)?;
    let ops = build_space(spectrum.spec())?;
    let v_l = inductor_voltage(spectrum, &ops)?;
    let v_c = &ops.a - &ops.a_dag;
    Ok(VoltageRates {
        v_l: transition_rate(spectrum, &v_l, j, 0),
        v_c: transition_rate(spectrum, &v_c, j, 0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{CircuitParams, RabiParams};
    use crate::hilbert::{HilbertSpec, Qubit};
    use crate::linalg::{kron_vec, normalized};
    use crate::spectra::{converged_spectrum, diagonalize, label_states, Branch, Label};

    fn rabi(eta: f64) -> ModelParams {
        ModelParams::Rabi(RabiParams::resonant(eta))
    }

    fn labeled(g: Gauge, p: &ModelParams, n: usize) -> Spectrum {
        label_states(converged_spectrum(g, p, n).unwrap()).unwrap()
    }

    const ONE_PLUS: Label = Label::Doublet(1, Branch::Plus);
    const ONE_MINUS: Label = Label::Doublet(1, Branch::Minus);

    #[test]
    fn positive_frequency_of_free_field_is_i_a() {
        let s = converged_spectrum(Gauge::Coulomb, &rabi(0.0), 4).unwrap();
        let ops = build_space(s.spec()).unwrap();
        let plus = positive_frequency_part(&ops.p, &s).unwrap();
        // degenerate |e,n⟩, |g,n+1⟩ do not couple through 𝒫, so this is exact
        assert!(plus.max_abs_diff(&ops.a.scale(I)) < 1e-12);
    }

    #[test]
    fn positive_and_negative_parts_are_adjoint() {
        let s = diagonalize(
            crate::hamiltonians::build_dipole(&RabiParams::resonant(0.8), &HilbertSpec::new(30).unwrap()).unwrap(),
        )
        .unwrap();
        let ops = build_space(s.spec()).unwrap();
        let plus = positive_frequency_part(&ops.x, &s).unwrap();
        let minus = positive_frequency_part(&ops.x, &s).unwrap().adjoint();
        let rest = &(&ops.x - &plus) - &minus;
        // the remainder is diagonal in the eigenbasis
        let m = s.states.adjoint().matmul(&rest).matmul(&s.states);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if i != j {
                    assert!(m[(i, j)].norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn ground_emission_equals_brute_force_sum() {
        let s = converged_spectrum(Gauge::Coulomb, &rabi(0.8), 6).unwrap();
        let ops = build_space(s.spec()).unwrap();
        let plus = positive_frequency_part(&ops.p, &s).unwrap();
        let g = s.state(0);
        let direct = plus.adjoint().matmul(&plus).expectation(&g).re;
        // O⁺|0̃⟩ vanishes: the ground state has nothing below it
        let brute: f64 = (0..s.dim())
            .map(|k| plus.matrix_element(&s.state(k), &g).norm_sqr())
            .sum();
        assert!((direct - brute).abs() < 1e-10);
        assert!(direct.abs() < 1e-10);
        // emission from 1̃-: O⁻O⁺ picks up |⟨0̃|O|1̃-⟩|²
        let e1 = s.state(1);
        let from_one = plus.adjoint().matmul(&plus).expectation(&e1).re;
        let want: f64 = (0..1).map(|k| ops.p.matrix_element(&s.state(k), &e1).norm_sqr()).sum();
        assert!((from_one - want).abs() < 1e-10);
    }

    #[test]
    fn small_coupling_rates_are_one_half() {
        for g in [Gauge::Coulomb, Gauge::Dipole] {
            let s = labeled(g, &rabi(1e-4), 4);
            let (p, m) = (s.require_label(ONE_PLUS).unwrap(), s.require_label(ONE_MINUS).unwrap());
            for j in [p, m] {
                assert!((photodetection_w(&s, j, 0).unwrap() - 0.5).abs() < 1e-3);
                assert!((photodetection_w_prime(&s, j, 0).unwrap() - 0.5).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn w_favours_upper_polariton_and_w_prime_the_lower() {
        let s = labeled(Gauge::Dipole, &rabi(0.5), 4);
        let (p, m) = (s.require_label(ONE_PLUS).unwrap(), s.require_label(ONE_MINUS).unwrap());
        assert!(photodetection_w(&s, p, 0).unwrap() > photodetection_w(&s, m, 0).unwrap());
        assert!(photodetection_w_prime(&s, m, 0).unwrap() > photodetection_w_prime(&s, p, 0).unwrap());
    }

    #[test]
    fn w_prime_departs_from_w_already_at_point_one() {
        let s = labeled(Gauge::Dipole, &rabi(0.1), 4);
        let m = s.require_label(ONE_MINUS).unwrap();
        let (w, wp) = (
            photodetection_w(&s, m, 0).unwrap(),
            photodetection_w_prime(&s, m, 0).unwrap(),
        );
        assert!((w - wp).abs() > 0.01 * w);
    }

    #[test]
    fn lower_polariton_goes_dark_in_deep_strong_coupling() {
        let s = labeled(Gauge::Coulomb, &rabi(2.0), 4);
        let m = s.require_label(ONE_MINUS).unwrap();
        assert!(photodetection_w(&s, m, 0).unwrap() < 0.02);
    }

    #[test]
    fn w_agrees_across_gauges() {
        for eta in [0.1, 0.5, 1.0, 2.0] {
            let c = converged_spectrum(Gauge::Coulomb, &rabi(eta), 6).unwrap();
            let d = converged_spectrum(Gauge::Dipole, &rabi(eta), 6).unwrap();
            for j in 1..6 {
                for k in 0..j {
                    let (wc, wd) = (photodetection_w(&c, j, k).unwrap(), photodetection_w(&d, j, k).unwrap());
                    // near-degenerate pairs can rotate; compare gauge-invariant sums instead
                    if degenerate_pair(&c, j) || degenerate_pair(&c, k) {
                        continue;
                    }
                    assert!((wc - wd).abs() < 1e-7, "eta {eta} ({j},{k}): {wc} vs {wd}");
                }
            }
        }
    }

    fn degenerate_pair(s: &Spectrum, j: usize) -> bool {
        let e = &s.energies;
        (j > 0 && (e[j] - e[j - 1]).abs() < 1e-6) || (e[j + 1] - e[j]).abs() < 1e-6
    }

    #[test]
    fn sensor_rates() {
        let d = labeled(Gauge::Dipole, &rabi(0.8), 4);
        let c = labeled(Gauge::Coulomb, &rabi(0.8), 4);
        let (jd, jc) = (d.require_label(ONE_PLUS).unwrap(), c.require_label(ONE_PLUS).unwrap());
        let corrected = sensor_rate_corrected(&d, jd, 0).unwrap();
        assert!((corrected - photodetection_w(&c, jc, 0).unwrap()).abs() < 1e-9);
        assert!((corrected - sensor_rate_standard(&d, jd, 0).unwrap()).abs() > 1e-2);
        assert!(sensor_rate_corrected(&c, jc, 0).is_err());

        let bare = converged_spectrum(Gauge::Dipole, &rabi(0.0), 4).unwrap();
        let ops = build_space(bare.spec()).unwrap();
        let want = ops.p.matrix_element(&bare.state(0), &bare.state(1)).norm_sqr();
        assert!((sensor_rate_corrected(&bare, 1, 0).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn rates_refuse_unconverged_levels() {
        let s = converged_spectrum(Gauge::Coulomb, &rabi(0.3), 3).unwrap();
        assert!(matches!(
            photodetection_w(&s, 3, 0),
            Err(Error::UnconvergedLevel { .. })
        ));
        assert!(photodetection_w(&s, 0, 1).is_err());
    }

    #[test]
    fn parity_selection_rule() {
        let s = converged_spectrum(Gauge::Coulomb, &rabi(0.7), 6).unwrap();
        let ops = build_space(s.spec()).unwrap();
        let pi = ops.parity();
        let parity: Vec<f64> = (0..6).map(|k| pi.expectation(&s.state(k)).re).collect();
        for j in 0..6 {
            for k in 0..6 {
                if (parity[j] - parity[k]).abs() < 1e-6 {
                    assert!(ops.p.matrix_element(&s.state(k), &s.state(j)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn populations() {
        let s = converged_spectrum(Gauge::Coulomb, &rabi(0.0), 2).unwrap();
        assert!(qubit_population(&s, 0, Gauge::Coulomb).unwrap() < 1e-14);

        let c = converged_spectrum(Gauge::Coulomb, &rabi(3.0), 2).unwrap();
        assert!(qubit_population(&c, 0, Gauge::Coulomb).unwrap() < 0.02);
        assert!(qubit_population(&c, 1, Gauge::Coulomb).unwrap() > 0.98);
        let d = converged_spectrum(Gauge::Dipole, &rabi(3.0), 2).unwrap();
        for k in 0..2 {
            assert!((qubit_population(&d, k, Gauge::Dipole).unwrap() - 0.5).abs() < 0.02);
            // readout population agrees from either spectrum
            let via_c = qubit_population(&c, k, Gauge::Dipole).unwrap();
            assert!((via_c - qubit_population(&d, k, Gauge::Dipole).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn ground_photon_numbers() {
        let s = converged_spectrum(Gauge::Coulomb, &rabi(0.0), 2).unwrap();
        assert!(ground_photon_number(&s, Gauge::Coulomb).unwrap() < 1e-14);
        let c = converged_spectrum(Gauge::Coulomb, &rabi(3.0), 2).unwrap();
        let d = converged_spectrum(Gauge::Dipole, &rabi(3.0), 2).unwrap();
        assert!(ground_photon_number(&c, Gauge::Coulomb).unwrap() < 0.05);
        let wrong = ground_photon_number(&d, Gauge::Dipole).unwrap();
        assert!((wrong - 9.0).abs() < 0.45, "{wrong}");
        let right = ground_photon_number(&d, Gauge::Coulomb).unwrap();
        assert!((right - ground_photon_number(&c, Gauge::Coulomb).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn entropy_limits() {
        let spec = HilbertSpec::new(4).unwrap();
        let g0 = spec.basis_state(Qubit::Ground, 0);
        assert!(entanglement_entropy(&g0).unwrap() < 1e-12);
        let e1 = spec.basis_state(Qubit::Excited, 1);
        let bell: Vec<C64> = g0.iter().zip(&e1).map(|(a, b)| a + b).collect();
        assert!((entanglement_entropy(&normalized(&bell)).unwrap() - 1.0).abs() < 1e-12);
        let product = kron_vec(
            &normalized(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]),
            &[
                C64::new(0.6, 0.0),
                C64::new(0.0, 0.8),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        assert!(entanglement_entropy(&product).unwrap() < 1e-10);

        let d = converged_spectrum(Gauge::Dipole, &rabi(3.0), 2).unwrap();
        assert!(entanglement_entropy(&d.state(0)).unwrap() > 1.0 - 1e-3);
    }

    #[test]
    fn circuit_rates_small_coupling_and_gauge_cross_check() {
        let small = ModelParams::Circuit(CircuitParams::resonant(1e-4));
        let f = labeled(Gauge::Flux, &small, 4);
        for l in [ONE_PLUS, ONE_MINUS] {
            let r = circuit_voltage_rates(&f, f.require_label(l).unwrap()).unwrap();
            assert!((r.v_l - 0.5).abs() < 1e-3 && (r.v_c - 0.5).abs() < 1e-3, "{r:?}");
        }

        let p = ModelParams::Circuit(CircuitParams::resonant(1.0));
        let f = labeled(Gauge::Flux, &p, 4);
        let q = labeled(Gauge::Charge, &p, 4);
        for l in [ONE_PLUS, ONE_MINUS] {
            let rf = circuit_voltage_rates(&f, f.require_label(l).unwrap()).unwrap();
            let rq = circuit_voltage_rates(&q, q.require_label(l).unwrap()).unwrap();
            assert!((rf.v_l - rq.v_l).abs() < 1e-7, "{rf:?} {rq:?}");
            assert!((rf.v_c - rq.v_c).abs() < 1e-7);
        }
        let j = f.require_label(ONE_PLUS).unwrap();
        let r = circuit_voltage_rates(&f, j).unwrap();
        assert!((r.v_l - r.v_c).abs() > 0.05, "{r:?}");
    }

    #[test]
    fn wrong_model_is_rejected() {
        let c = converged_spectrum(Gauge::Flux, &ModelParams::Circuit(CircuitParams::resonant(0.3)), 3).unwrap();
        assert!(photodetection_w(&c, 1, 0).is_err());
        let r = converged_spectrum(Gauge::Coulomb, &rabi(0.3), 3).unwrap();
        assert!(circuit_voltage_rates(&r, 1).is_err());
    }
}
