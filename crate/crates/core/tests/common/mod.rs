//! Randomized invariant suites shared by the `properties` and `acceptance`
//! targets. Every suite runs with a fixed seed.

#![allow(dead_code)]

use gaugeqed::hamiltonians::{build_coulomb, build_dipole, QuadratureCalculus, RabiParams};
use gaugeqed::hilbert::{build_space, HilbertSpec};
use gaugeqed::linalg::{hermitian_eig, norm, normalized, reduced_qubit_state, unitary_exp, ComplexMatrix};
use gaugeqed::observables::{entanglement_entropy, positive_frequency_part};
use gaugeqed::spectra::diagonalize;
use gaugeqed::switching::{propagate, uniform_times, RampShape, StepControl, SwitchGauge, SwitchProtocol};
use gaugeqed::C64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestError, TestRunner};

pub const SEED: u64 = 0x5eed_2019;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..Config::default()
    })
}

fn report<T: std::fmt::Debug>(r: Result<(), TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

fn hermitian(n: usize, raw: &[f64]) -> ComplexMatrix {
    let m = ComplexMatrix::from_fn(n, n, |i, j| C64::new(raw[2 * (i * n + j)], raw[2 * (i * n + j) + 1]));
    m.hermitian_part()
}

fn random_hermitian() -> impl Strategy<Value = ComplexMatrix> {
    (2usize..=24)
        .prop_flat_map(|n| prop::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |raw| hermitian(n, &raw)))
}

fn random_state(dim: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| normalized(&v.into_iter().map(|(a, b)| C64::new(a, b)).collect::<Vec<_>>()))
}

/// `V diag(E) V† = H`, `V` unitary, `E` ascending.
pub fn eigensolver_round_trip() -> Result<(), String> {
    report(runner(64).run(&random_hermitian(), |h| {
        let e = hermitian_eig(&h).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(e.vectors.unitarity_defect() < 1e-12);
        prop_assert!(e.reconstruct().max_abs_diff(&h) < 1e-12 * h.rows() as f64);
        Ok(())
    }))
}

/// `cos² + sin² = 1` on the quadrature and `e^{iHt} e^{−iHt} = 1`.
pub fn spectral_calculus_identities() -> Result<(), String> {
    let calc = QuadratureCalculus::new(32).unwrap();
    report(
        runner(32).run(&(0.0f64..6.0, random_hermitian(), -5.0f64..5.0), |(k, h, t)| {
            let (c, s) = calc.cos_sin(k);
            let one = &c.matmul(&c) + &s.matmul(&s);
            prop_assert!(one.max_abs_diff(&ComplexMatrix::identity(32)) < 1e-11);
            prop_assert!(c.matmul(&s).max_abs_diff(&s.matmul(&c)) < 1e-11);
            let u = unitary_exp(&h, t).unwrap();
            let back = unitary_exp(&h, -t).unwrap();
            prop_assert!(u.unitarity_defect() < 1e-11);
            prop_assert!(u.matmul(&back).max_abs_diff(&ComplexMatrix::identity(h.rows())) < 1e-11);
            Ok(())
        }),
    )
}

/// The reduced qubit state of any pure state is a density matrix and its
/// entropy lies in `[0, 1]` bits.
pub fn partial_trace_positivity() -> Result<(), String> {
    let strat = (1usize..=20).prop_flat_map(|n| random_state(2 * n));
    report(runner(128).run(&strat, |psi| {
        let rho = reduced_qubit_state(&psi).unwrap();
        prop_assert!(rho.hermiticity_defect() < 1e-14);
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        let ev = hermitian_eig(&rho).unwrap().values;
        prop_assert!(ev[0] >= -1e-12, "{ev:?}");
        let s = entanglement_entropy(&psi).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&s), "{s}");
        Ok(())
    }))
}

/// Rabi eigenstates have definite parity and `x` only connects opposite
/// parities.
pub fn parity_selection_rules() -> Result<(), String> {
    let spec = HilbertSpec::new(40).unwrap();
    let ops = build_space(&spec).unwrap();
    let pi = ops.parity();
    report(
        runner(24).run(&(0.05f64..1.2, 0.3f64..1.7, any::<bool>()), |(eta, w0, dipole)| {
            let p = RabiParams::new(1.0, w0, eta).unwrap();
            let h = if dipole {
                build_dipole(&p, &spec)
            } else {
                build_coulomb(&p, &spec)
            }
            .unwrap();
            let s = diagonalize(h).unwrap();
            let levels = 6;
            for j in 0..levels {
                let gap = (0..levels)
                    .filter(|&k| k != j)
                    .map(|k| (s.energies[k] - s.energies[j]).abs())
                    .fold(f64::MAX, f64::min);
                prop_assume!(gap > 1e-6);
            }
            let par: Vec<f64> = (0..levels).map(|j| pi.expectation(&s.state(j)).re).collect();
            for &q in &par {
                prop_assert!((q.abs() - 1.0).abs() < 1e-8, "{par:?}");
            }
            for j in 0..levels {
                for k in 0..levels {
                    if par[j] * par[k] > 0.0 {
                        let x = ops.x.matrix_element(&s.state(k), &s.state(j)).norm();
                        prop_assert!(x < 1e-8, "x_{k}{j} = {x}");
                    }
                }
            }
            Ok(())
        }),
    )
}

/// Propagation keeps every sampled state normalized.
pub fn norm_conservation() -> Result<(), String> {
    let spec = HilbertSpec::new(12).unwrap();
    let gauges = prop_oneof![
        Just(SwitchGauge::Coulomb),
        Just(SwitchGauge::Dipole),
        Just(SwitchGauge::WrongDipole)
    ];
    let strat = (
        0.0f64..1.0,
        0.05f64..0.5,
        any::<bool>(),
        gauges,
        random_state(spec.dim()),
    );
    report(runner(12).run(&strat, |(eta, ramp, cosine, gauge, psi)| {
        let shape = if cosine {
            RampShape::RaisedCosine
        } else {
            RampShape::Linear
        };
        let proto = SwitchProtocol::on_off(0.0, ramp + 0.3, ramp, shape).unwrap();
        let times = uniform_times(-0.2, 2.0 * ramp + 0.6, 7);
        let r = propagate(
            &psi,
            gauge,
            &RabiParams::resonant(eta),
            &spec,
            &proto,
            &times,
            StepControl::default(),
        )
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
        for s in &r.states {
            prop_assert!((norm(s) - 1.0).abs() < 1e-8);
        }
        Ok(())
    }))
}

/// `positive_frequency_part` equals the explicit sum over lowering pairs,
/// and `O = O⁺ + (O⁺)† + O_diag` for Hermitian `O`.
pub fn positive_frequency_brute_force() -> Result<(), String> {
    let spec = HilbertSpec::new(10).unwrap();
    let dim = spec.dim();
    let strat = (
        0.0f64..2.0,
        0.3f64..1.7,
        prop::collection::vec(-1.0f64..1.0, 2 * dim * dim),
    );
    report(runner(24).run(&strat, |(eta, w0, raw)| {
        let o = hermitian(dim, &raw);
        let s = diagonalize(build_coulomb(&RabiParams::new(1.0, w0, eta).unwrap(), &spec).unwrap()).unwrap();
        let plus = positive_frequency_part(&o, &s).unwrap();
        let mut brute = ComplexMatrix::zeros(dim, dim);
        let mut diag = ComplexMatrix::zeros(dim, dim);
        for j in 0..dim {
            for k in 0..dim {
                let (kk, jj) = (s.state(k), s.state(j));
                let term = ComplexMatrix::outer(&kk, &jj).scale(o.matrix_element(&kk, &jj));
                let close = (s.energies[k] - s.energies[j]).abs() <= 1e-10 * s.energies[j].abs().max(1.0);
                if close {
                    diag += &term;
                } else if s.energies[k] < s.energies[j] {
                    brute += &term;
                }
            }
        }
        prop_assert!(plus.max_abs_diff(&brute) < 1e-10);
        let rebuilt = &(&plus + &plus.adjoint()) + &diag;
        prop_assert!(rebuilt.max_abs_diff(&o) < 1e-10);
        Ok(())
    }))
}

type Suite = (&'static str, fn() -> Result<(), String>);

pub const SUITES: [Suite; 6] = [
    ("eigensolver round-trip", eigensolver_round_trip),
    ("spectral-calculus identities", spectral_calculus_identities),
    ("partial-trace positivity", partial_trace_positivity),
    ("parity selection rules", parity_selection_rules),
    ("norm conservation", norm_conservation),
    ("positive-frequency brute-force sum", positive_frequency_brute_force),
];
