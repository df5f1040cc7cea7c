//! Invariant checks run by `gaugeqed selftest`.

use gaugeqed::asymptotic::jc_doublet;
use gaugeqed::hamiltonians::{CircuitParams, Gauge, ModelParams, RabiParams};
use gaugeqed::hilbert::{build_space, HilbertSpec, Qubit};
use gaugeqed::linalg::{commutator, fidelity, hermitian_eig, norm, ComplexMatrix};
use gaugeqed::observables::{
    circuit_voltage_rates, entanglement_entropy, ground_photon_number, photodetection_w, positive_frequency_part,
};
use gaugeqed::spectra::{build_in_gauge, converged_spectrum, diagonalize, label_states, Branch, Label};
use gaugeqed::switching::{propagate, uniform_times, RampShape, StepControl, SwitchGauge, SwitchProtocol};
use gaugeqed::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ok_if(pass: bool, detail: String) -> Check {
    if pass {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rabi(eta: f64) -> ModelParams {
    ModelParams::Rabi(RabiParams::resonant(eta))
}

fn gap_defect(gauges: [Gauge; 2], p: &ModelParams) -> Result<f64, String> {
    let a = converged_spectrum(gauges[0], p, 8).map_err(fail)?;
    let b = converged_spectrum(gauges[1], p, 8).map_err(fail)?;
    Ok((1..8)
        .map(|k| {
            let (x, y) = (a.energies[k] - a.energies[0], b.energies[k] - b.energies[0]);
            (x - y).abs() / y.abs().max(1.0)
        })
        .fold(0.0, f64::max))
}

fn spectra_agree() -> Check {
    let mut worst: f64 = 0.0;
    for eta in [0.5, 2.0] {
        worst = worst.max(gap_defect([Gauge::Coulomb, Gauge::Dipole], &rabi(eta))?);
        let c = ModelParams::Circuit(CircuitParams::resonant(eta));
        worst = worst.max(gap_defect([Gauge::Flux, Gauge::Charge], &c)?);
    }
    ok_if(worst <= 1e-8, format!("max relative gap defect {worst:.1e}"))
}

fn rates_agree() -> Check {
    let c = converged_spectrum(Gauge::Coulomb, &rabi(1.0), 5).map_err(fail)?;
    let d = converged_spectrum(Gauge::Dipole, &rabi(1.0), 5).map_err(fail)?;
    let mut worst: f64 = 0.0;
    for j in 1..5 {
        for k in 0..j {
            let wc = photodetection_w(&c, j, k).map_err(fail)?;
            let wd = photodetection_w(&d, j, k).map_err(fail)?;
            worst = worst.max((wc - wd).abs());
        }
    }
    ok_if(worst <= 1e-7, format!("max |W_C − W_D| {worst:.1e}"))
}

fn weak_coupling_rates() -> Check {
    let s = label_states(converged_spectrum(Gauge::Coulomb, &rabi(1e-4), 4).map_err(fail)?).map_err(fail)?;
    let w = |b| -> Result<f64, String> {
        photodetection_w(&s, s.require_label(Label::Doublet(1, b)).map_err(fail)?, 0).map_err(fail)
    };
    let (p, m) = (w(Branch::Plus)?, w(Branch::Minus)?);
    ok_if(
        (p - 0.5).abs() <= 1e-3 && (m - 0.5).abs() <= 1e-3,
        format!("W = {p:.4}, {m:.4}"),
    )
}

fn parity_symmetry() -> Check {
    let spec = HilbertSpec::new(30).map_err(fail)?;
    let pi = build_space(&spec).map_err(fail)?.parity();
    let c = ModelParams::Circuit(CircuitParams::symmetric(1.0, 0.7, 0.9).map_err(fail)?);
    let r = ModelParams::Rabi(RabiParams::new(1.0, 0.7, 0.9).map_err(fail)?);
    let mut worst: f64 = 0.0;
    for (g, p) in [
        (Gauge::Coulomb, &r),
        (Gauge::Dipole, &r),
        (Gauge::Flux, &c),
        (Gauge::Charge, &c),
    ] {
        let h = build_in_gauge(g, p, &spec).map_err(fail)?;
        worst = worst.max(commutator(&h.matrix, &pi).max_abs());
    }
    ok_if(worst <= 1e-10, format!("max |[H, Π]| {worst:.1e}"))
}

fn positive_frequency_split() -> Check {
    let s = converged_spectrum(Gauge::Dipole, &rabi(0.7), 4).map_err(fail)?;
    let ops = build_space(s.spec()).map_err(fail)?;
    let plus = positive_frequency_part(&ops.x, &s).map_err(fail)?;
    let v = &s.states;
    let diag = ComplexMatrix::from_fn(s.dim(), s.dim(), |i, j| {
        if i == j {
            ops.x.matrix_element(&v.column(i), &v.column(i))
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let rebuilt = &(&plus + &plus.adjoint()) + &v.matmul(&diag).matmul(&v.adjoint());
    let d = rebuilt.max_abs_diff(&ops.x);
    ok_if(d <= 1e-9, format!("|x − x⁺ − x⁻ − x₀| {d:.1e}"))
}

fn eigensolver_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2019);
    let mut worst: f64 = 0.0;
    for _ in 0..16 {
        let n = rng.gen_range(2..40);
        let m = ComplexMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
        .hermitian_part();
        let e = hermitian_eig(&m).map_err(fail)?;
        worst = worst
            .max(e.reconstruct().max_abs_diff(&m))
            .max(e.vectors.unitarity_defect());
    }
    ok_if(worst <= 1e-11, format!("max defect {worst:.1e}"))
}

fn large_coupling_limits() -> Check {
    let c = converged_spectrum(Gauge::Coulomb, &rabi(3.0), 2).map_err(fail)?;
    let d = converged_spectrum(Gauge::Dipole, &rabi(3.0), 2).map_err(fail)?;
    let nc = ground_photon_number(&c, Gauge::Coulomb).map_err(fail)?;
    let nd = ground_photon_number(&d, Gauge::Dipole).map_err(fail)?;
    let sd = entanglement_entropy(&d.state(0)).map_err(fail)?;
    ok_if(
        nc <= 0.05 && (nd - 9.0).abs() <= 0.45 && sd >= 0.999,
        format!("n_C {nc:.3}, n_D {nd:.3}, S_D {sd:.4}"),
    )
}

fn jc_limit() -> Check {
    let p = RabiParams::new(1.0, 1.2, 0.01).map_err(fail)?;
    let s = converged_spectrum(Gauge::Coulomb, &ModelParams::Rabi(p), 3).map_err(fail)?;
    let (m, pl) = jc_doublet(&p).map_err(fail)?;
    let d = ((s.energies[1] - s.energies[0]) - m)
        .abs()
        .max(((s.energies[2] - s.energies[0]) - pl).abs());
    ok_if(d <= 1e-4, format!("max |E − E_JC| {d:.1e}"))
}

fn circuit_voltage_invariance() -> Check {
    let p = ModelParams::Circuit(CircuitParams::resonant(1.0));
    let f = converged_spectrum(Gauge::Flux, &p, 4).map_err(fail)?;
    let q = converged_spectrum(Gauge::Charge, &p, 4).map_err(fail)?;
    let mut worst: f64 = 0.0;
    for j in 1..4 {
        let (a, b) = (
            circuit_voltage_rates(&f, j).map_err(fail)?,
            circuit_voltage_rates(&q, j).map_err(fail)?,
        );
        worst = worst.max((a.v_l - b.v_l).abs());
    }
    ok_if(worst <= 1e-7, format!("max |𝒱^L_fg − 𝒱^L_cg| {worst:.1e}"))
}

fn switch_dynamics() -> Check {
    let p = RabiParams::resonant(0.8);
    let spec = HilbertSpec::new(32).map_err(fail)?;
    let ground = |g| -> Result<Vec<C64>, String> {
        Ok(
            diagonalize(build_in_gauge(g, &ModelParams::Rabi(p), &spec).map_err(fail)?)
                .map_err(fail)?
                .state(0),
        )
    };
    let (gd, gc) = (ground(Gauge::Dipole)?, ground(Gauge::Coulomb)?);
    let ramp = 2e-3 * std::f64::consts::PI;
    let off = SwitchProtocol::off(0.0, ramp, RampShape::RaisedCosine).map_err(fail)?;
    let r = propagate(
        &gd,
        SwitchGauge::Dipole,
        &p,
        &spec,
        &off,
        &[0.0, ramp],
        StepControl::default(),
    )
    .map_err(fail)?;
    let deficit = 1.0 - fidelity(r.final_state(), &gc);

    let onoff = SwitchProtocol::on_off(0.0, 1.0, ramp, RampShape::RaisedCosine).map_err(fail)?;
    let times = uniform_times(-0.5, 2.0, 6);
    let g0 = spec.basis_state(Qubit::Ground, 0);
    let run = |g| propagate(&g0, g, &p, &spec, &onoff, &times, StepControl::default()).map_err(fail);
    let (c, d) = (run(SwitchGauge::Coulomb)?, run(SwitchGauge::Dipole)?);
    let end = times.len() - 1;
    let dn = (c.photon_number[end] - d.photon_number[end]).abs();
    let norm_drift = c
        .states
        .iter()
        .chain(&d.states)
        .map(|s| (norm(s) - 1.0).abs())
        .fold(0.0, f64::max);
    ok_if(
        deficit <= 1e-4 && dn <= 1e-4 && norm_drift <= 1e-8,
        format!("off-switch 1 − F {deficit:.1e}, round-trip Δn {dn:.1e}, norm drift {norm_drift:.1e}"),
    )
}

type Named = (&'static str, fn() -> Check);

pub const CHECKS: [Named; 10] = [
    ("gauge-invariant spectra", spectra_agree),
    ("cross-gauge photodetection rates", rates_agree),
    ("weak-coupling photodetection endpoints", weak_coupling_rates),
    ("parity symmetry", parity_symmetry),
    ("positive-frequency decomposition", positive_frequency_split),
    ("eigensolver round-trip", eigensolver_round_trip),
    ("large-coupling limits", large_coupling_limits),
    ("JC limit", jc_limit),
    ("circuit voltage gauge invariance", circuit_voltage_invariance),
    ("switch dynamics", switch_dynamics),
];

/// Runs every check and prints one line each; returns the number failed.
pub fn run() -> usize {
    let mut failed = 0;
    for (name, check) in CHECKS {
        match check() {
            Ok(d) => println!("PASS {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL {name}: {d}");
            }
        }
    }
    failed
}
