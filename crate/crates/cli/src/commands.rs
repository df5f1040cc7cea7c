//! One function per figure dataset. Grid points run on the worker pool and
//! rows come back in grid order.

use gaugeqed::hamiltonians::{CircuitParams, Gauge, ModelParams, RabiParams};
use gaugeqed::hilbert::{HilbertSpec, Qubit};
use gaugeqed::observables::{
    circuit_voltage_rates, entanglement_entropy, ground_photon_number, photodetection_w, photodetection_w_prime,
    qubit_inversion, qubit_population,
};
use gaugeqed::readout::{chi_numeric, readout_spec, ReadoutParams};
use gaugeqed::spectra::{build_in_gauge, converged_spectrum, diagonalize, label_states, Branch, Label, Spectrum};
use gaugeqed::switching::{propagate, uniform_times, StepControl, SwitchGauge, SwitchProtocol};
use log::{info, warn};
use rayon::prelude::*;

use crate::config::{GaugeChoice, Protocol, RunConfig};
use crate::error::CliError;
use crate::output::Table;

/// Coupling used in place of `η = 0` where the doublet labels are needed:
/// on resonance the bare doublet is degenerate.
pub const ZERO_COUPLING_PROBE: f64 = 1e-6;

fn header(cfg: &RunConfig, names: &[String]) -> Vec<String> {
    let mut h = vec!["eta".to_string(), "omega_ratio".to_string()];
    if cfg.command == crate::config::Command::Circuit {
        h.push("theta".into());
    }
    h.extend(names.iter().cloned());
    h
}

fn sweep<F>(cfg: &RunConfig, names: Vec<String>, f: F) -> Result<Table, CliError>
where
    F: Fn(f64) -> Result<Vec<f64>, CliError> + Sync,
{
    let points = cfg.eta.points();
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|&eta| {
            let mut row = vec![eta, cfg.omega0];
            if cfg.command == crate::config::Command::Circuit {
                row.push(cfg.theta);
            }
            row.extend(f(eta)?);
            Ok(row)
        })
        .collect::<Result<_, CliError>>()?;
    let mut t = Table::new(header(cfg, &names));
    t.rows = rows;
    Ok(t)
}

fn rabi(cfg: &RunConfig, eta: f64) -> Result<ModelParams, CliError> {
    Ok(ModelParams::Rabi(RabiParams::new(1.0, cfg.omega0, eta)?))
}

fn circuit(cfg: &RunConfig, eta: f64) -> Result<ModelParams, CliError> {
    Ok(ModelParams::Circuit(CircuitParams::with_theta(
        1.0, cfg.omega0, eta, cfg.theta,
    )?))
}

/// Converged spectrum, or a fixed-cutoff one when `--cutoff` is given.
fn spectrum(cfg: &RunConfig, gauge: Gauge, params: &ModelParams, levels: usize) -> Result<Spectrum, CliError> {
    Ok(match cfg.cutoff {
        Some(n) => {
            warn!("fixed cutoff n_fock = {n}: convergence is not checked");
            let h = build_in_gauge(gauge, params, &HilbertSpec::new(n)?)?;
            diagonalize(h)?.assume_converged(levels)
        }
        None => converged_spectrum(gauge, params, levels)?,
    })
}

fn cavity_gauges(cfg: &RunConfig) -> Result<Vec<Gauge>, CliError> {
    match cfg.gauge {
        GaugeChoice::Coulomb => Ok(vec![Gauge::Coulomb]),
        GaugeChoice::Dipole => Ok(vec![Gauge::Dipole]),
        GaugeChoice::Both => Ok(vec![Gauge::Coulomb, Gauge::Dipole]),
        other => Err(CliError::Config(format!(
            "{other:?} is not a cavity gauge for this command"
        ))),
    }
}

fn circuit_gauges(cfg: &RunConfig) -> Result<Vec<Gauge>, CliError> {
    match cfg.gauge {
        GaugeChoice::Flux => Ok(vec![Gauge::Flux]),
        GaugeChoice::Charge => Ok(vec![Gauge::Charge]),
        GaugeChoice::Both => Ok(vec![Gauge::Flux, Gauge::Charge]),
        other => Err(CliError::Config(format!("{other:?} is not a circuit gauge"))),
    }
}

fn tag(g: Gauge) -> &'static str {
    match g {
        Gauge::Coulomb => "C",
        Gauge::Dipole => "D",
        Gauge::Flux => "fg",
        Gauge::Charge => "cg",
    }
}

/// Energy gaps `E_k − E_0` of the lowest `levels` states per gauge.
pub fn spectrum_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let gauges = match cfg.gauge {
        GaugeChoice::Flux | GaugeChoice::Charge => circuit_gauges(cfg)?,
        _ => cavity_gauges(cfg)?,
    };
    let names = gauges
        .iter()
        .flat_map(|&g| (1..cfg.levels).map(move |k| format!("dE{k}_{}", tag(g))))
        .collect();
    sweep(cfg, names, |eta| {
        let mut row = Vec::new();
        for &g in &gauges {
            let p = if matches!(g, Gauge::Flux | Gauge::Charge) {
                circuit(cfg, eta)?
            } else {
                rabi(cfg, eta)?
            };
            let s = spectrum(cfg, g, &p, cfg.levels)?;
            row.extend((1..cfg.levels).map(|k| s.energies[k] - s.energies[0]));
        }
        Ok(row)
    })
}

/// `W` for `1̃± → 0̃` in the chosen gauge and the naive dipole-gauge `W′`.
pub fn photodetect_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let gauge = match cavity_gauges(cfg)?[..] {
        [g] => g,
        _ => return Err(CliError::Config("photodetect takes --gauge coulomb or dipole".into())),
    };
    let names = ["W_1p", "W_1m", "Wp_1p", "Wp_1m"].map(String::from).to_vec();
    sweep(cfg, names, |eta| {
        let eval = if eta == 0.0 { ZERO_COUPLING_PROBE } else { eta };
        let p = rabi(cfg, eval)?;
        let levels = cfg.levels.max(4);
        let labeled = |g| -> Result<Spectrum, CliError> { Ok(label_states(spectrum(cfg, g, &p, levels)?)?) };
        let s = labeled(gauge)?;
        let d = if gauge == Gauge::Dipole {
            s.clone()
        } else {
            labeled(Gauge::Dipole)?
        };
        let idx = |s: &Spectrum, b| s.require_label(Label::Doublet(1, b));
        Ok(vec![
            photodetection_w(&s, idx(&s, Branch::Plus)?, 0)?,
            photodetection_w(&s, idx(&s, Branch::Minus)?, 0)?,
            photodetection_w_prime(&d, idx(&d, Branch::Plus)?, 0)?,
            photodetection_w_prime(&d, idx(&d, Branch::Minus)?, 0)?,
        ])
    })
}

/// Ground-state excitation probability in each gauge, the dipole-gauge
/// inversion, and the extracted dispersive shift in units of `χ`.
pub fn readout_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let rp = ReadoutParams::new(cfg.omega0, cfg.omega_b, cfg.g_b)?;
    rp.check_dispersive()?;
    let names = ["pop_C", "pop_D", "sz_D", "chi_ratio"].map(String::from).to_vec();
    sweep(cfg, names, |eta| {
        let a = RabiParams::new(1.0, cfg.omega0, eta)?;
        let p = ModelParams::Rabi(a);
        let sc = spectrum(cfg, Gauge::Coulomb, &p, 2)?;
        let sd = spectrum(cfg, Gauge::Dipole, &p, 2)?;
        let spec = match cfg.cutoff {
            Some(n) => HilbertSpec::two_mode(n, 4)?,
            None => readout_spec(&a, 4, 4)?,
        };
        let r = chi_numeric(&a, &rp, &spec, 0, cfg.readout_model)?;
        Ok(vec![
            qubit_population(&sc, 0, Gauge::Coulomb)?,
            qubit_population(&sd, 0, Gauge::Dipole)?,
            qubit_inversion(&sd, 0, Gauge::Dipole)?,
            r.ratio(),
        ])
    })
}

/// Ground-state photon number with `a` as defined in each gauge.
pub fn vacuum_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let gauges = cavity_gauges(cfg)?;
    let names = gauges.iter().map(|&g| format!("n_{}", tag(g))).collect();
    sweep(cfg, names, |eta| {
        let p = rabi(cfg, eta)?;
        gauges
            .iter()
            .map(|&g| Ok(ground_photon_number(&spectrum(cfg, g, &p, 2)?, g)?))
            .collect()
    })
}

/// Qubit–field entanglement entropy of the ground state in each gauge.
pub fn entropy_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let gauges = cavity_gauges(cfg)?;
    let names = gauges.iter().map(|&g| format!("S_{}", tag(g))).collect();
    sweep(cfg, names, |eta| {
        let p = rabi(cfg, eta)?;
        gauges
            .iter()
            .map(|&g| Ok(entanglement_entropy(&spectrum(cfg, g, &p, 2)?.state(0))?))
            .collect()
    })
}

/// Inductor and capacitor voltage rates for `1̃ → 0̃`, with the flux-gauge
/// ground photon number and entropy.
pub fn circuit_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let gauges = circuit_gauges(cfg)?;
    let mut names: Vec<String> = gauges.iter().map(|&g| format!("VL_{}", tag(g))).collect();
    names.extend(["VC", "n_fg", "S_fg"].map(String::from));
    sweep(cfg, names, |eta| {
        let p = circuit(cfg, eta)?;
        let levels = cfg.levels.max(2);
        let mut row = Vec::new();
        let mut vc = 0.0;
        for &g in &gauges {
            let v = circuit_voltage_rates(&spectrum(cfg, g, &p, levels)?, 1)?;
            row.push(v.v_l);
            vc = v.v_c;
        }
        let f = spectrum(cfg, Gauge::Flux, &p, 2)?;
        row.extend([
            vc,
            ground_photon_number(&f, Gauge::Flux)?,
            entanglement_entropy(&f.state(0))?,
        ]);
        Ok(row)
    })
}

/// Time series of emission, photon number and qubit population per gauge.
pub fn switch_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let eta = cfg.eta.points()[0];
    let params = RabiParams::new(1.0, cfg.omega0, eta)?;
    let mut gauges: Vec<SwitchGauge> = cavity_gauges(cfg)?
        .into_iter()
        .map(|g| {
            if g == Gauge::Coulomb {
                SwitchGauge::Coulomb
            } else {
                SwitchGauge::Dipole
            }
        })
        .collect();
    if cfg.wrong_dipole {
        gauges.push(SwitchGauge::WrongDipole);
    }
    let model = ModelParams::Rabi(params);
    let spec = match cfg.cutoff {
        Some(n) => HilbertSpec::new(n)?,
        None => *converged_spectrum(Gauge::Dipole, &model, 4)?.spec(),
    };
    let protocol = match cfg.protocol {
        Protocol::Off => SwitchProtocol::off(0.0, cfg.ramp, cfg.shape)?,
        Protocol::OnOff => SwitchProtocol::on_off(0.0, cfg.t_off, cfg.ramp, cfg.shape)?,
    };
    let t_start = -cfg.ramp.max(1.0);
    let times = uniform_times(t_start, cfg.t_end, cfg.samples);
    let control = StepControl {
        max_phase: cfg.max_phase,
        halving_tol: cfg.halving_tol,
        ..StepControl::default()
    };
    let results = gauges
        .par_iter()
        .map(|&g| {
            let initial = match cfg.protocol {
                Protocol::Off => diagonalize(build_in_gauge(g.gauge(), &model, &spec)?)?.state(0),
                Protocol::OnOff => spec.basis_state(Qubit::Ground, 0),
            };
            Ok(propagate(&initial, g, &params, &spec, &protocol, &times, control)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let after = protocol.last_switch_end();
    for r in &results {
        info!(
            "{}: post-switch mean emission {:.6e}, photon number {:.6e}",
            r.gauge.tag(),
            r.mean_after(&r.emission, after),
            r.mean_after(&r.photon_number, after)
        );
    }
    let mut header = vec!["t".to_string(), "lambda".to_string()];
    for g in &gauges {
        let t = switch_tag(*g);
        header.extend([format!("emission_{t}"), format!("n_{t}"), format!("pop_{t}")]);
    }
    let mut table = Table::new(header);
    for (k, &t) in times.iter().enumerate() {
        let mut row = vec![t, protocol.lambda(t)];
        for r in &results {
            row.extend([r.emission[k], r.photon_number[k], r.excited_population[k]]);
        }
        table.rows.push(row);
    }
    Ok(table)
}

fn switch_tag(g: SwitchGauge) -> &'static str {
    match g {
        SwitchGauge::Coulomb => "C",
        SwitchGauge::Dipole => "D",
        SwitchGauge::WrongDipole => "Dw",
    }
}
