//! Closed-form limits used as independent oracles: the large-coupling
//! ground doublet and the small-coupling Jaynes–Cummings doublet.
//!
//! Nothing here touches the Hamiltonian builders or the eigensolver.
//! Vectors use the crate layout (qubit slow with `|e⟩` first, Fock fast).

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonians::RabiParams;

/// Probability that may be lost to the truncation before erroring.
pub const TRUNCATION_DEFECT_MAX: f64 = 1e-4;
/// Largest `η` accepted by the JC oracle.
pub const JC_ETA_MAX: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// Dipole gauge: `(|−iη⟩|+x⟩ ± |iη⟩|−x⟩)/√2`.
    CavityDipole,
    /// Coulomb gauge: `|0⟩|±z⟩`.
    CavityCoulomb,
    /// Flux gauge: `(|−η⟩|+x⟩ ± |η⟩|−x⟩)/√2`.
    Circuit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    LargeEtaCavity,
    LargeEtaCircuit,
    SmallEtaJc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticPrediction {
    pub regime: Regime,
    pub quantities: BTreeMap<&'static str, f64>,
}

#[derive(Clone, Debug)]
pub struct LargeEtaStates {
    pub psi_plus: Vec<C64>,
    /// The ground state.
    pub psi_minus: Vec<C64>,
    /// Weight lost to the truncation before renormalizing.
    pub truncation_defect: f64,
}

/// Fock amplitudes `e^{−|α|²/2} αⁿ/√n!` for `n < n_fock`, renormalized.
fn displaced_vacuum(alpha: C64, n_fock: usize) -> Result<(Vec<C64>, f64)> {
    let mut c = Vec::with_capacity(n_fock);
    let mut term = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..n_fock {
        if n > 0 {
            term = term * alpha / (n as f64).sqrt();
        }
        c.push(term);
    }
    let kept: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    let defect = (1.0 - kept).max(0.0);
    if defect > TRUNCATION_DEFECT_MAX {
        return Err(Error::Truncation(format!(
            "coherent amplitude {alpha} loses {defect:e} at n_fock = {n_fock}"
        )));
    }
    let s = kept.sqrt();
    Ok((c.into_iter().map(|z| z / s).collect(), defect))
}

/// `|q⟩ ⊗ |φ⟩` with `q = (c_e, c_g)`.
fn product(q: [C64; 2], phi: &[C64]) -> Vec<C64> {
    q.iter().flat_map(|&a| phi.iter().map(move |&b| a * b)).collect()
}

fn cat(alpha: C64, n_fock: usize) -> Result<LargeEtaStates> {
    let (left, d1) = displaced_vacuum(-alpha, n_fock)?;
    let (right, d2) = displaced_vacuum(alpha, n_fock)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus_x = [C64::new(h, 0.0), C64::new(h, 0.0)];
    let minus_x = [C64::new(h, 0.0), C64::new(-h, 0.0)];
    let a = product(plus_x, &left);
    let b = product(minus_x, &right);
    let combine = |sign: f64| {
        let v: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x + y * sign).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / n).collect::<Vec<_>>()
    };
    Ok(LargeEtaStates {
        psi_plus: combine(1.0),
        psi_minus: combine(-1.0),
        truncation_defect: d1.max(d2),
    })
}

/// Large-coupling ground doublet on a Fock space of size `n_fock`.
pub fn large_eta_states(eta: f64, n_fock: usize, flavor: Flavor) -> Result<LargeEtaStates> {
    if !(eta >= 0.0) || n_fock < 2 {
        return Err(Error::Config(format!("eta = {eta}, n_fock = {n_fock}")));
    }
    match flavor {
        Flavor::CavityDipole => cat(C64::new(0.0, eta), n_fock),
        Flavor::Circuit => cat(C64::new(eta, 0.0), n_fock),
        Flavor::CavityCoulomb => {
            let mut vac = vec![C64::new(0.0, 0.0); n_fock];
            vac[0] = C64::new(1.0, 0.0);
            let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
            Ok(LargeEtaStates {
                psi_plus: product([one, zero], &vac),
                psi_minus: product([zero, one], &vac),
                truncation_defect: 0.0,
            })
        }
    }
}

/// Scalar predictions for the doublet. `psi_minus` is the ground state.
pub fn large_eta_prediction(eta: f64, flavor: Flavor) -> AsymptoticPrediction {
    let mut q = BTreeMap::new();
    let regime = match flavor {
        Flavor::CavityCoulomb => {
            q.insert("excited_population_minus", 0.0);
            q.insert("excited_population_plus", 1.0);
            q.insert("photon_number", 0.0);
            q.insert("entropy", 0.0);
            Regime::LargeEtaCavity
        }
        Flavor::CavityDipole | Flavor::Circuit => {
            q.insert("excited_population_minus", 0.5);
            q.insert("excited_population_plus", 0.5);
            q.insert("photon_number", eta * eta);
            q.insert("entropy", 1.0);
            if flavor == Flavor::Circuit {
                Regime::LargeEtaCircuit
            } else {
                Regime::LargeEtaCavity
            }
        }
    };
    AsymptoticPrediction { regime, quantities: q }
}

/// JC doublet energies above the ground state,
/// `(ω_c + ω_0)/2 ∓ √(g² + δ²/4)` with `δ = ω_0 − ω_c`.
pub fn jc_doublet(params: &RabiParams) -> Result<(f64, f64)> {
    if params.eta > JC_ETA_MAX {
        return Err(Error::Precondition(format!(
            "JC limit needs eta <= {JC_ETA_MAX}, got {}",
            params.eta
        )));
    }
    let g = params.eta * params.omega_c;
    let delta = params.omega_0 - params.omega_c;
    let mid = 0.5 * (params.omega_c + params.omega_0);
    let r = (g * g + 0.25 * delta * delta).sqrt();
    Ok((mid - r, mid + r))
}

pub fn jc_prediction(params: &RabiParams) -> Result<AsymptoticPrediction> {
    let (minus, plus) = jc_doublet(params)?;
    let mut q = BTreeMap::new();
    q.insert("e_minus", minus);
    q.insert("e_plus", plus);
    q.insert("splitting", plus - minus);
    Ok(AsymptoticPrediction {
        regime: Regime::SmallEtaJc,
        quantities: q,
    })
}
