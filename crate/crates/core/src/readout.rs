//! Dispersive readout of an ultrastrongly coupled qubit through a weakly
//! coupled mode `b`: the analytic shift `χ` and its numeric extraction from
//! the two-mode spectrum.

use crate::error::{Error, Result};
use crate::hamiltonians::{
    build_two_mode_coulomb, build_two_mode_coulomb_reduced, Gauge, ModelParams, RabiParams, ReadoutMode,
};
use crate::hilbert::HilbertSpec;
use crate::linalg::{inner, kron_vec};
use crate::observables::qubit_inversion;
use crate::spectra::{converged_spectrum, diagonalize};

/// Smallest squared overlap with `|j⟩ ⊗ |n_b⟩` accepted as a match.
pub const LADDER_OVERLAP_MIN: f64 = 0.8;
/// Upper bound on `|g_b / Δ|` for the dispersive picture.
pub const DISPERSIVE_LIMIT: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReadoutParams {
    pub omega_0: f64,
    pub omega_b: f64,
    /// `g_b = ω_0 η_b`.
    pub g_b: f64,
}

impl ReadoutParams {
    pub fn new(omega_0: f64, omega_b: f64, g_b: f64) -> Result<Self> {
        if !(omega_b > 0.0) || !(omega_0 > 0.0) || !g_b.is_finite() {
            return Err(Error::Config(format!(
                "need omega_0, omega_b > 0 and finite g_b; got ({omega_0}, {omega_b}, {g_b})"
            )));
        }
        Ok(Self { omega_0, omega_b, g_b })
    }

    /// `ω_b = 0.3`, `g_b = 0.02 ω_0`.
    pub fn default_for(omega_0: f64) -> Self {
        Self {
            omega_0,
            omega_b: 0.3,
            g_b: 0.02 * omega_0,
        }
    }

    /// `Δ = ω_0 − ω_b`.
    pub fn delta_readout(&self) -> f64 {
        self.omega_0 - self.omega_b
    }

    /// `Σ = ω_0 + ω_b`.
    pub fn sigma_sum(&self) -> f64 {
        self.omega_0 + self.omega_b
    }

    pub fn eta_b(&self) -> f64 {
        self.g_b / self.omega_0
    }

    pub fn mode(&self) -> ReadoutMode {
        ReadoutMode {
            omega_b: self.omega_b,
            eta_b: self.eta_b(),
        }
    }

    pub fn check_dispersive(&self) -> Result<()> {
        let d = self.delta_readout();
        if d == 0.0 {
            return Err(Error::Resonance("ω_0 = ω_b".into()));
        }
        if (self.g_b / d).abs() >= DISPERSIVE_LIMIT {
            return Err(Error::Precondition(format!(
                "|g_b/Δ| = {} is outside the dispersive regime",
                (self.g_b / d).abs()
            )));
        }
        Ok(())
    }
}

/// `χ = g_b²/Δ + g_b²/Σ`.
pub fn chi_analytic(p: &ReadoutParams) -> Result<f64> {
    let d = p.delta_readout();
    if d == 0.0 {
        return Err(Error::Resonance("ω_0 = ω_b".into()));
    }
    let g2 = p.g_b * p.g_b;
    Ok(g2 / d + g2 / p.sigma_sum())
}

/// Which two-mode Coulomb Hamiltonian the shift is read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReadoutModel {
    /// `cos(2η_b x_b) → 1`, `sin(2η_b x_b) → 2η_b x_b`: the model `χ` is
    /// derived from.
    SmallAngle,
    /// Full `cos/sin[2η_a x_a + 2η_b x_b]`. Its `η_b²` diamagnetic term is of
    /// the same order as `χ` and largely cancels it.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReadoutResult {
    /// `E(j, n_b=1) − E(j, n_b=0) − ω_b`.
    pub chi_extracted: f64,
    pub chi_analytic: f64,
    /// `⟨j_D|σ_z|j_D⟩`, the quantity the shift is expected to track.
    pub sigma_z_dipole: f64,
    /// Smallest of the two ladder overlaps.
    pub min_overlap: f64,
}

impl ReadoutResult {
    pub fn ratio(&self) -> f64 {
        self.chi_extracted / self.chi_analytic
    }
}

/// Two-mode space whose mode-`a` cutoff converges the lowest `levels`
/// single-mode levels.
pub fn readout_spec(params_a: &RabiParams, n_fock_b: usize, levels: usize) -> Result<HilbertSpec> {
    let s = converged_spectrum(Gauge::Coulomb, &ModelParams::Rabi(*params_a), levels.max(2))?;
    HilbertSpec::two_mode(s.spec().n_fock, n_fock_b)
}

/// Numeric dispersive shift of mode `b` when the USC system sits in its
/// Coulomb-gauge eigenstate `j`.
pub fn chi_numeric(
    params_a: &RabiParams,
    p: &ReadoutParams,
    spec: &HilbertSpec,
    j: usize,
    model: ReadoutModel,
) -> Result<ReadoutResult> {
    p.check_dispersive()?;
    if (params_a.omega_0 - p.omega_0).abs() > 1e-12 {
        return Err(Error::Config(
            "qubit frequency differs between mode a and readout".into(),
        ));
    }
    let nb = spec
        .n_fock_b
        .ok_or_else(|| Error::Config("readout needs a two-mode space".into()))?;
    let single_spec = HilbertSpec::new(spec.n_fock)?;
    let single =
        diagonalize(crate::hamiltonians::build_coulomb(params_a, &single_spec)?)?.assume_converged(single_spec.dim());
    let sigma_z_dipole = qubit_inversion(&single, j, Gauge::Dipole)?;

    let h = match model {
        ReadoutModel::SmallAngle => build_two_mode_coulomb_reduced(params_a, &p.mode(), spec)?,
        ReadoutModel::Full => build_two_mode_coulomb(params_a, &p.mode(), spec)?,
    };
    let two = diagonalize(h)?;
    let psi = single.state(j);
    let level = |n_b: usize| -> Result<(f64, f64)> {
        let mut fock = vec![crate::C64::new(0.0, 0.0); nb];
        fock[n_b] = crate::C64::new(1.0, 0.0);
        // ψ lives on qubit ⊗ a; inserting |n_b⟩ as the fastest index
        let reference = kron_vec(&psi, &fock);
        let (k, ov) = (0..two.dim())
            .map(|k| (k, inner(&two.state(k), &reference).norm_sqr()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty spectrum");
        if ov < LADDER_OVERLAP_MIN {
            return Err(Error::Extraction(format!("best overlap with |{j}⟩⊗|{n_b}⟩ is {ov:.3}")));
        }
        Ok((two.energies[k], ov))
    };
    let (e0, o0) = level(0)?;
    let (e1, o1) = level(1)?;
    Ok(ReadoutResult {
        chi_extracted: e1 - e0 - p.omega_b,
        chi_analytic: chi_analytic(p)?,
        sigma_z_dipole,
        min_overlap: o0.min(o1),
    })
}
