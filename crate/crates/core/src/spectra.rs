//! Diagonalization with cutoff-convergence control and dressed-state labels
//! `|0̃⟩`, `|ñ±⟩` obtained by adiabatic continuation in the coupling.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonians::{
    build_charge_gauge, build_coulomb, build_dipole, build_flux_gauge, build_mutual_inductance_charge,
    build_two_mode_coulomb, Gauge, GaugeHamiltonian, ModelParams,
};
use crate::hilbert::{build_space, HilbertSpec};
use crate::linalg::{hermitian_eig, inner, ComplexMatrix};

/// Largest mode-`a` cutoff the convergence loop will try.
pub const MAX_N_FOCK: usize = 512;
/// Relative tolerance on `E_j − E_0` under cutoff doubling.
pub const CONVERGENCE_TOL: f64 = 1e-8;
/// Coupling at which continuation starts and JC labels are read off.
pub const LABEL_ETA_START: f64 = 1e-3;
/// Nominal continuation step.
pub const LABEL_ETA_STEP: f64 = 0.02;
/// Two overlaps closer than this make a match ambiguous.
pub const AMBIGUITY_MARGIN: f64 = 0.05;
/// How many times a step is halved before a level is given up as unassigned.
pub const MAX_REFINEMENTS: usize = 6;
/// Labels are tracked for at most this many levels.
pub const MAX_LABELED_LEVELS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Ground,
    Doublet(usize, Branch),
    Unassigned,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Ground => write!(f, "0"),
            Label::Doublet(n, Branch::Plus) => write!(f, "{n}+"),
            Label::Doublet(n, Branch::Minus) => write!(f, "{n}-"),
            Label::Unassigned => write!(f, "?"),
        }
    }
}

/// Eigen-decomposition of one gauge Hamiltonian.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending, in units of `ω_c`.
    pub energies: Vec<f64>,
    /// Phase-fixed eigenvectors as columns.
    pub states: ComplexMatrix,
    /// Labels of the lowest levels; empty until [`label_states`] runs.
    pub labels: Vec<Label>,
    /// Number of lowest levels certified against cutoff doubling.
    pub converged_levels: usize,
    pub hamiltonian: GaugeHamiltonian,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn state(&self, k: usize) -> Vec<C64> {
        self.states.column(k)
    }

    pub fn gauge(&self) -> Gauge {
        self.hamiltonian.gauge
    }

    pub fn params(&self) -> &ModelParams {
        &self.hamiltonian.params
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.hamiltonian.spec
    }

    /// `E_j − E_k`.
    pub fn transition(&self, j: usize, k: usize) -> f64 {
        self.energies[j] - self.energies[k]
    }

    /// Marks the lowest `n` levels as trusted without a doubling check.
    pub fn assume_converged(mut self, n: usize) -> Self {
        self.converged_levels = n.min(self.dim());
        self
    }

    pub fn require_converged(&self, level: usize) -> Result<()> {
        if level < self.converged_levels {
            Ok(())
        } else {
            Err(Error::UnconvergedLevel {
                level,
                converged: self.converged_levels,
            })
        }
    }

    /// Level index carrying `label`, if labels were assigned.
    pub fn index_of(&self, label: Label) -> Option<usize> {
        if label == Label::Unassigned {
            return None;
        }
        self.labels.iter().position(|&l| l == label)
    }

    /// Like [`Spectrum::index_of`], but an error when the label is missing.
    pub fn require_label(&self, label: Label) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::Precondition(format!("level {label} is not assigned")))
    }
}

/// Diagonalizes without any convergence certification.
pub fn diagonalize(h: GaugeHamiltonian) -> Result<Spectrum> {
    let eig = hermitian_eig(&h.matrix)?;
    Ok(Spectrum {
        energies: eig.values,
        states: eig.vectors,
        labels: Vec::new(),
        converged_levels: 0,
        hamiltonian: h,
    })
}

fn differences_stable(coarse: &[f64], fine: &[f64], n_levels: usize) -> Option<(usize, f64, f64)> {
    for j in 1..n_levels {
        let (a, b) = (coarse[j] - coarse[0], fine[j] - fine[0]);
        if (a - b).abs() > CONVERGENCE_TOL * a.abs().max(1.0) {
            return Some((j, a, b));
        }
    }
    None
}

/// Diagonalizes at increasing mode-`a` cutoffs, starting from `start`,
/// until the lowest `n_levels` transition energies agree between `N` and
/// `2N`. Returns the `2N` spectrum.
pub fn diagonalize_converged<F>(build: F, start: HilbertSpec, n_levels: usize) -> Result<Spectrum>
where
    F: Fn(&HilbertSpec) -> Result<GaugeHamiltonian>,
{
    if n_levels < 2 {
        return Err(Error::Precondition(format!("n_levels = {n_levels}, need at least 2")));
    }
    let mut spec = start;
    if spec.dim() < n_levels {
        return Err(Error::Precondition(format!(
            "start cutoff too small for {n_levels} levels"
        )));
    }
    let mut coarse = hermitian_eig(&build(&spec)?.matrix)?.values;
    let mut last = None;
    while 2 * spec.n_fock <= MAX_N_FOCK {
        spec = spec.with_n_fock(2 * spec.n_fock)?;
        let fine = diagonalize(build(&spec)?)?;
        match differences_stable(&coarse, &fine.energies, n_levels) {
            None => {
                log::debug!("converged {n_levels} levels at n_fock = {}", spec.n_fock);
                return Ok(fine.assume_converged(n_levels));
            }
            Some(miss) => last = Some(miss),
        }
        coarse = fine.energies;
    }
    let (level, previous, current) = last.unwrap_or((n_levels - 1, coarse[n_levels - 1] - coarse[0], f64::NAN));
    Err(Error::Convergence {
        n_fock: spec.n_fock,
        level,
        previous,
        current,
    })
}

/// Builds the Hamiltonian of `gauge` for single-mode `params` at `spec`.
pub fn build_in_gauge(gauge: Gauge, params: &ModelParams, spec: &HilbertSpec) -> Result<GaugeHamiltonian> {
    match (gauge, params) {
        (Gauge::Coulomb, ModelParams::Rabi(p)) => build_coulomb(p, spec),
        (Gauge::Dipole, ModelParams::Rabi(p)) => build_dipole(p, spec),
        (Gauge::Flux, ModelParams::Circuit(p)) => build_flux_gauge(p, spec),
        (Gauge::Charge, ModelParams::Circuit(p)) if p.is_symmetric() => build_charge_gauge(p, spec),
        (Gauge::Charge, ModelParams::Circuit(p)) => build_mutual_inductance_charge(p, spec),
        (Gauge::Coulomb, ModelParams::TwoMode { a, b }) => build_two_mode_coulomb(a, b, spec),
        _ => Err(Error::UnsupportedParameter(format!(
            "{} gauge is not defined for {params:?}",
            gauge.tag()
        ))),
    }
}

/// Converged spectrum of a single-mode model starting from the heuristic
/// cutoff for its coupling.
pub fn converged_spectrum(gauge: Gauge, params: &ModelParams, n_levels: usize) -> Result<Spectrum> {
    let start = HilbertSpec::for_coupling(params.eta());
    diagonalize_converged(|s| build_in_gauge(gauge, params, s), start, n_levels)
}

/// JC labels from the rounded excitation number `⟨a†a + σ₊σ₋⟩`; within an
/// excitation manifold the lower level is `−`.
fn jc_labels(spectrum: &Spectrum, n: usize) -> Result<Vec<Label>> {
    let ops = build_space(spectrum.spec())?;
    let exc = &ops.n + &ops.excited_projector();
    let counts: Vec<usize> = (0..n)
        .map(|k| exc.expectation(&spectrum.state(k)).re.round().max(0.0) as usize)
        .collect();
    let mut labels = vec![Label::Unassigned; n];
    for k in 0..n {
        let m = counts[k];
        if m == 0 {
            labels[k] = if k == 0 { Label::Ground } else { Label::Unassigned };
            continue;
        }
        labels[k] = match (0..k).filter(|&i| counts[i] == m).count() {
            0 => Label::Doublet(m, Branch::Minus),
            1 => Label::Doublet(m, Branch::Plus),
            _ => Label::Unassigned,
        };
    }
    Ok(labels)
}

#[derive(Debug)]
struct Matching {
    /// `assignment[k]` is the new index of old level `k`, or `None`.
    assignment: Vec<Option<usize>>,
    ambiguous: bool,
}

fn match_states(old: &[Vec<C64>], new: &Spectrum, candidates: usize) -> Matching {
    let new_states: Vec<Vec<C64>> = (0..candidates).map(|m| new.state(m)).collect();
    let mut assignment = Vec::with_capacity(old.len());
    let mut ambiguous = false;
    for psi in old {
        let mut ov: Vec<(f64, usize)> = new_states
            .iter()
            .enumerate()
            .map(|(m, phi)| (inner(psi, phi).norm(), m))
            .collect();
        ov.sort_by(|a, b| b.0.total_cmp(&a.0));
        if ov.len() > 1 && ov[0].0 - ov[1].0 < AMBIGUITY_MARGIN {
            ambiguous = true;
            assignment.push(None);
        } else {
            assignment.push(Some(ov[0].1));
        }
    }
    let mut seen = vec![false; candidates];
    for m in assignment.iter().flatten() {
        if std::mem::replace(&mut seen[*m], true) {
            ambiguous = true;
        }
    }
    Matching { assignment, ambiguous }
}

/// Assigns `|0̃⟩`, `|ñ±⟩` labels to the lowest converged levels (at most
/// eight) by following eigenvectors from `η = 1e-3` to the spectrum's
/// coupling with maximal-overlap matching at the spectrum's own cutoff.
/// Ambiguous steps are refined; levels still ambiguous become
/// [`Label::Unassigned`].
pub fn label_states(spectrum: Spectrum) -> Result<Spectrum> {
    let n = spectrum.converged_levels.min(MAX_LABELED_LEVELS);
    if n == 0 {
        return Err(Error::Precondition("labeling needs converged levels".into()));
    }
    let gauge = spectrum.gauge();
    let params = *spectrum.params();
    let spec = *spectrum.spec();
    let target = params.eta();
    let candidates = (n + 4).min(spectrum.dim());
    let at = |eta: f64| diagonalize(build_in_gauge(gauge, &params.with_eta(eta), &spec)?);

    let start_eta = target.min(LABEL_ETA_START);
    let start = at(start_eta)?;
    let mut labels = jc_labels(&start, n)?;
    let mut tracked: Vec<Vec<C64>> = (0..n).map(|k| start.state(k)).collect();
    let mut eta = start_eta;

    while eta < target {
        let mut step = LABEL_ETA_STEP.min(target - eta);
        let mut refinements = 0;
        loop {
            let next_eta = if eta + step >= target - 1e-15 {
                target
            } else {
                eta + step
            };
            let next = at(next_eta)?;
            let m = match_states(&tracked, &next, candidates);
            if m.ambiguous && refinements < MAX_REFINEMENTS {
                step *= 0.5;
                refinements += 1;
                continue;
            }
            if m.ambiguous {
                log::debug!("ambiguous continuation near eta = {next_eta}");
            }
            let mut new_labels = vec![Label::Unassigned; candidates];
            let mut new_tracked = Vec::with_capacity(n);
            let mut counts = vec![0usize; candidates];
            for a in m.assignment.iter().flatten() {
                counts[*a] += 1;
            }
            for (k, a) in m.assignment.iter().enumerate() {
                if let Some(a) = *a {
                    if counts[a] == 1 {
                        new_labels[a] = labels[k];
                    }
                }
            }
            for j in 0..n {
                new_tracked.push(next.state(j));
            }
            labels = new_labels[..n].to_vec();
            tracked = new_tracked;
            eta = next_eta;
            break;
        }
    }

    // Final hand-off onto the caller's eigenvectors, which may differ inside
    // degenerate subspaces.
    let m = match_states(&tracked, &spectrum, candidates);
    let mut out = vec![Label::Unassigned; n];
    for (k, a) in m.assignment.iter().enumerate() {
        if let Some(a) = *a {
            if a < n && out[a] == Label::Unassigned && !m.ambiguous {
                out[a] = labels[k];
            }
        }
    }
    if out[0] != Label::Ground && target > 0.0 {
        log::debug!("ground state not recovered by continuation at eta = {target}");
    }
    Ok(Spectrum {
        labels: out,
        ..spectrum
    })
}
