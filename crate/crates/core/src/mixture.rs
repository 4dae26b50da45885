//! Mixture-observable synthesis: transporting sector states to the
//! reference sector, collapsing them into an exponential model, evaluating
//! and sampling that model, and injecting calibrated noise.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{transport_eigenvector, CocycleNetwork};
use crate::spectral::{
    ExpTerm, ExponentialModel, ObservationFunctional, SampleWindow, SectorSpec, SectorState,
    Tolerances,
};

// ── Mixture setup ──────────────────────────────────────────────────────────

/// A full synthesis problem: a network, a reference sector carrying the
/// observation functional, and weighted states in the member sectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub network: CocycleNetwork,
    pub reference: u32,
    pub states: Vec<SectorState>,
    pub observation: ObservationFunctional,
}

impl MixtureSpec {
    /// Structural validation of the network, states, and reference sector.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let mut issues = self.network.validate(tol.eig);
        if self.network.sector(self.reference).is_none() {
            issues.push(format!("reference sector {} not in network", self.reference));
        }
        for state in &self.states {
            match self.network.sector(state.sector) {
                Some(spec) => issues.extend(state.validate(spec)),
                None => issues.push(format!("state references unknown sector {}", state.sector)),
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInput(issues.join("; ")))
        }
    }
}

// ── Modal atoms ────────────────────────────────────────────────────────────

/// One eigenmode's contribution to the observable, before grouping:
/// the term `weight · coefficient · atom · e^(-rate t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalTerm {
    pub sector: u32,
    pub mode: usize,
    /// Decay rate in the source sector's own units.
    pub rate: f64,
    /// State expansion coefficient ξ on this mode.
    #[serde(with = "crate::wire::complex_pair")]
    pub coefficient: Complex64,
    /// Observation of the transported unit basis vector.
    #[serde(with = "crate::wire::complex_pair")]
    pub atom: Complex64,
    pub weight: f64,
}

impl ModalTerm {
    /// Full amplitude `w · ξ · b` of the exponential term.
    pub fn amplitude(&self) -> Complex64 {
        self.weight * self.coefficient * self.atom
    }
}

/// Transports every active mode of every state into the reference sector
/// and applies the observation functional to it. Modes with zero
/// coefficients are skipped; results are ordered by (sector, mode).
pub fn modal_atoms(spec: &MixtureSpec, tol: &Tolerances) -> Result<Vec<ModalTerm>> {
    spec.validate(tol)?;
    let reference = spec
        .network
        .sector(spec.reference)
        .expect("validated above");
    let mut out = Vec::new();
    for state in &spec.states {
        let sector = spec.network.sector(state.sector).expect("validated above");
        for (&mode, &xi) in &state.coefficients {
            if xi.norm() == 0.0 {
                continue;
            }
            let alpha = sector.eigenvalues[mode];
            let basis = unit_basis(sector.multiplicities[mode]);
            let (transported, target_alpha) = if state.sector == spec.reference {
                (basis, alpha)
            } else {
                let map = spec
                    .network
                    .transfer(spec.reference, state.sector)
                    .ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "no transfer map from sector {} to reference {}",
                            state.sector, spec.reference
                        ))
                    })?;
                transport_eigenvector(map, alpha, &basis, tol.eig)?
            };
            let (ref_mode, ref_alpha) = reference
                .nearest_eigenvalue(target_alpha)
                .ok_or(Error::UnknownEigenvalue {
                    sector: spec.reference,
                    alpha: target_alpha,
                })?;
            if !crate::spectral::close(ref_alpha, target_alpha, tol.eig) {
                return Err(Error::UnknownEigenvalue {
                    sector: spec.reference,
                    alpha: target_alpha,
                });
            }
            let atom = spec.observation.apply(ref_mode, &transported);
            out.push(ModalTerm {
                sector: state.sector,
                mode,
                rate: alpha,
                coefficient: xi,
                atom,
                weight: state.weight,
            });
        }
    }
    out.sort_by_key(|a| (a.sector, a.mode));
    Ok(out)
}

fn unit_basis(dim: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::default(); dim];
    v[0] = Complex64::ONE;
    v
}

// ── Collapse ───────────────────────────────────────────────────────────────

/// Synthesizes the mixture observable as an exponential model: modal atoms
/// become terms, rates equal within `tol.eig` merge (amplitudes summed),
/// and amplitudes at or below `tol.amp` are dropped. Merged groups keep a
/// sector tag only when every constituent came from the same sector.
pub fn collapse(spec: &MixtureSpec, tol: &Tolerances) -> Result<ExponentialModel> {
    let atoms = modal_atoms(spec, tol)?;
    let terms = atoms
        .iter()
        .map(|m| ExpTerm::new(m.rate, m.amplitude()).tagged(m.sector, m.rate))
        .collect();
    Ok(merge_terms(terms, tol.eig, tol.amp))
}

/// Groups terms whose rates agree within `tol_eig` (scale-aware), sums
/// amplitudes per group, drops groups with `|amplitude| <= tol_amp`, and
/// keeps a tag only for single-sector groups. The merged rate is the
/// group mean.
pub fn merge_terms(mut terms: Vec<ExpTerm>, tol_eig: f64, tol_amp: f64) -> ExponentialModel {
    terms.sort_by(|a, b| a.rate.partial_cmp(&b.rate).unwrap());
    let mut merged: Vec<ExpTerm> = Vec::new();
    let mut group: Vec<ExpTerm> = Vec::new();
    let flush = |group: &mut Vec<ExpTerm>, merged: &mut Vec<ExpTerm>| {
        if group.is_empty() {
            return;
        }
        let rate = group.iter().map(|t| t.rate).sum::<f64>() / group.len() as f64;
        let amplitude: Complex64 = group.iter().map(|t| t.amplitude).sum();
        let first_tag = group[0].tag;
        let uniform = first_tag.is_some()
            && group.iter().all(|t| {
                t.tag
                    .is_some_and(|g| Some(g.sector) == first_tag.map(|f| f.sector))
            });
        group.clear();
        if amplitude.norm() <= tol_amp {
            return;
        }
        let mut term = ExpTerm::new(rate, amplitude);
        if uniform {
            term.tag = first_tag;
        }
        merged.push(term);
    };
    for t in terms {
        if let Some(anchor) = group.first() {
            if !crate::spectral::close(anchor.rate, t.rate, tol_eig) {
                flush(&mut group, &mut merged);
            }
        }
        group.push(t);
    }
    flush(&mut group, &mut merged);
    ExponentialModel { terms: merged }
}

// ── Evaluation and sampling ────────────────────────────────────────────────

/// Evaluates the model at a time `t >= 0`.
pub fn evaluate(model: &ExponentialModel, t: f64) -> Result<Complex64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::NegativeTime { t });
    }
    Ok(model
        .terms
        .iter()
        .map(|term| term.amplitude * (-term.rate * t).exp())
        .sum())
}

/// Samples the model at `t = 0, h, 2h, ..., (count-1)·h`.
pub fn sample_uniform(model: &ExponentialModel, h: f64, count: usize) -> Result<SampleWindow> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidInput(format!("step {h} must be positive")));
    }
    if count == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    let values = (0..count)
        .map(|n| evaluate(model, n as f64 * h))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleWindow::new(h, values))
}

// ── Noise ──────────────────────────────────────────────────────────────────

/// Adds a reproducible perturbation of exact Euclidean norm `epsilon`.
///
/// Real windows receive real Gaussian directions (complex noise would leak
/// imaginary parts of size `κ·ε` into the recovered nodes); complex windows
/// receive isotropic complex directions. The window's `noise_level` field
/// accumulates in quadrature.
pub fn add_noise(window: &SampleWindow, epsilon: f64, seed: u64) -> Result<SampleWindow> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "noise level {epsilon} must be non-negative"
        )));
    }
    let mut out = window.clone();
    if epsilon == 0.0 || window.is_empty() {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut direction: Vec<Complex64> = if window.is_real() {
        (0..window.len())
            .map(|_| Complex64::new(normal.sample(&mut rng), 0.0))
            .collect()
    } else {
        (0..window.len())
            .map(|_| Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
            .collect()
    };
    let norm: f64 = direction
        .iter()
        .map(Complex64::norm_sqr)
        .sum::<f64>()
        .sqrt();
    if norm == 0.0 {
        // Probability-zero draw; fall back to a unit impulse.
        direction[0] = Complex64::ONE;
    }
    let scale = epsilon / direction.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    for (v, d) in out.values.iter_mut().zip(&direction) {
        *v += d * scale;
    }
    out.noise_level = window.noise_level.hypot(epsilon);
    Ok(out)
}

// ── Interval sectors ───────────────────────────────────────────────────────

/// Dirichlet heat sector on an interval of the given length: eigenvalues
/// `(nπ/length)²` for `n = 1..=mode_count` (all simple), gauge `length²`,
/// and the point-evaluation observation at `x0` in normalized eigenfunction
/// coordinates: `√(2/length) · sin(nπ·x0/length)`.
pub fn dirichlet_sector(
    id: u32,
    length: f64,
    mode_count: usize,
    x0: f64,
) -> Result<(SectorSpec, ObservationFunctional)> {
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::InvalidInput(format!("length {length} must be positive")));
    }
    if mode_count == 0 {
        return Err(Error::InvalidInput("mode count must be positive".into()));
    }
    if !(x0 > 0.0 && x0 < length) {
        return Err(Error::InvalidInput(format!(
            "observation point {x0} must lie strictly inside (0, {length})"
        )));
    }
    let pi = std::f64::consts::PI;
    let eigenvalues: Vec<f64> = (1..=mode_count)
        .map(|n| (n as f64 * pi / length).powi(2))
        .collect();
    let spec = SectorSpec::simple(id, eigenvalues).with_gauge(length * length);
    let amplitude = (2.0 / length).sqrt();
    let atoms = (1..=mode_count).map(|n| {
        (
            (n - 1, 0),
            Complex64::new(amplitude * (n as f64 * pi * x0 / length).sin(), 0.0),
        )
    });
    Ok((spec, ObservationFunctional::from_entries(atoms)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::build_canonical_cocycle;
    use approx::assert_abs_diff_eq;

    fn two_sector_mixture() -> MixtureSpec {
        // Reference sector 1 with spectrum {1, 2}; sector 2 carries {0.5, 1}
        // under gauge 2 so the rescaled spectra agree.
        let sectors = vec![
            SectorSpec::simple(1, vec![1.0, 2.0]).with_gauge(1.0),
            SectorSpec::simple(2, vec![0.5, 1.0]).with_gauge(2.0),
        ];
        let network = build_canonical_cocycle(&sectors, None, 1e-10).unwrap();
        MixtureSpec {
            network,
            reference: 1,
            states: vec![
                SectorState::real(1, &[(0, 1.0), (1, 0.5)], 1.0),
                SectorState::real(2, &[(0, 2.0)], 0.5),
            ],
            observation: ObservationFunctional::real(&[(0, 0, 1.0), (1, 0, 3.0)]),
        }
    }

    // ── Modal atoms ────────────────────────────────────────────────────

    #[test]
    fn atoms_transport_into_the_reference_readout() {
        let spec = two_sector_mixture();
        let atoms = modal_atoms(&spec, &Tolerances::default()).unwrap();
        assert_eq!(atoms.len(), 3);
        // Sector 1 mode 0: atom = observation(mode 0) = 1.
        assert_abs_diff_eq!(atoms[0].atom.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(atoms[0].rate, 1.0, epsilon = 1e-15);
        // Sector 1 mode 1: atom = 3, amplitude = 1·0.5·3.
        assert_abs_diff_eq!(atoms[1].amplitude().re, 1.5, epsilon = 1e-15);
        // Sector 2 mode 0 transports onto reference mode 0 but keeps its
        // own rate 0.5; amplitude = 0.5·2·1.
        assert_abs_diff_eq!(atoms[2].rate, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(atoms[2].amplitude().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn missing_transfer_map_is_reported() {
        let mut spec = two_sector_mixture();
        spec.network.transfers.remove(&(1, 2));
        assert!(matches!(
            modal_atoms(&spec, &Tolerances::default()),
            Err(Error::InvalidInput(_))
        ));
    }

    // ── Collapse ───────────────────────────────────────────────────────

    #[test]
    fn collapse_keeps_distinct_rates_and_tags_them() {
        let spec = two_sector_mixture();
        let model = collapse(&spec, &Tolerances::default()).unwrap();
        assert_eq!(model.rates(), vec![0.5, 1.0, 2.0]);
        assert_eq!(model.terms[0].tag.unwrap().sector, 2);
        assert_eq!(model.terms[1].tag.unwrap().sector, 1);
        assert!(model.validate().is_empty());
    }

    #[test]
    fn equal_rates_from_different_sectors_merge_untagged() {
        let terms = vec![
            ExpTerm::real(1.0, 2.0).tagged(1, 1.0),
            ExpTerm::real(1.0, 0.7).tagged(2, 1.0),
            ExpTerm::real(3.0, 1.0).tagged(1, 3.0),
        ];
        let m = merge_terms(terms, 1e-10, 1e-13);
        assert_eq!(m.len(), 2);
        assert_abs_diff_eq!(m.terms[0].amplitude.re, 2.7, epsilon = 1e-15);
        assert!(m.terms[0].tag.is_none(), "cross-sector merge must untag");
        assert_eq!(m.terms[1].tag.unwrap().sector, 1);
    }

    #[test]
    fn cancelling_amplitudes_drop_out() {
        let terms = vec![
            ExpTerm::real(1.0, 2.0).tagged(1, 1.0),
            ExpTerm::real(1.0, -2.0).tagged(1, 1.0),
            ExpTerm::real(2.0, 1.0).tagged(1, 2.0),
        ];
        let m = merge_terms(terms, 1e-10, 1e-13);
        assert_eq!(m.len(), 1);
        assert_abs_diff_eq!(m.terms[0].rate, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn merge_is_idempotent() {
        let terms = vec![
            ExpTerm::real(1.0, 2.0),
            ExpTerm::real(1.0 + 1e-12, 0.5),
            ExpTerm::real(4.0, 1.0),
        ];
        let once = merge_terms(terms, 1e-10, 1e-13);
        let twice = merge_terms(once.terms.clone(), 1e-10, 1e-13);
        assert_eq!(once, twice);
    }

    // ── Evaluation and sampling ────────────────────────────────────────

    #[test]
    fn evaluation_matches_the_closed_form() {
        let spec = two_sector_mixture();
        let model = collapse(&spec, &Tolerances::default()).unwrap();
        let t = 0.7;
        let direct: f64 = [(0.5, 1.0), (1.0, 1.0), (2.0, 1.5)]
            .iter()
            .map(|&(mu, a): &(f64, f64)| a * (-mu * t).exp())
            .sum();
        let got = evaluate(&model, t).unwrap();
        assert_abs_diff_eq!(got.re, direct, epsilon = 1e-14);
        assert!(matches!(
            evaluate(&model, -0.1),
            Err(Error::NegativeTime { .. })
        ));
    }

    #[test]
    fn sampling_lays_points_on_the_uniform_grid() {
        let model = ExponentialModel::from_terms(vec![ExpTerm::real(1.0, 2.0)]);
        let w = sample_uniform(&model, 0.25, 4).unwrap();
        assert_eq!(w.len(), 4);
        assert!(w.is_real());
        for (n, v) in w.values.iter().enumerate() {
            assert_abs_diff_eq!(v.re, 2.0 * (-(n as f64) * 0.25).exp(), epsilon = 1e-15);
        }
    }

    // ── Noise ──────────────────────────────────────────────────────────

    #[test]
    fn noise_has_exact_norm_and_is_reproducible() {
        let model = ExponentialModel::from_terms(vec![ExpTerm::real(1.0, 1.0)]);
        let w = sample_uniform(&model, 0.1, 8).unwrap();
        let eps = 1e-3;
        let a = add_noise(&w, eps, 7).unwrap();
        let b = add_noise(&w, eps, 7).unwrap();
        assert_eq!(a, b);
        let delta: f64 = a
            .values
            .iter()
            .zip(&w.values)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert_abs_diff_eq!(delta, eps, epsilon = 1e-15);
        assert!(a.is_real(), "real windows stay real under noise");
        let c = add_noise(&w, eps, 8).unwrap();
        assert_ne!(a, c, "different seeds give different directions");
        assert_abs_diff_eq!(a.noise_level, eps, epsilon = 1e-18);
    }

    #[test]
    fn complex_windows_receive_complex_noise() {
        let mut w = SampleWindow::new(0.1, vec![Complex64::new(1.0, 0.5); 6]);
        w.values[2].im = -0.25;
        let a = add_noise(&w, 1e-2, 3).unwrap();
        assert!(a.values.iter().zip(&w.values).any(|(x, y)| x.im != y.im));
    }

    // ── Interval sectors ───────────────────────────────────────────────

    #[test]
    fn dirichlet_sector_matches_the_closed_forms() {
        let (spec, obs) = dirichlet_sector(1, 1.0, 2, 0.3).unwrap();
        let pi = std::f64::consts::PI;
        assert_abs_diff_eq!(spec.eigenvalues[0], pi * pi, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.eigenvalues[1], 4.0 * pi * pi, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.gauge.unwrap(), 1.0, epsilon = 1e-15);
        let b1 = obs.atoms[&(0, 0)].re;
        assert_abs_diff_eq!(b1, 2.0_f64.sqrt() * (pi * 0.3).sin(), epsilon = 1e-15);
        assert!(dirichlet_sector(1, 1.0, 2, 0.0).is_err());
        assert!(dirichlet_sector(1, 1.0, 0, 0.3).is_err());
    }
}
