//! Conditioning diagnostics: the sensitivity Jacobian of sampled
//! exponential sums, its inverse-singular-value condition number, a-priori
//! gap-product bounds, certified noise thresholds, and randomized noise
//! sweeps over the full pipeline.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::{add_noise, collapse, sample_uniform, MixtureSpec};
use crate::prony::{reconstruct, PronyParameters};
use crate::spectral::{
    close, ExponentialModel, ObservabilityEntry, SampleWindow, StabilityReport, Tolerances,
};
use crate::tagging::{observation_transfer, tag_rates, TagOptions, TaggedModel};

// ── Configuration ──────────────────────────────────────────────────────────

/// Calibration constants for the stability estimates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityConfig {
    /// Scales the node-error response `|δz| <= c2 · κ · ε`.
    pub c2: f64,
    /// Node-to-rate conversion constant; `None` uses `2 / (h · z_min)`.
    pub c3: Option<f64>,
    /// Prefactor of the a-priori condition bound.
    pub c_l: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            c2: 1.0,
            c3: None,
            c_l: 1.0,
        }
    }
}

impl StabilityConfig {
    /// Effective node-to-rate constant at step `h` with smallest node `z_min`.
    pub fn effective_c3(&self, h: f64, z_min: f64) -> f64 {
        self.c3.unwrap_or(2.0 / (h * z_min))
    }
}

// ── Jacobian and condition number ──────────────────────────────────────────

/// Sensitivity Jacobian of the first `2L` samples with respect to the
/// parameters `(z_1..z_L, a_1..a_L)`: row `n` holds
/// `∂y_n/∂z_ℓ = n·a_ℓ·z_ℓ^(n-1)` and `∂y_n/∂a_ℓ = z_ℓ^n`.
pub fn prony_jacobian(params: &PronyParameters) -> Result<DMatrix<Complex64>> {
    let l = params.len();
    if l == 0 {
        return Err(Error::InvalidInput("empty parameter set".into()));
    }
    if params.amplitudes.len() != l {
        return Err(Error::InvalidInput(format!(
            "{} nodes but {} amplitudes",
            l,
            params.amplitudes.len()
        )));
    }
    for (i, &zi) in params.nodes.iter().enumerate() {
        if !(zi.is_finite() && zi > 0.0) {
            return Err(Error::DegenerateParameters {
                reason: format!("node {zi} not positive"),
            });
        }
        for &zj in params.nodes.iter().skip(i + 1) {
            if (zi - zj).abs() <= 1e-14 * zi.abs().max(zj.abs()).max(1.0) {
                return Err(Error::DegenerateParameters {
                    reason: format!("coincident nodes {zi} and {zj}"),
                });
            }
        }
    }
    if params.amplitudes.iter().any(|a| a.norm() == 0.0) {
        return Err(Error::DegenerateParameters {
            reason: "zero amplitude".into(),
        });
    }
    let mut jac = DMatrix::zeros(2 * l, 2 * l);
    for (col, (&z, &a)) in params.nodes.iter().zip(&params.amplitudes).enumerate() {
        for row in 0..2 * l {
            let n = row as f64;
            jac[(row, col)] = if row == 0 {
                Complex64::default()
            } else {
                a * n * z.powi(row as i32 - 1)
            };
            jac[(row, l + col)] = Complex64::new(z.powi(row as i32), 0.0);
        }
    }
    Ok(jac)
}

/// Inverse smallest singular value of the Jacobian; errors when the matrix
/// is singular to working precision.
pub fn kappa_exp(jacobian: &DMatrix<Complex64>) -> Result<f64> {
    let sv = jacobian.clone().svd(false, false).singular_values;
    let (s_max, s_min) = sv
        .iter()
        .fold((0.0_f64, f64::INFINITY), |(hi, lo), &s| {
            (hi.max(s), lo.min(s))
        });
    if s_max == 0.0 || s_min <= f64::EPSILON * s_max {
        return Err(Error::SingularJacobian {
            ratio: if s_max == 0.0 { 0.0 } else { s_min / s_max },
        });
    }
    Ok(1.0 / s_min)
}

// ── A-priori bound ─────────────────────────────────────────────────────────

/// Provenance of one pairwise rate gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapKind {
    /// Both rates tagged, different sectors.
    Inter,
    /// Both rates tagged to this sector.
    Intra(u32),
    /// At least one rate untagged.
    Untagged,
}

/// One factor of the pairwise gap product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairGap {
    pub rate_a: f64,
    pub rate_b: f64,
    pub gap: f64,
    pub kind: GapKind,
}

/// The full gap-product factorization behind the a-priori bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapProduct {
    pub pairs: Vec<PairGap>,
    pub product: f64,
    pub min_amp: f64,
}

/// A-priori bound on the condition number:
/// `c_l · e^(μ_max·h·m) / (h^m · Π gaps · min|a|)` with `m = L(L-1)/2`.
/// Also returns the factorization so callers can inspect inter- versus
/// intra-sector contributions.
pub fn kappa_upper_bound(
    model: &ExponentialModel,
    h: f64,
    c_l: f64,
) -> Result<(f64, GapProduct)> {
    let l = model.len();
    if l == 0 {
        return Err(Error::InvalidInput("empty model".into()));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidInput(format!("step {h} must be positive")));
    }
    let min_amp = model
        .terms
        .iter()
        .map(|t| t.amplitude.norm())
        .fold(f64::INFINITY, f64::min);
    if min_amp == 0.0 {
        return Err(Error::DegenerateParameters {
            reason: "zero amplitude".into(),
        });
    }
    let mut pairs = Vec::with_capacity(l * (l - 1) / 2);
    let mut product = 1.0_f64;
    for (i, a) in model.terms.iter().enumerate() {
        for b in model.terms.iter().skip(i + 1) {
            let gap = (a.rate - b.rate).abs();
            if gap == 0.0 {
                return Err(Error::DegenerateParameters {
                    reason: format!("coincident rates {} and {}", a.rate, b.rate),
                });
            }
            let kind = match (a.tag, b.tag) {
                (Some(x), Some(y)) if x.sector == y.sector => GapKind::Intra(x.sector),
                (Some(_), Some(_)) => GapKind::Inter,
                _ => GapKind::Untagged,
            };
            product *= gap;
            pairs.push(PairGap {
                rate_a: a.rate,
                rate_b: b.rate,
                gap,
                kind,
            });
        }
    }
    let m = (l * (l - 1) / 2) as f64;
    let mu_max = model.terms.iter().map(|t| t.rate).fold(0.0_f64, f64::max);
    let bound = c_l * (mu_max * h * m).exp() / (h.powf(m) * product * min_amp);
    Ok((
        bound,
        GapProduct {
            pairs,
            product,
            min_amp,
        },
    ))
}

/// Certified noise threshold `gap / (2 · c3 · κ)`; infinite gaps give an
/// infinite threshold.
pub fn epsilon_threshold(gap: f64, kappa: f64, c3: f64) -> f64 {
    if gap.is_infinite() {
        return f64::INFINITY;
    }
    gap / (2.0 * c3 * kappa)
}

// ── Observability ──────────────────────────────────────────────────────────

/// Inverse observation-transfer magnitudes `1/|T|` for each distinct tagged
/// mode, in tag order.
pub fn observability_norms(
    spec: &MixtureSpec,
    tagged: &TaggedModel,
    tol: &Tolerances,
) -> Result<Vec<ObservabilityEntry>> {
    let mut seen: Vec<(u32, f64)> = Vec::new();
    let mut out = Vec::new();
    for term in &tagged.terms {
        if seen
            .iter()
            .any(|&(s, a)| s == term.sector && close(a, term.alpha, tol.eig))
        {
            continue;
        }
        seen.push((term.sector, term.alpha));
        let transfer = observation_transfer(spec, term.sector, term.alpha, tol)?;
        out.push(ObservabilityEntry {
            sector: term.sector,
            alpha: term.alpha,
            inverse_norm: 1.0 / transfer.norm(),
        });
    }
    Ok(out)
}

// ── Full report ────────────────────────────────────────────────────────────

/// Computes the complete conditioning summary of a mixture sampled at
/// step `h`: condition number, a-priori bound, gaps, certified noise
/// threshold, and observability margins.
pub fn stability_report(
    spec: &MixtureSpec,
    h: f64,
    config: &StabilityConfig,
    tol: &Tolerances,
) -> Result<StabilityReport> {
    let model = collapse(spec, tol)?;
    if model.is_empty() {
        return Err(Error::InvalidInput("mixture synthesizes to zero".into()));
    }
    let params = PronyParameters::from_model(&model, h);
    let jac = prony_jacobian(&params)?;
    let kappa = kappa_exp(&jac)?;
    let (bound, _) = kappa_upper_bound(&model, h, config.c_l)?;
    let tagged = tag_rates(&model, &spec.network.sectors, &TagOptions::default())?;
    let intra_gaps: BTreeMap<u32, f64> = spec
        .network
        .sectors
        .iter()
        .map(|s| (s.id, s.min_spacing()))
        .collect();
    let z_min = params.nodes.iter().fold(f64::INFINITY, |acc, &z| acc.min(z));
    let c3 = config.effective_c3(h, z_min);
    let epsilon0 = epsilon_threshold(tagged.gap, kappa, config.c2 * c3);
    let observability_inverses = observability_norms(spec, &tagged, tol)?;
    let mu_max = model.terms.iter().map(|t| t.rate).fold(0.0_f64, f64::max);
    Ok(StabilityReport {
        kappa_exp: kappa,
        kappa_upper_bound: bound,
        gap: tagged.gap,
        intra_gaps,
        epsilon0,
        observability_inverses,
        mu_max,
        step: h,
    })
}

// ── Noise sweeps ───────────────────────────────────────────────────────────

/// Per-noise-level outcome of a randomized sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub epsilon: f64,
    /// Worst parameter error (nodes and amplitudes) per trial; `+inf` when
    /// reconstruction failed.
    pub errors: Vec<f64>,
    /// Whether the trial reproduced the noiseless sector attribution.
    pub tag_ok: Vec<bool>,
    /// Whether reconstruction succeeded at all.
    pub recon_ok: Vec<bool>,
}

impl SweepRecord {
    pub fn median_error(&self) -> f64 {
        if self.errors.is_empty() {
            return f64::NAN;
        }
        let mut sorted = self.errors.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sorted.len();
        if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        }
    }

    pub fn tag_failures(&self) -> usize {
        self.tag_ok.iter().filter(|&&ok| !ok).count()
    }

    pub fn recon_failures(&self) -> usize {
        self.recon_ok.iter().filter(|&&ok| !ok).count()
    }
}

/// Runs the full pipeline (synthesize → sample → perturb → reconstruct →
/// tag) across a noise ladder. Each trial perturbs the same exact window
/// with seed `seed + trial`, so ladders share directions and error curves
/// regress cleanly; trials parallelize without affecting determinism.
pub fn noise_sweep(
    spec: &MixtureSpec,
    h: f64,
    l: usize,
    epsilons: &[f64],
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<SweepRecord>> {
    if trials == 0 {
        return Err(Error::InvalidInput("trial count must be positive".into()));
    }
    if epsilons.iter().any(|&e| !(e.is_finite() && e >= 0.0)) {
        return Err(Error::InvalidInput("noise levels must be non-negative".into()));
    }
    let model = collapse(spec, tol)?;
    if model.len() != l {
        return Err(Error::InvalidInput(format!(
            "mixture collapses to {} terms, sweep order is {l}",
            model.len()
        )));
    }
    let window = sample_uniform(&model, h, 2 * l)?;
    // The exact window must round-trip before noise means anything.
    let exact = reconstruct(&window, l, tol)?;
    let truth = TruthTable::new(&model, h);
    if let Some(err) = truth.mismatch(&exact, 1e-8) {
        return Err(Error::RoundTripFailed { detail: err });
    }
    // Baseline attribution; overlapping spectra disable tag scoring.
    let baseline = match tag_rates(&model, &spec.network.sectors, &TagOptions::default()) {
        Ok(t) => Some(t),
        Err(Error::SeparationViolation { .. }) => None,
        Err(e) => return Err(e),
    };
    let tag_opts = baseline.as_ref().map(|t| TagOptions {
        capture_radius: t.gap.is_finite().then_some(t.gap / 2.0),
        ..TagOptions::default()
    });
    let mut records = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let outcomes: Vec<(f64, bool, bool)> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let noisy = match add_noise(&window, eps, seed.wrapping_add(trial as u64)) {
                    Ok(w) => w,
                    Err(_) => return (f64::INFINITY, false, false),
                };
                run_trial(&noisy, l, tol, &truth, baseline.as_ref(), tag_opts.as_ref(), spec)
            })
            .collect();
        records.push(SweepRecord {
            epsilon: eps,
            errors: outcomes.iter().map(|o| o.0).collect(),
            tag_ok: outcomes.iter().map(|o| o.1).collect(),
            recon_ok: outcomes.iter().map(|o| o.2).collect(),
        });
    }
    Ok(records)
}

fn run_trial(
    noisy: &SampleWindow,
    l: usize,
    tol: &Tolerances,
    truth: &TruthTable,
    baseline: Option<&TaggedModel>,
    tag_opts: Option<&TagOptions>,
    spec: &MixtureSpec,
) -> (f64, bool, bool) {
    let Ok(recovered) = reconstruct(noisy, l, tol) else {
        return (f64::INFINITY, false, false);
    };
    let error = truth.parameter_error(&recovered);
    let tag_ok = match (baseline, tag_opts) {
        (Some(base), Some(opts)) => match tag_rates(&recovered, &spec.network.sectors, opts) {
            Ok(t) => {
                t.terms.len() == base.terms.len()
                    && t.terms.iter().zip(&base.terms).all(|(x, y)| {
                        x.sector == y.sector && close(x.alpha, y.alpha, tol.eig)
                    })
            }
            Err(_) => false,
        },
        // Tag scoring is vacuous when the noiseless model cannot be tagged.
        _ => true,
    };
    (error, tag_ok, true)
}

/// Ground-truth nodes and amplitudes in ascending-rate order.
struct TruthTable {
    step: f64,
    nodes: Vec<f64>,
    amplitudes: Vec<Complex64>,
}

impl TruthTable {
    fn new(model: &ExponentialModel, h: f64) -> Self {
        TruthTable {
            step: h,
            nodes: model.nodes(h),
            amplitudes: model.amplitudes(),
        }
    }

    /// Worst node/amplitude deviation; assumes both models sorted by rate.
    fn parameter_error(&self, recovered: &ExponentialModel) -> f64 {
        if recovered.len() != self.nodes.len() {
            return f64::INFINITY;
        }
        let mut worst = 0.0_f64;
        for (k, term) in recovered.terms.iter().enumerate() {
            let z_hat = (-term.rate * self.step).exp();
            worst = worst.max((z_hat - self.nodes[k]).abs());
            worst = worst.max((term.amplitude - self.amplitudes[k]).norm());
        }
        worst
    }

    /// `None` when every parameter agrees within `tol`, else a description.
    fn mismatch(&self, recovered: &ExponentialModel, tol: f64) -> Option<String> {
        let err = self.parameter_error(recovered);
        (err > tol).then(|| format!("worst parameter deviation {err:.3e} exceeds {tol:.3e}"))
    }
}

/// Log-log least-squares slope of median error against noise level over
/// records with finite positive medians; `None` with fewer than two points.
pub fn regression_slope(records: &[SweepRecord]) -> Option<f64> {
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.epsilon > 0.0)
        .map(|r| (r.epsilon.ln(), r.median_error()))
        .filter(|&(_, m)| m.is_finite() && m > 0.0)
        .map(|(x, m)| (x, m.ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let var: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    (var > 0.0).then(|| cov / var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::dirichlet_sector;
    use crate::network::build_canonical_cocycle;
    use crate::spectral::{ExpTerm, SectorState};
    use approx::assert_abs_diff_eq;

    fn interval_mixture() -> MixtureSpec {
        let (s1, obs) = dirichlet_sector(1, 1.0, 2, 0.3).unwrap();
        let (s2, _) = dirichlet_sector(2, 3.0_f64.sqrt(), 2, 0.3).unwrap();
        let network = build_canonical_cocycle(&[s1, s2], None, 1e-10).unwrap();
        MixtureSpec {
            network,
            reference: 1,
            states: vec![
                SectorState::real(1, &[(0, 1.0), (1, 0.5)], 1.0),
                SectorState::real(2, &[(0, 1.0)], 1.0),
            ],
            observation: obs,
        }
    }

    // ── Jacobian ───────────────────────────────────────────────────────

    #[test]
    fn jacobian_matches_central_finite_differences() {
        let params = PronyParameters {
            nodes: vec![0.9, 0.6],
            amplitudes: vec![Complex64::new(2.0, 0.5), Complex64::new(-1.0, 0.25)],
            step: 0.1,
        };
        let jac = prony_jacobian(&params).unwrap();
        let f = |p: &PronyParameters| -> Vec<Complex64> {
            (0..2 * p.len())
                .map(|n| {
                    p.nodes
                        .iter()
                        .zip(&p.amplitudes)
                        .map(|(&z, &a)| a * z.powi(n as i32))
                        .sum()
                })
                .collect()
        };
        let delta = 1e-6;
        for col in 0..2 {
            let mut plus = params.clone();
            let mut minus = params.clone();
            plus.nodes[col] += delta;
            minus.nodes[col] -= delta;
            let (fp, fm) = (f(&plus), f(&minus));
            for row in 0..4 {
                let fd = (fp[row] - fm[row]) / (2.0 * delta);
                assert!(
                    (jac[(row, col)] - fd).norm() <= 1e-6 * fd.norm().max(1.0),
                    "z-column {col} row {row}: {} vs {fd}",
                    jac[(row, col)]
                );
            }
            // Amplitude columns are exact powers of the node.
            for row in 0..4 {
                assert_abs_diff_eq!(
                    jac[(row, 2 + col)].re,
                    params.nodes[col].powi(row as i32),
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn degenerate_parameter_sets_are_rejected() {
        let dup = PronyParameters {
            nodes: vec![0.5, 0.5],
            amplitudes: vec![Complex64::ONE, Complex64::ONE],
            step: 0.1,
        };
        assert!(matches!(
            prony_jacobian(&dup),
            Err(Error::DegenerateParameters { .. })
        ));
        let zero_amp = PronyParameters {
            nodes: vec![0.5],
            amplitudes: vec![Complex64::default()],
            step: 0.1,
        };
        assert!(matches!(
            prony_jacobian(&zero_amp),
            Err(Error::DegenerateParameters { .. })
        ));
    }

    // ── Condition numbers ──────────────────────────────────────────────

    #[test]
    fn kappa_matches_a_hand_computed_two_by_two() {
        // L = 1, z = 0.5, a = 1: J = [[0, 1], [1, 0.5]];
        // J^T J has eigenvalues (2.25 ± √1.0625)/2.
        let params = PronyParameters {
            nodes: vec![0.5],
            amplitudes: vec![Complex64::ONE],
            step: 0.1,
        };
        let jac = prony_jacobian(&params).unwrap();
        let kappa = kappa_exp(&jac).unwrap();
        let sigma_min = ((2.25 - 1.0625_f64.sqrt()) / 2.0).sqrt();
        assert_abs_diff_eq!(kappa, 1.0 / sigma_min, epsilon = 1e-12);
    }

    #[test]
    fn closing_node_gaps_inflates_kappa() {
        let kappa_at = |gap: f64| {
            let params = PronyParameters {
                nodes: vec![0.6, 0.6 + gap],
                amplitudes: vec![Complex64::ONE, Complex64::ONE],
                step: 0.1,
            };
            kappa_exp(&prony_jacobian(&params).unwrap()).unwrap()
        };
        let wide = kappa_at(0.1);
        let narrow = kappa_at(0.01);
        assert!(
            narrow / wide > 10.0,
            "κ should blow up as nodes collide: {wide} -> {narrow}"
        );
    }

    #[test]
    fn upper_bound_formula_matches_a_two_term_hand_computation() {
        let model = ExponentialModel::from_terms(vec![
            ExpTerm::real(1.0, 1.0),
            ExpTerm::real(2.0, 1.0),
        ]);
        let (bound, gaps) = kappa_upper_bound(&model, 0.1, 1.0).unwrap();
        // m = 1: e^(2·0.1) / (0.1 · 1 · 1).
        assert_abs_diff_eq!(bound, (0.2_f64).exp() / 0.1, epsilon = 1e-12);
        assert_eq!(gaps.pairs.len(), 1);
        assert_abs_diff_eq!(gaps.product, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn calibrated_bound_dominates_kappa_on_the_interval_mixture() {
        let spec = interval_mixture();
        let tol = Tolerances::default();
        let config = StabilityConfig {
            c_l: 4.0,
            ..StabilityConfig::default()
        };
        let report = stability_report(&spec, 0.05, &config, &tol).unwrap();
        assert!(
            report.kappa_exp <= report.kappa_upper_bound,
            "κ {} vs bound {}",
            report.kappa_exp,
            report.kappa_upper_bound
        );
        // At the raw prefactor 1 this fixture is the worst case on record:
        // κ overshoots the product formula by a factor pinned in [2, 4].
        let raw = stability_report(&spec, 0.05, &StabilityConfig::default(), &tol).unwrap();
        let overshoot = raw.kappa_exp / raw.kappa_upper_bound;
        assert!(
            (2.0..4.0).contains(&overshoot),
            "prefactor regression moved: overshoot {overshoot}"
        );
        // Frozen envelope for this fixture: κ ≈ 1.8e3, ε₀ ≈ 3.2e-6.
        assert!((1.5e3..2.1e3).contains(&report.kappa_exp), "κ = {}", report.kappa_exp);
        assert!(
            (2.0e-6..5.0e-6).contains(&report.epsilon0),
            "ε₀ = {}",
            report.epsilon0
        );
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        assert_abs_diff_eq!(report.gap, pi2 / 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(report.mu_max, 4.0 * pi2, epsilon = 1e-10);
        assert_eq!(report.observability_inverses.len(), 3);
    }

    #[test]
    fn threshold_scales_inversely_with_conditioning() {
        assert_abs_diff_eq!(epsilon_threshold(1.0, 100.0, 5.0), 1e-3, epsilon = 1e-18);
        assert!(epsilon_threshold(f64::INFINITY, 100.0, 5.0).is_infinite());
    }

    // ── Sweeps ─────────────────────────────────────────────────────────

    #[test]
    fn sweep_is_deterministic_and_clean_below_threshold() {
        let spec = interval_mixture();
        let tol = Tolerances::default();
        let eps = [1e-8, 1e-7];
        let a = noise_sweep(&spec, 0.05, 3, &eps, 8, 7, &tol).unwrap();
        let b = noise_sweep(&spec, 0.05, 3, &eps, 8, 7, &tol).unwrap();
        assert_eq!(a, b, "same seed must reproduce the sweep exactly");
        for rec in &a {
            assert_eq!(rec.recon_failures(), 0);
            assert_eq!(rec.tag_failures(), 0);
        }
        // Error medians scale roughly linearly over one decade.
        let ratio = a[1].median_error() / a[0].median_error();
        assert!(
            (3.0..30.0).contains(&ratio),
            "expected ≈10x error growth, got {ratio}"
        );
        let slope = regression_slope(&a).unwrap();
        assert!((0.5..1.5).contains(&slope), "slope {slope}");
    }

    #[test]
    fn sweep_order_must_match_the_mixture() {
        let spec = interval_mixture();
        let tol = Tolerances::default();
        assert!(matches!(
            noise_sweep(&spec, 0.05, 4, &[1e-8], 2, 7, &tol),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn median_handles_even_and_odd_lengths() {
        let rec = SweepRecord {
            epsilon: 1e-6,
            errors: vec![3.0, 1.0, 2.0],
            tag_ok: vec![true; 3],
            recon_ok: vec![true; 3],
        };
        assert_abs_diff_eq!(rec.median_error(), 2.0, epsilon = 1e-15);
        let rec = SweepRecord {
            epsilon: 1e-6,
            errors: vec![4.0, 1.0, 2.0, 3.0],
            tag_ok: vec![true; 4],
            recon_ok: vec![true; 4],
        };
        assert_abs_diff_eq!(rec.median_error(), 2.5, epsilon = 1e-15);
    }
}
