//! Value types for sector dynamics: spectra, states, transfer maps,
//! observation functionals, exponential models, sample windows, and
//! stability reports, together with their structural validation.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::wire;

// ── Tolerances ─────────────────────────────────────────────────────────────

/// Numerical thresholds used across the pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    /// Eigenvalue/rate matching distance (scale-aware absolute).
    pub eig: f64,
    /// Relative residual allowed in cocycle and gauge identities.
    pub cocycle: f64,
    /// Amplitudes at or below this magnitude are dropped as negligible.
    pub amp: f64,
    /// Relative singular-value cutoff declaring numerical rank.
    pub rank: f64,
    /// Allowed imaginary part of a node, relative to the largest node.
    pub imag_rel: f64,
    /// Observation transfers at or below this magnitude are unobservable.
    pub obs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eig: 1e-10,
            cocycle: 1e-9,
            amp: 1e-13,
            rank: 1e-10,
            imag_rel: 1e-8,
            obs: 1e-12,
        }
    }
}

/// Scale-aware closeness: `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

// ── Sector spectra ─────────────────────────────────────────────────────────

/// One sector: its internal clock (gauge) and generator spectrum.
///
/// Eigenvalues are listed in the sector's *own* time units, strictly
/// increasing and positive; `multiplicities[k]` is the geometric
/// multiplicity of `eigenvalues[k]`. `gauge` is the sector's time-scale
/// factor `τ` relative to the network's common clock, when known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub id: u32,
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<f64>,
}

impl SectorSpec {
    pub fn new(id: u32, eigenvalues: Vec<f64>, multiplicities: Vec<usize>) -> Self {
        SectorSpec {
            id,
            eigenvalues,
            multiplicities,
            gauge: None,
        }
    }

    /// Sector with all eigenvalues simple.
    pub fn simple(id: u32, eigenvalues: Vec<f64>) -> Self {
        let n = eigenvalues.len();
        SectorSpec::new(id, eigenvalues, vec![1; n])
    }

    pub fn with_gauge(mut self, tau: f64) -> Self {
        self.gauge = Some(tau);
        self
    }

    /// Structural violations, empty when well-formed.
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if self.eigenvalues.is_empty() {
            issues.push(format!("sector {}: empty spectrum", self.id));
        }
        if self.eigenvalues.len() != self.multiplicities.len() {
            issues.push(format!(
                "sector {}: {} eigenvalues but {} multiplicities",
                self.id,
                self.eigenvalues.len(),
                self.multiplicities.len()
            ));
        }
        for (k, &a) in self.eigenvalues.iter().enumerate() {
            if !a.is_finite() || a <= 0.0 {
                issues.push(format!("sector {}: eigenvalue[{k}] = {a} not positive", self.id));
            }
        }
        for w in self.eigenvalues.windows(2) {
            if w[1] <= w[0] {
                issues.push(format!(
                    "sector {}: eigenvalues not strictly increasing ({} then {})",
                    self.id, w[0], w[1]
                ));
                break;
            }
        }
        for (k, &m) in self.multiplicities.iter().enumerate() {
            if m == 0 {
                issues.push(format!("sector {}: multiplicity[{k}] = 0", self.id));
            }
        }
        if let Some(tau) = self.gauge {
            if !tau.is_finite() || tau <= 0.0 {
                issues.push(format!("sector {}: gauge {tau} not positive", self.id));
            }
        }
        issues
    }

    /// Spectrum in the common clock: `τ · α` for each eigenvalue.
    pub fn scaled_spectrum(&self) -> Option<Vec<f64>> {
        self.gauge
            .map(|tau| self.eigenvalues.iter().map(|a| tau * a).collect())
    }

    /// Index and value of the eigenvalue closest to `x`.
    pub fn nearest_eigenvalue(&self, x: f64) -> Option<(usize, f64)> {
        self.eigenvalues
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                (**a - x).abs().partial_cmp(&(**b - x).abs()).unwrap()
            })
            .map(|(k, &a)| (k, a))
    }

    /// Smallest spacing between consecutive eigenvalues; `+inf` for a
    /// single-eigenvalue sector.
    pub fn min_spacing(&self) -> f64 {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Total state-space dimension (sum of multiplicities).
    pub fn dimension(&self) -> usize {
        self.multiplicities.iter().sum()
    }
}

// ── Sector states ──────────────────────────────────────────────────────────

/// Initial condition inside one sector, expanded over eigenmodes.
///
/// `coefficients[k]` multiplies the first basis vector of eigenvalue `k`'s
/// eigenspace; `weight` is the sector's mixture weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorState {
    pub sector: u32,
    #[serde(with = "wire::complex_map")]
    pub coefficients: BTreeMap<usize, Complex64>,
    pub weight: f64,
}

impl SectorState {
    pub fn new(sector: u32, coefficients: BTreeMap<usize, Complex64>, weight: f64) -> Self {
        SectorState {
            sector,
            coefficients,
            weight,
        }
    }

    /// Real coefficient shorthand: `(mode index, value)` pairs.
    pub fn real(sector: u32, entries: &[(usize, f64)], weight: f64) -> Self {
        let coefficients = entries
            .iter()
            .map(|&(k, v)| (k, Complex64::new(v, 0.0)))
            .collect();
        SectorState::new(sector, coefficients, weight)
    }

    /// Structural violations against the sector the state claims to live in.
    pub fn validate(&self, spec: &SectorSpec) -> Vec<String> {
        let mut issues = Vec::new();
        if !(self.weight.is_finite() && self.weight > 0.0) {
            issues.push(format!(
                "state in sector {}: weight {} not positive",
                self.sector, self.weight
            ));
        }
        if self.sector != spec.id {
            issues.push(format!(
                "state claims sector {} but was checked against {}",
                self.sector, spec.id
            ));
        }
        for &k in self.coefficients.keys() {
            if k >= spec.eigenvalues.len() {
                issues.push(format!(
                    "state in sector {}: mode index {k} out of range (sector has {})",
                    self.sector,
                    spec.eigenvalues.len()
                ));
            }
        }
        issues
    }
}

// ── Transfer maps ──────────────────────────────────────────────────────────

/// One eigenspace block of a transfer map, keyed by the *source* sector's
/// eigenvalue it acts on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferBlock {
    pub source_alpha: f64,
    #[serde(with = "wire::complex_matrix")]
    pub matrix: DMatrix<Complex64>,
}

/// Intertwining map from sector `from` to sector `to`.
///
/// `scaling` is the time rescaling `λ = τ_to / τ_from` in
/// `S_to(λ t) ∘ K = K ∘ S_from(t)`; the map sends the eigenspace at
/// `α` (source units) onto the eigenspace at `α / λ` (target units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferMap {
    pub from: u32,
    pub to: u32,
    pub scaling: f64,
    pub blocks: Vec<TransferBlock>,
}

impl TransferMap {
    /// Identity map of a sector onto itself.
    pub fn identity(spec: &SectorSpec) -> Self {
        let blocks = spec
            .eigenvalues
            .iter()
            .zip(&spec.multiplicities)
            .map(|(&a, &m)| TransferBlock {
                source_alpha: a,
                matrix: DMatrix::identity(m, m),
            })
            .collect();
        TransferMap {
            from: spec.id,
            to: spec.id,
            scaling: 1.0,
            blocks,
        }
    }

    /// Block acting on the source eigenvalue nearest `alpha`, if within `tol`.
    pub fn block_for(&self, alpha: f64, tol: f64) -> Option<&TransferBlock> {
        self.blocks
            .iter()
            .min_by(|x, y| {
                (x.source_alpha - alpha)
                    .abs()
                    .partial_cmp(&(y.source_alpha - alpha).abs())
                    .unwrap()
            })
            .filter(|b| close(b.source_alpha, alpha, tol))
    }

    /// Structural violations against the two sectors the map connects.
    pub fn validate(&self, from: &SectorSpec, to: &SectorSpec, tol: f64) -> Vec<String> {
        let mut issues = Vec::new();
        if !(self.scaling.is_finite() && self.scaling > 0.0) {
            issues.push(format!(
                "transfer {}->{}: scaling {} not positive",
                self.from, self.to, self.scaling
            ));
            return issues;
        }
        if self.blocks.len() != from.eigenvalues.len() {
            issues.push(format!(
                "transfer {}->{}: {} blocks for {} source eigenvalues",
                self.from,
                self.to,
                self.blocks.len(),
                from.eigenvalues.len()
            ));
        }
        for block in &self.blocks {
            let Some((src_idx, src_alpha)) = from.nearest_eigenvalue(block.source_alpha) else {
                issues.push(format!(
                    "transfer {}->{}: empty source sector",
                    self.from, self.to
                ));
                break;
            };
            if !close(src_alpha, block.source_alpha, tol) {
                issues.push(format!(
                    "transfer {}->{}: block at {} matches no source eigenvalue",
                    self.from, self.to, block.source_alpha
                ));
                continue;
            }
            let target = block.source_alpha / self.scaling;
            let Some((dst_idx, dst_alpha)) = to.nearest_eigenvalue(target) else {
                continue;
            };
            if !close(dst_alpha, target, tol) {
                issues.push(format!(
                    "transfer {}->{}: block at {} targets {} which matches no eigenvalue of sector {}",
                    self.from, self.to, block.source_alpha, target, self.to
                ));
                continue;
            }
            let (rows, cols) = (block.matrix.nrows(), block.matrix.ncols());
            if cols != from.multiplicities[src_idx] || rows != to.multiplicities[dst_idx] {
                issues.push(format!(
                    "transfer {}->{}: block at {} is {}x{}, expected {}x{}",
                    self.from,
                    self.to,
                    block.source_alpha,
                    rows,
                    cols,
                    to.multiplicities[dst_idx],
                    from.multiplicities[src_idx]
                ));
            }
        }
        issues
    }
}

// ── Observation functionals ────────────────────────────────────────────────

/// Linear readout on the reference sector.
///
/// `atoms[(n, k)]` is the functional applied to basis vector `k` of
/// eigenvalue `n`'s eigenspace; missing entries are zero. The readout of a
/// coefficient vector `v` in mode `n` is `Σ_k atoms[(n, k)] · v_k` (linear,
/// not sesquilinear).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservationFunctional {
    #[serde(with = "wire::atom_map")]
    pub atoms: BTreeMap<(usize, usize), Complex64>,
}

impl ObservationFunctional {
    pub fn from_entries(entries: impl IntoIterator<Item = ((usize, usize), Complex64)>) -> Self {
        ObservationFunctional {
            atoms: entries.into_iter().collect(),
        }
    }

    /// Real shorthand: `(mode, basis, value)` triples.
    pub fn real(entries: &[(usize, usize, f64)]) -> Self {
        Self::from_entries(
            entries
                .iter()
                .map(|&(n, k, v)| ((n, k), Complex64::new(v, 0.0))),
        )
    }

    /// Applies the functional to a coefficient vector living in mode `n`.
    pub fn apply(&self, mode: usize, coeffs: &[Complex64]) -> Complex64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, &v)| self.atoms.get(&(mode, k)).copied().unwrap_or_default() * v)
            .sum()
    }
}

// ── Exponential models ─────────────────────────────────────────────────────

/// Sector attribution of one exponential term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorTag {
    pub sector: u32,
    pub alpha: f64,
}

/// One decaying term `amplitude · e^(-rate · t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "ExpTermWire", into = "ExpTermWire")]
pub struct ExpTerm {
    pub rate: f64,
    pub amplitude: Complex64,
    pub tag: Option<SectorTag>,
}

impl ExpTerm {
    pub fn new(rate: f64, amplitude: Complex64) -> Self {
        ExpTerm {
            rate,
            amplitude,
            tag: None,
        }
    }

    pub fn real(rate: f64, amplitude: f64) -> Self {
        ExpTerm::new(rate, Complex64::new(amplitude, 0.0))
    }

    pub fn tagged(mut self, sector: u32, alpha: f64) -> Self {
        self.tag = Some(SectorTag { sector, alpha });
        self
    }
}

#[derive(Serialize, Deserialize)]
struct ExpTermWire {
    rate: f64,
    amp_re: f64,
    amp_im: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sector: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
}

impl From<ExpTermWire> for ExpTerm {
    fn from(w: ExpTermWire) -> Self {
        let tag = match (w.sector, w.alpha) {
            (Some(sector), Some(alpha)) => Some(SectorTag { sector, alpha }),
            _ => None,
        };
        ExpTerm {
            rate: w.rate,
            amplitude: Complex64::new(w.amp_re, w.amp_im),
            tag,
        }
    }
}

impl From<ExpTerm> for ExpTermWire {
    fn from(t: ExpTerm) -> Self {
        ExpTermWire {
            rate: t.rate,
            amp_re: t.amplitude.re,
            amp_im: t.amplitude.im,
            sector: t.tag.map(|g| g.sector),
            alpha: t.tag.map(|g| g.alpha),
        }
    }
}

/// Finite sum of decaying exponentials, terms sorted by increasing rate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExponentialModel {
    pub terms: Vec<ExpTerm>,
}

impl ExponentialModel {
    /// Builds a model, sorting terms by rate. Callers that cannot guarantee
    /// distinct rates should merge through the mixture layer instead.
    pub fn from_terms(mut terms: Vec<ExpTerm>) -> Self {
        terms.sort_by(|a, b| a.rate.partial_cmp(&b.rate).unwrap());
        ExponentialModel { terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn rates(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.rate).collect()
    }

    pub fn amplitudes(&self) -> Vec<Complex64> {
        self.terms.iter().map(|t| t.amplitude).collect()
    }

    /// Nodes `e^(-rate · h)` for step `h`, in term order.
    pub fn nodes(&self, h: f64) -> Vec<f64> {
        self.terms.iter().map(|t| (-t.rate * h).exp()).collect()
    }

    /// Structural violations: finite positive rates, strictly sorted,
    /// pairwise distinct, non-zero amplitudes.
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        for (k, t) in self.terms.iter().enumerate() {
            if !t.rate.is_finite() || t.rate <= 0.0 {
                issues.push(format!("term {k}: rate {} not positive", t.rate));
            }
            if t.amplitude.norm() == 0.0 {
                issues.push(format!("term {k}: zero amplitude"));
            }
        }
        for w in self.terms.windows(2) {
            if w[1].rate <= w[0].rate {
                issues.push(format!(
                    "rates not strictly increasing ({} then {})",
                    w[0].rate, w[1].rate
                ));
                break;
            }
        }
        issues
    }
}

// ── Sample windows ─────────────────────────────────────────────────────────

/// Uniform samples `values[n] ≈ y(n · step)`, with the noise magnitude
/// injected so far recorded for provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleWindow {
    pub step: f64,
    #[serde(with = "wire::complex_vec")]
    pub values: Vec<Complex64>,
    pub noise_level: f64,
}

impl SampleWindow {
    pub fn new(step: f64, values: Vec<Complex64>) -> Self {
        SampleWindow {
            step,
            values,
            noise_level: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when every sample has exactly zero imaginary part (synthesis
    /// from real amplitudes produces exact zeros).
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }
}

// ── Stability reports ──────────────────────────────────────────────────────

/// Inverse observation-transfer magnitude of one tagged mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservabilityEntry {
    pub sector: u32,
    pub alpha: f64,
    pub inverse_norm: f64,
}

/// Conditioning summary of a sampled mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Inverse smallest singular value of the sensitivity Jacobian.
    pub kappa_exp: f64,
    /// A-priori bound on `kappa_exp` from gap products.
    pub kappa_upper_bound: f64,
    /// Smallest distance from any tagged rate to every other sector's
    /// spectrum; `+inf` (serialized as `null`) with fewer than two sectors.
    #[serde(with = "wire::xreal")]
    pub gap: f64,
    /// Per-sector minimal eigenvalue spacing.
    #[serde(with = "wire::xreal_map")]
    pub intra_gaps: BTreeMap<u32, f64>,
    /// Largest noise magnitude with certified tagging, `gap / (2 · C3 · kappa_exp)`.
    #[serde(with = "wire::xreal")]
    pub epsilon0: f64,
    pub observability_inverses: Vec<ObservabilityEntry>,
    /// Largest active rate.
    pub mu_max: f64,
    /// Sample step the report was computed at.
    pub step: f64,
}
