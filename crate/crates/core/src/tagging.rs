//! Sector attribution: separation checks, proximity tagging of recovered
//! rates with an ambiguity guard, gap computation, and recovery of state
//! expansion coefficients from tagged amplitudes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::MixtureSpec;
use crate::network::transport_eigenvector;
use crate::spectral::{close, ExponentialModel, SectorSpec, Tolerances};
use crate::wire;

// ── Separation ─────────────────────────────────────────────────────────────

/// One pair of eigenvalues from different sectors that sit too close.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationCollision {
    pub sector_a: u32,
    pub alpha_a: f64,
    pub sector_b: u32,
    pub alpha_b: f64,
    pub distance: f64,
}

/// Result of the pairwise-disjointness check on unscaled spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub pass: bool,
    pub collisions: Vec<SeparationCollision>,
}

/// Checks that the sectors' unscaled spectra are pairwise disjoint: no two
/// eigenvalues from different sectors agree within `tol` (scale-aware).
pub fn check_spectral_separation(sectors: &[SectorSpec], tol: f64) -> SeparationReport {
    let mut collisions = Vec::new();
    for (x, a) in sectors.iter().enumerate() {
        for b in sectors.iter().skip(x + 1) {
            for &ea in &a.eigenvalues {
                for &eb in &b.eigenvalues {
                    if close(ea, eb, tol) {
                        collisions.push(SeparationCollision {
                            sector_a: a.id,
                            alpha_a: ea,
                            sector_b: b.id,
                            alpha_b: eb,
                            distance: (ea - eb).abs(),
                        });
                    }
                }
            }
        }
    }
    SeparationReport {
        pass: collisions.is_empty(),
        collisions,
    }
}

// ── Tagged models ──────────────────────────────────────────────────────────

/// One rate attributed to a catalogued eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedTerm {
    /// Rate as recovered from data.
    pub rate_raw: f64,
    /// The catalogued eigenvalue it was matched to.
    pub rate_snapped: f64,
    #[serde(rename = "amp", with = "wire::complex_pair")]
    pub amplitude: Complex64,
    pub sector: u32,
    pub alpha: f64,
}

/// A fully attributed model plus the separation margin it enjoys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedModel {
    pub terms: Vec<TaggedTerm>,
    /// Minimum distance from any tagged rate to the union of *other*
    /// sectors' spectra; `+inf` (serialized `null`) with one sector.
    #[serde(with = "wire::xreal")]
    pub gap: f64,
}

/// Knobs for the tagging pass.
#[derive(Debug, Clone)]
pub struct TagOptions {
    /// Scale-aware matching tolerance for the separation precheck.
    pub tol_eig: f64,
    /// Maximum allowed distance from a rate to its matched eigenvalue.
    /// `None` uses 10% of the local eigenvalue spacing.
    pub capture_radius: Option<f64>,
    /// A match is kept only if its distance is below this fraction of the
    /// distance to the nearest eigenvalue of any *other* sector.
    pub ambiguity_factor: f64,
}

impl Default for TagOptions {
    fn default() -> Self {
        TagOptions {
            tol_eig: Tolerances::default().eig,
            capture_radius: None,
            ambiguity_factor: 0.5,
        }
    }
}

/// Attributes every rate of a model to a sector eigenvalue by proximity.
///
/// Fails with `SeparationViolation` when spectra overlap, `UnmatchedRate`
/// when the nearest eigenvalue is outside the capture radius, and
/// `AmbiguousTag` when the runner-up sector is less than twice as far
/// (by `ambiguity_factor`) as the match.
pub fn tag_rates(
    model: &ExponentialModel,
    sectors: &[SectorSpec],
    opts: &TagOptions,
) -> Result<TaggedModel> {
    if sectors.is_empty() {
        return Err(Error::InvalidInput("no sectors to tag against".into()));
    }
    let separation = check_spectral_separation(sectors, opts.tol_eig);
    if !separation.pass {
        let c = &separation.collisions[0];
        return Err(Error::SeparationViolation {
            detail: format!(
                "sector {} eigenvalue {:.12e} and sector {} eigenvalue {:.12e} are {:.3e} apart",
                c.sector_a, c.alpha_a, c.sector_b, c.alpha_b, c.distance
            ),
        });
    }
    let mut terms = Vec::with_capacity(model.len());
    for term in &model.terms {
        let mu = term.rate;
        // Nearest eigenvalue overall and nearest in any other sector.
        let mut best: Option<(u32, f64, f64)> = None; // (sector, alpha, dist)
        for s in sectors {
            for &a in &s.eigenvalues {
                let d = (a - mu).abs();
                if best.map_or(true, |(_, _, bd)| d < bd) {
                    best = Some((s.id, a, d));
                }
            }
        }
        let (sector, alpha, dist) = best.expect("sectors non-empty");
        let runner_up = sectors
            .iter()
            .filter(|s| s.id != sector)
            .flat_map(|s| s.eigenvalues.iter())
            .map(|&a| (a - mu).abs())
            .fold(f64::INFINITY, f64::min);
        let radius = opts
            .capture_radius
            .unwrap_or_else(|| 0.1 * local_spacing(sectors, alpha));
        if dist > radius {
            return Err(Error::UnmatchedRate {
                rate: mu,
                nearest: alpha,
                distance: dist,
                radius,
            });
        }
        if dist >= opts.ambiguity_factor * runner_up {
            return Err(Error::AmbiguousTag {
                rate: mu,
                detail: format!(
                    "matched sector {sector} at distance {dist:.3e}, but another sector is {runner_up:.3e} away"
                ),
            });
        }
        terms.push(TaggedTerm {
            rate_raw: mu,
            rate_snapped: alpha,
            amplitude: term.amplitude,
            sector,
            alpha,
        });
    }
    let gap = gap_of_terms(&terms, sectors);
    Ok(TaggedModel { terms, gap })
}

/// Distance from `alpha` to the nearest *other* catalogued eigenvalue;
/// `+inf` when it is the only one.
fn local_spacing(sectors: &[SectorSpec], alpha: f64) -> f64 {
    sectors
        .iter()
        .flat_map(|s| s.eigenvalues.iter())
        .map(|&a| (a - alpha).abs())
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min)
}

/// Minimum distance from tagged rates to the union of other sectors' full
/// spectra; `+inf` with fewer than two sectors.
pub fn compute_gap(tagged: &TaggedModel, sectors: &[SectorSpec]) -> f64 {
    gap_of_terms(&tagged.terms, sectors)
}

fn gap_of_terms(terms: &[TaggedTerm], sectors: &[SectorSpec]) -> f64 {
    let mut gap = f64::INFINITY;
    for term in terms {
        for s in sectors.iter().filter(|s| s.id != term.sector) {
            for &a in &s.eigenvalues {
                gap = gap.min((a - term.rate_snapped).abs());
            }
        }
    }
    gap
}

// ── Component recovery ─────────────────────────────────────────────────────

/// A recovered state expansion coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigencomponentEstimate {
    pub sector: u32,
    pub alpha: f64,
    #[serde(with = "wire::complex_pair")]
    pub coefficient: Complex64,
}

/// Observation transfer `T = weight · observation(transported basis
/// vector)` of a simple eigenvalue: the factor an amplitude must be divided
/// by to recover the state coefficient. Errors on non-simple eigenvalues
/// and on transfers with `|T|` at or below `tol.obs`.
pub fn observation_transfer(
    spec: &MixtureSpec,
    sector_id: u32,
    alpha: f64,
    tol: &Tolerances,
) -> Result<Complex64> {
    let reference = spec
        .network
        .sector(spec.reference)
        .ok_or_else(|| Error::InvalidInput(format!("unknown reference {}", spec.reference)))?;
    let sector = spec
        .network
        .sector(sector_id)
        .ok_or_else(|| Error::InvalidInput(format!("unknown sector {sector_id}")))?;
    let (mode, alpha) = sector
        .nearest_eigenvalue(alpha)
        .filter(|&(_, a)| close(a, alpha, tol.eig))
        .ok_or(Error::UnknownEigenvalue {
            sector: sector_id,
            alpha,
        })?;
    let mult = sector.multiplicities[mode];
    if mult != 1 {
        return Err(Error::UnsupportedMultiplicity {
            sector: sector_id,
            alpha,
            multiplicity: mult,
        });
    }
    let weight = spec
        .states
        .iter()
        .find(|s| s.sector == sector_id)
        .map(|s| s.weight)
        .ok_or_else(|| {
            Error::InvalidInput(format!("no state (hence no weight) for sector {sector_id}"))
        })?;
    let basis = vec![Complex64::ONE];
    let (transported, target_alpha) = if sector_id == spec.reference {
        (basis, alpha)
    } else {
        let map = spec
            .network
            .transfer(spec.reference, sector_id)
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "no transfer map from sector {sector_id} to reference {}",
                    spec.reference
                ))
            })?;
        transport_eigenvector(map, alpha, &basis, tol.eig)?
    };
    let (ref_mode, _) = reference
        .nearest_eigenvalue(target_alpha)
        .filter(|&(_, a)| close(a, target_alpha, tol.eig))
        .ok_or(Error::UnknownEigenvalue {
            sector: spec.reference,
            alpha: target_alpha,
        })?;
    let transfer = spec.observation.apply(ref_mode, &transported) * weight;
    if transfer.norm() <= tol.obs {
        return Err(Error::ObservabilityFailure {
            sector: sector_id,
            alpha,
            magnitude: transfer.norm(),
            tol: tol.obs,
        });
    }
    Ok(transfer)
}

/// Divides each tagged amplitude by its observation transfer to recover the
/// state coefficient ξ. Requires simple eigenvalues and observable modes.
pub fn recover_eigencomponents(
    tagged: &TaggedModel,
    spec: &MixtureSpec,
    tol: &Tolerances,
) -> Result<Vec<EigencomponentEstimate>> {
    let mut out = Vec::with_capacity(tagged.terms.len());
    for term in &tagged.terms {
        let transfer = observation_transfer(spec, term.sector, term.alpha, tol)?;
        let alpha = spec
            .network
            .sector(term.sector)
            .and_then(|s| s.nearest_eigenvalue(term.alpha))
            .map(|(_, a)| a)
            .unwrap_or(term.alpha);
        out.push(EigencomponentEstimate {
            sector: term.sector,
            alpha,
            coefficient: term.amplitude / transfer,
        });
    }
    Ok(out)
}
