//! Error taxonomy shared across the crate.
//!
//! Variants split into two families: *validation* errors (malformed input,
//! missing data, bad arguments) and *mathematical* errors (a hypothesis the
//! algorithms rely on fails on the given data). [`Error::is_mathematical`]
//! exposes the split so callers can map the families to distinct exit codes.

use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

// ── Error enum ─────────────────────────────────────────────────────────────

#[derive(Debug, Error)]
pub enum Error {
    /// A triple of scaling factors breaks `λ_ij · λ_jk = λ_ik`.
    #[error("scaling multiplicativity violated at ({i},{j},{k}): relative residual {residual:.3e} exceeds {tol:.3e}")]
    MultiplicativityViolation {
        i: usize,
        j: usize,
        k: usize,
        residual: f64,
        tol: f64,
    },

    /// A requested cycle is malformed (too short, out of range, or open).
    #[error("invalid cycle: {reason}")]
    InvalidCycle { reason: String },

    /// Two sectors do not share the rescaled spectrum required of them.
    #[error("rescaled spectra of sectors {a} and {b} disagree: {detail}")]
    SpectralMismatch { a: u32, b: u32, detail: String },

    /// An eigenvalue was requested that the sector does not carry.
    #[error("sector {sector} has no eigenvalue near {alpha:.12e}")]
    UnknownEigenvalue { sector: u32, alpha: f64 },

    /// A sample window is too short for the requested operation.
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    /// The sample Hankel matrix is numerically rank deficient at the requested order.
    #[error("Hankel matrix rank {rank} < {size} (singular-value ratio {ratio:.3e} below cutoff {tol:.3e})")]
    RankDeficientHankel {
        rank: usize,
        size: usize,
        ratio: f64,
        tol: f64,
    },

    /// A recovered node left the admissible real interval (0, 1).
    #[error("node {node} outside the admissible range: {reason}")]
    NodeOutOfRange { node: Complex64, reason: String },

    /// A rate sits too close to the midpoint between two sectors to assign.
    #[error("ambiguous sector assignment for rate {rate:.12e}: {detail}")]
    AmbiguousTag { rate: f64, detail: String },

    /// A rate matched no catalogued eigenvalue within the capture radius.
    #[error("rate {rate:.12e} unmatched: nearest eigenvalue {nearest:.12e} at distance {distance:.3e} exceeds capture radius {radius:.3e}")]
    UnmatchedRate {
        rate: f64,
        nearest: f64,
        distance: f64,
        radius: f64,
    },

    /// Sector spectra overlap, so rates cannot be attributed by proximity.
    #[error("sector spectra are not separated: {detail}")]
    SeparationViolation { detail: String },

    /// The observation functional is (numerically) blind to a mode.
    #[error("mode (sector {sector}, eigenvalue {alpha:.12e}) is unobservable: |transfer| = {magnitude:.3e} <= {tol:.3e}")]
    ObservabilityFailure {
        sector: u32,
        alpha: f64,
        magnitude: f64,
        tol: f64,
    },

    /// Component recovery is only defined on simple eigenvalues.
    #[error("eigenvalue {alpha:.12e} of sector {sector} has multiplicity {multiplicity}; component recovery needs a simple eigenvalue")]
    UnsupportedMultiplicity {
        sector: u32,
        alpha: f64,
        multiplicity: usize,
    },

    /// Parameters collapse (coincident nodes, vanishing amplitudes, ...).
    #[error("degenerate parameters: {reason}")]
    DegenerateParameters { reason: String },

    /// The sensitivity Jacobian is singular to working precision.
    #[error("Jacobian singular to working precision (singular-value ratio {ratio:.3e})")]
    SingularJacobian { ratio: f64 },

    /// Exact data failed to reproduce its own parameters.
    #[error("exact-data round trip failed: {detail}")]
    RoundTripFailed { detail: String },

    /// Evaluation time must be non-negative.
    #[error("negative evaluation time {t}")]
    NegativeTime { t: f64 },

    /// Catch-all for malformed or inconsistent input.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Annotates an inner error with the pipeline stage that raised it.
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

// ── Classification ─────────────────────────────────────────────────────────

impl Error {
    /// Wraps the error with the name of the pipeline stage that raised it.
    pub fn with_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Unwraps stage annotations down to the originating error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// Short machine-readable variant name (stage wrappers are transparent).
    pub fn name(&self) -> &'static str {
        match self.root() {
            Error::MultiplicativityViolation { .. } => "multiplicativity_violation",
            Error::InvalidCycle { .. } => "invalid_cycle",
            Error::SpectralMismatch { .. } => "spectral_mismatch",
            Error::UnknownEigenvalue { .. } => "unknown_eigenvalue",
            Error::InsufficientSamples { .. } => "insufficient_samples",
            Error::RankDeficientHankel { .. } => "rank_deficient_hankel",
            Error::NodeOutOfRange { .. } => "node_out_of_range",
            Error::AmbiguousTag { .. } => "ambiguous_tag",
            Error::UnmatchedRate { .. } => "unmatched_rate",
            Error::SeparationViolation { .. } => "separation_violation",
            Error::ObservabilityFailure { .. } => "observability_failure",
            Error::UnsupportedMultiplicity { .. } => "unsupported_multiplicity",
            Error::DegenerateParameters { .. } => "degenerate_parameters",
            Error::SingularJacobian { .. } => "singular_jacobian",
            Error::RoundTripFailed { .. } => "round_trip_failed",
            Error::NegativeTime { .. } => "negative_time",
            Error::InvalidInput(_) => "invalid_input",
            Error::Stage { .. } => unreachable!("root() strips stage wrappers"),
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    /// True when the error reports a failed mathematical hypothesis rather
    /// than malformed input; the two families map to different exit codes.
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self.root(),
            Error::MultiplicativityViolation { .. }
                | Error::SpectralMismatch { .. }
                | Error::RankDeficientHankel { .. }
                | Error::NodeOutOfRange { .. }
                | Error::AmbiguousTag { .. }
                | Error::UnmatchedRate { .. }
                | Error::SeparationViolation { .. }
                | Error::ObservabilityFailure { .. }
                | Error::UnsupportedMultiplicity { .. }
                | Error::DegenerateParameters { .. }
                | Error::SingularJacobian { .. }
                | Error::RoundTripFailed { .. }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_wrapper_is_transparent_to_classification() {
        let inner = Error::RankDeficientHankel {
            rank: 2,
            size: 4,
            ratio: 1e-14,
            tol: 1e-10,
        };
        let wrapped = inner.with_stage("polynomial");
        assert!(wrapped.is_mathematical());
        assert_eq!(wrapped.name(), "rank_deficient_hankel");
        assert!(wrapped.to_string().starts_with("polynomial: "));
    }

    #[test]
    fn validation_errors_are_not_mathematical() {
        assert!(!Error::InvalidInput("x".into()).is_mathematical());
        assert!(!Error::InsufficientSamples { needed: 8, got: 3 }.is_mathematical());
        assert!(!Error::NegativeTime { t: -1.0 }.is_mathematical());
        assert!(Error::AmbiguousTag {
            rate: 1.0,
            detail: String::new()
        }
        .is_mathematical());
    }
}
