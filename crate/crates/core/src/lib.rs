//! Numerics for time-scaled networks of decaying dynamics.
//!
//! The crate covers the full pipeline:
//!
//! 1. **Gauge algebra** ([`network`]): pairwise time-scaling families,
//!    gauge recovery, cycle consistency, isospectral compatibility, and
//!    canonical transfer-map construction with cocycle verification.
//! 2. **Synthesis** ([`mixture`]): transporting weighted sector states to a
//!    reference observation functional and collapsing them into a finite
//!    sum of decaying exponentials.
//! 3. **Reconstruction** ([`prony`]): recovering rates and amplitudes from
//!    uniform samples through Hankel factorization, annihilating
//!    polynomials, and least-squares amplitude fits.
//! 4. **Attribution** ([`tagging`]): matching recovered rates back to
//!    sector eigenvalues with ambiguity and capture-radius guards, and
//!    recovering state coefficients.
//! 5. **Diagnostics** ([`stability`]): sensitivity Jacobians, condition
//!    numbers and a-priori bounds, certified noise thresholds, and
//!    randomized noise sweeps.
//!
//! [`fixtures`] ships ready-made configurations and [`io`] the on-disk
//! formats used by the companion command-line tool.

pub mod error;
pub mod fixtures;
pub mod io;
pub mod mixture;
pub mod network;
pub mod prony;
pub mod spectral;
pub mod stability;
pub mod tagging;
mod wire;

pub use error::{Error, Result};
pub use io::NetworkConfig;
pub use mixture::{
    add_noise, collapse, dirichlet_sector, evaluate, merge_terms, modal_atoms, sample_uniform,
    MixtureSpec, ModalTerm,
};
pub use network::{
    build_canonical_cocycle, check_isospectral, cocycle_residual, cycle_product,
    intertwining_residual, multiplicativity_residual, recover_gauges, transport_eigenvector,
    CocycleNetwork, IsospectralReport, ScalingFamily,
};
pub use num_complex::Complex64;
pub use prony::{
    build_hankel, estimate_order, nodes_to_rates, prony_polynomial, reconstruct,
    reconstruct_from_moments, solve_amplitudes, solve_nodes, PronyParameters, PronyPolynomial,
};
pub use spectral::{
    close, ExpTerm, ExponentialModel, ObservabilityEntry, ObservationFunctional, SampleWindow,
    SectorSpec, SectorState, SectorTag, StabilityReport, Tolerances, TransferBlock, TransferMap,
};
pub use stability::{
    epsilon_threshold, kappa_exp, kappa_upper_bound, noise_sweep, prony_jacobian,
    regression_slope, stability_report, GapKind, GapProduct, StabilityConfig, SweepRecord,
};
pub use tagging::{
    check_spectral_separation, compute_gap, observation_transfer, recover_eigencomponents,
    tag_rates, EigencomponentEstimate, SeparationReport, TagOptions, TaggedModel, TaggedTerm,
};
