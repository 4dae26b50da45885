//! Built-in demonstration configurations. Eigenvalues are computed from
//! their closed forms at full precision at construction time, never from
//! rounded decimal literals.

use crate::error::{Error, Result};
use crate::io::NetworkConfig;
use crate::mixture::dirichlet_sector;
use crate::spectral::{ObservationFunctional, SectorSpec, SectorState};

// ── Catalog ────────────────────────────────────────────────────────────────

/// A named configuration plus the sampling parameters it is meant to be
/// run with.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub config: NetworkConfig,
    /// Suggested sample step.
    pub step: f64,
    /// Suggested model order (number of active exponential terms).
    pub order: usize,
}

/// All fixture names, in catalog order.
pub fn names() -> &'static [&'static str] {
    &[
        "ex5",
        "ex6",
        "example1",
        "example1-perturbed",
        "example3",
        "example4",
    ]
}

/// Looks a fixture up by name.
pub fn by_name(name: &str) -> Result<Fixture> {
    match name {
        "ex5" => Ok(ex5()),
        "ex6" => Ok(ex6()),
        "example1" => Ok(example1()),
        "example1-perturbed" => Ok(example1_perturbed()),
        "example3" => Ok(example3()),
        "example4" => Ok(example4()),
        other => Err(Error::InvalidInput(format!(
            "unknown fixture '{other}'; available: {}",
            names().join(", ")
        ))),
    }
}

// ── Interval pair ──────────────────────────────────────────────────────────

/// Two heat intervals of lengths 1 and √3 observed at `x0 = 0.3`: three
/// active modes with well-separated rates. Suggested sampling: `h = 0.05`,
/// order 3.
pub fn ex6() -> Fixture {
    let (s1, observation) = dirichlet_sector(1, 1.0, 2, 0.3).expect("valid geometry");
    let (s2, _) = dirichlet_sector(2, 3.0_f64.sqrt(), 2, 0.3).expect("valid geometry");
    let config = NetworkConfig {
        sectors: vec![s1, s2],
        lambda: None,
        transfers: None,
        reference: Some(1),
        states: vec![
            SectorState::real(1, &[(0, 1.0), (1, 0.5)], 1.0),
            SectorState::real(2, &[(0, 1.0)], 1.0),
        ],
        observation: Some(observation),
    };
    Fixture {
        name: "ex6",
        config,
        step: 0.05,
        order: 3,
    }
}

/// Two abstract sectors sharing the rescaled spectrum {1, 2, 3} under
/// gauges (1, √2). Four active modes interleave across sectors; the third
/// catalogued eigenvalue of each sector stays dark. Suggested sampling:
/// `h = 0.1`, order 4.
pub fn ex5() -> Fixture {
    let r = 1.0 / 2.0_f64.sqrt();
    let s1 = SectorSpec::simple(1, vec![1.0, 2.0, 3.0]).with_gauge(1.0);
    let s2 = SectorSpec::simple(2, vec![r, 2.0 * r, 3.0 * r]).with_gauge(2.0_f64.sqrt());
    let config = NetworkConfig {
        sectors: vec![s1, s2],
        lambda: None,
        transfers: None,
        reference: Some(1),
        states: vec![
            SectorState::real(1, &[(0, 1.0), (1, 1.0)], 1.0),
            SectorState::real(2, &[(0, 1.0), (1, 1.0)], 1.0),
        ],
        observation: Some(ObservationFunctional::real(&[
            (0, 0, 1.0),
            (1, 0, 1.0),
            (2, 0, 1.0),
        ])),
    };
    Fixture {
        name: "ex5",
        config,
        step: 0.1,
        order: 4,
    }
}

// ── Gauge-algebra pair ─────────────────────────────────────────────────────

/// Two sectors with spectra {1, 3} and {2, 6} tied by the scaling matrix
/// `λ = [[1, 2], [1/2, 1]]`: gauge recovery yields τ ∝ (1, 1/2) and the
/// rescaled spectra coincide. Network-only (no states).
pub fn example1() -> Fixture {
    let config = NetworkConfig {
        sectors: vec![
            SectorSpec::simple(1, vec![1.0, 3.0]),
            SectorSpec::simple(2, vec![2.0, 6.0]),
        ],
        lambda: Some(vec![vec![1.0, 2.0], vec![0.5, 1.0]]),
        transfers: None,
        reference: Some(1),
        states: vec![],
        observation: None,
    };
    Fixture {
        name: "example1",
        config,
        step: 0.1,
        order: 2,
    }
}

/// The same scaling data with sector 2's spectrum perturbed to {2, 5}:
/// the rescaled spectra no longer agree, so network verification fails.
pub fn example1_perturbed() -> Fixture {
    let mut fixture = example1();
    fixture.name = "example1-perturbed";
    fixture.config.sectors[1] = SectorSpec::simple(2, vec![2.0, 5.0]);
    fixture
}

// ── Degenerate demonstrations ──────────────────────────────────────────────

/// Two sectors with *identical* spectra {1, 2.5}: separation fails, and the
/// shared active rate collapses to a single untagged term with summed
/// amplitude 1 + 0.7. Suggested sampling: `h = 0.2`, order 1.
pub fn example3() -> Fixture {
    let config = NetworkConfig {
        sectors: vec![
            SectorSpec::simple(1, vec![1.0, 2.5]).with_gauge(1.0),
            SectorSpec::simple(2, vec![1.0, 2.5]).with_gauge(1.0),
        ],
        lambda: None,
        transfers: None,
        reference: Some(1),
        states: vec![
            SectorState::real(1, &[(0, 1.0)], 1.0),
            SectorState::real(2, &[(0, 0.7)], 1.0),
        ],
        observation: Some(ObservationFunctional::real(&[(0, 0, 1.0), (1, 0, 1.0)])),
    };
    Fixture {
        name: "example3",
        config,
        step: 0.2,
        order: 1,
    }
}

/// A single sector whose two active rates nearly collide (1 and 1 + gap):
/// conditioning degrades like the inverse cube of the gap as it closes.
pub fn example4_with_gap(gap: f64) -> Fixture {
    let config = NetworkConfig {
        sectors: vec![SectorSpec::simple(1, vec![1.0, 1.0 + gap]).with_gauge(1.0)],
        lambda: None,
        transfers: None,
        reference: Some(1),
        states: vec![SectorState::real(1, &[(0, 1.0), (1, 1.0)], 1.0)],
        observation: Some(ObservationFunctional::real(&[(0, 0, 1.0), (1, 0, 1.0)])),
    };
    Fixture {
        name: "example4",
        config,
        step: 0.1,
        order: 2,
    }
}

/// `example4_with_gap` at the default gap 0.1.
pub fn example4() -> Fixture {
    example4_with_gap(0.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::{collapse, sample_uniform};
    use crate::spectral::Tolerances;
    use approx::assert_abs_diff_eq;

    #[test]
    fn every_catalogued_name_resolves() {
        for &name in names() {
            let f = by_name(name).unwrap();
            assert_eq!(f.name, name);
            assert!(!f.config.sectors.is_empty());
        }
        assert!(by_name("nope").is_err());
    }

    #[test]
    fn interval_pair_synthesizes_the_frozen_window() {
        let f = ex6();
        let tol = Tolerances::default();
        let spec = f.config.build_mixture(&tol).unwrap();
        let model = collapse(&spec, &tol).unwrap();
        assert_eq!(model.len(), 3);
        let window = sample_uniform(&model, f.step, 2 * f.order).unwrap();
        let expected = [
            2.960_744_12,
            1.762_488_34,
            1.262_771_12,
            0.960_618_05,
            0.751_722_69,
            0.599_728_36,
        ];
        for (v, e) in window.values.iter().zip(expected) {
            assert_abs_diff_eq!(v.re, e, epsilon = 5e-9);
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn interleaved_pair_has_four_unit_terms() {
        let f = ex5();
        let tol = Tolerances::default();
        let spec = f.config.build_mixture(&tol).unwrap();
        let model = collapse(&spec, &tol).unwrap();
        assert_eq!(model.len(), 4);
        let r = 1.0 / 2.0_f64.sqrt();
        let expected = [r, 1.0, 2.0 * r, 2.0];
        for (term, e) in model.terms.iter().zip(expected) {
            assert_abs_diff_eq!(term.rate, e, epsilon = 1e-14);
            assert_abs_diff_eq!(term.amplitude.re, 1.0, epsilon = 1e-14);
        }
        // Tag sequence alternates sectors by increasing rate: 2, 1, 2, 1.
        let sectors: Vec<u32> = model.terms.iter().map(|t| t.tag.unwrap().sector).collect();
        assert_eq!(sectors, vec![2, 1, 2, 1]);
    }

    #[test]
    fn shared_spectrum_pair_merges_untagged() {
        let f = example3();
        let tol = Tolerances::default();
        let spec = f.config.build_mixture(&tol).unwrap();
        let model = collapse(&spec, &tol).unwrap();
        assert_eq!(model.len(), 1);
        assert_abs_diff_eq!(model.terms[0].amplitude.re, 1.7, epsilon = 1e-14);
        assert!(model.terms[0].tag.is_none());
    }

    #[test]
    fn near_collision_pair_narrows_with_the_gap_parameter() {
        let f = example4_with_gap(0.01);
        assert_abs_diff_eq!(
            f.config.sectors[0].eigenvalues[1] - f.config.sectors[0].eigenvalues[0],
            0.01,
            epsilon = 1e-15
        );
    }
}
