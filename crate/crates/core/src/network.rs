//! Gauge algebra of time-scaled networks: scaling families, gauge recovery,
//! cycle consistency, isospectral compatibility, canonical transfer-map
//! construction, and cocycle/intertwining verification.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{close, SectorSpec, TransferBlock, TransferMap};
use crate::wire;

// ── Scaling families ───────────────────────────────────────────────────────

/// Square matrix of pairwise time rescalings `λ_ij`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFamily {
    #[serde(with = "wire::real_matrix")]
    lambda: DMatrix<f64>,
}

impl ScalingFamily {
    /// Validates squareness, positivity and a unit diagonal.
    pub fn new(lambda: DMatrix<f64>) -> Result<Self> {
        if lambda.nrows() != lambda.ncols() || lambda.nrows() == 0 {
            return Err(Error::InvalidInput(format!(
                "scaling family must be square and non-empty, got {}x{}",
                lambda.nrows(),
                lambda.ncols()
            )));
        }
        for i in 0..lambda.nrows() {
            for j in 0..lambda.ncols() {
                let v = lambda[(i, j)];
                if !v.is_finite() || v <= 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "scaling entry ({i},{j}) = {v} not positive"
                    )));
                }
            }
            if (lambda[(i, i)] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "scaling diagonal entry ({i},{i}) = {} must be 1",
                    lambda[(i, i)]
                )));
            }
        }
        Ok(ScalingFamily { lambda })
    }

    /// Coboundary family `λ_ij = τ_i / τ_j` generated by gauges.
    pub fn from_gauges(taus: &[f64]) -> Result<Self> {
        if taus.iter().any(|&t| !t.is_finite() || t <= 0.0) {
            return Err(Error::InvalidInput("gauges must be positive".into()));
        }
        let n = taus.len();
        ScalingFamily::new(DMatrix::from_fn(n, n, |i, j| taus[i] / taus[j]))
    }

    pub fn len(&self) -> usize {
        self.lambda.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.nrows() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lambda[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.lambda
    }
}

/// Worst relative multiplicativity residual
/// `|λ_ij λ_jk - λ_ik| / λ_ik` over all index triples.
pub fn multiplicativity_residual(family: &ScalingFamily) -> f64 {
    let n = family.len();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let r = (family.get(i, j) * family.get(j, k) - family.get(i, k)).abs()
                    / family.get(i, k);
                worst = worst.max(r);
            }
        }
    }
    worst
}

/// Recovers gauges `τ_i = λ_{i,reference}` after certifying that the family
/// is a coboundary (multiplicativity within `tol`, relative).
pub fn recover_gauges(family: &ScalingFamily, reference: usize, tol: f64) -> Result<Vec<f64>> {
    let n = family.len();
    if reference >= n {
        return Err(Error::InvalidInput(format!(
            "reference index {reference} out of range for {n} sectors"
        )));
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let r = (family.get(i, j) * family.get(j, k) - family.get(i, k)).abs()
                    / family.get(i, k);
                if r > tol {
                    return Err(Error::MultiplicativityViolation {
                        i,
                        j,
                        k,
                        residual: r,
                        tol,
                    });
                }
            }
        }
    }
    Ok((0..n).map(|i| family.get(i, reference)).collect())
}

/// Product of scalings around a closed index cycle; 1 exactly for
/// coboundary families.
pub fn cycle_product(family: &ScalingFamily, cycle: &[usize]) -> Result<f64> {
    if cycle.len() < 2 {
        return Err(Error::InvalidCycle {
            reason: format!("cycle needs at least 2 vertices, got {}", cycle.len()),
        });
    }
    if cycle.first() != cycle.last() {
        return Err(Error::InvalidCycle {
            reason: "cycle must end where it starts".into(),
        });
    }
    if let Some(&v) = cycle.iter().find(|&&v| v >= family.len()) {
        return Err(Error::InvalidCycle {
            reason: format!("vertex {v} out of range for {} sectors", family.len()),
        });
    }
    Ok(cycle
        .windows(2)
        .map(|w| family.get(w[0], w[1]))
        .product())
}

// ── Isospectral compatibility ──────────────────────────────────────────────

/// Outcome of one pairwise spectrum comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairCheck {
    pub a: u32,
    pub b: u32,
    pub pass: bool,
    pub detail: String,
}

/// Result of checking that all rescaled spectra agree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsospectralReport {
    pub pass: bool,
    pub pairs: Vec<PairCheck>,
}

/// Checks that `τ_a · σ_a = τ_b · σ_b` (with multiplicities) for every
/// sector pair. All sectors must carry a gauge.
pub fn check_isospectral(sectors: &[SectorSpec], tol: f64) -> Result<IsospectralReport> {
    for s in sectors {
        if s.gauge.is_none() {
            return Err(Error::InvalidInput(format!(
                "sector {} has no gauge; recover gauges first",
                s.id
            )));
        }
    }
    let mut pairs = Vec::new();
    let mut pass = true;
    for (x, a) in sectors.iter().enumerate() {
        for b in sectors.iter().skip(x + 1) {
            let detail = compare_scaled(a, b, tol);
            let ok = detail.is_none();
            pass &= ok;
            pairs.push(PairCheck {
                a: a.id,
                b: b.id,
                pass: ok,
                detail: detail.unwrap_or_default(),
            });
        }
    }
    Ok(IsospectralReport { pass, pairs })
}

fn compare_scaled(a: &SectorSpec, b: &SectorSpec, tol: f64) -> Option<String> {
    let sa = a.scaled_spectrum().expect("gauge checked");
    let sb = b.scaled_spectrum().expect("gauge checked");
    if sa.len() != sb.len() {
        return Some(format!(
            "{} vs {} rescaled eigenvalues",
            sa.len(),
            sb.len()
        ));
    }
    for (k, (&x, &y)) in sa.iter().zip(&sb).enumerate() {
        if !close(x, y, tol) {
            return Some(format!(
                "rescaled eigenvalue {k}: {x:.12e} vs {y:.12e} (difference {:.3e})",
                (x - y).abs()
            ));
        }
        if a.multiplicities[k] != b.multiplicities[k] {
            return Some(format!(
                "multiplicity at rescaled eigenvalue {k}: {} vs {}",
                a.multiplicities[k], b.multiplicities[k]
            ));
        }
    }
    None
}

// ── Cocycle networks ───────────────────────────────────────────────────────

/// Sectors plus a complete family of transfer maps between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleNetwork {
    pub sectors: Vec<SectorSpec>,
    #[serde(with = "transfer_list")]
    pub transfers: BTreeMap<(u32, u32), TransferMap>,
}

/// Transfer maps serialize as a flat list; the `(to, from)` key is
/// rebuilt from the maps' own fields.
mod transfer_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<(u32, u32), TransferMap>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(m.len()))?;
        for map in m.values() {
            seq.serialize_element(map)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<(u32, u32), TransferMap>, D::Error> {
        let list = Vec::<TransferMap>::deserialize(d)?;
        Ok(list.into_iter().map(|t| ((t.to, t.from), t)).collect())
    }
}

impl CocycleNetwork {
    pub fn new(sectors: Vec<SectorSpec>, maps: impl IntoIterator<Item = TransferMap>) -> Self {
        let transfers = maps.into_iter().map(|t| ((t.to, t.from), t)).collect();
        CocycleNetwork { sectors, transfers }
    }

    pub fn sector(&self, id: u32) -> Option<&SectorSpec> {
        self.sectors.iter().find(|s| s.id == id)
    }

    /// Map sending states of sector `from` into sector `to`.
    pub fn transfer(&self, to: u32, from: u32) -> Option<&TransferMap> {
        self.transfers.get(&(to, from))
    }

    pub fn sector_ids(&self) -> Vec<u32> {
        self.sectors.iter().map(|s| s.id).collect()
    }

    /// Structural violations over sectors and transfer maps.
    pub fn validate(&self, tol: f64) -> Vec<String> {
        let mut issues: Vec<String> = self.sectors.iter().flat_map(SectorSpec::validate).collect();
        let mut seen = std::collections::BTreeSet::new();
        for s in &self.sectors {
            if !seen.insert(s.id) {
                issues.push(format!("duplicate sector id {}", s.id));
            }
        }
        for (&(to, from), map) in &self.transfers {
            if map.to != to || map.from != from {
                issues.push(format!(
                    "transfer keyed ({to},{from}) declares {}->{}",
                    map.from, map.to
                ));
                continue;
            }
            match (self.sector(from), self.sector(to)) {
                (Some(f), Some(t)) => issues.extend(map.validate(f, t, tol)),
                _ => issues.push(format!(
                    "transfer {}->{} references unknown sector",
                    from, to
                )),
            }
        }
        issues
    }
}

// ── Canonical construction ─────────────────────────────────────────────────

/// Builds the canonical transfer family from gauged sectors: eigenspaces are
/// matched through the shared rescaled spectrum and each block is
/// `V_to · V_from^H`, where `V_sector` comes from `unitaries` keyed by
/// `(sector id, rescaled-eigenvalue index)` (identity when absent).
pub fn build_canonical_cocycle(
    sectors: &[SectorSpec],
    unitaries: Option<&BTreeMap<(u32, usize), DMatrix<Complex64>>>,
    tol: f64,
) -> Result<CocycleNetwork> {
    if sectors.is_empty() {
        return Err(Error::InvalidInput("no sectors".into()));
    }
    let report = check_isospectral(sectors, tol)?;
    if let Some(bad) = report.pairs.iter().find(|p| !p.pass) {
        return Err(Error::SpectralMismatch {
            a: bad.a,
            b: bad.b,
            detail: bad.detail.clone(),
        });
    }
    let classes = sectors[0].eigenvalues.len();
    // Per sector: the unitary frame of each rescaled-eigenvalue class.
    let mut frames: Vec<Vec<DMatrix<Complex64>>> = Vec::with_capacity(sectors.len());
    for s in sectors {
        let mut per_class = Vec::with_capacity(classes);
        for a in 0..classes {
            let m = s.multiplicities[a];
            let v = match unitaries.and_then(|u| u.get(&(s.id, a))) {
                Some(v) => {
                    if v.nrows() != m || v.ncols() != m {
                        return Err(Error::InvalidInput(format!(
                            "unitary for (sector {}, class {a}) is {}x{}, expected {m}x{m}",
                            s.id,
                            v.nrows(),
                            v.ncols()
                        )));
                    }
                    let defect = (v.adjoint() * v - DMatrix::identity(m, m)).norm();
                    if defect > 1e-10 {
                        return Err(Error::InvalidInput(format!(
                            "frame for (sector {}, class {a}) is not unitary (defect {defect:.3e})",
                            s.id
                        )));
                    }
                    v.clone()
                }
                None => DMatrix::identity(m, m),
            };
            per_class.push(v);
        }
        frames.push(per_class);
    }
    let mut maps = Vec::new();
    for (x, to) in sectors.iter().enumerate() {
        for (y, from) in sectors.iter().enumerate() {
            let scaling = to.gauge.expect("gauge checked") / from.gauge.expect("gauge checked");
            let blocks = (0..classes)
                .map(|a| TransferBlock {
                    source_alpha: from.eigenvalues[a],
                    matrix: &frames[x][a] * frames[y][a].adjoint(),
                })
                .collect();
            maps.push(TransferMap {
                from: from.id,
                to: to.id,
                scaling,
                blocks,
            });
        }
    }
    Ok(CocycleNetwork::new(sectors.to_vec(), maps))
}

// ── Verification ───────────────────────────────────────────────────────────

/// Worst operator-norm residual of the composition law
/// `K_ik = K_ij ∘ K_jk` over all sector triples and eigenspace blocks.
pub fn cocycle_residual(net: &CocycleNetwork, tol_eig: f64) -> Result<f64> {
    let ids = net.sector_ids();
    let mut worst = 0.0_f64;
    for &i in &ids {
        for &j in &ids {
            for &k in &ids {
                let (kij, kjk, kik) = match (
                    net.transfer(i, j),
                    net.transfer(j, k),
                    net.transfer(i, k),
                ) {
                    (Some(a), Some(b), Some(c)) => (a, b, c),
                    _ => {
                        return Err(Error::InvalidInput(format!(
                            "transfer family incomplete on triple ({i},{j},{k})"
                        )))
                    }
                };
                for block in &kjk.blocks {
                    // K_jk sends α (units of k) to α / λ_jk (units of j).
                    let mid_alpha = block.source_alpha / kjk.scaling;
                    let left = kij.block_for(mid_alpha, tol_eig).ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "transfer {j}->{i} has no block at {mid_alpha}"
                        ))
                    })?;
                    let direct = kik.block_for(block.source_alpha, tol_eig).ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "transfer {k}->{i} has no block at {}",
                            block.source_alpha
                        ))
                    })?;
                    let diff = &left.matrix * &block.matrix - &direct.matrix;
                    worst = worst.max(operator_norm(&diff));
                }
            }
        }
    }
    Ok(worst)
}

/// Worst intertwining residual
/// `max_t |e^(-α_from t) - e^(-α_to λ t)| · ‖column‖`
/// over all transfers, blocks, and grid times. Eigenvalues are looked up in
/// the network's *current* sector lists, so spectral perturbations register.
pub fn intertwining_residual(net: &CocycleNetwork, t_grid: &[f64]) -> Result<f64> {
    if let Some(&t) = t_grid.iter().find(|&&t| t < 0.0) {
        return Err(Error::NegativeTime { t });
    }
    let mut worst = 0.0_f64;
    for map in net.transfers.values() {
        let from = net
            .sector(map.from)
            .ok_or_else(|| Error::InvalidInput(format!("unknown sector {}", map.from)))?;
        let to = net
            .sector(map.to)
            .ok_or_else(|| Error::InvalidInput(format!("unknown sector {}", map.to)))?;
        for block in &map.blocks {
            let (_, alpha_from) = from
                .nearest_eigenvalue(block.source_alpha)
                .ok_or_else(|| Error::InvalidInput(format!("sector {} empty", map.from)))?;
            let (_, alpha_to) = to
                .nearest_eigenvalue(block.source_alpha / map.scaling)
                .ok_or_else(|| Error::InvalidInput(format!("sector {} empty", map.to)))?;
            let col_norm = (0..block.matrix.ncols())
                .map(|c| block.matrix.column(c).norm())
                .fold(0.0_f64, f64::max);
            for &t in t_grid {
                let r = ((-alpha_from * t).exp() - (-alpha_to * map.scaling * t).exp()).abs();
                worst = worst.max(r * col_norm);
            }
        }
    }
    Ok(worst)
}

/// Pushes an eigenspace coefficient vector through a transfer map.
/// Returns the transported coefficients and the target eigenvalue
/// `α / λ` in the destination sector's units.
pub fn transport_eigenvector(
    map: &TransferMap,
    alpha: f64,
    coeffs: &[Complex64],
    tol_eig: f64,
) -> Result<(Vec<Complex64>, f64)> {
    let block = map
        .block_for(alpha, tol_eig)
        .ok_or(Error::UnknownEigenvalue {
            sector: map.from,
            alpha,
        })?;
    if coeffs.len() != block.matrix.ncols() {
        return Err(Error::InvalidInput(format!(
            "coefficient vector has {} entries, block at {} expects {}",
            coeffs.len(),
            block.source_alpha,
            block.matrix.ncols()
        )));
    }
    let v = nalgebra::DVector::from_column_slice(coeffs);
    let w = &block.matrix * v;
    Ok((w.iter().copied().collect(), block.source_alpha / map.scaling))
}

/// Largest singular value.
pub(crate) fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn two_sector_family() -> ScalingFamily {
        // λ = [[1, 2], [1/2, 1]] is the coboundary of τ = (1, 1/2).
        ScalingFamily::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.5, 1.0])).unwrap()
    }

    // ── Gauge recovery ─────────────────────────────────────────────────

    #[test]
    fn gauges_come_from_the_reference_column() {
        let fam = two_sector_family();
        let taus = recover_gauges(&fam, 0, 1e-9).unwrap();
        assert_eq!(taus, vec![1.0, 0.5]);
        // Same family, other reference: gauges rescale jointly.
        let taus1 = recover_gauges(&fam, 1, 1e-9).unwrap();
        assert_eq!(taus1, vec![2.0, 1.0]);
        assert_abs_diff_eq!(taus[0] / taus[1], taus1[0] / taus1[1], epsilon = 1e-15);
    }

    #[test]
    fn broken_multiplicativity_is_rejected_with_the_offending_triple() {
        let mut m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 4.0, 0.5, 1.0, 2.0, 0.25, 0.5, 1.0]);
        m[(0, 2)] = 4.0 * (1.0 + 1e-6);
        let fam = ScalingFamily::new(m).unwrap();
        match recover_gauges(&fam, 0, 1e-9) {
            Err(Error::MultiplicativityViolation { residual, .. }) => {
                assert!(residual > 1e-7, "residual {residual}");
            }
            other => panic!("expected multiplicativity violation, got {other:?}"),
        }
    }

    #[test]
    fn cycle_products_are_unity_for_coboundaries() {
        let fam = ScalingFamily::from_gauges(&[1.0, 0.5, 3.0, 0.25]).unwrap();
        let p = cycle_product(&fam, &[0, 2, 1, 3, 0]).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
        assert!(matches!(
            cycle_product(&fam, &[0, 1, 2]),
            Err(Error::InvalidCycle { .. })
        ));
        assert!(matches!(
            cycle_product(&fam, &[0]),
            Err(Error::InvalidCycle { .. })
        ));
    }

    // ── Isospectral checks ─────────────────────────────────────────────

    #[test]
    fn rescaled_spectra_must_agree() {
        let a = SectorSpec::simple(1, vec![1.0, 3.0]).with_gauge(1.0);
        let b = SectorSpec::simple(2, vec![2.0, 6.0]).with_gauge(0.5);
        let rep = check_isospectral(&[a.clone(), b], 1e-10).unwrap();
        assert!(rep.pass);
        let c = SectorSpec::simple(2, vec![2.0, 5.0]).with_gauge(0.5);
        let rep = check_isospectral(&[a, c], 1e-10).unwrap();
        assert!(!rep.pass);
        assert!(rep.pairs[0].detail.contains("rescaled eigenvalue"));
    }

    #[test]
    fn missing_gauge_is_a_validation_error() {
        let a = SectorSpec::simple(1, vec![1.0]);
        assert!(matches!(
            check_isospectral(&[a], 1e-10),
            Err(Error::InvalidInput(_))
        ));
    }

    // ── Canonical cocycle ──────────────────────────────────────────────

    fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
        let g = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let qr = g.qr();
        qr.q()
    }

    fn gauged_pair() -> Vec<SectorSpec> {
        vec![
            SectorSpec::new(1, vec![1.0, 2.0], vec![2, 1]).with_gauge(1.0),
            SectorSpec::new(2, vec![0.5, 1.0], vec![2, 1]).with_gauge(2.0),
        ]
    }

    #[test]
    fn canonical_family_satisfies_the_composition_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sectors = vec![
            SectorSpec::new(1, vec![1.0, 2.0], vec![2, 1]).with_gauge(1.0),
            SectorSpec::new(2, vec![0.5, 1.0], vec![2, 1]).with_gauge(2.0),
            SectorSpec::new(3, vec![3.0, 6.0], vec![2, 1]).with_gauge(1.0 / 3.0),
        ];
        let mut unitaries = BTreeMap::new();
        for s in &sectors {
            unitaries.insert((s.id, 0), random_unitary(&mut rng, 2));
            unitaries.insert((s.id, 1), random_unitary(&mut rng, 1));
        }
        let net = build_canonical_cocycle(&sectors, Some(&unitaries), 1e-10).unwrap();
        assert!(net.validate(1e-10).is_empty());
        let r = cocycle_residual(&net, 1e-10).unwrap();
        assert!(r <= 1e-12, "cocycle residual {r}");
        let t_grid: Vec<f64> = (0..5).map(|k| k as f64 * 0.25).collect();
        let ri = intertwining_residual(&net, &t_grid).unwrap();
        assert!(ri <= 1e-12, "intertwining residual {ri}");
    }

    #[test]
    fn canonical_construction_rejects_mismatched_spectra() {
        let sectors = vec![
            SectorSpec::simple(1, vec![1.0, 3.0]).with_gauge(1.0),
            SectorSpec::simple(2, vec![1.0, 3.5]).with_gauge(1.0),
        ];
        assert!(matches!(
            build_canonical_cocycle(&sectors, None, 1e-10),
            Err(Error::SpectralMismatch { .. })
        ));
    }

    #[test]
    fn non_unitary_frames_are_rejected() {
        let sectors = gauged_pair();
        let mut unitaries = BTreeMap::new();
        unitaries.insert(
            (1_u32, 0_usize),
            DMatrix::from_diagonal_element(2, 2, Complex64::new(2.0, 0.0)),
        );
        assert!(matches!(
            build_canonical_cocycle(&sectors, Some(&unitaries), 1e-10),
            Err(Error::InvalidInput(_))
        ));
    }

    // ── Intertwining and transport ─────────────────────────────────────

    #[test]
    fn spectral_perturbation_grows_the_intertwining_residual_linearly() {
        let sectors = gauged_pair();
        let mut net = build_canonical_cocycle(&sectors, None, 1e-10).unwrap();
        // Perturb one eigenvalue of sector 2 by δ.
        let delta = 1e-3;
        net.sectors[1].eigenvalues[0] = 0.5 * (1.0 + delta);
        let r_small = intertwining_residual(&net, &[0.1]).unwrap();
        let r_big = intertwining_residual(&net, &[0.2]).unwrap();
        assert!(r_small > 0.0);
        // Residual ≈ t · τ·δα · e^{-αλt}: doubles (to first order) with t.
        let ratio = r_big / r_small;
        assert!(
            (1.8..2.2).contains(&ratio),
            "expected near-linear growth, ratio {ratio}"
        );
    }

    #[test]
    fn transport_divides_the_eigenvalue_by_the_scaling() {
        let sectors = gauged_pair();
        let net = build_canonical_cocycle(&sectors, None, 1e-10).unwrap();
        // Sector 2 (gauge 2) into sector 1 (gauge 1): λ = 1/2, α: 0.5 → 1.0.
        let map = net.transfer(1, 2).unwrap();
        let v = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let (w, alpha) = transport_eigenvector(map, 0.5, &v, 1e-10).unwrap();
        assert_abs_diff_eq!(alpha, 1.0, epsilon = 1e-15);
        assert_eq!(w.len(), 2);
        assert_abs_diff_eq!(w[0].re, 1.0, epsilon = 1e-15);
        // Unknown eigenvalue is reported against the source sector.
        assert!(matches!(
            transport_eigenvector(map, 0.7, &v, 1e-10),
            Err(Error::UnknownEigenvalue { sector: 2, .. })
        ));
    }
}
