//! Exponential-sum reconstruction from uniform samples: Hankel assembly,
//! annihilating-polynomial solve, companion-matrix root finding with Newton
//! polish, node validation, and amplitude least squares.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{ExpTerm, ExponentialModel, SampleWindow, Tolerances};

// ── Parameters ─────────────────────────────────────────────────────────────

/// Node/amplitude parametrization of a sampled exponential sum:
/// `y_n = Σ amplitudes[ℓ] · nodes[ℓ]^n` with `nodes[ℓ] = e^(-rate·step)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PronyParameters {
    pub nodes: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    pub step: f64,
}

impl PronyParameters {
    pub fn from_model(model: &ExponentialModel, step: f64) -> Self {
        PronyParameters {
            nodes: model.nodes(step),
            amplitudes: model.amplitudes(),
            step,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Rates `-ln(node)/step`, in node order.
    pub fn rates(&self) -> Vec<f64> {
        self.nodes.iter().map(|z| -z.ln() / self.step).collect()
    }
}

// ── Annihilating polynomial ────────────────────────────────────────────────

/// Monic polynomial `z^L + c_{L-1} z^{L-1} + ... + c_0`;
/// `coefficients[k]` is `c_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PronyPolynomial {
    pub coefficients: Vec<Complex64>,
}

impl PronyPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }

    /// Expands `Π (z - node)` into monic coefficients.
    pub fn from_nodes(nodes: &[Complex64]) -> Self {
        let mut full = vec![Complex64::default(); nodes.len() + 1];
        full[0] = Complex64::ONE;
        for (deg, &r) in nodes.iter().enumerate() {
            for k in (0..=deg).rev() {
                let low = full[k];
                full[k + 1] += low;
                full[k] *= -r;
            }
        }
        // `full` is now low-to-high with leading coefficient 1.
        full.pop();
        PronyPolynomial { coefficients: full }
    }

    /// Value and derivative at `z` by a joint Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::ONE;
        let mut dp = Complex64::default();
        for &c in self.coefficients.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_with_derivative(z).0
    }
}

// ── Hankel assembly and solve ──────────────────────────────────────────────

/// Square sample Hankel matrix `H[r][s] = values[r + s]` of size `l`.
pub fn build_hankel(values: &[Complex64], l: usize) -> Result<DMatrix<Complex64>> {
    if l == 0 {
        return Err(Error::InvalidInput("Hankel order must be positive".into()));
    }
    if values.len() < 2 * l {
        return Err(Error::InsufficientSamples {
            needed: 2 * l,
            got: values.len(),
        });
    }
    Ok(DMatrix::from_fn(l, l, |r, s| values[r + s]))
}

/// Solves `H c = -values[l .. 2l]` for the annihilating polynomial after a
/// numerical-rank gate: the smallest singular value must exceed
/// `tol_rank` times the largest.
pub fn prony_polynomial(
    values: &[Complex64],
    l: usize,
    tol_rank: f64,
) -> Result<PronyPolynomial> {
    let h = build_hankel(values, l)?;
    let svd = h.svd(true, true);
    let (s_max, s_min) = svd
        .singular_values
        .iter()
        .fold((0.0_f64, f64::INFINITY), |(hi, lo), &s| {
            (hi.max(s), lo.min(s))
        });
    if s_max == 0.0 {
        return Err(Error::RankDeficientHankel {
            rank: 0,
            size: l,
            ratio: 0.0,
            tol: tol_rank,
        });
    }
    let ratio = s_min / s_max;
    if ratio <= tol_rank {
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > tol_rank * s_max)
            .count();
        return Err(Error::RankDeficientHankel {
            rank,
            size: l,
            ratio,
            tol: tol_rank,
        });
    }
    let rhs = DVector::from_fn(l, |r, _| -values[l + r]);
    // x = V Σ^{-1} U^H rhs, rank certified above.
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let mut proj = u.adjoint() * rhs;
    for (k, p) in proj.iter_mut().enumerate() {
        *p /= svd.singular_values[k];
    }
    let x = v_t.adjoint() * proj;
    Ok(PronyPolynomial {
        coefficients: x.iter().copied().collect(),
    })
}

/// Numerical rank of the order-`l_max` sample Hankel matrix: the count of
/// singular values above `tol_rank` times the largest.
pub fn estimate_order(window: &SampleWindow, l_max: usize, tol_rank: f64) -> Result<usize> {
    let h = build_hankel(&window.values, l_max)?;
    let sv = h.svd(false, false).singular_values;
    let s_max = sv.iter().fold(0.0_f64, |acc, &s| acc.max(s));
    if s_max == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol_rank * s_max).count())
}

// ── Root finding ───────────────────────────────────────────────────────────

/// Roots of the annihilating polynomial: companion-matrix QR iteration
/// followed by three Newton corrections, sorted by `(re, im)`.
pub fn solve_nodes(poly: &PronyPolynomial) -> Result<Vec<Complex64>> {
    let l = poly.degree();
    if l == 0 {
        return Err(Error::InvalidInput(
            "cannot solve an empty polynomial".into(),
        ));
    }
    if poly.coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::DegenerateParameters {
            reason: "non-finite polynomial coefficients".into(),
        });
    }
    let mut roots = if l == 1 {
        vec![-poly.coefficients[0]]
    } else {
        roots::eigenvalues(roots::companion(&poly.coefficients))
    };
    roots::polish(poly, &mut roots, 3);
    roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(roots)
}

mod roots {
    use super::*;

    /// Companion matrix of the monic polynomial (already Hessenberg).
    pub fn companion(coeffs: &[Complex64]) -> DMatrix<Complex64> {
        let l = coeffs.len();
        let mut m = DMatrix::zeros(l, l);
        for r in 1..l {
            m[(r, r - 1)] = Complex64::ONE;
        }
        for r in 0..l {
            m[(r, l - 1)] = -coeffs[r];
        }
        m
    }

    /// Shifted QR iteration on a complex Hessenberg matrix.
    pub fn eigenvalues(mut h: DMatrix<Complex64>) -> Vec<Complex64> {
        let n = h.nrows();
        let mut out = vec![Complex64::default(); n];
        if n == 0 {
            return out;
        }
        let mut hi = n; // active block occupies 0..hi
        let mut stagnation = 0usize;
        let mut budget = 120 * n;
        while hi > 0 {
            for k in 1..hi {
                let scale = h[(k - 1, k - 1)].norm() + h[(k, k)].norm();
                if h[(k, k - 1)].norm() <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
                    h[(k, k - 1)] = Complex64::default();
                }
            }
            if hi == 1 || h[(hi - 1, hi - 2)] == Complex64::default() {
                out[hi - 1] = h[(hi - 1, hi - 1)];
                hi -= 1;
                stagnation = 0;
                continue;
            }
            if budget == 0 {
                // Report the unconverged diagonal; the Newton polish and the
                // node validation downstream decide whether it is usable.
                for k in 0..hi {
                    out[k] = h[(k, k)];
                }
                log::warn!("QR iteration budget exhausted on a block of size {hi}");
                return out;
            }
            budget -= 1;
            let mut lo = hi - 1;
            while lo > 0 && h[(lo, lo - 1)] != Complex64::default() {
                lo -= 1;
            }
            stagnation += 1;
            let sigma = if stagnation % 12 == 0 {
                h[(hi - 1, hi - 1)] + Complex64::new(1.5 * h[(hi - 1, hi - 2)].norm(), 0.0)
            } else {
                wilkinson(&h, hi)
            };
            qr_step(&mut h, lo, hi, sigma);
        }
        out
    }

    /// Eigenvalue of the trailing 2x2 closest to its bottom-right entry.
    fn wilkinson(h: &DMatrix<Complex64>, hi: usize) -> Complex64 {
        let a = h[(hi - 2, hi - 2)];
        let b = h[(hi - 2, hi - 1)];
        let c = h[(hi - 1, hi - 2)];
        let d = h[(hi - 1, hi - 1)];
        let mid = (a + d) * 0.5;
        let off = (a - d) * 0.5;
        let s = (off * off + b * c).sqrt();
        if (mid + s - d).norm() <= (mid - s - d).norm() {
            mid + s
        } else {
            mid - s
        }
    }

    /// One explicit shifted QR sweep `H ← R Q + σI` on the block `lo..hi`,
    /// implemented with Givens rotations.
    fn qr_step(h: &mut DMatrix<Complex64>, lo: usize, hi: usize, sigma: Complex64) {
        for k in lo..hi {
            h[(k, k)] -= sigma;
        }
        let mut rots: Vec<(usize, Complex64, Complex64)> = Vec::with_capacity(hi - lo);
        for k in lo..hi - 1 {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let t = (x.norm_sqr() + y.norm_sqr()).sqrt();
            if t == 0.0 {
                rots.push((k, Complex64::ONE, Complex64::default()));
                continue;
            }
            let c = x / t;
            let s = y / t;
            for col in k..hi {
                let a = h[(k, col)];
                let b = h[(k + 1, col)];
                h[(k, col)] = c.conj() * a + s.conj() * b;
                h[(k + 1, col)] = -s * a + c * b;
            }
            rots.push((k, c, s));
        }
        for &(k, c, s) in &rots {
            let rmax = (k + 2).min(hi);
            for row in lo..rmax {
                let a = h[(row, k)];
                let b = h[(row, k + 1)];
                h[(row, k)] = a * c + b * s;
                h[(row, k + 1)] = -a * s.conj() + b * c.conj();
            }
        }
        for k in lo..hi {
            h[(k, k)] += sigma;
        }
    }

    /// A few Newton corrections per root; skipped where the derivative
    /// vanishes or the step degenerates.
    pub fn polish(poly: &PronyPolynomial, roots: &mut [Complex64], steps: usize) {
        for z in roots.iter_mut() {
            for _ in 0..steps {
                let (p, dp) = poly.eval_with_derivative(*z);
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                if !step.re.is_finite() || !step.im.is_finite() {
                    break;
                }
                *z -= step;
            }
        }
    }
}

// ── Node validation ────────────────────────────────────────────────────────

/// Converts decay nodes to rates `-ln(z)/h` after validating that every
/// node is real (imaginary part within `imag_rel` of the largest modulus)
/// and lies in the open interval (0, 1). Order is preserved.
pub fn nodes_to_rates(nodes: &[Complex64], h: f64, imag_rel: f64) -> Result<Vec<f64>> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidInput(format!("step {h} must be positive")));
    }
    let scale = nodes
        .iter()
        .fold(0.0_f64, |acc, z| acc.max(z.norm()))
        .max(f64::MIN_POSITIVE);
    let mut rates = Vec::with_capacity(nodes.len());
    for &z in nodes {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NodeOutOfRange {
                node: z,
                reason: "non-finite".into(),
            });
        }
        if z.im.abs() > imag_rel * scale {
            return Err(Error::NodeOutOfRange {
                node: z,
                reason: format!(
                    "imaginary part {:.3e} exceeds {:.3e}",
                    z.im.abs(),
                    imag_rel * scale
                ),
            });
        }
        if z.re <= 0.0 {
            return Err(Error::NodeOutOfRange {
                node: z,
                reason: "decay nodes must be positive".into(),
            });
        }
        if z.re > 1.0 - 1e-12 {
            return Err(Error::NodeOutOfRange {
                node: z,
                reason: "node at or beyond 1 encodes no decay".into(),
            });
        }
        rates.push(-z.re.ln() / h);
    }
    Ok(rates)
}

/// Validates moment nodes, which are the rates themselves: real and
/// positive, with no upper bound.
pub fn moment_nodes_to_rates(nodes: &[Complex64], imag_rel: f64) -> Result<Vec<f64>> {
    let scale = nodes
        .iter()
        .fold(0.0_f64, |acc, z| acc.max(z.norm()))
        .max(f64::MIN_POSITIVE);
    let mut rates = Vec::with_capacity(nodes.len());
    for &z in nodes {
        if z.im.abs() > imag_rel * scale {
            return Err(Error::NodeOutOfRange {
                node: z,
                reason: format!(
                    "imaginary part {:.3e} exceeds {:.3e}",
                    z.im.abs(),
                    imag_rel * scale
                ),
            });
        }
        if !z.re.is_finite() || z.re <= 0.0 {
            return Err(Error::NodeOutOfRange {
                node: z,
                reason: "rates must be positive".into(),
            });
        }
        rates.push(z.re);
    }
    Ok(rates)
}

// ── Amplitude solve ────────────────────────────────────────────────────────

/// Least-squares amplitudes over *all* samples: solves
/// `min ‖V a - values‖` with `V[n][ℓ] = nodes[ℓ]^n`. Amplitudes are
/// returned in node order.
pub fn solve_amplitudes(nodes: &[f64], values: &[Complex64]) -> Result<Vec<Complex64>> {
    let l = nodes.len();
    if l == 0 {
        return Err(Error::InvalidInput("no nodes".into()));
    }
    if values.len() < l {
        return Err(Error::InsufficientSamples {
            needed: l,
            got: values.len(),
        });
    }
    for (i, &zi) in nodes.iter().enumerate() {
        for &zj in nodes.iter().skip(i + 1) {
            if (zi - zj).abs() <= 1e-14 * zi.abs().max(zj.abs()).max(1.0) {
                return Err(Error::DegenerateParameters {
                    reason: format!("coincident nodes {zi} and {zj}"),
                });
            }
        }
    }
    let n = values.len();
    let mut v = DMatrix::zeros(n, l);
    for (col, &z) in nodes.iter().enumerate() {
        let mut p = 1.0_f64;
        for row in 0..n {
            v[(row, col)] = Complex64::new(p, 0.0);
            p *= z;
        }
    }
    let svd = v.svd(true, true);
    let (s_max, s_min) = svd
        .singular_values
        .iter()
        .fold((0.0_f64, f64::INFINITY), |(hi, lo), &s| {
            (hi.max(s), lo.min(s))
        });
    if s_min <= f64::EPSILON * s_max {
        return Err(Error::DegenerateParameters {
            reason: format!("Vandermonde system singular (σ ratio {:.3e})", s_min / s_max),
        });
    }
    if s_max / s_min > 1e12 {
        log::warn!(
            "amplitude system condition number {:.3e}; results may lose digits",
            s_max / s_min
        );
    }
    let rhs = DVector::from_column_slice(values);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let mut proj = u.adjoint() * rhs;
    for (k, p) in proj.iter_mut().enumerate() {
        *p /= svd.singular_values[k];
    }
    let a = v_t.adjoint() * proj;
    Ok(a.iter().copied().collect())
}

// ── End-to-end reconstruction ──────────────────────────────────────────────

/// Recovers an order-`l` exponential model from uniform samples:
/// polynomial solve, root finding, node validation, amplitude fit.
/// Terms come back sorted by increasing rate.
pub fn reconstruct(window: &SampleWindow, l: usize, tol: &Tolerances) -> Result<ExponentialModel> {
    let poly = prony_polynomial(&window.values, l, tol.rank)
        .map_err(|e| e.with_stage("polynomial"))?;
    let roots = solve_nodes(&poly).map_err(|e| e.with_stage("nodes"))?;
    let rates = nodes_to_rates(&roots, window.step, tol.imag_rel)
        .map_err(|e| e.with_stage("nodes"))?;
    let mut paired: Vec<(f64, f64)> = roots
        .iter()
        .map(|z| z.re)
        .zip(rates)
        .collect();
    // Ascending rate = descending node.
    paired.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let nodes: Vec<f64> = paired.iter().map(|p| p.0).collect();
    let amps = solve_amplitudes(&nodes, &window.values)
        .map_err(|e| e.with_stage("amplitudes"))?;
    let terms = paired
        .iter()
        .zip(amps)
        .map(|(&(_, rate), amp)| ExpTerm::new(rate, amp))
        .collect();
    Ok(ExponentialModel::from_terms(terms))
}

/// Moment-sequence variant: `moments[n] = Σ a_ℓ · μ_ℓ^n`, so the recovered
/// nodes *are* the rates. Terms come back sorted by increasing rate.
pub fn reconstruct_from_moments(
    moments: &[Complex64],
    l: usize,
    tol: &Tolerances,
) -> Result<ExponentialModel> {
    let poly =
        prony_polynomial(moments, l, tol.rank).map_err(|e| e.with_stage("polynomial"))?;
    let roots = solve_nodes(&poly).map_err(|e| e.with_stage("nodes"))?;
    let mut rates = moment_nodes_to_rates(&roots, tol.imag_rel)
        .map_err(|e| e.with_stage("nodes"))?;
    rates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let amps = solve_amplitudes(&rates, moments).map_err(|e| e.with_stage("amplitudes"))?;
    let terms = rates
        .into_iter()
        .zip(amps)
        .map(|(rate, amp)| ExpTerm::new(rate, amp))
        .collect();
    Ok(ExponentialModel::from_terms(terms))
}
