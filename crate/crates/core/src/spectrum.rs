//! Floquet discriminant, Bloch dispersion, spectral bands and group velocity.
//!
//! The Bloch phase is selected by nudging a real frequency into the upper
//! half plane: there exactly one eigenvalue of the monodromy matrix lies
//! inside the unit circle, and the limit back to the real axis fixes the
//! branch without any arccos unwrapping.  Bands are the frequency intervals
//! where the discriminant has modulus at most one.

use num_complex::Complex64;
use thiserror::Error;

use crate::potentials::PotentialSpec;
use crate::transfer::{monodromy, Frequency, Mat2, TransferError};

/// `||F| - 1|` below this value counts as a band edge.
pub const EDGE_TOL: f64 = 1e-9;
/// Matrix distance to +/-I below which a monodromy matrix counts as scalar.
pub const MAT_TOL: f64 = 1e-6;
/// Relative factor for the derivative thresholds in edge classification.
pub const DERIV_REL_TOL: f64 = 1e-6;
/// Group velocity is refused within this margin of a band edge.
pub const INTERIOR_MARGIN: f64 = 1e-5;
/// Relative bisection tolerance for band edges.
pub const EDGE_BISECT_REL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error("frequency {omega} is not a band edge (||F|-1| = {dist:e})")]
    NotAnEdge { omega: f64, dist: f64 },
    #[error("edge classification diagnostics conflict at {omega}: |F'| = {f_prime:e}, |F''| = {f_double_prime:e}, dist to +/-I = {mat_dist:e}")]
    AmbiguousClassification {
        omega: f64,
        f_prime: f64,
        f_double_prime: f64,
        mat_dist: f64,
    },
    #[error("frequency {omega} too close to a band edge for group velocity (|F| = {f_abs})")]
    NearEdge { omega: f64, f_abs: f64 },
    #[error("frequency {omega} is not inside a band (|F| = {f_abs})")]
    NotInBand { omega: f64, f_abs: f64 },
    #[error("{0} is not a degenerate band edge")]
    NotDegenerate(f64),
    #[error("both Weyl representations are singular at this frequency")]
    EdgeSingularity,
    #[error("Weyl representations disagree by {0:e}")]
    WeylMismatch(f64),
    #[error("scan range must satisfy 0 < lo < hi with at least 2 grid points")]
    BadScanRange,
    #[error("branch selection did not stabilize at {0}")]
    BranchUnstable(f64),
}

/// Where a frequency sits relative to the band structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Band,
    Gap,
    Edge,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Band => write!(f, "band"),
            Regime::Gap => write!(f, "gap"),
            Regime::Edge => write!(f, "edge"),
        }
    }
}

/// One point of the dispersion relation with branch bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct DispersionSample {
    pub omega: Frequency,
    /// Floquet discriminant, the half-trace of the monodromy matrix.
    pub f: Complex64,
    /// Bloch phase per period, principal value of `-i log mu`.
    pub k: Complex64,
    pub regime: Regime,
}

impl DispersionSample {
    /// Selected monodromy eigenvalue `e^{ik}`.
    pub fn mu(&self) -> Complex64 {
        (Complex64::new(0.0, 1.0) * self.k).exp()
    }
}

/// Classification of one band edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Nondegenerate,
    Degenerate,
    /// The scan range cut the band here; not a spectral edge.
    Clipped,
}

impl std::fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EdgeKind::Nondegenerate => write!(f, "nondegenerate"),
            EdgeKind::Degenerate => write!(f, "degenerate"),
            EdgeKind::Clipped => write!(f, "clipped"),
        }
    }
}

/// A spectral band `[lo, hi]` found by scanning.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Band {
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
    pub lo_class: EdgeKind,
    pub hi_class: EdgeKind,
}

impl Band {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Band scan result; `under_resolved` lists intervals where found structure
/// was narrower than two grid cells, so similar structure may have been missed.
#[derive(Debug, Clone)]
pub struct BandScan {
    pub bands: Vec<Band>,
    pub under_resolved: Vec<(f64, f64)>,
}

/// Diagnostics of a band-edge classification.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct EdgeClassification {
    pub kind: EdgeKind,
    pub f_prime: f64,
    pub f_double_prime: f64,
    pub monodromy_dist_to_pm_identity: f64,
}

/// Group velocity sample strictly inside a band.
#[derive(Debug, Clone, Copy)]
pub struct GroupVelocitySample {
    pub omega: f64,
    pub k_prime: f64,
    pub v_g: f64,
}

/// Half-trace of the monodromy matrix.
pub fn discriminant(omega: Frequency, spec: &PotentialSpec) -> Result<Complex64, SpectrumError> {
    Ok(monodromy(omega, spec)?.half_trace())
}

fn quadratic_roots(f: Complex64) -> (Complex64, Complex64) {
    // mu^2 - 2 F mu + 1 = 0.  The larger root is formed without
    // cancellation; the smaller one is its reciprocal (the product is 1),
    // which stays accurate even for |F| in the thousands.
    let s = (f * f - Complex64::new(1.0, 0.0)).sqrt();
    let big = if (f + s).norm() >= (f - s).norm() {
        f + s
    } else {
        f - s
    };
    (big, Complex64::new(1.0, 0.0) / big)
}

fn small_root(f: Complex64) -> Complex64 {
    quadratic_roots(f).1
}

fn k_from_mu(mu: Complex64) -> Complex64 {
    -Complex64::new(0.0, 1.0) * mu.ln()
}

/// Bloch phase with the branch fixed by upper-half-plane continuation.
///
/// For `Im omega > 0` the root with `|mu| < 1` is selected directly.  For real
/// frequencies the discriminant is re-evaluated at `omega (1 + i eps)` with
/// `eps` descending until the selected root is stable, and the corresponding
/// root at the real frequency is taken.
pub fn bloch_k(omega: Frequency, spec: &PotentialSpec) -> Result<DispersionSample, SpectrumError> {
    let f = discriminant(omega, spec)?;

    if omega.im() != 0.0 {
        let mu = small_root(f);
        return Ok(DispersionSample {
            omega,
            f,
            k: k_from_mu(mu),
            regime: regime_of(f),
        });
    }

    if (f.norm() - 1.0).abs() <= EDGE_TOL && f.im.abs() <= EDGE_TOL {
        // Double root at +/-1; phase is a multiple of pi.
        let k = if f.re >= 0.0 {
            0.0
        } else {
            std::f64::consts::PI
        };
        return Ok(DispersionSample {
            omega,
            f,
            k: Complex64::new(k, 0.0),
            regime: Regime::Edge,
        });
    }

    let (r1, r2) = quadratic_roots(f);
    let mut chosen: Option<Complex64> = None;
    let mut prev_pick: Option<bool> = None;
    for eps_rel in [1e-4, 1e-6, 1e-8] {
        let nudged = Frequency::new(omega.value() * Complex64::new(1.0, eps_rel))
            .map_err(SpectrumError::Transfer)?;
        let f_eps = discriminant(nudged, spec)?;
        let mu_eps = small_root(f_eps);
        let pick_first = (mu_eps - r1).norm() <= (mu_eps - r2).norm();
        if prev_pick == Some(pick_first) {
            chosen = Some(if pick_first { r1 } else { r2 });
            break;
        }
        prev_pick = Some(pick_first);
        chosen = Some(if pick_first { r1 } else { r2 });
    }
    let mu = chosen.ok_or(SpectrumError::BranchUnstable(omega.re()))?;
    Ok(DispersionSample {
        omega,
        f,
        k: k_from_mu(mu),
        regime: regime_of(f),
    })
}

fn regime_of(f: Complex64) -> Regime {
    let m = f.norm();
    if (m - 1.0).abs() <= EDGE_TOL {
        Regime::Edge
    } else if m < 1.0 {
        Regime::Band
    } else {
        Regime::Gap
    }
}

/// Real discriminant at a real frequency.
fn disc_real(spec: &PotentialSpec, w: f64) -> Result<f64, SpectrumError> {
    Ok(discriminant(Frequency::real(w).map_err(SpectrumError::Transfer)?, spec)?.re)
}

/// `F'` and `F''` by central differences with one Richardson step.
fn disc_derivatives(spec: &PotentialSpec, w: f64, h0: f64) -> Result<(f64, f64), SpectrumError> {
    let d1 = |h: f64| -> Result<f64, SpectrumError> {
        Ok((disc_real(spec, w + h)? - disc_real(spec, w - h)?) / (2.0 * h))
    };
    let f0 = disc_real(spec, w)?;
    let d2 = |h: f64| -> Result<f64, SpectrumError> {
        Ok((disc_real(spec, w + h)? - 2.0 * f0 + disc_real(spec, w - h)?) / (h * h))
    };
    let fp = (4.0 * d1(h0 / 2.0)? - d1(h0)?) / 3.0;
    let fpp = (4.0 * d2(h0 / 2.0)? - d2(h0)?) / 3.0;
    Ok((fp, fpp))
}

/// Scan `[omega_lo, omega_hi]` for spectral bands.
///
/// The scanner marks sign changes of `|F| - 1` on a grid (densified near the
/// multiples of `pi/L`, where narrow bands of strong combs accumulate),
/// refines each bracket by bisection, and splits band intervals at interior
/// points where `F` touches +/-1 with zero slope, which are degenerate edges
/// shared by two bands.
pub fn find_bands(
    spec: &PotentialSpec,
    omega_lo: f64,
    omega_hi: f64,
    grid: usize,
) -> Result<BandScan, SpectrumError> {
    if !(omega_lo > 0.0 && omega_lo < omega_hi && grid >= 2) {
        return Err(SpectrumError::BadScanRange);
    }

    // Base grid plus clusters around n pi / L.
    let mut points: Vec<f64> = (0..=grid)
        .map(|i| omega_lo + (omega_hi - omega_lo) * i as f64 / grid as f64)
        .collect();
    let base_cell = (omega_hi - omega_lo) / grid as f64;
    let densify = (spec.amplitude.abs().ceil() as usize).max(16);
    let step = std::f64::consts::PI / spec.period;
    let mut center = (omega_lo / step).floor() * step;
    while center <= omega_hi + step {
        if center > omega_lo && center < omega_hi {
            for i in 0..=densify {
                let t = i as f64 / densify as f64;
                let off = (2.0 * t - 1.0) * base_cell;
                let w = center + off;
                if w > omega_lo && w < omega_hi {
                    points.push(w);
                }
            }
            points.push(center);
        }
        center += step;
    }
    points.sort_by(f64::total_cmp);
    points.dedup();

    let g: Vec<f64> = {
        let mut vals = Vec::with_capacity(points.len());
        for &w in &points {
            vals.push(disc_real(spec, w)?.abs() - 1.0);
        }
        vals
    };

    // Edges from sign changes of |F| - 1.  An exact zero at a grid point is
    // an edge only when the sign differs across it; a zero with negative
    // neighbors on both sides is a band-touch handled below.
    let mut edges: Vec<f64> = Vec::new();
    let mut i = 0;
    while i < points.len() {
        if g[i] == 0.0 {
            let start = i;
            while i < points.len() && g[i] == 0.0 {
                i += 1;
            }
            let left = if start > 0 { g[start - 1] } else { 0.0 };
            let right = if i < points.len() { g[i] } else { 0.0 };
            if left * right < 0.0 {
                edges.push(points[start]);
            }
            continue;
        }
        if i + 1 < points.len() && g[i + 1] != 0.0 && g[i] * g[i + 1] < 0.0 {
            edges.push(bisect_edge(spec, points[i], points[i + 1])?);
        }
        i += 1;
    }

    // Band intervals: between consecutive breakpoints where |F| < 1.
    let mut breaks = vec![omega_lo];
    breaks.extend(edges.iter().copied());
    breaks.push(omega_hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * a.abs().max(1.0));

    struct Interval {
        lo: f64,
        hi: f64,
        lo_clipped: bool,
        hi_clipped: bool,
    }
    let mut intervals: Vec<Interval> = Vec::new();
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo < 1e-13 * hi.abs().max(1.0) {
            continue;
        }
        // The midpoint of a symmetric scan can land exactly on a band touch
        // with |F| = 1, which still belongs to the band closure.
        let mid = 0.5 * (lo + hi);
        if disc_real(spec, mid)?.abs() <= 1.0 {
            intervals.push(Interval {
                lo,
                hi,
                lo_clipped: lo == omega_lo
                    && (disc_real(spec, omega_lo)?.abs() - 1.0).abs() > EDGE_TOL,
                hi_clipped: hi == omega_hi
                    && (disc_real(spec, omega_hi)?.abs() - 1.0).abs() > EDGE_TOL,
            });
        }
    }

    // Split intervals at interior degenerate touches: local maxima of |F|
    // that reach 1 with F' = 0.
    let mut bands: Vec<Band> = Vec::new();
    let mut under: Vec<(f64, f64)> = Vec::new();
    let mut index = 1;
    for iv in intervals {
        // The free medium has |F| = |cos wL| touching 1 at every multiple of
        // pi/L; report it as one band rather than a chain of touching bands.
        let touches = if spec.is_free() {
            Vec::new()
        } else {
            interior_touches(spec, iv.lo, iv.hi, base_cell)?
        };
        let mut cuts = vec![iv.lo];
        cuts.extend(touches.iter().copied());
        cuts.push(iv.hi);
        let n_parts = cuts.len() - 1;
        for (part, w) in cuts.windows(2).enumerate() {
            let lo_is_touch = part > 0;
            let hi_is_touch = part + 1 < n_parts;
            let lo_class = if lo_is_touch {
                EdgeKind::Degenerate
            } else if iv.lo_clipped {
                EdgeKind::Clipped
            } else {
                edge_kind(spec, w[0])?
            };
            let hi_class = if hi_is_touch {
                EdgeKind::Degenerate
            } else if iv.hi_clipped {
                EdgeKind::Clipped
            } else {
                edge_kind(spec, w[1])?
            };
            let band = Band {
                index,
                lo: w[0],
                hi: w[1],
                lo_class,
                hi_class,
            };
            if band.width() < 2.0 * base_cell {
                under.push((band.lo, band.hi));
            }
            bands.push(band);
            index += 1;
        }
    }
    Ok(BandScan {
        bands,
        under_resolved: under,
    })
}

fn bisect_edge(spec: &PotentialSpec, mut lo: f64, mut hi: f64) -> Result<f64, SpectrumError> {
    let mut g_lo = disc_real(spec, lo)?.abs() - 1.0;
    while hi - lo > EDGE_BISECT_REL * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        let g_mid = disc_real(spec, mid)?.abs() - 1.0;
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if g_lo * g_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            g_lo = g_mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Interior points of `(lo, hi)` where `|F|` touches 1 with zero slope.
fn interior_touches(
    spec: &PotentialSpec,
    lo: f64,
    hi: f64,
    cell: f64,
) -> Result<Vec<f64>, SpectrumError> {
    let n = (((hi - lo) / cell).ceil() as usize).clamp(8, 4096);
    let ws: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    let mut fs = Vec::with_capacity(ws.len());
    for &w in &ws {
        fs.push(disc_real(spec, w)?);
    }

    let mut found = Vec::new();
    for i in 1..ws.len() - 1 {
        let g_prev = fs[i - 1].abs();
        let g_here = fs[i].abs();
        let g_next = fs[i + 1].abs();
        if g_here >= g_prev && g_here >= g_next && g_here > 1.0 - 0.5 {
            // Candidate local maximum of |F|; refine on the slope of F.
            let sign = if fs[i] >= 0.0 { 1.0 } else { -1.0 };
            if let Some(w_star) = refine_extremum(spec, ws[i - 1], ws[i + 1], sign)? {
                let f_star = disc_real(spec, w_star)?;
                if (f_star.abs() - 1.0).abs() <= EDGE_TOL && w_star > lo && w_star < hi {
                    found.push(w_star);
                }
            }
        }
    }
    found.dedup_by(|a, b| (*a - *b).abs() < 1e-10 * a.abs().max(1.0));
    Ok(found)
}

/// Bisection on the slope of `sign * F` to locate the extremum.
fn refine_extremum(
    spec: &PotentialSpec,
    mut lo: f64,
    mut hi: f64,
    sign: f64,
) -> Result<Option<f64>, SpectrumError> {
    let slope = |w: f64| -> Result<f64, SpectrumError> {
        let h = 1e-7 * w.abs().max(1.0);
        Ok(sign * (disc_real(spec, w + h)? - disc_real(spec, w - h)?) / (2.0 * h))
    };
    let mut s_lo = slope(lo)?;
    let s_hi = slope(hi)?;
    if s_lo * s_hi > 0.0 {
        return Ok(None);
    }
    while hi - lo > 1e-13 * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        let s_mid = slope(mid)?;
        if s_mid == 0.0 {
            return Ok(Some(mid));
        }
        if s_lo * s_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            s_lo = s_mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

fn edge_kind(spec: &PotentialSpec, w: f64) -> Result<EdgeKind, SpectrumError> {
    Ok(classify_edge(spec, w)?.kind)
}

/// Classify a band edge as degenerate or not from the local behavior of the
/// discriminant and the distance of the monodromy matrix to +/-I.
pub fn classify_edge(
    spec: &PotentialSpec,
    omega_edge: f64,
) -> Result<EdgeClassification, SpectrumError> {
    let f0 = disc_real(spec, omega_edge)?;
    let dist_to_edge = (f0.abs() - 1.0).abs();
    if dist_to_edge > 1e3 * EDGE_TOL {
        return Err(SpectrumError::NotAnEdge {
            omega: omega_edge,
            dist: dist_to_edge,
        });
    }

    let h0 = 1e-4 * omega_edge.abs().max(1.0);
    let (fp, fpp) = disc_derivatives(spec, omega_edge, h0)?;

    let m = monodromy(
        Frequency::real(omega_edge).map_err(SpectrumError::Transfer)?,
        spec,
    )?;
    let mat_dist = m.dist(&Mat2::IDENTITY).min(m.dist(&Mat2::IDENTITY.neg()));

    // Threshold relative to the local scale of F'.
    let mut scale = fp.abs();
    for &probe in &[0.99, 1.01] {
        let (p, _) = disc_derivatives(spec, omega_edge * probe, h0)?;
        scale = scale.max(p.abs());
    }
    let tol_der = DERIV_REL_TOL * scale.max(1.0);

    let small_fp = fp.abs() < tol_der;
    let near_scalar = mat_dist < MAT_TOL;
    let big_fpp = fpp.abs() > tol_der;

    let kind = match (small_fp, near_scalar, big_fpp) {
        (true, true, true) => EdgeKind::Degenerate,
        (false, false, _) => EdgeKind::Nondegenerate,
        _ => {
            return Err(SpectrumError::AmbiguousClassification {
                omega: omega_edge,
                f_prime: fp.abs(),
                f_double_prime: fpp.abs(),
                mat_dist,
            })
        }
    };
    Ok(EdgeClassification {
        kind,
        f_prime: fp,
        f_double_prime: fpp,
        monodromy_dist_to_pm_identity: mat_dist,
    })
}

/// Group velocity `V_g = L / k'` strictly inside a band, with
/// `|k'| = |F'| / sqrt(1 - F^2)` and the sign taken from the branch.
pub fn group_velocity(
    omega: f64,
    spec: &PotentialSpec,
) -> Result<GroupVelocitySample, SpectrumError> {
    let f = disc_real(spec, omega)?;
    if f.abs() >= 1.0 - INTERIOR_MARGIN {
        return Err(SpectrumError::NearEdge {
            omega,
            f_abs: f.abs(),
        });
    }
    let h0 = 1e-4 * omega.abs().max(1.0);
    let (fp, _) = disc_derivatives(spec, omega, h0)?;
    let magnitude = fp.abs() / (1.0 - f * f).sqrt();

    // Branch sign from the continuous Bloch phase.
    let hs = 1e-5 * omega.abs().max(1.0);
    let k_plus = bloch_k(
        Frequency::real(omega + hs).map_err(SpectrumError::Transfer)?,
        spec,
    )?
    .k
    .re;
    let k_minus = bloch_k(
        Frequency::real(omega - hs).map_err(SpectrumError::Transfer)?,
        spec,
    )?
    .k
    .re;
    let sign = if k_plus >= k_minus { 1.0 } else { -1.0 };

    let k_prime = sign * magnitude;
    Ok(GroupVelocitySample {
        omega,
        k_prime,
        v_g: spec.period / k_prime,
    })
}

/// Group velocity at a degenerate band edge, `L / sqrt(|F''|)`.
pub fn degenerate_edge_velocity(spec: &PotentialSpec, omega0: f64) -> Result<f64, SpectrumError> {
    let class = classify_edge(spec, omega0)?;
    if class.kind != EdgeKind::Degenerate {
        return Err(SpectrumError::NotDegenerate(omega0));
    }
    Ok(spec.period / class.f_double_prime.abs().sqrt())
}

/// Weyl functions `m+` and `m-`: second components of the monodromy
/// eigenvectors normalized to first component one.  Both matrix
/// representations are evaluated and cross-checked when defined.
pub fn weyl_functions(
    omega: Frequency,
    spec: &PotentialSpec,
) -> Result<(Complex64, Complex64), SpectrumError> {
    let m = monodromy(omega, spec)?;
    let sample = bloch_k(omega, spec)?;
    let mu_plus = sample.mu();
    let mu_minus = Complex64::new(1.0, 0.0) / mu_plus;

    let scale = m.max_abs().max(1.0);
    let m_of = |e: Complex64| -> Result<Complex64, SpectrumError> {
        let beta_ok = m.b.norm() > 1e-12 * scale;
        let gamma_den = e - m.d;
        let gamma_ok = gamma_den.norm() > 1e-12 * scale;
        match (beta_ok, gamma_ok) {
            (true, true) => {
                let via_beta = (e - m.a) / m.b;
                let via_gamma = m.c / gamma_den;
                let gap = (via_beta - via_gamma).norm();
                if gap > 1e-8 * via_beta.norm().max(1.0) {
                    return Err(SpectrumError::WeylMismatch(gap));
                }
                Ok(via_beta)
            }
            (true, false) => Ok((e - m.a) / m.b),
            (false, true) => Ok(m.c / gamma_den),
            (false, false) => Err(SpectrumError::EdgeSingularity),
        }
    };
    Ok((m_of(mu_plus)?, m_of(mu_minus)?))
}
