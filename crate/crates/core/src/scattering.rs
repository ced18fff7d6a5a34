//! Reflection and transmission by the N-period slab and the semi-infinite
//! medium.
//!
//! All `sin(Nk)/sin(k)` quotients are evaluated through the Chebyshev
//! recurrence in the discriminant, so band-edge values come out as the finite
//! limits they are.  The transmission amplitude multiplies `e^{i w x}` to the
//! right of the slab; the `e^{-i w N L}` factor that turns the raw boundary
//! match into that convention is applied explicitly.

use num_complex::Complex64;
use thiserror::Error;

use crate::potentials::PotentialSpec;
use crate::spectrum::{bloch_k, Band, EdgeKind, SpectrumError};
use crate::transfer::{chebyshev_u_pair, monodromy, transfer_over_slab, Frequency, TransferError};

/// Energy conservation tolerance for real frequencies.
pub const CONSERVATION_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ScatterError {
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("denominator degenerated numerically at omega = {0}")]
    NumericDegeneracy(Complex64),
    #[error("semi-infinite reflection routes disagree by {0:e}")]
    RouteMismatch(f64),
    #[error("band is clipped by the scan range; transparency points need true edges")]
    ClippedBand,
    #[error("band too narrow to resolve {0} transparency points")]
    Refinement(u32),
    #[error("transparency solve requires N >= 1 periods")]
    BadPeriodCount,
}

/// Reflection and transmission of the N-period slab at one frequency.
#[derive(Debug, Clone, Copy)]
pub struct ScatterResult {
    pub omega: Frequency,
    pub n: u32,
    pub r: Complex64,
    pub t: Complex64,
    /// `||r|^2 + |t|^2 - 1|` for real frequencies, NaN otherwise.
    pub conservation_defect: f64,
}

/// Reflection data of the semi-infinite medium.
#[derive(Debug, Clone, Copy)]
pub struct SemiInfiniteResult {
    pub omega: Frequency,
    pub r: Complex64,
    /// Matching coefficient of the transmitted Bloch wave, `c = 1 + r`.
    pub c: Complex64,
    pub m_plus: Complex64,
}

/// In-band frequency where the N-period slab is perfectly transparent.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct TransparencyPoint {
    pub omega: f64,
    pub band_index: usize,
    /// `|sin(N k)|` at the located root.
    pub residual: f64,
}

/// Least-squares decay rate of `|t_N|` across a gap.
#[derive(Debug, Clone, Copy)]
pub struct GapDecayFit {
    pub omega: f64,
    /// Fitted decay rate per period, `-d log|t_N| / dN`.
    pub sigma: f64,
    pub fit_residual: f64,
    /// Imaginary Bloch phase at the same frequency, the theoretical rate.
    pub im_k: f64,
}

/// Scattering coefficients from the slab transfer matrix.
///
/// With `T(0, NL) = [[a, b], [c, d]]` acting on scaled Cauchy data, matching
/// `e^{iwx} + r e^{-iwx}` on the left to `t e^{iwx}` on the right gives
/// `r = ((d - a) - i(b + c)) / ((a + d) + i(c - b))` and
/// `t = e^{-iwNL} (a(1 + r) + i b(1 - r))`.  The transmission is evaluated in
/// the equivalent form `t = 2 e^{-iwNL} / ((a + d) + i(c - b))`, which does
/// not cancel in deep gaps where the entries grow like `e^{sigma N}`.
pub fn scatter_direct(
    omega: Frequency,
    spec: &PotentialSpec,
    n: u32,
) -> Result<ScatterResult, ScatterError> {
    let t_mat = transfer_over_slab(omega, spec, n)?;
    // r and (up to the slab factor) t are ratios of linear combinations of
    // the entries; rescaling keeps the complex division inside f64 range even
    // when the entries grow like e^{sigma N} deep in a gap.
    let scale = t_mat.max_abs().max(1.0);
    let inv = 1.0 / scale;
    let (a, b, c, d) = (t_mat.a * inv, t_mat.b * inv, t_mat.c * inv, t_mat.d * inv);
    let i = Complex64::new(0.0, 1.0);

    let den = a + d + i * (c - b);
    if den.norm() < 1e-300 {
        return Err(ScatterError::NumericDegeneracy(omega.value()));
    }
    let r = (d - a - i * (b + c)) / den;

    let slab_len = n as f64 * spec.period;
    let phase = (-i * omega.value() * slab_len).exp();
    let t = (2.0 * inv) * phase / den;

    let conservation_defect = if omega.is_real() {
        (r.norm_sqr() + t.norm_sqr() - 1.0).abs()
    } else {
        f64::NAN
    };
    Ok(ScatterResult {
        omega,
        n,
        r,
        t,
        conservation_defect,
    })
}

/// Slab reflection coefficient from the one-period matrix:
/// `r_N = -U (alpha - delta + i(beta + gamma)) / (2 cos(Nk) + i U (gamma - beta))`
/// with `U = U_{N-1}(F)` and `2 cos(Nk) = 2 (F U_{N-1} - U_{N-2})`.
pub fn reflection_formula(
    omega: Frequency,
    spec: &PotentialSpec,
    n: u32,
) -> Result<Complex64, ScatterError> {
    let m = monodromy(omega, spec)?;
    let f = m.half_trace();
    let (u1, u2) = chebyshev_u_pair(f, n)?;
    let i = Complex64::new(0.0, 1.0);

    if u1.norm() == 0.0 {
        // U_{N-1}(F) = 0 is a transparency point; the numerator carries the
        // same factor, so the limit value is zero.
        return Ok(Complex64::new(0.0, 0.0));
    }
    // Divide numerator and denominator by U_{N-1}: the ratio U_{N-2}/U_{N-1}
    // stays O(1) where the Chebyshev values themselves grow huge.
    let q = u2 / u1;
    let numerator = -(m.a - m.d + i * (m.b + m.c));
    let den = 2.0 * (f - q) + i * (m.c - m.b);
    if den.norm() < 1e-300 {
        return Err(ScatterError::NumericDegeneracy(omega.value()));
    }
    Ok(numerator / den)
}

/// `|t_N|^2 = 4 / ((||M||^2 - 2) U_{N-1}(F)^2 + 4)` at a real frequency.
pub fn transmittance_formula(
    omega: f64,
    spec: &PotentialSpec,
    n: u32,
) -> Result<f64, ScatterError> {
    Ok(log_transmittance(omega, spec, n)?.exp())
}

/// `log |t_N|^2`, stable deep in gaps where the Chebyshev value overflows.
pub fn log_transmittance(omega: f64, spec: &PotentialSpec, n: u32) -> Result<f64, ScatterError> {
    let w = Frequency::real(omega)?;
    let m = monodromy(w, spec)?;
    let f = m.half_trace().re;
    let m2 = (m.hs_norm_sq() - 2.0).max(0.0);

    // ln of sinh(x) that never overflows.
    let ln_sinh = |x: f64| x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p();

    let ln_grow = if f.abs() > 1.0 + 1e-12 {
        // U_{N-1}(F) = +/- sinh(N kappa) / sinh(kappa), cosh(kappa) = |F|
        let kappa = f.abs().acosh();
        2.0 * (ln_sinh(n as f64 * kappa) - ln_sinh(kappa))
    } else {
        let (u1, _) = chebyshev_u_pair(Complex64::new(f, 0.0), n)?;
        2.0 * u1.norm().max(f64::MIN_POSITIVE).ln()
    };

    // log(4 / (m2 e^{ln_grow} + 4)) computed without forming the big product.
    let ln_m2u2 = if m2 > 0.0 {
        m2.ln() + ln_grow
    } else {
        f64::NEG_INFINITY
    };
    let ln4 = 4.0_f64.ln();
    let ln_den = if ln_m2u2 == f64::NEG_INFINITY {
        ln4
    } else if ln_m2u2 > ln4 {
        ln_m2u2 + (4.0 * (-ln_m2u2).exp()).ln_1p()
    } else {
        ln4 + ((ln_m2u2 - ln4).exp()).ln_1p()
    };
    Ok(ln4 - ln_den)
}

/// Reflection by the semi-infinite medium, evaluated two independent ways:
/// from the monodromy entries and the Bloch phase, and from the Weyl function
/// as `(i - m+) / (i + m+)`.  The routes must agree.
pub fn scatter_semi_infinite(
    omega: Frequency,
    spec: &PotentialSpec,
) -> Result<SemiInfiniteResult, ScatterError> {
    let m = monodromy(omega, spec)?;
    let sample = bloch_k(omega, spec)?;
    let mu = sample.mu();
    let i = Complex64::new(0.0, 1.0);
    let sin_k = (mu - 1.0 / mu) / (2.0 * i);

    let den = 2.0 * sin_k + (m.b - m.c);
    if den.norm() < 1e-300 {
        return Err(ScatterError::NumericDegeneracy(omega.value()));
    }
    let r_matrix = (m.b + m.c - i * (m.a - m.d)) / den;

    let (m_plus, _) = crate::spectrum::weyl_functions(omega, spec)?;
    let r_weyl = (i - m_plus) / (i + m_plus);

    let gap = (r_matrix - r_weyl).norm();
    if gap > 1e-9 * r_matrix.norm().max(1.0) {
        return Err(ScatterError::RouteMismatch(gap));
    }
    Ok(SemiInfiniteResult {
        omega,
        r: r_matrix,
        c: 1.0 + r_matrix,
        m_plus,
    })
}

/// All in-band frequencies of `band` where the N-period slab is transparent.
///
/// `sin(Nk) = 0` with `sin k != 0` is equivalent to `U_{N-1}(F) = 0`, i.e.
/// `F = cos(m pi / N)` for `m = 1 .. N-1`.  The discriminant is monotone
/// across a band, so each target is found by plain bisection in frequency.
pub fn transparency_points(
    spec: &PotentialSpec,
    band: &Band,
    n: u32,
) -> Result<Vec<TransparencyPoint>, ScatterError> {
    if n < 1 {
        return Err(ScatterError::BadPeriodCount);
    }
    if band.lo_class == EdgeKind::Clipped || band.hi_class == EdgeKind::Clipped {
        return Err(ScatterError::ClippedBand);
    }
    if n == 1 {
        return Ok(Vec::new());
    }
    if band.width() < 1e-11 * band.hi.abs().max(1.0) * n as f64 {
        return Err(ScatterError::Refinement(n));
    }

    let disc = |w: f64| -> Result<f64, ScatterError> {
        Ok(crate::spectrum::discriminant(Frequency::real(w)?, spec)?.re)
    };
    // Nudge just inside so the endpoint discriminants are strictly |F| <~ 1.
    let pad = 1e-12 * band.width().max(1e-6);
    let (w_lo, w_hi) = (band.lo + pad, band.hi - pad);
    let f_lo = disc(w_lo)?;
    let f_hi = disc(w_hi)?;

    let mut out = Vec::with_capacity(n as usize - 1);
    for m in 1..n {
        let target = (m as f64 * std::f64::consts::PI / n as f64).cos();
        if (target - f_lo) * (target - f_hi) > 0.0 {
            // Target not bracketed; the band does not reach this phase.
            continue;
        }
        let (mut lo, mut hi) = (w_lo, w_hi);
        let mut g_lo = f_lo - target;
        for _ in 0..200 {
            if hi - lo <= 1e-15 * hi.abs().max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let g_mid = disc(mid)? - target;
            if g_lo * g_mid <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                g_lo = g_mid;
            }
        }
        let w_star = 0.5 * (lo + hi);
        let f_star = disc(w_star)?;
        let (u1, _) = chebyshev_u_pair(Complex64::new(f_star, 0.0), n)?;
        let residual = u1.norm() * (1.0 - f_star * f_star).max(0.0).sqrt();
        out.push(TransparencyPoint {
            omega: w_star,
            band_index: band.index,
            residual,
        });
    }
    out.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    Ok(out)
}

/// Fit the per-period decay rate of `|t_N|` over the given slab lengths and
/// compare with the imaginary Bloch phase.
pub fn gap_decay_fit(
    spec: &PotentialSpec,
    omega: f64,
    n_list: &[u32],
) -> Result<GapDecayFit, ScatterError> {
    assert!(
        n_list.len() >= 2,
        "need at least two slab lengths to fit a slope"
    );
    let mut xs = Vec::with_capacity(n_list.len());
    let mut ys = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let log_t = 0.5 * log_transmittance(omega, spec, n)?;
        xs.push(n as f64);
        ys.push(log_t);
    }
    let len = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / len;
    let mean_y = ys.iter().sum::<f64>() / len;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let fit_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (slope * x + intercept)).abs())
        .fold(0.0_f64, f64::max);

    let im_k = bloch_k(Frequency::real(omega)?, spec)?.k.im;
    Ok(GapDecayFit {
        omega,
        sigma: -slope,
        fit_residual,
        im_k,
    })
}
