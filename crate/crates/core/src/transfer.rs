//! Propagator through the potential, monodromy matrix and its powers.
//!
//! Cauchy data is carried in the scaled form `(psi, psi'/omega)`, which makes
//! free propagation a pure rotation and gives every transfer matrix unit
//! determinant.  Powers of the monodromy matrix are evaluated through the
//! Chebyshev recurrence in the half-trace, which stays finite where the
//! textbook `sin(Nk)/sin(k)` quotient degenerates to 0/0 at band edges.

use num_complex::Complex64;
use thiserror::Error;

use crate::potentials::PotentialSpec;

/// Entry magnitude above which a computation is abandoned instead of running
/// into infinities.
pub const SCALE_LIMIT: f64 = 1e300;

/// Default relative tolerance of the adaptive integrator.  The determinant
/// of the propagator drifts by roughly one local error per step, so this is
/// kept two decades below the determinant budget of 1e-8.
pub const ODE_RTOL: f64 = 1e-12;
/// Default absolute tolerance of the adaptive integrator.
pub const ODE_ATOL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum TransferError {
    #[error("frequency must be nonzero")]
    ZeroFrequency,
    #[error("propagation distance must be nonnegative, got {0}")]
    NegativeDistance(f64),
    #[error("interval [{x0}, {x1}] is not inside [0, {period}] or reversed")]
    BadInterval { x0: f64, x1: f64, period: f64 },
    #[error("delta term at {0} lies inside the smooth integration interval")]
    DeltaInsideInterval(f64),
    #[error("integrator failed to reach tolerance; achieved error estimate {achieved:e}")]
    Accuracy { achieved: f64 },
    #[error("matrix entries exceeded {SCALE_LIMIT:e}; result would overflow")]
    ScaleExceeded,
    #[error("power count must be at least 1, got {0}")]
    BadPower(i64),
}

/// Complex angular frequency; nonzero by construction because the scaled
/// Cauchy data divides by it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequency(Complex64);

impl Frequency {
    pub fn new(omega: Complex64) -> Result<Self, TransferError> {
        if omega == Complex64::new(0.0, 0.0) || !omega.re.is_finite() || !omega.im.is_finite() {
            return Err(TransferError::ZeroFrequency);
        }
        Ok(Frequency(omega))
    }

    pub fn real(omega: f64) -> Result<Self, TransferError> {
        Self::new(Complex64::new(omega, 0.0))
    }

    pub fn complex(re: f64, im: f64) -> Result<Self, TransferError> {
        Self::new(Complex64::new(re, im))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    pub fn is_real(self) -> bool {
        self.0.im == 0.0
    }
}

/// Complex 2x2 transfer matrix `[[a, b], [c, d]]` with unit determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
        c: Complex64::new(0.0, 0.0),
        d: Complex64::new(1.0, 0.0),
    };

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 {
            a: Complex64::new(a, 0.0),
            b: Complex64::new(b, 0.0),
            c: Complex64::new(c, 0.0),
            d: Complex64::new(d, 0.0),
        }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn half_trace(&self) -> Complex64 {
        0.5 * self.trace()
    }

    /// Squared Hilbert-Schmidt norm, `|a|^2 + |b|^2 + |c|^2 + |d|^2`.
    pub fn hs_norm_sq(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()
    }

    /// Hilbert-Schmidt distance to another matrix.
    pub fn dist(&self, other: &Mat2) -> f64 {
        ((self.a - other.a).norm_sqr()
            + (self.b - other.b).norm_sqr()
            + (self.c - other.c).norm_sqr()
            + (self.d - other.d).norm_sqr())
        .sqrt()
    }

    pub fn neg(&self) -> Mat2 {
        Mat2 {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.a
            .norm()
            .max(self.b.norm())
            .max(self.c.norm())
            .max(self.d.norm())
    }

    pub fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Apply to a column vector `(top, bottom)`.
    pub fn apply(&self, top: Complex64, bottom: Complex64) -> (Complex64, Complex64) {
        (
            self.a * top + self.b * bottom,
            self.c * top + self.d * bottom,
        )
    }
}

impl std::ops::Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2 {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }
}

/// Squared Hilbert-Schmidt norm of a transfer matrix.
pub fn hs_norm_sq(m: &Mat2) -> f64 {
    m.hs_norm_sq()
}

/// Transfer matrix of the free medium over distance `d`:
/// `[[cos wd, sin wd], [-sin wd, cos wd]]`.
pub fn free_propagator(omega: Frequency, d: f64) -> Result<Mat2, TransferError> {
    if d < 0.0 || d.is_nan() {
        return Err(TransferError::NegativeDistance(d));
    }
    let phase = omega.value() * d;
    let (c, s) = (phase.cos(), phase.sin());
    Ok(Mat2::new(c, s, -s, c))
}

/// Jump of the scaled Cauchy data across a delta term:
/// `[[1, 0], [strength/omega, 1]]`.
pub fn delta_jump(omega: Frequency, strength: f64) -> Mat2 {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    Mat2::new(one, zero, strength / omega.value(), one)
}

// Dormand-Prince 5(4) coefficients.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th-order minus embedded 4th-order weights, for the error estimate.
const E1: f64 = 35.0 / 384.0 - 5179.0 / 57600.0;
const E3: f64 = 500.0 / 1113.0 - 7571.0 / 16695.0;
const E4: f64 = 125.0 / 192.0 - 393.0 / 640.0;
const E5: f64 = -2187.0 / 6784.0 - -92097.0 / 339200.0;
const E6: f64 = 11.0 / 84.0 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Clone, Copy)]
struct State {
    m: Mat2,
}

impl State {
    fn axpy(&self, h: f64, coeffs: &[(f64, &State)]) -> State {
        let mut out = self.m;
        for &(w, k) in coeffs {
            let s = h * w;
            out.a += s * k.m.a;
            out.b += s * k.m.b;
            out.c += s * k.m.c;
            out.d += s * k.m.d;
        }
        State { m: out }
    }
}

/// Right-hand side of the scaled first-order system: rows evolve as
/// `row1' = omega * row2`, `row2' = ((q - omega^2)/omega) * row1`.
fn deriv(omega: Complex64, q: f64, y: &State) -> State {
    let g = (q - omega * omega) / omega;
    State {
        m: Mat2 {
            a: omega * y.m.c,
            b: omega * y.m.d,
            c: g * y.m.a,
            d: g * y.m.b,
        },
    }
}

fn error_norm(err: &Mat2, y: &Mat2, ynew: &Mat2, rtol: f64, atol: f64) -> f64 {
    let comp = |e: Complex64, a: Complex64, b: Complex64| {
        let scale = atol + rtol * a.norm().max(b.norm());
        e.norm() / scale
    };
    let e = [
        comp(err.a, y.a, ynew.a),
        comp(err.b, y.b, ynew.b),
        comp(err.c, y.c, ynew.c),
        comp(err.d, y.d, ynew.d),
    ];
    (e.iter().map(|v| v * v).sum::<f64>() / 4.0).sqrt()
}

/// Integrate the propagator across `[x0, x1]` with potential `q(x)`.
fn integrate_segment(
    omega: Complex64,
    q: &dyn Fn(f64) -> f64,
    x0: f64,
    x1: f64,
    rtol: f64,
    atol: f64,
) -> Result<Mat2, TransferError> {
    let len = x1 - x0;
    if len == 0.0 {
        return Ok(Mat2::IDENTITY);
    }
    let mut y = State { m: Mat2::IDENTITY };
    let mut x = x0;

    // Initial step from the local rates.
    let g0 = ((q(x0) - (omega * omega).re.abs()) / omega.norm()).abs();
    let rate = omega.norm().max(g0).max(1.0);
    let mut h = (len / 8.0).min(0.5 / rate).max(len * 1e-12);

    let mut k1 = deriv(omega, q(x), &y);
    let max_steps = 200_000;
    let mut last_err = 0.0;
    for _ in 0..max_steps {
        if x >= x1 {
            return Ok(y.m);
        }
        if x + h > x1 {
            h = x1 - x;
        }

        let y2 = y.axpy(h, &[(A21, &k1)]);
        let k2 = deriv(omega, q(x + 0.2 * h), &y2);
        let y3 = y.axpy(h, &[(A31, &k1), (A32, &k2)]);
        let k3 = deriv(omega, q(x + 0.3 * h), &y3);
        let y4 = y.axpy(h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k4 = deriv(omega, q(x + 0.8 * h), &y4);
        let y5 = y.axpy(h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        let k5 = deriv(omega, q(x + 8.0 / 9.0 * h), &y5);
        let y6 = y.axpy(
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let k6 = deriv(omega, q(x + h), &y6);
        let ynew = y.axpy(h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = deriv(omega, q(x + h), &ynew);

        let err = State {
            m: Mat2::new(
                Complex64::default(),
                Complex64::default(),
                Complex64::default(),
                Complex64::default(),
            ),
        }
        .axpy(
            h,
            &[
                (E1, &k1),
                (E3, &k3),
                (E4, &k4),
                (E5, &k5),
                (E6, &k6),
                (E7, &k7),
            ],
        );
        let norm = error_norm(&err.m, &y.m, &ynew.m, rtol, atol);
        last_err = norm;

        if !ynew.m.is_finite() || ynew.m.max_abs() > SCALE_LIMIT {
            return Err(TransferError::ScaleExceeded);
        }

        if norm <= 1.0 {
            x += h;
            y = ynew;
            k1 = k7;
            let factor = if norm == 0.0 {
                5.0
            } else {
                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            h *= (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9);
            if h < len * 1e-14 {
                return Err(TransferError::Accuracy {
                    achieved: norm * rtol,
                });
            }
            k1 = deriv(omega, q(x), &y);
        }
    }
    Err(TransferError::Accuracy {
        achieved: last_err * rtol,
    })
}

/// Propagator across `[x0, x1]` through the smooth part of the potential,
/// integrated adaptively.  Piece boundaries and table knots are hard step
/// boundaries; the interval must not contain a delta offset in its interior.
pub fn smooth_propagator(
    omega: Frequency,
    spec: &PotentialSpec,
    x0: f64,
    x1: f64,
) -> Result<Mat2, TransferError> {
    smooth_propagator_tol(omega, spec, x0, x1, ODE_RTOL, ODE_ATOL)
}

pub fn smooth_propagator_tol(
    omega: Frequency,
    spec: &PotentialSpec,
    x0: f64,
    x1: f64,
    rtol: f64,
    atol: f64,
) -> Result<Mat2, TransferError> {
    if !(x0 <= x1 && x0 >= 0.0 && x1 <= spec.period) {
        return Err(TransferError::BadInterval {
            x0,
            x1,
            period: spec.period,
        });
    }
    for d in &spec.deltas {
        if d.offset > x0 && d.offset < x1 {
            return Err(TransferError::DeltaInsideInterval(d.offset));
        }
    }

    let mut cuts: Vec<f64> = vec![x0, x1];
    for piece in &spec.smooth {
        for &edge in &[piece.lo, piece.hi] {
            if edge > x0 && edge < x1 {
                cuts.push(edge);
            }
        }
        if let crate::potentials::Profile::Table { xs, .. } = &piece.profile {
            for &knot in xs {
                if knot > x0 && knot < x1 {
                    cuts.push(knot);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut total = Mat2::IDENTITY;
    for window in cuts.windows(2) {
        let (lo, hi) = (window[0], window[1]);
        let mid = 0.5 * (lo + hi);
        let piece = spec.smooth.iter().find(|p| p.contains(mid));
        let seg = match piece {
            None => free_propagator(omega, hi - lo)?,
            Some(p) => {
                let amp = spec.amplitude;
                let profile = p.profile.clone();
                integrate_segment(
                    omega.value(),
                    &|x| amp * profile.eval(x),
                    lo,
                    hi,
                    rtol,
                    atol,
                )?
            }
        };
        total = seg * total;
        if !total.is_finite() || total.max_abs() > SCALE_LIMIT {
            return Err(TransferError::ScaleExceeded);
        }
    }
    Ok(total)
}

fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-14 * a.abs().max(b.abs()).max(1.0)
}

/// Propagator through one full period: ordered product of delta jumps and
/// free/smooth segments across `[0, L]`.  A delta at offset 0 is applied
/// first, so the N-period slab carries deltas at `0, L, ..., (N-1)L`.
pub fn monodromy(omega: Frequency, spec: &PotentialSpec) -> Result<Mat2, TransferError> {
    let mut m = Mat2::IDENTITY;
    let mut x = 0.0;
    for d in &spec.deltas {
        if !nearly_equal(d.offset, x) && d.offset > x {
            m = propagate_between(omega, spec, x, d.offset)? * m;
            x = d.offset;
        }
        m = delta_jump(omega, spec.amplitude * d.strength) * m;
    }
    if x < spec.period {
        m = propagate_between(omega, spec, x, spec.period)? * m;
    }
    if !m.is_finite() || m.max_abs() > SCALE_LIMIT {
        return Err(TransferError::ScaleExceeded);
    }
    Ok(m)
}

/// Segment propagator that skips the integrator entirely when no smooth piece
/// overlaps the interval.
fn propagate_between(
    omega: Frequency,
    spec: &PotentialSpec,
    x0: f64,
    x1: f64,
) -> Result<Mat2, TransferError> {
    let touches_smooth =
        spec.amplitude != 0.0 && spec.smooth.iter().any(|p| p.lo < x1 && p.hi > x0);
    if touches_smooth {
        smooth_propagator(omega, spec, x0, x1)
    } else {
        free_propagator(omega, x1 - x0)
    }
}

/// Chebyshev values `(U_{n-1}(f), U_{n-2}(f))` from the recurrence
/// `p_{m+1} = 2f p_m - p_{m-1}`, `p_0 = 1`, `p_1 = 2f`.
pub fn chebyshev_u_pair(f: Complex64, n: u32) -> Result<(Complex64, Complex64), TransferError> {
    if n < 1 {
        return Err(TransferError::BadPower(n as i64));
    }
    let mut prev = Complex64::new(0.0, 0.0); // U_{-1}
    let mut cur = Complex64::new(1.0, 0.0); // U_0
    for _ in 1..n {
        let next = 2.0 * f * cur - prev;
        prev = cur;
        cur = next;
        if cur.norm() > SCALE_LIMIT {
            return Err(TransferError::ScaleExceeded);
        }
    }
    Ok((cur, prev))
}

/// `M^N` through the Chebyshev identity
/// `M^N = U_{N-1}(F) M - U_{N-2}(F) I`, with `F` the half-trace of `M`.
pub fn monodromy_power(m: &Mat2, f: Complex64, n: u32) -> Result<Mat2, TransferError> {
    let (u1, u2) = chebyshev_u_pair(f, n)?;
    let out = Mat2::new(u1 * m.a - u2, u1 * m.b, u1 * m.c, u1 * m.d - u2);
    if !out.is_finite() || out.max_abs() > SCALE_LIMIT {
        return Err(TransferError::ScaleExceeded);
    }
    Ok(out)
}

/// Transfer matrix over the `N`-period slab.
pub fn transfer_over_slab(
    omega: Frequency,
    spec: &PotentialSpec,
    n: u32,
) -> Result<Mat2, TransferError> {
    let m = monodromy(omega, spec)?;
    monodromy_power(&m, m.half_trace(), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{
        make_alternating_delta_comb, make_scaled_smooth, make_single_delta_comb, SmoothPiece,
    };
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn freq(w: f64) -> Frequency {
        Frequency::real(w).unwrap()
    }

    fn assert_mat_close(m: &Mat2, expect: &Mat2, tol: f64) {
        assert!(
            m.dist(expect) <= tol,
            "distance {} exceeds {tol}\n{m:?}\nvs\n{expect:?}",
            m.dist(expect)
        );
    }

    /// Closed-form propagator for a constant potential, used as an
    /// independent check on the integrator.
    fn constant_potential_propagator(omega: f64, v: f64, d: f64) -> Mat2 {
        if omega * omega > v {
            let kappa = (omega * omega - v).sqrt();
            Mat2::from_real(
                (kappa * d).cos(),
                omega / kappa * (kappa * d).sin(),
                -kappa / omega * (kappa * d).sin(),
                (kappa * d).cos(),
            )
        } else {
            let kappa = (v - omega * omega).sqrt();
            Mat2::from_real(
                (kappa * d).cosh(),
                omega / kappa * (kappa * d).sinh(),
                kappa / omega * (kappa * d).sinh(),
                (kappa * d).cosh(),
            )
        }
    }

    #[test]
    fn free_propagator_special_angles() {
        let half_turn = free_propagator(freq(PI), 1.0).unwrap();
        assert_mat_close(&half_turn, &Mat2::from_real(-1.0, 0.0, 0.0, -1.0), 1e-14);

        let ident = free_propagator(freq(1.0), 0.0).unwrap();
        assert_mat_close(&ident, &Mat2::IDENTITY, 0.0);

        let quarter = free_propagator(freq(PI / 2.0), 1.0).unwrap();
        assert_mat_close(&quarter, &Mat2::from_real(0.0, 1.0, -1.0, 0.0), 1e-14);
    }

    #[test]
    fn delta_jump_entries() {
        let j = delta_jump(freq(1.0), 2.0);
        assert_mat_close(&j, &Mat2::from_real(1.0, 0.0, 2.0, 1.0), 0.0);
        let none = delta_jump(freq(2.0), 0.0);
        assert_mat_close(&none, &Mat2::IDENTITY, 0.0);
    }

    #[test]
    fn rotation_jump_factors_match_printed_entries() {
        // free(w,l) and jump(w,+/-A) must reproduce the rotation and shear
        // factors entrywise, and so their four-factor product.
        let (a, l, w) = (7.0_f64, 0.8_f64, 1.7_f64);
        let (c, s) = ((w * l).cos(), (w * l).sin());
        let rot = Mat2::from_real(c, s, -s, c);
        let jump_plus = Mat2::from_real(1.0, 0.0, a / w, 1.0);
        let jump_minus = Mat2::from_real(1.0, 0.0, -a / w, 1.0);

        assert_mat_close(&free_propagator(freq(w), l).unwrap(), &rot, 1e-15);
        assert_mat_close(&delta_jump(freq(w), a), &jump_plus, 0.0);
        assert_mat_close(&delta_jump(freq(w), -a), &jump_minus, 0.0);

        let got = free_propagator(freq(w), l).unwrap()
            * delta_jump(freq(w), a)
            * free_propagator(freq(w), l).unwrap()
            * delta_jump(freq(w), -a);
        let expect = rot * jump_plus * rot * jump_minus;
        assert_mat_close(&got, &expect, 1e-13);
        assert_abs_diff_eq!(got.det().re, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(got.det().im, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn smooth_propagator_free_matches_rotation() {
        let spec =
            make_scaled_smooth(vec![SmoothPiece::constant(0.2, 0.4, 0.0)], 1.0, 1.0).unwrap();
        let got = smooth_propagator(freq(2.3), &spec, 0.0, 0.9).unwrap();
        let expect = free_propagator(freq(2.3), 0.9).unwrap();
        assert_mat_close(&got, &expect, 1e-9);
    }

    #[test]
    fn smooth_propagator_constant_trig_regime() {
        let (v, w, d) = (7.0, 3.0, 0.9);
        let spec = make_scaled_smooth(vec![SmoothPiece::constant(0.0, d, 1.0)], v, 1.0).unwrap();
        let got = smooth_propagator(freq(w), &spec, 0.0, d).unwrap();
        assert_mat_close(&got, &constant_potential_propagator(w, v, d), 1e-9);
    }

    #[test]
    fn smooth_propagator_constant_hyperbolic_regime() {
        let (v, w, d) = (30.0, 2.0, 0.7);
        let spec = make_scaled_smooth(vec![SmoothPiece::constant(0.0, d, 1.0)], v, 1.0).unwrap();
        let got = smooth_propagator(freq(w), &spec, 0.0, d).unwrap();
        assert_mat_close(&got, &constant_potential_propagator(w, v, d), 1e-8);
    }

    #[test]
    fn smooth_propagator_rejects_interior_delta() {
        let spec = make_single_delta_comb(5.0, 1.0).unwrap();
        // offset 0 is on the boundary, fine
        assert!(smooth_propagator(freq(1.0), &spec, 0.0, 0.5).is_ok());
        let mut shifted = spec.clone();
        shifted.deltas[0].offset = 0.3;
        assert!(matches!(
            smooth_propagator(freq(1.0), &shifted, 0.0, 0.5),
            Err(TransferError::DeltaInsideInterval(_))
        ));
    }

    #[test]
    fn monodromy_single_comb_closed_form() {
        let (a, l) = (10.0, 1.3);
        let spec = make_single_delta_comb(a, l).unwrap();
        for &w in &[0.7, 2.0, 5.1] {
            let m = monodromy(freq(w), &spec).unwrap();
            let (c, s) = ((w * l).cos(), (w * l).sin());
            let expect = Mat2::from_real(c + a / w * s, s, a / w * c - s, c);
            assert_mat_close(&m, &expect, 1e-12);
        }
    }

    #[test]
    fn monodromy_alternating_comb_is_identity_at_resonances() {
        let spec = make_alternating_delta_comb(50.0, 1.0).unwrap();
        for n in 1..=3 {
            let w = n as f64 * PI;
            let m = monodromy(freq(w), &spec).unwrap();
            assert!(m.dist(&Mat2::IDENTITY) < 1e-12, "n = {n}: {:?}", m);
        }
    }

    #[test]
    fn monodromy_free_medium_is_rotation() {
        let spec = crate::potentials::PotentialSpec::free(2.0).unwrap();
        let m = monodromy(freq(1.1), &spec).unwrap();
        assert_mat_close(&m, &free_propagator(freq(1.1), 2.0).unwrap(), 1e-14);
    }

    #[test]
    fn power_one_is_the_matrix_itself() {
        let spec = make_single_delta_comb(10.0, 1.0).unwrap();
        let m = monodromy(freq(2.0), &spec).unwrap();
        let p = monodromy_power(&m, m.half_trace(), 1).unwrap();
        assert_mat_close(&p, &m, 0.0);
        assert!(matches!(
            monodromy_power(&m, m.half_trace(), 0),
            Err(TransferError::BadPower(0))
        ));
    }

    #[test]
    fn power_two_matches_direct_square() {
        let spec = make_single_delta_comb(10.0, 1.0).unwrap();
        let m = monodromy(freq(2.0), &spec).unwrap();
        let p = monodromy_power(&m, m.half_trace(), 2).unwrap();
        assert_mat_close(&p, &(m * m), 1e-12 * (m * m).max_abs());
    }

    #[test]
    fn power_of_identity_stays_identity() {
        for n in [1u32, 5, 64] {
            let p = monodromy_power(&Mat2::IDENTITY, Complex64::new(1.0, 0.0), n).unwrap();
            assert_mat_close(&p, &Mat2::IDENTITY, 1e-13);
        }
    }

    #[test]
    fn slab_transfer_matches_repeated_product() {
        let spec = make_single_delta_comb(10.0, 1.0).unwrap();
        let m = monodromy(freq(2.0), &spec).unwrap();
        let direct = m * m * m;
        let slab = transfer_over_slab(freq(2.0), &spec, 3).unwrap();
        assert!(slab.dist(&direct) < 1e-10 * direct.max_abs().max(1.0));
    }

    #[test]
    fn slab_transfer_free_medium() {
        let spec = crate::potentials::PotentialSpec::free(1.0).unwrap();
        for n in [1u32, 4, 9] {
            let slab = transfer_over_slab(freq(1.7), &spec, n).unwrap();
            let expect = free_propagator(freq(1.7), n as f64).unwrap();
            assert_mat_close(&slab, &expect, 1e-11);
        }
    }

    #[test]
    fn hs_norm_examples() {
        assert_abs_diff_eq!(Mat2::IDENTITY.hs_norm_sq(), 2.0);
        assert_abs_diff_eq!(Mat2::from_real(2.0, 0.0, 0.0, 0.5).hs_norm_sq(), 4.25);
    }

    #[test]
    fn hs_norm_identity_under_powers() {
        // ||M^N||^2 - 2 = (||M||^2 - 2) U_{N-1}(F)^2 for real frequencies.
        let spec = make_single_delta_comb(8.0, 1.0).unwrap();
        for &w in &[1.1, 2.9, 3.05] {
            let m = monodromy(freq(w), &spec).unwrap();
            let f = m.half_trace();
            for n in [2u32, 5, 16] {
                let p = monodromy_power(&m, f, n).unwrap();
                let (u1, _) = chebyshev_u_pair(f, n).unwrap();
                let lhs = p.hs_norm_sq() - 2.0;
                let rhs = (m.hs_norm_sq() - 2.0) * u1.norm_sqr();
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-8 * rhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn unit_det_norm_lower_bound() {
        let spec = make_single_delta_comb(8.0, 1.0).unwrap();
        for i in 1..60 {
            let w = 0.2 * i as f64;
            let m = monodromy(freq(w), &spec).unwrap();
            assert!(m.hs_norm_sq() >= 2.0 - 1e-12);
            // (a-d)^2 + (b+c)^2 + 2 form of the same quantity
            let alt = (m.a - m.d).norm_sqr() + (m.b + m.c).norm_sqr() + 2.0;
            assert_abs_diff_eq!(m.hs_norm_sq(), alt, epsilon = 1e-9 * alt);
        }
    }

    #[test]
    fn determinant_stays_unit_on_random_grid() {
        let spec = make_scaled_smooth(
            vec![
                SmoothPiece::constant(0.1, 0.45, 1.0),
                SmoothPiece::constant(0.55, 0.9, -0.7),
            ],
            18.0,
            1.0,
        )
        .unwrap();
        for i in 1..40 {
            let w = 0.3 * i as f64;
            let m = monodromy(freq(w), &spec).unwrap();
            assert!(
                (m.det() - Complex64::new(1.0, 0.0)).norm() < 1e-9,
                "w = {w}"
            );
        }
    }

    #[test]
    fn composition_over_split_points() {
        let spec =
            make_scaled_smooth(vec![SmoothPiece::constant(0.0, 1.0, -1.0)], 12.0, 1.0).unwrap();
        let w = freq(2.7);
        for &mid in &[0.25, 0.5, 0.85] {
            let whole = smooth_propagator(w, &spec, 0.0, 1.0).unwrap();
            let first = smooth_propagator(w, &spec, 0.0, mid).unwrap();
            let second = smooth_propagator(w, &spec, mid, 1.0).unwrap();
            let composed = second * first;
            assert!(whole.dist(&composed) < 1e-8, "mid = {mid}");
        }
    }

    #[test]
    fn complex_frequency_supported_throughout() {
        let spec = make_single_delta_comb(10.0, 1.0).unwrap();
        let w = Frequency::complex(2.0, 0.3).unwrap();
        let m = monodromy(w, &spec).unwrap();
        assert!((m.det() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        let p = monodromy_power(&m, m.half_trace(), 6).unwrap();
        let direct = (0..6).fold(Mat2::IDENTITY, |acc, _| m * acc);
        assert!(p.dist(&direct) < 1e-9 * direct.max_abs().max(1.0));
    }

    #[test]
    fn trace_of_power_follows_bloch_phase() {
        // half-trace of M^N equals cos(N k) where cos k = F.
        let spec = make_single_delta_comb(10.0, 1.0).unwrap();
        for &w in &[3.0, 3.1, 6.1] {
            let m = monodromy(freq(w), &spec).unwrap();
            let f = m.half_trace();
            let k = f.acos();
            for n in [2u32, 7, 31] {
                let p = monodromy_power(&m, f, n).unwrap();
                let expect = (k * n as f64).cos();
                assert!(
                    (p.half_trace() - expect).norm() < 1e-8 * expect.norm().max(1.0),
                    "w={w} n={n}"
                );
            }
        }
    }

    #[test]
    fn zero_frequency_is_rejected() {
        assert!(Frequency::real(0.0).is_err());
        assert!(Frequency::complex(0.0, 0.0).is_err());
        assert!(Frequency::complex(0.0, 1e-3).is_ok());
    }
}
