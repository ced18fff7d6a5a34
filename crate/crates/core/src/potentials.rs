//! One-period potential profiles and their truncations.
//!
//! A [`PotentialSpec`] describes one period of `q(x)`: a list of delta terms,
//! a list of piecewise-smooth parts, and a common amplitude that scales all
//! of them.  Keeping the amplitude as an explicit field lets amplitude sweeps
//! reuse a single spec.  Delta terms are stored exactly; only the time-domain
//! solver ever puts them on a grid.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("period must be positive and finite, got {0}")]
    BadPeriod(f64),
    #[error("amplitude must be finite, got {0}")]
    BadAmplitude(f64),
    #[error("amplitude must be nonzero for this profile")]
    ZeroAmplitude,
    #[error("delta offset {offset} outside [0, {period})")]
    DeltaOffsetOutOfRange { offset: f64, period: f64 },
    #[error("delta offsets must be strictly increasing")]
    DeltaOffsetsNotIncreasing,
    #[error("delta strength must be finite and nonzero, got {0}")]
    BadDeltaStrength(f64),
    #[error("smooth piece [{lo}, {hi}] is empty or outside [0, {period}]")]
    BadPieceInterval { lo: f64, hi: f64, period: f64 },
    #[error("smooth pieces [{0}, {1}] and [{2}, {3}] overlap")]
    OverlappingPieces(f64, f64, f64, f64),
    #[error("profile is not finite on its interval")]
    NonFiniteProfile,
    #[error("table profile needs at least two strictly increasing knots")]
    BadTable,
    #[error("position {x} outside [0, {period}]")]
    OutOfDomain { x: f64, period: f64 },
    #[error("truncation count must be at least 1")]
    BadTruncation,
    #[error("spec JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// A term `strength * delta(x - offset)` within one period.
///
/// The stored strength is the unscaled coefficient; the effective strength is
/// `spec.amplitude * strength`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaTerm {
    pub offset: f64,
    pub strength: f64,
}

/// Evaluable profile of a smooth piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Profile {
    Const {
        value: f64,
    },
    /// Polynomial in the absolute coordinate x, `coeffs[i] * x^i`.
    Poly {
        coeffs: Vec<f64>,
    },
    /// Piecewise-linear interpolation through `(xs[i], ys[i])`; clamped
    /// outside the knot range.
    Table {
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Const { value } => *value,
            Profile::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
            Profile::Table { xs, ys } => {
                if xs.is_empty() {
                    return 0.0;
                }
                if x <= xs[0] {
                    return ys[0];
                }
                if x >= xs[xs.len() - 1] {
                    return ys[ys.len() - 1];
                }
                let j = xs.partition_point(|&knot| knot <= x);
                let (x0, x1) = (xs[j - 1], xs[j]);
                let (y0, y1) = (ys[j - 1], ys[j]);
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }

    fn validate(&self) -> Result<(), SpecError> {
        if let Profile::Table { xs, ys } = self {
            if xs.len() < 2 || xs.len() != ys.len() {
                return Err(SpecError::BadTable);
            }
            if xs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(SpecError::BadTable);
            }
            if ys.iter().any(|y| !y.is_finite()) {
                return Err(SpecError::NonFiniteProfile);
            }
        }
        Ok(())
    }
}

/// A smooth part of the potential on `[lo, hi]`, unscaled by the amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothPiece {
    pub lo: f64,
    pub hi: f64,
    pub profile: Profile,
}

impl SmoothPiece {
    pub fn constant(lo: f64, hi: f64, value: f64) -> Self {
        SmoothPiece {
            lo,
            hi,
            profile: Profile::Const { value },
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Number of periods kept by the truncation `q_N = q` on `[0, NL]`, `0` outside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation(u32);

impl Truncation {
    pub fn new(n: u32) -> Result<Self, SpecError> {
        if n < 1 {
            return Err(SpecError::BadTruncation);
        }
        Ok(Truncation(n))
    }

    pub fn count(self) -> u32 {
        self.0
    }
}

/// One period of the potential: `q(x) = amplitude * (smooth parts + delta terms)`.
///
/// Immutable after construction; a spec with no deltas and no smooth pieces is
/// the free medium `q = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub period: f64,
    pub amplitude: f64,
    #[serde(default)]
    pub deltas: Vec<DeltaTerm>,
    #[serde(default)]
    pub smooth: Vec<SmoothPiece>,
}

impl PotentialSpec {
    /// Free medium `q = 0` with the given period.
    pub fn free(period: f64) -> Result<Self, SpecError> {
        let spec = PotentialSpec {
            period,
            amplitude: 1.0,
            deltas: Vec::new(),
            smooth: Vec::new(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Same potential profile with a different overall amplitude.
    pub fn with_amplitude(&self, amplitude: f64) -> Result<Self, SpecError> {
        let spec = PotentialSpec {
            amplitude,
            ..self.clone()
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let spec: PotentialSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(SpecError::BadPeriod(self.period));
        }
        if !self.amplitude.is_finite() {
            return Err(SpecError::BadAmplitude(self.amplitude));
        }
        for d in &self.deltas {
            if !(0.0..self.period).contains(&d.offset) {
                return Err(SpecError::DeltaOffsetOutOfRange {
                    offset: d.offset,
                    period: self.period,
                });
            }
            if !d.strength.is_finite() || d.strength == 0.0 {
                return Err(SpecError::BadDeltaStrength(d.strength));
            }
        }
        if self.deltas.windows(2).any(|w| w[0].offset >= w[1].offset) {
            return Err(SpecError::DeltaOffsetsNotIncreasing);
        }
        let mut prev_hi = f64::NEG_INFINITY;
        let mut prev: Option<&SmoothPiece> = None;
        let mut sorted: Vec<&SmoothPiece> = self.smooth.iter().collect();
        sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for piece in sorted {
            if !(piece.lo < piece.hi && piece.lo >= 0.0 && piece.hi <= self.period) {
                return Err(SpecError::BadPieceInterval {
                    lo: piece.lo,
                    hi: piece.hi,
                    period: self.period,
                });
            }
            if piece.lo < prev_hi {
                let p = prev.unwrap();
                return Err(SpecError::OverlappingPieces(p.lo, p.hi, piece.lo, piece.hi));
            }
            piece.profile.validate()?;
            for &x in &[piece.lo, 0.5 * (piece.lo + piece.hi), piece.hi] {
                if !piece.profile.eval(x).is_finite() {
                    return Err(SpecError::NonFiniteProfile);
                }
            }
            prev_hi = piece.hi;
            prev = Some(piece);
        }
        Ok(())
    }

    /// True when the potential is identically zero.
    pub fn is_free(&self) -> bool {
        (self.deltas.is_empty() && self.smooth.is_empty()) || self.amplitude == 0.0
    }

    /// Delta terms with the amplitude folded in: `(offset, amplitude * strength)`.
    pub fn scaled_deltas(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.deltas
            .iter()
            .map(|d| (d.offset, self.amplitude * d.strength))
    }

    /// Largest unscaled smooth value over the pieces, for step-size heuristics.
    pub fn smooth_scale(&self) -> f64 {
        let mut scale = 0.0_f64;
        for piece in &self.smooth {
            for i in 0..=8 {
                let x = piece.lo + (piece.hi - piece.lo) * i as f64 / 8.0;
                scale = scale.max(piece.profile.eval(x).abs());
            }
        }
        scale * self.amplitude.abs()
    }

    /// Positions and effective strengths of all deltas of the `N`-period
    /// truncation, in increasing order.
    pub fn truncated_deltas(&self, trunc: Truncation) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.deltas.len() * trunc.count() as usize);
        for n in 0..trunc.count() {
            let shift = n as f64 * self.period;
            for (offset, strength) in self.scaled_deltas() {
                out.push((shift + offset, strength));
            }
        }
        out
    }

    /// Smooth part of the truncated potential at absolute position `x`:
    /// the periodic extension on `[0, NL]`, zero outside.
    pub fn truncated_smooth_value(&self, trunc: Truncation, x: f64) -> f64 {
        let total = trunc.count() as f64 * self.period;
        if x < 0.0 || x > total {
            return 0.0;
        }
        let mut local = x % self.period;
        if x == total {
            local = self.period;
        }
        evaluate_smooth(self, local).unwrap_or(0.0)
    }
}

/// A comb with one delta of strength `a` per period of length `l`.
pub fn make_single_delta_comb(a: f64, l: f64) -> Result<PotentialSpec, SpecError> {
    if a == 0.0 {
        return Err(SpecError::ZeroAmplitude);
    }
    let spec = PotentialSpec {
        period: l,
        amplitude: a,
        deltas: vec![DeltaTerm {
            offset: 0.0,
            strength: 1.0,
        }],
        smooth: Vec::new(),
    };
    spec.validate()?;
    Ok(spec)
}

/// A comb alternating `+a` and `-a` deltas a half period apart: period `2l`,
/// `+a` at offset 0 and `-a` at offset `l`.
pub fn make_alternating_delta_comb(a: f64, l: f64) -> Result<PotentialSpec, SpecError> {
    if a == 0.0 {
        return Err(SpecError::ZeroAmplitude);
    }
    let spec = PotentialSpec {
        period: 2.0 * l,
        amplitude: a,
        deltas: vec![
            DeltaTerm {
                offset: 0.0,
                strength: 1.0,
            },
            DeltaTerm {
                offset: l,
                strength: -1.0,
            },
        ],
        smooth: Vec::new(),
    };
    spec.validate()?;
    Ok(spec)
}

/// A purely smooth potential `a * v(x)` from non-overlapping pieces.
pub fn make_scaled_smooth(
    pieces: Vec<SmoothPiece>,
    a: f64,
    l: f64,
) -> Result<PotentialSpec, SpecError> {
    if a == 0.0 {
        return Err(SpecError::ZeroAmplitude);
    }
    let spec = PotentialSpec {
        period: l,
        amplitude: a,
        deltas: Vec::new(),
        smooth: pieces,
    };
    spec.validate()?;
    Ok(spec)
}

/// Smooth part of the potential at `x` in `[0, L]`, amplitude included.
/// Delta terms do not contribute.
pub fn evaluate_smooth(spec: &PotentialSpec, x: f64) -> Result<f64, SpecError> {
    if !(0.0..=spec.period).contains(&x) {
        return Err(SpecError::OutOfDomain {
            x,
            period: spec.period,
        });
    }
    for piece in &spec.smooth {
        if piece.contains(x) {
            return Ok(spec.amplitude * piece.profile.eval(x));
        }
    }
    Ok(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_comb_has_one_scaled_delta_per_period() {
        let spec = make_single_delta_comb(100.0, 1.0).unwrap();
        assert_eq!(spec.period, 1.0);
        let deltas: Vec<_> = spec.scaled_deltas().collect();
        assert_eq!(deltas, vec![(0.0, 100.0)]);
        assert!(spec.smooth.is_empty());
    }

    #[test]
    fn zero_strength_comb_is_rejected() {
        assert!(matches!(
            make_single_delta_comb(0.0, 1.0),
            Err(SpecError::ZeroAmplitude)
        ));
        assert!(matches!(
            make_single_delta_comb(1.0, -1.0),
            Err(SpecError::BadPeriod(_))
        ));
    }

    #[test]
    fn truncated_single_comb_has_deltas_at_integer_positions_only() {
        let spec = make_single_delta_comb(100.0, 1.0).unwrap();
        let trunc = Truncation::new(4).unwrap();
        let positions: Vec<f64> = spec
            .truncated_deltas(trunc)
            .iter()
            .map(|&(x, _)| x)
            .collect();
        assert_eq!(positions, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn alternating_comb_layout() {
        let spec = make_alternating_delta_comb(50.0, 1.0).unwrap();
        assert_eq!(spec.period, 2.0);
        let deltas: Vec<_> = spec.scaled_deltas().collect();
        assert_eq!(deltas, vec![(0.0, 50.0), (1.0, -50.0)]);
    }

    #[test]
    fn scaled_smooth_constant_barrier_and_well() {
        let barrier =
            make_scaled_smooth(vec![SmoothPiece::constant(0.0, 1.0, 1.0)], 25.0, 1.0).unwrap();
        assert_eq!(evaluate_smooth(&barrier, 0.5).unwrap(), 25.0);

        let well =
            make_scaled_smooth(vec![SmoothPiece::constant(0.0, 1.0, -1.0)], 25.0, 1.0).unwrap();
        assert_eq!(evaluate_smooth(&well, 0.5).unwrap(), -25.0);
    }

    #[test]
    fn sign_changing_profile() {
        let spec = make_scaled_smooth(
            vec![
                SmoothPiece::constant(0.0, 0.5, 1.0),
                SmoothPiece::constant(0.5, 1.0, -1.0),
            ],
            25.0,
            1.0,
        )
        .unwrap();
        assert_eq!(evaluate_smooth(&spec, 0.75).unwrap(), -25.0);
        assert_eq!(evaluate_smooth(&spec, 0.25).unwrap(), 25.0);
    }

    #[test]
    fn overlapping_pieces_are_rejected() {
        let r = make_scaled_smooth(
            vec![
                SmoothPiece::constant(0.0, 0.6, 1.0),
                SmoothPiece::constant(0.5, 1.0, -1.0),
            ],
            1.0,
            1.0,
        );
        assert!(matches!(r, Err(SpecError::OverlappingPieces(..))));
    }

    #[test]
    fn evaluate_smooth_domain_and_free_cases() {
        let free = PotentialSpec::free(1.0).unwrap();
        assert_eq!(evaluate_smooth(&free, 0.3).unwrap(), 0.0);
        assert!(matches!(
            evaluate_smooth(&free, 1.5),
            Err(SpecError::OutOfDomain { .. })
        ));
        assert!(matches!(
            evaluate_smooth(&free, -0.1),
            Err(SpecError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn truncation_matches_periodic_extension_inside_and_zero_outside() {
        let spec = make_scaled_smooth(
            vec![SmoothPiece {
                lo: 0.2,
                hi: 0.8,
                profile: Profile::Poly {
                    coeffs: vec![1.0, -2.0, 3.0],
                },
            }],
            4.0,
            1.0,
        )
        .unwrap();
        let trunc = Truncation::new(3).unwrap();
        for i in 0..=300 {
            let x = i as f64 * 0.01;
            let local = x % 1.0;
            let expect = evaluate_smooth(&spec, local).unwrap();
            assert_eq!(spec.truncated_smooth_value(trunc, x), expect, "x = {x}");
        }
        assert_eq!(spec.truncated_smooth_value(trunc, -0.5), 0.0);
        assert_eq!(spec.truncated_smooth_value(trunc, 3.5), 0.0);
    }

    #[test]
    fn table_profile_interpolates_linearly() {
        let profile = Profile::Table {
            xs: vec![0.0, 1.0, 2.0],
            ys: vec![0.0, 2.0, 0.0],
        };
        assert_eq!(profile.eval(0.5), 1.0);
        assert_eq!(profile.eval(1.5), 1.0);
        assert_eq!(profile.eval(-1.0), 0.0);
        assert_eq!(profile.eval(3.0), 0.0);
    }

    #[test]
    fn json_round_trip_is_structural_identity() {
        let spec = PotentialSpec {
            period: 2.0,
            amplitude: 50.0,
            deltas: vec![
                DeltaTerm {
                    offset: 0.0,
                    strength: 1.0,
                },
                DeltaTerm {
                    offset: 1.0,
                    strength: -1.0,
                },
            ],
            smooth: vec![SmoothPiece {
                lo: 0.25,
                hi: 0.75,
                profile: Profile::Table {
                    xs: vec![0.25, 0.75],
                    ys: vec![1.0, 2.0],
                },
            }],
        };
        let round = PotentialSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(round, spec);
    }

    #[test]
    fn json_format_matches_documented_schema() {
        let text = r#"{"period": 1.0, "amplitude": 100.0,
                       "deltas": [{"offset": 0.0, "strength": 1.0}],
                       "smooth": [{"lo": 0.2, "hi": 0.4, "profile": {"kind": "const", "value": -1.0}}]}"#;
        let spec = PotentialSpec::from_json(text).unwrap();
        assert_eq!(spec.scaled_deltas().next(), Some((0.0, 100.0)));
        assert_eq!(evaluate_smooth(&spec, 0.3).unwrap(), -100.0);
    }

    #[test]
    fn construction_is_deterministic() {
        let a = make_alternating_delta_comb(50.0, 1.0).unwrap();
        let b = make_alternating_delta_comb(50.0, 1.0).unwrap();
        assert_eq!(a, b);
    }
}
