//! Built-in verification suite.
//!
//! Twelve numbered checks pin the quantitative behavior of the whole crate:
//! determinant preservation, the Chebyshev power identity, cross-validation
//! of the independent reflection/transmission formulas, narrow-band edge
//! placement, group-velocity bounds and scaling laws, transparency points,
//! gap decay, the semi-infinite limit, the time-domain energy split and the
//! strong-potential trend checks.  Every bound is pinned here and can be
//! overridden per key (`--set scattering.gap_decay_rel_tol=0.01`).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::potentials::{
    make_alternating_delta_comb, make_scaled_smooth, make_single_delta_comb, PotentialSpec,
    Profile, SmoothPiece,
};
use crate::scattering::{
    gap_decay_fit, reflection_formula, scatter_direct, scatter_semi_infinite,
    transmittance_formula, transparency_points,
};
use crate::spectrum::{
    degenerate_edge_velocity, discriminant, find_bands, group_velocity, EdgeKind,
};
use crate::timedomain::{freq_domain_oracle, run as run_pulse, PulseConfig};
use crate::transfer::{monodromy, monodromy_power, transfer_over_slab, Frequency, Mat2};

/// Tolerance overrides, keyed like `module.knob`.
#[derive(Debug, Clone, Default)]
pub struct Overrides(HashMap<String, f64>);

impl Overrides {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.0.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str, default: f64) -> f64 {
        *self.0.get(key).unwrap_or(&default)
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    /// Measured values, each with the bound it was checked against.
    pub checks: Vec<CheckLine>,
    pub seconds: f64,
    pub budget_seconds: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckLine {
    pub what: String,
    pub measured: f64,
    pub bound: f64,
    /// "<" means measured must stay below bound, ">" above, "in" within
    /// [0, bound] of the companion check.
    pub relation: String,
    pub ok: bool,
}

impl CheckLine {
    fn below(what: &str, measured: f64, bound: f64) -> Self {
        CheckLine {
            what: what.into(),
            measured,
            bound,
            relation: "<".into(),
            ok: measured < bound,
        }
    }

    fn at_least(what: &str, measured: f64, bound: f64) -> Self {
        CheckLine {
            what: what.into(),
            measured,
            bound,
            relation: ">".into(),
            ok: measured > bound,
        }
    }

    fn within(what: &str, measured: f64, lo: f64, hi: f64) -> Self {
        CheckLine {
            what: format!("{what} (in [{lo}, {hi}])"),
            measured,
            bound: hi,
            relation: "in".into(),
            ok: (lo..=hi).contains(&measured),
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub criteria: Vec<CriterionReport>,
    pub all_pass: bool,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn finish(
    id: u32,
    name: &str,
    budget: f64,
    started: Instant,
    checks: Vec<CheckLine>,
) -> CriterionReport {
    let seconds = started.elapsed().as_secs_f64();
    let mut all = checks.iter().all(|c| c.ok);
    let mut checks = checks;
    checks.push(CheckLine::below("wall-clock seconds", seconds, budget));
    all &= seconds < budget;
    CriterionReport {
        id,
        name: name.into(),
        pass: all,
        checks,
        seconds,
        budget_seconds: budget,
    }
}

fn freq(w: f64) -> Frequency {
    Frequency::real(w).expect("nonzero test frequency")
}

// Smooth barrier strengths are capped so the hyperbolic entry growth stays
// below ~2e3; beyond that the determinant residual ad - bc is dominated by
// f64 cancellation in the products rather than by the integrator.
fn random_spec(rng: &mut ChaCha8Rng) -> PotentialSpec {
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    match rng.gen_range(0..6) {
        0 => {
            let a = sign * rng.gen_range(5.0..120.0);
            let l = rng.gen_range(0.5..2.0);
            make_single_delta_comb(a, l).unwrap()
        }
        1 => {
            let a = sign * rng.gen_range(5.0..100.0);
            let l = rng.gen_range(0.3..1.0);
            make_alternating_delta_comb(a, l).unwrap()
        }
        2 => {
            let a = sign * rng.gen_range(1.0..40.0);
            let l = rng.gen_range(0.6..1.2);
            make_scaled_smooth(vec![SmoothPiece::constant(0.0, l, 1.0)], a, l).unwrap()
        }
        3 => {
            let a = rng.gen_range(5.0..80.0);
            let split = rng.gen_range(0.3..0.7);
            make_scaled_smooth(
                vec![
                    SmoothPiece::constant(0.0, split, 1.0),
                    SmoothPiece::constant(split, 1.0, -1.0),
                ],
                a,
                1.0,
            )
            .unwrap()
        }
        4 => {
            let a = sign * rng.gen_range(1.0..15.0);
            let c1 = rng.gen_range(-2.0..2.0);
            let c2 = rng.gen_range(-2.0..2.0);
            make_scaled_smooth(
                vec![SmoothPiece {
                    lo: 0.1,
                    hi: 0.9,
                    profile: Profile::Poly {
                        coeffs: vec![0.5, c1, c2],
                    },
                }],
                a,
                1.0,
            )
            .unwrap()
        }
        _ => {
            let a = sign * rng.gen_range(5.0..60.0);
            let mut spec = make_single_delta_comb(a, 1.0).unwrap();
            spec.smooth = vec![SmoothPiece::constant(0.25, 0.75, rng.gen_range(-1.0..1.0))];
            spec
        }
    }
}

/// 1. Unit determinant of the monodromy matrix over random potentials.
pub fn c01_determinant(seed: u64, ov: &Overrides) -> CriterionReport {
    let started = Instant::now();
    let tol = ov.get("transfer.det_tol", 1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = Complex64::new(1.0, 0.0);
    let mut worst = 0.0_f64;
    for i in 0..10_000 {
        let spec = random_spec(&mut rng);
        let omega = if i % 10 == 0 {
            Frequency::complex(rng.gen_range(0.3..12.0), rng.gen_range(0.01..0.5)).unwrap()
        } else {
            freq(rng.gen_range(0.3..12.0))
        };
        match monodromy(omega, &spec) {
            Ok(m) => worst = worst.max((m.det() - one).norm()),
            Err(e) => panic!("monodromy failed on sample {i}: {e}"),
        }
    }
    finish(
        1,
        "determinant law",
        30.0,
        started,
        vec![CheckLine::below(
            "max |det M - 1| over 1e4 samples",
            worst,
            tol,
        )],
    )
}

/// 2. Chebyshev power identity against repeated multiplication.
pub fn c02_chebyshev(seed: u64, ov: &Overrides) -> CriterionReport {
    let started = Instant::now();
    let tol = ov.get("transfer.chebyshev_tol", 1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0002);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let a = rng.gen_range(2.0..100.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let l = rng.gen_range(0.5..1.5);
        let spec = if rng.gen_bool(0.5) {
            make_single_delta_comb(a, l).unwrap()
        } else {
            make_alternating_delta_comb(a, 0.5 * l).unwrap()
        };
        let w = freq(rng.gen_range(0.3..12.0));
        let n: u32 = rng.gen_range(1..=64);
        let m = monodromy(w, &spec).unwrap();
        let via_chebyshev = match monodromy_power(&m, m.half_trace(), n) {
            Ok(p) => p,
            Err(_) => continue, // overflow guard in very deep gaps
        };
        let mut direct = Mat2::IDENTITY;
        let mut ok = true;
        for _ in 0..n {
            direct = m * direct;
            if direct.max_abs() > 1e280 {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let scale = direct.max_abs().max(1.0);
        worst = worst.max(via_chebyshev.dist(&direct) / scale);
    }
    finish(
        2,
        "Chebyshev power identity",
        10.0,
        started,
        vec![CheckLine::below(
            "max scaled entrywise error, N <= 64",
            worst,
            tol,
        )],
    )
}

/// 3. Independent reflection/transmission formulas agree; energy conserved.
pub fn c03_formula_cross_validation(seed: u64, ov: &Overrides) -> CriterionReport {
    let started = Instant::now();
    let r_tol = ov.get("scattering.reflection_tol", 1e-9);
    let t_tol = ov.get("scattering.transmittance_tol", 1e-10);
    let cons_tol = ov.get("scattering.conservation_tol", 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0003);
    let mut worst_r = 0.0_f64;
    let mut worst_t = 0.0_f64;
    let mut worst_cons = 0.0_f64;
    for i in 0..1000 {
        let spec = if i % 20 == 0 {
            make_scaled_smooth(
                vec![SmoothPiece::constant(0.2, 0.8, 1.0)],
                rng.gen_range(-30.0..30.0),
                1.0,
            )
            .unwrap()
        } else {
            let a = rng.gen_range(2.0..100.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            if rng.gen_bool(0.5) {
                make_single_delta_comb(a, rng.gen_range(0.5..1.5)).unwrap()
            } else {
                make_alternating_delta_comb(a, rng.gen_range(0.3..0.8)).unwrap()
            }
        };
        if spec.amplitude == 0.0 {
            continue;
        }
        let w = rng.gen_range(0.3..12.0);
        let n: u32 = rng.gen_range(1..=32);
        let direct = scatter_direct(freq(w), &spec, n).unwrap();
        let via_formula = reflection_formula(freq(w), &spec, n).unwrap();
        worst_r = worst_r.max((direct.r - via_formula).norm());
        worst_cons = worst_cons.max(direct.conservation_defect);

        let t2_formula = transmittance_formula(w, &spec, n).unwrap();
        let slab = transfer_over_slab(freq(w), &spec, n).unwrap();
        let t2_norm = 4.0 / (slab.hs_norm_sq() + 2.0);
        worst_t = worst_t.max((t2_formula - t2_norm).abs());
    }
    finish(
        3,
        "reflection/transmission formula cross-validation",
        10.0,
        started,
        vec![
            CheckLine::below("max |r (formula) - r (direct)|", worst_r, r_tol),
            CheckLine::below("max ||t|^2 (formula) - |t|^2 (norm)|", worst_t, t_tol),
            CheckLine::below("max energy conservation defect", worst_cons, cons_tol),
        ],
    )
}

/// 4. Narrow-band edge of the strong comb.
pub fn c04_narrow_band_edge(_seed: u64, ov: &Overrides) -> CriterionReport {
    let started = Instant::now();
    let (a, l) = (100.0_f64, 1.0_f64);
    let secant_tol = ov.get("spectrum.edge_secant_tol", 1e-10);
    let asym_tol = ov.get("spectrum.edge_asymptote_tol", 10.0 / (a * a));

    let comb = make_single_delta_comb(a, l).unwrap();
    let scan = find_bands(&comb, 2.5, 3.5, 400).expect("band scan");
    let lo_edge = scan.bands[0].lo;

    // Root of tan(e/2) = 2 (pi - e)/(A L), solved independently by bisection.
    let g = |e: f64| (0.5 * e).tan() - 2.0 * (PI - e) / (a * l);
    let (mut x0, mut x1) = (1e-9, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (x0 + x1);
        if g(x0) * g(mid) <= 0.0 {
            x1 = mid;
        } else {
            x0 = mid;
        }
    }
    let secant_edge = (PI - 0.5 * (x0 + x1)) / l;
    let asymptote_edge = PI / l * (1.0 - 4.0 / (a * l));

    finish(
        4,
        "narrow-band edge placement",
        1.0,
        started,
        vec![
            CheckLine::below(
                "|edge - secant-equation root|",
                (lo_edge - secant_edge).abs(),
                secant_tol,
            ),
            CheckLine::below(
                "|edge - first-order asymptote|",
                (lo_edge - asymptote_edge).abs(),
                asym_tol,
            ),
        ],
    )
}

/// 5. Group-velocity bound and its amplitude scaling on the first band.
pub fn c05_group_velocity_bound(_seed: u64, ov: &Overrides) -> CriterionReport {
    let started = Instant::now();
    let slope_tol = ov.get("spectrum.vg_slope_tol", 0.05);
    let l = 1.0;
    let mut checks = Vec::new();
    let mut points = Vec::new();
    for &a in &[50.0, 100.0, 200.0] {
        let comb = make_single_delta_comb(a, l).unwrap();
        let scan = find_bands(&comb, PI / l * (1.0 - 8.0 / a), PI / l + 0.05, 400).expect("scan");
        let band = scan.bands[0];
        let mut max_vg = 0.0_f64;
        for i in 1..400 {
            let w = band.lo + band.width() * i as f64 / 400.0;
            if let Ok(s) = group_velocity(w, &comb) {
                max_vg = max_vg.max(s.v_g.abs());
            }
        }
        let bound = 2.0 * PI / (a * l) * (1.0 + 5.0 / a);
        checks.push(CheckLine::below(
            &format!("max |V_g| on band 1, A={a}"),
            max_vg,
            bound,
        ));
        points.push((a.ln(), max_vg.ln()));
    }
    let slope = (points[2].1 - points[0].1) / (points[2].0 - points[0].0);
    checks.push(CheckLine::within(
        "log-log slope of max |V_g| vs A",
        slope,
        -1.0 - slope_tol,
        -1.0 + slope_tol,
    ));
    finish(5, "group-velocity bound", 5.0, started, checks)
}

/// 6. Degenerate edge of the alternating comb: scalar monodromy, perfect
///    transparency, inverse-amplitude group velocity.
pub fn c06_degenerate_edge(_seed: u64, ov: &Overrides) -> CriterionReport {
    let started = Instant::now();
    let r_tol = ov.get("scattering.degenerate_r_tol", 1e-8);
    let slope_tol = ov.get("spectrum.degenerate_slope_tol", 0.1);
    let l = 1.0;
    let w0 = PI / l;
    let mut checks = Vec::new();

    let comb = make_alternating_delta_comb(100.0, l).unwrap();
    let m = monodromy(freq(w0), &comb).unwrap();
    checks.push(CheckLine::below(
        "||M - I|| at the resonance",
        m.dist(&Mat2::IDENTITY),
        1e-8,
    ));
    for n in [4u32, 32, 256] {
        let s = scatter_direct(freq(w0), &comb, n).unwrap();
        checks.push(CheckLine::below(
            &format!("|r_N| at resonance, N={n}"),
            s.r.norm(),
            r_tol,
        ));
    }

    let mut points = Vec::new();
    for &a in &[50.0, 100.0, 200.0] {
        let alt = make_alternating_delta_comb(a, l).unwrap();
        let vg = degenerate_edge_velocity(&alt, w0).expect("degenerate velocity");
        points.push((a.ln(), vg.ln()));
    }
    let slope = (points[2].1 - points[0].1) / (points[2].0 - points[0].0);
    checks.push(CheckLine::within(
        "log-log slope of V_g vs A",
        slope,
        -1.0 - slope_tol,
        -1.0 + slope_tol,
    ));
    finish(6, "degenerate band edge", 5.0, started, checks)
}

/// 7. Transparency points of the 8-period strong comb.
pub fn c07_transparency(_seed: u64, ov: &Overrides) -> CriterionReport {
    let started = Instant::now();
    let t_tol = ov.get("scattering.transparency_tol", 1e-8);
    let a = 100.0;
    let n = 8u32;
    let comb = make_single_delta_comb(a, 1.0).unwrap();
    let scan = find_bands(&comb, 2.5, 3.5, 400).expect("scan");
    let points = transparency_points(&comb, &scan.bands[0], n).expect("transparency solve");

    let mut checks = vec![CheckLine::within(
        "number of transparency points",
        points.len() as f64,
        7.0,
        7.0,
    )];
    let mut worst_t = 1.0_f64;
    for p in &points {
        worst_t = worst_t.min(transmittance_formula(p.omega, &comb, n).unwrap().sqrt());
    }
    checks.push(CheckLine::at_least(
        "min |t_8| at the points",
        worst_t,
        1.0 - t_tol,
    ));
    let mut worst_mid = 0.0_f64;
    for pair in points.windows(2) {
        let mid = 0.5 * (pair[0].omega + pair[1].omega);
        worst_mid = worst_mid.max(transmittance_formula(mid, &comb, n).unwrap().sqrt());
    }
    checks.push(CheckLine::below(
        "max |t_8| between the points",
        worst_mid,
        10.0 / a,
    ));
    finish(7, "transparency points", 5.0, started, checks)
}

/// 8. Gap decay rate equals the imaginary Bloch phase.
pub fn c08_gap_decay(_seed: u64, ov: &Overrides) -> CriterionReport {
    let started = Instant::now();
    let rel_tol = ov.get("scattering.gap_decay_rel_tol", 0.02);
    let comb = make_single_delta_comb(100.0, 1.0).unwrap();
    let w = 4.6; // mid-gap between the first two bands
    let n_list: Vec<u32> = (1..=16).map(|k| 4 * k).collect();
    let fit = gap_decay_fit(&comb, w, &n_list).expect("decay fit");
    let rel = (fit.sigma - fit.im_k).abs() / fit.im_k;
    finish(
        8,
        "gap decay rate",
        5.0,
        started,
        vec![
            CheckLine::at_least("fitted sigma", fit.sigma, 0.0),
            CheckLine::below("|sigma - Im k| / Im k", rel, rel_tol),
        ],
    )
}

/// 9. At a non-degenerate edge, N |t_N| stays bounded within a factor two.
pub fn c09_edge_law(_seed: u64, ov: &Overrides) -> CriterionReport {
    let started = Instant::now();
    let factor = ov.get("scattering.edge_law_factor", 2.0);
    let comb = make_single_delta_comb(100.0, 1.0).unwrap();
    let scan = find_bands(&comb, 2.5, 3.5, 400).expect("scan");
    let edge = scan.bands[0].hi;
    let mut lo = f64::MAX;
    let mut hi = 0.0_f64;
    for n in [16u32, 64, 256, 1024] {
        let val = n as f64 * transmittance_formula(edge, &comb, n).unwrap().sqrt();
        lo = lo.min(val);
        hi = hi.max(val);
    }
    finish(
        9,
        "non-degenerate edge transmission law",
        5.0,
        started,
        vec![CheckLine::below(
            "spread factor of N |t_N| over N in {16..1024}",
            hi / lo,
            factor,
        )],
    )
}

/// 10. Slab reflection converges geometrically to the semi-infinite limit;
///     the semi-infinite alternating comb reflects as -1 + O(1/A).
pub fn c10_semi_infinite(_seed: u64, ov: &Overrides) -> CriterionReport {
    let started = Instant::now();
    let ratio_bound = ov.get("scattering.semi_ratio_bound", 0.9);
    let factor_bound = ov.get("scattering.semi_factor_bound", 3.0);
    let mut checks = Vec::new();

    let comb = make_single_delta_comb(100.0, 1.0).unwrap();
    let w = Frequency::complex(3.08, 0.01).unwrap();
    let r_inf = scatter_semi_infinite(w, &comb).expect("semi-infinite").r;
    let d_first = (scatter_direct(w, &comb, 2).unwrap().r - r_inf).norm();
    let d_last = (scatter_direct(w, &comb, 24).unwrap().r - r_inf).norm();
    let per_period = (d_last / d_first).powf(1.0 / 22.0);
    checks.push(CheckLine::below(
        "geometric ratio of |r_N - r| per period",
        per_period,
        ratio_bound,
    ));

    let l = 1.0;
    let mut scaled = Vec::new();
    for &a in &[50.0, 100.0, 200.0] {
        let alt = make_alternating_delta_comb(a, l).unwrap();
        let w = freq(PI / l + 0.01 / (a * l));
        let r = scatter_semi_infinite(w, &alt)
            .expect("semi-infinite alternating")
            .r;
        scaled.push((r + Complex64::new(1.0, 0.0)).norm() * a);
    }
    let spread = scaled.iter().cloned().fold(f64::MIN, f64::max)
        / scaled.iter().cloned().fold(f64::MAX, f64::min);
    checks.push(CheckLine::below(
        "spread of |r + 1| A over A in {50,100,200}",
        spread,
        factor_bound,
    ));
    finish(10, "semi-infinite limit", 5.0, started, checks)
}

/// Desk-scale pulse configuration shared by criterion 11 and the CLI.
///
/// Three periods keep the carrier (theta = 2, Bloch phase pi/2) away from the
/// transparency resonances of the slab, where the inverse-square energy law
/// is masked.  The pulse is wider than the general default so that the
/// spectrum clears the resonance shoulders; otherwise energy lingers in
/// slowly leaking cavity modes long past the nominal interaction time.
pub fn desk_pulse(amplitude: f64) -> PulseConfig {
    let mut cfg = PulseConfig::desk(1, 2.0, amplitude, 1.0, 3).expect("desk pulse config");
    cfg.pulse_width = amplitude.powf(1.3);
    cfg.t_end = 2.0 * cfg.pulse_width + 3.0 * cfg.transit_time();
    cfg.validate().expect("desk pulse config");
    cfg
}

/// 11. Time-domain energy split against the frequency-domain prediction.
pub fn c11_energy_split(_seed: u64, ov: &Overrides) -> CriterionReport {
    let started = Instant::now();
    let drift_tol = ov.get("timedomain.drift_tol", 1e-3);
    let oracle_rel = ov.get("timedomain.oracle_rel_tol", 0.1);
    let ratio_lo = ov.get("timedomain.a2_ratio_lo", 2.8);
    let ratio_hi = ov.get("timedomain.a2_ratio_hi", 5.7);
    let pre_transit_tol = ov.get("timedomain.pre_transit_tol", 1e-5);

    let report100 = run_pulse(desk_pulse(100.0)).expect("pulse run A=100");
    let oracle100 = freq_domain_oracle(&desk_pulse(100.0)).expect("oracle A=100");
    let report50 = run_pulse(desk_pulse(50.0)).expect("pulse run A=50");
    let oracle50 = freq_domain_oracle(&desk_pulse(50.0)).expect("oracle A=50");

    let td100 = report100.transmitted_fraction();
    let td50 = report50.transmitted_fraction();
    let rel_gap100 =
        (td100 - oracle100.transmitted_fraction).abs() / oracle100.transmitted_fraction;
    let rel_gap50 = (td50 - oracle50.transmitted_fraction).abs() / oracle50.transmitted_fraction;
    let ratio = td50 / td100;
    let pre_transit = report100.pre_transit_right_fraction.unwrap_or(f64::NAN);

    finish(
        11,
        "time-domain energy split",
        300.0,
        started,
        vec![
            CheckLine::below("energy drift, A=100", report100.drift, drift_tol),
            CheckLine::below(
                "|transmitted - oracle| / oracle, A=100",
                rel_gap100,
                oracle_rel,
            ),
            CheckLine::below(
                "|transmitted - oracle| / oracle, A=50",
                rel_gap50,
                oracle_rel,
            ),
            CheckLine::within(
                "transmitted fraction ratio A=50 / A=100",
                ratio,
                ratio_lo,
                ratio_hi,
            ),
            CheckLine::below(
                "pre-transit energy beyond the slab / total",
                pre_transit,
                pre_transit_tol,
            ),
        ],
    )
}

/// 12. Strong-amplitude trend checks for smooth profiles.
pub fn c12_wkb_trends(_seed: u64, ov: &Overrides) -> CriterionReport {
    let started = Instant::now();
    let scan_grid = ov.get("spectrum.wkb_scan_grid", 40_000.0) as usize;
    let w0 = 2.0;
    let mut checks = Vec::new();

    // (a) constant barrier: the fixed frequency falls in a gap once A is
    // large; |F| must exceed 1 for every amplitude tried and keep growing.
    let mut prev = 1.0_f64;
    let mut barrier_ok = true;
    let mut min_margin = f64::MAX;
    for &a in &[25.0, 100.0, 400.0] {
        let spec = make_scaled_smooth(vec![SmoothPiece::constant(0.0, 1.0, 1.0)], a, 1.0).unwrap();
        let f_abs = discriminant(freq(w0), &spec).unwrap().re.abs();
        barrier_ok &= f_abs > prev;
        min_margin = min_margin.min(f_abs);
        prev = f_abs;
    }
    checks.push(CheckLine::at_least(
        "min |F(2)| over barrier amplitudes {25,100,400}",
        min_margin,
        1.0,
    ));
    checks.push(CheckLine::within(
        "barrier |F| growth monotone",
        barrier_ok as i32 as f64,
        1.0,
        1.0,
    ));

    // (b) constant well: group velocity at the fixed frequency grows with A.
    let mut vgs = Vec::new();
    for &a in &[25.0, 100.0, 400.0] {
        let spec = make_scaled_smooth(vec![SmoothPiece::constant(0.0, 1.0, -1.0)], a, 1.0).unwrap();
        vgs.push(
            group_velocity(w0, &spec)
                .expect("well group velocity")
                .v_g
                .abs(),
        );
    }
    let monotone = vgs.windows(2).all(|w| w[1] > w[0]);
    checks.push(CheckLine::within(
        "well V_g strictly increasing over {25,100,400}",
        monotone as i32 as f64,
        1.0,
        1.0,
    ));

    // (c) sign-changing profile: no degenerate edges in (0, 4 pi).
    let spec = make_scaled_smooth(
        vec![
            SmoothPiece::constant(0.0, 0.5, 1.0),
            SmoothPiece::constant(0.5, 1.0, -1.0),
        ],
        400.0,
        1.0,
    )
    .unwrap();
    let scan = find_bands(&spec, 0.05, 4.0 * PI, scan_grid).expect("sign-changing scan");
    let degenerate = scan
        .bands
        .iter()
        .flat_map(|b| [b.lo_class, b.hi_class])
        .filter(|k| *k == EdgeKind::Degenerate)
        .count();
    checks.push(CheckLine::within(
        "degenerate edges found in (0, 4 pi)",
        degenerate as f64,
        0.0,
        0.0,
    ));
    checks.push(CheckLine::at_least(
        "bands found for the sign-changing profile",
        scan.bands.len() as f64,
        0.5,
    ));

    finish(12, "strong-amplitude trend checks", 30.0, started, checks)
}

type CriterionFn = fn(u64, &Overrides) -> CriterionReport;

pub const CRITERIA: [(u32, &str, CriterionFn); 12] = [
    (1, "determinant law", c01_determinant),
    (2, "Chebyshev power identity", c02_chebyshev),
    (3, "formula cross-validation", c03_formula_cross_validation),
    (4, "narrow-band edge placement", c04_narrow_band_edge),
    (5, "group-velocity bound", c05_group_velocity_bound),
    (6, "degenerate band edge", c06_degenerate_edge),
    (7, "transparency points", c07_transparency),
    (8, "gap decay rate", c08_gap_decay),
    (9, "non-degenerate edge transmission law", c09_edge_law),
    (10, "semi-infinite limit", c10_semi_infinite),
    (11, "time-domain energy split", c11_energy_split),
    (12, "strong-amplitude trend checks", c12_wkb_trends),
];

/// Run every criterion; failures do not abort the remaining checks.
pub fn run_all(seed: u64, overrides: &Overrides) -> VerifyReport {
    let mut criteria = Vec::with_capacity(CRITERIA.len());
    for (_, _, f) in CRITERIA.iter() {
        criteria.push(f(seed, overrides));
    }
    let all_pass = criteria.iter().all(|c| c.pass);
    VerifyReport {
        seed,
        criteria,
        all_pass,
    }
}

/// One line per criterion, `PASS`/`FAIL` plus the failing checks.
pub fn format_line(c: &CriterionReport) -> String {
    let status = if c.pass { "PASS" } else { "FAIL" };
    let mut line = format!("[{status}] {:2}. {} ({:.2}s)", c.id, c.name, c.seconds);
    if !c.pass {
        for check in c.checks.iter().filter(|k| !k.ok) {
            line.push_str(&format!(
                "\n       {} = {:.6e} (required {} {:.6e})",
                check.what, check.measured, check.relation, check.bound
            ));
        }
    }
    line
}
