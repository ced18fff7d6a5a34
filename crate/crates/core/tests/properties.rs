//! Property tests of the cross-cutting invariants: branch selection, energy
//! conservation, the Chebyshev identity and spec round-tripping.

use num_complex::Complex64;
use proptest::prelude::*;

use slabwave_core::potentials::{
    make_alternating_delta_comb, make_single_delta_comb, DeltaTerm, PotentialSpec,
};
use slabwave_core::scattering::scatter_direct;
use slabwave_core::spectrum::{bloch_k, Regime};
use slabwave_core::transfer::{monodromy, monodromy_power, Frequency, Mat2};

fn comb_strategy() -> impl Strategy<Value = PotentialSpec> {
    (any::<bool>(), 1.0..120.0f64, 0.4..1.6f64, any::<bool>()).prop_map(|(alt, a, l, neg)| {
        let a = if neg { -a } else { a };
        if alt {
            make_alternating_delta_comb(a, 0.5 * l).unwrap()
        } else {
            make_single_delta_comb(a, l).unwrap()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// The selected monodromy eigenvalue decays in the upper half plane.
    #[test]
    fn upper_half_plane_root_decays(
        spec in comb_strategy(),
        re in 0.3..10.0f64,
        im in 0.005..0.8f64,
    ) {
        let omega = Frequency::complex(re, im).unwrap();
        let sample = bloch_k(omega, &spec).unwrap();
        prop_assert!(sample.mu().norm() < 1.0 + 1e-12);
        prop_assert!(sample.k.im > -1e-12);
    }

    /// cos of the selected Bloch phase reproduces the discriminant.
    #[test]
    fn bloch_phase_inverts_discriminant(
        spec in comb_strategy(),
        w in 0.3..10.0f64,
    ) {
        let sample = bloch_k(Frequency::real(w).unwrap(), &spec).unwrap();
        if sample.regime != Regime::Edge {
            prop_assert!((sample.k.cos() - sample.f).norm() < 1e-9);
        }
    }

    /// Energy is conserved and the slab is never perfectly opaque.
    #[test]
    fn scattering_conserves_energy(
        spec in comb_strategy(),
        w in 0.3..10.0f64,
        n in 1u32..48,
    ) {
        let s = scatter_direct(Frequency::real(w).unwrap(), &spec, n).unwrap();
        prop_assert!(s.conservation_defect < 1e-9);
        prop_assert!(s.t.norm() > 0.0);
        prop_assert!(s.r.norm() <= 1.0 + 1e-12);
    }

    /// The Chebyshev power equals the repeated product, scaled entrywise.
    #[test]
    fn chebyshev_power_matches_product(
        spec in comb_strategy(),
        w in 0.3..10.0f64,
        n in 1u32..40,
    ) {
        let m = monodromy(Frequency::real(w).unwrap(), &spec).unwrap();
        let power = match monodromy_power(&m, m.half_trace(), n) {
            Ok(p) => p,
            Err(_) => return Ok(()), // overflow guard deep in a gap
        };
        let mut direct = Mat2::IDENTITY;
        for _ in 0..n {
            direct = m * direct;
            if direct.max_abs() > 1e280 {
                return Ok(());
            }
        }
        let scale = direct.max_abs().max(1.0);
        prop_assert!(power.dist(&direct) / scale < 1e-8);
    }

    /// Composition across one period: the half-trace of the square equals
    /// 2 F^2 - 1 (the double-angle identity for the Bloch phase).
    #[test]
    fn trace_obeys_double_angle(
        spec in comb_strategy(),
        w in 0.3..10.0f64,
    ) {
        let m = monodromy(Frequency::real(w).unwrap(), &spec).unwrap();
        let f = m.half_trace();
        let f2 = (m * m).half_trace();
        let expect = 2.0 * f * f - Complex64::new(1.0, 0.0);
        prop_assert!((f2 - expect).norm() < 1e-9 * expect.norm().max(1.0));
    }

    /// Specs survive a JSON round trip structurally unchanged.
    #[test]
    fn spec_json_round_trip(
        period in 0.2..4.0f64,
        amplitude in -150.0..150.0f64,
        offsets in proptest::collection::vec(0.0..0.99f64, 0..4),
    ) {
        let mut sorted = offsets;
        sorted.sort_by(f64::total_cmp);
        sorted.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        let deltas: Vec<DeltaTerm> = sorted
            .iter()
            .map(|&o| DeltaTerm { offset: o * period, strength: 1.0 })
            .collect();
        let spec = PotentialSpec { period, amplitude, deltas, smooth: Vec::new() };
        prop_assume!(spec.validate().is_ok());
        let round = PotentialSpec::from_json(&spec.to_json()).unwrap();
        prop_assert_eq!(round, spec);
    }
}
