use proptest::prelude::*;

use infodist::kkt::euler_residual;
use infodist::measures::info_gain_ceiling;
use infodist::oracle::mc_measures;
use infodist::region::{convex_hull, RegionPoint};
use infodist::verify::in_box;
use infodist::{
    average_measures, canonicalize, center_of_mass, classify_optimality, construct_measurement,
    info_gain, info_gain_1l, info_gain_k1, info_gain_projective, isotropic_measurement, measures,
    optimal_if, optimal_ir, FamilyKL, MeasureVector, Measurement, Particle, ParticleSet,
    SingularSpectrum,
};

const TOL: f64 = 1e-12;

fn spectrum(d: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = SingularSpectrum> {
    d.prop_flat_map(|d| prop::collection::vec(0.0..=1.0f64, d))
        .prop_filter("not all zero", |v| v.iter().any(|&x| x > 0.0))
        .prop_map(|v| SingularSpectrum::new(v).unwrap())
}

/// Spectra with ties, zeros and unit entries, where degeneracies bite hardest.
fn structured_spectrum() -> impl Strategy<Value = SingularSpectrum> {
    (2usize..=8)
        .prop_flat_map(|d| {
            prop::collection::vec(
                prop_oneof![Just(0.0), Just(1.0), Just(0.5), 0.0..=1.0f64],
                d,
            )
        })
        .prop_filter("not all zero", |v| v.iter().any(|&x| x > 0.0))
        .prop_map(|v| SingularSpectrum::new(v).unwrap())
}

/// Structured spectra sit exactly on the bounds, where the last bit may round outward.
fn in_box_up_to_rounding(d: usize, m: &MeasureVector) -> bool {
    let slack = 4.0 * f64::EPSILON;
    let df = d as f64;
    let within = |x: f64, lo: f64, hi: f64| x >= lo - slack && x <= hi + slack;
    within(m.info_gain, 0.0, info_gain_ceiling(d))
        && within(m.estimation_fidelity, 1.0 / df, 2.0 / (df + 1.0))
        && within(m.operation_fidelity, 2.0 / (df + 1.0), 1.0)
        && within(m.reversibility, 0.0, 1.0)
        && m.outcome_probability > 0.0
        && m.outcome_probability <= 1.0
}

fn close(a: &MeasureVector, b: &MeasureVector, tol: f64) -> bool {
    (a.info_gain - b.info_gain).abs() <= tol
        && (a.estimation_fidelity - b.estimation_fidelity).abs() <= tol
        && (a.operation_fidelity - b.operation_fidelity).abs() <= tol
        && (a.reversibility - b.reversibility).abs() <= tol
}

fn particle_set() -> impl Strategy<Value = ParticleSet> {
    (2usize..=6).prop_flat_map(|d| {
        prop::collection::vec((spectrum(d..=d), 0.05..1.0f64), 1..=3).prop_map(|items| {
            let total: f64 = items.iter().map(|(_, w)| w).sum();
            let particles = items
                .iter()
                .map(|(s, w)| Particle::new(s, w / total).unwrap())
                .collect();
            ParticleSet::new(particles).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn measures_stay_in_their_box(s in spectrum(2..=8)) {
        prop_assert!(in_box(s.d(), &measures(&s)));
    }

    #[test]
    fn structured_measures_stay_in_their_box(s in structured_spectrum()) {
        prop_assert!(in_box_up_to_rounding(s.d(), &measures(&s)));
    }

    #[test]
    fn permuting_values_changes_nothing(s in spectrum(2..=8), seed in any::<u64>()) {
        let mut values = s.values().to_vec();
        let n = values.len();
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            values.swap(i, (state >> 33) as usize % (i + 1));
        }
        let permuted = SingularSpectrum::new(values).unwrap();
        prop_assert!(close(&measures(&s), &measures(&permuted), TOL));
    }

    #[test]
    fn rescaling_changes_only_probability(s in spectrum(2..=8), c in 0.01..=1.0f64) {
        let scaled = s.scaled(c).unwrap();
        let (a, b) = (measures(&s), measures(&scaled));
        prop_assert!(close(&a, &b, TOL));
        prop_assert!((b.outcome_probability - c * c * a.outcome_probability).abs()
            <= TOL * a.outcome_probability.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn canonical_form_is_idempotent(s in spectrum(2..=8)) {
        let c = canonicalize(&s);
        let again = canonicalize(&c);
        prop_assert!(again.values().iter().zip(c.values()).all(|(a, b)| (a - b).abs() <= 2.0 * f64::EPSILON));
        prop_assert!(close(&measures(&s), &measures(&c), TOL));
        prop_assert!(c.values().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn closed_forms_match_general_evaluator(d in 2usize..=8, k_frac in 0.0..1.0f64, lambda in 0.0..=1.0f64) {
        let k = 1 + ((d - 1) as f64 * k_frac) as usize;
        let k = k.min(d - 1);
        let general = info_gain(&FamilyKL::new(d, k, 1, lambda).unwrap().spectrum());
        prop_assert!((general - info_gain_k1(d, k, lambda).unwrap()).abs() <= 1e-9);
        let l = d - k;
        let general = info_gain(&FamilyKL::new(d, 1, l, lambda).unwrap().spectrum());
        prop_assert!((general - info_gain_1l(d, l, lambda).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn small_clusters_are_continuous(d in 3usize..=8, lambda in 0.05..0.95f64, spread in 1e-5..1e-3f64) {
        let base = info_gain_1l(d, d - 1, lambda).unwrap();
        let mut values = vec![1.0];
        let l = d - 1;
        for i in 0..l {
            let offset = spread * (i as f64 - (l - 1) as f64 / 2.0) / l as f64;
            values.push(lambda + offset);
        }
        let clustered = info_gain(&SingularSpectrum::new(values).unwrap());
        // The clustering moves I by O(spread²) only because the offsets average to zero.
        prop_assert!((clustered - base).abs() <= 1e-6);
    }

    #[test]
    fn euler_identity(values in prop::collection::vec(0.05..1.0f64, 2..=8)) {
        let s = SingularSpectrum::new(values).unwrap();
        prop_assert!(euler_residual(&s) <= 1e-6);
    }

    #[test]
    fn construction_is_complete_and_preserves_averages(set in particle_set()) {
        let m = construct_measurement(&set);
        prop_assert!(m.completeness_residual() <= 1e-12);
        prop_assert!(m.operators().len() <= set.particles().len() * m.d());
        let (a, c) = (average_measures(&m).unwrap(), center_of_mass(&set));
        prop_assert!((a.info_gain - c.info_gain).abs() <= 1e-10);
        prop_assert!((a.estimation_fidelity - c.estimation_fidelity).abs() <= 1e-10);
        prop_assert!((a.operation_fidelity - c.operation_fidelity).abs() <= 1e-10);
        prop_assert!((a.reversibility - c.reversibility).abs() <= 1e-10);

        // Extracting particles and rebuilding lands on the same averages.
        let again = average_measures(&construct_measurement(&m.particles())).unwrap();
        prop_assert!((again.info_gain - a.info_gain).abs() <= 1e-10);
        prop_assert!((again.operation_fidelity - a.operation_fidelity).abs() <= 1e-10);
    }

    #[test]
    fn measurement_json_round_trips_exactly(set in particle_set()) {
        let m = construct_measurement(&set);
        let text = serde_json::to_string(&m).unwrap();
        let back: Measurement = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn hull_of_hull_is_itself(points in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 3..40)) {
        let tag = SingularSpectrum::new(vec![1.0, 0.0]).unwrap();
        let cloud: Vec<RegionPoint> = points
            .iter()
            .map(|&(x, y)| RegionPoint { x, y, source_spectrum: tag.clone() })
            .collect();
        let hull = convex_hull(cloud);
        prop_assert_eq!(convex_hull(hull.clone()), hull);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn classification_ignores_order_and_splitting(
        d in 3usize..=6,
        kind in 0usize..4,
        x in 0.0..=1.0f64,
        rotate in 0usize..12,
        split in 0usize..12,
    ) {
        let m = match kind {
            0 => isotropic_measurement(d, x.clamp(0.01, 1.0)).unwrap(),
            1 => optimal_ir(d, x).unwrap(),
            2 => optimal_if(d, 2.0 / (d + 1) as f64 + x * (1.0 - 2.0 / (d + 1) as f64)).unwrap(),
            _ => construct_measurement(&ParticleSet::new(vec![
                Particle::new(&SingularSpectrum::new(vec![1.0; d]).unwrap(), 1.0).unwrap(),
            ]).unwrap()),
        };
        let expected = classify_optimality(&m).unwrap();

        let mut ops = m.operators().to_vec();
        let n = ops.len();
        ops.rotate_left(rotate % n);
        let rotated = Measurement::new(d, ops.clone()).unwrap();
        prop_assert_eq!(classify_optimality(&rotated).unwrap(), expected.clone());

        let target = split % n;
        let mut half = ops[target].clone();
        half.diag.iter_mut().for_each(|v| *v *= 0.5f64.sqrt());
        ops[target] = half.clone();
        ops.push(half);
        let split_m = Measurement::new(d, ops).unwrap();
        prop_assert!(split_m.completeness_residual() <= 1e-12);
        prop_assert_eq!(classify_optimality(&split_m).unwrap(), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn oracle_is_deterministic(s in spectrum(2..=5), seed in any::<u64>()) {
        let a = mc_measures(&s, 20_000, seed).unwrap();
        let b = mc_measures(&s, 20_000, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn family_endpoints_are_projective() {
    for d in 2..=8 {
        for k in 1..d {
            let at_zero = info_gain_k1(d, k, 0.0).unwrap();
            let at_one = info_gain_k1(d, k, 1.0).unwrap();
            assert!((at_zero - info_gain_projective(d, k).unwrap()).abs() <= 1e-12);
            assert!((at_one - info_gain_projective(d, k + 1).unwrap()).abs() <= 1e-12);
        }
        let l = d - 1;
        assert!(
            (info_gain_1l(d, l, 0.0).unwrap() - info_gain_projective(d, 1).unwrap()).abs() <= 1e-12
        );
        assert!(info_gain_1l(d, l, 1.0).unwrap().abs() <= 1e-12);
    }
}
