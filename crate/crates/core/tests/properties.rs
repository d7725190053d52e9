use proptest::prelude::*;

use morrey::embeddings::is_continuous;
use morrey::finite_dim::{distribute_even, finite_norm, opnorm_id, FiniteSpaceParams, SearchConfig};
use morrey::lattice::{group_support_by_level, unit_cubes_in};
use morrey::norms::{lorentz_constant, norm_linf, norm_lorentz, norm_lp, norm_mps};
use morrey::oracle::{oracle_norm, OracleConfig};
use morrey::sequence::SparseSequence;
use morrey::weights::{SpaceParams, Weight};
use morrey::witnesses::{c0_counterexample, proper_subspace_witness, spike_sequence};
use morrey::{DyadicCube, LatticePoint};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Normalized G_p weight from fractions of the admissible growth `d/p`.
fn gp_from(d: u32, p: f64, steps: &[f64], tail: f64) -> Weight<f64> {
    let top = d as f64 / p;
    let mut head = vec![1.0];
    for &a in steps {
        head.push(head.last().unwrap() * 2f64.powf(a * top));
    }
    Weight::new(d, head, tail * top).unwrap().normalized().unwrap()
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.5), Just(1.0), Just(1.5), Just(2.0), 0.25f64..4.0]
}

fn fraction() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(1.0), 0.0f64..=1.0]
}

fn gp_space(d: u32) -> impl Strategy<Value = SpaceParams<f64>> {
    (exponent(), prop::collection::vec(fraction(), 0..5), fraction())
        .prop_map(move |(p, steps, tail)| SpaceParams::new(gp_from(d, p, &steps, tail), p).unwrap())
}

fn raw_weight(d: u32) -> impl Strategy<Value = (Weight<f64>, f64)> {
    (exponent(), prop::collection::vec(0.05f64..6.0, 1..6), fraction())
        .prop_map(move |(p, head, tail)| (Weight::new(d, head, tail * d as f64 / p).unwrap(), p))
}

fn sequence(d: u32, radius: i128) -> impl Strategy<Value = SparseSequence<f64>> {
    let entry = (prop::collection::vec(-radius..=radius, d as usize), -8.0f64..8.0);
    prop::collection::vec(entry, 1..12).prop_map(move |es| {
        SparseSequence::from_entries(d, es.into_iter().map(|(k, v)| (LatticePoint::new(k), v))).unwrap()
    })
}

fn dim() -> impl Strategy<Value = u32> {
    prop_oneof![Just(1u32), Just(2u32)]
}

fn space_and_seq() -> impl Strategy<Value = (SpaceParams<f64>, SparseSequence<f64>)> {
    dim().prop_flat_map(|d| (gp_space(d), sequence(d, 64)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ancestors_are_nested(k in prop::collection::vec(any::<i64>(), 1..4), j1 in 0u32..130, dj in 0u32..10) {
        let k = LatticePoint::new(k.into_iter().map(i128::from).collect());
        let j2 = j1 + dj;
        prop_assert!(k.ancestor(j2).contains_cube(&k.ancestor(j1)));
        prop_assert!(k.ancestor(j1).contains(&k));
    }

    #[test]
    fn unit_cube_count(d in 1u32..4, j in 0u32..5, m in prop::collection::vec(-1000i128..1000, 3)) {
        let cube = DyadicCube::new(j, LatticePoint::new(m[..d as usize].to_vec()));
        let pts = unit_cubes_in(&cube, 1 << 20).unwrap();
        prop_assert_eq!(pts.len() as u128, 1u128 << (j * d));
        prop_assert!(pts.iter().all(|k| cube.contains(k)));
    }

    #[test]
    fn level_zero_grouping_is_singletons(s in dim().prop_flat_map(|d| sequence(d, 1000))) {
        let groups = group_support_by_level(s.support(), 0);
        prop_assert_eq!(groups.len(), s.len());
        for (cube, pts) in groups {
            prop_assert_eq!(pts.len(), 1);
            prop_assert_eq!(&cube.corner, &pts[0]);
        }
    }

    #[test]
    fn gp_classes_are_nested(s in dim().prop_flat_map(gp_space), q in 0.05f64..1.0) {
        let w = &s.weight;
        prop_assert!(w.is_gp(s.p));
        prop_assert!(w.is_gp(s.p * q));
    }

    #[test]
    fn gp_weights_are_bounded(s in dim().prop_flat_map(gp_space), k in 0u64..40) {
        let v = s.weight.eval(k);
        prop_assert!(v >= 1.0 - 1e-12);
        prop_assert!(v <= 2f64.powf((k * s.dim() as u64) as f64 / s.p) * (1.0 + 1e-12));
    }

    #[test]
    fn r_phi_is_the_gp_threshold(s in dim().prop_flat_map(gp_space), q in 0.05f64..0.95) {
        let w = &s.weight;
        let r = w.r_phi().unwrap();
        prop_assert!(r >= s.p * (1.0 - 1e-12));
        if r.is_finite() {
            prop_assert!(w.is_gp(r));
            prop_assert!(w.is_gp(r * q));
            prop_assert!(!w.is_gp(r * (1.0 + 1e-6) / q));
        } else {
            prop_assert!(w.is_gp(1e6));
        }
    }

    #[test]
    fn regularize_is_idempotent((w, p) in dim().prop_flat_map(raw_weight)) {
        let r = w.regularize(p).unwrap();
        prop_assert!(r.is_gp(p));
        prop_assert_eq!(r.regularize(p).unwrap(), r);
    }

    #[test]
    fn classification_flags_are_consistent(s in dim().prop_flat_map(gp_space)) {
        let c = s.weight.classify_space(s.p).unwrap();
        prop_assert!(!(c.equals_linf && c.equals_lp));
        prop_assert!(c.nontrivial);
    }

    #[test]
    fn norm_matches_oracle((s, seq) in space_and_seq()) {
        let a = norm_mps(&seq, &s).unwrap().value;
        let b = oracle_norm(&seq, &s, &OracleConfig::default()).unwrap();
        prop_assert!(close(a, b, 1e-10), "{a} vs {b}");
    }

    #[test]
    fn norm_sits_between_linf_and_lp((s, seq) in space_and_seq()) {
        let m = norm_mps(&seq, &s).unwrap().value;
        prop_assert!(norm_linf(&seq) <= m * (1.0 + 1e-12));
        prop_assert!(m <= norm_lp(&seq, s.p) * (1.0 + 1e-12));
    }

    #[test]
    fn norm_is_monotone_in_p((s, seq) in space_and_seq(), q in 0.1f64..=1.0) {
        let lower = SpaceParams::new(s.weight.clone(), s.p * q).unwrap();
        let a = norm_mps(&seq, &lower).unwrap().value;
        let b = norm_mps(&seq, &s).unwrap().value;
        prop_assert!(a <= b * (1.0 + 1e-12));
    }

    #[test]
    fn regularization_preserves_norms((w, p) in raw_weight(1), seq in sequence(1, 64)) {
        let a = norm_mps(&seq, &SpaceParams::new(w.clone(), p).unwrap()).unwrap().value;
        let b = norm_mps(&seq, &SpaceParams::new(w.regularize(p).unwrap(), p).unwrap()).unwrap().value;
        prop_assert!(close(a, b, 1e-10), "{a} vs {b}");
    }

    #[test]
    fn lorentz_bound((s, seq) in space_and_seq()) {
        let r = s.weight.r_phi().unwrap();
        prop_assume!(r > s.p * (1.0 + 1e-9));
        let m = norm_mps(&seq, &s).unwrap().value;
        let bound = lorentz_constant(s.p, r) * norm_lorentz(&seq, r, f64::INFINITY);
        prop_assert!(m <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn norm_is_homogeneous((s, seq) in space_and_seq(), c in -100.0f64..100.0) {
        let a = norm_mps(&seq.scaled(c), &s).unwrap().value;
        let b = c.abs() * norm_mps(&seq, &s).unwrap().value;
        prop_assert!(close(a, b, 1e-12) || (a == 0.0 && b == 0.0));
    }

    #[test]
    fn continuity_verdicts_are_sound(
        (a, b, seq) in dim().prop_flat_map(|d| (gp_space(d), gp_space(d), sequence(d, 64)))
    ) {
        let v = is_continuous(&a.weight, a.p, &b.weight, b.p).unwrap();
        prop_assume!(v.continuous);
        let n1 = norm_mps(&seq, &a).unwrap().value;
        let n2 = norm_mps(&seq, &b).unwrap().value;
        prop_assert!(n2 <= v.constant_bound.unwrap() * n1 * (1.0 + 1e-9));
    }

    #[test]
    fn continuity_is_transitive((a, b, c) in dim().prop_flat_map(|d| (gp_space(d), gp_space(d), gp_space(d)))) {
        let ab = is_continuous(&a.weight, a.p, &b.weight, b.p).unwrap().continuous;
        let bc = is_continuous(&b.weight, b.p, &c.weight, c.p).unwrap().continuous;
        if ab && bc {
            prop_assert!(is_continuous(&a.weight, a.p, &c.weight, c.p).unwrap().continuous);
        }
    }

    #[test]
    fn power_space_at_r_phi_embeds(s in dim().prop_flat_map(gp_space), q in 0.1f64..=1.0) {
        let r = s.weight.r_phi().unwrap();
        prop_assume!(r.is_finite());
        let p = r * q;
        let power = Weight::power(s.dim(), r).unwrap();
        prop_assert!(is_continuous(&power, p, &s.weight, p).unwrap().continuous);
    }

    #[test]
    fn finite_norm_is_a_quasi_norm(
        s in gp_space(1),
        vals in prop::collection::vec((-4.0f64..4.0, -4.0f64..4.0), 8),
        c in -5.0f64..5.0,
    ) {
        let fp = FiniteSpaceParams::new(s.weight.clone(), s.p, 3);
        let mk = |f: &dyn Fn(&(f64, f64)) -> f64| {
            SparseSequence::from_1d(vals.iter().enumerate().map(|(i, v)| (i as i128, f(v))))
        };
        let x = mk(&|v| v.0);
        let y = mk(&|v| v.1);
        let nx = finite_norm(&x, &fp).unwrap();
        let ny = finite_norm(&y, &fp).unwrap();
        let nxy = finite_norm(&x.add_scaled(&y, 1.0).unwrap(), &fp).unwrap();
        prop_assert_eq!(nx == 0.0, x.is_empty());
        prop_assert!(close(finite_norm(&x.scaled(c), &fp).unwrap(), c.abs() * nx, 1e-12) || c == 0.0);
        if s.p >= 1.0 {
            prop_assert!(nxy <= (nx + ny) * (1.0 + 1e-12));
        } else {
            prop_assert!(nxy.powf(s.p) <= (nx.powf(s.p) + ny.powf(s.p)) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn distribution_is_balanced(s in dim().prop_flat_map(gp_space), j in 0u32..5, frac in 0.0f64..=1.0) {
        let nu0 = (frac * j as f64).round() as u32;
        let dist = distribute_even(&s.weight, s.p, j, nu0).unwrap();
        prop_assert_eq!(dist.sequence.len() as u128, dist.n0);
        prop_assert!(dist.achieved_constant <= 2.0 * (1.0 + 1e-12));
        // Sibling counts differ by at most one at every level.
        for nu in 0..nu0 {
            let counts = group_support_by_level(dist.sequence.support(), nu);
            let mut by_parent: std::collections::BTreeMap<DyadicCube, Vec<usize>> = Default::default();
            for cube in unit_cubes_in(&DyadicCube::at_origin(s.dim(), nu0 - nu), 1 << 20).unwrap() {
                let c = DyadicCube::new(nu, LatticePoint::new(cube.coords().to_vec()));
                let n = counts.get(&c).map_or(0, Vec::len);
                by_parent.entry(c.parent()).or_default().push(n);
            }
            for sibs in by_parent.values() {
                let lo = sibs.iter().min().unwrap();
                let hi = sibs.iter().max().unwrap();
                prop_assert!(hi - lo <= 1, "level {nu}: {sibs:?}");
            }
        }
    }

    #[test]
    fn operator_norm_grows_with_level(a in gp_space(1), b in gp_space(1)) {
        let cfg = SearchConfig::default();
        let mut prev_exact = 0.0;
        let mut prev_upper = 0.0;
        for j in 0..5 {
            let r = opnorm_id(&a.weight, a.p, &b.weight, b.p, j, &cfg).unwrap();
            if let Some(x) = r.exact {
                prop_assert!(x >= prev_exact);
                prev_exact = x;
            }
            prop_assert!(r.upper >= prev_upper);
            prop_assert!(r.lower <= r.upper * (1.0 + 1e-12));
            prev_upper = r.upper;
        }
    }

    #[test]
    fn weight_json_round_trip_is_bit_exact(s in dim().prop_flat_map(gp_space), (w, _) in raw_weight(2)) {
        for params in [s, SpaceParams::new(w, 1.0).unwrap()] {
            let back: SpaceParams<f64> = serde_json::from_str(&serde_json::to_string(&params).unwrap()).unwrap();
            for (x, y) in back.weight.head().iter().zip(params.weight.head()) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
            prop_assert_eq!(back, params);
        }
    }

    #[test]
    fn sequence_json_round_trip(seq in dim().prop_flat_map(|d| sequence(d, i128::MAX / 2))) {
        let back: SparseSequence<f64> = serde_json::from_str(&serde_json::to_string(&seq).unwrap()).unwrap();
        prop_assert_eq!(back, seq);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn truncations_keep_their_certificates(s in dim().prop_flat_map(gp_space)) {
        let limit_zero = s.weight.limits(s.p).limit == 0.0;
        for n in 1..=4 {
            let mut bundles = vec![c0_counterexample(&s, n.min(2))];
            if limit_zero {
                bundles.push(spike_sequence(&s, n));
                bundles.push(proper_subspace_witness(&s, n.min(3)));
            }
            for b in bundles {
                let Ok(b) = b else { continue };
                for c in b.verify(&s, None).unwrap() {
                    prop_assert!(c.holds, "{} at truncation {n}: {c:?}", b.kind);
                }
            }
        }
    }

    #[test]
    fn generators_are_deterministic(s in dim().prop_flat_map(gp_space)) {
        prop_assert_eq!(c0_counterexample(&s, 2).ok(), c0_counterexample(&s, 2).ok());
        prop_assert_eq!(spike_sequence(&s, 3).ok(), spike_sequence(&s, 3).ok());
    }

    #[test]
    fn single_precision_agrees_with_oracle(
        p in prop_oneof![Just(1.0f32), Just(2.0f32), Just(0.5f32)],
        tail in 0.0f32..=1.0,
        es in prop::collection::vec((-40i128..40, 0.1f32..8.0), 1..8),
    ) {
        let w = Weight::<f32>::new(1, vec![1.0, 2f32.powf(0.5 / p)], tail / p).unwrap().normalized().unwrap();
        let s = SpaceParams::new(w, p).unwrap();
        let seq = SparseSequence::<f32>::from_1d(es);
        let a = norm_mps(&seq, &s).unwrap().value;
        let b = oracle_norm(&seq, &s, &OracleConfig::default()).unwrap();
        prop_assert!((a - b).abs() <= 1e-5 * a.max(b), "{a} vs {b}");
        let s64 = SpaceParams::new(
            Weight::<f64>::new(1, vec![1.0, 2f64.powf(0.5 / p as f64)], (tail / p) as f64).unwrap(),
            p as f64,
        ).unwrap();
        let seq64 = SparseSequence::from_1d(seq.iter().map(|(k, v)| (k.coords()[0], v as f64)));
        let c = norm_mps(&seq64, &s64).unwrap().value;
        prop_assert!((a as f64 - c).abs() <= 1e-5 * c);
    }
}
