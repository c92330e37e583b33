use evidal_core::belief::{FocalSet, Frame, MassFunction};
use evidal_core::datasets::{format_rich_label, parse_rich_label};
use evidal_core::stats::{
    average_ranks, friedman_test, holm_adjust, paired_t_test, rank_matrix, wilcoxon_signed_rank,
    Alternative,
};
use evidal_core::uncertainty::{
    discord, evidential_epistemic_aleatoric, klir, nonspecificity, shannon_entropy, KlirParams,
};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn mass_strategy() -> impl Strategy<Value = MassFunction> {
    (2usize..=5).prop_flat_map(|size| {
        let max = (1u32 << size) - 1;
        prop::collection::vec((1..=max, 0.01f64..1.0), 1..6).prop_map(move |entries| {
            let total: f64 = entries.iter().map(|e| e.1).sum();
            let frame = Frame::indexed(size).unwrap();
            MassFunction::new(
                frame,
                entries
                    .into_iter()
                    .map(|(b, w)| (FocalSet::from_bits(b), w / total)),
            )
            .unwrap()
        })
    })
}

fn pair_strategy() -> impl Strategy<Value = (MassFunction, MassFunction)> {
    (2usize..=5).prop_flat_map(|size| {
        let max = (1u32 << size) - 1;
        let one = prop::collection::vec((1..=max, 0.01f64..1.0), 1..5);
        (one.clone(), one).prop_map(move |(a, b)| {
            let frame = Frame::indexed(size).unwrap();
            let build = |entries: Vec<(u32, f64)>| {
                let total: f64 = entries.iter().map(|e| e.1).sum();
                MassFunction::new(
                    frame.clone(),
                    entries
                        .into_iter()
                        .map(|(b, w)| (FocalSet::from_bits(b), w / total)),
                )
                .unwrap()
            };
            (build(a), build(b))
        })
    })
}

fn subsets(frame: &Frame) -> impl Iterator<Item = FocalSet> {
    (1..(1u32 << frame.len())).map(FocalSet::from_bits)
}

fn score_matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..8, 2usize..6)
        .prop_flat_map(|(n, k)| prop::collection::vec(prop::collection::vec(0.0f64..100.0, k), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn plausibility_is_dual_to_belief(m in mass_strategy()) {
        let size = m.frame().len();
        for a in subsets(m.frame()) {
            let c = a.complement(size);
            let bel_c = if c.is_empty() { 0.0 } else { m.bel(c).unwrap() };
            prop_assert!((m.pl(a).unwrap() - (1.0 - bel_c)).abs() <= TOL);
        }
    }

    #[test]
    fn pignistic_lies_between_belief_and_plausibility(m in mass_strategy()) {
        for a in subsets(m.frame()) {
            let (bel, betp, pl) = (m.bel(a).unwrap(), m.betp_subset(a).unwrap(), m.pl(a).unwrap());
            prop_assert!(bel <= betp + TOL && betp <= pl + TOL);
        }
    }

    #[test]
    fn dempster_is_commutative((a, b) in pair_strategy()) {
        match (a.combine_dempster(&b), b.combine_dempster(&a)) {
            (Ok(ab), Ok(ba)) => {
                for s in subsets(a.frame()) {
                    prop_assert!((ab.mass(s) - ba.mass(s)).abs() <= TOL);
                }
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "conflict in one order only"),
        }
    }

    #[test]
    fn measures_stay_in_range(m in mass_strategy()) {
        let log_m = (m.frame().len() as f64).log2();
        let (d, n) = (discord(&m).value, nonspecificity(&m).value);
        prop_assert!(d >= 0.0 && d <= log_m + TOL);
        prop_assert!(n >= 0.0 && n <= log_m + TOL);
        let (ue, ua) = evidential_epistemic_aleatoric(&m);
        prop_assert!(ue.value >= 0.0 && ua.value >= 0.0);
        prop_assert!(shannon_entropy(&m.betp()).value <= log_m + TOL);
    }

    #[test]
    fn klir_is_affine_in_lambda(m in mass_strategy(), lambda in 0.0f64..=1.0) {
        let u = klir(&m, KlirParams::new(lambda).unwrap()).value;
        let expected = lambda * nonspecificity(&m).value + (1.0 - lambda) * discord(&m).value;
        prop_assert!((u - expected).abs() <= TOL);
    }

    #[test]
    fn rich_labels_round_trip(m in mass_strategy()) {
        let text = format_rich_label(&m);
        let back = parse_rich_label(m.frame(), &text).unwrap();
        for s in subsets(m.frame()) {
            prop_assert!((m.mass(s) - back.mass(s)).abs() <= 1e-8);
        }
    }

    #[test]
    fn t_test_is_antisymmetric(pairs in prop::collection::vec((0.0f64..100.0, 0.0f64..100.0), 2..30)) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        if let (Ok(ab), Ok(ba)) = (paired_t_test(&a, &b), paired_t_test(&b, &a)) {
            prop_assert_eq!(ab.statistic, -ba.statistic);
            prop_assert_eq!(ab.p_value, ba.p_value);
            prop_assert!((0.0..=1.0).contains(&ab.p_value));
        }
    }

    #[test]
    fn friedman_ignores_monotone_transforms(scores in score_matrix()) {
        let transformed: Vec<Vec<f64>> =
            scores.iter().map(|row| row.iter().map(|x| (x / 10.0).exp() * 3.0 + 1.0).collect()).collect();
        let (a, b) = (friedman_test(&scores).unwrap(), friedman_test(&transformed).unwrap());
        prop_assert_eq!(a.statistic, b.statistic);
        prop_assert!((0.0..=1.0).contains(&a.p_value));
    }

    #[test]
    fn ranks_sum_and_range(scores in score_matrix()) {
        let (n, k) = (scores.len() as f64, scores[0].len() as f64);
        let total: f64 = rank_matrix(&scores).iter().flatten().sum();
        prop_assert!((total - n * k * (k + 1.0) / 2.0).abs() <= TOL);
        for r in average_ranks(&scores).unwrap() {
            prop_assert!((1.0..=k).contains(&r));
        }
    }

    #[test]
    fn holm_is_monotone_and_conservative(p in prop::collection::vec(0.0f64..=1.0, 1..25)) {
        let adj = holm_adjust(&p);
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
        for w in order.windows(2) {
            prop_assert!(adj[w[0]] <= adj[w[1]]);
        }
        for (raw, a) in p.iter().zip(&adj) {
            prop_assert!(a >= raw && *a <= 1.0);
        }
    }

    #[test]
    fn wilcoxon_p_is_a_probability(pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..40)) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let two = wilcoxon_signed_rank(&a, &b, Alternative::TwoSided).unwrap();
        let one = wilcoxon_signed_rank(&a, &b, Alternative::OneSided).unwrap();
        prop_assert!((0.0..=1.0).contains(&two.p_value));
        prop_assert!(one.p_value <= two.p_value);
    }
}

/// Permuting the class indices must not change any measure.
#[test]
fn measures_are_permutation_invariant() {
    let mut runner = proptest::test_runner::TestRunner::default();
    let strategy = mass_strategy().prop_flat_map(|m| {
        let size = m.frame().len();
        (
            Just(m),
            Just((0..size).collect::<Vec<usize>>()).prop_shuffle(),
        )
    });
    runner
        .run(&strategy, |(m, perm)| {
            let moved = MassFunction::new(
                m.frame().clone(),
                m.focal_elements().iter().map(|&(set, v)| {
                    (
                        FocalSet::from_bits(set.indices().fold(0, |acc, i| acc | (1 << perm[i]))),
                        v,
                    )
                }),
            )
            .unwrap();
            let measures = |m: &MassFunction| {
                let (ue, ua) = evidential_epistemic_aleatoric(m);
                [
                    discord(m).value,
                    nonspecificity(m).value,
                    ue.value,
                    ua.value,
                    shannon_entropy(&m.betp()).value,
                ]
            };
            for (x, y) in measures(&m).iter().zip(measures(&moved)) {
                prop_assert!((x - y).abs() <= TOL);
            }
            Ok(())
        })
        .unwrap();
}
