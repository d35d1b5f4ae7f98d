use proptest::prelude::*;

use odfset::contour::{zero_isocontour, DEFAULT_TOLERANCE};
use odfset::edt::distance_transform;
use odfset::expectations::{coverage, distance_average_expectation, odf_expectation, vorobev_expectation, DaOptions};
use odfset::io::{decode_pgm, mask_from_pgm, mask_to_pgm, polylines_from_csv, polylines_to_csv, PgmEncoding};
use odfset::metrics::{lq_char_distance, symmetric_difference, MetricReport};
use odfset::odf::{oriented_distance_field, uniform_weights, weighted_mean_fields};
use odfset::{BinaryMask, GridSpec};

fn mask_strategy(max: usize) -> impl Strategy<Value = BinaryMask> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(any::<bool>(), r * c)
            .prop_map(move |bits| BinaryMask::new(GridSpec::pixels(r, c).unwrap(), bits).unwrap())
    })
}

fn same_grid_masks(n: usize) -> impl Strategy<Value = Vec<BinaryMask>> {
    (2usize..20, 2usize..20).prop_flat_map(move |(r, c)| {
        prop::collection::vec(
            prop::collection::vec(any::<bool>(), r * c)
                .prop_map(move |bits| BinaryMask::new(GridSpec::pixels(r, c).unwrap(), bits).unwrap()),
            n,
        )
    })
}

fn nondegenerate(m: &BinaryMask) -> bool {
    !m.is_empty() && !m.is_full()
}

fn brute(mask: &BinaryMask) -> Vec<f64> {
    let g = mask.grid();
    g.cells()
        .map(|(i, j, _)| {
            g.cells()
                .filter(|&(a, b, _)| mask.get(a, b))
                .map(|(a, b, _)| (((a as i64 - i as i64).pow(2) + (b as i64 - j as i64).pow(2)) as f64).sqrt())
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn edt_is_exact(mask in mask_strategy(24)) {
        prop_assume!(!mask.is_empty());
        let fast = distance_transform(&mask).unwrap();
        let slow = brute(&mask);
        prop_assert_eq!(fast.values(), slow.as_slice());
    }

    #[test]
    fn odf_sign_matches_membership(mask in mask_strategy(24)) {
        prop_assume!(nondegenerate(&mask));
        let b = oriented_distance_field(&mask).unwrap();
        for (i, j, _) in mask.grid().cells() {
            prop_assert_eq!(b.get(i, j) < 0.0, mask.get(i, j));
            prop_assert!(b.get(i, j) != 0.0);
        }
    }

    #[test]
    fn single_realization_is_its_own_expectation(mask in mask_strategy(24)) {
        prop_assume!(nondegenerate(&mask));
        let f = oriented_distance_field(&mask).unwrap();
        prop_assert_eq!(&odf_expectation(std::slice::from_ref(&f), &[1.0]).unwrap().mask, &mask);
        prop_assert_eq!(&vorobev_expectation(std::slice::from_ref(&mask)).unwrap().mask, &mask);
        let da = distance_average_expectation(&[f], DaOptions::default()).unwrap();
        prop_assert_eq!(&da.mask, &mask);
    }

    #[test]
    fn mean_is_permutation_invariant(masks in same_grid_masks(4)) {
        prop_assume!(masks.iter().all(nondegenerate));
        let fields: Vec<_> = masks.iter().map(|m| oriented_distance_field(m).unwrap()).collect();
        let mut rev = fields.clone();
        rev.reverse();
        let w = uniform_weights(4);
        let a = weighted_mean_fields(&fields, &w).unwrap();
        let b = weighted_mean_fields(&rev, &w).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn vorobev_threshold_and_measure(masks in same_grid_masks(5)) {
        prop_assume!(masks.iter().any(|m| !m.is_empty()));
        let est = vorobev_expectation(&masks).unwrap();
        let k = est.threshold_used * 5.0;
        prop_assert!((k - k.round()).abs() < 1e-12 && k.round() >= 1.0);
        let mean_measure = masks.iter().map(|m| m.measure()).sum::<f64>() / 5.0;
        prop_assert!(est.measure() >= mean_measure);
        let cov = coverage(&masks).unwrap();
        for (idx, &c) in cov.counts().iter().enumerate() {
            prop_assert_eq!(est.mask.bits()[idx], c as f64 >= k.round());
        }
    }

    #[test]
    fn metrics_are_pseudometrics(masks in same_grid_masks(3), q in 1.0f64..4.0) {
        let (a, b, c) = (&masks[0], &masks[1], &masks[2]);
        let ab = symmetric_difference(a, b).unwrap();
        prop_assert_eq!(ab, symmetric_difference(b, a).unwrap());
        prop_assert!(ab <= symmetric_difference(a, c).unwrap() + symmetric_difference(c, b).unwrap());
        let lab = lq_char_distance(a, b, q).unwrap();
        prop_assert!(
            lab <= lq_char_distance(a, c, q).unwrap() + lq_char_distance(c, b, q).unwrap() + 1e-12
        );
        prop_assert_eq!(symmetric_difference(a, a).unwrap(), 0.0);
    }

    #[test]
    fn metric_report_self_distance_is_zero(mask in mask_strategy(20)) {
        let r = MetricReport::compute(&mask, &mask, 2.0).unwrap();
        prop_assert_eq!(r.symmetric_difference_area, 0.0);
        prop_assert_eq!(r.misclassification_fraction, 0.0);
        if nondegenerate(&mask) {
            prop_assert_eq!(r.l2_odf_distance, Some(0.0));
        }
    }

    #[test]
    fn pgm_round_trip(mask in mask_strategy(30), plain in any::<bool>()) {
        let enc = if plain { PgmEncoding::Plain } else { PgmEncoding::Raw };
        let bytes = mask_to_pgm(&mask, enc);
        prop_assert!(decode_pgm(&bytes).is_ok());
        prop_assert_eq!(mask_from_pgm(&bytes, None).unwrap(), mask);
    }

    #[test]
    fn contour_csv_round_trip(mask in mask_strategy(20)) {
        prop_assume!(nondegenerate(&mask));
        let lines = zero_isocontour(&oriented_distance_field(&mask).unwrap(), DEFAULT_TOLERANCE);
        let back = polylines_from_csv(&polylines_to_csv(&lines)).unwrap();
        prop_assert_eq!(back.len(), lines.len());
        for (a, b) in lines.iter().zip(&back) {
            prop_assert_eq!(a.closed, b.closed);
            prop_assert_eq!(&a.points, &b.points);
        }
    }
}
