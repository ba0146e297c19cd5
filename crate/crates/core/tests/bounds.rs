mod common;

use common::{brute_boolean_rank, sperner_cover};
use monorank::bounds::{
    box_cover_exact, cover_lower_bound, div_tensor_mr_exact, mr_bounds_matrix,
    singleton_box_predicate, BoundsOptions, CoverOutcome, SupportPattern, UpperStatus,
    DEFAULT_NODE_BUDGET,
};
use monorank::constructions::DivTensorSpec;
use monorank::ratlinalg::{int, RatMatrix};
use num_traits::Zero;
use proptest::prelude::*;

fn bool_rows(m: &RatMatrix) -> Vec<Vec<bool>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|v| !v.is_zero()).collect())
        .collect()
}

#[test]
fn cover_equals_boolean_rank_on_all_small_patterns() {
    for (r, c) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        for bits in 0u32..1 << (r * c) {
            let m = RatMatrix::from_fn(r, c, |i, j| int((bits >> (i * c + j) & 1) as i64));
            let bound = cover_lower_bound(&SupportPattern::of_matrix(&m), DEFAULT_NODE_BUDGET);
            assert!(bound.exact);
            assert_eq!(
                bound.lower,
                brute_boolean_rank(&bool_rows(&m)),
                "{r}x{c} bits {bits:b}"
            );
            if let Some(cover) = bound.cover {
                assert!(cover.is_valid_for(&SupportPattern::of_matrix(&m)));
            }
        }
    }
}

#[test]
fn off_diagonal_covers_follow_sperner() {
    for n in 2..=8 {
        let m = RatMatrix::from_fn(n, n, |i, j| int((i != j) as i64));
        let bound = cover_lower_bound(&SupportPattern::of_matrix(&m), DEFAULT_NODE_BUDGET);
        assert_eq!(bound.lower, sperner_cover(n), "n = {n}");
    }
}

#[test]
fn exceeds_limit_reports_the_limit() {
    let p = SupportPattern::diagonal(5);
    match box_cover_exact(&p, 3).unwrap() {
        CoverOutcome::ExceedsLimit { .. } => {}
        other => panic!("{other:?}"),
    }
    assert_eq!(box_cover_exact(&p, 5).unwrap().lower(), 5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // any explicit k-term nonnegative product certifies mr ≤ k, so the
    // lower bound may never exceed k
    #[test]
    fn lower_bound_is_sound(
        (r, c, k) in (2usize..6, 2usize..6, 1usize..4),
        seed in any::<u64>(),
    ) {
        let w: Vec<i64> = (0..r * k).map(|t| ((seed >> (t % 61)) & 3) as i64 % 3).collect();
        let h: Vec<i64> = (0..k * c).map(|t| ((seed >> ((t * 7 + 3) % 61)) & 3) as i64 % 2).collect();
        let m = RatMatrix::from_fn(r, c, |i, j| int((0..k).map(|t| w[i * k + t] * h[t * c + j]).sum()));
        let report = mr_bounds_matrix(&m, &BoundsOptions::default()).unwrap();
        prop_assert!(report.lower <= k, "lower {} > {}", report.lower, k);
        prop_assert!(report.lower <= report.upper);
    }
}

#[test]
fn bracket_closes_on_identity() {
    let report = mr_bounds_matrix(&RatMatrix::identity(5), &BoundsOptions::default()).unwrap();
    assert_eq!((report.lower, report.upper), (5, 5));
    assert_eq!(report.upper_status, UpperStatus::Exact);
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["upperStatus"], "exact");
    assert_eq!(json["lowerWitness"], "rank");
}

#[test]
fn negative_input_rejected() {
    let m = RatMatrix::from_int_rows(&[[1, -1]]);
    assert!(mr_bounds_matrix(&m, &BoundsOptions::default()).is_err());
}

#[test]
fn divisibility_mr_is_support_size() {
    for (n, d) in [(2, 3), (3, 3), (2, 4), (5, 3)] {
        let spec = DivTensorSpec::new(n, d).unwrap();
        assert!(singleton_box_predicate(&spec).unwrap());
        assert_eq!(div_tensor_mr_exact(&spec).unwrap(), n.pow(d as u32 - 1));
    }
}
