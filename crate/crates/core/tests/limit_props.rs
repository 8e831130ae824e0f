//! Determinism and invariance properties of the simulation lab: results
//! must not depend on thread count, repeated runs, or how a constant
//! distribution rule is expressed.

use std::sync::Arc;

use indep_core::limit::{
    ks_distance_to_standard_normal, lindeberg_sum, run_clt, run_lil, run_lln, sample_path,
    CoordinateMeasure, LindebergGate, RangeSpec, SequenceSpec, TailBound,
};
use num_rational::BigRational;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn fair_sign(horizon: u64) -> SequenceSpec {
    let range = RangeSpec::new(vec![r(-1, 1), r(1, 1)]).unwrap();
    let m = CoordinateMeasure::new(vec![r(1, 2), r(1, 2)]).unwrap();
    SequenceSpec::identical(range, m, horizon).unwrap()
}

fn lumpy(horizon: u64) -> SequenceSpec {
    let range = RangeSpec::new(vec![r(-10, 1), r(-1, 1), r(0, 1), r(1, 1), r(10, 1)]).unwrap();
    let m = CoordinateMeasure::new(vec![r(1, 10), r(1, 5), r(2, 5), r(1, 5), r(1, 10)]).unwrap();
    SequenceSpec::identical(range, m, horizon).unwrap()
}

#[test]
fn clt_is_invariant_under_thread_count() {
    let spec = fair_sign(10_000);
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let eight = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap();
    let a = one.install(|| run_clt(&spec, 400, 300, 77, None)).unwrap();
    let b = eight.install(|| run_clt(&spec, 400, 300, 77, None)).unwrap();
    assert_eq!(a.statistics, b.statistics);
    assert_eq!(a.final_statistic.to_bits(), b.final_statistic.to_bits());
    assert_eq!(a.stat_mean, b.stat_mean);
    assert_eq!(a.stat_variance, b.stat_variance);
}

#[test]
fn reported_ks_matches_a_recomputation() {
    let spec = lumpy(10_000);
    let report = run_clt(&spec, 300, 400, 5, None).unwrap();
    let mut sorted = report.statistics.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    assert_eq!(
        report.final_statistic.to_bits(),
        ks_distance_to_standard_normal(&sorted).to_bits()
    );
    assert_eq!(report.statistics.len(), 400);
}

#[test]
fn lindeberg_sum_is_nonincreasing_in_n() {
    let spec = lumpy(100_000);
    let eps = r(1, 2);
    let mut previous: Option<BigRational> = None;
    for n in [1u64, 2, 4, 16, 64, 256, 1024, 4096] {
        let value = lindeberg_sum(&spec, n, &eps).unwrap();
        assert!(value >= r(0, 1));
        if let Some(p) = previous {
            assert!(value <= p, "sum grew from {p} to {value} at n = {n}");
        }
        previous = Some(value);
    }
    // Eventually the cutoff exceeds the largest centered square and the
    // sum vanishes outright.
    assert_eq!(lindeberg_sum(&spec, 100_000, &eps).unwrap(), r(0, 1));
}

#[test]
fn lindeberg_sum_is_nonincreasing_in_epsilon() {
    // Growing the cutoff can only shrink the truncated set, so for a
    // fixed length the sum falls monotonically to an exact zero.
    let spec = lumpy(100_000);
    let n = 64;
    let mut previous: Option<BigRational> = None;
    for k in 1..=40u64 {
        let value = lindeberg_sum(&spec, n, &r(k as i64, 4)).unwrap();
        assert!(value >= r(0, 1));
        if let Some(p) = previous {
            assert!(value <= p, "sum grew from {p} to {value} at eps = {k}/4");
        }
        previous = Some(value);
    }
    assert_eq!(previous.unwrap(), r(0, 1));
}

#[test]
fn trajectories_follow_the_checkpoint_grid() {
    let spec = fair_sign(100_000);
    let lln = run_lln(&spec, 5_000, 3).unwrap();
    assert_eq!(lln.trajectory.first().unwrap().0, 1);
    assert_eq!(lln.trajectory.last().unwrap().0, 5_000);
    assert!(lln.trajectory.windows(2).all(|w| w[0].0 < w[1].0));
    assert_eq!(lln.final_statistic.to_bits(), lln.trajectory.last().unwrap().1.to_bits());

    let lil = run_lil(&spec, 5_000, 3).unwrap();
    assert_eq!(lil.trajectory.first().unwrap().0, 100);
    assert_eq!(lil.trajectory.last().unwrap().0, 5_000);
    assert!(lil.trajectory.windows(2).all(|w| w[0].0 < w[1].0));
}

#[test]
fn paths_stay_inside_the_support() {
    let spec = lumpy(2_000);
    let path = sample_path(&spec, 2_000, 9).unwrap();
    let allowed = [-10.0, -1.0, 0.0, 1.0, 10.0];
    assert!(path.iter().all(|x| allowed.contains(x)));
}

#[test]
fn expressing_the_same_rule_two_ways_changes_nothing() {
    // One spec says "identical", the other recomputes the same table for
    // every index. The mean and central-limit runs must agree bit for
    // bit; the iterated-logarithm laws differ inside the double log
    // (ln ln k against ln ln B_k), so those trajectories agree after
    // rescaling by exactly that factor.
    let range = RangeSpec::new(vec![r(0, 1), r(1, 2), r(1, 1)]).unwrap();
    let table = CoordinateMeasure::new(vec![r(1, 3), r(1, 3), r(1, 3)]).unwrap();
    let identical = SequenceSpec::identical(range.clone(), table.clone(), 50_000).unwrap();
    let cloned = table.clone();
    let varying = SequenceSpec::varying(
        range,
        Arc::new(move |_| cloned.clone()),
        Some(TailBound::BoundedAbove { constant: r(1, 1), from: 1 }),
        50_000,
    )
    .unwrap();

    let a = run_lln(&identical, 8_000, 31).unwrap();
    let b = run_lln(&varying, 8_000, 31).unwrap();
    assert_eq!(a.trajectory, b.trajectory);
    assert_eq!(a.variance_sum, b.variance_sum);

    let a = run_lil(&identical, 8_000, 31).unwrap();
    let b = run_lil(&varying, 8_000, 31).unwrap();
    assert_eq!(a.variance_sum, b.variance_sum);
    assert_eq!(a.trajectory.len(), b.trajectory.len());
    for ((ka, sa), (kb, sb)) in a.trajectory.iter().zip(&b.trajectory) {
        assert_eq!(ka, kb);
        let kf = *ka as f64;
        // The coordinate variance is exactly 1/6, so B_k = sqrt(k/6).
        let b_k = (kf / 6.0).sqrt();
        let rescaled = sa * (kf.ln().ln() / b_k.ln().ln()).sqrt();
        assert!(
            (rescaled - sb).abs() <= 1e-9 * sb.abs().max(1.0),
            "checkpoint {ka}: {rescaled} vs {sb}"
        );
    }

    let gate = LindebergGate { epsilon: r(1, 10), threshold: r(1, 1) };
    let a = run_clt(&identical, 256, 200, 31, Some(&gate)).unwrap();
    let b = run_clt(&varying, 256, 200, 31, Some(&gate)).unwrap();
    assert_eq!(a.statistics, b.statistics);

    let ea = lindeberg_sum(&identical, 100, &r(1, 4)).unwrap();
    let eb = lindeberg_sum(&varying, 100, &r(1, 4)).unwrap();
    assert_eq!(ea, eb);
}

#[test]
fn replication_zero_matches_the_single_path_runs() {
    // run_lln consumes the same draws as replication 0 of run_clt, so
    // the final centered sums relate by the deterministic normalizers.
    let spec = fair_sign(10_000);
    let n = 1_000;
    let lln = run_lln(&spec, n, 13).unwrap();
    let clt = run_clt(&spec, n, 1, 13, None).unwrap();
    let sum_from_lln = lln.final_statistic * n as f64;
    let b_n = (n as f64).sqrt();
    let sum_from_clt = clt.statistics[0] * b_n;
    assert!((sum_from_lln - sum_from_clt).abs() < 1e-9);
}
