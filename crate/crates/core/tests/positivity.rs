use std::time::Instant;

use biharm::linear::{certify_positivity, negativity_witness, scan_beta_threshold, Method, Verdict};

#[test]
fn thresholds_are_certified() {
    for (n, beta, method) in [
        (1, 7.0 / 16.0, Method::N1MonotoneMap),
        (2, 0.5, Method::N2DerivativeTrick),
        (3, 2.0, Method::LobeMonotonicity),
        (4, 2.5, Method::LobeMonotonicity),
    ] {
        let start = Instant::now();
        let r = certify_positivity(n, beta).unwrap();
        eprintln!("N={n} beta={beta}: {:?} {:?} in {:?} ({})", r.verdict, r.scan_min, start.elapsed(), r.details);
        assert_eq!(r.verdict, Verdict::CertifiedPositive);
        assert_eq!(r.method, method);
        assert!(r.scan_min.unwrap().1 > 0.0);
    }
}

#[test]
fn near_n_is_negative() {
    let r = certify_positivity(1, 0.95).unwrap();
    assert_eq!(r.verdict, Verdict::WitnessNegative);
    assert!(r.witness.unwrap().1 < 0.0);
    for n in 1..=3 {
        let w = negativity_witness(n).unwrap();
        assert!(w.value < 0.0 && w.relative_difference < 1e-6, "{w:?}");
    }
}

#[test]
fn threshold_brackets() {
    let start = Instant::now();
    let s = scan_beta_threshold(1, 0.2, 0.99, 0.02).unwrap();
    eprintln!("{s:?} in {:?}", start.elapsed());
    assert!(s.largest_positive.unwrap() >= 7.0 / 16.0);
    assert!(s.smallest_negative.unwrap() < 1.0);
}
