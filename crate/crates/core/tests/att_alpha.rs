use rand::Rng;
use trimweight::att_alpha::att_rhs;
use trimweight::rng::stream;
use trimweight::solve_att_alpha;

fn random_scores(n: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, 0);
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Scans alpha = k / 10^6 and returns the smallest grid value where
/// `|1/alpha - RHS(alpha)|` is below the grid's resolution. The equation can
/// have several roots; the smallest one is the target.
fn brute_force(scores: &[f64]) -> f64 {
    for k in 1..1_000_000u32 {
        let alpha = f64::from(k) * 1e-6;
        if let Some(rhs) = att_rhs(scores, alpha) {
            if (alpha * rhs - 1.0).abs() <= 0.5e-6 * rhs {
                return alpha;
            }
        }
    }
    panic!("no root on the grid");
}

/// The literal scan: global minimizer of `|1/alpha - RHS(alpha)|`.
fn argmin_scan(scores: &[f64]) -> f64 {
    let mut best = (f64::INFINITY, f64::NAN);
    for k in 1..1_000_000u32 {
        let alpha = f64::from(k) * 1e-6;
        if let Some(rhs) = att_rhs(scores, alpha) {
            let gap = (1.0 / alpha - rhs).abs();
            if gap < best.0 {
                best = (gap, alpha);
            }
        }
    }
    best.1
}

#[test]
fn agrees_with_brute_force_scan() {
    for (seed, lo, hi) in [(1, 0.02, 0.98), (2, 0.3, 0.9), (3, 0.01, 0.3)] {
        let scores = random_scores(40, lo, hi, seed);
        let sol = solve_att_alpha(&scores).unwrap();
        let scan = brute_force(&scores);
        assert!((sol.alpha - scan).abs() <= 2e-6, "seed {seed}: {} vs {scan}", sol.alpha);
        let kept = |a: f64| scores.iter().map(|e| 1.0 - e >= a).collect::<Vec<_>>();
        assert_eq!(kept(sol.alpha), kept(scan));
    }
}

#[test]
fn unique_root_matches_argmin_scan() {
    let scores = [0.1, 0.2, 0.3, 0.35, 0.5];
    let sol = solve_att_alpha(&scores).unwrap();
    assert!((sol.alpha - argmin_scan(&scores)).abs() <= 2e-6);
}

#[test]
fn residual_within_tolerance() {
    for seed in 0..20 {
        let scores = random_scores(200, 0.01, 0.99, 100 + seed);
        let sol = solve_att_alpha(&scores).unwrap();
        assert!(sol.alpha > 0.0 && sol.alpha < 1.0);
        let rhs = att_rhs(&scores, sol.alpha).unwrap();
        assert!((1.0 / sol.alpha - rhs).abs() <= 1e-6 / sol.alpha);
        let kept = scores.iter().filter(|&&e| 1.0 - e >= sol.alpha).count();
        assert_eq!(sol.retained_fraction, kept as f64 / scores.len() as f64);
    }
}

#[test]
fn permutation_invariant() {
    let scores = random_scores(300, 0.05, 0.95, 9);
    let mut shuffled = scores.clone();
    shuffled.reverse();
    shuffled.rotate_left(101);
    assert_eq!(solve_att_alpha(&scores).unwrap(), solve_att_alpha(&shuffled).unwrap());
}

#[test]
fn low_scores_retain_everyone() {
    let scores = random_scores(100, 0.001, 0.3, 77);
    let sol = solve_att_alpha(&scores).unwrap();
    assert!(scores.iter().all(|e| 1.0 - e >= sol.alpha));
    assert_eq!(sol.retained_fraction, 1.0);
}
