mod support;

use mokkt::cones::PointData;
use mokkt::cq::{check_mfcq, check_socq_direction};
use mokkt::kkt::{certify_point, multipliers_from, verify_certificate, Mode, MultiplierOutcome};
use mokkt::lp::{solve, LinearProgram, LpOutcome};
use mokkt::Tolerances;
use support::random_active_problem;

/// Smallest `|Σ w_k v_k|_1` over the simplex, by an L1-residual LP.
fn hull_distance(vectors: &[Vec<f64>]) -> f64 {
    let k = vectors.len();
    let s = vectors[0].len();
    // Variables: w (k), r+ (s), r- (s); maximize -Σ r.
    let mut c = vec![0.0; k];
    c.extend(vec![-1.0; 2 * s]);
    let mut lp = LinearProgram::maximize(c);
    for v in 0..k + 2 * s {
        lp.bounds(v, 0.0, f64::INFINITY);
    }
    let mut sum = vec![1.0; k];
    sum.extend(vec![0.0; 2 * s]);
    lp.add_eq(sum, 1.0);
    for coord in 0..s {
        let mut row: Vec<f64> = vectors.iter().map(|v| v[coord]).collect();
        let mut slack = vec![0.0; 2 * s];
        slack[coord] = -1.0;
        slack[s + coord] = 1.0;
        row.extend(slack);
        lp.add_eq(row, 0.0);
    }
    match solve(&lp).unwrap() {
        LpOutcome::Optimal { value, .. } => -value,
        other => panic!("{other:?}"),
    }
}

#[test]
fn zero_direction_matches_first_order_condition() {
    let tol = Tolerances::default();
    let (mut yes, mut no) = (0, 0);
    for seed in 0..80 {
        let (p, x0) = random_active_problem(seed);
        let data = PointData::at(&p, &x0, &tol).unwrap();
        let mut gens = data.grads_f.clone();
        gens.extend(data.grads_g.iter().cloned());
        let dist = hull_distance(&gens);
        let zero = data.classify(&vec![0.0; x0.len()], tol.crit).unwrap();
        let r = multipliers_from(&p, &data, &zero, Mode::Fj, &tol).unwrap();
        if dist <= 1e-9 {
            assert!(matches!(r.outcome, MultiplierOutcome::Certificate(_)), "seed {seed}");
            yes += 1;
        } else if dist > 1e-6 {
            assert_eq!(r.outcome, MultiplierOutcome::None, "seed {seed}");
            no += 1;
        }
    }
    assert!(no > 0, "no refuted cases ({yes} certified)");
}

#[test]
fn kt_certificates_are_fritz_john_certificates() {
    let tol = Tolerances::default();
    let mut seen = 0;
    for seed in 0..40 {
        let (p, x0) = random_active_problem(seed);
        let kt = certify_point(&p, &x0, Mode::Kt, 16, seed, &tol).unwrap();
        let fj = certify_point(&p, &x0, Mode::Fj, 16, seed, &tol).unwrap();
        assert_eq!(kt.directions.len(), fj.directions.len());
        for (a, b) in kt.directions.iter().zip(&fj.directions) {
            assert_eq!(a.direction, b.direction);
            if let MultiplierOutcome::Certificate(c) = &a.outcome {
                assert!(verify_certificate(&p, c, &x0, &tol).unwrap(), "seed {seed}");
                let as_fj = c.to_fritz_john();
                assert!(verify_certificate(&p, &as_fj, &x0, &tol).unwrap(), "seed {seed}");
                assert!(matches!(b.outcome, MultiplierOutcome::Certificate(_)), "seed {seed}, d {:?}", a.direction.d);
                seen += 1;
            }
            if let MultiplierOutcome::Certificate(c) = &b.outcome {
                assert!(verify_certificate(&p, c, &x0, &tol).unwrap(), "seed {seed}");
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn constraint_qualification_upgrades_fritz_john_to_kt() {
    let tol = Tolerances::default();
    let mut upgraded = 0;
    for seed in 300..330 {
        let (p, x0) = random_active_problem(seed);
        let data = PointData::at(&p, &x0, &tol).unwrap();
        let mfcq = check_mfcq(&p, &x0, &tol).unwrap();
        let fj = certify_point(&p, &x0, Mode::Fj, 16, seed, &tol).unwrap();
        for r in &fj.directions {
            let MultiplierOutcome::Certificate(_) = r.outcome else { continue };
            let d = &r.direction.d;
            let socq = d.iter().any(|v| *v != 0.0) && check_socq_direction(&p, &x0, d, &tol).unwrap().outcome.holds();
            if mfcq.holds || socq {
                let kt = multipliers_from(&p, &data, &r.direction, Mode::Kt, &tol).unwrap();
                assert!(
                    matches!(kt.outcome, MultiplierOutcome::Certificate(_)),
                    "seed {seed}, d {d:?}: {:?}",
                    kt.outcome
                );
                upgraded += 1;
            }
        }
    }
    assert!(upgraded > 0);
}
