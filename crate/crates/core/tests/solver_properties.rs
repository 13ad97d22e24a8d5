use proptest::prelude::*;

use normeq::experiments::{example2_from_draws, Example2Params, ProblemFile};
use normeq::numkit::DenseMatrix;
use normeq::scalar::MuFunctions;
use normeq::solvers::{residual, solve, SolverConfig, SolverKind};
use normeq::toeplitz::ProblemInstance;

fn instance() -> impl Strategy<Value = ProblemInstance> {
    (1usize..7).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0f64..1.0, n * n),
            prop::collection::vec(0.0f64..1.0, n),
            0.05f64..2.0,
            0.01f64..0.9,
        )
            .prop_filter_map("degenerate draw", move |(m, b, delta, frac)| {
                let m = DenseMatrix::new(n, n, m).ok()?;
                let norm = m.norm1() / (m.norm1() * (1.0 + delta));
                let sigma = frac * (1.0 - norm);
                let params = Example2Params { n, delta, sigma };
                example2_from_draws(&params, &m, &b).ok()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solvers_agree_with_bisection(p in instance()) {
        let mu_star = MuFunctions::new(&p).unwrap().bisect_mu_star(1e-15).unwrap();
        for kind in [SolverKind::Fp, SolverKind::Rfpi, SolverKind::Newton, SolverKind::Sda] {
            let r = solve(&p, kind, &SolverConfig::default()).unwrap();
            prop_assert!(r.converged(), "{kind}: {}", r.status);
            prop_assert!((r.mu - mu_star).abs() <= 1e-12, "{kind}: {} vs {mu_star}", r.mu);
            prop_assert!(r.x.iter().all(|&v| v >= 0.0));
            prop_assert!((r.x.norm1() - r.mu).abs() <= 1e-15);
            prop_assert!(residual(&p, &r.x) <= 1e-13);
            prop_assert_eq!(r.residual_history.len(), r.iterations);
            prop_assert_eq!(r.mu_history.len(), r.iterations);
        }
    }

    #[test]
    fn newton_increases_to_the_root(p in instance()) {
        let mu_star = MuFunctions::new(&p).unwrap().bisect_mu_star(1e-15).unwrap();
        let r = solve(&p, SolverKind::Newton, &SolverConfig::default()).unwrap();
        for w in r.mu_history.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-15);
        }
        prop_assert!(r.mu_history.iter().all(|&m| m <= mu_star + 1e-12));
    }

    #[test]
    fn problem_files_round_trip_exactly(p in instance()) {
        let text = ProblemFile::from_instance(&p).to_json().unwrap();
        let back = ProblemFile::from_json(&text).unwrap().to_instance().unwrap();
        prop_assert_eq!(back, p);
    }
}
