use proptest::prelude::*;

use normeq::laplacian::{
    binomial_sqrt, decompose, laplacian_from_edges, rank_one_sqrt, solve_lap_equation, suggest_v,
    EdgeList, DEFAULT_DB_TOL,
};
use normeq::numkit::{DenseMatrix, Vector};
use normeq::solvers::SolverConfig;

/// Weighted graph on `n` vertices where every other vertex links to vertex 0
/// with the same weight, so column 0 of `L` is uniform and `suggest_v` applies.
fn graph() -> impl Strategy<Value = EdgeList> {
    (2usize..7).prop_flat_map(|n| {
        (
            0.2f64..2.0,
            prop::collection::vec((1..n, 1..n, 0.1f64..2.0), 0..2 * n),
            any::<bool>(),
        )
            .prop_map(move |(hub, extra, directed)| {
                let mut edges: Vec<_> = (1..n).map(|i| (i, 0, hub)).collect();
                edges.extend(extra.into_iter().filter(|(u, v, _)| u != v));
                if !directed {
                    let back: Vec<_> = edges.iter().map(|&(u, v, w)| (v, u, w)).collect();
                    edges.extend(back);
                }
                EdgeList { directed, n, edges }
            })
    })
}

fn rel_defect(root: &DenseMatrix, l: &DenseMatrix) -> f64 {
    root.matmul(root).sub(l).norm1() / l.norm1()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_one_root_squares_to_laplacian(g in graph()) {
        let l = laplacian_from_edges(&g);
        let v = suggest_v(&l).unwrap();
        let d = decompose(&l, &v).unwrap();
        let r = rank_one_sqrt(&d, DEFAULT_DB_TOL).unwrap();
        prop_assert!(rel_defect(&r.root(), &l) <= 1e-10);
        prop_assert!((r.y.norm1() - d.nu).abs() <= 1e-10 * d.nu.max(1.0));
        let root_rows = r.root().row_sums();
        prop_assert!(root_rows.iter().all(|s| s.abs() <= 1e-10 * l.norm1()));
    }

    #[test]
    fn double_root_newton_recovers_y(g in graph()) {
        let l = laplacian_from_edges(&g);
        let d = decompose(&l, &suggest_v(&l).unwrap()).unwrap();
        let r = rank_one_sqrt(&d, DEFAULT_DB_TOL).unwrap();
        let x = solve_lap_equation(&d, &r, &SolverConfig::default()).unwrap();
        prop_assert!(x.converged(), "{}", x.status);
        prop_assert!(x.x.dist1(&r.y) <= 1e-8, "{:?} vs {:?}", x.x, r.y);
    }
}

#[test]
fn binomial_and_denman_beavers_agree() {
    let l = DenseMatrix::from_rows(&[
        vec![3.0, -1.0, -1.0, -1.0],
        vec![-1.0, 1.0, 0.0, 0.0],
        vec![-1.0, 0.0, 2.0, -1.0],
        vec![-1.0, 0.0, -1.0, 2.0],
    ])
    .unwrap();
    let d = decompose(&l, &Vector::from(vec![1.0, 0.0, 0.0, 0.0])).unwrap();
    let db = rank_one_sqrt(&d, DEFAULT_DB_TOL).unwrap().root();
    let bin = binomial_sqrt(&d, 1e-12, 2_000_000).unwrap();
    let gap = bin.root().sub(&db).norm1();
    assert!(gap <= 1e-5, "||binomial - db||_1 = {gap:e}");
    assert!(rel_defect(&bin.root(), &l) <= 1e-5);
}
