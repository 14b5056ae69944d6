use mixbc::sparse::{cg, solve_saddle, CsrMatrix};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_sparse(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> CsrMatrix {
    let mut trip = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if rng.gen_bool(density) {
                trip.push((i, j, rng.gen_range(-1.0..1.0)));
            }
        }
    }
    CsrMatrix::from_triplets(rows, cols, trip)
}

fn spd(rng: &mut ChaCha8Rng, n: usize) -> CsrMatrix {
    let b = random_sparse(rng, n, n, 0.2);
    b.transpose().matmul(&b).add_scaled(&CsrMatrix::identity(n), 0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transpose_and_product_match_dense(seed in any::<u64>(), r in 1usize..12, c in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_sparse(&mut rng, r, c, 0.3);
        let b = random_sparse(&mut rng, c, r, 0.3);
        prop_assert_eq!(a.transpose().transpose().to_dense(), a.to_dense());
        let diff = a.matmul(&b).to_dense() - a.to_dense() * b.to_dense();
        prop_assert!(diff.amax() <= 1e-14);
        let x: Vec<f64> = (0..c).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dense = a.to_dense() * DVector::from_vec(x.clone());
        for (s, d) in a.matvec(&x).iter().zip(dense.iter()) {
            prop_assert!((s - d).abs() <= 1e-14);
        }
    }

    #[test]
    fn cg_solves_spd_systems(seed in any::<u64>(), n in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = spd(&mut rng, n);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (x, rep) = cg(&a, &b, 1e-12, 10 * n + 50, None).unwrap();
        prop_assert!(rep.converged);
        let exact = a.to_dense().cholesky().unwrap().solve(&DVector::from_vec(b));
        let err = (DVector::from_vec(x) - &exact).amax();
        prop_assert!(err <= 1e-8 * (1.0 + exact.amax()));
    }

    #[test]
    fn saddle_satisfies_constraints(seed in any::<u64>(), n in 4usize..30, k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = spd(&mut rng, n);
        let bm = CsrMatrix::from_dense(&DMatrix::from_fn(k, n, |_, _| rng.gen_range(-1.0..1.0)));
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (x, y, _) = solve_saddle(&a, &bm, &f, &g, 1e-12).unwrap();
        let bx = bm.matvec(&x);
        for (u, v) in bx.iter().zip(&g) {
            prop_assert!((u - v).abs() <= 1e-8);
        }
        let mut r = a.matvec(&x);
        for (ri, (bi, fi)) in r.iter_mut().zip(bm.matvec_transpose(&y).iter().zip(&f)) {
            *ri += bi - fi;
        }
        prop_assert!(r.iter().fold(0.0f64, |m, v| m.max(v.abs())) <= 1e-8);
    }
}
