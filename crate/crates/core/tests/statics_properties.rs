//! Linearity of the static solver and control of the harmonic moments.

use mixbc::mesh::{generate_cube, BoxFace};
use mixbc::{Mesh, MaterialField, QuadField, ScalarQuadField, StaticProblem, StaticSolver};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Opposite tangential faces: one harmonic field.
fn mesh() -> Mesh {
    generate_cube(2, &[BoxFace::XMinus, BoxFace::XPlus].into_iter().collect()).unwrap()
}

fn random_problem(solver: &StaticSolver, rng: &mut ChaCha8Rng) -> StaticProblem {
    let m = solver.mesh();
    let eps = &solver.dec.eps;
    let mut p = StaticProblem::homogeneous(m, eps, solver.cohomology_dim());
    let x: Vec<f64> = (0..m.num_edges()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    p.f = QuadField::curl_of_edge(m, &x);
    p.g = ScalarQuadField::from_cell_constants(&(0..m.num_tets()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
    p.e_tau = x.clone();
    p.e_nu = (0..m.num_edges()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    p.alpha = (0..solver.cohomology_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    p
}

fn combine(a: &StaticProblem, s: f64, b: &StaticProblem) -> StaticProblem {
    let lin = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(u, v)| u + s * v).collect::<Vec<_>>();
    StaticProblem {
        f: a.f.combine(&b.f, s),
        g: a.g.combine(&b.g, s),
        e_tau: lin(&a.e_tau, &b.e_tau),
        e_nu: lin(&a.e_nu, &b.e_nu),
        alpha: lin(&a.alpha, &b.alpha),
        eps: a.eps.clone(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn solution_is_linear_in_data(seed in any::<u64>(), s in -2.0f64..2.0) {
        let m = mesh();
        let eps = MaterialField::scalar(&m, 1.5).unwrap();
        let solver = StaticSolver::new(&m, &eps).unwrap();
        prop_assert_eq!(solver.cohomology_dim(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_problem(&solver, &mut rng), random_problem(&solver, &mut rng));
        let (ea, eb) = (solver.solve(&a, 1e-12).unwrap(), solver.solve(&b, 1e-12).unwrap());
        let eab = solver.solve(&combine(&a, s, &b), 1e-12).unwrap();
        let expected = ea.field.combine(&eb.field, s);
        let scale = ea.field.norm(&m, None) + s.abs() * eb.field.norm(&m, None);
        prop_assert!(eab.field.sub(&expected).norm(&m, None) <= 1e-9 * scale);
    }

    /// Shifting the prescribed moments by `δ` adds `δ·D` to the solution.
    #[test]
    fn moments_shift_by_harmonic_field(seed in any::<u64>(), delta in -3.0f64..3.0) {
        let m = mesh();
        let eps = MaterialField::identity(&m);
        let solver = StaticSolver::new(&m, &eps).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_problem(&solver, &mut rng);
        let mut q = p.clone();
        q.alpha[0] += delta;
        let (ep, eq) = (solver.solve(&p, 1e-12).unwrap(), solver.solve(&q, 1e-12).unwrap());
        let d = QuadField::from_edge(&m, &solver.dec.cohomology.vectors[0]);
        let diff = eq.field.sub(&ep.field).sub(&d.scale(delta));
        prop_assert!(diff.norm(&m, None) <= 1e-9 * (1.0 + ep.field.norm(&m, None)));
        let moments = solver.dec.cohomology.moments(&solver.dec.forms.mass_edge, &eq.e);
        prop_assert!((moments[0] - q.alpha[0]).abs() <= 1e-9 * (1.0 + q.alpha[0].abs()));
    }
}
