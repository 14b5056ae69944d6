//! Exactness and conformity of the discrete complex on random data.

use mixbc::assembly::{curlcurl, mass_edge, stiffness_node};
use mixbc::fespace::{interpolate_edge, interpolate_nodal};
use mixbc::mesh::{generate_cube, refine_uniform, BoxFace};
use mixbc::{DofMaps, IncidenceOperators, MaterialField, Mesh, Side};
use nalgebra::Matrix3;
use proptest::prelude::*;

fn mesh() -> Mesh {
    refine_uniform(&generate_cube(1, &[BoxFace::XMinus, BoxFace::ZPlus].into_iter().collect()).unwrap())
}

fn spd(entries: &[f64]) -> Matrix3<f64> {
    let a = Matrix3::from_column_slice(&entries[..9]);
    let s = a * a.transpose() + Matrix3::identity() * 0.2;
    (s + s.transpose()) * 0.5
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Interpolating the gradient of a quadratic equals the discrete gradient
    /// of its nodal interpolant.
    #[test]
    fn gradient_commutes_with_interpolation(c in proptest::collection::vec(-2.0f64..2.0, 10)) {
        let m = mesh();
        let p = |x: [f64; 3]| {
            c[0] + c[1] * x[0] + c[2] * x[1] + c[3] * x[2]
                + c[4] * x[0] * x[0] + c[5] * x[1] * x[1] + c[6] * x[2] * x[2]
                + c[7] * x[0] * x[1] + c[8] * x[1] * x[2] + c[9] * x[0] * x[2]
        };
        let grad = |x: [f64; 3]| [
            c[1] + 2.0 * c[4] * x[0] + c[7] * x[1] + c[9] * x[2],
            c[2] + 2.0 * c[5] * x[1] + c[7] * x[0] + c[8] * x[2],
            c[3] + 2.0 * c[6] * x[2] + c[8] * x[1] + c[9] * x[0],
        ];
        let ops = IncidenceOperators::build(&m);
        let lhs = ops.g.to_f64().matvec(&interpolate_nodal(&m, p));
        let rhs = interpolate_edge(&m, grad);
        for (a, b) in lhs.iter().zip(&rhs) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    /// `K G = 0`, `L_ε = Gᵀ M_ε G` and symmetry of `M_ε` for random `ε`.
    #[test]
    fn forms_are_compatible(entries in proptest::collection::vec(-1.0f64..1.0, 9)) {
        let m = mesh();
        let eps = MaterialField::constant(&m, spd(&entries)).unwrap();
        let ops = IncidenceOperators::build(&m);
        let g = ops.g.to_f64();
        let me = mass_edge(&m, &eps);
        prop_assert!(me.symmetry_defect() <= 1e-14 * me.max_abs());
        let kg = curlcurl(&m, Some(&eps.inverted())).matmul(&g);
        prop_assert!(kg.max_abs() <= 1e-12);
        let gtmg = g.transpose().matmul(&me).matmul(&g);
        let l = stiffness_node(&m, &eps);
        prop_assert!(gtmg.add_scaled(&l, -1.0).max_abs() <= 1e-13 * l.max_abs());
    }

    /// Restricted complexes stay exact for every boundary partition.
    #[test]
    fn restricted_sequence_is_exact(bits in 0u8..64) {
        let tau = BoxFace::ALL.into_iter().enumerate().filter(|(i, _)| bits & (1 << i) != 0).map(|(_, f)| f).collect();
        let m = generate_cube(2, &tau).unwrap();
        let maps = DofMaps::build(&m);
        let ops = IncidenceOperators::build(&m);
        for side in [Side::Tau, Side::Nu] {
            prop_assert_eq!(ops.c_restricted(&maps, side).matmul(&ops.g_restricted(&maps, side)).max_abs(), 0);
            prop_assert_eq!(ops.d_restricted(&maps, side).matmul(&ops.c_restricted(&maps, side)).max_abs(), 0);
        }
    }
}
