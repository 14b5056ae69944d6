use std::collections::BTreeSet;

use mixbc::mesh::{generate_cube, load_meshlite, refine_uniform, save_meshlite, BoxFace};
use mixbc::BoundaryTag;
use proptest::prelude::*;

fn face_subset() -> impl Strategy<Value = BTreeSet<BoxFace>> {
    proptest::bits::u8::between(0, 6)
        .prop_map(|bits| BoxFace::ALL.into_iter().enumerate().filter(|(i, _)| bits & (1 << i) != 0).map(|(_, f)| f).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cube_counts_and_tag_partition(n in 1usize..=3, tau in face_subset()) {
        let m = generate_cube(n, &tau).unwrap();
        prop_assert_eq!(m.num_vertices(), (n + 1).pow(3));
        prop_assert_eq!(m.num_tets(), 6 * n.pow(3));
        prop_assert_eq!(m.count_tag(BoundaryTag::Tau), 2 * n * n * tau.len());
        prop_assert_eq!(m.count_tag(BoundaryTag::Nu), 2 * n * n * (6 - tau.len()));
        // Euler characteristic of a ball.
        let chi = m.num_vertices() as i64 - m.num_edges() as i64 + m.num_faces() as i64 - m.num_tets() as i64;
        prop_assert_eq!(chi, 1);
        prop_assert!(m.validate().is_valid());
    }

    #[test]
    fn refinement_preserves_measure_and_tags(n in 1usize..=2, tau in face_subset()) {
        let m = generate_cube(n, &tau).unwrap();
        let r = refine_uniform(&m);
        prop_assert_eq!(r.num_tets(), 8 * m.num_tets());
        prop_assert_eq!(r.count_tag(BoundaryTag::Tau), 4 * m.count_tag(BoundaryTag::Tau));
        prop_assert!((r.total_volume() - m.total_volume()).abs() <= 1e-14 * m.total_volume());
        prop_assert!((r.boundary_area() - m.boundary_area()).abs() <= 1e-14 * m.boundary_area());
        prop_assert!(r.validate().is_valid());
    }

    #[test]
    fn meshlite_round_trip(n in 1usize..=2, tau in face_subset()) {
        let m = refine_uniform(&generate_cube(n, &tau).unwrap());
        let text = save_meshlite(&m);
        let back = load_meshlite(&text).unwrap();
        prop_assert_eq!(back.vertices(), m.vertices());
        prop_assert_eq!(back.tets(), m.tets());
        prop_assert_eq!(back.boundary(), m.boundary());
        prop_assert_eq!(save_meshlite(&back), text);
    }
}
