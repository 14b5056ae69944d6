use super::{norm, signed_volume, sub, BoundaryTri, Mesh, Point};

/// Red refinement: every tetrahedron is split into eight children through its
/// edge midpoints; the inner octahedron is cut along its shortest diagonal.
///
/// Parent vertices keep their indices and the midpoint of edge `e` becomes
/// vertex `num_vertices + e`. Child boundary triangles inherit the parent tag.
pub fn refine_uniform(mesh: &Mesh) -> Mesh {
    let nv = mesh.num_vertices();
    let mut vertices: Vec<Point> = mesh.vertices().to_vec();
    for e in mesh.edges() {
        let a = mesh.vertices()[e[0]];
        let b = mesh.vertices()[e[1]];
        vertices.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])]);
    }
    let mid = |a: usize, b: usize| nv + mesh.edge_index(a, b).expect("edge exists");

    let mut tets = Vec::with_capacity(8 * mesh.num_tets());
    let mut push = |mut t: [usize; 4], verts: &[Point]| {
        if signed_volume(&verts[t[0]], &verts[t[1]], &verts[t[2]], &verts[t[3]]) < 0.0 {
            t.swap(2, 3);
        }
        tets.push(t);
    };
    for t in mesh.tets() {
        let [v0, v1, v2, v3] = *t;
        let m01 = mid(v0, v1);
        let m02 = mid(v0, v2);
        let m03 = mid(v0, v3);
        let m12 = mid(v1, v2);
        let m13 = mid(v1, v3);
        let m23 = mid(v2, v3);
        push([v0, m01, m02, m03], &vertices);
        push([m01, v1, m12, m13], &vertices);
        push([m02, m12, v2, m23], &vertices);
        push([m03, m13, m23, v3], &vertices);

        // Opposite vertex pairs of the octahedron.
        let pairs = [[m01, m23], [m02, m13], [m03, m12]];
        let len = |p: &[usize; 2]| norm(&sub(&vertices[p[0]], &vertices[p[1]]));
        let mut best = 0;
        for k in 1..3 {
            if len(&pairs[k]) < len(&pairs[best]) - 1e-12 * len(&pairs[best]) {
                best = k;
            }
        }
        let [a, b] = pairs[best];
        let [p, q] = [pairs[(best + 1) % 3], pairs[(best + 2) % 3]];
        let ring = [p[0], q[0], p[1], q[1]];
        for k in 0..4 {
            push([a, b, ring[k], ring[(k + 1) % 4]], &vertices);
        }
    }

    let mut boundary = Vec::with_capacity(4 * mesh.boundary().len());
    for bt in mesh.boundary() {
        let [p, q, r] = bt.vertices;
        let (pq, pr, qr) = (mid(p, q), mid(p, r), mid(q, r));
        for tri in [[p, pq, pr], [pq, q, qr], [pr, qr, r], [pq, qr, pr]] {
            boundary.push(BoundaryTri { vertices: tri, tag: bt.tag });
        }
    }
    Mesh::build(vertices, tets, boundary)
}
