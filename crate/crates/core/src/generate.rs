//! Synthetic accumulator complexes: cuboid grids whose quadrilateral faces
//! are exploded into independent local complexes, moved by a seeded rigid
//! motion and jittered per vertex instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::congruence::AccumulatorComplex;
use crate::error::{Error, Result};
use crate::sparse::{Coeff, SignedSparseMatrix};
use crate::vertex::{PointCloud, Tolerance};

/// Local layout of one exploded quad with corners `a, b, c, d`
/// (`b` and `c` adjacent to `a`, `d` opposite): edges `a→b`, `c→d`, `a→c`,
/// `b→d`, and the face `e₁ - e₂ - e₃ + e₄`.
const QUAD_EDGES: [(usize, usize); 4] = [(0, 1), (2, 3), (0, 2), (1, 3)];
const QUAD_FACE: [Coeff; 4] = [1, -1, -1, 1];

#[derive(Clone, Debug, PartialEq)]
pub struct GridOptions {
    /// Number of cells along each axis.
    pub cells: [usize; 3],
    /// Cell edge length; `None` draws it uniformly from `[0.5, 1.5)`.
    pub cell_size: Option<f64>,
    /// Maximum per-instance displacement; must stay below `epsilon / 2`.
    pub jitter: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl GridOptions {
    pub fn grid(cells: [usize; 3], seed: u64) -> Self {
        Self {
            cells,
            cell_size: Some(1.0),
            jitter: 0.0,
            epsilon: Tolerance::DEFAULT,
            seed,
        }
    }

    /// A single cube of random size, like the classic welding example.
    pub fn unit_cube(seed: u64) -> Self {
        Self {
            cells: [1, 1, 1],
            cell_size: None,
            ..Self::grid([1, 1, 1], seed)
        }
    }

    pub fn with_jitter(mut self, jitter: f64) -> Self {
        self.jitter = jitter;
        self
    }
}

/// Closed-form cell counts `[V, E, F]` of the 2-skeleton of a `p × q × r`
/// cuboid grid.
pub fn grid_counts([p, q, r]: [usize; 3]) -> [usize; 3] {
    let v = (p + 1) * (q + 1) * (r + 1);
    let e = p * (q + 1) * (r + 1) + q * (p + 1) * (r + 1) + r * (p + 1) * (q + 1);
    let f = p * q * (r + 1) + p * r * (q + 1) + q * r * (p + 1);
    [v, e, f]
}

/// Rotation followed by translation.
#[derive(Clone, Debug, PartialEq)]
pub struct RigidMotion {
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
}

impl RigidMotion {
    /// Uniformly random rotation (normalised Gaussian quaternion) and a
    /// translation in `[0, 1)³`.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let mut q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        q.iter_mut().for_each(|x| *x /= norm);
        let [w, x, y, z] = q;
        let rotation = [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ];
        let translation = std::array::from_fn(|_| rng.random::<f64>());
        Self {
            rotation,
            translation,
        }
    }

    pub fn apply(&self, p: [f64; 3]) -> [f64; 3] {
        std::array::from_fn(|i| {
            (0..3).map(|j| self.rotation[i][j] * p[j]).sum::<f64>() + self.translation[i]
        })
    }

    pub fn apply_inverse(&self, p: [f64; 3]) -> [f64; 3] {
        let d: [f64; 3] = std::array::from_fn(|i| p[i] - self.translation[i]);
        std::array::from_fn(|i| (0..3).map(|j| self.rotation[j][i] * d[j]).sum())
    }
}

/// Random displacement of length below `max`.
fn jitter_offset<R: Rng>(rng: &mut R, max: f64) -> [f64; 3] {
    let dir: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    let len = max * rng.random::<f64>();
    if norm == 0.0 {
        return [0.0; 3];
    }
    dir.map(|x| x / norm * len)
}

fn check_options(opts: &GridOptions, cell_size: f64) -> Result<()> {
    if opts.cells.contains(&0) {
        return Err(Error::InvalidParameter(
            "grid sizes must be at least 1".into(),
        ));
    }
    let eps = Tolerance::new(opts.epsilon)?.epsilon();
    if !(opts.jitter >= 0.0 && opts.jitter < eps / 2.0) {
        return Err(Error::InvalidParameter(format!(
            "jitter {} must lie in [0, epsilon/2) = [0, {})",
            opts.jitter,
            eps / 2.0
        )));
    }
    if cell_size.is_nan() || cell_size <= 10.0 * eps {
        return Err(Error::InvalidParameter(format!(
            "edge length {cell_size} must exceed 10 * epsilon = {}",
            10.0 * eps
        )));
    }
    Ok(())
}

/// Generate the exploded 2-skeleton of a cuboid grid.
///
/// Faces are listed by normal axis (x, y, z), then by level along that axis,
/// then by position in the plane. Each face owns four fresh vertex instances,
/// four local edges and one local face row laid out as in [`QUAD_EDGES`] and
/// [`QUAD_FACE`]. The same seed always yields the same complex.
pub fn exploded_grid(opts: &GridOptions) -> Result<AccumulatorComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let cell_size = match opts.cell_size {
        Some(s) => s,
        None => rng.random_range(0.5..1.5),
    };
    check_options(opts, cell_size)?;
    let motion = RigidMotion::random(&mut rng);
    let n = opts.cells;

    let mut instances = Vec::new();
    let mut d0 = Vec::new();
    let mut d1 = Vec::new();
    for normal in 0..3 {
        let (i, j) = match normal {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for level in 0..=n[normal] {
            for u in 0..n[i] {
                for v in 0..n[j] {
                    let corner = |du: usize, dv: usize| {
                        let mut g = [0usize; 3];
                        g[normal] = level;
                        g[i] = u + du;
                        g[j] = v + dv;
                        motion.apply(g.map(|k| k as f64 * cell_size))
                    };
                    let face = d1.len() / 4;
                    let base = instances.len();
                    for (du, dv) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                        let mut p = corner(du, dv);
                        if opts.jitter > 0.0 {
                            let off = jitter_offset(&mut rng, opts.jitter);
                            p.iter_mut().zip(off).for_each(|(x, o)| *x += o);
                        }
                        instances.push(p);
                    }
                    for (k, ((tail, head), coeff)) in
                        QUAD_EDGES.into_iter().zip(QUAD_FACE).enumerate()
                    {
                        let edge = 4 * face + k;
                        d0.push((edge, base + tail, -1));
                        d0.push((edge, base + head, 1));
                        d1.push((face, edge, coeff));
                    }
                }
            }
        }
    }
    let nfaces = d1.len() / 4;
    let vertices = PointCloud::from_points3(&instances)?;
    let delta0 = SignedSparseMatrix::from_triples(4 * nfaces, instances.len(), d0)?;
    let delta1 = SignedSparseMatrix::from_triples(nfaces, 4 * nfaces, d1)?;
    AccumulatorComplex::new(vertices, delta0, delta1)
}

/// Explode a global complex into one local block per face.
///
/// Every face gets private copies of its vertices (in ascending global
/// order) and edges (in ascending global order), keeping all orientations.
/// Edges and vertices not reached by any face are not reproduced.
pub fn explode_faces(
    vertices: &PointCloud,
    delta0: &SignedSparseMatrix,
    delta1: &SignedSparseMatrix,
) -> Result<AccumulatorComplex> {
    let edges = delta0.transpose();
    let faces = delta1.transpose();
    let mut coords = Vec::new();
    let mut d0 = Vec::new();
    let mut d1 = Vec::new();
    let mut nedges = 0;
    for f in 0..faces.ncols() {
        let (face_edges, face_coeffs) = faces.column(f);
        let mut verts: Vec<usize> = face_edges
            .iter()
            .flat_map(|&e| edges.column(e).0.iter().copied())
            .collect();
        verts.sort_unstable();
        verts.dedup();
        let base = coords.len() / vertices.dim();
        for &v in &verts {
            coords.extend_from_slice(vertices.point(v));
        }
        for (&e, &c) in face_edges.iter().zip(face_coeffs) {
            let (ends, signs) = edges.column(e);
            for (&v, &s) in ends.iter().zip(signs) {
                let local = verts.binary_search(&v).expect("endpoint listed");
                d0.push((nedges, base + local, s));
            }
            d1.push((f, nedges, c));
            nedges += 1;
        }
    }
    let points = PointCloud::new(vertices.dim(), coords)?;
    let delta0 = SignedSparseMatrix::from_triples(nedges, points.len(), d0)?;
    let delta1 = SignedSparseMatrix::from_triples(faces.ncols(), nedges, d1)?;
    AccumulatorComplex::new(points, delta0, delta1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_formula() {
        assert_eq!(grid_counts([1, 1, 1]), [8, 12, 6]);
        assert_eq!(grid_counts([2, 2, 2]), [27, 54, 36]);
    }

    #[test]
    fn cube_has_fixture_shape() {
        let acc = exploded_grid(&GridOptions::unit_cube(3)).unwrap();
        assert_eq!(acc.counts(), [24, 24, 6]);
        assert_eq!(acc.delta0().nnz(), 48);
        assert_eq!(acc.delta1().nnz(), 24);
    }

    #[test]
    fn grid_222_instances() {
        let acc = exploded_grid(&GridOptions::grid([2, 2, 2], 1)).unwrap();
        assert_eq!(acc.counts(), [144, 144, 36]);
    }

    #[test]
    fn same_seed_same_complex() {
        let a = exploded_grid(&GridOptions::grid([2, 1, 3], 11).with_jitter(1e-7)).unwrap();
        let b = exploded_grid(&GridOptions::grid([2, 1, 3], 11).with_jitter(1e-7)).unwrap();
        let c = exploded_grid(&GridOptions::grid([2, 1, 3], 12).with_jitter(1e-7)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn parameter_checks() {
        assert!(exploded_grid(&GridOptions::grid([0, 1, 1], 0)).is_err());
        let eps = Tolerance::DEFAULT;
        assert!(exploded_grid(&GridOptions::grid([1, 1, 1], 0).with_jitter(eps / 2.0)).is_err());
        assert!(exploded_grid(&GridOptions::grid([1, 1, 1], 0).with_jitter(-1.0)).is_err());
        let tiny = GridOptions {
            cell_size: Some(5.0 * eps),
            ..GridOptions::grid([1, 1, 1], 0)
        };
        assert!(exploded_grid(&tiny).is_err());
    }

    #[test]
    fn rigid_motion_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = RigidMotion::random(&mut rng);
        let p = [0.3, -2.0, 7.5];
        let back = m.apply_inverse(m.apply(p));
        for (a, b) in p.iter().zip(back) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
