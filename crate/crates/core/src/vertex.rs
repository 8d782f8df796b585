//! Vertex welding: greedy epsilon clustering of vertex instances over a
//! k-d tree, with each class collapsed onto its centroid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::partition::ClassPartition;

/// Dense point set stored point-major: point `i` occupies
/// `coords[i * dim..(i + 1) * dim]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates do not form points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(k) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(k / dim));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points3(points: &[[f64; 3]]) -> Result<Self> {
        Self::new(3, points.iter().flatten().copied().collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Squared Euclidean distance. Range membership everywhere in the crate is
/// decided by `squared_distance(p, q) <= r * r`.
pub fn squared_distance(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Positive clustering radius, in model units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT: f64 = 1e-6;

    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon > 0.0 && epsilon.is_finite() {
            Ok(Self(epsilon))
        } else {
            Err(Error::InvalidTolerance(epsilon))
        }
    }

    pub fn epsilon(self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self(Self::DEFAULT)
    }
}

const LEAF_SIZE: usize = 8;

/// Static k-d tree answering exact closed-ball range queries.
///
/// The tree is implicit: `order` is a permutation of point indices, and the
/// subtree over `order[lo..hi]` splits at its median `mid` on axis
/// `depth % dim`, with smaller coordinates to the left.
#[derive(Debug)]
pub struct KdTree<'a> {
    cloud: &'a PointCloud,
    order: Vec<usize>,
}

/// The spatial index used for vertex welding.
pub type SpatialIndex<'a> = KdTree<'a>;

impl<'a> KdTree<'a> {
    pub fn build(cloud: &'a PointCloud) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let mut order: Vec<usize> = (0..cloud.len()).collect();
        split(cloud, &mut order, 0);
        Ok(Self { cloud, order })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Indices of all points within distance `radius` of `query`, ascending.
    /// A negative or NaN radius matches nothing.
    pub fn range_query(&self, query: &[f64], radius: f64) -> Vec<usize> {
        assert_eq!(query.len(), self.cloud.dim(), "query dimension");
        let mut found = Vec::new();
        if radius >= 0.0 {
            self.collect(
                query,
                radius,
                radius * radius,
                0,
                self.order.len(),
                0,
                &mut found,
            );
        }
        found.sort_unstable();
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn collect(
        &self,
        query: &[f64],
        radius: f64,
        radius_sq: f64,
        lo: usize,
        hi: usize,
        depth: usize,
        found: &mut Vec<usize>,
    ) {
        if hi - lo <= LEAF_SIZE {
            found.extend(
                self.order[lo..hi]
                    .iter()
                    .filter(|&&i| squared_distance(self.cloud.point(i), query) <= radius_sq),
            );
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let pivot = self.order[mid];
        let p = self.cloud.point(pivot);
        if squared_distance(p, query) <= radius_sq {
            found.push(pivot);
        }
        let axis = depth % self.cloud.dim();
        let diff = query[axis] - p[axis];
        if diff <= radius {
            self.collect(query, radius, radius_sq, lo, mid, depth + 1, found);
        }
        if diff >= -radius {
            self.collect(query, radius, radius_sq, mid + 1, hi, depth + 1, found);
        }
    }
}

fn split(cloud: &PointCloud, order: &mut [usize], depth: usize) {
    if order.len() <= LEAF_SIZE {
        return;
    }
    let axis = depth % cloud.dim();
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        cloud.point(a)[axis].total_cmp(&cloud.point(b)[axis])
    });
    let (left, right) = order.split_at_mut(mid);
    split(cloud, left, depth + 1);
    split(cloud, &mut right[1..], depth + 1);
}

/// Cluster vertex instances into epsilon-classes and replace each class by
/// its centroid.
///
/// Points are scanned in index order. An unvisited point seeds a new class
/// made of itself followed by every still-unvisited point within `tol` of
/// it, in ascending index order; all of them become visited. Range queries
/// are issued in parallel but the class assembly is the sequential scan, so
/// the result does not depend on the thread count.
pub fn vertex_congruence(
    cloud: &PointCloud,
    tol: Tolerance,
) -> Result<(PointCloud, ClassPartition)> {
    let index = KdTree::build(cloud)?;
    let eps = tol.epsilon();
    let neighbours: Vec<Vec<usize>> = (0..cloud.len())
        .into_par_iter()
        .map(|i| index.range_query(cloud.point(i), eps))
        .collect();
    Ok(greedy_classes(cloud, &neighbours))
}

/// Seed-order greedy scan over precomputed neighbour lists, then centroids.
pub(crate) fn greedy_classes(
    cloud: &PointCloud,
    neighbours: &[Vec<usize>],
) -> (PointCloud, ClassPartition) {
    let n = cloud.len();
    let mut visited = vec![false; n];
    let mut classes = Vec::new();
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        visited[seed] = true;
        let mut class = vec![seed];
        for &j in &neighbours[seed] {
            if !visited[j] {
                visited[j] = true;
                class.push(j);
            }
        }
        classes.push(class);
    }
    let dim = cloud.dim();
    let mut centroids = Vec::with_capacity(classes.len() * dim);
    for class in &classes {
        let mut sum = vec![0.0; dim];
        for &i in class {
            for (s, c) in sum.iter_mut().zip(cloud.point(i)) {
                *s += c;
            }
        }
        centroids.extend(sum.into_iter().map(|s| s / class.len() as f64));
    }
    let partition = ClassPartition {
        size: n,
        classes,
        dropped: Vec::new(),
    };
    let centroids = PointCloud {
        dim,
        coords: centroids,
    };
    (centroids, partition)
}
