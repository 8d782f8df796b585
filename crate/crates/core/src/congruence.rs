//! Chain complex congruence: reduce the block-diagonal accumulators
//! `[Δ₀]`, `[Δ₁]` to the global coboundaries `[δ₀]`, `[δ₁]`.
//!
//! Two engines are provided. The array-of-arrays engine (`aa`) rewrites every
//! local cell as a sorted list of facet classes and deduplicates those lists;
//! it discards orientation. The sparse engine merges signed columns per lower
//! class and deduplicates rows up to a global sign, so the output keeps a
//! consistent orientation and satisfies `δ₁ δ₀ = 0`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::partition::{ClassPartition, SignedClassMap};
use crate::sparse::{ColumnVector, Sign, SignedSparseMatrix};
use crate::vertex::{vertex_congruence, PointCloud, Tolerance};

/// Cells listed by their facets (edges by vertices, faces by edges), each
/// facet list sorted ascending without duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CellArray {
    pub cells: Vec<Vec<usize>>,
}

impl CellArray {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Unsigned row patterns of a coboundary matrix.
    pub fn from_rows(delta: &SignedSparseMatrix) -> Self {
        let t = delta.transpose();
        let cells = (0..t.ncols()).map(|r| t.column(r).0.to_vec()).collect();
        Self { cells }
    }

    /// Check sortedness, uniqueness and facet range.
    pub fn check(&self, num_facets: usize) -> Result<()> {
        for (k, cell) in self.cells.iter().enumerate() {
            if cell.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidQuotient(format!(
                    "cell {} facets are not strictly ascending",
                    k + 1
                )));
            }
            if cell.last().is_some_and(|&f| f >= num_facets) {
                return Err(Error::InvalidQuotient(format!(
                    "cell {} refers to facet beyond {num_facets}",
                    k + 1
                )));
            }
        }
        Ok(())
    }

    /// Lexicographically sorted copy.
    pub fn sorted(&self) -> Vec<Vec<usize>> {
        let mut cells = self.cells.clone();
        cells.sort();
        cells
    }
}

/// Union of independently built local chain complexes, before merging.
#[derive(Clone, Debug, PartialEq)]
pub struct AccumulatorComplex {
    vertices: PointCloud,
    delta0: SignedSparseMatrix,
    delta1: SignedSparseMatrix,
}

impl AccumulatorComplex {
    /// Validates: `Δ₀` is edges × vertex instances with one `-1` and one
    /// `+1` per row, `Δ₁` is faces × edges with at least three entries per
    /// row.
    pub fn new(
        vertices: PointCloud,
        delta0: SignedSparseMatrix,
        delta1: SignedSparseMatrix,
    ) -> Result<Self> {
        if delta0.ncols() != vertices.len() {
            return Err(Error::InvalidAccumulator(format!(
                "delta0 has {} columns but there are {} vertices",
                delta0.ncols(),
                vertices.len()
            )));
        }
        if delta1.ncols() != delta0.nrows() {
            return Err(Error::InvalidAccumulator(format!(
                "delta1 has {} columns but delta0 has {} rows",
                delta1.ncols(),
                delta0.nrows()
            )));
        }
        let rows0 = delta0.transpose();
        for e in 0..rows0.ncols() {
            let mut vals = rows0.column(e).1.to_vec();
            vals.sort_unstable();
            if vals != [-1, 1] {
                return Err(Error::InvalidAccumulator(format!(
                    "delta0 row {} must hold exactly one -1 and one +1",
                    e + 1
                )));
            }
        }
        let rows1 = delta1.transpose();
        for f in 0..rows1.ncols() {
            let (_, vals) = rows1.column(f);
            if vals.len() < 3 || vals.iter().any(|v| v.abs() != 1) {
                return Err(Error::InvalidAccumulator(format!(
                    "delta1 row {} must hold at least three entries in {{-1, +1}}",
                    f + 1
                )));
            }
        }
        Ok(Self {
            vertices,
            delta0,
            delta1,
        })
    }

    pub fn vertices(&self) -> &PointCloud {
        &self.vertices
    }

    pub fn delta0(&self) -> &SignedSparseMatrix {
        &self.delta0
    }

    pub fn delta1(&self) -> &SignedSparseMatrix {
        &self.delta1
    }

    /// Cell counts `[#vertex instances, #local edges, #local faces]`.
    pub fn counts(&self) -> [usize; 3] {
        [
            self.vertices.len(),
            self.delta0.nrows(),
            self.delta1.nrows(),
        ]
    }
}

/// The merged global complex.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientComplex {
    pub vertices: PointCloud,
    pub ev: CellArray,
    pub fe: CellArray,
    pub delta0: Option<SignedSparseMatrix>,
    pub delta1: Option<SignedSparseMatrix>,
    pub vclasses: ClassPartition,
    pub eclasses: ClassPartition,
    pub fclasses: ClassPartition,
    pub edge_signs: Option<Vec<Vec<Sign>>>,
    pub face_signs: Option<Vec<Vec<Sign>>>,
}

impl QuotientComplex {
    /// Cell counts `[#V, #E, #F]`.
    pub fn counts(&self) -> [usize; 3] {
        [self.vertices.len(), self.ev.len(), self.fe.len()]
    }

    /// Re-expand into an accumulator whose blocks are single global cells.
    /// Requires the signed operators.
    pub fn to_accumulator(&self) -> Result<AccumulatorComplex> {
        match (&self.delta0, &self.delta1) {
            (Some(d0), Some(d1)) => {
                AccumulatorComplex::new(self.vertices.clone(), d0.clone(), d1.clone())
            }
            _ => Err(Error::InvalidQuotient(
                "quotient carries no signed operators".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    /// Array of arrays; sign-lossy.
    ArrayOfArrays,
    #[default]
    Sparse,
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aa" => Ok(Engine::ArrayOfArrays),
            "sparse" => Ok(Engine::Sparse),
            other => Err(Error::InvalidParameter(format!(
                "unknown engine {other:?}, expected aa or sparse"
            ))),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::ArrayOfArrays => "aa",
            Engine::Sparse => "sparse",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MergeOptions {
    pub tolerance: Tolerance,
    pub engine: Engine,
    /// Verify `δ₁ δ₀ = 0` after a sparse merge.
    pub self_check: bool,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for MergeOptions {
    fn default() -> Self {
        Self {
            tolerance: Tolerance::default(),
            engine: Engine::Sparse,
            self_check: true,
            threads: None,
        }
    }
}

fn check_inclasses(classes: &ClassPartition, ncols: usize) -> Result<()> {
    if classes.size != ncols {
        return Err(Error::InvalidPartition(format!(
            "classes cover {} facets but the operator has {ncols} columns",
            classes.size
        )));
    }
    classes.check()
}

fn check_rank(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidParameter(
            "cell rank must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Group surviving cell keys by first occurrence.
///
/// `keys[i]` is `None` for a degenerate cell. Returns, per class, the member
/// indices in ascending order, together with the dropped indices.
fn group_by_key<K: std::hash::Hash + Eq>(keys: &[Option<K>]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut lookup: HashMap<&K, usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut dropped = Vec::new();
    for (i, key) in keys.iter().enumerate() {
        match key {
            None => dropped.push(i),
            Some(k) => match lookup.get(k) {
                Some(&c) => classes[c].push(i),
                None => {
                    lookup.insert(k, classes.len());
                    classes.push(vec![i]);
                }
            },
        }
    }
    (classes, dropped)
}

/// Array-of-arrays cell congruence.
///
/// Each row of `delta` is read as its set of facet columns; facets are
/// renamed to their class in `inclasses` (facets listed as dropped vanish),
/// sorted and deduplicated. Cells left with `dim` or fewer distinct facets
/// are degenerate and dropped. Equal facet lists are then identified, first
/// occurrence first.
pub fn cell_congruence_aa(
    delta: &SignedSparseMatrix,
    inclasses: &ClassPartition,
    dim: usize,
) -> Result<(CellArray, ClassPartition)> {
    check_rank(dim)?;
    check_inclasses(inclasses, delta.ncols())?;
    let class_of = inclasses.class_of();
    let rows = delta.transpose();
    let keys: Vec<Option<Vec<usize>>> = (0..rows.ncols())
        .into_par_iter()
        .map(|r| {
            let mut cell: Vec<usize> = rows
                .column(r)
                .0
                .iter()
                .filter_map(|&f| class_of[f])
                .collect();
            cell.sort_unstable();
            cell.dedup();
            (cell.len() > dim).then_some(cell)
        })
        .collect();
    let (classes, dropped) = group_by_key(&keys);
    let cells = classes
        .iter()
        .map(|c| keys[c[0]].clone().expect("class seeds survive"))
        .collect();
    let partition = ClassPartition {
        size: delta.nrows(),
        classes,
        dropped,
    };
    Ok((CellArray { cells }, partition))
}

/// Signed sparse cell congruence.
///
/// Columns of `delta` are merged per lower class with their member signs.
/// Rows left with `dim` or fewer nonzeros (including rows whose entries
/// cancelled) are degenerate and dropped. Surviving rows are identified when
/// equal up to a global sign. The returned operator holds the first
/// occurrence of each class as its row; each member's sign relates it to
/// that row.
pub fn cell_congruence_sparse(
    delta: &SignedSparseMatrix,
    lo: &SignedClassMap,
    dim: usize,
) -> Result<(SignedSparseMatrix, SignedClassMap)> {
    check_rank(dim)?;
    check_inclasses(&lo.partition, delta.ncols())?;
    let merged = delta.merge_columns(&lo.partition, &lo.signs)?;
    let rows = merged.transpose();
    let signed: Vec<Option<(ColumnVector, Sign)>> = (0..rows.ncols())
        .into_par_iter()
        .map(|r| {
            let row = rows.column_vector(r);
            if row.nnz() <= dim {
                None
            } else {
                row.signature().ok()
            }
        })
        .collect();
    let keys: Vec<Option<&ColumnVector>> =
        signed.iter().map(|s| s.as_ref().map(|(c, _)| c)).collect();
    let (classes, dropped) = group_by_key(&keys);

    let sign_of = |i: usize| signed[i].as_ref().expect("members survive").1;
    let signs: Vec<Vec<Sign>> = classes
        .iter()
        .map(|c| {
            let seed = sign_of(c[0]);
            c.iter().map(|&i| sign_of(i) * seed).collect()
        })
        .collect();
    let triples = classes.iter().enumerate().flat_map(|(k, c)| {
        let (cols, vals) = rows.column(c[0]);
        cols.iter().zip(vals).map(move |(&j, &v)| (k, j, v))
    });
    let reduced = SignedSparseMatrix::from_triples(classes.len(), merged.ncols(), triples)?;
    let partition = ClassPartition {
        size: delta.nrows(),
        classes,
        dropped,
    };
    Ok((reduced, SignedClassMap { partition, signs }))
}

/// Merge an accumulator complex into its quotient.
///
/// Vertices are welded first; the resulting classes drive the edge
/// congruence, whose classes in turn drive the face congruence.
pub fn chain_congruence(
    acc: &AccumulatorComplex,
    options: &MergeOptions,
) -> Result<QuotientComplex> {
    match options.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            pool.install(|| merge(acc, options))
        }
        None => merge(acc, options),
    }
}

fn merge(acc: &AccumulatorComplex, options: &MergeOptions) -> Result<QuotientComplex> {
    let (vertices, vclasses) = vertex_congruence(acc.vertices(), options.tolerance)?;
    match options.engine {
        Engine::ArrayOfArrays => {
            let (ev, eclasses) = cell_congruence_aa(acc.delta0(), &vclasses, 1)?;
            let (fe, fclasses) = cell_congruence_aa(acc.delta1(), &eclasses, 2)?;
            Ok(QuotientComplex {
                vertices,
                ev,
                fe,
                delta0: None,
                delta1: None,
                vclasses,
                eclasses,
                fclasses,
                edge_signs: None,
                face_signs: None,
            })
        }
        Engine::Sparse => {
            let lo = SignedClassMap::unsigned(vclasses);
            let (delta0, eclasses) = cell_congruence_sparse(acc.delta0(), &lo, 1)?;
            let (delta1, fclasses) = cell_congruence_sparse(acc.delta1(), &eclasses, 2)?;
            if options.self_check {
                let nonzeros = delta1.matmul(&delta0)?.nnz();
                if nonzeros != 0 {
                    return Err(Error::ChainConstraint { nonzeros });
                }
            }
            Ok(QuotientComplex {
                vertices,
                ev: CellArray::from_rows(&delta0),
                fe: CellArray::from_rows(&delta1),
                delta0: Some(delta0),
                delta1: Some(delta1),
                vclasses: lo.partition,
                eclasses: eclasses.partition,
                fclasses: fclasses.partition,
                edge_signs: Some(eclasses.signs),
                face_signs: Some(fclasses.signs),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_partition(size: usize, classes: Vec<Vec<usize>>) -> ClassPartition {
        ClassPartition {
            size,
            classes,
            dropped: vec![],
        }
    }

    type Triples = Vec<(usize, usize, i32)>;

    // One triangle with vertices 0,1,2: edges 0->1, 1->2, 0->2, face = e0 + e1 - e2.
    fn triangle_rows() -> (Triples, Triples) {
        let d0 = vec![
            (0, 0, -1),
            (0, 1, 1),
            (1, 1, -1),
            (1, 2, 1),
            (2, 0, -1),
            (2, 2, 1),
        ];
        let d1 = vec![(0, 0, 1), (0, 1, 1), (0, 2, -1)];
        (d0, d1)
    }

    #[test]
    fn identity_quotient_keeps_rows() {
        let (d0, _) = triangle_rows();
        let delta = SignedSparseMatrix::from_triples(3, 3, d0).unwrap();
        let (cells, classes) =
            cell_congruence_aa(&delta, &ClassPartition::singletons(3), 1).unwrap();
        assert_eq!(cells.cells, vec![vec![0, 1], vec![1, 2], vec![0, 2]]);
        assert_eq!(classes, ClassPartition::singletons(3));

        let lo = SignedClassMap::unsigned(ClassPartition::singletons(3));
        let (reduced, hi) = cell_congruence_sparse(&delta, &lo, 1).unwrap();
        assert_eq!(reduced, delta);
        assert_eq!(hi, SignedClassMap::unsigned(ClassPartition::singletons(3)));
    }

    #[test]
    fn collapsed_edge_is_dropped() {
        let (d0, _) = triangle_rows();
        let delta = SignedSparseMatrix::from_triples(3, 3, d0).unwrap();
        // vertices 0 and 1 welded: edge 0 collapses
        let inclasses = unit_partition(3, vec![vec![0, 1], vec![2]]);
        let (cells, classes) = cell_congruence_aa(&delta, &inclasses, 1).unwrap();
        assert_eq!(cells.cells, vec![vec![0, 1]]);
        assert_eq!(classes.classes, vec![vec![1, 2]]);
        assert_eq!(classes.dropped, vec![0]);

        let lo = SignedClassMap::unsigned(inclasses);
        let (reduced, hi) = cell_congruence_sparse(&delta, &lo, 1).unwrap();
        assert_eq!(reduced.to_dense(), vec![vec![-1, 1]]);
        assert_eq!(hi.partition, classes);
        assert_eq!(hi.signs, vec![vec![Sign::Plus, Sign::Plus]]);
    }

    #[test]
    fn opposite_triangles_form_one_signed_class() {
        // Two copies of one triangle boundary over the same three edges,
        // the second with reversed orientation.
        let delta = SignedSparseMatrix::from_triples(
            2,
            3,
            [
                (0, 0, 1),
                (0, 1, 1),
                (0, 2, -1),
                (1, 0, -1),
                (1, 1, -1),
                (1, 2, 1),
            ],
        )
        .unwrap();
        let lo = SignedClassMap::unsigned(ClassPartition::singletons(3));
        let (reduced, hi) = cell_congruence_sparse(&delta, &lo, 2).unwrap();
        assert_eq!(reduced.to_dense(), vec![vec![1, 1, -1]]);
        assert_eq!(hi.partition.classes, vec![vec![0, 1]]);
        assert_eq!(hi.signs, vec![vec![Sign::Plus, Sign::Minus]]);

        let (cells, classes) =
            cell_congruence_aa(&delta, &ClassPartition::singletons(3), 2).unwrap();
        assert_eq!(cells.cells, vec![vec![0, 1, 2]]);
        assert_eq!(classes, hi.partition);
    }

    #[test]
    fn facet_order_does_not_matter_for_aa() {
        // identical faces reached through differently numbered edge instances
        let delta = SignedSparseMatrix::from_triples(
            2,
            6,
            [
                (0, 0, 1),
                (0, 1, 1),
                (0, 2, 1),
                (1, 3, 1),
                (1, 4, 1),
                (1, 5, 1),
            ],
        )
        .unwrap();
        let inclasses = unit_partition(6, vec![vec![0, 5], vec![1, 3], vec![2, 4]]);
        let (cells, classes) = cell_congruence_aa(&delta, &inclasses, 2).unwrap();
        assert_eq!(cells.cells, vec![vec![0, 1, 2]]);
        assert_eq!(classes.classes, vec![vec![0, 1]]);
    }

    #[test]
    fn rejects_bad_inclasses_and_rank() {
        let (d0, _) = triangle_rows();
        let delta = SignedSparseMatrix::from_triples(3, 3, d0).unwrap();
        let short = ClassPartition::singletons(2);
        assert!(matches!(
            cell_congruence_aa(&delta, &short, 1),
            Err(Error::InvalidPartition(_))
        ));
        let overlapping = unit_partition(3, vec![vec![0, 1], vec![1, 2]]);
        assert!(cell_congruence_aa(&delta, &overlapping, 1).is_err());
        assert!(matches!(
            cell_congruence_aa(&delta, &ClassPartition::singletons(3), 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn inconsistent_orientation_is_an_error() {
        // two edge instances declared congruent with the wrong relative sign
        // end up doubled inside one face row
        let delta =
            SignedSparseMatrix::from_triples(1, 4, [(0, 0, 1), (0, 1, 1), (0, 2, 1), (0, 3, -1)])
                .unwrap();
        let lo = SignedClassMap {
            partition: unit_partition(4, vec![vec![0, 1], vec![2], vec![3]]),
            signs: vec![
                vec![Sign::Plus, Sign::Plus],
                vec![Sign::Plus],
                vec![Sign::Plus],
            ],
        };
        assert!(matches!(
            cell_congruence_sparse(&delta, &lo, 2),
            Err(Error::Orientation { coeff: 2, .. })
        ));
    }

    #[test]
    fn accumulator_invariants() {
        let (d0, d1) = triangle_rows();
        let pts =
            PointCloud::from_points3(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        let delta0 = SignedSparseMatrix::from_triples(3, 3, d0).unwrap();
        let delta1 = SignedSparseMatrix::from_triples(1, 3, d1).unwrap();
        assert!(AccumulatorComplex::new(pts.clone(), delta0.clone(), delta1.clone()).is_ok());

        let bad0 = SignedSparseMatrix::from_triples(1, 3, [(0, 0, 1), (0, 1, 1)]).unwrap();
        assert!(
            AccumulatorComplex::new(pts.clone(), bad0, SignedSparseMatrix::zeros(0, 1)).is_err()
        );
        let short = SignedSparseMatrix::from_triples(1, 3, [(0, 0, 1), (0, 1, 1)]).unwrap();
        assert!(AccumulatorComplex::new(pts.clone(), delta0.clone(), short).is_err());
        let wide = SignedSparseMatrix::zeros(3, 4);
        assert!(AccumulatorComplex::new(pts, wide, delta1).is_err());
    }

    #[test]
    fn engine_parsing() {
        assert_eq!("aa".parse::<Engine>().unwrap(), Engine::ArrayOfArrays);
        assert_eq!("sparse".parse::<Engine>().unwrap(), Engine::Sparse);
        assert!("gb".parse::<Engine>().is_err());
        assert_eq!(Engine::default().to_string(), "sparse");
    }
}
