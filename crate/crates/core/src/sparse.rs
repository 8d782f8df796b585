//! Signed sparse matrices over the integers.
//!
//! All coboundary operators handled by the crate (the block-diagonal
//! accumulators and the merged global operators) are stored here in
//! compressed-column form with entries sorted by `(col, row)`.

use std::ops::{Mul, Neg};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{check_signs, ClassPartition};

pub type Coeff = i32;

/// Relative orientation of a cell with respect to its class representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn coeff(self) -> Coeff {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn of(c: Coeff) -> Option<Sign> {
        match c {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.coeff() as i8
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> Result<Sign, String> {
        Sign::of(v as Coeff).ok_or_else(|| format!("sign must be +1 or -1, got {v}"))
    }
}

/// A sparse vector of nonzero integer coefficients, sorted by row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColumnVector {
    pub len: usize,
    pub entries: Vec<(usize, Coeff)>,
}

impl ColumnVector {
    /// Build from `(row, coeff)` pairs; sorts by row and rejects duplicates,
    /// zeros and out-of-range rows.
    pub fn new(len: usize, mut entries: Vec<(usize, Coeff)>) -> Result<Self> {
        entries.sort_unstable_by_key(|e| e.0);
        for (i, &(row, c)) in entries.iter().enumerate() {
            if row >= len {
                return Err(Error::IndexOutOfRange {
                    row,
                    col: 0,
                    nrows: len,
                    ncols: 1,
                });
            }
            if c == 0 {
                return Err(Error::ZeroCoefficient { row, col: 0 });
            }
            if i > 0 && entries[i - 1].0 == row {
                return Err(Error::DuplicateEntry { row, col: 0 });
            }
        }
        Ok(Self { len, entries })
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn negated(&self) -> Self {
        Self {
            len: self.len,
            entries: self.entries.iter().map(|&(r, c)| (r, -c)).collect(),
        }
    }

    /// Canonical representative of `{v, -v}` and the sign relating `v` to it.
    ///
    /// The canonical vector's entry with the smallest row index is positive.
    /// The returned sign satisfies `v = sign * canonical`.
    pub fn signature(&self) -> Result<(ColumnVector, Sign)> {
        match self.entries.first() {
            None => Err(Error::ZeroVector),
            Some(&(_, c)) if c > 0 => Ok((self.clone(), Sign::Plus)),
            Some(_) => Ok((self.negated(), Sign::Minus)),
        }
    }
}

/// Free-function form of [`ColumnVector::signature`].
pub fn signed_column_signature(v: &ColumnVector) -> Result<(ColumnVector, Sign)> {
    v.signature()
}

/// Integer sparse matrix in compressed sparse column layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedSparseMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<Coeff>,
}

impl SignedSparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            col_ptr: vec![0; ncols + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            col_ptr: (0..=n).collect(),
            row_idx: (0..n).collect(),
            values: vec![1; n],
        }
    }

    /// Build from 0-based `(row, col, coeff)` triples.
    pub fn from_triples<I>(nrows: usize, ncols: usize, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Coeff)>,
    {
        let mut t: Vec<_> = triples.into_iter().collect();
        for &(row, col, c) in &t {
            if row >= nrows || col >= ncols {
                return Err(Error::IndexOutOfRange {
                    row,
                    col,
                    nrows,
                    ncols,
                });
            }
            if c == 0 {
                return Err(Error::ZeroCoefficient { row, col });
            }
        }
        t.sort_unstable_by_key(|&(r, c, _)| (c, r));
        if let Some(w) = t.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::DuplicateEntry {
                row: w[0].0,
                col: w[0].1,
            });
        }
        Ok(Self::from_sorted(nrows, ncols, t))
    }

    // `t` must be sorted by (col, row), in range, duplicate- and zero-free.
    fn from_sorted(nrows: usize, ncols: usize, t: Vec<(usize, usize, Coeff)>) -> Self {
        let mut col_ptr = vec![0usize; ncols + 1];
        for &(_, c, _) in &t {
            col_ptr[c + 1] += 1;
        }
        for j in 0..ncols {
            col_ptr[j + 1] += col_ptr[j];
        }
        let (row_idx, values) = t.into_iter().map(|(r, _, v)| (r, v)).unzip();
        Self {
            nrows,
            ncols,
            col_ptr,
            row_idx,
            values,
        }
    }

    /// Assemble from per-column entry lists already sorted by row.
    fn from_columns(nrows: usize, columns: Vec<Vec<(usize, Coeff)>>) -> Self {
        let ncols = columns.len();
        let mut col_ptr = Vec::with_capacity(ncols + 1);
        col_ptr.push(0);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        for col in columns {
            for (r, v) in col {
                row_idx.push(r);
                values.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        Self {
            nrows,
            ncols,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entries of column `j` as parallel `(rows, coeffs)` slices.
    pub fn column(&self, j: usize) -> (&[usize], &[Coeff]) {
        let span = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[span.clone()], &self.values[span])
    }

    pub fn column_vector(&self, j: usize) -> ColumnVector {
        let (rows, vals) = self.column(j);
        ColumnVector {
            len: self.nrows,
            entries: rows.iter().copied().zip(vals.iter().copied()).collect(),
        }
    }

    /// 0-based triples in `(col, row)` order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, Coeff)> + '_ {
        (0..self.ncols).flat_map(move |j| {
            let (rows, vals) = self.column(j);
            rows.iter().zip(vals).map(move |(&r, &v)| (r, j, v))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> Coeff {
        let (rows, vals) = self.column(col);
        rows.binary_search(&row).map(|k| vals[k]).unwrap_or(0)
    }

    pub fn transpose(&self) -> Self {
        let mut col_ptr = vec![0usize; self.nrows + 1];
        for &r in &self.row_idx {
            col_ptr[r + 1] += 1;
        }
        for i in 0..self.nrows {
            col_ptr[i + 1] += col_ptr[i];
        }
        let mut next = col_ptr.clone();
        let mut row_idx = vec![0; self.nnz()];
        let mut values = vec![0; self.nnz()];
        // Scanning columns in order keeps each output column sorted by row.
        for j in 0..self.ncols {
            let (rows, vals) = self.column(j);
            for (&r, &v) in rows.iter().zip(vals) {
                let slot = next[r];
                row_idx[slot] = j;
                values[slot] = v;
                next[r] += 1;
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            col_ptr,
            row_idx,
            values,
        }
    }

    /// Integer product `self * rhs`, keeping only nonzero results.
    pub fn matmul(&self, rhs: &SignedSparseMatrix) -> Result<Self> {
        if self.ncols != rhs.nrows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows, self.ncols, rhs.nrows, rhs.ncols
            )));
        }
        let mut acc = vec![0 as Coeff; self.nrows];
        let mut touched = vec![false; self.nrows];
        let mut pattern = Vec::new();
        let mut columns = Vec::with_capacity(rhs.ncols);
        for j in 0..rhs.ncols {
            let (krows, kvals) = rhs.column(j);
            for (&k, &b) in krows.iter().zip(kvals) {
                let (rows, vals) = self.column(k);
                for (&i, &a) in rows.iter().zip(vals) {
                    acc[i] += a * b;
                    if !touched[i] {
                        touched[i] = true;
                        pattern.push(i);
                    }
                }
            }
            pattern.sort_unstable();
            let mut col = Vec::with_capacity(pattern.len());
            for &i in &pattern {
                if acc[i] != 0 {
                    col.push((i, acc[i]));
                }
                acc[i] = 0;
                touched[i] = false;
            }
            pattern.clear();
            columns.push(col);
        }
        Ok(Self::from_columns(self.nrows, columns))
    }

    /// Replace each class of columns by the signed sum of its members.
    ///
    /// Member `classes.classes[k][m]` contributes `signs[k][m]` times its
    /// column to output column `k`. Columns listed as dropped contribute
    /// nothing. A summed coefficient of magnitude above 1 means the class
    /// orientations are inconsistent and is reported as an error; entries
    /// that cancel to zero are removed.
    pub fn merge_columns(&self, classes: &ClassPartition, signs: &[Vec<Sign>]) -> Result<Self> {
        if classes.size != self.ncols {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} indices but matrix has {} columns",
                classes.size, self.ncols
            )));
        }
        classes.check()?;
        check_signs(classes, signs)?;
        let columns = classes
            .classes
            .par_iter()
            .zip(signs.par_iter())
            .enumerate()
            .map(|(k, (members, member_signs))| {
                let mut entries: Vec<(usize, Coeff)> = members
                    .iter()
                    .zip(member_signs)
                    .flat_map(|(&j, s)| {
                        let (rows, vals) = self.column(j);
                        rows.iter()
                            .zip(vals)
                            .map(move |(&r, &v)| (r, s.coeff() * v))
                    })
                    .collect();
                entries.sort_by_key(|e| e.0);
                let mut merged: Vec<(usize, Coeff)> = Vec::with_capacity(entries.len());
                for (r, v) in entries {
                    match merged.last_mut() {
                        Some(last) if last.0 == r => last.1 += v,
                        _ => merged.push((r, v)),
                    }
                }
                merged.retain(|e| e.1 != 0);
                if let Some(&(row, coeff)) = merged.iter().find(|e| e.1.abs() > 1) {
                    return Err(Error::Orientation { row, col: k, coeff });
                }
                Ok(merged)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_columns(self.nrows, columns))
    }

    /// Dense row-major copy; intended for tests and small diagnostics.
    pub fn to_dense(&self) -> Vec<Vec<Coeff>> {
        let mut dense = vec![vec![0; self.ncols]; self.nrows];
        for (r, c, v) in self.triples() {
            dense[r][c] = v;
        }
        dense
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag() -> SignedSparseMatrix {
        SignedSparseMatrix::from_triples(2, 2, [(0, 0, 1), (1, 1, -1)]).unwrap()
    }

    #[test]
    fn from_triples_builds_diagonal() {
        let m = diag();
        assert_eq!(m.to_dense(), vec![vec![1, 0], vec![0, -1]]);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn from_triples_rejects_bad_input() {
        // column index 4 (1-based) in a 3x3 matrix
        let err = SignedSparseMatrix::from_triples(3, 3, [(0, 3, 1)]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { col: 3, .. }));
        let err = SignedSparseMatrix::from_triples(2, 2, [(0, 0, 1), (0, 0, -1)]).unwrap_err();
        assert!(matches!(err, Error::DuplicateEntry { row: 0, col: 0 }));
        let err = SignedSparseMatrix::from_triples(2, 2, [(1, 0, 0)]).unwrap_err();
        assert!(matches!(err, Error::ZeroCoefficient { .. }));
    }

    #[test]
    fn transpose_small_cases() {
        assert_eq!(diag().transpose(), diag());
        let m = SignedSparseMatrix::from_triples(2, 3, [(0, 2, -1)]).unwrap();
        let t = m.transpose();
        assert_eq!((t.nrows(), t.ncols()), (3, 2));
        assert_eq!(t.triples().collect::<Vec<_>>(), vec![(2, 0, -1)]);
    }

    #[test]
    fn matmul_hand_example() {
        let a = SignedSparseMatrix::from_triples(2, 2, [(0, 0, 1), (0, 1, -1), (1, 1, 1)]).unwrap();
        let b = SignedSparseMatrix::from_triples(2, 2, [(0, 0, 1), (1, 0, 1), (1, 1, 1)]).unwrap();
        let p = a.matmul(&b).unwrap();
        assert_eq!(p.to_dense(), vec![vec![0, -1], vec![1, 1]]);
        // the cancelled (0,0) entry is not stored
        assert_eq!(p.nnz(), 3);
    }

    #[test]
    fn matmul_identity_and_mismatch() {
        let a = SignedSparseMatrix::from_triples(2, 3, [(0, 2, -1), (1, 0, 1)]).unwrap();
        assert_eq!(a.matmul(&SignedSparseMatrix::identity(3)).unwrap(), a);
        assert!(matches!(
            a.matmul(&SignedSparseMatrix::identity(2)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn merge_identical_columns_overflows() {
        let m =
            SignedSparseMatrix::from_triples(3, 2, [(0, 0, 1), (2, 0, -1), (0, 1, 1), (2, 1, -1)])
                .unwrap();
        let classes = ClassPartition {
            size: 2,
            classes: vec![vec![0, 1]],
            dropped: vec![],
        };
        let err = m
            .merge_columns(&classes, &[vec![Sign::Plus, Sign::Plus]])
            .unwrap_err();
        assert!(matches!(err, Error::Orientation { coeff: 2, .. }));
    }

    #[test]
    fn merge_sums_disjoint_supports() {
        // two instances of one vertex used by different local edges
        let m = SignedSparseMatrix::from_triples(2, 2, [(0, 0, -1), (1, 1, 1)]).unwrap();
        let classes = ClassPartition {
            size: 2,
            classes: vec![vec![0, 1]],
            dropped: vec![],
        };
        let merged = m
            .merge_columns(&classes, &[vec![Sign::Plus, Sign::Minus]])
            .unwrap();
        assert_eq!(merged.to_dense(), vec![vec![-1], vec![-1]]);
    }

    #[test]
    fn merge_cancellation_and_dropped_columns() {
        let m = SignedSparseMatrix::from_triples(1, 3, [(0, 0, -1), (0, 1, 1), (0, 2, 1)]).unwrap();
        let classes = ClassPartition {
            size: 3,
            classes: vec![vec![0, 1]],
            dropped: vec![2],
        };
        let merged = m
            .merge_columns(&classes, &[vec![Sign::Plus, Sign::Plus]])
            .unwrap();
        assert_eq!(merged.ncols(), 1);
        assert_eq!(merged.nnz(), 0);
    }

    #[test]
    fn merge_rejects_non_partition() {
        let m = diag();
        let classes = ClassPartition {
            size: 2,
            classes: vec![vec![0, 1], vec![1]],
            dropped: vec![],
        };
        let err = m
            .merge_columns(&classes, &[vec![Sign::Plus, Sign::Plus], vec![Sign::Plus]])
            .unwrap_err();
        assert!(matches!(err, Error::InvalidPartition(_)));
    }

    #[test]
    fn signature_examples() {
        let v = ColumnVector::new(6, vec![(1, -1), (4, 1)]).unwrap();
        let (canon, sign) = v.signature().unwrap();
        assert_eq!(canon.entries, vec![(1, 1), (4, -1)]);
        assert_eq!(sign, Sign::Minus);

        let w = ColumnVector::new(4, vec![(0, 1), (2, -1)]).unwrap();
        let (canon, sign) = w.signature().unwrap();
        assert_eq!(canon, w);
        assert_eq!(sign, Sign::Plus);

        let zero = ColumnVector::new(3, vec![]).unwrap();
        assert!(matches!(zero.signature(), Err(Error::ZeroVector)));
    }

    fn arb_matrix(max: usize) -> impl Strategy<Value = SignedSparseMatrix> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(prop_oneof![Just(-1), Just(0), Just(0), Just(1)], r * c)
                .prop_map(move |cells| dense_to_sparse(r, c, &cells))
        })
    }

    fn dense_to_sparse(r: usize, c: usize, cells: &[Coeff]) -> SignedSparseMatrix {
        let t = (0..r)
            .flat_map(|i| (0..c).map(move |j| (i, j)))
            .filter(|&(i, j)| cells[i * c + j] != 0)
            .map(|(i, j)| (i, j, cells[i * c + j]));
        SignedSparseMatrix::from_triples(r, c, t).unwrap()
    }

    fn dense_product(
        a: &[Vec<Coeff>],
        b: &[Vec<Coeff>],
        inner: usize,
        cols: usize,
    ) -> Vec<Vec<Coeff>> {
        a.iter()
            .map(|row| {
                (0..cols)
                    .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                    .collect()
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn transpose_is_involution(m in arb_matrix(12)) {
            prop_assert_eq!(m.transpose().transpose(), m);
        }

        #[test]
        fn matmul_matches_dense_product(
            (r, k, c) in (1usize..=20, 1usize..=20, 1usize..=20),
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut cells = |n: usize| -> Vec<Coeff> {
                (0..n).map(|_| rng.random_range(-1..=1)).collect()
            };
            let a_cells = cells(r * k);
            let b_cells = cells(k * c);
            let a = dense_to_sparse(r, k, &a_cells);
            let b = dense_to_sparse(k, c, &b_cells);
            let expected = dense_product(&a.to_dense(), &b.to_dense(), k, c);
            prop_assert_eq!(a.matmul(&b).unwrap().to_dense(), expected);
        }

        #[test]
        fn identity_merge_is_identity(m in arb_matrix(10)) {
            let p = ClassPartition::singletons(m.ncols());
            let signs = vec![vec![Sign::Plus]; m.ncols()];
            prop_assert_eq!(m.merge_columns(&p, &signs).unwrap(), m);
        }

        #[test]
        fn signature_ignores_global_sign(
            entries in proptest::collection::btree_map(0usize..30, prop_oneof![Just(-1), Just(1)], 1..10)
        ) {
            let v = ColumnVector::new(30, entries.into_iter().collect()).unwrap();
            let (cv, sv) = v.signature().unwrap();
            let (cn, sn) = v.negated().signature().unwrap();
            prop_assert_eq!(&cv, &cn);
            prop_assert_eq!(sv, -sn);
            prop_assert_eq!(cv.entries[0].1, 1);
        }
    }
}
