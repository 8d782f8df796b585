//! Topological self-checks over merged complexes.

use serde::{Deserialize, Serialize};

use crate::congruence::{CellArray, QuotientComplex};
use crate::error::Result;
use crate::partition::{check_signs, ClassPartition};
use crate::sparse::{Sign, SignedSparseMatrix};

/// `true` iff `delta1 * delta0` is the zero matrix.
pub fn check_dd_zero(delta0: &SignedSparseMatrix, delta1: &SignedSparseMatrix) -> Result<bool> {
    Ok(delta1.matmul(delta0)?.nnz() == 0)
}

/// Alternating sum of per-rank cell counts, starting at rank 0.
pub fn euler_characteristic(counts: &[usize]) -> i64 {
    counts
        .iter()
        .enumerate()
        .map(|(p, &c)| if p % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EulerCheck {
    pub expected: Option<i64>,
    pub value: i64,
}

/// Outcome of validating a merged complex.
///
/// `dd_zero` is `None` when the complex carries no signed operators (the
/// array-of-arrays engine) and the chain check was skipped. The Euler value
/// is advisory: only `dd_zero` and `partitions_ok` decide [`passed`].
///
/// [`passed`]: ValidationReport::passed
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationReport {
    pub counts: Vec<usize>,
    pub dd_zero: Option<bool>,
    /// Degenerate cells removed per rank, `[vertices, edges, faces]`.
    pub dropped: Vec<usize>,
    pub euler: EulerCheck,
    pub partitions_ok: bool,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.dd_zero != Some(false) && self.partitions_ok
    }
}

fn class_map_violations(
    name: &str,
    classes: &ClassPartition,
    expected_size: Option<usize>,
    num_cells: usize,
    signs: Option<&[Vec<Sign>]>,
) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(size) = expected_size {
        if classes.size != size {
            out.push(format!(
                "{name}: covers {} inputs, expected {size}",
                classes.size
            ));
        }
    }
    if let Err(e) = classes.check() {
        out.push(format!("{name}: {e}"));
    }
    if classes.num_classes() != num_cells {
        out.push(format!(
            "{name}: {} classes for {num_cells} output cells",
            classes.num_classes()
        ));
    }
    if let Some(signs) = signs {
        if let Err(e) = check_signs(classes, signs) {
            out.push(format!("{name}: {e}"));
        }
    }
    out
}

fn partition_violations(q: &QuotientComplex, input_sizes: Option<[usize; 3]>) -> Vec<String> {
    let [nv, ne, nf] = q.counts();
    let size = |k: usize| input_sizes.map(|s| s[k]);
    let mut out = class_map_violations("vclasses", &q.vclasses, size(0), nv, None);
    if !q.vclasses.dropped.is_empty() {
        out.push("vclasses: vertices cannot be dropped".into());
    }
    out.extend(class_map_violations(
        "eclasses",
        &q.eclasses,
        size(1),
        ne,
        q.edge_signs.as_deref(),
    ));
    out.extend(class_map_violations(
        "fclasses",
        &q.fclasses,
        size(2),
        nf,
        q.face_signs.as_deref(),
    ));
    out
}

/// `true` iff every class map is a disjoint cover of its input cells (class
/// members plus dropped degenerate cells) with one class per output cell.
pub fn check_partitions(q: &QuotientComplex, input_sizes: [usize; 3]) -> bool {
    partition_violations(q, Some(input_sizes)).is_empty()
}

fn pattern_violations(name: &str, cells: &CellArray, delta: &SignedSparseMatrix) -> Vec<String> {
    if CellArray::from_rows(delta) == *cells {
        Vec::new()
    } else {
        vec![format!("{name}: row patterns differ from the cell lists")]
    }
}

/// Validate a merged complex. Input sizes are taken from the class maps.
pub fn validate(q: &QuotientComplex, euler_expected: Option<i64>) -> ValidationReport {
    let counts = q.counts().to_vec();
    let mut violations = partition_violations(q, None);
    let partitions_ok = violations.is_empty();

    if let Err(e) = q.ev.check(counts[0]).and_then(|_| q.fe.check(counts[1])) {
        violations.push(e.to_string());
    }

    let dd_zero = match (&q.delta0, &q.delta1) {
        (Some(d0), Some(d1)) => {
            violations.extend(pattern_violations("delta0", &q.ev, d0));
            violations.extend(pattern_violations("delta1", &q.fe, d1));
            match check_dd_zero(d0, d1) {
                Ok(true) => Some(true),
                Ok(false) => {
                    violations.push("DD_NONZERO: delta1 * delta0 is not zero".into());
                    Some(false)
                }
                Err(e) => {
                    violations.push(e.to_string());
                    Some(false)
                }
            }
        }
        _ => None,
    };

    let value = euler_characteristic(&counts);
    if let Some(expected) = euler_expected {
        if expected != value {
            violations.push(format!(
                "euler characteristic {value}, expected {expected} (advisory)"
            ));
        }
    }
    ValidationReport {
        counts,
        dd_zero,
        dropped: vec![
            q.vclasses.dropped.len(),
            q.eclasses.dropped.len(),
            q.fclasses.dropped.len(),
        ],
        euler: EulerCheck {
            expected: euler_expected,
            value,
        },
        partitions_ok,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vertex::PointCloud;
    use proptest::prelude::*;

    #[test]
    fn euler_values() {
        assert_eq!(euler_characteristic(&[1192, 3182, 2824, 834]), 0);
        assert_eq!(euler_characteristic(&[8, 12, 6]), 2);
        assert_eq!(euler_characteristic(&[27, 54, 36]), 9);
        assert_eq!(euler_characteristic(&[]), 0);
    }

    #[test]
    fn empty_operators_are_vacuously_closed() {
        let d0 = SignedSparseMatrix::zeros(0, 3);
        let d1 = SignedSparseMatrix::zeros(0, 0);
        assert!(check_dd_zero(&d0, &d1).unwrap());
        assert!(check_dd_zero(&d0, &SignedSparseMatrix::zeros(0, 1)).is_err());
    }

    fn empty_quotient() -> QuotientComplex {
        QuotientComplex {
            vertices: PointCloud::new(3, vec![]).unwrap(),
            ev: CellArray::default(),
            fe: CellArray::default(),
            delta0: None,
            delta1: None,
            vclasses: ClassPartition::default(),
            eclasses: ClassPartition::default(),
            fclasses: ClassPartition::default(),
            edge_signs: None,
            face_signs: None,
        }
    }

    #[test]
    fn empty_complex_partitions_ok() {
        let q = empty_quotient();
        assert!(check_partitions(&q, [0, 0, 0]));
        let report = validate(&q, None);
        assert!(report.passed());
        assert_eq!(report.dd_zero, None);
    }

    #[test]
    fn overlapping_class_map_fails() {
        let mut q = empty_quotient();
        q.vertices = PointCloud::new(3, vec![0.0; 6]).unwrap();
        q.vclasses = ClassPartition {
            size: 6,
            classes: vec![vec![0, 4], vec![1, 2, 3, 4, 5]],
            dropped: vec![],
        };
        assert!(!check_partitions(&q, [6, 0, 0]));
        assert!(!validate(&q, None).passed());
    }

    proptest! {
        #[test]
        fn euler_is_additive(
            a in proptest::collection::vec(0usize..10_000, 4),
            b in proptest::collection::vec(0usize..10_000, 4),
        ) {
            let sum: Vec<usize> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            prop_assert_eq!(euler_characteristic(&sum), euler_characteristic(&a) + euler_characteristic(&b));
        }
    }
}
