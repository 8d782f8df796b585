//! Independent brute-force oracles and fixtures shared by the integration
//! tests. Nothing here calls the k-d tree or either congruence engine.
#![allow(dead_code)]

use std::collections::HashSet;
use std::path::PathBuf;

use chaincongruence_core::{io, AccumulatorComplex, PointCloud};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn cube() -> AccumulatorComplex {
    io::load_complex(fixture("cube.json")).expect("cube fixture loads")
}

/// Reference centroids of the merged cube, one row per vertex.
pub const CUBE_CENTROIDS: [[f64; 3]; 8] = [
    [0.531049, 0.865999, 0.141913],
    [1.01467, 0.682721, 0.216968],
    [0.347772, 0.526892, 0.494797],
    [0.831391, 0.343614, 0.569852],
    [0.606105, 1.21888, 0.520001],
    [1.08972, 1.03561, 0.595057],
    [0.422827, 0.879776, 0.872886],
    [0.906446, 0.696499, 0.947941],
];

/// Reference edges-by-vertices listing (1-based).
pub const CUBE_EV: [[usize; 2]; 12] = [
    [1, 2],
    [1, 3],
    [1, 5],
    [2, 4],
    [2, 6],
    [3, 4],
    [3, 7],
    [4, 8],
    [5, 6],
    [5, 7],
    [6, 8],
    [7, 8],
];

/// Reference faces-by-edges listing (1-based).
pub const CUBE_FE: [[usize; 4]; 6] = [
    [1, 2, 3, 4],
    [1, 5, 9, 10],
    [2, 6, 11, 12],
    [3, 7, 9, 11],
    [4, 8, 10, 12],
    [5, 6, 7, 8],
];

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Full pairwise distance matrix: `within[i][j]` iff `|p_i - p_j| <= r`.
pub fn within_matrix(cloud: &PointCloud, r: f64) -> Vec<Vec<bool>> {
    let n = cloud.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| dist2(cloud.point(i), cloud.point(j)) <= r * r)
                .collect()
        })
        .collect()
}

/// Seed-order greedy clustering over the O(n²) distance matrix.
pub fn greedy_oracle(cloud: &PointCloud, r: f64) -> Vec<Vec<usize>> {
    let within = within_matrix(cloud, r);
    let n = cloud.len();
    let mut visited = vec![false; n];
    let mut classes = Vec::new();
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        let mut class = vec![seed];
        visited[seed] = true;
        for j in 0..n {
            if within[seed][j] && !visited[j] {
                visited[j] = true;
                class.push(j);
            }
        }
        classes.push(class);
    }
    classes
}

/// Connected components of the `r`-nearness graph, labelled by first index.
pub fn component_labels(cloud: &PointCloud, r: f64) -> Vec<usize> {
    let within = within_matrix(cloud, r);
    let n = cloud.len();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        label[s] = next;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if within[i][j] && label[j] == usize::MAX {
                    label[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    label
}

/// Naive merge: weld vertices by connected components, then identify cells
/// by linear search over previously seen facet sets. Returns `[V, E, F]`.
pub fn brute_force_counts(acc: &AccumulatorComplex, eps: f64) -> [usize; 3] {
    let vlabel = component_labels(acc.vertices(), eps);
    let nv = vlabel.iter().collect::<HashSet<_>>().len();

    let dense0 = acc.delta0().to_dense();
    let mut edges: Vec<HashSet<usize>> = Vec::new();
    let mut elabel = Vec::new();
    for row in &dense0 {
        let set: HashSet<usize> = row
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, _)| vlabel[j])
            .collect();
        if set.len() < 2 {
            elabel.push(None);
            continue;
        }
        match edges.iter().position(|e| *e == set) {
            Some(k) => elabel.push(Some(k)),
            None => {
                edges.push(set);
                elabel.push(Some(edges.len() - 1));
            }
        }
    }

    let dense1 = acc.delta1().to_dense();
    let mut faces: Vec<HashSet<usize>> = Vec::new();
    for row in &dense1 {
        let set: HashSet<usize> = row
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .filter_map(|(j, _)| elabel[j])
            .collect();
        if set.len() >= 3 && !faces.contains(&set) {
            faces.push(set);
        }
    }
    [nv, edges.len(), faces.len()]
}
