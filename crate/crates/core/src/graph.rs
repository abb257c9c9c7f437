//! 0/1 coupling graphs with per-row sparse or complement storage.

use crate::error::{KuramotoError, Result};

/// Storage of one adjacency row: either the column indices of its ones or,
/// when ones outnumber zeros, the (smaller) list of its zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowIndices {
    /// Sorted, deduplicated column indices ℓ with A_{mℓ} = 1.
    Nonzero(Vec<usize>),
    /// Sorted, deduplicated column indices ℓ with A_{mℓ} = 0.
    Zero(Vec<usize>),
}

impl RowIndices {
    fn indices(&self) -> &[usize] {
        match self {
            RowIndices::Nonzero(v) | RowIndices::Zero(v) => v,
        }
    }

    fn indices_mut(&mut self) -> &mut Vec<usize> {
        match self {
            RowIndices::Nonzero(v) | RowIndices::Zero(v) => v,
        }
    }
}

/// Logical M×M adjacency matrix with entries in {0, 1}.
///
/// Each row stores whichever index list is shorter (ones or zeros), bounding
/// memory by `min(#ones, #zeros)` per row. Indices are 0-based everywhere in
/// this crate; 1-based indexing appears only in Matrix Market files.
/// Symmetry is not assumed; see [`is_symmetric`](Self::is_symmetric).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingGraph {
    size: usize,
    rows: Vec<RowIndices>,
    degree: Vec<usize>,
}

impl CouplingGraph {
    /// Builds a graph from explicit per-row storage. Input lists are sorted;
    /// duplicates and out-of-range indices are rejected.
    pub fn from_parts(size: usize, mut rows: Vec<RowIndices>) -> Result<Self> {
        if size == 0 {
            return Err(KuramotoError::InvalidInput(
                "graph size must be at least 1".into(),
            ));
        }
        if rows.len() != size {
            return Err(KuramotoError::LengthMismatch {
                expected: size,
                got: rows.len(),
            });
        }
        for (m, row) in rows.iter_mut().enumerate() {
            let list = row.indices_mut();
            list.sort_unstable();
            for i in 0..list.len() {
                if list[i] >= size {
                    return Err(KuramotoError::IndexOutOfRange {
                        row: m,
                        index: list[i],
                        size,
                    });
                }
                if i > 0 && list[i] == list[i - 1] {
                    return Err(KuramotoError::DuplicateIndex {
                        row: m,
                        index: list[i],
                    });
                }
            }
        }
        let degree = rows
            .iter()
            .map(|row| match row {
                RowIndices::Nonzero(v) => v.len(),
                RowIndices::Zero(v) => size - v.len(),
            })
            .collect();
        Ok(Self { size, rows, degree })
    }

    /// Builds a graph from per-row nonzero column lists, choosing the storage
    /// representation of each row by the majority rule (zeros are stored when
    /// ones outnumber zeros).
    pub fn from_nonzero_rows(size: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let prepared = rows
            .into_iter()
            .map(|mut nz| {
                nz.sort_unstable();
                if 2 * nz.len() > size {
                    RowIndices::Zero(complement_of_sorted(&nz, size))
                } else {
                    RowIndices::Nonzero(nz)
                }
            })
            .collect();
        Self::from_parts(size, prepared)
    }

    /// Complete graph including the diagonal.
    pub fn complete(size: usize) -> Self {
        let rows = vec![RowIndices::Zero(Vec::new()); size];
        Self::from_parts(size, rows).expect("complete graph is always valid")
    }

    /// Graph with no edges at all.
    pub fn empty(size: usize) -> Self {
        let rows = vec![RowIndices::Nonzero(Vec::new()); size];
        Self::from_parts(size, rows).expect("empty graph is always valid")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of ones in row m, independent of the storage representation.
    pub fn degree(&self, m: usize) -> usize {
        self.degree[m]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degree
    }

    /// Total number of ones (ordered pairs, diagonal included).
    pub fn total_ones(&self) -> usize {
        self.degree.iter().sum()
    }

    pub fn row(&self, m: usize) -> &RowIndices {
        &self.rows[m]
    }

    /// Membership query A_{mℓ} = 1.
    pub fn contains(&self, m: usize, l: usize) -> bool {
        match &self.rows[m] {
            RowIndices::Nonzero(v) => v.binary_search(&l).is_ok(),
            RowIndices::Zero(v) => v.binary_search(&l).is_err(),
        }
    }

    /// Iterates the logical nonzero columns of row m in ascending order,
    /// regardless of how the row is stored.
    pub fn row_nonzeros(&self, m: usize) -> RowNonzeros<'_> {
        match &self.rows[m] {
            RowIndices::Nonzero(v) => RowNonzeros::Direct(v.iter()),
            RowIndices::Zero(v) => RowNonzeros::Complement {
                next: 0,
                size: self.size,
                skip: v,
                skip_pos: 0,
            },
        }
    }

    /// Re-checks every structural invariant. Construction already enforces
    /// them; this is for data read from external files or tests.
    pub fn validate(&self) -> Result<()> {
        if self.rows.len() != self.size || self.degree.len() != self.size {
            return Err(KuramotoError::LengthMismatch {
                expected: self.size,
                got: self.rows.len(),
            });
        }
        for (m, row) in self.rows.iter().enumerate() {
            let list = row.indices();
            for i in 0..list.len() {
                if list[i] >= self.size {
                    return Err(KuramotoError::IndexOutOfRange {
                        row: m,
                        index: list[i],
                        size: self.size,
                    });
                }
                if i > 0 && list[i] <= list[i - 1] {
                    return Err(KuramotoError::DuplicateIndex {
                        row: m,
                        index: list[i],
                    });
                }
            }
            let actual = match row {
                RowIndices::Nonzero(v) => v.len(),
                RowIndices::Zero(v) => self.size - v.len(),
            };
            if actual != self.degree[m] {
                return Err(KuramotoError::DegreeMismatch {
                    row: m,
                    cached: self.degree[m],
                    actual,
                });
            }
        }
        Ok(())
    }

    /// True iff A_{mℓ} = A_{ℓm} for all ordered pairs.
    pub fn is_symmetric(&self) -> bool {
        // A one at (m, l) without its mirror is caught while scanning row m;
        // the converse violation is caught while scanning row l.
        (0..self.size).all(|m| self.row_nonzeros(m).all(|l| self.contains(l, m)))
    }
}

/// Iterator over the logical nonzeros of one row.
pub enum RowNonzeros<'a> {
    Direct(std::slice::Iter<'a, usize>),
    Complement {
        next: usize,
        size: usize,
        skip: &'a [usize],
        skip_pos: usize,
    },
}

impl<'a> Iterator for RowNonzeros<'a> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        match self {
            RowNonzeros::Direct(it) => it.next().copied(),
            RowNonzeros::Complement {
                next,
                size,
                skip,
                skip_pos,
            } => {
                while *next < *size {
                    if *skip_pos < skip.len() && skip[*skip_pos] == *next {
                        *skip_pos += 1;
                        *next += 1;
                        continue;
                    }
                    let out = *next;
                    *next += 1;
                    return Some(out);
                }
                None
            }
        }
    }
}

fn complement_of_sorted(sorted: &[usize], size: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(size - sorted.len());
    let mut pos = 0;
    for i in 0..size {
        if pos < sorted.len() && sorted[pos] == i {
            pos += 1;
        } else {
            out.push(i);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smallest_ring_is_valid() {
        let g = CouplingGraph::from_parts(
            2,
            vec![
                RowIndices::Nonzero(vec![1]),
                RowIndices::Nonzero(vec![0]),
            ],
        )
        .unwrap();
        assert_eq!(g.degree(0), 1);
        assert_eq!(g.degree(1), 1);
        assert!(g.is_symmetric());
    }

    #[test]
    fn duplicate_index_is_rejected() {
        let err = CouplingGraph::from_parts(2, vec![
            RowIndices::Nonzero(vec![0, 0]),
            RowIndices::Nonzero(vec![]),
        ])
        .unwrap_err();
        assert!(matches!(err, KuramotoError::DuplicateIndex { row: 0, index: 0 }));
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let err = CouplingGraph::from_parts(2, vec![
            RowIndices::Nonzero(vec![2]),
            RowIndices::Nonzero(vec![]),
        ])
        .unwrap_err();
        assert!(matches!(err, KuramotoError::IndexOutOfRange { row: 0, index: 2, size: 2 }));
    }

    #[test]
    fn complete_graph_is_symmetric_and_full() {
        let g = CouplingGraph::complete(3);
        assert!(g.is_symmetric());
        assert_eq!(g.total_ones(), 9);
        assert_eq!(g.row_nonzeros(1).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn single_directed_edge_is_asymmetric() {
        let g = CouplingGraph::from_nonzero_rows(2, vec![vec![1], vec![]]).unwrap();
        assert!(!g.is_symmetric());
        assert_eq!(g.degree(1), 0);
    }

    #[test]
    fn majority_rule_picks_complement_storage() {
        let g = CouplingGraph::from_nonzero_rows(4, vec![
            vec![0, 1, 2],   // 3 ones > 1 zero -> zero storage
            vec![1, 3],      // tie -> nonzero storage
            vec![],
            vec![0, 1, 2, 3],
        ])
        .unwrap();
        assert!(matches!(g.row(0), RowIndices::Zero(v) if v == &vec![3]));
        assert!(matches!(g.row(1), RowIndices::Nonzero(_)));
        assert!(matches!(g.row(3), RowIndices::Zero(v) if v.is_empty()));
        assert_eq!(g.degree(0), 3);
        assert_eq!(g.row_nonzeros(0).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    proptest! {
        /// Converting a row between representations preserves the logical row.
        #[test]
        fn storage_round_trip(size in 1usize..40, seed in any::<u64>()) {
            let mut x = seed;
            let mut bump = || {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                x
            };
            let nz_rows: Vec<Vec<usize>> = (0..size)
                .map(|_| (0..size).filter(|_| bump() % 2 == 0).collect())
                .collect();
            let g = CouplingGraph::from_nonzero_rows(size, nz_rows.clone()).unwrap();
            g.validate().unwrap();
            for m in 0..size {
                let logical: Vec<usize> = g.row_nonzeros(m).collect();
                prop_assert_eq!(&logical, &nz_rows[m]);
                for l in 0..size {
                    prop_assert_eq!(g.contains(m, l), nz_rows[m].contains(&l));
                }
            }
        }
    }
}
