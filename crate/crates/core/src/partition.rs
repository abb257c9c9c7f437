//! Ordered partitions of the node set and the induced permutations.

use crate::error::{KuramotoError, Result};

/// Ordered communities of node indices plus the induced permutation.
///
/// The permutation places each community's members contiguously, in the
/// given community (and member) order: `permutation()[new] = old`. Members
/// keep the order in which they were supplied, so a single community in
/// shuffled order doubles as a plain permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    size: usize,
    communities: Vec<Vec<usize>>,
    permutation: Vec<usize>,
    inverse: Vec<usize>,
}

impl BlockPartition {
    /// Builds a partition from explicit communities, which must disjointly
    /// cover `{0, …, size−1}`.
    pub fn from_communities(size: usize, communities: Vec<Vec<usize>>) -> Result<Self> {
        let mut permutation = Vec::with_capacity(size);
        for c in &communities {
            if c.is_empty() {
                return Err(KuramotoError::InvalidPartition(
                    "communities must be nonempty".into(),
                ));
            }
            permutation.extend_from_slice(c);
        }
        if permutation.len() != size {
            return Err(KuramotoError::InvalidPartition(format!(
                "communities cover {} indices, expected {}",
                permutation.len(),
                size
            )));
        }
        let mut inverse = vec![usize::MAX; size];
        for (new, &old) in permutation.iter().enumerate() {
            if old >= size {
                return Err(KuramotoError::InvalidPartition(format!(
                    "index {old} out of range for size {size}"
                )));
            }
            if inverse[old] != usize::MAX {
                return Err(KuramotoError::InvalidPartition(format!(
                    "index {old} appears in more than one community"
                )));
            }
            inverse[old] = new;
        }
        Ok(Self {
            size,
            communities,
            permutation,
            inverse,
        })
    }

    /// Contiguous blocks of the given sizes with the identity permutation.
    pub fn contiguous(sizes: &[usize]) -> Result<Self> {
        let size = sizes.iter().sum();
        let mut communities = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &s in sizes {
            communities.push((start..start + s).collect());
            start += s;
        }
        Self::from_communities(size, communities)
    }

    /// One community holding everything in natural order.
    pub fn single(size: usize) -> Result<Self> {
        Self::contiguous(&[size])
    }

    /// Every node its own community.
    pub fn singletons(size: usize) -> Result<Self> {
        Self::from_communities(size, (0..size).map(|i| vec![i]).collect())
    }

    /// A permutation wrapped as a single shuffled community.
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let size = order.len();
        Self::from_communities(size, vec![order])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_communities(&self) -> usize {
        self.communities.len()
    }

    pub fn communities(&self) -> &[Vec<usize>] {
        &self.communities
    }

    pub fn community(&self, i: usize) -> &[usize] {
        &self.communities[i]
    }

    pub fn community_sizes(&self) -> Vec<usize> {
        self.communities.iter().map(|c| c.len()).collect()
    }

    /// `permutation()[new] = old`.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// `inverse()[old] = new`.
    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    /// Community label of each original index.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.size];
        for (b, c) in self.communities.iter().enumerate() {
            for &i in c {
                labels[i] = b;
            }
        }
        labels
    }

    pub fn is_identity(&self) -> bool {
        self.permutation.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Same block sizes, identity ordering: the partition seen by a graph
    /// that has already been permuted with this partition.
    pub fn to_contiguous(&self) -> Self {
        let sizes = self.community_sizes();
        Self::contiguous(&sizes).expect("sizes of a valid partition stay valid")
    }

    /// Gathers into the permuted order: `out[new] = xs[old]`.
    pub fn apply_to_slice<T: Copy>(&self, xs: &[T]) -> Result<Vec<T>> {
        if xs.len() != self.size {
            return Err(KuramotoError::LengthMismatch {
                expected: self.size,
                got: xs.len(),
            });
        }
        Ok(self.permutation.iter().map(|&old| xs[old]).collect())
    }

    /// Scatters back to the original order: inverse of [`apply_to_slice`].
    ///
    /// [`apply_to_slice`]: Self::apply_to_slice
    pub fn unapply_to_slice<T: Copy>(&self, xs: &[T]) -> Result<Vec<T>> {
        if xs.len() != self.size {
            return Err(KuramotoError::LengthMismatch {
                expected: self.size,
                got: xs.len(),
            });
        }
        Ok(self.inverse.iter().map(|&new| xs[new]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_overlap_and_gaps() {
        assert!(BlockPartition::from_communities(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(BlockPartition::from_communities(3, vec![vec![0], vec![2]]).is_err());
        assert!(BlockPartition::from_communities(3, vec![vec![0, 3], vec![1, 2]]).is_err());
    }

    #[test]
    fn contiguous_blocks_are_identity() {
        let p = BlockPartition::contiguous(&[2, 3]).unwrap();
        assert!(p.is_identity());
        assert_eq!(p.community(1), &[2, 3, 4]);
        assert_eq!(p.labels(), vec![0, 0, 1, 1, 1]);
    }

    #[test]
    fn apply_then_unapply_is_identity() {
        let p = BlockPartition::from_communities(5, vec![vec![3, 1], vec![4, 0, 2]]).unwrap();
        let xs = [10, 11, 12, 13, 14];
        let permuted = p.apply_to_slice(&xs).unwrap();
        assert_eq!(permuted, vec![13, 11, 14, 10, 12]);
        let back = p.unapply_to_slice(&permuted).unwrap();
        assert_eq!(back.as_slice(), &xs);
    }

    proptest! {
        #[test]
        fn permutation_composes_with_inverse(size in 1usize..60, seed in any::<u64>()) {
            let mut order: Vec<usize> = (0..size).collect();
            let mut rng = crate::generators::SplitMix64::new(seed);
            rng.shuffle(&mut order);
            let p = BlockPartition::from_order(order).unwrap();
            for i in 0..size {
                prop_assert_eq!(p.inverse()[p.permutation()[i]], i);
                prop_assert_eq!(p.permutation()[p.inverse()[i]], i);
            }
            let xs: Vec<usize> = (0..size).map(|i| 100 + i).collect();
            let round = p.unapply_to_slice(&p.apply_to_slice(&xs).unwrap()).unwrap();
            prop_assert_eq!(round, xs);
        }
    }
}
