//! Reproducible test-instance generation: random threshold matrices, planted
//! block matrices with coefficient flips, and the standard frequency/phase
//! choices.

use crate::error::{KuramotoError, Result};
use crate::graph::CouplingGraph;
use crate::model::{NaturalFrequencies, PhaseState};
use crate::partition::BlockPartition;
use crate::scalar::{from_usize, lit, Real};

/// SplitMix64 pseudo-random generator.
///
/// This is the generator family fixed repo-wide for instance construction:
/// identical seeds give bit-identical instances on every platform, with no
/// dependence on external RNG crate versions. Not cryptographic.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from the half-open interval [0, 1), 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index below `n`. Modulo bias is ~n/2^64, irrelevant here.
    pub fn next_below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.next_below(i + 1);
            xs.swap(i, j);
        }
    }
}

/// Random 0/1 matrix: each coefficient is one when the uniform draw z
/// exceeds the threshold p, generated row-major so instances are
/// seed-reproducible. Expected density is 1 − p.
///
/// The endpoints are exact by construction: p = 0 yields the complete
/// matrix and p = 1 the empty one, with no draw consumed.
pub fn random_threshold_matrix(m: usize, p: f64, seed: u64) -> Result<CouplingGraph> {
    if m == 0 {
        return Err(KuramotoError::InvalidInput("size must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(KuramotoError::InvalidInput(format!(
            "threshold must lie in [0, 1], got {p}"
        )));
    }
    if p == 0.0 {
        return Ok(CouplingGraph::complete(m));
    }
    if p == 1.0 {
        return Ok(CouplingGraph::empty(m));
    }
    let mut rng = SplitMix64::new(seed);
    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let row: Vec<usize> = (0..m).filter(|_| rng.next_f64() > p).collect();
        rows.push(row);
    }
    CouplingGraph::from_nonzero_rows(m, rows)
}

/// Block-diagonal indicator matrix with all-ones blocks of the given sizes
/// (diagonal included), zero elsewhere, plus per-coefficient flips: a
/// coefficient is toggled whenever its uniform draw z falls below `p_flip`.
///
/// Returns the flipped matrix A, the clean indicator B, and the true
/// partition. With `symmetric`, flip decisions are drawn only for the upper
/// triangle (ℓ ≥ m) and mirrored; otherwise draws are independent per
/// ordered pair (row-major), so A is generally asymmetric.
pub fn planted_block_matrix_with_sizes(
    sizes: &[usize],
    p_flip: f64,
    seed: u64,
    symmetric: bool,
) -> Result<(CouplingGraph, CouplingGraph, BlockPartition)> {
    if sizes.is_empty() || sizes.iter().any(|&s| s == 0) {
        return Err(KuramotoError::InvalidInput(
            "block sizes must be nonempty and positive".into(),
        ));
    }
    if !(0.0..=1.0).contains(&p_flip) {
        return Err(KuramotoError::InvalidInput(format!(
            "flip probability must lie in [0, 1], got {p_flip}"
        )));
    }
    let m: usize = sizes.iter().sum();
    let partition = BlockPartition::contiguous(sizes)?;
    let block_of: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat(b).take(s))
        .collect();

    let indicator_rows: Vec<Vec<usize>> = (0..m)
        .map(|r| partition.community(block_of[r]).to_vec())
        .collect();
    let indicator = CouplingGraph::from_nonzero_rows(m, indicator_rows)?;

    let mut rng = SplitMix64::new(seed);
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); m];
    if symmetric {
        for r in 0..m {
            for c in r..m {
                let planted = block_of[r] == block_of[c];
                let flip = p_flip > 0.0 && rng.next_f64() < p_flip;
                if planted != flip {
                    rows[r].push(c);
                    if c != r {
                        rows[c].push(r);
                    }
                }
            }
        }
    } else {
        for r in 0..m {
            for c in 0..m {
                let planted = block_of[r] == block_of[c];
                let flip = p_flip > 0.0 && rng.next_f64() < p_flip;
                if planted != flip {
                    rows[r].push(c);
                }
            }
        }
    }
    let flipped = CouplingGraph::from_nonzero_rows(m, rows)?;
    Ok((flipped, indicator, partition))
}

/// Planted matrix with the standard four blocks of sizes 4s, 3s, 2s, s
/// (total M = 10s).
pub fn planted_block_matrix(
    s: usize,
    p_flip: f64,
    seed: u64,
    symmetric: bool,
) -> Result<(CouplingGraph, CouplingGraph, BlockPartition)> {
    if s == 0 {
        return Err(KuramotoError::InvalidInput("s must be at least 1".into()));
    }
    planted_block_matrix_with_sizes(&[4 * s, 3 * s, 2 * s, s], p_flip, seed, symmetric)
}

/// Intrinsic frequencies spread around 1:
/// ω_m = 1 + ω0 (2m − M − 1)/(M − 1) for m = 1..M.
pub fn default_frequencies<T: Real>(m: usize, omega0: T) -> Result<NaturalFrequencies<T>> {
    if m < 2 {
        return Err(KuramotoError::InvalidInput(
            "default frequencies need M >= 2".into(),
        ));
    }
    let mm = from_usize::<T>(m);
    let denom = mm - T::one();
    let omega = (1..=m)
        .map(|i| {
            let num = lit::<T>(2.0) * from_usize::<T>(i) - mm - T::one();
            T::one() + omega0 * num / denom
        })
        .collect();
    NaturalFrequencies::new(omega)
}

/// Equispaced initial phases θ_m(0) = 2πm/M for m = 1..M (unwrapped; the
/// last oscillator starts at exactly 2π).
pub fn default_initial_phases<T: Real>(m: usize) -> Result<PhaseState<T>> {
    if m == 0 {
        return Err(KuramotoError::InvalidInput("size must be at least 1".into()));
    }
    let tau = T::TAU();
    let mm = from_usize::<T>(m);
    let phases = (1..=m).map(|i| tau * from_usize::<T>(i) / mm).collect();
    PhaseState::new(phases, T::zero())
}

/// Phases drawn i.i.d. uniformly from [0, 2π].
///
/// Draws happen in f64 and convert to the scalar type afterwards, so the
/// consumed random stream is independent of the scalar width.
pub fn random_phases<T: Real>(m: usize, seed: u64) -> Result<PhaseState<T>> {
    if m == 0 {
        return Err(KuramotoError::InvalidInput("size must be at least 1".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let phases = (0..m)
        .map(|_| lit::<T>(rng.next_f64() * std::f64::consts::TAU))
        .collect();
    PhaseState::new(phases, T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn threshold_endpoints_are_exact() {
        let full = random_threshold_matrix(5, 0.0, 1).unwrap();
        assert_eq!(full.total_ones(), 25);
        let none = random_threshold_matrix(5, 1.0, 1).unwrap();
        assert_eq!(none.total_ones(), 0);
    }

    #[test]
    fn sparse_threshold_density_lands_in_band() {
        let g = random_threshold_matrix(1000, 0.99, 7).unwrap();
        let density = g.total_ones() as f64 / 1e6;
        assert!((0.005..=0.02).contains(&density), "density {density}");
    }

    #[test]
    fn generation_is_deterministic() {
        let a = random_threshold_matrix(60, 0.4, 42).unwrap();
        let b = random_threshold_matrix(60, 0.4, 42).unwrap();
        assert_eq!(a, b);
        let c = random_threshold_matrix(60, 0.4, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn planted_clean_matrix_has_expected_density() {
        let (a, b, part) = planted_block_matrix(10, 0.0, 3, false).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total_ones(), 1600 + 900 + 400 + 100);
        assert_eq!(a.total_ones() as f64 / 1e4, 0.30);
        assert_eq!(part.community_sizes(), vec![40, 30, 20, 10]);
        assert!(a.is_symmetric());
    }

    #[test]
    fn full_flip_complements_the_indicator() {
        let (a, b, _) = planted_block_matrix(2, 1.0, 9, false).unwrap();
        let m = a.size();
        for r in 0..m {
            for c in 0..m {
                assert_eq!(a.contains(r, c), !b.contains(r, c));
            }
        }
    }

    #[test]
    fn flip_count_is_within_binomial_bounds() {
        let s = 10;
        let p = 0.2;
        let (a, b, _) = planted_block_matrix(s, p, 11, false).unwrap();
        let m = a.size();
        let flipped: usize = (0..m)
            .map(|r| (0..m).filter(|&c| a.contains(r, c) != b.contains(r, c)).count())
            .sum();
        let n = (m * m) as f64;
        let mean = p * n;
        let sigma = (n * p * (1.0 - p)).sqrt();
        assert!(
            (flipped as f64 - mean).abs() <= 3.0 * sigma,
            "flipped {flipped} outside 3 sigma of {mean}"
        );
    }

    #[test]
    fn symmetric_mode_mirrors_flips() {
        let (a, _, _) = planted_block_matrix(5, 0.3, 17, true).unwrap();
        assert!(a.is_symmetric());
        let (a2, _, _) = planted_block_matrix(5, 0.3, 17, false).unwrap();
        assert!(!a2.is_symmetric());
    }

    #[test]
    fn frequency_formula_matches_hand_values() {
        let f = default_frequencies::<f64>(3, 2.0).unwrap();
        assert_eq!(f.as_slice(), &[-1.0, 1.0, 3.0]);
        let flat = default_frequencies::<f64>(7, 0.0).unwrap();
        assert!(flat.as_slice().iter().all(|&w| w == 1.0));
    }

    #[test]
    fn frequencies_are_symmetric_about_one() {
        let m = 12;
        let f = default_frequencies::<f64>(m, 1.7).unwrap();
        for i in 0..m {
            let sum = f.get(i) + f.get(m - 1 - i);
            assert!((sum - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn default_phases_match_hand_values() {
        let s = default_initial_phases::<f64>(4).unwrap();
        let expect = [PI / 2.0, PI, 3.0 * PI / 2.0, 2.0 * PI];
        for (a, b) in s.phases().iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn random_phases_stay_in_range_and_reproduce() {
        let a = random_phases::<f64>(200, 5).unwrap();
        assert!(a.phases().iter().all(|&p| (0.0..=2.0 * PI).contains(&p)));
        let b = random_phases::<f64>(200, 5).unwrap();
        assert_eq!(a.phases(), b.phases());
    }
}
