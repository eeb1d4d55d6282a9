//! Difference-vector sweeps for brute-force certification.
//!
//! A sweep is either exhaustive over the k-fold product of a scalar
//! difference alphabet or, when that explodes, the union of all weight-1 and
//! weight-2 vectors with a seeded uniform sample. Vectors are addressed by a
//! flat index so parallel consumers can walk deterministic chunks; the same
//! index always yields the same vector regardless of thread count.

use crate::linalg::Cx;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// How a sweep covers the difference space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepKind {
    /// Every vector in alphabet^k (the all-zero index is skipped on fill).
    Exhaustive,
    /// All weight-1 and weight-2 vectors, then `sampled` random vectors.
    LowWeightPlusSampled { sampled: u64 },
}

/// An indexed set of difference vectors over a scalar alphabet.
#[derive(Debug, Clone)]
pub struct DiffSweep {
    alphabet: Vec<Cx>,
    nonzero: Vec<Cx>,
    k: usize,
    kind: SweepKind,
    seed: u64,
    pairs: Vec<(usize, usize)>,
    total: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl DiffSweep {
    /// Plan a sweep: exhaustive when `|alphabet|^k <= exhaustive_cap`,
    /// otherwise weight-<=2 vectors plus `budget` samples.
    pub fn plan(alphabet: &[Cx], k: usize, budget: u64, exhaustive_cap: u64, seed: u64) -> Self {
        let nonzero: Vec<Cx> = alphabet
            .iter()
            .copied()
            .filter(|z| z.norm_sqr() > 0.0)
            .collect();
        let asize = alphabet.len() as u64;
        let space: Option<u64> = asize.checked_pow(k as u32);
        let kind = match space {
            Some(total) if total <= exhaustive_cap => SweepKind::Exhaustive,
            _ => SweepKind::LowWeightPlusSampled { sampled: budget },
        };
        let pairs: Vec<(usize, usize)> = (0..k)
            .flat_map(|p| ((p + 1)..k).map(move |q| (p, q)))
            .collect();
        let nz = nonzero.len() as u64;
        let total = match kind {
            SweepKind::Exhaustive => space.unwrap(),
            SweepKind::LowWeightPlusSampled { sampled } => {
                k as u64 * nz + pairs.len() as u64 * nz * nz + sampled
            }
        };
        Self {
            alphabet: alphabet.to_vec(),
            nonzero,
            k,
            kind,
            seed,
            pairs,
            total,
        }
    }

    /// Flat index count, including indices that decode to the zero vector.
    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn is_exhaustive(&self) -> bool {
        self.kind == SweepKind::Exhaustive
    }

    pub fn kind(&self) -> &SweepKind {
        &self.kind
    }

    /// Number of nonzero scalars available.
    pub fn nonzero_scalars(&self) -> usize {
        self.nonzero.len()
    }

    /// Decode flat index `idx` into `out` (length k). Returns false when the
    /// decoded vector is zero and should be skipped.
    pub fn fill(&self, idx: u64, out: &mut [Cx]) -> bool {
        debug_assert_eq!(out.len(), self.k);
        match self.kind {
            SweepKind::Exhaustive => {
                let base = self.alphabet.len() as u64;
                let mut rest = idx;
                let mut any = false;
                for slot in out.iter_mut() {
                    let digit = (rest % base) as usize;
                    rest /= base;
                    *slot = self.alphabet[digit];
                    any |= slot.norm_sqr() > 0.0;
                }
                any
            }
            SweepKind::LowWeightPlusSampled { .. } => {
                let nz = self.nonzero.len() as u64;
                let w1 = self.k as u64 * nz;
                let w2 = self.pairs.len() as u64 * nz * nz;
                for slot in out.iter_mut() {
                    *slot = Cx::new(0.0, 0.0);
                }
                if idx < w1 {
                    let pos = (idx / nz) as usize;
                    let val = (idx % nz) as usize;
                    out[pos] = self.nonzero[val];
                } else if idx < w1 + w2 {
                    let rest = idx - w1;
                    let pair = (rest / (nz * nz)) as usize;
                    let combo = rest % (nz * nz);
                    let (p, q) = self.pairs[pair];
                    out[p] = self.nonzero[(combo / nz) as usize];
                    out[q] = self.nonzero[(combo % nz) as usize];
                } else {
                    let sample_idx = idx - w1 - w2;
                    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(
                        self.seed ^ sample_idx.rotate_left(17),
                    ));
                    loop {
                        let mut any = false;
                        for slot in out.iter_mut() {
                            let digit = rng.gen_range(0..self.alphabet.len());
                            *slot = self.alphabet[digit];
                            any |= slot.norm_sqr() > 0.0;
                        }
                        if any {
                            break;
                        }
                    }
                }
                true
            }
        }
    }
}
