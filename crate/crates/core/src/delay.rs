//! Delay profiles, row-shifted codewords and full-rank certification.
//!
//! A delay profile holds one nonnegative integer offset per relay row,
//! referenced to the earliest arrival (minimum entry 0). Applying a profile
//! zero-pads each row into an M x (T + d_max) matrix. A code is
//! delay-tolerant when every shifted nonzero difference codeword keeps rank
//! M; `certify` sweeps difference vectors against a set of profiles and
//! reports the smallest M-th singular value seen plus any rank violations.

use crate::codes::Code;
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, Cx, SvdWorkspace, RANK_TOL};
use crate::sweep::DiffSweep;
use rayon::prelude::*;
use std::fmt;

/// Errors from profile construction and application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DelayError {
    EmptyProfile,
    NotReferenced { min: usize },
    RowMismatch { rows: usize, profile: usize },
}

impl fmt::Display for DelayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DelayError::EmptyProfile => write!(f, "delay profile must be nonempty"),
            DelayError::NotReferenced { min } => write!(
                f,
                "delays are relative to the earliest relay; minimum entry must be 0, got {min}"
            ),
            DelayError::RowMismatch { rows, profile } => write!(
                f,
                "codeword has {rows} rows but the profile lists {profile} delays"
            ),
        }
    }
}

impl std::error::Error for DelayError {}

/// Per-relay integer delays with minimum entry 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DelayProfile {
    delays: Vec<usize>,
}

/// The four-relay profile taxonomy, plus the synchronous case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileType {
    Sync,
    /// All four delays distinct.
    Type1,
    /// Exactly one pair equal.
    Type2,
    /// Two pairs, pair separation >= 2.
    Type3I,
    /// Two pairs, pair separation 1.
    Type3II,
    /// Three delays equal.
    Type4,
}

impl fmt::Display for ProfileType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProfileType::Sync => "sync",
            ProfileType::Type1 => "1",
            ProfileType::Type2 => "2",
            ProfileType::Type3I => "3I",
            ProfileType::Type3II => "3II",
            ProfileType::Type4 => "4",
        };
        write!(f, "{s}")
    }
}

impl DelayProfile {
    /// Build a profile; the minimum entry must be 0.
    pub fn new(delays: Vec<usize>) -> Result<Self, DelayError> {
        let min = *delays.iter().min().ok_or(DelayError::EmptyProfile)?;
        if min != 0 {
            return Err(DelayError::NotReferenced { min });
        }
        Ok(Self { delays })
    }

    /// The all-zero (synchronous) profile for m relays.
    pub fn sync(m: usize) -> Self {
        Self { delays: vec![0; m] }
    }

    pub fn delays(&self) -> &[usize] {
        &self.delays
    }

    pub fn relays(&self) -> usize {
        self.delays.len()
    }

    pub fn d_max(&self) -> usize {
        self.delays.iter().copied().max().unwrap_or(0)
    }

    pub fn is_sync(&self) -> bool {
        self.d_max() == 0
    }

    /// Classify per the four-relay taxonomy. Returns None for asynchronous
    /// profiles of other sizes, where the taxonomy is not defined.
    pub fn classify(&self) -> Option<ProfileType> {
        if self.is_sync() {
            return Some(ProfileType::Sync);
        }
        if self.delays.len() != 4 {
            return None;
        }
        let mut sorted = self.delays.clone();
        sorted.sort_unstable();
        let mut counts: Vec<usize> = Vec::new();
        let mut run = 1usize;
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                counts.push(run);
                run = 1;
            }
        }
        counts.push(run);
        counts.sort_unstable();
        Some(match counts.as_slice() {
            [1, 1, 1, 1] => ProfileType::Type1,
            [1, 1, 2] => ProfileType::Type2,
            // values are {0, a}; the pair separation decides the subtype
            [2, 2] => {
                if self.d_max() == 1 {
                    ProfileType::Type3II
                } else {
                    ProfileType::Type3I
                }
            }
            [1, 3] => ProfileType::Type4,
            _ => unreachable!("four delays always partition into one of the patterns"),
        })
    }
}

impl fmt::Display for DelayProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.delays.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// A codeword after row shifting: M x (T + d_max) with row i carrying
/// exactly delays[i] leading zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedCodeword {
    pub matrix: ComplexMatrix,
    pub profile: DelayProfile,
}

/// Zero-pad each row of `x` by its delay: row i of the output is
/// `[0^{d_i} | row i | 0^{d_max - d_i}]`.
pub fn apply_delay(x: &ComplexMatrix, d: &DelayProfile) -> Result<ShiftedCodeword, DelayError> {
    if x.rows() != d.relays() {
        return Err(DelayError::RowMismatch {
            rows: x.rows(),
            profile: d.relays(),
        });
    }
    let mut out = ComplexMatrix::zeros(x.rows(), x.cols() + d.d_max());
    shift_into(x, d, &mut out);
    Ok(ShiftedCodeword {
        matrix: out,
        profile: d.clone(),
    })
}

/// In-place variant of `apply_delay` for hot sweeps; `out` must already be
/// M x (T + d_max).
fn shift_into(x: &ComplexMatrix, d: &DelayProfile, out: &mut ComplexMatrix) {
    debug_assert_eq!(out.rows(), x.rows());
    debug_assert_eq!(out.cols(), x.cols() + d.d_max());
    for r in 0..x.rows() {
        let shift = d.delays()[r];
        for c in 0..out.cols() {
            out[(r, c)] = Cx::new(0.0, 0.0);
        }
        for c in 0..x.cols() {
            out[(r, c + shift)] = x[(r, c)];
        }
    }
}

/// All delay profiles in {0..d_max}^m containing at least one zero, in
/// lexicographic order.
pub fn enumerate_profiles(m: usize, d_max: usize) -> Vec<DelayProfile> {
    let base = d_max + 1;
    let total = base.pow(m as u32);
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rest = idx;
        let mut delays = vec![0usize; m];
        let mut has_zero = false;
        for slot in delays.iter_mut().rev() {
            *slot = rest % base;
            rest /= base;
            has_zero |= *slot == 0;
        }
        if has_zero {
            out.push(DelayProfile { delays });
        }
    }
    out
}

/// One rank violation found during certification.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Flat sweep index of the offending difference vector.
    pub vector_index: u64,
    pub vector: Vec<Cx>,
    pub rank: usize,
    pub sigma_min: f64,
}

/// Per-profile certification record.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRecord {
    pub profile: DelayProfile,
    pub vectors_tested: u64,
    /// Smallest M-th singular value observed over all tested vectors.
    pub min_sigma: f64,
    /// Sweep index attaining `min_sigma`.
    pub min_sigma_index: u64,
    pub violation_count: u64,
    /// First few violations, by sweep index.
    pub violations: Vec<Violation>,
}

/// Full certification report for one code.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifyReport {
    pub code: String,
    pub budget: u64,
    pub seed: u64,
    pub exhaustive: bool,
    pub records: Vec<ProfileRecord>,
}

impl CertifyReport {
    pub fn total_violations(&self) -> u64 {
        self.records.iter().map(|r| r.violation_count).sum()
    }

    pub fn passed(&self) -> bool {
        self.total_violations() == 0
    }

    /// Structured text rendering: one record per profile.
    pub fn render(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        writeln!(
            s,
            "certify-delay code={} search={} budget={} seed={}",
            self.code,
            if self.exhaustive {
                "exhaustive"
            } else {
                "sampled"
            },
            self.budget,
            self.seed
        )
        .unwrap();
        for rec in &self.records {
            writeln!(
                s,
                "profile={} type={} vectors={} min_sigma={:.6e} at_index={} violations={}",
                rec.profile,
                rec.profile
                    .classify()
                    .map(|t| t.to_string())
                    .unwrap_or_else(|| "-".to_string()),
                rec.vectors_tested,
                rec.min_sigma,
                rec.min_sigma_index,
                rec.violation_count
            )
            .unwrap();
            for v in &rec.violations {
                writeln!(
                    s,
                    "  violation index={} rank={} sigma_min={:.6e} vector={}",
                    v.vector_index,
                    v.rank,
                    v.sigma_min,
                    format_vector(&v.vector)
                )
                .unwrap();
            }
        }
        writeln!(s, "result={}", if self.passed() { "PASS" } else { "FAIL" }).unwrap();
        s
    }
}

fn format_vector(v: &[Cx]) -> String {
    use std::fmt::Write;
    let mut s = String::from("[");
    for (i, z) in v.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        write!(s, "{:+.3}{:+.3}i", z.re, z.im).unwrap();
    }
    s.push(']');
    s
}

const VIOLATIONS_KEPT: usize = 8;
const CHUNK: u64 = 2048;

/// Gram-eigenvalue ratio above which a shifted codeword is certainly full
/// rank (sigma_min / sigma_max > 1e-6, three orders above the rank
/// tolerance and far above the eigenvalue roundoff floor). Below it the
/// authoritative one-sided SVD run decides.
const FAST_FULL_RANK_CUTOFF: f64 = 1e-12;

/// Determinant of a small Hermitian PSD matrix via in-place LU with partial
/// pivoting; clamped at zero against roundoff.
fn gram_det(gram: &[Cx], m: usize, scratch: &mut Vec<Cx>) -> f64 {
    scratch.clear();
    scratch.extend_from_slice(gram);
    let lu = scratch;
    let mut sign = 1.0;
    for k in 0..m {
        let mut p = k;
        let mut pmax = lu[k * m + k].norm_sqr();
        for r in (k + 1)..m {
            let v = lu[r * m + k].norm_sqr();
            if v > pmax {
                pmax = v;
                p = r;
            }
        }
        if pmax == 0.0 {
            return 0.0;
        }
        if p != k {
            for c in 0..m {
                lu.swap(k * m + c, p * m + c);
            }
            sign = -sign;
        }
        let piv = lu[k * m + k];
        for r in (k + 1)..m {
            let f = lu[r * m + k] / piv;
            for c in (k + 1)..m {
                let sub = f * lu[k * m + c];
                lu[r * m + c] -= sub;
            }
        }
    }
    let mut d = Cx::new(sign, 0.0);
    for k in 0..m {
        d *= lu[k * m + k];
    }
    d.re.max(0.0)
}

/// Row-pair correlations of a codeword at every lag in [-lag_max, lag_max]:
/// `corr(i, j, l) = sum_u x[i, u] * conj(x[j, u + l])`. The Gram matrix of
/// any shifted codeword is a lookup into this table, because shifting row i
/// by d_i turns the (i, j) Gram entry into the correlation at lag d_i - d_j.
fn row_correlations(x: &ComplexMatrix, lag_max: usize, corr: &mut [Cx]) {
    let m = x.rows();
    let t = x.cols();
    let width = 2 * lag_max + 1;
    debug_assert_eq!(corr.len(), m * m * width);
    for i in 0..m {
        for j in 0..m {
            for (li, slot) in corr[(i * m + j) * width..(i * m + j + 1) * width]
                .iter_mut()
                .enumerate()
            {
                let lag = li as isize - lag_max as isize;
                let mut acc = Cx::new(0.0, 0.0);
                let u_lo = 0.max(-lag) as usize;
                let u_hi = (t as isize).min(t as isize - lag).max(0) as usize;
                for u in u_lo..u_hi {
                    acc += x[(i, u)] * x[(j, (u as isize + lag) as usize)].conj();
                }
                *slot = acc;
            }
        }
    }
}

#[derive(Clone)]
struct ProfilePartial {
    tested: u64,
    min_sigma: f64,
    min_sigma_index: u64,
    violation_count: u64,
    violations: Vec<Violation>,
}

impl ProfilePartial {
    fn new() -> Self {
        Self {
            tested: 0,
            min_sigma: f64::INFINITY,
            min_sigma_index: 0,
            violation_count: 0,
            violations: Vec::new(),
        }
    }

    fn merge(&mut self, other: &Self) {
        self.tested += other.tested;
        if other.min_sigma < self.min_sigma {
            self.min_sigma = other.min_sigma;
            self.min_sigma_index = other.min_sigma_index;
        }
        self.violation_count += other.violation_count;
        for v in &other.violations {
            if self.violations.len() < VIOLATIONS_KEPT {
                self.violations.push(v.clone());
            }
        }
    }
}

/// Sweep difference vectors against every profile in `profiles` and check
/// that each shifted difference codeword keeps rank M. The sweep is
/// exhaustive when `|diffs|^k <= budget`, otherwise all weight-1/2 vectors
/// plus `budget` seeded samples. Violations are report content, not errors.
pub fn certify_profiles(
    code: &Code,
    diffs: &[Cx],
    profiles: &[DelayProfile],
    budget: u64,
    seed: u64,
) -> CertifyReport {
    let k = code.symbols_per_codeword();
    let m = code.antennas();
    let t = code.channel_uses();
    let sweep = DiffSweep::plan(diffs, k, budget, budget, seed);
    let n = sweep.len();
    let nchunks = n.div_ceil(CHUNK);

    let lag_max = profiles.iter().map(|p| p.d_max()).max().unwrap_or(0);
    let width = 2 * lag_max + 1;
    let partials: Vec<Vec<ProfilePartial>> = (0..nchunks)
        .into_par_iter()
        .map(|ci| {
            let mut svd = SvdWorkspace::new();
            let mut vector = vec![Cx::new(0.0, 0.0); k];
            let mut corr = vec![Cx::new(0.0, 0.0); m * m * width];
            let mut gram = vec![Cx::new(0.0, 0.0); m * m];
            let mut lu_scratch: Vec<Cx> = Vec::with_capacity(m * m);
            let mut evals: Vec<f64> = Vec::with_capacity(m);
            let mut shifted: Vec<ComplexMatrix> = profiles
                .iter()
                .map(|p| ComplexMatrix::zeros(m, t + p.d_max()))
                .collect();
            let mut parts = vec![ProfilePartial::new(); profiles.len()];
            let lo = ci * CHUNK;
            let hi = n.min(lo + CHUNK);
            for idx in lo..hi {
                if !sweep.fill(idx, &mut vector) {
                    continue;
                }
                let x = code.encode(&vector).expect("sweep vector length").matrix;
                row_correlations(&x, lag_max, &mut corr);
                for (pi, profile) in profiles.iter().enumerate() {
                    let delays = profile.delays();
                    for i in 0..m {
                        for j in 0..m {
                            let lag = delays[i] as isize - delays[j] as isize;
                            let li = (lag + lag_max as isize) as usize;
                            gram[i * m + j] = corr[(i * m + j) * width + li];
                        }
                    }
                    let part = &mut parts[pi];
                    part.tested += 1;
                    // cheap certificate: by AM-GM the product of the m-1
                    // largest eigenvalues is at most (trace/(m-1))^{m-1}, so
                    // lambda_min >= det * ((m-1)/trace)^{m-1}; a large enough
                    // bound proves full rank and rules out a new minimum
                    // without any eigenvalue work
                    let trace: f64 = (0..m).map(|i| gram[i * m + i].re).sum();
                    if trace > 0.0 {
                        let det_g = gram_det(&gram, m, &mut lu_scratch);
                        let lam_bound = det_g / (trace / (m as f64 - 1.0)).powi(m as i32 - 1);
                        let sigma_bound = lam_bound.max(0.0).sqrt();
                        if sigma_bound > part.min_sigma && sigma_bound > 1e-6 * trace.sqrt() {
                            continue;
                        }
                    }
                    hermitian_eigenvalues(&mut gram, m, &mut evals);
                    let lmax = evals[0].max(0.0);
                    let lmin = evals[m - 1].max(0.0);
                    let (sigma_min, rank) = if lmax > 0.0 && lmin > FAST_FULL_RANK_CUTOFF * lmax {
                        (lmin.sqrt(), m)
                    } else {
                        // near-singular: decide with the high-relative-accuracy route
                        shift_into(&x, profile, &mut shifted[pi]);
                        let sv = svd.compute(&shifted[pi]);
                        let rank = sv.iter().filter(|&&s| s > RANK_TOL * sv[0]).count();
                        (sv[m - 1], rank)
                    };
                    if sigma_min < part.min_sigma {
                        part.min_sigma = sigma_min;
                        part.min_sigma_index = idx;
                    }
                    if rank < m {
                        part.violation_count += 1;
                        if part.violations.len() < VIOLATIONS_KEPT {
                            part.violations.push(Violation {
                                vector_index: idx,
                                vector: vector.clone(),
                                rank,
                                sigma_min,
                            });
                        }
                    }
                }
            }
            parts
        })
        .collect();

    let mut merged = vec![ProfilePartial::new(); profiles.len()];
    for chunk_parts in &partials {
        for (acc, part) in merged.iter_mut().zip(chunk_parts) {
            acc.merge(part);
        }
    }

    let records = profiles
        .iter()
        .zip(merged)
        .map(|(profile, part)| ProfileRecord {
            profile: profile.clone(),
            vectors_tested: part.tested,
            min_sigma: if part.min_sigma.is_finite() {
                part.min_sigma
            } else {
                0.0
            },
            min_sigma_index: part.min_sigma_index,
            violation_count: part.violation_count,
            violations: part.violations,
        })
        .collect();

    CertifyReport {
        code: code.name().to_string(),
        budget,
        seed,
        exhaustive: sweep.is_exhaustive(),
        records,
    }
}

/// Certify every profile up to `d_max` (all vectors in {0..d_max}^M with a
/// zero entry).
pub fn certify_delay_tolerance(
    code: &Code,
    diffs: &[Cx],
    d_max: usize,
    budget: u64,
    seed: u64,
) -> CertifyReport {
    let profiles = enumerate_profiles(code.antennas(), d_max);
    certify_profiles(code, diffs, &profiles, budget, seed)
}
