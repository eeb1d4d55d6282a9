//! Brute-force certification of code algebra: minimum determinants,
//! minimum product distances, and cofactor / minor non-vanishing sweeps.
//!
//! All metrics are computed on unnormalized integer-lattice differences
//! (prior to any SNR normalization), so the reported floors are the code
//! constants themselves. Sweeps are exhaustive up to `EXHAUSTIVE_CAP`
//! vectors and otherwise cover all weight-1/weight-2 vectors plus a seeded
//! uniform sample; results are deterministic for a fixed seed and
//! independent of thread count.

use crate::codes::Code;
use crate::constellation::difference_alphabet;
use crate::fields::GeneratorSet;
use crate::linalg::{det, ComplexMatrix, Cx};
use crate::sweep::DiffSweep;
use rayon::prelude::*;
use std::fmt;

/// Vector-space size above which sweeps switch to sampling.
pub const EXHAUSTIVE_CAP: u64 = 10_000_000;

/// Which quantity a report minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    MinDet,
    MinProdDist,
    MinMinor,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Metric::MinDet => "min_det",
            Metric::MinProdDist => "min_prod_dist",
            Metric::MinMinor => "min_minor",
        };
        write!(f, "{s}")
    }
}

/// How the search space was covered; the payload is the number of nonzero
/// vectors examined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchKind {
    Exhaustive(u64),
    Sampled(u64),
}

impl fmt::Display for SearchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchKind::Exhaustive(n) => write!(f, "exhaustive({n})"),
            SearchKind::Sampled(n) => write!(f, "sampled({n})"),
        }
    }
}

/// Result of one metric sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub code: String,
    pub metric: Metric,
    pub value: f64,
    pub argmin: Vec<Cx>,
    pub search: SearchKind,
}

impl MetricReport {
    /// One structured text record.
    pub fn render(&self) -> String {
        let mut arg = String::from("[");
        for (i, z) in self.argmin.iter().enumerate() {
            if i > 0 {
                arg.push(',');
            }
            arg.push_str(&format!("{:+.3}{:+.3}i", z.re, z.im));
        }
        arg.push(']');
        format!(
            "metric={} code={} search={} value={:.12e} argmin={}",
            self.metric, self.code, self.search, self.value, arg
        )
    }
}

/// Errors from metric sweeps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricError {
    /// The difference alphabet held no nonzero scalar.
    NoNonzeroVectors,
    /// The operation is defined for specific dimensions only.
    UnsupportedDimension { expected: &'static str, got: usize },
    /// q must be a supported constellation size.
    BadConstellation(String),
}

impl fmt::Display for MetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricError::NoNonzeroVectors => {
                write!(f, "difference alphabet contains no nonzero vector")
            }
            MetricError::UnsupportedDimension { expected, got } => {
                write!(f, "operation defined for dimension {expected}, got {got}")
            }
            MetricError::BadConstellation(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for MetricError {}

const CHUNK: u64 = 2048;

/// Deterministic parallel minimum of `eval` over the nonzero vectors of a
/// sweep. Ties break toward the lowest sweep index, matching a serial scan.
fn par_min_scan<F>(sweep: &DiffSweep, k: usize, eval: F) -> Option<(f64, u64, u64)>
where
    F: Fn(&[Cx]) -> f64 + Sync,
{
    let n = sweep.len();
    let nchunks = n.div_ceil(CHUNK);
    let partials: Vec<(f64, u64, u64)> = (0..nchunks)
        .into_par_iter()
        .map(|ci| {
            let mut vector = vec![Cx::new(0.0, 0.0); k];
            let mut best = f64::INFINITY;
            let mut best_idx = u64::MAX;
            let mut examined = 0u64;
            let lo = ci * CHUNK;
            let hi = n.min(lo + CHUNK);
            for idx in lo..hi {
                if !sweep.fill(idx, &mut vector) {
                    continue;
                }
                examined += 1;
                let v = eval(&vector);
                if v < best {
                    best = v;
                    best_idx = idx;
                }
            }
            (best, best_idx, examined)
        })
        .collect();

    let mut best = f64::INFINITY;
    let mut best_idx = u64::MAX;
    let mut examined = 0u64;
    for (v, idx, n) in partials {
        examined += n;
        if v < best {
            best = v;
            best_idx = idx;
        }
    }
    if examined == 0 {
        None
    } else {
        Some((best, best_idx, examined))
    }
}

fn finish_report(
    sweep: &DiffSweep,
    k: usize,
    code: &str,
    metric: Metric,
    scan: Option<(f64, u64, u64)>,
) -> Result<MetricReport, MetricError> {
    let (value, idx, examined) = scan.ok_or(MetricError::NoNonzeroVectors)?;
    let mut argmin = vec![Cx::new(0.0, 0.0); k];
    sweep.fill(idx, &mut argmin);
    let search = if sweep.is_exhaustive() {
        SearchKind::Exhaustive(examined)
    } else {
        SearchKind::Sampled(examined)
    };
    Ok(MetricReport {
        code: code.to_string(),
        metric,
        value,
        argmin,
        search,
    })
}

/// Minimum `|det(encode(ds))|^2` over tested nonzero difference vectors.
pub fn min_determinant(
    code: &Code,
    diffs: &[Cx],
    budget: u64,
    seed: u64,
) -> Result<MetricReport, MetricError> {
    let k = code.symbols_per_codeword();
    let sweep = DiffSweep::plan(diffs, k, budget, EXHAUSTIVE_CAP, seed);
    if sweep.nonzero_scalars() == 0 {
        return Err(MetricError::NoNonzeroVectors);
    }
    let scan = par_min_scan(&sweep, k, |ds| {
        let x = code.encode(ds).expect("sweep vector length").matrix;
        det(&x).expect("square codeword").norm_sqr()
    });
    finish_report(&sweep, k, code.name(), Metric::MinDet, scan)
}

/// `min_determinant` per constellation size; the NVD floor is the minimum
/// over sizes and is positive exactly when the determinants do not collapse
/// as the constellation grows.
pub fn nvd_sweep(
    code: &Code,
    sizes: &[usize],
    budget: u64,
    seed: u64,
) -> Result<Vec<(usize, MetricReport)>, MetricError> {
    debug_assert!(sizes.windows(2).all(|w| w[0] <= w[1]), "sizes ascending");
    let mut out = Vec::with_capacity(sizes.len());
    for &q in sizes {
        let diffs = difference_alphabet(code.constellation_kind(), q)
            .map_err(|e| MetricError::BadConstellation(e.to_string()))?;
        out.push((q, min_determinant(code, &diffs, budget, seed)?));
    }
    Ok(out)
}

/// Minimum product of rotated-component magnitudes `prod_k |(M ds)_k|` over
/// tested nonzero difference vectors.
pub fn min_product_distance(
    gens: &GeneratorSet,
    diffs: &[Cx],
    budget: u64,
    seed: u64,
) -> Result<MetricReport, MetricError> {
    let k = gens.m.cols();
    let sweep = DiffSweep::plan(diffs, k, budget, EXHAUSTIVE_CAP, seed);
    if sweep.nonzero_scalars() == 0 {
        return Err(MetricError::NoNonzeroVectors);
    }
    let name = format!("lattice-dim{}", gens.spec.dimension);
    let scan = par_min_scan(&sweep, k, |ds| {
        gens.m.matvec(ds).iter().map(|z| z.norm()).product()
    });
    finish_report(&sweep, k, &name, Metric::MinProdDist, scan)
}

/// Magnitudes of all n x n cofactors (adjugate entries) of a square matrix.
fn min_cofactor_magnitude(x: &ComplexMatrix) -> f64 {
    let n = x.rows();
    let mut min = f64::INFINITY;
    for r in 0..n {
        for c in 0..n {
            let sub = ComplexMatrix::from_fn(n - 1, n - 1, |i, j| {
                x[(if i < r { i } else { i + 1 }, if j < c { j } else { j + 1 })]
            });
            let m = det(&sub).expect("square minor").norm();
            if m < min {
                min = m;
            }
        }
    }
    min
}

/// Minimum adjugate-entry magnitude of `encode(ds)` over tested nonzero
/// difference vectors; all entries staying away from zero is what makes
/// every shifted 3x3 (resp. 4x4) matrix keep full rank.
pub fn cofactor_nonzero_check(
    code: &Code,
    diffs: &[Cx],
    budget: u64,
    seed: u64,
) -> Result<MetricReport, MetricError> {
    let m = code.antennas();
    if m != 3 && m != 4 {
        return Err(MetricError::UnsupportedDimension {
            expected: "3 or 4",
            got: m,
        });
    }
    let k = code.symbols_per_codeword();
    let sweep = DiffSweep::plan(diffs, k, budget, EXHAUSTIVE_CAP, seed);
    if sweep.nonzero_scalars() == 0 {
        return Err(MetricError::NoNonzeroVectors);
    }
    let scan = par_min_scan(&sweep, k, |ds| {
        let x = code.encode(ds).expect("sweep vector length").matrix;
        min_cofactor_magnitude(&x)
    });
    finish_report(&sweep, k, code.name(), Metric::MinMinor, scan)
}

/// Row and column pairs of the 4x4 mask whose 2x2 minors carry exactly one
/// +-i coefficient: one index from {1,3} per axis.
fn one_i_minor_positions() -> Vec<((usize, usize), (usize, usize))> {
    let mut out = Vec::new();
    let hits = |a: usize, b: usize| (a == 1 || a == 3) as usize + (b == 1 || b == 3) as usize;
    for r1 in 0..4 {
        for r2 in (r1 + 1)..4 {
            for c1 in 0..4 {
                for c2 in (c1 + 1)..4 {
                    if hits(r1, r2) == 1 && hits(c1, c2) == 1 {
                        out.push(((r1, r2), (c1, c2)));
                    }
                }
            }
        }
    }
    out
}

/// Minimum magnitude over the sixteen 2x2 minors of the 4x4 code whose mask
/// pattern contains exactly one +-i coefficient.
pub fn minor2_check_gamma4(
    diffs: &[Cx],
    budget: u64,
    seed: u64,
) -> Result<MetricReport, MetricError> {
    let code = Code::by_name("gamma4").expect("registry");
    let positions = one_i_minor_positions();
    debug_assert_eq!(positions.len(), 16);
    let k = code.symbols_per_codeword();
    let sweep = DiffSweep::plan(diffs, k, budget, EXHAUSTIVE_CAP, seed);
    if sweep.nonzero_scalars() == 0 {
        return Err(MetricError::NoNonzeroVectors);
    }
    let scan = par_min_scan(&sweep, k, |ds| {
        let x = code.encode(ds).expect("sweep vector length").matrix;
        positions
            .iter()
            .map(|&((r1, r2), (c1, c2))| {
                (x[(r1, c1)] * x[(r2, c2)] - x[(r1, c2)] * x[(r2, c1)]).norm()
            })
            .fold(f64::INFINITY, f64::min)
    });
    finish_report(&sweep, k, code.name(), Metric::MinMinor, scan)
}

/// Unit difference scalars {0, +-1, +-i} of the Gaussian integers.
pub fn gaussian_units_with_zero() -> Vec<Cx> {
    vec![
        Cx::new(0.0, 0.0),
        Cx::new(1.0, 0.0),
        Cx::new(-1.0, 0.0),
        Cx::new(0.0, 1.0),
        Cx::new(0.0, -1.0),
    ]
}
