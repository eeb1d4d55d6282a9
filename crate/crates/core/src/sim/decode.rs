//! MMSE-DFE preprocessing and exact finite-alphabet sphere decoding.

use super::realmat::RealMat;

/// Forward filter and triangular factor produced by the preprocessing step.
#[derive(Debug, Clone)]
pub struct MmseDfe {
    /// n x m filter mapping a received vector into R-coordinates.
    pub forward: RealMat,
    /// n x n upper-triangular factor with positive diagonal; nonsingular for
    /// any noise_var > 0, even when the channel itself is rank deficient.
    pub r: RealMat,
}

/// Factor the noise-augmented channel `[heff; sqrt(noise_var) I]`: returns
/// R with `R^T R = heff^T heff + noise_var I` (Cholesky route) and the
/// forward filter `F = R^{-T} heff^T`, so that minimizing
/// `|F y - R c|^2` over the alphabet is the lattice-decoding metric.
pub fn mmse_dfe_preprocess(heff: &RealMat, noise_var: f64) -> MmseDfe {
    assert!(noise_var > 0.0, "noise variance must be positive");
    let n = heff.cols();
    let mut s = heff.t_mul(heff);
    for i in 0..n {
        s[(i, i)] += noise_var;
    }
    // upper Cholesky: S = R^T R
    let mut r = RealMat::zeros(n, n);
    for i in 0..n {
        let mut diag = s[(i, i)];
        for k in 0..i {
            diag -= r[(k, i)] * r[(k, i)];
        }
        // noise_var > 0 keeps this strictly positive
        let d = diag.max(noise_var * 1e-12).sqrt();
        r[(i, i)] = d;
        for j in (i + 1)..n {
            let mut v = s[(i, j)];
            for k in 0..i {
                v -= r[(k, i)] * r[(k, j)];
            }
            r[(i, j)] = v / d;
        }
    }
    // F = R^{-T} heff^T, column by column via forward substitution
    let m = heff.rows();
    let mut forward = RealMat::zeros(n, m);
    for col in 0..m {
        // rhs = column `col` of heff^T = row `col` of heff
        for i in 0..n {
            let mut v = heff[(col, i)];
            for k in 0..i {
                v -= r[(k, i)] * forward[(k, col)];
            }
            forward[(i, col)] = v / r[(i, i)];
        }
    }
    MmseDfe { forward, r }
}

/// Reusable buffers for sphere decoding.
#[derive(Debug, Default)]
pub struct SphereDecoder {
    current: Vec<f64>,
    best: Vec<f64>,
    // per-level candidate lists: (metric increment, value)
    candidates: Vec<Vec<(f64, f64)>>,
}

impl SphereDecoder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Exact minimizer of `|target - R c|^2` with coordinate i restricted to
    /// `alphabets[i]`, by depth-first enumeration with radius shrinking.
    /// R must be upper triangular with positive diagonal.
    pub fn decode(&mut self, target: &[f64], r: &RealMat, alphabets: &[&[f64]]) -> Vec<f64> {
        let n = r.rows();
        assert_eq!(r.cols(), n);
        assert_eq!(target.len(), n);
        assert_eq!(alphabets.len(), n);
        assert!(alphabets.iter().all(|a| !a.is_empty()));
        self.current.clear();
        self.current.resize(n, 0.0);
        self.best.clear();
        self.best.resize(n, 0.0);
        if self.candidates.len() < n {
            self.candidates.resize(n, Vec::new());
        }
        let mut best_cost = f64::INFINITY;
        if n == 0 {
            return Vec::new();
        }
        self.search(n - 1, 0.0, target, r, alphabets, &mut best_cost);
        self.best.clone()
    }

    fn search(
        &mut self,
        level: usize,
        cost: f64,
        target: &[f64],
        r: &RealMat,
        alphabets: &[&[f64]],
        best_cost: &mut f64,
    ) {
        let n = r.rows();
        // residual target for this level given the fixed deeper coordinates
        let mut b = target[level];
        for j in (level + 1)..n {
            b -= r[(level, j)] * self.current[j];
        }
        let diag = r[(level, level)];
        // order candidates by metric increment (Schnorr-Euchner zig-zag)
        let mut cands = std::mem::take(&mut self.candidates[level]);
        cands.clear();
        for &v in alphabets[level] {
            let d = diag * v - b;
            cands.push((d * d, v));
        }
        cands.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        for &(inc, v) in cands.iter() {
            let next_cost = cost + inc;
            if next_cost >= *best_cost {
                break; // sorted: every later candidate is at least as bad
            }
            self.current[level] = v;
            if level == 0 {
                *best_cost = next_cost;
                self.best.copy_from_slice(&self.current);
            } else {
                self.search(level - 1, next_cost, target, r, alphabets, best_cost);
            }
        }
        self.candidates[level] = cands;
    }
}

/// One-shot convenience wrapper.
pub fn sphere_decode(target: &[f64], r: &RealMat, alphabets: &[&[f64]]) -> Vec<f64> {
    SphereDecoder::new().decode(target, r, alphabets)
}
