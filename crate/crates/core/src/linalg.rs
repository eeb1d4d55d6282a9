//! Dense complex linear algebra for code construction and certification.
//!
//! Everything the toolkit needs lives here: products, Kronecker (tensor)
//! products, LU determinants, singular values via one-sided Jacobi, and the
//! rank / unitarity checks built on top of them. The Jacobi SVD is used
//! instead of a Gram-matrix eigendecomposition because rank certification
//! must resolve singular values near `1e-9 * sigma_max`, well below the
//! `sqrt(eps)` accuracy floor of the squared problem.

use num_complex::Complex64;
use std::fmt;

/// Complex scalar used throughout the toolkit.
pub type Cx = Complex64;

/// Shorthand constructor.
#[inline]
pub fn cx(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

/// Default relative tolerance separating true zeros from roundoff in rank
/// decisions: entries are O(1) after normalization, so 1e-9 relative to the
/// largest singular value is far above accumulated error at these sizes.
pub const RANK_TOL: f64 = 1e-9;

/// Errors from shape-checked operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinalgError {
    /// Inner dimensions of a product do not agree.
    DimMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::DimMismatch { left, right } => write!(
                f,
                "dimension mismatch: {}x{} * {}x{}",
                left.0, left.1, right.0, right.1
            ),
            LinalgError::NotSquare { rows, cols } => {
                write!(f, "square matrix required, got {rows}x{cols}")
            }
        }
    }
}

impl std::error::Error for LinalgError {}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Cx>,
}

impl ComplexMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Cx::new(0.0, 0.0); rows * cols],
        }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Cx::new(1.0, 0.0);
        }
        m
    }

    /// Build from a row-major entry vector. Panics if the length is wrong.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<Cx>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        Self { rows, cols, data }
    }

    /// Build from a closure over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Square diagonal matrix from the given entries.
    pub fn diag(entries: &[Cx]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entry slice.
    pub fn entries(&self) -> &[Cx] {
        &self.data
    }

    /// All entries finite (no NaN/Inf in either component).
    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// Plain transpose.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    /// Entrywise scale.
    pub fn scale(&self, k: Cx) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * k).collect(),
        }
    }

    /// Entrywise sum. Panics on shape mismatch.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    /// Entrywise difference. Panics on shape mismatch.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Matrix-vector product. Panics if `v.len() != cols`.
    pub fn matvec(&self, v: &[Cx]) -> Vec<Cx> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![Cx::new(0.0, 0.0); self.rows];
        for (r, slot) in out.iter_mut().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let mut acc = Cx::new(0.0, 0.0);
            for (a, b) in row.iter().zip(v) {
                acc += a * b;
            }
            *slot = acc;
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Cx;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Cx {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Cx {
        &mut self.data[r * self.cols + c]
    }
}

/// Standard matrix product.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    if a.cols != b.rows {
        return Err(LinalgError::DimMismatch {
            left: (a.rows, a.cols),
            right: (b.rows, b.cols),
        });
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    for r in 0..a.rows {
        for k in 0..a.cols {
            let av = a[(r, k)];
            if av.norm_sqr() == 0.0 {
                continue;
            }
            for c in 0..b.cols {
                out[(r, c)] += av * b[(k, c)];
            }
        }
    }
    Ok(out)
}

/// Kronecker (tensor) product: block (i, j) of the result is `a[i,j] * b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let av = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = av * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Determinant via LU with partial pivoting.
pub fn det(a: &ComplexMatrix) -> Result<Cx, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    let mut lu = a.data.clone();
    let mut sign = 1.0;
    for k in 0..n {
        // pivot on largest magnitude in column k
        let mut p = k;
        let mut pmax = lu[k * n + k].norm_sqr();
        for r in (k + 1)..n {
            let m = lu[r * n + k].norm_sqr();
            if m > pmax {
                pmax = m;
                p = r;
            }
        }
        if pmax == 0.0 {
            return Ok(Cx::new(0.0, 0.0));
        }
        if p != k {
            for c in 0..n {
                lu.swap(k * n + c, p * n + c);
            }
            sign = -sign;
        }
        let piv = lu[k * n + k];
        for r in (k + 1)..n {
            let factor = lu[r * n + k] / piv;
            lu[r * n + k] = factor;
            for c in (k + 1)..n {
                let sub = factor * lu[k * n + c];
                lu[r * n + c] -= sub;
            }
        }
    }
    let mut d = Cx::new(sign, 0.0);
    for k in 0..n {
        d *= lu[k * n + k];
    }
    Ok(d)
}

/// Reusable buffers for Jacobi singular value sweeps; the certification
/// loops call this millions of times, so per-call allocation matters.
#[derive(Debug, Default)]
pub struct SvdWorkspace {
    buf: Vec<Cx>,
    sv: Vec<f64>,
}

impl SvdWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Singular values in descending order, via one-sided Jacobi on columns.
    /// Operates on the conjugate transpose when `rows < cols` (same
    /// spectrum). The returned slice is valid until the next call.
    pub fn compute(&mut self, a: &ComplexMatrix) -> &[f64] {
        let transpose = a.rows < a.cols;
        let (m, n) = if transpose {
            (a.cols, a.rows)
        } else {
            (a.rows, a.cols)
        };
        self.sv.clear();
        if n == 0 || m == 0 {
            self.sv.resize(a.rows.min(a.cols), 0.0);
            return &self.sv;
        }
        // column-major working copy
        self.buf.clear();
        self.buf.resize(m * n, Cx::new(0.0, 0.0));
        for c in 0..n {
            for r in 0..m {
                self.buf[c * m + r] = if transpose {
                    a[(c, r)].conj()
                } else {
                    a[(r, c)]
                };
            }
        }

        let eps = 1e-14_f64;
        let max_sweeps = 64;
        for _ in 0..max_sweeps {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let (head, tail) = self.buf.split_at_mut(q * m);
                    let cp = &mut head[p * m..(p + 1) * m];
                    let cq = &mut tail[..m];
                    let mut app = 0.0;
                    let mut aqq = 0.0;
                    let mut apq = Cx::new(0.0, 0.0);
                    for r in 0..m {
                        let u = cp[r];
                        let v = cq[r];
                        app += u.norm_sqr();
                        aqq += v.norm_sqr();
                        apq += u.conj() * v;
                    }
                    let off = apq.norm();
                    if off <= eps * (app * aqq).sqrt() || off == 0.0 {
                        continue;
                    }
                    rotated = true;
                    let phase = apq / off;
                    let zeta = (aqq - app) / (2.0 * off);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    let sp = phase.conj() * s;
                    let sq = phase * s;
                    for r in 0..m {
                        let u = cp[r];
                        let v = cq[r];
                        cp[r] = u * c - v * sp;
                        cq[r] = u * sq + v * c;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        for c in 0..n {
            let norm = self.buf[c * m..(c + 1) * m]
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt();
            self.sv.push(norm);
        }
        self.sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
        &self.sv
    }
}

/// Singular values in descending order (convenience wrapper).
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    SvdWorkspace::new().compute(a).to_vec()
}

/// Eigenvalues of a Hermitian matrix in descending order, via cyclic
/// complex Jacobi rotations. `a` is a row-major n x n buffer, destroyed in
/// place; `evals` receives the eigenvalues. Accuracy is absolute in the
/// largest eigenvalue, so callers needing tiny values at high relative
/// accuracy should use the one-sided SVD route instead.
pub fn hermitian_eigenvalues(a: &mut [Cx], n: usize, evals: &mut Vec<f64>) {
    debug_assert_eq!(a.len(), n * n);
    let scale = a.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let eps = 1e-13 * scale.max(f64::MIN_POSITIVE);
    for _ in 0..40 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let off = apq.norm();
                if off <= eps {
                    continue;
                }
                rotated = true;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let phase = apq / off;
                let tau = (aqq - app) / (2.0 * off);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // columns: v_p' = c v_p - s phase* v_q ; v_q' = s phase v_p + c v_q
                for r in 0..n {
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    a[r * n + p] = arp * c - arq * (phase.conj() * s);
                    a[r * n + q] = arp * (phase * s) + arq * c;
                }
                // rows (conjugate rotation)
                for cidx in 0..n {
                    let apc = a[p * n + cidx];
                    let aqc = a[q * n + cidx];
                    a[p * n + cidx] = apc * c - aqc * (phase * s);
                    a[q * n + cidx] = apc * (phase.conj() * s) + aqc * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    evals.clear();
    for i in 0..n {
        evals.push(a[i * n + i].re);
    }
    evals.sort_by(|x, y| y.partial_cmp(x).unwrap());
}

/// Number of singular values above `tol * sigma_max`. The zero matrix has rank 0.
pub fn numerical_rank(a: &ComplexMatrix, tol: f64) -> usize {
    assert!(tol > 0.0, "rank tolerance must be positive");
    let sv = singular_values(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax).count()
}

/// True iff `max |A A^H - I| <= tol`. Panics if not square.
pub fn is_unitary(a: &ComplexMatrix, tol: f64) -> bool {
    assert!(a.is_square(), "unitarity check requires a square matrix");
    let gram = matmul(a, &a.dagger()).expect("square product");
    let id = ComplexMatrix::identity(a.rows);
    gram.sub(&id).max_abs() <= tol
}
