//! Number-field lattice generator matrices and their tensor products.
//!
//! Each supported dimension pairs a rotated-lattice generator `M1` (from the
//! cyclic algebra a perfect code is built on) with a cyclotomic generator
//! `M2` of the same degree and coprime discriminant; the full-dimension
//! generator is the Kronecker product `M = M2 (x) M1`. All constants come
//! from closed forms (roots of unity, cosines), evaluated in double
//! precision.

use crate::linalg::{cx, kron, ComplexMatrix, Cx};
use std::f64::consts::PI;
use std::fmt;

/// Primitive cube root of unity `j = e^{2 pi i / 3}`.
pub fn eisenstein_unit() -> Cx {
    Cx::from_polar(1.0, 2.0 * PI / 3.0)
}

/// Primitive n-th root of unity `e^{2 pi i / n}`.
pub fn root_of_unity(n: u32) -> Cx {
    Cx::from_polar(1.0, 2.0 * PI / f64::from(n))
}

/// Base field of a construction: determines the symbol ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseField {
    /// Q(i); symbols are Gaussian integers (QAM).
    Gaussian,
    /// Q(j); symbols are Eisenstein integers (HEX).
    Eisenstein,
}

/// Which second-extension flavour the construction uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldVariant {
    /// Cyclotomic extension by a root of unity (dims 2, 3, 4).
    PerfectRootOfUnity,
    /// Square root of the unit-norm non-norm ratio (3+2i)/(2+3i) (dim 2).
    NonNormRatio,
}

/// Description of a tensor-product construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldSpec {
    pub dimension: usize,
    pub base: BaseField,
    pub variant: FieldVariant,
    /// Relative discriminants (d_K1, d_K2); coprime by construction.
    pub discriminants: (u64, u64),
}

impl FieldSpec {
    /// The construction for a given dimension with the root-of-unity second
    /// extension.
    pub fn perfect(dimension: usize) -> Result<Self, FieldError> {
        match dimension {
            2 => Ok(Self {
                dimension,
                base: BaseField::Gaussian,
                variant: FieldVariant::PerfectRootOfUnity,
                discriminants: (5, 4),
            }),
            3 => Ok(Self {
                dimension,
                base: BaseField::Eisenstein,
                variant: FieldVariant::PerfectRootOfUnity,
                discriminants: (49, 27),
            }),
            4 => Ok(Self {
                dimension,
                base: BaseField::Gaussian,
                variant: FieldVariant::PerfectRootOfUnity,
                discriminants: (1125, 256),
            }),
            other => Err(FieldError::UnsupportedDimension(other)),
        }
    }

    /// The alternate 2x2 construction with theta2 = sqrt((3+2i)/(2+3i)).
    pub fn alt2() -> Self {
        Self {
            dimension: 2,
            base: BaseField::Gaussian,
            variant: FieldVariant::NonNormRatio,
            discriminants: (5, 52),
        }
    }
}

/// Construction errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    UnsupportedDimension(usize),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::UnsupportedDimension(d) => {
                write!(f, "unsupported construction dimension {d}")
            }
        }
    }
}

impl std::error::Error for FieldError {}

/// The pair of generator matrices and their tensor product.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    pub spec: FieldSpec,
    pub m1: ComplexMatrix,
    pub m2: ComplexMatrix,
    /// `kron(m2, m1)`, the M^2 x M^2 lattice generator.
    pub m: ComplexMatrix,
    /// Normalization constants (p1, p2) with `M1 = B1 / sqrt(p1)` etc.
    pub normalization: (f64, f64),
}

/// 2x2 rotated-lattice generator of the ideal (alpha) in Q(i, sqrt 5):
/// `(1/sqrt 5) [[alpha, alpha*theta], [conj, conj]]` with
/// `theta = (1+sqrt 5)/2` and `alpha = 1 + i - i*theta`.
pub fn golden_m1() -> ComplexMatrix {
    let s5 = 5.0_f64.sqrt();
    let theta = (1.0 + s5) / 2.0;
    let theta_bar = (1.0 - s5) / 2.0;
    let alpha = cx(1.0, 1.0 - theta);
    let alpha_bar = cx(1.0, 1.0 - theta_bar);
    let n = 1.0 / s5;
    ComplexMatrix::from_rows(
        2,
        2,
        vec![alpha, alpha * theta, alpha_bar, alpha_bar * theta_bar],
    )
    .scale(cx(n, 0.0))
}

/// Cyclotomic generator for dimension M in {2, 3, 4}.
///
/// Row a, column c holds `w^{ac} zeta^c / sqrt(M)` where (w, zeta) is
/// (-1, zeta_8), (j, zeta_9) or (i, zeta_16).
pub fn cyclotomic_m2(dimension: usize) -> Result<ComplexMatrix, FieldError> {
    let (w, zeta) = match dimension {
        2 => (cx(-1.0, 0.0), root_of_unity(8)),
        3 => (eisenstein_unit(), root_of_unity(9)),
        4 => (cx(0.0, 1.0), root_of_unity(16)),
        other => return Err(FieldError::UnsupportedDimension(other)),
    };
    let norm = 1.0 / (dimension as f64).sqrt();
    Ok(ComplexMatrix::from_fn(dimension, dimension, |a, c| {
        w.powu((a * c) as u32) * zeta.powu(c as u32) * norm
    }))
}

/// Evaluate a polynomial in theta with complex coefficients (low degree
/// first) at a real value of theta.
fn eval_poly(coeffs: &[Cx], theta: f64) -> Cx {
    let mut acc = cx(0.0, 0.0);
    let mut pow = 1.0;
    for c in coeffs {
        acc += c * pow;
        pow *= theta;
    }
    acc
}

/// Embedding matrix of an ideal basis under the cyclic conjugation
/// `theta -> theta^2 - 2` (i.e. 2cos(x) -> 2cos(2x)), normalized by `1/sqrt(p)`.
fn embedding_matrix(basis: &[Vec<Cx>], order: u32, p: f64) -> ComplexMatrix {
    let m = basis.len();
    let norm = 1.0 / p.sqrt();
    ComplexMatrix::from_fn(m, m, |r, k| {
        let theta = 2.0 * (2.0 * PI * f64::from(1u32 << r) / f64::from(order)).cos();
        eval_poly(&basis[k], theta) * norm
    })
}

/// 3x3 rotated-lattice generator over Q(j) with theta = 2cos(2 pi / 7).
pub fn perfect3_m1() -> ComplexMatrix {
    let j = eisenstein_unit();
    let one = cx(1.0, 0.0);
    let basis = vec![
        vec![one + j, one, cx(0.0, 0.0)],
        vec![-one - j * 2.0, cx(0.0, 0.0), j],
        vec![-one - j * 2.0, one + j, one + j],
    ];
    embedding_matrix(&basis, 7, 7.0)
}

/// 4x4 rotated-lattice generator over Q(i) with theta = 2cos(2 pi / 15).
pub fn perfect4_m1() -> ComplexMatrix {
    let i = cx(0.0, 1.0);
    let one = cx(1.0, 0.0);
    let zero = cx(0.0, 0.0);
    let basis = vec![
        vec![one - i * 3.0, zero, i, zero],
        vec![zero, one - i * 3.0, zero, i],
        vec![-i, -one * 3.0 + i * 4.0, zero, one - i],
        vec![-one + i, -one * 3.0, one, one],
    ];
    embedding_matrix(&basis, 15, 15.0)
}

/// Alternate 2x2 rotated-lattice generator, given numerically.
pub fn alt2_m1() -> ComplexMatrix {
    ComplexMatrix::from_rows(
        2,
        2,
        vec![
            cx(-0.52573, 0.0),
            cx(-0.85065, 0.0),
            cx(-0.85065, 0.0),
            cx(0.52573, 0.0),
        ],
    )
}

/// The unit-norm ratio (3+2i)/(2+3i) used by the alternate construction.
pub fn alt2_gamma() -> Cx {
    cx(3.0, 2.0) / cx(2.0, 3.0)
}

/// Alternate second-extension generator `(1/sqrt 2) [[1, t],[1, -t]]` with
/// `t` the principal square root of (3+2i)/(2+3i).
pub fn alt2_m2() -> ComplexMatrix {
    let theta2 = alt2_gamma().sqrt();
    let n = 1.0 / 2.0_f64.sqrt();
    ComplexMatrix::from_rows(2, 2, vec![cx(1.0, 0.0), theta2, cx(1.0, 0.0), -theta2])
        .scale(cx(n, 0.0))
}

/// Assemble (M1, M2, M2 (x) M1) for the requested construction.
pub fn build_generators(spec: FieldSpec) -> Result<GeneratorSet, FieldError> {
    let (m1, m2, p1) = match spec.variant {
        FieldVariant::PerfectRootOfUnity => match spec.dimension {
            2 => (golden_m1(), cyclotomic_m2(2)?, 5.0),
            3 => (perfect3_m1(), cyclotomic_m2(3)?, 7.0),
            4 => (perfect4_m1(), cyclotomic_m2(4)?, 15.0),
            other => return Err(FieldError::UnsupportedDimension(other)),
        },
        FieldVariant::NonNormRatio => {
            if spec.dimension != 2 {
                return Err(FieldError::UnsupportedDimension(spec.dimension));
            }
            (alt2_m1(), alt2_m2(), 1.0)
        }
    };
    let m = kron(&m2, &m1);
    Ok(GeneratorSet {
        spec,
        m1,
        m2,
        m,
        normalization: (p1, spec.dimension as f64),
    })
}

/// Minimum product distance bound `1 / sqrt(d_K1^M * d_K2^M)` of the
/// tensor-product lattice.
pub fn min_product_distance_bound(spec: &FieldSpec) -> f64 {
    let m = spec.dimension as i32;
    let (d1, d2) = spec.discriminants;
    1.0 / ((d1 as f64).powi(m) * (d2 as f64).powi(m)).sqrt()
}
