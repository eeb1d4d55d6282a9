//! Linear-dispersion space-time encoders and the code registry.
//!
//! Three families live here:
//! - the tensor-product codes gamma2/gamma3/gamma4 and alt2, built as a
//!   Hadamard mask over the rotated symbol vector `x = M s`;
//! - the layered division-algebra codewords golden/perfect3/perfect4;
//! - the 2x2 comparison codes goldenC, silver, sezginer, damen, plus the
//!   derived delay-tolerant silver_d / sezginer_d obtained by fixed unitary
//!   rotations U X V.
//!
//! Every encoder maps the zero vector to the zero matrix and is linear over
//! the reals (silver/sezginer conjugate symbols, so they are only
//! real-linear), which is what the difference-codeword sweeps rely on.

use crate::constellation::ConstellationKind;
use crate::fields::{
    build_generators, eisenstein_unit, perfect3_m1, perfect4_m1, root_of_unity, FieldSpec,
    GeneratorSet,
};
use crate::linalg::{cx, matmul, ComplexMatrix, Cx};
use std::fmt;

/// All registered code names, in registry order.
pub const CODE_NAMES: [&str; 13] = [
    "gamma2",
    "gamma3",
    "gamma4",
    "golden",
    "goldenC",
    "silver",
    "sezginer",
    "damen",
    "silver_d",
    "sezginer_d",
    "alt2",
    "perfect3",
    "perfect4",
];

/// Identifier for each registered code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeId {
    Gamma2,
    Gamma3,
    Gamma4,
    Golden,
    GoldenC,
    Silver,
    Sezginer,
    Damen,
    SilverD,
    SezginerD,
    Alt2,
    Perfect3,
    Perfect4,
}

/// Encoding errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeError {
    UnknownCode(String),
    SymbolCount { expected: usize, got: usize },
}

impl fmt::Display for CodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeError::UnknownCode(name) => write!(f, "unknown code name `{name}`"),
            CodeError::SymbolCount { expected, got } => {
                write!(f, "expected {expected} symbols, got {got}")
            }
        }
    }
}

impl std::error::Error for CodeError {}

/// A codeword matrix together with the symbols that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Codeword {
    pub matrix: ComplexMatrix,
    pub symbols: Vec<Cx>,
}

/// A registered space-time code: dimensions, symbol ring and encoder.
#[derive(Debug, Clone)]
pub struct Code {
    id: CodeId,
    name: &'static str,
    m: usize,
    t: usize,
    k: usize,
    kind: ConstellationKind,
    gens: Option<GeneratorSet>,
    phi: Option<ComplexMatrix>,
}

impl Code {
    /// Look a code up by its registry name.
    pub fn by_name(name: &str) -> Result<Self, CodeError> {
        let id = match name {
            "gamma2" => CodeId::Gamma2,
            "gamma3" => CodeId::Gamma3,
            "gamma4" => CodeId::Gamma4,
            "golden" => CodeId::Golden,
            "goldenC" => CodeId::GoldenC,
            "silver" => CodeId::Silver,
            "sezginer" => CodeId::Sezginer,
            "damen" => CodeId::Damen,
            "silver_d" => CodeId::SilverD,
            "sezginer_d" => CodeId::SezginerD,
            "alt2" => CodeId::Alt2,
            "perfect3" => CodeId::Perfect3,
            "perfect4" => CodeId::Perfect4,
            other => return Err(CodeError::UnknownCode(other.to_string())),
        };
        Ok(Self::new(id))
    }

    /// Build a code from its identifier.
    pub fn new(id: CodeId) -> Self {
        let (name, m, k, kind) = match id {
            CodeId::Gamma2 => ("gamma2", 2, 4, ConstellationKind::Qam),
            CodeId::Gamma3 => ("gamma3", 3, 9, ConstellationKind::Hex),
            CodeId::Gamma4 => ("gamma4", 4, 16, ConstellationKind::Qam),
            CodeId::Golden => ("golden", 2, 4, ConstellationKind::Qam),
            CodeId::GoldenC => ("goldenC", 2, 4, ConstellationKind::Qam),
            CodeId::Silver => ("silver", 2, 4, ConstellationKind::Qam),
            CodeId::Sezginer => ("sezginer", 2, 4, ConstellationKind::Qam),
            CodeId::Damen => ("damen", 2, 4, ConstellationKind::Qam),
            CodeId::SilverD => ("silver_d", 2, 4, ConstellationKind::Qam),
            CodeId::SezginerD => ("sezginer_d", 2, 4, ConstellationKind::Qam),
            CodeId::Alt2 => ("alt2", 2, 4, ConstellationKind::Qam),
            CodeId::Perfect3 => ("perfect3", 3, 9, ConstellationKind::Hex),
            CodeId::Perfect4 => ("perfect4", 4, 16, ConstellationKind::Qam),
        };
        let gens = match id {
            CodeId::Gamma2 => Some(build_generators(FieldSpec::perfect(2).unwrap()).unwrap()),
            CodeId::Gamma3 => Some(build_generators(FieldSpec::perfect(3).unwrap()).unwrap()),
            CodeId::Gamma4 => Some(build_generators(FieldSpec::perfect(4).unwrap()).unwrap()),
            CodeId::Alt2 => Some(build_generators(FieldSpec::alt2()).unwrap()),
            _ => None,
        };
        let phi = match id {
            CodeId::Gamma2 | CodeId::Alt2 => Some(sign_phi_2x2()),
            CodeId::Gamma3 => Some(fourier_phi(3)),
            CodeId::Gamma4 => Some(fourier_phi(4)),
            _ => None,
        };
        Self {
            id,
            name,
            m,
            t: m,
            k,
            kind,
            gens,
            phi,
        }
    }

    /// Every registered code, in registry order.
    pub fn registry() -> Vec<Self> {
        CODE_NAMES
            .iter()
            .map(|n| Self::by_name(n).expect("registry name"))
            .collect()
    }

    pub fn id(&self) -> CodeId {
        self.id
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    /// Number of relays / rows.
    pub fn antennas(&self) -> usize {
        self.m
    }

    /// Channel uses per codeword (columns before delay padding).
    pub fn channel_uses(&self) -> usize {
        self.t
    }

    /// Symbols per codeword.
    pub fn symbols_per_codeword(&self) -> usize {
        self.k
    }

    /// Expected symbol ring.
    pub fn constellation_kind(&self) -> ConstellationKind {
        self.kind
    }

    /// Whether the encoder conjugates symbols (real-linear only).
    pub fn is_conjugating(&self) -> bool {
        matches!(
            self.id,
            CodeId::Silver | CodeId::Sezginer | CodeId::SilverD | CodeId::SezginerD
        )
    }

    /// The tensor-product generator set, for the gamma/alt family.
    pub fn generators(&self) -> Option<&GeneratorSet> {
        self.gens.as_ref()
    }

    /// The coefficient mask, for the gamma/alt family.
    pub fn phi(&self) -> Option<&ComplexMatrix> {
        self.phi.as_ref()
    }

    /// Encode a symbol vector into a codeword matrix.
    pub fn encode(&self, s: &[Cx]) -> Result<Codeword, CodeError> {
        if s.len() != self.k {
            return Err(CodeError::SymbolCount {
                expected: self.k,
                got: s.len(),
            });
        }
        let matrix = match self.id {
            CodeId::Gamma2 | CodeId::Gamma3 | CodeId::Gamma4 | CodeId::Alt2 => hadamard_codeword(
                self.gens.as_ref().expect("gamma family has generators"),
                self.phi.as_ref().expect("gamma family has a mask"),
                s,
            ),
            CodeId::Golden => golden_codeword(s),
            CodeId::GoldenC => golden_c_codeword(s),
            CodeId::Silver => silver_codeword(s),
            CodeId::Sezginer => sezginer_codeword(s),
            CodeId::Damen => damen_codeword(s),
            CodeId::SilverD => derived_codeword(&silver_codeword(s)),
            CodeId::SezginerD => derived_codeword(&sezginer_codeword(s)),
            CodeId::Perfect3 => perfect_codeword(3, s),
            CodeId::Perfect4 => perfect_codeword(4, s),
        };
        Ok(Codeword {
            matrix,
            symbols: s.to_vec(),
        })
    }
}

/// The 2x2 sign mask with phi_2 = -1 (column-major positions 1..4).
pub fn sign_phi_2x2() -> ComplexMatrix {
    ComplexMatrix::from_rows(
        2,
        2,
        vec![cx(1.0, 0.0), cx(1.0, 0.0), cx(-1.0, 0.0), cx(1.0, 0.0)],
    )
}

/// Fourier coefficient mask of dimension m: entry (r, c) = w^{rc} with w the
/// primitive m-th root of unity (j for m = 3, i for m = 4).
pub fn fourier_phi(m: usize) -> ComplexMatrix {
    let w = match m {
        3 => eisenstein_unit(),
        _ => root_of_unity(m as u32),
    };
    ComplexMatrix::from_fn(m, m, |r, c| w.powu((r * c) as u32))
}

/// Hadamard-mask codeword: `X[r,c] = phi[r,c] * x[c*M + r]` with `x = M s`
/// filled down the columns.
pub fn hadamard_codeword(gens: &GeneratorSet, phi: &ComplexMatrix, s: &[Cx]) -> ComplexMatrix {
    let m = phi.rows();
    let x = gens.m.matvec(s);
    ComplexMatrix::from_fn(m, m, |r, c| phi[(r, c)] * x[c * m + r])
}

/// The 2x2 codeword `(1/sqrt 5) [[a(s1+s2 th), a(s3+s4 th)],
/// [i a'(s3+s4 th'), a'(s1+s2 th')]]`.
pub fn golden_codeword(s: &[Cx]) -> ComplexMatrix {
    let s5 = 5.0_f64.sqrt();
    let theta = (1.0 + s5) / 2.0;
    let theta_bar = (1.0 - s5) / 2.0;
    let alpha = cx(1.0, 1.0 - theta);
    let alpha_bar = cx(1.0, 1.0 - theta_bar);
    let n = 1.0 / s5;
    let i = cx(0.0, 1.0);
    ComplexMatrix::from_rows(
        2,
        2,
        vec![
            alpha * (s[0] + s[1] * theta) * n,
            alpha * (s[2] + s[3] * theta) * n,
            i * alpha_bar * (s[2] + s[3] * theta_bar) * n,
            alpha_bar * (s[0] + s[1] * theta_bar) * n,
        ],
    )
}

/// The variant matrix C with r = theta - 1.
pub fn golden_c_codeword(s: &[Cx]) -> ComplexMatrix {
    let r = (1.0 + 5.0_f64.sqrt()) / 2.0 - 1.0;
    let n = 1.0 / (2.0 * (1.0 + r * r)).sqrt();
    let i = cx(0.0, 1.0);
    ComplexMatrix::from_rows(
        2,
        2,
        vec![
            (s[0] + i * r * s[3]) * n,
            (s[1] * r + s[2]) * n,
            (s[1] - s[2] * r) * n,
            (i * r * s[0] + s[3]) * n,
        ],
    )
}

/// Alamouti block used by the silver and sezginer constructions.
fn alamouti(a: Cx, b: Cx) -> ComplexMatrix {
    ComplexMatrix::from_rows(2, 2, vec![a, -b.conj(), b, a.conj()])
}

/// The silver code `X_A(s1, s2) + T W X_B(s3, s4)`.
pub fn silver_codeword(s: &[Cx]) -> ComplexMatrix {
    let xa = alamouti(s[0], s[1]);
    let xb = alamouti(s[2], s[3]);
    let t = ComplexMatrix::diag(&[cx(1.0, 0.0), cx(-1.0, 0.0)]);
    let w = silver_w();
    let tw = matmul(&t, &w).unwrap();
    xa.add(&matmul(&tw, &xb).unwrap())
}

/// The unitary mixing matrix W of the silver code.
pub fn silver_w() -> ComplexMatrix {
    let n = 1.0 / 7.0_f64.sqrt();
    ComplexMatrix::from_rows(
        2,
        2,
        vec![cx(1.0, 1.0), cx(-1.0, 2.0), cx(1.0, 2.0), cx(1.0, -1.0)],
    )
    .scale(cx(n, 0.0))
}

/// The sezginer-sari code with a = c = 1/sqrt 2, b = ((1-sqrt7)+i(1+sqrt7))/(4 sqrt2),
/// d = -lb.
pub fn sezginer_codeword(s: &[Cx]) -> ComplexMatrix {
    let (a, b, c, d) = sezginer_constants();
    ComplexMatrix::from_rows(
        2,
        2,
        vec![
            a * s[0] + b * s[2],
            -(c * s[1].conj()) - d * s[3].conj(),
            a * s[1] + b * s[3],
            c * s[0].conj() + d * s[2].conj(),
        ],
    )
}

/// (a, b, c, d) of the sezginer-sari code.
pub fn sezginer_constants() -> (Cx, Cx, Cx, Cx) {
    let s2 = 2.0_f64.sqrt();
    let s7 = 7.0_f64.sqrt();
    let a = cx(1.0 / s2, 0.0);
    let b = cx((1.0 - s7) / (4.0 * s2), (1.0 + s7) / (4.0 * s2));
    let c = a;
    let d = cx(0.0, -1.0) * b;
    (a, b, c, d)
}

/// (a, b, c, d) of the damen code.
pub fn damen_constants() -> (f64, f64, f64, f64) {
    let s5 = 5.0_f64.sqrt();
    let s2 = 2.0_f64.sqrt();
    let a = 1.0 / ((5.0 + s5) * (2.0 + s2)).sqrt();
    let b = 1.0 / ((5.0 - s5) * (2.0 + s2)).sqrt();
    let c = 1.0 / ((5.0 + s5) * (2.0 - s2)).sqrt();
    let d = 1.0 / ((5.0 - s5) * (2.0 - s2)).sqrt();
    (a, b, c, d)
}

/// The damen code `[[x1, -x3],[x2, x4]]`.
pub fn damen_codeword(s: &[Cx]) -> ComplexMatrix {
    let (a, b, c, d) = damen_constants();
    let x1 = s[0] * a + s[1] * b - s[2] * c - s[3] * d;
    let x2 = -(s[0] * b) + s[1] * a + s[2] * d - s[3] * c;
    let x3 = s[0] * c + s[1] * d + s[2] * a + s[3] * b;
    let x4 = -(s[0] * d) + s[1] * c - s[2] * b + s[3] * a;
    ComplexMatrix::from_rows(2, 2, vec![x1, -x3, x2, x4])
}

/// The fixed unitary pair (U, V) that turns the golden code into gamma2;
/// the same pair derives silver_d and sezginer_d.
pub fn derivation_uv_2x2() -> (ComplexMatrix, ComplexMatrix) {
    let z8 = root_of_unity(8);
    let i = cx(0.0, 1.0);
    let u = ComplexMatrix::diag(&[z8, cx(-1.0, 0.0)]);
    let n = 1.0 / 2.0_f64.sqrt();
    let v = ComplexMatrix::from_rows(2, 2, vec![-i * z8, -i * z8, cx(1.0, 0.0), cx(-1.0, 0.0)])
        .scale(cx(n, 0.0));
    (u, v)
}

/// The unitary pair with gamma3 = U Z V, Z the 3x3 layered codeword.
pub fn derivation_uv_3x3() -> (ComplexMatrix, ComplexMatrix) {
    let j = eisenstein_unit();
    let z9 = root_of_unity(9);
    let u = ComplexMatrix::diag(&[cx(1.0, 0.0), j * j * z9 * z9, j * j * z9]);
    let n = 1.0 / 3.0_f64.sqrt();
    let v = ComplexMatrix::from_fn(3, 3, |a, c| j.powu((a * c) as u32) * z9.powu(a as u32) * n);
    (u, v)
}

/// The unitary pair with gamma4 = U Z V, Z the 4x4 layered codeword.
pub fn derivation_uv_4x4() -> (ComplexMatrix, ComplexMatrix) {
    let i = cx(0.0, 1.0);
    let z16 = root_of_unity(16);
    let u = ComplexMatrix::diag(&[cx(1.0, 0.0), -i * z16.powu(3), -i * z16.powu(2), -i * z16]);
    let v = ComplexMatrix::from_fn(4, 4, |a, c| {
        i.powu((a * c) as u32) * z16.powu(a as u32) * 0.5
    });
    (u, v)
}

/// Rotate a 2x2 base codeword by the fixed (U, V) pair.
pub fn derived_codeword(base: &ComplexMatrix) -> ComplexMatrix {
    let (u, v) = derivation_uv_2x2();
    matmul(&matmul(&u, base).unwrap(), &v).unwrap()
}

/// Layered division-algebra codeword of dimension m in {3, 4}: layer l
/// carries `M1 * s[l*m .. (l+1)*m]` on the l-th wrapped diagonal, entries
/// below the main diagonal multiplied by the non-norm element (j or i).
pub fn perfect_codeword(m: usize, s: &[Cx]) -> ComplexMatrix {
    assert!(
        m == 3 || m == 4,
        "layered form built for dimensions 3 and 4"
    );
    assert_eq!(s.len(), m * m);
    let (m1, gamma) = if m == 3 {
        (perfect3_m1(), eisenstein_unit())
    } else {
        (perfect4_m1(), cx(0.0, 1.0))
    };
    let mut out = ComplexMatrix::zeros(m, m);
    for layer in 0..m {
        let w = m1.matvec(&s[layer * m..(layer + 1) * m]);
        for r in 0..m {
            let c = (r + layer) % m;
            out[(r, c)] = if r > c { gamma * w[r] } else { w[r] };
        }
    }
    out
}
