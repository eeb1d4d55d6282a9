//! QAM and HEX symbol alphabets with bit maps and lattice coordinates.
//!
//! Every constellation here is a product set in a two-element complex basis:
//! QAM uses (1, i) with Gray-labelled PAM coordinates, HEX uses (1, j) with
//! centered binary-labelled coordinates. The product structure is what the
//! sphere decoder consumes (one finite real set per coordinate).
//!
//! 4-HEX is fixed as the four Eisenstein integers {0, 1, j, 1+j} translated
//! by -(1+j)/2; 16-HEX extends the same recipe to {0..3} + {0..3}j centered.

use crate::fields::eisenstein_unit;
use crate::linalg::{cx, Cx};
use std::fmt;

/// Symbol ring of a constellation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstellationKind {
    Qam,
    Hex,
}

impl fmt::Display for ConstellationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstellationKind::Qam => write!(f, "QAM"),
            ConstellationKind::Hex => write!(f, "HEX"),
        }
    }
}

/// Errors from constellation construction and bit mapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstellationError {
    UnsupportedSize { kind: ConstellationKind, q: usize },
    BitLength { len: usize, bits_per_symbol: usize },
    UnknownSymbol,
}

impl fmt::Display for ConstellationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstellationError::UnsupportedSize { kind, q } => {
                write!(f, "unsupported constellation {q}-{kind}")
            }
            ConstellationError::BitLength {
                len,
                bits_per_symbol,
            } => write!(
                f,
                "bit vector length {len} is not a multiple of {bits_per_symbol}"
            ),
            ConstellationError::UnknownSymbol => write!(f, "symbol is not a constellation point"),
        }
    }
}

impl std::error::Error for ConstellationError {}

/// Finite symbol alphabet with Gray (QAM) or enumerated (HEX) bit labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    kind: ConstellationKind,
    q: usize,
    bits_per_symbol: usize,
    basis: [Cx; 2],
    /// Unscaled per-axis coordinate values indexed by axis bit label.
    axis_by_label: Vec<f64>,
    /// Points indexed by full bit label, already scaled.
    points: Vec<Cx>,
    /// Scale applied to reach unit average energy (1.0 when not normalized).
    scale: f64,
}

fn gray_decode(mut g: usize) -> usize {
    let mut b = g;
    while g > 0 {
        g >>= 1;
        b ^= g;
    }
    b
}

#[cfg(test)]
fn gray_encode(b: usize) -> usize {
    b ^ (b >> 1)
}

impl Constellation {
    /// Build a q-ary constellation; q must be 4 or 16. With `normalize` the
    /// points are scaled to unit average energy.
    pub fn new(
        kind: ConstellationKind,
        q: usize,
        normalize: bool,
    ) -> Result<Self, ConstellationError> {
        if q != 4 && q != 16 {
            return Err(ConstellationError::UnsupportedSize { kind, q });
        }
        let side = (q as f64).sqrt() as usize;
        let bits_per_axis = side.trailing_zeros() as usize;
        let (basis, levels): ([Cx; 2], Vec<f64>) = match kind {
            ConstellationKind::Qam => {
                // PAM levels -(side-1) .. (side-1) step 2
                let levels = (0..side)
                    .map(|k| (2 * k) as f64 - (side - 1) as f64)
                    .collect();
                ([cx(1.0, 0.0), cx(0.0, 1.0)], levels)
            }
            ConstellationKind::Hex => {
                // centered integer translates: 0..side-1 minus (side-1)/2
                let levels = (0..side)
                    .map(|k| k as f64 - (side - 1) as f64 / 2.0)
                    .collect();
                ([cx(1.0, 0.0), eisenstein_unit()], levels)
            }
        };
        // axis coordinate for each per-axis bit label
        let axis_by_label: Vec<f64> = (0..side)
            .map(|label| match kind {
                ConstellationKind::Qam => levels[gray_decode(label)],
                ConstellationKind::Hex => levels[label],
            })
            .collect();
        let raw_points: Vec<Cx> = (0..q)
            .map(|label| {
                let l0 = label >> bits_per_axis;
                let l1 = label & (side - 1);
                basis[0] * axis_by_label[l0] + basis[1] * axis_by_label[l1]
            })
            .collect();
        let avg_energy = raw_points.iter().map(|p| p.norm_sqr()).sum::<f64>() / q as f64;
        let scale = if normalize {
            1.0 / avg_energy.sqrt()
        } else {
            1.0
        };
        let points = raw_points.iter().map(|&p| p * scale).collect();
        Ok(Self {
            kind,
            q,
            bits_per_symbol: 2 * bits_per_axis,
            basis,
            axis_by_label,
            points,
            scale,
        })
    }

    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Complex basis (b0, b1) such that a point is `scale*(b0*c0 + b1*c1)`.
    pub fn basis(&self) -> [Cx; 2] {
        self.basis
    }

    /// Normalization scale (1.0 when unnormalized).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Points indexed by bit label.
    pub fn points(&self) -> &[Cx] {
        &self.points
    }

    /// Scaled coordinate values of one axis, indexed by the axis bit label.
    pub fn axis_values(&self) -> Vec<f64> {
        self.axis_by_label.iter().map(|v| v * self.scale).collect()
    }

    /// The point for a full bit label.
    pub fn point(&self, label: usize) -> Cx {
        self.points[label]
    }

    /// Map a bit vector (multiple of bits_per_symbol, MSB first per symbol)
    /// to symbols.
    pub fn bits_to_symbols(&self, bits: &[u8]) -> Result<Vec<Cx>, ConstellationError> {
        if bits.len() % self.bits_per_symbol != 0 {
            return Err(ConstellationError::BitLength {
                len: bits.len(),
                bits_per_symbol: self.bits_per_symbol,
            });
        }
        Ok(bits
            .chunks(self.bits_per_symbol)
            .map(|chunk| {
                let label = chunk
                    .iter()
                    .fold(0usize, |acc, &b| (acc << 1) | (b as usize & 1));
                self.points[label]
            })
            .collect())
    }

    /// Inverse of `bits_to_symbols` by nearest-point match.
    pub fn symbols_to_bits(&self, symbols: &[Cx]) -> Result<Vec<u8>, ConstellationError> {
        let mut bits = Vec::with_capacity(symbols.len() * self.bits_per_symbol);
        for &s in symbols {
            let label = self.nearest_label(s)?;
            for k in (0..self.bits_per_symbol).rev() {
                bits.push(((label >> k) & 1) as u8);
            }
        }
        Ok(bits)
    }

    /// Bit label of the nearest constellation point.
    pub fn nearest_label(&self, s: Cx) -> Result<usize, ConstellationError> {
        let mut best = None;
        for (label, &p) in self.points.iter().enumerate() {
            let d = (s - p).norm_sqr();
            match best {
                None => best = Some((d, label)),
                Some((bd, _)) if d < bd => best = Some((d, label)),
                _ => {}
            }
        }
        best.map(|(_, l)| l)
            .ok_or(ConstellationError::UnknownSymbol)
    }

    /// Bit label from a pair of scaled axis coordinate values, matched
    /// exactly against the axis tables (the sphere decoder returns copies of
    /// the very values handed to it).
    pub fn label_from_coords(&self, c0: f64, c1: f64) -> Result<usize, ConstellationError> {
        let axis = self.axis_values();
        let find = |v: f64| axis.iter().position(|&a| a == v);
        match (find(c0), find(c1)) {
            (Some(l0), Some(l1)) => {
                let bits_per_axis = self.bits_per_symbol / 2;
                Ok((l0 << bits_per_axis) | l1)
            }
            _ => Err(ConstellationError::UnknownSymbol),
        }
    }

    /// Unscaled per-coordinate difference values of the underlying lattice:
    /// {0, +-2, ..} for QAM axes, {0, +-1, ..} for HEX axes.
    pub fn axis_differences(&self) -> Vec<f64> {
        let side = (self.q as f64).sqrt() as usize;
        let step = match self.kind {
            ConstellationKind::Qam => 2.0,
            ConstellationKind::Hex => 1.0,
        };
        let mut out = vec![0.0];
        for k in 1..side {
            out.push(step * k as f64);
            out.push(-step * k as f64);
        }
        out
    }

    /// Unscaled complex difference alphabet: all `a*b0 + b*b1` with a, b
    /// ranging over the axis differences. Contains 0 and is symmetric.
    pub fn difference_alphabet(&self) -> Vec<Cx> {
        let axis = self.axis_differences();
        let mut out = Vec::with_capacity(axis.len() * axis.len());
        for &a in &axis {
            for &b in &axis {
                out.push(self.basis[0] * a + self.basis[1] * b);
            }
        }
        out
    }
}

/// Difference alphabet for a kind/size pair without building points.
pub fn difference_alphabet(
    kind: ConstellationKind,
    q: usize,
) -> Result<Vec<Cx>, ConstellationError> {
    Constellation::new(kind, q, false).map(|c| c.difference_alphabet())
}
