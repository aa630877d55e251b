//! The max-plus semiring and square matrices over it.

use std::cmp::Ordering;
use std::fmt;

use crate::rational::{format_rational, Rational};

/// An element of `R ∪ {−∞}` with `⊕ = max` and `⊗ = +`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaxPlus {
    NegInf,
    Finite(Rational),
}

impl MaxPlus {
    pub const ZERO: MaxPlus = MaxPlus::NegInf;

    pub fn one() -> Self {
        MaxPlus::Finite(Rational::from_integer(0))
    }

    pub fn oplus(self, other: MaxPlus) -> MaxPlus {
        self.max(other)
    }

    pub fn otimes(self, other: MaxPlus) -> MaxPlus {
        match (self, other) {
            (MaxPlus::Finite(a), MaxPlus::Finite(b)) => MaxPlus::Finite(a + b),
            _ => MaxPlus::NegInf,
        }
    }

    pub fn finite(self) -> Option<Rational> {
        match self {
            MaxPlus::Finite(r) => Some(r),
            MaxPlus::NegInf => None,
        }
    }
}

impl PartialOrd for MaxPlus {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MaxPlus {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (MaxPlus::NegInf, MaxPlus::NegInf) => Ordering::Equal,
            (MaxPlus::NegInf, _) => Ordering::Less,
            (_, MaxPlus::NegInf) => Ordering::Greater,
            (MaxPlus::Finite(a), MaxPlus::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for MaxPlus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxPlus::NegInf => write!(f, "-inf"),
            MaxPlus::Finite(r) => write!(f, "{}", format_rational(r)),
        }
    }
}

/// Row-major `dim × dim` matrix over the max-plus semiring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxPlusMatrix {
    dim: usize,
    entries: Vec<MaxPlus>,
}

impl MaxPlusMatrix {
    pub fn filled(dim: usize, value: MaxPlus) -> Self {
        MaxPlusMatrix {
            dim,
            entries: vec![value; dim * dim],
        }
    }

    /// 0 on the diagonal, −∞ elsewhere.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::filled(dim, MaxPlus::NegInf);
        for i in 0..dim {
            m.set(i, i, MaxPlus::one());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, q: usize, v: usize) -> MaxPlus {
        self.entries[q * self.dim + v]
    }

    pub fn set(&mut self, q: usize, v: usize, x: MaxPlus) {
        self.entries[q * self.dim + v] = x;
    }

    /// Max-plus product `self ⊗ rhs`.
    pub fn mul(&self, rhs: &MaxPlusMatrix) -> MaxPlusMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::filled(n, MaxPlus::NegInf);
        for q in 0..n {
            for k in 0..n {
                let a = self.get(q, k);
                if a == MaxPlus::NegInf {
                    continue;
                }
                for v in 0..n {
                    let cand = a.otimes(rhs.get(k, v));
                    if cand > out.get(q, v) {
                        out.set(q, v, cand);
                    }
                }
            }
        }
        out
    }

    /// `1ᵗ M 1`: the largest entry.
    pub fn total(&self) -> MaxPlus {
        self.entries.iter().copied().max().unwrap_or(MaxPlus::NegInf)
    }

    /// `1ᵗ M`: column-wise maxima.
    pub fn column_maxima(&self) -> Vec<MaxPlus> {
        (0..self.dim)
            .map(|v| (0..self.dim).map(|q| self.get(q, v)).max().unwrap_or(MaxPlus::NegInf))
            .collect()
    }
}

impl fmt::Display for MaxPlusMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|v| self.get(q, v).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
