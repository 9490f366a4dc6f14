//! Graded modules over Q[c] (|c| = -2) and Q[d] (|d| = -4) with an action of
//! the group of order two, kept in direct-sum form.
//!
//! Sign convention: a summand records the eigenvalue of its generator. The
//! element c^a g has eigenvalue sign * (-1)^a over c, and sign over d.

mod map;
mod ops;
mod space;
mod window;

pub use map::ModuleMap;
pub use ops::{
    base_change_d_to_c, base_change_map, check_differential, fixed_inclusion, fixed_points_c_to_d,
    fixed_points_map, hom_basis, homology_slot, homology_slot_in, localize, presentation, smith_canonical,
    SlotHomology,
};
pub(crate) use ops::{localize_parts, max_pow};
pub use space::{eigen_split, GradedQWSpace, SignedBasis};
pub use window::{auto_window, canonicalize, Canonical, Persistence, Quotient, Subquotient, Window};

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::json::{as_i64, as_str, get};
use crate::linalg::Rational;
use num_traits::Zero;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ring {
    PolyC,
    PolyD,
    LaurentC,
    LaurentD,
}

impl Ring {
    /// Degree drop of the ring variable.
    pub fn step(self) -> i64 {
        if self.is_c() {
            2
        } else {
            4
        }
    }

    pub fn is_c(self) -> bool {
        matches!(self, Ring::PolyC | Ring::LaurentC)
    }

    pub fn is_laurent(self) -> bool {
        matches!(self, Ring::LaurentC | Ring::LaurentD)
    }

    pub fn localized(self) -> Ring {
        match self {
            Ring::PolyC | Ring::LaurentC => Ring::LaurentC,
            Ring::PolyD | Ring::LaurentD => Ring::LaurentD,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Ring::PolyC => "PolyC",
            Ring::PolyD => "PolyD",
            Ring::LaurentC => "LaurentC",
            Ring::LaurentD => "LaurentD",
        }
    }

    pub fn parse(s: &str) -> Result<Ring> {
        match s {
            "PolyC" => Ok(Ring::PolyC),
            "PolyD" => Ok(Ring::PolyD),
            "LaurentC" => Ok(Ring::LaurentC),
            "LaurentD" => Ok(Ring::LaurentD),
            _ => Err(Error::Schema(format!("unknown ring {s:?}"))),
        }
    }

    /// Eigenvalue of x^a g where g has eigenvalue `sign`.
    pub fn element_sign(self, sign: i8, a: i64) -> i8 {
        if self.is_c() && a.rem_euclid(2) == 1 {
            -sign
        } else {
            sign
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Free,
    Torsion(u32),
    Laurent,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Summand {
    pub kind: Kind,
    pub shift: i64,
    pub sign: i8,
}

impl fmt::Debug for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign > 0 { '+' } else { '-' };
        match self.kind {
            Kind::Free => write!(f, "F({},{s})", self.shift),
            Kind::Torsion(l) => write!(f, "T{l}({},{s})", self.shift),
            Kind::Laurent => write!(f, "L({},{s})", self.shift),
        }
    }
}

impl Summand {
    pub fn free(shift: i64, sign: i8) -> Self {
        Summand { kind: Kind::Free, shift, sign }
    }

    pub fn torsion(len: u32, shift: i64, sign: i8) -> Self {
        Summand { kind: Kind::Torsion(len), shift, sign }
    }

    pub fn laurent(shift: i64, sign: i8) -> Self {
        Summand { kind: Kind::Laurent, shift, sign }
    }

    /// Exponent a with x^a g living in degree `e`, if that element is nonzero.
    pub fn exponent_at(&self, e: i64, step: i64) -> Option<i64> {
        let diff = self.shift - e;
        if diff.rem_euclid(step) != 0 {
            return None;
        }
        let a = diff / step;
        let alive = match self.kind {
            Kind::Free => a >= 0,
            Kind::Torsion(l) => a >= 0 && a < l as i64,
            Kind::Laurent => true,
        };
        alive.then_some(a)
    }

    /// Whether x^a g is nonzero (negative a only for Laurent).
    pub fn alive(&self, a: i64) -> bool {
        match self.kind {
            Kind::Free => a >= 0,
            Kind::Torsion(l) => a >= 0 && a < l as i64,
            Kind::Laurent => true,
        }
    }

    pub fn is_torsion(&self) -> bool {
        matches!(self.kind, Kind::Torsion(_))
    }

    pub fn len(&self) -> u32 {
        match self.kind {
            Kind::Torsion(l) => l,
            _ => 0,
        }
    }

    fn to_json(self) -> Value {
        let kind = match self.kind {
            Kind::Free => "Free",
            Kind::Torsion(_) => "Torsion",
            Kind::Laurent => "Laurent",
        };
        let mut v = json!({"kind": kind, "shift": self.shift, "sign": self.sign});
        if let Kind::Torsion(l) = self.kind {
            v["len"] = json!(l);
        }
        v
    }

    fn from_json(v: &Value) -> Result<Self> {
        let shift = as_i64(get(v, "shift")?)?;
        let sign = v.get("sign").map(as_i64).transpose()?.unwrap_or(1);
        if sign != 1 && sign != -1 {
            return Err(Error::Schema(format!("sign must be 1 or -1, got {sign}")));
        }
        let kind = match as_str(get(v, "kind")?)? {
            "Free" => Kind::Free,
            "Laurent" => Kind::Laurent,
            "Torsion" => {
                let l = as_i64(get(v, "len")?)?;
                if l < 1 {
                    return Err(Error::Schema("torsion length must be at least 1".into()));
                }
                Kind::Torsion(l as u32)
            }
            k => return Err(Error::Schema(format!("unknown summand kind {k:?}"))),
        };
        Ok(Summand { kind, shift, sign: sign as i8 })
    }
}

/// An ordered direct sum of cyclic summands. The order fixes the basis used
/// by maps; `canonical` gives the normal form used for comparisons.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GradedModule {
    ring: Ring,
    summands: Vec<Summand>,
}

impl fmt::Debug for GradedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.ring.name(), self.summands)
    }
}

impl GradedModule {
    pub fn new(ring: Ring, summands: Vec<Summand>) -> Result<Self> {
        for s in &summands {
            if s.sign != 1 && s.sign != -1 {
                return Err(Error::Schema(format!("summand sign {} is not +-1", s.sign)));
            }
            match s.kind {
                Kind::Torsion(0) => return Err(Error::Schema("torsion length 0".into())),
                Kind::Torsion(_) | Kind::Free if ring.is_laurent() => {
                    return Err(Error::Schema(format!("{:?} summand over {}", s, ring.name())))
                }
                _ => {}
            }
        }
        Ok(GradedModule { ring, summands })
    }

    pub fn zero(ring: Ring) -> Self {
        GradedModule { ring, summands: Vec::new() }
    }

    pub fn cyclic(ring: Ring, s: Summand) -> Self {
        GradedModule::new(ring, vec![s]).expect("valid summand")
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn step(&self) -> i64 {
        self.ring.step()
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn is_torsion(&self) -> bool {
        self.summands.iter().all(Summand::is_torsion)
    }

    pub fn direct_sum(&self, other: &GradedModule) -> Result<GradedModule> {
        if self.ring != other.ring {
            return Err(Error::AlgebraMismatch(format!("{} versus {}", self.ring.name(), other.ring.name())));
        }
        let mut s = self.summands.clone();
        s.extend_from_slice(&other.summands);
        Ok(GradedModule { ring: self.ring, summands: s })
    }

    pub fn suspend(&self, n: i64) -> GradedModule {
        let summands = self.summands.iter().map(|s| Summand { shift: s.shift + n, ..*s }).collect();
        GradedModule { ring: self.ring, summands }
    }

    /// Tensor with the sign representation.
    pub fn twist(&self) -> GradedModule {
        let summands = self.summands.iter().map(|s| Summand { sign: -s.sign, ..*s }).collect();
        GradedModule { ring: self.ring, summands }
    }

    pub fn with_ring(&self, ring: Ring) -> Result<GradedModule> {
        GradedModule::new(ring, self.summands.clone())
    }

    /// Laurent summands moved to a shift in [0, step) with the matching sign.
    fn normalize_summand(ring: Ring, s: Summand) -> Summand {
        if s.kind != Kind::Laurent {
            return s;
        }
        let step = ring.step();
        let r = s.shift.rem_euclid(step);
        let a = (s.shift - r) / step;
        Summand { kind: Kind::Laurent, shift: r, sign: ring.element_sign(s.sign, a) }
    }

    pub fn canonical(&self) -> GradedModule {
        let mut s: Vec<Summand> =
            self.summands.iter().map(|&s| GradedModule::normalize_summand(self.ring, s)).collect();
        s.sort();
        GradedModule { ring: self.ring, summands: s }
    }

    pub fn is_isomorphic(&self, other: &GradedModule) -> bool {
        self.canonical() == other.canonical()
    }

    /// Basis of the degree-`e` piece as (summand index, exponent).
    pub fn basis_at(&self, e: i64) -> Vec<(usize, i64)> {
        let step = self.step();
        self.summands
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.exponent_at(e, step).map(|a| (i, a)))
            .collect()
    }

    pub fn dim_at(&self, e: i64) -> usize {
        self.basis_at(e).len()
    }

    pub fn element_sign(&self, idx: usize, a: i64) -> i8 {
        self.ring.element_sign(self.summands[idx].sign, a)
    }

    pub fn max_shift(&self) -> Option<i64> {
        self.summands.iter().map(|s| s.shift).max()
    }

    pub fn min_shift(&self) -> Option<i64> {
        self.summands.iter().map(|s| s.shift).min()
    }

    pub fn max_len(&self) -> u32 {
        self.summands.iter().map(Summand::len).max().unwrap_or(0)
    }

    /// Parity of a summand: its degrees are all congruent to the shift mod 2.
    pub fn parity_part(&self, parity: i64) -> (GradedModule, Vec<usize>) {
        let idx: Vec<usize> =
            (0..self.len()).filter(|&i| self.summands[i].shift.rem_euclid(2) == parity).collect();
        let summands = idx.iter().map(|&i| self.summands[i]).collect();
        (GradedModule { ring: self.ring, summands }, idx)
    }

    pub fn select(&self, idx: &[usize]) -> GradedModule {
        GradedModule { ring: self.ring, summands: idx.iter().map(|&i| self.summands[i]).collect() }
    }

    /// Multiplies a degree-`e` vector by x^k (k may be negative on Laurent
    /// summands); components that vanish are dropped.
    pub fn mul_power(&self, e: i64, v: &[Rational], k: i64) -> Vec<Rational> {
        let src = self.basis_at(e);
        let dst = self.basis_at(e - self.step() * k);
        let mut out = vec![Rational::zero(); dst.len()];
        for (n, &(i, a)) in src.iter().enumerate() {
            if v[n].is_zero() {
                continue;
            }
            if let Some(m) = dst.iter().position(|&(j, b)| j == i && b == a + k) {
                out[m] += &v[n];
            }
        }
        out
    }

    /// Eigenvalues of the monomial basis in degree `e`.
    pub fn signs_at(&self, e: i64) -> Vec<i8> {
        self.basis_at(e).iter().map(|&(i, a)| self.element_sign(i, a)).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring.name(),
            "summands": self.summands.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let ring = Ring::parse(as_str(get(v, "ring")?)?)?;
        let list = get(v, "summands")?.as_array().ok_or_else(|| Error::Schema("summands must be a list".into()))?;
        let summands = list.iter().map(Summand::from_json).collect::<Result<Vec<_>>>()?;
        GradedModule::new(ring, summands)
    }
}
