//! Rational Burnside rings of SO(3) and O(2) as rings of continuous functions on
//! the space of conjugacy classes of subgroups with finite Weyl group.
//!
//! A function is stored as its values at the isolated points plus an eventually
//! constant dihedral sequence whose limit value is the value at O(2).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::json::{as_object, as_str, get, rat_from_json, rat_to_json};
use crate::linalg::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    SO3,
    O2,
}

impl Group {
    pub fn name(self) -> &'static str {
        match self {
            Group::SO3 => "SO3",
            Group::O2 => "O2",
        }
    }

    pub fn parse(s: &str) -> Result<Group> {
        match s {
            "SO3" => Ok(Group::SO3),
            "O2" => Ok(Group::O2),
            _ => Err(Error::Schema(format!("unknown group {s:?}"))),
        }
    }

    /// Smallest dihedral index n (for D_{2n}) that is a separate point.
    pub fn min_dihedral(self) -> u32 {
        match self {
            Group::SO3 => 3,
            Group::O2 => 1,
        }
    }
}

/// The five isolated classes of SO(3).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Exceptional {
    SO3,
    Sigma4,
    A4,
    A5,
    D4,
}

impl Exceptional {
    pub const ALL: [Exceptional; 5] =
        [Exceptional::SO3, Exceptional::Sigma4, Exceptional::A4, Exceptional::A5, Exceptional::D4];

    pub fn name(self) -> &'static str {
        match self {
            Exceptional::SO3 => "SO3",
            Exceptional::Sigma4 => "Sigma4",
            Exceptional::A4 => "A4",
            Exceptional::A5 => "A5",
            Exceptional::D4 => "D4",
        }
    }

    pub fn parse(s: &str) -> Result<Exceptional> {
        Exceptional::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Schema(format!("unknown exceptional class {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Toral,
    /// D_{2n}, stored as n.
    Dihedral(u32),
    /// O(2), the limit of the dihedral sequence.
    DihedralLimit,
    Exceptional(Exceptional),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubgroupClass {
    group: Group,
    point: Point,
}

impl SubgroupClass {
    pub fn new(group: Group, point: Point) -> Result<Self> {
        match (group, point) {
            (_, Point::Dihedral(n)) if n < group.min_dihedral() => Err(Error::BadIndex(format!(
                "dihedral index {n} is not a point of the {} dihedral part",
                group.name()
            ))),
            (Group::O2, Point::Exceptional(e)) => {
                Err(Error::BadClass(format!("{} is not a class of O2", e.name())))
            }
            _ => Ok(SubgroupClass { group, point }),
        }
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn point(&self) -> Point {
        self.point
    }
}

/// A continuous rational function on the class space of `group`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BurnsideElement {
    group: Group,
    exceptional: BTreeMap<Exceptional, Rational>,
    toral: Rational,
    dihedral_explicit: BTreeMap<u32, Rational>,
    dihedral_tail: Rational,
}

impl fmt::Debug for BurnsideElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

impl BurnsideElement {
    /// Builds and normalizes an element. Dihedral indices below the group's
    /// range are rejected.
    pub fn new(
        group: Group,
        exceptional: BTreeMap<Exceptional, Rational>,
        toral: Rational,
        dihedral_explicit: BTreeMap<u32, Rational>,
        dihedral_tail: Rational,
    ) -> Result<Self> {
        if group == Group::O2 && exceptional.values().any(|v| !v.is_zero()) {
            return Err(Error::BadClass("O2 has no exceptional classes".into()));
        }
        if let Some(&n) = dihedral_explicit.keys().find(|&&n| n < group.min_dihedral()) {
            return Err(Error::BadIndex(format!("dihedral index {n} out of range for {}", group.name())));
        }
        let mut e = BurnsideElement { group, exceptional, toral, dihedral_explicit, dihedral_tail };
        e.normalize();
        Ok(e)
    }

    fn normalize(&mut self) {
        let tail = self.dihedral_tail.clone();
        self.dihedral_explicit.retain(|_, v| *v != tail);
        self.exceptional.retain(|_, v| !v.is_zero());
    }

    pub fn constant(group: Group, value: Rational) -> Self {
        let exceptional = match group {
            Group::SO3 => Exceptional::ALL.iter().map(|&e| (e, value.clone())).collect(),
            Group::O2 => BTreeMap::new(),
        };
        let mut e = BurnsideElement {
            group,
            exceptional,
            toral: value.clone(),
            dihedral_explicit: BTreeMap::new(),
            dihedral_tail: value,
        };
        e.normalize();
        e
    }

    pub fn zero(group: Group) -> Self {
        Self::constant(group, Rational::zero())
    }

    pub fn one(group: Group) -> Self {
        Self::constant(group, Rational::one())
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn toral_value(&self) -> &Rational {
        &self.toral
    }

    pub fn dihedral_tail(&self) -> &Rational {
        &self.dihedral_tail
    }

    pub fn dihedral_explicit(&self) -> &BTreeMap<u32, Rational> {
        &self.dihedral_explicit
    }

    pub fn exceptional_values(&self) -> &BTreeMap<Exceptional, Rational> {
        &self.exceptional
    }

    pub fn value_at(&self, class: &SubgroupClass) -> Result<Rational> {
        if class.group != self.group {
            return Err(Error::GroupMismatch(format!(
                "element over {} evaluated at a class of {}",
                self.group.name(),
                class.group.name()
            )));
        }
        Ok(match class.point {
            Point::Toral => self.toral.clone(),
            Point::Dihedral(n) => self.dihedral_explicit.get(&n).unwrap_or(&self.dihedral_tail).clone(),
            Point::DihedralLimit => self.dihedral_tail.clone(),
            Point::Exceptional(e) => self.exceptional.get(&e).cloned().unwrap_or_else(Rational::zero),
        })
    }

    pub fn is_idempotent(&self) -> bool {
        ring_op(self, self, RingOp::Mul).map(|sq| &sq == self).unwrap_or(false)
    }

    pub fn to_json(&self) -> Value {
        let mut exc = Map::new();
        for (e, v) in &self.exceptional {
            exc.insert(e.name().to_string(), rat_to_json(v));
        }
        let mut explicit = Map::new();
        for (n, v) in &self.dihedral_explicit {
            explicit.insert(n.to_string(), rat_to_json(v));
        }
        let mut dihedral = Map::new();
        dihedral.insert("explicit".into(), Value::Object(explicit));
        dihedral.insert("tail".into(), rat_to_json(&self.dihedral_tail));
        let mut out = Map::new();
        out.insert("group".into(), Value::String(self.group.name().into()));
        out.insert("exceptional".into(), Value::Object(exc));
        out.insert("toral".into(), rat_to_json(&self.toral));
        out.insert("dihedral".into(), Value::Object(dihedral));
        Value::Object(out)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let group = Group::parse(as_str(get(v, "group")?)?)?;
        let mut exceptional = BTreeMap::new();
        if let Some(exc) = v.get("exceptional") {
            for (k, val) in as_object(exc)? {
                exceptional.insert(Exceptional::parse(k)?, rat_from_json(val)?);
            }
        }
        let toral = rat_from_json(get(v, "toral")?)?;
        let dih = get(v, "dihedral")?;
        let mut explicit = BTreeMap::new();
        if let Some(ex) = dih.get("explicit") {
            for (k, val) in as_object(ex)? {
                let n: u32 = k.parse().map_err(|_| Error::Schema(format!("bad dihedral index {k:?}")))?;
                explicit.insert(n, rat_from_json(val)?);
            }
        }
        let tail = rat_from_json(get(dih, "tail")?)?;
        BurnsideElement::new(group, exceptional, toral, explicit, tail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Mul,
}

pub fn ring_op(a: &BurnsideElement, b: &BurnsideElement, op: RingOp) -> Result<BurnsideElement> {
    if a.group != b.group {
        return Err(Error::GroupMismatch(format!("{} versus {}", a.group.name(), b.group.name())));
    }
    let f = |x: &Rational, y: &Rational| match op {
        RingOp::Add => x + y,
        RingOp::Mul => x * y,
    };
    let zero = Rational::zero();
    let mut exceptional = BTreeMap::new();
    if a.group == Group::SO3 {
        for e in Exceptional::ALL {
            let x = a.exceptional.get(&e).unwrap_or(&zero);
            let y = b.exceptional.get(&e).unwrap_or(&zero);
            exceptional.insert(e, f(x, y));
        }
    }
    let keys: BTreeSet<u32> = a.dihedral_explicit.keys().chain(b.dihedral_explicit.keys()).copied().collect();
    let mut explicit = BTreeMap::new();
    for n in keys {
        let x = a.dihedral_explicit.get(&n).unwrap_or(&a.dihedral_tail);
        let y = b.dihedral_explicit.get(&n).unwrap_or(&b.dihedral_tail);
        explicit.insert(n, f(x, y));
    }
    let mut out = BurnsideElement {
        group: a.group,
        exceptional,
        toral: f(&a.toral, &b.toral),
        dihedral_explicit: explicit,
        dihedral_tail: f(&a.dihedral_tail, &b.dihedral_tail),
    };
    out.normalize();
    Ok(out)
}

pub fn add(a: &BurnsideElement, b: &BurnsideElement) -> Result<BurnsideElement> {
    ring_op(a, b, RingOp::Add)
}

pub fn mul(a: &BurnsideElement, b: &BurnsideElement) -> Result<BurnsideElement> {
    ring_op(a, b, RingOp::Mul)
}

/// Which dihedral indices a region contains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DihedralSet {
    Finite(BTreeSet<u32>),
    /// Every index except the listed ones.
    Cofinite(BTreeSet<u32>),
    /// Indices n with n mod `modulus` in `residues`.
    Periodic { modulus: u32, residues: BTreeSet<u32> },
}

impl DihedralSet {
    pub fn empty() -> Self {
        DihedralSet::Finite(BTreeSet::new())
    }

    pub fn all() -> Self {
        DihedralSet::Cofinite(BTreeSet::new())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub exceptional: BTreeSet<Exceptional>,
    pub toral: bool,
    pub dihedral: DihedralSet,
    pub limit: bool,
}

impl Region {
    pub fn empty() -> Self {
        Region { exceptional: BTreeSet::new(), toral: false, dihedral: DihedralSet::empty(), limit: false }
    }

    pub fn whole(group: Group) -> Self {
        let exceptional = match group {
            Group::SO3 => Exceptional::ALL.into_iter().collect(),
            Group::O2 => BTreeSet::new(),
        };
        Region { exceptional, toral: true, dihedral: DihedralSet::all(), limit: true }
    }

    pub fn toral() -> Self {
        Region { toral: true, ..Region::empty() }
    }

    pub fn dihedral() -> Self {
        Region { dihedral: DihedralSet::all(), limit: true, ..Region::empty() }
    }

    pub fn exceptional(classes: &[Exceptional]) -> Self {
        Region { exceptional: classes.iter().copied().collect(), ..Region::empty() }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let mut r = Region::empty();
        if let Some(exc) = v.get("exceptional") {
            for e in exc.as_array().ok_or_else(|| Error::Schema("exceptional must be a list".into()))? {
                r.exceptional.insert(Exceptional::parse(as_str(e)?)?);
            }
        }
        r.toral = v.get("toral").and_then(Value::as_bool).unwrap_or(false);
        r.limit = v.get("limit").and_then(Value::as_bool).unwrap_or(false);
        let idx = |v: &Value| -> Result<BTreeSet<u32>> {
            v.as_array()
                .ok_or_else(|| Error::Schema("index set must be a list".into()))?
                .iter()
                .map(|x| x.as_u64().map(|n| n as u32).ok_or_else(|| Error::Schema("bad index".into())))
                .collect()
        };
        if let Some(d) = v.get("dihedral") {
            r.dihedral = if let Some(f) = d.get("finite") {
                DihedralSet::Finite(idx(f)?)
            } else if let Some(c) = d.get("cofinite") {
                DihedralSet::Cofinite(idx(c)?)
            } else if let Some(p) = d.get("periodic") {
                let modulus = p.get("modulus").and_then(Value::as_u64).ok_or_else(|| Error::Schema("modulus".into()))?;
                DihedralSet::Periodic { modulus: modulus as u32, residues: idx(get(p, "residues")?)? }
            } else {
                return Err(Error::Schema("dihedral set needs finite, cofinite or periodic".into()));
            };
        }
        Ok(r)
    }
}

/// Characteristic function of a clopen region.
pub fn idempotent(group: Group, region: &Region) -> Result<BurnsideElement> {
    if group == Group::O2 && !region.exceptional.is_empty() {
        return Err(Error::BadClass("O2 has no exceptional classes".into()));
    }
    let lo = group.min_dihedral();
    // Reduce periodic descriptions to finite/cofinite when possible.
    let dihedral = match &region.dihedral {
        DihedralSet::Periodic { modulus, residues } => {
            if *modulus == 0 {
                return Err(Error::NonClopenRegion("periodic set with modulus 0".into()));
            }
            let hits: BTreeSet<u32> = residues.iter().map(|r| r % modulus).collect();
            if hits.is_empty() {
                DihedralSet::empty()
            } else if hits.len() as u32 == *modulus {
                DihedralSet::all()
            } else {
                return Err(Error::NonClopenRegion(
                    "dihedral part is infinite and coinfinite, so it accumulates at O(2) on both sides".into(),
                ));
            }
        }
        other => other.clone(),
    };
    let one = Rational::one();
    let zero = Rational::zero();
    let (explicit, tail): (BTreeMap<u32, Rational>, Rational) = match &dihedral {
        DihedralSet::Finite(s) => {
            if region.limit {
                return Err(Error::NonClopenRegion(
                    "O(2) is in the region but only finitely many dihedral points are".into(),
                ));
            }
            if let Some(&n) = s.iter().find(|&&n| n < lo) {
                return Err(Error::BadIndex(format!("dihedral index {n} out of range")));
            }
            (s.iter().map(|&n| (n, one.clone())).collect(), zero.clone())
        }
        DihedralSet::Cofinite(excl) => {
            if !region.limit {
                return Err(Error::NonClopenRegion(
                    "cofinitely many dihedral points without their limit O(2)".into(),
                ));
            }
            if let Some(&n) = excl.iter().find(|&&n| n < lo) {
                return Err(Error::BadIndex(format!("dihedral index {n} out of range")));
            }
            (excl.iter().map(|&n| (n, zero.clone())).collect(), one.clone())
        }
        DihedralSet::Periodic { .. } => unreachable!(),
    };
    let exceptional = region.exceptional.iter().map(|&e| (e, one.clone())).collect();
    let toral = if region.toral { one } else { zero };
    BurnsideElement::new(group, exceptional, toral, explicit, tail)
}

pub fn e_toral(group: Group) -> BurnsideElement {
    idempotent(group, &Region::toral()).expect("toral region is clopen")
}

pub fn e_dihedral(group: Group) -> BurnsideElement {
    idempotent(group, &Region::dihedral()).expect("dihedral region is clopen")
}

pub fn e_exceptional() -> BurnsideElement {
    idempotent(Group::SO3, &Region::exceptional(&Exceptional::ALL)).expect("finite region is clopen")
}

pub fn e_class(h: Exceptional) -> BurnsideElement {
    idempotent(Group::SO3, &Region::exceptional(&[h])).expect("a point is clopen")
}

/// The five orthogonal idempotents of the exceptional part.
pub fn split_exceptional() -> Vec<BurnsideElement> {
    Exceptional::ALL.iter().map(|&h| e_class(h)).collect()
}

/// Restriction along O(2) inside SO(3): evaluate at the image class.
///
/// Cyclic subgroups and SO(2) go to the toral point, D_2 is conjugate to C_2,
/// D_4 lands on the exceptional class D4 and D_{2n} for n > 2 stays dihedral.
pub fn restrict_to_o2(a: &BurnsideElement) -> Result<BurnsideElement> {
    if a.group != Group::SO3 {
        return Err(Error::GroupMismatch("restriction needs an element over SO3".into()));
    }
    let mut explicit = a.dihedral_explicit.clone();
    explicit.insert(1, a.toral.clone());
    explicit.insert(2, a.exceptional.get(&Exceptional::D4).cloned().unwrap_or_else(Rational::zero));
    BurnsideElement::new(Group::O2, BTreeMap::new(), a.toral.clone(), explicit, a.dihedral_tail.clone())
}
