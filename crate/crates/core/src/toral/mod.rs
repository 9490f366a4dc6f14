//! Objects (M, V, beta) of the toral categories for O(2) and SO(3): a module
//! per cyclic subgroup (finitely many explicit slots plus one tail template),
//! a graded vector space V with involution, and a structure map from each
//! slot into Laurent series tensor V.

mod cover;
mod functors;
mod hom;
mod homology;
mod random;
mod resolve;

pub use cover::{cover_generating_set, generating_set, is_surjective, wide_sphere_cover, Cover, Element};
pub use functors::{
    counit, functor_f, functor_f_map, functor_r, functor_r_map, make_alpha, make_ef_bar_plus, make_ev, make_fn,
    make_generator, smash_with_torsion, twist_map, twisted_counit, twisted_f, twisted_f_map, twisted_r,
    twisted_r_map, unit, Generator,
};
pub use hom::{hom_a, hom_basis_a, hom_degree_range, is_isomorphic, ToralMorphism};
pub use homology::{cone, homology_da, homology_data, induced_ranks, HomologyData, VHomology};
pub use random::{random_differential_object, random_element, random_morphism, random_object, RandomSpec};
pub use resolve::{adams_bracket, ext_a, ext_degree_range, ext_dim, ext_euler_dim, injective_resolution, Resolution};

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::graded::{
    base_change_map, check_differential, localize_parts, GradedModule, GradedQWSpace,
    ModuleMap, Ring, SignedBasis, Summand,
};
use crate::json::{as_object, as_str, get, matrix_from_json, matrix_to_json};
use crate::linalg::{QMatrix, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    O2,
    SO3,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::O2 => "O2",
            Side::SO3 => "SO3",
        }
    }

    pub fn parse(s: &str) -> Result<Side> {
        match s {
            "O2" => Ok(Side::O2),
            "SO3" => Ok(Side::SO3),
            _ => Err(Error::Schema(format!("unknown side {s:?}"))),
        }
    }

    /// Ring of an explicit slot; slot 1 of the SO(3) side is over d.
    pub fn slot_ring(self, index: u32) -> Ring {
        if self == Side::SO3 && index == 1 {
            Ring::PolyD
        } else {
            Ring::PolyC
        }
    }
}

/// An explicit cyclic-subgroup slot (1 = trivial subgroup) or the tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    At(u32),
    Tail,
}

impl Slot {
    pub fn key(self) -> String {
        match self {
            Slot::At(n) => n.to_string(),
            Slot::Tail => "tail".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotFamily {
    side: Side,
    explicit: BTreeMap<u32, GradedModule>,
    tail: GradedModule,
}

impl SlotFamily {
    pub fn new(side: Side, mut explicit: BTreeMap<u32, GradedModule>, tail: GradedModule) -> Result<Self> {
        if side == Side::SO3 {
            explicit.entry(1).or_insert_with(|| GradedModule::zero(Ring::PolyD));
        }
        for (&n, m) in &explicit {
            if n == 0 {
                return Err(Error::BadIndex("slot indices start at 1".into()));
            }
            let ring = side.slot_ring(n);
            if m.ring() != ring {
                return Err(Error::Schema(format!("slot {n} must be over {}, got {}", ring.name(), m.ring().name())));
            }
            if ring == Ring::PolyD && m.summands().iter().any(|s| s.sign != 1) {
                return Err(Error::Schema("the involution acts trivially on slot 1".into()));
            }
        }
        if tail.ring() != Ring::PolyC {
            return Err(Error::Schema("the tail must be over PolyC".into()));
        }
        Ok(SlotFamily { side, explicit, tail })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn explicit(&self) -> &BTreeMap<u32, GradedModule> {
        &self.explicit
    }

    pub fn tail(&self) -> &GradedModule {
        &self.tail
    }

    pub fn at(&self, slot: Slot) -> &GradedModule {
        match slot {
            Slot::At(n) => self.explicit.get(&n).unwrap_or(&self.tail),
            Slot::Tail => &self.tail,
        }
    }

    pub fn slots(&self) -> Vec<Slot> {
        self.explicit.keys().map(|&n| Slot::At(n)).chain([Slot::Tail]).collect()
    }

    pub fn is_torsion(&self) -> bool {
        self.explicit.values().all(GradedModule::is_torsion) && self.tail.is_torsion()
    }

    pub fn to_json(&self) -> Value {
        let mut ex = Map::new();
        for (n, m) in &self.explicit {
            ex.insert(n.to_string(), m.to_json());
        }
        json!({"explicit": ex, "tail": self.tail.to_json()})
    }

    pub fn from_json(side: Side, v: &Value) -> Result<Self> {
        let mut explicit = BTreeMap::new();
        if let Some(ex) = v.get("explicit") {
            for (k, m) in as_object(ex)? {
                let n: u32 = k.parse().map_err(|_| Error::Schema(format!("bad slot index {k:?}")))?;
                explicit.insert(n, GradedModule::from_json(m)?);
            }
        }
        let tail = match v.get("tail") {
            Some(t) => GradedModule::from_json(t)?,
            None => GradedModule::zero(Ring::PolyC),
        };
        SlotFamily::new(side, explicit, tail)
    }
}

/// Differentials of degree -1 on every slot and on V (a matrix in the basis of V).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Differential {
    pub slots: BTreeMap<u32, ModuleMap>,
    pub tail: ModuleMap,
    pub v: QMatrix,
}

impl Differential {
    pub fn at(&self, slot: Slot) -> &ModuleMap {
        match slot {
            Slot::At(n) => self.slots.get(&n).unwrap_or(&self.tail),
            Slot::Tail => &self.tail,
        }
    }
}

/// The Laurent module L (x) V with summand i the generator 1 (x) v_i.
pub fn laurent_tensor(v: &[(i64, i8)]) -> GradedModule {
    GradedModule::new(Ring::LaurentC, v.iter().map(|&(d, s)| Summand::laurent(d, s)).collect())
        .expect("Laurent summands")
}

pub(crate) fn signed_basis_from_json(v: &Value) -> Result<SignedBasis> {
    let arr = v.as_array().ok_or_else(|| Error::Schema("basis must be a list".into()))?;
    let mut out = Vec::new();
    for p in arr {
        let pair = p.as_array().filter(|a| a.len() == 2).ok_or_else(|| Error::Schema("basis entry must be [degree, sign]".into()))?;
        let s = crate::json::as_i64(&pair[1])?;
        if s != 1 && s != -1 {
            return Err(Error::Schema("sign must be 1 or -1".into()));
        }
        out.push((crate::json::as_i64(&pair[0])?, s as i8));
    }
    Ok(out)
}

/// 1 (x) phi as a map of Laurent modules, for phi given in the eigenbases.
pub fn laurent_map(vx: &[(i64, i8)], vy: &[(i64, i8)], phi: &QMatrix, degree: i64) -> Result<ModuleMap> {
    let mut f = ModuleMap::zero(&laurent_tensor(vx), &laurent_tensor(vy), degree)?;
    for j in 0..vy.len() {
        for i in 0..vx.len() {
            let c = phi.get(j, i);
            if num_traits::Zero::is_zero(c) {
                continue;
            }
            if vy[j].0 != vx[i].0 + degree || vy[j].1 != vx[i].1 {
                return Err(Error::InvalidMorphism(format!("V-map entry ({j},{i}) is not homogeneous")));
            }
            f.add_term(j, i, 0, c.clone())?;
        }
    }
    Ok(f)
}

#[derive(Clone, PartialEq, Eq)]
pub struct ToralObject {
    m: SlotFamily,
    v: SignedBasis,
    beta: BTreeMap<u32, ModuleMap>,
    beta_tail: ModuleMap,
    diff: Option<Differential>,
}

impl fmt::Debug for ToralObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ToralObject({}; ", self.side().name())?;
        for (n, m) in &self.m.explicit {
            write!(f, "{n}: {m:?}; ")?;
        }
        write!(f, "tail: {:?}; V: {:?}", self.m.tail, self.v)?;
        if self.diff.is_some() {
            write!(f, "; with differential")?;
        }
        write!(f, ")")
    }
}

impl ToralObject {
    pub fn new(
        m: SlotFamily,
        v: SignedBasis,
        beta: BTreeMap<u32, ModuleMap>,
        beta_tail: ModuleMap,
        diff: Option<Differential>,
    ) -> Result<Self> {
        let lv = laurent_tensor(&v);
        let mut full = BTreeMap::new();
        for (&n, module) in &m.explicit {
            let b = match beta.get(&n) {
                Some(b) => b.clone(),
                None => ModuleMap::zero(module, &lv, 0)?,
            };
            full.insert(n, b);
        }
        if let Some(&n) = beta.keys().find(|n| !m.explicit.contains_key(n)) {
            return Err(Error::Schema(format!("structure map given for slot {n} which is not explicit")));
        }
        for slot in m.slots() {
            let b = match slot {
                Slot::At(n) => &full[&n],
                Slot::Tail => &beta_tail,
            };
            if b.domain() != m.at(slot) || b.codomain() != &lv || b.degree() != 0 {
                return Err(Error::Schema(format!("structure map at slot {} has the wrong shape", slot.key())));
            }
            b.check_valid()?;
        }
        let x = ToralObject { m, v, beta: full, beta_tail, diff: None };
        match diff {
            None => Ok(x),
            Some(d) => x.with_differential(d),
        }
    }

    /// Attaches a differential after checking d^2 = 0, compatibility with
    /// the ring action and with the structure maps.
    pub fn with_differential(mut self, d: Differential) -> Result<Self> {
        let n = self.v.len();
        if d.v.rows() != n || d.v.cols() != n {
            return Err(Error::NotADifferential("V-differential has the wrong size".into()));
        }
        let dv = laurent_map(&self.v, &self.v, &d.v, -1).map_err(|e| Error::NotADifferential(e.to_string()))?;
        if !dv.compose(&dv)?.is_zero() {
            return Err(Error::NotADifferential("V-differential squares to a nonzero map".into()));
        }
        if let Some(&k) = d.slots.keys().find(|k| !self.m.explicit.contains_key(k)) {
            return Err(Error::NotADifferential(format!("differential on non-explicit slot {k}")));
        }
        let mut full = d.clone();
        for (&k, module) in &self.m.explicit {
            if !full.slots.contains_key(&k) {
                full.slots.insert(k, ModuleMap::zero(module, module, -1)?);
            }
        }
        for slot in self.m.slots() {
            let dm = full.at(slot);
            check_differential(self.m.at(slot), dm)?;
            let lhs = self.beta(slot).compose(dm)?;
            let rhs = dv.compose(self.beta(slot))?;
            if lhs != rhs {
                return Err(Error::NotADifferential(format!(
                    "structure map does not commute with differentials at slot {}",
                    slot.key()
                )));
            }
        }
        self.diff = Some(full);
        Ok(self)
    }

    pub fn without_differential(&self) -> ToralObject {
        ToralObject { diff: None, ..self.clone() }
    }

    pub fn zero(side: Side) -> Self {
        let m = SlotFamily::new(side, BTreeMap::new(), GradedModule::zero(Ring::PolyC)).expect("zero family");
        let lv = laurent_tensor(&[]);
        let beta_tail = ModuleMap::zero(m.tail(), &lv, 0).expect("rings");
        ToralObject::new(m, Vec::new(), BTreeMap::new(), beta_tail, None).expect("zero object")
    }

    pub fn side(&self) -> Side {
        self.m.side
    }

    pub fn family(&self) -> &SlotFamily {
        &self.m
    }

    pub fn module(&self, slot: Slot) -> &GradedModule {
        self.m.at(slot)
    }

    pub fn v(&self) -> &SignedBasis {
        &self.v
    }

    pub fn v_space(&self) -> GradedQWSpace {
        GradedQWSpace::from_signed(&self.v)
    }

    pub fn lv(&self) -> GradedModule {
        laurent_tensor(&self.v)
    }

    pub fn beta(&self, slot: Slot) -> &ModuleMap {
        match slot {
            Slot::At(n) => self.beta.get(&n).unwrap_or(&self.beta_tail),
            Slot::Tail => &self.beta_tail,
        }
    }

    pub fn diff(&self) -> Option<&Differential> {
        self.diff.as_ref()
    }

    pub fn slots(&self) -> Vec<Slot> {
        self.m.slots()
    }

    pub fn explicit_indices(&self) -> Vec<u32> {
        self.m.explicit.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_empty() && self.slots().iter().all(|&s| self.module(s).is_empty())
    }

    /// Every degree that carries a generator (slot generators and V).
    pub fn degrees(&self) -> Vec<i64> {
        let mut d: Vec<i64> = self.v.iter().map(|x| x.0).collect();
        for s in self.slots() {
            d.extend(self.module(s).summands().iter().map(|x| x.shift));
        }
        d
    }

    pub fn max_len(&self) -> u32 {
        self.slots().iter().map(|&s| self.module(s).max_len()).max().unwrap_or(0)
    }

    /// The star condition: after inverting the Euler class (and extending
    /// scalars from d to c on slot 1), each structure map is an isomorphism.
    pub fn check_star(&self) -> bool {
        self.slots().iter().all(|&s| self.star_at(s).unwrap_or(false))
    }

    fn star_at(&self, slot: Slot) -> Result<bool> {
        let mut b = self.beta(slot).clone();
        if !b.domain().ring().is_c() {
            b = base_change_map(&b)?;
        }
        let (loc, idx) = localize_parts(b.domain());
        let restricted = b.restrict_domain(&idx);
        let lb = restricted.rebase(&loc, b.codomain(), 0)?;
        for e in [0, 1] {
            let m = lb.matrix_at(e);
            if !m.is_invertible() && !(m.rows() == 0 && m.cols() == 0) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn require_star(&self) -> Result<()> {
        match self.slots().into_iter().find(|&s| !self.star_at(s).unwrap_or(false)) {
            None => Ok(()),
            Some(s) => Err(Error::StarViolation(format!("structure map at slot {} is not a rational isomorphism", s.key()))),
        }
    }

    fn map_parts<F>(&self, mut f: F) -> Result<ToralObject>
    where
        F: FnMut(&GradedModule) -> GradedModule,
    {
        let explicit: BTreeMap<u32, GradedModule> = self.m.explicit.iter().map(|(&n, m)| (n, f(m))).collect();
        let tail = f(&self.m.tail);
        let m = SlotFamily::new(self.side(), explicit, tail)?;
        Ok(ToralObject { m, ..self.clone() })
    }

    /// Degree shift by n (the differential changes sign).
    pub fn suspend(&self, n: i64) -> Result<ToralObject> {
        let v: SignedBasis = self.v.iter().map(|&(d, s)| (d + n, s)).collect();
        let lv = laurent_tensor(&v);
        let shifted = self.map_parts(|m| m.suspend(n))?;
        let mut beta = BTreeMap::new();
        for (&k, b) in &self.beta {
            beta.insert(k, b.rebase(shifted.m.at(Slot::At(k)), &lv, 0)?);
        }
        let beta_tail = self.beta_tail.rebase(shifted.m.tail(), &lv, 0)?;
        let diff = match &self.diff {
            None => None,
            Some(d) => {
                let minus = -Rational::from_integer(1.into());
                let mut slots = BTreeMap::new();
                for (&k, dm) in &d.slots {
                    let m = shifted.m.at(Slot::At(k));
                    slots.insert(k, dm.rebase(m, m, -1)?.scale(&minus));
                }
                let t = shifted.m.tail();
                Some(Differential { slots, tail: d.tail.rebase(t, t, -1)?.scale(&minus), v: d.v.neg() })
            }
        };
        ToralObject::new(shifted.m, v, beta, beta_tail, diff)
    }

    /// Tensor with the sign representation (O(2) side only).
    pub fn twist(&self) -> Result<ToralObject> {
        if self.side() != Side::O2 {
            return Err(Error::Schema("the twist acts on the O(2) side".into()));
        }
        let v: SignedBasis = self.v.iter().map(|&(d, s)| (d, -s)).collect();
        let lv = laurent_tensor(&v);
        let t = self.map_parts(GradedModule::twist)?;
        let mut beta = BTreeMap::new();
        for (&k, b) in &self.beta {
            beta.insert(k, b.rebase(t.m.at(Slot::At(k)), &lv, 0)?);
        }
        let beta_tail = self.beta_tail.rebase(t.m.tail(), &lv, 0)?;
        let diff = match &self.diff {
            None => None,
            Some(d) => {
                let mut slots = BTreeMap::new();
                for (&k, dm) in &d.slots {
                    let m = t.m.at(Slot::At(k));
                    slots.insert(k, dm.rebase(m, m, -1)?);
                }
                let tm = t.m.tail();
                Some(Differential { slots, tail: d.tail.rebase(tm, tm, -1)?, v: d.v.clone() })
            }
        };
        ToralObject::new(t.m, v, beta, beta_tail, diff)
    }

    /// Direct sum; explicit slots of either summand become explicit.
    pub fn direct_sum(&self, other: &ToralObject) -> Result<ToralObject> {
        if self.side() != other.side() {
            return Err(Error::GroupMismatch("direct sum across sides".into()));
        }
        let keys: Vec<u32> = self.m.explicit.keys().chain(other.m.explicit.keys()).copied().collect();
        let mut explicit = BTreeMap::new();
        let mut beta = BTreeMap::new();
        for k in keys {
            let s = Slot::At(k);
            explicit.insert(k, self.module(s).direct_sum(other.module(s))?);
            beta.insert(k, self.beta(s).direct_sum(other.beta(s))?);
        }
        let tail = self.m.tail.direct_sum(&other.m.tail)?;
        let beta_tail = self.beta_tail.direct_sum(&other.beta_tail)?;
        let mut v = self.v.clone();
        v.extend_from_slice(&other.v);
        let diff = match (&self.diff, &other.diff) {
            (None, None) => None,
            _ => {
                let dx = self.diff_or_zero()?;
                let dy = other.diff_or_zero()?;
                let mut slots = BTreeMap::new();
                for &k in explicit.keys() {
                    slots.insert(k, dx.at(Slot::At(k)).direct_sum(dy.at(Slot::At(k)))?);
                }
                Some(Differential { slots, tail: dx.tail.direct_sum(&dy.tail)?, v: dx.v.block_diag(&dy.v) })
            }
        };
        let m = SlotFamily::new(self.side(), explicit, tail)?;
        ToralObject::new(m, v, beta, beta_tail, diff)
    }

    /// The differential, or zero maps when there is none.
    pub fn diff_or_zero(&self) -> Result<Differential> {
        if let Some(d) = &self.diff {
            return Ok(d.clone());
        }
        let mut slots = BTreeMap::new();
        for (&k, m) in &self.m.explicit {
            slots.insert(k, ModuleMap::zero(m, m, -1)?);
        }
        let tail = ModuleMap::zero(&self.m.tail, &self.m.tail, -1)?;
        Ok(Differential { slots, tail, v: QMatrix::zeros(self.v.len(), self.v.len()) })
    }

    /// Even and odd parts (objects without differential).
    pub fn parity_split(&self) -> Result<(ToralObject, ToralObject)> {
        if self.diff.is_some() {
            return Err(Error::NotADifferential("parity splitting applies to objects without differential".into()));
        }
        Ok((self.parity_part(0)?, self.parity_part(1)?))
    }

    pub fn parity_part(&self, parity: i64) -> Result<ToralObject> {
        let vidx: Vec<usize> = (0..self.v.len()).filter(|&i| self.v[i].0.rem_euclid(2) == parity).collect();
        let v: SignedBasis = vidx.iter().map(|&i| self.v[i]).collect();
        let lv = laurent_tensor(&v);
        let mut explicit = BTreeMap::new();
        let mut beta = BTreeMap::new();
        for (&k, m) in &self.m.explicit {
            let (pm, idx) = m.parity_part(parity);
            let b = self.beta[&k].restrict_domain(&idx).restrict_codomain(&vidx).rebase(&pm, &lv, 0)?;
            explicit.insert(k, pm);
            beta.insert(k, b);
        }
        let (tail, idx) = self.m.tail.parity_part(parity);
        let beta_tail = self.beta_tail.restrict_domain(&idx).restrict_codomain(&vidx).rebase(&tail, &lv, 0)?;
        ToralObject::new(SlotFamily::new(self.side(), explicit, tail)?, v, beta, beta_tail, None)
    }

    /// Whether every generator sits in degrees of the given parity.
    pub fn is_parity_pure(&self, parity: i64) -> bool {
        self.degrees().iter().all(|d| d.rem_euclid(2) == parity)
    }

    /// Removes explicit slots that agree with the tail data (slot 1 of the
    /// SO(3) side always stays).
    pub fn compact(&self) -> ToralObject {
        let mut out = self.clone();
        let keys: Vec<u32> = out.m.explicit.keys().copied().collect();
        for k in keys {
            if self.side() == Side::SO3 && k == 1 {
                continue;
            }
            let same = self.m.explicit[&k] == self.m.tail
                && self.beta[&k] == self.beta_tail
                && self.diff.as_ref().map_or(true, |d| d.slots[&k] == d.tail);
            if same {
                out.m.explicit.remove(&k);
                out.beta.remove(&k);
                if let Some(d) = &mut out.diff {
                    d.slots.remove(&k);
                }
            }
        }
        out
    }

    /// The same object with slot `k` made explicit (a copy of the tail).
    pub fn with_explicit(&self, k: u32) -> ToralObject {
        let mut out = self.clone();
        if !out.m.explicit.contains_key(&k) {
            out.m.explicit.insert(k, self.m.tail.clone());
            out.beta.insert(k, self.beta_tail.clone());
            if let Some(d) = &mut out.diff {
                d.slots.insert(k, d.tail.clone());
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut beta = Map::new();
        for (k, b) in &self.beta {
            beta.insert(k.to_string(), b.to_json());
        }
        beta.insert("tail".into(), self.beta_tail.to_json());
        let mut out = json!({
            "side": self.side().name(),
            "M": self.m.to_json(),
            "V": {"basis": self.v.iter().map(|&(d, s)| json!([d, s])).collect::<Vec<_>>()},
            "beta": beta,
        });
        if let Some(d) = &self.diff {
            let mut slots = Map::new();
            for (k, dm) in &d.slots {
                slots.insert(k.to_string(), dm.to_json());
            }
            out["diff"] = json!({"slots": slots, "tail": d.tail.to_json(), "V": matrix_to_json(&d.v)});
        }
        out
    }

    /// Reads an object; a V given with a non-diagonal involution is moved to
    /// an eigenbasis and the structure maps are rewritten accordingly.
    pub fn from_json(v: &Value) -> Result<Self> {
        let side = Side::parse(as_str(get(v, "side")?)?)?;
        let m = SlotFamily::from_json(side, get(v, "M")?)?;
        let space = match v.get("V") {
            Some(s) => GradedQWSpace::from_json(s)?,
            None => GradedQWSpace::zero(),
        };
        let (basis, change, orig) = match v.get("V").and_then(|s| s.get("basis")) {
            // An explicit signed basis is used as given, in its order.
            Some(_) => {
                let b = signed_basis_from_json(&v["V"]["basis"])?;
                let mut change = BTreeMap::new();
                change.insert(0, QMatrix::identity(b.len()));
                (b.clone(), change, b)
            }
            None => {
                let (basis, change) = space.diagonalize();
                // Original basis order: by degree, then position.
                let orig: SignedBasis =
                    change.iter().flat_map(|(&d, p)| std::iter::repeat((d, 1i8)).take(p.rows())).collect();
                (basis, change, orig)
            }
        };
        let lv_orig = laurent_tensor(&orig);
        let lv = laurent_tensor(&basis);
        // Change of coordinates, block diagonal by degree.
        let n = basis.len();
        let mut to_new = QMatrix::zeros(n, n);
        let mut off = 0;
        for p in change.values() {
            let inv = p.inverse().ok_or_else(|| Error::Schema("eigenbasis change is singular".into()))?;
            to_new.set_block(off, off, &inv);
            off += p.rows();
        }
        let convert = |b: &ModuleMap, dom: &GradedModule| -> Result<ModuleMap> {
            let mut out = ModuleMap::zero(dom, &lv, 0)?;
            for (&(r, c), coef) in b.entries() {
                let p = b.pow(r, c).expect("homogeneous");
                for r2 in 0..n {
                    let f = to_new.get(r2, r);
                    if !num_traits::Zero::is_zero(f) {
                        out.add_term(r2, c, p, f * coef)?;
                    }
                }
            }
            Ok(out)
        };
        let beta_json = v.get("beta").cloned().unwrap_or(json!({}));
        let mut beta = BTreeMap::new();
        for (&k, module) in m.explicit() {
            let b = match beta_json.get(k.to_string()) {
                Some(bj) => ModuleMap::from_json(bj, module, &lv_orig)?,
                None => ModuleMap::zero(module, &lv_orig, 0)?,
            };
            beta.insert(k, convert(&b, module)?);
        }
        let bt = match beta_json.get("tail") {
            Some(bj) => ModuleMap::from_json(bj, m.tail(), &lv_orig)?,
            None => ModuleMap::zero(m.tail(), &lv_orig, 0)?,
        };
        let beta_tail = convert(&bt, m.tail())?;
        let diff = match v.get("diff") {
            None => None,
            Some(dj) => {
                let mut slots = BTreeMap::new();
                if let Some(sj) = dj.get("slots") {
                    for (k, mj) in as_object(sj)? {
                        let idx: u32 = k.parse().map_err(|_| Error::Schema(format!("bad slot {k:?}")))?;
                        let module = m
                            .explicit()
                            .get(&idx)
                            .ok_or_else(|| Error::Schema(format!("differential on unknown slot {idx}")))?;
                        slots.insert(idx, ModuleMap::from_json(mj, module, module)?);
                    }
                }
                let tail = match dj.get("tail") {
                    Some(t) => ModuleMap::from_json(t, m.tail(), m.tail())?,
                    None => ModuleMap::zero(m.tail(), m.tail(), -1)?,
                };
                let dv = match dj.get("V") {
                    Some(mj) => {
                        let raw = matrix_from_json(mj, n, n)?;
                        let back = to_new.inverse().expect("invertible");
                        to_new.mul(&raw).mul(&back)
                    }
                    None => QMatrix::zeros(n, n),
                };
                Some(Differential { slots, tail, v: dv })
            }
        };
        ToralObject::new(m, basis, beta, beta_tail, diff)
    }
}
