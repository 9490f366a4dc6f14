use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{laurent_map, Slot, ToralObject};
use crate::error::{Error, Result};
use crate::graded::{auto_window, hom_basis, GradedQWSpace, ModuleMap};
use crate::linalg::{q, QMatrix, Rational};

/// A morphism (alpha, phi) of some degree: a map per slot and a map of V
/// with beta_y alpha = (1 (x) phi) beta_x.
#[derive(Clone, Debug)]
pub struct ToralMorphism {
    source: ToralObject,
    target: ToralObject,
    degree: i64,
    alpha: BTreeMap<u32, ModuleMap>,
    alpha_tail: ModuleMap,
    phi: QMatrix,
}

impl PartialEq for ToralMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.degree == other.degree
            && self.phi == other.phi
            && self.slots().into_iter().chain(other.slots()).all(|s| self.alpha(s) == other.alpha(s))
    }
}

/// Explicit indices of either object.
pub(crate) fn joint_indices(x: &ToralObject, y: &ToralObject) -> Vec<u32> {
    let set: BTreeSet<u32> = x.explicit_indices().into_iter().chain(y.explicit_indices()).collect();
    set.into_iter().collect()
}

pub(crate) fn joint_slots(x: &ToralObject, y: &ToralObject) -> Vec<Slot> {
    joint_indices(x, y).into_iter().map(Slot::At).chain([Slot::Tail]).collect()
}

impl ToralMorphism {
    /// Builds and validates a morphism. Missing explicit slot maps default
    /// to the tail map when both modules there are the tail modules.
    pub fn new(
        source: &ToralObject,
        target: &ToralObject,
        degree: i64,
        mut alpha: BTreeMap<u32, ModuleMap>,
        alpha_tail: ModuleMap,
        phi: QMatrix,
    ) -> Result<Self> {
        if source.side() != target.side() {
            return Err(Error::GroupMismatch("morphism across sides".into()));
        }
        for k in joint_indices(source, target) {
            if !alpha.contains_key(&k) {
                let s = Slot::At(k);
                let m = if source.module(s) == source.module(Slot::Tail) && target.module(s) == target.module(Slot::Tail)
                {
                    alpha_tail.clone()
                } else {
                    ModuleMap::zero(source.module(s), target.module(s), degree)?
                };
                alpha.insert(k, m);
            }
        }
        if let Some(k) = alpha.keys().find(|k| !source.family().explicit().contains_key(k) && !target.family().explicit().contains_key(k)) {
            return Err(Error::InvalidMorphism(format!("map given at slot {k} which is explicit in neither object")));
        }
        let f = ToralMorphism { source: source.clone(), target: target.clone(), degree, alpha, alpha_tail, phi };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<()> {
        let (x, y) = (&self.source, &self.target);
        if self.phi.rows() != y.v().len() || self.phi.cols() != x.v().len() {
            return Err(Error::InvalidMorphism("V-map has the wrong size".into()));
        }
        let lphi = laurent_map(x.v(), y.v(), &self.phi, self.degree)?;
        for s in self.slots() {
            let a = self.alpha(s);
            if a.domain() != x.module(s) || a.codomain() != y.module(s) || a.degree() != self.degree {
                return Err(Error::InvalidMorphism(format!("slot map at {} has the wrong shape", s.key())));
            }
            a.check_valid().map_err(|e| Error::InvalidMorphism(format!("slot {}: {e}", s.key())))?;
            if y.beta(s).compose(a)? != lphi.compose(x.beta(s))? {
                return Err(Error::InvalidMorphism(format!("square does not commute at slot {}", s.key())));
            }
        }
        if let (Some(dx), Some(dy)) = (x.diff(), y.diff()) {
            let sign = if self.degree.rem_euclid(2) == 0 { q(1) } else { q(-1) };
            for s in self.slots() {
                let a = self.alpha(s);
                if dy.at(s).compose(a)? != a.compose(dx.at(s))?.scale(&sign) {
                    return Err(Error::InvalidMorphism(format!("not a chain map at slot {}", s.key())));
                }
            }
            if dy.v.mul(&self.phi) != self.phi.mul(&dx.v).scale(&sign) {
                return Err(Error::InvalidMorphism("V-map is not a chain map".into()));
            }
        }
        Ok(())
    }

    pub fn identity(x: &ToralObject) -> Self {
        let alpha = x.explicit_indices().into_iter().map(|k| (k, ModuleMap::identity(x.module(Slot::At(k))))).collect();
        ToralMorphism {
            source: x.clone(),
            target: x.clone(),
            degree: 0,
            alpha,
            alpha_tail: ModuleMap::identity(x.module(Slot::Tail)),
            phi: QMatrix::identity(x.v().len()),
        }
    }

    pub fn zero(x: &ToralObject, y: &ToralObject, degree: i64) -> Result<Self> {
        ToralMorphism::new(
            x,
            y,
            degree,
            BTreeMap::new(),
            ModuleMap::zero(x.module(Slot::Tail), y.module(Slot::Tail), degree)?,
            QMatrix::zeros(y.v().len(), x.v().len()),
        )
    }

    pub fn source(&self) -> &ToralObject {
        &self.source
    }

    pub fn target(&self) -> &ToralObject {
        &self.target
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn phi(&self) -> &QMatrix {
        &self.phi
    }

    pub fn slots(&self) -> Vec<Slot> {
        joint_slots(&self.source, &self.target)
    }

    pub fn alpha(&self, s: Slot) -> &ModuleMap {
        match s {
            Slot::At(k) => self.alpha.get(&k).unwrap_or(&self.alpha_tail),
            Slot::Tail => &self.alpha_tail,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.phi.is_zero() && self.slots().iter().all(|&s| self.alpha(s).is_zero())
    }

    /// self after f.
    pub fn compose(&self, f: &ToralMorphism) -> Result<ToralMorphism> {
        if f.target != self.source {
            return Err(Error::InvalidMorphism("composing maps whose ends do not match".into()));
        }
        let keys = joint_indices(&f.source, &self.target);
        let mut alpha = BTreeMap::new();
        for k in keys.iter().copied().chain(self.source.explicit_indices()) {
            alpha.insert(k, self.alpha(Slot::At(k)).compose(f.alpha(Slot::At(k)))?);
        }
        let tail = self.alpha_tail.compose(&f.alpha_tail)?;
        for (k, a) in &alpha {
            if !keys.contains(k) && *a != tail {
                return Err(Error::InvalidMorphism(format!(
                    "composite at slot {k} differs from the tail; make the slot explicit in the ends"
                )));
            }
        }
        alpha.retain(|k, _| keys.contains(k));
        ToralMorphism::new(
            &f.source,
            &self.target,
            self.degree + f.degree,
            alpha,
            tail,
            self.phi.mul(&f.phi),
        )
    }

    fn combine(&self, other: &ToralMorphism, a: &Rational, b: &Rational) -> Result<ToralMorphism> {
        if self.source != other.source || self.target != other.target || self.degree != other.degree {
            return Err(Error::InvalidMorphism("adding maps with different ends".into()));
        }
        let mut alpha = BTreeMap::new();
        for k in joint_indices(&self.source, &self.target) {
            let s = Slot::At(k);
            alpha.insert(k, self.alpha(s).scale(a).add(&other.alpha(s).scale(b))?);
        }
        Ok(ToralMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: self.degree,
            alpha,
            alpha_tail: self.alpha_tail.scale(a).add(&other.alpha_tail.scale(b))?,
            phi: self.phi.scale(a).add(&other.phi.scale(b)),
        })
    }

    pub fn add(&self, other: &ToralMorphism) -> Result<ToralMorphism> {
        self.combine(other, &q(1), &q(1))
    }

    pub fn scale(&self, s: &Rational) -> ToralMorphism {
        self.combine(self, s, &Rational::zero()).expect("same ends")
    }

    /// Replaces the ends by objects with identical summand data (used by
    /// functors that only relabel signs or degrees).
    pub(crate) fn rebase(&self, source: &ToralObject, target: &ToralObject, degree: i64) -> Result<ToralMorphism> {
        let mut alpha = BTreeMap::new();
        for k in joint_indices(source, target) {
            let s = Slot::At(k);
            alpha.insert(k, self.alpha(s).rebase(source.module(s), target.module(s), degree)?);
        }
        let alpha_tail = self.alpha_tail.rebase(source.module(Slot::Tail), target.module(Slot::Tail), degree)?;
        ToralMorphism::new(source, target, degree, alpha, alpha_tail, self.phi.clone())
    }

    /// Invertible at every slot (degreewise on a covering window) and on V.
    pub fn is_isomorphism(&self) -> bool {
        if self.degree != 0 || !self.phi.is_square() || (self.phi.rows() > 0 && !self.phi.is_invertible()) {
            return false;
        }
        self.slots().into_iter().all(|s| {
            let a = self.alpha(s);
            let w = auto_window(&[a.domain(), a.codomain()], 0);
            w.degrees().all(|e| {
                let m = a.matrix_at(e);
                m.rows() == m.cols() && (m.rows() == 0 || m.is_invertible())
            })
        })
    }
}

/// Unknowns of a hom computation: monomial slot maps and V-map entries.
enum Unknown {
    Slot(Slot, usize, usize),
    Phi(usize, usize),
}

/// A basis of the degree-`n` morphisms x -> y.
pub fn hom_basis_a(x: &ToralObject, y: &ToralObject, n: i64) -> Result<Vec<ToralMorphism>> {
    if x.side() != y.side() {
        return Err(Error::GroupMismatch("hom across sides".into()));
    }
    let slots = joint_slots(x, y);
    let mut unknowns = Vec::new();
    for &s in &slots {
        for (r, c) in hom_basis(x.module(s), y.module(s), n)? {
            unknowns.push(Unknown::Slot(s, r, c));
        }
    }
    for (j, vy) in y.v().iter().enumerate() {
        for (i, vx) in x.v().iter().enumerate() {
            if vy.0 == vx.0 + n && vy.1 == vx.1 {
                unknowns.push(Unknown::Phi(j, i));
            }
        }
    }
    if unknowns.is_empty() {
        return Ok(Vec::new());
    }
    // Equation rows: (slot, row of L(x)V_y, column of M_x) coefficient of
    // beta_y alpha - (1 (x) phi) beta_x.
    let mut eq_index: BTreeMap<(Slot, usize, usize), usize> = BTreeMap::new();
    let mut columns: Vec<Vec<(usize, Rational)>> = Vec::new();
    for u in &unknowns {
        let mut col = Vec::new();
        let mut push = |key: (Slot, usize, usize), v: Rational, col: &mut Vec<(usize, Rational)>| {
            let len = eq_index.len();
            let idx = *eq_index.entry(key).or_insert(len);
            col.push((idx, v));
        };
        match *u {
            Unknown::Slot(s, r, c) => {
                let mut a = ModuleMap::zero(x.module(s), y.module(s), n)?;
                a.add_entry(r, c, Rational::one())?;
                let img = y.beta(s).compose(&a)?;
                for (&(r2, c2), v) in img.entries() {
                    push((s, r2, c2), v.clone(), &mut col);
                }
            }
            Unknown::Phi(j, i) => {
                let mut p = QMatrix::zeros(y.v().len(), x.v().len());
                p.set(j, i, q(1));
                let lp = laurent_map(x.v(), y.v(), &p, n)?;
                for &s in &slots {
                    let img = lp.compose(x.beta(s))?;
                    for (&(r2, c2), v) in img.entries() {
                        push((s, r2, c2), -v.clone(), &mut col);
                    }
                }
            }
        }
        columns.push(col);
    }
    let mut a = QMatrix::zeros(eq_index.len(), unknowns.len());
    for (c, col) in columns.iter().enumerate() {
        for (r, v) in col {
            a.add_at(*r, c, v);
        }
    }
    let kernel = if eq_index.is_empty() { QMatrix::identity(unknowns.len()) } else { a.kernel_basis() };
    let mut out = Vec::new();
    for vec in kernel.columns() {
        let mut alpha: BTreeMap<u32, ModuleMap> = BTreeMap::new();
        let mut alpha_tail = ModuleMap::zero(x.module(Slot::Tail), y.module(Slot::Tail), n)?;
        for &s in &slots {
            if let Slot::At(k) = s {
                alpha.insert(k, ModuleMap::zero(x.module(s), y.module(s), n)?);
            }
        }
        let mut phi = QMatrix::zeros(y.v().len(), x.v().len());
        for (u, v) in unknowns.iter().zip(&vec) {
            if v.is_zero() {
                continue;
            }
            match *u {
                Unknown::Slot(Slot::At(k), r, c) => alpha.get_mut(&k).expect("slot").add_entry(r, c, v.clone())?,
                Unknown::Slot(Slot::Tail, r, c) => alpha_tail.add_entry(r, c, v.clone())?,
                Unknown::Phi(j, i) => phi.set(j, i, v.clone()),
            }
        }
        out.push(ToralMorphism::new(x, y, n, alpha, alpha_tail, phi)?);
    }
    Ok(out)
}

/// Degrees outside this range carry no morphisms x -> y.
pub fn hom_degree_range(x: &ToralObject, y: &ToralObject) -> (i64, i64) {
    let dx = x.degrees();
    let dy = y.degrees();
    if dx.is_empty() || dy.is_empty() {
        return (0, -1);
    }
    let (min_x, max_x) = (*dx.iter().min().unwrap(), *dx.iter().max().unwrap());
    let (min_y, max_y) = (*dy.iter().min().unwrap(), *dy.iter().max().unwrap());
    let step = 4;
    (min_y - max_x - step * (y.max_len() as i64 + 1), max_y - min_x)
}

/// Degreewise dimensions of hom(x, y) over the given (or the default) range,
/// as a space with trivial involution.
pub fn hom_a(x: &ToralObject, y: &ToralObject, range: Option<(i64, i64)>) -> Result<GradedQWSpace> {
    x.require_star()?;
    y.require_star()?;
    let (lo, hi) = range.unwrap_or_else(|| hom_degree_range(x, y));
    let mut dims = BTreeMap::new();
    for n in lo..=hi {
        let d = hom_basis_a(x, y, n)?.len();
        if d > 0 {
            dims.insert(n, d);
        }
    }
    Ok(GradedQWSpace::trivial(&dims))
}

/// Isomorphism test: matching invariants, then a random degree-0 map from
/// the hom basis checked for invertibility.
pub fn is_isomorphic(x: &ToralObject, y: &ToralObject) -> Result<bool> {
    if x.side() != y.side() || !x.v_space().is_isomorphic(&y.v_space()) {
        return Ok(false);
    }
    for s in joint_slots(x, y) {
        if !x.module(s).is_isomorphic(y.module(s)) {
            return Ok(false);
        }
    }
    if x.is_zero() {
        return Ok(y.is_zero());
    }
    let basis = hom_basis_a(x, y, 0)?;
    if basis.is_empty() {
        return Ok(false);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..6 {
        let mut f = ToralMorphism::zero(x, y, 0)?;
        for b in &basis {
            let c: i64 = rng.gen_range(-7..=7);
            f = f.add(&b.scale(&q(c)))?;
        }
        if f.is_isomorphism() {
            return Ok(true);
        }
    }
    Ok(false)
}
