//! Objects with a rational complex at infinity, Q[W]-complexes at the
//! indices k >= 3, and a germ map recording the eventual behaviour of the
//! sequence.
//!
//! Sequences are stored as finitely many explicit indices plus one tail
//! complex standing for every other index. Germs only see the tail, so the
//! germ map is stored as a single map from the complex at infinity to the
//! tail.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::graded::SignedBasis;
use crate::json::{as_object, get, matrix_from_json, matrix_to_json, parse_key_i64};
use crate::linalg::{q, QMatrix, Rational};
use crate::toral::{signed_basis_from_json, VHomology};

/// A finite chain complex of Q[W]-modules in an eigenbasis: basis vectors
/// carry (degree, sign) and the differential lowers degree by one.
#[derive(Clone, Debug, PartialEq)]
pub struct QWComplex {
    basis: SignedBasis,
    d: QMatrix,
}

impl QWComplex {
    pub fn new(basis: SignedBasis, d: QMatrix) -> Result<Self> {
        let n = basis.len();
        if d.rows() != n || d.cols() != n {
            return Err(Error::NotADifferential("differential has the wrong size".into()));
        }
        check_homogeneous(&basis, &basis, &d, -1).map_err(|e| Error::NotADifferential(e.to_string()))?;
        if !d.mul(&d).is_zero() {
            return Err(Error::NotADifferential("d^2 is not zero".into()));
        }
        Ok(QWComplex { basis, d })
    }

    pub fn graded(basis: SignedBasis) -> Self {
        let n = basis.len();
        QWComplex { basis, d: QMatrix::zeros(n, n) }
    }

    pub fn zero() -> Self {
        QWComplex::graded(Vec::new())
    }

    /// Q[W] in one degree.
    pub fn regular(degree: i64) -> Self {
        QWComplex::graded(vec![(degree, 1), (degree, -1)])
    }

    /// A trivial-action complex with the given (degree, dimension) pairs.
    pub fn trivial(dims: &[(i64, usize)]) -> Self {
        QWComplex::graded(dims.iter().flat_map(|&(e, n)| std::iter::repeat((e, 1)).take(n)).collect())
    }

    pub fn basis(&self) -> &SignedBasis {
        &self.basis
    }

    pub fn d(&self) -> &QMatrix {
        &self.d
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_trivial_action(&self) -> bool {
        self.basis.iter().all(|b| b.1 > 0)
    }

    pub fn dim_at(&self, deg: i64) -> usize {
        self.basis.iter().filter(|b| b.0 == deg).count()
    }

    /// Indices of the W-fixed basis vectors.
    pub fn fixed_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.basis[i].1 > 0).collect()
    }

    /// The W-fixed subcomplex.
    pub fn fixed_part(&self) -> QWComplex {
        let idx = self.fixed_indices();
        QWComplex { basis: idx.iter().map(|&i| self.basis[i]).collect(), d: self.d.select_rows(&idx).select_columns(&idx) }
    }

    pub fn direct_sum(&self, other: &QWComplex) -> QWComplex {
        let mut basis = self.basis.clone();
        basis.extend(other.basis.iter().copied());
        QWComplex { basis, d: self.d.block_diag(&other.d) }
    }

    /// Shifts degrees up by n; the differential picks up the sign (-1)^n.
    pub fn suspend(&self, n: i64) -> QWComplex {
        let sign = if n.rem_euclid(2) == 0 { q(1) } else { q(-1) };
        QWComplex { basis: self.basis.iter().map(|&(e, s)| (e + n, s)).collect(), d: self.d.scale(&sign) }
    }

    /// Homology with zero differential, and the data to read classes.
    pub fn homology(&self) -> Result<(QWComplex, VHomology)> {
        let h = VHomology::of(&self.basis, &self.d)?;
        Ok((QWComplex::graded(h.basis.clone()), h))
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("basis".into(), json!(self.basis.iter().map(|&(e, s)| json!([e, s])).collect::<Vec<_>>()));
        if !self.d.is_zero() {
            m.insert("d".into(), matrix_to_json(&self.d));
        }
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let basis = signed_basis_from_json(get(v, "basis")?)?;
        let n = basis.len();
        match v.get("d") {
            Some(d) => QWComplex::new(basis, matrix_from_json(d, n, n)?),
            None => Ok(QWComplex::graded(basis)),
        }
    }
}

/// Entries of `f` must join basis vectors of equal sign with degrees
/// differing by `n`.
fn check_homogeneous(src: &SignedBasis, tgt: &SignedBasis, f: &QMatrix, n: i64) -> Result<()> {
    if f.rows() != tgt.len() || f.cols() != src.len() {
        return Err(Error::InvalidMorphism("map has the wrong size".into()));
    }
    for r in 0..f.rows() {
        for c in 0..f.cols() {
            if !f.get(r, c).is_zero() && (tgt[r].0 != src[c].0 + n || tgt[r].1 != src[c].1) {
                return Err(Error::InvalidMorphism(format!("entry ({r},{c}) is not homogeneous")));
            }
        }
    }
    Ok(())
}

fn chain_sign(n: i64) -> Rational {
    if n.rem_euclid(2) == 0 {
        q(1)
    } else {
        q(-1)
    }
}

/// Validates a degree-n chain map of Q[W]-complexes.
pub fn check_chain_map(src: &QWComplex, tgt: &QWComplex, f: &QMatrix, n: i64) -> Result<()> {
    check_homogeneous(&src.basis, &tgt.basis, f, n)?;
    if tgt.d.mul(f) != f.mul(&src.d).scale(&chain_sign(n)) {
        return Err(Error::InvalidMorphism("not a chain map".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DihedralObject {
    inf: QWComplex,
    explicit: BTreeMap<u32, QWComplex>,
    tail: QWComplex,
    germ: QMatrix,
}

fn check_index(k: u32) -> Result<()> {
    if k <= 2 {
        return Err(Error::BadIndex(format!("dihedral indices start at 3, got {k}")));
    }
    Ok(())
}

impl DihedralObject {
    pub fn new(inf: QWComplex, explicit: BTreeMap<u32, QWComplex>, tail: QWComplex, germ: QMatrix) -> Result<Self> {
        for &k in explicit.keys() {
            check_index(k)?;
        }
        if !inf.is_trivial_action() {
            return Err(Error::Schema("W must act trivially on the complex at infinity".into()));
        }
        check_chain_map(&inf, &tail, &germ, 0).map_err(|e| Error::InvalidMorphism(format!("germ map: {e}")))?;
        Ok(DihedralObject { inf, explicit, tail, germ })
    }

    pub fn zero() -> Self {
        DihedralObject { inf: QWComplex::zero(), explicit: BTreeMap::new(), tail: QWComplex::zero(), germ: QMatrix::zeros(0, 0) }
    }

    pub fn inf(&self) -> &QWComplex {
        &self.inf
    }

    pub fn explicit(&self) -> &BTreeMap<u32, QWComplex> {
        &self.explicit
    }

    pub fn tail(&self) -> &QWComplex {
        &self.tail
    }

    pub fn germ(&self) -> &QMatrix {
        &self.germ
    }

    pub fn at(&self, k: u32) -> &QWComplex {
        self.explicit.get(&k).unwrap_or(&self.tail)
    }

    pub fn indices(&self) -> Vec<u32> {
        self.explicit.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.inf.is_empty() && self.tail.is_empty() && self.explicit.values().all(|c| c.is_empty())
    }

    /// Makes index k explicit without changing the object.
    pub fn with_explicit(&self, k: u32) -> Result<DihedralObject> {
        check_index(k)?;
        let mut out = self.clone();
        out.explicit.entry(k).or_insert_with(|| self.tail.clone());
        Ok(out)
    }

    pub fn direct_sum(&self, other: &DihedralObject) -> Result<DihedralObject> {
        let keys: BTreeSet<u32> = self.explicit.keys().chain(other.explicit.keys()).copied().collect();
        let explicit = keys.into_iter().map(|k| (k, self.at(k).direct_sum(other.at(k)))).collect();
        DihedralObject::new(
            self.inf.direct_sum(&other.inf),
            explicit,
            self.tail.direct_sum(&other.tail),
            self.germ.block_diag(&other.germ),
        )
    }

    pub fn suspend(&self, n: i64) -> Result<DihedralObject> {
        DihedralObject::new(
            self.inf.suspend(n),
            self.explicit.iter().map(|(&k, c)| (k, c.suspend(n))).collect(),
            self.tail.suspend(n),
            self.germ.clone(),
        )
    }

    pub fn to_json(&self) -> Value {
        let explicit: Map<String, Value> = self.explicit.iter().map(|(k, c)| (k.to_string(), c.to_json())).collect();
        json!({
            "M_inf": self.inf.to_json(),
            "slots": {"explicit": explicit, "tail": self.tail.to_json()},
            "germ": {"tail": matrix_to_json(&self.germ)},
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let inf = QWComplex::from_json(get(v, "M_inf")?)?;
        let slots = get(v, "slots")?;
        let tail = QWComplex::from_json(get(slots, "tail")?)?;
        let mut explicit = BTreeMap::new();
        if let Some(e) = slots.get("explicit") {
            for (k, c) in as_object(e)? {
                let k = parse_key_i64(k)?;
                if k < 0 {
                    return Err(Error::BadIndex(format!("negative index {k}")));
                }
                explicit.insert(k as u32, QWComplex::from_json(c)?);
            }
        }
        let germ = match v.get("germ") {
            Some(g) => matrix_from_json(get(g, "tail")?, tail.len(), inf.len())?,
            None => QMatrix::zeros(tail.len(), inf.len()),
        };
        DihedralObject::new(inf, explicit, tail, germ)
    }
}

/// A degree-n map: at infinity, at every index explicit in either object,
/// and on the tails.
#[derive(Clone, Debug, PartialEq)]
pub struct DihedralMap {
    source: DihedralObject,
    target: DihedralObject,
    degree: i64,
    inf: QMatrix,
    slots: BTreeMap<u32, QMatrix>,
    tail: QMatrix,
}

fn joint_indices(a: &DihedralObject, b: &DihedralObject) -> Vec<u32> {
    let s: BTreeSet<u32> = a.explicit.keys().chain(b.explicit.keys()).copied().collect();
    s.into_iter().collect()
}

impl DihedralMap {
    /// Missing indices default to the tail map when both sides are tails there.
    pub fn new(
        source: &DihedralObject,
        target: &DihedralObject,
        degree: i64,
        inf: QMatrix,
        mut slots: BTreeMap<u32, QMatrix>,
        tail: QMatrix,
    ) -> Result<Self> {
        for k in joint_indices(source, target) {
            if !slots.contains_key(&k) {
                let m = if !source.explicit.contains_key(&k) && !target.explicit.contains_key(&k) {
                    tail.clone()
                } else if source.at(k) == source.tail() && target.at(k) == target.tail() {
                    tail.clone()
                } else {
                    QMatrix::zeros(target.at(k).len(), source.at(k).len())
                };
                slots.insert(k, m);
            }
        }
        if let Some(k) = slots.keys().find(|k| !source.explicit.contains_key(k) && !target.explicit.contains_key(k)) {
            return Err(Error::InvalidMorphism(format!("map given at index {k} which is explicit in neither object")));
        }
        check_chain_map(&source.inf, &target.inf, &inf, degree)?;
        for (&k, f) in &slots {
            check_chain_map(source.at(k), target.at(k), f, degree)
                .map_err(|e| Error::InvalidMorphism(format!("index {k}: {e}")))?;
        }
        check_chain_map(&source.tail, &target.tail, &tail, degree)?;
        if tail.mul(&source.germ) != target.germ.mul(&inf) {
            return Err(Error::InvalidMorphism("map does not commute with the germ maps".into()));
        }
        Ok(DihedralMap { source: source.clone(), target: target.clone(), degree, inf, slots, tail })
    }

    pub fn identity(m: &DihedralObject) -> Self {
        DihedralMap {
            source: m.clone(),
            target: m.clone(),
            degree: 0,
            inf: QMatrix::identity(m.inf.len()),
            slots: m.explicit.iter().map(|(&k, c)| (k, QMatrix::identity(c.len()))).collect(),
            tail: QMatrix::identity(m.tail.len()),
        }
    }

    pub fn zero(m: &DihedralObject, n: &DihedralObject, degree: i64) -> Result<Self> {
        let slots = joint_indices(m, n).into_iter().map(|k| (k, QMatrix::zeros(n.at(k).len(), m.at(k).len()))).collect();
        DihedralMap::new(
            m,
            n,
            degree,
            QMatrix::zeros(n.inf.len(), m.inf.len()),
            slots,
            QMatrix::zeros(n.tail.len(), m.tail.len()),
        )
    }

    pub fn source(&self) -> &DihedralObject {
        &self.source
    }

    pub fn target(&self) -> &DihedralObject {
        &self.target
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn inf(&self) -> &QMatrix {
        &self.inf
    }

    pub fn tail(&self) -> &QMatrix {
        &self.tail
    }

    pub fn at(&self, k: u32) -> &QMatrix {
        self.slots.get(&k).unwrap_or(&self.tail)
    }

    pub fn indices(&self) -> Vec<u32> {
        self.slots.keys().copied().collect()
    }

    pub fn compose(&self, f: &DihedralMap) -> Result<DihedralMap> {
        if f.target != self.source {
            return Err(Error::InvalidMorphism("composable maps must share the middle object".into()));
        }
        let keys: BTreeSet<u32> = self.slots.keys().chain(f.slots.keys()).copied().collect();
        let slots = keys
            .into_iter()
            .filter(|k| f.source.explicit.contains_key(k) || self.target.explicit.contains_key(k))
            .map(|k| (k, self.at(k).mul(f.at(k))))
            .collect();
        DihedralMap::new(&f.source, &self.target, self.degree + f.degree, self.inf.mul(&f.inf), slots, self.tail.mul(&f.tail))
    }

    /// Pairs (position name, source complex, target complex, matrix) over
    /// infinity, every joint index and the tail.
    fn levels(&self) -> Vec<(String, &QWComplex, &QWComplex, &QMatrix)> {
        let mut out = vec![("inf".to_string(), &self.source.inf, &self.target.inf, &self.inf)];
        for (&k, f) in &self.slots {
            out.push((k.to_string(), self.source.at(k), self.target.at(k), f));
        }
        out.push(("tail".to_string(), &self.source.tail, &self.target.tail, &self.tail));
        out
    }

    /// Homology isomorphism at infinity, at every joint index and on the tail.
    pub fn is_weak_equivalence(&self) -> Result<bool> {
        for (_, a, b, f) in self.levels() {
            if !is_quasi_iso(a, b, f, self.degree)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Levelwise surjectivity.
    pub fn is_fibration(&self) -> bool {
        self.levels().into_iter().all(|(_, _, b, f)| f.rank() == b.len())
    }
}

/// Whether a chain map of Q[W]-complexes induces an isomorphism on homology.
pub fn is_quasi_iso(a: &QWComplex, b: &QWComplex, f: &QMatrix, degree: i64) -> Result<bool> {
    let ha = VHomology::of(&a.basis, &a.d)?;
    let hb = VHomology::of(&b.basis, &b.d)?;
    if ha.basis.len() != hb.basis.len() {
        return Ok(false);
    }
    let ind = ha.induced(f, degree, &hb)?;
    Ok(ind.rows() == ind.cols() && (ind.rows() == 0 || ind.is_invertible()))
}

/// Levelwise homology with the induced germ map.
pub fn homology_ch(m: &DihedralObject) -> Result<DihedralObject> {
    let (hinf, vinf) = m.inf.homology()?;
    let (htail, vtail) = m.tail.homology()?;
    let germ = vinf.induced(&m.germ, 0, &vtail)?;
    let mut explicit = BTreeMap::new();
    for (&k, c) in &m.explicit {
        explicit.insert(k, c.homology()?.0);
    }
    DihedralObject::new(hinf, explicit, htail, germ)
}

/// Mapping cone of a degree-0 map f: M -> N, namely N + Sigma M.
pub fn cone(f: &DihedralMap) -> Result<DihedralObject> {
    if f.degree != 0 {
        return Err(Error::InvalidMorphism("cones are taken of degree-0 maps".into()));
    }
    let level = |src: &QWComplex, tgt: &QWComplex, g: &QMatrix| -> Result<QWComplex> {
        let sm = src.suspend(1);
        let mut basis = tgt.basis.clone();
        basis.extend(sm.basis.iter().copied());
        let mut d = tgt.d.block_diag(&sm.d);
        d.set_block(0, tgt.len(), g);
        QWComplex::new(basis, d)
    };
    let (m, n) = (&f.source, &f.target);
    let inf = level(&m.inf, &n.inf, &f.inf)?;
    let tail = level(&m.tail, &n.tail, &f.tail)?;
    let mut explicit = BTreeMap::new();
    for k in joint_indices(m, n) {
        explicit.insert(k, level(m.at(k), n.at(k), f.at(k))?);
    }
    let germ = n.germ.block_diag(&m.germ);
    DihedralObject::new(inf, explicit, tail, germ)
}

/// i_k: the complex placed at index k, zero elsewhere.
pub fn functor_i(x: &QWComplex, k: u32) -> Result<DihedralObject> {
    check_index(k)?;
    DihedralObject::new(QWComplex::zero(), [(k, x.clone())].into(), QWComplex::zero(), QMatrix::zeros(0, 0))
}

/// p_k: the complex at index k.
pub fn functor_p(m: &DihedralObject, k: u32) -> Result<QWComplex> {
    check_index(k)?;
    Ok(m.at(k).clone())
}

/// c: the constant sequence with the diagonal germ map.
pub fn functor_const(a: &QWComplex) -> Result<DihedralObject> {
    if !a.is_trivial_action() {
        return Err(Error::Schema("the constant functor takes complexes of Q-modules".into()));
    }
    DihedralObject::new(a.clone(), BTreeMap::new(), a.clone(), QMatrix::identity(a.len()))
}

pub fn functor_i_map(x: &QWComplex, y: &QWComplex, f: &QMatrix, degree: i64, k: u32) -> Result<DihedralMap> {
    let (ix, iy) = (functor_i(x, k)?, functor_i(y, k)?);
    DihedralMap::new(&ix, &iy, degree, QMatrix::zeros(0, 0), [(k, f.clone())].into(), QMatrix::zeros(0, 0))
}

pub fn functor_p_map(f: &DihedralMap, k: u32) -> Result<QMatrix> {
    check_index(k)?;
    Ok(f.at(k).clone())
}

pub fn functor_const_map(a: &QWComplex, b: &QWComplex, f: &QMatrix, degree: i64) -> Result<DihedralMap> {
    let (ca, cb) = (functor_const(a)?, functor_const(b)?);
    DihedralMap::new(&ca, &cb, degree, f.clone(), BTreeMap::new(), f.clone())
}

/// The right adjoint of c: pairs (m, x) of an element at infinity and a
/// W-fixed sequence whose germ is the image of m. At indices that are not
/// explicit the sequence is forced to be the germ image, so the result is
/// the complex at infinity plus the fixed points at each explicit index.
pub fn germ_fixed_points(m: &DihedralObject) -> QWComplex {
    let mut out = m.inf.clone();
    for c in m.explicit.values() {
        out = out.direct_sum(&c.fixed_part());
    }
    out
}

/// Offsets of the explicit blocks inside germ_fixed_points.
fn gfp_offsets(m: &DihedralObject) -> BTreeMap<u32, usize> {
    let mut off = m.inf.len();
    let mut out = BTreeMap::new();
    for (&k, c) in &m.explicit {
        out.insert(k, off);
        off += c.fixed_indices().len();
    }
    out
}

/// The value at index k of the sequence encoded by an element of the
/// fixed-point complex, as a matrix from that complex to M_k.
fn gfp_component(m: &DihedralObject, k: Option<u32>) -> QMatrix {
    let g = germ_fixed_points(m);
    match k.filter(|k| m.explicit.contains_key(k)) {
        Some(k) => {
            let c = &m.explicit[&k];
            let off = gfp_offsets(m)[&k];
            let mut out = QMatrix::zeros(c.len(), g.len());
            for (j, &i) in c.fixed_indices().iter().enumerate() {
                out.set(i, off + j, q(1));
            }
            out
        }
        None => m.germ.mul(&QMatrix::identity(m.inf.len()).hstack(&QMatrix::zeros(m.inf.len(), g.len() - m.inf.len()))),
    }
}

fn gfp_project_inf(m: &DihedralObject) -> QMatrix {
    let g = germ_fixed_points(m);
    QMatrix::identity(m.inf.len()).hstack(&QMatrix::zeros(m.inf.len(), g.len() - m.inf.len()))
}

/// The fixed-point functor on maps.
pub fn germ_fixed_points_map(f: &DihedralMap) -> Result<QMatrix> {
    let (m, n) = (&f.source, &f.target);
    let gm = germ_fixed_points(m);
    let gn = germ_fixed_points(n);
    let mut out = QMatrix::zeros(gn.len(), gm.len());
    out.set_block(0, 0, &f.inf.mul(&gfp_project_inf(m)));
    let offs = gfp_offsets(n);
    for (&k, c) in &n.explicit {
        let val = f.at(k).mul(&gfp_component(m, Some(k)));
        let fixed = c.fixed_indices();
        out.set_block(offs[&k], 0, &val.select_rows(&fixed));
    }
    check_chain_map(&gm, &gn, &out, f.degree)?;
    Ok(out)
}

/// Unit A -> fixed points of c(A), the identity.
pub fn const_unit(a: &QWComplex) -> QMatrix {
    QMatrix::identity(a.len())
}

/// Counit c(fixed points of M) -> M.
pub fn const_counit(m: &DihedralObject) -> Result<DihedralMap> {
    let g = germ_fixed_points(m);
    let cg = functor_const(&g)?;
    let slots = m.explicit.keys().map(|&k| (k, gfp_component(m, Some(k)))).collect();
    DihedralMap::new(&cg, m, 0, gfp_project_inf(m), slots, gfp_component(m, None))
}

/// Counit i_k p_k M -> M: the identity at k.
pub fn ip_counit(m: &DihedralObject, k: u32) -> Result<DihedralMap> {
    let x = functor_p(m, k)?;
    let ix = functor_i(&x, k)?;
    let m = m.with_explicit(k)?;
    let slots = m.explicit.keys().map(|&j| (j, if j == k { QMatrix::identity(x.len()) } else { QMatrix::zeros(m.at(j).len(), 0) })).collect();
    DihedralMap::new(&ix, &m, 0, QMatrix::zeros(m.inf.len(), 0), slots, QMatrix::zeros(m.tail.len(), 0))
}

/// Unit M -> i_k p_k M: the identity at k.
pub fn pi_unit(m: &DihedralObject, k: u32) -> Result<DihedralMap> {
    let x = functor_p(m, k)?;
    let ix = functor_i(&x, k)?;
    let m = m.with_explicit(k)?;
    let slots = m.explicit.keys().map(|&j| (j, if j == k { QMatrix::identity(x.len()) } else { QMatrix::zeros(0, m.at(j).len()) })).collect();
    DihedralMap::new(&m, &ix, 0, QMatrix::zeros(0, m.inf.len()), slots, QMatrix::zeros(0, m.tail.len()))
}

/// Dimension of the space of degree-n chain maps M -> N that are arbitrary
/// at the joint explicit indices and given by one tail map elsewhere. With
/// both tails nonzero the full space is infinite dimensional, so the count
/// depends on the explicit indices; pad both sides to compare objects.
pub fn hom_dim(m: &DihedralObject, n: &DihedralObject, degree: i64) -> usize {
    // Unknowns: homogeneous entries of each level map.
    let mut levels: Vec<(&QWComplex, &QWComplex)> = vec![(&m.inf, &n.inf)];
    for k in joint_indices(m, n) {
        levels.push((m.at(k), n.at(k)));
    }
    levels.push((&m.tail, &n.tail));
    let mut var: Vec<BTreeMap<(usize, usize), usize>> = Vec::new();
    let mut count = 0;
    for (a, b) in &levels {
        let mut v = BTreeMap::new();
        for r in 0..b.len() {
            for c in 0..a.len() {
                if b.basis[r].0 == a.basis[c].0 + degree && b.basis[r].1 == a.basis[c].1 {
                    v.insert((r, c), count);
                    count += 1;
                }
            }
        }
        var.push(v);
    }
    if count == 0 {
        return 0;
    }
    let sign = chain_sign(degree);
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (li, (a, b)) in levels.iter().enumerate() {
        // d_b f - sign f d_a = 0
        for r in 0..b.len() {
            for c in 0..a.len() {
                let mut row = vec![Rational::zero(); count];
                for j in 0..b.len() {
                    if let Some(&x) = var[li].get(&(j, c)) {
                        row[x] += b.d.get(r, j);
                    }
                }
                for j in 0..a.len() {
                    if let Some(&x) = var[li].get(&(r, j)) {
                        row[x] -= &sign * a.d.get(j, c);
                    }
                }
                if row.iter().any(|v| !v.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    // f_tail germ_m - germ_n f_inf = 0
    let (li_tail, li_inf) = (levels.len() - 1, 0);
    for r in 0..n.tail.len() {
        for c in 0..m.inf.len() {
            let mut row = vec![Rational::zero(); count];
            for j in 0..m.tail.len() {
                if let Some(&x) = var[li_tail].get(&(r, j)) {
                    row[x] += m.germ.get(j, c);
                }
            }
            for j in 0..n.inf.len() {
                if let Some(&x) = var[li_inf].get(&(j, c)) {
                    row[x] -= n.germ.get(r, j);
                }
            }
            if row.iter().any(|v| !v.is_zero()) {
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return count;
    }
    count - QMatrix::from_rows(rows).rank()
}

/// Generators: i_k Q[W] for k >= 3 and c(Q), in degree 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DihedralGenerator {
    Slot(u32),
    Const,
}

pub fn make_generator_dihedral(g: DihedralGenerator) -> Result<DihedralObject> {
    match g {
        DihedralGenerator::Slot(k) => functor_i(&QWComplex::regular(0), k),
        DihedralGenerator::Const => functor_const(&QWComplex::trivial(&[(0, 1)])),
    }
}

/// Random finite objects for property tests.
pub mod random {
    use super::*;
    use rand::Rng;

    /// A random complex with degrees in [lo, hi]: a graded space plus a
    /// differential built from random equivariant maps d_e with d^2 = 0.
    pub fn random_complex<R: Rng>(rng: &mut R, lo: i64, hi: i64, max_dim: usize, trivial: bool) -> QWComplex {
        let mut basis = Vec::new();
        for e in lo..=hi {
            for _ in 0..rng.gen_range(0..=max_dim) {
                basis.push((e, if trivial || rng.gen_bool(0.5) { 1 } else { -1 }));
            }
        }
        basis.sort();
        let n = basis.len();
        // d = B A with A: C -> Z (projection onto chosen cycles' complement)
        // built degree by degree: d_e = random map with image inside the
        // kernel of d_{e-1}.
        let mut d = QMatrix::zeros(n, n);
        for e in (lo + 1)..=hi {
            for s in [1i8, -1] {
                let src: Vec<usize> = (0..n).filter(|&i| basis[i] == (e, s)).collect();
                let tgt: Vec<usize> = (0..n).filter(|&i| basis[i] == (e - 1, s)).collect();
                if src.is_empty() || tgt.is_empty() {
                    continue;
                }
                let below: Vec<usize> = (0..n).filter(|&i| basis[i] == (e - 2, s)).collect();
                let prev = d.select_rows(&below).select_columns(&tgt);
                let z = if below.is_empty() { QMatrix::identity(tgt.len()) } else { prev.kernel_basis() };
                if z.cols() == 0 {
                    continue;
                }
                let coeffs = QMatrix::from_rows(
                    (0..z.cols()).map(|_| (0..src.len()).map(|_| q(rng.gen_range(-2..=2))).collect()).collect(),
                );
                let block = z.mul(&coeffs);
                for (a, &r) in tgt.iter().enumerate() {
                    for (b, &c) in src.iter().enumerate() {
                        d.set(r, c, block.get(a, b).clone());
                    }
                }
            }
        }
        QWComplex::new(basis, d).expect("random differential squares to zero")
    }

    /// A random object: random complexes, a few explicit indices and a germ
    /// map that is a random chain map into the fixed part of the tail.
    pub fn random_dihedral<R: Rng>(rng: &mut R, lo: i64, hi: i64, max_dim: usize) -> DihedralObject {
        let inf = random_complex(rng, lo, hi, max_dim, true);
        let tail = random_complex(rng, lo, hi, max_dim, false);
        let mut explicit = BTreeMap::new();
        for _ in 0..rng.gen_range(0..=3) {
            explicit.insert(rng.gen_range(3..=8), random_complex(rng, lo, hi, max_dim, false));
        }
        let germ = random_chain_map(rng, &inf, &tail);
        DihedralObject::new(inf, explicit, tail, germ).expect("random object is valid")
    }

    /// A random degree-0 chain map, as a combination of a basis of the
    /// solution space of the chain-map equations.
    pub fn random_chain_map<R: Rng>(rng: &mut R, a: &QWComplex, b: &QWComplex) -> QMatrix {
        let mut pos = Vec::new();
        for r in 0..b.len() {
            for c in 0..a.len() {
                if b.basis[r] == a.basis[c] {
                    pos.push((r, c));
                }
            }
        }
        let mut out = QMatrix::zeros(b.len(), a.len());
        if pos.is_empty() {
            return out;
        }
        let mut rows = Vec::new();
        for r in 0..b.len() {
            for c in 0..a.len() {
                let mut row = vec![Rational::zero(); pos.len()];
                for (x, &(i, j)) in pos.iter().enumerate() {
                    if j == c {
                        row[x] += b.d.get(r, i);
                    }
                    if i == r {
                        row[x] -= a.d.get(j, c);
                    }
                }
                rows.push(row);
            }
        }
        let k = QMatrix::from_rows(rows).kernel_basis();
        for col in 0..k.cols() {
            let w = q(rng.gen_range(-2..=2));
            for (x, &(i, j)) in pos.iter().enumerate() {
                out.add_at(i, j, &(&w * k.get(x, col)));
            }
        }
        out
    }
}
