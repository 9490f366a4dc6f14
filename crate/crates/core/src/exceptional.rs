//! Chain complexes of modules over the group algebras of the Weyl groups of
//! the isolated subgroups, with the diagonal tensor product, the
//! conjugation internal hom and homology.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::burnside::Exceptional;
use crate::error::{Error, Result};
use crate::json::{as_i64, as_object, get, matrix_from_json, matrix_to_json, parse_key_i64};
use crate::linalg::{q, QMatrix};

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupAlg {
    table: Vec<Vec<usize>>,
    identity: usize,
}

impl FiniteGroupAlg {
    pub fn new(table: Vec<Vec<usize>>, identity: usize) -> Result<Self> {
        let n = table.len();
        let bad = |m: &str| Err(Error::Schema(format!("not a group table: {m}")));
        if n == 0 || identity >= n || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return bad("shape");
        }
        for a in 0..n {
            if table[identity][a] != a || table[a][identity] != a {
                return bad("identity");
            }
            if !(0..n).any(|b| table[a][b] == identity && table[b][a] == identity) {
                return bad("inverses");
            }
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad("associativity");
                    }
                }
            }
        }
        Ok(FiniteGroupAlg { table, identity })
    }

    pub fn trivial() -> Self {
        FiniteGroupAlg { table: vec![vec![0]], identity: 0 }
    }

    pub fn cyclic(n: usize) -> Self {
        FiniteGroupAlg { table: (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect(), identity: 0 }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.table[a][b] == self.identity).expect("group")
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.table[x][a];
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.table[a][b] == self.table[b][a]))
    }

    pub fn to_json(&self) -> Value {
        json!({"table": self.table, "identity": self.identity})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let rows = get(v, "table")?.as_array().ok_or_else(|| Error::Schema("table must be a list".into()))?;
        let mut table = Vec::new();
        for r in rows {
            let r = r.as_array().ok_or_else(|| Error::Schema("table row must be a list".into()))?;
            table.push(r.iter().map(|x| as_i64(x).map(|x| x as usize)).collect::<Result<Vec<_>>>()?);
        }
        let identity = match v.get("identity") {
            Some(i) => as_i64(i)? as usize,
            None => 0,
        };
        FiniteGroupAlg::new(table, identity)
    }
}

/// Permutations of {0,1,2,3}, composed as functions: (p q)(i) = p(q(i)).
fn sym4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    p.iter().for_each(|&x| seen[x] = true);
                    if seen.iter().all(|&s| s) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn compose(p: &[usize; 4], r: &[usize; 4]) -> [usize; 4] {
    [p[r[0]], p[r[1]], p[r[2]], p[r[3]]]
}

fn is_even(p: &[usize; 4]) -> bool {
    let mut inv = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 0
}

/// Quotient of the symmetric group on four letters by a normal subgroup,
/// as a multiplication table on cosets ordered by first appearance.
fn sym4_quotient(normal: &[[usize; 4]]) -> FiniteGroupAlg {
    let g = sym4();
    let mut cosets: Vec<Vec<[usize; 4]>> = Vec::new();
    let coset_of = |p: &[usize; 4], cosets: &Vec<Vec<[usize; 4]>>| cosets.iter().position(|c| c.contains(p));
    for p in &g {
        if coset_of(p, &cosets).is_none() {
            let mut c: Vec<[usize; 4]> = normal.iter().map(|n| compose(p, n)).collect();
            c.sort();
            cosets.push(c);
        }
    }
    let n = cosets.len();
    let table = (0..n)
        .map(|a| (0..n).map(|b| coset_of(&compose(&cosets[a][0], &cosets[b][0]), &cosets).expect("closed")).collect())
        .collect();
    let identity = coset_of(&[0, 1, 2, 3], &cosets).expect("identity");
    FiniteGroupAlg::new(table, identity).expect("quotient of a group by a normal subgroup")
}

/// The Weyl group of an isolated subgroup: trivial for the self-normalizing
/// SO(3), Sigma4 and A5; Sigma4/A4 for A4; Sigma4/D4 for D4 (D4 the normal
/// Klein four-group).
pub fn weyl_group_of(h: Exceptional) -> FiniteGroupAlg {
    match h {
        Exceptional::SO3 | Exceptional::Sigma4 | Exceptional::A5 => FiniteGroupAlg::trivial(),
        Exceptional::A4 => sym4_quotient(&sym4().into_iter().filter(is_even).collect::<Vec<_>>()),
        Exceptional::D4 => sym4_quotient(&[[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]),
    }
}

pub fn weyl_group_by_name(name: &str) -> Result<FiniteGroupAlg> {
    Exceptional::parse(name).map(weyl_group_of).map_err(|_| Error::BadClass(format!("{name:?} is not an isolated class")))
}

/// A representation: one matrix per group element.
#[derive(Clone, Debug, PartialEq)]
pub struct Rep {
    pub dim: usize,
    pub action: Vec<QMatrix>,
}

impl Rep {
    pub fn trivial(g: &FiniteGroupAlg, dim: usize) -> Self {
        Rep { dim, action: vec![QMatrix::identity(dim); g.order()] }
    }

    pub fn regular(g: &FiniteGroupAlg) -> Self {
        let n = g.order();
        let action = (0..n)
            .map(|a| {
                let mut m = QMatrix::zeros(n, n);
                for b in 0..n {
                    m.set(g.mul(a, b), b, q(1));
                }
                m
            })
            .collect();
        Rep { dim: n, action }
    }

    fn check(&self, g: &FiniteGroupAlg) -> Result<()> {
        if self.action.len() != g.order() || self.action.iter().any(|m| m.rows() != self.dim || m.cols() != self.dim) {
            return Err(Error::Schema("action matrices have the wrong shape".into()));
        }
        if self.action[g.identity()] != QMatrix::identity(self.dim) {
            return Err(Error::Schema("identity acts nontrivially".into()));
        }
        for a in 0..g.order() {
            for b in 0..g.order() {
                if self.action[a].mul(&self.action[b]) != self.action[g.mul(a, b)] {
                    return Err(Error::Schema(format!("action is not multiplicative at ({a},{b})")));
                }
            }
        }
        Ok(())
    }

    pub fn direct_sum(&self, other: &Rep) -> Rep {
        Rep { dim: self.dim + other.dim, action: self.action.iter().zip(&other.action).map(|(a, b)| a.block_diag(b)).collect() }
    }
}

/// Kronecker product, with (i,j) x (k,l) at row i*rows(b)+k, column j*cols(b)+l.
pub fn kron(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let mut out = QMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let x = a.get(i, j);
            if num_traits::Zero::is_zero(x) {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + k, j * b.cols() + l, x * b.get(k, l));
                }
            }
        }
    }
    out
}

/// A bounded chain complex of modules over a group algebra. `d[n]` maps
/// degree n to degree n-1.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupComplex {
    algebra: FiniteGroupAlg,
    modules: BTreeMap<i64, Rep>,
    d: BTreeMap<i64, QMatrix>,
}

impl GroupComplex {
    pub fn new(algebra: FiniteGroupAlg, modules: BTreeMap<i64, Rep>, d: BTreeMap<i64, QMatrix>) -> Result<Self> {
        let modules: BTreeMap<i64, Rep> = modules.into_iter().filter(|(_, r)| r.dim > 0).collect();
        for r in modules.values() {
            r.check(&algebra)?;
        }
        let x = GroupComplex { algebra, modules, d: BTreeMap::new() };
        let mut dd = BTreeMap::new();
        for (n, m) in d {
            let (src, tgt) = (x.dim_at(n), x.dim_at(n - 1));
            if m.rows() != tgt || m.cols() != src {
                return Err(Error::NotADifferential(format!("d in degree {n} has the wrong shape")));
            }
            if src > 0 && tgt > 0 && !m.is_zero() {
                dd.insert(n, m);
            }
        }
        let x = GroupComplex { d: dd, ..x };
        for (&n, m) in &x.d {
            for g in 0..x.algebra.order() {
                if m.mul(&x.action(n, g)) != x.action(n - 1, g).mul(m) {
                    return Err(Error::NotADifferential(format!("d in degree {n} is not equivariant")));
                }
            }
            if let Some(m2) = x.d.get(&(n - 1)) {
                if !m2.mul(m).is_zero() {
                    return Err(Error::NotADifferential(format!("d^2 is not zero at degree {n}")));
                }
            }
        }
        Ok(x)
    }

    /// Q in degree 0 with the trivial action.
    pub fn unit(algebra: &FiniteGroupAlg) -> Self {
        GroupComplex { algebra: algebra.clone(), modules: [(0, Rep::trivial(algebra, 1))].into(), d: BTreeMap::new() }
    }

    pub fn zero(algebra: &FiniteGroupAlg) -> Self {
        GroupComplex { algebra: algebra.clone(), modules: BTreeMap::new(), d: BTreeMap::new() }
    }

    pub fn algebra(&self) -> &FiniteGroupAlg {
        &self.algebra
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.modules.keys().copied().collect()
    }

    pub fn dim_at(&self, n: i64) -> usize {
        self.modules.get(&n).map_or(0, |r| r.dim)
    }

    pub fn total_dim(&self) -> usize {
        self.modules.values().map(|r| r.dim).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn action(&self, n: i64, g: usize) -> QMatrix {
        self.modules.get(&n).map_or(QMatrix::zeros(0, 0), |r| r.action[g].clone())
    }

    pub fn rep(&self, n: i64) -> Option<&Rep> {
        self.modules.get(&n)
    }

    pub fn d_at(&self, n: i64) -> QMatrix {
        self.d.get(&n).cloned().unwrap_or_else(|| QMatrix::zeros(self.dim_at(n - 1), self.dim_at(n)))
    }

    fn same_algebra(&self, other: &GroupComplex) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch("complexes over different group algebras".into()));
        }
        Ok(())
    }

    pub fn direct_sum(&self, other: &GroupComplex) -> Result<GroupComplex> {
        self.same_algebra(other)?;
        let mut degs = self.degrees();
        degs.extend(other.degrees());
        degs.sort();
        degs.dedup();
        let g = &self.algebra;
        let rep = |x: &GroupComplex, n: i64| x.modules.get(&n).cloned().unwrap_or_else(|| Rep::trivial(g, 0));
        let modules = degs.iter().map(|&n| (n, rep(self, n).direct_sum(&rep(other, n)))).collect();
        let d = degs.iter().map(|&n| (n, self.d_at(n).block_diag(&other.d_at(n)))).collect();
        GroupComplex::new(g.clone(), modules, d)
    }

    pub fn to_json(&self) -> Value {
        let modules: Map<String, Value> = self
            .modules
            .iter()
            .map(|(n, r)| (n.to_string(), json!({"dim": r.dim, "action": r.action.iter().map(matrix_to_json).collect::<Vec<_>>()})))
            .collect();
        let d: Map<String, Value> = self.d.iter().map(|(n, m)| (n.to_string(), matrix_to_json(m))).collect();
        json!({"group": self.algebra.to_json(), "modules": modules, "d": d})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let algebra = FiniteGroupAlg::from_json(get(v, "group")?)?;
        let mut modules = BTreeMap::new();
        for (k, m) in as_object(get(v, "modules")?)? {
            let n = parse_key_i64(k)?;
            let dim = as_i64(get(m, "dim")?)? as usize;
            let action = match m.get("action") {
                Some(a) => a
                    .as_array()
                    .ok_or_else(|| Error::Schema("action must be a list of matrices".into()))?
                    .iter()
                    .map(|x| matrix_from_json(x, dim, dim))
                    .collect::<Result<Vec<_>>>()?,
                None => Rep::trivial(&algebra, dim).action,
            };
            modules.insert(n, Rep { dim, action });
        }
        let mut d = BTreeMap::new();
        if let Some(dv) = v.get("d") {
            for (k, m) in as_object(dv)? {
                let n = parse_key_i64(k)?;
                let rows = modules.get(&(n - 1)).map_or(0, |r: &Rep| r.dim);
                let cols = modules.get(&n).map_or(0, |r: &Rep| r.dim);
                d.insert(n, matrix_from_json(m, rows, cols)?);
            }
        }
        GroupComplex::new(algebra, modules, d)
    }
}

fn koszul(p: i64) -> i64 {
    if p.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Offsets of the summands X_p (x) Y_q inside degree n of the tensor.
fn tensor_blocks(x: &GroupComplex, y: &GroupComplex, n: i64) -> Vec<(i64, i64, usize)> {
    let mut off = 0;
    let mut out = Vec::new();
    for &p in x.modules.keys() {
        let qd = n - p;
        if y.dim_at(qd) > 0 {
            out.push((p, qd, off));
            off += x.dim_at(p) * y.dim_at(qd);
        }
    }
    out
}

/// Total complex of X (x) Y over Q with the diagonal action and
/// d(x (x) y) = dx (x) y + (-1)^p x (x) dy.
pub fn tensor_diagonal(x: &GroupComplex, y: &GroupComplex) -> Result<GroupComplex> {
    x.same_algebra(y)?;
    let g = &x.algebra;
    let mut degs: Vec<i64> = x.degrees().iter().flat_map(|p| y.degrees().into_iter().map(move |q| p + q)).collect();
    degs.sort();
    degs.dedup();
    let mut modules = BTreeMap::new();
    let mut dims = BTreeMap::new();
    for &n in &degs {
        let blocks = tensor_blocks(x, y, n);
        let dim: usize = blocks.iter().map(|&(p, qd, _)| x.dim_at(p) * y.dim_at(qd)).sum();
        let action = (0..g.order())
            .map(|e| {
                let mut m = QMatrix::zeros(dim, dim);
                for &(p, qd, off) in &blocks {
                    m.set_block(off, off, &kron(&x.action(p, e), &y.action(qd, e)));
                }
                m
            })
            .collect();
        modules.insert(n, Rep { dim, action });
        dims.insert(n, dim);
    }
    let mut d = BTreeMap::new();
    for &n in &degs {
        let src = tensor_blocks(x, y, n);
        let tgt = tensor_blocks(x, y, n - 1);
        let mut m = QMatrix::zeros(dims.get(&(n - 1)).copied().unwrap_or(0), dims[&n]);
        for &(p, qd, so) in &src {
            for &(p2, q2, to) in &tgt {
                if p2 == p - 1 && q2 == qd {
                    m.set_block(to, so, &kron(&x.d_at(p), &QMatrix::identity(y.dim_at(qd))));
                }
                if p2 == p && q2 == qd - 1 {
                    m.set_block(to, so, &kron(&QMatrix::identity(x.dim_at(p)), &y.d_at(qd)).scale(&q(koszul(p))));
                }
            }
        }
        d.insert(n, m);
    }
    GroupComplex::new(g.clone(), modules, d)
}

/// Offsets of the summands Hom(X_p, Y_{p+n}) inside degree n of the hom complex.
fn hom_blocks(x: &GroupComplex, y: &GroupComplex, n: i64) -> Vec<(i64, usize)> {
    let mut off = 0;
    let mut out = Vec::new();
    for &p in x.modules.keys() {
        if y.dim_at(p + n) > 0 {
            out.push((p, off));
            off += x.dim_at(p) * y.dim_at(p + n);
        }
    }
    out
}

/// Internal hom with g.f = g f g^-1 and d(f) = d f - (-1)^n f d. A map
/// f: X_p -> Y_q is flattened row by row.
pub fn internal_hom_conj(x: &GroupComplex, y: &GroupComplex) -> Result<GroupComplex> {
    x.same_algebra(y)?;
    let g = &x.algebra;
    let mut degs: Vec<i64> = y.degrees().iter().flat_map(|q| x.degrees().into_iter().map(move |p| q - p)).collect();
    degs.sort();
    degs.dedup();
    let mut modules = BTreeMap::new();
    let mut dims = BTreeMap::new();
    for &n in &degs {
        let blocks = hom_blocks(x, y, n);
        let dim: usize = blocks.iter().map(|&(p, _)| x.dim_at(p) * y.dim_at(p + n)).sum();
        let action = (0..g.order())
            .map(|e| {
                let inv = g.inverse(e);
                let mut m = QMatrix::zeros(dim, dim);
                for &(p, off) in &blocks {
                    m.set_block(off, off, &kron(&y.action(p + n, e), &x.action(p, inv).transpose()));
                }
                m
            })
            .collect();
        modules.insert(n, Rep { dim, action });
        dims.insert(n, dim);
    }
    let mut d = BTreeMap::new();
    for &n in &degs {
        let src = hom_blocks(x, y, n);
        let tgt = hom_blocks(x, y, n - 1);
        let mut m = QMatrix::zeros(dims.get(&(n - 1)).copied().unwrap_or(0), dims[&n]);
        let sign = q(-koszul(n));
        for &(p, so) in &src {
            for &(p2, to) in &tgt {
                // d_Y f: Hom(X_p, Y_{p+n}) -> Hom(X_p, Y_{p+n-1})
                if p2 == p {
                    m.set_block(to, so, &kron(&y.d_at(p + n), &QMatrix::identity(x.dim_at(p))));
                }
                // f d_X: Hom(X_p, Y_{p+n}) -> Hom(X_{p+1}, Y_{p+n})
                if p2 == p + 1 {
                    let blk = kron(&QMatrix::identity(y.dim_at(p + n)), &x.d_at(p + 1).transpose()).scale(&sign);
                    m.set_block(to, so, &blk);
                }
            }
        }
        d.insert(n, m);
    }
    GroupComplex::new(g.clone(), modules, d)
}

/// Dimension of the W-fixed subspace of a representation.
pub fn fixed_dim(r: &Rep) -> usize {
    if r.dim == 0 {
        return 0;
    }
    let mut stacked = QMatrix::zeros(0, r.dim);
    for m in &r.action {
        stacked = stacked.vstack(&m.sub(&QMatrix::identity(r.dim)));
    }
    r.dim - stacked.rank()
}

/// Homology per degree: representatives of the chosen classes, as columns.
struct DegreeHomology {
    reps: QMatrix,
    boundaries: QMatrix,
}

impl DegreeHomology {
    fn class(&self, v: &[crate::linalg::Rational]) -> Result<Vec<crate::linalg::Rational>> {
        if self.reps.cols() == 0 {
            return Ok(Vec::new());
        }
        let full = self.reps.hstack(&self.boundaries);
        let x = full.solve_vec(v).ok_or_else(|| Error::NotADifferential("not a cycle".into()))?;
        Ok(x[..self.reps.cols()].to_vec())
    }
}

fn degree_homology(x: &GroupComplex, n: i64) -> DegreeHomology {
    let dim = x.dim_at(n);
    let z = if x.dim_at(n - 1) == 0 { QMatrix::identity(dim) } else { x.d_at(n).kernel_basis() };
    let b = if x.dim_at(n + 1) == 0 { QMatrix::zeros(dim, 0) } else { x.d_at(n + 1).image_basis() };
    let (_, piv) = b.hstack(&z).rref();
    let keep: Vec<usize> = piv.iter().filter(|&&p| p >= b.cols()).map(|&p| p - b.cols()).collect();
    DegreeHomology { reps: z.select_columns(&keep), boundaries: b }
}

/// Homology with zero differential and the induced action.
pub fn homology_w(x: &GroupComplex) -> Result<GroupComplex> {
    let mut modules = BTreeMap::new();
    for n in x.degrees() {
        let h = degree_homology(x, n);
        let dim = h.reps.cols();
        let mut action = Vec::new();
        for e in 0..x.algebra.order() {
            let img = x.action(n, e).mul(&h.reps);
            let cols: Vec<Vec<_>> = img.columns().iter().map(|c| h.class(c)).collect::<Result<_>>()?;
            action.push(QMatrix::from_columns(dim, &cols));
        }
        modules.insert(n, Rep { dim, action });
    }
    GroupComplex::new(x.algebra.clone(), modules, BTreeMap::new())
}

/// A degree-0 equivariant chain map.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupMap {
    source: GroupComplex,
    target: GroupComplex,
    maps: BTreeMap<i64, QMatrix>,
}

impl GroupMap {
    pub fn new(source: &GroupComplex, target: &GroupComplex, maps: BTreeMap<i64, QMatrix>) -> Result<Self> {
        source.same_algebra(target)?;
        let mut degs = source.degrees();
        degs.extend(target.degrees());
        degs.sort();
        degs.dedup();
        let f = GroupMap { source: source.clone(), target: target.clone(), maps };
        for &n in &degs {
            let m = f.at(n);
            if m.rows() != target.dim_at(n) || m.cols() != source.dim_at(n) {
                return Err(Error::InvalidMorphism(format!("map in degree {n} has the wrong shape")));
            }
            for e in 0..source.algebra.order() {
                if m.mul(&source.action(n, e)) != target.action(n, e).mul(&m) {
                    return Err(Error::InvalidMorphism(format!("map in degree {n} is not equivariant")));
                }
            }
            if target.d_at(n).mul(&m) != f.at(n - 1).mul(&source.d_at(n)) {
                return Err(Error::InvalidMorphism(format!("not a chain map at degree {n}")));
            }
        }
        Ok(f)
    }

    pub fn identity(x: &GroupComplex) -> Self {
        GroupMap { source: x.clone(), target: x.clone(), maps: x.modules.iter().map(|(&n, r)| (n, QMatrix::identity(r.dim))).collect() }
    }

    pub fn zero(x: &GroupComplex, y: &GroupComplex) -> Result<Self> {
        GroupMap::new(x, y, BTreeMap::new())
    }

    pub fn at(&self, n: i64) -> QMatrix {
        self.maps.get(&n).cloned().unwrap_or_else(|| QMatrix::zeros(self.target.dim_at(n), self.source.dim_at(n)))
    }

    pub fn source(&self) -> &GroupComplex {
        &self.source
    }

    pub fn target(&self) -> &GroupComplex {
        &self.target
    }

    fn all_degrees(&self) -> Vec<i64> {
        let mut degs = self.source.degrees();
        degs.extend(self.target.degrees());
        degs.sort();
        degs.dedup();
        degs
    }

    /// Homology isomorphism.
    pub fn is_weq(&self) -> Result<bool> {
        for n in self.all_degrees() {
            let hs = degree_homology(&self.source, n);
            let ht = degree_homology(&self.target, n);
            if hs.reps.cols() != ht.reps.cols() {
                return Ok(false);
            }
            if hs.reps.cols() == 0 {
                continue;
            }
            let img = self.at(n).mul(&hs.reps);
            let cols: Vec<Vec<_>> = img.columns().iter().map(|c| ht.class(c)).collect::<Result<_>>()?;
            if !QMatrix::from_columns(ht.reps.cols(), &cols).is_invertible() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Levelwise surjection.
    pub fn is_fib(&self) -> bool {
        self.all_degrees().into_iter().all(|n| self.at(n).rank() == self.target.dim_at(n))
    }
}

/// Dimension of the equivariant degree-0 graded maps X -> Y (differentials
/// ignored), by solving g f = f g directly.
pub fn equivariant_hom_dim(x: &GroupComplex, y: &GroupComplex) -> usize {
    let mut total = 0;
    for n in x.degrees() {
        let (a, b) = (x.dim_at(n), y.dim_at(n));
        if a == 0 || b == 0 {
            continue;
        }
        let mut stacked = QMatrix::zeros(0, a * b);
        for e in 0..x.algebra.order() {
            let lhs = kron(&y.action(n, e), &QMatrix::identity(a));
            let rhs = kron(&QMatrix::identity(b), &x.action(n, e).transpose());
            stacked = stacked.vstack(&lhs.sub(&rhs));
        }
        total += a * b - stacked.rank();
    }
    total
}

/// One complex per isolated class, each over that class's Weyl algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct ExceptionalProduct {
    components: BTreeMap<Exceptional, GroupComplex>,
}

pub fn product_assemble(components: BTreeMap<Exceptional, GroupComplex>) -> Result<ExceptionalProduct> {
    for h in Exceptional::ALL {
        let c = components.get(&h).ok_or_else(|| Error::WrongAlgebraForClass(format!("missing component {}", h.name())))?;
        if c.algebra != weyl_group_of(h) {
            return Err(Error::WrongAlgebraForClass(format!("component {} is not over its Weyl algebra", h.name())));
        }
    }
    if components.len() != Exceptional::ALL.len() {
        return Err(Error::WrongAlgebraForClass("unexpected extra component".into()));
    }
    Ok(ExceptionalProduct { components })
}

impl ExceptionalProduct {
    pub fn zero() -> Self {
        ExceptionalProduct { components: Exceptional::ALL.into_iter().map(|h| (h, GroupComplex::zero(&weyl_group_of(h)))).collect() }
    }

    pub fn project(&self, h: Exceptional) -> &GroupComplex {
        &self.components[&h]
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(GroupComplex::is_zero)
    }
}

/// Componentwise maps of assembled products.
pub struct ProductMap {
    pub components: BTreeMap<Exceptional, GroupMap>,
}

impl ProductMap {
    pub fn new(source: &ExceptionalProduct, target: &ExceptionalProduct, components: BTreeMap<Exceptional, GroupMap>) -> Result<Self> {
        for h in Exceptional::ALL {
            let f = components.get(&h).ok_or_else(|| Error::WrongAlgebraForClass(format!("missing component {}", h.name())))?;
            if f.source != source.components[&h] || f.target != target.components[&h] {
                return Err(Error::InvalidMorphism(format!("component {} has the wrong endpoints", h.name())));
            }
        }
        Ok(ProductMap { components })
    }

    pub fn is_weq(&self) -> Result<bool> {
        for f in self.components.values() {
            if !f.is_weq()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_fib(&self) -> bool {
        self.components.values().all(GroupMap::is_fib)
    }
}

/// Random complexes for property tests: representations built from the
/// regular and trivial modules and their sums, with differentials that are
/// random equivariant maps squaring to zero.
pub mod random {
    use super::*;
    use rand::Rng;

    fn random_rep<R: Rng>(rng: &mut R, g: &FiniteGroupAlg, max_copies: usize) -> Rep {
        let mut r = Rep::trivial(g, 0);
        for _ in 0..rng.gen_range(0..=max_copies) {
            let piece = if rng.gen_bool(0.5) { Rep::regular(g) } else { Rep::trivial(g, 1) };
            r = r.direct_sum(&piece);
        }
        r
    }

    /// Equivariant maps a -> b: a basis of solutions of g f = f g.
    fn equivariant_basis(a: &Rep, b: &Rep) -> Vec<QMatrix> {
        if a.dim == 0 || b.dim == 0 {
            return Vec::new();
        }
        let mut stacked = QMatrix::zeros(0, a.dim * b.dim);
        for (ga, gb) in a.action.iter().zip(&b.action) {
            stacked = stacked.vstack(&kron(gb, &QMatrix::identity(a.dim)).sub(&kron(&QMatrix::identity(b.dim), &ga.transpose())));
        }
        let k = stacked.kernel_basis();
        (0..k.cols())
            .map(|c| {
                let col = k.col(c);
                QMatrix::from_rows((0..b.dim).map(|i| col[i * a.dim..(i + 1) * a.dim].to_vec()).collect())
            })
            .collect()
    }

    pub fn random_group_complex<R: Rng>(rng: &mut R, g: &FiniteGroupAlg, lo: i64, hi: i64, max_copies: usize) -> GroupComplex {
        let modules: BTreeMap<i64, Rep> = (lo..=hi).map(|n| (n, random_rep(rng, g, max_copies))).collect();
        let mut d: BTreeMap<i64, QMatrix> = BTreeMap::new();
        for n in (lo + 1)..=hi {
            let (src, tgt) = (&modules[&n], &modules[&(n - 1)]);
            let mut m = QMatrix::zeros(tgt.dim, src.dim);
            for b in equivariant_basis(src, tgt) {
                m = m.add(&b.scale(&q(rng.gen_range(-2..=2))));
            }
            // Keep d^2 = 0 by projecting onto the kernel of the previous differential.
            if let Some(prev) = d.get(&(n - 1)) {
                if !prev.mul(&m).is_zero() {
                    m = QMatrix::zeros(tgt.dim, src.dim);
                }
            }
            d.insert(n, m);
        }
        GroupComplex::new(g.clone(), modules, d).expect("random complex is valid")
    }
}
