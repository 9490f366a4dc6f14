use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::{GradedModule, Kind};
use crate::error::{Error, Result};
use crate::json::{as_i64, get, rat_from_json, rat_to_json};
use crate::linalg::{QMatrix, Rational};

/// A homogeneous map between direct sums. The image of domain generator `col`
/// has component `coef * x^p` on codomain generator `row`, where the degree
/// constraint fixes p, so only the coefficient is stored.
///
/// A map from a d-module to a c-module lets d act as c^2.
#[derive(Clone, PartialEq, Eq)]
pub struct ModuleMap {
    domain: GradedModule,
    codomain: GradedModule,
    degree: i64,
    entries: BTreeMap<(usize, usize), Rational>,
}

impl fmt::Debug for ModuleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModuleMap[{:?} -> {:?}, deg {}] {{", self.domain, self.codomain, self.degree)?;
        for ((r, c), v) in &self.entries {
            write!(f, " ({r},{c}): {v} x^{}", self.pow(*r, *c).unwrap_or(0))?;
        }
        write!(f, " }}")
    }
}

impl ModuleMap {
    pub fn zero(domain: &GradedModule, codomain: &GradedModule, degree: i64) -> Result<Self> {
        let ratio = domain.step() / codomain.step();
        let compatible = domain.step() % codomain.step() == 0 && (ratio == 1 || ratio == 2);
        if !compatible {
            return Err(Error::AlgebraMismatch(format!(
                "no map from a {} module to a {} module",
                domain.ring().name(),
                codomain.ring().name()
            )));
        }
        Ok(ModuleMap { domain: domain.clone(), codomain: codomain.clone(), degree, entries: BTreeMap::new() })
    }

    pub fn identity(m: &GradedModule) -> Self {
        let mut f = ModuleMap::zero(m, m, 0).expect("same ring");
        for i in 0..m.len() {
            f.entries.insert((i, i), Rational::one());
        }
        f
    }

    pub fn domain(&self) -> &GradedModule {
        &self.domain
    }

    pub fn codomain(&self) -> &GradedModule {
        &self.codomain
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// Number of codomain steps per domain step (2 when d acts as c^2).
    pub fn ratio(&self) -> i64 {
        self.domain.step() / self.codomain.step()
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Rational> {
        &self.entries
    }

    /// Exponent forced by the degree constraint, if integral.
    pub fn pow(&self, row: usize, col: usize) -> Option<i64> {
        let diff = self.codomain.summands()[row].shift - self.domain.summands()[col].shift - self.degree;
        let step = self.codomain.step();
        (diff.rem_euclid(step) == 0).then_some(diff / step)
    }

    pub fn coef(&self, row: usize, col: usize) -> Rational {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds `coef * x^pow` to entry (row, col). Terms landing on zero elements
    /// of a torsion summand are dropped.
    pub fn add_term(&mut self, row: usize, col: usize, pow: i64, coef: Rational) -> Result<()> {
        if row >= self.codomain.len() || col >= self.domain.len() {
            return Err(Error::BadIndex(format!("entry ({row},{col}) outside the map")));
        }
        if self.pow(row, col) != Some(pow) {
            return Err(Error::InhomogeneousRelation(format!(
                "term x^{pow} at ({row},{col}) does not have degree {}",
                self.degree
            )));
        }
        let target = self.codomain.summands()[row];
        if !target.alive(pow) {
            if target.kind == Kind::Free {
                return Err(Error::InvalidMorphism(format!("negative power {pow} into a free summand")));
            }
            return Ok(());
        }
        self.add_raw(row, col, coef);
        Ok(())
    }

    fn add_raw(&mut self, row: usize, col: usize, coef: Rational) {
        if coef.is_zero() {
            return;
        }
        let e = self.entries.entry((row, col)).or_insert_with(Rational::zero);
        *e += coef;
        if e.is_zero() {
            self.entries.remove(&(row, col));
        }
    }

    /// Like `add_term` with the exponent taken from the degree constraint.
    pub fn add_entry(&mut self, row: usize, col: usize, coef: Rational) -> Result<()> {
        let pow = self.pow(row, col).ok_or_else(|| {
            Error::InhomogeneousRelation(format!("no homogeneous term at ({row},{col}) in degree {}", self.degree))
        })?;
        self.add_term(row, col, pow, coef)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    fn same_shape(&self, other: &ModuleMap) -> Result<()> {
        if self.domain != other.domain || self.codomain != other.codomain || self.degree != other.degree {
            return Err(Error::InvalidMorphism("maps with different source, target or degree".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &ModuleMap) -> Result<ModuleMap> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (&(r, c), v) in &other.entries {
            out.add_raw(r, c, v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ModuleMap) -> Result<ModuleMap> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> ModuleMap {
        let mut out = self.clone();
        out.entries.clear();
        for (&(r, c), v) in &self.entries {
            out.add_raw(r, c, v * s);
        }
        out
    }

    /// `self ∘ f`.
    pub fn compose(&self, f: &ModuleMap) -> Result<ModuleMap> {
        if f.codomain != self.domain {
            return Err(Error::InvalidMorphism(format!(
                "cannot compose: {:?} is not {:?}",
                f.codomain, self.domain
            )));
        }
        let mut out = ModuleMap::zero(&f.domain, &self.codomain, f.degree + self.degree)?;
        let r = self.ratio();
        for (&(j, i), a) in &f.entries {
            let p = f.pow(j, i).expect("stored entries are homogeneous");
            for (&(k, j2), b) in &self.entries {
                if j2 != j {
                    continue;
                }
                let q = self.pow(k, j).expect("stored entries are homogeneous");
                let pow = p * r + q;
                if self.codomain.summands()[k].alive(pow) {
                    out.add_raw(k, i, a * b);
                }
            }
        }
        Ok(out)
    }

    /// Matrix of the degree-`e` component in the monomial bases.
    pub fn matrix_at(&self, e: i64) -> QMatrix {
        let dom = self.domain.basis_at(e);
        let cod = self.codomain.basis_at(e + self.degree);
        let index: BTreeMap<(usize, i64), usize> = cod.iter().enumerate().map(|(n, &k)| (k, n)).collect();
        let r = self.ratio();
        let mut m = QMatrix::zeros(cod.len(), dom.len());
        for (ci, &(i, a)) in dom.iter().enumerate() {
            for (&(row, col), v) in &self.entries {
                if col != i {
                    continue;
                }
                let p = self.pow(row, col).expect("homogeneous");
                if let Some(&ri) = index.get(&(row, p + a * r)) {
                    m.add_at(ri, ci, v);
                }
            }
        }
        m
    }

    /// Checks that the generator images satisfy the relations of the domain
    /// and respect the involution.
    pub fn check_valid(&self) -> Result<()> {
        let r = self.ratio();
        for (&(row, col), _) in &self.entries {
            let src = self.domain.summands()[col];
            let dst = self.codomain.summands()[row];
            let p = self.pow(row, col).expect("homogeneous");
            match src.kind {
                Kind::Torsion(l) => {
                    if dst.alive(p + l as i64 * r) {
                        return Err(Error::InvalidMorphism(format!(
                            "generator {col} is killed by x^{l} but its image ({row}) is not"
                        )));
                    }
                }
                Kind::Laurent => {
                    if dst.kind != Kind::Laurent {
                        return Err(Error::InvalidMorphism(format!(
                            "divisible generator {col} mapped to non-divisible summand {row}"
                        )));
                    }
                }
                Kind::Free => {}
            }
            let src_sign = src.sign;
            let dst_sign = self.codomain.ring().element_sign(dst.sign, p);
            if src_sign != dst_sign {
                return Err(Error::InvalidMorphism(format!(
                    "entry ({row},{col}) mixes involution eigenvalues"
                )));
            }
        }
        Ok(())
    }

    pub fn direct_sum(&self, other: &ModuleMap) -> Result<ModuleMap> {
        if self.degree != other.degree {
            return Err(Error::InvalidMorphism("direct sum of maps of different degrees".into()));
        }
        let dom = self.domain.direct_sum(&other.domain)?;
        let cod = self.codomain.direct_sum(&other.codomain)?;
        let mut out = ModuleMap::zero(&dom, &cod, self.degree)?;
        out.entries = self.entries.clone();
        let (r0, c0) = (self.codomain.len(), self.domain.len());
        for (&(r, c), v) in &other.entries {
            out.entries.insert((r + r0, c + c0), v.clone());
        }
        Ok(out)
    }

    /// Same entries viewed between other modules with identical summand data
    /// in the touched positions (used for suspensions and twists).
    pub fn rebase(&self, domain: &GradedModule, codomain: &GradedModule, degree: i64) -> Result<ModuleMap> {
        let mut out = ModuleMap::zero(domain, codomain, degree)?;
        for (&(r, c), v) in &self.entries {
            let p = self.pow(r, c).expect("homogeneous");
            out.add_term(r, c, p, v.clone())?;
        }
        Ok(out)
    }

    /// Restricts to domain summands `cols` (in that order).
    pub fn restrict_domain(&self, cols: &[usize]) -> ModuleMap {
        let dom = self.domain.select(cols);
        let mut out = ModuleMap::zero(&dom, &self.codomain, self.degree).expect("same rings");
        for (n, &c) in cols.iter().enumerate() {
            for (&(r, c2), v) in &self.entries {
                if c2 == c {
                    out.entries.insert((r, n), v.clone());
                }
            }
        }
        out
    }

    /// Keeps codomain summands `rows` (a projection onto those summands).
    pub fn restrict_codomain(&self, rows: &[usize]) -> ModuleMap {
        let cod = self.codomain.select(rows);
        let mut out = ModuleMap::zero(&self.domain, &cod, self.degree).expect("same rings");
        for (n, &r) in rows.iter().enumerate() {
            for (&(r2, c), v) in &self.entries {
                if r2 == r {
                    out.entries.insert((n, c), v.clone());
                }
            }
        }
        out
    }

    /// Builds a map whose column `col` is given by `(row, pow, coef)` terms.
    pub fn from_columns(
        domain: &GradedModule,
        codomain: &GradedModule,
        degree: i64,
        cols: &[Vec<(usize, i64, Rational)>],
    ) -> Result<ModuleMap> {
        let mut out = ModuleMap::zero(domain, codomain, degree)?;
        for (c, terms) in cols.iter().enumerate() {
            for (r, p, v) in terms {
                out.add_term(*r, c, *p, v.clone())?;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|(&(r, c), v)| {
                json!({"row": r, "col": c, "terms": [{"coef": rat_to_json(v), "pow": self.pow(r, c).unwrap_or(0)}]})
            })
            .collect();
        json!({"degree": self.degree, "entries": entries})
    }

    pub fn from_json(v: &Value, domain: &GradedModule, codomain: &GradedModule) -> Result<ModuleMap> {
        let degree = v.get("degree").map(as_i64).transpose()?.unwrap_or(0);
        let mut out = ModuleMap::zero(domain, codomain, degree)?;
        let empty = Vec::new();
        let entries = match v.get("entries") {
            Some(e) => e.as_array().ok_or_else(|| Error::Schema("entries must be a list".into()))?,
            None => &empty,
        };
        for e in entries {
            let r = as_i64(get(e, "row")?)? as usize;
            let c = as_i64(get(e, "col")?)? as usize;
            let terms = get(e, "terms")?.as_array().ok_or_else(|| Error::Schema("terms must be a list".into()))?;
            for t in terms {
                let coef = rat_from_json(get(t, "coef")?)?;
                let pow = t.get("pow").map(as_i64).transpose()?.unwrap_or(0);
                out.add_term(r, c, pow, coef)?;
            }
        }
        Ok(out)
    }
}
