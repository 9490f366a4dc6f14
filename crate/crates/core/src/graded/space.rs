use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::json::{as_i64, as_object, get, matrix_from_json, matrix_to_json, parse_key_i64};
use crate::linalg::{q, QMatrix};

/// Basis vectors of an eigenbasis, as (degree, eigenvalue), in storage order.
pub type SignedBasis = Vec<(i64, i8)>;

/// A finite-dimensional graded rational vector space with an involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedQWSpace {
    involution: BTreeMap<i64, QMatrix>,
}

impl GradedQWSpace {
    pub fn new(involution: BTreeMap<i64, QMatrix>) -> Result<Self> {
        let mut clean = BTreeMap::new();
        for (d, w) in involution {
            if !w.is_square() {
                return Err(Error::Schema(format!("involution in degree {d} is not square")));
            }
            if w.mul(&w) != QMatrix::identity(w.rows()) {
                return Err(Error::Schema(format!("involution in degree {d} does not square to the identity")));
            }
            if w.rows() > 0 {
                clean.insert(d, w);
            }
        }
        Ok(GradedQWSpace { involution: clean })
    }

    pub fn zero() -> Self {
        GradedQWSpace { involution: BTreeMap::new() }
    }

    pub fn from_signed(basis: &[(i64, i8)]) -> Self {
        let mut per: BTreeMap<i64, Vec<i8>> = BTreeMap::new();
        for &(d, s) in basis {
            per.entry(d).or_default().push(s);
        }
        let involution = per
            .into_iter()
            .map(|(d, s)| (d, QMatrix::diagonal(&s.iter().map(|&x| q(x as i64)).collect::<Vec<_>>())))
            .collect();
        GradedQWSpace { involution }
    }

    /// Dimension counts with trivial action (used for hom spaces).
    pub fn trivial(dims: &BTreeMap<i64, usize>) -> Self {
        let involution =
            dims.iter().filter(|(_, &n)| n > 0).map(|(&d, &n)| (d, QMatrix::identity(n))).collect();
        GradedQWSpace { involution }
    }

    pub fn involution(&self, d: i64) -> Option<&QMatrix> {
        self.involution.get(&d)
    }

    pub fn dim_at(&self, d: i64) -> usize {
        self.involution.get(&d).map_or(0, QMatrix::rows)
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.involution.iter().map(|(&d, w)| (d, w.rows())).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.involution.values().map(QMatrix::rows).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.involution.is_empty()
    }

    /// Eigenvector columns for +1 and -1 in degree `d`.
    pub fn eigenvectors(&self, d: i64) -> (QMatrix, QMatrix) {
        match self.involution.get(&d) {
            None => (QMatrix::zeros(0, 0), QMatrix::zeros(0, 0)),
            Some(w) => {
                let id = QMatrix::identity(w.rows());
                (w.sub(&id).kernel_basis(), w.add(&id).kernel_basis())
            }
        }
    }

    /// An eigenbasis: the signed basis plus, per degree, the matrix whose
    /// columns are the chosen eigenvectors (plus ones first).
    pub fn diagonalize(&self) -> (SignedBasis, BTreeMap<i64, QMatrix>) {
        let mut basis = Vec::new();
        let mut change = BTreeMap::new();
        for &d in self.involution.keys() {
            let (p, m) = self.eigenvectors(d);
            basis.extend(std::iter::repeat((d, 1i8)).take(p.cols()));
            basis.extend(std::iter::repeat((d, -1i8)).take(m.cols()));
            change.insert(d, p.hstack(&m));
        }
        (basis, change)
    }

    pub fn direct_sum(&self, other: &GradedQWSpace) -> GradedQWSpace {
        let mut involution = self.involution.clone();
        for (&d, w) in &other.involution {
            let e = involution.remove(&d).unwrap_or_else(|| QMatrix::zeros(0, 0));
            involution.insert(d, e.block_diag(w));
        }
        GradedQWSpace { involution }
    }

    pub fn twist(&self) -> GradedQWSpace {
        GradedQWSpace { involution: self.involution.iter().map(|(&d, w)| (d, w.neg())).collect() }
    }

    pub fn suspend(&self, n: i64) -> GradedQWSpace {
        GradedQWSpace { involution: self.involution.iter().map(|(&d, w)| (d + n, w.clone())).collect() }
    }

    /// Degreewise isomorphism type: dimensions of both eigenspaces.
    pub fn character(&self) -> BTreeMap<i64, (usize, usize)> {
        self.involution
            .keys()
            .map(|&d| {
                let (p, m) = self.eigenvectors(d);
                (d, (p.cols(), m.cols()))
            })
            .collect()
    }

    pub fn is_isomorphic(&self, other: &GradedQWSpace) -> bool {
        self.character() == other.character()
    }

    pub fn to_json(&self) -> Value {
        let mut degrees = Map::new();
        for (d, w) in &self.involution {
            degrees.insert(d.to_string(), json!({"dim": w.rows(), "involution": matrix_to_json(w)}));
        }
        json!({ "degrees": degrees })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let mut involution = BTreeMap::new();
        if let Some(degs) = v.get("degrees") {
            for (k, entry) in as_object(degs)? {
                let d = parse_key_i64(k)?;
                let n = as_i64(get(entry, "dim")?)? as usize;
                let w = match entry.get("involution") {
                    Some(m) => matrix_from_json(m, n, n)?,
                    None => QMatrix::identity(n),
                };
                involution.insert(d, w);
            }
        } else if let Some(list) = v.get("basis") {
            // Shorthand: a list of [degree, sign] pairs.
            let arr = list.as_array().ok_or_else(|| Error::Schema("basis must be a list".into()))?;
            let mut signed = Vec::new();
            for p in arr {
                let pair = p.as_array().ok_or_else(|| Error::Schema("basis entry must be [degree, sign]".into()))?;
                if pair.len() != 2 {
                    return Err(Error::Schema("basis entry must be [degree, sign]".into()));
                }
                let s = as_i64(&pair[1])?;
                if s != 1 && s != -1 {
                    return Err(Error::Schema("sign must be 1 or -1".into()));
                }
                signed.push((as_i64(&pair[0])?, s as i8));
            }
            return Ok(GradedQWSpace::from_signed(&signed));
        }
        GradedQWSpace::new(involution)
    }
}

/// Splits into the +1 and -1 eigenspaces.
pub fn eigen_split(v: &GradedQWSpace) -> (GradedQWSpace, GradedQWSpace) {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (d, (p, m)) in v.character() {
        plus.extend(std::iter::repeat((d, 1i8)).take(p));
        minus.extend(std::iter::repeat((d, -1i8)).take(m));
    }
    (GradedQWSpace::from_signed(&plus), GradedQWSpace::from_signed(&minus))
}
