use std::collections::BTreeMap;

use num_traits::Zero;

use super::hom::joint_indices;
use super::{laurent_tensor, Differential, Slot, SlotFamily, ToralMorphism, ToralObject};
use crate::error::{Error, Result};
use crate::graded::{homology_slot, ModuleMap, SignedBasis, SlotHomology};
use crate::linalg::{QMatrix, Rational};

/// Homology of V: representatives per (degree, sign) block and a way to
/// read off classes of cycles.
pub struct VHomology {
    pub basis: SignedBasis,
    /// For each block, the ambient indices, the chosen representatives
    /// (columns over those indices), the boundaries and the offset of the
    /// block in `basis`.
    blocks: BTreeMap<(i64, i8), (Vec<usize>, QMatrix, QMatrix, usize)>,
}

impl VHomology {
    pub fn of(v: &SignedBasis, d: &QMatrix) -> Result<VHomology> {
        let mut keys: Vec<(i64, i8)> = v.to_vec();
        keys.sort();
        keys.dedup();
        let idx = |k: (i64, i8)| -> Vec<usize> { (0..v.len()).filter(|&i| v[i] == k).collect() };
        let mut basis = Vec::new();
        let mut blocks = BTreeMap::new();
        for &(deg, s) in &keys {
            let here = idx((deg, s));
            let below = idx((deg - 1, s));
            let above = idx((deg + 1, s));
            let out = d.select_rows(&below).select_columns(&here);
            let z = if below.is_empty() { QMatrix::identity(here.len()) } else { out.kernel_basis() };
            let inc = d.select_rows(&here).select_columns(&above);
            let b = inc.image_basis();
            let (_, piv) = b.hstack(&z).rref();
            let keep: Vec<usize> = piv.iter().filter(|&&p| p >= b.cols()).map(|&p| p - b.cols()).collect();
            let reps = z.select_columns(&keep);
            let off = basis.len();
            basis.extend(std::iter::repeat((deg, s)).take(reps.cols()));
            blocks.insert((deg, s), (here, reps, b, off));
        }
        Ok(VHomology { basis, blocks })
    }

    /// Class of a cycle given in ambient coordinates supported on one block.
    fn class(&self, key: (i64, i8), ambient: &[Rational]) -> Result<Vec<Rational>> {
        let Some((here, reps, b, _)) = self.blocks.get(&key) else {
            return Ok(Vec::new());
        };
        let local: Vec<Rational> = here.iter().map(|&i| ambient[i].clone()).collect();
        if reps.cols() == 0 {
            return Ok(Vec::new());
        }
        let full = reps.hstack(b);
        let x = full.solve_vec(&local).ok_or_else(|| Error::NotADifferential("structure map misses V-cycles".into()))?;
        Ok(x[..reps.cols()].to_vec())
    }

    fn offset(&self, key: (i64, i8)) -> usize {
        self.blocks.get(&key).map_or(0, |b| b.3)
    }

    /// Matrix of the map induced by a degree-`n` chain map `phi` on V.
    pub fn induced(&self, phi: &QMatrix, n: i64, target: &VHomology) -> Result<QMatrix> {
        let mut out = QMatrix::zeros(target.basis.len(), self.basis.len());
        for (&(deg, s), (here, reps, _, off)) in &self.blocks {
            for (j, col) in reps.columns().into_iter().enumerate() {
                let mut amb = vec![Rational::zero(); phi.cols()];
                for (i, v) in here.iter().zip(col) {
                    amb[*i] = v;
                }
                let img = phi.mul_vec(&amb);
                let key = (deg + n, s);
                let cls = target.class(key, &img)?;
                let toff = target.offset(key);
                for (r, v) in cls.into_iter().enumerate() {
                    out.set(toff + r, off + j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn dim_at(&self, deg: i64) -> usize {
        self.basis.iter().filter(|b| b.0 == deg).count()
    }

    /// Rank of an induced matrix restricted to degree `deg` (source side).
    pub fn rank_at(&self, m: &QMatrix, deg: i64) -> usize {
        let cols: Vec<usize> = (0..self.basis.len()).filter(|&i| self.basis[i].0 == deg).collect();
        m.select_columns(&cols).rank()
    }
}

/// Per-slot homology together with the homology of V.
pub struct HomologyData {
    pub object: ToralObject,
    pub slots: BTreeMap<Slot, SlotHomology>,
    pub v: VHomology,
}

/// Homology of a differential object (objects without a differential are
/// their own homology).
pub fn homology_da(x: &ToralObject) -> Result<ToralObject> {
    Ok(homology_data(x)?.object)
}

pub fn homology_data(x: &ToralObject) -> Result<HomologyData> {
    let d = x.diff_or_zero()?;
    let vh = VHomology::of(x.v(), &d.v)?;
    let lv = laurent_tensor(&vh.basis);
    let mut slots = BTreeMap::new();
    let mut explicit = BTreeMap::new();
    let mut beta = BTreeMap::new();
    let mut beta_tail = None;
    for s in x.slots() {
        let h = homology_slot(x.module(s), d.at(s))?;
        let bl = x.beta(s).compose(&h.lift)?;
        let mut b = ModuleMap::zero(&h.module, &lv, 0)?;
        for (c, sm) in h.module.summands().iter().enumerate() {
            // beta of the representing cycle, grouped by V-degree.
            let mut groups: BTreeMap<(i64, i8), Vec<Rational>> = BTreeMap::new();
            for r in 0..x.v().len() {
                let v = bl.coef(r, c);
                if v.is_zero() {
                    continue;
                }
                let (deg, sign) = x.v()[r];
                let g = groups.entry((deg, sign)).or_insert_with(|| vec![Rational::zero(); x.v().len()]);
                g[r] = v;
            }
            for (key, vec) in groups {
                let cls = vh.class(key, &vec)?;
                let off = vh.offset(key);
                let pow = (key.0 - sm.shift).div_euclid(2);
                for (n, val) in cls.into_iter().enumerate() {
                    if !val.is_zero() {
                        b.add_term(off + n, c, pow, val)?;
                    }
                }
            }
        }
        match s {
            Slot::At(k) => {
                explicit.insert(k, h.module.clone());
                beta.insert(k, b);
            }
            Slot::Tail => beta_tail = Some(b),
        }
        slots.insert(s, h);
    }
    let tail = slots[&Slot::Tail].module.clone();
    let family = SlotFamily::new(x.side(), explicit, tail)?;
    let object = ToralObject::new(family, vh.basis.clone(), beta, beta_tail.expect("tail slot"), None)?;
    Ok(HomologyData { object, slots, v: vh })
}

/// Mapping cone of a degree-0 chain map f: x -> y, namely y + Sigma x with
/// d = [[d_y, f], [0, -d_x]].
pub fn cone(f: &ToralMorphism) -> Result<ToralObject> {
    if f.degree() != 0 {
        return Err(Error::InvalidMorphism("cones are taken of degree-0 maps".into()));
    }
    let keys = joint_indices(f.source(), f.target());
    let mut x = f.source().clone();
    let mut y = f.target().clone();
    for &k in &keys {
        x = x.with_explicit(k);
        y = y.with_explicit(k);
    }
    if x.diff().is_none() {
        let d = x.diff_or_zero()?;
        x = x.with_differential(d)?;
    }
    if y.diff().is_none() {
        let d = y.diff_or_zero()?;
        y = y.with_differential(d)?;
    }
    let sx = x.suspend(1)?;
    let sum = y.direct_sum(&sx)?;
    let base = sum.diff().expect("differential").clone();
    let mut slots = BTreeMap::new();
    for &k in &keys {
        let s = Slot::At(k);
        slots.insert(k, with_corner(&base.slots[&k], f.alpha(s), y.module(s).len())?);
    }
    let tail = with_corner(&base.tail, f.alpha(Slot::Tail), y.module(Slot::Tail).len())?;
    let mut v = base.v.clone();
    v.set_block(0, y.v().len(), f.phi());
    let d = Differential { slots, tail, v };
    sum.without_differential().with_differential(d)
}

/// Adds `f` (a map from the second block to the first) to a block-diagonal
/// differential, shifting columns past the first block.
fn with_corner(d: &ModuleMap, f: &ModuleMap, n_first: usize) -> Result<ModuleMap> {
    let mut out = d.clone();
    for (&(r, c), v) in f.entries() {
        let p = f.pow(r, c).expect("homogeneous");
        out.add_term(r, n_first + c, p, v.clone())?;
    }
    Ok(out)
}

/// Ranks of the map induced on homology by a chain map, per slot and degree
/// (and on V), for long exact sequence checks.
pub fn induced_ranks(
    f: &ToralMorphism,
    hx: &HomologyData,
    hy: &HomologyData,
    degrees: &[i64],
) -> Result<BTreeMap<(Slot, i64), usize>> {
    let mut out = BTreeMap::new();
    for s in f.slots() {
        let (Some(a), Some(b)) = (hx.slots.get(&s).or(hx.slots.get(&Slot::Tail)), hy.slots.get(&s).or(hy.slots.get(&Slot::Tail)))
        else {
            continue;
        };
        let ind = a.induced(f.alpha(s), b)?;
        for &e in degrees {
            out.insert((s, e), ind.matrix_at(e).rank());
        }
    }
    Ok(out)
}
