use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::functors::{make_ev, torsion_object};
use super::homology::homology_da;
use super::{hom_basis_a, hom_degree_range, laurent_tensor, Slot, SlotFamily, ToralMorphism, ToralObject};
use crate::error::{Error, Result};
use crate::graded::{
    auto_window, canonicalize, max_pow, GradedModule, GradedQWSpace, Kind, ModuleMap, Persistence, Subquotient,
    Summand, Window,
};
use crate::linalg::{q, rank_of_columns, QMatrix, Rational};

/// A two-term injective resolution 0 -> y -> I -> J -> 0.
///
/// Injective hulls of torsion are the finite stages of the divisible hull
/// whose top degree is `top`; everything is exact on `window`. The
/// projection I -> J is kept degreewise because it is not determined by
/// images of generators on Laurent summands.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub source: ToralObject,
    pub injective: ToralObject,
    pub cokernel: ToralObject,
    pub inclusion: ToralMorphism,
    pub window: Window,
    pub top: i64,
    projection: BTreeMap<Slot, BTreeMap<i64, QMatrix>>,
}

struct SlotPieces {
    injective: GradedModule,
    cokernel: GradedModule,
    iota: ModuleMap,
    beta: ModuleMap,
    projection: BTreeMap<i64, QMatrix>,
}

/// Default top degree for hulls: a few steps above every generator.
pub fn default_top(y: &ToralObject) -> i64 {
    let max = y.degrees().into_iter().max().unwrap_or(0);
    max + 4 * (y.max_len() as i64 + 2) + 4
}

pub fn injective_resolution(y: &ToralObject, top: Option<i64>) -> Result<Resolution> {
    y.require_star()?;
    let y = y.without_differential();
    let top = top.unwrap_or_else(|| default_top(&y));
    let ev = make_ev(y.side(), y.v())?;
    let lv = laurent_tensor(y.v());
    let mut window: Option<Window> = None;
    let mut pieces = BTreeMap::new();
    for s in y.slots() {
        let m = y.module(s);
        let e = ev.module(s);
        let w = auto_window(&[m, e], max_pow(y.beta(s)) + 1);
        let w = Window::new(w.lo, top)?;
        window = Some(match window {
            None => w,
            Some(v) => v.union(&w),
        });
    }
    let window = window.expect("tail slot");
    // Recompute with the common window so that every slot is checked on it.
    for s in y.slots() {
        let p = resolve_slot_in(&y, &ev, s, top, window)?;
        pieces.insert(s, p);
    }
    let mut inj = BTreeMap::new();
    let mut cok = BTreeMap::new();
    let mut beta = BTreeMap::new();
    let mut iota = BTreeMap::new();
    for k in y.explicit_indices() {
        let p = &pieces[&Slot::At(k)];
        inj.insert(k, p.injective.clone());
        cok.insert(k, p.cokernel.clone());
        beta.insert(k, p.beta.clone());
        iota.insert(k, p.iota.clone());
    }
    let t = &pieces[&Slot::Tail];
    let injective = ToralObject::new(
        SlotFamily::new(y.side(), inj, t.injective.clone())?,
        y.v().clone(),
        beta,
        t.beta.rebase(&t.injective, &lv, 0)?,
        None,
    )?;
    let cokernel = torsion_object(&SlotFamily::new(y.side(), cok, t.cokernel.clone())?)?;
    let inclusion =
        ToralMorphism::new(&y, &injective, 0, iota, t.iota.clone(), QMatrix::identity(y.v().len()))?;
    let projection = pieces.into_iter().map(|(s, p)| (s, p.projection)).collect();
    Ok(Resolution { source: y, injective, cokernel, inclusion, window, top, projection })
}

fn resolve_slot_in(y: &ToralObject, ev: &ToralObject, s: Slot, top: i64, window: Window) -> Result<SlotPieces> {
    let m = y.module(s);
    let ring = m.ring();
    let step = ring.step();
    // Hulls of the torsion summands.
    let mut hull = Vec::new();
    let mut quot = Vec::new();
    let mut theta = Vec::new();
    for (i, sm) in m.summands().iter().enumerate() {
        let Kind::Torsion(len) = sm.kind else { continue };
        let k = sm.shift;
        let kt = top - (top - k).rem_euclid(step);
        if kt < k {
            return Err(Error::BadIndex(format!("hull top {top} below a torsion generator in degree {k}")));
        }
        let j = (kt - k) / step;
        let big = j + len as i64;
        let sign = ring.element_sign(sm.sign, j);
        hull.push(Summand::torsion(big as u32, kt, sign));
        if j > 0 {
            quot.push((hull.len() - 1, Summand::torsion(j as u32, kt, sign)));
        }
        theta.push((hull.len() - 1, i, j));
    }
    let hull_m = GradedModule::new(ring, hull.clone())?;
    let e_mod = ev.module(s).clone();
    let e_beta = ev.beta(s).clone();
    // gamma: the structure map read in the generators of e(V) at this slot.
    let mut gamma = ModuleMap::zero(m, &e_mod, 0)?;
    let b = y.beta(s);
    let d_slot = !ring.is_c();
    for (&(r, c), v) in b.entries() {
        let p = b.pow(r, c).expect("homogeneous");
        let p2 = if d_slot {
            if y.v()[r].1 > 0 {
                p / 2
            } else {
                (p + 1) / 2
            }
        } else {
            p
        };
        gamma.add_term(r, c, p2, v.clone())?;
    }
    let injective = hull_m.direct_sum(&e_mod)?;
    let nh = hull.len();
    let mut iota = ModuleMap::zero(m, &injective, 0)?;
    for &(h, i, j) in &theta {
        iota.add_term(h, i, j, Rational::one())?;
    }
    for (&(r, c), v) in gamma.entries() {
        iota.add_term(nh + r, c, gamma.pow(r, c).expect("homogeneous"), v.clone())?;
    }
    let lv = e_beta.codomain().clone();
    let mut beta = ModuleMap::zero(&injective, &lv, 0)?;
    for (&(r, c), v) in e_beta.entries() {
        beta.add_term(r, nh + c, e_beta.pow(r, c).expect("homogeneous"), v.clone())?;
    }
    // Cokernel of gamma on the window, read off as a module.
    let amb = Persistence::of_module(&e_mod, window);
    let boundaries = window.degrees().map(|e| (e, gamma.matrix_at(e))).collect();
    let sq = Subquotient { ambient: &amb, cycles: BTreeMap::new(), boundaries };
    let quotient = sq.quotient()?;
    let canonical = canonicalize(&quotient.p, e_mod.ring())?;
    let mut cok_summands: Vec<Summand> = quot.iter().map(|x| x.1).collect();
    let nq = cok_summands.len();
    let canon_ring = canonical.module.ring();
    if !canonical.module.is_empty() && canon_ring.is_laurent() {
        return Err(Error::StarViolation("structure map is not rationally onto".into()));
    }
    if canonical.module.summands().iter().any(|x| !x.is_torsion()) {
        return Err(Error::StarViolation("cokernel of the structure map is not torsion on the window".into()));
    }
    cok_summands.extend_from_slice(canonical.module.summands());
    let cokernel = GradedModule::new(ring, cok_summands)?;
    // Degreewise projection.
    let mut projection = BTreeMap::new();
    for e in window.degrees() {
        let ib = injective.basis_at(e);
        let jb = cokernel.basis_at(e);
        let mut pm = QMatrix::zeros(jb.len(), ib.len());
        let bm = canonical.basis_matrix(&quotient.p, e);
        let e_offset = ib.iter().filter(|&&(i, _)| i < nh).count();
        let j_offset = jb.iter().filter(|&&(i, _)| i < nq).count();
        for (col, &(i, a)) in ib.iter().enumerate() {
            if i < nh {
                if let Some(qi) = quot.iter().position(|x| x.0 == i) {
                    if let Some(row) = jb.iter().position(|&(j, b)| j == qi && b == a) {
                        pm.set(row, col, q(1));
                    }
                }
            } else {
                let n = amb.dim(e);
                let mut unit = vec![Rational::zero(); n];
                unit[col - e_offset] = Rational::one();
                let coords = quotient.coords(e, &unit).expect("quotient of everything");
                if bm.cols() > 0 {
                    let x = bm
                        .solve_vec(&coords)
                        .ok_or_else(|| Error::StarViolation(format!("cokernel basis incomplete in degree {e}")))?;
                    for (r, v) in x.into_iter().enumerate() {
                        pm.set(j_offset + r, col, v);
                    }
                }
            }
        }
        projection.insert(e, pm);
    }
    Ok(SlotPieces { injective, cokernel, iota, beta, projection })
}

impl Resolution {
    pub fn projection_at(&self, s: Slot, e: i64) -> Option<&QMatrix> {
        let s = if self.projection.contains_key(&s) { s } else { Slot::Tail };
        self.projection.get(&s)?.get(&e)
    }

    /// Degreewise exactness of 0 -> y -> I -> J -> 0 on the window, plus
    /// compatibility of the projection with the ring action.
    pub fn check_exact(&self) -> Result<()> {
        for s in self.source.slots() {
            let m = self.source.module(s);
            let i = self.injective.module(s);
            let j = self.cokernel.module(s);
            let iota = self.inclusion.alpha(s);
            let pi = Persistence::of_module(i, self.window);
            let pj = Persistence::of_module(j, self.window);
            for e in self.window.degrees() {
                let ie = iota.matrix_at(e);
                let pe = self.projection_at(s, e).expect("window degree");
                let fail = |what: &str| Err(Error::NotADifferential(format!("slot {} degree {e}: {what}", s.key())));
                if ie.rank() != m.dim_at(e) {
                    return fail("inclusion not injective");
                }
                if pe.rows() != j.dim_at(e) || pe.rank() != j.dim_at(e) {
                    return fail("projection not surjective");
                }
                if !pe.mul(&ie).is_zero() {
                    return fail("composite not zero");
                }
                if i.dim_at(e) != m.dim_at(e) + j.dim_at(e) {
                    return fail("dimensions do not add up");
                }
                if let (Some(ai), Some(aj)) = (pi.act.get(&e), pj.act.get(&e)) {
                    let below = self.projection_at(s, e - i.step()).expect("window degree");
                    if below.mul(ai) != aj.mul(pe) {
                        return fail("projection does not commute with the ring action");
                    }
                }
            }
        }
        Ok(())
    }

    /// The composite of a morphism x -> I with the projection, as the
    /// flattened images of the generators of x in J (degrees off the
    /// window carry nothing).
    fn project_flat(&self, f: &ToralMorphism) -> Vec<Rational> {
        let mut out = Vec::new();
        for s in f.slots() {
            let a = f.alpha(s);
            let x = a.domain();
            for (c, sm) in x.summands().iter().enumerate() {
                let k = sm.shift;
                let e = k + f.degree();
                let jdim = self.cokernel.module(s).dim_at(e);
                if !self.window.contains(e) {
                    out.extend(std::iter::repeat(Rational::zero()).take(jdim));
                    continue;
                }
                let pos = x.basis_at(k).iter().position(|&(i, p)| i == c && p == 0).expect("generator");
                let col = a.matrix_at(k).col(pos);
                out.extend(self.projection_at(s, e).expect("window degree").mul_vec(&col));
            }
        }
        out
    }
}

fn gen_images(f: &ToralMorphism) -> Vec<Rational> {
    let mut out = Vec::new();
    for s in f.slots() {
        let a = f.alpha(s);
        let x = a.domain();
        for (c, sm) in x.summands().iter().enumerate() {
            let k = sm.shift;
            let pos = x.basis_at(k).iter().position(|&(i, p)| i == c && p == 0).expect("generator");
            out.extend(a.matrix_at(k).col(pos));
        }
    }
    out
}

/// Degrees where Ext may be nonzero, padded by a step on each side.
pub fn ext_degree_range(x: &ToralObject, y: &ToralObject) -> (i64, i64) {
    let (lo, hi) = hom_degree_range(x, y);
    if lo > hi {
        return (0, -1);
    }
    (lo - 4, hi + 4)
}

/// Top degree for hulls so that Ext(x, y) is computed faithfully up to degree `hi`.
fn top_for(x: &ToralObject, y: &ToralObject, hi: i64) -> i64 {
    let max_x = x.degrees().into_iter().max().unwrap_or(0);
    let max_y = y.degrees().into_iter().max().unwrap_or(0);
    (hi + max_x).max(max_y) + 4 * (x.max_len() as i64 + y.max_len() as i64 + 3)
}

/// dim Ext(x, y) in degree n, as hom(x, J) modulo the image of hom(x, I).
pub fn ext_dim(x: &ToralObject, res: &Resolution, n: i64) -> Result<usize> {
    let to_j = hom_basis_a(x, &res.cokernel, n)?;
    if to_j.is_empty() {
        return Ok(0);
    }
    let to_i = hom_basis_a(x, &res.injective, n)?;
    let images: Vec<Vec<Rational>> = to_i.iter().map(|f| res.project_flat(f)).collect();
    let len = to_j.first().map(|f| gen_images(f).len()).unwrap_or(0);
    let rank = rank_of_columns(len, &images);
    Ok(to_j.len() - rank)
}

/// The same dimension from exactness of
/// 0 -> hom(x,y) -> hom(x,I) -> hom(x,J) -> Ext(x,y) -> 0.
pub fn ext_euler_dim(x: &ToralObject, res: &Resolution, n: i64) -> Result<i64> {
    let hj = hom_basis_a(x, &res.cokernel, n)?.len() as i64;
    let hi = hom_basis_a(x, &res.injective, n)?.len() as i64;
    let hy = hom_basis_a(x, &res.source, n)?.len() as i64;
    Ok(hj - hi + hy)
}

/// Degreewise Ext(x, y) over the given (or default) range.
pub fn ext_a(x: &ToralObject, y: &ToralObject, range: Option<(i64, i64)>) -> Result<GradedQWSpace> {
    x.require_star()?;
    y.require_star()?;
    if x.side() != y.side() {
        return Err(Error::GroupMismatch("ext across sides".into()));
    }
    let (lo, hi) = range.unwrap_or_else(|| ext_degree_range(x, y));
    let mut dims = BTreeMap::new();
    if lo > hi || x.is_zero() || y.is_zero() {
        return Ok(GradedQWSpace::trivial(&dims));
    }
    let res = injective_resolution(y, Some(top_for(x, y, hi)))?;
    for n in lo..=hi {
        let d = ext_dim(x, &res, n)?;
        if d > 0 {
            dims.insert(n, d);
        }
    }
    Ok(GradedQWSpace::trivial(&dims))
}

/// The two outer terms of the Adams short exact sequence for maps x -> y
/// in the derived category: hom and Ext between homologies.
pub fn adams_bracket(
    x: &ToralObject,
    y: &ToralObject,
    range: Option<(i64, i64)>,
) -> Result<(GradedQWSpace, GradedQWSpace)> {
    let hx = homology_da(x)?;
    let hy = homology_da(y)?;
    let shx = hx.suspend(1)?;
    let range = range.unwrap_or_else(|| {
        let (a, b) = hom_degree_range(&hx, &hy);
        let (c, d) = ext_degree_range(&shx, &hy);
        match (a <= b, c <= d) {
            (true, true) => (a.min(c), b.max(d)),
            (true, false) => (a, b),
            (false, true) => (c, d),
            _ => (0, -1),
        }
    });
    let hom = super::hom_a(&hx, &hy, Some(range))?;
    let ext = ext_a(&shx, &hy, Some(range))?;
    Ok((hom, ext))
}
