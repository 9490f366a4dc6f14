use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::homology::cone;
use super::{hom_basis_a, laurent_tensor, Side, Slot, SlotFamily, ToralMorphism, ToralObject};
use crate::error::Result;
use crate::graded::{GradedModule, ModuleMap, Ring, SignedBasis, Summand};
use crate::linalg::q;

/// Shape limits for random star-valid objects.
#[derive(Clone, Copy, Debug)]
pub struct RandomSpec {
    pub side: Side,
    pub max_slot: u32,
    pub max_explicit: usize,
    pub lo: i64,
    pub hi: i64,
    pub max_v: usize,
    pub max_torsion: usize,
    pub max_torsion_len: u32,
    /// Restrict every degree to this parity.
    pub parity: Option<i64>,
}

impl RandomSpec {
    pub fn new(side: Side) -> Self {
        RandomSpec {
            side,
            max_slot: 6,
            max_explicit: 4,
            lo: -12,
            hi: 12,
            max_v: 3,
            max_torsion: 2,
            max_torsion_len: 3,
            parity: None,
        }
    }

    fn degree<R: Rng>(&self, rng: &mut R, lo: i64, hi: i64) -> i64 {
        let p = self.parity.unwrap_or_else(|| rng.gen_range(0..2));
        let lo = if lo.rem_euclid(2) == p { lo } else { lo + 1 };
        let hi = if hi.rem_euclid(2) == p { hi } else { hi - 1 };
        if lo > hi {
            return lo;
        }
        lo + 2 * rng.gen_range(0..=(hi - lo) / 2)
    }
}

fn sign<R: Rng>(rng: &mut R) -> i8 {
    if rng.gen_bool(0.5) {
        1
    } else {
        -1
    }
}

/// A random slot: free generators matched with V (unit diagonal, random
/// terms above it) plus torsion summands in the kernel of beta.
fn random_slot<R: Rng>(rng: &mut R, spec: &RandomSpec, ring: Ring, v: &SignedBasis) -> Result<(GradedModule, ModuleMap)> {
    let d_ring = !ring.is_c();
    let mut summands = Vec::new();
    let mut pows = Vec::new();
    for &(deg, s) in v {
        let base = if d_ring && s < 0 { 1 } else { 0 };
        let step = if d_ring { 2 } else { 1 };
        let mut a = base + step * rng.gen_range(0..=1);
        while a > 0 && deg + 2 * a > spec.hi + 4 {
            a -= step;
        }
        let gsign = if d_ring { 1 } else { ring.element_sign(s, a) };
        summands.push(Summand::free(deg + 2 * a, gsign));
        pows.push(-a);
    }
    let n_free = summands.len();
    let n_tors = rng.gen_range(0..=spec.max_torsion);
    for _ in 0..n_tors {
        let len = rng.gen_range(1..=spec.max_torsion_len);
        let shift = spec.degree(rng, spec.lo, spec.hi);
        let s = if d_ring { 1 } else { sign(rng) };
        summands.push(Summand::torsion(len, shift, s));
    }
    let order: Vec<usize> = {
        let mut o: Vec<usize> = (0..summands.len()).collect();
        o.shuffle(rng);
        o
    };
    let module = GradedModule::new(ring, order.iter().map(|&i| summands[i]).collect())?;
    let lv = laurent_tensor(v);
    let mut beta = ModuleMap::zero(&module, &lv, 0)?;
    for (col, &i) in order.iter().enumerate() {
        if i >= n_free {
            continue;
        }
        let c = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
        beta.add_term(i, col, pows[i], q(c))?;
        let g = module.summands()[col];
        for j in 0..i {
            let Some(p) = beta.pow(j, col) else { continue };
            let ok = Ring::LaurentC.element_sign(v[j].1, p) == if d_ring { 1 } else { g.sign };
            if ok && rng.gen_bool(0.5) {
                beta.add_term(j, col, p, q(rng.gen_range(-3..=3)))?;
            }
        }
    }
    Ok((module, beta))
}

/// A random object satisfying the star condition.
pub fn random_object<R: Rng>(rng: &mut R, spec: &RandomSpec) -> Result<ToralObject> {
    let n_v = rng.gen_range(0..=spec.max_v);
    let v: SignedBasis = (0..n_v).map(|_| (spec.degree(rng, spec.lo + 2, spec.hi - 4), sign(rng))).collect();
    let mut keys: Vec<u32> = (1..=spec.max_slot).collect();
    keys.shuffle(rng);
    let n_keys = rng.gen_range(0..=spec.max_explicit.min(keys.len()));
    let mut keys: Vec<u32> = keys[..n_keys].to_vec();
    if spec.side == Side::SO3 && !keys.contains(&1) {
        keys.push(1);
    }
    let mut explicit = BTreeMap::new();
    let mut beta = BTreeMap::new();
    for k in keys {
        let (m, b) = random_slot(rng, spec, spec.side.slot_ring(k), &v)?;
        explicit.insert(k, m);
        beta.insert(k, b);
    }
    // Tails stay free so that hom spaces are finite dimensional.
    let tail_spec = RandomSpec { max_torsion: 0, ..*spec };
    let (tail, beta_tail) = random_slot(rng, &tail_spec, Ring::PolyC, &v)?;
    let fam = SlotFamily::new(spec.side, explicit, tail)?;
    ToralObject::new(fam, v, beta, beta_tail, None)
}

/// A random combination of the degree-n hom basis.
pub fn random_morphism<R: Rng>(rng: &mut R, x: &ToralObject, y: &ToralObject, n: i64) -> Result<ToralMorphism> {
    let mut f = ToralMorphism::zero(x, y, n)?;
    for b in hom_basis_a(x, y, n)? {
        let c = rng.gen_range(-2..=2);
        if c != 0 {
            f = f.add(&b.scale(&q(c)))?;
        }
    }
    Ok(f)
}

/// A random object with differential: zero differentials, cones of the
/// identity (acyclic), cones of random endomorphisms and cones of random
/// maps between independent objects.
pub fn random_differential_object<R: Rng>(rng: &mut R, spec: &RandomSpec) -> Result<ToralObject> {
    let x = random_object(rng, spec)?;
    match rng.gen_range(0..4) {
        0 => {
            let d = x.diff_or_zero()?;
            x.with_differential(d)
        }
        1 => cone(&ToralMorphism::identity(&x)),
        2 => {
            let f = random_morphism(rng, &x, &x, 0)?;
            cone(&f)
        }
        _ => {
            let y = random_object(rng, spec)?;
            let f = random_morphism(rng, &x, &y, 0)?;
            cone(&f)
        }
    }
}

/// A random element: slot, degree and coordinates in the monomial basis.
pub fn random_element<R: Rng>(rng: &mut R, x: &ToralObject) -> Option<(Slot, i64, Vec<crate::linalg::Rational>)> {
    let mut cands = Vec::new();
    for s in x.slots() {
        let m = x.module(s);
        for sm in m.summands() {
            for a in 0..3 {
                if sm.alive(a) {
                    cands.push((s, sm.shift - m.step() * a));
                }
            }
        }
    }
    cands.sort();
    cands.dedup();
    let &(s, e) = cands.choose(rng)?;
    let dim = x.module(s).dim_at(e);
    let mut v: Vec<_> = (0..dim).map(|_| q(rng.gen_range(-2..=2))).collect();
    if v.iter().all(num_traits::Zero::is_zero) {
        v[rng.gen_range(0..dim)] = q(1);
    }
    Some((s, e, v))
}
