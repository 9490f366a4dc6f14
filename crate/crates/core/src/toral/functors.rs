use std::collections::BTreeMap;

use num_traits::One;

use super::{laurent_tensor, Differential, Side, Slot, SlotFamily, ToralMorphism, ToralObject};
use crate::error::{Error, Result};
use crate::graded::{
    base_change_d_to_c, base_change_map, fixed_inclusion, fixed_points_c_to_d, fixed_points_map, GradedModule,
    ModuleMap, Ring, SignedBasis, Summand,
};
use crate::linalg::{QMatrix, Rational};

/// Extension of scalars from the SO(3) side to the O(2) side: slot 1 is
/// base changed along d = c^2, everything else is kept.
pub fn functor_f(x: &ToralObject) -> Result<ToralObject> {
    if x.side() != Side::SO3 {
        return Err(Error::GroupMismatch("F takes an SO(3)-side object".into()));
    }
    x.require_star()?;
    let mut explicit = x.family().explicit().clone();
    let m1 = base_change_d_to_c(&explicit[&1])?;
    explicit.insert(1, m1);
    let mut beta = BTreeMap::new();
    for k in x.explicit_indices() {
        let b = x.beta(Slot::At(k));
        beta.insert(k, if k == 1 { base_change_map(b)? } else { b.clone() });
    }
    let diff = match x.diff() {
        None => None,
        Some(d) => {
            let mut slots = d.slots.clone();
            slots.insert(1, base_change_map(&d.slots[&1])?);
            Some(Differential { slots, tail: d.tail.clone(), v: d.v.clone() })
        }
    };
    let m = SlotFamily::new(Side::O2, explicit, x.module(Slot::Tail).clone())?;
    ToralObject::new(m, x.v().clone(), beta, x.beta(Slot::Tail).clone(), diff)
}

/// Right adjoint of F: fixed points at slot 1, structure map restricted
/// along the inclusion of fixed points.
pub fn functor_r(y: &ToralObject) -> Result<ToralObject> {
    if y.side() != Side::O2 {
        return Err(Error::GroupMismatch("R takes an O(2)-side object".into()));
    }
    y.require_star()?;
    let y = y.with_explicit(1);
    let mut explicit = y.family().explicit().clone();
    let m1 = explicit[&1].clone();
    explicit.insert(1, fixed_points_c_to_d(&m1)?);
    let incl = fixed_inclusion(&m1)?;
    let mut beta = BTreeMap::new();
    for k in y.explicit_indices() {
        let b = y.beta(Slot::At(k));
        beta.insert(k, if k == 1 { b.compose(&incl)? } else { b.clone() });
    }
    let diff = match y.diff() {
        None => None,
        Some(d) => {
            let mut slots = d.slots.clone();
            slots.insert(1, fixed_points_map(&d.slots[&1])?);
            Some(Differential { slots, tail: d.tail.clone(), v: d.v.clone() })
        }
    };
    let m = SlotFamily::new(Side::SO3, explicit, y.module(Slot::Tail).clone())?;
    ToralObject::new(m, y.v().clone(), beta, y.beta(Slot::Tail).clone(), diff)
}

pub fn functor_f_map(f: &ToralMorphism) -> Result<ToralMorphism> {
    let (x, y) = (functor_f(f.source())?, functor_f(f.target())?);
    let mut alpha = BTreeMap::new();
    for s in f.slots() {
        if let Slot::At(k) = s {
            let a = f.alpha(s);
            alpha.insert(k, if k == 1 { base_change_map(a)? } else { a.clone() });
        }
    }
    ToralMorphism::new(&x, &y, f.degree(), alpha, f.alpha(Slot::Tail).clone(), f.phi().clone())
}

pub fn functor_r_map(f: &ToralMorphism) -> Result<ToralMorphism> {
    let (x, y) = (functor_r(f.source())?, functor_r(f.target())?);
    let mut alpha = BTreeMap::new();
    for s in f.slots().into_iter().chain([Slot::At(1)]) {
        if let Slot::At(k) = s {
            let a = f.alpha(s);
            alpha.insert(k, if k == 1 { fixed_points_map(a)? } else { a.clone() });
        }
    }
    ToralMorphism::new(&x, &y, f.degree(), alpha, f.alpha(Slot::Tail).clone(), f.phi().clone())
}

/// The unit x -> RF(x), which is the identity.
pub fn unit(x: &ToralObject) -> Result<ToralMorphism> {
    let rf = functor_r(&functor_f(x)?)?;
    if rf != *x {
        return Err(Error::InvalidMorphism("RF(x) differs from x".into()));
    }
    Ok(ToralMorphism::identity(x))
}

/// The counit FR(y) -> y: slot 1 sends the base change of the fixed points
/// into the module by the inclusion, everything else is the identity.
pub fn counit(y: &ToralObject) -> Result<ToralMorphism> {
    let fr = functor_f(&functor_r(y)?)?;
    let y1 = y.with_explicit(1);
    let incl = fixed_inclusion(y1.module(Slot::At(1)))?;
    let mut a1 = ModuleMap::zero(fr.module(Slot::At(1)), y1.module(Slot::At(1)), 0)?;
    for (&(r, c), v) in incl.entries() {
        a1.add_term(r, c, incl.pow(r, c).expect("homogeneous"), v.clone())?;
    }
    let mut alpha = BTreeMap::new();
    for k in fr.explicit_indices() {
        let s = Slot::At(k);
        alpha.insert(k, if k == 1 { a1.clone() } else { ModuleMap::identity(fr.module(s)) });
    }
    let alpha_tail = ModuleMap::identity(fr.module(Slot::Tail));
    ToralMorphism::new(&fr, &y1, 0, alpha, alpha_tail, QMatrix::identity(y.v().len()))
}

/// F followed by tensoring with the sign representation.
pub fn twisted_f(x: &ToralObject) -> Result<ToralObject> {
    functor_f(x)?.twist()
}

/// R precomposed with the twist.
pub fn twisted_r(y: &ToralObject) -> Result<ToralObject> {
    functor_r(&y.twist()?)
}

pub fn twist_map(f: &ToralMorphism) -> Result<ToralMorphism> {
    f.rebase(&f.source().twist()?, &f.target().twist()?, f.degree())
}

pub fn twisted_f_map(f: &ToralMorphism) -> Result<ToralMorphism> {
    twist_map(&functor_f_map(f)?)
}

pub fn twisted_r_map(f: &ToralMorphism) -> Result<ToralMorphism> {
    functor_r_map(&twist_map(f)?)
}

/// Counit of the twisted pair: the twist of the counit at the twisted object.
pub fn twisted_counit(y: &ToralObject) -> Result<ToralMorphism> {
    let e = counit(&y.twist()?)?;
    let src = e.source().twist()?;
    let tgt = e.target().twist()?;
    e.rebase(&src, &tgt, 0)
}

/// The injective e(V): Laurent copies of V at every slot with the inclusion
/// as structure map (at SO(3) slot 1, the -1 eigenvectors sit two degrees up).
pub fn make_ev(side: Side, v: &SignedBasis) -> Result<ToralObject> {
    let lv = laurent_tensor(v);
    let mut explicit = BTreeMap::new();
    let mut beta = BTreeMap::new();
    if side == Side::SO3 {
        let summands: Vec<Summand> =
            v.iter().map(|&(d, s)| Summand::laurent(if s > 0 { d } else { d + 2 }, 1)).collect();
        let m1 = GradedModule::new(Ring::PolyD, summands)?;
        let mut b = ModuleMap::zero(&m1, &lv, 0)?;
        for (i, &(_, s)) in v.iter().enumerate() {
            b.add_term(i, i, if s > 0 { 0 } else { -1 }, Rational::one())?;
        }
        explicit.insert(1, m1);
        beta.insert(1, b);
    }
    let tail = GradedModule::new(Ring::PolyC, v.iter().map(|&(d, s)| Summand::laurent(d, s)).collect())?;
    let beta_tail = ModuleMap::identity(&tail).rebase(&tail, &lv, 0)?;
    let m = SlotFamily::new(side, explicit, tail)?;
    ToralObject::new(m, v.clone(), beta, beta_tail, None)
}

/// f(N) = (N -> 0) for N torsion at finitely many slots.
pub fn make_fn(n: &SlotFamily) -> Result<ToralObject> {
    if !n.tail().is_empty() {
        return Err(Error::NotTorsion("f(N) needs N to vanish outside finitely many slots".into()));
    }
    if let Some((k, _)) = n.explicit().iter().find(|(_, m)| !m.is_torsion()) {
        return Err(Error::NotTorsion(format!("slot {k} is not torsion")));
    }
    torsion_object(n)
}

/// (N -> 0) for any torsion family, tail included.
pub(crate) fn torsion_object(n: &SlotFamily) -> Result<ToralObject> {
    if !n.is_torsion() {
        return Err(Error::NotTorsion("every slot must be torsion".into()));
    }
    let lv = laurent_tensor(&[]);
    let mut beta = BTreeMap::new();
    for (&k, m) in n.explicit() {
        beta.insert(k, ModuleMap::zero(m, &lv, 0)?);
    }
    let beta_tail = ModuleMap::zero(n.tail(), &lv, 0)?;
    ToralObject::new(n.clone(), Vec::new(), beta, beta_tail, None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Sigma1,
    SigmaH(u32),
    SigmaT,
    S0,
    SigmaTMinus,
}

impl Generator {
    pub fn name(self) -> String {
        match self {
            Generator::Sigma1 => "sigma1".into(),
            Generator::SigmaH(n) => format!("sigmaH:{n}"),
            Generator::SigmaT => "sigmaT".into(),
            Generator::S0 => "S0".into(),
            Generator::SigmaTMinus => "sigmaT-".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Generator> {
        match s {
            "sigma1" => Ok(Generator::Sigma1),
            "sigmaT" => Ok(Generator::SigmaT),
            "S0" => Ok(Generator::S0),
            "sigmaT-" => Ok(Generator::SigmaTMinus),
            _ => match s.strip_prefix("sigmaH:") {
                Some(n) => n.parse().map(Generator::SigmaH).map_err(|_| Error::Parse(format!("bad index in {s:?}"))),
                None => Err(Error::Parse(format!("unknown generator {s:?}"))),
            },
        }
    }

    /// Generators with cyclic indices up to `max_slot`.
    pub fn truncated(max_slot: u32) -> Vec<Generator> {
        let mut out = vec![Generator::Sigma1];
        out.extend((2..=max_slot).map(Generator::SigmaH));
        out.extend([Generator::SigmaT, Generator::S0, Generator::SigmaTMinus]);
        out
    }
}

fn single_slot(side: Side, k: u32, module: GradedModule) -> Result<SlotFamily> {
    SlotFamily::new(side, [(k, module)].into(), GradedModule::zero(Ring::PolyC))
}

pub fn make_generator(g: Generator) -> Result<ToralObject> {
    match g {
        Generator::Sigma1 => make_fn(&single_slot(Side::SO3, 1, GradedModule::cyclic(Ring::PolyD, Summand::torsion(1, 0, 1)))?),
        Generator::SigmaH(n) => {
            if n < 2 {
                return Err(Error::BadIndex(format!("cyclic generators need index at least 2, got {n}")));
            }
            let m = GradedModule::new(Ring::PolyC, vec![Summand::torsion(1, 0, 1), Summand::torsion(1, 0, -1)])?;
            make_fn(&single_slot(Side::SO3, n, m)?)
        }
        Generator::S0 => sphere_part(0, 1, 0),
        Generator::SigmaTMinus => sphere_part(2, -1, -1),
        Generator::SigmaT => sphere_part(0, 1, 0)?.direct_sum(&sphere_part(2, -1, -1)?),
    }
}

/// Slot 1 a free d-module on one generator of degree `shift`, the tail a
/// free c-module on one generator of degree 0 with eigenvalue `sign`, V one
/// vector of degree 0, beta = c^pow at slot 1 and the identity elsewhere.
fn sphere_part(shift: i64, sign: i8, pow: i64) -> Result<ToralObject> {
    let v = vec![(0, sign)];
    let lv = laurent_tensor(&v);
    let m1 = GradedModule::cyclic(Ring::PolyD, Summand::free(shift, 1));
    let mut b1 = ModuleMap::zero(&m1, &lv, 0)?;
    b1.add_term(0, 0, pow, Rational::one())?;
    let tail = GradedModule::cyclic(Ring::PolyC, Summand::free(0, sign));
    let mut bt = ModuleMap::zero(&tail, &lv, 0)?;
    bt.add_term(0, 0, 0, Rational::one())?;
    let m = SlotFamily::new(Side::SO3, [(1, m1)].into(), tail)?;
    ToralObject::new(m, v, [(1, b1)].into(), bt, None)
}

/// alpha_H^n: Q[d]/d^n at slot 1 or Q[c]/c^n at slot H.
pub fn make_alpha(h: u32, n: u32) -> Result<ToralObject> {
    if h == 0 || n == 0 {
        return Err(Error::BadIndex("alpha needs a slot index and length of at least 1".into()));
    }
    let ring = Side::SO3.slot_ring(h);
    make_fn(&single_slot(Side::SO3, h, GradedModule::cyclic(ring, Summand::torsion(n, 0, 1)))?)
}

/// Stage k of the colimit for the universal F-bar space: the first k
/// negative powers of the Euler class at slots 1..=k, desuspended twice.
pub fn make_ef_bar_plus(k: u32) -> Result<ToralObject> {
    if k == 0 {
        return Err(Error::BadIndex("truncation must be at least 1".into()));
    }
    let kk = k as i64;
    let mut explicit = BTreeMap::new();
    explicit.insert(1, GradedModule::cyclic(Ring::PolyD, Summand::torsion(k, 4 * kk - 2, 1)));
    let sign = if k % 2 == 0 { 1 } else { -1 };
    for h in 2..=k {
        explicit.insert(h, GradedModule::cyclic(Ring::PolyC, Summand::torsion(k, 2 * kk - 2, sign)));
    }
    make_fn(&SlotFamily::new(Side::SO3, explicit, GradedModule::zero(Ring::PolyC))?)
}

/// Tensor of each slot with a torsion family, as a torsion object.
pub fn smash_with_torsion(x: &ToralObject, n: &SlotFamily) -> Result<ToralObject> {
    if x.side() != n.side() {
        return Err(Error::GroupMismatch("smash across sides".into()));
    }
    if !n.tail().is_empty() || !n.is_torsion() {
        return Err(Error::NotTorsion("smash needs a torsion family vanishing outside finitely many slots".into()));
    }
    let mut explicit = BTreeMap::new();
    for (&k, nk) in n.explicit() {
        let mk = x.module(Slot::At(k));
        let mut out = Vec::new();
        for a in mk.summands() {
            for b in nk.summands() {
                let len = match a.kind {
                    crate::graded::Kind::Free => b.len(),
                    crate::graded::Kind::Torsion(l) => l.min(b.len()),
                    crate::graded::Kind::Laurent => continue,
                };
                out.push(Summand::torsion(len, a.shift + b.shift, a.sign * b.sign));
            }
        }
        explicit.insert(k, GradedModule::new(nk.ring(), out)?.canonical());
    }
    make_fn(&SlotFamily::new(x.side(), explicit, GradedModule::zero(Ring::PolyC))?)
}
