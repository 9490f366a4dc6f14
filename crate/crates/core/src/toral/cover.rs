//! Covers of elements by wide spheres: objects whose slot modules are
//! submodules of Laurent series on a vector space T, generated by a
//! distinguished element and by powers of the Euler class times the basis
//! of T, mapping to x by sending each generator to a preimage under beta.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::functors::{make_ev, torsion_object};
use super::{laurent_tensor, Slot, SlotFamily, ToralMorphism, ToralObject};
use crate::error::{Error, Result};
use crate::graded::{
    auto_window, canonicalize, GradedModule, ModuleMap, Persistence, Ring, SignedBasis, Subquotient, Summand, Window,
};
use crate::linalg::{is_zero_vec, QMatrix, Rational};

/// An element of one slot: coordinates in the monomial basis of the degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    pub slot: Slot,
    pub degree: i64,
    pub coords: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub struct Cover {
    pub sphere: ToralObject,
    pub map: ToralMorphism,
}

impl Cover {
    /// Whether the element lies in the image of the map.
    pub fn hits(&self, n: &Element) -> bool {
        let m = self.map.alpha(n.slot).matrix_at(n.degree);
        if is_zero_vec(&n.coords) {
            return true;
        }
        if m.cols() == 0 {
            return false;
        }
        m.solve_vec(&n.coords).is_some()
    }
}

fn check_element(x: &ToralObject, n: &Element) -> Result<()> {
    let dim = x.module(n.slot).dim_at(n.degree);
    if n.coords.len() != dim {
        return Err(Error::ElementNotFound(format!(
            "slot {} has dimension {dim} in degree {}, got {} coordinates",
            n.slot.key(),
            n.degree,
            n.coords.len()
        )));
    }
    if let Slot::At(k) = n.slot {
        if !x.family().explicit().contains_key(&k) {
            return Err(Error::ElementNotFound(format!("slot {k} is not explicit; use the tail")));
        }
    }
    Ok(())
}

/// A wide sphere with a map to x whose image contains n.
pub fn wide_sphere_cover(x: &ToralObject, n: &Element) -> Result<Cover> {
    x.require_star()?;
    check_element(x, n)?;
    let x = x.without_differential();
    let m = x.module(n.slot);
    if is_zero_vec(&n.coords) {
        let z = zero_like(&x)?;
        return Ok(Cover { map: ToralMorphism::zero(&z, &x, 0)?, sphere: z });
    }
    // Split into eigenvectors first.
    let signs = m.signs_at(n.degree);
    let part = |s: i8| -> Vec<Rational> {
        n.coords.iter().zip(&signs).map(|(c, &t)| if t == s { c.clone() } else { Rational::zero() }).collect()
    };
    let (plus, minus) = (part(1), part(-1));
    if !is_zero_vec(&plus) && !is_zero_vec(&minus) {
        let a = wide_sphere_cover(&x, &Element { coords: plus, ..n.clone() })?;
        let b = wide_sphere_cover(&x, &Element { coords: minus, ..n.clone() })?;
        return sum_covers(&x, &[a, b]);
    }
    let eps = if is_zero_vec(&plus) { -1 } else { 1 };
    let bn = x.beta(n.slot).matrix_at(n.degree).mul_vec(&n.coords);
    if is_zero_vec(&bn) {
        return torsion_cover(&x, n);
    }
    sphere_cover(&x, n, eps, &bn)
}

fn zero_like(x: &ToralObject) -> Result<ToralObject> {
    let explicit = x.explicit_indices().into_iter().map(|k| (k, GradedModule::zero(x.side().slot_ring(k)))).collect();
    torsion_object(&SlotFamily::new(x.side(), explicit, GradedModule::zero(Ring::PolyC))?)
}

/// Elements killed by beta are torsion; they are covered by a cyclic
/// torsion module at their slot.
fn torsion_cover(x: &ToralObject, n: &Element) -> Result<Cover> {
    let m = x.module(n.slot);
    let mut len = 0u32;
    let mut v = n.coords.clone();
    let mut e = n.degree;
    while !is_zero_vec(&v) {
        v = m.mul_power(e, &v, 1);
        e -= m.step();
        len += 1;
        if len > 10_000 {
            return Err(Error::NotTorsion("element in the kernel of beta is not torsion".into()));
        }
    }
    let ring = m.ring();
    let sign = m.signs_at(n.degree).iter().zip(&n.coords).find(|(_, c)| !c.is_zero()).map(|(s, _)| *s).unwrap_or(1);
    let cyc = GradedModule::cyclic(ring, Summand::torsion(len, n.degree, sign));
    let mut explicit: BTreeMap<u32, GradedModule> = BTreeMap::new();
    let mut tail = GradedModule::zero(Ring::PolyC);
    for k in x.explicit_indices() {
        explicit.insert(k, GradedModule::zero(x.side().slot_ring(k)));
    }
    match n.slot {
        Slot::At(k) => {
            explicit.insert(k, cyc.clone());
        }
        Slot::Tail => tail = cyc.clone(),
    }
    let sphere = torsion_object(&SlotFamily::new(x.side(), explicit, tail)?)?;
    let col = element_column(m, n.degree, &n.coords);
    let mut alpha = BTreeMap::new();
    for s in x.slots() {
        let mut a = ModuleMap::zero(sphere.module(s), x.module(s), 0)?;
        if s == n.slot {
            for (r, p, c) in &col {
                a.add_term(*r, 0, *p, c.clone())?;
            }
        }
        if let Slot::At(k) = s {
            alpha.insert(k, a);
        } else {
            let map = ToralMorphism::new(&sphere, x, 0, alpha.clone(), a, QMatrix::zeros(x.v().len(), 0))?;
            return Ok(Cover { sphere, map });
        }
    }
    unreachable!("the tail slot comes last")
}

/// Terms (summand, exponent, coefficient) of a vector in degree e, as the
/// image of a generator sitting in degree e.
fn element_column(m: &GradedModule, e: i64, v: &[Rational]) -> Vec<(usize, i64, Rational)> {
    m.basis_at(e).into_iter().zip(v).filter(|(_, c)| !c.is_zero()).map(|((i, a), c)| (i, a, c.clone())).collect()
}

/// Smallest exponent E with c^E t_i in the image of beta at this slot,
/// with a preimage in degree deg t_i - 2E.
fn min_preimage(x: &ToralObject, s: Slot, i: usize) -> Result<(i64, Vec<Rational>)> {
    let m = x.module(s);
    let b = x.beta(s);
    let lv = b.codomain();
    let (deg, sign) = x.v()[i];
    let top = m.max_shift().unwrap_or(deg);
    let mut e_min = (deg - top).div_euclid(2);
    let d_slot = !m.ring().is_c();
    if d_slot && Ring::LaurentC.element_sign(sign, e_min) != 1 {
        e_min += 1;
    }
    let step = if d_slot { 2 } else { 1 };
    let limit = e_min + 2 * (m.len() as i64 + m.max_len() as i64 + 8) + 2 * crate::graded::max_pow(b);
    let mut big_e = e_min;
    while big_e <= limit {
        let e = deg - 2 * big_e;
        let basis = lv.basis_at(e);
        if let Some(pos) = basis.iter().position(|&(r, a)| r == i && a == big_e) {
            let mut target = vec![Rational::zero(); basis.len()];
            target[pos] = Rational::one();
            let mat = b.matrix_at(e);
            if mat.cols() > 0 {
                if let Some(q) = mat.solve_vec(&target) {
                    return Ok((big_e, q));
                }
            }
        }
        big_e += step;
    }
    Err(Error::StarViolation(format!("no preimage of a power of the Euler class times basis vector {i}")))
}

fn sphere_cover(x: &ToralObject, n: &Element, eps: i8, bn: &[Rational]) -> Result<Cover> {
    let lv = x.lv();
    let basis = lv.basis_at(n.degree);
    // beta(n) = sum coef_i c^{p_i} t_i.
    let mut terms: Vec<(usize, i64, Rational)> = Vec::new();
    for ((i, p), c) in basis.into_iter().zip(bn) {
        if !c.is_zero() {
            terms.push((i, p, c.clone()));
        }
    }
    let slots = x.slots();
    let mut e0: BTreeMap<(Slot, usize), (i64, Vec<Rational>)> = BTreeMap::new();
    let mut m_low = 0i64;
    for &s in &slots {
        for &(i, p, _) in &terms {
            let (e, q) = min_preimage(x, s, i)?;
            m_low = m_low.max(e - p);
            e0.insert((s, i), (e, q));
        }
    }
    let parity = if eps < 0 { 1 } else { 0 };
    let mut mm = m_low;
    if mm.rem_euclid(2) != parity {
        mm += 1;
    }
    // Raise m until c^m n agrees with the chosen preimages.
    let mod_n = x.module(n.slot);
    let pre = |s: Slot, i: usize, big_e: i64| -> Vec<Rational> {
        let (e, q) = &e0[&(s, i)];
        let (deg, _) = x.v()[i];
        let module = x.module(s);
        let k = (big_e - e) / if module.ring().is_c() { 1 } else { 2 };
        module.mul_power(deg - 2 * e, q, k)
    };
    let mut tries = 0;
    loop {
        let step_m = if mod_n.ring().is_c() { mm } else { mm / 2 };
        let mut defect = mod_n.mul_power(n.degree, &n.coords, step_m);
        for (i, p, c) in &terms {
            let q = pre(n.slot, *i, p + mm);
            for (d, v) in defect.iter_mut().zip(q) {
                *d -= c * &v;
            }
        }
        if is_zero_vec(&defect) {
            break;
        }
        mm += 2;
        tries += 1;
        if tries > 200 {
            return Err(Error::NotTorsion("defect is not killed by powers of the Euler class".into()));
        }
    }
    // The sphere: T spanned by the t_i, generators g_i = c^{E_i} t_i everywhere
    // plus g0 = sum coef_i c^{p_i} t_i at the slot of n.
    let t_idx: Vec<usize> = terms.iter().map(|t| t.0).collect();
    let t_basis: SignedBasis = t_idx.iter().map(|&i| x.v()[i]).collect();
    let ev = make_ev(x.side(), &t_basis)?;
    let lt = laurent_tensor(&t_basis);
    let mut explicit = BTreeMap::new();
    let mut beta = BTreeMap::new();
    let mut alpha = BTreeMap::new();
    let mut tail_parts = None;
    for &s in &slots {
        let amb = ev.module(s);
        // Generators as (degree, ambient vector, image in x).
        let mut gens: Vec<(i64, Vec<Rational>, Vec<Rational>)> = Vec::new();
        for (j, &(i, p, _)) in terms.iter().enumerate() {
            let big_e = p + mm;
            let deg = x.v()[i].0 - 2 * big_e;
            gens.push((deg, ambient_vector(amb, ev.beta(s), deg, j, big_e), pre(s, i, big_e)));
        }
        if s == n.slot {
            let mut v0 = vec![Rational::zero(); amb.dim_at(n.degree)];
            for (j, (_, p, c)) in terms.iter().enumerate() {
                let w = ambient_vector(amb, ev.beta(s), n.degree, j, *p);
                for (a, b) in v0.iter_mut().zip(w) {
                    *a += c * &b;
                }
            }
            gens.push((n.degree, v0, n.coords.clone()));
        }
        let (module, b, a) = span_module(amb, ev.beta(s), &lt, x.module(s), &gens)?;
        match s {
            Slot::At(k) => {
                explicit.insert(k, module);
                beta.insert(k, b);
                alpha.insert(k, a);
            }
            Slot::Tail => tail_parts = Some((module, b, a)),
        }
    }
    let (tail, beta_tail, alpha_tail) = tail_parts.expect("tail slot");
    let sphere = ToralObject::new(SlotFamily::new(x.side(), explicit, tail)?, t_basis, beta, beta_tail, None)?;
    let mut phi = QMatrix::zeros(x.v().len(), t_idx.len());
    for (j, &i) in t_idx.iter().enumerate() {
        phi.set(i, j, Rational::one());
    }
    let map = ToralMorphism::new(&sphere, x, 0, alpha, alpha_tail, phi)?;
    Ok(Cover { sphere, map })
}

/// The vector of c^E t_j in the ambient e(T) module at degree `deg`.
fn ambient_vector(amb: &GradedModule, amb_beta: &ModuleMap, deg: i64, j: usize, big_e: i64) -> Vec<Rational> {
    // Read through beta of e(T), which is an isomorphism onto Laurent series.
    let lt = amb_beta.codomain();
    let lb = lt.basis_at(deg);
    let mut target = vec![Rational::zero(); lb.len()];
    if let Some(pos) = lb.iter().position(|&(r, a)| r == j && a == big_e) {
        target[pos] = Rational::one();
    }
    let mat = amb_beta.matrix_at(deg);
    let _ = amb;
    mat.solve_vec(&target).expect("e(T) is Laurent series on T")
}

/// The submodule of `amb` generated by the given vectors, in canonical form,
/// with its structure map and the map to x sending each generator to its
/// prescribed image.
fn span_module(
    amb: &GradedModule,
    amb_beta: &ModuleMap,
    lt: &GradedModule,
    target: &GradedModule,
    gens: &[(i64, Vec<Rational>, Vec<Rational>)],
) -> Result<(GradedModule, ModuleMap, ModuleMap)> {
    let ring = if amb.ring().is_c() { Ring::PolyC } else { Ring::PolyD };
    let step = ring.step();
    if gens.is_empty() {
        let z = GradedModule::zero(ring);
        return Ok((z.clone(), ModuleMap::zero(&z, lt, 0)?, ModuleMap::zero(&z, target, 0)?));
    }
    let hi = gens.iter().map(|g| g.0).max().unwrap() + step;
    let lo_gen = gens.iter().map(|g| g.0).min().unwrap();
    let spread = hi - lo_gen;
    let window = Window::new(lo_gen - spread - 4 * step - 8, hi)?;
    let ambient = Persistence::of_module(amb, window);
    // Candidates in degree e: x^a g for every generator g with a >= 0.
    let candidates = |e: i64| -> (QMatrix, Vec<(usize, i64)>) {
        let mut cols = Vec::new();
        let mut which = Vec::new();
        for (gi, (deg, v, _)) in gens.iter().enumerate() {
            if deg < &e || (deg - e) % step != 0 {
                continue;
            }
            let a = (deg - e) / step;
            cols.push(amb.mul_power(*deg, v, a));
            which.push((gi, a));
        }
        (QMatrix::from_columns(amb.dim_at(e), &cols), which)
    };
    let mut cycles = BTreeMap::new();
    for e in window.degrees() {
        let (c, _) = candidates(e);
        cycles.insert(e, if c.cols() == 0 { QMatrix::zeros(amb.dim_at(e), 0) } else { c.image_basis() });
    }
    let sq = Subquotient { ambient: &ambient, cycles, boundaries: BTreeMap::new() };
    let quotient = sq.quotient()?;
    let canonical = canonicalize(&quotient.p, ring)?;
    if canonical.module.summands().iter().any(|s| s.kind != crate::graded::Kind::Free) {
        return Err(Error::StarViolation("wide sphere slot is not free on the window".into()));
    }
    let lifts: Vec<(i64, Vec<Rational>)> =
        canonical.gens.iter().map(|(b, v)| (*b, quotient.lift[b].mul_vec(v))).collect();
    let incl = canonical.to_map(amb, &lifts)?;
    let module = canonical.module.clone();
    let beta = amb_beta.compose(&incl)?.rebase(&module, lt, 0)?;
    let mut alpha = ModuleMap::zero(&module, target, 0)?;
    for (col, (b, u)) in lifts.iter().enumerate() {
        let (c, which) = candidates(*b);
        let lambda = c.solve_vec(u).ok_or_else(|| Error::StarViolation("generator outside the span".into()))?;
        let mut img = vec![Rational::zero(); target.dim_at(*b)];
        for (l, &(gi, a)) in lambda.iter().zip(&which) {
            if l.is_zero() {
                continue;
            }
            let w = target.mul_power(gens[gi].0, &gens[gi].2, a);
            for (x, y) in img.iter_mut().zip(w) {
                *x += l * &y;
            }
        }
        for (r, p, v) in element_column(target, *b, &img) {
            alpha.add_term(r, col, p, v)?;
        }
    }
    Ok((module, beta, alpha))
}

/// Sum of several covers of x as one map out of the direct sum.
fn sum_covers(x: &ToralObject, covers: &[Cover]) -> Result<Cover> {
    let mut sphere = covers[0].sphere.clone();
    for c in &covers[1..] {
        sphere = sphere.direct_sum(&c.sphere)?;
    }
    let slots: Vec<Slot> = x.slots();
    let mut alpha = BTreeMap::new();
    let mut alpha_tail = None;
    for s in slots {
        let mut a = ModuleMap::zero(sphere.module(s), x.module(s), 0)?;
        let mut off = 0;
        for c in covers {
            let f = c.map.alpha(s);
            for (&(r, col), v) in f.entries() {
                a.add_term(r, off + col, f.pow(r, col).expect("homogeneous"), v.clone())?;
            }
            off += c.sphere.module(s).len();
        }
        match s {
            Slot::At(k) => {
                alpha.insert(k, a);
            }
            Slot::Tail => alpha_tail = Some(a),
        }
    }
    let mut phi = QMatrix::zeros(x.v().len(), 0);
    for c in covers {
        phi = phi.hstack(c.map.phi());
    }
    let map = ToralMorphism::new(&sphere, x, 0, alpha, alpha_tail.expect("tail slot"), phi)?;
    Ok(Cover { sphere, map })
}

/// Generators of every slot summand of x, as elements.
pub fn generating_set(x: &ToralObject) -> Vec<Element> {
    let mut out = Vec::new();
    for s in x.slots() {
        let m = x.module(s);
        for (i, sm) in m.summands().iter().enumerate() {
            let b = m.basis_at(sm.shift);
            let mut coords = vec![Rational::zero(); b.len()];
            let pos = b.iter().position(|&(j, a)| j == i && a == 0).expect("generator");
            coords[pos] = Rational::one();
            out.push(Element { slot: s, degree: sm.shift, coords });
        }
    }
    out
}

/// Covers of a generating set assembled into one map; returns it together
/// with the outcome of the degreewise surjectivity check.
pub fn cover_generating_set(x: &ToralObject) -> Result<(Cover, bool)> {
    let gens = generating_set(x);
    let covers: Vec<Cover> = gens.iter().map(|n| wide_sphere_cover(x, n)).collect::<Result<_>>()?;
    let cover = if covers.is_empty() {
        let z = zero_like(x)?;
        Cover { map: ToralMorphism::zero(&z, x, 0)?, sphere: z }
    } else {
        sum_covers(x, &covers)?
    };
    Ok((cover.clone(), is_surjective(&cover.map)))
}

/// Degreewise surjectivity on a window covering the target, and on V.
pub fn is_surjective(f: &ToralMorphism) -> bool {
    let y = f.target();
    if f.phi().rank() != y.v().len() {
        return false;
    }
    f.slots().into_iter().all(|s| {
        let a = f.alpha(s);
        let w = auto_window(&[a.domain(), a.codomain()], 0);
        w.degrees().all(|e| a.matrix_at(e).rank() == a.codomain().dim_at(e))
    })
}
