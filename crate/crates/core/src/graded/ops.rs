use num_traits::{One, Zero};

use super::window::{Canonical, Quotient};
use super::{auto_window, canonicalize, GradedModule, Kind, ModuleMap, Persistence, Ring, Subquotient, Summand, Window};
use crate::error::{Error, Result};
use crate::linalg::Rational;

/// Canonical form of the cokernel of `relations` (a map into the free module
/// `gens`).
pub fn smith_canonical(gens: &GradedModule, relations: &ModuleMap) -> Result<GradedModule> {
    if gens.ring().is_laurent() {
        return Err(Error::Schema("presentations are over Q[c] or Q[d]".into()));
    }
    if relations.codomain() != gens || relations.degree() != 0 {
        return Err(Error::InhomogeneousRelation("relations must be a degree-0 map into the generators".into()));
    }
    let max_pow = max_pow(relations);
    let w = auto_window(&[gens, relations.domain()], max_pow);
    let amb = Persistence::of_module(gens, w);
    let boundaries = w.degrees().map(|e| (e, relations.matrix_at(e))).collect();
    let sq = Subquotient { ambient: &amb, cycles: Default::default(), boundaries };
    let quot = sq.quotient()?;
    Ok(canonicalize(&quot.p, gens.ring())?.module)
}

/// Builds generators and a relation map from relation vectors, each a list of
/// (generator, exponent, coefficient). Every relation must be homogeneous in
/// degree and involution eigenvalue.
pub fn presentation(
    ring: Ring,
    gens: &[(i64, i8)],
    relations: &[Vec<(usize, i64, Rational)>],
) -> Result<(GradedModule, ModuleMap)> {
    let gm = GradedModule::new(ring, gens.iter().map(|&(k, s)| Summand::free(k, s)).collect())?;
    let mut rel_summands = Vec::new();
    for (n, rel) in relations.iter().enumerate() {
        let mut deg_sign = None;
        for &(g, p, _) in rel {
            if g >= gens.len() || p < 0 {
                return Err(Error::InhomogeneousRelation(format!("relation {n} has a bad term")));
            }
            let ds = (gens[g].0 - ring.step() * p, ring.element_sign(gens[g].1, p));
            match deg_sign {
                None => deg_sign = Some(ds),
                Some(x) if x != ds => {
                    return Err(Error::InhomogeneousRelation(format!(
                        "relation {n} mixes degrees or eigenvalues {x:?} and {ds:?}"
                    )))
                }
                _ => {}
            }
        }
        let (d, s) = deg_sign.unwrap_or((0, 1));
        rel_summands.push(Summand::free(d, s));
    }
    let rm = GradedModule::new(ring, rel_summands)?;
    let mut f = ModuleMap::zero(&rm, &gm, 0)?;
    for (n, rel) in relations.iter().enumerate() {
        for (g, p, c) in rel {
            f.add_term(*g, n, *p, c.clone())?;
        }
    }
    Ok((gm, f))
}

pub(crate) fn max_pow(f: &ModuleMap) -> i64 {
    f.entries().keys().filter_map(|&(r, c)| f.pow(r, c)).map(i64::abs).max().unwrap_or(0)
}

fn fixed_offset(sign: i8) -> i64 {
    if sign > 0 {
        0
    } else {
        1
    }
}

/// Image of summand `s` under fixed points (None when it vanishes).
fn fixed_summand(s: Summand) -> Option<Summand> {
    let a0 = fixed_offset(s.sign);
    let shift = s.shift - 2 * a0;
    match s.kind {
        Kind::Free => Some(Summand::free(shift, 1)),
        Kind::Laurent => Some(Summand::laurent(shift, 1)),
        Kind::Torsion(l) => {
            let len = (l as i64 - a0 + 1) / 2;
            (len > 0).then(|| Summand::torsion(len as u32, shift, 1))
        }
    }
}

/// The fixed submodule of a module over c, as a module over d = c^2.
pub fn fixed_points_c_to_d(m: &GradedModule) -> Result<GradedModule> {
    Ok(fixed_parts(m)?.0)
}

fn fixed_parts(m: &GradedModule) -> Result<(GradedModule, Vec<usize>)> {
    let ring = match m.ring() {
        Ring::PolyC => Ring::PolyD,
        Ring::LaurentC => Ring::LaurentD,
        r => return Err(Error::AlgebraMismatch(format!("fixed points need a module over c, got {}", r.name()))),
    };
    let mut out = Vec::new();
    let mut idx = Vec::new();
    for (i, s) in m.summands().iter().enumerate() {
        if let Some(f) = fixed_summand(*s) {
            out.push(f);
            idx.push(i);
        }
    }
    Ok((GradedModule::new(ring, out)?, idx))
}

/// Inclusion of the fixed points: the generator of a summand with eigenvalue
/// -1 goes to c times the original generator.
pub fn fixed_inclusion(m: &GradedModule) -> Result<ModuleMap> {
    let (fm, idx) = fixed_parts(m)?;
    let mut f = ModuleMap::zero(&fm, m, 0)?;
    for (j, &i) in idx.iter().enumerate() {
        f.add_term(i, j, fixed_offset(m.summands()[i].sign), Rational::one())?;
    }
    Ok(f)
}

/// Restriction of an equivariant map to fixed points.
pub fn fixed_points_map(f: &ModuleMap) -> Result<ModuleMap> {
    let (fd, idx_d) = fixed_parts(f.domain())?;
    let (fc, idx_c) = fixed_parts(f.codomain())?;
    let mut out = ModuleMap::zero(&fd, &fc, f.degree())?;
    for (&(r, c), v) in f.entries() {
        let (Some(jc), Some(jd)) = (idx_c.iter().position(|&x| x == r), idx_d.iter().position(|&x| x == c)) else {
            // Either side has no fixed generator; an equivariant map then has
            // zero fixed component here unless the source is fixed and the
            // target vanishes, in which case the term is dropped.
            continue;
        };
        let p = f.pow(r, c).expect("homogeneous") + fixed_offset(f.domain().summands()[c].sign)
            - fixed_offset(f.codomain().summands()[r].sign);
        if p.rem_euclid(2) != 0 {
            return Err(Error::InvalidMorphism("map is not equivariant".into()));
        }
        out.add_term(jc, jd, p / 2, v.clone())?;
    }
    Ok(out)
}

/// Extension of scalars along Q[d] -> Q[c], d = c^2.
pub fn base_change_d_to_c(m: &GradedModule) -> Result<GradedModule> {
    let ring = match m.ring() {
        Ring::PolyD => Ring::PolyC,
        Ring::LaurentD => Ring::LaurentC,
        r => return Err(Error::AlgebraMismatch(format!("base change needs a module over d, got {}", r.name()))),
    };
    let summands = m
        .summands()
        .iter()
        .map(|s| match s.kind {
            Kind::Torsion(l) => Summand::torsion(2 * l, s.shift, s.sign),
            _ => *s,
        })
        .collect();
    GradedModule::new(ring, summands)
}

/// Extension of scalars applied to the domain (and to the codomain when that
/// is also over d).
pub fn base_change_map(f: &ModuleMap) -> Result<ModuleMap> {
    let dom = base_change_d_to_c(f.domain())?;
    let (cod, factor) = if f.codomain().ring().is_c() {
        (f.codomain().clone(), 1)
    } else {
        (base_change_d_to_c(f.codomain())?, 2)
    };
    let mut out = ModuleMap::zero(&dom, &cod, f.degree())?;
    for (&(r, c), v) in f.entries() {
        out.add_term(r, c, f.pow(r, c).expect("homogeneous") * factor, v.clone())?;
    }
    Ok(out)
}

/// Inverts the ring variable: torsion dies, free summands become Laurent.
pub fn localize(m: &GradedModule) -> GradedModule {
    localize_parts(m).0
}

pub(crate) fn localize_parts(m: &GradedModule) -> (GradedModule, Vec<usize>) {
    let mut out = Vec::new();
    let mut idx = Vec::new();
    for (i, s) in m.summands().iter().enumerate() {
        if !s.is_torsion() {
            out.push(Summand::laurent(s.shift, s.sign));
            idx.push(i);
        }
    }
    (GradedModule::new(m.ring().localized(), out).expect("Laurent summands"), idx)
}

/// Homology of a module with a differential, with enough data to push
/// cycles into its canonical basis.
pub struct SlotHomology {
    pub module: GradedModule,
    /// Sends each homology generator to a representing cycle.
    pub lift: ModuleMap,
    pub window: Window,
    quotient: Quotient,
    canonical: Canonical,
}

impl SlotHomology {
    /// Coordinates (in the monomial basis of `module`) of the class of a cycle
    /// given in the ambient basis of degree `e`.
    pub fn project(&self, e: i64, v: &[Rational]) -> Result<Vec<Rational>> {
        if !self.window.contains(e) {
            return Err(Error::BadIndex(format!("degree {e} outside the homology window")));
        }
        let qv = self
            .quotient
            .coords(e, v)
            .ok_or_else(|| Error::NotADifferential(format!("vector in degree {e} is not a cycle")))?;
        let b = self.canonical.basis_matrix(&self.quotient.p, e);
        if b.cols() == 0 {
            return Ok(Vec::new());
        }
        b.solve_vec(&qv).ok_or_else(|| Error::NotADifferential("class outside the canonical span".into()))
    }

    /// The map on homology induced by a chain map `f` out of the ambient module.
    pub fn induced(&self, f: &ModuleMap, target: &SlotHomology) -> Result<ModuleMap> {
        let g = f.compose(&self.lift)?;
        let mut out = ModuleMap::zero(&self.module, &target.module, f.degree())?;
        for (i, s) in self.module.summands().iter().enumerate() {
            let k = s.shift;
            if target.module.dim_at(k + f.degree()) == 0 {
                continue;
            }
            let col_idx = self.module.basis_at(k).iter().position(|&(j, a)| j == i && a == 0).expect("generator");
            let v = g.matrix_at(k).col(col_idx);
            let coords = target.project(k + f.degree(), &v)?;
            for (n, &(j, a)) in target.module.basis_at(k + f.degree()).iter().enumerate() {
                if !coords[n].is_zero() {
                    out.add_term(j, i, a, coords[n].clone())?;
                }
            }
        }
        Ok(out)
    }
}

/// Basis of the degree-`n` module maps `a -> b`; each is a single monomial
/// term (row, col) with coefficient one.
pub fn hom_basis(a: &GradedModule, b: &GradedModule, n: i64) -> Result<Vec<(usize, usize)>> {
    let probe = ModuleMap::zero(a, b, n)?;
    let r = probe.ratio();
    let mut out = Vec::new();
    for (col, src) in a.summands().iter().enumerate() {
        for (row, dst) in b.summands().iter().enumerate() {
            let Some(p) = probe.pow(row, col) else { continue };
            if !dst.alive(p) || b.ring().element_sign(dst.sign, p) != src.sign {
                continue;
            }
            let ok = match src.kind {
                Kind::Free => true,
                Kind::Torsion(l) => !dst.alive(p + l as i64 * r),
                Kind::Laurent => dst.kind == Kind::Laurent,
            };
            if ok {
                out.push((row, col));
            }
        }
    }
    Ok(out)
}

/// Checks that `d` is a differential on `m`.
pub fn check_differential(m: &GradedModule, d: &ModuleMap) -> Result<()> {
    if d.domain() != m || d.codomain() != m || d.degree() != -1 {
        return Err(Error::NotADifferential("differential must be a degree -1 self-map".into()));
    }
    d.check_valid().map_err(|e| Error::NotADifferential(format!("does not commute with the ring action: {e}")))?;
    if !d.compose(d)?.is_zero() {
        return Err(Error::NotADifferential("d squared is not zero".into()));
    }
    Ok(())
}

pub fn homology_slot(m: &GradedModule, d: &ModuleMap) -> Result<SlotHomology> {
    check_differential(m, d)?;
    homology_slot_in(m, d, auto_window(&[m], max_pow(d)))
}

/// Homology on a given window (which must be wide enough, see `auto_window`).
pub fn homology_slot_in(m: &GradedModule, d: &ModuleMap, window: Window) -> Result<SlotHomology> {
    check_differential(m, d)?;
    let amb = Persistence::of_module(m, window);
    let mut cycles = std::collections::BTreeMap::new();
    let mut boundaries = std::collections::BTreeMap::new();
    for e in window.degrees() {
        cycles.insert(e, d.matrix_at(e).kernel_basis());
        boundaries.insert(e, d.matrix_at(e + 1));
    }
    let sq = Subquotient { ambient: &amb, cycles, boundaries };
    let quotient = sq.quotient()?;
    let canonical = canonicalize(&quotient.p, m.ring())?;
    let lifts: Vec<(i64, Vec<Rational>)> =
        canonical.gens.iter().map(|(b, v)| (*b, quotient.lift[b].mul_vec(v))).collect();
    let lift = canonical.to_map(m, &lifts)?;
    Ok(SlotHomology { module: canonical.module.clone(), lift, window, quotient, canonical })
}
