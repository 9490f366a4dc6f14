//! Degreewise evaluation on a finite range of degrees, and recovery of a
//! direct-sum decomposition (with explicit generators) from degreewise data.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{GradedModule, Kind, Ring, Summand};
use crate::error::{Error, Result};
use crate::linalg::{is_zero_vec, q, QMatrix, Rational};

/// Inclusive degree range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::Schema(format!("empty window {lo}:{hi}")));
        }
        Ok(Window { lo, hi })
    }

    pub fn degrees(&self) -> impl DoubleEndedIterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn contains(&self, e: i64) -> bool {
        self.lo <= e && e <= self.hi
    }

    pub fn union(&self, other: &Window) -> Window {
        Window { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }
}

/// A window wide enough to read off the decomposition of anything built from
/// `modules` by maps whose exponents are at most `max_pow`: strictly above
/// every generator and below every torsion tower.
pub fn auto_window(modules: &[&GradedModule], max_pow: i64) -> Window {
    let step = modules.iter().map(|m| m.step()).max().unwrap_or(2);
    let hi = modules.iter().filter_map(|m| m.max_shift()).max().unwrap_or(0);
    let lo = modules.iter().filter_map(|m| m.min_shift()).min().unwrap_or(0);
    let len = modules.iter().map(|m| m.max_len() as i64).max().unwrap_or(0);
    Window { lo: lo - step * (len + max_pow.max(0) + 2) - 4, hi: hi + 2 * step + 4 }
}

/// Degreewise data of a module over one variable: spaces, the action of the
/// variable (degree e to e - step) and the involution.
#[derive(Clone, Debug)]
pub struct Persistence {
    pub step: i64,
    pub is_c: bool,
    pub window: Window,
    pub dims: BTreeMap<i64, usize>,
    pub act: BTreeMap<i64, QMatrix>,
    pub inv: BTreeMap<i64, QMatrix>,
}

impl Persistence {
    pub fn of_module(m: &GradedModule, window: Window) -> Self {
        let step = m.step();
        let mut dims = BTreeMap::new();
        let mut act = BTreeMap::new();
        let mut inv = BTreeMap::new();
        for e in window.degrees() {
            let basis = m.basis_at(e);
            dims.insert(e, basis.len());
            let signs: Vec<Rational> = basis.iter().map(|&(i, a)| q(m.element_sign(i, a) as i64)).collect();
            inv.insert(e, QMatrix::diagonal(&signs));
            if e - step >= window.lo {
                let below = m.basis_at(e - step);
                let mut a = QMatrix::zeros(below.len(), basis.len());
                for (c, &(i, x)) in basis.iter().enumerate() {
                    if let Some(r) = below.iter().position(|&(j, y)| j == i && y == x + 1) {
                        a.set(r, c, q(1));
                    }
                }
                act.insert(e, a);
            }
        }
        Persistence { step, is_c: m.ring().is_c(), window, dims, act, inv }
    }

    pub fn dim(&self, e: i64) -> usize {
        self.dims.get(&e).copied().unwrap_or(0)
    }

    /// The twisted involution, which commutes with the action.
    fn twisted_inv(&self, e: i64) -> QMatrix {
        let w = &self.inv[&e];
        if self.is_c && e.div_euclid(2).rem_euclid(2) == 1 {
            w.neg()
        } else {
            w.clone()
        }
    }

    /// Applies the action `k` times starting in degree `e`.
    pub fn push(&self, e: i64, v: &[Rational], k: i64) -> Vec<Rational> {
        let mut v = v.to_vec();
        let mut d = e;
        for _ in 0..k {
            v = self.act[&d].mul_vec(&v);
            d -= self.step;
        }
        v
    }
}

/// A degreewise subquotient Z/B of an ambient persistence module.
pub struct Subquotient<'a> {
    pub ambient: &'a Persistence,
    pub cycles: BTreeMap<i64, QMatrix>,
    pub boundaries: BTreeMap<i64, QMatrix>,
}

/// The quotient as a persistence module, with lifts of its basis vectors.
pub struct Quotient {
    pub p: Persistence,
    pub lift: BTreeMap<i64, QMatrix>,
    full: BTreeMap<i64, QMatrix>,
}

impl Quotient {
    /// Coordinates of an ambient cycle in the quotient basis.
    pub fn coords(&self, e: i64, v: &[Rational]) -> Option<Vec<Rational>> {
        let k = self.p.dim(e);
        let f = self.full.get(&e)?;
        if f.rows() == 0 {
            return Some(Vec::new());
        }
        let x = f.solve_vec(v)?;
        Some(x[..k].to_vec())
    }
}

impl Subquotient<'_> {
    pub fn quotient(&self) -> Result<Quotient> {
        let amb = self.ambient;
        let mut lift = BTreeMap::new();
        let mut full = BTreeMap::new();
        let mut dims = BTreeMap::new();
        for e in amb.window.degrees() {
            let n = amb.dim(e);
            let z = self.cycles.get(&e).cloned().unwrap_or_else(|| QMatrix::identity(n));
            let b = self.boundaries.get(&e).cloned().unwrap_or_else(|| QMatrix::zeros(n, 0)).image_basis();
            let (_, piv) = b.hstack(&z).rref();
            if piv.iter().filter(|&&p| p < b.cols()).count() < b.cols() || z.hstack(&b).rank() != z.rank() {
                return Err(Error::NotADifferential(format!("boundaries are not cycles in degree {e}")));
            }
            let keep: Vec<usize> = piv.iter().filter(|&&p| p >= b.cols()).map(|&p| p - b.cols()).collect();
            let k = z.select_columns(&keep);
            dims.insert(e, k.cols());
            full.insert(e, k.hstack(&b));
            lift.insert(e, k);
        }
        let mut out = Quotient {
            p: Persistence {
                step: amb.step,
                is_c: amb.is_c,
                window: amb.window,
                dims,
                act: BTreeMap::new(),
                inv: BTreeMap::new(),
            },
            lift,
            full,
        };
        for e in amb.window.degrees() {
            let k = &out.lift[&e];
            let w = amb.inv[&e].mul(k);
            out.p.inv.insert(e, out.coords_matrix(e, &w)?);
            if let Some(a) = amb.act.get(&e) {
                let ak = a.mul(k);
                out.p.act.insert(e, out.coords_matrix(e - amb.step, &ak)?);
            }
        }
        Ok(out)
    }
}

impl Quotient {
    fn coords_matrix(&self, e: i64, m: &QMatrix) -> Result<QMatrix> {
        let cols = m
            .columns()
            .iter()
            .map(|v| {
                self.coords(e, v)
                    .ok_or_else(|| Error::NotADifferential(format!("cycles not preserved in degree {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(QMatrix::from_columns(self.p.dim(e), &cols))
    }
}

/// A decomposition: the canonical module and, per summand, a generator
/// vector together with the degree it lives in.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub module: GradedModule,
    pub gens: Vec<(i64, Vec<Rational>)>,
}

impl Canonical {
    /// Vectors of the monomial basis of `module` in degree `e`, as columns.
    pub fn basis_matrix(&self, p: &Persistence, e: i64) -> QMatrix {
        let step = self.module.step();
        let cols: Vec<Vec<Rational>> = self
            .module
            .basis_at(e)
            .iter()
            .map(|&(i, _)| {
                let (b, v) = &self.gens[i];
                p.push(*b, v, (b - e) / step)
            })
            .collect();
        QMatrix::from_columns(p.dim(e), &cols)
    }

    /// The map from the canonical module sending each generator to its
    /// vector, read in the monomial basis of `ambient` (lifts via `lift`).
    pub fn to_map(&self, ambient: &GradedModule, lifts: &[(i64, Vec<Rational>)]) -> Result<super::ModuleMap> {
        let mut f = super::ModuleMap::zero(&self.module, ambient, 0)?;
        let step = ambient.step();
        for (col, (b, v)) in lifts.iter().enumerate() {
            let k = self.module.summands()[col].shift;
            for (n, &(j, a)) in ambient.basis_at(*b).iter().enumerate() {
                if !v[n].is_zero() {
                    f.add_term(j, col, a + (b - k) / step, v[n].clone())?;
                }
            }
        }
        Ok(f)
    }
}

struct Bar {
    born: i64,
    death: Option<i64>,
    traj: BTreeMap<i64, Vec<Rational>>,
}

/// Interval decomposition of one chain V_0 -> V_1 -> ... (degrees descending),
/// keeping the older bar whenever images become dependent.
fn chain_bars(degrees: &[i64], dims: &[usize], acts: &[QMatrix]) -> Vec<Bar> {
    let mut bars: Vec<Bar> = Vec::new();
    let mut alive: Vec<usize> = Vec::new();
    let mut current: Vec<Vec<Rational>> = Vec::new();
    for t in 0..degrees.len() {
        let e = degrees[t];
        let cur = QMatrix::from_columns(dims[t], &current);
        for col in cur.complement_basis().columns() {
            bars.push(Bar { born: e, death: None, traj: [(e, col.clone())].into() });
            alive.push(bars.len() - 1);
            current.push(col);
        }
        if t + 1 == degrees.len() {
            break;
        }
        let next = degrees[t + 1];
        let images: Vec<Vec<Rational>> = current.iter().map(|v| acts[t].mul_vec(v)).collect();
        let mut kept: Vec<usize> = Vec::new();
        let mut kept_vecs: Vec<Vec<Rational>> = Vec::new();
        for (pos, &id) in alive.iter().enumerate() {
            let w = &images[pos];
            let lambda = if is_zero_vec(w) {
                Some(vec![Rational::zero(); kept.len()])
            } else if kept.is_empty() {
                None
            } else {
                QMatrix::from_columns(dims[t + 1], &kept_vecs).solve_vec(w)
            };
            match lambda {
                Some(lambda) => {
                    let degs: Vec<i64> = bars[id].traj.keys().copied().collect();
                    for d in degs {
                        let mut v = bars[id].traj[&d].clone();
                        for (k, lam) in kept.iter().zip(&lambda) {
                            if lam.is_zero() {
                                continue;
                            }
                            for (x, y) in v.iter_mut().zip(&bars[*k].traj[&d]) {
                                *x -= lam * y;
                            }
                        }
                        bars[id].traj.insert(d, v);
                    }
                    bars[id].death = Some(e);
                }
                None => {
                    kept.push(id);
                    kept_vecs.push(w.clone());
                }
            }
        }
        for (id, v) in kept.iter().zip(&kept_vecs) {
            bars[*id].traj.insert(next, v.clone());
        }
        alive = kept;
        current = kept_vecs;
    }
    bars
}

/// Decomposes a persistence module into cyclic summands.
///
/// Bars alive at the top of the window and at the bottom are read as
/// Laurent summands, bars alive at the top that die inside as (truncated)
/// divisible torsion, bars born inside reaching the bottom as free.
pub fn canonicalize(p: &Persistence, ring: Ring) -> Result<Canonical> {
    let step = p.step;
    let mut plus_basis = BTreeMap::new();
    let mut minus_basis = BTreeMap::new();
    for e in p.window.degrees() {
        let n = p.dim(e);
        let tw = p.twisted_inv(e);
        let id = QMatrix::identity(n);
        let pb = tw.sub(&id).kernel_basis();
        let mb = tw.add(&id).kernel_basis();
        if pb.cols() + mb.cols() != n {
            return Err(Error::NotADifferential(format!("involution not diagonalizable in degree {e}")));
        }
        plus_basis.insert(e, pb);
        minus_basis.insert(e, mb);
    }
    let mut found: Vec<(Summand, i64, Vec<Rational>)> = Vec::new();
    for (eps, basis) in [(1i8, &plus_basis), (-1i8, &minus_basis)] {
        for r in 0..step {
            let degrees: Vec<i64> = p.window.degrees().rev().filter(|e| e.rem_euclid(step) == r).collect();
            if degrees.is_empty() {
                continue;
            }
            let dims: Vec<usize> = degrees.iter().map(|e| basis[e].cols()).collect();
            let mut acts = Vec::new();
            for w in degrees.windows(2) {
                let (e, f) = (w[0], w[1]);
                let img = p.act[&e].mul(&basis[&e]);
                let coords = if basis[&f].cols() == 0 {
                    if !img.is_zero() {
                        return Err(Error::NotADifferential(format!("action mixes eigenspaces at degree {e}")));
                    }
                    QMatrix::zeros(0, img.cols())
                } else {
                    basis[&f].solve(&img).ok_or_else(|| {
                        Error::NotADifferential(format!("action mixes eigenspaces at degree {e}"))
                    })?
                };
                acts.push(coords);
            }
            let top = degrees[0];
            for bar in chain_bars(&degrees, &dims, &acts) {
                let b = bar.born;
                let v = basis[&b].mul_vec(&bar.traj[&b]);
                let sign = if p.is_c && b.div_euclid(2).rem_euclid(2) == 1 { -eps } else { eps };
                let kind = match bar.death {
                    None if b == top => Kind::Laurent,
                    None => Kind::Free,
                    Some(d) => Kind::Torsion(((b - d) / step + 1) as u32),
                };
                found.push((Summand { kind, shift: b, sign }, b, v));
            }
        }
    }
    let all_laurent = found.iter().all(|(s, _, _)| s.kind == Kind::Laurent);
    let out_ring = if ring.is_laurent() && all_laurent {
        ring
    } else {
        match ring {
            Ring::LaurentC => Ring::PolyC,
            Ring::LaurentD => Ring::PolyD,
            r => r,
        }
    };
    let mut normalized: Vec<(Summand, i64, Vec<Rational>)> = found
        .into_iter()
        .map(|(s, b, v)| (GradedModule::normalize_summand(out_ring, s), b, v))
        .collect();
    normalized.sort_by(|x, y| x.0.cmp(&y.0));
    let module = GradedModule::new(out_ring, normalized.iter().map(|x| x.0).collect())?;
    let gens = normalized.into_iter().map(|(_, b, v)| (b, v)).collect();
    Ok(Canonical { module, gens })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_module_recovered() {
        let m = GradedModule::new(Ring::PolyC, vec![Summand::free(0, -1), Summand::torsion(3, 1, 1)]).unwrap();
        let w = auto_window(&[&m], 0);
        let c = canonicalize(&Persistence::of_module(&m, w), Ring::PolyC).unwrap();
        assert_eq!(c.module, m.canonical());
    }

    #[test]
    fn laurent_recovered() {
        let m = GradedModule::new(Ring::LaurentC, vec![Summand::laurent(1, -1), Summand::laurent(2, 1)]).unwrap();
        let w = Window::new(-8, 8).unwrap();
        let c = canonicalize(&Persistence::of_module(&m, w), Ring::LaurentC).unwrap();
        assert_eq!(c.module, m.canonical());
    }

    #[test]
    fn d_module_recovered() {
        let m = GradedModule::new(Ring::PolyD, vec![Summand::free(4, 1), Summand::torsion(2, 0, 1)]).unwrap();
        let w = auto_window(&[&m], 0);
        let c = canonicalize(&Persistence::of_module(&m, w), Ring::PolyD).unwrap();
        assert_eq!(c.module, m.canonical());
    }
}
