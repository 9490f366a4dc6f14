use std::collections::BTreeMap;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rational_models::burnside::Exceptional;
use rational_models::exceptional::random::random_group_complex;
use rational_models::exceptional::*;
use rational_models::linalg::q;
use rational_models::{Error, QMatrix, Rational};

fn oracle_rank(m: &QMatrix) -> usize {
    let mut a: Vec<Vec<Rational>> = (0..m.rows()).map(|r| (0..m.cols()).map(|c| m.get(r, c).clone()).collect()).collect();
    let mut rank = 0;
    for c in 0..m.cols() {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        let pivot = a[rank].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn oracle_betti(x: &GroupComplex, n: i64) -> usize {
    x.dim_at(n) - oracle_rank(&x.d_at(n)) - oracle_rank(&x.d_at(n + 1))
}

fn trace(m: &QMatrix) -> Rational {
    (0..m.rows()).map(|i| m.get(i, i).clone()).sum()
}

fn lefschetz(x: &GroupComplex, g: usize) -> Rational {
    x.degrees().into_iter().map(|n| if n.rem_euclid(2) == 0 { trace(&x.action(n, g)) } else { -trace(&x.action(n, g)) }).sum()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn weyl(h: Exceptional) -> FiniteGroupAlg {
    weyl_group_of(h)
}

fn all_groups() -> Vec<FiniteGroupAlg> {
    Exceptional::ALL.into_iter().map(weyl).collect()
}

/// Regular rep in degrees n and n-1 joined by the identity.
fn contractible(g: &FiniteGroupAlg, n: i64) -> GroupComplex {
    let r = Rep::regular(g);
    let modules = BTreeMap::from([(n, r.clone()), (n - 1, r)]);
    GroupComplex::new(g.clone(), modules, BTreeMap::from([(n, QMatrix::identity(g.order()))])).unwrap()
}

#[test]
fn weyl_groups() {
    let orders: Vec<usize> = Exceptional::ALL.into_iter().map(|h| weyl(h).order()).collect();
    assert_eq!(orders, vec![1, 1, 2, 1, 6]);
    let d4 = weyl(Exceptional::D4);
    assert!(!d4.is_abelian());
    let count = |k: usize| (0..6).filter(|&a| d4.element_order(a) == k).count();
    assert_eq!((count(1), count(2), count(3)), (1, 3, 2));
    assert_eq!(weyl_group_by_name("D4").unwrap(), d4);
    assert!(matches!(weyl_group_by_name("C7"), Err(Error::BadClass(_))));
    assert!(FiniteGroupAlg::new(vec![vec![0, 1], vec![1, 1]], 0).is_err());
    let g = weyl(Exceptional::A4);
    assert_eq!(FiniteGroupAlg::from_json(&g.to_json()).unwrap(), g);
}

#[test]
fn tensor_unit_and_symmetry() {
    let mut r = rng(31);
    for g in all_groups() {
        for _ in 0..8 {
            let x = random_group_complex(&mut r, &g, -1, 1, 2);
            let y = random_group_complex(&mut r, &g, 0, 2, 2);
            let u = GroupComplex::unit(&g);
            assert_eq!(tensor_diagonal(&u, &x).unwrap(), x);
            assert_eq!(tensor_diagonal(&x, &u).unwrap(), x);
            let (xy, yx) = (tensor_diagonal(&x, &y).unwrap(), tensor_diagonal(&y, &x).unwrap());
            let (hxy, hyx) = (homology_w(&xy).unwrap(), homology_w(&yx).unwrap());
            for n in -1..=3 {
                assert_eq!(xy.dim_at(n), yx.dim_at(n));
                assert_eq!(hxy.dim_at(n), hyx.dim_at(n));
                if let (Some(a), Some(b)) = (hxy.rep(n), hyx.rep(n)) {
                    assert_eq!(fixed_dim(a), fixed_dim(b));
                }
            }
        }
    }
}

#[test]
fn kunneth() {
    let mut r = rng(32);
    let groups = all_groups();
    for i in 0..50 {
        let g = &groups[i % groups.len()];
        let x = random_group_complex(&mut r, g, -1, 1, 2);
        let y = random_group_complex(&mut r, g, -1, 1, 2);
        let t = tensor_diagonal(&x, &y).unwrap();
        for n in -2..=2 {
            let expect: usize = (-1..=1).map(|p| oracle_betti(&x, p) * oracle_betti(&y, n - p)).sum();
            assert_eq!(oracle_betti(&t, n), expect);
        }
    }
}

#[test]
fn internal_hom_is_closed() {
    let mut r = rng(33);
    for g in all_groups() {
        for _ in 0..6 {
            let x = random_group_complex(&mut r, &g, 0, 1, 1);
            let y = random_group_complex(&mut r, &g, 0, 1, 1);
            let z = random_group_complex(&mut r, &g, 0, 2, 1);
            let u = GroupComplex::unit(&g);
            let hz = internal_hom_conj(&u, &z).unwrap();
            for n in 0..=2 {
                assert_eq!(hz.dim_at(n), z.dim_at(n));
                assert_eq!(hz.rep(n).map(fixed_dim), z.rep(n).map(fixed_dim));
                assert_eq!(oracle_betti(&hz, n), oracle_betti(&z, n));
            }
            let lhs = internal_hom_conj(&tensor_diagonal(&x, &y).unwrap(), &z).unwrap();
            let rhs = internal_hom_conj(&x, &internal_hom_conj(&y, &z).unwrap()).unwrap();
            for n in -3..=3 {
                assert_eq!(lhs.dim_at(n), rhs.dim_at(n));
                assert_eq!(lhs.rep(n).map(fixed_dim), rhs.rep(n).map(fixed_dim));
                assert_eq!(oracle_betti(&lhs, n), oracle_betti(&rhs, n));
            }
            // Degree-0 fixed points are the equivariant maps.
            let h = internal_hom_conj(&x, &z).unwrap();
            assert_eq!(h.rep(0).map_or(0, fixed_dim), equivariant_hom_dim(&x, &z));
        }
    }
}

#[test]
fn homology_matches_oracle() {
    let mut r = rng(34);
    let groups = all_groups();
    for i in 0..100 {
        let g = &groups[i % groups.len()];
        let x = random_group_complex(&mut r, g, -2, 2, 3);
        let h = homology_w(&x).unwrap();
        for n in -2..=2 {
            assert_eq!(h.dim_at(n), oracle_betti(&x, n));
        }
        for e in 0..g.order() {
            assert_eq!(lefschetz(&h, e), lefschetz(&x, e));
        }
    }
}

#[test]
fn equivalences_and_fibrations() {
    let g = weyl(Exceptional::D4);
    let c = contractible(&g, 1);
    assert!(homology_w(&c).unwrap().is_zero());
    let zero = GroupComplex::zero(&g);
    let into = GroupMap::zero(&zero, &c).unwrap();
    assert!(into.is_weq().unwrap());
    assert!(!into.is_fib());
    let onto = GroupMap::zero(&c, &zero).unwrap();
    assert!(onto.is_weq().unwrap() && onto.is_fib());
    let u = GroupComplex::unit(&g);
    assert!(!GroupMap::zero(&u, &u).unwrap().is_weq().unwrap());
    // A map that is not equivariant is rejected.
    let reg = GroupComplex::new(g.clone(), BTreeMap::from([(0, Rep::regular(&g))]), BTreeMap::new()).unwrap();
    let mut m = QMatrix::zeros(6, 6);
    m.set(0, 0, q(1));
    assert!(GroupMap::new(&reg, &reg, BTreeMap::from([(0, m)])).is_err());
}

#[test]
fn rejects_bad_differentials() {
    let g = weyl(Exceptional::Sigma4);
    let one = Rep::trivial(&g, 1);
    let modules = BTreeMap::from([(0, one.clone()), (1, one.clone()), (2, one)]);
    let d = BTreeMap::from([(1, QMatrix::identity(1)), (2, QMatrix::identity(1))]);
    assert!(matches!(GroupComplex::new(g, modules, d), Err(Error::NotADifferential(_))));
    // A differential that does not commute with the action.
    let c2 = weyl(Exceptional::A4);
    let modules = BTreeMap::from([(0, Rep::trivial(&c2, 1)), (1, Rep::regular(&c2))]);
    let d = BTreeMap::from([(1, QMatrix::from_rows(vec![vec![q(1), q(0)]]))]);
    assert!(GroupComplex::new(c2, modules, d).is_err());
}

#[test]
fn product_of_classes() {
    let mut r = rng(35);
    let comps: BTreeMap<_, _> = Exceptional::ALL.into_iter().map(|h| (h, random_group_complex(&mut r, &weyl(h), 0, 1, 2))).collect();
    let p = product_assemble(comps.clone()).unwrap();
    for h in Exceptional::ALL {
        assert_eq!(p.project(h), &comps[&h]);
    }
    assert!(ExceptionalProduct::zero().is_zero());
    let mut wrong = comps.clone();
    wrong.insert(Exceptional::D4, GroupComplex::unit(&FiniteGroupAlg::cyclic(6)));
    assert!(matches!(product_assemble(wrong), Err(Error::WrongAlgebraForClass(_))));
    let mut missing = comps.clone();
    missing.remove(&Exceptional::SO3);
    assert!(matches!(product_assemble(missing), Err(Error::WrongAlgebraForClass(_))));
    let ids = Exceptional::ALL.into_iter().map(|h| (h, GroupMap::identity(&comps[&h]))).collect();
    let f = ProductMap::new(&p, &p, ids).unwrap();
    assert!(f.is_weq().unwrap() && f.is_fib());
    // Adding a contractible summand in one component stays a weak equivalence.
    let mut bigger = comps.clone();
    let g = weyl(Exceptional::D4);
    bigger.insert(Exceptional::D4, comps[&Exceptional::D4].direct_sum(&contractible(&g, 1)).unwrap());
    let q_ = product_assemble(bigger.clone()).unwrap();
    let proj: BTreeMap<_, _> = Exceptional::ALL
        .into_iter()
        .map(|h| {
            let (s, t) = (&bigger[&h], &comps[&h]);
            let maps = s.degrees().into_iter().map(|n| (n, QMatrix::identity(t.dim_at(n)).hstack(&QMatrix::zeros(t.dim_at(n), s.dim_at(n) - t.dim_at(n))))).collect();
            (h, GroupMap::new(s, t, maps).unwrap())
        })
        .collect();
    let f = ProductMap::new(&q_, &p, proj).unwrap();
    assert!(f.is_weq().unwrap() && f.is_fib());
}

#[test]
fn json_round_trip() {
    let mut r = rng(36);
    for g in all_groups() {
        let x = random_group_complex(&mut r, &g, -1, 1, 2);
        assert_eq!(GroupComplex::from_json(&x.to_json()).unwrap(), x);
    }
}
