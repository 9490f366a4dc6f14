use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rational_models::graded::{GradedModule, Kind, ModuleMap, Ring, SignedBasis, Summand};
use rational_models::linalg::q;
use rational_models::toral::*;
use rational_models::Error;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small(side: Side) -> RandomSpec {
    RandomSpec { max_slot: 4, max_explicit: 3, lo: -8, hi: 8, max_v: 2, ..RandomSpec::new(side) }
}

fn qw_hom_dim(a: &SignedBasis, b: &SignedBasis, n: i64) -> usize {
    a.iter().map(|&(d, s)| b.iter().filter(|&&(e, t)| e == d + n && t == s).count()).sum()
}

#[test]
fn star_examples() {
    assert!(make_generator(Generator::SigmaT).unwrap().check_star());
    let n = SlotFamily::new(
        Side::SO3,
        [(3, GradedModule::cyclic(Ring::PolyC, Summand::torsion(2, 4, -1)))].into(),
        GradedModule::zero(Ring::PolyC),
    )
    .unwrap();
    assert!(make_fn(&n).unwrap().check_star());
    let free = SlotFamily::new(
        Side::SO3,
        [(1, GradedModule::cyclic(Ring::PolyD, Summand::free(0, 1)))].into(),
        GradedModule::zero(Ring::PolyC),
    )
    .unwrap();
    let lv = laurent_tensor(&[]);
    let b = ModuleMap::zero(free.at(Slot::At(1)), &lv, 0).unwrap();
    let bt = ModuleMap::zero(free.tail(), &lv, 0).unwrap();
    let x = ToralObject::new(free, Vec::new(), [(1, b)].into(), bt, None).unwrap();
    assert!(!x.check_star());
}

#[test]
fn generators() {
    let s1 = make_generator(Generator::Sigma1).unwrap();
    assert!(s1.v().is_empty());
    assert_eq!(s1.module(Slot::At(1)).summands(), &[Summand::torsion(1, 0, 1)]);
    assert!(matches!(make_generator(Generator::SigmaH(1)), Err(Error::BadIndex(_))));
    let t = make_generator(Generator::SigmaT).unwrap();
    assert_eq!(t.module(Slot::At(1)).summands(), &[Summand::free(0, 1), Summand::free(2, 1)]);
    assert_eq!(t.v(), &vec![(0, 1), (0, -1)]);
    let sum = make_generator(Generator::S0).unwrap().direct_sum(&make_generator(Generator::SigmaTMinus).unwrap()).unwrap();
    assert!(is_isomorphic(&t, &sum).unwrap());
    for g in Generator::truncated(5) {
        assert_eq!(Generator::parse(&g.name()).unwrap(), g);
        assert!(make_generator(g).unwrap().check_star());
    }
}

#[test]
fn ev_and_alpha() {
    assert!(make_ev(Side::SO3, &Vec::new()).unwrap().is_zero());
    let e = make_ev(Side::SO3, &vec![(0, 1)]).unwrap();
    assert_eq!(e.module(Slot::At(1)).summands(), &[Summand::laurent(0, 1)]);
    assert_eq!(e.module(Slot::At(1)).ring(), Ring::PolyD);
    assert_eq!(e.module(Slot::Tail).summands(), &[Summand::laurent(0, 1)]);
    let a = make_alpha(1, 2).unwrap();
    assert_eq!(a.module(Slot::At(1)).summands(), &[Summand::torsion(2, 0, 1)]);
    let a = make_alpha(4, 1).unwrap();
    assert_eq!(a.module(Slot::At(4)).summands(), &[Summand::torsion(1, 0, 1)]);
    let ef = make_ef_bar_plus(1).unwrap();
    assert_eq!(ef.module(Slot::At(1)).summands(), &[Summand::torsion(1, 2, 1)]);
    assert!(matches!(make_ef_bar_plus(0), Err(Error::BadIndex(_))));
    // f of the regular representation at slot 5 is the generator there.
    let reg = GradedModule::new(Ring::PolyC, vec![Summand::torsion(1, 0, 1), Summand::torsion(1, 0, -1)]).unwrap();
    let fam = SlotFamily::new(Side::SO3, [(5, reg)].into(), GradedModule::zero(Ring::PolyC)).unwrap();
    assert!(is_isomorphic(&make_fn(&fam).unwrap(), &make_generator(Generator::SigmaH(5)).unwrap()).unwrap());
    let bad = SlotFamily::new(
        Side::SO3,
        [(2, GradedModule::cyclic(Ring::PolyC, Summand::free(0, 1)))].into(),
        GradedModule::zero(Ring::PolyC),
    )
    .unwrap();
    assert!(matches!(make_fn(&bad), Err(Error::NotTorsion(_))));
}

#[test]
fn functor_images_of_cells() {
    let f1 = functor_f(&make_generator(Generator::Sigma1).unwrap()).unwrap();
    assert_eq!(f1.module(Slot::At(1)).canonical().summands(), &[Summand::torsion(2, 0, 1)]);
    let t1 = twisted_f(&make_generator(Generator::Sigma1).unwrap()).unwrap();
    assert_eq!(t1.module(Slot::At(1)).canonical().summands(), &[Summand::torsion(2, 0, -1)]);
    let th = twisted_f(&make_generator(Generator::SigmaH(3)).unwrap()).unwrap();
    assert!(th.module(Slot::At(3)).is_isomorphic(make_generator(Generator::SigmaH(3)).unwrap().module(Slot::At(3))));
    let tt = twisted_f(&make_generator(Generator::SigmaT).unwrap()).unwrap();
    assert!(tt.check_star());
    let reg = GradedModule::new(Ring::PolyC, vec![Summand::free(0, 1), Summand::free(0, -1)]).unwrap();
    assert!(tt.module(Slot::Tail).is_isomorphic(&reg));
    assert!(functor_f(&ToralObject::zero(Side::SO3)).unwrap().is_zero());
}

#[test]
fn adjunction_laws_on_random_objects() {
    let mut r = rng(11);
    for _ in 0..30 {
        let x = random_object(&mut r, &small(Side::SO3)).unwrap();
        assert!(x.check_star());
        let fx = functor_f(&x).unwrap();
        assert!(fx.check_star());
        assert_eq!(functor_r(&fx).unwrap().to_json(), x.to_json());
        let y = random_object(&mut r, &small(Side::O2)).unwrap();
        let ry = functor_r(&y).unwrap();
        assert!(ry.check_star());
        counit(&y).unwrap();
        twisted_counit(&y).unwrap();
        assert_eq!(y.twist().unwrap().twist().unwrap().to_json(), y.to_json());
        assert_eq!(functor_r(&twisted_f(&x).unwrap().twist().unwrap()).unwrap().to_json(), x.to_json());
    }
}

#[test]
fn hom_into_injectives_is_linear_algebra() {
    let mut r = rng(12);
    for _ in 0..12 {
        let x = random_object(&mut r, &small(Side::SO3)).unwrap();
        let v: SignedBasis = vec![(0, 1), (2, -1), (-2, -1)];
        let e = make_ev(Side::SO3, &v).unwrap();
        for n in -8..=8 {
            assert_eq!(hom_basis_a(&x, &e, n).unwrap().len(), qw_hom_dim(x.v(), &v, n), "degree {n}");
        }
        assert!(ext_a(&x, &e, Some((-6, 6))).unwrap().is_zero());
    }
}

#[test]
fn disjoint_slots_have_no_maps() {
    let a = make_generator(Generator::Sigma1).unwrap();
    let b = make_generator(Generator::SigmaH(2)).unwrap();
    assert!(hom_a(&a, &b, Some((-10, 10))).unwrap().is_zero());
}

#[test]
fn resolutions_are_exact() {
    let mut r = rng(13);
    let mut objs: Vec<ToralObject> = Generator::truncated(4).into_iter().map(|g| make_generator(g).unwrap()).collect();
    for _ in 0..10 {
        objs.push(random_object(&mut r, &small(Side::SO3)).unwrap());
        objs.push(random_object(&mut r, &small(Side::O2)).unwrap());
    }
    for y in &objs {
        let res = injective_resolution(y, None).unwrap();
        res.check_exact().unwrap();
    }
    let res = injective_resolution(&make_generator(Generator::SigmaTMinus).unwrap(), None).unwrap();
    assert!(res.injective.is_parity_pure(0) && res.cokernel.is_parity_pure(0));
    let e = make_ev(Side::SO3, &vec![(0, 1)]).unwrap();
    let res = injective_resolution(&e, None).unwrap();
    assert!(res.cokernel.is_zero());
}

#[test]
fn ext_counts_agree() {
    let mut r = rng(14);
    for _ in 0..6 {
        let x = random_object(&mut r, &small(Side::SO3)).unwrap();
        let y = random_object(&mut r, &small(Side::SO3)).unwrap();
        let res = injective_resolution(&y, Some(40)).unwrap();
        for n in -6..=6 {
            assert_eq!(ext_dim(&x, &res, n).unwrap() as i64, ext_euler_dim(&x, &res, n).unwrap());
        }
    }
}

#[test]
fn torsion_ext() {
    // c changes the eigenvalue, so the only extension of Q by Q at a slot
    // joins opposite signs: Q[c]/c^2 with the sign flipping in degree -2.
    let plus = make_alpha(3, 1).unwrap();
    let fam = SlotFamily::new(
        Side::SO3,
        [(3, GradedModule::cyclic(Ring::PolyC, Summand::torsion(1, 0, -1)))].into(),
        GradedModule::zero(Ring::PolyC),
    )
    .unwrap();
    let minus = make_fn(&fam).unwrap();
    assert!(ext_a(&plus, &plus, Some((-6, 6))).unwrap().is_zero());
    let ext = ext_a(&plus, &minus, Some((-6, 6))).unwrap();
    assert_eq!(ext.total_dim(), 1);
    assert_eq!(ext.dim_at(2), 1);
}

#[test]
fn parity_orthogonality() {
    let mut r = rng(15);
    for _ in 0..6 {
        let x = random_object(&mut r, &RandomSpec { parity: Some(0), ..small(Side::SO3) }).unwrap();
        let y = random_object(&mut r, &RandomSpec { parity: Some(1), ..small(Side::SO3) }).unwrap();
        for n in [-4, -2, 0, 2, 4] {
            assert!(hom_a(&x, &y, Some((n, n))).unwrap().is_zero());
            assert!(ext_a(&x, &y, Some((n, n))).unwrap().is_zero());
        }
        let (p, m) = x.suspend(1).unwrap().parity_split().unwrap();
        assert!(p.is_zero() && !m.is_zero() || x.is_zero());
    }
}

#[test]
fn homology_of_cones() {
    let mut r = rng(16);
    for _ in 0..8 {
        let x = random_object(&mut r, &small(Side::SO3)).unwrap();
        assert!(homology_da(&cone(&ToralMorphism::identity(&x)).unwrap()).unwrap().is_zero());
        assert!(is_isomorphic(&homology_da(&x).unwrap(), &x).unwrap());
    }
}

#[test]
fn cone_of_euler_square_is_torsion() {
    // S0 -> (O(4) with beta = c^-2 on Q): slotwise multiplication by d, c^2.
    let s0 = make_generator(Generator::S0).unwrap();
    let v = vec![(0, 1)];
    let lv = laurent_tensor(&v);
    let m1 = GradedModule::cyclic(Ring::PolyD, Summand::free(4, 1));
    let mt = GradedModule::cyclic(Ring::PolyC, Summand::free(4, 1));
    let mut b1 = ModuleMap::zero(&m1, &lv, 0).unwrap();
    b1.add_term(0, 0, -2, q(1)).unwrap();
    let mut bt = ModuleMap::zero(&mt, &lv, 0).unwrap();
    bt.add_term(0, 0, -2, q(1)).unwrap();
    let fam = SlotFamily::new(Side::SO3, [(1, m1.clone())].into(), mt.clone()).unwrap();
    let y = ToralObject::new(fam, v, [(1, b1)].into(), bt, None).unwrap();
    let mut a1 = ModuleMap::zero(s0.module(Slot::At(1)), &m1, 0).unwrap();
    a1.add_term(0, 0, 1, q(1)).unwrap();
    let mut at = ModuleMap::zero(s0.module(Slot::Tail), &mt, 0).unwrap();
    at.add_term(0, 0, 2, q(1)).unwrap();
    let f = ToralMorphism::new(&s0, &y, 0, [(1, a1)].into(), at, rational_models::QMatrix::identity(1)).unwrap();
    let h = homology_da(&cone(&f).unwrap()).unwrap();
    assert!(h.v().is_empty());
    assert_eq!(h.module(Slot::At(1)).summands(), &[Summand::torsion(1, 4, 1)]);
    assert_eq!(h.module(Slot::Tail).summands().iter().map(|s| s.kind).collect::<Vec<_>>(), vec![Kind::Torsion(2)]);
}

#[test]
fn wide_sphere_examples() {
    let t = make_generator(Generator::SigmaT).unwrap();
    let n = Element { slot: Slot::At(1), degree: 0, coords: vec![q(1)] };
    let c = wide_sphere_cover(&t, &n).unwrap();
    assert!(c.hits(&n));
    assert_eq!(c.sphere.v(), &vec![(0, 1)]);
    let s0 = make_generator(Generator::S0).unwrap();
    let c = wide_sphere_cover(&s0, &n).unwrap();
    assert!(c.map.is_isomorphism());
    let s1 = make_generator(Generator::Sigma1).unwrap();
    let c = wide_sphere_cover(&s1, &n).unwrap();
    assert!(c.hits(&n));
    let bad = Element { slot: Slot::At(1), degree: 0, coords: vec![q(1), q(1)] };
    assert!(matches!(wide_sphere_cover(&s1, &bad), Err(Error::ElementNotFound(_))));
}

#[test]
fn enough_wide_spheres() {
    let mut r = rng(17);
    let mut objs: Vec<ToralObject> = Generator::truncated(3).into_iter().map(|g| make_generator(g).unwrap()).collect();
    for _ in 0..10 {
        objs.push(random_object(&mut r, &small(Side::SO3)).unwrap());
        objs.push(random_object(&mut r, &small(Side::O2)).unwrap());
    }
    for x in &objs {
        for _ in 0..3 {
            if let Some((slot, degree, coords)) = random_element(&mut r, x) {
                let n = Element { slot, degree, coords };
                assert!(wide_sphere_cover(x, &n).unwrap().hits(&n));
            }
        }
        let (cover, onto) = cover_generating_set(x).unwrap();
        assert!(onto);
        assert!(cover.sphere.check_star());
    }
}

#[test]
fn smash_examples() {
    let t = make_generator(Generator::SigmaT).unwrap();
    let fam = SlotFamily::new(
        Side::SO3,
        [(1, GradedModule::cyclic(Ring::PolyD, Summand::torsion(3, 0, 1)))].into(),
        GradedModule::zero(Ring::PolyC),
    )
    .unwrap();
    let s = smash_with_torsion(&t, &fam).unwrap();
    assert_eq!(s.module(Slot::At(1)).summands(), &[Summand::torsion(3, 0, 1), Summand::torsion(3, 2, 1)]);
    let q2 = SlotFamily::new(
        Side::SO3,
        [(2, GradedModule::cyclic(Ring::PolyC, Summand::torsion(1, 0, 1)))].into(),
        GradedModule::zero(Ring::PolyC),
    )
    .unwrap();
    let s = smash_with_torsion(&make_generator(Generator::S0).unwrap(), &q2).unwrap();
    assert!(is_isomorphic(&s, &make_fn(&q2).unwrap()).unwrap());
}

#[test]
fn adams_bracket_of_sphere() {
    let s0 = make_generator(Generator::S0).unwrap();
    let (hom, _) = adams_bracket(&s0, &s0, Some((-4, 4))).unwrap();
    assert!(hom.dim_at(0) >= 1);
    let x = cone(&ToralMorphism::identity(&s0)).unwrap();
    let (h, e) = adams_bracket(&x, &s0, Some((-4, 4))).unwrap();
    assert!(h.is_zero() && e.is_zero());
}

#[test]
fn json_round_trip() {
    let mut r = rng(18);
    for _ in 0..10 {
        let x = random_differential_object(&mut r, &small(Side::SO3)).unwrap();
        let back = ToralObject::from_json(&x.to_json()).unwrap();
        assert_eq!(back.to_json(), x.to_json());
    }
}

#[test]
fn induced_map_into_zero_degrees() {
    let y = make_generator(Generator::SigmaH(3)).unwrap();
    let x = y.suspend(6).unwrap();
    let f = ToralMorphism::zero(&x, &y, 0).unwrap();
    let (hx, hy) = (homology_data(&x).unwrap(), homology_data(&y).unwrap());
    let ranks = induced_ranks(&f, &hx, &hy, &[0, 6]).unwrap();
    assert!(ranks.values().all(|&r| r == 0));
}
