use rational_models::fixtures::*;
use rational_models::toral::{make_generator, twisted_f, Generator};
use rational_models::Error;

#[test]
fn builtin_fixtures_all_pass() {
    let report = fixture_verify().unwrap();
    assert_eq!(report.outcomes.len(), 14);
    assert!(report.all_passed(), "{}", report.to_text());
    assert_eq!(report.outcomes.iter().filter(|o| o.stored).count(), 7);
}

#[test]
fn mismatch_names_fixture_and_degree() {
    let mut f = builtin_fixtures().unwrap().into_iter().find(|f| f.name == "image-free-orbit").unwrap();
    f.suspend = 1;
    let err = verify_fixture(&f).unwrap_err();
    assert!(matches!(&err, Error::FixtureMismatch(m) if m.contains("image-free-orbit") && m.contains("degree -1")), "{err}");
    // A wrong generator at another slot.
    let mut g = builtin_fixtures().unwrap().into_iter().find(|f| f.name == "cell-sigmaH-4").unwrap();
    g.generator = Generator::SigmaH(5);
    assert!(matches!(verify_fixture(&g), Err(Error::FixtureMismatch(m)) if m.contains("cell-sigmaH-4") && m.contains("degree 0")));
}

#[test]
fn structure_maps_are_compared() {
    // Same modules and V, different structure map: the circle cell against
    // the sum of its two sphere parts with the twisted part moved to slot 1
    // unshifted.
    let t = twisted_f(&make_generator(Generator::SigmaT).unwrap()).unwrap();
    assert_eq!(first_difference(&t, &t).unwrap(), None);
    let s = twisted_f(&make_generator(Generator::S0).unwrap()).unwrap();
    assert!(first_difference(&t, &s).unwrap().is_some());
}

#[test]
fn report_is_deterministic() {
    let a = fixture_verify().unwrap();
    let b = fixture_verify().unwrap();
    assert_eq!(serde_json::to_string(&a.to_json()).unwrap(), serde_json::to_string(&b.to_json()).unwrap());
}
