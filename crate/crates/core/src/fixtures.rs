//! Frozen reference objects for the cell images and the quoted images of
//! orbit spectra, with a verifier comparing canonical forms.

use serde_json::{json, Value};

use crate::graded::auto_window;
use crate::json::{as_str, get};
use crate::toral::{is_isomorphic, make_generator, twisted_f, Generator, Side, Slot, ToralObject};
use crate::{Error, Result};

const FILES: &[(&str, &str)] = &[
    ("cell-sigma1", include_str!("../fixtures/cell-sigma1.json")),
    ("cell-sigmaH-2", include_str!("../fixtures/cell-sigmaH-2.json")),
    ("cell-sigmaH-3", include_str!("../fixtures/cell-sigmaH-3.json")),
    ("cell-sigmaH-4", include_str!("../fixtures/cell-sigmaH-4.json")),
    ("cell-sigmaH-5", include_str!("../fixtures/cell-sigmaH-5.json")),
    ("cell-sigmaH-6", include_str!("../fixtures/cell-sigmaH-6.json")),
    ("cell-sigmaT", include_str!("../fixtures/cell-sigmaT.json")),
    ("image-free-orbit", include_str!("../fixtures/image-free-orbit.json")),
    ("image-circle-quotient", include_str!("../fixtures/image-circle-quotient.json")),
    ("image-cyclic-orbit-2", include_str!("../fixtures/image-cyclic-orbit-2.json")),
    ("image-cyclic-orbit-3", include_str!("../fixtures/image-cyclic-orbit-3.json")),
    ("image-cyclic-orbit-4", include_str!("../fixtures/image-cyclic-orbit-4.json")),
    ("image-cyclic-orbit-5", include_str!("../fixtures/image-cyclic-orbit-5.json")),
    ("image-cyclic-orbit-6", include_str!("../fixtures/image-cyclic-orbit-6.json")),
];

/// A reference object and the functor composite that should reproduce it:
/// the twisted restriction of a generator, suspended `suspend` times.
///
/// Computed fixtures are checked by recomputation. Stored ones come from
/// outside the algebraic model, so they are checked for consistency: star
/// condition, parity, canonical form, and agreement with the recipe.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub note: String,
    pub generator: Generator,
    pub suspend: i64,
    pub stored: bool,
    pub parity: Option<i64>,
    pub expected: ToralObject,
}

impl Fixture {
    pub fn from_json(v: &Value) -> Result<Fixture> {
        let recipe = get(v, "recipe")?;
        let suspend = recipe.get("suspend").and_then(Value::as_i64).unwrap_or(0);
        Ok(Fixture {
            name: as_str(get(v, "name")?)?.to_string(),
            note: v.get("note").and_then(Value::as_str).unwrap_or("").to_string(),
            generator: Generator::parse(as_str(get(recipe, "generator")?)?)?,
            suspend,
            stored: v.get("stored").and_then(Value::as_bool).unwrap_or(false),
            parity: v.get("parity").and_then(Value::as_i64),
            expected: ToralObject::from_json(get(v, "expected")?)?,
        })
    }

    pub fn compute(&self) -> Result<ToralObject> {
        twisted_f(&make_generator(self.generator)?)?.suspend(self.suspend)
    }
}

pub fn builtin_fixtures() -> Result<Vec<Fixture>> {
    FILES
        .iter()
        .map(|(name, text)| {
            let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("fixture {name}: {e}")))?;
            Fixture::from_json(&v)
        })
        .collect()
}

/// The first place two objects differ, as (degree, what), or None when they
/// agree up to isomorphism.
pub fn first_difference(expected: &ToralObject, got: &ToralObject) -> Result<Option<(i64, String)>> {
    if expected.side() != got.side() {
        return Ok(Some((0, format!("side {} vs {}", expected.side().name(), got.side().name()))));
    }
    let mut slots = expected.slots();
    slots.extend(got.slots());
    slots.sort();
    slots.dedup();
    let mut found: Option<(i64, String)> = None;
    for s in slots {
        let (a, b) = (expected.module(s).canonical(), got.module(s).canonical());
        if a == b {
            continue;
        }
        let w = auto_window(&[&a, &b], 0);
        let at = w.degrees().find(|&e| {
            let (mut x, mut y) = (a.signs_at(e), b.signs_at(e));
            x.sort();
            y.sort();
            x != y
        });
        let e = at.unwrap_or_else(|| a.summands().iter().chain(b.summands()).map(|x| x.shift).min().unwrap_or(0));
        note(&mut found, e, format!("module at {}", slot_name(s)));
    }
    let (mut va, mut vb) = (expected.v().clone(), got.v().clone());
    va.sort();
    vb.sort();
    if va != vb {
        let e = va.iter().chain(&vb).filter(|x| count(&va, x) != count(&vb, x)).map(|x| x.0).min();
        note(&mut found, e.unwrap_or(0), "V".into());
    }
    if found.is_none() && !is_isomorphic(expected, got)? {
        let e = expected.degrees().into_iter().min().unwrap_or(0);
        note(&mut found, e, "structure maps".into());
    }
    Ok(found)
}

/// Keeps the lowest-degree difference.
fn note(found: &mut Option<(i64, String)>, e: i64, what: String) {
    if found.as_ref().map_or(true, |(d, _)| e < *d) {
        *found = Some((e, what));
    }
}

fn count(v: &[(i64, i8)], x: &(i64, i8)) -> usize {
    v.iter().filter(|y| *y == x).count()
}

fn slot_name(s: Slot) -> String {
    match s {
        Slot::At(k) => format!("slot {k}"),
        Slot::Tail => "tail".into(),
    }
}

fn mismatch(f: &Fixture, e: i64, what: &str) -> Error {
    Error::FixtureMismatch(format!("{}: {what} differs, first at degree {e}", f.name))
}

pub fn verify_fixture(f: &Fixture) -> Result<()> {
    let x = &f.expected;
    if f.stored {
        if x.side() != Side::O2 {
            return Err(Error::FixtureMismatch(format!("{}: stored images live on the O(2) side", f.name)));
        }
        if !x.check_star() {
            return Err(Error::FixtureMismatch(format!("{}: star condition fails", f.name)));
        }
        if let Some(p) = f.parity {
            if !x.is_parity_pure(p) {
                return Err(Error::FixtureMismatch(format!("{}: not concentrated in parity {p}", f.name)));
            }
        }
        for s in x.slots() {
            if x.module(s).summands() != x.module(s).canonical().summands() {
                return Err(Error::FixtureMismatch(format!("{}: {} not in canonical form", f.name, slot_name(s))));
            }
        }
    }
    match first_difference(x, &f.compute()?)? {
        None => Ok(()),
        Some((e, what)) => Err(mismatch(f, e, &what)),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixtureOutcome {
    pub name: String,
    pub stored: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixtureReport {
    pub outcomes: Vec<FixtureOutcome>,
}

impl FixtureReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.error.is_none())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.all_passed(),
            "fixtures": self.outcomes.iter().map(|o| json!({
                "name": o.name,
                "kind": if o.stored { "stored" } else { "computed" },
                "status": if o.error.is_none() { "PASS" } else { "FAIL" },
                "error": o.error,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let kind = if o.stored { "stored" } else { "computed" };
            match &o.error {
                None => out.push_str(&format!("PASS {} ({kind})\n", o.name)),
                Some(e) => out.push_str(&format!("FAIL {} ({kind}): {e}\n", o.name)),
            }
        }
        out
    }
}

/// Verifies every fixture, one thread per case; outcomes keep input order.
pub fn verify_all(fixtures: &[Fixture]) -> FixtureReport {
    let outcomes = std::thread::scope(|scope| {
        let handles: Vec<_> = fixtures.iter().map(|f| scope.spawn(move || verify_fixture(f))).collect();
        handles
            .into_iter()
            .zip(fixtures)
            .map(|(h, f)| FixtureOutcome {
                name: f.name.clone(),
                stored: f.stored,
                error: match h.join() {
                    Ok(r) => r.err().map(|e| e.to_string()),
                    Err(_) => Some("verifier panicked".into()),
                },
            })
            .collect()
    });
    FixtureReport { outcomes }
}

pub fn fixture_verify() -> Result<FixtureReport> {
    Ok(verify_all(&builtin_fixtures()?))
}
