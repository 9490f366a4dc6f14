//! Command dispatch for the `engine` binary. Each verb reads JSON objects,
//! calls one family of model operations and returns a text summary plus a
//! JSON report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rational_models::burnside::{self, BurnsideElement, Exceptional, Group, Region, RingOp};
use rational_models::dihedral::{self, DihedralObject};
use rational_models::exceptional::{self, GroupComplex};
use rational_models::fixtures::{self, Fixture, FixtureReport};
use rational_models::graded::GradedQWSpace;
use rational_models::json::{as_i64, as_str, get, rat_from_json};
use rational_models::toral::{self, Element, Generator, Side, Slot, ToralObject};
use rational_models::Error;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verb {
    StarCheck,
    Homology,
    Hom,
    Ext,
    Bracket,
    Resolve,
    Cover,
    Split,
    Burnside,
    Restrict,
    Fixtures,
    Selftest,
}

impl Verb {
    pub const ALL: [Verb; 12] = [
        Verb::StarCheck,
        Verb::Homology,
        Verb::Hom,
        Verb::Ext,
        Verb::Bracket,
        Verb::Resolve,
        Verb::Cover,
        Verb::Split,
        Verb::Burnside,
        Verb::Restrict,
        Verb::Fixtures,
        Verb::Selftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Verb::StarCheck => "star-check",
            Verb::Homology => "homology",
            Verb::Hom => "hom",
            Verb::Ext => "ext",
            Verb::Bracket => "bracket",
            Verb::Resolve => "resolve",
            Verb::Cover => "cover",
            Verb::Split => "split",
            Verb::Burnside => "burnside",
            Verb::Restrict => "restrict",
            Verb::Fixtures => "fixtures",
            Verb::Selftest => "selftest",
        }
    }

    pub fn parse(s: &str) -> Option<Verb> {
        Verb::ALL.into_iter().find(|v| v.name() == s)
    }
}

#[derive(Clone, Debug)]
pub struct Command {
    pub verb: Verb,
    pub inputs: Vec<String>,
    pub window: Option<(i64, i64)>,
    pub op: Option<String>,
}

impl Command {
    pub fn new(verb: Verb, inputs: &[&str]) -> Command {
        Command { verb, inputs: inputs.iter().map(|s| s.to_string()).collect(), window: None, op: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Violation,
    FixtureMismatch,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Violation => 3,
            Status::FixtureMismatch => 4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub status: Status,
    /// Notes for standard error, such as windows chosen automatically.
    pub log: Vec<String>,
}

impl Report {
    fn ok(text: String, json: Value) -> Report {
        Report { text, json, status: Status::Ok, log: Vec::new() }
    }

    fn checked(pass: bool, text: String, json: Value) -> Report {
        let status = if pass { Status::Ok } else { Status::Violation };
        Report { text, json, status, log: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

fn code_for(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Schema(_) => 2,
        Error::FixtureMismatch(_) => 4,
        _ => 3,
    }
}

fn wrap(context: &str) -> impl Fn(Error) -> CliError + '_ {
    move |e| CliError { code: code_for(&e), message: format!("{context}: {e}") }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError { code: 2, message: msg.into() }
}

pub fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("window {s:?} is not lo:hi"))?;
    let lo: i64 = a.trim().parse().map_err(|_| format!("bad lower bound in {s:?}"))?;
    let hi: i64 = b.trim().parse().map_err(|_| format!("bad upper bound in {s:?}"))?;
    if lo > hi {
        return Err(format!("empty window {s:?}"));
    }
    Ok((lo, hi))
}

/// An input object; the model is recognised from the top-level keys.
enum Input {
    Toral(ToralObject),
    Dihedral(DihedralObject),
    Group(GroupComplex),
}

fn read_json(path: &str) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(Path::new(path)).map_err(|e| usage(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{path}: parse error at line {}, column {}: {e}", e.line(), e.column())))
}

/// `gen:<name>` builds a toral generator instead of reading a file.
fn load(arg: &str) -> Result<Input, CliError> {
    if let Some(name) = arg.strip_prefix("gen:") {
        let g = Generator::parse(name).map_err(wrap(arg))?;
        return toral::make_generator(g).map(Input::Toral).map_err(wrap(arg));
    }
    let v = read_json(arg)?;
    if v.get("side").is_some() {
        ToralObject::from_json(&v).map(Input::Toral).map_err(wrap(arg))
    } else if v.get("M_inf").is_some() {
        DihedralObject::from_json(&v).map(Input::Dihedral).map_err(wrap(arg))
    } else if v.get("group").is_some() && v.get("modules").is_some() {
        GroupComplex::from_json(&v).map(Input::Group).map_err(wrap(arg))
    } else {
        Err(usage(format!("{arg}: schema error: not a toral, dihedral or group-complex object")))
    }
}

fn load_toral(arg: &str) -> Result<ToralObject, CliError> {
    match load(arg)? {
        Input::Toral(x) => Ok(x),
        _ => Err(usage(format!("{arg}: schema error: expected a toral object"))),
    }
}

fn inputs(cmd: &Command, n: usize) -> Result<&[String], CliError> {
    if cmd.inputs.len() != n {
        return Err(usage(format!("{} takes {n} input(s), got {}", cmd.verb.name(), cmd.inputs.len())));
    }
    Ok(&cmd.inputs)
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("json values serialise")
}

fn character_json(s: &GradedQWSpace) -> Value {
    let m: Map<String, Value> = s.character().into_iter().map(|(d, (p, q))| (d.to_string(), json!([p, q]))).collect();
    Value::Object(m)
}

fn character_text(s: &GradedQWSpace) -> String {
    let parts: Vec<String> = s.character().into_iter().map(|(d, (p, q))| format!("{d}:{p}+{q}-")).collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

pub fn run(cmd: &Command) -> Result<Report, CliError> {
    match cmd.verb {
        Verb::StarCheck => star_check(cmd),
        Verb::Homology => homology(cmd),
        Verb::Hom => hom(cmd),
        Verb::Ext => ext(cmd),
        Verb::Bracket => bracket(cmd),
        Verb::Resolve => resolve(cmd),
        Verb::Cover => cover(cmd),
        Verb::Split => split(cmd),
        Verb::Burnside => burnside_verb(cmd),
        Verb::Restrict => restrict(cmd),
        Verb::Fixtures => fixtures_verb(cmd),
        Verb::Selftest => Ok(selftest()),
    }
}

fn star_check(cmd: &Command) -> Result<Report, CliError> {
    if cmd.inputs.is_empty() {
        return Err(usage("star-check needs at least one input"));
    }
    let mut text = String::new();
    let mut results = Vec::new();
    let mut all = true;
    for arg in &cmd.inputs {
        let pass = load_toral(arg)?.check_star();
        all &= pass;
        text.push_str(&format!("{} {arg}\n", if pass { "PASS" } else { "FAIL" }));
        results.push(json!({"input": arg, "star": pass}));
    }
    Ok(Report::checked(all, text, json!({"verb": "star-check", "results": results})))
}

fn homology(cmd: &Command) -> Result<Report, CliError> {
    let arg = &inputs(cmd, 1)?[0];
    let (model, h) = match load(arg)? {
        Input::Toral(x) => ("toral", toral::homology_da(&x).map_err(wrap(arg))?.to_json()),
        Input::Dihedral(m) => ("dihedral", dihedral::homology_ch(&m).map_err(wrap(arg))?.to_json()),
        Input::Group(x) => ("exceptional", exceptional::homology_w(&x).map_err(wrap(arg))?.to_json()),
    };
    let text = format!("{model} homology: {}\n", compact(&h));
    Ok(Report::ok(text, json!({"verb": "homology", "model": model, "homology": h})))
}

fn auto_range(cmd: &Command, auto: (i64, i64), log: &mut Vec<String>) -> (i64, i64) {
    match cmd.window {
        Some(w) => w,
        None => {
            log.push(format!("window chosen automatically: {}:{}", auto.0, auto.1));
            auto
        }
    }
}

fn complex_degrees(bases: &[&[(i64, i8)]]) -> (i64, i64) {
    let degs: Vec<i64> = bases.iter().flat_map(|b| b.iter().map(|x| x.0)).collect();
    (degs.iter().copied().min().unwrap_or(0), degs.iter().copied().max().unwrap_or(0))
}

fn dihedral_degrees(m: &DihedralObject) -> (i64, i64) {
    let mut bases: Vec<&[(i64, i8)]> = vec![m.inf().basis(), m.tail().basis()];
    bases.extend(m.explicit().values().map(|c| c.basis().as_slice()));
    complex_degrees(&bases)
}

fn hom(cmd: &Command) -> Result<Report, CliError> {
    let args = inputs(cmd, 2)?;
    let mut log = Vec::new();
    let report = match (load(&args[0])?, load(&args[1])?) {
        (Input::Toral(x), Input::Toral(y)) => {
            let range = auto_range(cmd, toral::hom_degree_range(&x, &y), &mut log);
            let h = toral::hom_a(&x, &y, Some(range)).map_err(wrap("hom"))?;
            let text = format!("hom over {}:{}: {}\n", range.0, range.1, character_text(&h));
            Report::ok(text, json!({"verb": "hom", "model": "toral", "window": [range.0, range.1], "hom": h.to_json(), "character": character_json(&h)}))
        }
        (Input::Dihedral(m), Input::Dihedral(n)) => {
            let (a, b) = (dihedral_degrees(&m), dihedral_degrees(&n));
            let range = auto_range(cmd, (b.0 - a.1, b.1 - a.0), &mut log);
            let dims: BTreeMap<String, usize> =
                (range.0..=range.1).map(|d| (d.to_string(), dihedral::hom_dim(&m, &n, d))).filter(|(_, n)| *n > 0).collect();
            let text = format!("chain maps by degree over {}:{}: {}\n", range.0, range.1, compact(&json!(dims)));
            Report::ok(text, json!({"verb": "hom", "model": "dihedral", "window": [range.0, range.1], "dims": dims}))
        }
        (Input::Group(x), Input::Group(y)) => {
            let h = exceptional::internal_hom_conj(&x, &y).map_err(wrap("hom"))?;
            let mut dims = Map::new();
            for d in h.degrees() {
                let fixed = h.rep(d).map_or(0, exceptional::fixed_dim);
                dims.insert(d.to_string(), json!({"dim": h.dim_at(d), "fixed": fixed}));
            }
            let text = format!("internal hom: {}\n", compact(&Value::Object(dims.clone())));
            Report::ok(text, json!({"verb": "hom", "model": "exceptional", "dims": dims, "hom": h.to_json()}))
        }
        _ => return Err(usage("hom: both inputs must come from the same model")),
    };
    Ok(Report { log, ..report })
}

fn ext(cmd: &Command) -> Result<Report, CliError> {
    let args = inputs(cmd, 2)?;
    let (x, y) = (load_toral(&args[0])?, load_toral(&args[1])?);
    let mut log = Vec::new();
    let range = auto_range(cmd, toral::ext_degree_range(&x, &y), &mut log);
    let e = toral::ext_a(&x, &y, Some(range)).map_err(wrap("ext"))?;
    let text = format!("ext over {}:{}: {}\n", range.0, range.1, character_text(&e));
    let json = json!({"verb": "ext", "window": [range.0, range.1], "ext": e.to_json(), "character": character_json(&e)});
    Ok(Report { log, ..Report::ok(text, json) })
}

fn bracket(cmd: &Command) -> Result<Report, CliError> {
    let args = inputs(cmd, 2)?;
    let (x, y) = (load_toral(&args[0])?, load_toral(&args[1])?);
    let mut log = Vec::new();
    if cmd.window.is_none() {
        log.push("window chosen automatically from the homology objects".into());
    }
    let (h, e) = toral::adams_bracket(&x, &y, cmd.window).map_err(wrap("bracket"))?;
    let total = h.total_dim() + e.total_dim();
    let text = format!("hom part: {}\next part: {}\ntotal dimension: {total}\n", character_text(&h), character_text(&e));
    let json = json!({
        "verb": "bracket",
        "hom": character_json(&h),
        "ext": character_json(&e),
        "total_dim": total,
    });
    Ok(Report { log, ..Report::ok(text, json) })
}

fn resolve(cmd: &Command) -> Result<Report, CliError> {
    let arg = &inputs(cmd, 1)?[0];
    let y = load_toral(arg)?;
    let res = toral::injective_resolution(&y, cmd.window.map(|w| w.1)).map_err(wrap(arg))?;
    let mut log = Vec::new();
    if cmd.window.is_none() {
        log.push(format!("resolution window chosen automatically: {}:{}", res.window.lo, res.window.hi));
    }
    let exact = res.check_exact();
    let text = format!(
        "injective: {}\ncokernel: {}\nexact on {}:{}: {}\n",
        compact(&res.injective.to_json()),
        compact(&res.cokernel.to_json()),
        res.window.lo,
        res.window.hi,
        if exact.is_ok() { "yes" } else { "NO" }
    );
    let json = json!({
        "verb": "resolve",
        "injective": res.injective.to_json(),
        "cokernel": res.cokernel.to_json(),
        "window": [res.window.lo, res.window.hi],
        "exact": exact.is_ok(),
        "error": exact.as_ref().err().map(|e| e.to_string()),
    });
    Ok(Report { log, ..Report::checked(exact.is_ok(), text, json) })
}

fn element_from_json(v: &Value) -> rational_models::Result<Element> {
    let slot = match get(v, "slot")? {
        Value::String(s) if s == "tail" => Slot::Tail,
        other => Slot::At(as_i64(other)? as u32),
    };
    let coords = get(v, "coords")?
        .as_array()
        .ok_or_else(|| Error::Schema("coords must be a list".into()))?
        .iter()
        .map(rat_from_json)
        .collect::<rational_models::Result<_>>()?;
    Ok(Element { slot, degree: as_i64(get(v, "degree")?)?, coords })
}

fn cover(cmd: &Command) -> Result<Report, CliError> {
    match cmd.inputs.len() {
        1 => {
            let arg = &cmd.inputs[0];
            let x = load_toral(arg)?;
            let (c, surjective) = toral::cover_generating_set(&x).map_err(wrap(arg))?;
            let text = format!("cover of a generating set: {}\nsurjective: {surjective}\n", compact(&c.sphere.to_json()));
            Ok(Report::checked(surjective, text, json!({"verb": "cover", "sphere": c.sphere.to_json(), "surjective": surjective})))
        }
        2 => {
            let x = load_toral(&cmd.inputs[0])?;
            let n = element_from_json(&read_json(&cmd.inputs[1])?).map_err(wrap(&cmd.inputs[1]))?;
            let c = toral::wide_sphere_cover(&x, &n).map_err(wrap(&cmd.inputs[0]))?;
            let hits = c.hits(&n);
            let text = format!("wide sphere: {}\nhits element: {hits}\n", compact(&c.sphere.to_json()));
            Ok(Report::checked(hits, text, json!({"verb": "cover", "sphere": c.sphere.to_json(), "hits": hits})))
        }
        k => Err(usage(format!("cover takes an object and optionally an element, got {k} inputs"))),
    }
}

fn split(cmd: &Command) -> Result<Report, CliError> {
    let arg = &inputs(cmd, 1)?[0];
    let (even, odd) = load_toral(arg)?.parity_split().map_err(wrap(arg))?;
    let text = format!("even: {}\nodd: {}\n", compact(&even.to_json()), compact(&odd.to_json()));
    Ok(Report::ok(text, json!({"verb": "split", "even": even.to_json(), "odd": odd.to_json()})))
}

/// Named Burnside elements: e_T, e_D, e_E, e_<class>, one, zero, with an
/// optional `:O2` suffix for the O(2) ring. Anything else is a file holding
/// an element or a region descriptor.
fn burnside_element(arg: &str) -> Result<BurnsideElement, CliError> {
    let (name, group) = match arg.strip_suffix(":O2") {
        Some(n) => (n, Group::O2),
        None => (arg.strip_suffix(":SO3").unwrap_or(arg), Group::SO3),
    };
    let named = match name {
        "one" => Some(Ok(BurnsideElement::one(group))),
        "zero" => Some(Ok(BurnsideElement::zero(group))),
        "e_T" => Some(Ok(burnside::e_toral(group))),
        "e_D" => Some(Ok(burnside::e_dihedral(group))),
        "e_E" if group == Group::SO3 => Some(Ok(burnside::e_exceptional())),
        _ => name.strip_prefix("e_").and_then(|c| Exceptional::parse(c).ok()).map(|h| {
            if group == Group::SO3 {
                Ok(burnside::e_class(h))
            } else {
                Err(Error::BadClass("O2 has no exceptional classes".into()))
            }
        }),
    };
    if let Some(r) = named {
        return r.map_err(wrap(arg));
    }
    let v = read_json(arg)?;
    if let Some(region) = v.get("region") {
        let group = match v.get("group") {
            Some(g) => Group::parse(as_str(g).map_err(wrap(arg))?).map_err(wrap(arg))?,
            None => Group::SO3,
        };
        let r = Region::from_json(region).map_err(wrap(arg))?;
        return burnside::idempotent(group, &r).map_err(wrap(arg));
    }
    BurnsideElement::from_json(&v).map_err(wrap(arg))
}

fn burnside_verb(cmd: &Command) -> Result<Report, CliError> {
    if cmd.inputs.len() == 1 && cmd.inputs[0] == "split" {
        let parts = burnside::split_exceptional();
        let text: String = Exceptional::ALL.iter().zip(&parts).map(|(h, e)| format!("{}: {}\n", h.name(), compact(&e.to_json()))).collect();
        let json = json!({"verb": "burnside", "split": parts.iter().map(BurnsideElement::to_json).collect::<Vec<_>>()});
        return Ok(Report::ok(text, json));
    }
    match cmd.inputs.len() {
        1 => {
            let a = burnside_element(&cmd.inputs[0])?;
            let text = format!("{}\nidempotent: {}\n", compact(&a.to_json()), a.is_idempotent());
            Ok(Report::ok(text, json!({"verb": "burnside", "element": a.to_json(), "idempotent": a.is_idempotent()})))
        }
        2 => {
            let (a, b) = (burnside_element(&cmd.inputs[0])?, burnside_element(&cmd.inputs[1])?);
            let op = match cmd.op.as_deref().unwrap_or("mul") {
                "mul" => RingOp::Mul,
                "add" => RingOp::Add,
                other => return Err(usage(format!("unknown ring operation {other:?}"))),
            };
            let r = burnside::ring_op(&a, &b, op).map_err(wrap("burnside"))?;
            Ok(Report::ok(format!("{}\n", compact(&r.to_json())), json!({"verb": "burnside", "result": r.to_json()})))
        }
        k => Err(usage(format!("burnside takes one or two elements, got {k}"))),
    }
}

fn restrict(cmd: &Command) -> Result<Report, CliError> {
    let arg = &inputs(cmd, 1)?[0];
    let r = burnside::restrict_to_o2(&burnside_element(arg)?).map_err(wrap(arg))?;
    Ok(Report::ok(format!("{}\n", compact(&r.to_json())), json!({"verb": "restrict", "result": r.to_json()})))
}

fn fixture_report(report: FixtureReport) -> Report {
    let status = if report.all_passed() { Status::Ok } else { Status::FixtureMismatch };
    let mut json = report.to_json();
    json["verb"] = json!("fixtures");
    Report { text: report.to_text(), json, status, log: Vec::new() }
}

fn fixtures_verb(cmd: &Command) -> Result<Report, CliError> {
    if cmd.inputs.is_empty() {
        return Ok(fixture_report(fixtures::fixture_verify().map_err(wrap("builtin fixtures"))?));
    }
    let list = cmd
        .inputs
        .iter()
        .map(|arg| Fixture::from_json(&read_json(arg)?).map_err(wrap(arg)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(fixture_report(fixtures::verify_all(&list)))
}

type Case = (&'static str, fn() -> Result<(), String>);

fn check(cond: bool, what: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn case_burnside() -> Result<(), String> {
    let (t, d, e) = (burnside::e_toral(Group::SO3), burnside::e_dihedral(Group::SO3), burnside::e_exceptional());
    let sum = burnside::add(&burnside::add(&t, &d).map_err(err)?, &e).map_err(err)?;
    check(sum == BurnsideElement::one(Group::SO3), "toral + dihedral + exceptional = 1")?;
    for (a, b) in [(&t, &d), (&t, &e), (&d, &e)] {
        check(burnside::mul(a, b).map_err(err)? == BurnsideElement::zero(Group::SO3), "orthogonal idempotents")?;
    }
    let mut acc = BurnsideElement::zero(Group::SO3);
    for p in burnside::split_exceptional() {
        acc = burnside::add(&acc, &p).map_err(err)?;
    }
    check(acc == e, "exceptional pieces sum to the exceptional idempotent")
}

fn small(side: Side) -> toral::RandomSpec {
    toral::RandomSpec { max_slot: 4, max_explicit: 3, lo: -8, hi: 8, max_v: 2, ..toral::RandomSpec::new(side) }
}

fn case_unit() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..10 {
        let x = toral::random_object(&mut rng, &small(Side::SO3)).map_err(err)?;
        let back = toral::functor_r(&toral::functor_f(&x).map_err(err)?).map_err(err)?;
        check(back.to_json() == x.to_json(), "restriction after inflation is the identity")?;
    }
    Ok(())
}

fn case_resolution() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for side in [Side::SO3, Side::O2] {
        for _ in 0..4 {
            let y = toral::random_object(&mut rng, &small(side)).map_err(err)?;
            toral::injective_resolution(&y, None).map_err(err)?.check_exact().map_err(err)?;
        }
    }
    Ok(())
}

fn case_dihedral() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..10 {
        let m = dihedral::random::random_dihedral(&mut rng, -2, 2, 2);
        let h = dihedral::homology_ch(&m).map_err(err)?;
        for k in [3, 6] {
            let lhs = dihedral::functor_p(&h, k).map_err(err)?;
            let rhs = dihedral::functor_p(&m, k).map_err(err)?.homology().map_err(err)?.0;
            check(lhs == rhs, "homology commutes with evaluation")?;
        }
    }
    Ok(())
}

fn case_kunneth() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for h in Exceptional::ALL {
        let g = exceptional::weyl_group_of(h);
        let x = exceptional::random::random_group_complex(&mut rng, &g, -1, 1, 2);
        let y = exceptional::random::random_group_complex(&mut rng, &g, -1, 1, 2);
        let (hx, hy) = (exceptional::homology_w(&x).map_err(err)?, exceptional::homology_w(&y).map_err(err)?);
        let ht = exceptional::homology_w(&exceptional::tensor_diagonal(&x, &y).map_err(err)?).map_err(err)?;
        for n in -2..=2 {
            let expect: usize = (-1..=1).map(|p| hx.dim_at(p) * hy.dim_at(n - p)).sum();
            check(ht.dim_at(n) == expect, "Kunneth dimension identity")?;
        }
    }
    Ok(())
}

fn case_fixtures() -> Result<(), String> {
    let r = fixtures::fixture_verify().map_err(err)?;
    check(r.all_passed(), r.to_text().trim_end())
}

const CASES: &[Case] = &[
    ("burnside idempotents", case_burnside),
    ("restriction of inflation", case_unit),
    ("injective resolutions", case_resolution),
    ("dihedral homology", case_dihedral),
    ("exceptional Kunneth", case_kunneth),
    ("fixtures", case_fixtures),
];

/// Seeded invariant checks, run in parallel and reported in a fixed order.
pub fn selftest() -> Report {
    let outcomes: Vec<Result<(), String>> = std::thread::scope(|s| {
        let handles: Vec<_> = CASES.iter().map(|(_, f)| s.spawn(f)).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err("panicked".into()))).collect()
    });
    let mut text = String::new();
    let mut cases = Vec::new();
    for ((name, _), r) in CASES.iter().zip(&outcomes) {
        match r {
            Ok(()) => text.push_str(&format!("PASS {name}\n")),
            Err(e) => text.push_str(&format!("FAIL {name}: {e}\n")),
        }
        cases.push(json!({"name": name, "status": if r.is_ok() { "PASS" } else { "FAIL" }, "error": r.as_ref().err()}));
    }
    let pass = outcomes.iter().all(Result::is_ok);
    Report::checked(pass, text, json!({"verb": "selftest", "passed": pass, "cases": cases}))
}

/// Writes the JSON report, pretty-printed with a trailing newline.
pub fn write_report(path: &PathBuf, report: &Report) -> std::io::Result<()> {
    let mut s = serde_json::to_string_pretty(&report.json).expect("json values serialise");
    s.push('\n');
    std::fs::write(path, s)
}
