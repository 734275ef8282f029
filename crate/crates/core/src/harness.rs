//! Diagram checks over a catalog, each paired with a negative control.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::genus::{chern_series, hirzebruch_series, multiplicative_class, todd_series, GenusSeries};
use crate::geometry::{fiber_square, CohClass, LinearMap, Morphism, MorphismKind};
use crate::ktheory::{ambient_tangent, normal_bundle, relative_tangent, virtual_tangent, VirtualBundle};
use crate::milnor::{classical_milnor_degree, hirzebruch_milnor_report, MilnorReport, SingularHypersurfaceData};
use crate::motivic::{push_cycle, pull_cycle, twisted_pull_sign, twisted_push_sign, Cycle, Flavor};
use crate::transforms::{fj_class, gamma_class, hirzebruch_class, hirzebruch_class_with, milnor_transform_with};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    pub order: usize,
    /// `None` compares symbolically in `y`; `Some(-1)` runs only the
    /// classical Milnor suite.
    pub y: Option<Rational>,
}

impl Settings {
    pub fn new(order: usize) -> Self {
        Settings { order, y: None }
    }

    fn classical_only(&self) -> bool {
        self.y.as_ref() == Some(&Rational::from_int(-1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ControlResult {
    pub mutation: String,
    /// `None` when the mutation target is absent from the catalog.
    pub detected: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub instances: usize,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub control: ControlResult,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass && self.control.detected != Some(false)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HarnessReport {
    pub order: usize,
    pub y: Option<Rational>,
    pub checks: Vec<CheckResult>,
    pub milnor: Vec<MilnorReport>,
    pub passed: bool,
}

#[derive(Default)]
struct Outcome {
    instances: usize,
    failure: Option<Value>,
}

impl Outcome {
    fn compare(&mut self, s: &Settings, instance: impl FnOnce() -> Value, left: Result<CohClass>, right: Result<CohClass>) {
        self.instances += 1;
        if self.failure.is_some() {
            return;
        }
        let spec = |c: CohClass| match &s.y {
            Some(y0) => c.specialize(y0),
            None => c,
        };
        match (left, right) {
            (Ok(l), Ok(r)) => {
                let (l, r) = (spec(l), spec(r));
                if l != r {
                    self.failure = Some(json!({"instance": instance(), "left": l, "right": r}));
                }
            }
            (l, r) => {
                let err = l.err().or(r.err()).map(|e| e.to_string());
                self.failure = Some(json!({"instance": instance(), "error": err}));
            }
        }
    }

    fn assert(&mut self, instance: impl FnOnce() -> Value, ok: Result<bool>) {
        self.instances += 1;
        if self.failure.is_none() {
            match ok {
                Ok(true) => {}
                Ok(false) => self.failure = Some(json!({"instance": instance()})),
                Err(e) => self.failure = Some(json!({"instance": instance(), "error": e.to_string()})),
            }
        }
    }
}

/// Doubles the image of the point class; structural recomputation elsewhere
/// in the pipeline then disagrees with the stored matrix.
pub fn corrupt_point_image(m: &LinearMap) -> LinearMap {
    let top = m.source().top_exponents();
    let mut images = m.images().clone();
    let doubled = images[&top].scale_int(2);
    images.insert(top, doubled);
    LinearMap::new(m.source().clone(), m.target().clone(), images).expect("same models")
}

enum Control {
    /// Corrupt the pushforward of this morphism and rerun.
    Matrix(&'static str),
    /// Rerun with the check's built-in mutation switched on.
    Inline(&'static str),
}

type Runner = fn(&Catalog, &Settings, bool) -> Result<Outcome>;

struct CheckDef {
    id: &'static str,
    run: Runner,
    control: Control,
}

fn genera(order: usize) -> Vec<GenusSeries> {
    vec![chern_series(order), todd_series(order), hirzebruch_series(order)]
}

fn order(cat: &Catalog, s: &Settings) -> usize {
    s.order.max(cat.max_dim())
}

fn cycles_of(cat: &Catalog, flavor: Option<Flavor>) -> Vec<(&str, &Cycle)> {
    cat.cycles()
        .iter()
        .filter(|(_, c)| flavor.is_none_or(|f| c.flavor() == f))
        .map(|(k, c)| (k.as_str(), c))
        .collect()
}

/// Smooth catalog morphisms plus the identity of every space carrying a cycle.
fn smooth_morphisms(cat: &Catalog) -> Vec<Arc<Morphism>> {
    let mut out: Vec<Arc<Morphism>> = Vec::new();
    for (_, c) in cat.cycles() {
        if !out.iter().any(|m| m.source().as_ref() == c.x().as_ref() && matches!(m.kind(), MorphismKind::Identity)) {
            out.push(Arc::new(Morphism::identity(c.x().clone())));
        }
    }
    out.extend(cat.morphisms().filter(|m| m.is_smooth()).cloned());
    out
}

fn proper_morphisms(cat: &Catalog) -> Vec<Arc<Morphism>> {
    let mut out: Vec<Arc<Morphism>> = cat.morphisms().cloned().collect();
    for (_, c) in cat.cycles() {
        if !out.iter().any(|m| m.source().as_ref() == c.x().as_ref() && matches!(m.kind(), MorphismKind::Identity)) {
            out.push(Arc::new(Morphism::identity(c.x().clone())));
        }
    }
    out
}

fn over_point(c: &Cycle) -> bool {
    c.s().ambient().nvars() == 0
}

fn smooth_sources(c: &Cycle) -> bool {
    c.terms().all(|t| t.source().is_smooth())
}

fn vrr_pairs(cat: &Catalog, flavor: Option<Flavor>) -> Vec<(Arc<Morphism>, &str, &Cycle)> {
    let mut out = Vec::new();
    for f in smooth_morphisms(cat) {
        for (id, c) in cycles_of(cat, flavor) {
            if f.target().as_ref() == c.x().as_ref() {
                out.push((f.clone(), id, c));
            }
        }
    }
    out
}

fn td_tf(g: &GenusSeries, f: &Morphism) -> Result<CohClass> {
    multiplicative_class(g, &relative_tangent(f)?, f.source().ambient())
}

fn vrr_generic(
    cat: &Catalog,
    s: &Settings,
    flavor: Option<Flavor>,
    gs: Vec<GenusSeries>,
    transform: impl Fn(&GenusSeries, &Cycle) -> Result<CohClass>,
    sign: impl Fn(&Morphism) -> Rational,
) -> Result<Outcome> {
    let mut out = Outcome::default();
    for (f, id, c) in vrr_pairs(cat, flavor) {
        let pulled = pull_cycle(&f, c);
        for g in &gs {
            let left = pulled.as_ref().map_err(Clone::clone).and_then(|p| transform(g, p));
            let right = transform(g, c)
                .and_then(|v| f.gysin_pullback(&v))
                .and_then(|v| td_tf(g, &f)?.mul(&v))
                .map(|v| v.scale_rational(&sign(&f)));
            out.compare(s, || json!({"f": f.name(), "cycle": id, "genus": g.name()}), left, right);
        }
    }
    Ok(out)
}

fn check_vrr_fj(cat: &Catalog, s: &Settings, _: bool) -> Result<Outcome> {
    vrr_generic(cat, s, Some(Flavor::Lci), genera(order(cat, s)), fj_class, |_| Rational::one())
}

fn check_vrr_hirzebruch(cat: &Catalog, s: &Settings, _: bool) -> Result<Outcome> {
    vrr_generic(cat, s, None, genera(order(cat, s)), hirzebruch_class_with, |_| Rational::one())
}

fn check_vrr_milnor(cat: &Catalog, s: &Settings, drop_twist: bool) -> Result<Outcome> {
    vrr_generic(
        cat,
        s,
        Some(Flavor::Lci),
        vec![hirzebruch_series(order(cat, s))],
        milnor_transform_with,
        |f| if drop_twist { Rational::one() } else { twisted_pull_sign(f) },
    )
}

fn check_dubois_vanishing(cat: &Catalog, s: &Settings, flip: bool) -> Result<Outcome> {
    let g = hirzebruch_series(order(cat, s));
    let mt = |c: &Cycle| -> Result<CohClass> {
        if flip {
            let v = fj_class(&g, c)?.add(&hirzebruch_class_with(&g, c)?)?;
            Ok(v.scale_rational(&Rational::sign_pow(c.x().dim() as i64)))
        } else {
            milnor_transform_with(&g, c)
        }
    };
    let mut out = Outcome::default();
    for (id, c) in cycles_of(cat, Some(Flavor::Lci)) {
        if !over_point(c) || !smooth_sources(c) {
            continue;
        }
        let zero = c.x().ambient().zero();
        let v = mt(c);
        let at_zero = v.clone().map(|v| v.specialize(&Rational::zero()));
        out.compare(s, || json!({"cycle": id, "y": "symbolic"}), v, Ok(zero.clone()));
        out.compare(s, || json!({"cycle": id, "y": "0"}), at_zero, Ok(zero));
        let empty = Cycle::zero(c.base().clone(), Flavor::Lci);
        out.compare(s, || json!({"cycle": "empty", "over": c.x().name()}), mt(&empty), Ok(c.x().ambient().zero()));
    }
    Ok(out)
}

fn naturality_generic(
    cat: &Catalog,
    s: &Settings,
    keep: impl Fn(&Cycle) -> bool,
    gs: Vec<GenusSeries>,
    transform: impl Fn(&GenusSeries, &Cycle) -> Result<CohClass>,
    sign: impl Fn(&Morphism) -> Rational,
) -> Result<Outcome> {
    let mut out = Outcome::default();
    let fs = proper_morphisms(cat);
    for (id, c) in cycles_of(cat, None) {
        if !over_point(c) || !keep(c) {
            continue;
        }
        for f in fs.iter().filter(|f| f.source().as_ref() == c.x().as_ref()) {
            let pushed = push_cycle(f, c, None);
            for g in &gs {
                let left = pushed.as_ref().map_err(Clone::clone).and_then(|p| transform(g, p));
                let right = transform(g, c)
                    .and_then(|v| f.pushforward(&v))
                    .map(|v| v.scale_rational(&sign(f)));
                out.compare(s, || json!({"f": f.name(), "cycle": id, "genus": g.name()}), left, right);
            }
        }
    }
    Ok(out)
}

fn check_naturality_gamma(cat: &Catalog, s: &Settings, _: bool) -> Result<Outcome> {
    naturality_generic(cat, s, smooth_sources, genera(order(cat, s)), gamma_class, |_| {
        Rational::one()
    })
}

fn check_naturality_fj(cat: &Catalog, s: &Settings, _: bool) -> Result<Outcome> {
    naturality_generic(
        cat,
        s,
        |c| c.flavor() == Flavor::Lci,
        genera(order(cat, s)),
        fj_class,
        |_| Rational::one(),
    )
}

fn check_naturality_milnor(cat: &Catalog, s: &Settings, drop_twist: bool) -> Result<Outcome> {
    naturality_generic(
        cat,
        s,
        |c| c.flavor() == Flavor::Lci,
        vec![hirzebruch_series(order(cat, s))],
        milnor_transform_with,
        |f| if drop_twist { Rational::one() } else { twisted_push_sign(f) },
    )
}

fn check_base_change(cat: &Catalog, s: &Settings, _: bool) -> Result<Outcome> {
    let mut out = Outcome::default();
    let ps: Vec<Arc<Morphism>> = cat.morphisms().cloned().collect();
    for f in smooth_morphisms(cat) {
        for p in ps.iter().filter(|p| p.target().as_ref() == f.target().as_ref()) {
            let sq = fiber_square(&f, p)?;
            for e in p.source().ambient().basis() {
                let alpha = p.source().ambient().monomial(e.clone(), crate::exact::YPoly::one());
                let left = p.pushforward(&alpha).and_then(|v| f.gysin_pullback(&v));
                let right = sq.f_prime.gysin_pullback(&alpha).and_then(|v| sq.p_prime.pushforward(&v));
                out.compare(s, || json!({"f": f.name(), "p": p.name(), "class": CohClass::monomial_name(p.source().ambient(), &e)}), left, right);
            }
        }
    }
    Ok(out)
}

fn check_projection_formula(cat: &Catalog, s: &Settings, _: bool) -> Result<Outcome> {
    let mut out = Outcome::default();
    for i in cat.morphisms() {
        if !matches!(i.kind(), MorphismKind::CiEmbedding | MorphismKind::PointInclusion { .. }) {
            continue;
        }
        let (src, tgt) = (i.source().ambient(), i.target().ambient());
        for a in tgt.basis() {
            let alpha = tgt.monomial(a.clone(), crate::exact::YPoly::one());
            for b in src.basis() {
                let beta = src.monomial(b.clone(), crate::exact::YPoly::one());
                let left = i
                    .cohomology_pullback(&alpha)
                    .and_then(|v| v.mul(&beta))
                    .and_then(|v| i.pushforward(&v));
                let right = i.pushforward(&beta).and_then(|v| alpha.mul(&v));
                out.compare(
                    s,
                    || {
                        json!({"i": i.name(), "alpha": CohClass::monomial_name(tgt, &a), "beta": CohClass::monomial_name(src, &b)})
                    },
                    left,
                    right,
                );
            }
        }
    }
    Ok(out)
}

fn catalog_bundles(cat: &Catalog) -> Vec<(String, VirtualBundle)> {
    let mut out = Vec::new();
    for (id, x) in cat.spaces() {
        let m = x.ambient();
        out.push((format!("T({})", m), ambient_tangent(m)));
        if !x.is_ambient() {
            out.push((format!("N({id})"), normal_bundle(x)));
            if let Ok(t) = virtual_tangent(x) {
                out.push((format!("T({id})"), t));
            }
        }
        for i in 0..m.nvars() {
            let mut d = vec![0; m.nvars()];
            d[i] = 1;
            out.push((format!("O({d:?}) on {m}"), VirtualBundle::line(m, &d)));
        }
    }
    out
}

fn check_whitney(cat: &Catalog, s: &Settings, subtract: bool) -> Result<Outcome> {
    let bundles = catalog_bundles(cat);
    let gs = genera(order(cat, s));
    let mut out = Outcome::default();
    for (i, (ne, e)) in bundles.iter().enumerate() {
        for (nf, f) in bundles.iter().skip(i) {
            if e.model() != f.model() {
                continue;
            }
            for g in &gs {
                let sum = if subtract { e.sub(f) } else { e.add(f) };
                let left = sum.and_then(|b| multiplicative_class(g, &b, e.model()));
                let right = multiplicative_class(g, e, e.model()).and_then(|a| a.mul(&multiplicative_class(g, f, e.model())?));
                out.compare(s, || json!({"e": ne, "f": nf, "genus": g.name()}), left, right);
            }
        }
    }
    Ok(out)
}

fn check_witnesses(cat: &Catalog, s: &Settings, flip: bool) -> Result<Outcome> {
    let ord = order(cat, s);
    let mut out = Outcome::default();
    for w in cat.witnesses() {
        let mut right = w.right.clone();
        if flip {
            if let Some(t) = w.right.terms().next() {
                let single = Cycle::generator(w.right.base().clone(), w.right.flavor(), t.push.clone())?;
                right = right.sub(&single.scale(2 * t.coeff))?;
            }
        }
        out.compare(s, || json!({"witness": w.name}), hirzebruch_class(&w.left, ord), hirzebruch_class(&right, ord));
    }
    Ok(out)
}

fn corpus_milnor(corpus: &[SingularHypersurfaceData], flip: bool) -> Outcome {
    let mut out = Outcome::default();
    for d in corpus {
        let ok = classical_milnor_degree(d).map(|m| {
            let m = if flip { -m } else { m };
            m == Rational::from_int(d.sum_mu() as i64)
        });
        out.assert(|| json!({"entry": d.name, "sum_mu": d.sum_mu()}), ok);
    }
    out
}

const CHECKS: &[CheckDef] = &[
    CheckDef { id: "vrr_fj", run: check_vrr_fj, control: Control::Matrix("i_conic") },
    CheckDef { id: "vrr_hirzebruch", run: check_vrr_hirzebruch, control: Control::Matrix("i_conic") },
    CheckDef { id: "vrr_milnor", run: check_vrr_milnor, control: Control::Inline("drop the (-1)^dim f twist") },
    CheckDef { id: "dubois_vanishing", run: check_dubois_vanishing, control: Control::Inline("use FJ + T in place of FJ - T") },
    CheckDef { id: "naturality_gamma", run: check_naturality_gamma, control: Control::Matrix("i_conic") },
    CheckDef { id: "naturality_fj", run: check_naturality_fj, control: Control::Matrix("i_conic") },
    CheckDef { id: "naturality_milnor", run: check_naturality_milnor, control: Control::Inline("drop the (-1)^codim f twist") },
    CheckDef { id: "base_change", run: check_base_change, control: Control::Matrix("i_conic") },
    CheckDef { id: "projection_formula", run: check_projection_formula, control: Control::Matrix("fib_P1") },
    CheckDef { id: "whitney", run: check_whitney, control: Control::Inline("use E - F in place of E + F") },
    CheckDef { id: "decomposition_witnesses", run: check_witnesses, control: Control::Inline("flip the first right-hand coefficient") },
];

pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.id).chain(std::iter::once("milnor_corpus")).collect()
}

fn finish(id: &str, out: Outcome, control: ControlResult) -> Result<CheckResult> {
    if out.instances == 0 {
        return Err(Error::Config(format!("check {id} has no instances in this catalog")));
    }
    Ok(CheckResult {
        id: id.to_string(),
        instances: out.instances,
        status: if out.failure.is_none() { Status::Pass } else { Status::Fail },
        witness: out.failure,
        control,
    })
}

fn detected(r: Result<Outcome>) -> bool {
    match r {
        Ok(o) => o.failure.is_some(),
        Err(_) => true,
    }
}

fn run_def(def: &CheckDef, cat: &Catalog, s: &Settings) -> Result<CheckResult> {
    let out = (def.run)(cat, s, false)?;
    let control = match def.control {
        Control::Matrix(id) => ControlResult {
            mutation: format!("double the point image of {id}"),
            detected: cat
                .morphism(id)
                .ok()
                .map(|m| corrupt_point_image(m.push_map()))
                .map(|bad| detected(cat.with_push_override(id, bad).and_then(|c| (def.run)(&c, s, false)))),
        },
        Control::Inline(what) => ControlResult {
            mutation: what.to_string(),
            detected: Some(detected((def.run)(cat, s, true))),
        },
    };
    finish(def.id, out, control)
}

/// Runs a single named check.
pub fn run_check(id: &str, cat: &Catalog, corpus: &[SingularHypersurfaceData], s: &Settings) -> Result<CheckResult> {
    if id == "milnor_corpus" {
        let out = corpus_milnor(corpus, false);
        let control = ControlResult {
            mutation: "flip the sign of the classical Milnor degree".into(),
            detected: Some(corpus_milnor(corpus, true).failure.is_some()),
        };
        return finish(id, out, control);
    }
    let def = CHECKS
        .iter()
        .find(|d| d.id == id)
        .ok_or_else(|| Error::Config(format!("unknown check '{id}'")))?;
    run_def(def, cat, s)
}

pub fn milnor_reports(corpus: &[SingularHypersurfaceData], order: usize) -> Result<Vec<MilnorReport>> {
    corpus.par_iter().map(|d| hirzebruch_milnor_report(d, order)).collect()
}

/// Every check plus the corpus; `--y=-1` restricts to the classical Milnor suite.
pub fn run_all(cat: &Catalog, corpus: &[SingularHypersurfaceData], s: &Settings) -> Result<HarnessReport> {
    let ids: Vec<&str> = if s.classical_only() {
        vec!["milnor_corpus"]
    } else {
        check_ids()
    };
    let checks = ids
        .par_iter()
        .map(|id| run_check(id, cat, corpus, s))
        .collect::<Result<Vec<_>>>()?;
    let milnor = milnor_reports(corpus, order(cat, s))?;
    let passed = checks.iter().all(CheckResult::passed) && milnor.iter().all(MilnorReport::all_passed);
    Ok(HarnessReport {
        order: s.order,
        y: s.y.clone(),
        checks,
        milnor,
        passed,
    })
}

impl HarnessReport {
    pub fn to_text(&self) -> String {
        let w = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(5).max(5);
        let mut s = format!("{:<w$}  {:>9}  {:<6}  {}\n", "check", "instances", "status", "control");
        for c in &self.checks {
            let control = match c.control.detected {
                Some(true) => "detected",
                Some(false) => "MISSED",
                None => "skipped",
            };
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
            };
            s.push_str(&format!("{:<w$}  {:>9}  {:<6}  {} ({})\n", c.id, c.instances, status, control, c.control.mutation));
            if let Some(wit) = &c.witness {
                s.push_str(&format!("  witness: {wit}\n"));
            }
        }
        let mw = self.milnor.iter().map(|m| m.name.len()).max().unwrap_or(0);
        for m in &self.milnor {
            let bad: Vec<&str> = m.verdicts.iter().filter(|v| !v.passed).map(|v| v.check.as_str()).collect();
            s.push_str(&format!(
                "milnor {:<mw$}  classical={}  MT degree={}  {}\n",
                m.name,
                m.classical_milnor_degree,
                m.hirzebruch_milnor_degree,
                if bad.is_empty() { "ok".to_string() } else { format!("failed: {}", bad.join("; ")) }
            ));
        }
        s.push_str(if self.passed { "all checks passed\n" } else { "some checks failed\n" });
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::SHIPPED_CORPUS;

    #[test]
    fn corruption_changes_only_the_point_image() {
        let cat = Catalog::shipped();
        let m = cat.morphism("fib_P1").unwrap().push_map();
        let bad = corrupt_point_image(m);
        assert_ne!(&bad, m);
        assert_eq!(bad.image(&[0]), m.image(&[0]));
    }

    #[test]
    fn shipped_catalog_passes_every_check() {
        let cat = Catalog::shipped();
        let corpus = cat.corpus(SHIPPED_CORPUS).unwrap();
        let report = run_all(&cat, &corpus, &Settings::new(4)).unwrap();
        assert!(report.passed, "{}", report.to_text());
    }
}
