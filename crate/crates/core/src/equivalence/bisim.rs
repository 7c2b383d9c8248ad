//! Bisimulation of model components in a context, up to a plane isometry.
//!
//! Both sides are explored as `Sys ∥ P` and `Sys ∥ Q` with the context held
//! fixed. The greatest relation is computed by refinement: start from every
//! pair whose rates agree, then repeatedly drop pairs with an unmatched
//! transition. The rate condition is checked on singleton location sets,
//! which suffices because `R_a(L, Sys, P)` is a sum over the members of `P`
//! located in `L`.

use std::collections::VecDeque;
use std::fmt::Write;

use indexmap::IndexSet;

use crate::error::Error;
use crate::futs::{lifted_steps, StochLabel};
use crate::model::{ActionId, LocId, ModelComponent, ModelDefinition, Point};
use crate::num::g17;
use crate::parser::show_model;
use crate::rates::{exit_rate_in, exit_rate_model};

use super::isometry::{candidate_isometries, Isometry};

/// Relative tolerance for rate equality.
pub const RATE_TOL: f64 = 1e-9;

pub fn rates_match(x: f64, y: f64) -> bool {
    (x - y).abs() <= RATE_TOL * x.abs().max(y.abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Related,
    NotRelated,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }

    fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Where a rate is measured: a declared location or an undeclared point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Site {
    Declared(LocId),
    Undeclared(Point),
    Whole,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Failure {
    RateMismatch {
        action: ActionId,
        left_site: Site,
        right_site: Site,
        left: f64,
        right: f64,
    },
    LocationMismatch,
    Unmatched {
        side: Side,
        action: ActionId,
        via: StochLabel,
        target: ModelComponent,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub pair: (ModelComponent, ModelComponent),
    pub failures: Vec<Failure>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Attempt {
    pub isometry: Isometry,
    pub verdict: Verdict,
    pub first_failure: Option<Failure>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BisimResult {
    pub verdict: Verdict,
    pub witness: Option<Isometry>,
    pub relation: Vec<(ModelComponent, ModelComponent)>,
    pub counterexample: Option<Counterexample>,
    pub attempts: Vec<Attempt>,
    pub note: Option<String>,
}

impl BisimResult {
    pub fn related(&self) -> bool {
        self.verdict == Verdict::Related
    }

    fn inconclusive(note: String) -> Self {
        BisimResult {
            verdict: Verdict::Inconclusive,
            witness: None,
            relation: Vec::new(),
            counterexample: None,
            attempts: Vec::new(),
            note: Some(note),
        }
    }
}

/// Condition relating locations of the two sides.
#[derive(Clone, Debug)]
pub enum Correspondence {
    /// Rates compared at `φ(ℓ)` on the right for every `ℓ` on the left.
    Isometry(Isometry),
    /// Rates compared for the whole component; member locations must coincide.
    Naive,
}

#[derive(Clone)]
struct Step {
    action: ActionId,
    target: usize,
    via: StochLabel,
}

struct Space {
    states: IndexSet<ModelComponent>,
    steps: Vec<Vec<Step>>,
}

fn explore(
    def: &ModelDefinition,
    sys: &ModelComponent,
    p0: &ModelComponent,
    bound: usize,
) -> Result<Space, Error> {
    if bound == 0 {
        return Err(Error::ZeroBound);
    }
    let mut states = IndexSet::new();
    states.insert(def.canonical(p0));
    let mut steps = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let p = states[i].clone();
        let mut out = Vec::new();
        for s in lifted_steps(def, sys, &p) {
            let (target, _) = states.insert_full(s.target);
            if states.len() > bound {
                return Err(Error::BoundExceeded {
                    bound,
                    discovered: states.len(),
                });
            }
            out.push(Step {
                action: s.action,
                target,
                via: s.via,
            });
        }
        steps.push(out);
        i += 1;
    }
    Ok(Space { states, steps })
}

/// Precomputed local observations of one state.
struct Profile {
    /// `rates[a][ℓ]`, or `rates[a][0]` for the whole component in naive mode.
    rates: Vec<Vec<f64>>,
    locs: Vec<LocId>,
}

struct Engine<'a> {
    def: &'a ModelDefinition,
    sys: &'a ModelComponent,
    actions: Vec<ActionId>,
    corr: Correspondence,
    /// `image[ℓ]`: declared image of `ℓ` under the isometry.
    image: Vec<Site>,
    /// Declared right-hand locations that are the image of no declared location.
    unhit: Vec<(LocId, Point)>,
}

impl<'a> Engine<'a> {
    fn new(def: &'a ModelDefinition, sys: &'a ModelComponent, corr: Correspondence) -> Self {
        let n = def.locations.len();
        let mut image = Vec::with_capacity(n);
        let mut unhit = Vec::new();
        if let Correspondence::Isometry(phi) = &corr {
            for l in 0..n {
                image.push(match phi.apply_loc(def, LocId(l)) {
                    Some(id) => Site::Declared(id),
                    None => Site::Undeclared(phi.apply(def.location(LocId(l)).point)),
                });
            }
            let inv = phi.invert();
            for m in 0..n {
                if !image.contains(&Site::Declared(LocId(m))) {
                    unhit.push((LocId(m), inv.apply(def.location(LocId(m)).point)));
                }
            }
        }
        Engine {
            def,
            sys,
            actions: def.actions(),
            corr,
            image,
            unhit,
        }
    }

    fn profile(&self, p: &ModelComponent) -> Profile {
        let rates = self
            .actions
            .iter()
            .map(|a| match self.corr {
                Correspondence::Naive => vec![exit_rate_model(self.def, a, self.sys, p)],
                Correspondence::Isometry(_) => (0..self.def.locations.len())
                    .map(|l| exit_rate_in(self.def, a, Some(&[LocId(l)].into()), self.sys, p))
                    .collect(),
            })
            .collect();
        Profile {
            rates,
            locs: p.iter().map(|s| s.loc).collect(),
        }
    }

    /// Violations of the non-transfer conditions for a pair; `all` collects
    /// every violation instead of stopping at the first.
    fn local(&self, l: &Profile, r: &Profile, all: bool) -> Vec<Failure> {
        let mut out = Vec::new();
        if let Correspondence::Naive = self.corr {
            if l.locs != r.locs {
                out.push(Failure::LocationMismatch);
                if !all {
                    return out;
                }
            }
        }
        for (k, a) in self.actions.iter().enumerate() {
            let mut check = |ls: Site, rs: Site, x: f64, y: f64| {
                if !rates_match(x, y) {
                    out.push(Failure::RateMismatch {
                        action: a.clone(),
                        left_site: ls,
                        right_site: rs,
                        left: x,
                        right: y,
                    });
                }
            };
            match self.corr {
                Correspondence::Naive => check(Site::Whole, Site::Whole, l.rates[k][0], r.rates[k][0]),
                Correspondence::Isometry(_) => {
                    for (i, site) in self.image.iter().enumerate() {
                        let y = match site {
                            Site::Declared(m) => r.rates[k][m.0],
                            _ => 0.0,
                        };
                        check(Site::Declared(LocId(i)), *site, l.rates[k][i], y);
                    }
                    for &(m, pre) in &self.unhit {
                        check(Site::Undeclared(pre), Site::Declared(m), 0.0, r.rates[k][m.0]);
                    }
                }
            }
            if !all && !out.is_empty() {
                break;
            }
        }
        out
    }
}

fn unmatched<'s>(
    from: &'s [Step],
    to: &[Step],
    related: impl Fn(usize, usize) -> bool,
) -> Option<&'s Step> {
    from.iter()
        .find(|s| !to.iter().any(|t| t.action == s.action && related(s.target, t.target)))
}

fn run(
    def: &ModelDefinition,
    p: &ModelComponent,
    q: &ModelComponent,
    sys: &ModelComponent,
    corr: Correspondence,
    bound: usize,
) -> BisimResult {
    let (left, right) = match (explore(def, sys, p, bound), explore(def, sys, q, bound)) {
        (Ok(l), Ok(r)) => (l, r),
        (Err(e), _) | (_, Err(e)) => return BisimResult::inconclusive(e.to_string()),
    };
    let witness = match &corr {
        Correspondence::Isometry(phi) => Some(*phi),
        Correspondence::Naive => None,
    };
    let engine = Engine::new(def, sys, corr);
    let lp: Vec<Profile> = left.states.iter().map(|s| engine.profile(s)).collect();
    let rp: Vec<Profile> = right.states.iter().map(|s| engine.profile(s)).collect();
    let (n, m) = (lp.len(), rp.len());
    let mut rel = vec![false; n * m];
    for i in 0..n {
        for j in 0..m {
            rel[i * m + j] = engine.local(&lp[i], &rp[j], false).is_empty();
        }
    }
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..m {
                if !rel[i * m + j] {
                    continue;
                }
                let fwd = unmatched(&left.steps[i], &right.steps[j], |a, b| rel[a * m + b]);
                let back = unmatched(&right.steps[j], &left.steps[i], |b, a| rel[a * m + b]);
                if fwd.is_some() || back.is_some() {
                    rel[i * m + j] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let in_rel = |a: usize, b: usize| rel[a * m + b];
    if in_rel(0, 0) {
        let mut seen = IndexSet::new();
        seen.insert((0usize, 0usize));
        let mut queue = VecDeque::from([(0usize, 0usize)]);
        while let Some((i, j)) = queue.pop_front() {
            for s in &left.steps[i] {
                for t in &right.steps[j] {
                    if s.action == t.action && in_rel(s.target, t.target) && seen.insert((s.target, t.target)) {
                        queue.push_back((s.target, t.target));
                    }
                }
            }
        }
        return BisimResult {
            verdict: Verdict::Related,
            witness,
            relation: seen
                .into_iter()
                .map(|(i, j)| (left.states[i].clone(), right.states[j].clone()))
                .collect(),
            counterexample: None,
            attempts: Vec::new(),
            note: None,
        };
    }
    let mut failures = Vec::new();
    for side in [Side::Left, Side::Right] {
        let (from, to) = match side {
            Side::Left => (&left.steps[0], &right.steps[0]),
            Side::Right => (&right.steps[0], &left.steps[0]),
        };
        let states = match side {
            Side::Left => &left.states,
            Side::Right => &right.states,
        };
        for s in from {
            let matched = to.iter().any(|t| {
                t.action == s.action
                    && match side {
                        Side::Left => in_rel(s.target, t.target),
                        Side::Right => in_rel(t.target, s.target),
                    }
            });
            if !matched {
                failures.push(Failure::Unmatched {
                    side,
                    action: s.action.clone(),
                    via: s.via.clone(),
                    target: states[s.target].clone(),
                });
            }
        }
    }
    failures.extend(engine.local(&lp[0], &rp[0], true));
    BisimResult {
        verdict: Verdict::NotRelated,
        witness: None,
        relation: Vec::new(),
        counterexample: Some(Counterexample {
            pair: (left.states[0].clone(), right.states[0].clone()),
            failures,
        }),
        attempts: Vec::new(),
        note: None,
    }
}

/// Bisimulation with respect to a fixed isometry `phi`.
pub fn check_bisim_phi(
    def: &ModelDefinition,
    p: &ModelComponent,
    q: &ModelComponent,
    sys: &ModelComponent,
    phi: &Isometry,
    bound: usize,
) -> BisimResult {
    run(def, p, q, sys, Correspondence::Isometry(*phi), bound)
}

/// Bisimulation with literal location equality and whole-component rates.
pub fn naive_bisim(
    def: &ModelDefinition,
    p: &ModelComponent,
    q: &ModelComponent,
    sys: &ModelComponent,
    bound: usize,
) -> BisimResult {
    run(def, p, q, sys, Correspondence::Naive, bound)
}

fn points(def: &ModelDefinition, p: &ModelComponent) -> Vec<Point> {
    p.locations().into_iter().map(|l| def.location(l).point).collect()
}

/// `P ∼_Sys Q`: tries every isometry mapping the occupied locations of
/// `Sys ∥ P` onto those of `Sys ∥ Q` and reports the first that works.
pub fn bisimilar(
    def: &ModelDefinition,
    p: &ModelComponent,
    q: &ModelComponent,
    sys: &ModelComponent,
    bound: usize,
) -> BisimResult {
    let a = points(def, &sys.par(p));
    let b = points(def, &sys.par(q));
    let candidates = candidate_isometries(&a, &b);
    if candidates.is_empty() {
        return BisimResult {
            verdict: Verdict::NotRelated,
            witness: None,
            relation: Vec::new(),
            counterexample: None,
            attempts: Vec::new(),
            note: Some(format!(
                "no isometry maps the {} occupied locations on the left onto the {} on the right",
                a.len(),
                b.len()
            )),
        };
    }
    let mut attempts = Vec::new();
    let mut first_failure: Option<BisimResult> = None;
    let mut inconclusive = None;
    for phi in candidates {
        let r = check_bisim_phi(def, p, q, sys, &phi, bound);
        attempts.push(Attempt {
            isometry: phi,
            verdict: r.verdict,
            first_failure: r
                .counterexample
                .as_ref()
                .and_then(|c| c.failures.first().cloned()),
        });
        match r.verdict {
            Verdict::Related => return BisimResult { attempts, ..r },
            Verdict::Inconclusive => {
                inconclusive.get_or_insert(r);
            }
            Verdict::NotRelated => {
                first_failure.get_or_insert(r);
            }
        }
    }
    let r = inconclusive.or(first_failure).expect("at least one candidate");
    BisimResult { attempts, ..r }
}

/// Re-checks that `relation` is a bisimulation under `corr` in context `sys`.
pub fn is_bisimulation(
    def: &ModelDefinition,
    sys: &ModelComponent,
    corr: Correspondence,
    relation: &[(ModelComponent, ModelComponent)],
) -> bool {
    let engine = Engine::new(def, sys, corr);
    let pairs: IndexSet<(ModelComponent, ModelComponent)> = relation
        .iter()
        .map(|(a, b)| (def.canonical(a), def.canonical(b)))
        .collect();
    pairs.iter().all(|(p, q)| {
        if !engine.local(&engine.profile(p), &engine.profile(q), false).is_empty() {
            return false;
        }
        let ps = lifted_steps(def, sys, p);
        let qs = lifted_steps(def, sys, q);
        let fwd = ps.iter().all(|s| {
            qs.iter()
                .any(|t| t.action == s.action && pairs.contains(&(s.target.clone(), t.target.clone())))
        });
        let back = qs.iter().all(|t| {
            ps.iter()
                .any(|s| s.action == t.action && pairs.contains(&(s.target.clone(), t.target.clone())))
        });
        fwd && back
    })
}

fn show_site(def: &ModelDefinition, s: Site) -> String {
    match s {
        Site::Declared(l) => def.loc_name(l).to_string(),
        Site::Undeclared(p) => format!("({}, {})", g17(p.x), g17(p.y)),
        Site::Whole => "component".to_string(),
    }
}

fn show_failure(def: &ModelDefinition, f: &Failure) -> String {
    match f {
        Failure::RateMismatch {
            action,
            left_site,
            right_site,
            left,
            right,
        } => format!(
            "rate mismatch: R[{action}] at {} = {} on the left, at {} = {} on the right",
            show_site(def, *left_site),
            g17(*left),
            show_site(def, *right_site),
            g17(*right)
        ),
        Failure::LocationMismatch => "location mismatch between the components".to_string(),
        Failure::Unmatched {
            side,
            action,
            via,
            target,
        } => format!(
            "unmatched transition: {} side performs {action} (system transition {via}) to {}; the {} side has no {action} into a related state",
            side.name(),
            show_model(def, target),
            side.other().name()
        ),
    }
}

/// Plain-text report; byte-identical for identical inputs.
pub fn render_report(def: &ModelDefinition, r: &BisimResult) -> String {
    let mut out = String::new();
    let verdict = match r.verdict {
        Verdict::Related => "related",
        Verdict::NotRelated => "not related",
        Verdict::Inconclusive => "inconclusive",
    };
    let _ = writeln!(out, "verdict: {verdict}");
    if let Some(n) = &r.note {
        let _ = writeln!(out, "note: {n}");
    }
    if let Some(w) = &r.witness {
        let _ = writeln!(out, "witness: {w}");
    }
    if !r.relation.is_empty() {
        let _ = writeln!(out, "relation ({} pairs):", r.relation.len());
        for (a, b) in &r.relation {
            let _ = writeln!(out, "  {}  ~  {}", show_model(def, a), show_model(def, b));
        }
    }
    if let Some(c) = &r.counterexample {
        let _ = writeln!(
            out,
            "counterexample: {}  vs  {}",
            show_model(def, &c.pair.0),
            show_model(def, &c.pair.1)
        );
        for f in &c.failures {
            let _ = writeln!(out, "  {}", show_failure(def, f));
        }
    }
    if !r.attempts.is_empty() {
        let _ = writeln!(out, "candidates tried: {}", r.attempts.len());
        for a in &r.attempts {
            let status = match (&a.verdict, &a.first_failure) {
                (Verdict::Related, _) => "related".to_string(),
                (Verdict::Inconclusive, _) => "inconclusive".to_string(),
                (Verdict::NotRelated, Some(f)) => show_failure(def, f),
                (Verdict::NotRelated, None) => "not related".to_string(),
            };
            let _ = writeln!(out, "  {}: {status}", a.isometry);
        }
    }
    out
}
