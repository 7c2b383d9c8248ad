//! Name resolution and value checking: raw syntax to [`ModelDefinition`].

use indexmap::IndexMap;

use crate::model::{
    ConstRef, Ident, LocId, LocSet, Location, ModelComponent, ModelDefinition, Point, Pos, Prefix,
    SeqComponent, Term,
};

use super::syntax::{Name, RawConst, RawPrefix, RawRange, RawTerm, RawValue, Stmt};
use super::Diagnostic;

struct Elaborator<'d> {
    def: ModelDefinition,
    params: IndexMap<String, f64>,
    diags: &'d mut Vec<Diagnostic>,
}

#[derive(Clone, Copy)]
enum ValueKind {
    Rate,
    Probability,
    Weight,
}

pub(crate) fn elaborate(stmts: &[Stmt], diags: &mut Vec<Diagnostic>) -> ModelDefinition {
    let mut e = Elaborator {
        def: ModelDefinition::default(),
        params: IndexMap::new(),
        diags,
    };
    // Declarations first so that equations may refer forward.
    for s in stmts {
        match s {
            Stmt::Param { name, value } => e.param(name, *value),
            Stmt::Location { name, x, y } => e.location(name, *x, *y),
            _ => {}
        }
    }
    for s in stmts {
        match s {
            Stmt::Equation { head, body } => e.equation(head, body),
            Stmt::System { name, components } => e.system(name, components),
            _ => {}
        }
    }
    e.def
}

impl Elaborator<'_> {
    fn error(&mut self, msg: impl Into<String>, pos: Pos) {
        self.diags.push(Diagnostic::error(msg, pos));
    }

    fn param(&mut self, name: &Name, value: f64) {
        if self.params.contains_key(&name.text) {
            self.error(format!("duplicate parameter `{}`", name.text), name.pos);
            return;
        }
        if value < 0.0 {
            self.error(
                format!("parameter `{}` must be non-negative, got {value}", name.text),
                name.pos,
            );
            return;
        }
        self.params.insert(name.text.clone(), value);
        self.def.params.insert(Ident::new(&name.text), value);
    }

    fn location(&mut self, name: &Name, x: f64, y: f64) {
        if name.text == "all" {
            self.error("`all` is reserved and cannot name a location", name.pos);
            return;
        }
        if self.def.loc_by_name(&name.text).is_some() {
            self.error(format!("duplicate location `{}`", name.text), name.pos);
            return;
        }
        let ident = Ident::new(&name.text);
        self.def.source_map.locations.insert(ident.clone(), name.pos);
        self.def.locations.push(Location {
            name: ident,
            point: Point::new(x, y),
        });
    }

    fn loc(&mut self, name: &Name) -> Option<LocId> {
        let id = self.def.loc_by_name(&name.text);
        if id.is_none() {
            self.error(format!("unknown location `{}`", name.text), name.pos);
        }
        id
    }

    fn constant(&mut self, c: &RawConst) -> Option<ConstRef> {
        let loc = self.loc(&c.loc)?;
        Some(ConstRef {
            name: Ident::new(&c.name.text),
            loc,
        })
    }

    fn equation(&mut self, head: &RawConst, body: &RawTerm) {
        let Some(key) = self.constant(head) else {
            return;
        };
        let body = self.term(body, true);
        if self.def.equations.contains_key(&key) {
            self.error(
                format!(
                    "duplicate equation for `{}({})`",
                    head.name.text, head.loc.text
                ),
                head.name.pos,
            );
            return;
        }
        if let Some(body) = body {
            self.def.source_map.equations.insert(key.clone(), head.name.pos);
            self.def.equations.insert(key, body);
        }
    }

    fn system(&mut self, name: &Name, components: &[RawTerm]) {
        let ident = Ident::new(&name.text);
        if self.def.systems.contains_key(&ident) {
            self.error(format!("duplicate system `{}`", name.text), name.pos);
            return;
        }
        let mut out = Vec::new();
        let mut ok = true;
        for c in components {
            match self.term(c, false) {
                Some(term) => {
                    let loc = first_loc(&term).expect("system terms are built from constants");
                    out.push(SeqComponent::new(term, loc));
                }
                None => ok = false,
            }
        }
        if ok {
            self.def.source_map.systems.insert(ident.clone(), name.pos);
            self.def.systems.insert(ident, ModelComponent(out));
        }
    }

    fn term(&mut self, t: &RawTerm, allow_prefix: bool) -> Option<Term> {
        match t {
            RawTerm::Const(c) => self.constant(c).map(Term::Const),
            RawTerm::Choice(l, r) => {
                let l = self.term(l, allow_prefix);
                let r = self.term(r, allow_prefix);
                Some(Term::choice(l?, r?))
            }
            RawTerm::Prefix(p, next) => {
                if !allow_prefix {
                    let pos = prefix_label(p).pos;
                    self.error(
                        "action prefixes are not allowed in system definitions; \
                         define the agent with an equation",
                        pos,
                    );
                    return None;
                }
                let p = self.prefix(p);
                let next = self.constant(next);
                Some(Term::Prefix(p?, next?))
            }
        }
    }

    fn value(&mut self, v: &RawValue, kind: ValueKind) -> Option<f64> {
        let (x, pos) = match v {
            RawValue::Num(x, pos) => (*x, *pos),
            RawValue::Param(n) => match self.params.get(&n.text) {
                Some(x) => (*x, n.pos),
                None => {
                    self.error(format!("unknown parameter `{}`", n.text), n.pos);
                    return None;
                }
            },
        };
        let ok = match kind {
            ValueKind::Rate | ValueKind::Weight => x > 0.0 && x.is_finite(),
            ValueKind::Probability => (0.0..=1.0).contains(&x),
        };
        if !ok {
            let msg = match kind {
                ValueKind::Rate => format!("rate must be positive, got {x}"),
                ValueKind::Weight => format!("weight must be positive, got {x}"),
                ValueKind::Probability => format!("probability out of range [0, 1]: {x}"),
            };
            self.error(msg, pos);
            return None;
        }
        Some(x)
    }

    fn range(&mut self, r: &RawRange) -> Option<LocSet> {
        match r {
            RawRange::All => Some(self.def.all_locations()),
            RawRange::Names(names) => {
                let mut out = LocSet::new();
                let mut ok = true;
                for n in names {
                    match self.loc(n) {
                        Some(id) => {
                            out.insert(id);
                        }
                        None => ok = false,
                    }
                }
                ok.then_some(out)
            }
        }
    }

    fn prefix(&mut self, p: &RawPrefix) -> Option<Prefix> {
        let label = Ident::new(&prefix_label(p).text);
        Some(match p {
            RawPrefix::UnicastOut(_, r, range) => {
                let rate = self.value(r, ValueKind::Rate);
                let range = self.range(range);
                Prefix::UnicastOut {
                    label,
                    rate: rate?,
                    range: range?,
                }
            }
            RawPrefix::UnicastIn(_, p, w) => {
                let act_prob = self.value(p, ValueKind::Probability);
                let weight = self.value(w, ValueKind::Weight);
                Prefix::UnicastIn {
                    label,
                    act_prob: act_prob?,
                    weight: weight?,
                }
            }
            RawPrefix::BroadcastOut(_, r, range) => {
                let rate = self.value(r, ValueKind::Rate);
                let range = self.range(range);
                Prefix::BroadcastOut {
                    label,
                    rate: rate?,
                    range: range?,
                }
            }
            RawPrefix::BroadcastIn(_, p, q) => {
                let act_prob = self.value(p, ValueKind::Probability);
                let recv_prob = self.value(q, ValueKind::Probability);
                Prefix::BroadcastIn {
                    label,
                    act_prob: act_prob?,
                    recv_prob: recv_prob?,
                }
            }
            RawPrefix::Spontaneous(_, r) => Prefix::Spontaneous {
                label,
                rate: self.value(r, ValueKind::Rate)?,
            },
        })
    }
}

fn prefix_label(p: &RawPrefix) -> &Name {
    match p {
        RawPrefix::UnicastOut(l, ..)
        | RawPrefix::UnicastIn(l, ..)
        | RawPrefix::BroadcastOut(l, ..)
        | RawPrefix::BroadcastIn(l, ..)
        | RawPrefix::Spontaneous(l, ..) => l,
    }
}

fn first_loc(t: &Term) -> Option<LocId> {
    match t {
        Term::Const(c) => Some(c.loc),
        Term::Choice(l, r) => first_loc(l).or_else(|| first_loc(r)),
        Term::Prefix(..) => None,
    }
}
