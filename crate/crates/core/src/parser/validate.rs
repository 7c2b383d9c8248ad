//! Cross-equation checks on an elaborated definition.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::model::{ActionType, ConstRef, LocId, ModelDefinition, Pos, Prefix, Term};

use super::printer::show_const;
use super::Diagnostic;

pub fn validate(def: &ModelDefinition) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    check_coordinates(def, &mut out);
    for (key, body) in &def.equations {
        let pos = def.source_map.equations.get(key).copied();
        let owner = show_const(def, key);
        check_references(def, body, key.loc, &owner, pos, &mut out);
    }
    for (name, sys) in &def.systems {
        let pos = def.source_map.systems.get(name).copied();
        for s in sys.iter() {
            let owner = format!("system `{name}`");
            check_references(def, &s.term, s.loc, &owner, pos, &mut out);
            check_duplicate_inputs(def, &s.term, &owner, pos, &mut out);
        }
    }
    check_guardedness(def, &mut out);
    for (key, body) in &def.equations {
        let pos = def.source_map.equations.get(key).copied();
        check_duplicate_inputs(def, body, &show_const(def, key), pos, &mut out);
    }
    check_unicast_receivers(def, &mut out);
    out
}

fn with_pos(d: Diagnostic, pos: Option<Pos>) -> Diagnostic {
    Diagnostic { pos, ..d }
}

fn check_coordinates(def: &ModelDefinition, out: &mut Vec<Diagnostic>) {
    for (j, b) in def.locations.iter().enumerate() {
        if let Some(a) = def.locations[..j].iter().find(|a| a.point == b.point) {
            let pos = def.source_map.locations.get(&b.name).copied();
            out.push(with_pos(
                Diagnostic::error_nopos(format!(
                    "locations `{}` and `{}` share coordinates ({}, {})",
                    a.name, b.name, b.point.x, b.point.y
                )),
                pos,
            ));
        }
    }
}

fn check_references(
    def: &ModelDefinition,
    term: &Term,
    owner_loc: LocId,
    owner: &str,
    pos: Option<Pos>,
    out: &mut Vec<Diagnostic>,
) {
    match term {
        Term::Prefix(_, next) => {
            if def.equation(next).is_none() {
                out.push(with_pos(
                    Diagnostic::error_nopos(format!(
                        "{owner}: continuation `{}` has no defining equation",
                        show_const(def, next)
                    )),
                    pos,
                ));
            }
        }
        Term::Choice(l, r) => {
            check_references(def, l, owner_loc, owner, pos, out);
            check_references(def, r, owner_loc, owner, pos, out);
        }
        Term::Const(c) => {
            if def.equation(c).is_none() {
                out.push(with_pos(
                    Diagnostic::error_nopos(format!(
                        "{owner}: constant `{}` has no defining equation",
                        show_const(def, c)
                    )),
                    pos,
                ));
            }
            if c.loc != owner_loc {
                out.push(with_pos(
                    Diagnostic::error_nopos(format!(
                        "{owner}: choice operand `{}` is not located at `{}`",
                        show_const(def, c),
                        def.loc_name(owner_loc)
                    )),
                    pos,
                ));
            }
        }
    }
}

/// Rejects constants whose unfolding reaches themselves without passing a prefix.
fn check_guardedness(def: &ModelDefinition, out: &mut Vec<Diagnostic>) {
    fn unguarded<'a>(t: &'a Term, acc: &mut Vec<&'a ConstRef>) {
        match t {
            Term::Prefix(..) => {}
            Term::Choice(l, r) => {
                unguarded(l, acc);
                unguarded(r, acc);
            }
            Term::Const(c) => acc.push(c),
        }
    }
    let edges: HashMap<&ConstRef, Vec<&ConstRef>> = def
        .equations
        .iter()
        .map(|(k, t)| {
            let mut acc = Vec::new();
            unguarded(t, &mut acc);
            (k, acc)
        })
        .collect();
    for start in def.equations.keys() {
        let mut seen = HashSet::new();
        let mut stack: Vec<&ConstRef> = edges[start].clone();
        let mut cyclic = false;
        while let Some(c) = stack.pop() {
            if c == start {
                cyclic = true;
                break;
            }
            if seen.insert(c) {
                if let Some(next) = edges.get(c) {
                    stack.extend(next.iter().copied());
                }
            }
        }
        if cyclic {
            out.push(with_pos(
                Diagnostic::error_nopos(format!(
                    "`{}` is defined by unguarded recursion",
                    show_const(def, start)
                )),
                def.source_map.equations.get(start).copied(),
            ));
        }
    }
}

fn check_duplicate_inputs(
    def: &ModelDefinition,
    term: &Term,
    owner: &str,
    pos: Option<Pos>,
    out: &mut Vec<Diagnostic>,
) {
    let mut counts: BTreeMap<(ActionType, &str), usize> = BTreeMap::new();
    for s in def.summands(term) {
        let kind = s.prefix.action_type();
        if matches!(kind, ActionType::UnicastIn | ActionType::BroadcastIn) {
            *counts.entry((kind, s.prefix.label().as_str())).or_default() += 1;
        }
    }
    for ((kind, label), n) in counts {
        if n > 1 {
            out.push(with_pos(
                Diagnostic::error_nopos(format!(
                    "{owner}: {n} alternative `{}{label}` input prefixes; at most one is allowed per label",
                    kind.glyph()
                )),
                pos,
            ));
        }
    }
}

fn check_unicast_receivers(def: &ModelDefinition, out: &mut Vec<Diagnostic>) {
    let receives = |loc: LocId, label: &str| {
        def.equations.iter().any(|(k, t)| {
            k.loc == loc
                && def.summands(t).iter().any(|s| {
                    matches!(s.prefix, Prefix::UnicastIn { .. }) && s.prefix.label().as_str() == label
                })
        })
    };
    for (key, body) in &def.equations {
        let mut prefixes = Vec::new();
        collect_prefixes(body, &mut prefixes);
        for p in prefixes {
            if let Prefix::UnicastOut { label, range, .. } = p {
                if !range.iter().any(|&l| receives(l, label.as_str())) {
                    out.push(with_pos(
                        Diagnostic::warning(format!(
                            "{}: unicast `!!{label}` can never be received: no equation in its influence range inputs `??{label}`",
                            show_const(def, key)
                        )),
                        def.source_map.equations.get(key).copied(),
                    ));
                }
            }
        }
    }
}

fn collect_prefixes<'a>(t: &'a Term, out: &mut Vec<&'a Prefix>) {
    match t {
        Term::Prefix(p, _) => out.push(p),
        Term::Choice(l, r) => {
            collect_prefixes(l, out);
            collect_prefixes(r, out);
        }
        Term::Const(_) => {}
    }
}
