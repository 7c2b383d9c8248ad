//! Textual rendering of terms and whole definitions in the concrete syntax.

use std::fmt::Write;

use crate::model::{
    ConstRef, LocSet, ModelComponent, ModelDefinition, Prefix, SeqComponent, Term,
};

pub fn show_const(def: &ModelDefinition, c: &ConstRef) -> String {
    format!("{}({})", c.name, def.loc_name(c.loc))
}

pub fn show_range(def: &ModelDefinition, range: &LocSet) -> String {
    let names: Vec<&str> = range.iter().map(|&l| def.loc_name(l)).collect();
    format!("{{{}}}", names.join(", "))
}

pub fn show_prefix(def: &ModelDefinition, p: &Prefix) -> String {
    match p {
        Prefix::UnicastOut { label, rate, range } => {
            format!("!!({label}, {rate})@Ir{}", show_range(def, range))
        }
        Prefix::UnicastIn {
            label,
            act_prob,
            weight,
        } => format!("??({label}, {act_prob})@Wt{{{weight}}}"),
        Prefix::BroadcastOut { label, rate, range } => {
            format!("!({label}, {rate})@Ir{}", show_range(def, range))
        }
        Prefix::BroadcastIn {
            label,
            act_prob,
            recv_prob,
        } => format!("?({label}, {act_prob})@Prob{{{recv_prob}}}"),
        Prefix::Spontaneous { label, rate } => format!("({label}, {rate})"),
    }
}

/// Choices print left-associated; a choice in right operand position is
/// parenthesised so the tree shape survives a round trip.
pub fn show_term(def: &ModelDefinition, t: &Term) -> String {
    match t {
        Term::Prefix(p, next) => format!("{}.{}", show_prefix(def, p), show_const(def, next)),
        Term::Const(c) => show_const(def, c),
        Term::Choice(l, r) => {
            let right = match **r {
                Term::Choice(..) => format!("({})", show_term(def, r)),
                _ => show_term(def, r),
            };
            format!("{} + {}", show_term(def, l), right)
        }
    }
}

fn has_prefix(t: &Term) -> bool {
    match t {
        Term::Prefix(..) => true,
        Term::Choice(l, r) => has_prefix(l) || has_prefix(r),
        Term::Const(_) => false,
    }
}

/// Renders an agent. Inline prefix terms, which only arise from programmatic
/// construction, carry their location as `[term]@loc`.
pub fn show_seq(def: &ModelDefinition, s: &SeqComponent) -> String {
    if has_prefix(&s.term) {
        format!("[{}]@{}", show_term(def, &s.term), def.loc_name(s.loc))
    } else {
        show_term(def, &s.term)
    }
}

pub fn show_model(def: &ModelDefinition, p: &ModelComponent) -> String {
    if p.is_empty() {
        return "empty".to_string();
    }
    let parts: Vec<String> = p
        .iter()
        .map(|s| {
            let text = show_seq(def, s);
            if matches!(s.term, Term::Choice(..)) && p.len() > 1 {
                format!("({text})")
            } else {
                text
            }
        })
        .collect();
    parts.join(" || ")
}

/// Prints a definition in the concrete syntax; parsing the output yields a
/// structurally identical definition.
pub fn pretty_print(def: &ModelDefinition) -> String {
    let mut out = String::new();
    for (name, value) in &def.params {
        let _ = writeln!(out, "param {name} = {value};");
    }
    if !def.params.is_empty() {
        out.push('\n');
    }
    for loc in &def.locations {
        let _ = writeln!(
            out,
            "location {} = ({}, {});",
            loc.name, loc.point.x, loc.point.y
        );
    }
    if !def.locations.is_empty() {
        out.push('\n');
    }
    for (key, body) in &def.equations {
        let _ = writeln!(out, "{} := {};", show_const(def, key), show_term(def, body));
    }
    if !def.systems.is_empty() {
        out.push('\n');
    }
    for (name, sys) in &def.systems {
        let _ = writeln!(out, "system {name} := {};", show_model(def, sys));
    }
    out
}
