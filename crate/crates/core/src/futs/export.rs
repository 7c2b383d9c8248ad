//! CTMC serialisation: tab-separated tables and Graphviz DOT.
//!
//! TSV layout, LF line endings:
//!
//! ```text
//! # states
//! <id>\t<state>
//! # transitions
//! <src>\t<dst>\t<rate>\t<spontaneous|broadcast|unicast>\t<label>
//! ```

use std::fmt::Write;

use crate::model::ModelDefinition;
use crate::num::g17;
use crate::parser::show_model;

use super::ctmc::Ctmc;

pub fn to_tsv(def: &ModelDefinition, ctmc: &Ctmc) -> String {
    let mut out = String::from("# states\n");
    for (i, s) in ctmc.states.iter().enumerate() {
        let _ = writeln!(out, "{i}\t{}", show_model(def, s));
    }
    out.push_str("# transitions\n");
    for e in &ctmc.transitions {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            e.src,
            e.dst,
            g17(e.rate),
            e.label.kind.name(),
            e.label.label
        );
    }
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn to_dot(def: &ModelDefinition, ctmc: &Ctmc) -> String {
    let mut out = String::from("digraph ctmc {\n  rankdir=LR;\n  node [shape=box];\n");
    for (i, s) in ctmc.states.iter().enumerate() {
        let extra = if i == ctmc.initial { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  s{i} [label={}{extra}];", quote(&show_model(def, s)));
    }
    for e in &ctmc.transitions {
        let _ = writeln!(
            out,
            "  s{} -> s{} [label={}];",
            e.src,
            e.dst,
            quote(&format!("{} {}", e.label, g17(e.rate)))
        );
    }
    out.push_str("}\n");
    out
}
