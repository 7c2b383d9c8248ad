//! Capability relation for inputs: success and failure probabilities.

use crate::model::{Ident, LocSet, ModelComponent, ModelDefinition, Prefix, SeqComponent};
use crate::rates::weight_of;

use super::Continuation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CapKind {
    BroadcastIn,
    UnicastIn,
}

/// `(?α, ℓ⃗, Sys)` or `(??α, ℓ⃗, Sys)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CapLabel {
    pub kind: CapKind,
    pub label: Ident,
    pub range: LocSet,
    pub context: ModelComponent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InputOutcome {
    pub target: SeqComponent,
    pub mass: f64,
    pub acted: bool,
}

/// Success and failure branches of `s` for an input, or an empty vector when
/// `s` is out of range or has no matching input prefix. For unicast,
/// `total_weight` is the weight of all eligible receivers; a failed input
/// leaves `s` unchanged as a whole, choices included.
pub fn input_outcomes(
    def: &ModelDefinition,
    s: &SeqComponent,
    kind: CapKind,
    label: &str,
    range: &LocSet,
    total_weight: f64,
) -> Vec<InputOutcome> {
    if !range.contains(&s.loc) {
        return Vec::new();
    }
    let mut out = Vec::new();
    for sm in def.summands(&s.term) {
        let (success, fail) = match (kind, sm.prefix) {
            (
                CapKind::BroadcastIn,
                Prefix::BroadcastIn {
                    label: l,
                    act_prob,
                    recv_prob,
                },
            ) if l.as_str() == label => {
                let pq = act_prob * recv_prob;
                (pq, 1.0 - pq)
            }
            (
                CapKind::UnicastIn,
                Prefix::UnicastIn {
                    label: l,
                    act_prob,
                    weight,
                },
            ) if l.as_str() == label => {
                if total_weight <= 0.0 {
                    continue;
                }
                (
                    weight * act_prob / total_weight,
                    weight * (1.0 - act_prob) / total_weight,
                )
            }
            _ => continue,
        };
        out.push(InputOutcome {
            target: SeqComponent::constant(sm.next.clone()),
            mass: success,
            acted: true,
        });
        out.push(InputOutcome {
            target: s.clone(),
            mass: fail,
            acted: false,
        });
    }
    out
}

fn merge<K: std::hash::Hash + Eq>(into: &mut Continuation<K>, key: K, mass: f64) {
    *into.entry(key).or_insert(0.0) += mass;
}

fn unicast_weight(def: &ModelDefinition, lab: &CapLabel) -> f64 {
    match lab.kind {
        CapKind::UnicastIn => weight_of(def, lab.context.seq_in(&lab.range), lab.label.as_str()),
        CapKind::BroadcastIn => 0.0,
    }
}

/// Capability step of one agent. Successors are canonicalised.
pub fn cap_step_seq(
    def: &ModelDefinition,
    s: &SeqComponent,
    lab: &CapLabel,
) -> Option<Continuation<SeqComponent>> {
    let w = unicast_weight(def, lab);
    let outcomes = input_outcomes(def, s, lab.kind, lab.label.as_str(), &lab.range, w);
    if outcomes.is_empty() {
        return None;
    }
    let mut f = Continuation::new();
    for o in outcomes {
        merge(&mut f, def.canonical_seq(&o.target), o.mass);
    }
    Some(f)
}

/// Capability step of a model component. Broadcast inputs combine the
/// capable members independently (product of their distributions); unicast
/// inputs let exactly one capable member move. Non-capable members stay put.
pub fn cap_step(
    def: &ModelDefinition,
    p: &ModelComponent,
    lab: &CapLabel,
) -> Option<Continuation<ModelComponent>> {
    let w = unicast_weight(def, lab);
    let per_member: Vec<(usize, Vec<InputOutcome>)> = p
        .iter()
        .enumerate()
        .map(|(i, s)| (i, input_outcomes(def, s, lab.kind, lab.label.as_str(), &lab.range, w)))
        .filter(|(_, o)| !o.is_empty())
        .collect();
    if per_member.is_empty() {
        return None;
    }
    let base = def.canonical(p);
    let mut f = Continuation::new();
    match lab.kind {
        CapKind::UnicastIn => {
            for (i, outcomes) in &per_member {
                for o in outcomes {
                    let mut next = base.clone();
                    next.0[*i] = def.canonical_seq(&o.target);
                    merge(&mut f, next, o.mass);
                }
            }
        }
        CapKind::BroadcastIn => {
            let mut partial = vec![(base, 1.0)];
            for (i, outcomes) in &per_member {
                let mut grown = Vec::with_capacity(partial.len() * outcomes.len());
                for (state, mass) in &partial {
                    for o in outcomes {
                        let mut next = state.clone();
                        next.0[*i] = def.canonical_seq(&o.target);
                        grown.push((next, mass * o.mass));
                    }
                }
                partial = grown;
            }
            for (state, mass) in partial {
                merge(&mut f, state, mass);
            }
        }
    }
    Some(f)
}
