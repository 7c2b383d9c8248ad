//! Stochastic relation: rated transitions of a whole system.

use std::fmt;

use crate::model::{Ident, LocSet, ModelComponent, ModelDefinition, Prefix, SeqComponent};
use crate::rates::weight_of;

use super::capability::{input_outcomes, CapKind, InputOutcome};
use super::Continuation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StochKind {
    Spontaneous,
    Broadcast,
    Unicast,
}

impl StochKind {
    pub fn name(self) -> &'static str {
        match self {
            StochKind::Spontaneous => "spontaneous",
            StochKind::Broadcast => "broadcast",
            StochKind::Unicast => "unicast",
        }
    }

    pub fn glyph(self) -> &'static str {
        match self {
            StochKind::Spontaneous => "",
            StochKind::Broadcast => "!",
            StochKind::Unicast => "!!",
        }
    }
}

/// `(α, ∅, Sys)`, `(!α, ℓ⃗, Sys)` or `(!!α, ℓ⃗, Sys)`. The system is the one
/// being stepped and is left implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StochLabel {
    pub kind: StochKind,
    pub label: Ident,
    pub range: LocSet,
}

impl fmt::Display for StochLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.glyph(), self.label)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reception {
    pub position: usize,
    pub acted: bool,
}

/// One successor of a transition together with who received and how.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub target: ModelComponent,
    pub rate: f64,
    pub receptions: Vec<Reception>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StochTransition {
    pub label: StochLabel,
    pub initiator: usize,
    pub branches: Vec<Branch>,
}

impl StochTransition {
    /// The continuation function, merging branches that reach the same state.
    pub fn continuation(&self) -> Continuation<ModelComponent> {
        let mut f = Continuation::new();
        for b in &self.branches {
            *f.entry(b.target.clone()).or_insert(0.0) += b.rate;
        }
        f
    }

    pub fn total_rate(&self) -> f64 {
        self.branches.iter().map(|b| b.rate).sum()
    }
}

/// All stochastic transitions of `sys`, grouped per initiating agent and
/// label in summand order. Targets are canonical; zero-rate branches are
/// dropped.
pub fn stoch_step(def: &ModelDefinition, sys: &ModelComponent) -> Vec<StochTransition> {
    let base = def.canonical(sys);
    let mut out: Vec<StochTransition> = Vec::new();
    for (i, s) in sys.iter().enumerate() {
        let first = out.len();
        for sm in def.summands(&s.term) {
            let sender_next = def.canonical_seq(&SeqComponent::constant(sm.next.clone()));
            let (label, branches) = match sm.prefix {
                Prefix::Spontaneous { label, rate } => {
                    let mut target = base.clone();
                    target.0[i] = sender_next;
                    let lab = StochLabel {
                        kind: StochKind::Spontaneous,
                        label: label.clone(),
                        range: LocSet::new(),
                    };
                    (lab, vec![Branch { target, rate: *rate, receptions: vec![] }])
                }
                Prefix::BroadcastOut { label, rate, range } => {
                    let lab = StochLabel {
                        kind: StochKind::Broadcast,
                        label: label.clone(),
                        range: range.clone(),
                    };
                    (lab, broadcast(def, sys, &base, i, sender_next, label, *rate, range))
                }
                Prefix::UnicastOut { label, rate, range } => {
                    let lab = StochLabel {
                        kind: StochKind::Unicast,
                        label: label.clone(),
                        range: range.clone(),
                    };
                    (lab, unicast(def, sys, &base, i, sender_next, label, *rate, range))
                }
                Prefix::UnicastIn { .. } | Prefix::BroadcastIn { .. } => continue,
            };
            let branches: Vec<Branch> = branches.into_iter().filter(|b| b.rate > 0.0).collect();
            if branches.is_empty() {
                continue;
            }
            match out[first..].iter_mut().find(|t| t.label == label) {
                Some(t) => t.branches.extend(branches),
                None => out.push(StochTransition {
                    label,
                    initiator: i,
                    branches,
                }),
            }
        }
    }
    out
}

fn receivers(
    def: &ModelDefinition,
    sys: &ModelComponent,
    sender: usize,
    kind: CapKind,
    label: &str,
    range: &LocSet,
    total_weight: f64,
) -> Vec<(usize, Vec<InputOutcome>)> {
    sys.iter()
        .enumerate()
        .filter(|&(j, _)| j != sender)
        .map(|(j, s)| (j, input_outcomes(def, s, kind, label, range, total_weight)))
        .filter(|(_, o)| !o.is_empty())
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn broadcast(
    def: &ModelDefinition,
    sys: &ModelComponent,
    base: &ModelComponent,
    sender: usize,
    sender_next: SeqComponent,
    label: &Ident,
    rate: f64,
    range: &LocSet,
) -> Vec<Branch> {
    let mut start = base.clone();
    start.0[sender] = sender_next;
    let mut partial = vec![Branch {
        target: start,
        rate,
        receptions: vec![],
    }];
    for (j, outcomes) in receivers(def, sys, sender, CapKind::BroadcastIn, label.as_str(), range, 0.0) {
        let mut grown = Vec::with_capacity(partial.len() * outcomes.len());
        for b in &partial {
            for o in &outcomes {
                let mut next = b.clone();
                next.target.0[j] = def.canonical_seq(&o.target);
                next.rate *= o.mass;
                next.receptions.push(Reception {
                    position: j,
                    acted: o.acted,
                });
                grown.push(next);
            }
        }
        partial = grown;
    }
    partial
}

#[allow(clippy::too_many_arguments)]
fn unicast(
    def: &ModelDefinition,
    sys: &ModelComponent,
    base: &ModelComponent,
    sender: usize,
    sender_next: SeqComponent,
    label: &Ident,
    rate: f64,
    range: &LocSet,
) -> Vec<Branch> {
    let w = weight_of(
        def,
        sys.iter()
            .enumerate()
            .filter(|&(j, s)| j != sender && range.contains(&s.loc))
            .map(|(_, s)| s),
        label.as_str(),
    );
    let mut out = Vec::new();
    for (j, outcomes) in receivers(def, sys, sender, CapKind::UnicastIn, label.as_str(), range, w) {
        for o in outcomes {
            let mut target = base.clone();
            target.0[sender] = sender_next.clone();
            target.0[j] = def.canonical_seq(&o.target);
            out.push(Branch {
                target,
                rate: rate * o.mass,
                receptions: vec![Reception {
                    position: j,
                    acted: o.acted,
                }],
            });
        }
    }
    out
}
