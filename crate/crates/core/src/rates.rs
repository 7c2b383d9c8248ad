//! Rate, weight and probability functions.
//!
//! The context-unaware functions read prefixes off a single agent (summing
//! over choices). The context-aware ones evaluate an agent inside a system:
//! whether a unicast sender has eligible receivers, which share of a unicast
//! a receiver gets, and finally the exit rate `R_a` of an agent, of a model
//! component, or of the part of a model component inside a location set.
//!
//! A unicast sender never counts as an eligible receiver of its own message:
//! receiver weights are always summed over the other agents of the system.

use crate::model::{
    ActionId, ActionType, LocId, LocSet, ModelComponent, ModelDefinition, Prefix, SeqComponent,
};

fn sum_over<F>(def: &ModelDefinition, s: &SeqComponent, f: F) -> f64
where
    F: Fn(&Prefix) -> f64,
{
    def.summands(&s.term).iter().map(|sm| f(sm.prefix)).sum()
}

/// `s^!!_α`: total rate of `!!α` prefixes.
pub fn s_uni_out(def: &ModelDefinition, s: &SeqComponent, label: &str) -> f64 {
    sum_over(def, s, |p| match p {
        Prefix::UnicastOut { label: l, rate, .. } if l.as_str() == label => *rate,
        _ => 0.0,
    })
}

/// `s_α`: total rate of spontaneous `(α, r)` prefixes.
pub fn s_spont(def: &ModelDefinition, s: &SeqComponent, label: &str) -> f64 {
    sum_over(def, s, |p| match p {
        Prefix::Spontaneous { label: l, rate } if l.as_str() == label => *rate,
        _ => 0.0,
    })
}

/// `b_α`: total rate of `!α` prefixes.
pub fn b_br_out(def: &ModelDefinition, s: &SeqComponent, label: &str) -> f64 {
    sum_over(def, s, |p| match p {
        Prefix::BroadcastOut { label: l, rate, .. } if l.as_str() == label => *rate,
        _ => 0.0,
    })
}

/// `Π_UniIR`: union of the influence ranges of the agent's `!!α` prefixes.
pub fn uni_influence_range(def: &ModelDefinition, s: &SeqComponent, label: &str) -> LocSet {
    let mut out = LocSet::new();
    for sm in def.summands(&s.term) {
        if let Prefix::UnicastOut { label: l, range, .. } = sm.prefix {
            if l.as_str() == label {
                out.extend(range.iter().copied());
            }
        }
    }
    out
}

/// `w_α` of one agent.
pub fn weight(def: &ModelDefinition, s: &SeqComponent, label: &str) -> f64 {
    sum_over(def, s, |p| match p {
        Prefix::UnicastIn { label: l, weight, .. } if l.as_str() == label => *weight,
        _ => 0.0,
    })
}

/// `w_α` summed over a parallel composition or any collection of agents.
pub fn weight_of<'a, I>(def: &ModelDefinition, agents: I, label: &str) -> f64
where
    I: IntoIterator<Item = &'a SeqComponent>,
{
    agents.into_iter().map(|s| weight(def, s, label)).sum()
}

/// `p^??_α`: acting probability of the agent's `??α` prefix, 0 if it has none.
pub fn prob_uni_in(def: &ModelDefinition, s: &SeqComponent, label: &str) -> f64 {
    sum_over(def, s, |p| match p {
        Prefix::UnicastIn {
            label: l, act_prob, ..
        } if l.as_str() == label => *act_prob,
        _ => 0.0,
    })
}

/// `p^?_α`: probability `p·q` that the agent receives and acts on a broadcast.
pub fn prob_br_in(def: &ModelDefinition, s: &SeqComponent, label: &str) -> f64 {
    sum_over(def, s, |p| match p {
        Prefix::BroadcastIn {
            label: l,
            act_prob,
            recv_prob,
        } if l.as_str() == label => act_prob * recv_prob,
        _ => 0.0,
    })
}

/// `u_α(ℓ', S)`: rate at which the agent is capable of unicasting `α` to `ℓ'`.
pub fn u_cap(def: &ModelDefinition, target: LocId, s: &SeqComponent, label: &str) -> f64 {
    sum_over(def, s, |p| match p {
        Prefix::UnicastOut {
            label: l,
            rate,
            range,
        } if l.as_str() == label && range.contains(&target) => *rate,
        _ => 0.0,
    })
}

/// Rate at which `whole[sender]` unicasts `α` to `target`, zero unless some
/// other agent of `whole` in the sender's influence range accepts `??α`.
fn unicast_rate_to(
    def: &ModelDefinition,
    whole: &[SeqComponent],
    sender: usize,
    target: LocId,
    label: &str,
) -> f64 {
    let rate = u_cap(def, target, &whole[sender], label);
    if rate == 0.0 {
        return 0.0;
    }
    let range = uni_influence_range(def, &whole[sender], label);
    let receivers = whole
        .iter()
        .enumerate()
        .filter(|&(j, s)| j != sender && range.contains(&s.loc))
        .map(|(_, s)| s);
    if weight_of(def, receivers, label) > 0.0 {
        rate
    } else {
        0.0
    }
}

/// `u_α(ℓ, Sys, P)`: rate at which `P` unicasts `α` to `ℓ` inside `Sys ∥ P`.
pub fn u_sys(
    def: &ModelDefinition,
    target: LocId,
    sys: &ModelComponent,
    p: &ModelComponent,
    label: &str,
) -> f64 {
    let whole = sys.par(p);
    (sys.len()..whole.len())
        .map(|i| unicast_rate_to(def, whole.components(), i, target, label))
        .sum()
}

/// Share of `whole[sender]`'s unicast `α` that reaches `whole[receiver]`.
fn receive_share(
    def: &ModelDefinition,
    whole: &[SeqComponent],
    receiver: usize,
    sender: usize,
    label: &str,
) -> f64 {
    let range = uni_influence_range(def, &whole[sender], label);
    if !range.contains(&whole[receiver].loc) {
        return 0.0;
    }
    let num = weight(def, &whole[receiver], label);
    let den = weight_of(
        def,
        whole
            .iter()
            .enumerate()
            .filter(|&(j, s)| j != sender && range.contains(&s.loc))
            .map(|(_, s)| s),
        label,
    );
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// `p_α(S₁, Sys, S₂)`: probability that `receiver` is the one selected for a
/// unicast `α` from `sender`, with competing receivers drawn from
/// `sys ∥ receiver`. One copy of `sender` is dropped from `sys` if present.
pub fn p_uni_recv(
    def: &ModelDefinition,
    receiver: &SeqComponent,
    sys: &ModelComponent,
    sender: &SeqComponent,
    label: &str,
) -> f64 {
    let mut whole: Vec<SeqComponent> = Vec::with_capacity(sys.len() + 2);
    let sender_key = def.canonical_seq(sender);
    let mut dropped = false;
    for s in sys.iter() {
        if !dropped && def.canonical_seq(s) == sender_key {
            dropped = true;
            continue;
        }
        whole.push(s.clone());
    }
    whole.push(receiver.clone());
    whole.push(sender.clone());
    let n = whole.len();
    receive_share(def, &whole, n - 2, n - 1, label)
}

/// `b_α(ℓ, Sys)`: total broadcast `α` rate of `sys` whose range covers `target`.
pub fn b_sys(def: &ModelDefinition, target: LocId, sys: &ModelComponent, label: &str) -> f64 {
    sys.iter()
        .map(|s| {
            sum_over(def, s, |p| match p {
                Prefix::BroadcastOut {
                    label: l,
                    rate,
                    range,
                } if l.as_str() == label && range.contains(&target) => *rate,
                _ => 0.0,
            })
        })
        .sum()
}

/// `R_a(whole \ whole[pos], whole[pos])`.
fn agent_rate(def: &ModelDefinition, whole: &[SeqComponent], pos: usize, a: &ActionId) -> f64 {
    let s = &whole[pos];
    let label = a.label.as_str();
    match a.kind {
        ActionType::Spontaneous => s_spont(def, s, label),
        ActionType::BroadcastOut => b_br_out(def, s, label),
        ActionType::BroadcastIn => {
            let p = prob_br_in(def, s, label);
            if p == 0.0 {
                return 0.0;
            }
            let others: ModelComponent = whole
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != pos)
                .map(|(_, t)| t.clone())
                .collect();
            b_sys(def, s.loc, &others, label) * p
        }
        ActionType::UnicastOut => {
            let context_locs: LocSet = whole
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != pos)
                .map(|(_, t)| t.loc)
                .collect();
            context_locs
                .into_iter()
                .map(|l| unicast_rate_to(def, whole, pos, l, label))
                .fold(0.0, f64::max)
        }
        ActionType::UnicastIn => {
            let p = prob_uni_in(def, s, label);
            if p == 0.0 {
                return 0.0;
            }
            (0..whole.len())
                .filter(|&t| t != pos)
                .map(|t| {
                    unicast_rate_to(def, whole, t, s.loc, label)
                        * receive_share(def, whole, pos, t, label)
                })
                .sum::<f64>()
                * p
        }
    }
}

/// `R_a(Sys, S)` for a single agent in context `sys`.
pub fn exit_rate_seq(
    def: &ModelDefinition,
    a: &ActionId,
    sys: &ModelComponent,
    s: &SeqComponent,
) -> f64 {
    let mut whole = sys.components().to_vec();
    whole.push(s.clone());
    agent_rate(def, &whole, sys.len(), a)
}

/// `R_a(L, Sys, P)`: sum over the agents of `p` located in `locs` (all agents
/// when `locs` is `None`), each evaluated against `sys` and the rest of `p`.
pub fn exit_rate_in(
    def: &ModelDefinition,
    a: &ActionId,
    locs: Option<&LocSet>,
    sys: &ModelComponent,
    p: &ModelComponent,
) -> f64 {
    let whole = sys.par(p);
    (0..p.len())
        .filter(|&i| locs.is_none_or(|l| l.contains(&p.components()[i].loc)))
        .map(|i| agent_rate(def, whole.components(), sys.len() + i, a))
        .sum()
}

/// `R_a(Sys, P)`.
pub fn exit_rate_model(
    def: &ModelDefinition,
    a: &ActionId,
    sys: &ModelComponent,
    p: &ModelComponent,
) -> f64 {
    exit_rate_in(def, a, None, sys, p)
}

#[derive(Clone, Copy, Debug)]
pub enum Subject<'a> {
    Seq(&'a SeqComponent),
    Model(&'a ModelComponent),
}

/// Arguments of `R_a` in any of its three arities.
#[derive(Clone, Debug)]
pub struct RateQuery<'a> {
    pub action: ActionId,
    pub locations: Option<LocSet>,
    pub context: &'a ModelComponent,
    pub subject: Subject<'a>,
}

pub fn exit_rate(def: &ModelDefinition, q: &RateQuery<'_>) -> f64 {
    match q.subject {
        Subject::Seq(s) => {
            if q.locations.as_ref().is_some_and(|l| !l.contains(&s.loc)) {
                0.0
            } else {
                exit_rate_seq(def, &q.action, q.context, s)
            }
        }
        Subject::Model(p) => exit_rate_in(def, &q.action, q.locations.as_ref(), q.context, p),
    }
}
