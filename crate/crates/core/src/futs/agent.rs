//! Agent-level and component-level labelled transitions derived from the
//! stochastic relation.
//!
//! An agent performs `a` in a system transition when it takes part in the
//! role `a` names: the initiator performs its output or spontaneous action,
//! and a receiver performs `?α` or `??α` only on branches where it acts.
//! Receivers that decline, and bystanders, perform nothing.

use indexmap::IndexMap;

use crate::error::Error;
use crate::model::{ActionId, ActionType, ModelComponent, ModelDefinition, SeqComponent};

use super::stochastic::{stoch_step, Branch, StochKind, StochLabel, StochTransition};

fn roles(t: &StochTransition, b: &Branch) -> Vec<(usize, ActionId)> {
    let label = t.label.label.as_str();
    let (out, input) = match t.label.kind {
        StochKind::Spontaneous => (ActionType::Spontaneous, None),
        StochKind::Broadcast => (ActionType::BroadcastOut, Some(ActionType::BroadcastIn)),
        StochKind::Unicast => (ActionType::UnicastOut, Some(ActionType::UnicastIn)),
    };
    let mut v = vec![(t.initiator, ActionId::new(out, label))];
    if let Some(input) = input {
        v.extend(
            b.receptions
                .iter()
                .filter(|r| r.acted)
                .map(|r| (r.position, ActionId::new(input, label))),
        );
    }
    v
}

/// `S →a S'` for the agent at `position` of `sys`.
pub fn agent_steps(
    def: &ModelDefinition,
    sys: &ModelComponent,
    position: usize,
) -> Result<Vec<(ActionId, SeqComponent)>, Error> {
    if position >= sys.len() {
        return Err(Error::IndexOutOfRange {
            index: position,
            len: sys.len(),
        });
    }
    let mut out: Vec<(ActionId, SeqComponent)> = Vec::new();
    for t in stoch_step(def, sys) {
        for b in &t.branches {
            for (who, a) in roles(&t, b) {
                let step = (a, b.target.0[position].clone());
                if who == position && !out.contains(&step) {
                    out.push(step);
                }
            }
        }
    }
    Ok(out)
}

/// A transition `P →a P'` of a model component inside a fixed context.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedStep {
    pub action: ActionId,
    /// Position within `P` of the member performing `action`.
    pub actor: usize,
    pub target: ModelComponent,
    /// Total rate of the system branches realising this step.
    pub rate: f64,
    /// Label of the first system transition realising this step.
    pub via: StochLabel,
}

/// Transitions of `p` when run as `context ∥ p`. The context's own moves are
/// discarded: the successor keeps the original context.
pub fn lifted_steps(
    def: &ModelDefinition,
    context: &ModelComponent,
    p: &ModelComponent,
) -> Vec<LiftedStep> {
    let whole = context.par(p);
    let offset = context.len();
    let mut merged: IndexMap<(ActionId, usize, ModelComponent), LiftedStep> = IndexMap::new();
    for t in stoch_step(def, &whole) {
        for b in &t.branches {
            for (who, action) in roles(&t, b) {
                if who < offset {
                    continue;
                }
                let target = ModelComponent(b.target.0[offset..].to_vec());
                let actor = who - offset;
                merged
                    .entry((action.clone(), actor, target.clone()))
                    .and_modify(|s| s.rate += b.rate)
                    .or_insert_with(|| LiftedStep {
                        action,
                        actor,
                        target,
                        rate: b.rate,
                        via: t.label.clone(),
                    });
            }
        }
    }
    merged.into_values().collect()
}
