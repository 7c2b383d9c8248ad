//! Breadth-first CTMC construction.

use indexmap::{IndexMap, IndexSet};

use crate::error::Error;
use crate::model::{ModelComponent, ModelDefinition};

use super::stochastic::{stoch_step, StochLabel};

#[derive(Clone, Debug, PartialEq)]
pub struct CtmcEdge {
    pub src: usize,
    pub dst: usize,
    pub rate: f64,
    pub label: StochLabel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ctmc {
    pub states: Vec<ModelComponent>,
    pub transitions: Vec<CtmcEdge>,
    pub initial: usize,
}

impl Ctmc {
    pub fn outgoing(&self, state: usize) -> impl Iterator<Item = &CtmcEdge> {
        self.transitions.iter().filter(move |e| e.src == state)
    }

    pub fn exit_rate(&self, state: usize) -> f64 {
        self.outgoing(state).map(|e| e.rate).sum()
    }
}

/// Explores every state reachable from `sys0`. States are numbered in
/// discovery order; edges with the same source, target and label are merged.
/// Self-loops are kept.
pub fn build_ctmc(def: &ModelDefinition, sys0: &ModelComponent, bound: usize) -> Result<Ctmc, Error> {
    if bound == 0 {
        return Err(Error::ZeroBound);
    }
    let mut states: IndexSet<ModelComponent> = IndexSet::new();
    states.insert(def.canonical(sys0));
    let mut transitions = Vec::new();
    let mut next = 0;
    while next < states.len() {
        let src = next;
        next += 1;
        let state = states[src].clone();
        let mut merged: IndexMap<(usize, StochLabel), f64> = IndexMap::new();
        for t in stoch_step(def, &state) {
            for b in &t.branches {
                let (dst, _) = states.insert_full(b.target.clone());
                if states.len() > bound {
                    return Err(Error::BoundExceeded {
                        bound,
                        discovered: states.len(),
                    });
                }
                *merged.entry((dst, t.label.clone())).or_insert(0.0) += b.rate;
            }
        }
        transitions.extend(merged.into_iter().map(|((dst, label), rate)| CtmcEdge {
            src,
            dst,
            rate,
            label,
        }));
    }
    Ok(Ctmc {
        states: states.into_iter().collect(),
        transitions,
        initial: 0,
    })
}
