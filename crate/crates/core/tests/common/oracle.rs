//! Brute-force application of the capability and stochastic rules, written
//! against the syntax tree only. Shares nothing with the library's
//! semantics code so that the two can be compared.

use std::collections::HashMap;

use paloma::model::{
    ActionId, ActionType, ConstRef, LocId, ModelComponent, ModelDefinition, Prefix, SeqComponent,
    Term,
};

/// State identity: location plus the term after resolving top-level constants.
pub type Key = Vec<(LocId, Term)>;

#[derive(Clone, Debug)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub rate: f64,
    pub kind: &'static str,
    pub label: String,
    /// Agents taking part and the action each performs.
    pub roles: Vec<(usize, ActionId)>,
}

#[derive(Debug)]
pub struct Chain {
    pub states: Vec<Vec<SeqComponent>>,
    pub keys: Vec<Key>,
    pub edges: Vec<Edge>,
}

pub fn resolve(def: &ModelDefinition, t: &Term) -> Term {
    let mut cur = t;
    for _ in 0..=def.equations.len() {
        match cur {
            Term::Const(c) => match def.equations.get(c) {
                Some(body) => cur = body,
                None => break,
            },
            _ => break,
        }
    }
    cur.clone()
}

pub fn key_of(def: &ModelDefinition, comps: &[SeqComponent]) -> Key {
    comps.iter().map(|s| (s.loc, resolve(def, &s.term))).collect()
}

pub fn alternatives(def: &ModelDefinition, t: &Term) -> Vec<(Prefix, ConstRef)> {
    fn go(def: &ModelDefinition, t: &Term, depth: usize, out: &mut Vec<(Prefix, ConstRef)>) {
        if depth > def.equations.len() + 1 {
            return;
        }
        match t {
            Term::Prefix(p, n) => out.push((p.clone(), n.clone())),
            Term::Choice(l, r) => {
                go(def, l, depth, out);
                go(def, r, depth, out);
            }
            Term::Const(c) => {
                if let Some(b) = def.equations.get(c) {
                    go(def, b, depth + 1, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(def, t, 0, &mut out);
    out
}

fn broadcast_input(def: &ModelDefinition, s: &SeqComponent, label: &str) -> Option<(f64, ConstRef)> {
    alternatives(def, &s.term).into_iter().find_map(|(p, n)| match p {
        Prefix::BroadcastIn {
            label: l,
            act_prob,
            recv_prob,
        } if l.as_str() == label => Some((act_prob * recv_prob, n)),
        _ => None,
    })
}

fn unicast_input(def: &ModelDefinition, s: &SeqComponent, label: &str) -> Option<(f64, f64, ConstRef)> {
    alternatives(def, &s.term).into_iter().find_map(|(p, n)| match p {
        Prefix::UnicastIn {
            label: l,
            act_prob,
            weight,
        } if l.as_str() == label => Some((act_prob, weight, n)),
        _ => None,
    })
}

pub struct Move {
    pub target: Vec<SeqComponent>,
    pub rate: f64,
    pub kind: &'static str,
    pub label: String,
    pub roles: Vec<(usize, ActionId)>,
}

pub fn moves(def: &ModelDefinition, state: &[SeqComponent]) -> Vec<Move> {
    let mut out = Vec::new();
    for (i, s) in state.iter().enumerate() {
        for (prefix, next) in alternatives(def, &s.term) {
            let label = prefix.label().as_str().to_string();
            let mut moved = state.to_vec();
            moved[i] = SeqComponent::constant(next);
            match prefix {
                Prefix::Spontaneous { rate, .. } => out.push(Move {
                    target: moved,
                    rate,
                    kind: "spontaneous",
                    label: label.clone(),
                    roles: vec![(i, ActionId::new(ActionType::Spontaneous, &label))],
                }),
                Prefix::BroadcastOut { rate, range, .. } => {
                    let rx: Vec<(usize, f64, ConstRef)> = state
                        .iter()
                        .enumerate()
                        .filter(|&(j, t)| j != i && range.contains(&t.loc))
                        .filter_map(|(j, t)| broadcast_input(def, t, &label).map(|(pq, n)| (j, pq, n)))
                        .collect();
                    for mask in 0u32..(1 << rx.len()) {
                        let mut target = moved.clone();
                        let mut r = rate;
                        let mut roles = vec![(i, ActionId::new(ActionType::BroadcastOut, &label))];
                        for (bit, (j, pq, n)) in rx.iter().enumerate() {
                            if mask & (1 << bit) != 0 {
                                r *= pq;
                                target[*j] = SeqComponent::constant(n.clone());
                                roles.push((*j, ActionId::new(ActionType::BroadcastIn, &label)));
                            } else {
                                r *= 1.0 - pq;
                            }
                        }
                        if r > 0.0 {
                            out.push(Move {
                                target,
                                rate: r,
                                kind: "broadcast",
                                label: label.clone(),
                                roles,
                            });
                        }
                    }
                }
                Prefix::UnicastOut { rate, range, .. } => {
                    let rx: Vec<(usize, f64, f64, ConstRef)> = state
                        .iter()
                        .enumerate()
                        .filter(|&(j, t)| j != i && range.contains(&t.loc))
                        .filter_map(|(j, t)| unicast_input(def, t, &label).map(|(p, w, n)| (j, p, w, n)))
                        .collect();
                    let total: f64 = rx.iter().map(|r| r.2).sum();
                    for (j, p, w, n) in rx {
                        let mut acted = moved.clone();
                        acted[j] = SeqComponent::constant(n);
                        let sender = (i, ActionId::new(ActionType::UnicastOut, &label));
                        let receiver = (j, ActionId::new(ActionType::UnicastIn, &label));
                        for (target, r, roles) in [
                            (acted, rate * w * p / total, vec![sender.clone(), receiver]),
                            (moved.clone(), rate * w * (1.0 - p) / total, vec![sender]),
                        ] {
                            if r > 0.0 {
                                out.push(Move {
                                    target,
                                    rate: r,
                                    kind: "unicast",
                                    label: label.clone(),
                                    roles,
                                });
                            }
                        }
                    }
                }
                Prefix::UnicastIn { .. } | Prefix::BroadcastIn { .. } => {}
            }
        }
    }
    out
}

pub fn explore(def: &ModelDefinition, init: &ModelComponent, bound: usize) -> Option<Chain> {
    let mut index: HashMap<Key, usize> = HashMap::new();
    let mut states = vec![init.0.clone()];
    let mut keys = vec![key_of(def, &init.0)];
    index.insert(keys[0].clone(), 0);
    let mut edges = Vec::new();
    let mut i = 0;
    while i < states.len() {
        for m in moves(def, &states[i].clone()) {
            let k = key_of(def, &m.target);
            let dst = match index.get(&k) {
                Some(&d) => d,
                None => {
                    states.push(m.target);
                    keys.push(k.clone());
                    index.insert(k, states.len() - 1);
                    if states.len() > bound {
                        return None;
                    }
                    states.len() - 1
                }
            };
            edges.push(Edge {
                src: i,
                dst,
                rate: m.rate,
                kind: m.kind,
                label: m.label,
                roles: m.roles,
            });
        }
        i += 1;
    }
    Some(Chain { states, keys, edges })
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0)
}

/// Compares a library CTMC against the oracle chain state-for-state and
/// rate-for-rate, aggregating edges by source, target, kind and label.
pub fn compare(def: &ModelDefinition, ctmc: &paloma::futs::Ctmc, chain: &Chain) -> Result<(), String> {
    if ctmc.states.len() != chain.states.len() {
        return Err(format!(
            "state count {} vs oracle {}",
            ctmc.states.len(),
            chain.states.len()
        ));
    }
    let oracle_index: HashMap<&Key, usize> = chain.keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut map = Vec::new();
    for s in &ctmc.states {
        let k = key_of(def, &s.0);
        match oracle_index.get(&k) {
            Some(&i) => map.push(i),
            None => return Err(format!("engine state {s:?} unknown to the oracle")),
        }
    }
    if map[ctmc.initial] != 0 {
        return Err("initial states differ".into());
    }
    let mut engine: HashMap<(usize, usize, String, String), f64> = HashMap::new();
    for e in &ctmc.transitions {
        let k = (map[e.src], map[e.dst], e.label.kind.name().to_string(), e.label.label.to_string());
        *engine.entry(k).or_insert(0.0) += e.rate;
    }
    let mut oracle: HashMap<(usize, usize, String, String), f64> = HashMap::new();
    for e in &chain.edges {
        *oracle
            .entry((e.src, e.dst, e.kind.to_string(), e.label.clone()))
            .or_insert(0.0) += e.rate;
    }
    if engine.len() != oracle.len() {
        return Err(format!("edge count {} vs oracle {}", engine.len(), oracle.len()));
    }
    for (k, r) in &oracle {
        match engine.get(k) {
            Some(x) if close(*x, *r) => {}
            other => return Err(format!("edge {k:?}: engine {other:?}, oracle {r}")),
        }
    }
    Ok(())
}
