//! Property checks over seeded random models, shared by the proptest suite
//! and the acceptance runner.

use paloma::equivalence::Isometry;
use paloma::futs::{build_ctmc, cap_step, cap_step_seq, stoch_step, CapKind, CapLabel, StochKind};
use paloma::model::{Ident, LocId, LocSet, ModelComponent, ModelDefinition, Point, Prefix};
use paloma::rates::{exit_rate_in, exit_rate_model, p_uni_recv};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gen::random_model;
use super::oracle::{self, alternatives};

pub type Check = Result<(), String>;

const TOL: f64 = 1e-9;

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= TOL * x.abs().max(y.abs()).max(1.0)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn reachable(def: &ModelDefinition) -> Vec<ModelComponent> {
    let sys = def.system("Main").expect("Main");
    match build_ctmc(def, sys, 400) {
        Ok(c) => c.states,
        Err(_) => vec![sys.clone()],
    }
}

fn labels(def: &ModelDefinition) -> Vec<String> {
    def.labels().iter().map(|l| l.to_string()).collect()
}

/// Capability continuations of in-range receivers carry total mass 1.
pub fn capability_mass(seed: u64) -> Check {
    let g = random_model(seed);
    let def = &g.def;
    for state in reachable(def) {
        for label in labels(def) {
            let lab = |kind, context: ModelComponent| CapLabel {
                kind,
                label: Ident::new(&label),
                range: def.all_locations(),
                context,
            };
            for s in state.iter() {
                if let Some(f) = cap_step_seq(def, s, &lab(CapKind::BroadcastIn, state.clone())) {
                    let m: f64 = f.values().sum();
                    ensure(close(m, 1.0), || format!("broadcast mass {m} for {s:?}\n{}", g.text))?;
                }
            }
            let rx: ModelComponent = state
                .iter()
                .filter(|s| {
                    alternatives(def, &s.term)
                        .iter()
                        .any(|(p, _)| matches!(p, Prefix::UnicastIn { label: l, .. } if l.as_str() == label))
                })
                .cloned()
                .collect();
            if let Some(f) = cap_step(def, &rx, &lab(CapKind::UnicastIn, rx.clone())) {
                let m: f64 = f.values().sum();
                ensure(close(m, 1.0), || format!("unicast mass {m}\n{}", g.text))?;
            }
        }
    }
    Ok(())
}

fn output_rates(def: &ModelDefinition, state: &ModelComponent, i: usize, label: &str, uni: bool) -> (f64, LocSet) {
    let mut total = 0.0;
    let mut range = LocSet::new();
    for (p, _) in alternatives(def, &state.0[i].term) {
        match p {
            Prefix::UnicastOut { label: l, rate, range: r } if uni && l.as_str() == label => {
                total += rate;
                range.extend(r);
            }
            Prefix::BroadcastOut { label: l, rate, .. } if !uni && l.as_str() == label => total += rate,
            _ => {}
        }
    }
    (total, range)
}

fn fired(def: &ModelDefinition, state: &ModelComponent, i: usize, label: &str, kind: StochKind) -> f64 {
    stoch_step(def, state)
        .iter()
        .filter(|t| t.initiator == i && t.label.kind == kind && t.label.label.as_str() == label)
        .map(|t| t.total_rate())
        .sum()
}

/// A unicast sender fires at its full rate iff an eligible receiver exists.
pub fn unicast_sender_rate(seed: u64) -> Check {
    let g = random_model(seed);
    let def = &g.def;
    for state in reachable(def) {
        for label in labels(def) {
            for i in 0..state.len() {
                let (r, range) = output_rates(def, &state, i, &label, true);
                if r == 0.0 {
                    continue;
                }
                let eligible = state.iter().enumerate().any(|(j, s)| {
                    j != i
                        && range.contains(&s.loc)
                        && alternatives(def, &s.term).iter().any(
                            |(p, _)| matches!(p, Prefix::UnicastIn { label: l, .. } if l.as_str() == label),
                        )
                });
                let expected = if eligible { r } else { 0.0 };
                let got = fired(def, &state, i, &label, StochKind::Unicast);
                ensure(close(got, expected), || {
                    format!("unicast {label} from {i}: {got} vs {expected}\n{}", g.text)
                })?;
            }
        }
    }
    Ok(())
}

/// A broadcast sender fires at its full rate with or without receivers.
pub fn broadcast_sender_rate(seed: u64) -> Check {
    let g = random_model(seed);
    let def = &g.def;
    for state in reachable(def) {
        for label in labels(def) {
            for i in 0..state.len() {
                let (r, _) = output_rates(def, &state, i, &label, false);
                let got = fired(def, &state, i, &label, StochKind::Broadcast);
                let alone = ModelComponent(vec![state.0[i].clone()]);
                let got_alone = fired(def, &alone, 0, &label, StochKind::Broadcast);
                ensure(close(got, r) && close(got_alone, r), || {
                    format!("broadcast {label} from {i}: {got}, alone {got_alone}, expected {r}\n{}", g.text)
                })?;
            }
        }
    }
    Ok(())
}

/// `R_a(L₁ ∪ L₂) = R_a(L₁) + R_a(L₂)` for a random split of the locations.
pub fn exit_rate_additivity(seed: u64) -> Check {
    let g = random_model(seed);
    let def = &g.def;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let states = reachable(def);
    let ctx_pick = rng.gen_range(0..states.len());
    for state in &states {
        let ctx = if rng.gen_bool(0.3) { states[ctx_pick].clone() } else { ModelComponent::empty() };
        for a in def.actions() {
            let (mut l1, mut l2) = (LocSet::new(), LocSet::new());
            for l in def.all_locations() {
                if rng.gen_bool(0.5) {
                    l1.insert(l);
                } else {
                    l2.insert(l);
                }
            }
            let union: LocSet = l1.union(&l2).copied().collect();
            let x = exit_rate_in(def, &a, Some(&l1), &ctx, state);
            let y = exit_rate_in(def, &a, Some(&l2), &ctx, state);
            let z = exit_rate_in(def, &a, Some(&union), &ctx, state);
            let whole = exit_rate_model(def, &a, &ctx, state);
            ensure(close(x + y, z) && close(z, whole), || {
                format!("{a}: {x} + {y} vs {z} vs {whole}\n{}", g.text)
            })?;
        }
    }
    Ok(())
}

/// Receiver selection probabilities over the eligible receivers sum to 1.
pub fn receiver_probabilities(seed: u64) -> Check {
    let g = random_model(seed);
    let def = &g.def;
    for state in reachable(def) {
        for label in labels(def) {
            for i in 0..state.len() {
                let (r, range) = output_rates(def, &state, i, &label, true);
                if r == 0.0 {
                    continue;
                }
                let mut sum = 0.0;
                let mut any = false;
                for (j, s) in state.iter().enumerate() {
                    let eligible = j != i
                        && range.contains(&s.loc)
                        && alternatives(def, &s.term).iter().any(
                            |(p, _)| matches!(p, Prefix::UnicastIn { label: l, .. } if l.as_str() == label),
                        );
                    if eligible {
                        any = true;
                        let others: ModelComponent = state
                            .iter()
                            .enumerate()
                            .filter(|&(k, _)| k != j)
                            .map(|(_, t)| t.clone())
                            .collect();
                        sum += p_uni_recv(def, s, &others, &state.0[i], &label);
                    }
                }
                if any {
                    ensure(close(sum, 1.0), || format!("receiver shares sum to {sum}\n{}", g.text))?;
                }
            }
        }
    }
    Ok(())
}

fn random_isometry(rng: &mut ChaCha8Rng) -> Isometry {
    let angle = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let base = if rng.gen_bool(0.5) {
        Isometry::rotation(angle)
    } else {
        Isometry::reflection(angle)
    };
    Isometry::translation(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)).compose(&base)
}

fn random_point(rng: &mut ChaCha8Rng) -> Point {
    Point::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0))
}

/// Composition, inversion and distance preservation.
pub fn isometry_laws(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_isometry(&mut rng);
    let g = random_isometry(&mut rng);
    let (x, y) = (random_point(&mut rng), random_point(&mut rng));
    let fg = f.compose(&g);
    let direct = f.apply(g.apply(x));
    ensure(fg.apply(x).distance(&direct) <= TOL, || format!("composition {f} {g}"))?;
    ensure(f.compose(&f.invert()).approx_eq(&Isometry::identity(), TOL), || format!("inverse {f}"))?;
    ensure(f.invert().compose(&f).approx_eq(&Isometry::identity(), TOL), || format!("inverse {f}"))?;
    ensure((f.apply(x).distance(&f.apply(y)) - x.distance(&y)).abs() <= TOL, || format!("distance {f}"))?;
    ensure((fg.det() - f.det() * g.det()).abs() <= TOL, || format!("determinant {f} {g}"))?;
    ensure(Isometry::new(fg.linear, fg.offset).is_ok(), || format!("orthogonality {fg}"))
}

/// On models with at most six states, the rate each agent's actions
/// contribute to the CTMC equals the context-aware exit rate at its location.
/// Returns `Ok(false)` when the drawn model is too large to count.
pub fn rate_consistency(seed: u64) -> Result<bool, String> {
    let g = random_model(seed);
    let def = &g.def;
    let Some(chain) = oracle::explore(def, def.system("Main").unwrap(), 6) else {
        return Ok(false);
    };
    for (s, comps) in chain.states.iter().enumerate() {
        let state = ModelComponent(comps.clone());
        for a in def.actions() {
            for l in 0..def.locations.len() {
                let loc = LocId(l);
                let from_ctmc: f64 = chain
                    .edges
                    .iter()
                    .filter(|e| e.src == s)
                    .map(|e| {
                        e.roles
                            .iter()
                            .filter(|(who, act)| *act == a && comps[*who].loc == loc)
                            .count() as f64
                            * e.rate
                    })
                    .sum();
                let r = exit_rate_in(def, &a, Some(&[loc].into()), &ModelComponent::empty(), &state);
                ensure(close(from_ctmc, r), || {
                    format!("state {s}, {a} at l{l}: ctmc {from_ctmc} vs R {r}\n{}", g.text)
                })?;
            }
        }
    }
    Ok(true)
}

/// Draws seeds until `n` models small enough for [`rate_consistency`] have
/// been checked.
pub fn rate_consistency_cases(first_seed: u64, n: usize) -> Check {
    let mut done = 0;
    let mut seed = first_seed;
    while done < n {
        if rate_consistency(seed)? {
            done += 1;
        }
        seed += 1;
    }
    Ok(())
}
