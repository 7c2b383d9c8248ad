//! Seeded random models: at most 3 agents, 2 locations and 2 labels.

use std::fmt::Write;

use paloma::model::ModelDefinition;
use paloma::parser::load;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NAMES: [&str; 3] = ["A", "B", "C"];
const LABELS: [&str; 2] = ["a", "b"];

pub struct Generated {
    pub text: String,
    pub def: ModelDefinition,
}

fn prob(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..6) {
        0 => "0".into(),
        1 => "1".into(),
        _ => format!("{:.2}", rng.gen_range(0.05..0.95)),
    }
}

fn positive(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> String {
    format!("{:.2}", rng.gen_range(lo..hi))
}

fn range(rng: &mut ChaCha8Rng, locs: &[String]) -> String {
    if rng.gen_bool(0.3) {
        return "all".into();
    }
    let mut picked: Vec<&String> = locs.iter().filter(|_| rng.gen_bool(0.6)).collect();
    if picked.is_empty() {
        picked.push(locs.choose(rng).unwrap());
    }
    picked.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
}

fn text(rng: &mut ChaCha8Rng) -> String {
    let nlocs = rng.gen_range(1..=2);
    let locs: Vec<String> = (0..nlocs).map(|i| format!("l{i}")).collect();
    let labels = &LABELS[..rng.gen_range(1..=2)];
    let mut out = String::new();
    for (i, l) in locs.iter().enumerate() {
        let _ = writeln!(out, "location {l} = ({}, {});", i as f64 * 1.5, rng.gen_range(-2..=2));
    }
    // One unicast range per label keeps every !!α alternative of an agent on
    // the same range.
    let uni_range: Vec<String> = labels.iter().map(|_| range(rng, &locs)).collect();
    for name in NAMES {
        for loc in &locs {
            let mut inputs: Vec<(u8, usize)> = Vec::new();
            let mut summands = Vec::new();
            for _ in 0..rng.gen_range(1..=3) {
                let li = rng.gen_range(0..labels.len());
                let label = labels[li];
                let next = format!("{}({})", NAMES.choose(rng).unwrap(), locs.choose(rng).unwrap());
                let kind = rng.gen_range(0u8..5);
                if kind >= 3 && inputs.contains(&(kind, li)) {
                    continue;
                }
                let prefix = match kind {
                    0 => format!("({label}, {})", positive(rng, 0.1, 5.0)),
                    1 => format!("!({label}, {})@Ir{{{}}}", positive(rng, 0.1, 5.0), range(rng, &locs)),
                    2 => format!("!!({label}, {})@Ir{{{}}}", positive(rng, 0.1, 5.0), uni_range[li]),
                    3 => format!("?({label}, {})@Prob{{{}}}", prob(rng), prob(rng)),
                    _ => format!("??({label}, {})@Wt{{{}}}", prob(rng), positive(rng, 0.1, 3.0)),
                };
                if kind >= 3 {
                    inputs.push((kind, li));
                }
                summands.push(format!("{prefix}.{next}"));
            }
            let _ = writeln!(out, "{name}({loc}) := {};", summands.join(" + "));
        }
    }
    let mut agents = Vec::new();
    for _ in 0..*[1, 2, 2, 3, 3].choose(rng).unwrap() {
        let loc = locs.choose(rng).unwrap();
        let a = NAMES.choose(rng).unwrap();
        if rng.gen_bool(0.15) {
            let b = NAMES.choose(rng).unwrap();
            agents.push(format!("{a}({loc}) + {b}({loc})"));
        } else {
            agents.push(format!("{a}({loc})"));
        }
    }
    let _ = writeln!(out, "system Main := {};", agents.join(" || "));
    out
}

/// A valid random model with a system named `Main`. Candidates failing
/// validation are discarded and redrawn from the same stream.
pub fn random_model(seed: u64) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let text = text(&mut rng);
        if let Ok((def, _)) = load(&text) {
            return Generated { text, def };
        }
    }
}
