//! Abstract syntax of located agents.
//!
//! A [`SeqComponent`] is a single agent term pinned to a location; a
//! [`ModelComponent`] is an ordered parallel composition of agents. Terms only
//! refer to locations through [`LocId`] handles, so every operation that needs
//! names or coordinates goes through the owning [`ModelDefinition`].

use std::borrow::Borrow;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::error::Error;

/// Interned identifier (constant, label, location, parameter or system name).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ident(Arc<str>);

impl Ident {
    pub fn new(s: &str) -> Self {
        Ident(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Self {
        Ident::new(s)
    }
}

impl Borrow<str> for Ident {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// Index of a declared location in [`ModelDefinition::locations`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocId(pub usize);

/// A set of locations, e.g. an influence range.
pub type LocSet = BTreeSet<LocId>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A named point of the plane. Names identify locations; coordinates are only
/// consulted by the isometry machinery.
#[derive(Clone, Debug, PartialEq)]
pub struct Location {
    pub name: Ident,
    pub point: Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionType {
    Spontaneous,
    BroadcastOut,
    BroadcastIn,
    UnicastOut,
    UnicastIn,
}

impl ActionType {
    pub const ALL: [ActionType; 5] = [
        ActionType::Spontaneous,
        ActionType::BroadcastOut,
        ActionType::BroadcastIn,
        ActionType::UnicastOut,
        ActionType::UnicastIn,
    ];

    pub fn glyph(self) -> &'static str {
        match self {
            ActionType::Spontaneous => "",
            ActionType::BroadcastOut => "!",
            ActionType::BroadcastIn => "?",
            ActionType::UnicastOut => "!!",
            ActionType::UnicastIn => "??",
        }
    }
}

/// An element of `Type × Lab`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId {
    pub kind: ActionType,
    pub label: Ident,
}

impl ActionId {
    pub fn new(kind: ActionType, label: &str) -> Self {
        ActionId {
            kind,
            label: Ident::new(label),
        }
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.glyph(), self.label)
    }
}

impl FromStr for ActionId {
    type Err = Error;

    /// Parses the glyph notation: `!!m`, `??m`, `!m`, `?m` or a bare `m`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (kind, rest) = if let Some(rest) = s.strip_prefix("!!") {
            (ActionType::UnicastOut, rest)
        } else if let Some(rest) = s.strip_prefix("??") {
            (ActionType::UnicastIn, rest)
        } else if let Some(rest) = s.strip_prefix('!') {
            (ActionType::BroadcastOut, rest)
        } else if let Some(rest) = s.strip_prefix('?') {
            (ActionType::BroadcastIn, rest)
        } else {
            (ActionType::Spontaneous, s)
        };
        let valid = rest
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && rest.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
        if !valid {
            return Err(Error::BadAction(s.to_string()));
        }
        Ok(ActionId::new(kind, rest))
    }
}

/// Action prefix `π`.
#[derive(Clone, Debug)]
pub enum Prefix {
    /// `!!(α, r)@Ir{ℓ⃗}`
    UnicastOut { label: Ident, rate: f64, range: LocSet },
    /// `??(α, p)@Wt{w}`
    UnicastIn { label: Ident, act_prob: f64, weight: f64 },
    /// `!(α, r)@Ir{ℓ⃗}`
    BroadcastOut { label: Ident, rate: f64, range: LocSet },
    /// `?(α, p)@Prob{q}`
    BroadcastIn { label: Ident, act_prob: f64, recv_prob: f64 },
    /// `(α, r)`
    Spontaneous { label: Ident, rate: f64 },
}

impl Prefix {
    pub fn label(&self) -> &Ident {
        match self {
            Prefix::UnicastOut { label, .. }
            | Prefix::UnicastIn { label, .. }
            | Prefix::BroadcastOut { label, .. }
            | Prefix::BroadcastIn { label, .. }
            | Prefix::Spontaneous { label, .. } => label,
        }
    }

    pub fn action_type(&self) -> ActionType {
        match self {
            Prefix::UnicastOut { .. } => ActionType::UnicastOut,
            Prefix::UnicastIn { .. } => ActionType::UnicastIn,
            Prefix::BroadcastOut { .. } => ActionType::BroadcastOut,
            Prefix::BroadcastIn { .. } => ActionType::BroadcastIn,
            Prefix::Spontaneous { .. } => ActionType::Spontaneous,
        }
    }

    pub fn action(&self) -> ActionId {
        ActionId {
            kind: self.action_type(),
            label: self.label().clone(),
        }
    }

    fn numbers(&self) -> [f64; 2] {
        match self {
            Prefix::UnicastOut { rate, .. }
            | Prefix::BroadcastOut { rate, .. }
            | Prefix::Spontaneous { rate, .. } => [*rate, 0.0],
            Prefix::UnicastIn {
                act_prob, weight, ..
            } => [*act_prob, *weight],
            Prefix::BroadcastIn {
                act_prob,
                recv_prob,
                ..
            } => [*act_prob, *recv_prob],
        }
    }

    fn range(&self) -> Option<&LocSet> {
        match self {
            Prefix::UnicastOut { range, .. } | Prefix::BroadcastOut { range, .. } => Some(range),
            _ => None,
        }
    }
}

// Numbers are compared by value with -0.0 folded onto 0.0 so that Eq and Hash
// agree; NaN never survives elaboration.
fn num_key(x: f64) -> u64 {
    (x + 0.0).to_bits()
}

impl PartialEq for Prefix {
    fn eq(&self, other: &Self) -> bool {
        self.action_type() == other.action_type()
            && self.label() == other.label()
            && self.numbers().map(num_key) == other.numbers().map(num_key)
            && self.range() == other.range()
    }
}

impl Eq for Prefix {}

impl Hash for Prefix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.action_type().hash(state);
        self.label().hash(state);
        self.numbers().map(num_key).hash(state);
        self.range().hash(state);
    }
}

/// Reference to a constant defined at a concrete location, `C(ℓ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstRef {
    pub name: Ident,
    pub loc: LocId,
}

impl ConstRef {
    pub fn new(name: &str, loc: LocId) -> Self {
        ConstRef {
            name: Ident::new(name),
            loc,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    /// `π.S'(ℓ')`
    Prefix(Prefix, ConstRef),
    /// `S₁ + S₂`
    Choice(Box<Term>, Box<Term>),
    Const(ConstRef),
}

impl Term {
    pub fn choice(left: Term, right: Term) -> Term {
        Term::Choice(Box::new(left), Box::new(right))
    }
}

/// A located agent `S(ℓ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeqComponent {
    pub term: Term,
    pub loc: LocId,
}

impl SeqComponent {
    pub fn new(term: Term, loc: LocId) -> Self {
        SeqComponent { term, loc }
    }

    pub fn constant(c: ConstRef) -> Self {
        let loc = c.loc;
        SeqComponent {
            term: Term::Const(c),
            loc,
        }
    }
}

/// Ordered parallel composition; the empty composition is the empty context.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ModelComponent(pub Vec<SeqComponent>);

impl ModelComponent {
    pub fn empty() -> Self {
        ModelComponent(Vec::new())
    }

    pub fn components(&self) -> &[SeqComponent] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SeqComponent> {
        self.0.iter()
    }

    /// `self ∥ other`, keeping operand order.
    pub fn par(&self, other: &ModelComponent) -> ModelComponent {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        ModelComponent(v)
    }

    /// `Π_Loc`: the locations spanned by the composition.
    pub fn locations(&self) -> LocSet {
        self.0.iter().map(|s| s.loc).collect()
    }

    /// `seq(P, L)`: components located in `locs`, in composition order.
    pub fn seq_in(&self, locs: &LocSet) -> Vec<&SeqComponent> {
        self.0.iter().filter(|s| locs.contains(&s.loc)).collect()
    }

    /// `P \ Sᵢ`: positional removal.
    pub fn remove_at(&self, index: usize) -> Result<ModelComponent, Error> {
        if index >= self.0.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.0.len(),
            });
        }
        let mut v = self.0.clone();
        v.remove(index);
        Ok(ModelComponent(v))
    }

    pub fn insert_at(&self, index: usize, s: SeqComponent) -> Result<ModelComponent, Error> {
        if index > self.0.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.0.len(),
            });
        }
        let mut v = self.0.clone();
        v.insert(index, s);
        Ok(ModelComponent(v))
    }
}

impl From<Vec<SeqComponent>> for ModelComponent {
    fn from(v: Vec<SeqComponent>) -> Self {
        ModelComponent(v)
    }
}

impl FromIterator<SeqComponent> for ModelComponent {
    fn from_iter<I: IntoIterator<Item = SeqComponent>>(iter: I) -> Self {
        ModelComponent(iter.into_iter().collect())
    }
}

/// `Π_Loc` on a model component.
pub fn locations_of(p: &ModelComponent) -> LocSet {
    p.locations()
}

/// `seq(P, L)`.
pub fn seq_in<'a>(p: &'a ModelComponent, locs: &LocSet) -> Vec<&'a SeqComponent> {
    p.seq_in(locs)
}

/// Line/column of a declaration in its source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

/// Source positions of declarations. Positions are metadata: two source maps
/// always compare equal so that definitions compare structurally.
#[derive(Clone, Debug, Default)]
pub struct SourceMap {
    pub equations: IndexMap<ConstRef, Pos>,
    pub systems: IndexMap<Ident, Pos>,
    pub locations: IndexMap<Ident, Pos>,
}

impl PartialEq for SourceMap {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

/// One prefix-guarded alternative of a sequential term, after flattening
/// choices and unfolding constants in choice position.
#[derive(Clone, Copy, Debug)]
pub struct Summand<'a> {
    pub prefix: &'a Prefix,
    pub next: &'a ConstRef,
}

/// An elaborated model: parameters already substituted into terms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelDefinition {
    pub params: IndexMap<Ident, f64>,
    pub locations: Vec<Location>,
    pub equations: IndexMap<ConstRef, Term>,
    pub systems: IndexMap<Ident, ModelComponent>,
    pub source_map: SourceMap,
}

impl ModelDefinition {
    pub fn location(&self, id: LocId) -> &Location {
        &self.locations[id.0]
    }

    pub fn loc_name(&self, id: LocId) -> &str {
        self.locations
            .get(id.0)
            .map(|l| l.name.as_str())
            .unwrap_or("?")
    }

    pub fn loc_by_name(&self, name: &str) -> Option<LocId> {
        self.locations
            .iter()
            .position(|l| l.name.as_str() == name)
            .map(LocId)
    }

    pub fn all_locations(&self) -> LocSet {
        (0..self.locations.len()).map(LocId).collect()
    }

    pub fn equation(&self, c: &ConstRef) -> Option<&Term> {
        self.equations.get(c)
    }

    pub fn system(&self, name: &str) -> Option<&ModelComponent> {
        self.systems.get(name)
    }

    /// Every action label used by some prefix, sorted.
    pub fn labels(&self) -> BTreeSet<Ident> {
        fn walk(t: &Term, out: &mut BTreeSet<Ident>) {
            match t {
                Term::Prefix(p, _) => {
                    out.insert(p.label().clone());
                }
                Term::Choice(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                Term::Const(_) => {}
            }
        }
        let mut out = BTreeSet::new();
        for t in self.equations.values() {
            walk(t, &mut out);
        }
        for sys in self.systems.values() {
            for s in sys.iter() {
                walk(&s.term, &mut out);
            }
        }
        out
    }

    /// All of `Type × Lab` for the labels of this model.
    pub fn actions(&self) -> Vec<ActionId> {
        let labels = self.labels();
        let mut out = Vec::with_capacity(labels.len() * 5);
        for l in &labels {
            for kind in ActionType::ALL {
                out.push(ActionId {
                    kind,
                    label: l.clone(),
                });
            }
        }
        out
    }

    /// Flattens choices and unfolds constants in choice position (Choice and
    /// Constant rules). Dangling or unguarded constants contribute nothing.
    pub fn summands<'a>(&'a self, term: &'a Term) -> Vec<Summand<'a>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_summands(term, &mut path, &mut out);
        out
    }

    fn collect_summands<'a>(
        &'a self,
        term: &'a Term,
        path: &mut Vec<&'a ConstRef>,
        out: &mut Vec<Summand<'a>>,
    ) {
        match term {
            Term::Prefix(prefix, next) => out.push(Summand { prefix, next }),
            Term::Choice(l, r) => {
                self.collect_summands(l, path, out);
                self.collect_summands(r, path, out);
            }
            Term::Const(c) => {
                if path.contains(&c) {
                    return;
                }
                if let Some(body) = self.equations.get(c) {
                    path.push(c);
                    self.collect_summands(body, path, out);
                    path.pop();
                }
            }
        }
    }

    /// Unfolds top-level constants until the term is not a bare constant.
    fn unfold_top<'a>(&'a self, mut term: &'a Term) -> &'a Term {
        let mut steps = 0;
        while let Term::Const(c) = term {
            match self.equations.get(c) {
                Some(body) if steps <= self.equations.len() => {
                    term = body;
                    steps += 1;
                }
                _ => break,
            }
        }
        term
    }

    /// Canonical representative of a sequential component under `≡`: the
    /// first declared constant at the same location whose body matches, or
    /// the unfolded term itself.
    pub fn canonical_seq(&self, s: &SeqComponent) -> SeqComponent {
        let body = self.unfold_top(&s.term);
        if let Term::Const(_) = body {
            return SeqComponent::new(body.clone(), s.loc);
        }
        for (c, t) in &self.equations {
            if c.loc == s.loc && self.unfold_top(t) == body {
                return SeqComponent::constant(c.clone());
            }
        }
        SeqComponent::new(body.clone(), s.loc)
    }

    pub fn canonical(&self, p: &ModelComponent) -> ModelComponent {
        p.iter().map(|s| self.canonical_seq(s)).collect()
    }

    /// `P ≡ Q`: position-wise equality after top-level constant resolution.
    pub fn struct_equiv(&self, p: &ModelComponent, q: &ModelComponent) -> bool {
        p.len() == q.len()
            && p.iter()
                .zip(q.iter())
                .all(|(a, b)| a.loc == b.loc && self.unfold_top(&a.term) == self.unfold_top(&b.term))
    }
}
