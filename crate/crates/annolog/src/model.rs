//! The knowledge graph, predicate registry, interpretation store and facts.
//!
//! Constants are graph nodes; binary predicates label edges, unary predicates
//! label nodes. The reserved binary predicate `rel` is implied by edge
//! existence and never stored: `rel(a,b)` reads as `[1,1]` (static) for
//! `(a,b) ∈ E` and as `[0,1]` otherwise.

use std::collections::{HashMap, HashSet};

use indexmap::IndexSet;
use thiserror::Error;

use crate::lattice::{AnnotationError, Interval};

/// Reserved binary predicate implied by edge existence.
pub const REL: &str = "rel";

pub type NodeId = u32;
pub type PredId = u32;

/// A graph element carrying interpretations: a node or a directed edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Node(NodeId),
    Edge(NodeId, NodeId),
}

/// A ground atom key in the interpretation store.
pub type AtomKey = (Element, PredId);

/// An element referenced by name, before resolution against a graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ElementRef {
    Node(String),
    Edge(String, String),
}

impl std::fmt::Display for ElementRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ElementRef::Node(n) => write!(f, "{n}"),
            ElementRef::Edge(a, b) => write!(f, "({a};{b})"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("graph parse error: {0}")]
    Parse(String),
    #[error("edge ({0}, {1}) references an undeclared node")]
    DanglingEdge(String, String),
    #[error("bad annotation on {element}: key {key} = {value} (bounds must lie in [0,1])")]
    BadAnnotation {
        element: String,
        key: String,
        value: String,
    },
    #[error("duplicate node id {0}")]
    DuplicateNode(String),
    #[error("type constraint on {predicate} references undeclared type {type_name}")]
    UnknownType {
        predicate: String,
        type_name: String,
    },
    #[error("unknown or type-incompatible atom {predicate}({element})")]
    UnknownAtom { element: String, predicate: String },
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("predicate {0} declared with conflicting arity")]
    ArityClash(String),
    #[error("complement pair ({0}, {1}) listed twice")]
    DuplicateComplementPair(String, String),
    #[error("fact {fact}: {detail}")]
    RangeError { fact: String, detail: String },
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
}

/// Directed knowledge graph with initial attribute annotations.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    constants: IndexSet<String>,
    edges: IndexSet<(NodeId, NodeId)>,
    out_edges: Vec<Vec<NodeId>>,
    in_edges: Vec<Vec<NodeId>>,
    node_types: HashMap<NodeId, String>,
    node_attrs: Vec<(NodeId, String, Interval)>,
    edge_attrs: Vec<((NodeId, NodeId), String, Interval)>,
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a node; errors on duplicates.
    pub fn add_node(&mut self, name: &str, node_type: Option<&str>) -> Result<NodeId, ModelError> {
        let (idx, fresh) = self.constants.insert_full(name.to_string());
        if !fresh {
            return Err(ModelError::DuplicateNode(name.to_string()));
        }
        self.out_edges.push(Vec::new());
        self.in_edges.push(Vec::new());
        let id = idx as NodeId;
        if let Some(t) = node_type {
            self.node_types.insert(id, t.to_string());
        }
        Ok(id)
    }

    /// Adds a directed edge between existing nodes. Re-adding an edge is a
    /// no-op (E is a set).
    pub fn add_edge(&mut self, src: &str, dst: &str) -> Result<(), ModelError> {
        let (Some(a), Some(b)) = (self.node_id(src), self.node_id(dst)) else {
            return Err(ModelError::DanglingEdge(src.to_string(), dst.to_string()));
        };
        if self.edges.insert((a, b)) {
            self.out_edges[a as usize].push(b);
            self.in_edges[b as usize].push(a);
        }
        Ok(())
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.constants.get_index_of(name).map(|i| i as NodeId)
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        self.constants.get_index(id as usize).expect("node id in range")
    }

    pub fn node_type(&self, id: NodeId) -> Option<&str> {
        self.node_types.get(&id).map(|s| s.as_str())
    }

    pub fn node_count(&self) -> usize {
        self.constants.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.edges.contains(&(a, b))
    }

    /// Node ids in insertion order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.constants.len()).map(|i| i as NodeId)
    }

    /// Edges in insertion order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn successors(&self, id: NodeId) -> &[NodeId] {
        &self.out_edges[id as usize]
    }

    pub fn predecessors(&self, id: NodeId) -> &[NodeId] {
        &self.in_edges[id as usize]
    }

    pub fn set_node_attr(&mut self, id: NodeId, key: &str, value: Interval) {
        self.node_attrs.push((id, key.to_string(), value));
    }

    pub fn set_edge_attr(&mut self, edge: (NodeId, NodeId), key: &str, value: Interval) {
        self.edge_attrs.push((edge, key.to_string(), value));
    }

    pub fn node_attrs(&self) -> &[(NodeId, String, Interval)] {
        &self.node_attrs
    }

    pub fn edge_attrs(&self) -> &[((NodeId, NodeId), String, Interval)] {
        &self.edge_attrs
    }

    /// The set of type tags present on nodes.
    pub fn declared_types(&self) -> HashSet<&str> {
        self.node_types.values().map(|s| s.as_str()).collect()
    }

    pub fn display_element(&self, el: Element) -> String {
        match el {
            Element::Node(n) => self.node_name(n).to_string(),
            Element::Edge(a, b) => format!("({};{})", self.node_name(a), self.node_name(b)),
        }
    }
}

/// Allowed constant types for a predicate's argument positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeConstraint {
    Unary(String),
    Binary(String, String),
}

/// Declared predicates, their arities, static flags, type constraints and the
/// inconsistent-predicate list (IPL).
#[derive(Debug, Clone)]
pub struct PredicateRegistry {
    preds: IndexSet<String>,
    unary: HashSet<PredId>,
    binary: HashSet<PredId>,
    statics: HashSet<PredId>,
    constraints: HashMap<PredId, TypeConstraint>,
    ipl: Vec<(PredId, PredId)>,
    rel_id: PredId,
}

impl Default for PredicateRegistry {
    fn default() -> Self {
        Self::new()
    }
}

impl PredicateRegistry {
    /// An empty registry; `rel` is pre-registered as a static binary.
    pub fn new() -> Self {
        let mut preds = IndexSet::new();
        let (rel_idx, _) = preds.insert_full(REL.to_string());
        let rel_id = rel_idx as PredId;
        Self {
            preds,
            unary: HashSet::new(),
            binary: HashSet::from([rel_id]),
            statics: HashSet::from([rel_id]),
            constraints: HashMap::new(),
            ipl: Vec::new(),
            rel_id,
        }
    }

    pub fn rel(&self) -> PredId {
        self.rel_id
    }

    pub fn declare_unary(
        &mut self,
        name: &str,
        constraint: Option<&str>,
    ) -> Result<PredId, ModelError> {
        if name == REL {
            return Err(ModelError::ArityClash(name.to_string()));
        }
        let (idx, fresh) = self.preds.insert_full(name.to_string());
        let id = idx as PredId;
        if !fresh && !self.unary.contains(&id) {
            return Err(ModelError::ArityClash(name.to_string()));
        }
        self.unary.insert(id);
        if let Some(t) = constraint {
            self.constraints.insert(id, TypeConstraint::Unary(t.to_string()));
        }
        Ok(id)
    }

    pub fn declare_binary(
        &mut self,
        name: &str,
        constraint: Option<(&str, &str)>,
    ) -> Result<PredId, ModelError> {
        if name == REL {
            return Err(ModelError::ArityClash(name.to_string()));
        }
        let (idx, fresh) = self.preds.insert_full(name.to_string());
        let id = idx as PredId;
        if !fresh && !self.binary.contains(&id) {
            return Err(ModelError::ArityClash(name.to_string()));
        }
        self.binary.insert(id);
        if let Some((a, b)) = constraint {
            self.constraints
                .insert(id, TypeConstraint::Binary(a.to_string(), b.to_string()));
        }
        Ok(id)
    }

    pub fn mark_static(&mut self, name: &str) -> Result<(), ModelError> {
        let id = self
            .pred_id(name)
            .ok_or_else(|| ModelError::UnknownPredicate(name.to_string()))?;
        self.statics.insert(id);
        Ok(())
    }

    /// Registers a complement pair; rejects duplicates in either order.
    pub fn add_complement_pair(&mut self, a: &str, b: &str) -> Result<(), ModelError> {
        let ia = self
            .pred_id(a)
            .ok_or_else(|| ModelError::UnknownPredicate(a.to_string()))?;
        let ib = self
            .pred_id(b)
            .ok_or_else(|| ModelError::UnknownPredicate(b.to_string()))?;
        if self.ipl.iter().any(|&(x, y)| (x, y) == (ia, ib) || (x, y) == (ib, ia)) {
            return Err(ModelError::DuplicateComplementPair(a.to_string(), b.to_string()));
        }
        self.ipl.push((ia, ib));
        Ok(())
    }

    pub fn pred_id(&self, name: &str) -> Option<PredId> {
        self.preds.get_index_of(name).map(|i| i as PredId)
    }

    pub fn pred_name(&self, id: PredId) -> &str {
        self.preds.get_index(id as usize).expect("pred id in range")
    }

    pub fn is_unary(&self, id: PredId) -> bool {
        self.unary.contains(&id)
    }

    pub fn is_binary(&self, id: PredId) -> bool {
        self.binary.contains(&id)
    }

    pub fn is_static(&self, id: PredId) -> bool {
        self.statics.contains(&id)
    }

    pub fn constraint(&self, id: PredId) -> Option<&TypeConstraint> {
        self.constraints.get(&id)
    }

    pub fn has_constraints(&self) -> bool {
        !self.constraints.is_empty()
    }

    /// Declared unary predicates in declaration order.
    pub fn unary_preds(&self) -> Vec<PredId> {
        let mut v: Vec<PredId> = self.unary.iter().copied().collect();
        v.sort_unstable();
        v
    }

    /// Declared binary predicates in declaration order, excluding `rel`.
    pub fn binary_preds(&self) -> Vec<PredId> {
        let mut v: Vec<PredId> = self
            .binary
            .iter()
            .copied()
            .filter(|&p| p != self.rel_id)
            .collect();
        v.sort_unstable();
        v
    }

    /// IPL partners of a predicate.
    pub fn complements(&self, id: PredId) -> Vec<PredId> {
        self.ipl
            .iter()
            .filter_map(|&(a, b)| {
                if a == id {
                    Some(b)
                } else if b == id {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn complement_pairs(&self) -> &[(PredId, PredId)] {
        &self.ipl
    }

    /// Whether `pred` may label `el` given the type constraints. Untyped
    /// nodes pass every constraint (enforcement is disabled for them).
    pub fn compatible(&self, graph: &KnowledgeGraph, el: Element, pred: PredId) -> bool {
        match (el, self.constraint(pred)) {
            (Element::Node(_), None) => self.is_unary(pred),
            (Element::Edge(..), None) => self.is_binary(pred),
            (Element::Node(n), Some(TypeConstraint::Unary(t))) => {
                graph.node_type(n).map(|nt| nt == t).unwrap_or(true)
            }
            (Element::Edge(a, b), Some(TypeConstraint::Binary(ta, tb))) => {
                graph.node_type(a).map(|t| t == ta).unwrap_or(true)
                    && graph.node_type(b).map(|t| t == tb).unwrap_or(true)
            }
            _ => false,
        }
    }
}

/// Stored state of one ground atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomState {
    pub bound: Interval,
    /// Frozen atoms keep their bound for the rest of the run: static facts,
    /// atoms of static predicates after first assignment, and resolved
    /// inconsistencies.
    pub frozen: bool,
}

/// The interpretation store at the current timestep.
#[derive(Debug, Clone)]
pub struct World {
    entries: HashMap<AtomKey, AtomState>,
    by_pred: HashMap<PredId, Vec<Element>>,
    pub current_time: usize,
}

impl World {
    pub fn get(&self, key: &AtomKey) -> Option<&AtomState> {
        self.entries.get(key)
    }

    pub fn contains(&self, key: &AtomKey) -> bool {
        self.entries.contains_key(key)
    }

    /// Overwrites an atom's state. The key must exist.
    pub fn set(&mut self, key: AtomKey, bound: Interval, frozen: bool) {
        let st = self.entries.get_mut(&key).expect("atom key exists");
        st.bound = bound;
        st.frozen = frozen;
    }

    /// Number of ground atom slots (the virtual `rel` tautologies are not
    /// stored and not counted).
    pub fn slot_count(&self) -> usize {
        self.entries.len()
    }

    /// Type-compatible elements for a predicate, in graph order.
    pub fn elements_of(&self, pred: PredId) -> &[Element] {
        self.by_pred.get(&pred).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Resets every non-frozen atom to `[0,1]`.
    pub fn reset_non_frozen(&mut self) {
        for st in self.entries.values_mut() {
            if !st.frozen {
                st.bound = Interval::bottom();
            }
        }
    }

    /// Deterministic snapshot of the store, sorted by key.
    pub fn snapshot(&self) -> Vec<(AtomKey, Interval, bool)> {
        let mut v: Vec<_> = self
            .entries
            .iter()
            .map(|(k, st)| (*k, st.bound, st.frozen))
            .collect();
        v.sort_by_key(|(k, _, _)| *k);
        v
    }
}

/// Builds the open-world interpretation store: exactly the type-compatible
/// (element, predicate) slots, all at `[0,1]` and unfrozen.
pub fn init_world(
    graph: &KnowledgeGraph,
    registry: &PredicateRegistry,
) -> Result<World, ModelError> {
    if registry.has_constraints() {
        let declared = graph.declared_types();
        for (&pred, c) in registry.constraints.iter() {
            let mentioned: Vec<&str> = match c {
                TypeConstraint::Unary(t) => vec![t.as_str()],
                TypeConstraint::Binary(a, b) => vec![a.as_str(), b.as_str()],
            };
            for t in mentioned {
                if !declared.contains(t) {
                    return Err(ModelError::UnknownType {
                        predicate: registry.pred_name(pred).to_string(),
                        type_name: t.to_string(),
                    });
                }
            }
        }
        for n in graph.nodes() {
            if graph.node_type(n).is_none() {
                log::warn!(
                    "node {} carries no type tag; type constraints are not enforced for it",
                    graph.node_name(n)
                );
            }
        }
    }

    let mut entries = HashMap::new();
    let mut by_pred: HashMap<PredId, Vec<Element>> = HashMap::new();
    for pred in registry.unary_preds() {
        let slots = by_pred.entry(pred).or_default();
        for n in graph.nodes() {
            let el = Element::Node(n);
            if registry.compatible(graph, el, pred) {
                entries.insert(
                    (el, pred),
                    AtomState {
                        bound: Interval::bottom(),
                        frozen: false,
                    },
                );
                slots.push(el);
            }
        }
    }
    for pred in registry.binary_preds() {
        let slots = by_pred.entry(pred).or_default();
        for (a, b) in graph.edges() {
            let el = Element::Edge(a, b);
            if registry.compatible(graph, el, pred) {
                entries.insert(
                    (el, pred),
                    AtomState {
                        bound: Interval::bottom(),
                        frozen: false,
                    },
                );
                slots.push(el);
            }
        }
    }
    Ok(World {
        entries,
        by_pred,
        current_time: 0,
    })
}

/// Sentinel `t_end` for facts that hold over the whole horizon.
pub const WHOLE_HORIZON: usize = usize::MAX;

/// An input fact: an annotation for one ground atom over a time range.
#[derive(Debug, Clone, PartialEq)]
pub struct Fact {
    pub id: String,
    pub element: ElementRef,
    pub predicate: String,
    pub bound: Interval,
    pub static_fact: bool,
    pub t_start: usize,
    pub t_end: usize,
}

impl Fact {
    /// A static fact: applied once at setup and frozen thereafter.
    pub fn fixed(id: &str, element: ElementRef, predicate: &str, bound: Interval) -> Self {
        Self {
            id: id.to_string(),
            element,
            predicate: predicate.to_string(),
            bound,
            static_fact: true,
            t_start: 0,
            t_end: WHOLE_HORIZON,
        }
    }

    /// A time-ranged fact, due at every `t` in `[t_start, t_end]`.
    pub fn ranged(
        id: &str,
        element: ElementRef,
        predicate: &str,
        bound: Interval,
        t_start: usize,
        t_end: usize,
    ) -> Self {
        Self {
            id: id.to_string(),
            element,
            predicate: predicate.to_string(),
            bound,
            static_fact: false,
            t_start,
            t_end,
        }
    }
}

/// Where a scheduled bound came from: an input fact or a delayed rule firing.
#[derive(Debug, Clone, PartialEq)]
pub enum ItemSource {
    Fact { id: String },
    Rule { id: String, clause_groundings: Vec<Vec<Element>> },
}

/// One scheduled application of a bound to an atom.
#[derive(Debug, Clone)]
pub struct QueueItem {
    pub key: AtomKey,
    pub bound: Interval,
    /// Freeze the atom after this bound applies (static-predicate facts).
    pub freeze: bool,
    pub source: ItemSource,
}

/// Facts and delayed inferences indexed by the timestep they are due at.
#[derive(Debug, Clone)]
pub struct FactQueue {
    by_time: Vec<Vec<QueueItem>>,
}

impl FactQueue {
    pub fn new(horizon: usize) -> Self {
        Self {
            by_time: vec![Vec::new(); horizon + 1],
        }
    }

    pub fn push(&mut self, t: usize, item: QueueItem) {
        if t < self.by_time.len() {
            self.by_time[t].push(item);
        }
    }

    pub fn due(&self, t: usize) -> &[QueueItem] {
        self.by_time.get(t).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn is_empty(&self) -> bool {
        self.by_time.iter().all(|v| v.is_empty())
    }
}

/// Resolves a fact's element and predicate against the world.
pub fn resolve_fact_key(
    graph: &KnowledgeGraph,
    registry: &PredicateRegistry,
    world: &World,
    fact: &Fact,
) -> Result<AtomKey, ModelError> {
    let unknown = || ModelError::UnknownAtom {
        element: fact.element.to_string(),
        predicate: fact.predicate.clone(),
    };
    if fact.predicate == REL {
        // rel is implied by the graph; it cannot be asserted.
        return Err(unknown());
    }
    let pred = registry.pred_id(&fact.predicate).ok_or_else(unknown)?;
    let el = match &fact.element {
        ElementRef::Node(n) => Element::Node(graph.node_id(n).ok_or_else(unknown)?),
        ElementRef::Edge(a, b) => Element::Edge(
            graph.node_id(a).ok_or_else(unknown)?,
            graph.node_id(b).ok_or_else(unknown)?,
        ),
    };
    let key = (el, pred);
    if !world.contains(&key) {
        return Err(unknown());
    }
    Ok(key)
}

/// Schedules facts into a queue. Static facts are applied to the world
/// immediately and frozen; ranged facts are enqueued for each due timestep.
///
/// Conflicting static facts cannot be ordered meaningfully, so a conflict at
/// setup resolves straight to `[0,1]` (frozen) with a warning.
pub fn schedule_facts(
    world: &mut World,
    graph: &KnowledgeGraph,
    registry: &PredicateRegistry,
    facts: &[Fact],
    horizon: usize,
) -> Result<FactQueue, ModelError> {
    let mut queue = FactQueue::new(horizon);
    for fact in facts {
        let key = resolve_fact_key(graph, registry, world, fact)?;
        if fact.static_fact {
            let st = *world.get(&key).expect("resolved key exists");
            if st.frozen {
                if st.bound != fact.bound {
                    log::warn!(
                        "static fact {} targets an already-frozen atom; ignored",
                        fact.id
                    );
                }
                continue;
            }
            if st.bound.consistent_with(&fact.bound) {
                world.set(key, st.bound.tighten(&fact.bound), true);
            } else {
                log::warn!(
                    "static fact {} conflicts with existing bound; atom reset to [0,1] and frozen",
                    fact.id
                );
                world.set(key, Interval::bottom(), true);
            }
        } else {
            if fact.t_start > fact.t_end {
                return Err(ModelError::RangeError {
                    fact: fact.id.clone(),
                    detail: format!("t_start {} > t_end {}", fact.t_start, fact.t_end),
                });
            }
            if fact.t_start > horizon {
                return Err(ModelError::RangeError {
                    fact: fact.id.clone(),
                    detail: format!("t_start {} beyond horizon {}", fact.t_start, horizon),
                });
            }
            let end = fact.t_end.min(horizon);
            let freeze = registry.is_static(key.1);
            for t in fact.t_start..=end {
                queue.push(
                    t,
                    QueueItem {
                        key,
                        bound: fact.bound,
                        freeze,
                        source: ItemSource::Fact { id: fact.id.clone() },
                    },
                );
            }
        }
    }
    Ok(queue)
}

/// Converts graph attribute annotations into facts. Attributes of static
/// predicates become static facts; others hold at `t = 0`. Attribute keys
/// that are not declared predicates are skipped.
pub fn attribute_facts(graph: &KnowledgeGraph, registry: &PredicateRegistry) -> Vec<Fact> {
    let mut facts = Vec::new();
    let mut push = |element: ElementRef, pred: &str, bound: Interval| {
        let Some(id) = registry.pred_id(pred) else {
            log::debug!("attribute {pred} is not a declared predicate; skipped");
            return;
        };
        let fid = format!("attr_{}", facts.len() + 1);
        if registry.is_static(id) {
            facts.push(Fact::fixed(&fid, element, pred, bound));
        } else {
            facts.push(Fact::ranged(&fid, element, pred, bound, 0, 0));
        }
    };
    for (n, key, value) in graph.node_attrs() {
        push(ElementRef::Node(graph.node_name(*n).to_string()), key, *value);
    }
    for ((a, b), key, value) in graph.edge_attrs() {
        push(
            ElementRef::Edge(
                graph.node_name(*a).to_string(),
                graph.node_name(*b).to_string(),
            ),
            key,
            *value,
        );
    }
    facts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn student_demo() -> (KnowledgeGraph, PredicateRegistry) {
        let mut g = KnowledgeGraph::new();
        for s in ["john", "mary", "phil"] {
            g.add_node(s, Some("student")).unwrap();
        }
        for c in ["math", "english"] {
            g.add_node(c, Some("class")).unwrap();
        }
        // all ordered pairs, self-loops included: the unconstrained search
        // space of a binary predicate over five constants
        let names: Vec<String> = (0..5).map(|i| g.node_name(i).to_string()).collect();
        for a in &names {
            for b in &names {
                g.add_edge(a, b).unwrap();
            }
        }
        let mut reg = PredicateRegistry::new();
        reg.declare_binary("takes", Some(("student", "class"))).unwrap();
        (g, reg)
    }

    #[test]
    fn type_checking_cuts_25_slots_to_6() {
        let (g, reg) = student_demo();
        let world = init_world(&g, &reg).unwrap();
        assert_eq!(world.slot_count(), 6);

        let mut unconstrained = PredicateRegistry::new();
        unconstrained.declare_binary("takes", None).unwrap();
        let world = init_world(&g, &unconstrained).unwrap();
        assert_eq!(world.slot_count(), 25);
    }

    #[test]
    fn unconstrained_slot_count_is_product() {
        let mut g = KnowledgeGraph::new();
        for n in ["a", "b", "c"] {
            g.add_node(n, None).unwrap();
        }
        g.add_edge("a", "b").unwrap();
        g.add_edge("b", "c").unwrap();
        let mut reg = PredicateRegistry::new();
        reg.declare_unary("p", None).unwrap();
        reg.declare_unary("q", None).unwrap();
        reg.declare_binary("r", None).unwrap();
        let world = init_world(&g, &reg).unwrap();
        assert_eq!(world.slot_count(), 3 * 2 + 2 * 1);
    }

    #[test]
    fn singleton_slot() {
        let mut g = KnowledgeGraph::new();
        g.add_node("n", Some("t")).unwrap();
        let mut reg = PredicateRegistry::new();
        reg.declare_unary("p", Some("t")).unwrap();
        let world = init_world(&g, &reg).unwrap();
        assert_eq!(world.slot_count(), 1);
        let key = (Element::Node(0), reg.pred_id("p").unwrap());
        assert_eq!(world.get(&key).unwrap().bound, Interval::bottom());
        assert!(!world.get(&key).unwrap().frozen);
    }

    #[test]
    fn unknown_type_rejected() {
        let mut g = KnowledgeGraph::new();
        g.add_node("n", Some("t")).unwrap();
        let mut reg = PredicateRegistry::new();
        reg.declare_unary("p", Some("ghost")).unwrap();
        assert!(matches!(
            init_world(&g, &reg),
            Err(ModelError::UnknownType { .. })
        ));
    }

    #[test]
    fn slot_count_matches_bruteforce_enumeration() {
        // oracle: nested loop over all constants × predicates applying the
        // constraint predicate directly
        let (g, reg) = student_demo();
        let world = init_world(&g, &reg).unwrap();
        let mut expected = 0usize;
        for p in reg.unary_preds() {
            for n in g.nodes() {
                if reg.compatible(&g, Element::Node(n), p) {
                    expected += 1;
                }
            }
        }
        for p in reg.binary_preds() {
            for (a, b) in g.edges() {
                if reg.compatible(&g, Element::Edge(a, b), p) {
                    expected += 1;
                }
            }
        }
        assert_eq!(world.slot_count(), expected);
    }

    #[test]
    fn static_fact_applied_at_schedule_time() {
        let mut g = KnowledgeGraph::new();
        g.add_node("english", Some("class")).unwrap();
        let mut reg = PredicateRegistry::new();
        reg.declare_unary("class", None).unwrap();
        let mut world = init_world(&g, &reg).unwrap();
        let facts = vec![Fact::fixed(
            "fact_1",
            ElementRef::Node("english".into()),
            "class",
            Interval::truth(),
        )];
        let queue = schedule_facts(&mut world, &g, &reg, &facts, 5).unwrap();
        assert!(queue.is_empty());
        let key = (Element::Node(0), reg.pred_id("class").unwrap());
        let st = world.get(&key).unwrap();
        assert_eq!(st.bound, Interval::truth());
        assert!(st.frozen);
    }

    #[test]
    fn ranged_facts_enqueue_without_conflict_checks() {
        let mut g = KnowledgeGraph::new();
        g.add_node("john", None).unwrap();
        g.add_node("math", None).unwrap();
        g.add_edge("john", "math").unwrap();
        let mut reg = PredicateRegistry::new();
        reg.declare_binary("takes", None).unwrap();
        let mut world = init_world(&g, &reg).unwrap();
        let e = ElementRef::Edge("john".into(), "math".into());
        let facts = vec![
            Fact::ranged("fact_1", e.clone(), "takes", Interval::truth(), 1, 1),
            Fact::ranged("fact_2", e, "takes", Interval::falsehood(), 5, 5),
        ];
        let queue = schedule_facts(&mut world, &g, &reg, &facts, 5).unwrap();
        assert_eq!(queue.due(1).len(), 1);
        assert_eq!(queue.due(5).len(), 1);
        // nothing applied yet
        let key = (Element::Edge(0, 1), reg.pred_id("takes").unwrap());
        assert_eq!(world.get(&key).unwrap().bound, Interval::bottom());
    }

    #[test]
    fn empty_fact_list() {
        let mut g = KnowledgeGraph::new();
        g.add_node("n", None).unwrap();
        let mut reg = PredicateRegistry::new();
        reg.declare_unary("p", None).unwrap();
        let mut world = init_world(&g, &reg).unwrap();
        let before = world.snapshot();
        let queue = schedule_facts(&mut world, &g, &reg, &[], 3).unwrap();
        assert!(queue.is_empty());
        assert_eq!(world.snapshot(), before);
    }

    #[test]
    fn unknown_atom_fact_rejected() {
        let mut g = KnowledgeGraph::new();
        g.add_node("n", Some("t")).unwrap();
        let mut reg = PredicateRegistry::new();
        reg.declare_unary("p", Some("t")).unwrap();
        let mut world = init_world(&g, &reg).unwrap();
        let facts = vec![Fact::ranged(
            "fact_1",
            ElementRef::Node("ghost".into()),
            "p",
            Interval::truth(),
            0,
            0,
        )];
        assert!(matches!(
            schedule_facts(&mut world, &g, &reg, &facts, 3),
            Err(ModelError::UnknownAtom { .. })
        ));
    }

    #[test]
    fn complement_pair_double_registration_rejected() {
        let mut reg = PredicateRegistry::new();
        reg.declare_unary("bachelor", None).unwrap();
        reg.declare_unary("married", None).unwrap();
        reg.add_complement_pair("bachelor", "married").unwrap();
        assert!(reg.add_complement_pair("married", "bachelor").is_err());
    }
}
