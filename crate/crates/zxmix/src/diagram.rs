//! ZX-diagrams as open graphs.
//!
//! A diagram is an undirected multigraph whose nodes are spiders, Hadamard
//! boxes, discards, and explicit boundary nodes carrying input/output
//! positions. Only connectivity matters: diagram identity is graph
//! isomorphism preserving node data and boundary positions.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::phase::Phase;

/// Identifies a node within one diagram. Not stable across operations.
pub type NodeId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum DiagramError {
    #[error("arity mismatch: left produces {0} wires, right expects {1}")]
    ArityMismatch(usize, usize),

    #[error("diagram contains a discard node and has no dagger")]
    NotDaggerable,

    #[error("diagram exceeds the {0}-node budget for exact isomorphism")]
    BudgetExceeded(usize),

    #[error("invalid diagram: {0}")]
    Invalid(String),
}

pub type DiagramResult<T> = Result<T, DiagramError>;

/// Whether a boundary node is an input or an output of the diagram.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundaryRole {
    Input,
    Output,
}

/// Node payload.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum NodeKind {
    /// Z-spider with a phase.
    Z(Phase),
    /// X-spider with a phase.
    X(Phase),
    /// Hadamard box; always degree 2.
    H,
    /// Boundary node: `pos` indexes the wire among inputs resp. outputs.
    Boundary { role: BoundaryRole, pos: usize },
    /// Discard (trace out the wire); always degree 1.
    Discard,
}

impl NodeKind {
    pub fn is_spider(&self) -> bool { matches!(self, Self::Z(_) | Self::X(_)) }

    pub fn is_boundary(&self) -> bool { matches!(self, Self::Boundary { .. }) }

    pub fn phase(&self) -> Option<Phase> {
        match self {
            Self::Z(ph) | Self::X(ph) => Some(*ph),
            _ => None,
        }
    }

    /// Same node data, with spider colors exchanged.
    pub fn color_flipped(&self) -> Self {
        match self {
            Self::Z(ph) => Self::X(*ph),
            Self::X(ph) => Self::Z(*ph),
            other => *other,
        }
    }
}

/// The generating diagrams, with their fixed arities.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    /// Z-spider with `inputs` legs above and `outputs` legs below.
    ZSpider { inputs: usize, outputs: usize, phase: Phase },
    /// X-spider.
    XSpider { inputs: usize, outputs: usize, phase: Phase },
    /// Hadamard box, arity (1, 1).
    Hadamard,
    /// Bare wire, arity (1, 1).
    Identity,
    /// Wire crossing, arity (2, 2).
    Swap,
    /// Bent wire `∪`, arity (0, 2).
    Cup,
    /// Bent wire `∩`, arity (2, 0).
    Cap,
    /// The empty diagram, arity (0, 0).
    Empty,
    /// Discard a wire, arity (1, 0).
    Discard,
}

/// An open graph: nodes, an edge multiset (self-loops and parallel edges
/// allowed on spiders), and the boundary arities.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagram {
    nodes: BTreeMap<NodeId, NodeKind>,
    /// Unordered pairs, normalized `a <= b`, kept sorted.
    edges: Vec<(NodeId, NodeId)>,
    in_arity: usize,
    out_arity: usize,
}

impl Diagram {
    /// An empty diagram with the given boundary arities and no wires yet.
    /// Boundary nodes must be added before the diagram validates.
    fn bare(in_arity: usize, out_arity: usize) -> Self {
        Self { nodes: BTreeMap::new(), edges: Vec::new(), in_arity, out_arity }
    }

    /// Build a diagram from raw parts, checking all structural invariants.
    pub fn from_parts(
        nodes: BTreeMap<NodeId, NodeKind>,
        edges: Vec<(NodeId, NodeId)>,
        in_arity: usize,
        out_arity: usize,
    ) -> DiagramResult<Self> {
        let mut dg = Self { nodes, edges: Vec::with_capacity(edges.len()), in_arity, out_arity };
        for (a, b) in edges {
            dg.push_edge(a, b);
        }
        dg.validate()?;
        Ok(dg)
    }

    pub fn in_arity(&self) -> usize { self.in_arity }

    pub fn out_arity(&self) -> usize { self.out_arity }

    pub fn node_count(&self) -> usize { self.nodes.len() }

    pub fn edge_count(&self) -> usize { self.edges.len() }

    pub fn node(&self, id: NodeId) -> Option<&NodeKind> { self.nodes.get(&id) }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &NodeKind)> {
        self.nodes.iter().map(|(id, kind)| (*id, kind))
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] { &self.edges }

    pub fn contains_discard(&self) -> bool {
        self.nodes.values().any(|k| matches!(k, NodeKind::Discard))
    }

    /// `true` if every spider phase is rational.
    pub fn all_phases_rational(&self) -> bool {
        self.nodes.values().all(|k| k.phase().is_none_or(|ph| ph.is_rational()))
    }

    /// Degree of a node; a self-loop counts twice.
    pub fn degree(&self, id: NodeId) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| (a == id) as usize + (b == id) as usize)
            .sum()
    }

    /// Number of self-loops at `id`.
    pub fn self_loops(&self, id: NodeId) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == id && b == id).count()
    }

    /// Number of edges between `a` and `b` (for `a != b`).
    pub fn mutual_edges(&self, a: NodeId, b: NodeId) -> usize {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.edges.iter().filter(|&&e| e == (a, b)).count()
    }

    /// Endpoints opposite `id` over all non-loop incident edges, with
    /// multiplicity.
    pub fn neighbors(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        for &(a, b) in &self.edges {
            if a == id && b != id {
                out.push(b);
            } else if b == id && a != id {
                out.push(a);
            }
        }
        out
    }

    /// The boundary node for a given role and position, if present.
    pub fn boundary(&self, role: BoundaryRole, pos: usize) -> Option<NodeId> {
        self.nodes.iter().find_map(|(id, kind)| match kind {
            NodeKind::Boundary { role: r, pos: p } if *r == role && *p == pos => Some(*id),
            _ => None,
        })
    }

    fn fresh_id(&self) -> NodeId {
        self.nodes.last_key_value().map_or(0, |(id, _)| id + 1)
    }

    pub(crate) fn add_node(&mut self, kind: NodeKind) -> NodeId {
        let id = self.fresh_id();
        self.nodes.insert(id, kind);
        id
    }

    pub(crate) fn set_node(&mut self, id: NodeId, kind: NodeKind) {
        self.nodes.insert(id, kind);
    }

    pub(crate) fn push_edge(&mut self, a: NodeId, b: NodeId) {
        let e = if a <= b { (a, b) } else { (b, a) };
        let at = self.edges.partition_point(|x| *x <= e);
        self.edges.insert(at, e);
    }

    /// Remove one occurrence of the edge `{a, b}`. Panics if absent.
    pub(crate) fn remove_edge(&mut self, a: NodeId, b: NodeId) {
        let e = if a <= b { (a, b) } else { (b, a) };
        let at = self.edges.iter().position(|x| *x == e)
            .expect("edge to remove must exist");
        self.edges.remove(at);
    }

    /// Remove a node together with all incident edges.
    pub(crate) fn remove_node(&mut self, id: NodeId) {
        self.nodes.remove(&id);
        self.edges.retain(|&(a, b)| a != id && b != id);
    }

    /// Check every structural invariant: boundary positions form contiguous
    /// 0-based sequences, degree constraints hold, edges reference nodes.
    pub fn validate(&self) -> DiagramResult<()> {
        let mut ins = vec![false; self.in_arity];
        let mut outs = vec![false; self.out_arity];
        for (id, kind) in &self.nodes {
            if let NodeKind::Boundary { role, pos } = kind {
                let slots = match role {
                    BoundaryRole::Input => &mut ins,
                    BoundaryRole::Output => &mut outs,
                };
                match slots.get_mut(*pos) {
                    Some(seen @ false) => *seen = true,
                    Some(true) => {
                        return Err(DiagramError::Invalid(format!(
                            "duplicate {role:?} boundary at position {pos} (node {id})"
                        )));
                    }
                    None => {
                        return Err(DiagramError::Invalid(format!(
                            "{role:?} boundary position {pos} out of range (node {id})"
                        )));
                    }
                }
            }
        }
        if let Some(pos) = ins.iter().position(|seen| !seen) {
            return Err(DiagramError::Invalid(format!("missing input boundary {pos}")));
        }
        if let Some(pos) = outs.iter().position(|seen| !seen) {
            return Err(DiagramError::Invalid(format!("missing output boundary {pos}")));
        }
        for &(a, b) in &self.edges {
            if !self.nodes.contains_key(&a) || !self.nodes.contains_key(&b) {
                return Err(DiagramError::Invalid(format!("edge ({a}, {b}) references a missing node")));
            }
        }
        for (id, kind) in &self.nodes {
            let deg = self.degree(*id);
            let loops = self.self_loops(*id);
            match kind {
                NodeKind::Z(_) | NodeKind::X(_) => {}
                NodeKind::H => {
                    if deg != 2 || loops != 0 {
                        return Err(DiagramError::Invalid(format!(
                            "Hadamard node {id} must have two distinct legs (degree {deg}, loops {loops})"
                        )));
                    }
                }
                NodeKind::Boundary { .. } | NodeKind::Discard => {
                    if deg != 1 {
                        return Err(DiagramError::Invalid(format!(
                            "node {id} ({kind:?}) must have degree 1, has {deg}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Build a generator from its spec.
    pub fn generator(spec: GeneratorSpec) -> Self {
        use BoundaryRole::*;
        let dg = match spec {
            GeneratorSpec::ZSpider { inputs, outputs, phase } => {
                spider(NodeKind::Z(phase), inputs, outputs)
            }
            GeneratorSpec::XSpider { inputs, outputs, phase } => {
                spider(NodeKind::X(phase), inputs, outputs)
            }
            GeneratorSpec::Hadamard => {
                let mut dg = Diagram::bare(1, 1);
                let i = dg.add_node(NodeKind::Boundary { role: Input, pos: 0 });
                let h = dg.add_node(NodeKind::H);
                let o = dg.add_node(NodeKind::Boundary { role: Output, pos: 0 });
                dg.push_edge(i, h);
                dg.push_edge(h, o);
                dg
            }
            GeneratorSpec::Identity => {
                let mut dg = Diagram::bare(1, 1);
                let i = dg.add_node(NodeKind::Boundary { role: Input, pos: 0 });
                let o = dg.add_node(NodeKind::Boundary { role: Output, pos: 0 });
                dg.push_edge(i, o);
                dg
            }
            GeneratorSpec::Swap => {
                let mut dg = Diagram::bare(2, 2);
                let i0 = dg.add_node(NodeKind::Boundary { role: Input, pos: 0 });
                let i1 = dg.add_node(NodeKind::Boundary { role: Input, pos: 1 });
                let o0 = dg.add_node(NodeKind::Boundary { role: Output, pos: 0 });
                let o1 = dg.add_node(NodeKind::Boundary { role: Output, pos: 1 });
                dg.push_edge(i0, o1);
                dg.push_edge(i1, o0);
                dg
            }
            GeneratorSpec::Cup => {
                let mut dg = Diagram::bare(0, 2);
                let o0 = dg.add_node(NodeKind::Boundary { role: Output, pos: 0 });
                let o1 = dg.add_node(NodeKind::Boundary { role: Output, pos: 1 });
                dg.push_edge(o0, o1);
                dg
            }
            GeneratorSpec::Cap => {
                let mut dg = Diagram::bare(2, 0);
                let i0 = dg.add_node(NodeKind::Boundary { role: Input, pos: 0 });
                let i1 = dg.add_node(NodeKind::Boundary { role: Input, pos: 1 });
                dg.push_edge(i0, i1);
                dg
            }
            GeneratorSpec::Empty => Diagram::bare(0, 0),
            GeneratorSpec::Discard => {
                let mut dg = Diagram::bare(1, 0);
                let i = dg.add_node(NodeKind::Boundary { role: Input, pos: 0 });
                let g = dg.add_node(NodeKind::Discard);
                dg.push_edge(i, g);
                dg
            }
        };
        debug_assert!(dg.validate().is_ok());
        dg
    }

    /// Sequential composition `g ∘ f` reading top to bottom: the outputs of
    /// `self` are glued to the inputs of `g` positionwise.
    pub fn compose(&self, g: &Diagram) -> DiagramResult<Diagram> {
        if self.out_arity != g.in_arity {
            return Err(DiagramError::ArityMismatch(self.out_arity, g.in_arity));
        }
        let mut dg = Diagram::bare(self.in_arity, g.out_arity);
        let mut glued = Vec::new();

        // self keeps its ids; g is shifted past them
        let offset = self.fresh_id();
        for (id, kind) in &self.nodes {
            match kind {
                NodeKind::Boundary { role: BoundaryRole::Output, pos } => {
                    dg.nodes.insert(*id, *kind);
                    glued.push((*pos, *id, 0));
                }
                _ => {
                    dg.nodes.insert(*id, *kind);
                }
            }
        }
        for &(a, b) in &self.edges {
            dg.push_edge(a, b);
        }
        for (id, kind) in &g.nodes {
            match kind {
                NodeKind::Boundary { role: BoundaryRole::Input, pos } => {
                    dg.nodes.insert(id + offset, *kind);
                    glued.push((*pos, id + offset, 1));
                }
                _ => {
                    dg.nodes.insert(id + offset, *kind);
                }
            }
        }
        for &(a, b) in &g.edges {
            dg.push_edge(a + offset, b + offset);
        }

        // pair each output of self with the matching input of g
        let mut dissolve = Vec::new();
        for pos in 0..self.out_arity {
            let top = glued.iter().find(|(p, _, side)| *p == pos && *side == 0).unwrap().1;
            let bot = glued.iter().find(|(p, _, side)| *p == pos && *side == 1).unwrap().1;
            dg.push_edge(top, bot);
            dissolve.push(top);
            dissolve.push(bot);
        }
        dg.dissolve_wire_points(&dissolve);
        dg.validate()?;
        Ok(dg)
    }

    /// Parallel composition: disjoint union with `g`'s boundary positions
    /// shifted past `self`'s.
    pub fn tensor(&self, g: &Diagram) -> Diagram {
        let mut dg = Diagram::bare(self.in_arity + g.in_arity, self.out_arity + g.out_arity);
        for (id, kind) in &self.nodes {
            dg.nodes.insert(*id, *kind);
        }
        for &(a, b) in &self.edges {
            dg.push_edge(a, b);
        }
        let offset = self.fresh_id();
        for (id, kind) in &g.nodes {
            let kind = match kind {
                NodeKind::Boundary { role: BoundaryRole::Input, pos } => {
                    NodeKind::Boundary { role: BoundaryRole::Input, pos: pos + self.in_arity }
                }
                NodeKind::Boundary { role: BoundaryRole::Output, pos } => {
                    NodeKind::Boundary { role: BoundaryRole::Output, pos: pos + self.out_arity }
                }
                other => *other,
            };
            dg.nodes.insert(id + offset, kind);
        }
        for &(a, b) in &g.edges {
            dg.push_edge(a + offset, b + offset);
        }
        debug_assert!(dg.validate().is_ok());
        dg
    }

    /// Adjoint: swap input/output roles (keeping positions) and negate all
    /// spider phases. Fails on diagrams containing a discard.
    pub fn dagger(&self) -> DiagramResult<Diagram> {
        if self.contains_discard() {
            return Err(DiagramError::NotDaggerable);
        }
        let mut dg = Diagram::bare(self.out_arity, self.in_arity);
        for (id, kind) in &self.nodes {
            let kind = match kind {
                NodeKind::Z(ph) => NodeKind::Z(ph.neg()),
                NodeKind::X(ph) => NodeKind::X(ph.neg()),
                NodeKind::Boundary { role: BoundaryRole::Input, pos } => {
                    NodeKind::Boundary { role: BoundaryRole::Output, pos: *pos }
                }
                NodeKind::Boundary { role: BoundaryRole::Output, pos } => {
                    NodeKind::Boundary { role: BoundaryRole::Input, pos: *pos }
                }
                other => *other,
            };
            dg.nodes.insert(*id, kind);
        }
        for &(a, b) in &self.edges {
            dg.push_edge(a, b);
        }
        debug_assert!(dg.validate().is_ok());
        Ok(dg)
    }

    /// Delete degree-2 wire points, joining their neighbors directly. A
    /// wire point whose two edges close onto itself is a circle; it is kept
    /// as a phase-free Z-spider with a self-loop (interpretation 2).
    fn dissolve_wire_points(&mut self, points: &[NodeId]) {
        let mut pending: Vec<NodeId> = points.to_vec();
        while let Some(b) = pending.pop() {
            if !self.nodes.contains_key(&b) {
                continue; // already consumed from the other side
            }
            if self.self_loops(b) == 1 && self.degree(b) == 2 {
                // a closed circle of glued wire points
                self.set_node(b, NodeKind::Z(Phase::zero()));
                continue;
            }
            let nbs = self.neighbors(b);
            assert_eq!(nbs.len(), 2, "glued boundary must sit on exactly two wires");
            self.remove_node(b);
            self.push_edge(nbs[0], nbs[1]);
        }
    }
}

fn spider(kind: NodeKind, inputs: usize, outputs: usize) -> Diagram {
    let mut dg = Diagram::bare(inputs, outputs);
    let s = dg.add_node(kind);
    for pos in 0..inputs {
        let b = dg.add_node(NodeKind::Boundary { role: BoundaryRole::Input, pos });
        dg.push_edge(b, s);
    }
    for pos in 0..outputs {
        let b = dg.add_node(NodeKind::Boundary { role: BoundaryRole::Output, pos });
        dg.push_edge(b, s);
    }
    dg
}

/// Shorthand constructors for the generators.
pub mod gens {
    use super::*;

    pub fn z(inputs: usize, outputs: usize, phase: Phase) -> Diagram {
        Diagram::generator(GeneratorSpec::ZSpider { inputs, outputs, phase })
    }

    pub fn x(inputs: usize, outputs: usize, phase: Phase) -> Diagram {
        Diagram::generator(GeneratorSpec::XSpider { inputs, outputs, phase })
    }

    pub fn hadamard() -> Diagram { Diagram::generator(GeneratorSpec::Hadamard) }

    pub fn identity() -> Diagram { Diagram::generator(GeneratorSpec::Identity) }

    pub fn swap() -> Diagram { Diagram::generator(GeneratorSpec::Swap) }

    pub fn cup() -> Diagram { Diagram::generator(GeneratorSpec::Cup) }

    pub fn cap() -> Diagram { Diagram::generator(GeneratorSpec::Cap) }

    pub fn empty() -> Diagram { Diagram::generator(GeneratorSpec::Empty) }

    pub fn discard() -> Diagram { Diagram::generator(GeneratorSpec::Discard) }

    /// `n`-wire identity.
    pub fn identity_n(n: usize) -> Diagram {
        let mut dg = empty();
        for _ in 0..n {
            dg = dg.tensor(&identity());
        }
        dg
    }

    /// A one-wire gate placed on wire `k` of `n` parallel wires.
    pub fn on_wire(gate: &Diagram, k: usize, n: usize) -> Diagram {
        assert!(k < n && gate.in_arity() == 1 && gate.out_arity() == 1);
        identity_n(k).tensor(gate).tensor(&identity_n(n - k - 1))
    }
}

#[cfg(test)]
mod tests {
    use super::gens::*;
    use super::*;

    #[test]
    fn generators_validate() {
        for dg in [
            z(2, 3, Phase::new(1, 4)),
            x(0, 0, Phase::pi()),
            hadamard(),
            identity(),
            swap(),
            cup(),
            cap(),
            empty(),
            discard(),
        ] {
            dg.validate().unwrap();
        }
    }

    #[test]
    fn compose_arity_mismatch() {
        let err = cup().compose(&hadamard()).unwrap_err();
        assert_eq!(err, DiagramError::ArityMismatch(2, 1));
    }

    #[test]
    fn compose_identities_leaves_bare_wire() {
        let dg = identity().compose(&identity()).unwrap();
        assert_eq!(dg.node_count(), 2);
        assert_eq!(dg.edge_count(), 1);
        assert!(dg.nodes().all(|(_, k)| k.is_boundary()));
    }

    #[test]
    fn cup_then_cap_leaves_a_circle() {
        // ∪ then ∩ closes both wires into a single loop
        let dg = cup().compose(&cap()).unwrap();
        assert_eq!((dg.in_arity(), dg.out_arity()), (0, 0));
        assert_eq!(dg.node_count(), 1);
        let (id, kind) = dg.nodes().next().unwrap();
        assert_eq!(*kind, NodeKind::Z(Phase::zero()));
        assert_eq!(dg.self_loops(id), 1);
    }

    #[test]
    fn tensor_offsets_positions() {
        let dg = z(1, 1, Phase::zero()).tensor(&x(1, 1, Phase::pi()));
        assert_eq!((dg.in_arity(), dg.out_arity()), (2, 2));
        assert!(dg.boundary(BoundaryRole::Input, 1).is_some());
        assert!(dg.boundary(BoundaryRole::Output, 1).is_some());
        dg.validate().unwrap();
    }

    #[test]
    fn dagger_swaps_roles_and_negates() {
        let dg = z(1, 2, Phase::new(1, 4)).dagger().unwrap();
        assert_eq!((dg.in_arity(), dg.out_arity()), (2, 1));
        let ph = dg.nodes().find_map(|(_, k)| k.phase()).unwrap();
        assert_eq!(ph, Phase::new(7, 4));
        assert!(discard().dagger().is_err());
    }

    #[test]
    fn dagger_of_cup_is_cap() {
        let dg = cup().dagger().unwrap();
        assert_eq!((dg.in_arity(), dg.out_arity()), (2, 0));
        assert_eq!(dg.node_count(), 2);
        assert!(dg.nodes().all(|(_, k)| matches!(
            k,
            NodeKind::Boundary { role: BoundaryRole::Input, .. }
        )));
    }

    #[test]
    fn validate_rejects_bad_boundaries() {
        let mut nodes = BTreeMap::new();
        nodes.insert(0, NodeKind::Boundary { role: BoundaryRole::Input, pos: 1 });
        nodes.insert(1, NodeKind::Z(Phase::zero()));
        let err = Diagram::from_parts(nodes, vec![(0, 1)], 1, 0).unwrap_err();
        assert!(matches!(err, DiagramError::Invalid(_)));
    }

    #[test]
    fn validate_rejects_hadamard_self_loop() {
        let mut nodes = BTreeMap::new();
        nodes.insert(0, NodeKind::H);
        let err = Diagram::from_parts(nodes, vec![(0, 0)], 0, 0).unwrap_err();
        assert!(matches!(err, DiagramError::Invalid(_)));
    }
}
