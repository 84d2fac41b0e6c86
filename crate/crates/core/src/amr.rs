//! AMR graph representation, triple extraction and label bags.
//!
//! A graph holds variables (each declared once with a concept), relation
//! edges between variables, and attribute edges from a variable to a
//! constant. Graphs come from [`crate::penman::parse`] or, for generated
//! inputs, from [`AmrGraph::from_parts`]; both guarantee the invariants
//! below:
//!
//! * variable ids are unique and every edge endpoint is declared,
//! * the graph is connected from the root through relation edges,
//! * relation and attribute edges are deduplicated,
//! * inverse roles (`:ARG0-of`) have been rewritten to their canonical
//!   direction, so `(b / boy :ARG0-of (w / want-01))` stores the edge
//!   `w -ARG0-> b`.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::text::Bag;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate variable '{0}'")]
    DuplicateVariable(String),
    #[error("edge references undeclared variable '{0}'")]
    UnknownVariable(String),
    #[error("root variable '{0}' is not declared")]
    UnknownRoot(String),
    #[error("graph must contain at least one node")]
    Empty,
    #[error("variable '{0}' is not reachable from the root")]
    Disconnected(String),
}

/// A relation edge between two variables, stored by node index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationEdge {
    pub src: usize,
    pub role: String,
    pub dst: usize,
}

/// An attribute edge from a variable to a constant value.
///
/// Values are stored without surrounding quotes and compared as
/// case-sensitive strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeEdge {
    pub src: usize,
    pub role: String,
    pub value: String,
}

/// An AMR graph: nodes in declaration order, relation edges and attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmrGraph {
    vars: Vec<String>,
    concepts: Vec<String>,
    index: HashMap<String, usize>,
    root: usize,
    edges: Vec<RelationEdge>,
    attrs: Vec<AttributeEdge>,
}

impl AmrGraph {
    /// Builds a validated graph from parts. Variables are declared by
    /// `(var, concept)` in order; the first entry need not be the root.
    /// Duplicate edges are dropped. Intended for programmatic construction;
    /// parsed text goes through [`crate::penman::parse`].
    pub fn from_parts(
        root: &str,
        nodes: Vec<(String, String)>,
        edges: Vec<(String, String, String)>,
        attrs: Vec<(String, String, String)>,
    ) -> Result<Self, GraphError> {
        if nodes.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut vars = Vec::with_capacity(nodes.len());
        let mut concepts = Vec::with_capacity(nodes.len());
        let mut index = HashMap::new();
        for (var, concept) in nodes {
            if index.insert(var.clone(), vars.len()).is_some() {
                return Err(GraphError::DuplicateVariable(var));
            }
            vars.push(var);
            concepts.push(concept);
        }
        let root = *index
            .get(root)
            .ok_or_else(|| GraphError::UnknownRoot(root.to_string()))?;
        let mut graph = AmrGraph {
            vars,
            concepts,
            index,
            root,
            edges: Vec::new(),
            attrs: Vec::new(),
        };
        for (src, role, dst) in edges {
            let src = graph.require(&src)?;
            let dst = graph.require(&dst)?;
            match strip_inverse_role(&role) {
                Some(canonical) => graph.push_edge(RelationEdge {
                    src: dst,
                    role: canonical.to_string(),
                    dst: src,
                }),
                None => graph.push_edge(RelationEdge { src, role, dst }),
            }
        }
        for (src, role, value) in attrs {
            let src = graph.require(&src)?;
            graph.push_attr(AttributeEdge { src, role, value });
        }
        graph.check_connected()?;
        Ok(graph)
    }

    fn require(&self, var: &str) -> Result<usize, GraphError> {
        self.index
            .get(var)
            .copied()
            .ok_or_else(|| GraphError::UnknownVariable(var.to_string()))
    }

    pub(crate) fn push_edge(&mut self, edge: RelationEdge) {
        if !self.edges.contains(&edge) {
            self.edges.push(edge);
        }
    }

    pub(crate) fn push_attr(&mut self, attr: AttributeEdge) {
        if !self.attrs.contains(&attr) {
            self.attrs.push(attr);
        }
    }

    pub(crate) fn from_raw(
        vars: Vec<String>,
        concepts: Vec<String>,
        index: HashMap<String, usize>,
        root: usize,
    ) -> Self {
        AmrGraph {
            vars,
            concepts,
            index,
            root,
            edges: Vec::new(),
            attrs: Vec::new(),
        }
    }

    pub(crate) fn check_connected(&self) -> Result<(), GraphError> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                for (a, b) in [(e.src, e.dst), (e.dst, e.src)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        match seen.iter().position(|&s| !s) {
            None => Ok(()),
            Some(i) => Err(GraphError::Disconnected(self.vars[i].clone())),
        }
    }

    pub fn node_count(&self) -> usize {
        self.vars.len()
    }

    /// Relation plus attribute edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len() + self.attrs.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn root_var(&self) -> &str {
        &self.vars[self.root]
    }

    pub fn var(&self, node: usize) -> &str {
        &self.vars[node]
    }

    pub fn concept(&self, node: usize) -> &str {
        &self.concepts[node]
    }

    pub fn node_index(&self, var: &str) -> Option<usize> {
        self.index.get(var).copied()
    }

    pub fn edges(&self) -> &[RelationEdge] {
        &self.edges
    }

    pub fn attributes(&self) -> &[AttributeEdge] {
        &self.attrs
    }

    /// Multiset of every node's concept label and every edge's role label
    /// (relation and attribute roles alike, attribute values excluded).
    pub fn label_bag(&self) -> Bag {
        let mut bag = Bag::new();
        for concept in &self.concepts {
            bag.insert(concept.clone());
        }
        for e in &self.edges {
            bag.insert(e.role.clone());
        }
        for a in &self.attrs {
            bag.insert(a.role.clone());
        }
        bag
    }

    /// Extracts the triple view used by alignment scoring: one instance
    /// triple per node, one triple per relation edge and one per attribute
    /// edge. There is no extra triple for the root.
    pub fn triples(&self) -> TripleSet {
        let mut triples = BTreeSet::new();
        for (i, var) in self.vars.iter().enumerate() {
            triples.insert(Triple {
                kind: TripleKind::Instance,
                role: "instance".to_string(),
                arg1: var.clone(),
                arg2: self.concepts[i].clone(),
            });
        }
        for e in &self.edges {
            triples.insert(Triple {
                kind: TripleKind::Relation,
                role: e.role.clone(),
                arg1: self.vars[e.src].clone(),
                arg2: self.vars[e.dst].clone(),
            });
        }
        for a in &self.attrs {
            triples.insert(Triple {
                kind: TripleKind::Attribute,
                role: a.role.clone(),
                arg1: self.vars[a.src].clone(),
                arg2: a.value.clone(),
            });
        }
        TripleSet::from_triple_set(triples)
    }

    /// Renders the graph back to PENMAN text.
    ///
    /// Every relation edge is emitted exactly once; edges that have to be
    /// walked against their stored direction are written with an `-of` role.
    /// Constants that could be mistaken for variable references are quoted.
    /// Parsing the output reproduces the same triple set.
    pub fn to_penman(&self) -> String {
        let n = self.node_count();
        // Undirected adjacency: (edge index, walked forward?).
        let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.src].push((i, true));
            adj[e.dst].push((i, false));
        }
        let mut attrs_of: Vec<Vec<&AttributeEdge>> = vec![Vec::new(); n];
        for a in &self.attrs {
            attrs_of[a.src].push(a);
        }
        let mut out = String::new();
        let mut visited = vec![false; n];
        let mut used = vec![false; self.edges.len()];
        self.emit_node(
            self.root,
            &adj,
            &attrs_of,
            &mut visited,
            &mut used,
            &mut out,
        );
        out
    }

    fn emit_node(
        &self,
        node: usize,
        adj: &[Vec<(usize, bool)>],
        attrs_of: &[Vec<&AttributeEdge>],
        visited: &mut [bool],
        used: &mut [bool],
        out: &mut String,
    ) {
        visited[node] = true;
        out.push('(');
        out.push_str(&self.vars[node]);
        out.push_str(" / ");
        out.push_str(&self.concepts[node]);
        for a in &attrs_of[node] {
            out.push_str(" :");
            out.push_str(&a.role);
            out.push(' ');
            out.push_str(&self.render_constant(&a.value));
        }
        for &(eidx, forward) in &adj[node] {
            if used[eidx] {
                continue;
            }
            used[eidx] = true;
            let e = &self.edges[eidx];
            let (role_suffix, other) = if forward { ("", e.dst) } else { ("-of", e.src) };
            out.push_str(" :");
            out.push_str(&e.role);
            out.push_str(role_suffix);
            out.push(' ');
            if visited[other] {
                out.push_str(&self.vars[other]);
            } else {
                self.emit_node(other, adj, attrs_of, visited, used, out);
            }
        }
        out.push(')');
    }

    fn render_constant(&self, value: &str) -> String {
        let needs_quotes = value.is_empty()
            || self.index.contains_key(value)
            || value
                .chars()
                .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | '/' | ':' | '"'));
        if needs_quotes {
            let escaped = value.replace('\\', "\\\\").replace('"', "\\\"");
            format!("\"{escaped}\"")
        } else {
            value.to_string()
        }
    }
}

/// Returns the canonical role when `role` is an inverse (`ARG0-of` gives
/// `ARG0`); `None` when the role is already canonical. A bare `-of` is not
/// treated as inverse.
pub(crate) fn strip_inverse_role(role: &str) -> Option<&str> {
    role.strip_suffix("-of").filter(|base| !base.is_empty())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TripleKind {
    Instance,
    Attribute,
    Relation,
}

/// One semantic triple. `arg1` is always a variable; `arg2` is a variable
/// for relation triples and a constant otherwise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub kind: TripleKind,
    pub role: String,
    pub arg1: String,
    pub arg2: String,
}

/// A deduplicated set of triples plus the variables they mention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleSet {
    triples: BTreeSet<Triple>,
    variables: BTreeSet<String>,
}

impl TripleSet {
    fn from_triple_set(triples: BTreeSet<Triple>) -> Self {
        let mut variables = BTreeSet::new();
        for t in &triples {
            variables.insert(t.arg1.clone());
            if t.kind == TripleKind::Relation {
                variables.insert(t.arg2.clone());
            }
        }
        TripleSet { triples, variables }
    }

    /// Builds a set from individual triples, e.g. a subset of another set.
    pub fn from_triples<I: IntoIterator<Item = Triple>>(triples: I) -> Self {
        Self::from_triple_set(triples.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.contains(t)
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.variables.iter().map(|s| s.as_str())
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    /// True when every triple of `self` also appears in `other`.
    pub fn is_subset(&self, other: &TripleSet) -> bool {
        self.triples.is_subset(&other.triples)
    }
}
