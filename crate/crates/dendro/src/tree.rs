//! Finite rooted non-planar trees with named edges.
//!
//! A tree is stored as a set of named edges together with a set of vertices;
//! every vertex has one output edge and finitely many input edges. The root is
//! the unique edge that is not an input of any vertex. Leaves are edges that
//! are not the output of any vertex; a vertex with no inputs is a stump. The
//! tree with a single edge and no vertices is written `eta` throughout.
//!
//! The concrete grammar is
//! `tree := edge | edge "[" tree ("," tree)* "]" | edge "[]"`,
//! with `edge := [A-Za-z0-9_]+`. A bare edge is a leaf, `e[]` caps `e` with a
//! stump, and the outermost edge is the root.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

pub type EdgeIx = usize;
pub type VertexIx = usize;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub out: EdgeIx,
    pub inputs: Vec<EdgeIx>,
}

/// A finite rooted non-planar tree. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    names: Vec<String>,
    root: EdgeIx,
    vertices: Vec<Vertex>,
    /// vertex having the edge as one of its inputs (`None` for the root)
    lower: Vec<Option<VertexIx>>,
    /// vertex having the edge as its output (`None` for leaves)
    upper: Vec<Option<VertexIx>>,
}

impl Tree {
    /// Build a tree from a root edge name and `(output, inputs)` vertex data.
    pub fn new(root: &str, vertex_data: &[(String, Vec<String>)]) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut index: BTreeMap<String, EdgeIx> = BTreeMap::new();
        let mut intern = |name: &str, names: &mut Vec<String>| -> EdgeIx {
            if let Some(&ix) = index.get(name) {
                ix
            } else {
                let ix = names.len();
                names.push(name.to_string());
                index.insert(name.to_string(), ix);
                ix
            }
        };
        let root_ix = intern(root, &mut names);
        let mut vertices = Vec::new();
        for (out, inputs) in vertex_data {
            let out_ix = intern(out, &mut names);
            let input_ixs = inputs.iter().map(|n| intern(n, &mut names)).collect();
            vertices.push(Vertex { out: out_ix, inputs: input_ixs });
        }
        Self::from_parts(names, root_ix, vertices)
    }

    fn from_parts(names: Vec<String>, root: EdgeIx, vertices: Vec<Vertex>) -> Result<Self> {
        let n = names.len();
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateEdge(name.clone()));
            }
        }
        let mut lower = vec![None; n];
        let mut upper = vec![None; n];
        for (v_ix, v) in vertices.iter().enumerate() {
            if upper[v.out].is_some() {
                return Err(Error::Invalid(format!(
                    "edge `{}` is the output of two vertices",
                    names[v.out]
                )));
            }
            upper[v.out] = Some(v_ix);
            let mut in_seen = BTreeSet::new();
            for &e in &v.inputs {
                if !in_seen.insert(e) {
                    return Err(Error::Invalid(format!(
                        "edge `{}` appears twice as an input of one vertex",
                        names[e]
                    )));
                }
                if lower[e].is_some() {
                    return Err(Error::Invalid(format!(
                        "edge `{}` is an input of two vertices",
                        names[e]
                    )));
                }
                lower[e] = Some(v_ix);
            }
        }
        if lower[root].is_some() {
            return Err(Error::Invalid(format!(
                "declared root `{}` is an input of a vertex",
                names[root]
            )));
        }
        for e in 0..n {
            if e != root && lower[e].is_none() {
                return Err(Error::Invalid(format!(
                    "edge `{}` is attached below no vertex but is not the root",
                    names[e]
                )));
            }
        }
        let tree = Tree { names, root, vertices, lower, upper };
        // connectivity: everything must be reachable from the root going up
        let mut reached_edges = BTreeSet::new();
        let mut stack = vec![tree.root];
        while let Some(e) = stack.pop() {
            if !reached_edges.insert(e) {
                continue;
            }
            if let Some(v) = tree.upper[e] {
                for &f in &tree.vertices[v].inputs {
                    stack.push(f);
                }
            }
        }
        if reached_edges.len() != tree.names.len() {
            return Err(Error::Invalid("tree is not connected".into()));
        }
        Ok(tree)
    }

    /// The tree with a single edge and no vertices.
    pub fn eta(edge: &str) -> Tree {
        Tree::new(edge, &[]).expect("eta is always valid")
    }

    /// One vertex of arity `n`: root `root`, leaves `leaves`.
    pub fn corolla(root: &str, leaves: &[&str]) -> Result<Tree> {
        Tree::new(
            root,
            &[(root.to_string(), leaves.iter().map(|s| s.to_string()).collect())],
        )
    }

    /// The linear tree with `n` vertices and edges named `0..=n`, root `n`.
    pub fn linear(n: usize) -> Tree {
        let mut vertex_data = Vec::new();
        for i in 1..=n {
            vertex_data.push((i.to_string(), vec![(i - 1).to_string()]));
        }
        Tree::new(&n.to_string(), &vertex_data).expect("linear trees are valid")
    }

    pub fn edge_count(&self) -> usize {
        self.names.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_names(&self) -> &[String] {
        &self.names
    }

    pub fn edge_name(&self, e: EdgeIx) -> &str {
        &self.names[e]
    }

    pub fn root(&self) -> EdgeIx {
        self.root
    }

    pub fn root_name(&self) -> &str {
        &self.names[self.root]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexIx) -> &Vertex {
        &self.vertices[v]
    }

    pub fn edge_ix(&self, name: &str) -> Result<EdgeIx> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownEdge(name.to_string()))
    }

    /// Vertex having `e` among its inputs; `None` exactly for the root.
    pub fn lower_vertex(&self, e: EdgeIx) -> Option<VertexIx> {
        self.lower[e]
    }

    /// Vertex having `e` as its output; `None` exactly for leaves.
    pub fn upper_vertex(&self, e: EdgeIx) -> Option<VertexIx> {
        self.upper[e]
    }

    pub fn is_leaf(&self, e: EdgeIx) -> bool {
        self.upper[e].is_none()
    }

    /// Inner edges are attached to a vertex on both ends.
    pub fn is_inner(&self, e: EdgeIx) -> bool {
        self.upper[e].is_some() && self.lower[e].is_some()
    }

    pub fn leaves(&self) -> Vec<EdgeIx> {
        (0..self.edge_count()).filter(|&e| self.is_leaf(e)).collect()
    }

    pub fn inner_edges(&self) -> Vec<EdgeIx> {
        (0..self.edge_count()).filter(|&e| self.is_inner(e)).collect()
    }

    /// Next edge on the path towards the root.
    pub fn parent_edge(&self, e: EdgeIx) -> Option<EdgeIx> {
        self.lower[e].map(|v| self.vertices[v].out)
    }

    /// Path from `e` to the root, inclusive on both ends.
    pub fn path_to_root(&self, e: EdgeIx) -> Vec<EdgeIx> {
        let mut path = vec![e];
        let mut cur = e;
        while let Some(p) = self.parent_edge(cur) {
            path.push(p);
            cur = p;
        }
        path
    }

    /// Edge order: `e <= f` iff the path from `e` to the root contains `f`.
    /// The root is the unique maximal element.
    pub fn edge_leq(&self, e: &str, f: &str) -> Result<bool> {
        let e = self.edge_ix(e)?;
        let f = self.edge_ix(f)?;
        Ok(self.edge_leq_ix(e, f))
    }

    pub fn edge_leq_ix(&self, e: EdgeIx, f: EdgeIx) -> bool {
        self.path_to_root(e).contains(&f)
    }

    /// Minimal edges of the poset: leaves and output edges of stumps.
    pub fn minimal_edges(&self) -> Vec<EdgeIx> {
        (0..self.edge_count())
            .filter(|&e| match self.upper[e] {
                None => true,
                Some(v) => self.vertices[v].inputs.is_empty(),
            })
            .collect()
    }

    /// Maximal monotone paths of the edge poset, one per minimal edge.
    pub fn maximal_paths(&self) -> Vec<Vec<EdgeIx>> {
        self.minimal_edges().into_iter().map(|e| self.path_to_root(e)).collect()
    }

    /// Monotone paths from the leaves to the root. Branches capped by stumps
    /// contribute no path: they cannot obstruct a spanning subtree, so these
    /// are the paths relevant to wideness.
    pub fn leaf_paths(&self) -> Vec<Vec<EdgeIx>> {
        self.leaves().into_iter().map(|e| self.path_to_root(e)).collect()
    }

    /// Parse the tree grammar. Whitespace is insignificant.
    pub fn parse(text: &str) -> Result<Tree> {
        let mut parser = Parser { bytes: text.as_bytes(), pos: 0 };
        parser.skip_ws();
        let (root, vertex_data) = parser.tree()?;
        parser.skip_ws();
        if parser.pos != parser.bytes.len() {
            return Err(Error::Parse {
                pos: parser.pos,
                msg: "trailing input after tree".into(),
            });
        }
        // every edge name must occur exactly once in the text
        let mut seen = BTreeSet::from([root.clone()]);
        for (_, inputs) in &vertex_data {
            for name in inputs {
                if !seen.insert(name.clone()) {
                    return Err(Error::DuplicateEdge(name.clone()));
                }
            }
        }
        Tree::new(&root, &vertex_data)
    }

    /// Inverse of `parse` up to child ordering.
    pub fn print(&self) -> String {
        let mut out = String::new();
        self.print_edge(self.root, &mut out);
        out
    }

    fn print_edge(&self, e: EdgeIx, out: &mut String) {
        out.push_str(&self.names[e]);
        if let Some(v) = self.upper[e] {
            out.push('[');
            for (i, &f) in self.vertices[v].inputs.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                self.print_edge(f, out);
            }
            out.push(']');
        }
    }

    /// A name-insensitive, order-insensitive structural key. Two trees share
    /// it iff they are isomorphic.
    pub fn canonical_key(&self) -> String {
        let mut memo = vec![None; self.edge_count()];
        self.canon_of(self.root, &mut memo)
    }

    fn canon_of(&self, e: EdgeIx, memo: &mut Vec<Option<String>>) -> String {
        if let Some(s) = &memo[e] {
            return s.clone();
        }
        let s = match self.upper[e] {
            None => "*".to_string(),
            Some(v) => {
                let mut parts: Vec<String> = self.vertices[v]
                    .inputs
                    .iter()
                    .map(|&f| self.canon_of(f, memo))
                    .collect();
                parts.sort();
                format!("[{}]", parts.join(","))
            }
        };
        memo[e] = Some(s.clone());
        s
    }

    /// Canonical form: a digest deciding isomorphism plus a relabeling of the
    /// original edge names onto canonical positions.
    pub fn canonical_form(&self) -> CanonicalForm {
        let key = self.canonical_key();
        let mut hasher = Sha256::new();
        hasher.update(key.as_bytes());
        let digest = hasher
            .finalize()
            .iter()
            .fold(String::new(), |mut acc, b| {
                let _ = write!(acc, "{b:02x}");
                acc
            });
        let mut relabeling = BTreeMap::new();
        let mut memo = vec![None; self.edge_count()];
        let mut next = 0usize;
        self.assign_positions(self.root, &mut memo, &mut next, &mut relabeling);
        CanonicalForm { digest, key, relabeling }
    }

    fn assign_positions(
        &self,
        e: EdgeIx,
        memo: &mut Vec<Option<String>>,
        next: &mut usize,
        relabeling: &mut BTreeMap<String, String>,
    ) {
        relabeling.insert(self.names[e].clone(), next.to_string());
        *next += 1;
        if let Some(v) = self.upper[e] {
            // visit children in canonical order, ties broken by original name
            let mut children: Vec<EdgeIx> = self.vertices[v].inputs.clone();
            children.sort_by(|&a, &b| {
                let ka = self.canon_of(a, memo);
                let kb = self.canon_of(b, memo);
                ka.cmp(&kb).then_with(|| self.names[a].cmp(&self.names[b]))
            });
            for c in children {
                self.assign_positions(c, memo, next, relabeling);
            }
        }
    }

    /// The same tree with edges renamed to canonical positions and children in
    /// canonical order. Isomorphic trees map to the identical value.
    pub fn canonicalize(&self) -> Tree {
        let form = self.canonical_form();
        self.relabel(&form.relabeling).expect("canonical relabeling is a bijection")
    }

    /// Rename edges through an injective map defined on every edge.
    pub fn relabel(&self, map: &BTreeMap<String, String>) -> Result<Tree> {
        let get = |e: EdgeIx| -> Result<String> {
            map.get(&self.names[e])
                .cloned()
                .ok_or_else(|| Error::UnknownEdge(self.names[e].clone()))
        };
        // rebuild in canonical child order so equal relabelings compare equal
        let mut order: Vec<EdgeIx> = Vec::new();
        let mut memo = vec![None; self.edge_count()];
        self.dfs_canonical(self.root, &mut memo, &mut order);
        let mut vertex_data = Vec::new();
        for &e in &order {
            if let Some(v) = self.upper[e] {
                let mut children = self.vertices[v].inputs.clone();
                children.sort_by(|&a, &b| {
                    let ka = self.canon_of(a, &mut memo);
                    let kb = self.canon_of(b, &mut memo);
                    ka.cmp(&kb).then_with(|| self.names[a].cmp(&self.names[b]))
                });
                let inputs: Result<Vec<String>> = children.iter().map(|&c| get(c)).collect();
                vertex_data.push((get(e)?, inputs?));
            }
        }
        Tree::new(&get(self.root)?, &vertex_data)
    }

    fn dfs_canonical(&self, e: EdgeIx, memo: &mut Vec<Option<String>>, order: &mut Vec<EdgeIx>) {
        order.push(e);
        if let Some(v) = self.upper[e] {
            let mut children = self.vertices[v].inputs.clone();
            children.sort_by(|&a, &b| {
                let ka = self.canon_of(a, memo);
                let kb = self.canon_of(b, memo);
                ka.cmp(&kb).then_with(|| self.names[a].cmp(&self.names[b]))
            });
            for c in children {
                self.dfs_canonical(c, memo, order);
            }
        }
    }

    pub fn is_isomorphic(&self, other: &Tree) -> bool {
        self.canonical_key() == other.canonical_key()
    }

    /// A deterministic identity for the named tree (names and structure).
    pub fn structural_key(&self) -> String {
        let mut parts: Vec<String> = self
            .vertices
            .iter()
            .map(|v| {
                let mut ins: Vec<&str> =
                    v.inputs.iter().map(|&e| self.names[e].as_str()).collect();
                ins.sort();
                format!("{}<-({})", self.names[v.out], ins.join(","))
            })
            .collect();
        parts.sort();
        format!("{};{}", self.names[self.root], parts.join(";"))
    }

    /// Graft `other` onto the leaf `leaf` of `self`, identifying the root of
    /// `other` with that leaf. Edge names must otherwise be disjoint; the
    /// merged edge keeps the name `leaf`.
    pub fn graft(&self, leaf: &str, other: &Tree) -> Result<Tree> {
        let leaf_ix = self.edge_ix(leaf)?;
        if !self.is_leaf(leaf_ix) {
            return Err(Error::NotALeaf(leaf.to_string()));
        }
        for name in other.edge_names() {
            if name != other.root_name() && self.names.contains(name) {
                return Err(Error::DuplicateEdge(name.clone()));
            }
        }
        let rename = |t: &Tree, e: EdgeIx| -> String {
            if e == t.root {
                leaf.to_string()
            } else {
                t.names[e].clone()
            }
        };
        let mut vertex_data: Vec<(String, Vec<String>)> = self
            .vertices
            .iter()
            .map(|v| {
                (
                    self.names[v.out].clone(),
                    v.inputs.iter().map(|&e| self.names[e].clone()).collect(),
                )
            })
            .collect();
        for v in &other.vertices {
            vertex_data.push((
                rename(other, v.out),
                v.inputs.iter().map(|&e| rename(other, e)).collect(),
            ));
        }
        Tree::new(self.root_name(), &vertex_data)
    }

    /// Join with the trivial tree: a new root edge and a unary vertex below
    /// the old root. Returns the new tree and the name of the new root edge;
    /// all old edges keep their names.
    pub fn join_eta(&self) -> (Tree, String) {
        let mut fresh = "rt".to_string();
        let mut k = 0usize;
        while self.names.contains(&fresh) {
            fresh = format!("rt{k}");
            k += 1;
        }
        let mut vertex_data: Vec<(String, Vec<String>)> =
            vec![(fresh.clone(), vec![self.root_name().to_string()])];
        for v in &self.vertices {
            vertex_data.push((
                self.names[v.out].clone(),
                v.inputs.iter().map(|&e| self.names[e].clone()).collect(),
            ));
        }
        let tree = Tree::new(&fresh, &vertex_data).expect("join of a valid tree is valid");
        (tree, fresh)
    }

    pub fn to_json(&self) -> TreeJson {
        TreeJson {
            schema: crate::SCHEMA.to_string(),
            root: self.root_name().to_string(),
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexJson {
                    out: self.names[v.out].clone(),
                    inputs: v.inputs.iter().map(|&e| self.names[e].clone()).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &TreeJson) -> Result<Tree> {
        let vertex_data: Vec<(String, Vec<String>)> = json
            .vertices
            .iter()
            .map(|v| (v.out.clone(), v.inputs.clone()))
            .collect();
        Tree::new(&json.root, &vertex_data)
    }

    /// DOT rendering: one node per edge, one diamond per vertex, arcs oriented
    /// towards the root.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tree {\n  rankdir=BT;\n");
        for name in &self.names {
            let _ = writeln!(out, "  \"e_{name}\" [label=\"{name}\", shape=ellipse];");
        }
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  \"v_{i}\" [label=\"\", shape=diamond];");
            let _ = writeln!(out, "  \"v_{i}\" -> \"e_{}\";", self.names[v.out]);
            for &e in &v.inputs {
                let _ = writeln!(out, "  \"e_{}\" -> \"v_{i}\";", self.names[e]);
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeJson {
    pub schema: String,
    pub root: String,
    pub vertices: Vec<VertexJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexJson {
    pub out: String,
    #[serde(rename = "in")]
    pub inputs: Vec<String>,
}

/// Canonical form of a tree: isomorphism-deciding digest plus the relabeling
/// of original edge names onto canonical positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub digest: String,
    pub key: String,
    pub relabeling: BTreeMap<String, String>,
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn edge_name(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::Parse { pos: self.pos, msg: "expected edge name".into() });
        }
        Ok(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    /// Returns (edge, vertex list below it).
    fn tree(&mut self) -> Result<(String, Vec<(String, Vec<String>)>)> {
        let name = self.edge_name()?;
        let mut vertex_data = Vec::new();
        if self.peek() == Some(b'[') {
            self.pos += 1;
            let mut inputs = Vec::new();
            if self.peek() == Some(b']') {
                self.pos += 1; // stump
            } else {
                loop {
                    let (child, mut sub) = self.tree()?;
                    inputs.push(child);
                    vertex_data.append(&mut sub);
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                        }
                        Some(b']') => {
                            self.pos += 1;
                            break;
                        }
                        _ => {
                            return Err(Error::Parse {
                                pos: self.pos,
                                msg: "expected `,` or `]`".into(),
                            })
                        }
                    }
                }
            }
            vertex_data.insert(0, (name.clone(), inputs));
        }
        Ok((name, vertex_data))
    }
}

/// A subtree of a host tree: a root edge together with an admissible set of
/// host vertices (every chosen vertex is connected to the subtree root through
/// chosen vertices).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subtree {
    pub root: EdgeIx,
    pub vertices: BTreeSet<VertexIx>,
}

impl Subtree {
    pub fn eta(root: EdgeIx) -> Subtree {
        Subtree { root, vertices: BTreeSet::new() }
    }

    pub fn full(tree: &Tree) -> Subtree {
        Subtree { root: tree.root(), vertices: (0..tree.vertex_count()).collect() }
    }

    /// Edges of the subtree: its root plus all inputs of chosen vertices.
    pub fn edges(&self, tree: &Tree) -> BTreeSet<EdgeIx> {
        let mut edges = BTreeSet::new();
        edges.insert(self.root);
        for &v in &self.vertices {
            for &e in &tree.vertex(v).inputs {
                edges.insert(e);
            }
        }
        edges
    }

    /// Leaves of the subtree: edges that are not outputs of chosen vertices.
    pub fn leaves(&self, tree: &Tree) -> BTreeSet<EdgeIx> {
        let outs: BTreeSet<EdgeIx> = self.vertices.iter().map(|&v| tree.vertex(v).out).collect();
        self.edges(tree).into_iter().filter(|e| !outs.contains(e)).collect()
    }

    /// Realize the subtree as a tree of its own, keeping host edge names.
    /// The embedding back into the host is the identity on names.
    pub fn to_tree(&self, tree: &Tree) -> Tree {
        let vertex_data: Vec<(String, Vec<String>)> = self
            .vertices
            .iter()
            .map(|&v| {
                let vx = tree.vertex(v);
                (
                    tree.edge_name(vx.out).to_string(),
                    vx.inputs.iter().map(|&e| tree.edge_name(e).to_string()).collect(),
                )
            })
            .collect();
        Tree::new(tree.edge_name(self.root), &vertex_data).expect("subtree data is valid")
    }
}

/// All subtrees of `tree`, including the single-edge subtree at every edge.
/// Deterministic order: by root edge, then by vertex set.
pub fn enumerate_subtrees(tree: &Tree) -> Vec<Subtree> {
    let mut result = Vec::new();
    for root in 0..tree.edge_count() {
        let mut sets: Vec<BTreeSet<VertexIx>> = Vec::new();
        collect_vertex_sets(tree, root, &mut sets);
        for vertices in sets {
            result.push(Subtree { root, vertices });
        }
    }
    result.sort();
    result
}

fn collect_vertex_sets(tree: &Tree, e: EdgeIx, out: &mut Vec<BTreeSet<VertexIx>>) {
    out.push(BTreeSet::new());
    if let Some(v) = tree.upper_vertex(e) {
        // choose a vertex set above each input independently
        let mut combos: Vec<BTreeSet<VertexIx>> = vec![BTreeSet::from([v])];
        for &input in &tree.vertex(v).inputs {
            let mut child_sets = Vec::new();
            collect_vertex_sets(tree, input, &mut child_sets);
            let mut next = Vec::new();
            for base in &combos {
                for cs in &child_sets {
                    let mut merged = base.clone();
                    merged.extend(cs.iter().copied());
                    next.push(merged);
                }
            }
            combos = next;
        }
        out.append(&mut combos);
    }
}

/// The unique subtree with the given root and exact leaf set, if any.
pub fn spanning_subtree(tree: &Tree, root: EdgeIx, leaves: &BTreeSet<EdgeIx>) -> Option<Subtree> {
    let mut vertices = BTreeSet::new();
    let mut stack = vec![root];
    while let Some(e) = stack.pop() {
        if leaves.contains(&e) {
            continue;
        }
        match tree.upper_vertex(e) {
            None => return None, // hit a host leaf that is not a requested leaf
            Some(v) => {
                vertices.insert(v);
                for &f in &tree.vertex(v).inputs {
                    stack.push(f);
                }
            }
        }
    }
    let sub = Subtree { root, vertices };
    if &sub.leaves(tree) == leaves {
        Some(sub)
    } else {
        None
    }
}

/// Iso-class representatives of trees with at most `max_vertices` vertices and
/// vertex arities at most `max_arity`, canonically named and deterministically
/// ordered (by vertex count, then canonical key).
pub fn enumerate_trees(max_vertices: usize, max_arity: usize) -> Vec<Tree> {
    let shapes = shapes_up_to(max_vertices, max_arity);
    let mut trees: Vec<Tree> = shapes.iter().map(|s| shape_to_tree(s)).collect();
    trees.sort_by_key(|t| (t.vertex_count(), t.canonical_key()));
    trees
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Shape {
    Leaf,
    Node(Vec<Shape>),
}

fn shapes_up_to(max_vertices: usize, max_arity: usize) -> Vec<Shape> {
    let mut all: Vec<Vec<Shape>> = vec![vec![Shape::Leaf]]; // by exact vertex count
    for v in 1..=max_vertices {
        let mut shapes_v: BTreeSet<Shape> = BTreeSet::new();
        for arity in 0..=max_arity {
            // children with total vertex count v - 1
            for combo in child_combos(&all, arity, v - 1) {
                shapes_v.insert(Shape::Node(combo));
            }
        }
        all.push(shapes_v.into_iter().collect());
    }
    all.into_iter().flatten().collect()
}

/// Sorted multisets of `arity` shapes with the given total vertex count.
fn child_combos(by_count: &[Vec<Shape>], arity: usize, total: usize) -> Vec<Vec<Shape>> {
    fn rec(
        by_count: &[Vec<Shape>],
        arity: usize,
        total: usize,
        min: &Option<Shape>,
        acc: &mut Vec<Shape>,
        out: &mut Vec<Vec<Shape>>,
    ) {
        if arity == 0 {
            if total == 0 {
                out.push(acc.clone());
            }
            return;
        }
        for count in 0..=total {
            if count >= by_count.len() {
                break;
            }
            for shape in &by_count[count] {
                if let Some(m) = min {
                    if shape < m {
                        continue; // keep multisets sorted to avoid duplicates
                    }
                }
                acc.push(shape.clone());
                rec(by_count, arity - 1, total - count, &Some(shape.clone()), acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(by_count, arity, total, &None, &mut Vec::new(), &mut out);
    out
}

fn shape_to_tree(shape: &Shape) -> Tree {
    let mut vertex_data: Vec<(String, Vec<String>)> = Vec::new();
    let mut next = 0usize;
    fn build(
        shape: &Shape,
        next: &mut usize,
        vertex_data: &mut Vec<(String, Vec<String>)>,
    ) -> String {
        let name = next.to_string();
        *next += 1;
        if let Shape::Node(children) = shape {
            let child_names: Vec<String> =
                children.iter().map(|c| build(c, next, vertex_data)).collect();
            vertex_data.push((name.clone(), child_names));
        }
        name
    }
    let root = build(shape, &mut next, &mut vertex_data);
    Tree::new(&root, &vertex_data).expect("generated shapes are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: subtree enumeration by pruning closure. Start from the full
    /// tree and repeatedly prune one external vertex (all of whose inputs are
    /// leaves of the current subtree, or a stump), collecting everything that
    /// appears; single-edge subtrees arise when the last vertex above an edge
    /// is pruned.
    fn subtrees_by_pruning(tree: &Tree) -> BTreeSet<Subtree> {
        let mut seen: BTreeSet<Subtree> = BTreeSet::new();
        let mut queue = vec![Subtree::full(tree)];
        while let Some(sub) = queue.pop() {
            if !seen.insert(sub.clone()) {
                continue;
            }
            let leaves = sub.leaves(tree);
            for &v in &sub.vertices {
                let external = tree.vertex(v).inputs.iter().all(|e| leaves.contains(e));
                if !external {
                    continue;
                }
                let mut pruned = sub.vertices.clone();
                pruned.remove(&v);
                if tree.vertex(v).out == sub.root {
                    // pruning the vertex at the subtree root leaves eta there,
                    // and for a one-vertex subtree every edge remains
                    if pruned.is_empty() {
                        for &e in sub.edges(tree).iter() {
                            queue.push(Subtree::eta(e));
                        }
                    }
                    // a root vertex with non-leaf inputs is handled when the
                    // upper parts have been pruned away first
                    if sub.vertices.len() > 1 {
                        // removing the root vertex of a bigger subtree splits
                        // it; the pieces are found through other prunings
                        continue;
                    }
                } else {
                    queue.push(Subtree { root: sub.root, vertices: pruned });
                }
            }
        }
        // pruning only shrinks towards the root component; add per-edge etas
        // reached through upper components as well
        let mut frontier: Vec<Subtree> = seen.iter().cloned().collect();
        while let Some(sub) = frontier.pop() {
            for &e in sub.edges(tree).iter() {
                // the maximal subtree above e, restricted to sub
                let mut vertices = BTreeSet::new();
                let mut stack = vec![e];
                while let Some(f) = stack.pop() {
                    if let Some(v) = tree.upper_vertex(f) {
                        if sub.vertices.contains(&v) {
                            vertices.insert(v);
                            stack.extend(tree.vertex(v).inputs.iter().copied());
                        }
                    }
                }
                let upper = Subtree { root: e, vertices };
                if seen.insert(upper.clone()) {
                    frontier.push(upper);
                }
            }
        }
        seen
    }

    #[test]
    fn parse_corolla() {
        let t = Tree::parse("r[a,b]").unwrap();
        assert_eq!(t.edge_count(), 3);
        assert_eq!(t.vertex_count(), 1);
        assert_eq!(t.root_name(), "r");
        assert_eq!(t.leaves().len(), 2);
    }

    #[test]
    fn parse_eta() {
        let t = Tree::parse("e").unwrap();
        assert_eq!(t.edge_count(), 1);
        assert_eq!(t.vertex_count(), 0);
        assert!(t.is_leaf(t.root()));
    }

    #[test]
    fn parse_stump() {
        let t = Tree::parse("r[a[]]").unwrap();
        assert_eq!(t.edge_count(), 2);
        assert_eq!(t.vertex_count(), 2);
        let a = t.edge_ix("a").unwrap();
        assert!(!t.is_leaf(a));
        assert!(t.minimal_edges().contains(&a));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Tree::parse("r[a,a]"), Err(Error::DuplicateEdge(_))));
        assert!(matches!(Tree::parse("r[a,"), Err(Error::Parse { .. })));
        assert!(matches!(Tree::parse(""), Err(Error::Parse { .. })));
        assert!(matches!(Tree::parse("r[a] x"), Err(Error::Parse { .. })));
    }

    #[test]
    fn parse_print_round_trip() {
        for text in ["r[a,b]", "e", "r[a[]]", "r[a[x,y],b]", "2[1[0]]"] {
            let t = Tree::parse(text).unwrap();
            let t2 = Tree::parse(&t.print()).unwrap();
            assert_eq!(t, t2);
        }
    }

    #[test]
    fn edge_order_linear() {
        let t = Tree::linear(2);
        assert!(t.edge_leq("0", "2").unwrap());
        assert!(t.edge_leq("0", "1").unwrap());
        assert!(!t.edge_leq("2", "0").unwrap());
        for e in ["0", "1", "2"] {
            assert!(t.edge_leq(e, e).unwrap());
            assert!(t.edge_leq(e, "2").unwrap(), "root is the maximum");
        }
    }

    #[test]
    fn edge_order_corolla_incomparable() {
        let t = Tree::parse("r[a,b]").unwrap();
        assert!(!t.edge_leq("a", "b").unwrap());
        assert!(!t.edge_leq("b", "a").unwrap());
        assert!(t.edge_leq("a", "r").unwrap());
    }

    #[test]
    fn edge_order_is_partial_order() {
        for t in enumerate_trees(4, 3) {
            let n = t.edge_count();
            for e in 0..n {
                assert!(t.edge_leq_ix(e, e));
                assert!(t.edge_leq_ix(e, t.root()));
                for f in 0..n {
                    if t.edge_leq_ix(e, f) && t.edge_leq_ix(f, e) {
                        assert_eq!(e, f, "antisymmetry");
                    }
                    for g in 0..n {
                        if t.edge_leq_ix(e, f) && t.edge_leq_ix(f, g) {
                            assert!(t.edge_leq_ix(e, g), "transitivity");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn subtree_counts_small() {
        assert_eq!(enumerate_subtrees(&Tree::eta("e")).len(), 1);
        assert_eq!(enumerate_subtrees(&Tree::parse("r[a,b]").unwrap()).len(), 4);
        assert_eq!(enumerate_subtrees(&Tree::linear(2)).len(), 6);
    }

    #[test]
    fn subtrees_match_pruning_closure() {
        for t in enumerate_trees(5, 2) {
            let direct: BTreeSet<Subtree> = enumerate_subtrees(&t).into_iter().collect();
            let pruned = subtrees_by_pruning(&t);
            assert_eq!(direct, pruned, "tree {}", t.print());
        }
        for text in ["r[a[x,y,z],b]", "r[a,b,c]", "r[a[],b[u],c]"] {
            let t = Tree::parse(text).unwrap();
            let direct: BTreeSet<Subtree> = enumerate_subtrees(&t).into_iter().collect();
            assert_eq!(direct, subtrees_by_pruning(&t), "tree {text}");
        }
    }

    #[test]
    fn subtree_count_by_product_formula() {
        // independent oracle: count(e) = 1 + prod over inputs of count(input)
        // when e has a vertex above it, else 1; total = sum over edges.
        fn count_above(t: &Tree, e: EdgeIx) -> usize {
            match t.upper_vertex(e) {
                None => 1,
                Some(v) => {
                    1 + t
                        .vertex(v)
                        .inputs
                        .iter()
                        .map(|&f| count_above(t, f))
                        .product::<usize>()
                }
            }
        }
        for t in enumerate_trees(5, 3) {
            let expected: usize = (0..t.edge_count()).map(|e| count_above(&t, e)).sum();
            assert_eq!(enumerate_subtrees(&t).len(), expected, "tree {}", t.print());
        }
    }

    #[test]
    fn spanning_subtree_agrees_with_enumeration() {
        for t in enumerate_trees(4, 3) {
            let all = enumerate_subtrees(&t);
            for sub in &all {
                let found = spanning_subtree(&t, sub.root, &sub.leaves(&t));
                assert_eq!(found.as_ref(), Some(sub));
            }
            // negative case: root with leaf set that is not a subtree's
            let leaves: BTreeSet<EdgeIx> = [t.root()].into_iter().collect();
            if t.vertex_count() > 0 && !t.is_leaf(t.root()) {
                let sub = spanning_subtree(&t, t.root(), &leaves);
                assert_eq!(sub, Some(Subtree::eta(t.root())));
            }
        }
    }

    #[test]
    fn graft_with_eta_is_identity() {
        let s = Tree::parse("r[a,b]").unwrap();
        let g = s.graft("a", &Tree::eta("z")).unwrap();
        assert!(g.is_isomorphic(&s));
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn graft_two_unary() {
        let s = Tree::parse("1[0]").unwrap();
        let r = Tree::parse("x[y]").unwrap();
        let g = s.graft("0", &r).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 3);
        assert!(g.is_isomorphic(&Tree::linear(2)));
    }

    #[test]
    fn graft_corolla_on_corolla() {
        let s = Tree::parse("r[a,b]").unwrap();
        let r = Tree::parse("x[y,z]").unwrap();
        let g = s.graft("a", &r).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 5);
    }

    #[test]
    fn graft_is_associative_on_disjoint_leaves() {
        let s = Tree::parse("r[a,b]").unwrap();
        let p = Tree::parse("p[q]").unwrap();
        let q = Tree::parse("u[v,w]").unwrap();
        let g1 = s.graft("a", &p).unwrap().graft("b", &q).unwrap();
        let g2 = s.graft("b", &q).unwrap().graft("a", &p).unwrap();
        assert_eq!(g1.structural_key(), g2.structural_key());
    }

    #[test]
    fn canonical_form_detects_isomorphism() {
        let a = Tree::parse("r[a,b]").unwrap();
        let b = Tree::parse("r[b,a]").unwrap();
        let c = Tree::parse("x[y,z]").unwrap();
        let d = Tree::parse("r[a]").unwrap();
        assert!(a.is_isomorphic(&b));
        assert!(a.is_isomorphic(&c));
        assert!(!a.is_isomorphic(&d));
        assert_eq!(a.canonical_form().digest, b.canonical_form().digest);
        assert_ne!(a.canonical_form().digest, d.canonical_form().digest);
    }

    #[test]
    fn canonical_distinguishes_stump_from_leaf() {
        let stump = Tree::parse("r[a[]]").unwrap();
        let leaf = Tree::parse("r[a]").unwrap();
        assert!(!stump.is_isomorphic(&leaf));
    }

    #[test]
    fn canonicalize_is_stable() {
        for t in enumerate_trees(4, 3) {
            let c = t.canonicalize();
            assert_eq!(c.structural_key(), c.canonicalize().structural_key());
            assert!(c.is_isomorphic(&t));
        }
    }

    #[test]
    fn join_eta_examples() {
        let (j, new_root) = Tree::eta("e").join_eta();
        assert!(j.is_isomorphic(&Tree::parse("r[x]").unwrap()));
        assert_eq!(j.root_name(), new_root);
        let (j2, _) = Tree::parse("1[0]").unwrap().join_eta();
        assert!(j2.is_isomorphic(&Tree::linear(2)));
        // old edges keep their names, the new root is fresh
        let t = Tree::parse("r[a,b]").unwrap();
        let (j3, nr) = t.join_eta();
        for name in t.edge_names() {
            assert!(j3.edge_names().contains(name));
        }
        assert!(!t.edge_names().contains(&nr));
    }

    #[test]
    fn tree_enumeration_counts() {
        let ts = enumerate_trees(1, 3);
        // eta, C_0, C_1, C_2, C_3
        assert_eq!(ts.len(), 5);
        let ts = enumerate_trees(2, 2);
        // 1 + 3 + (root arity 1: 3 children choices) + (root arity 2: 3)
        assert_eq!(ts.iter().filter(|t| t.vertex_count() == 2).count(), 6);
        // all distinct up to isomorphism
        let keys: BTreeSet<String> = ts.iter().map(|t| t.canonical_key()).collect();
        assert_eq!(keys.len(), ts.len());
    }

    #[test]
    fn json_round_trip() {
        let t = Tree::parse("r[a[x,y],b[]]").unwrap();
        let json = t.to_json();
        let back = Tree::from_json(&json).unwrap();
        assert_eq!(t, back);
        assert_eq!(
            serde_json::to_value(Tree::eta("e").to_json()).unwrap()["vertices"],
            serde_json::json!([])
        );
    }

    #[test]
    fn dot_export_counts_nodes() {
        let t = Tree::parse("r[a,b]").unwrap();
        let dot = t.to_dot();
        assert_eq!(dot.matches("shape=ellipse").count(), 3);
        assert_eq!(dot.matches("shape=diamond").count(), 1);
    }
}
