//! The Boardman–Vogt tensor product of two finite operads, computed as a
//! bounded closure of generator words under the defining relations.
//!
//! Words are trees of typed generators `p⊗y` (an operation of the left
//! operad at an object of the right one) and `c⊗q`, with leaves labeled by
//! input positions. Same-side compositions, the symmetric action on
//! generators, and unit splicing are normalized eagerly; the interchange
//! relation is closed by union-find over all normalized words within a
//! generator-count bound. Rewrites that would leave the bound set a frontier
//! flag instead of extending the closure.

use crate::error::{Error, Result};
use crate::operad::{FiniteOperad, Operad, OpRef};
use crate::perm;
use std::collections::BTreeMap;

/// Tensor object: a pair of object indices of the two factors.
pub type TObj = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    /// `p ⊗ y`: an operation of the left factor at a right-factor object.
    P { op: OpRef, y: usize },
    /// `c ⊗ q`: a left-factor object at an operation of the right factor.
    Q { c: usize, op: OpRef },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Leaf(usize),
    Vertex { gen: Gen, children: Vec<Node> },
}

/// A normalized tensor word: either an identity or a generator tree whose
/// leaves carry the input positions `0..arity`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Word {
    Unit(TObj),
    Tree(Node),
}

/// The tensor product data: all normalized words within the bound, grouped
/// into interchange classes.
#[derive(Debug)]
pub struct TensorOperad {
    pub left: FiniteOperad,
    pub right: FiniteOperad,
    pub word_bound: usize,
    words: Vec<Word>,
    index: BTreeMap<Word, usize>,
    class_of: Vec<usize>,
    pub frontier_touched: bool,
    by_signature: BTreeMap<(Vec<TObj>, TObj), Vec<usize>>,
}

struct Ctx<'a> {
    p: &'a FiniteOperad,
    q: &'a FiniteOperad,
}

impl<'a> Ctx<'a> {
    fn gen_inputs(&self, gen: &Gen) -> Vec<TObj> {
        match gen {
            Gen::P { op, y } => self.p.op_inputs(op).into_iter().map(|c| (c, *y)).collect(),
            Gen::Q { c, op } => self.q.op_inputs(op).into_iter().map(|y| (*c, y)).collect(),
        }
    }

    fn gen_output(&self, gen: &Gen) -> TObj {
        match gen {
            Gen::P { op, y } => (self.p.op_output(op), *y),
            Gen::Q { c, op } => (*c, self.q.op_output(op)),
        }
    }

    fn gen_is_unit(&self, gen: &Gen) -> bool {
        match gen {
            Gen::P { op, .. } => self.p.is_unit(op),
            Gen::Q { op, .. } => self.q.is_unit(op),
        }
    }

    fn gen_act(&self, gen: &Gen, sigma: &[usize]) -> Gen {
        match gen {
            Gen::P { op, y } => Gen::P { op: self.p.act(op, sigma), y: *y },
            Gen::Q { c, op } => Gen::Q { c: *c, op: self.q.act(op, sigma) },
        }
    }

    fn node_output(&self, node: &Node, leaf_colors: &BTreeMap<usize, TObj>) -> TObj {
        match node {
            Node::Leaf(i) => leaf_colors[i],
            Node::Vertex { gen, .. } => self.gen_output(gen),
        }
    }

    fn size(&self, node: &Node) -> usize {
        match node {
            Node::Leaf(_) => 0,
            Node::Vertex { children, .. } => {
                1 + children.iter().map(|c| self.size(c)).sum::<usize>()
            }
        }
    }

    /// Eager normalization: splice unit generators, contract same-side
    /// compositions, then pick the minimal symmetric twist bottom-up.
    fn normalize(&self, node: Node) -> Node {
        let node = self.splice_and_contract(node);
        self.canonical_twist(node)
    }

    fn splice_and_contract(&self, node: Node) -> Node {
        match node {
            Node::Leaf(i) => Node::Leaf(i),
            Node::Vertex { gen, children } => {
                let children: Vec<Node> =
                    children.into_iter().map(|c| self.splice_and_contract(c)).collect();
                if self.gen_is_unit(&gen) {
                    return children.into_iter().next().expect("units are unary");
                }
                // contract a same-side child, then re-run on the result
                for (i, child) in children.iter().enumerate() {
                    if let Node::Vertex { gen: cgen, .. } = child {
                        let composed = match (&gen, cgen) {
                            (Gen::P { op: p1, y }, Gen::P { op: p2, .. }) => self
                                .p
                                .compose(p1, i, p2)
                                .map(|op| Gen::P { op, y: *y }),
                            (Gen::Q { c, op: q1 }, Gen::Q { op: q2, .. }) => self
                                .q
                                .compose(q1, i, q2)
                                .map(|op| Gen::Q { c: *c, op }),
                            _ => None,
                        };
                        if let Some(new_gen) = composed {
                            let Node::Vertex { children: grand, .. } = child.clone() else {
                                unreachable!()
                            };
                            let mut new_children = children[..i].to_vec();
                            new_children.extend(grand);
                            new_children.extend_from_slice(&children[i + 1..]);
                            return self.splice_and_contract(Node::Vertex {
                                gen: new_gen,
                                children: new_children,
                            });
                        }
                    }
                }
                Node::Vertex { gen, children }
            }
        }
    }

    fn canonical_twist(&self, node: Node) -> Node {
        match node {
            Node::Leaf(i) => Node::Leaf(i),
            Node::Vertex { gen, children } => {
                let children: Vec<Node> =
                    children.into_iter().map(|c| self.canonical_twist(c)).collect();
                let n = children.len();
                let mut best: Option<(Gen, Vec<Node>)> = None;
                for sigma in perm::permutations(n) {
                    let candidate_gen = self.gen_act(&gen, &sigma);
                    let candidate_children: Vec<Node> =
                        sigma.iter().map(|&k| children[k].clone()).collect();
                    let candidate = (candidate_gen, candidate_children);
                    if best.as_ref().map(|b| candidate < *b).unwrap_or(true) {
                        best = Some(candidate);
                    }
                }
                let (gen, children) = best.expect("at least the identity twist");
                Node::Vertex { gen, children }
            }
        }
    }

    /// All single-step interchange rewrites of the word, normalized.
    fn rewrites(&self, node: &Node) -> Vec<Node> {
        let mut out = Vec::new();
        self.rewrites_at(node, &mut |new| out.push(new));
        out.into_iter().map(|n| self.normalize(n)).collect()
    }

    fn rewrites_at(&self, node: &Node, emit: &mut dyn FnMut(Node)) {
        let Node::Vertex { gen, children } = node else { return };
        // rewrite below, in context
        for (i, child) in children.iter().enumerate() {
            self.rewrites_at(child, &mut |new_child| {
                let mut cs = children.clone();
                cs[i] = new_child;
                emit(Node::Vertex { gen: gen.clone(), children: cs });
            });
        }
        match gen {
            Gen::P { op: p, y: z } => {
                let n = self.p.arity(p);
                if n == 0 {
                    // p⊗z with no inputs: equal to (d⊗q)∘(p⊗y_1,…,p⊗y_m)
                    // for every non-unit q with output z
                    let d = self.p.op_output(p);
                    for m in self.q.arities() {
                        for q in self.q.ops_with(z, m) {
                            if self.q.is_unit(&q) {
                                continue;
                            }
                            let new_children: Vec<Node> = self
                                .q
                                .op_inputs(&q)
                                .into_iter()
                                .map(|yj| Node::Vertex {
                                    gen: Gen::P { op: p.clone(), y: yj },
                                    children: Vec::new(),
                                })
                                .collect();
                            emit(Node::Vertex {
                                gen: Gen::Q { c: d, op: q },
                                children: new_children,
                            });
                        }
                    }
                } else {
                    // all children must be Q-vertices sharing one operation
                    let mut shared_q: Option<&OpRef> = None;
                    let mut grand: Vec<&[Node]> = Vec::new();
                    for child in children {
                        let Node::Vertex { gen: Gen::Q { op: q, .. }, children: g } = child
                        else {
                            return;
                        };
                        match shared_q {
                            None => shared_q = Some(q),
                            Some(prev) if prev == q => {}
                            Some(_) => return,
                        }
                        grand.push(g);
                    }
                    let q = shared_q.expect("n >= 1").clone();
                    let m = self.q.arity(&q);
                    let d = self.p.op_output(p);
                    let new_children: Vec<Node> = self
                        .q
                        .op_inputs(&q)
                        .into_iter()
                        .enumerate()
                        .map(|(j, yj)| Node::Vertex {
                            gen: Gen::P { op: p.clone(), y: yj },
                            children: (0..n).map(|i| grand[i][j].clone()).collect(),
                        })
                        .collect();
                    let _ = m;
                    emit(Node::Vertex { gen: Gen::Q { c: d, op: q }, children: new_children });
                }
            }
            Gen::Q { c: d, op: q } => {
                let m = self.q.arity(q);
                if m == 0 {
                    // d⊗q with no inputs: equal to (p⊗z)∘(c_1⊗q,…,c_n⊗q)
                    // for every non-unit p with output d
                    let z = self.q.op_output(q);
                    for n in self.p.arities() {
                        for p in self.p.ops_with(d, n) {
                            if self.p.is_unit(&p) {
                                continue;
                            }
                            let new_children: Vec<Node> = self
                                .p
                                .op_inputs(&p)
                                .into_iter()
                                .map(|ci| Node::Vertex {
                                    gen: Gen::Q { c: ci, op: q.clone() },
                                    children: Vec::new(),
                                })
                                .collect();
                            emit(Node::Vertex {
                                gen: Gen::P { op: p, y: z },
                                children: new_children,
                            });
                        }
                    }
                } else {
                    let mut shared_p: Option<&OpRef> = None;
                    let mut grand: Vec<&[Node]> = Vec::new();
                    for child in children {
                        let Node::Vertex { gen: Gen::P { op: p, .. }, children: g } = child
                        else {
                            return;
                        };
                        match shared_p {
                            None => shared_p = Some(p),
                            Some(prev) if prev == p => {}
                            Some(_) => return,
                        }
                        grand.push(g);
                    }
                    let p = shared_p.expect("m >= 1").clone();
                    let n = self.p.arity(&p);
                    let z = self.q.op_output(q);
                    let new_children: Vec<Node> = self
                        .p
                        .op_inputs(&p)
                        .into_iter()
                        .enumerate()
                        .map(|(i, ci)| Node::Vertex {
                            gen: Gen::Q { c: ci, op: q.clone() },
                            children: (0..m).map(|j| grand[j][i].clone()).collect(),
                        })
                        .collect();
                    let _ = n;
                    emit(Node::Vertex { gen: Gen::P { op: p, y: z }, children: new_children });
                }
            }
        }
    }
}

fn leaf_positions(node: &Node, out: &mut Vec<usize>) {
    match node {
        Node::Leaf(i) => out.push(*i),
        Node::Vertex { children, .. } => {
            for c in children {
                leaf_positions(c, out);
            }
        }
    }
}

fn leaf_colors(ctx: &Ctx, node: &Node, out: &mut BTreeMap<usize, TObj>) {
    if let Node::Vertex { gen, children } = node {
        let inputs = ctx.gen_inputs(gen);
        for (child, color) in children.iter().zip(inputs) {
            match child {
                Node::Leaf(i) => {
                    out.insert(*i, color);
                }
                Node::Vertex { .. } => leaf_colors(ctx, child, out),
            }
        }
    }
}

fn relabel(node: &Node, map: &dyn Fn(usize) -> usize) -> Node {
    match node {
        Node::Leaf(i) => Node::Leaf(map(*i)),
        Node::Vertex { gen, children } => Node::Vertex {
            gen: gen.clone(),
            children: children.iter().map(|c| relabel(c, map)).collect(),
        },
    }
}

impl TensorOperad {
    pub fn new(left: FiniteOperad, right: FiniteOperad, word_bound: usize) -> Result<TensorOperad> {
        let ctx = Ctx { p: &left, q: &right };
        // subtrees rooted at a vertex, by (output color, generator count)
        let mut by_out_size: BTreeMap<(TObj, usize), Vec<Node>> = BTreeMap::new();
        let mut gens: Vec<Gen> = Vec::new();
        for rep in left.op_orbit_representatives() {
            for sigma in perm::permutations(left.arity(&rep)) {
                let op = left.act(&rep, &sigma);
                if left.is_unit(&op) {
                    continue;
                }
                for y in right.objects() {
                    gens.push(Gen::P { op: op.clone(), y });
                }
            }
        }
        for rep in right.op_orbit_representatives() {
            for sigma in perm::permutations(right.arity(&rep)) {
                let op = right.act(&rep, &sigma);
                if right.is_unit(&op) {
                    continue;
                }
                for c in left.objects() {
                    gens.push(Gen::Q { c, op: op.clone() });
                }
            }
        }
        gens.sort();
        gens.dedup();
        // grow subtrees by size; children are leaves or smaller subtrees with
        // matching output colors, leaves labeled by depth-first position
        for size in 1..=word_bound {
            let mut new_nodes: Vec<(TObj, Node)> = Vec::new();
            for gen in &gens {
                let inputs = ctx.gen_inputs(gen);
                let output = ctx.gen_output(gen);
                let mut stacks: Vec<Vec<Node>> = vec![Vec::new()];
                // distribute size - 1 among children
                fn distribute(
                    ctx: &Ctx,
                    by_out_size: &BTreeMap<(TObj, usize), Vec<Node>>,
                    inputs: &[TObj],
                    slot: usize,
                    remaining: usize,
                    acc: &mut Vec<Node>,
                    out: &mut Vec<Vec<Node>>,
                ) {
                    if slot == inputs.len() {
                        if remaining == 0 {
                            out.push(acc.clone());
                        }
                        return;
                    }
                    // leaf child
                    acc.push(Node::Leaf(usize::MAX));
                    distribute(ctx, by_out_size, inputs, slot + 1, remaining, acc, out);
                    acc.pop();
                    // vertex child of each smaller size
                    for s in 1..=remaining {
                        if let Some(nodes) = by_out_size.get(&(inputs[slot], s)) {
                            for n in nodes {
                                acc.push(n.clone());
                                distribute(
                                    ctx,
                                    by_out_size,
                                    inputs,
                                    slot + 1,
                                    remaining - s,
                                    acc,
                                    out,
                                );
                                acc.pop();
                            }
                        }
                    }
                }
                let mut combos = Vec::new();
                distribute(&ctx, &by_out_size, &inputs, 0, size - 1, &mut Vec::new(), &mut combos);
                stacks.clear();
                for children in combos {
                    new_nodes.push((output, Node::Vertex { gen: gen.clone(), children }));
                }
            }
            for (output, node) in new_nodes {
                by_out_size.entry((output, size)).or_default().push(node);
            }
        }
        // assemble labeled words: assign every permutation of leaf positions
        let mut words: Vec<Word> = Vec::new();
        for c in left.objects() {
            for y in right.objects() {
                words.push(Word::Unit((c, y)));
            }
        }
        for ((_, _), nodes) in &by_out_size {
            for node in nodes {
                let mut slots = Vec::new();
                leaf_positions(node, &mut slots);
                let arity = slots.len();
                for sigma in perm::permutations(arity) {
                    let labeled = relabel_in_order(node, &sigma);
                    let normal = ctx.normalize(labeled);
                    words.push(Word::Tree(normal));
                }
            }
        }
        words.sort();
        words.dedup();
        // the normalized set may contain duplicates of smaller words only;
        // everything enumerated is within the bound by construction
        let index: BTreeMap<Word, usize> =
            words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();

        // interchange closure by union-find
        let mut parent: Vec<usize> = (0..words.len()).collect();
        fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let mut frontier_touched = false;
        for i in 0..words.len() {
            let Word::Tree(node) = &words[i] else { continue };
            for rewritten in ctx.rewrites(node) {
                if ctx.size(&rewritten) > word_bound {
                    frontier_touched = true;
                    continue;
                }
                match index.get(&Word::Tree(rewritten)) {
                    Some(&j) => {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        if a != b {
                            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                            parent[hi] = lo;
                        }
                    }
                    None => frontier_touched = true,
                }
            }
        }
        let class_of: Vec<usize> = (0..words.len())
            .map(|i| find(&mut parent, i))
            .collect();
        let mut by_signature: BTreeMap<(Vec<TObj>, TObj), Vec<usize>> = BTreeMap::new();
        let mut seen_classes: BTreeMap<usize, ()> = BTreeMap::new();
        for (i, word) in words.iter().enumerate() {
            let class = class_of[i];
            if seen_classes.insert(class, ()).is_some() {
                continue;
            }
            let sig = signature(&ctx, word);
            by_signature.entry(sig).or_default().push(class);
        }
        for classes in by_signature.values_mut() {
            classes.sort();
        }
        Ok(TensorOperad {
            left,
            right,
            word_bound,
            words,
            index,
            class_of,
            frontier_touched,
            by_signature,
        })
    }

    fn ctx(&self) -> Ctx<'_> {
        Ctx { p: &self.left, q: &self.right }
    }

    pub fn word(&self, class: usize) -> &Word {
        &self.words[class]
    }

    pub fn class_of_word(&self, word: &Word) -> Option<usize> {
        self.index.get(word).map(|&i| self.class_of[i])
    }

    pub fn object_count(&self) -> usize {
        self.left.objects().len() * self.right.objects().len()
    }

    pub fn class_count(&self) -> usize {
        self.by_signature.values().map(|v| v.len()).sum()
    }

    /// A short printable form of a class representative.
    pub fn describe(&self, class: usize) -> String {
        fn node_str(t: &TensorOperad, node: &Node) -> String {
            match node {
                Node::Leaf(i) => format!("#{i}"),
                Node::Vertex { gen, children } => {
                    let head = match gen {
                        Gen::P { op, y } => format!(
                            "{}⊗{}",
                            t.left.op_name(op),
                            t.right.object_name(*y)
                        ),
                        Gen::Q { c, op } => format!(
                            "{}⊗{}",
                            t.left.object_name(*c),
                            t.right.op_name(op)
                        ),
                    };
                    if children.is_empty() {
                        head
                    } else {
                        format!(
                            "({head})({})",
                            children
                                .iter()
                                .map(|c| node_str(t, c))
                                .collect::<Vec<_>>()
                                .join(",")
                        )
                    }
                }
            }
        }
        match &self.words[class] {
            Word::Unit((c, y)) => format!(
                "1_({},{})",
                self.left.object_name(*c),
                self.right.object_name(*y)
            ),
            Word::Tree(node) => node_str(self, node),
        }
    }

    /// For a tensor of the free operads on a corolla and on the one-vertex
    /// linear tree: do the two composites of the interchange square (the
    /// corolla operation before or after the unary one) land in one class?
    pub fn interchange_figure_check(&self) -> Result<bool> {
        let ctx = self.ctx();
        let c3 = self
            .left
            .underlying_tree()
            .ok_or_else(|| Error::Unsupported("left factor must be free on a corolla".into()))?;
        let c1 = self
            .right
            .underlying_tree()
            .ok_or_else(|| Error::Unsupported("right factor must be free on an interval".into()))?;
        if c3.vertex_count() != 1 || c1.vertex_count() != 1 || c1.edge_count() != 2 {
            return Err(Error::Unsupported(
                "the figure needs a corolla and the one-vertex linear tree".into(),
            ));
        }
        let n = c3.leaves().len();
        let leaves: Vec<usize> = c3.vertex(0).inputs.clone();
        let p_op = self.left.ops(&leaves, &c3.root())[0].clone();
        let q_leaf = c1.leaves()[0];
        let q_op = self.right.ops(&[q_leaf], &c1.root())[0].clone();
        // the unary generator below the corolla one
        let lhs = Node::Vertex {
            gen: Gen::Q { c: c3.root(), op: q_op.clone() },
            children: vec![Node::Vertex {
                gen: Gen::P { op: p_op.clone(), y: q_leaf },
                children: (0..n).map(Node::Leaf).collect(),
            }],
        };
        // the corolla generator below one unary generator per input
        let rhs = Node::Vertex {
            gen: Gen::P { op: p_op, y: c1.root() },
            children: leaves
                .iter()
                .enumerate()
                .map(|(i, &c)| Node::Vertex {
                    gen: Gen::Q { c, op: q_op.clone() },
                    children: vec![Node::Leaf(i)],
                })
                .collect(),
        };
        let lhs_class = self
            .class_of_word(&Word::Tree(ctx.normalize(lhs)))
            .ok_or_else(|| Error::BoundExceeded("figure word outside the bound".into()))?;
        let rhs_class = self
            .class_of_word(&Word::Tree(ctx.normalize(rhs)))
            .ok_or_else(|| Error::BoundExceeded("figure word outside the bound".into()))?;
        Ok(lhs_class == rhs_class)
    }

    /// Closure sanity: re-running every rewrite stays within known classes.
    pub fn verify_closed(&self) -> bool {
        let ctx = self.ctx();
        for (i, word) in self.words.iter().enumerate() {
            let Word::Tree(node) = word else { continue };
            for rewritten in ctx.rewrites(node) {
                if ctx.size(&rewritten) > self.word_bound {
                    continue;
                }
                if let Some(&j) = self.index.get(&Word::Tree(rewritten)) {
                    if self.class_of[j] != self.class_of[i] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn relabel_in_order(node: &Node, sigma: &[usize]) -> Node {
    // leaves appear in depth-first order i = 0, 1, …; send the k-th leaf to
    // position sigma[k]
    fn rec(node: &Node, sigma: &[usize], next: &mut usize) -> Node {
        match node {
            Node::Leaf(_) => {
                let v = sigma[*next];
                *next += 1;
                Node::Leaf(v)
            }
            Node::Vertex { gen, children } => Node::Vertex {
                gen: gen.clone(),
                children: children.iter().map(|c| rec(c, sigma, next)).collect(),
            },
        }
    }
    rec(node, sigma, &mut 0)
}

fn signature(ctx: &Ctx, word: &Word) -> (Vec<TObj>, TObj) {
    match word {
        Word::Unit(o) => (vec![*o], *o),
        Word::Tree(node) => {
            let mut colors = BTreeMap::new();
            leaf_colors(ctx, node, &mut colors);
            let arity = colors.len();
            let inputs: Vec<TObj> = (0..arity).map(|i| colors[&i]).collect();
            (inputs, ctx.node_output(node, &colors))
        }
    }
}

impl Operad for TensorOperad {
    type Obj = TObj;
    type Op = usize; // class index (the minimal word index in the class)

    fn objects(&self) -> Vec<TObj> {
        let mut out = Vec::new();
        for c in self.left.objects() {
            for y in self.right.objects() {
                out.push((c, y));
            }
        }
        out
    }

    fn op_inputs(&self, op: &usize) -> Vec<TObj> {
        signature(&self.ctx(), &self.words[*op]).0
    }

    fn op_output(&self, op: &usize) -> TObj {
        signature(&self.ctx(), &self.words[*op]).1
    }

    fn ops(&self, inputs: &[TObj], output: &TObj) -> Vec<usize> {
        self.by_signature
            .get(&(inputs.to_vec(), *output))
            .cloned()
            .unwrap_or_default()
    }

    fn ops_with(&self, output: &TObj, arity: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for ((inputs, o), classes) in &self.by_signature {
            if o == output && inputs.len() == arity {
                out.extend(classes.iter().copied());
            }
        }
        out.sort();
        out
    }

    fn arities(&self) -> Vec<usize> {
        let mut set: std::collections::BTreeSet<usize> =
            self.by_signature.keys().map(|(i, _)| i.len()).collect();
        set.insert(1);
        set.into_iter().collect()
    }

    fn unit(&self, obj: &TObj) -> usize {
        self.class_of[self.index[&Word::Unit(*obj)]]
    }

    fn compose(&self, p: &usize, slot: usize, q: &usize) -> Option<usize> {
        let ctx = self.ctx();
        match (&self.words[*p], &self.words[*q]) {
            (Word::Unit(_), _) => Some(*q),
            (Word::Tree(_), Word::Unit(_)) => Some(*p),
            (Word::Tree(pn), Word::Tree(qn)) => {
                let (p_inputs, _) = signature(&ctx, &self.words[*p]);
                let (q_inputs, _) = signature(&ctx, &self.words[*q]);
                let n = p_inputs.len();
                let m = q_inputs.len();
                if slot >= n {
                    return None;
                }
                // shift the labels of p above the slot, then substitute q
                // (its labels shifted by slot) for the leaf at the slot
                let grafted = substitute(
                    pn,
                    slot,
                    &relabel(qn, &|i| i + slot),
                    &|i| if i < slot { i } else { i + m - 1 },
                );
                let normal = ctx.normalize(grafted);
                self.class_of_word(&Word::Tree(normal))
            }
        }
    }

    fn transpose(&self, p: &usize, i: usize) -> usize {
        let ctx = self.ctx();
        match &self.words[*p] {
            Word::Unit(_) => *p,
            Word::Tree(node) => {
                let swapped = relabel(node, &|k| {
                    if k == i {
                        i + 1
                    } else if k == i + 1 {
                        i
                    } else {
                        k
                    }
                });
                let normal = ctx.normalize(swapped);
                self.class_of_word(&Word::Tree(normal))
                    .expect("transposition preserves the word size")
            }
        }
    }

    fn op_orbit_representatives(&self) -> Vec<usize> {
        // one word per class; classes are already minimal representatives
        let mut out: Vec<usize> = self.by_signature.values().flatten().copied().collect();
        out.sort();
        out.dedup();
        out
    }
}

fn substitute(node: &Node, slot: usize, replacement: &Node, shift: &dyn Fn(usize) -> usize) -> Node {
    match node {
        Node::Leaf(i) => {
            if *i == slot {
                replacement.clone()
            } else {
                Node::Leaf(shift(*i))
            }
        }
        Node::Vertex { gen, children } => Node::Vertex {
            gen: gen.clone(),
            children: children
                .iter()
                .map(|c| substitute(c, slot, replacement, shift))
                .collect(),
        },
    }
}

/// Compare dendrex counts of the nerve of the bounded tensor of two free
/// operads against an independent closure at a larger bound. `Ok(true)`
/// means the counts agree and neither closure touched its frontier.
pub fn compare_tensor_nerve(
    t: &crate::tree::Tree,
    s: &crate::tree::Tree,
    probe: &crate::tree::Tree,
    word_bound: usize,
) -> Result<bool> {
    let tensor = TensorOperad::new(
        FiniteOperad::free_on(t),
        FiniteOperad::free_on(s),
        word_bound,
    )?;
    let oracle = TensorOperad::new(
        FiniteOperad::free_on(t),
        FiniteOperad::free_on(s),
        word_bound + 2,
    )?;
    if tensor.frontier_touched || oracle.frontier_touched {
        return Err(Error::BoundExceeded(
            "tensor closure touched the word-size frontier; result inconclusive".into(),
        ));
    }
    let a = crate::operad::enumerate_dendrices(probe, &tensor).len();
    let b = crate::operad::enumerate_dendrices(probe, &oracle).len();
    Ok(a == b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::{from_category, FinCategory};
    use crate::tree::Tree;

    fn trivial_operad() -> FiniteOperad {
        from_category(&FinCategory::terminal())
    }

    #[test]
    fn object_set_is_the_product() {
        let t = TensorOperad::new(
            FiniteOperad::free_on(&Tree::parse("r[a,b,c]").unwrap()),
            FiniteOperad::free_on(&Tree::parse("1[0]").unwrap()),
            3,
        )
        .unwrap();
        assert_eq!(t.object_count(), 8);
        assert_eq!(t.objects().len(), 8);
    }

    #[test]
    fn tensor_with_trivial_operad_keeps_operations() {
        let p = FiniteOperad::free_on(&Tree::parse("r[a,b]").unwrap());
        let t = TensorOperad::new(p.clone(), trivial_operad(), 4).unwrap();
        assert!(!t.frontier_touched);
        // classes per signature match the operations of the left factor
        for rep in p.op_orbit_representatives() {
            for sigma in crate::perm::permutations(p.arity(&rep)) {
                let op = p.act(&rep, &sigma);
                let inputs: Vec<TObj> =
                    p.op_inputs(&op).into_iter().map(|c| (c, 0)).collect();
                let output = (p.op_output(&op), 0);
                assert_eq!(t.ops(&inputs, &output).len(), 1);
            }
        }
    }

    #[test]
    fn interchange_identifies_the_two_figure_composites() {
        // the 3-corolla tensored with the 1-corolla: composing the 3-ary
        // operation before or after the unary one lands in a single class
        let c3 = Tree::parse("r[e1,e2,e3]").unwrap();
        let c1 = Tree::parse("1[0]").unwrap();
        let p = FiniteOperad::free_on(&c3);
        let q = FiniteOperad::free_on(&c1);
        let tensor = TensorOperad::new(p.clone(), q.clone(), 5).unwrap();
        assert!(!tensor.frontier_touched);
        let ctx = Ctx { p: &tensor.left, q: &tensor.right };

        let p_op = {
            let (r, e1, e2, e3) = (
                c3.edge_ix("r").unwrap(),
                c3.edge_ix("e1").unwrap(),
                c3.edge_ix("e2").unwrap(),
                c3.edge_ix("e3").unwrap(),
            );
            tensor.left.ops(&[e1, e2, e3], &r)[0].clone()
        };
        let q_op = {
            let (e0, e1) = (c1.edge_ix("0").unwrap(), c1.edge_ix("1").unwrap());
            tensor.right.ops(&[e0], &e1)[0].clone()
        };
        let y0 = c1.edge_ix("0").unwrap();
        let y1 = c1.edge_ix("1").unwrap();
        let r = c3.edge_ix("r").unwrap();

        // (r⊗q) ∘ (p⊗0): the unary generator below the 3-ary one
        let lhs = Node::Vertex {
            gen: Gen::Q { c: r, op: q_op.clone() },
            children: vec![Node::Vertex {
                gen: Gen::P { op: p_op.clone(), y: y0 },
                children: vec![Node::Leaf(0), Node::Leaf(1), Node::Leaf(2)],
            }],
        };
        // (p⊗1) ∘ (e_i⊗q): the 3-ary generator below three unary ones
        let rhs = Node::Vertex {
            gen: Gen::P { op: p_op, y: y1 },
            children: (0..3)
                .map(|i| Node::Vertex {
                    gen: Gen::Q {
                        c: tensor.left.op_inputs(&tensor.left.op_by_name("r<e1,e2,e3").unwrap())[i],
                        op: q_op.clone(),
                    },
                    children: vec![Node::Leaf(i)],
                })
                .collect(),
        };
        let lhs_class = tensor.class_of_word(&Word::Tree(ctx.normalize(lhs))).unwrap();
        let rhs_class = tensor.class_of_word(&Word::Tree(ctx.normalize(rhs))).unwrap();
        assert_eq!(lhs_class, rhs_class);
    }

    #[test]
    fn unary_tensor_matches_product_category() {
        let p = from_category(&FinCategory::poset(1));
        let q = from_category(&FinCategory::poset(1));
        let t = TensorOperad::new(p, q, 4).unwrap();
        assert!(!t.frontier_touched);
        assert!(t.verify_closed());
        // hom-sets of the product poset category are singletons when defined
        for (c, y) in t.objects() {
            for (d, z) in t.objects() {
                let count = t.ops(&[(c, y)], &(d, z)).len();
                let expected = usize::from(c <= d && y <= z);
                assert_eq!(count, expected, "({c},{y}) → ({d},{z})");
            }
        }
    }

    #[test]
    fn closure_is_idempotent() {
        let t = TensorOperad::new(
            FiniteOperad::free_on(&Tree::parse("r[a,b]").unwrap()),
            FiniteOperad::free_on(&Tree::parse("1[0]").unwrap()),
            4,
        )
        .unwrap();
        assert!(t.verify_closed());
    }

    #[test]
    fn symmetry_of_class_counts() {
        let a = FiniteOperad::free_on(&Tree::parse("r[a,b]").unwrap());
        let b = FiniteOperad::free_on(&Tree::parse("1[0]").unwrap());
        let ab = TensorOperad::new(a.clone(), b.clone(), 4).unwrap();
        let ba = TensorOperad::new(b, a, 4).unwrap();
        for (inputs, output) in ab.by_signature.keys() {
            let swapped: Vec<TObj> = inputs.iter().map(|&(c, y)| (y, c)).collect();
            let so = (output.1, output.0);
            assert_eq!(
                ab.ops(inputs, output).len(),
                ba.ops(&swapped, &so).len(),
                "signature {inputs:?} → {output:?}"
            );
        }
    }

    #[test]
    fn tensor_of_etas_is_eta() {
        let eta = FiniteOperad::free_on(&Tree::eta("e"));
        let t = TensorOperad::new(eta.clone(), eta, 3).unwrap();
        assert_eq!(t.object_count(), 1);
        assert_eq!(t.class_count(), 1, "only the identity");
        assert!(!t.frontier_touched);
    }

    #[test]
    fn nerve_counts_match_oracle_at_small_trees() {
        let eta = Tree::eta("e");
        let c1 = Tree::parse("1[0]").unwrap();
        let c2 = Tree::parse("r[a,b]").unwrap();
        assert!(compare_tensor_nerve(&eta, &eta, &eta, 3).unwrap());
        assert!(compare_tensor_nerve(&c1, &c1, &c1, 4).unwrap());
        assert!(compare_tensor_nerve(&c2, &c1, &c2, 4).unwrap());
    }
}
