//! The operad of elements of a dendroidal set, its root functor, the section
//! and homotopy exhibiting the localization, and the strict Segal check.
//!
//! Objects of the operad of elements are pairs `(S, α)` with `S` a tree (up
//! to canonical form, within a vertex bound) and `α` a dendrex at `S`.
//! Operations into `(R, β)` are wide independent forest morphisms over the
//! base: tuples of tree morphisms `g_i: S_i → R` restricting `β` to each
//! `α_i`, with pairwise incomparable root images spanning a subtree from the
//! target root.

use crate::dendroidal::{DendroidalSet, Dx, TreeMorphism};
use crate::error::{Error, Result};
use crate::forest::{Forest, ForestMorphism};
use crate::operad::{Dendrex, FiniteOperad, Operad, OpRef};
use crate::tree::{self, EdgeIx, Subtree, Tree};
use std::collections::{BTreeMap, BTreeSet};

/// An object of the operad of elements: indices of a representative tree and
/// of a dendrex at it.
pub type ElObj = (usize, usize);

/// An operation of the operad of elements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElOp {
    pub inputs: Vec<ElObj>,
    pub output: ElObj,
    /// edge maps of the constituent tree morphisms into the output tree
    pub maps: Vec<BTreeMap<String, String>>,
}

/// The operad of elements of a dendroidal set, enumerated over trees with at
/// most `bound` vertices and arities at most `arity_cap`.
#[derive(Debug)]
pub struct ElementsOperad {
    pub base: DendroidalSet,
    pub bound: usize,
    pub arity_cap: usize,
    pub reps: Vec<Tree>,
    pub cells: Vec<Vec<Dx>>,
    rep_by_key: BTreeMap<String, usize>,
    cell_index: Vec<BTreeMap<Dx, usize>>,
    homs: std::cell::RefCell<BTreeMap<(usize, usize), std::rc::Rc<Vec<TreeMorphism>>>>,
    ops_cache: std::cell::RefCell<BTreeMap<(ElObj, usize), std::rc::Rc<Vec<ElOp>>>>,
}

impl Clone for ElementsOperad {
    fn clone(&self) -> Self {
        ElementsOperad {
            base: self.base.clone(),
            bound: self.bound,
            arity_cap: self.arity_cap,
            reps: self.reps.clone(),
            cells: self.cells.clone(),
            rep_by_key: self.rep_by_key.clone(),
            cell_index: self.cell_index.clone(),
            homs: std::cell::RefCell::new(self.homs.borrow().clone()),
            ops_cache: std::cell::RefCell::new(self.ops_cache.borrow().clone()),
        }
    }
}

impl ElementsOperad {
    pub fn new(base: &DendroidalSet, bound: usize, arity_cap: usize) -> Result<ElementsOperad> {
        let reps = tree::enumerate_trees(bound, arity_cap);
        let mut cells = Vec::new();
        let mut cell_index = Vec::new();
        for rep in &reps {
            let dendrices = base.dendrices(rep)?;
            cell_index.push(
                dendrices
                    .iter()
                    .cloned()
                    .enumerate()
                    .map(|(i, d)| (d, i))
                    .collect::<BTreeMap<Dx, usize>>(),
            );
            cells.push(dendrices);
        }
        let rep_by_key = reps.iter().enumerate().map(|(i, r)| (r.canonical_key(), i)).collect();
        Ok(ElementsOperad {
            base: base.clone(),
            bound,
            arity_cap,
            reps,
            cells,
            rep_by_key,
            cell_index,
            homs: std::cell::RefCell::new(BTreeMap::new()),
            ops_cache: std::cell::RefCell::new(BTreeMap::new()),
        })
    }

    fn hom_between(&self, si: usize, ti: usize) -> std::rc::Rc<Vec<TreeMorphism>> {
        if let Some(found) = self.homs.borrow().get(&(si, ti)) {
            return found.clone();
        }
        let computed =
            std::rc::Rc::new(crate::dendroidal::hom(&self.reps[si], &self.reps[ti]));
        self.homs.borrow_mut().insert((si, ti), computed.clone());
        computed
    }

    pub fn object_count(&self) -> usize {
        self.cells.iter().map(|c| c.len()).sum()
    }

    /// Count of objects up to the action of tree automorphisms.
    pub fn orbit_count(&self) -> Result<usize> {
        let mut total = 0usize;
        for (ri, rep) in self.reps.iter().enumerate() {
            let mut seen: BTreeSet<usize> = BTreeSet::new();
            for (ci, dx) in self.cells[ri].iter().enumerate() {
                if seen.contains(&ci) {
                    continue;
                }
                total += 1;
                for phi in crate::dendroidal::automorphisms(rep) {
                    let image = self.base.act(&phi, dx)?;
                    seen.insert(self.cell_index[ri][&image]);
                }
            }
        }
        Ok(total)
    }

    pub fn rep_index(&self, tree: &Tree) -> Result<usize> {
        self.rep_by_key.get(&tree.canonical_key()).copied().ok_or_else(|| {
            Error::BoundExceeded(format!(
                "tree `{}` outside the element bound {}",
                tree.print(),
                self.bound
            ))
        })
    }

    /// The canonical identification `rep → tree` for any in-bound tree.
    pub fn canonical_iso(&self, tree: &Tree) -> Result<TreeMorphism> {
        let rep = &self.reps[self.rep_index(tree)?];
        let to_pos = tree.canonical_form().relabeling;
        let rep_to_pos = rep.canonical_form().relabeling;
        let pos_to_tree: BTreeMap<String, String> =
            to_pos.into_iter().map(|(a, b)| (b, a)).collect();
        let edge_map = rep_to_pos
            .into_iter()
            .map(|(a, b)| (a, pos_to_tree[&b].clone()))
            .collect();
        TreeMorphism::new(rep.clone(), tree.clone(), edge_map)
    }

    /// The object carried by a dendrex at any in-bound named tree, together
    /// with the identification of the representative with that tree.
    pub fn object_of(&self, tree: &Tree, dx: &Dx) -> Result<(ElObj, TreeMorphism)> {
        let ri = self.rep_index(tree)?;
        let iso = self.canonical_iso(tree)?;
        let transported = self.base.act(&iso, dx)?;
        let ci = *self.cell_index[ri]
            .get(&transported)
            .ok_or_else(|| Error::Invalid("dendrex not found at its representative".into()))?;
        Ok(((ri, ci), iso))
    }

    pub fn object_tree(&self, obj: &ElObj) -> &Tree {
        &self.reps[obj.0]
    }

    pub fn object_dendrex(&self, obj: &ElObj) -> &Dx {
        &self.cells[obj.0][obj.1]
    }

    /// Realize an operation as a forest morphism.
    pub fn to_forest_morphism(&self, op: &ElOp) -> Result<ForestMorphism> {
        let source = Forest::new(
            op.inputs.iter().map(|o| self.object_tree(o).clone()).collect(),
        )?;
        let target = Forest::single(self.object_tree(&op.output).clone());
        let maps: Result<Vec<TreeMorphism>> = op
            .maps
            .iter()
            .zip(&op.inputs)
            .map(|(m, o)| {
                TreeMorphism::new(
                    self.object_tree(o).clone(),
                    self.object_tree(&op.output).clone(),
                    m.clone(),
                )
            })
            .collect();
        ForestMorphism::new(source, target, vec![0; op.inputs.len()], maps?)
    }

    /// Root image of constituent `i` inside the output tree.
    fn root_image(&self, op: &ElOp, i: usize) -> EdgeIx {
        let src = self.object_tree(&op.inputs[i]);
        let dst = self.object_tree(&op.output);
        dst.edge_ix(&op.maps[i][src.root_name()]).expect("validated edge map")
    }

    /// Unary operations sending root to root.
    pub fn is_root_preserving(&self, op: &ElOp) -> bool {
        op.inputs.len() == 1 && {
            let dst = self.object_tree(&op.output);
            self.root_image(op, 0) == dst.root()
        }
    }

    /// Candidate constituents into the target object `(R, β)` whose root
    /// lands on the edge `e` of `R`: triples of source object, edge map, and
    /// the source dendrex forced by restriction.
    fn slot_candidates(&self, output: &ElObj, e: EdgeIx) -> Result<Vec<(ElObj, BTreeMap<String, String>)>> {
        let (ri, ci) = *output;
        let beta = &self.cells[ri][ci];
        let mut out = Vec::new();
        for si in 0..self.reps.len() {
            for g in self.hom_between(si, ri).iter() {
                if g.apply_ix(g.source.root()) != e {
                    continue;
                }
                let alpha = self.base.act(g, beta)?;
                let ai = self.cell_index[si][&alpha];
                out.push(((si, ai), g.edge_map.clone()));
            }
        }
        Ok(out)
    }

    /// All operations with the given output object and arity (memoized).
    pub fn ops_into(&self, output: &ElObj, arity: usize) -> Result<Vec<ElOp>> {
        if let Some(found) = self.ops_cache.borrow().get(&(*output, arity)) {
            return Ok(found.as_ref().clone());
        }
        let computed = self.ops_into_uncached(output, arity)?;
        self.ops_cache
            .borrow_mut()
            .insert((*output, arity), std::rc::Rc::new(computed.clone()));
        Ok(computed)
    }

    fn ops_into_uncached(&self, output: &ElObj, arity: usize) -> Result<Vec<ElOp>> {
        let target = self.object_tree(output).clone();
        let mut result = Vec::new();
        // choose an ordered tuple of root-image edges with pairwise
        // incomparable entries whose set spans a subtree from the root
        let edges: Vec<EdgeIx> = (0..target.edge_count()).collect();
        let mut tuple: Vec<EdgeIx> = Vec::new();
        self.edge_tuples(&target, &edges, arity, &mut tuple, &mut |tuple| {
            let set: BTreeSet<EdgeIx> = tuple.iter().copied().collect();
            if tree::spanning_subtree(&target, target.root(), &set).is_none() {
                return Ok(());
            }
            let pools: Result<Vec<Vec<(ElObj, BTreeMap<String, String>)>>> =
                tuple.iter().map(|&e| self.slot_candidates(output, e)).collect();
            let pools = pools?;
            let mut chosen: Vec<usize> = Vec::new();
            combine(&pools, &mut chosen, &mut |picks| {
                result.push(ElOp {
                    inputs: picks.iter().map(|c| c.0).collect(),
                    output: *output,
                    maps: picks.iter().map(|c| c.1.clone()).collect(),
                });
            });
            Ok(())
        })?;
        result.sort();
        result.dedup();
        Ok(result)
    }

    /// Ordered tuples of pairwise incomparable edges.
    fn edge_tuples(
        &self,
        target: &Tree,
        edges: &[EdgeIx],
        remaining: usize,
        tuple: &mut Vec<EdgeIx>,
        f: &mut dyn FnMut(&[EdgeIx]) -> Result<()>,
    ) -> Result<()> {
        if remaining == 0 {
            return f(tuple);
        }
        for &e in edges {
            if tuple
                .iter()
                .any(|&d| target.edge_leq_ix(d, e) || target.edge_leq_ix(e, d))
            {
                continue;
            }
            tuple.push(e);
            self.edge_tuples(target, edges, remaining - 1, tuple, f)?;
            tuple.pop();
        }
        Ok(())
    }

    /// Largest possible arity into an object: one root image per maximal
    /// monotone path.
    pub fn max_arity(&self, output: &ElObj) -> usize {
        self.object_tree(output).minimal_edges().len()
    }

    /// Every operation between in-bound objects, deterministically ordered.
    pub fn all_ops(&self) -> Result<Vec<ElOp>> {
        let mut out = Vec::new();
        self.for_each_op(&mut |op| {
            out.push(op.clone());
            Ok(())
        })?;
        out.sort();
        Ok(out)
    }

    /// Stream every operation without retaining or caching them; the heavy
    /// sweeps use this to keep memory flat.
    pub fn for_each_op(&self, f: &mut dyn FnMut(&ElOp) -> Result<()>) -> Result<()> {
        for (ri, cells) in self.cells.iter().enumerate() {
            for ci in 0..cells.len() {
                let output = (ri, ci);
                for arity in 0..=self.max_arity(&output) {
                    for op in self.ops_into_uncached(&output, arity)? {
                        f(&op)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Freeness of the symmetric action, streamed: a non-trivial stabilizer
    /// needs two slots carrying the same input and map, which independence
    /// forbids; check that directly on every operation.
    pub fn sigma_free_streaming(&self) -> Result<bool> {
        let mut free = true;
        self.for_each_op(&mut |op| {
            let mut slots: Vec<(&ElObj, &BTreeMap<String, String>)> =
                op.inputs.iter().zip(op.maps.iter()).collect();
            slots.sort();
            if slots.windows(2).any(|w| w[0] == w[1]) {
                free = false;
            }
            Ok(())
        })?;
        Ok(free)
    }
}

fn combine<T>(pools: &[Vec<T>], chosen: &mut Vec<usize>, f: &mut dyn FnMut(&[&T])) {
    if chosen.len() == pools.len() {
        let picks: Vec<&T> = pools.iter().zip(chosen.iter()).map(|(p, &i)| &p[i]).collect();
        f(&picks);
        return;
    }
    for i in 0..pools[chosen.len()].len() {
        chosen.push(i);
        combine(pools, chosen, f);
        chosen.pop();
    }
}

fn compose_maps(
    first: &BTreeMap<String, String>,
    then: &BTreeMap<String, String>,
) -> BTreeMap<String, String> {
    first.iter().map(|(a, b)| (a.clone(), then[b].clone())).collect()
}

impl Operad for ElementsOperad {
    type Obj = ElObj;
    type Op = ElOp;

    fn objects(&self) -> Vec<ElObj> {
        let mut out = Vec::new();
        for (ri, cells) in self.cells.iter().enumerate() {
            for ci in 0..cells.len() {
                out.push((ri, ci));
            }
        }
        out
    }

    fn op_inputs(&self, op: &ElOp) -> Vec<ElObj> {
        op.inputs.clone()
    }

    fn op_output(&self, op: &ElOp) -> ElObj {
        op.output
    }

    fn ops(&self, inputs: &[ElObj], output: &ElObj) -> Vec<ElOp> {
        self.ops_into(output, inputs.len())
            .map(|all| all.into_iter().filter(|op| op.inputs == inputs).collect())
            .unwrap_or_default()
    }

    fn ops_with(&self, output: &ElObj, arity: usize) -> Vec<ElOp> {
        self.ops_into(output, arity).unwrap_or_default()
    }

    fn arities(&self) -> Vec<usize> {
        let max = self.reps.iter().map(|t| t.minimal_edges().len()).max().unwrap_or(0);
        (0..=max).collect()
    }

    fn unit(&self, obj: &ElObj) -> ElOp {
        let rep = self.object_tree(obj);
        ElOp {
            inputs: vec![*obj],
            output: *obj,
            maps: vec![rep.edge_names().iter().map(|n| (n.clone(), n.clone())).collect()],
        }
    }

    fn compose(&self, p: &ElOp, slot: usize, q: &ElOp) -> Option<ElOp> {
        if slot >= p.inputs.len() || q.output != p.inputs[slot] {
            return None;
        }
        let mut inputs = p.inputs[..slot].to_vec();
        inputs.extend_from_slice(&q.inputs);
        inputs.extend_from_slice(&p.inputs[slot + 1..]);
        let mut maps = p.maps[..slot].to_vec();
        maps.extend(q.maps.iter().map(|m| compose_maps(m, &p.maps[slot])));
        maps.extend_from_slice(&p.maps[slot + 1..]);
        Some(ElOp { inputs, output: p.output, maps })
    }

    fn transpose(&self, p: &ElOp, i: usize) -> ElOp {
        let mut q = p.clone();
        q.inputs.swap(i, i + 1);
        q.maps.swap(i, i + 1);
        q
    }

    fn op_orbit_representatives(&self) -> Vec<ElOp> {
        let mut reps = Vec::new();
        for op in self.all_ops().unwrap_or_default() {
            let mut sorted = op.clone();
            let mut order: Vec<usize> = (0..op.inputs.len()).collect();
            order.sort_by(|&a, &b| (&op.inputs[a], &op.maps[a]).cmp(&(&op.inputs[b], &op.maps[b])));
            sorted.inputs = order.iter().map(|&i| op.inputs[i]).collect();
            sorted.maps = order.iter().map(|&i| op.maps[i].clone()).collect();
            if sorted == op {
                reps.push(op);
            }
        }
        reps
    }
}

/// The set of root-preserving unary operations of the operad of elements.
pub fn root_preserving_set(elements: &ElementsOperad) -> Result<Vec<ElOp>> {
    Ok(elements
        .all_ops()?
        .into_iter()
        .filter(|op| elements.is_root_preserving(op))
        .collect())
}

/// Evaluation of a dendrex at the root edge: the object-level part of the
/// root functor, available for every backend.
pub fn root_object(x: &DendroidalSet, tree: &Tree, dx: &Dx) -> Result<Dx> {
    let eta = Tree::eta(tree.root_name());
    let inclusion = TreeMorphism::new(
        eta,
        tree.clone(),
        BTreeMap::from([(tree.root_name().to_string(), tree.root_name().to_string())]),
    )?;
    x.act(&inclusion, dx)
}

/// The root functor of a nerve: objects `(S, α) ↦ α(r_S)`, operations pushed
/// through the unique spanning operation of the output tree.
pub struct RootFunctor<'a> {
    pub elements: &'a ElementsOperad,
    pub operad: &'a FiniteOperad,
}

impl<'a> RootFunctor<'a> {
    pub fn new(elements: &'a ElementsOperad) -> Result<RootFunctor<'a>> {
        let operad = elements.base.operad().ok_or_else(|| {
            Error::Unsupported(
                "the full root functor needs a nerve backend; use root_object otherwise".into(),
            )
        })?;
        Ok(RootFunctor { elements, operad })
    }

    pub fn obj(&self, o: &ElObj) -> usize {
        let rep = self.elements.object_tree(o);
        let dx = self.elements.object_dendrex(o);
        dx.as_nerve().edge_obj[rep.root_name()]
    }

    pub fn op(&self, op: &ElOp) -> OpRef {
        let target = self.elements.object_tree(&op.output);
        let beta = self.elements.object_dendrex(&op.output).as_nerve();
        let ordering: Vec<EdgeIx> =
            (0..op.inputs.len()).map(|i| self.elements.root_image(op, i)).collect();
        let set: BTreeSet<EdgeIx> = ordering.iter().copied().collect();
        let sub = tree::spanning_subtree(target, target.root(), &set)
            .expect("wideness provides the spanning subtree");
        beta.eval(target, self.operad, &sub, &ordering)
    }

    /// Operad-morphism axioms, checked on the given operations.
    pub fn validate_on(&self, ops: &[ElOp]) -> Result<()> {
        let elements = self.elements;
        for op in ops {
            let image = self.op(op);
            let want_inputs: Vec<usize> = op.inputs.iter().map(|o| self.obj(o)).collect();
            if self.operad.op_inputs(&image) != want_inputs
                || self.operad.op_output(&image) != self.obj(&op.output)
            {
                return Err(Error::AxiomViolation("root functor breaks signatures".into()));
            }
            for i in 0..op.inputs.len().saturating_sub(1) {
                if self.op(&elements.transpose(op, i)) != self.operad.transpose(&image, i) {
                    return Err(Error::AxiomViolation(
                        "root functor breaks the symmetric action".into(),
                    ));
                }
            }
        }
        for o in elements.objects() {
            if self.op(&elements.unit(&o)) != self.operad.unit(&self.obj(&o)) {
                return Err(Error::AxiomViolation("root functor breaks units".into()));
            }
        }
        for p in ops {
            for (i, c) in p.inputs.iter().enumerate() {
                for q in ops.iter().filter(|q| q.output == *c) {
                    let pq = elements.compose(p, i, q).expect("matching colors");
                    let lhs = self.op(&pq);
                    let rhs = self
                        .operad
                        .compose(&self.op(p), i, &self.op(q))
                        .expect("free and table operads compose totally");
                    if lhs != rhs {
                        return Err(Error::AxiomViolation(
                            "root functor breaks composition".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The section of the root functor for a representable base: an edge goes to
/// the maximal subtree rooted there, an operation to the forest inclusion of
/// the maximal subtrees over its inputs.
pub struct SectionL<'a> {
    pub tree: &'a Tree,
    pub elements: &'a ElementsOperad,
    /// per edge: the object and the identification `rep → maximal subtree`
    objects: Vec<(ElObj, TreeMorphism)>,
}

impl<'a> SectionL<'a> {
    pub fn new(tree: &'a Tree, elements: &'a ElementsOperad) -> Result<SectionL<'a>> {
        if tree.vertex_count() > elements.bound {
            return Err(Error::BoundExceeded(
                "section needs the whole tree within the element bound".into(),
            ));
        }
        let mut objects = Vec::new();
        for e in 0..tree.edge_count() {
            let sub = maximal_subtree_above(tree, e);
            let u = sub.to_tree(tree);
            let dx = Dx::Nerve(inclusion_dendrex(tree, &sub));
            let (obj, iso) = elements.object_of(&u, &dx)?;
            objects.push((obj, iso));
        }
        Ok(SectionL { tree, elements, objects })
    }

    pub fn obj(&self, e: EdgeIx) -> ElObj {
        self.objects[e].0
    }

    /// Image of an operation of the free operad on the base tree.
    pub fn op(&self, op: &OpRef) -> ElOp {
        let OpRef::Free { root, ordering, .. } = op else {
            panic!("section expects free-operad operations");
        };
        let (out_obj, out_iso) = &self.objects[*root];
        let inv_out: BTreeMap<&String, &String> =
            out_iso.edge_map.iter().map(|(a, b)| (b, a)).collect();
        let mut maps = Vec::new();
        let mut inputs = Vec::new();
        for &e in ordering {
            let (in_obj, in_iso) = &self.objects[e];
            inputs.push(*in_obj);
            // rep of the input subtree → tree names → rep of the output subtree
            let map: BTreeMap<String, String> = in_iso
                .edge_map
                .iter()
                .map(|(a, b)| (a.clone(), inv_out[b].clone()))
                .collect();
            maps.push(map);
        }
        ElOp { inputs, output: *out_obj, maps }
    }
}

/// The maximal subtree with root `e`: all vertices above `e`.
pub fn maximal_subtree_above(tree: &Tree, e: EdgeIx) -> Subtree {
    let mut vertices = BTreeSet::new();
    let mut stack = vec![e];
    while let Some(f) = stack.pop() {
        if let Some(v) = tree.upper_vertex(f) {
            vertices.insert(v);
            stack.extend(tree.vertex(v).inputs.iter().copied());
        }
    }
    Subtree { root: e, vertices }
}

/// The dendrex of the representable of `tree` carried by a subtree inclusion.
pub fn inclusion_dendrex(tree: &Tree, sub: &Subtree) -> Dendrex<FiniteOperad> {
    let u = sub.to_tree(tree);
    let edge_obj = u
        .edge_names()
        .iter()
        .map(|n| (n.clone(), tree.edge_ix(n).unwrap()))
        .collect();
    let mut vertex_op = BTreeMap::new();
    for v in u.vertices() {
        let out_name = u.edge_name(v.out).to_string();
        let root = tree.edge_ix(&out_name).unwrap();
        let host_vertex = tree.upper_vertex(root).unwrap();
        let ordering: Vec<EdgeIx> = v
            .inputs
            .iter()
            .map(|&f| tree.edge_ix(u.edge_name(f)).unwrap())
            .collect();
        vertex_op.insert(
            out_name,
            OpRef::Free {
                root,
                vertices: BTreeSet::from([host_vertex]),
                ordering,
            },
        );
    }
    Dendrex { edge_obj, vertex_op }
}

/// The identity dendrex of the representable of `tree`.
pub fn identity_dendrex(tree: &Tree) -> Dendrex<FiniteOperad> {
    inclusion_dendrex(tree, &Subtree::full(tree))
}

/// The homotopy components: for each object `(S, α)`, the unique
/// root-preserving factorization of `α` through the maximal subtree over its
/// root evaluation.
pub fn homotopy_components(
    tree: &Tree,
    elements: &ElementsOperad,
    section: &SectionL,
) -> Result<BTreeMap<ElObj, ElOp>> {
    let mut components = BTreeMap::new();
    for (ri, rep) in elements.reps.iter().enumerate() {
        for ci in 0..elements.cells[ri].len() {
            let alpha = elements.cells[ri][ci].as_nerve().clone();
            let e = alpha.edge_obj[rep.root_name()];
            let target_obj = section.obj(e);
            let (_, out_iso) = &section.objects[e];
            let inv_out: BTreeMap<&String, &String> =
                out_iso.edge_map.iter().map(|(a, b)| (b, a)).collect();
            // rep edge → its image edge of the base tree → output rep name
            let map: BTreeMap<String, String> = rep
                .edge_names()
                .iter()
                .map(|n| {
                    let image = tree.edge_name(alpha.edge_obj[n]).to_string();
                    (n.clone(), inv_out[&image].clone())
                })
                .collect();
            components.insert((ri, ci), ElOp {
                inputs: vec![(ri, ci)],
                output: target_obj,
                maps: vec![map],
            });
        }
    }
    Ok(components)
}

/// Existence and uniqueness of each homotopy component among root-preserving
/// unary operations with the prescribed endpoints.
pub fn verify_homotopy_uniqueness(
    elements: &ElementsOperad,
    components: &BTreeMap<ElObj, ElOp>,
) -> Result<()> {
    for (obj, h) in components {
        if !elements.is_root_preserving(h) {
            return Err(Error::AxiomViolation(format!(
                "component at {obj:?} is not root preserving"
            )));
        }
        let candidates: Vec<ElOp> = elements
            .ops(&[*obj], &h.output)
            .into_iter()
            .filter(|op| elements.is_root_preserving(op))
            .collect();
        if candidates != vec![h.clone()] {
            return Err(Error::AxiomViolation(format!(
                "{} root-preserving factorizations at {obj:?}",
                candidates.len()
            )));
        }
    }
    Ok(())
}

/// The strict Segal comparison at a grafting decomposition `T = R ∪_a S`:
/// dendrices of the nerve of the operad of elements at the whole tree versus
/// pairs of restrictions agreeing at the grafting edge.
pub fn segal_check(elements: &ElementsOperad, t: &Tree, a: &str) -> Result<bool> {
    let a_ix = t.edge_ix(a)?;
    if !t.is_inner(a_ix) {
        return Err(Error::Precondition(format!(
            "edge `{a}` does not decompose `{}`",
            t.print()
        )));
    }
    let upper = maximal_subtree_above(t, a_ix);
    let lower = Subtree {
        root: t.root(),
        vertices: (0..t.vertex_count())
            .filter(|v| !upper.vertices.contains(v))
            .collect(),
    };
    let upper_inc = TreeMorphism::subtree_inclusion(t, &upper);
    let lower_inc = TreeMorphism::subtree_inclusion(t, &lower);
    let eta = Tree::eta(a);
    let eta_in_upper = TreeMorphism::new(
        eta.clone(),
        upper_inc.source.clone(),
        BTreeMap::from([(a.to_string(), a.to_string())]),
    )?;
    let eta_in_lower = TreeMorphism::new(
        eta,
        lower_inc.source.clone(),
        BTreeMap::from([(a.to_string(), a.to_string())]),
    )?;

    let whole = crate::operad::enumerate_dendrices(t, elements);
    let uppers = crate::operad::enumerate_dendrices(&upper_inc.source, elements);
    let lowers = crate::operad::enumerate_dendrices(&lower_inc.source, elements);

    // restriction of a dendrex along a subtree inclusion
    let restrict = |dx: &Dendrex<ElementsOperad>, inc: &TreeMorphism| {
        dx.precompose(t, elements, &inc.source, &inc.edge_map)
    };
    let mut images: BTreeSet<(Dendrex<ElementsOperad>, Dendrex<ElementsOperad>)> = BTreeSet::new();
    for dx in &whole {
        let pair = (restrict(dx, &lower_inc), restrict(dx, &upper_inc));
        if !images.insert(pair) {
            return Ok(false); // not injective
        }
    }
    // surjectivity onto agreeing pairs
    let mut agreeing = 0usize;
    for lo in &lowers {
        for up in &uppers {
            let lo_at_a = lo.precompose(&lower_inc.source, elements, &eta_in_lower.source, &eta_in_lower.edge_map);
            let up_at_a = up.precompose(&upper_inc.source, elements, &eta_in_upper.source, &eta_in_upper.edge_map);
            if lo_at_a == up_at_a {
                agreeing += 1;
                if !images.contains(&(lo.clone(), up.clone())) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(agreeing == whole.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::{from_category, FinCategory};

    fn representable_elements(text: &str, bound: usize, arity_cap: usize) -> (Tree, ElementsOperad) {
        let t = Tree::parse(text).unwrap();
        let x = DendroidalSet::representable(&t);
        let e = ElementsOperad::new(&x, bound, arity_cap).unwrap();
        (t, e)
    }

    #[test]
    fn elements_of_the_point() {
        // over the representable of eta only linear shapes carry dendrices
        let (_, elements) = representable_elements("e", 3, 2);
        for (ri, rep) in elements.reps.iter().enumerate() {
            let linear = rep.vertices().iter().all(|v| v.inputs.len() == 1);
            if elements.cells[ri].is_empty() {
                continue;
            }
            assert!(linear, "rep {} carries a dendrex", rep.print());
            assert_eq!(elements.cells[ri].len(), 1);
        }
        // operations from the point object to itself: the identity alone
        let eta_rep = elements.rep_index(&Tree::eta("q")).unwrap();
        let obj = (eta_rep, 0usize);
        assert_eq!(elements.ops(&[obj], &obj), vec![elements.unit(&obj)]);
        assert!(elements.ops_into(&obj, 0).unwrap().is_empty());
        // unary operations into it exist from every linear object (the
        // degenerate collapses), one each
        for op in elements.ops_into(&obj, 1).unwrap() {
            let fm = elements.to_forest_morphism(&op).unwrap();
            assert!(fm.is_wide() && fm.is_independent());
        }
    }

    #[test]
    fn elements_over_corolla_contains_leaf_inclusion() {
        let (t, elements) = representable_elements("r[a,b]", 2, 2);
        // the output object: the identity dendrex at the C_2 representative
        let c2 = elements.rep_index(&t).unwrap();
        let id_dx = Dx::Nerve(identity_dendrex(&t));
        let (out_obj, _) = elements.object_of(&t, &id_dx).unwrap();
        assert_eq!(out_obj.0, c2);
        let binary = elements.ops_into(&out_obj, 2).unwrap();
        for op in &binary {
            let fm = elements.to_forest_morphism(op).unwrap();
            assert!(fm.is_wide() && fm.is_independent());
        }
        // the operations from the two leaf points contain the leaf inclusion
        let eta_a = elements
            .object_of(&Tree::eta("a"), &Dx::Nerve(inclusion_dendrex(&t, &Subtree::eta(t.edge_ix("a").unwrap()))))
            .unwrap()
            .0;
        let eta_b = elements
            .object_of(&Tree::eta("b"), &Dx::Nerve(inclusion_dendrex(&t, &Subtree::eta(t.edge_ix("b").unwrap()))))
            .unwrap()
            .0;
        let between = elements.ops(&[eta_a, eta_b], &out_obj);
        assert_eq!(between.len(), 1, "exactly the leaf inclusion");
    }

    #[test]
    fn elements_operad_is_sigma_free() {
        for text in ["e", "r[a]", "r[a,b]"] {
            let (_, elements) = representable_elements(text, 3, 2);
            assert!(crate::operad::is_sigma_free(&elements), "base {text}");
        }
    }

    #[test]
    fn simplicial_elements_are_unary_only() {
        let x = DendroidalSet::nerve(from_category(&FinCategory::poset(2)));
        let elements = ElementsOperad::new(&x, 3, 1).unwrap();
        for op in elements.all_ops().unwrap() {
            assert_eq!(op.inputs.len(), 1, "only unary operations over a simplicial base");
        }
        // cross-count: unary ops (S,α)→(R,β) are exactly maps g with β∘g = α
        let mut direct = 0usize;
        for (ri, r) in elements.reps.iter().enumerate() {
            for ci in 0..elements.cells[ri].len() {
                let beta = &elements.cells[ri][ci];
                for (si, s) in elements.reps.iter().enumerate() {
                    let _ = si;
                    for g in crate::dendroidal::hom(s, r) {
                        let _ = x.act(&g, beta).unwrap();
                        direct += 1;
                    }
                }
            }
        }
        assert_eq!(elements.all_ops().unwrap().len(), direct);
    }

    #[test]
    fn root_functor_on_objects_and_units() {
        let (t, elements) = representable_elements("r[a,b]", 2, 2);
        let r = RootFunctor::new(&elements).unwrap();
        for obj in elements.objects() {
            let rep = elements.object_tree(&obj);
            let dx = elements.object_dendrex(&obj).as_nerve();
            assert_eq!(r.obj(&obj), dx.edge_obj[rep.root_name()]);
        }
        let ops = elements.all_ops().unwrap();
        r.validate_on(&ops).unwrap();
        let _ = t;
    }

    #[test]
    fn section_objects_are_maximal_subtrees() {
        let (t, elements) = representable_elements("2[1[0]]", 3, 2);
        let l = SectionL::new(&t, &elements).unwrap();
        // edge 0: eta; edge 1: [1]; edge 2: the whole tree
        let e0 = t.edge_ix("0").unwrap();
        let e2 = t.edge_ix("2").unwrap();
        assert_eq!(elements.object_tree(&l.obj(e0)).vertex_count(), 0);
        assert_eq!(elements.object_tree(&l.obj(e2)).vertex_count(), 2);
    }

    #[test]
    fn section_splits_the_root_functor() {
        for text in ["e", "r[a]", "r[a,b]", "2[1[0]]", "r[a[]]"] {
            let (t, elements) = representable_elements(text, 3, 3);
            let l = SectionL::new(&t, &elements).unwrap();
            let r = RootFunctor::new(&elements).unwrap();
            let free = FiniteOperad::free_on(&t);
            for e in 0..t.edge_count() {
                assert_eq!(r.obj(&l.obj(e)), e, "objects split on {text}");
            }
            for op in free.op_orbit_representatives() {
                let lop = l.op(&op);
                assert_eq!(r.op(&lop), op, "operations split on {text}");
            }
        }
    }

    #[test]
    fn homotopy_components_factor_and_are_unique() {
        let (t, elements) = representable_elements("r[a,b]", 2, 2);
        let l = SectionL::new(&t, &elements).unwrap();
        let h = homotopy_components(&t, &elements, &l).unwrap();
        verify_homotopy_uniqueness(&elements, &h).unwrap();
        // identity object: the component is the identity
        let id_obj = elements.object_of(&t, &Dx::Nerve(identity_dendrex(&t))).unwrap().0;
        assert_eq!(h[&id_obj], elements.unit(&id_obj));
    }

    #[test]
    fn homotopy_passes_interchange() {
        let (t, elements) = representable_elements("r[a,b]", 2, 2);
        let l = SectionL::new(&t, &elements).unwrap();
        let r = RootFunctor::new(&elements).unwrap();
        let h = homotopy_components(&t, &elements, &l).unwrap();
        let ops = elements.all_ops().unwrap();
        let ok = crate::dendroidal::check_homotopy(
            &elements,
            &elements,
            &ops,
            &|o: &ElObj| *o,
            &|op: &ElOp| op.clone(),
            &|o: &ElObj| l.obj(r.obj(o)),
            &|op: &ElOp| l.op(&r.op(op)),
            &|o: &ElObj| h.get(o).cloned(),
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn perturbed_homotopy_fails_interchange() {
        let (t, elements) = representable_elements("r[a,b]", 2, 2);
        let l = SectionL::new(&t, &elements).unwrap();
        let r = RootFunctor::new(&elements).unwrap();
        let mut h = homotopy_components(&t, &elements, &l).unwrap();
        // replace one non-identity component by a wrong root-preserving map:
        // swap the leaves in the component of the identity at C_2
        let id_obj = elements.object_of(&t, &Dx::Nerve(identity_dendrex(&t))).unwrap().0;
        let swap: BTreeMap<String, String> = BTreeMap::from([
            ("r".to_string(), "r".to_string()),
            ("a".to_string(), "b".to_string()),
            ("b".to_string(), "a".to_string()),
        ]);
        let rep = elements.object_tree(&id_obj).clone();
        let iso = elements.canonical_iso(&t).unwrap();
        // conjugate the swap onto the representative
        let m = iso.then(&TreeMorphism::new(t.clone(), t.clone(), swap).unwrap()).unwrap();
        let back = iso.inverse().unwrap();
        let conj = m.then(&back).unwrap();
        let _ = rep;
        h.insert(
            id_obj,
            ElOp { inputs: vec![id_obj], output: id_obj, maps: vec![conj.edge_map] },
        );
        let ops = elements.all_ops().unwrap();
        let ok = crate::dendroidal::check_homotopy(
            &elements,
            &elements,
            &ops,
            &|o: &ElObj| *o,
            &|op: &ElOp| op.clone(),
            &|o: &ElObj| l.obj(r.obj(o)),
            &|op: &ElOp| l.op(&r.op(op)),
            &|o: &ElObj| h.get(o).cloned(),
        )
        .unwrap();
        assert!(!ok);
    }

    #[test]
    fn segal_condition_on_linear_decomposition() {
        let (_, elements) = representable_elements("r[a,b]", 2, 2);
        let t = Tree::linear(2);
        assert!(segal_check(&elements, &t, "1").unwrap());
    }

    #[test]
    fn naturality_of_root_functor() {
        // r_X ∘ (elements of α) = α ∘ r_T on objects and operations
        let t = Tree::parse("r[a,b]").unwrap();
        let x = DendroidalSet::nerve(FiniteOperad::free_on(&Tree::parse("u[v,w]").unwrap()));
        let el_t = ElementsOperad::new(&DendroidalSet::representable(&t), 2, 2).unwrap();
        let el_x = ElementsOperad::new(&x, 2, 2).unwrap();
        let r_t = RootFunctor::new(&el_t).unwrap();
        let r_x = RootFunctor::new(&el_x).unwrap();
        for alpha_dx in x.dendrices(&t).unwrap() {
            let alpha = alpha_dx.as_nerve();
            // functor on objects: postcompose the defining dendrex
            for obj in el_t.objects() {
                let rep = el_t.object_tree(&obj);
                let beta = el_t.object_dendrex(&obj).as_nerve();
                let beta_map: BTreeMap<String, String> = rep
                    .edge_names()
                    .iter()
                    .map(|n| (n.clone(), t.edge_name(beta.edge_obj[n]).to_string()))
                    .collect();
                let beta_m = TreeMorphism::new(rep.clone(), t.clone(), beta_map).unwrap();
                let image_dx = x.act(&beta_m, &alpha_dx).unwrap();
                let (image_obj, _) = el_x.object_of(rep, &image_dx).unwrap();
                // lhs: root functor downstairs after the induced functor
                let lhs = r_x.obj(&image_obj);
                // rhs: α applied to the root evaluation upstairs
                let rhs = alpha.edge_obj[t.edge_name(r_t.obj(&obj))];
                assert_eq!(lhs, rhs);
            }
        }
    }
}
