//! Colored symmetric operads with finite object sets, and the free operad on
//! a tree.
//!
//! Operations are stored per ordered input signature. The symmetric action is
//! a right action: `act(p, σ)` has input list `p.inputs[σ(0)], p.inputs[σ(1)],
//! …`, and `act(act(p, σ), τ) = act(p, σ∘τ)`. Partial composition `p ∘_i q`
//! substitutes `q` into slot `i` (0-based) of `p`.

use crate::error::{Error, Result};
use crate::perm;
use crate::tree::{self, EdgeIx, Subtree, Tree};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;
use std::hash::Hash;

/// Query interface shared by table operads, free operads on trees, operads of
/// elements, and tensor products.
pub trait Operad {
    type Obj: Clone + Ord + Eq + Hash + Debug;
    type Op: Clone + Ord + Eq + Hash + Debug;

    fn objects(&self) -> Vec<Self::Obj>;
    fn op_inputs(&self, op: &Self::Op) -> Vec<Self::Obj>;
    fn op_output(&self, op: &Self::Op) -> Self::Obj;
    /// Operations with the exact ordered signature.
    fn ops(&self, inputs: &[Self::Obj], output: &Self::Obj) -> Vec<Self::Op>;
    /// Operations with the given output and arity, across all input lists.
    fn ops_with(&self, output: &Self::Obj, arity: usize) -> Vec<Self::Op>;
    /// Arities that can appear in `ops_with` queries.
    fn arities(&self) -> Vec<usize>;
    fn unit(&self, obj: &Self::Obj) -> Self::Op;
    fn compose(&self, p: &Self::Op, slot: usize, q: &Self::Op) -> Option<Self::Op>;
    /// Adjacent transposition of input slots `i` and `i+1`.
    fn transpose(&self, p: &Self::Op, i: usize) -> Self::Op;
    /// One representative per symmetric orbit; the default returns every op.
    fn op_orbit_representatives(&self) -> Vec<Self::Op>;

    fn arity(&self, op: &Self::Op) -> usize {
        self.op_inputs(op).len()
    }

    fn act(&self, op: &Self::Op, sigma: &[usize]) -> Self::Op {
        let mut cur = op.clone();
        for i in perm::adjacent_decomposition(sigma) {
            cur = self.transpose(&cur, i);
        }
        cur
    }

    fn is_unit(&self, op: &Self::Op) -> bool {
        self.arity(op) == 1 && *op == self.unit(&self.op_output(op))
    }
}

/// Stabilizer check: the symmetric groups act freely on the unions of
/// operation sets over input permutations.
pub fn is_sigma_free<O: Operad>(operad: &O) -> bool {
    for op in operad.op_orbit_representatives() {
        let n = operad.arity(&op);
        for sigma in perm::permutations(n) {
            if !perm::is_identity(&sigma) && operad.act(&op, &sigma) == op {
                return false;
            }
        }
    }
    true
}

/// The preorder on objects generated by `input ≤ output` over all operations,
/// closed reflexively and transitively. Returned as a containment matrix in
/// the order of `operad.objects()`.
pub fn object_poset<O: Operad>(operad: &O) -> Vec<Vec<bool>> {
    let objects = operad.objects();
    let index: BTreeMap<&O::Obj, usize> =
        objects.iter().enumerate().map(|(i, o)| (o, i)).collect();
    let n = objects.len();
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for op in operad.op_orbit_representatives() {
        let out = index[&operad.op_output(&op)];
        for input in operad.op_inputs(&op) {
            leq[index[&input]][out] = true;
        }
    }
    // transitive closure
    for k in 0..n {
        for i in 0..n {
            if leq[i][k] {
                for j in 0..n {
                    if leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
    }
    leq
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpData {
    pub name: String,
    pub inputs: Vec<usize>,
    pub output: usize,
}

/// Explicit table-backed operad: operation lists per signature, a unit per
/// object, partial composition and adjacent-swap tables. Validated on
/// construction.
#[derive(Debug, Clone)]
pub struct TableData {
    pub ops: Vec<OpData>,
    pub by_signature: BTreeMap<(Vec<usize>, usize), Vec<usize>>,
    pub units: Vec<usize>,
    pub comp: BTreeMap<(usize, usize, usize), usize>,
    pub swap: BTreeMap<(usize, usize), usize>,
}

/// A finite colored symmetric operad. `Free` is backed by subtree data of a
/// tree; `Table` by explicit tables.
#[derive(Debug, Clone)]
pub enum FiniteOperad {
    Table { objects: Vec<String>, data: TableData },
    Free { tree: Tree, subtree_by_root_leaves: BTreeMap<(EdgeIx, BTreeSet<EdgeIx>), Subtree> },
}

/// Operation handle for `FiniteOperad`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpRef {
    Table(usize),
    /// A subtree of the underlying tree together with an ordering of its
    /// leaf set.
    Free { root: EdgeIx, vertices: BTreeSet<usize>, ordering: Vec<EdgeIx> },
}

impl FiniteOperad {
    /// The free operad on a tree: objects are the edges; there is one
    /// operation per subtree and ordering of its leaves; composition grafts
    /// subtrees.
    pub fn free_on(tree: &Tree) -> FiniteOperad {
        let mut map = BTreeMap::new();
        for sub in tree::enumerate_subtrees(tree) {
            map.insert((sub.root, sub.leaves(tree)), sub);
        }
        FiniteOperad::Free { tree: tree.clone(), subtree_by_root_leaves: map }
    }

    pub fn table(objects: Vec<String>, ops: Vec<OpData>, units: Vec<usize>,
                 comp: BTreeMap<(usize, usize, usize), usize>,
                 swap: BTreeMap<(usize, usize), usize>) -> Result<FiniteOperad> {
        let mut by_signature: BTreeMap<(Vec<usize>, usize), Vec<usize>> = BTreeMap::new();
        for (i, op) in ops.iter().enumerate() {
            by_signature.entry((op.inputs.clone(), op.output)).or_default().push(i);
        }
        let operad = FiniteOperad::Table {
            objects,
            data: TableData { ops, by_signature, units, comp, swap },
        };
        operad.validate()?;
        Ok(operad)
    }

    pub fn object_names(&self) -> Vec<String> {
        match self {
            FiniteOperad::Table { objects, .. } => objects.clone(),
            FiniteOperad::Free { tree, .. } => tree.edge_names().to_vec(),
        }
    }

    pub fn object_name(&self, obj: usize) -> String {
        match self {
            FiniteOperad::Table { objects, .. } => objects[obj].clone(),
            FiniteOperad::Free { tree, .. } => tree.edge_name(obj).to_string(),
        }
    }

    pub fn object_by_name(&self, name: &str) -> Result<usize> {
        self.object_names()
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    /// A deterministic printable name for an operation. For free operads the
    /// name `root<l1,l2,…` lists the subtree root and ordered leaves, which
    /// determines the operation.
    pub fn op_name(&self, op: &OpRef) -> String {
        match (self, op) {
            (FiniteOperad::Table { data, .. }, OpRef::Table(i)) => data.ops[*i].name.clone(),
            (FiniteOperad::Free { tree, .. }, OpRef::Free { root, ordering, .. }) => {
                let leaves: Vec<&str> =
                    ordering.iter().map(|&e| tree.edge_name(e)).collect();
                format!("{}<{}", tree.edge_name(*root), leaves.join(","))
            }
            _ => unreachable!("op handle from a different backend"),
        }
    }

    pub fn op_by_name(&self, name: &str) -> Result<OpRef> {
        match self {
            FiniteOperad::Table { data, .. } => data
                .ops
                .iter()
                .position(|o| o.name == name)
                .map(OpRef::Table)
                .ok_or_else(|| Error::UnknownOperation(name.to_string())),
            FiniteOperad::Free { tree, .. } => {
                let (root, rest) = name
                    .split_once('<')
                    .ok_or_else(|| Error::UnknownOperation(name.to_string()))?;
                let root = tree.edge_ix(root)?;
                let ordering: Result<Vec<EdgeIx>> = if rest.is_empty() {
                    Ok(Vec::new())
                } else {
                    rest.split(',').map(|n| tree.edge_ix(n)).collect()
                };
                let ordering = ordering?;
                let leaves: BTreeSet<EdgeIx> = ordering.iter().copied().collect();
                if leaves.len() != ordering.len() {
                    return Err(Error::UnknownOperation(name.to_string()));
                }
                let sub = tree::spanning_subtree(tree, root, &leaves)
                    .ok_or_else(|| Error::UnknownOperation(name.to_string()))?;
                Ok(OpRef::Free { root, vertices: sub.vertices, ordering })
            }
        }
    }

    pub fn underlying_tree(&self) -> Option<&Tree> {
        match self {
            FiniteOperad::Free { tree, .. } => Some(tree),
            FiniteOperad::Table { .. } => None,
        }
    }

    /// Exhaustive axiom check: unit laws, associativity on all triples with
    /// defined composites, signature consistency and the symmetric-action
    /// presentation relations, and equivariance of composition.
    pub fn validate(&self) -> Result<()> {
        let FiniteOperad::Table { objects, data } = self else {
            return Ok(()); // free backend is validated against tables in tests
        };
        if data.units.len() != objects.len() {
            return Err(Error::AxiomViolation("one unit per object required".into()));
        }
        for (c, &u) in data.units.iter().enumerate() {
            let op = &data.ops[u];
            if op.inputs != vec![c] || op.output != c {
                return Err(Error::AxiomViolation(format!(
                    "unit of `{}` must have signature ({0};{0})",
                    objects[c]
                )));
            }
        }
        let mut names = BTreeSet::new();
        for op in &data.ops {
            if !names.insert(&op.name) {
                return Err(Error::AxiomViolation(format!("duplicate op name `{}`", op.name)));
            }
            if op.output >= objects.len() || op.inputs.iter().any(|&i| i >= objects.len()) {
                return Err(Error::AxiomViolation(format!("op `{}` uses unknown objects", op.name)));
            }
        }
        // swap table: defined for all slots, signature-correct, involutive,
        // and satisfying the braid presentation of the symmetric groups
        for (p, op) in data.ops.iter().enumerate() {
            let n = op.inputs.len();
            for i in 0..n.saturating_sub(1) {
                let &q = data.swap.get(&(p, i)).ok_or_else(|| {
                    Error::AxiomViolation(format!("missing swap ({},{i})", op.name))
                })?;
                let qop = &data.ops[q];
                let mut expect = op.inputs.clone();
                expect.swap(i, i + 1);
                if qop.inputs != expect || qop.output != op.output {
                    return Err(Error::AxiomViolation(format!(
                        "swap of `{}` at {i} has wrong signature",
                        op.name
                    )));
                }
                if data.swap.get(&(q, i)) != Some(&p) {
                    return Err(Error::AxiomViolation(format!(
                        "swap at {i} is not involutive on `{}`",
                        op.name
                    )));
                }
            }
            // braid relations
            for i in 0..n.saturating_sub(2) {
                let a = |p: usize, i: usize| data.swap[&(p, i)];
                let lhs = a(a(a(p, i), i + 1), i);
                let rhs = a(a(a(p, i + 1), i), i + 1);
                if lhs != rhs {
                    return Err(Error::AxiomViolation(format!(
                        "braid relation fails on `{}` at {i}",
                        op.name
                    )));
                }
                for j in i + 2..n.saturating_sub(1) {
                    if a(a(p, i), j) != a(a(p, j), i) {
                        return Err(Error::AxiomViolation(format!(
                            "distant swaps do not commute on `{}`",
                            op.name
                        )));
                    }
                }
            }
        }
        // composition: signature consistency
        for (&(p, i, q), &r) in &data.comp {
            let (pp, qq, rr) = (&data.ops[p], &data.ops[q], &data.ops[r]);
            if i >= pp.inputs.len() || pp.inputs[i] != qq.output {
                return Err(Error::AxiomViolation(format!(
                    "composite ({},{i},{}) is not composable",
                    pp.name, qq.name
                )));
            }
            let mut expect = pp.inputs[..i].to_vec();
            expect.extend_from_slice(&qq.inputs);
            expect.extend_from_slice(&pp.inputs[i + 1..]);
            if rr.inputs != expect || rr.output != pp.output {
                return Err(Error::AxiomViolation(format!(
                    "composite ({},{i},{}) has wrong signature",
                    pp.name, qq.name
                )));
            }
        }
        let comp = |p: usize, i: usize, q: usize| data.comp.get(&(p, i, q)).copied();
        // unit laws where defined
        for (p, op) in data.ops.iter().enumerate() {
            for (i, &c) in op.inputs.iter().enumerate() {
                if let Some(r) = comp(p, i, data.units[c]) {
                    if r != p {
                        return Err(Error::AxiomViolation(format!(
                            "`{}` ∘_{i} unit ≠ itself",
                            op.name
                        )));
                    }
                }
            }
            if let Some(r) = comp(data.units[op.output], 0, p) {
                if r != p {
                    return Err(Error::AxiomViolation(format!("unit ∘ `{}` ≠ itself", op.name)));
                }
            }
        }
        // associativity, both shapes, on all triples with defined composites
        for (&(p, i, q), &pq) in &data.comp {
            let m = data.ops[q].inputs.len();
            // nested: (p ∘_i q) ∘_{i+j} r = p ∘_i (q ∘_j r)
            for j in 0..m {
                for (&(q2, j2, r), &qr) in &data.comp {
                    if q2 != q || j2 != j {
                        continue;
                    }
                    if let (Some(lhs), Some(rhs)) = (comp(pq, i + j, r), comp(p, i, qr)) {
                        if lhs != rhs {
                            return Err(Error::AxiomViolation(format!(
                                "nested associativity fails at ({},{},{})",
                                data.ops[p].name, data.ops[q].name, data.ops[r].name
                            )));
                        }
                    }
                }
            }
            // disjoint: (p ∘_i q) ∘_{k+m-1} r = (p ∘_k r) ∘_i q for k > i
            let n = data.ops[p].inputs.len();
            for k in i + 1..n {
                for r in 0..data.ops.len() {
                    if data.ops[r].output != data.ops[p].inputs[k] {
                        continue;
                    }
                    if let (Some(lhs), Some(pr)) = (comp(pq, k + m - 1, r), comp(p, k, r)) {
                        if let Some(rhs) = comp(pr, i, q) {
                            if lhs != rhs {
                                return Err(Error::AxiomViolation(format!(
                                    "disjoint associativity fails at ({},{},{})",
                                    data.ops[p].name, data.ops[q].name, data.ops[r].name
                                )));
                            }
                        }
                    }
                }
            }
        }
        // equivariance of composition with adjacent swaps, where defined
        for (&(p, i, q), &pq) in &data.comp {
            let n = data.ops[p].inputs.len();
            let m = data.ops[q].inputs.len();
            // inner: p ∘_i swap(q, k) = swap(p ∘_i q, i + k)
            for k in 0..m.saturating_sub(1) {
                if let Some(lhs) = comp(p, i, data.swap[&(q, k)]) {
                    if lhs != data.swap[&(pq, i + k)] {
                        return Err(Error::AxiomViolation(format!(
                            "inner equivariance fails at ({},{i},{})",
                            data.ops[p].name, data.ops[q].name
                        )));
                    }
                }
            }
            // outer, slots away from the block
            for j in 0..n.saturating_sub(1) {
                if j + 1 == i || j == i {
                    continue;
                }
                let sp = data.swap[&(p, j)];
                if let Some(lhs) = comp(sp, i, q) {
                    let shifted = if j > i { j + m - 1 } else { j };
                    if lhs != data.swap[&(pq, shifted)] {
                        return Err(Error::AxiomViolation(format!(
                            "outer equivariance fails at ({},{j},{})",
                            data.ops[p].name, data.ops[q].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// True iff composition is defined for every composable pair.
    pub fn composition_total(&self) -> bool {
        match self {
            FiniteOperad::Free { .. } => true,
            FiniteOperad::Table { data, .. } => {
                for (p, pop) in data.ops.iter().enumerate() {
                    for (i, &c) in pop.inputs.iter().enumerate() {
                        for (q, qop) in data.ops.iter().enumerate() {
                            if qop.output == c && !data.comp.contains_key(&(p, i, q)) {
                                return false;
                            }
                        }
                    }
                }
                true
            }
        }
    }

    pub fn to_json(&self) -> Result<OperadJson> {
        let objects = self.object_names();
        match self {
            FiniteOperad::Table { data, .. } => Ok(OperadJson {
                schema: crate::SCHEMA.to_string(),
                objects: objects.clone(),
                operations: data
                    .ops
                    .iter()
                    .map(|o| OperationJson {
                        name: o.name.clone(),
                        inputs: o.inputs.iter().map(|&i| objects[i].clone()).collect(),
                        output: objects[o.output].clone(),
                    })
                    .collect(),
                units: data
                    .units
                    .iter()
                    .enumerate()
                    .map(|(c, &u)| (objects[c].clone(), data.ops[u].name.clone()))
                    .collect(),
                compositions: data
                    .comp
                    .iter()
                    .map(|(&(p, i, q), &r)| CompositionJson {
                        op: data.ops[p].name.clone(),
                        slot: i,
                        with: data.ops[q].name.clone(),
                        result: data.ops[r].name.clone(),
                    })
                    .collect(),
                sigma: data
                    .swap
                    .iter()
                    .map(|(&(p, i), &q)| SigmaJson {
                        op: data.ops[p].name.clone(),
                        swap: i,
                        result: data.ops[q].name.clone(),
                    })
                    .collect(),
            }),
            FiniteOperad::Free { .. } => self.materialize(20_000)?.to_json(),
        }
    }

    pub fn from_json(json: &OperadJson) -> Result<FiniteOperad> {
        let objects = json.objects.clone();
        let obj_ix = |name: &str| -> Result<usize> {
            objects
                .iter()
                .position(|o| o == name)
                .ok_or_else(|| Error::UnknownObject(name.to_string()))
        };
        let mut ops = Vec::new();
        for o in &json.operations {
            let inputs: Result<Vec<usize>> = o.inputs.iter().map(|n| obj_ix(n)).collect();
            ops.push(OpData { name: o.name.clone(), inputs: inputs?, output: obj_ix(&o.output)? });
        }
        let op_ix = |name: &str| -> Result<usize> {
            ops.iter()
                .position(|o| o.name == name)
                .ok_or_else(|| Error::UnknownOperation(name.to_string()))
        };
        let mut units = Vec::new();
        for (c, obj) in objects.iter().enumerate() {
            let name = json
                .units
                .get(obj)
                .ok_or_else(|| Error::AxiomViolation(format!("missing unit for `{obj}`")))?;
            let u = op_ix(name)?;
            let _ = c;
            units.push(u);
        }
        let mut comp = BTreeMap::new();
        for c in &json.compositions {
            comp.insert((op_ix(&c.op)?, c.slot, op_ix(&c.with)?), op_ix(&c.result)?);
        }
        let mut swap = BTreeMap::new();
        for s in &json.sigma {
            swap.insert((op_ix(&s.op)?, s.swap), op_ix(&s.result)?);
        }
        FiniteOperad::table(objects, ops, units, comp, swap)
    }

    /// Materialize any backend as an explicit table (used for export and for
    /// cross-validation). Fails if the operation count would exceed `cap`.
    pub fn materialize(&self, cap: usize) -> Result<FiniteOperad> {
        let objects = self.object_names();
        let mut all: Vec<OpRef> = Vec::new();
        for rep in self.op_orbit_representatives() {
            let n = self.arity(&rep);
            let mut orbit: BTreeSet<OpRef> = BTreeSet::new();
            for sigma in perm::permutations(n) {
                orbit.insert(self.act(&rep, &sigma));
            }
            all.extend(orbit);
            if all.len() > cap {
                return Err(Error::BoundExceeded(format!(
                    "materialization exceeds {cap} operations"
                )));
            }
        }
        all.sort();
        all.dedup();
        let index: BTreeMap<&OpRef, usize> = all.iter().enumerate().map(|(i, o)| (o, i)).collect();
        let ops: Vec<OpData> = all
            .iter()
            .map(|o| OpData {
                name: self.op_name(o),
                inputs: self.op_inputs(o),
                output: self.op_output(o),
            })
            .collect();
        let units: Vec<usize> = (0..objects.len()).map(|c| index[&self.unit(&c)]).collect();
        let mut comp = BTreeMap::new();
        for (p, pref) in all.iter().enumerate() {
            for (i, c) in self.op_inputs(pref).into_iter().enumerate() {
                for (q, qref) in all.iter().enumerate() {
                    if self.op_output(qref) == c {
                        if let Some(r) = self.compose(pref, i, qref) {
                            comp.insert((p, i, q), index[&r]);
                        }
                    }
                }
            }
        }
        let mut swap = BTreeMap::new();
        for (p, pref) in all.iter().enumerate() {
            let n = self.arity(pref);
            for i in 0..n.saturating_sub(1) {
                swap.insert((p, i), index[&self.transpose(pref, i)]);
            }
        }
        FiniteOperad::table(objects, ops, units, comp, swap)
    }
}

impl Operad for FiniteOperad {
    type Obj = usize;
    type Op = OpRef;

    fn objects(&self) -> Vec<usize> {
        (0..self.object_names().len()).collect()
    }

    fn op_inputs(&self, op: &OpRef) -> Vec<usize> {
        match (self, op) {
            (FiniteOperad::Table { data, .. }, OpRef::Table(i)) => data.ops[*i].inputs.clone(),
            (FiniteOperad::Free { .. }, OpRef::Free { ordering, .. }) => ordering.clone(),
            _ => unreachable!("op handle from a different backend"),
        }
    }

    fn op_output(&self, op: &OpRef) -> usize {
        match (self, op) {
            (FiniteOperad::Table { data, .. }, OpRef::Table(i)) => data.ops[*i].output,
            (FiniteOperad::Free { .. }, OpRef::Free { root, .. }) => *root,
        _ => unreachable!("op handle from a different backend"),
        }
    }

    fn ops(&self, inputs: &[usize], output: &usize) -> Vec<OpRef> {
        match self {
            FiniteOperad::Table { data, .. } => data
                .by_signature
                .get(&(inputs.to_vec(), *output))
                .map(|v| v.iter().map(|&i| OpRef::Table(i)).collect())
                .unwrap_or_default(),
            FiniteOperad::Free { subtree_by_root_leaves, .. } => {
                let set: BTreeSet<EdgeIx> = inputs.iter().copied().collect();
                if set.len() != inputs.len() {
                    return Vec::new(); // leaf sets of subtrees have no repeats
                }
                match subtree_by_root_leaves.get(&(*output, set)) {
                    Some(sub) => vec![OpRef::Free {
                        root: sub.root,
                        vertices: sub.vertices.clone(),
                        ordering: inputs.to_vec(),
                    }],
                    None => Vec::new(),
                }
            }
        }
    }

    fn ops_with(&self, output: &usize, arity: usize) -> Vec<OpRef> {
        match self {
            FiniteOperad::Table { data, .. } => {
                let mut out: Vec<OpRef> = data
                    .ops
                    .iter()
                    .enumerate()
                    .filter(|(_, o)| o.output == *output && o.inputs.len() == arity)
                    .map(|(i, _)| OpRef::Table(i))
                    .collect();
                out.sort();
                out
            }
            FiniteOperad::Free { subtree_by_root_leaves, .. } => {
                let mut out = Vec::new();
                for ((root, leaves), sub) in subtree_by_root_leaves {
                    if *root != *output || leaves.len() != arity {
                        continue;
                    }
                    let base: Vec<EdgeIx> = leaves.iter().copied().collect();
                    for sigma in perm::permutations(arity) {
                        let ordering: Vec<EdgeIx> = sigma.iter().map(|&i| base[i]).collect();
                        out.push(OpRef::Free {
                            root: *root,
                            vertices: sub.vertices.clone(),
                            ordering,
                        });
                    }
                }
                out.sort();
                out
            }
        }
    }

    fn arities(&self) -> Vec<usize> {
        let mut set = BTreeSet::new();
        match self {
            FiniteOperad::Table { data, .. } => {
                for op in &data.ops {
                    set.insert(op.inputs.len());
                }
            }
            FiniteOperad::Free { subtree_by_root_leaves, .. } => {
                for (_, leaves) in subtree_by_root_leaves.keys() {
                    set.insert(leaves.len());
                }
            }
        }
        set.into_iter().collect()
    }

    fn unit(&self, obj: &usize) -> OpRef {
        match self {
            FiniteOperad::Table { data, .. } => OpRef::Table(data.units[*obj]),
            FiniteOperad::Free { .. } => OpRef::Free {
                root: *obj,
                vertices: BTreeSet::new(),
                ordering: vec![*obj],
            },
        }
    }

    fn compose(&self, p: &OpRef, slot: usize, q: &OpRef) -> Option<OpRef> {
        match (self, p, q) {
            (FiniteOperad::Table { data, .. }, OpRef::Table(p), OpRef::Table(q)) => {
                data.comp.get(&(*p, slot, *q)).map(|&r| OpRef::Table(r))
            }
            (
                FiniteOperad::Free { .. },
                OpRef::Free { root, vertices, ordering },
                OpRef::Free { root: qroot, vertices: qvertices, ordering: qordering },
            ) => {
                if slot >= ordering.len() || ordering[slot] != *qroot {
                    return None;
                }
                let mut merged = vertices.clone();
                merged.extend(qvertices.iter().copied());
                let mut new_ordering = ordering[..slot].to_vec();
                new_ordering.extend_from_slice(qordering);
                new_ordering.extend_from_slice(&ordering[slot + 1..]);
                // grafting a subtree onto a leaf of another
                Some(OpRef::Free { root: *root, vertices: merged, ordering: new_ordering })
            }
            _ => unreachable!("op handles from a different backend"),
        }
    }

    fn transpose(&self, p: &OpRef, i: usize) -> OpRef {
        match (self, p) {
            (FiniteOperad::Table { data, .. }, OpRef::Table(p)) => OpRef::Table(data.swap[&(*p, i)]),
            (FiniteOperad::Free { .. }, OpRef::Free { root, vertices, ordering }) => {
                let mut ordering = ordering.clone();
                ordering.swap(i, i + 1);
                OpRef::Free { root: *root, vertices: vertices.clone(), ordering }
            }
            _ => unreachable!("op handle from a different backend"),
        }
    }

    fn op_orbit_representatives(&self) -> Vec<OpRef> {
        match self {
            FiniteOperad::Table { data, .. } => {
                // pick the minimal element of each swap orbit
                let mut reps = Vec::new();
                let mut seen: BTreeSet<usize> = BTreeSet::new();
                for p in 0..data.ops.len() {
                    if seen.contains(&p) {
                        continue;
                    }
                    let mut orbit = BTreeSet::from([p]);
                    let mut stack = vec![p];
                    while let Some(x) = stack.pop() {
                        let n = data.ops[x].inputs.len();
                        for i in 0..n.saturating_sub(1) {
                            let y = data.swap[&(x, i)];
                            if orbit.insert(y) {
                                stack.push(y);
                            }
                        }
                    }
                    reps.push(OpRef::Table(*orbit.iter().next().unwrap()));
                    seen.extend(orbit);
                }
                reps
            }
            FiniteOperad::Free { subtree_by_root_leaves, .. } => subtree_by_root_leaves
                .iter()
                .map(|((root, leaves), sub)| OpRef::Free {
                    root: *root,
                    vertices: sub.vertices.clone(),
                    ordering: leaves.iter().copied().collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperadJson {
    pub schema: String,
    pub objects: Vec<String>,
    pub operations: Vec<OperationJson>,
    pub units: BTreeMap<String, String>,
    #[serde(default)]
    pub compositions: Vec<CompositionJson>,
    #[serde(default)]
    pub sigma: Vec<SigmaJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperationJson {
    pub name: String,
    pub inputs: Vec<String>,
    pub output: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompositionJson {
    pub op: String,
    pub slot: usize,
    pub with: String,
    pub result: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SigmaJson {
    pub op: String,
    pub swap: usize,
    pub result: String,
}

/// A finite category: objects, arrows (including identities), and a total
/// composition table keyed `(f: a → b, g: b → c) ↦ g∘f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    pub objects: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub identity: Vec<usize>,
    pub compose: BTreeMap<(usize, usize), usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arrow {
    pub name: String,
    pub src: usize,
    pub dst: usize,
}

impl FinCategory {
    pub fn new(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        identity: Vec<usize>,
        compose: BTreeMap<(usize, usize), usize>,
    ) -> Result<FinCategory> {
        let cat = FinCategory { objects, arrows, identity, compose };
        cat.validate()?;
        Ok(cat)
    }

    pub fn validate(&self) -> Result<()> {
        if self.identity.len() != self.objects.len() {
            return Err(Error::Invalid("one identity per object required".into()));
        }
        for (o, &i) in self.identity.iter().enumerate() {
            if self.arrows[i].src != o || self.arrows[i].dst != o {
                return Err(Error::Invalid(format!("identity of `{}` invalid", self.objects[o])));
            }
        }
        for (f, af) in self.arrows.iter().enumerate() {
            for (g, ag) in self.arrows.iter().enumerate() {
                if af.dst == ag.src {
                    let &h = self.compose.get(&(f, g)).ok_or_else(|| {
                        Error::Invalid(format!("missing composite {}∘{}", ag.name, af.name))
                    })?;
                    let ah = &self.arrows[h];
                    if ah.src != af.src || ah.dst != ag.dst {
                        return Err(Error::Invalid(format!(
                            "composite {}∘{} has wrong endpoints",
                            ag.name, af.name
                        )));
                    }
                    if f == self.identity[af.src] && h != g {
                        return Err(Error::Invalid("left identity law fails".into()));
                    }
                    if g == self.identity[ag.dst] && h != f {
                        return Err(Error::Invalid("right identity law fails".into()));
                    }
                    for (k, ak) in self.arrows.iter().enumerate() {
                        if ag.dst == ak.src {
                            let lhs = self.compose[&(h, k)];
                            let rhs = self.compose[&(f, self.compose[&(g, k)])];
                            if lhs != rhs {
                                return Err(Error::Invalid("associativity fails".into()));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The poset category 0 ≤ 1 ≤ … ≤ n, arrows named `i_j` for i ≤ j.
    pub fn poset(n: usize) -> FinCategory {
        let objects: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
        let mut arrows = Vec::new();
        for i in 0..=n {
            for j in i..=n {
                arrows.push(Arrow { name: format!("{i}_{j}"), src: i, dst: j });
            }
        }
        let identity: Vec<usize> =
            (0..=n).map(|i| arrows.iter().position(|a| a.src == i && a.dst == i).unwrap()).collect();
        let mut compose = BTreeMap::new();
        for (f, af) in arrows.iter().enumerate() {
            for (g, ag) in arrows.iter().enumerate() {
                if af.dst == ag.src {
                    let h = arrows
                        .iter()
                        .position(|a| a.src == af.src && a.dst == ag.dst)
                        .unwrap();
                    compose.insert((f, g), h);
                }
            }
        }
        FinCategory::new(objects, arrows, identity, compose).expect("poset category is valid")
    }

    /// The connected groupoid on two objects (the walking isomorphism).
    pub fn walking_iso() -> FinCategory {
        let objects = vec!["0".to_string(), "1".to_string()];
        let arrows = vec![
            Arrow { name: "id0".into(), src: 0, dst: 0 },
            Arrow { name: "id1".into(), src: 1, dst: 1 },
            Arrow { name: "u".into(), src: 0, dst: 1 },
            Arrow { name: "v".into(), src: 1, dst: 0 },
        ];
        let identity = vec![0, 1];
        let mut compose = BTreeMap::new();
        for (f, af) in arrows.iter().enumerate() {
            for (g, ag) in arrows.iter().enumerate() {
                if af.dst == ag.src {
                    // in a connected groupoid with singleton hom-sets the
                    // composite is determined by its endpoints
                    let h = arrows
                        .iter()
                        .position(|a| a.src == af.src && a.dst == ag.dst)
                        .unwrap();
                    compose.insert((f, g), h);
                }
            }
        }
        FinCategory::new(objects, arrows, identity, compose).expect("walking iso is valid")
    }

    pub fn terminal() -> FinCategory {
        FinCategory::new(
            vec!["*".into()],
            vec![Arrow { name: "id".into(), src: 0, dst: 0 }],
            vec![0],
            BTreeMap::from([((0, 0), 0)]),
        )
        .expect("terminal category is valid")
    }
}

/// One color, one operation per arity up to `max_arity`, trivial symmetric
/// action; compositions kept where they stay within the arity range.
pub fn commutative_operad(max_arity: usize) -> FiniteOperad {
    let objects = vec!["x".to_string()];
    let ops: Vec<OpData> = (0..=max_arity)
        .map(|n| OpData { name: format!("m{n}"), inputs: vec![0; n], output: 0 })
        .collect();
    let mut comp = BTreeMap::new();
    for n in 0..=max_arity {
        for i in 0..n {
            for m in 0..=max_arity {
                if n + m - 1 <= max_arity {
                    comp.insert((n, i, m), n + m - 1);
                }
            }
        }
    }
    let mut swap = BTreeMap::new();
    for n in 2..=max_arity {
        for i in 0..n - 1 {
            swap.insert((n, i), n);
        }
    }
    FiniteOperad::table(objects, ops, vec![1], comp, swap)
        .expect("the commutative operad satisfies the axioms")
}

/// Extension by zero: a category as an operad with only unary operations.
pub fn from_category(cat: &FinCategory) -> FiniteOperad {
    let ops: Vec<OpData> = cat
        .arrows
        .iter()
        .map(|a| OpData { name: a.name.clone(), inputs: vec![a.src], output: a.dst })
        .collect();
    let mut comp = BTreeMap::new();
    for (&(f, g), &h) in &cat.compose {
        // g∘f in the category is g ∘_0 f in the operad
        comp.insert((g, 0, f), h);
    }
    FiniteOperad::table(cat.objects.clone(), ops, cat.identity.clone(), comp, BTreeMap::new())
        .expect("a valid category yields a valid operad")
}

/// The underlying category of an operad: objects and unary operations.
pub fn underlying_category(operad: &FiniteOperad) -> Result<FinCategory> {
    let objects = operad.object_names();
    let mut unary: Vec<OpRef> = Vec::new();
    for (out, _) in objects.iter().enumerate() {
        unary.extend(operad.ops_with(&out, 1));
    }
    unary.sort();
    let arrows: Vec<Arrow> = unary
        .iter()
        .map(|op| Arrow {
            name: operad.op_name(op),
            src: operad.op_inputs(op)[0],
            dst: operad.op_output(op),
        })
        .collect();
    let identity: Vec<usize> = (0..objects.len())
        .map(|c| unary.iter().position(|op| *op == operad.unit(&c)).unwrap())
        .collect();
    let mut compose = BTreeMap::new();
    for (f, fop) in unary.iter().enumerate() {
        for (g, gop) in unary.iter().enumerate() {
            if operad.op_output(fop) == operad.op_inputs(gop)[0] {
                let h = operad.compose(gop, 0, fop).ok_or_else(|| {
                    Error::Invalid("composition table incomplete on unary operations".into())
                })?;
                compose.insert((f, g), unary.iter().position(|op| *op == h).unwrap());
            }
        }
    }
    FinCategory::new(objects, arrows, identity, compose)
}

/// A morphism of operads recorded by object and operation names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OperadMorphism {
    pub on_objects: BTreeMap<String, String>,
    pub on_ops: BTreeMap<String, String>,
}

impl OperadMorphism {
    pub fn identity(operad: &FiniteOperad) -> OperadMorphism {
        let on_objects = operad
            .object_names()
            .into_iter()
            .map(|n| (n.clone(), n))
            .collect();
        let mut on_ops = BTreeMap::new();
        for rep in operad.op_orbit_representatives() {
            let n = operad.arity(&rep);
            for sigma in perm::permutations(n) {
                let op = operad.act(&rep, &sigma);
                let name = operad.op_name(&op);
                on_ops.insert(name.clone(), name);
            }
        }
        OperadMorphism { on_objects, on_ops }
    }

    pub fn apply_obj(&self, name: &str) -> Result<&str> {
        self.on_objects
            .get(name)
            .map(|s| s.as_str())
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    pub fn apply_op(&self, name: &str) -> Result<&str> {
        self.on_ops
            .get(name)
            .map(|s| s.as_str())
            .ok_or_else(|| Error::UnknownOperation(name.to_string()))
    }

    pub fn compose(&self, then: &OperadMorphism) -> Result<OperadMorphism> {
        let mut on_objects = BTreeMap::new();
        for (a, b) in &self.on_objects {
            on_objects.insert(a.clone(), then.apply_obj(b)?.to_string());
        }
        let mut on_ops = BTreeMap::new();
        for (a, b) in &self.on_ops {
            on_ops.insert(a.clone(), then.apply_op(b)?.to_string());
        }
        Ok(OperadMorphism { on_objects, on_ops })
    }

    /// Check the operad-morphism axioms between concrete operads: signature
    /// preservation, units, adjacent swaps, and composition where defined.
    pub fn validate(&self, src: &FiniteOperad, dst: &FiniteOperad) -> Result<()> {
        let image_obj = |c: usize| -> Result<usize> {
            dst.object_by_name(self.apply_obj(&src.object_name(c))?)
        };
        let image_op = |p: &OpRef| -> Result<OpRef> {
            dst.op_by_name(self.apply_op(&src.op_name(p))?)
        };
        let mut all_ops: Vec<OpRef> = Vec::new();
        for rep in src.op_orbit_representatives() {
            for sigma in perm::permutations(src.arity(&rep)) {
                all_ops.push(src.act(&rep, &sigma));
            }
        }
        all_ops.sort();
        all_ops.dedup();
        for p in &all_ops {
            let fp = image_op(p)?;
            let want_inputs: Result<Vec<usize>> =
                src.op_inputs(p).into_iter().map(image_obj).collect();
            if dst.op_inputs(&fp) != want_inputs? || dst.op_output(&fp) != image_obj(src.op_output(p))? {
                return Err(Error::AxiomViolation(format!(
                    "morphism breaks the signature of `{}`",
                    src.op_name(p)
                )));
            }
            let n = src.arity(p);
            for i in 0..n.saturating_sub(1) {
                if image_op(&src.transpose(p, i))? != dst.transpose(&fp, i) {
                    return Err(Error::AxiomViolation(format!(
                        "morphism breaks the symmetric action on `{}`",
                        src.op_name(p)
                    )));
                }
            }
        }
        for c in src.objects() {
            if image_op(&src.unit(&c))? != dst.unit(&image_obj(c)?) {
                return Err(Error::AxiomViolation(format!(
                    "morphism breaks the unit of `{}`",
                    src.object_name(c)
                )));
            }
        }
        for p in &all_ops {
            for (i, c) in src.op_inputs(p).into_iter().enumerate() {
                for q in all_ops.iter().filter(|q| src.op_output(q) == c) {
                    if let Some(r) = src.compose(p, i, q) {
                        let fr = image_op(&r)?;
                        let composed = dst
                            .compose(&image_op(p)?, i, &image_op(q)?)
                            .ok_or_else(|| Error::AxiomViolation("target composite missing".into()))?;
                        if fr != composed {
                            return Err(Error::AxiomViolation(format!(
                                "morphism breaks composition at `{}` ∘_{i} `{}`",
                                src.op_name(p),
                                src.op_name(q)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A morphism from the free operad on a tree into `O`: an object per edge and
/// an operation per vertex (with the vertex's stored input order).
#[derive(Debug)]
pub struct Dendrex<O: Operad> {
    pub edge_obj: BTreeMap<String, O::Obj>,
    pub vertex_op: BTreeMap<String, O::Op>,
}

impl<O: Operad> Clone for Dendrex<O> {
    fn clone(&self) -> Self {
        Dendrex { edge_obj: self.edge_obj.clone(), vertex_op: self.vertex_op.clone() }
    }
}

impl<O: Operad> PartialEq for Dendrex<O> {
    fn eq(&self, other: &Self) -> bool {
        self.edge_obj == other.edge_obj && self.vertex_op == other.vertex_op
    }
}

impl<O: Operad> Eq for Dendrex<O> {}

impl<O: Operad> PartialOrd for Dendrex<O> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<O: Operad> Ord for Dendrex<O> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.edge_obj, &self.vertex_op).cmp(&(&other.edge_obj, &other.vertex_op))
    }
}

impl<O: Operad> Hash for Dendrex<O> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.edge_obj.hash(state);
        self.vertex_op.hash(state);
    }
}

impl<O: Operad> Dendrex<O> {
    pub fn obj_at(&self, edge: &str) -> &O::Obj {
        &self.edge_obj[edge]
    }

    /// Evaluate on an operation of the free operad on `tree`, i.e. a subtree
    /// together with an ordering of its leaves.
    pub fn eval(&self, tree: &Tree, target: &O, sub: &Subtree, ordering: &[EdgeIx]) -> O::Op {
        let (op, dfs_leaves) = self.eval_rec(tree, target, sub, sub.root);
        debug_assert_eq!(
            dfs_leaves.iter().copied().collect::<BTreeSet<_>>(),
            ordering.iter().copied().collect::<BTreeSet<_>>()
        );
        // reorder from DFS leaf order to the requested ordering
        let sigma: Vec<usize> = ordering
            .iter()
            .map(|e| dfs_leaves.iter().position(|f| f == e).unwrap())
            .collect();
        if perm::is_identity(&sigma) {
            op
        } else {
            target.act(&op, &sigma)
        }
    }

    fn eval_rec(&self, tree: &Tree, target: &O, sub: &Subtree, edge: EdgeIx) -> (O::Op, Vec<EdgeIx>) {
        match tree.upper_vertex(edge).filter(|v| sub.vertices.contains(v)) {
            None => {
                let obj = &self.edge_obj[tree.edge_name(edge)];
                (target.unit(obj), vec![edge])
            }
            Some(v) => {
                let mut op = self.vertex_op[tree.edge_name(tree.vertex(v).out)].clone();
                let inputs = tree.vertex(v).inputs.clone();
                let mut blocks: Vec<(O::Op, Vec<EdgeIx>)> = inputs
                    .iter()
                    .map(|&f| self.eval_rec(tree, target, sub, f))
                    .collect();
                // compose right-to-left so earlier slot indices stay put
                let mut leaves = Vec::new();
                for (i, (q, ls)) in blocks.iter_mut().enumerate().rev() {
                    if target.is_unit(q) {
                        continue; // unit composition is the identity
                    }
                    op = target
                        .compose(&op, i, q)
                        .expect("evaluation composes along matching colors");
                    let _ = ls;
                }
                for (_, ls) in blocks {
                    leaves.extend(ls);
                }
                (op, leaves)
            }
        }
    }

    /// Precompose with a map of trees: the dendrex at `source` obtained by
    /// pulling back along `edge_map: E(source) → E(tree)`.
    pub fn precompose(
        &self,
        tree: &Tree,
        target: &O,
        source: &Tree,
        edge_map: &BTreeMap<String, String>,
    ) -> Dendrex<O> {
        let mut edge_obj = BTreeMap::new();
        for name in source.edge_names() {
            edge_obj.insert(name.clone(), self.edge_obj[&edge_map[name]].clone());
        }
        let mut vertex_op = BTreeMap::new();
        for v in source.vertices() {
            let out_name = source.edge_name(v.out);
            let root = tree.edge_ix(&edge_map[out_name]).expect("edge map lands in tree");
            let leaves_vec: Vec<EdgeIx> = v
                .inputs
                .iter()
                .map(|&e| tree.edge_ix(&edge_map[source.edge_name(e)]).unwrap())
                .collect();
            let leaves: BTreeSet<EdgeIx> = leaves_vec.iter().copied().collect();
            let sub = tree::spanning_subtree(tree, root, &leaves)
                .expect("a valid tree morphism has spanning subtrees at vertices");
            vertex_op.insert(out_name.to_string(), self.eval(tree, target, &sub, &leaves_vec));
        }
        Dendrex { edge_obj, vertex_op }
    }
}

/// All operad morphisms from the free operad on `tree` into `target`,
/// enumerated deterministically.
pub fn enumerate_dendrices<O: Operad>(tree: &Tree, target: &O) -> Vec<Dendrex<O>> {
    let mut results = Vec::new();
    let mut objects = target.objects();
    objects.sort();
    for root_obj in objects {
        let mut edge_obj = BTreeMap::new();
        edge_obj.insert(tree.root_name().to_string(), root_obj);
        assign_vertices(tree, target, tree.root(), &mut edge_obj, &mut BTreeMap::new(), &mut results);
    }
    results.sort_by(|a, b| (&a.edge_obj, &a.vertex_op).cmp(&(&b.edge_obj, &b.vertex_op)));
    results
}

fn assign_vertices<O: Operad>(
    tree: &Tree,
    target: &O,
    edge: EdgeIx,
    edge_obj: &mut BTreeMap<String, O::Obj>,
    vertex_op: &mut BTreeMap<String, O::Op>,
    results: &mut Vec<Dendrex<O>>,
) {
    // find the next vertex whose output object is assigned but which has no op
    let pending = (0..tree.vertex_count()).find(|&v| {
        let out = tree.edge_name(tree.vertex(v).out);
        edge_obj.contains_key(out) && !vertex_op.contains_key(out)
    });
    let _ = edge;
    match pending {
        None => {
            results.push(Dendrex { edge_obj: edge_obj.clone(), vertex_op: vertex_op.clone() });
        }
        Some(v) => {
            let out_name = tree.edge_name(tree.vertex(v).out).to_string();
            let out_obj = edge_obj[&out_name].clone();
            let arity = tree.vertex(v).inputs.len();
            for op in target.ops_with(&out_obj, arity) {
                let inputs = target.op_inputs(&op);
                for (&e, obj) in tree.vertex(v).inputs.iter().zip(inputs.iter()) {
                    edge_obj.insert(tree.edge_name(e).to_string(), obj.clone());
                }
                vertex_op.insert(out_name.clone(), op);
                assign_vertices(tree, target, edge, edge_obj, vertex_op, results);
                vertex_op.remove(&out_name);
                for &e in &tree.vertex(v).inputs {
                    edge_obj.remove(tree.edge_name(e));
                }
            }
        }
    }
}

/// Convert a dendrex over a finite operad into a name-keyed morphism record.
pub fn dendrex_to_morphism(
    tree: &Tree,
    target: &FiniteOperad,
    dx: &Dendrex<FiniteOperad>,
) -> OperadMorphism {
    let source = FiniteOperad::free_on(tree);
    let mut on_objects = BTreeMap::new();
    for name in tree.edge_names() {
        on_objects.insert(name.clone(), target.object_name(dx.edge_obj[name]));
    }
    let mut on_ops = BTreeMap::new();
    for rep in source.op_orbit_representatives() {
        let n = source.arity(&rep);
        for sigma in perm::permutations(n) {
            let op = source.act(&rep, &sigma);
            let OpRef::Free { root, vertices, ordering } = &op else { unreachable!() };
            let sub = Subtree { root: *root, vertices: vertices.clone() };
            let image = dx.eval(tree, target, &sub, ordering);
            on_ops.insert(source.op_name(&op), target.op_name(&image));
        }
    }
    OperadMorphism { on_objects, on_ops }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_operad_on_eta() {
        let t = Tree::eta("e");
        let p = FiniteOperad::free_on(&t);
        assert_eq!(p.objects().len(), 1);
        let reps = p.op_orbit_representatives();
        assert_eq!(reps.len(), 1);
        assert!(p.is_unit(&reps[0]));
    }

    #[test]
    fn free_operad_on_corolla() {
        let t = Tree::parse("r[a,b]").unwrap();
        let p = FiniteOperad::free_on(&t);
        let (r, a, b) = (t.edge_ix("r").unwrap(), t.edge_ix("a").unwrap(), t.edge_ix("b").unwrap());
        assert_eq!(p.ops(&[a, b], &r).len(), 1);
        assert_eq!(p.ops(&[b, a], &r).len(), 1);
        assert!(p.ops(&[a], &r).is_empty());
        assert!(p.ops(&[a, a], &r).is_empty());
        // identity subtrees at each edge
        for e in [r, a, b] {
            assert_eq!(p.ops(&[e], &e).len(), 1);
        }
    }

    #[test]
    fn free_operad_on_linear() {
        let t = Tree::linear(2);
        let p = FiniteOperad::free_on(&t);
        let e0 = t.edge_ix("0").unwrap();
        let e1 = t.edge_ix("1").unwrap();
        let e2 = t.edge_ix("2").unwrap();
        assert_eq!(p.ops(&[e0], &e2).len(), 1, "the whole tree is a subtree");
        let whole = &p.ops(&[e0], &e2)[0];
        let lower = &p.ops(&[e1], &e2)[0];
        let upper = &p.ops(&[e0], &e1)[0];
        assert_eq!(p.compose(lower, 0, upper).as_ref(), Some(whole));
    }

    #[test]
    fn free_operad_matches_subtree_counts() {
        for t in tree::enumerate_trees(5, 2) {
            let p = FiniteOperad::free_on(&t);
            let subs = tree::enumerate_subtrees(&t);
            assert_eq!(p.op_orbit_representatives().len(), subs.len(), "tree {}", t.print());
            for sub in subs {
                let leaves: Vec<EdgeIx> = sub.leaves(&t).into_iter().collect();
                assert_eq!(p.ops(&leaves, &sub.root).len(), 1, "tree {}", t.print());
            }
        }
    }

    #[test]
    fn free_operads_are_sigma_free() {
        for t in tree::enumerate_trees(5, 2) {
            assert!(is_sigma_free(&FiniteOperad::free_on(&t)), "tree {}", t.print());
        }
        assert!(is_sigma_free(&FiniteOperad::free_on(
            &Tree::parse("r[a[x,y,z],b]").unwrap()
        )));
    }

    #[test]
    fn materialized_free_operad_passes_table_validation() {
        // cross-validation of the formulaic backend against the table axioms
        for text in ["e", "r[a]", "r[a,b]", "2[1[0]]", "r[a[]]", "r[a[x],b]"] {
            let t = Tree::parse(text).unwrap();
            let p = FiniteOperad::free_on(&t);
            let table = p.materialize(10_000).unwrap();
            table.validate().unwrap();
            assert!(table.composition_total());
            assert_eq!(is_sigma_free(&table), is_sigma_free(&p));
        }
    }

    #[test]
    fn commutative_operad_is_not_sigma_free() {
        let comm = commutative_operad(3);
        assert!(!is_sigma_free(&comm));
        assert!(is_sigma_free(&from_category(&FinCategory::poset(2))));
    }

    #[test]
    fn object_poset_of_free_operad_matches_edge_order() {
        for t in tree::enumerate_trees(5, 2) {
            let p = FiniteOperad::free_on(&t);
            let leq = object_poset(&p);
            for e in 0..t.edge_count() {
                for f in 0..t.edge_count() {
                    assert_eq!(leq[e][f], t.edge_leq_ix(e, f), "tree {}", t.print());
                }
            }
        }
    }

    #[test]
    fn object_poset_examples() {
        let p = FiniteOperad::free_on(&Tree::linear(2));
        let leq = object_poset(&p);
        let t = Tree::linear(2);
        let (e0, e1, e2) =
            (t.edge_ix("0").unwrap(), t.edge_ix("1").unwrap(), t.edge_ix("2").unwrap());
        assert!(leq[e0][e1] && leq[e1][e2] && leq[e0][e2]);
        assert!(!leq[e2][e0]);
        // discrete operad: discrete order
        let discrete = from_category(&FinCategory::terminal());
        let leq = object_poset(&discrete);
        assert!(leq[0][0]);
    }

    #[test]
    fn category_round_trip() {
        let cat = FinCategory::poset(2);
        let operad = from_category(&cat);
        operad.validate().unwrap();
        let back = underlying_category(&operad).unwrap();
        assert_eq!(back.objects, cat.objects);
        assert_eq!(back.arrows.len(), cat.arrows.len());
        let trivial = from_category(&FinCategory::terminal());
        assert_eq!(trivial.object_names().len(), 1);
        assert_eq!(trivial.op_orbit_representatives().len(), 1);
    }

    #[test]
    fn underlying_category_of_free_corolla_has_only_identities() {
        let t = Tree::parse("r[a,b]").unwrap();
        let p = FiniteOperad::free_on(&t);
        let cat = underlying_category(&p).unwrap();
        assert_eq!(cat.objects.len(), 3);
        // no unary subtree spans distinct edges of a corolla
        assert_eq!(cat.arrows.len(), 3);
        for (i, a) in cat.arrows.iter().enumerate() {
            assert_eq!(a.src, a.dst);
            assert_eq!(cat.identity[a.src], i);
        }
    }

    #[test]
    fn dendrex_enumeration_counts() {
        // Hom(free(eta), P) is the object set of P
        let p = from_category(&FinCategory::poset(2));
        assert_eq!(enumerate_dendrices(&Tree::eta("e"), &p).len(), 3);
        // Hom(free(C_1), P) is the set of unary operations of P
        assert_eq!(enumerate_dendrices(&Tree::parse("r[a]").unwrap(), &p).len(), 6);
        // Hom(free(C_2), free(C_2)) has the two leaf orderings
        let c2 = FiniteOperad::free_on(&Tree::parse("r[a,b]").unwrap());
        assert_eq!(enumerate_dendrices(&Tree::parse("x[y,z]").unwrap(), &c2).len(), 2);
    }

    #[test]
    fn dendrex_evaluation_respects_composition() {
        // evaluate the full linear tree against a poset nerve dendrex
        let t = Tree::linear(2);
        let p = from_category(&FinCategory::poset(2));
        for dx in enumerate_dendrices(&t, &p) {
            let whole = Subtree::full(&t);
            let e0 = t.edge_ix("0").unwrap();
            let op = dx.eval(&t, &p, &whole, &[e0]);
            assert_eq!(p.op_inputs(&op), vec![dx.edge_obj["0"]]);
            assert_eq!(p.op_output(&op), dx.edge_obj["2"]);
        }
    }

    #[test]
    fn operad_morphism_identity_validates() {
        let p = FiniteOperad::free_on(&Tree::parse("r[a,b]").unwrap());
        OperadMorphism::identity(&p).validate(&p, &p).unwrap();
    }

    #[test]
    fn json_round_trip() {
        let p = from_category(&FinCategory::walking_iso());
        let json = p.to_json().unwrap();
        let q = FiniteOperad::from_json(&json).unwrap();
        assert_eq!(q.object_names(), p.object_names());
        assert_eq!(q.op_orbit_representatives().len(), p.op_orbit_representatives().len());
    }

}
