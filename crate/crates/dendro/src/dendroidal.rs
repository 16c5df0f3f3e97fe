//! Tree morphisms, elementary faces and degeneracies, dendroidal sets, horn
//! filling, normality, truncated localization, and homotopy checking.

use crate::error::{Error, Result};
use crate::operad::{enumerate_dendrices, Dendrex, FinCategory, FiniteOperad, Operad};
use crate::tree::{self, EdgeIx, Subtree, Tree};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

/// A map of trees: an edge function that is an operad map between the free
/// operads (each vertex of the source spans a subtree of the target).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TreeMorphism {
    pub source: Tree,
    pub target: Tree,
    pub edge_map: BTreeMap<String, String>,
}

impl TreeMorphism {
    pub fn new(source: Tree, target: Tree, edge_map: BTreeMap<String, String>) -> Result<Self> {
        let m = TreeMorphism { source, target, edge_map };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for name in self.source.edge_names() {
            let image = self
                .edge_map
                .get(name)
                .ok_or_else(|| Error::UnknownEdge(name.clone()))?;
            self.target.edge_ix(image)?;
        }
        for v in self.source.vertices() {
            if self.vertex_witness(v.out).is_none() {
                return Err(Error::Invalid(format!(
                    "no subtree of the target realizes the vertex at `{}`",
                    self.source.edge_name(v.out)
                )));
            }
        }
        Ok(())
    }

    /// The subtree of the target realizing the source vertex with the given
    /// output edge, if any.
    pub fn vertex_witness(&self, out: EdgeIx) -> Option<Subtree> {
        let v = self.source.upper_vertex(out)?;
        let root = self.apply_ix(self.source.vertex(v).out);
        let images: Vec<EdgeIx> =
            self.source.vertex(v).inputs.iter().map(|&e| self.apply_ix(e)).collect();
        let set: BTreeSet<EdgeIx> = images.iter().copied().collect();
        if set.len() != images.len() {
            return None;
        }
        tree::spanning_subtree(&self.target, root, &set)
    }

    pub fn apply(&self, name: &str) -> &str {
        &self.edge_map[name]
    }

    pub fn apply_ix(&self, e: EdgeIx) -> EdgeIx {
        self.target
            .edge_ix(&self.edge_map[self.source.edge_name(e)])
            .expect("validated edge map")
    }

    pub fn identity(tree: &Tree) -> TreeMorphism {
        let edge_map = tree.edge_names().iter().map(|n| (n.clone(), n.clone())).collect();
        TreeMorphism { source: tree.clone(), target: tree.clone(), edge_map }
    }

    /// Inclusion of a subtree, realized as a tree of its own with host names.
    pub fn subtree_inclusion(host: &Tree, sub: &Subtree) -> TreeMorphism {
        let small = sub.to_tree(host);
        let edge_map = small.edge_names().iter().map(|n| (n.clone(), n.clone())).collect();
        TreeMorphism { source: small, target: host.clone(), edge_map }
    }

    /// Diagrammatic composition: `self: S → T`, then `other: T → U`.
    pub fn then(&self, other: &TreeMorphism) -> Result<TreeMorphism> {
        if self.target != other.source {
            return Err(Error::Invalid("composition of non-matching tree morphisms".into()));
        }
        let edge_map = self
            .edge_map
            .iter()
            .map(|(a, b)| (a.clone(), other.edge_map[b].clone()))
            .collect();
        Ok(TreeMorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            edge_map,
        })
    }

    pub fn is_bijective(&self) -> bool {
        let values: BTreeSet<&String> = self.edge_map.values().collect();
        values.len() == self.source.edge_count()
            && self.source.edge_count() == self.target.edge_count()
    }

    /// Bijective tree morphisms are isomorphisms.
    pub fn is_isomorphism(&self) -> bool {
        if !self.is_bijective() {
            return false;
        }
        self.inverse().is_ok()
    }

    pub fn inverse(&self) -> Result<TreeMorphism> {
        if !self.is_bijective() {
            return Err(Error::Invalid("not bijective".into()));
        }
        let edge_map = self.edge_map.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
        TreeMorphism::new(self.target.clone(), self.source.clone(), edge_map)
    }

    pub fn is_root_preserving(&self) -> bool {
        self.apply(self.source.root_name()) == self.target.root_name()
    }

    /// Injective on edges.
    pub fn is_injective(&self) -> bool {
        let values: BTreeSet<&String> = self.edge_map.values().collect();
        values.len() == self.source.edge_count()
    }
}

/// A tree morphism as a dendrex of the representable of its target.
pub fn tree_morphism_to_dendrex(f: &TreeMorphism) -> Dendrex<FiniteOperad> {
    let target = &f.target;
    let edge_obj: BTreeMap<String, usize> = f
        .source
        .edge_names()
        .iter()
        .map(|n| (n.clone(), target.edge_ix(&f.edge_map[n]).unwrap()))
        .collect();
    let mut vertex_op = BTreeMap::new();
    for v in f.source.vertices() {
        let out_name = f.source.edge_name(v.out).to_string();
        let witness = f
            .vertex_witness(v.out)
            .expect("validated tree morphisms have vertex witnesses");
        let ordering: Vec<EdgeIx> = v.inputs.iter().map(|&e| f.apply_ix(e)).collect();
        vertex_op.insert(
            out_name,
            crate::operad::OpRef::Free {
                root: witness.root,
                vertices: witness.vertices,
                ordering,
            },
        );
    }
    Dendrex { edge_obj, vertex_op }
}

/// All tree morphisms `source → target`, deterministically ordered.
pub fn hom(source: &Tree, target: &Tree) -> Vec<TreeMorphism> {
    let free = FiniteOperad::free_on(target);
    enumerate_dendrices(source, &free)
        .into_iter()
        .map(|dx| {
            let edge_map = source
                .edge_names()
                .iter()
                .map(|n| (n.clone(), target.edge_name(dx.edge_obj[n]).to_string()))
                .collect();
            TreeMorphism { source: source.clone(), target: target.clone(), edge_map }
        })
        .collect()
}

/// Automorphisms of a tree.
pub fn automorphisms(tree: &Tree) -> Vec<TreeMorphism> {
    hom(tree, tree).into_iter().filter(|m| m.is_bijective()).collect()
}

/// The elementary inner face at an inner edge `e`: the map `∂_e T → T` from
/// the tree with `e` contracted and its end vertices merged.
pub fn inner_face(tree: &Tree, e: &str) -> Result<TreeMorphism> {
    let e_ix = tree.edge_ix(e)?;
    if !tree.is_inner(e_ix) {
        return Err(Error::NotInner(e.to_string()));
    }
    let v_top = tree.upper_vertex(e_ix).unwrap();
    let v_bot = tree.lower_vertex(e_ix).unwrap();
    let mut vertex_data = Vec::new();
    for (v_ix, v) in tree.vertices().iter().enumerate() {
        if v_ix == v_top {
            continue;
        }
        let out = tree.edge_name(v.out).to_string();
        let mut inputs = Vec::new();
        for &f in &v.inputs {
            if v_ix == v_bot && f == e_ix {
                // replace the contracted edge by the top vertex's inputs
                for &g in &tree.vertex(v_top).inputs {
                    inputs.push(tree.edge_name(g).to_string());
                }
            } else {
                inputs.push(tree.edge_name(f).to_string());
            }
        }
        vertex_data.push((out, inputs));
    }
    let source = Tree::new(tree.root_name(), &vertex_data)?;
    let edge_map = source.edge_names().iter().map(|n| (n.clone(), n.clone())).collect();
    TreeMorphism::new(source, tree.clone(), edge_map)
}

/// The degeneracy at an edge `e`: the map `σ_e T → T` from the tree with a
/// unary vertex inserted in the middle of `e`, collapsing both halves onto
/// `e`. The upper half keeps the name `e`; the lower half gets a fresh name.
pub fn degeneracy(tree: &Tree, e: &str) -> Result<TreeMorphism> {
    let e_ix = tree.edge_ix(e)?;
    let mut fresh = format!("{e}_lo");
    let mut k = 0usize;
    while tree.edge_names().contains(&fresh) {
        fresh = format!("{e}_lo{k}");
        k += 1;
    }
    // the upper half keeps the name e, the lower half is fresh; the new
    // unary vertex sits between them, and whatever was attached below e now
    // receives the lower half
    let mut vertex_data = vec![(fresh.clone(), vec![e.to_string()])];
    for v in tree.vertices() {
        let out = tree.edge_name(v.out).to_string();
        let inputs = v
            .inputs
            .iter()
            .map(|&f| if f == e_ix { fresh.clone() } else { tree.edge_name(f).to_string() })
            .collect();
        vertex_data.push((out, inputs));
    }
    let root = if tree.root() == e_ix { fresh.clone() } else { tree.root_name().to_string() };
    let source = Tree::new(&root, &vertex_data)?;
    let mut edge_map: BTreeMap<String, String> = source
        .edge_names()
        .iter()
        .map(|n| (n.clone(), n.clone()))
        .collect();
    edge_map.insert(fresh, e.to_string());
    TreeMorphism::new(source, tree.clone(), edge_map)
}

/// Identity of an elementary face of a tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FaceId {
    /// Contraction of an inner edge.
    Inner(String),
    /// Erasure of the vertex with the given output edge; the remaining
    /// subtree is identified by its root edge.
    External { erased: String, kept_root: String },
}

/// Elementary external faces: subtree inclusions `S ↪ T` with exactly one
/// vertex erased. A one-vertex tree has one such face per remaining edge.
pub fn external_faces(tree: &Tree) -> Vec<(FaceId, TreeMorphism)> {
    let mut result = Vec::new();
    let full: BTreeSet<usize> = (0..tree.vertex_count()).collect();
    for sub in tree::enumerate_subtrees(tree) {
        if sub.vertices.len() + 1 != tree.vertex_count() {
            continue;
        }
        let erased = full.difference(&sub.vertices).next().copied().unwrap();
        result.push((
            FaceId::External {
                erased: tree.edge_name(tree.vertex(erased).out).to_string(),
                kept_root: tree.edge_name(sub.root).to_string(),
            },
            TreeMorphism::subtree_inclusion(tree, &sub),
        ));
    }
    result.sort_by(|a, b| a.0.cmp(&b.0));
    result
}

pub fn external_faces_of_vertex(tree: &Tree, v_out: &str) -> Result<Vec<TreeMorphism>> {
    let faces: Vec<TreeMorphism> = external_faces(tree)
        .into_iter()
        .filter(|(id, _)| matches!(id, FaceId::External { erased, .. } if erased == v_out))
        .map(|(_, m)| m)
        .collect();
    if faces.is_empty() {
        Err(Error::NotExternal(v_out.to_string()))
    } else {
        Ok(faces)
    }
}

/// All elementary faces of a tree in canonical order.
pub fn elementary_faces(tree: &Tree) -> Vec<(FaceId, TreeMorphism)> {
    let mut result: Vec<(FaceId, TreeMorphism)> = tree
        .inner_edges()
        .into_iter()
        .map(|e| {
            let name = tree.edge_name(e).to_string();
            (FaceId::Inner(name.clone()), inner_face(tree, &name).expect("inner edge"))
        })
        .collect();
    result.extend(external_faces(tree));
    result.sort_by(|a, b| a.0.cmp(&b.0));
    result
}

/// One step of a factorization, in diagrammatic (application) order.
#[derive(Debug, Clone)]
pub enum Factor {
    Degeneracy(TreeMorphism),
    Iso(TreeMorphism),
    Face(TreeMorphism),
}

impl Factor {
    pub fn morphism(&self) -> &TreeMorphism {
        match self {
            Factor::Degeneracy(m) | Factor::Iso(m) | Factor::Face(m) => m,
        }
    }
}

/// Factor a tree morphism as degeneracies, then an isomorphism, then
/// elementary faces. The returned list composes (in order) to the input.
pub fn factorize(f: &TreeMorphism) -> Result<Vec<Factor>> {
    let mut factors: Vec<Factor> = Vec::new();
    let mut current = f.clone();

    // collapse unary vertices whose two edges map to the same target edge
    'outer: loop {
        for v in current.source.vertices() {
            if v.inputs.len() == 1 {
                let in_name = current.source.edge_name(v.inputs[0]);
                let out_name = current.source.edge_name(v.out);
                if current.edge_map[in_name] == current.edge_map[out_name] {
                    let sigma = collapse_unary(&current.source, out_name)?;
                    // current = rest ∘ sigma with rest defined on the collapsed tree
                    let mut rest_map = BTreeMap::new();
                    for name in sigma.target.edge_names() {
                        // both halves map to the same edge, so any preimage works
                        let pre = sigma
                            .edge_map
                            .iter()
                            .find(|(_, b)| *b == name)
                            .map(|(a, _)| a.clone())
                            .unwrap();
                        rest_map.insert(name.clone(), current.edge_map[&pre].clone());
                    }
                    let rest =
                        TreeMorphism::new(sigma.target.clone(), current.target.clone(), rest_map)?;
                    factors.push(Factor::Degeneracy(sigma));
                    current = rest;
                    continue 'outer;
                }
            }
        }
        break;
    }

    if !current.is_injective() {
        return Err(Error::Invalid(
            "morphism is non-injective but has no collapsed unary vertex".into(),
        ));
    }

    // peel elementary faces outside the image
    let mut faces_rev: Vec<TreeMorphism> = Vec::new();
    loop {
        if current.is_bijective() {
            factors.push(Factor::Iso(current.clone()));
            break;
        }
        let image: BTreeSet<&String> = current.edge_map.values().collect();
        let mut advanced = false;
        for (_, face) in elementary_faces(&current.target) {
            let face_edges: BTreeSet<&String> =
                face.source.edge_names().iter().collect();
            if !image.iter().all(|e| face_edges.contains(*e)) {
                continue;
            }
            // corestrict through the face (face edge maps are name-identical)
            let map = current.edge_map.clone();
            if let Ok(rest) =
                TreeMorphism::new(current.source.clone(), face.source.clone(), map)
            {
                faces_rev.push(face);
                current = rest;
                advanced = true;
                break;
            }
        }
        if !advanced {
            return Err(Error::Invalid("no elementary face contains the image".into()));
        }
    }
    factors.extend(faces_rev.into_iter().rev().map(Factor::Face));
    Ok(factors)
}

/// The degeneracy morphism collapsing the unary vertex with output `out`.
fn collapse_unary(tree: &Tree, out: &str) -> Result<TreeMorphism> {
    let out_ix = tree.edge_ix(out)?;
    let v = tree
        .upper_vertex(out_ix)
        .filter(|&v| tree.vertex(v).inputs.len() == 1)
        .ok_or_else(|| Error::Invalid(format!("no unary vertex above `{out}`")))?;
    let in_ix = tree.vertex(v).inputs[0];
    let in_name = tree.edge_name(in_ix).to_string();
    let mut vertex_data = Vec::new();
    for (v_ix, vx) in tree.vertices().iter().enumerate() {
        if v_ix == v {
            continue;
        }
        let rename = |e: EdgeIx| -> String {
            if e == in_ix {
                out.to_string()
            } else {
                tree.edge_name(e).to_string()
            }
        };
        vertex_data.push((rename(vx.out), vx.inputs.iter().map(|&e| rename(e)).collect()));
    }
    let root = if tree.root() == in_ix { out.to_string() } else { tree.root_name().to_string() };
    let target = Tree::new(&root, &vertex_data)?;
    let mut edge_map: BTreeMap<String, String> = tree
        .edge_names()
        .iter()
        .filter(|n| *n != &in_name)
        .map(|n| (n.clone(), n.clone()))
        .collect();
    edge_map.insert(in_name, out.to_string());
    TreeMorphism::new(tree.clone(), target, edge_map)
}

/// Recompose a factor list (diagrammatic order) into a single morphism.
pub fn recompose(factors: &[Factor]) -> Result<TreeMorphism> {
    let mut iter = factors.iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::Invalid("empty factorization".into()))?;
    let mut m = first.morphism().clone();
    for factor in iter {
        m = m.then(factor.morphism())?;
    }
    Ok(m)
}

/// A dendrex of a `DendroidalSet`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Dx {
    Nerve(Dendrex<FiniteOperad>),
    Cell(usize),
}

impl Dx {
    pub fn as_nerve(&self) -> &Dendrex<FiniteOperad> {
        match self {
            Dx::Nerve(d) => d,
            Dx::Cell(_) => panic!("expected a nerve dendrex"),
        }
    }
}

/// A dendroidal set: either the nerve of a finite operad (dendrices computed
/// on demand and memoized) or an explicit presheaf truncated by vertex count.
#[derive(Debug)]
pub enum DendroidalSet {
    Nerve { operad: FiniteOperad, cache: Mutex<BTreeMap<String, Vec<Dendrex<FiniteOperad>>>> },
    Truncated(TruncatedPresheaf),
}

impl Clone for DendroidalSet {
    fn clone(&self) -> Self {
        match self {
            DendroidalSet::Nerve { operad, .. } => DendroidalSet::nerve(operad.clone()),
            DendroidalSet::Truncated(p) => DendroidalSet::Truncated(p.clone()),
        }
    }
}

impl DendroidalSet {
    pub fn nerve(operad: FiniteOperad) -> DendroidalSet {
        DendroidalSet::Nerve { operad, cache: Mutex::new(BTreeMap::new()) }
    }

    /// The representable dendroidal set of a tree.
    pub fn representable(tree: &Tree) -> DendroidalSet {
        DendroidalSet::nerve(FiniteOperad::free_on(tree))
    }

    pub fn operad(&self) -> Option<&FiniteOperad> {
        match self {
            DendroidalSet::Nerve { operad, .. } => Some(operad),
            DendroidalSet::Truncated(_) => None,
        }
    }

    /// The set of dendrices at a tree, in a deterministic order.
    pub fn dendrices(&self, tree: &Tree) -> Result<Vec<Dx>> {
        match self {
            DendroidalSet::Nerve { operad, cache } => {
                let key = tree.structural_key();
                {
                    let cache = cache.lock().unwrap();
                    if let Some(found) = cache.get(&key) {
                        return Ok(found.iter().cloned().map(Dx::Nerve).collect());
                    }
                }
                let computed = enumerate_dendrices(tree, operad);
                let mut cache = cache.lock().unwrap();
                cache.insert(key, computed.clone());
                Ok(computed.into_iter().map(Dx::Nerve).collect())
            }
            DendroidalSet::Truncated(p) => {
                let rep = p.rep_index(tree)?;
                Ok((0..p.cells[rep].len()).map(Dx::Cell).collect())
            }
        }
    }

    /// Contravariant action: for `f: S → T`, maps dendrices at `T` to
    /// dendrices at `S`.
    pub fn act(&self, f: &TreeMorphism, dx: &Dx) -> Result<Dx> {
        match (self, dx) {
            (DendroidalSet::Nerve { operad, .. }, Dx::Nerve(d)) => Ok(Dx::Nerve(d.precompose(
                &f.target,
                operad,
                &f.source,
                &f.edge_map,
            ))),
            (DendroidalSet::Truncated(p), Dx::Cell(i)) => Ok(Dx::Cell(p.act(f, *i)?)),
            _ => Err(Error::Invalid("dendrex does not belong to this dendroidal set".into())),
        }
    }

    /// Free action of tree automorphisms on dendrices, for all trees with at
    /// most `bound` vertices and arities up to `arity_cap`.
    pub fn is_normal(&self, bound: usize, arity_cap: usize) -> Result<bool> {
        for rep in tree::enumerate_trees(bound, arity_cap) {
            let cells = self.dendrices(&rep)?;
            for phi in automorphisms(&rep) {
                if phi.edge_map.iter().all(|(a, b)| a == b) {
                    continue;
                }
                for x in &cells {
                    if self.act(&phi, x)? == *x {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// An explicit presheaf on trees with at most `bound` vertices (arities up to
/// `arity_cap`), stored on canonical representatives with a total action
/// table for morphisms between representatives.
#[derive(Debug, Clone)]
pub struct TruncatedPresheaf {
    pub bound: usize,
    pub arity_cap: usize,
    pub reps: Vec<Tree>,
    rep_by_key: BTreeMap<String, usize>,
    /// cell labels per representative
    pub cells: Vec<Vec<String>>,
    /// `(src_rep, dst_rep, edge_map) → images`: for `f: src → dst`, entry `i`
    /// is the index in `cells[src]` of the restriction of cell `i` of `dst`
    action: BTreeMap<(usize, usize, Vec<(String, String)>), Vec<usize>>,
}

impl TruncatedPresheaf {
    /// Truncate any dendroidal set to an explicit presheaf.
    pub fn from_dendroidal(x: &DendroidalSet, bound: usize, arity_cap: usize) -> Result<Self> {
        let reps = tree::enumerate_trees(bound, arity_cap);
        let mut cells = Vec::new();
        let mut cell_index: Vec<BTreeMap<Dx, usize>> = Vec::new();
        for rep in &reps {
            let dendrices = x.dendrices(rep)?;
            cells.push((0..dendrices.len()).map(|i| format!("d{i}")).collect());
            cell_index.push(dendrices.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect());
        }
        let mut action = BTreeMap::new();
        for (si, s) in reps.iter().enumerate() {
            for (ti, t) in reps.iter().enumerate() {
                for f in hom(s, t) {
                    let dendrices = x.dendrices(t)?;
                    let images: Result<Vec<usize>> = dendrices
                        .iter()
                        .map(|dx| Ok(cell_index[si][&x.act(&f, dx)?]))
                        .collect();
                    action.insert((si, ti, map_key(&f.edge_map)), images?);
                }
            }
        }
        let rep_by_key =
            reps.iter().enumerate().map(|(i, r)| (r.canonical_key(), i)).collect();
        Ok(TruncatedPresheaf { bound, arity_cap, reps, rep_by_key, cells, action })
    }

    /// Raw constructor for hand-built presheaves; checks functoriality.
    pub fn from_raw(
        bound: usize,
        arity_cap: usize,
        cells_by_rep: BTreeMap<String, Vec<String>>,
        action_fn: impl Fn(&Tree, &Tree, &TreeMorphism, usize) -> usize,
    ) -> Result<Self> {
        let reps = tree::enumerate_trees(bound, arity_cap);
        let cells: Vec<Vec<String>> = reps
            .iter()
            .map(|r| cells_by_rep.get(&r.canonical_key()).cloned().unwrap_or_default())
            .collect();
        let mut action = BTreeMap::new();
        for (si, s) in reps.iter().enumerate() {
            for (ti, t) in reps.iter().enumerate() {
                for f in hom(s, t) {
                    let images: Vec<usize> =
                        (0..cells[ti].len()).map(|i| action_fn(s, t, &f, i)).collect();
                    if images.iter().any(|&i| i >= cells[si].len()) {
                        return Err(Error::Invalid("action image out of range".into()));
                    }
                    action.insert((si, ti, map_key(&f.edge_map)), images);
                }
            }
        }
        let rep_by_key =
            reps.iter().enumerate().map(|(i, r)| (r.canonical_key(), i)).collect();
        let p = TruncatedPresheaf { bound, arity_cap, reps, rep_by_key, cells, action };
        p.validate_functoriality()?;
        Ok(p)
    }

    pub fn rep_index(&self, tree: &Tree) -> Result<usize> {
        self.rep_by_key.get(&tree.canonical_key()).copied().ok_or_else(|| {
            Error::BoundExceeded(format!(
                "tree `{}` outside the truncation (bound {}, arity cap {})",
                tree.print(),
                self.bound,
                self.arity_cap
            ))
        })
    }

    /// The canonical identification of a tree with its representative.
    fn canonical_iso(&self, tree: &Tree) -> Result<TreeMorphism> {
        let rep = &self.reps[self.rep_index(tree)?];
        // relabel both onto canonical positions; the composite identifies them
        let to_pos = tree.canonical_form().relabeling;
        let rep_to_pos = rep.canonical_form().relabeling;
        let pos_to_rep: BTreeMap<String, String> =
            rep_to_pos.into_iter().map(|(a, b)| (b, a)).collect();
        let edge_map: BTreeMap<String, String> = to_pos
            .into_iter()
            .map(|(a, b)| (a, pos_to_rep[&b].clone()))
            .collect();
        TreeMorphism::new(tree.clone(), rep.clone(), edge_map)
    }

    /// Action of an arbitrary in-bound morphism, conjugated onto the stored
    /// representative-level table.
    pub fn act(&self, f: &TreeMorphism, cell: usize) -> Result<usize> {
        let si = self.rep_index(&f.source)?;
        let ti = self.rep_index(&f.target)?;
        let src_iso = self.canonical_iso(&f.source)?; // S → rep_S
        let dst_iso = self.canonical_iso(&f.target)?; // T → rep_T
        // rep_S → S → T → rep_T
        let conj = src_iso.inverse()?.then(f)?.then(&dst_iso)?;
        let images = self
            .action
            .get(&(si, ti, map_key(&conj.edge_map)))
            .ok_or_else(|| Error::Invalid("missing action entry".into()))?;
        images
            .get(cell)
            .copied()
            .ok_or_else(|| Error::Invalid("cell index out of range".into()))
    }

    /// Cells not in the image of any degeneracy collapsing a unary vertex.
    pub fn nondegenerate_cells(&self, rep_ix: usize) -> Vec<usize> {
        let rep = &self.reps[rep_ix];
        let mut degenerate: BTreeSet<usize> = BTreeSet::new();
        for v in rep.vertices() {
            if v.inputs.len() != 1 {
                continue;
            }
            let out_name = rep.edge_name(v.out).to_string();
            let Ok(sigma) = collapse_unary(rep, &out_name) else { continue };
            let Ok(ci) = self.rep_index(&sigma.target) else { continue };
            // sigma: rep -> collapsed tree; its contravariant action sends
            // cells at the collapsed tree into cells at rep
            for cell in 0..self.cells[ci].len() {
                if let Ok(img) = self.act(&sigma, cell) {
                    degenerate.insert(img);
                }
            }
        }
        (0..self.cells[rep_ix].len()).filter(|i| !degenerate.contains(i)).collect()
    }

    pub fn validate_functoriality(&self) -> Result<()> {
        for (si, s) in self.reps.iter().enumerate() {
            // identities
            let id = TreeMorphism::identity(s);
            let images = &self.action[&(si, si, map_key(&id.edge_map))];
            for (i, &img) in images.iter().enumerate() {
                if img != i {
                    return Err(Error::Invalid("identity does not act as identity".into()));
                }
            }
            for (ti, t) in self.reps.iter().enumerate() {
                for f in hom(s, t) {
                    for (ui, u) in self.reps.iter().enumerate() {
                        for g in hom(t, u) {
                            let fg = f.then(&g)?;
                            let lhs = &self.action[&(si, ui, map_key(&fg.edge_map))];
                            let via_g = &self.action[&(ti, ui, map_key(&g.edge_map))];
                            let via_f = &self.action[&(si, ti, map_key(&f.edge_map))];
                            for c in 0..self.cells[ui].len() {
                                if lhs[c] != via_f[via_g[c]] {
                                    return Err(Error::Invalid(format!(
                                        "functoriality fails at {} → {} → {}",
                                        s.print(),
                                        t.print(),
                                        u.print()
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn map_key(m: &BTreeMap<String, String>) -> Vec<(String, String)> {
    m.iter().map(|(a, b)| (a.clone(), b.clone())).collect()
}

/// An inner-horn problem: a tree, a distinguished inner edge, and a dendrex
/// for every elementary face except the omitted inner one.
#[derive(Debug, Clone)]
pub struct HornProblem {
    pub tree: Tree,
    pub omitted: String,
    pub faces: Vec<(FaceId, TreeMorphism, Dx)>,
}

impl HornProblem {
    /// Assemble a horn problem from a family keyed by face identity.
    pub fn new(tree: Tree, omitted: &str, family: BTreeMap<FaceId, Dx>) -> Result<HornProblem> {
        let e = tree.edge_ix(omitted)?;
        if !tree.is_inner(e) {
            return Err(Error::NotInner(omitted.to_string()));
        }
        let mut faces = Vec::new();
        for (id, m) in elementary_faces(&tree) {
            if id == FaceId::Inner(omitted.to_string()) {
                continue;
            }
            let dx = family.get(&id).ok_or_else(|| {
                Error::IncompatibleFamily(format!("missing face {id:?}"))
            })?;
            faces.push((id, m, dx.clone()));
        }
        Ok(HornProblem { tree: tree.clone(), omitted: omitted.to_string(), faces })
    }

    /// The horn problem obtained by restricting a filler to its faces.
    pub fn from_filler(x: &DendroidalSet, tree: &Tree, omitted: &str, filler: &Dx) -> Result<Self> {
        let e = tree.edge_ix(omitted)?;
        if !tree.is_inner(e) {
            return Err(Error::NotInner(omitted.to_string()));
        }
        let mut faces = Vec::new();
        for (id, m) in elementary_faces(tree) {
            if id == FaceId::Inner(omitted.to_string()) {
                continue;
            }
            let dx = x.act(&m, filler)?;
            faces.push((id, m, dx));
        }
        Ok(HornProblem { tree: tree.clone(), omitted: omitted.to_string(), faces })
    }

    /// Check agreement of the family on overlaps: common further elementary
    /// faces of each pair of faces. Deeper intersections factor through
    /// these, so this is exact.
    pub fn validate_compatibility(&self, x: &DendroidalSet) -> Result<()> {
        for (i, (id1, m1, x1)) in self.faces.iter().enumerate() {
            for (id2, m2, x2) in self.faces.iter().skip(i + 1) {
                for (g1, g2) in face_overlaps(m1, m2) {
                    let r1 = x.act(&g1, x1)?;
                    let r2 = x.act(&g2, x2)?;
                    if r1 != r2 {
                        return Err(Error::IncompatibleFamily(format!(
                            "faces {id1:?} and {id2:?} disagree on a common face"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// All dendrices of `x` at the tree restricting to the given family.
    pub fn solve(&self, x: &DendroidalSet) -> Result<Vec<Dx>> {
        let mut fillers = Vec::new();
        for candidate in x.dendrices(&self.tree)? {
            let mut matches = true;
            for (_, m, expected) in &self.faces {
                if x.act(m, &candidate)? != *expected {
                    matches = false;
                    break;
                }
            }
            if matches {
                fillers.push(candidate);
            }
        }
        Ok(fillers)
    }
}

/// Pairs of elementary faces of the sources of two face maps with equal
/// composites into the common target.
fn face_overlaps(m1: &TreeMorphism, m2: &TreeMorphism) -> Vec<(TreeMorphism, TreeMorphism)> {
    let mut out = Vec::new();
    for (_, g1) in elementary_faces(&m1.source) {
        let c1 = g1.then(m1).unwrap();
        for (_, g2) in elementary_faces(&m2.source) {
            if c1 == g2.then(m2).unwrap() {
                out.push((g1.clone(), g2));
            }
        }
    }
    out
}

/// All compatible inner-horn families at `(tree, omitted)`, enumerated by
/// assigning dendrices to elementary faces with pairwise-overlap pruning.
pub fn enumerate_horn_families(
    x: &DendroidalSet,
    tree: &Tree,
    omitted: &str,
) -> Result<Vec<HornProblem>> {
    let e = tree.edge_ix(omitted)?;
    if !tree.is_inner(e) {
        return Err(Error::NotInner(omitted.to_string()));
    }
    let faces: Vec<(FaceId, TreeMorphism)> = elementary_faces(tree)
        .into_iter()
        .filter(|(id, _)| *id != FaceId::Inner(omitted.to_string()))
        .collect();
    let choices: Result<Vec<Vec<Dx>>> =
        faces.iter().map(|(_, m)| x.dendrices(&m.source)).collect();
    let choices = choices?;
    // precompute overlap constraints once per face pair
    let mut overlaps: BTreeMap<(usize, usize), Vec<(TreeMorphism, TreeMorphism)>> =
        BTreeMap::new();
    for i in 0..faces.len() {
        for j in i + 1..faces.len() {
            overlaps.insert((i, j), face_overlaps(&faces[i].1, &faces[j].1));
        }
    }
    let mut out = Vec::new();
    let mut partial: Vec<Dx> = Vec::new();
    enumerate_rec(x, tree, omitted, &faces, &choices, &overlaps, &mut partial, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_rec(
    x: &DendroidalSet,
    tree: &Tree,
    omitted: &str,
    faces: &[(FaceId, TreeMorphism)],
    choices: &[Vec<Dx>],
    overlaps: &BTreeMap<(usize, usize), Vec<(TreeMorphism, TreeMorphism)>>,
    partial: &mut Vec<Dx>,
    out: &mut Vec<HornProblem>,
) -> Result<()> {
    let k = partial.len();
    if k == faces.len() {
        let family: BTreeMap<FaceId, Dx> = faces
            .iter()
            .map(|(id, _)| id.clone())
            .zip(partial.iter().cloned())
            .collect();
        out.push(HornProblem::new(tree.clone(), omitted, family)?);
        return Ok(());
    }
    'candidates: for dx in &choices[k] {
        for (j, prev) in partial.iter().enumerate() {
            for (g1, g2) in &overlaps[&(j, k)] {
                if x.act(g1, prev)? != x.act(g2, dx)? {
                    continue 'candidates;
                }
            }
        }
        partial.push(dx.clone());
        enumerate_rec(x, tree, omitted, faces, choices, overlaps, partial, out)?;
        partial.pop();
    }
    Ok(())
}

/// Check that a component family assembles into a homotopy from `f` to `g`
/// between operad maps: every component `h_x` must be a unary operation
/// `f(x) → g(x)`, and for every operation `q` the interchange relation
/// `h_{out(q)} ∘ f(q) = g(q) ∘ (h_{in_1(q)}, …, h_{in_n(q)})` must hold.
#[allow(clippy::too_many_arguments)]
pub fn check_homotopy<S: Operad, T: Operad>(
    source: &S,
    target: &T,
    ops: &[S::Op],
    f_obj: &dyn Fn(&S::Obj) -> T::Obj,
    f_op: &dyn Fn(&S::Op) -> T::Op,
    g_obj: &dyn Fn(&S::Obj) -> T::Obj,
    g_op: &dyn Fn(&S::Op) -> T::Op,
    component: &dyn Fn(&S::Obj) -> Option<T::Op>,
) -> Result<bool> {
    for q in ops {
        if !check_homotopy_op(source, target, q, f_obj, f_op, g_obj, g_op, component)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The interchange condition for a single operation; see `check_homotopy`.
#[allow(clippy::too_many_arguments)]
pub fn check_homotopy_op<S: Operad, T: Operad>(
    source: &S,
    target: &T,
    q: &S::Op,
    f_obj: &dyn Fn(&S::Obj) -> T::Obj,
    f_op: &dyn Fn(&S::Op) -> T::Op,
    g_obj: &dyn Fn(&S::Obj) -> T::Obj,
    g_op: &dyn Fn(&S::Op) -> T::Op,
    component: &dyn Fn(&S::Obj) -> Option<T::Op>,
) -> Result<bool> {
    let comp = |x: &S::Obj| -> Result<T::Op> {
        let h = component(x)
            .ok_or_else(|| Error::Invalid("missing homotopy component".into()))?;
        if target.op_inputs(&h) != vec![f_obj(x)] || target.op_output(&h) != g_obj(x) {
            return Err(Error::Invalid("component endpoints do not match".into()));
        }
        Ok(h)
    };
    let inputs = source.op_inputs(q);
    let out = source.op_output(q);
    let lhs = match target.compose(&comp(&out)?, 0, &f_op(q)) {
        Some(op) => op,
        None => return Ok(false),
    };
    let mut rhs = g_op(q);
    for (i, c) in inputs.iter().enumerate().rev() {
        rhs = match target.compose(&rhs, i, &comp(c)?) {
            Some(op) => op,
            None => return Ok(false),
        };
    }
    Ok(lhs == rhs)
}

/// The walking isomorphism as a dendroidal set (supported on linear trees).
pub fn walking_iso_nerve() -> DendroidalSet {
    DendroidalSet::nerve(crate::operad::from_category(&FinCategory::walking_iso()))
}

/// Glue a copy of the (truncated) walking isomorphism along each chosen
/// 1-dendrex: the presheaf pushout computed degreewise. `arrows` indexes
/// cells of `x` at the linear tree with one vertex.
pub fn localize_truncated(
    x: &TruncatedPresheaf,
    arrows: &[usize],
    bound: usize,
) -> Result<TruncatedPresheaf> {
    if bound < 1 || x.bound < 1 {
        return Err(Error::BoundExceeded(
            "localization needs the one-vertex linear tree within bounds".into(),
        ));
    }
    let j = TruncatedPresheaf::from_dendroidal(&walking_iso_nerve(), x.bound, x.arity_cap)?;
    let c1 = Tree::linear(1).canonicalize();
    let c1_ix = x.rep_index(&c1)?;
    for &s in arrows {
        if s >= x.cells[c1_ix].len() {
            return Err(Error::Invalid(format!("no 1-dendrex with index {s}")));
        }
    }
    // the attaching 1-cell of the walking isomorphism: leaf object 0, root
    // object 1, vertex mapped to the arrow 0 → 1
    let j_c1 = walking_iso_nerve().dendrices(&c1)?;
    let j_attach = j_c1
        .iter()
        .position(|dx| {
            let d = dx.as_nerve();
            let leaf = c1
                .edge_names()
                .iter()
                .find(|n| c1.is_leaf(c1.edge_ix(n).unwrap()))
                .unwrap();
            d.edge_obj[leaf] == 0 && d.edge_obj[c1.root_name()] == 1
        })
        .expect("the walking isomorphism has a 1-cell from 0 to 1");

    // disjoint union carriers: x-cells first, then (arrow, j-cell) pairs
    let n_reps = x.reps.len();
    let offset: Vec<usize> = (0..n_reps).map(|r| x.cells[r].len()).collect();
    let size: Vec<usize> =
        (0..n_reps).map(|r| x.cells[r].len() + arrows.len() * j.cells[r].len()).collect();
    let mut uf: Vec<Vec<usize>> = size.iter().map(|&n| (0..n).collect()).collect();
    fn find(uf: &mut Vec<usize>, mut i: usize) -> usize {
        while uf[i] != i {
            uf[i] = uf[uf[i]];
            i = uf[i];
        }
        i
    }
    fn union(uf: &mut Vec<usize>, a: usize, b: usize) {
        let (ra, rb) = (find(uf, a), find(uf, b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            uf[hi] = lo;
        }
    }
    let j_pair = |r: usize, a_pos: usize, jc: usize| offset[r] + a_pos * j.cells[r].len() + jc;

    // for every morphism u: rep → C_1, identify x(u)(s) with (s, j(u)(attach))
    for (ri, rep) in x.reps.iter().enumerate() {
        for u in hom(rep, &c1) {
            for (a_pos, &s) in arrows.iter().enumerate() {
                let xs = x.act(&u, s)?;
                let js = j.act(&u, j_attach)?;
                union(&mut uf[ri], xs, j_pair(ri, a_pos, js));
            }
        }
    }

    // quotient carriers with deterministic labels
    let mut class_index: Vec<BTreeMap<usize, usize>> = Vec::new();
    let mut new_cells: Vec<Vec<String>> = Vec::new();
    for r in 0..n_reps {
        let mut index = BTreeMap::new();
        let mut labels = Vec::new();
        for i in 0..size[r] {
            let root = find(&mut uf[r], i);
            if let std::collections::btree_map::Entry::Vacant(entry) = index.entry(root) {
                let label = if root < offset[r] {
                    format!("x:{}", x.cells[r][root])
                } else {
                    let rel = root - offset[r];
                    let a_pos = rel / j.cells[r].len();
                    let jc = rel % j.cells[r].len();
                    format!("j:{}:{}", arrows[a_pos], j.cells[r][jc])
                };
                entry.insert(labels.len());
                labels.push(label);
            }
        }
        class_index.push(index);
        new_cells.push(labels);
    }

    // induced action, well-defined by the pushout construction
    let mut new_action = BTreeMap::new();
    for (si, s) in x.reps.iter().enumerate() {
        for (ti, t) in x.reps.iter().enumerate() {
            for f in hom(s, t) {
                let key = (si, ti, map_key(&f.edge_map));
                let mut images = Vec::new();
                for i in 0..size[ti] {
                    let root = find(&mut uf[ti], i);
                    if find(&mut uf[ti], i) != i && class_index[ti].get(&i).is_none() {
                        // only classes are enumerated below
                    }
                    let _ = root;
                    images.push(0);
                }
                // compute per class representative
                let mut class_images = vec![0usize; new_cells[ti].len()];
                for i in 0..size[ti] {
                    let root = find(&mut uf[ti], i);
                    if root != i {
                        continue;
                    }
                    let img_raw = if i < offset[ti] {
                        x.act(&f, i)?
                    } else {
                        let rel = i - offset[ti];
                        let a_pos = rel / j.cells[ti].len();
                        let jc = rel % j.cells[ti].len();
                        j_pair(si, a_pos, j.act(&f, jc)?)
                    };
                    let img_root = find(&mut uf[si], img_raw);
                    class_images[class_index[ti][&i]] = class_index[si][&img_root];
                }
                let _ = images;
                new_action.insert(key, class_images);
            }
        }
    }

    let p = TruncatedPresheaf {
        bound: bound.min(x.bound),
        arity_cap: x.arity_cap,
        reps: x.reps.clone(),
        rep_by_key: x.rep_by_key.clone(),
        cells: new_cells,
        action: new_action,
    };
    p.validate_functoriality()?;
    Ok(p)
}

/// The last vertex assignment for presheaves supported on linear trees: a
/// dendrex `([n], f)` goes to its value at the root end.
pub fn last_vertex_object(x: &DendroidalSet, tree: &Tree, dx: &Dx) -> Result<Dx> {
    if tree.vertices().iter().any(|v| v.inputs.len() != 1) {
        return Err(Error::Invalid(format!("tree `{}` is not linear", tree.print())));
    }
    let eta = Tree::eta(tree.root_name());
    let inclusion = TreeMorphism::new(
        eta,
        tree.clone(),
        BTreeMap::from([(tree.root_name().to_string(), tree.root_name().to_string())]),
    )?;
    x.act(&inclusion, dx)
}

/// The last vertex assignment on a morphism of elements `phi: ([n], f) →
/// ([m], g)` over `x`: the 1-dendrex of `x` from `f(n)` to `g(m)`.
pub fn last_vertex_arrow(
    x: &DendroidalSet,
    phi: &TreeMorphism,
    g_dx: &Dx,
) -> Result<Dx> {
    let src = &phi.source;
    let dst = &phi.target;
    if src.vertices().iter().any(|v| v.inputs.len() != 1)
        || dst.vertices().iter().any(|v| v.inputs.len() != 1)
    {
        return Err(Error::Invalid("last vertex needs linear trees".into()));
    }
    let c1 = Tree::parse("out[in]").expect("static tree");
    let psi = TreeMorphism::new(
        c1,
        dst.clone(),
        BTreeMap::from([
            ("in".to_string(), phi.edge_map[src.root_name()].clone()),
            ("out".to_string(), dst.root_name().to_string()),
        ]),
    )?;
    x.act(&psi, g_dx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::from_category;

    #[test]
    fn hom_counts_between_trees() {
        let c2 = Tree::parse("r[a,b]").unwrap();
        assert_eq!(hom(&c2, &c2).len(), 2);
        assert_eq!(hom(&Tree::eta("e"), &c2).len(), 3);
        // order-preserving maps [1] → [2]
        assert_eq!(hom(&Tree::linear(1), &Tree::linear(2)).len(), 6);
        // no map collapsing a binary vertex
        assert_eq!(hom(&c2, &Tree::eta("e")).len(), 0);
    }

    #[test]
    fn automorphism_groups() {
        assert_eq!(automorphisms(&Tree::parse("r[a,b]").unwrap()).len(), 2);
        assert_eq!(automorphisms(&Tree::linear(3)).len(), 1);
        assert_eq!(automorphisms(&Tree::parse("r[a[x],b[y]]").unwrap()).len(), 2);
        assert_eq!(automorphisms(&Tree::parse("r[a[x],b]").unwrap()).len(), 1);
    }

    #[test]
    fn inner_face_of_linear_tree() {
        // contracting the middle edge of [2] gives the map [1] → [2] hitting
        // the outer edges
        let t = Tree::linear(2);
        let f = inner_face(&t, "1").unwrap();
        assert_eq!(f.source.vertex_count(), 1);
        assert_eq!(f.apply("0"), "0");
        assert_eq!(f.apply("2"), "2");
        assert!(inner_face(&t, "0").is_err());
        assert!(inner_face(&t, "2").is_err());
    }

    #[test]
    fn inner_face_above_stump() {
        let t = Tree::parse("r[a[]]").unwrap();
        let f = inner_face(&t, "a").unwrap();
        assert_eq!(f.source.vertex_count(), 1);
        assert!(f.source.is_isomorphic(&Tree::parse("r[]").unwrap()));
    }

    #[test]
    fn external_faces_of_corolla() {
        // erasing the unique vertex of C_2 leaves eta at each of the 3 edges
        let t = Tree::parse("r[a,b]").unwrap();
        let faces = external_faces_of_vertex(&t, "r").unwrap();
        assert_eq!(faces.len(), 3);
        for f in &faces {
            assert_eq!(f.source.vertex_count(), 0);
        }
    }

    #[test]
    fn external_faces_of_linear() {
        let t = Tree::linear(2);
        let faces = external_faces(&t);
        assert_eq!(faces.len(), 2);
        let roots: BTreeSet<&str> =
            faces.iter().map(|(_, m)| m.source.root_name()).collect();
        assert_eq!(roots, BTreeSet::from(["1", "2"]));
    }

    #[test]
    fn degeneracy_on_eta() {
        let t = Tree::eta("e");
        let s = degeneracy(&t, "e").unwrap();
        assert_eq!(s.source.vertex_count(), 1);
        assert_eq!(s.apply("e"), "e");
        assert_eq!(s.edge_map.len(), 2);
        for (_, v) in s.edge_map.iter() {
            assert_eq!(v, "e");
        }
    }

    #[test]
    fn degeneracy_inserts_unary_vertex() {
        let t = Tree::parse("r[a,b]").unwrap();
        for e in ["r", "a", "b"] {
            let s = degeneracy(&t, e).unwrap();
            assert_eq!(s.source.vertex_count(), 2);
            assert_eq!(s.source.edge_count(), 4);
            assert_eq!(s.apply(&format!("{e}_lo")), e);
        }
        assert_eq!(degeneracy(&t, "r").unwrap().source.root_name(), "r_lo");
        assert_eq!(degeneracy(&t, "a").unwrap().source.root_name(), "r");
    }

    #[test]
    fn simplicial_identities_via_edge_maps() {
        // d_i d_j = d_{j-1} d_i for i < j on [3], faces as tree morphisms
        let t3 = Tree::linear(3);
        let faces_of = |t: &Tree| -> Vec<TreeMorphism> {
            // simplicial face d_i of [n] omits element i; as trees: d_0 and
            // d_n are the external faces, the rest contract inner edges
            let n = t.vertex_count();
            let chain = t.path_to_root(t.minimal_edges()[0]);
            (0..=n)
                .map(|i| {
                    if i == 0 {
                        external_faces(t)
                            .into_iter()
                            .map(|(_, m)| m)
                            .find(|m| m.source.root_name() == t.root_name())
                            .unwrap()
                    } else if i == n {
                        external_faces(t)
                            .into_iter()
                            .map(|(_, m)| m)
                            .find(|m| m.source.root_name() != t.root_name())
                            .unwrap()
                    } else {
                        inner_face(t, t.edge_name(chain[i])).unwrap()
                    }
                })
                .collect()
        };
        let d3 = faces_of(&t3);
        for j in 0..=3usize {
            for i in 0..j {
                let dj = &d3[j];
                let di_of_dj = faces_of(&dj.source)[i].clone();
                let lhs = di_of_dj.then(dj).unwrap();
                let di = &d3[i];
                let djm1_of_di = faces_of(&di.source)[j - 1].clone();
                let rhs = djm1_of_di.then(di).unwrap();
                assert_eq!(lhs.edge_map, rhs.edge_map, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn factorization_recomposes() {
        let bound_trees = tree::enumerate_trees(3, 2);
        let mut checked = 0usize;
        for s in &bound_trees {
            for t in &bound_trees {
                for f in hom(s, t) {
                    let factors = factorize(&f).unwrap();
                    let back = recompose(&factors).unwrap();
                    assert_eq!(back.edge_map, f.edge_map);
                    assert_eq!(back.source, f.source);
                    assert_eq!(back.target, f.target);
                    checked += 1;
                }
            }
        }
        assert!(checked > 100, "checked {checked} morphisms");
    }

    #[test]
    fn factorization_orders_degeneracies_before_faces() {
        // a map [2] → [1] collapsing the top vertex, then included into [2]
        let f = TreeMorphism::new(
            Tree::linear(2),
            Tree::linear(2),
            BTreeMap::from([
                ("0".into(), "0".into()),
                ("1".into(), "0".into()),
                ("2".into(), "1".into()),
            ]),
        )
        .unwrap();
        let factors = factorize(&f).unwrap();
        let kinds: Vec<&str> = factors
            .iter()
            .map(|x| match x {
                Factor::Degeneracy(_) => "s",
                Factor::Iso(_) => "i",
                Factor::Face(_) => "f",
            })
            .collect();
        let first_face = kinds.iter().position(|&k| k == "f");
        let last_deg = kinds.iter().rposition(|&k| k == "s");
        if let (Some(ff), Some(ld)) = (first_face, last_deg) {
            assert!(ld < ff);
        }
        assert_eq!(recompose(&factors).unwrap().edge_map, f.edge_map);
    }

    #[test]
    fn nerve_dendrices_memoized_and_counted() {
        let x = DendroidalSet::representable(&Tree::parse("r[a,b]").unwrap());
        let c2 = Tree::parse("x[y,z]").unwrap();
        assert_eq!(x.dendrices(&c2).unwrap().len(), 2);
        assert_eq!(x.dendrices(&c2).unwrap().len(), 2);
        assert_eq!(x.dendrices(&Tree::eta("e")).unwrap().len(), 3);
    }

    #[test]
    fn representable_matches_hom_sets() {
        let trees = tree::enumerate_trees(3, 2);
        for t in &trees {
            let x = DendroidalSet::representable(t);
            for s in &trees {
                assert_eq!(
                    x.dendrices(s).unwrap().len(),
                    hom(s, t).len(),
                    "s={} t={}",
                    s.print(),
                    t.print()
                );
            }
        }
    }

    #[test]
    fn nerve_normality_matches_sigma_freeness() {
        let free = FiniteOperad::free_on(&Tree::parse("r[a,b]").unwrap());
        assert!(DendroidalSet::nerve(free).is_normal(3, 2).unwrap());
        let comm = crate::operad::commutative_operad(2);
        assert!(!DendroidalSet::nerve(comm).is_normal(2, 2).unwrap());
    }

    #[test]
    fn horn_problems_over_nerves_have_unique_fillers() {
        let x = DendroidalSet::nerve(from_category(&FinCategory::poset(2)));
        let t = Tree::linear(2);
        for filler in x.dendrices(&t).unwrap() {
            let horn = HornProblem::from_filler(&x, &t, "1", &filler).unwrap();
            horn.validate_compatibility(&x).unwrap();
            let fillers = horn.solve(&x).unwrap();
            assert_eq!(fillers, vec![filler]);
        }
    }

    #[test]
    fn horn_enumeration_counts_families() {
        // inner-horn families on [2] over the nerve of the poset [2]
        // correspond to composable pairs of arrows
        let x = DendroidalSet::nerve(from_category(&FinCategory::poset(2)));
        let t = Tree::linear(2);
        let families = enumerate_horn_families(&x, &t, "1").unwrap();
        assert_eq!(families.len(), x.dendrices(&t).unwrap().len());
        for family in &families {
            assert_eq!(family.solve(&x).unwrap().len(), 1);
        }
    }

    #[test]
    fn truncated_presheaf_round_trip() {
        let x = DendroidalSet::representable(&Tree::parse("r[a]").unwrap());
        let p = TruncatedPresheaf::from_dendroidal(&x, 2, 2).unwrap();
        p.validate_functoriality().unwrap();
        let eta = Tree::eta("q");
        assert_eq!(p.cells[p.rep_index(&eta).unwrap()].len(), 2);
        let c1 = Tree::parse("u[v]").unwrap();
        assert_eq!(
            p.cells[p.rep_index(&c1).unwrap()].len(),
            x.dendrices(&c1).unwrap().len()
        );
    }

    #[test]
    fn walking_iso_nondegenerate_one_cells() {
        let j = TruncatedPresheaf::from_dendroidal(&walking_iso_nerve(), 3, 1).unwrap();
        let c1 = Tree::linear(1).canonicalize();
        let ix = j.rep_index(&c1).unwrap();
        assert_eq!(j.cells[ix].len(), 4);
        assert_eq!(j.nondegenerate_cells(ix).len(), 2);
    }

    #[test]
    fn localization_at_nothing_is_identity() {
        let x = DendroidalSet::representable(&Tree::parse("r[a]").unwrap());
        let p = TruncatedPresheaf::from_dendroidal(&x, 2, 2).unwrap();
        let l = localize_truncated(&p, &[], 2).unwrap();
        for r in 0..p.reps.len() {
            assert_eq!(l.cells[r].len(), p.cells[r].len());
        }
    }

    #[test]
    fn localization_keeps_eta_count_for_representable_interval() {
        // inverting the identity 1-dendrex of the representable of C_1 does
        // not add or merge colors
        let x = DendroidalSet::representable(&Tree::parse("r[a]").unwrap());
        let p = TruncatedPresheaf::from_dendroidal(&x, 2, 1).unwrap();
        let c1 = Tree::linear(1).canonicalize();
        let c1_ix = p.rep_index(&c1).unwrap();
        // find the identity dendrex: it is injective on edges
        let dendrices = x.dendrices(&c1).unwrap();
        let id_pos = dendrices
            .iter()
            .position(|dx| {
                let d = dx.as_nerve();
                let objs: BTreeSet<usize> = d.edge_obj.values().copied().collect();
                objs.len() == 2
            })
            .unwrap();
        let l = localize_truncated(&p, &[id_pos], 2).unwrap();
        let eta_ix = p.rep_index(&Tree::eta("e")).unwrap();
        assert_eq!(l.cells[eta_ix].len(), 2);
        let _ = c1_ix;
    }

    #[test]
    fn homotopy_identity_components() {
        let p = FiniteOperad::free_on(&Tree::parse("r[a,b]").unwrap());
        let ops: Vec<_> = p.op_orbit_representatives();
        let ok = check_homotopy(
            &p,
            &p,
            &ops,
            &|x| *x,
            &|q| q.clone(),
            &|x| *x,
            &|q| q.clone(),
            &|x| Some(p.unit(x)),
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn last_vertex_on_simplices() {
        let x = DendroidalSet::nerve(from_category(&FinCategory::poset(2)));
        let eta = Tree::eta("0");
        for dx in x.dendrices(&eta).unwrap() {
            assert_eq!(last_vertex_object(&x, &eta, &dx).unwrap(), dx);
        }
        let t2 = Tree::linear(2);
        for dx in x.dendrices(&t2).unwrap() {
            let last = last_vertex_object(&x, &t2, &dx).unwrap();
            let d = dx.as_nerve();
            let l = last.as_nerve();
            assert_eq!(l.edge_obj["2"], d.edge_obj["2"]);
        }
        assert!(last_vertex_object(
            &x,
            &Tree::parse("r[a,b]").unwrap(),
            &x.dendrices(&Tree::eta("e")).unwrap()[0]
        )
        .is_err());
    }
}
