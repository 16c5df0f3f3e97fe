//! Forests (finite disjoint unions of trees), independent and wide forest
//! morphisms, forest root faces, and the decomposition of wide independent
//! maps into generating morphisms.

use crate::dendroidal::TreeMorphism;
use crate::error::{Error, Result};
use crate::tree::Tree;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A non-empty finite disjoint union of trees. The constituent order is
/// bookkeeping only; the direct sum is symmetric.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Forest {
    pub constituents: Vec<Tree>,
}

impl Forest {
    pub fn new(constituents: Vec<Tree>) -> Result<Forest> {
        if constituents.is_empty() {
            return Err(Error::Invalid("forests are non-empty".into()));
        }
        Ok(Forest { constituents })
    }

    pub fn single(tree: Tree) -> Forest {
        Forest { constituents: vec![tree] }
    }

    /// Direct sum.
    pub fn oplus(&self, other: &Forest) -> Forest {
        let mut constituents = self.constituents.clone();
        constituents.extend(other.constituents.iter().cloned());
        Forest { constituents }
    }

    /// Parse a `+`-separated list of trees.
    pub fn parse(text: &str) -> Result<Forest> {
        let constituents: Result<Vec<Tree>> = text.split('+').map(Tree::parse).collect();
        Forest::new(constituents?)
    }

    pub fn print(&self) -> String {
        self.constituents
            .iter()
            .map(|t| t.print())
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn total_edges(&self) -> usize {
        self.constituents.iter().map(|t| t.edge_count()).sum()
    }

    pub fn total_vertices(&self) -> usize {
        self.constituents.iter().map(|t| t.vertex_count()).sum()
    }

    /// Order-insensitive isomorphism key.
    pub fn canonical_key(&self) -> String {
        let mut keys: Vec<String> =
            self.constituents.iter().map(|t| t.canonical_key()).collect();
        keys.sort();
        keys.join("+")
    }
}

/// A morphism of forests: an index map on constituents together with a tree
/// morphism out of each constituent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ForestMorphism {
    pub source: Forest,
    pub target: Forest,
    /// `alpha[i]` is the target constituent receiving source constituent `i`.
    pub alpha: Vec<usize>,
    pub maps: Vec<TreeMorphism>,
}

impl ForestMorphism {
    pub fn new(
        source: Forest,
        target: Forest,
        alpha: Vec<usize>,
        maps: Vec<TreeMorphism>,
    ) -> Result<ForestMorphism> {
        if alpha.len() != source.constituents.len() || maps.len() != alpha.len() {
            return Err(Error::Invalid("constituent data of mismatched length".into()));
        }
        for (i, (&j, m)) in alpha.iter().zip(&maps).enumerate() {
            if j >= target.constituents.len() {
                return Err(Error::Invalid(format!("index map out of range at {i}")));
            }
            if m.source != source.constituents[i] || m.target != target.constituents[j] {
                return Err(Error::Invalid(format!(
                    "constituent morphism {i} does not match the index map"
                )));
            }
            m.validate()?;
        }
        Ok(ForestMorphism { source, target, alpha, maps })
    }

    /// A morphism of trees seen as a one-constituent forest morphism.
    pub fn from_tree_morphism(m: TreeMorphism) -> ForestMorphism {
        ForestMorphism {
            source: Forest::single(m.source.clone()),
            target: Forest::single(m.target.clone()),
            alpha: vec![0],
            maps: vec![m],
        }
    }

    pub fn identity(forest: &Forest) -> ForestMorphism {
        ForestMorphism {
            source: forest.clone(),
            target: forest.clone(),
            alpha: (0..forest.constituents.len()).collect(),
            maps: forest.constituents.iter().map(TreeMorphism::identity).collect(),
        }
    }

    /// Direct sum of morphisms.
    pub fn oplus(&self, other: &ForestMorphism) -> ForestMorphism {
        let offset = self.target.constituents.len();
        let mut alpha = self.alpha.clone();
        alpha.extend(other.alpha.iter().map(|&j| j + offset));
        let mut maps = self.maps.clone();
        maps.extend(other.maps.iter().cloned());
        ForestMorphism {
            source: self.source.oplus(&other.source),
            target: self.target.oplus(&other.target),
            alpha,
            maps,
        }
    }

    /// Diagrammatic composition.
    pub fn then(&self, other: &ForestMorphism) -> Result<ForestMorphism> {
        if self.target != other.source {
            return Err(Error::Invalid("composition of non-matching forest morphisms".into()));
        }
        let alpha: Vec<usize> = self.alpha.iter().map(|&j| other.alpha[j]).collect();
        let maps: Result<Vec<TreeMorphism>> = self
            .maps
            .iter()
            .zip(&self.alpha)
            .map(|(m, &j)| m.then(&other.maps[j]))
            .collect();
        ForestMorphism::new(self.source.clone(), other.target.clone(), alpha, maps?)
    }

    /// The image of each constituent root, as an edge of its target tree.
    pub fn root_images(&self) -> Vec<(usize, String)> {
        self.maps
            .iter()
            .zip(&self.alpha)
            .map(|(m, &j)| (j, m.apply(m.source.root_name()).to_string()))
            .collect()
    }

    /// Independence: constituents sent to the same target tree have pairwise
    /// incomparable root images (which suffices for all edge pairs).
    pub fn is_independent(&self) -> bool {
        let roots = self.root_images();
        for (i, (j1, e1)) in roots.iter().enumerate() {
            for (j2, e2) in roots.iter().skip(i + 1) {
                if j1 == j2 {
                    let t = &self.target.constituents[*j1];
                    if t.edge_leq(e1, e2).unwrap() || t.edge_leq(e2, e1).unwrap() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Wideness: every maximal monotone path from a leaf of every target
    /// constituent meets the image of some constituent root. Stump-capped
    /// branches impose no condition, keeping this equivalent to the
    /// operation criterion of `wide_lemma_check` on independent morphisms.
    pub fn is_wide(&self) -> bool {
        for (j, t) in self.target.constituents.iter().enumerate() {
            let hits: Vec<usize> = self
                .root_images()
                .into_iter()
                .filter(|(k, _)| *k == j)
                .map(|(_, e)| t.edge_ix(&e).unwrap())
                .collect();
            for path in t.leaf_paths() {
                if !path.iter().any(|e| hits.contains(e)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> ForestMorphismJson {
        ForestMorphismJson {
            schema: crate::SCHEMA.to_string(),
            source: self.source.print(),
            target: self.target.print(),
            alpha: self.alpha.clone(),
            edge_maps: self.maps.iter().map(|m| m.edge_map.clone()).collect(),
        }
    }

    pub fn from_json(json: &ForestMorphismJson) -> Result<ForestMorphism> {
        let source = Forest::parse(&json.source)?;
        let target = Forest::parse(&json.target)?;
        let maps: Result<Vec<TreeMorphism>> = json
            .edge_maps
            .iter()
            .zip(&json.alpha)
            .zip(&source.constituents)
            .map(|((em, &j), s)| {
                let t = target.constituents.get(j).ok_or_else(|| {
                    Error::Invalid("index map out of range".into())
                })?;
                TreeMorphism::new(s.clone(), t.clone(), em.clone())
            })
            .collect();
        ForestMorphism::new(source, target, json.alpha.clone(), maps?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestMorphismJson {
    pub schema: String,
    pub source: String,
    pub target: String,
    pub alpha: Vec<usize>,
    pub edge_maps: Vec<BTreeMap<String, String>>,
}

/// For an independent morphism into a single tree, wideness is equivalent to
/// the existence of a subtree spanning the constituent root images from the
/// target root. Returns that operation-based criterion.
pub fn wide_lemma_check(f: &ForestMorphism) -> Result<bool> {
    if f.target.constituents.len() != 1 {
        return Err(Error::Precondition("target must have one constituent".into()));
    }
    if !f.is_independent() {
        return Err(Error::Precondition("morphism must be independent".into()));
    }
    let t = &f.target.constituents[0];
    let leaves: std::collections::BTreeSet<usize> = f
        .root_images()
        .into_iter()
        .map(|(_, e)| t.edge_ix(&e).unwrap())
        .collect();
    Ok(crate::tree::spanning_subtree(t, t.root(), &leaves).is_some())
}

/// The forest root face: graft the constituents onto the leaves of a fresh
/// corolla and include the forest into the resulting tree. The inclusion is
/// wide and independent and misses only the new root edge. Edge names are
/// kept where possible; constituents with clashing names are prefixed.
pub fn forest_root_face(forest: &Forest) -> Result<(Tree, ForestMorphism)> {
    let n = forest.constituents.len();
    let mut counts: BTreeMap<&String, usize> = BTreeMap::new();
    for t in &forest.constituents {
        for name in t.edge_names() {
            *counts.entry(name).or_insert(0) += 1;
        }
    }
    let clash = |name: &String| counts[&name] > 1;
    let rename = |i: usize, name: &String| -> String {
        if clash(name) {
            format!("c{i}_{name}")
        } else {
            name.clone()
        }
    };
    let mut root = "g".to_string();
    let mut k = 0usize;
    while forest.constituents.iter().any(|t| t.edge_names().contains(&root)) {
        root = format!("g{k}");
        k += 1;
    }
    let mut vertex_data: Vec<(String, Vec<String>)> = vec![(
        root.clone(),
        forest
            .constituents
            .iter()
            .enumerate()
            .map(|(i, t)| rename(i, &t.root_name().to_string()))
            .collect(),
    )];
    for (i, t) in forest.constituents.iter().enumerate() {
        for v in t.vertices() {
            vertex_data.push((
                rename(i, &t.edge_name(v.out).to_string()),
                v.inputs.iter().map(|&e| rename(i, &t.edge_name(e).to_string())).collect(),
            ));
        }
    }
    let grafted = Tree::new(&root, &vertex_data)?;
    let target = Forest::single(grafted.clone());
    let maps: Result<Vec<TreeMorphism>> = forest
        .constituents
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let edge_map = t
                .edge_names()
                .iter()
                .map(|e| (e.clone(), rename(i, e)))
                .collect();
            TreeMorphism::new(t.clone(), grafted.clone(), edge_map)
        })
        .collect();
    let inclusion = ForestMorphism::new(forest.clone(), target, vec![0; n], maps?)?;
    Ok((grafted, inclusion))
}

/// A generator of the wide-independent calculus.
#[derive(Debug, Clone)]
pub enum Generator {
    /// Reordering of constituents (the symmetry of the direct sum).
    Resort(ForestMorphism),
    /// A direct sum of forest root faces (identity on marked slots).
    RootFaces(ForestMorphism),
    /// A direct sum of root-preserving tree morphisms.
    RootPreserving(ForestMorphism),
}

impl Generator {
    pub fn morphism(&self) -> &ForestMorphism {
        match self {
            Generator::Resort(m) | Generator::RootFaces(m) | Generator::RootPreserving(m) => m,
        }
    }
}

/// Decompose a wide independent morphism into a constituent reordering,
/// a layer of forest root faces, and a layer of root-preserving morphisms.
/// The composite of the returned generators equals the input.
pub fn decompose_wide_independent(f: &ForestMorphism) -> Result<Vec<Generator>> {
    if !f.is_wide() || !f.is_independent() {
        return Err(Error::Precondition("morphism must be wide and independent".into()));
    }
    // a single root-preserving tree map is already a generator
    if f.source.constituents.len() == 1
        && f.target.constituents.len() == 1
        && f.maps[0].is_root_preserving()
    {
        return Ok(vec![Generator::RootPreserving(f.clone())]);
    }

    // group source constituents by target constituent (wideness makes the
    // index map surjective)
    let m = f.target.constituents.len();
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (i, &j) in f.alpha.iter().enumerate() {
        groups[j].push(i);
    }
    if groups.iter().any(|g| g.is_empty()) {
        return Err(Error::Precondition("wide morphisms hit every target constituent".into()));
    }
    let order: Vec<usize> = groups.iter().flatten().copied().collect();

    // 1. reorder the source constituents so that groups are contiguous
    let resorted = Forest::new(order.iter().map(|&i| f.source.constituents[i].clone()).collect())?;
    let mut position = vec![0usize; order.len()];
    for (new_pos, &old) in order.iter().enumerate() {
        position[old] = new_pos;
    }
    let resort = ForestMorphism::new(
        f.source.clone(),
        resorted.clone(),
        position,
        f.source.constituents.iter().map(TreeMorphism::identity).collect(),
    )?;

    // 2. per target constituent: a forest root face (or the identity for a
    //    singleton group mapping root-preservingly), then a root-preserving map
    let mut face_layer: Option<ForestMorphism> = None;
    let mut rp_layer: Option<ForestMorphism> = None;
    for (j, group) in groups.iter().enumerate() {
        let target_tree = &f.target.constituents[j];
        let group_forest =
            Forest::new(group.iter().map(|&i| f.source.constituents[i].clone()).collect())?;
        let (face, rp) = if group.len() == 1 && f.maps[group[0]].is_root_preserving() {
            (
                ForestMorphism::identity(&group_forest),
                ForestMorphism::from_tree_morphism(f.maps[group[0]].clone()),
            )
        } else {
            let (grafted, inclusion) = forest_root_face(&group_forest)?;
            // the root-preserving remainder: the new root goes to the target
            // root, each grafted constituent edge follows its original map
            let mut edge_map: BTreeMap<String, String> =
                BTreeMap::from([(grafted.root_name().to_string(), target_tree.root_name().to_string())]);
            for (k, &i) in group.iter().enumerate() {
                for name in f.source.constituents[i].edge_names() {
                    let grafted_name = inclusion.maps[k].edge_map[name].clone();
                    edge_map.insert(grafted_name, f.maps[i].edge_map[name].clone());
                }
            }
            let rp = TreeMorphism::new(grafted.clone(), target_tree.clone(), edge_map)?;
            (inclusion, ForestMorphism::from_tree_morphism(rp))
        };
        face_layer = Some(match face_layer {
            None => face,
            Some(prev) => prev.oplus(&face),
        });
        rp_layer = Some(match rp_layer {
            None => rp,
            Some(prev) => prev.oplus(&rp),
        });
    }
    let face_layer = face_layer.expect("at least one target constituent");
    let rp_layer = rp_layer.expect("at least one target constituent");
    Ok(vec![
        Generator::Resort(resort),
        Generator::RootFaces(face_layer),
        Generator::RootPreserving(rp_layer),
    ])
}

/// Recompose a generator list (diagrammatic order).
pub fn recompose_generators(generators: &[Generator]) -> Result<ForestMorphism> {
    let mut iter = generators.iter();
    let first = iter.next().ok_or_else(|| Error::Invalid("empty decomposition".into()))?;
    let mut m = first.morphism().clone();
    for g in iter {
        m = m.then(g.morphism())?;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dendroidal::hom;
    use crate::tree;

    fn eta_pair_to_corolla() -> ForestMorphism {
        let c2 = Tree::parse("r[a,b]").unwrap();
        let ea = Tree::eta("x");
        let eb = Tree::eta("y");
        ForestMorphism::new(
            Forest::new(vec![ea.clone(), eb.clone()]).unwrap(),
            Forest::single(c2.clone()),
            vec![0, 0],
            vec![
                TreeMorphism::new(ea, c2.clone(), BTreeMap::from([("x".into(), "a".into())]))
                    .unwrap(),
                TreeMorphism::new(eb, c2, BTreeMap::from([("y".into(), "b".into())])).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn tree_maps_are_independent() {
        let c2 = Tree::parse("r[a,b]").unwrap();
        for m in hom(&Tree::linear(1), &c2) {
            assert!(ForestMorphism::from_tree_morphism(m).is_independent());
        }
    }

    #[test]
    fn equal_images_are_not_independent() {
        let c2 = Tree::parse("r[a,b]").unwrap();
        let f = ForestMorphism::new(
            Forest::new(vec![Tree::eta("x"), Tree::eta("y")]).unwrap(),
            Forest::single(c2.clone()),
            vec![0, 0],
            vec![
                TreeMorphism::new(Tree::eta("x"), c2.clone(), BTreeMap::from([("x".into(), "a".into())])).unwrap(),
                TreeMorphism::new(Tree::eta("y"), c2, BTreeMap::from([("y".into(), "a".into())])).unwrap(),
            ],
        )
        .unwrap();
        assert!(!f.is_independent());
    }

    #[test]
    fn leaf_pair_is_independent_and_wide() {
        let f = eta_pair_to_corolla();
        assert!(f.is_independent());
        assert!(f.is_wide());
        assert!(wide_lemma_check(&f).unwrap());
    }

    #[test]
    fn single_leaf_into_corolla_is_not_wide() {
        let c2 = Tree::parse("r[a,b]").unwrap();
        let f = ForestMorphism::from_tree_morphism(
            TreeMorphism::new(Tree::eta("x"), c2, BTreeMap::from([("x".into(), "a".into())]))
                .unwrap(),
        );
        assert!(f.is_independent());
        assert!(!f.is_wide());
        assert!(!wide_lemma_check(&f).unwrap());
    }

    #[test]
    fn linear_maps_are_wide() {
        for n in 0..3usize {
            for m in 0..3usize {
                for f in hom(&Tree::linear(n), &Tree::linear(m)) {
                    let fm = ForestMorphism::from_tree_morphism(f);
                    assert!(fm.is_wide());
                    assert!(fm.is_independent());
                }
            }
        }
    }

    #[test]
    fn root_preserving_maps_are_wide() {
        let trees = tree::enumerate_trees(3, 2);
        for s in &trees {
            for t in &trees {
                for f in hom(s, t) {
                    if f.is_root_preserving() {
                        assert!(ForestMorphism::from_tree_morphism(f).is_wide());
                    }
                }
            }
        }
    }

    #[test]
    fn identity_satisfies_wide_lemma() {
        let t = Tree::parse("r[a[x],b]").unwrap();
        let f = ForestMorphism::from_tree_morphism(TreeMorphism::identity(&t));
        assert!(wide_lemma_check(&f).unwrap());
        assert!(f.is_wide());
    }

    #[test]
    fn wide_lemma_requires_preconditions() {
        let f = eta_pair_to_corolla();
        let doubled = f.oplus(&f);
        assert!(wide_lemma_check(&doubled).is_err());
    }

    #[test]
    fn root_face_of_two_etas_is_corolla() {
        let forest = Forest::new(vec![Tree::eta("x"), Tree::eta("y")]).unwrap();
        let (tree, inclusion) = forest_root_face(&forest).unwrap();
        assert_eq!(tree.vertex_count(), 1);
        assert_eq!(tree.edge_count(), 3);
        assert!(inclusion.is_wide());
        assert!(inclusion.is_independent());
    }

    #[test]
    fn root_face_of_single_tree() {
        let t = Tree::parse("r[a,b]").unwrap();
        let (tree, inclusion) = forest_root_face(&Forest::single(t.clone())).unwrap();
        assert_eq!(tree.vertex_count(), t.vertex_count() + 1);
        // the inclusion misses only the new root edge
        let hit: std::collections::BTreeSet<&String> =
            inclusion.maps[0].edge_map.values().collect();
        assert_eq!(hit.len(), tree.edge_count() - 1);
        assert!(!hit.contains(&tree.root_name().to_string()));
        assert!(inclusion.is_wide());
    }

    #[test]
    fn root_face_vertex_count() {
        let forest = Forest::parse("r[a,b] + u[v] + w").unwrap();
        let (tree, _) = forest_root_face(&forest).unwrap();
        assert_eq!(tree.vertex_count(), 1 + forest.total_vertices());
    }

    #[test]
    fn oplus_is_symmetric_up_to_canonical_key() {
        let f = Forest::parse("r[a,b] + u[v]").unwrap();
        let g = Forest::parse("u[v] + r[a,b]").unwrap();
        assert_eq!(f.canonical_key(), g.canonical_key());
        assert_ne!(f, g);
    }

    #[test]
    fn decomposition_of_root_preserving_map_is_itself() {
        let t = Tree::parse("r[a,b]").unwrap();
        let swap = hom(&t, &t).into_iter().find(|m| m.apply("a") == "b").unwrap();
        let f = ForestMorphism::from_tree_morphism(swap);
        let gens = decompose_wide_independent(&f).unwrap();
        assert_eq!(gens.len(), 1);
        assert!(matches!(gens[0], Generator::RootPreserving(_)));
        assert_eq!(recompose_generators(&gens).unwrap(), f);
    }

    #[test]
    fn decomposition_of_leaf_pair_recomposes() {
        let f = eta_pair_to_corolla();
        let gens = decompose_wide_independent(&f).unwrap();
        assert_eq!(recompose_generators(&gens).unwrap(), f);
    }

    #[test]
    fn decomposition_requires_preconditions() {
        let c2 = Tree::parse("r[a,b]").unwrap();
        let not_wide = ForestMorphism::from_tree_morphism(
            TreeMorphism::new(Tree::eta("x"), c2, BTreeMap::from([("x".into(), "a".into())]))
                .unwrap(),
        );
        assert!(decompose_wide_independent(&not_wide).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = eta_pair_to_corolla();
        let json = f.to_json();
        let back = ForestMorphism::from_json(&json).unwrap();
        assert_eq!(back, f);
    }
}
