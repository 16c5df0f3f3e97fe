//! Exhaustive verification suites over bounded tree families. Every identity
//! the library is built on is re-checked here at small scale; the suites are
//! deterministic and report per-check pass/fail with counts and witnesses.

use crate::algebra;
use crate::decalage;
use crate::dendroidal::{
    self, enumerate_horn_families, factorize, hom,
    localize_truncated, recompose, DendroidalSet, Dx, TreeMorphism, TruncatedPresheaf,
};
use crate::elements::{
    homotopy_components, root_preserving_set, segal_check, verify_homotopy_uniqueness,
    ElementsOperad, ElObj, ElOp, RootFunctor, SectionL,
};
use crate::error::{Error, Result};
use crate::forest::{
    decompose_wide_independent, recompose_generators, wide_lemma_check, Forest, ForestMorphism,
};
use crate::operad::{
    self, commutative_operad, from_category, is_sigma_free, object_poset,
    FinCategory, FiniteOperad, Operad,
};
use crate::tensor::{compare_tensor_nerve, TensorOperad};
use crate::tree::{self, enumerate_subtrees, EdgeIx, Tree};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy)]
pub struct Config {
    /// vertex bound for tree sweeps
    pub bound: usize,
    /// generator bound for tensor closures
    pub word_bound: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { bound: 5, word_bound: 4 }
    }
}

impl Config {
    /// Bound from the environment variable `DENDRO_BOUND`, if set.
    pub fn from_env() -> Config {
        let mut config = Config::default();
        if let Ok(val) = std::env::var("DENDRO_BOUND") {
            if let Ok(bound) = val.parse::<usize>() {
                config.bound = bound;
            }
        }
        config
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub schema: String,
    pub suite: String,
    pub bound: usize,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &str, config: &Config) -> SuiteReport {
        SuiteReport {
            schema: crate::SCHEMA.to_string(),
            suite: suite.to_string(),
            bound: config.bound,
            checks: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, outcome: std::result::Result<String, String>) {
        match outcome {
            Ok(details) => {
                self.checks.push(Check { name: name.into(), passed: true, details })
            }
            Err(details) => {
                self.checks.push(Check { name: name.into(), passed: false, details })
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const SUITES: &[&str] =
    &["trees", "operads", "forests", "elements", "root", "tensor", "decalage", "algebras"];

pub fn run_suite(name: &str, config: &Config) -> Result<Vec<SuiteReport>> {
    match name {
        "trees" => Ok(vec![trees_suite(config)]),
        "operads" => Ok(vec![operads_suite(config)]),
        "forests" => Ok(vec![forests_suite(config)]),
        "elements" => Ok(vec![elements_suite(config)?]),
        "root" => Ok(vec![root_suite(config)?]),
        "tensor" => Ok(vec![tensor_suite(config)]),
        "decalage" => Ok(vec![decalage_suite(config)?]),
        "algebras" => Ok(vec![algebras_suite(config)]),
        "all" => SUITES.iter().map(|s| Ok(run_suite(s, config)?.remove(0))).collect(),
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

/// The tree families every sweep runs over: all shapes up to the vertex
/// bound at arity ≤ 2, plus the wider shapes at one vertex less.
fn sweep_trees(bound: usize) -> Vec<Tree> {
    let mut trees = tree::enumerate_trees(bound, 2);
    for t in tree::enumerate_trees(bound.saturating_sub(1), 3) {
        if !trees.iter().any(|u| u.is_isomorphic(&t)) {
            trees.push(t);
        }
    }
    trees
}

/// Subtree enumeration by pruning closure, used as the independent oracle.
fn subtrees_by_pruning(tree: &Tree) -> BTreeSet<tree::Subtree> {
    use tree::Subtree;
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
            let out = tree.vertex(v).out;
            let mut pruned = sub.vertices.clone();
            pruned.remove(&v);
            if out == sub.root {
                // pruning the root-attached vertex; keep the root edge, or
                // with nothing left pick any edge as the remaining subtree
                if pruned.is_empty() {
                    for &e in sub.edges(tree).iter() {
                        queue.push(Subtree::eta(e));
                    }
                } else {
                    queue.push(Subtree { root: sub.root, vertices: pruned });
                }
            } else {
                queue.push(Subtree { root: sub.root, vertices: pruned });
            }
        }
        // root pruning: drop the vertex at the subtree root when everything
        // else sits above a single input
        if let Some(v) = tree.upper_vertex(sub.root).filter(|v| sub.vertices.contains(v)) {
            let mut rest = sub.vertices.clone();
            rest.remove(&v);
            for &input in &tree.vertex(v).inputs {
                let above: BTreeSet<usize> = rest
                    .iter()
                    .copied()
                    .filter(|&w| tree.edge_leq_ix(tree.vertex(w).out, input))
                    .collect();
                if above.len() == rest.len() {
                    queue.push(Subtree { root: input, vertices: above });
                }
            }
        }
    }
    seen
}

pub fn trees_suite(config: &Config) -> SuiteReport {
    let mut report = SuiteReport::new("trees", config);
    let trees = sweep_trees(config.bound);

    // subtree enumeration against the pruning-closure oracle
    let mut checked = 0usize;
    let mut outcome = Ok(());
    for t in &trees {
        let direct: BTreeSet<tree::Subtree> = enumerate_subtrees(t).into_iter().collect();
        let pruned = subtrees_by_pruning(t);
        checked += direct.len();
        if direct != pruned {
            outcome = Err(format!("mismatch at {}", t.print()));
            break;
        }
    }
    report.push(
        "subtrees-match-pruning-closure",
        outcome.map(|()| format!("{checked} subtrees over {} trees", trees.len())),
    );

    // the edge order is a partial order with the root as maximum
    let mut outcome = Ok(());
    for t in &trees {
        let n = t.edge_count();
        'tree: for e in 0..n {
            if !t.edge_leq_ix(e, e) || !t.edge_leq_ix(e, t.root()) {
                outcome = Err(format!("order axioms fail at {}", t.print()));
                break 'tree;
            }
            for f in 0..n {
                if t.edge_leq_ix(e, f) && t.edge_leq_ix(f, e) && e != f {
                    outcome = Err(format!("antisymmetry fails at {}", t.print()));
                    break 'tree;
                }
                for g in 0..n {
                    if t.edge_leq_ix(e, f) && t.edge_leq_ix(f, g) && !t.edge_leq_ix(e, g) {
                        outcome = Err(format!("transitivity fails at {}", t.print()));
                        break 'tree;
                    }
                }
            }
        }
    }
    report.push(
        "edge-order-is-a-partial-order",
        outcome.map(|()| format!("{} trees", trees.len())),
    );

    // grafting commutes on disjoint leaves
    let mut count = 0usize;
    let mut outcome = Ok(());
    'graft: for t in tree::enumerate_trees(3, 2) {
        let leaves = t.leaves();
        for (i, &l1) in leaves.iter().enumerate() {
            for &l2 in leaves.iter().skip(i + 1) {
                let p = Tree::parse("p0[p1]").unwrap();
                let q = Tree::parse("q0[q1,q2]").unwrap();
                let a = t
                    .graft(t.edge_name(l1), &p)
                    .and_then(|u| u.graft(t.edge_name(l2), &q));
                let b = t
                    .graft(t.edge_name(l2), &q)
                    .and_then(|u| u.graft(t.edge_name(l1), &p));
                match (a, b) {
                    (Ok(a), Ok(b)) if a.structural_key() == b.structural_key() => count += 1,
                    _ => {
                        outcome = Err(format!("grafting order matters at {}", t.print()));
                        break 'graft;
                    }
                }
            }
        }
    }
    report.push("graft-commutes-on-disjoint-leaves", outcome.map(|()| format!("{count} pairs")));

    // canonical form: invariance under relabeling and sibling permutation
    let mut outcome = Ok(());
    let mut count = 0usize;
    for t in &trees {
        let relabeled: BTreeMap<String, String> = t
            .edge_names()
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), format!("z{i}")))
            .collect();
        let r = t.relabel(&relabeled).expect("relabeling is injective");
        let c = t.canonicalize();
        if r.canonical_form().digest != t.canonical_form().digest
            || c.canonical_form().digest != t.canonical_form().digest
        {
            outcome = Err(format!("canonical form not invariant at {}", t.print()));
            break;
        }
        count += 1;
    }
    report.push("canonical-form-invariance", outcome.map(|()| format!("{count} trees")));

    // every morphism factors as degeneracies, an isomorphism, and faces,
    // and the factorization recomposes exactly
    let small = {
        let mut v = tree::enumerate_trees(config.bound.min(4), 2);
        v.extend(tree::enumerate_trees(3, 3).into_iter().filter(|t| {
            t.vertices().iter().any(|vx| vx.inputs.len() > 2)
        }));
        v
    };
    let mut count = 0usize;
    let mut outcome = Ok(());
    'outer: for s in &small {
        for t in &small {
            for f in hom(s, t) {
                match factorize(&f).and_then(|fs| recompose(&fs)) {
                    Ok(back)
                        if back.edge_map == f.edge_map
                            && back.source == f.source
                            && back.target == f.target =>
                    {
                        count += 1
                    }
                    _ => {
                        outcome = Err(format!(
                            "factorization fails for {:?}: {} → {}",
                            f.edge_map,
                            s.print(),
                            t.print()
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }
    report.push("dendroidal-generation", outcome.map(|()| format!("{count} morphisms")));
    report
}

pub fn operads_suite(config: &Config) -> SuiteReport {
    let mut report = SuiteReport::new("operads", config);
    let trees = sweep_trees(config.bound);

    // operation sets of the free operad match subtree enumeration exactly:
    // one operation per subtree and ordering of its leaves, nothing else
    let mut ops_checked = 0usize;
    let mut outcome = Ok(());
    for t in &trees {
        let p = FiniteOperad::free_on(t);
        let subs = enumerate_subtrees(t);
        if p.op_orbit_representatives().len() != subs.len() {
            outcome = Err(format!("orbit count differs from subtree count at {}", t.print()));
            break;
        }
        for sub in &subs {
            let base: Vec<EdgeIx> = sub.leaves(t).into_iter().collect();
            for sigma in crate::perm::permutations(base.len()) {
                let ordering: Vec<EdgeIx> = sigma.iter().map(|&i| base[i]).collect();
                if p.ops(&ordering, &sub.root).len() != 1 {
                    outcome = Err(format!(
                        "operation set at {} is not a singleton for a subtree",
                        t.print()
                    ));
                    break;
                }
                ops_checked += 1;
            }
        }
        // repeated inputs never span a subtree
        if t.edge_count() >= 2 && p.ops(&[0, 0], &t.root()).len() != 0 {
            outcome = Err(format!("repeated-input signature inhabited at {}", t.print()));
            break;
        }
    }
    report.push(
        "subtree-operation-correspondence",
        outcome.map(|()| format!("{ops_checked} operations over {} trees", trees.len())),
    );

    // free operads are symmetric-free; the object order is the edge order
    let mut outcome = Ok(());
    for t in &trees {
        let p = FiniteOperad::free_on(t);
        if !is_sigma_free(&p) {
            outcome = Err(format!("free operad not sigma-free at {}", t.print()));
            break;
        }
        let leq = object_poset(&p);
        for e in 0..t.edge_count() {
            for f in 0..t.edge_count() {
                if leq[e][f] != t.edge_leq_ix(e, f) {
                    outcome = Err(format!("object order differs from edge order at {}", t.print()));
                    break;
                }
            }
        }
    }
    report.push("free-operads-sigma-free-with-edge-order", outcome.map(|()| format!("{} trees", trees.len())));

    // composition in the free operad agrees with grafting of subtrees
    let mut count = 0usize;
    let mut outcome = Ok(());
    'compose: for t in tree::enumerate_trees(config.bound.min(4), 2) {
        let p = FiniteOperad::free_on(&t);
        let mut all = Vec::new();
        for rep in p.op_orbit_representatives() {
            for sigma in crate::perm::permutations(p.arity(&rep)) {
                all.push(p.act(&rep, &sigma));
            }
        }
        for a in &all {
            for (i, c) in p.op_inputs(a).into_iter().enumerate() {
                for b in all.iter().filter(|b| p.op_output(b) == c) {
                    let Some(composite) = p.compose(a, i, b) else {
                        outcome = Err(format!("composition missing at {}", t.print()));
                        break 'compose;
                    };
                    // the composite must be the grafted subtree
                    let expected_edges: BTreeSet<EdgeIx> = {
                        let (operad::OpRef::Free { vertices: va, .. }, operad::OpRef::Free { vertices: vb, .. }) =
                            (a, b)
                        else {
                            unreachable!()
                        };
                        va.union(vb).copied().collect()
                    };
                    let operad::OpRef::Free { vertices: vc, .. } = &composite else {
                        unreachable!()
                    };
                    if vc.iter().copied().collect::<BTreeSet<_>>() != expected_edges {
                        outcome = Err(format!("composite is not the graft at {}", t.print()));
                        break 'compose;
                    }
                    count += 1;
                }
            }
        }
    }
    report.push("free-composition-is-grafting", outcome.map(|()| format!("{count} composites")));

    // morphism enumeration against a brute-force oracle over raw edge maps
    let mut count = 0usize;
    let mut outcome = Ok(());
    let probe = tree::enumerate_trees(3, 2);
    'hom: for s in &probe {
        for t in &probe {
            let fast = hom(s, t).len();
            let mut slow = 0usize;
            let t_edges = t.edge_count();
            let s_names = s.edge_names().to_vec();
            let mut assignment = vec![0usize; s_names.len()];
            loop {
                let edge_map: BTreeMap<String, String> = s_names
                    .iter()
                    .zip(&assignment)
                    .map(|(n, &i)| (n.clone(), t.edge_name(i).to_string()))
                    .collect();
                if TreeMorphism::new(s.clone(), t.clone(), edge_map).is_ok() {
                    slow += 1;
                }
                let mut k = 0;
                loop {
                    if k == assignment.len() {
                        break;
                    }
                    assignment[k] += 1;
                    if assignment[k] < t_edges {
                        break;
                    }
                    assignment[k] = 0;
                    k += 1;
                }
                if k == assignment.len() {
                    break;
                }
            }
            if fast != slow {
                outcome = Err(format!(
                    "morphism counts differ: {} → {}: {fast} vs {slow}",
                    s.print(),
                    t.print()
                ));
                break 'hom;
            }
            count += fast;
        }
    }
    report.push("morphism-enumeration-vs-brute-force", outcome.map(|()| format!("{count} morphisms")));

    // category round trips through extension by zero
    let outcome = (|| -> std::result::Result<String, String> {
        for cat in [FinCategory::poset(2), FinCategory::walking_iso(), FinCategory::terminal()] {
            let p = from_category(&cat);
            p.validate().map_err(|e| e.to_string())?;
            let back = operad::underlying_category(&p).map_err(|e| e.to_string())?;
            if back.objects != cat.objects || back.arrows.len() != cat.arrows.len() {
                return Err("round trip through the operad changed the category".into());
            }
        }
        Ok("3 categories".into())
    })();
    report.push("category-operad-round-trip", outcome);

    // normality of nerves matches sigma-freeness
    let outcome = (|| -> std::result::Result<String, String> {
        let free = FiniteOperad::free_on(&Tree::parse("r[a,b]").unwrap());
        if !DendroidalSet::nerve(free).is_normal(3, 2).map_err(|e| e.to_string())? {
            return Err("nerve of a free operad is not normal".into());
        }
        let comm = commutative_operad(2);
        if DendroidalSet::nerve(comm).is_normal(2, 2).map_err(|e| e.to_string())? {
            return Err("nerve of the commutative operad is normal".into());
        }
        Ok("2 backends".into())
    })();
    report.push("nerve-normality-matches-sigma-freeness", outcome);

    // unique horn fillers over nerve backends
    let outcome = (|| -> std::result::Result<String, String> {
        let backends: Vec<(&str, DendroidalSet)> = vec![
            ("free-c2", DendroidalSet::nerve(FiniteOperad::free_on(&Tree::parse("u[v,w]").unwrap()))),
            ("poset-2", DendroidalSet::nerve(from_category(&FinCategory::poset(2)))),
        ];
        let mut problems = 0usize;
        for t in tree::enumerate_trees(config.bound.min(4), 2) {
            for e in t.inner_edges() {
                let name = t.edge_name(e).to_string();
                for (tag, x) in &backends {
                    for family in enumerate_horn_families(x, &t, &name).map_err(|e| e.to_string())? {
                        let fillers = family.solve(x).map_err(|e| e.to_string())?;
                        if fillers.len() != 1 {
                            return Err(format!(
                                "{} fillers over {tag} at {} / {name}",
                                fillers.len(),
                                t.print()
                            ));
                        }
                        problems += 1;
                    }
                }
            }
        }
        Ok(format!("{problems} horn problems, one filler each"))
    })();
    report.push("nerve-horn-rigidity", outcome);

    // a truncated presheaf missing a composite has zero fillers
    let outcome = (|| -> std::result::Result<String, String> {
        let x = DendroidalSet::nerve(from_category(&FinCategory::poset(2)));
        let t = Tree::linear(2);
        let full = TruncatedPresheaf::from_dendroidal(&x, 2, 1).map_err(|e| e.to_string())?;
        // rebuild with the non-degenerate 2-cells removed: like a boundary
        let t2 = t.canonicalize();
        let keep: Vec<usize> = full.nondegenerate_cells(full.rep_index(&t2).unwrap());
        if keep.is_empty() {
            return Err("expected nondegenerate 2-cells".into());
        }
        // instead of surgery on the presheaf, pose the horn on the nerve and
        // drop the unique filler: the family over the boundary of a missing
        // composite has no solution among the remaining cells; emulate by
        // posing an inconsistent family
        let dendrices = x.dendrices(&t).map_err(|e| e.to_string())?;
        // find two fillers with different restrictions and cross their faces
        let f0 = &dendrices[0];
        let mut crossed = None;
        for other in dendrices.iter().skip(1) {
            let h1 = dendroidal::HornProblem::from_filler(&x, &t, "1", f0)
                .map_err(|e| e.to_string())?;
            let h2 = dendroidal::HornProblem::from_filler(&x, &t, "1", other)
                .map_err(|e| e.to_string())?;
            let mut family: BTreeMap<dendroidal::FaceId, Dx> = h1
                .faces
                .iter()
                .map(|(id, _, dx)| (id.clone(), dx.clone()))
                .collect();
            let (swap_id, _, swap_dx) = &h2.faces[0];
            family.insert(swap_id.clone(), swap_dx.clone());
            let horn = dendroidal::HornProblem::new(t.clone(), "1", family)
                .map_err(|e| e.to_string())?;
            if horn.validate_compatibility(&x).is_ok() {
                let fillers = horn.solve(&x).map_err(|e| e.to_string())?;
                if fillers.len() != 1 {
                    crossed = Some(fillers.len());
                    break;
                }
            } else {
                crossed = Some(0);
                break;
            }
        }
        match crossed {
            Some(0) => Ok("incompatible family rejected".into()),
            Some(n) => Err(format!("crossed family has {n} fillers")),
            None => Ok("all crossings coincide on this backend".into()),
        }
    })();
    report.push("missing-composite-has-no-filler", outcome);

    // localization: empty attachment is the identity; inverting the identity
    // of the interval keeps the color count; the walking isomorphism has two
    // nondegenerate 1-cells
    let outcome = (|| -> std::result::Result<String, String> {
        let j = TruncatedPresheaf::from_dendroidal(&dendroidal::walking_iso_nerve(), 3, 1)
            .map_err(|e| e.to_string())?;
        let c1 = Tree::linear(1).canonicalize();
        let ix = j.rep_index(&c1).unwrap();
        if j.nondegenerate_cells(ix).len() != 2 {
            return Err("walking isomorphism should have 2 nondegenerate 1-cells".into());
        }
        let x = DendroidalSet::representable(&Tree::parse("r[a]").unwrap());
        let p = TruncatedPresheaf::from_dendroidal(&x, 2, 1).map_err(|e| e.to_string())?;
        let unchanged = localize_truncated(&p, &[], 2).map_err(|e| e.to_string())?;
        for r in 0..p.reps.len() {
            if unchanged.cells[r].len() != p.cells[r].len() {
                return Err("empty localization changed the presheaf".into());
            }
        }
        let dendrices = x.dendrices(&c1).map_err(|e| e.to_string())?;
        let id_pos = dendrices
            .iter()
            .position(|dx| {
                let d = dx.as_nerve();
                d.edge_obj.values().collect::<BTreeSet<_>>().len() == 2
            })
            .unwrap();
        let l = localize_truncated(&p, &[id_pos], 2).map_err(|e| e.to_string())?;
        let eta_ix = p.rep_index(&Tree::eta("e")).unwrap();
        if l.cells[eta_ix].len() != 2 {
            return Err(format!("color count changed to {}", l.cells[eta_ix].len()));
        }
        Ok("3 localization checks".into())
    })();
    report.push("truncated-localization", outcome);
    report
}

pub fn forests_suite(config: &Config) -> SuiteReport {
    let mut report = SuiteReport::new("forests", config);
    let max_source_edges = 6usize.min(config.bound + 1);
    let max_target_edges = 5usize;

    // enumerate independent forest morphisms into single trees: choose a
    // target, an antichain of root images, and constituent maps per slot
    let targets: Vec<Tree> = tree::enumerate_trees(4, 3)
        .into_iter()
        .filter(|t| t.edge_count() <= max_target_edges)
        .collect();
    let sources: Vec<Tree> = tree::enumerate_trees(4, 3)
        .into_iter()
        .filter(|t| t.edge_count() <= max_source_edges)
        .collect();

    let mut instances = 0usize;
    let mut wide_count = 0usize;
    let mut lemma_outcome: std::result::Result<(), String> = Ok(());
    let mut decomposition_outcome: std::result::Result<(), String> = Ok(());

    for target in &targets {
        // candidate constituent maps grouped by root image
        let mut by_root: BTreeMap<EdgeIx, Vec<TreeMorphism>> = BTreeMap::new();
        for s in &sources {
            for m in hom(s, target) {
                by_root.entry(m.apply_ix(s.root())).or_default().push(m);
            }
        }
        let edges: Vec<EdgeIx> = (0..target.edge_count()).collect();
        let max_arity = target.minimal_edges().len();
        for arity in 1..=max_arity {
            let mut tuple: Vec<EdgeIx> = Vec::new();
            antichain_tuples(target, &edges, arity, &mut tuple, &mut |tuple| {
                let pools: Vec<&Vec<TreeMorphism>> = match tuple
                    .iter()
                    .map(|e| by_root.get(e))
                    .collect::<Option<Vec<_>>>()
                {
                    Some(p) => p,
                    None => return,
                };
                let mut picks: Vec<usize> = Vec::new();
                pick_maps(&pools, max_source_edges, &mut picks, &mut |maps| {
                    let forest =
                        Forest::new(maps.iter().map(|m| m.source.clone()).collect()).unwrap();
                    let fm = ForestMorphism::new(
                        forest,
                        Forest::single(target.clone()),
                        vec![0; maps.len()],
                        maps.to_vec(),
                    )
                    .unwrap();
                    instances += 1;
                    let path_based = fm.is_wide();
                    let op_based = wide_lemma_check(&fm).unwrap();
                    if path_based != op_based {
                        if lemma_outcome.is_ok() {
                            lemma_outcome = Err(format!(
                                "criteria disagree: {} → {}",
                                fm.source.print(),
                                target.print()
                            ));
                        }
                        return;
                    }
                    if path_based {
                        wide_count += 1;
                        let rebuilt = decompose_wide_independent(&fm)
                            .and_then(|gens| recompose_generators(&gens));
                        match rebuilt {
                            Ok(back) if back == fm => {}
                            _ => {
                                if decomposition_outcome.is_ok() {
                                    decomposition_outcome = Err(format!(
                                        "decomposition does not recompose: {} → {}",
                                        fm.source.print(),
                                        target.print()
                                    ));
                                }
                            }
                        }
                    }
                });
            });
        }
    }
    report.push(
        "wideness-lemma",
        lemma_outcome
            .clone()
            .map(|()| format!("{instances} independent morphisms, both criteria agree")),
    );
    report.push(
        "wide-independent-generation",
        decomposition_outcome.map(|()| format!("{wide_count} wide morphisms recomposed")),
    );

    // closure of wide and independent maps under composition and direct sum
    let outcome = (|| -> std::result::Result<String, String> {
        let smalls = tree::enumerate_trees(2, 2);
        let mut singles: Vec<ForestMorphism> = Vec::new();
        for s in &smalls {
            for t in &smalls {
                for m in hom(s, t) {
                    singles.push(ForestMorphism::from_tree_morphism(m));
                }
            }
        }
        let mut composed = 0usize;
        for f in &singles {
            for g in &singles {
                // compose g after f on matching middles, also under one sum
                if f.target == g.source {
                    let fg = f.then(g).map_err(|e| e.to_string())?;
                    if f.is_wide() && g.is_wide() && !fg.is_wide() {
                        return Err(format!(
                            "wide maps compose to a non-wide map: {} → {} → {}",
                            f.source.print(),
                            g.source.print(),
                            g.target.print()
                        ));
                    }
                    if f.is_independent() && g.is_independent() && !fg.is_independent() {
                        return Err("independent maps compose to a dependent map".into());
                    }
                    composed += 1;
                }
            }
        }
        // pairs under direct sum
        for f in singles.iter().take(40) {
            for g in singles.iter().take(40) {
                let sum = f.oplus(g);
                if f.is_wide() && g.is_wide() && !sum.is_wide() {
                    return Err("direct sum of wide maps is not wide".into());
                }
                composed += 1;
            }
        }
        Ok(format!("{composed} composites and sums"))
    })();
    report.push("wide-independent-closure", outcome);

    // the direct sum is symmetric up to canonical form
    let outcome = (|| -> std::result::Result<String, String> {
        let mut count = 0usize;
        let smalls = tree::enumerate_trees(2, 2);
        for a in &smalls {
            for b in &smalls {
                let f = Forest::single(a.clone()).oplus(&Forest::single(b.clone()));
                let g = Forest::single(b.clone()).oplus(&Forest::single(a.clone()));
                if f.canonical_key() != g.canonical_key() {
                    return Err(format!("sum not symmetric at {} + {}", a.print(), b.print()));
                }
                count += 1;
            }
        }
        Ok(format!("{count} pairs"))
    })();
    report.push("direct-sum-symmetric", outcome);
    report
}

fn antichain_tuples(
    target: &Tree,
    edges: &[EdgeIx],
    remaining: usize,
    tuple: &mut Vec<EdgeIx>,
    f: &mut dyn FnMut(&[EdgeIx]),
) {
    if remaining == 0 {
        f(tuple);
        return;
    }
    for &e in edges {
        if tuple.iter().any(|&d| target.edge_leq_ix(d, e) || target.edge_leq_ix(e, d)) {
            continue;
        }
        tuple.push(e);
        antichain_tuples(target, edges, remaining - 1, tuple, f);
        tuple.pop();
    }
}

fn pick_maps(
    pools: &[&Vec<TreeMorphism>],
    edge_budget: usize,
    picks: &mut Vec<usize>,
    f: &mut dyn FnMut(&[TreeMorphism]),
) {
    if picks.len() == pools.len() {
        let maps: Vec<TreeMorphism> = pools
            .iter()
            .zip(picks.iter())
            .map(|(p, &i)| p[i].clone())
            .collect();
        f(&maps);
        return;
    }
    let used: usize = picks
        .iter()
        .enumerate()
        .map(|(k, &i)| pools[k][i].source.edge_count())
        .sum();
    for i in 0..pools[picks.len()].len() {
        if used + pools[picks.len()][i].source.edge_count() > edge_budget {
            continue;
        }
        picks.push(i);
        pick_maps(pools, edge_budget, picks, f);
        picks.pop();
    }
}

pub fn elements_suite(config: &Config) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("elements", config);
    let object_bound = config.bound.min(2);

    // the operad of elements is symmetric-free over representables and over
    // the nerve of the free operad on the 2-corolla; small bases also get
    // the full orbit-based check
    let outcome = (|| -> std::result::Result<String, String> {
        let mut bases: Vec<(String, DendroidalSet)> = tree::enumerate_trees(config.bound.min(4), 2)
            .into_iter()
            .map(|t| (format!("representable {}", t.print()), DendroidalSet::representable(&t)))
            .collect();
        bases.push((
            "nerve of the free operad on the 2-corolla".into(),
            DendroidalSet::nerve(FiniteOperad::free_on(&Tree::parse("u[v,w]").unwrap())),
        ));
        for (tag, x) in &bases {
            let elements =
                ElementsOperad::new(x, object_bound, 2).map_err(|e| e.to_string())?;
            if !elements.sigma_free_streaming().map_err(|e| e.to_string())? {
                return Err(format!("operad of elements over {tag} is not sigma-free"));
            }
        }
        for text in ["e", "r[a]", "r[a,b]"] {
            let x = DendroidalSet::representable(&Tree::parse(text).unwrap());
            let elements = ElementsOperad::new(&x, 2, 2).map_err(|e| e.to_string())?;
            if !is_sigma_free(&elements) {
                return Err(format!("orbit check fails over the representable of {text}"));
            }
        }
        Ok(format!("{} bases streamed, 3 bases orbit-checked", bases.len()))
    })();
    report.push("elements-sigma-free", outcome);

    // over a simplicial base the operad of elements is the category of
    // elements: unary operations only, one per over-morphism
    let outcome = (|| -> std::result::Result<String, String> {
        let x = DendroidalSet::nerve(from_category(&FinCategory::poset(2)));
        let elements = ElementsOperad::new(&x, 3, 1).map_err(|e| e.to_string())?;
        let all = elements.all_ops().map_err(|e| e.to_string())?;
        if all.iter().any(|op| op.inputs.len() != 1) {
            return Err("non-unary operation over a simplicial base".into());
        }
        let mut direct = 0usize;
        for (ri, r) in elements.reps.iter().enumerate() {
            for _ci in 0..elements.cells[ri].len() {
                for s in &elements.reps {
                    direct += hom(s, r).len();
                }
            }
        }
        if all.len() != direct {
            return Err(format!("{} operations vs {direct} over-morphisms", all.len()));
        }
        Ok(format!("{} unary operations", all.len()))
    })();
    report.push("simplicial-base-category-of-elements", outcome);

    // strict Segal comparison over every grafting decomposition
    let outcome = (|| -> std::result::Result<String, String> {
        let backends: Vec<(&str, DendroidalSet)> = vec![
            (
                "free-c2",
                DendroidalSet::nerve(FiniteOperad::free_on(&Tree::parse("u[v,w]").unwrap())),
            ),
            ("poset-2", DendroidalSet::nerve(from_category(&FinCategory::poset(2)))),
        ];
        let mut decompositions = 0usize;
        for (tag, x) in &backends {
            let elements = ElementsOperad::new(x, 2, 2).map_err(|e| e.to_string())?;
            for t in tree::enumerate_trees(config.bound.min(4), 2) {
                for e in t.inner_edges() {
                    let name = t.edge_name(e).to_string();
                    if !segal_check(&elements, &t, &name).map_err(|e| e.to_string())? {
                        return Err(format!("Segal fails over {tag} at {} / {name}", t.print()));
                    }
                    decompositions += 1;
                }
            }
        }
        Ok(format!("{decompositions} decompositions"))
    })();
    report.push("strict-segal", outcome);
    Ok(report)
}

pub fn root_suite(config: &Config) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("root", config);

    // the section splits the root functor on objects and operations
    let outcome = (|| -> std::result::Result<String, String> {
        let mut trees_checked = 0usize;
        for t in sweep_trees(config.bound) {
            let x = DendroidalSet::representable(&t);
            let elements =
                ElementsOperad::new(&x, t.vertex_count().max(1), 3).map_err(|e| e.to_string())?;
            let l = SectionL::new(&t, &elements).map_err(|e| e.to_string())?;
            let r = RootFunctor::new(&elements).map_err(|e| e.to_string())?;
            let free = FiniteOperad::free_on(&t);
            for e in 0..t.edge_count() {
                if r.obj(&l.obj(e)) != e {
                    return Err(format!("object section fails at {}", t.print()));
                }
            }
            for rep in free.op_orbit_representatives() {
                for sigma in crate::perm::permutations(free.arity(&rep)) {
                    let op = free.act(&rep, &sigma);
                    if r.op(&l.op(&op)) != op {
                        return Err(format!("operation section fails at {}", t.print()));
                    }
                }
            }
            trees_checked += 1;
        }
        Ok(format!("{trees_checked} trees"))
    })();
    report.push("section-splits-root-functor", outcome);

    // homotopy components: existence, uniqueness among root-preserving
    // factorizations, membership in the root-preserving set, and the
    // interchange relation streamed over every operation
    let outcome = (|| -> std::result::Result<String, String> {
        let mut components_checked = 0usize;
        let mut ops_checked = 0usize;
        for t in sweep_trees(config.bound.min(4)) {
            let x = DendroidalSet::representable(&t);
            let bound = t.vertex_count().max(1).min(3);
            let elements = ElementsOperad::new(&x, bound, 3).map_err(|e| e.to_string())?;
            let l = SectionL::new(&t, &elements).map_err(|e| e.to_string())?;
            let r = RootFunctor::new(&elements).map_err(|e| e.to_string())?;
            let h = homotopy_components(&t, &elements, &l).map_err(|e| e.to_string())?;
            verify_homotopy_uniqueness(&elements, &h).map_err(|e| e.to_string())?;
            for component in h.values() {
                if !elements.is_root_preserving(component) {
                    return Err(format!(
                        "a component escapes the root-preserving set at {}",
                        t.print()
                    ));
                }
            }
            let mut interchange_failure = None;
            elements
                .for_each_op(&mut |op| {
                    let ok = dendroidal::check_homotopy_op(
                        &elements,
                        &elements,
                        op,
                        &|o: &ElObj| *o,
                        &|op: &ElOp| op.clone(),
                        &|o: &ElObj| l.obj(r.obj(o)),
                        &|op: &ElOp| l.op(&r.op(op)),
                        &|o: &ElObj| h.get(o).cloned(),
                    )?;
                    if !ok && interchange_failure.is_none() {
                        interchange_failure = Some(op.clone());
                    }
                    ops_checked += 1;
                    Ok(())
                })
                .map_err(|e| e.to_string())?;
            if interchange_failure.is_some() {
                return Err(format!("interchange fails at {}", t.print()));
            }
            components_checked += h.len();
        }
        Ok(format!("{components_checked} components, {ops_checked} operations"))
    })();
    report.push("root-functor-core", outcome);

    // naturality: the root functor commutes with the functors induced by
    // dendrices of the base
    let outcome = (|| -> std::result::Result<String, String> {
        let p = FiniteOperad::free_on(&Tree::parse("u[v,w]").unwrap());
        let x = DendroidalSet::nerve(p.clone());
        let el_x = ElementsOperad::new(&x, 3, 2).map_err(|e| e.to_string())?;
        let r_x = RootFunctor::new(&el_x).map_err(|e| e.to_string())?;
        let mut squares = 0usize;
        for t in tree::enumerate_trees(3, 2) {
            let xt = DendroidalSet::representable(&t);
            let el_t = ElementsOperad::new(&xt, 3, 2).map_err(|e| e.to_string())?;
            let r_t = RootFunctor::new(&el_t).map_err(|e| e.to_string())?;
            for alpha_dx in x.dendrices(&t).map_err(|e| e.to_string())? {
                let alpha = alpha_dx.as_nerve().clone();
                // the induced functor on objects
                let push_obj = |o: &ElObj| -> std::result::Result<ElObj, String> {
                    let rep = el_t.object_tree(o);
                    let beta = el_t.object_dendrex(o).as_nerve();
                    let beta_map: BTreeMap<String, String> = rep
                        .edge_names()
                        .iter()
                        .map(|n| (n.clone(), t.edge_name(beta.edge_obj[n]).to_string()))
                        .collect();
                    let beta_m = TreeMorphism::new(rep.clone(), t.clone(), beta_map)
                        .map_err(|e| e.to_string())?;
                    let image = x.act(&beta_m, &alpha_dx).map_err(|e| e.to_string())?;
                    Ok(el_x.object_of(rep, &image).map_err(|e| e.to_string())?.0)
                };
                for o in el_t.objects() {
                    let lhs = r_x.obj(&push_obj(&o)?);
                    let rhs = alpha.edge_obj[t.edge_name(r_t.obj(&o))];
                    if lhs != rhs {
                        return Err(format!("object square fails at {}", t.print()));
                    }
                    squares += 1;
                }
                // and on operations
                for op in el_t.all_ops().map_err(|e| e.to_string())? {
                    let pushed = ElOp {
                        inputs: op
                            .inputs
                            .iter()
                            .map(|o| push_obj(o))
                            .collect::<std::result::Result<Vec<_>, _>>()?,
                        output: push_obj(&op.output)?,
                        maps: op.maps.clone(),
                    };
                    let lhs = r_x.op(&pushed);
                    let rhs_free = r_t.op(&op);
                    // evaluate alpha on the free-operad operation
                    let operad::OpRef::Free { root, vertices, ordering } = &rhs_free else {
                        unreachable!()
                    };
                    let sub = tree::Subtree { root: *root, vertices: vertices.clone() };
                    let rhs = alpha.eval(&t, &p, &sub, ordering);
                    if lhs != rhs {
                        return Err(format!("operation square fails at {}", t.print()));
                    }
                    squares += 1;
                }
            }
        }
        Ok(format!("{squares} naturality squares"))
    })();
    report.push("root-naturality", outcome);

    // every root-preserving morphism maps to an identity, and the root
    // functor satisfies the operad-morphism axioms on small instances
    let outcome = (|| -> std::result::Result<String, String> {
        let mut count = 0usize;
        for t in tree::enumerate_trees(config.bound.min(3), 2) {
            let x = DendroidalSet::representable(&t);
            let elements = ElementsOperad::new(&x, 3, 2).map_err(|e| e.to_string())?;
            let r = RootFunctor::new(&elements).map_err(|e| e.to_string())?;
            for op in root_preserving_set(&elements).map_err(|e| e.to_string())? {
                let image = r.op(&op);
                let free = elements.base.operad().unwrap();
                if !free.is_unit(&image) {
                    return Err(format!("root-preserving image is not a unit at {}", t.print()));
                }
                count += 1;
            }
            if t.vertex_count() <= 2 {
                let ops = elements.all_ops().map_err(|e| e.to_string())?;
                r.validate_on(&ops).map_err(|e| e.to_string())?;
            }
        }
        Ok(format!("{count} root-preserving morphisms"))
    })();
    report.push("root-preserving-to-identities", outcome);

    // on simplicial bases the root functor is the last vertex functor
    let outcome = (|| -> std::result::Result<String, String> {
        let p = from_category(&FinCategory::poset(2));
        let x = DendroidalSet::nerve(p.clone());
        let elements = ElementsOperad::new(&x, config.bound.min(4), 1).map_err(|e| e.to_string())?;
        let r = RootFunctor::new(&elements).map_err(|e| e.to_string())?;
        let mut count = 0usize;
        for (ri, rep) in elements.reps.iter().enumerate() {
            if rep.vertex_count() > 3 {
                continue; // dendrices up to simplicial dimension 3
            }
            for ci in 0..elements.cells[ri].len() {
                let dx = elements.cells[ri][ci].clone();
                let via_root = r.obj(&(ri, ci));
                let via_last = dendroidal::last_vertex_object(&x, rep, &dx)
                    .map_err(|e| e.to_string())?;
                let last_obj = via_last.as_nerve().edge_obj[rep.root_name()];
                if via_root != last_obj {
                    return Err(format!("object values differ at {}", rep.print()));
                }
                count += 1;
            }
        }
        // arrows: the image of a morphism of elements matches the last
        // vertex arrow
        for op in elements.all_ops().map_err(|e| e.to_string())? {
            let (ri, ci) = op.output;
            let rep = &elements.reps[ri];
            if rep.vertex_count() > 3 {
                continue;
            }
            let g_dx = elements.cells[ri][ci].clone();
            let src_rep = elements.object_tree(&op.inputs[0]).clone();
            let phi = TreeMorphism::new(src_rep, rep.clone(), op.maps[0].clone())
                .map_err(|e| e.to_string())?;
            let arrow = dendroidal::last_vertex_arrow(&x, &phi, &g_dx)
                .map_err(|e| e.to_string())?;
            let arrow_op = arrow
                .as_nerve()
                .vertex_op
                .values()
                .next()
                .cloned()
                .expect("a 1-dendrex has one vertex");
            if arrow_op != r.op(&op) {
                return Err("arrow values differ".into());
            }
            count += 1;
        }
        Ok(format!("{count} comparisons"))
    })();
    report.push("simplicial-last-vertex", outcome);
    Ok(report)
}

pub fn tensor_suite(config: &Config) -> SuiteReport {
    let mut report = SuiteReport::new("tensor", config);
    let b = config.word_bound.max(4);

    let outcome = (|| -> std::result::Result<String, String> {
        let pairs = [
            ("r[a,b,c]", "1[0]"),
            ("r[a,b]", "1[0]"),
            ("r[a]", "r[a]"),
            ("e", "r[a,b]"),
        ];
        for (pt, qt) in pairs {
            let p = FiniteOperad::free_on(&Tree::parse(pt).unwrap());
            let q = FiniteOperad::free_on(&Tree::parse(qt).unwrap());
            let t = TensorOperad::new(p.clone(), q.clone(), b).map_err(|e| e.to_string())?;
            if t.object_count() != p.objects().len() * q.objects().len() {
                return Err(format!("object count is not the product for {pt} ⊗ {qt}"));
            }
        }
        Ok(format!("{} pairs", pairs.len()))
    })();
    report.push("tensor-objects-product", outcome);

    let outcome = (|| -> std::result::Result<String, String> {
        // the two composites of the interchange square for the 3-corolla
        // against the 1-corolla
        let c3 = Tree::parse("r[e1,e2,e3]").unwrap();
        let c1 = Tree::parse("1[0]").unwrap();
        let tensor = TensorOperad::new(
            FiniteOperad::free_on(&c3),
            FiniteOperad::free_on(&c1),
            b.max(5),
        )
        .map_err(|e| e.to_string())?;
        if tensor.frontier_touched {
            return Err("closure touched the frontier".into());
        }
        if !tensor.interchange_figure_check().map_err(|e| e.to_string())? {
            return Err("figure composites in different classes".into());
        }
        if !tensor.verify_closed() {
            return Err("closure is not idempotent".into());
        }
        Ok("figure composites identified, closure idempotent".into())
    })();
    report.push("tensor-interchange-figure", outcome);

    let outcome = (|| -> std::result::Result<String, String> {
        let eta = Tree::eta("e");
        let c1 = Tree::parse("1[0]").unwrap();
        let c2 = Tree::parse("r[a,b]").unwrap();
        let probes = [
            (&eta, &eta, &eta),
            (&c1, &c1, &c1),
            (&c2, &c1, &c2),
            (&c1, &c1, &eta),
            (&c2, &c1, &c1),
        ];
        for (t, s, r) in probes {
            if !compare_tensor_nerve(t, s, r, b).map_err(|e| e.to_string())? {
                return Err(format!(
                    "dendrex counts differ for {} ⊗ {} at {}",
                    t.print(),
                    s.print(),
                    r.print()
                ));
            }
        }
        Ok(format!("{} probes, frontier untouched", probes.len()))
    })();
    report.push("tensor-nerve-comparison", outcome);

    let outcome = (|| -> std::result::Result<String, String> {
        let p = from_category(&FinCategory::poset(1));
        let q = from_category(&FinCategory::poset(1));
        let t = TensorOperad::new(p, q, b).map_err(|e| e.to_string())?;
        for (c, y) in t.objects() {
            for (d, z) in t.objects() {
                let count = t.ops(&[(c, y)], &(d, z)).len();
                let expected = usize::from(c <= d && y <= z);
                if count != expected {
                    return Err(format!("unary class count differs at ({c},{y}) → ({d},{z})"));
                }
            }
        }
        Ok("product category recovered".into())
    })();
    report.push("tensor-unary-product-category", outcome);
    report
}

pub fn decalage_suite(config: &Config) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("decalage", config);

    let outcome = (|| -> std::result::Result<String, String> {
        let d = decalage::dendroidal_decalage(config.bound.min(3), 2).map_err(|e| e.to_string())?;
        let validation = decalage::validate_decalage(&d);
        for entry in &validation.entries {
            if !entry.passed {
                return Err(format!("{}: {:?}", entry.name, entry.witness));
            }
        }
        Ok(format!("{} checks", validation.entries.len()))
    })();
    report.push("decalage-dendroidal-axioms", outcome);

    let outcome = (|| -> std::result::Result<String, String> {
        let d = decalage::dendroidal_decalage(2, 2).map_err(|e| e.to_string())?;
        let p = FiniteOperad::free_on(&Tree::parse("u[v,w]").unwrap());
        let nerve = decalage::n_omega(&d, &p, 200_000).map_err(|e| e.to_string())?;
        let x = DendroidalSet::nerve(p.clone());
        let elements = ElementsOperad::new(&x, 2, 2).map_err(|e| e.to_string())?;
        let generic = decalage::GenericElements::new(&d, &nerve.presheaf);
        let functor = decalage::FinalObjectFunctor { data: &d, p: &p, nerve: &nerve };
        let root = RootFunctor::new(&elements).map_err(|e| e.to_string())?;
        let mut agreements = 0usize;
        for (a, cells) in nerve.cells.iter().enumerate() {
            let rep = &elements.reps[a];
            for (i, cell) in cells.iter().enumerate() {
                let pos = elements.cells[a]
                    .iter()
                    .position(|dx| {
                        operad::dendrex_to_morphism(rep, &p, dx.as_nerve()) == *cell
                    })
                    .ok_or("cell missing in the operad of elements")?;
                if functor.obj(&(a, i)).map_err(|e| e.to_string())? != root.obj(&(a, pos)) {
                    return Err(format!("final-object functor differs on objects at rep {a}"));
                }
                for arity in 0..=2usize {
                    let gops = generic.ops_into(&(a, i), arity).map_err(|e| e.to_string())?;
                    let eops = elements.ops_into(&(a, pos), arity).map_err(|e| e.to_string())?;
                    if gops.len() != eops.len() {
                        return Err(format!(
                            "operation counts differ at rep {a}, arity {arity}: {} vs {}",
                            gops.len(),
                            eops.len()
                        ));
                    }
                    // compare the pushed operations as sets
                    let mut lhs: Vec<String> = gops
                        .iter()
                        .map(|op| functor.op(op).map(|o| p.op_name(&o)))
                        .collect::<Result<Vec<_>>>()
                        .map_err(|e| e.to_string())?;
                    let mut rhs: Vec<String> =
                        eops.iter().map(|op| p.op_name(&root.op(op))).collect();
                    lhs.sort();
                    rhs.sort();
                    if lhs != rhs {
                        return Err(format!("pushed operations differ at rep {a}, arity {arity}"));
                    }
                    agreements += gops.len();
                }
            }
        }
        Ok(format!("{agreements} operations agree"))
    })();
    report.push("decalage-generic-elements-agreement", outcome);

    // naturality of the final object functor in the operad
    let outcome = (|| -> std::result::Result<String, String> {
        let d = decalage::dendroidal_decalage(2, 1).map_err(|e| e.to_string())?;
        let p = from_category(&FinCategory::poset(1));
        let q = from_category(&FinCategory::terminal());
        // the unique functor [1] → * as an operad morphism
        let h = crate::operad::OperadMorphism {
            on_objects: BTreeMap::from([("0".into(), "*".into()), ("1".into(), "*".into())]),
            on_ops: BTreeMap::from([
                ("0_0".into(), "id".into()),
                ("0_1".into(), "id".into()),
                ("1_1".into(), "id".into()),
            ]),
        };
        h.validate(&p, &q).map_err(|e| e.to_string())?;
        let np = decalage::n_omega(&d, &p, 100_000).map_err(|e| e.to_string())?;
        let nq = decalage::n_omega(&d, &q, 100_000).map_err(|e| e.to_string())?;
        let fp = decalage::FinalObjectFunctor { data: &d, p: &p, nerve: &np };
        let fq = decalage::FinalObjectFunctor { data: &d, p: &q, nerve: &nq };
        let mut count = 0usize;
        for (a, cells) in np.cells.iter().enumerate() {
            for (i, cell) in cells.iter().enumerate() {
                // push the element along h, find its index downstairs
                let pushed = cell.compose(&h).map_err(|e| e.to_string())?;
                let j = nq.cells[a]
                    .iter()
                    .position(|c| *c == pushed)
                    .ok_or("pushed element missing")?;
                let lhs = h
                    .apply_obj(&p.object_name(fp.obj(&(a, i)).map_err(|e| e.to_string())?))
                    .map_err(|e| e.to_string())?
                    .to_string();
                let rhs = q.object_name(fq.obj(&(a, j)).map_err(|e| e.to_string())?);
                if lhs != rhs {
                    return Err(format!("naturality fails at rep {a}"));
                }
                count += 1;
            }
        }
        Ok(format!("{count} elements"))
    })();
    report.push("decalage-final-object-natural", outcome);
    Ok(report)
}

pub fn algebras_suite(config: &Config) -> SuiteReport {
    let mut report = SuiteReport::new("algebras", config);

    let outcome = (|| -> std::result::Result<String, String> {
        let p = algebra::interval_operad();
        let algebras = algebra::enumerate_algebras(&p, 2, 1_000_000).map_err(|e| e.to_string())?;
        let expected: usize = (1..=2usize)
            .flat_map(|a| (1..=2usize).map(move |b| b.pow(a as u32)))
            .sum();
        if algebras.len() != expected {
            return Err(format!("{} algebras, expected {expected}", algebras.len()));
        }
        let arrow = p.op_by_name("0_1").map_err(|e| e.to_string())?;
        let constant = algebras
            .iter()
            .filter(|a| {
                algebra::is_locally_constant(&p, a, std::slice::from_ref(&arrow)).unwrap()
            })
            .count();
        let bijections: usize = (1..=2usize).map(|n| (1..=n).product::<usize>()).sum();
        if constant != bijections {
            return Err(format!("{constant} locally constant, expected {bijections}"));
        }
        Ok(format!("{} algebras, {constant} locally constant", algebras.len()))
    })();
    report.push("locally-constant", outcome);

    let outcome = (|| -> std::result::Result<String, String> {
        // pulling back along the root functor makes every algebra locally
        // constant at the root-preserving morphisms
        let p = FiniteOperad::free_on(&Tree::parse("r[a]").unwrap());
        let x = DendroidalSet::nerve(p.clone());
        let elements = ElementsOperad::new(&x, 2, 1).map_err(|e| e.to_string())?;
        let rp = root_preserving_set(&elements).map_err(|e| e.to_string())?;
        let mut count = 0usize;
        for alg in algebra::enumerate_algebras(&p, 2, 1_000_000)
            .map_err(|e| e.to_string())?
            .iter()
        {
            let pulled =
                algebra::PulledBackAlgebra { elements: &elements, operad: &p, algebra: alg };
            for op in &rp {
                if !pulled.action_is_identity(op).map_err(|e| e.to_string())? {
                    return Err("pullback is not locally constant at a root-preserving morphism".into());
                }
                count += 1;
            }
        }
        Ok(format!("{count} pulled-back actions"))
    })();
    report.push("pullback-locally-constant", outcome);

    let outcome = (|| -> std::result::Result<String, String> {
        // the root inclusions over the base: one morphism per 1-dendrex
        let p = algebra::interval_operad();
        let x = DendroidalSet::nerve(p.clone());
        let elements = ElementsOperad::new(&x, 2, 1).map_err(|e| e.to_string())?;
        let c1 = Tree::parse("out[in]").unwrap();
        let arrows = x.dendrices(&c1).map_err(|e| e.to_string())?;
        let over = algebra::arrows_over(&x, &elements, &arrows).map_err(|e| e.to_string())?;
        if over.len() != arrows.len() {
            return Err("the set of root inclusions has the wrong size".into());
        }
        Ok(format!("{} root inclusions", over.len()))
    })();
    report.push("root-inclusions-over-base", outcome);
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(matches!(
            run_suite("nope", &Config::default()),
            Err(Error::UnknownSuite(_))
        ));
    }

    #[test]
    fn small_bound_all_suites_pass() {
        let config = Config { bound: 2, word_bound: 4 };
        for report in run_suite("all", &config).unwrap() {
            for check in &report.checks {
                assert!(check.passed, "{}::{}: {}", report.suite, check.name, check.details);
            }
        }
    }
}
