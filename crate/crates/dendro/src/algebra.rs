//! Algebras over finite operads in finite sets, the locally constant
//! predicate, and the over-the-base root inclusions used to present a set of
//! 1-dendrices as morphisms of elements.

use crate::dendroidal::{DendroidalSet, Dx, TreeMorphism};
use crate::elements::{ElementsOperad, ElOp};
use crate::error::{Error, Result};
use crate::operad::{FiniteOperad, Operad, OpRef};
use crate::perm;
use crate::tree::Tree;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// An algebra for a finite operad in finite sets: a carrier per color and a
/// structure map per operation. Carrier elements are `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FinSetAlgebra {
    pub carriers: Vec<usize>,
    /// per operation name: the table sending each tuple of carrier elements
    /// (mixed-radix order over the inputs) to an element of the output
    pub actions: BTreeMap<String, Vec<usize>>,
}

impl FinSetAlgebra {
    /// Validate equivariance, compatibility with composition, and unitality.
    pub fn validate(&self, operad: &FiniteOperad) -> Result<()> {
        let all_ops = materialized_ops(operad);
        for op in &all_ops {
            let name = operad.op_name(op);
            let table = self
                .actions
                .get(&name)
                .ok_or_else(|| Error::Invalid(format!("missing action for `{name}`")))?;
            let inputs = operad.op_inputs(op);
            let domain: usize = inputs.iter().map(|&c| self.carriers[c]).product();
            let out_size = self.carriers[operad.op_output(op)];
            if table.len() != domain || table.iter().any(|&v| v >= out_size) {
                return Err(Error::Invalid(format!("action table of `{name}` malformed")));
            }
        }
        // unitality
        for c in operad.objects() {
            let unit = operad.unit(&c);
            let table = &self.actions[&operad.op_name(&unit)];
            if table.iter().enumerate().any(|(i, &v)| i != v) {
                return Err(Error::AxiomViolation("unit does not act as the identity".into()));
            }
        }
        // equivariance under adjacent transpositions
        for op in &all_ops {
            let inputs = operad.op_inputs(op);
            let n = inputs.len();
            for i in 0..n.saturating_sub(1) {
                let swapped = operad.transpose(op, i);
                for args in tuples(&inputs.iter().map(|&c| self.carriers[c]).collect::<Vec<_>>()) {
                    let mut permuted = args.clone();
                    permuted.swap(i, i + 1);
                    // act(p, s_i) evaluated on x equals p evaluated on s_i(x)
                    let lhs = self.eval(operad, &swapped, &permuted)?;
                    let rhs = self.eval(operad, op, &args)?;
                    if lhs != rhs {
                        return Err(Error::AxiomViolation(format!(
                            "equivariance fails on `{}` at slot {i}",
                            operad.op_name(op)
                        )));
                    }
                }
            }
        }
        // compatibility with partial composition where defined
        for p in &all_ops {
            let p_inputs = operad.op_inputs(p);
            for (i, &c) in p_inputs.iter().enumerate() {
                for q in all_ops.iter().filter(|q| operad.op_output(q) == c) {
                    let Some(pq) = operad.compose(p, i, q) else { continue };
                    let q_inputs = operad.op_inputs(q);
                    let sizes: Vec<usize> = {
                        let mut s: Vec<usize> =
                            p_inputs[..i].iter().map(|&c| self.carriers[c]).collect();
                        s.extend(q_inputs.iter().map(|&c| self.carriers[c]));
                        s.extend(p_inputs[i + 1..].iter().map(|&c| self.carriers[c]));
                        s
                    };
                    for args in tuples(&sizes) {
                        let m = q_inputs.len();
                        let inner = self.eval(operad, q, &args[i..i + m])?;
                        let mut outer_args = args[..i].to_vec();
                        outer_args.push(inner);
                        outer_args.extend_from_slice(&args[i + m..]);
                        let lhs = self.eval(operad, &pq, &args)?;
                        let rhs = self.eval(operad, p, &outer_args)?;
                        if lhs != rhs {
                            return Err(Error::AxiomViolation(format!(
                                "composition compatibility fails at `{}` ∘_{i} `{}`",
                                operad.op_name(p),
                                operad.op_name(q)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, operad: &FiniteOperad, op: &OpRef, args: &[usize]) -> Result<usize> {
        let name = operad.op_name(op);
        let table = self
            .actions
            .get(&name)
            .ok_or_else(|| Error::Invalid(format!("missing action for `{name}`")))?;
        let inputs = operad.op_inputs(op);
        let mut index = 0usize;
        for (&arg, &c) in args.iter().zip(inputs.iter()) {
            index = index * self.carriers[c] + arg;
        }
        table
            .get(index)
            .copied()
            .ok_or_else(|| Error::Invalid("argument tuple out of range".into()))
    }

    pub fn to_json(&self, operad: &FiniteOperad) -> AlgebraJson {
        AlgebraJson {
            schema: crate::SCHEMA.to_string(),
            carriers: operad
                .object_names()
                .iter()
                .cloned()
                .zip(self.carriers.iter().copied())
                .collect(),
            actions: self.actions.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub schema: String,
    pub carriers: BTreeMap<String, usize>,
    pub actions: BTreeMap<String, Vec<usize>>,
}

fn materialized_ops(operad: &FiniteOperad) -> Vec<OpRef> {
    let mut out = Vec::new();
    for rep in operad.op_orbit_representatives() {
        for sigma in perm::permutations(operad.arity(&rep)) {
            out.push(operad.act(&rep, &sigma));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// All tuples in the product of `0..sizes[i]`, lexicographically.
fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &size in sizes {
        let mut next = Vec::new();
        for t in &out {
            for v in 0..size {
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// True iff the algebra sends every operation of `unary` to a bijection.
pub fn is_locally_constant(
    operad: &FiniteOperad,
    algebra: &FinSetAlgebra,
    unary: &[OpRef],
) -> Result<bool> {
    for op in unary {
        if operad.arity(op) != 1 {
            return Err(Error::Precondition(format!(
                "`{}` is not unary",
                operad.op_name(op)
            )));
        }
        let table = &algebra.actions[&operad.op_name(op)];
        let out_size = algebra.carriers[operad.op_output(op)];
        let mut seen = vec![false; out_size];
        for &v in table {
            if seen[v] {
                return Ok(false);
            }
            seen[v] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every algebra with carriers of sizes `1..=bound`, raw enumeration.
/// `cap` guards against combinatorial explosion.
pub fn enumerate_algebras(
    operad: &FiniteOperad,
    bound: usize,
    cap: usize,
) -> Result<Vec<FinSetAlgebra>> {
    if bound == 0 {
        return Err(Error::Precondition("carrier bound must be positive".into()));
    }
    let objects = operad.objects();
    let all_ops = materialized_ops(operad);
    let mut results = Vec::new();
    let mut sizes = vec![1usize; objects.len()];
    loop {
        // all action assignments for these carrier sizes
        let mut tables: Vec<(String, usize, usize)> = Vec::new(); // name, domain, codomain
        for op in &all_ops {
            let domain: usize =
                operad.op_inputs(op).iter().map(|&c| sizes[c]).product();
            let codomain = sizes[operad.op_output(op)];
            tables.push((operad.op_name(op), domain, codomain));
        }
        let total: usize = tables
            .iter()
            .map(|(_, d, c)| c.checked_pow(*d as u32).unwrap_or(usize::MAX))
            .product();
        if total.saturating_add(results.len()) > cap {
            return Err(Error::BoundExceeded(format!(
                "algebra enumeration needs more than {cap} candidates"
            )));
        }
        let mut assignment: Vec<Vec<usize>> = Vec::new();
        assign_tables(&tables, &mut assignment, &mut |actions| {
            let algebra = FinSetAlgebra {
                carriers: sizes.clone(),
                actions: tables
                    .iter()
                    .map(|(n, _, _)| n.clone())
                    .zip(actions.iter().cloned())
                    .collect(),
            };
            if algebra.validate(operad).is_ok() {
                results.push(algebra);
            }
        });
        // next size vector
        let mut k = 0usize;
        loop {
            if k == sizes.len() {
                results.sort();
                return Ok(results);
            }
            if sizes[k] < bound {
                sizes[k] += 1;
                break;
            }
            sizes[k] = 1;
            k += 1;
        }
    }
}

fn assign_tables(
    tables: &[(String, usize, usize)],
    acc: &mut Vec<Vec<usize>>,
    f: &mut dyn FnMut(&[Vec<usize>]),
) {
    if acc.len() == tables.len() {
        f(acc);
        return;
    }
    let (_, domain, codomain) = &tables[acc.len()];
    for table in tuples(&vec![*codomain; *domain]) {
        acc.push(table);
        assign_tables(tables, acc, f);
        acc.pop();
    }
}

/// The over-the-base morphism from the root of a 1-dendrex: the unary
/// operation of the operad of elements given by the root inclusion of the
/// one-vertex linear tree.
pub fn build_r_f(elements: &ElementsOperad, f_dendrex: &Dx) -> Result<ElOp> {
    let c1 = Tree::parse("out[in]").expect("static tree");
    let (source_obj, iso) = elements.object_of(&c1, f_dendrex)?;
    // the root evaluation of f: the target object of the inclusion
    let root_inclusion = TreeMorphism::new(
        Tree::eta("out"),
        c1.clone(),
        BTreeMap::from([("out".to_string(), "out".to_string())]),
    )?;
    let b_dendrex = elements.base.act(&root_inclusion, f_dendrex)?;
    let (eta_obj, eta_iso) = elements.object_of(&Tree::eta("out"), &b_dendrex)?;
    // assemble the operation (η, b) → (C_1, f) at representative level
    let inv_iso: BTreeMap<&String, &String> =
        iso.edge_map.iter().map(|(a, b)| (b, a)).collect();
    let map: BTreeMap<String, String> = eta_iso
        .edge_map
        .iter()
        .map(|(a, b)| (a.clone(), inv_iso[b].clone()))
        .collect();
    Ok(ElOp { inputs: vec![eta_obj], output: source_obj, maps: vec![map] })
}

/// Pull an algebra back along the root functor of a nerve: the carrier at
/// `(S, α)` is the carrier at `α(r_S)` and every root-preserving morphism
/// acts as the identity.
pub struct PulledBackAlgebra<'a> {
    pub elements: &'a ElementsOperad,
    pub operad: &'a FiniteOperad,
    pub algebra: &'a FinSetAlgebra,
}

impl<'a> PulledBackAlgebra<'a> {
    pub fn carrier(&self, obj: &crate::elements::ElObj) -> usize {
        let root = crate::elements::RootFunctor {
            elements: self.elements,
            operad: self.operad,
        }
        .obj(obj);
        self.algebra.carriers[root]
    }

    pub fn action_is_identity(&self, op: &ElOp) -> Result<bool> {
        let root = crate::elements::RootFunctor {
            elements: self.elements,
            operad: self.operad,
        };
        let image = root.op(op);
        let table = &self.algebra.actions[&self.operad.op_name(&image)];
        Ok(table.iter().enumerate().all(|(i, &v)| i == v))
    }
}

/// The [1]-poset operad: two colors and a single non-identity unary arrow.
pub fn interval_operad() -> FiniteOperad {
    crate::operad::from_category(&crate::operad::FinCategory::poset(1))
}

/// A set of 1-dendrices presented as morphisms of elements over the base.
pub fn arrows_over(x: &DendroidalSet, elements: &ElementsOperad, arrows: &[Dx]) -> Result<Vec<ElOp>> {
    let _ = x;
    arrows.iter().map(|f| build_r_f(elements, f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::from_category;
    use crate::operad::FinCategory;

    #[test]
    fn trivial_operad_has_one_algebra_per_point() {
        let p = from_category(&FinCategory::terminal());
        let algebras = enumerate_algebras(&p, 1, 10_000).unwrap();
        assert_eq!(algebras.len(), 1);
    }

    #[test]
    fn interval_algebra_count_matches_function_count() {
        // algebras of the [1]-poset operad with carriers of size ≤ 2 are
        // functions between sets of sizes 1..=2
        let p = interval_operad();
        let algebras = enumerate_algebras(&p, 2, 100_000).unwrap();
        let expected: usize = (1..=2usize)
            .flat_map(|a| (1..=2usize).map(move |b| b.pow(a as u32)))
            .sum();
        assert_eq!(algebras.len(), expected);
        assert_eq!(expected, 8);
    }

    #[test]
    fn locally_constant_filter_keeps_bijections() {
        let p = interval_operad();
        let arrow = p.op_by_name("0_1").unwrap();
        let algebras = enumerate_algebras(&p, 2, 100_000).unwrap();
        let constant: Vec<&FinSetAlgebra> = algebras
            .iter()
            .filter(|a| is_locally_constant(&p, a, std::slice::from_ref(&arrow)).unwrap())
            .collect();
        // bijections between equal-size carriers: 1 + 2
        assert_eq!(constant.len(), 3);
        // empty set of arrows keeps everything
        for a in &algebras {
            assert!(is_locally_constant(&p, a, &[]).unwrap());
        }
    }

    #[test]
    fn non_injective_action_is_not_locally_constant() {
        let p = interval_operad();
        let arrow = p.op_by_name("0_1").unwrap();
        let algebra = FinSetAlgebra {
            carriers: vec![2, 1],
            actions: BTreeMap::from([
                ("0_0".to_string(), vec![0, 1]),
                ("1_1".to_string(), vec![0]),
                ("0_1".to_string(), vec![0, 0]),
            ]),
        };
        algebra.validate(&p).unwrap();
        assert!(!is_locally_constant(&p, &algebra, std::slice::from_ref(&arrow)).unwrap());
    }

    #[test]
    fn locally_constant_is_isomorphism_invariant() {
        // relabeling a carrier through a bijection preserves the predicate
        let p = interval_operad();
        let arrow = p.op_by_name("0_1").unwrap();
        for algebra in enumerate_algebras(&p, 2, 100_000).unwrap() {
            if algebra.carriers[0] != 2 {
                continue;
            }
            // swap the two elements of the first carrier
            let swap = |v: usize| 1 - v;
            let mut actions = algebra.actions.clone();
            if let Some(t) = actions.get_mut("0_0") {
                let old = t.clone();
                for (i, slot) in t.iter_mut().enumerate() {
                    *slot = swap(old[swap(i)]);
                }
            }
            if let Some(t) = actions.get_mut("0_1") {
                let old = t.clone();
                for (i, slot) in t.iter_mut().enumerate() {
                    *slot = old[swap(i)];
                }
            }
            let twisted = FinSetAlgebra { carriers: algebra.carriers.clone(), actions };
            twisted.validate(&p).unwrap();
            assert_eq!(
                is_locally_constant(&p, &algebra, std::slice::from_ref(&arrow)).unwrap(),
                is_locally_constant(&p, &twisted, std::slice::from_ref(&arrow)).unwrap(),
            );
        }
    }

    #[test]
    fn root_inclusion_over_the_interval() {
        let p = interval_operad();
        let x = DendroidalSet::nerve(p.clone());
        let elements = ElementsOperad::new(&x, 2, 1).unwrap();
        let c1 = Tree::parse("out[in]").unwrap();
        let arrows = x.dendrices(&c1).unwrap();
        let r_fs = arrows_over(&x, &elements, &arrows).unwrap();
        assert_eq!(r_fs.len(), arrows.len());
        for (op, f) in r_fs.iter().zip(&arrows) {
            assert_eq!(op.inputs.len(), 1);
            // the source is an eta object carrying the root evaluation of f
            let eta_rep = elements.object_tree(&op.inputs[0]);
            assert_eq!(eta_rep.vertex_count(), 0);
            let b = elements.object_dendrex(&op.inputs[0]).as_nerve();
            let f_d = f.as_nerve();
            assert_eq!(
                b.edge_obj.values().next().copied(),
                f_d.edge_obj.get("out").copied()
            );
            // the root inclusion hits the root of the target, so as a
            // morphism of elements it is root preserving
            assert!(elements.is_root_preserving(op));
        }
    }

    #[test]
    fn pullback_along_root_functor_is_locally_constant() {
        // the root functor sends root-preserving morphisms to identities, so
        // pulled-back algebras are locally constant at those arrows
        let p = FiniteOperad::free_on(&Tree::parse("r[a]").unwrap());
        let x = DendroidalSet::nerve(p.clone());
        let elements = ElementsOperad::new(&x, 2, 1).unwrap();
        for algebra in enumerate_algebras(&p, 2, 1_000_000).unwrap().iter().take(10) {
            let pulled = PulledBackAlgebra { elements: &elements, operad: &p, algebra };
            for op in crate::elements::root_preserving_set(&elements).unwrap() {
                assert!(pulled.action_is_identity(&op).unwrap());
            }
        }
    }
}
