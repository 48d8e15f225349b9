//! Multi-graphs, multi-diagrams of Ω-relations, vague limits and commutativity.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::lattice::{Flavor, Lattice};
use crate::omega::{lambda_similar, OmegaObject, Similarity};
use crate::relation::{for_each_tuple, Attribute, Relation, Tuple};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub label: String,
    pub sources: Vec<String>,
    pub targets: Vec<String>,
}

/// Labelled vertices and multi-arrows (sets of source and target vertices).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MultiGraph {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
}

impl MultiGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<()> {
        if self.vertices.iter().any(|v| v == name) {
            return Err(Error::DuplicateLabel(name.to_string()));
        }
        self.vertices.push(name.to_string());
        Ok(())
    }

    pub fn add_arrow(&mut self, label: &str, sources: &[&str], targets: &[&str]) -> Result<()> {
        if self.arrows.iter().any(|a| a.label == label) {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
        for side in [sources, targets] {
            for (i, v) in side.iter().enumerate() {
                if !self.vertices.iter().any(|x| x == v) {
                    return Err(Error::UnknownVertex(v.to_string()));
                }
                if side[..i].contains(v) {
                    return Err(Error::ArrowSignature {
                        arrow: label.to_string(),
                        reason: format!("vertex `{v}` listed twice on one side"),
                    });
                }
            }
        }
        self.arrows.push(Arrow {
            label: label.to_string(),
            sources: sources.iter().map(|s| s.to_string()).collect(),
            targets: targets.iter().map(|s| s.to_string()).collect(),
        });
        Ok(())
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.vertices.iter().any(|x| x == v)
    }

    pub fn arrow(&self, label: &str) -> Option<&Arrow> {
        self.arrows.iter().find(|a| a.label == label)
    }

    /// Vertices that feed some arrow and are produced by none.
    pub fn inputs(&self) -> Vec<String> {
        self.boundary(|a| &a.sources, |a| &a.targets)
    }

    /// Vertices produced by some arrow and fed to none.
    pub fn outputs(&self) -> Vec<String> {
        self.boundary(|a| &a.targets, |a| &a.sources)
    }

    fn boundary(&self, on: impl Fn(&Arrow) -> &Vec<String>, off: impl Fn(&Arrow) -> &Vec<String>) -> Vec<String> {
        self.vertices
            .iter()
            .filter(|v| self.arrows.iter().any(|a| on(a).contains(v)) && !self.arrows.iter().any(|a| off(a).contains(v)))
            .cloned()
            .collect()
    }

    /// Vertices touched by no arrow.
    pub fn isolated(&self) -> Vec<String> {
        self.vertices
            .iter()
            .filter(|v| !self.arrows.iter().any(|a| a.sources.contains(v) || a.targets.contains(v)))
            .cloned()
            .collect()
    }
}

fn fresh(name: &str, taken: &dyn Fn(&str) -> bool) -> String {
    if !taken(name) {
        return name.to_string();
    }
    (2..)
        .map(|k| format!("{name}#{k}"))
        .find(|c| !taken(c))
        .expect("unbounded suffixes")
}

/// Glues `g2` after `g1`: outputs of `g1` are identified with equally labelled inputs
/// of `g2`; every other clashing vertex or arrow label of `g2` gets a `#k` suffix.
pub fn glue(g1: &MultiGraph, g2: &MultiGraph) -> MultiGraph {
    let outs = g1.outputs();
    let ins = g2.inputs();
    let glued: HashSet<&String> = outs.iter().filter(|v| ins.contains(v)).collect();
    let mut out = g1.clone();
    let mut rename: BTreeMap<String, String> = BTreeMap::new();
    for v in &g2.vertices {
        if glued.contains(v) {
            rename.insert(v.clone(), v.clone());
        } else {
            let taken = |c: &str| out.vertices.iter().any(|x| x == c) || g2.vertices.iter().any(|x| x != v && x == c);
            let name = fresh(v, &taken);
            out.vertices.push(name.clone());
            rename.insert(v.clone(), name);
        }
    }
    for a in &g2.arrows {
        let taken = |c: &str| out.arrows.iter().any(|x| x.label == c) || g2.arrows.iter().any(|x| x.label != a.label && x.label == c);
        let label = fresh(&a.label, &taken);
        out.arrows.push(Arrow {
            label,
            sources: a.sources.iter().map(|s| rename[s].clone()).collect(),
            targets: a.targets.iter().map(|s| rename[s].clone()).collect(),
        });
    }
    out
}

/// A multi-graph with Ω-objects on its vertices and relations on its arrows.
#[derive(Debug, Clone)]
pub struct MultiDiagram<L: Lattice> {
    graph: MultiGraph,
    objects: Vec<OmegaObject<L>>,
    relations: Vec<Relation<L>>,
    flavor: Flavor<L>,
    sources: Option<Vec<String>>,
}

fn same_attrs(a: &[Attribute], b: &[Attribute]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| y.name == x.name && y.domain == x.domain))
}

impl<L: Lattice> MultiDiagram<L> {
    pub fn new(flavor: Flavor<L>) -> Self {
        MultiDiagram { graph: MultiGraph::new(), objects: Vec::new(), relations: Vec::new(), flavor, sources: None }
    }

    /// Assembles a diagram from a graph and label-keyed objects and relations.
    pub fn from_parts(
        flavor: Flavor<L>,
        graph: &MultiGraph,
        mut objects: BTreeMap<String, OmegaObject<L>>,
        mut relations: BTreeMap<String, Relation<L>>,
    ) -> Result<Self> {
        let mut d = Self::new(flavor);
        for v in graph.vertices() {
            let obj = objects.remove(v).ok_or_else(|| Error::DanglingVertexObject(v.clone()))?;
            d.add_vertex(v, obj)?;
        }
        if let Some(v) = objects.keys().next() {
            return Err(Error::DanglingVertexObject(v.clone()));
        }
        for a in graph.arrows() {
            let rel = relations.remove(&a.label).ok_or_else(|| Error::ArrowSignature {
                arrow: a.label.clone(),
                reason: "no relation assigned".into(),
            })?;
            let s: Vec<&str> = a.sources.iter().map(String::as_str).collect();
            let t: Vec<&str> = a.targets.iter().map(String::as_str).collect();
            d.add_arrow(&a.label, &s, &t, rel)?;
        }
        if let Some(a) = relations.keys().next() {
            return Err(Error::ArrowSignature { arrow: a.clone(), reason: "arrow not in the graph".into() });
        }
        Ok(d)
    }

    pub fn add_vertex(&mut self, name: &str, object: OmegaObject<L>) -> Result<()> {
        if object.dist().lattice() != self.flavor.lattice() {
            return Err(Error::InconsistentLattice(format!(
                "vertex `{name}` is valued in {}, the flavor in {}",
                object.dist().lattice().name(),
                self.flavor.lattice().name()
            )));
        }
        for a in object.carrier() {
            if self.objects.iter().any(|o| o.carrier().iter().any(|b| b.name == a.name)) {
                return Err(Error::DuplicateAttribute(a.name.clone()));
            }
        }
        self.graph.add_vertex(name)?;
        self.objects.push(object);
        Ok(())
    }

    pub fn add_arrow(&mut self, label: &str, sources: &[&str], targets: &[&str], rel: Relation<L>) -> Result<()> {
        if rel.lattice() != self.flavor.lattice() {
            return Err(Error::InconsistentLattice(format!("arrow `{label}` is valued in {}", rel.lattice().name())));
        }
        let mut g = self.graph.clone();
        g.add_arrow(label, sources, targets)?;
        let carrier = |vs: &[&str]| -> Vec<Attribute> {
            vs.iter().flat_map(|v| self.object(v).expect("checked").carrier().to_vec()).collect()
        };
        let bad = |reason: String| Error::ArrowSignature { arrow: label.to_string(), reason };
        if !same_attrs(rel.sources(), &carrier(sources)) {
            return Err(bad(format!("relation sources {:?} do not match vertices {:?}", rel.source_names(), sources)));
        }
        if !same_attrs(rel.targets(), &carrier(targets)) {
            return Err(bad(format!("relation targets {:?} do not match vertices {:?}", rel.target_names(), targets)));
        }
        self.graph = g;
        self.relations.push(rel);
        Ok(())
    }

    pub fn set_sources(&mut self, sources: &[&str]) -> Result<()> {
        for s in sources {
            if !self.graph.has_vertex(s) {
                return Err(Error::UnknownVertex(s.to_string()));
            }
        }
        self.sources = Some(sources.iter().map(|s| s.to_string()).collect());
        Ok(())
    }

    /// Declared sources □D, if any.
    pub fn sources(&self) -> Option<&[String]> {
        self.sources.as_deref()
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn flavor(&self) -> &Flavor<L> {
        &self.flavor
    }

    pub fn lattice(&self) -> &L {
        self.flavor.lattice()
    }

    pub fn object(&self, vertex: &str) -> Option<&OmegaObject<L>> {
        self.graph.vertices().iter().position(|v| v == vertex).map(|i| &self.objects[i])
    }

    pub fn relation(&self, arrow: &str) -> Option<&Relation<L>> {
        self.graph.arrows().iter().position(|a| a.label == arrow).map(|i| &self.relations[i])
    }

    /// Replaces the relation on an arrow (same signature).
    pub fn with_relation(&self, arrow: &str, rel: Relation<L>) -> Result<Self> {
        let i = self
            .graph
            .arrows()
            .iter()
            .position(|a| a.label == arrow)
            .ok_or_else(|| Error::ArrowSignature { arrow: arrow.to_string(), reason: "no such arrow".into() })?;
        if !same_attrs(rel.sources(), self.relations[i].sources()) || !same_attrs(rel.targets(), self.relations[i].targets()) {
            return Err(Error::ArrowSignature { arrow: arrow.to_string(), reason: "signature changed".into() });
        }
        let mut d = self.clone();
        d.relations[i] = rel;
        Ok(d)
    }

    /// Same diagram with its arrows listed in another order.
    pub fn with_arrow_order(&self, order: &[usize]) -> Result<Self> {
        let n = self.relations.len();
        let mut seen = vec![false; n];
        for &i in order {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidParameter("arrow order is not a permutation".into()));
            }
        }
        if order.len() != n {
            return Err(Error::InvalidParameter("arrow order is not a permutation".into()));
        }
        let mut d = self.clone();
        d.graph.arrows = order.iter().map(|&i| self.graph.arrows[i].clone()).collect();
        d.relations = order.iter().map(|&i| self.relations[i].clone()).collect();
        Ok(d)
    }

    /// Carriers of the given vertices, concatenated.
    pub fn carrier_of(&self, vertices: &[&str]) -> Result<Vec<Attribute>> {
        let mut out = Vec::new();
        for v in vertices {
            out.extend_from_slice(self.object(v).ok_or_else(|| Error::UnknownVertex(v.to_string()))?.carrier());
        }
        Ok(out)
    }

    /// All vertex attributes in vertex order.
    pub fn attributes(&self) -> Vec<Attribute> {
        self.objects.iter().flat_map(|o| o.carrier().iter().cloned()).collect()
    }

    /// Product similarity Π α_i of the given vertices.
    pub fn product_similarity(&self, vertices: &[&str]) -> Result<Similarity<L>> {
        let mut sim = Similarity::identity(self.lattice().clone(), Vec::new());
        for v in vertices {
            let o = self.object(v).ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
            sim = sim.product(o.sim())?;
        }
        Ok(sim)
    }

    /// lim D: the flavor-product of every arrow's tabulation and of the distributions
    /// of isolated vertices, all canonically extended to the product of the carriers.
    ///
    /// Evaluated as a sparse natural join: ⊥ absorbs flavor-times, so only tuples
    /// supported by every factor can be non-⊥.
    pub fn vague_limit(&self) -> Result<Relation<L>> {
        let fl = &self.flavor;
        let mut factors: Vec<Relation<L>> = self.relations.iter().map(arrow_factor).collect::<Result<_>>()?;
        for v in self.graph.isolated() {
            factors.push(self.object(&v).expect("vertex").dist().clone());
        }
        let attrs = self.attributes();
        let order: Vec<&str> = attrs.iter().map(|a| a.name.as_str()).collect();
        if factors.is_empty() {
            return Relation::scalar(self.lattice().clone(), fl.top()).aligned(&[], &order);
        }
        let start = (0..factors.len()).min_by_key(|&i| factors[i].len()).expect("non-empty");
        let mut acc = factors.swap_remove(start);
        while !factors.is_empty() {
            let names: HashSet<&str> = acc.target_names().into_iter().collect();
            let next = (0..factors.len())
                .max_by_key(|&i| {
                    let shared = factors[i].target_names().iter().filter(|n| names.contains(*n)).count();
                    (shared, std::cmp::Reverse(factors[i].len()))
                })
                .expect("non-empty");
            let f = factors.swap_remove(next);
            acc = acc.join(&f, fl)?;
        }
        acc.aligned(&[], &order)
    }

    /// Sums the non-source vertices out of the limit and reports the degrees.
    pub fn commutativity_degree(&self, sources: &[&str], eps: f64) -> Result<Commutativity<L>> {
        for s in sources {
            if !self.graph.has_vertex(s) {
                return Err(Error::UnknownVertex(s.to_string()));
            }
        }
        let lim = self.vague_limit()?;
        let drop: Vec<String> = self
            .graph
            .vertices()
            .iter()
            .filter(|v| !sources.contains(&v.as_str()))
            .flat_map(|v| self.object(v).expect("vertex").carrier().iter().map(|a| a.name.clone()))
            .collect();
        let drop: Vec<&str> = drop.iter().map(String::as_str).collect();
        let degrees = lim.sum_out(&drop, &self.flavor)?;
        let l = self.lattice();
        let mut infimum = l.top();
        let attrs = degrees.targets().to_vec();
        for_each_tuple(&attrs, |t| infimum = l.meet(infimum, degrees.get(t)));
        let commutative = l.is_top(infimum, eps);
        Ok(Commutativity { degrees, infimum, commutative })
    }

    /// lim D compared with the image of a cone under the product similarity.
    pub fn lambda_limit(&self, cone: &Cone, lambda: L::Value, eps: f64) -> Result<(bool, L::Value)> {
        let lim = self.vague_limit()?;
        let cd = cone.distribution(self)?;
        let vs: Vec<&str> = self.graph.vertices().iter().map(String::as_str).collect();
        let sim = self.product_similarity(&vs)?;
        let degree = lambda_similar(&lim, &cd, &sim, &self.flavor)?;
        Ok((self.lattice().approx_leq(lambda, degree, eps), degree))
    }
}

/// The tabulated arrow with repeated vertex attributes identified (loops keep
/// only entries whose source and target copies agree).
fn arrow_factor<L: Lattice>(rel: &Relation<L>) -> Result<Relation<L>> {
    let all = rel.attributes();
    let mut attrs: Vec<Attribute> = Vec::new();
    let mut slot = Vec::with_capacity(all.len());
    for a in &all {
        match attrs.iter().position(|b| b.name == a.name) {
            Some(p) => slot.push(p),
            None => {
                slot.push(attrs.len());
                attrs.push((*a).clone());
            }
        }
    }
    let mut out = Relation::distribution(rel.lattice().clone(), attrs.clone())?;
    'entries: for (t, v) in rel.entries() {
        let mut u: Vec<Option<u32>> = vec![None; attrs.len()];
        for (i, &p) in slot.iter().enumerate() {
            match u[p] {
                Some(x) if x != t[i] => continue 'entries,
                _ => u[p] = Some(t[i]),
            }
        }
        out.set(u.into_iter().map(|x| x.expect("filled")).collect(), v)?;
    }
    Ok(out)
}

/// Source-indexed commutativity degrees π_J∘lim D and the resulting verdicts.
#[derive(Debug, Clone)]
pub struct Commutativity<L: Lattice> {
    /// Degree per tuple of the source carriers (a scalar when J = ∅).
    pub degrees: Relation<L>,
    /// Meet of the degrees over every source tuple (absent tuples count as ⊥).
    pub infimum: L::Value,
    pub commutative: bool,
}

impl<L: Lattice> Commutativity<L> {
    pub fn is_lambda_commutative(&self, lambda: L::Value, eps: f64) -> bool {
        self.degrees.lattice().approx_leq(lambda, self.infimum, eps)
    }
}

/// A finite apex with one total, single-valued leg per diagram vertex.
#[derive(Debug, Clone, Default)]
pub struct Cone {
    apex: usize,
    legs: BTreeMap<String, Vec<Tuple>>,
}

impl Cone {
    pub fn new(apex: usize) -> Self {
        Cone { apex, legs: BTreeMap::new() }
    }

    /// `images[r]` is the carrier tuple that apex element `r` maps to.
    pub fn with_leg(mut self, vertex: &str, images: Vec<Tuple>) -> Self {
        self.legs.insert(vertex.to_string(), images);
        self
    }

    /// The one-point cone picking a tuple per vertex.
    pub fn point(images: &[(&str, Tuple)]) -> Self {
        images
            .iter()
            .fold(Cone::new(1), |c, (v, t)| c.with_leg(v, vec![t.clone()]))
    }

    pub fn apex(&self) -> usize {
        self.apex
    }

    /// F_⊤(R, (f_i)): the image of the ⊤ distribution on R under the tupling of the legs.
    pub fn distribution<L: Lattice>(&self, d: &MultiDiagram<L>) -> Result<Relation<L>> {
        let fl = d.flavor();
        let mut out = Relation::distribution(d.lattice().clone(), d.attributes())?;
        let mut columns: Vec<&Vec<Tuple>> = Vec::new();
        for v in d.graph().vertices() {
            let leg = self.legs.get(v).ok_or_else(|| Error::LegMissing(v.clone()))?;
            let invalid = |reason: String| Error::InvalidLeg { vertex: v.clone(), reason };
            if leg.len() != self.apex {
                return Err(invalid(format!("{} images for an apex of size {}", leg.len(), self.apex)));
            }
            let carrier = d.object(v).expect("vertex").carrier();
            for img in leg {
                if img.len() != carrier.len() || img.iter().zip(carrier).any(|(&i, a)| i as usize >= a.domain.len()) {
                    return Err(invalid(format!("image {img:?} is outside the carrier")));
                }
            }
            columns.push(leg);
        }
        for r in 0..self.apex {
            let t: Tuple = columns.iter().flat_map(|c| c[r].iter().copied()).collect();
            let w = fl.plus(out.get(&t), fl.top());
            out.set(t, w)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{PlusOp, StdLattice, TimesOp};
    use crate::relation::Domain;

    fn attr(name: &str, n: usize) -> Attribute {
        Attribute::new(name, Domain::range(n).unwrap())
    }

    fn product() -> Flavor<StdLattice> {
        Flavor::new(StdLattice::Product, TimesOp::Tensor, PlusOp::Join).unwrap()
    }

    fn crisp(v: &str, n: usize) -> OmegaObject<StdLattice> {
        OmegaObject::crisp(StdLattice::Product, vec![attr(v, n)]).unwrap()
    }

    #[test]
    fn glue_identity_and_chain() {
        let mut g = MultiGraph::new();
        g.add_vertex("X").unwrap();
        g.add_vertex("Y").unwrap();
        g.add_arrow("f", &["X"], &["Y"]).unwrap();
        assert_eq!(glue(&g, &MultiGraph::new()), g);
        let mut h = MultiGraph::new();
        h.add_vertex("Y").unwrap();
        h.add_vertex("Z").unwrap();
        h.add_arrow("g", &["Y"], &["Z"]).unwrap();
        let c = glue(&g, &h);
        assert_eq!(c.vertices(), ["X", "Y", "Z"]);
        assert_eq!(c.inputs(), vec!["X"]);
        assert_eq!(c.outputs(), vec!["Z"]);
    }

    #[test]
    fn glue_disjoint_renames_clashes() {
        let mut g = MultiGraph::new();
        g.add_vertex("X").unwrap();
        g.add_vertex("Y").unwrap();
        g.add_arrow("f", &["X"], &["Y"]).unwrap();
        let c = glue(&g, &g);
        // Y is an output of g but not an input of g, so nothing is glued
        assert_eq!(c.vertices(), ["X", "Y", "X#2", "Y#2"]);
        assert_eq!(c.arrows()[1].label, "f#2");
        assert_eq!(c.inputs(), vec!["X", "X#2"]);
    }

    #[test]
    fn discrete_limit_is_the_product() {
        let fl = product();
        let l = StdLattice::Product;
        let mut x = Relation::distribution(l, vec![attr("A", 2)]).unwrap();
        x.set(vec![0], 0.5).unwrap();
        x.set(vec![1], 0.25).unwrap();
        let mut y = Relation::distribution(l, vec![attr("B", 2)]).unwrap();
        y.set(vec![1], 0.5).unwrap();
        let mut d = MultiDiagram::new(fl);
        d.add_vertex("A", OmegaObject::new(x.clone(), Similarity::identity(l, vec![attr("A", 2)])).unwrap()).unwrap();
        d.add_vertex("B", OmegaObject::new(y.clone(), Similarity::identity(l, vec![attr("B", 2)])).unwrap()).unwrap();
        let lim = d.vague_limit().unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(lim.get(&[a, b]), x.get(&[a]) * y.get(&[b]));
            }
        }
    }

    #[test]
    fn equalizer_limit() {
        let fl = product();
        let l = StdLattice::Product;
        let f = Relation::from_fn(l, vec![attr("A", 2)], vec![attr("B", 2)], |t| 0.5 + 0.1 * t[0] as f64 + 0.2 * t[1] as f64).unwrap();
        let g = Relation::from_fn(l, vec![attr("A", 2)], vec![attr("B", 2)], |t| 0.9 - 0.3 * t[1] as f64).unwrap();
        let mut d = MultiDiagram::new(fl);
        d.add_vertex("A", crisp("A", 2)).unwrap();
        d.add_vertex("B", crisp("B", 2)).unwrap();
        d.add_arrow("f", &["A"], &["B"], f.clone()).unwrap();
        d.add_arrow("g", &["A"], &["B"], g.clone()).unwrap();
        let lim = d.vague_limit().unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert!((lim.get(&[a, b]) - f.get(&[a, b]) * g.get(&[a, b])).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn arrow_signature_checked() {
        let mut d = MultiDiagram::new(product());
        d.add_vertex("A", crisp("A", 2)).unwrap();
        d.add_vertex("B", crisp("B", 2)).unwrap();
        let r = Relation::new(StdLattice::Product, vec![attr("A", 2)], vec![attr("C", 2)]).unwrap();
        assert!(matches!(d.add_arrow("f", &["A"], &["B"], r.clone()), Err(Error::ArrowSignature { .. })));
        assert!(matches!(d.add_arrow("f", &["A"], &["Q"], r), Err(Error::UnknownVertex(_))));
        let other = OmegaObject::crisp(StdLattice::Goedel, vec![attr("C", 2)]).unwrap();
        assert!(matches!(d.add_vertex("C", other), Err(Error::InconsistentLattice(_))));
        assert!(matches!(d.commutativity_degree(&["Z"], 1e-9), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn loop_arrow_keeps_fixed_points() {
        let fl = Flavor::new(StdLattice::Boolean, TimesOp::Meet, PlusOp::Join).unwrap();
        let l = StdLattice::Boolean;
        let mut d = MultiDiagram::new(fl);
        d.add_vertex("A", OmegaObject::crisp(l, vec![attr("A", 3)]).unwrap()).unwrap();
        // f(a) = min(a+1, 2): fixed point 2 only
        let f = Relation::from_fn(l, vec![attr("A", 3)], vec![attr("A", 3)], |t| if t[1] == (t[0] + 1).min(2) { 1.0 } else { 0.0 }).unwrap();
        d.add_arrow("f", &["A"], &["A"], f).unwrap();
        let lim = d.vague_limit().unwrap();
        assert_eq!(lim.len(), 1);
        assert_eq!(lim.get(&[2]), 1.0);
    }

    #[test]
    fn cones() {
        let fl = product();
        let mut d = MultiDiagram::new(fl.clone());
        d.add_vertex("A", crisp("A", 3)).unwrap();
        let single = Cone::point(&[("A", vec![1])]).distribution(&d).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single.get(&[1]), 1.0);
        let all = Cone::new(3).with_leg("A", vec![vec![0], vec![1], vec![2]]).distribution(&d).unwrap();
        assert_eq!(all.len(), 3);
        let twice = Cone::new(2).with_leg("A", vec![vec![1], vec![1]]).distribution(&d).unwrap();
        assert!(twice.approx_eq(&single, 0.0).unwrap());
        assert!(matches!(Cone::new(1).distribution(&d), Err(Error::LegMissing(_))));
        assert!(matches!(
            Cone::new(2).with_leg("A", vec![vec![0]]).distribution(&d),
            Err(Error::InvalidLeg { .. })
        ));
        // the limit of a one-vertex diagram is its ⊤ distribution
        let (ok, deg) = d.lambda_limit(&Cone::point(&[("A", vec![2])]), 1.0, 1e-12).unwrap();
        assert!(ok);
        assert_eq!(deg, 1.0);
    }

    #[test]
    fn empty_diagram_limit_is_top() {
        let d = MultiDiagram::new(product());
        let lim = d.vague_limit().unwrap();
        assert!(lim.is_scalar());
        assert_eq!(lim.scalar_value(), 1.0);
        let c = d.commutativity_degree(&[], 1e-9).unwrap();
        assert!(c.commutative);
    }
}
