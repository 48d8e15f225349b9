//! Vague colimits: diagram aggregation, the block relation c = f + f°, its
//! similarity closure, and the classical Set colimit as an oracle.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;

use crate::diagram::MultiDiagram;
use crate::error::{Error, Result};
use crate::lattice::{Flavor, Lattice};
use crate::relation::{for_each_tuple, Attribute, Domain, Relation, Tuple};

/// A vertex family B_J of the aggregated diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    /// Vertices in diagram order.
    pub vertices: Vec<String>,
    pub attrs: Vec<Attribute>,
}

impl Block {
    pub fn label(&self) -> String {
        self.vertices.join("*")
    }

    fn names(&self) -> Vec<&str> {
        self.attrs.iter().map(|a| a.name.as_str()).collect()
    }
}

/// D_[]: one relation per ordered pair of blocks.
#[derive(Debug, Clone)]
pub struct AggregatedDiagram<L: Lattice> {
    pub blocks: Vec<Block>,
    /// (J, L) ↦ f_{J,L}, with sources aligned to block J and targets to block L.
    pub morphisms: BTreeMap<(usize, usize), Relation<L>>,
}

fn require_idempotent<L: Lattice>(flavor: &Flavor<L>) -> Result<()> {
    if !flavor.plus_idempotent() {
        return Err(Error::NonIdempotentPlus(flavor.describe()));
    }
    Ok(())
}

/// Sums parallel arrows and puts the product similarity on each diagonal block.
pub fn aggregate<L: Lattice>(d: &MultiDiagram<L>) -> Result<AggregatedDiagram<L>> {
    let fl = d.flavor();
    require_idempotent(fl)?;
    let order = d.graph().vertices();
    let family = |vs: &[String]| -> Vec<String> { order.iter().filter(|v| vs.contains(v)).cloned().collect() };

    let mut blocks: Vec<Block> = Vec::new();
    let block_of = |vs: Vec<String>, blocks: &mut Vec<Block>| -> Result<usize> {
        if let Some(i) = blocks.iter().position(|b| b.vertices == vs) {
            return Ok(i);
        }
        let names: Vec<&str> = vs.iter().map(String::as_str).collect();
        blocks.push(Block { attrs: d.carrier_of(&names)?, vertices: vs });
        Ok(blocks.len() - 1)
    };
    for v in order {
        block_of(vec![v.clone()], &mut blocks)?;
    }
    let mut arrow_blocks = Vec::new();
    for a in d.graph().arrows() {
        let j = block_of(family(&a.sources), &mut blocks)?;
        let l = block_of(family(&a.targets), &mut blocks)?;
        arrow_blocks.push((j, l));
    }

    let mut morphisms: BTreeMap<(usize, usize), Relation<L>> = BTreeMap::new();
    for (i, b) in blocks.iter().enumerate() {
        let names: Vec<&str> = b.vertices.iter().map(String::as_str).collect();
        let sim = d.product_similarity(&names)?.to_relation(fl)?;
        morphisms.insert((i, i), sim.aligned(&b.names(), &b.names())?);
    }
    for (a, &(j, l)) in d.graph().arrows().iter().zip(&arrow_blocks) {
        let rel = d
            .relation(&a.label)
            .expect("arrow")
            .aligned(&blocks[j].names(), &blocks[l].names())?;
        let m = match morphisms.remove(&(j, l)) {
            Some(old) => old.add(&rel, fl)?,
            None => rel,
        };
        morphisms.insert((j, l), m);
    }
    Ok(AggregatedDiagram { blocks, morphisms })
}

/// A composable pair whose composite exceeds the aggregated bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PreconditionViolation {
    pub first: (String, String),
    pub second: (String, String),
    pub detail: String,
}

/// The block relation c on ⨿B, carried by the single attribute `colim`.
#[derive(Debug, Clone)]
pub struct ColimitObject<L: Lattice> {
    pub blocks: Vec<Block>,
    /// Carrier element k is (block index, tuple of that block).
    pub elements: Vec<(usize, Tuple)>,
    pub relation: Relation<L>,
    pub violations: Vec<PreconditionViolation>,
}

impl<L: Lattice> ColimitObject<L> {
    pub fn precondition_holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// Block label and tuple labels of carrier element `k`.
    pub fn element_labels(&self, k: u32) -> (String, Vec<String>) {
        let (b, t) = &self.elements[k as usize];
        let blk = &self.blocks[*b];
        let labels = blk.attrs.iter().zip(t).map(|(a, &i)| a.domain.label(i).to_string()).collect();
        (blk.label(), labels)
    }

    /// Rows (block_1, tuple_1, block_2, tuple_2, value) of a relation on the carrier.
    pub fn rows(&self, rel: &Relation<L>) -> Vec<[String; 5]> {
        rel.entries()
            .map(|(t, v)| {
                let (b1, t1) = self.element_labels(t[0]);
                let (b2, t2) = self.element_labels(t[1]);
                [b1, t1.join(","), b2, t2.join(","), rel.lattice().format_value(v)]
            })
            .collect()
    }
}

/// colim D with c_{J,L} = f_{J,L} + f°_{L,J}; composite-bound violations are reported, not fatal.
pub fn vague_colimit<L: Lattice>(d: &MultiDiagram<L>) -> Result<ColimitObject<L>> {
    let agg = aggregate(d)?;
    let fl = d.flavor();
    let mut elements = Vec::new();
    let mut offset = Vec::new();
    for (i, b) in agg.blocks.iter().enumerate() {
        offset.push(elements.len());
        for_each_tuple(&b.attrs, |t| elements.push((i, t.to_vec())));
    }
    let labels: Vec<String> = elements
        .iter()
        .map(|(b, t)| {
            let blk = &agg.blocks[*b];
            let vals: Vec<&str> = blk.attrs.iter().zip(t).map(|(a, &i)| a.domain.label(i)).collect();
            format!("{}:{}", blk.label(), vals.join(","))
        })
        .collect();
    let carrier = Attribute::new("colim", Domain::new(labels)?);
    let mut c = Relation::new(d.lattice().clone(), vec![carrier.clone()], vec![carrier])?;

    let flat = |b: usize, t: &[u32]| -> u32 {
        let attrs = &agg.blocks[b].attrs;
        let mut k = 0usize;
        for (a, &i) in attrs.iter().zip(t) {
            k = k * a.domain.len() + i as usize;
        }
        (offset[b] + k) as u32
    };
    for (&(j, l), m) in &agg.morphisms {
        let nj = agg.blocks[j].attrs.len();
        for (t, v) in m.entries() {
            let s = flat(j, &t[..nj]);
            let u = flat(l, &t[nj..]);
            for key in [vec![s, u], vec![u, s]] {
                let w = fl.plus(c.get(&key), v);
                c.set(key, w)?;
            }
        }
    }

    let violations = check_composites(&agg, fl)?;
    Ok(ColimitObject { blocks: agg.blocks, elements, relation: c, violations })
}

/// For aggregated f: J→L and g: J'→L' with J' ⊆ L, the composite must stay below the
/// aggregated morphism from J to L' ∪ (L∖J').
fn check_composites<L: Lattice>(agg: &AggregatedDiagram<L>, fl: &Flavor<L>) -> Result<Vec<PreconditionViolation>> {
    let eps = crate::lattice::default_eps();
    let mut out = Vec::new();
    let set = |b: usize| -> BTreeSet<&String> { agg.blocks[b].vertices.iter().collect() };
    for (&(j, l), f) in &agg.morphisms {
        for (&(j2, l2), g) in &agg.morphisms {
            if !set(j2).is_subset(&set(l)) {
                continue;
            }
            let Ok(comp) = f.compose(g, fl) else { continue };
            let want: BTreeSet<&String> = set(l2).union(&(&set(l) - &set(j2))).copied().collect();
            let target = agg.blocks.iter().position(|b| b.vertices.iter().collect::<BTreeSet<_>>() == want);
            let bound = target.and_then(|t| agg.morphisms.get(&(j, t)));
            let detail = match bound {
                Some(b) => match comp
                    .aligned(&b.source_names(), &b.target_names())
                    .and_then(|c| c.leq_witness(b, eps).map(|w| w.map(|w| (c, w))))
                {
                    Ok(Some((c, (t, x, y)))) => Some(format!(
                        "composite {} exceeds bound {} at ({})",
                        c.lattice().format_value(x),
                        c.lattice().format_value(y),
                        c.tuple_labels(&t).join(",")
                    )),
                    Ok(None) => None,
                    Err(_) => None,
                },
                None => comp.entries().next().map(|(t, v)| {
                    format!(
                        "composite is {} at ({}) but there is no aggregated morphism to bound it",
                        comp.lattice().format_value(v),
                        comp.tuple_labels(t).join(",")
                    )
                }),
            };
            if let Some(detail) = detail {
                out.push(PreconditionViolation {
                    first: (agg.blocks[j].label(), agg.blocks[l].label()),
                    second: (agg.blocks[j2].label(), agg.blocks[l2].label()),
                    detail,
                });
            }
        }
    }
    Ok(out)
}

/// Least transitive relation above a reflexive, symmetric c (semiring Floyd–Warshall).
pub fn similarity_closure<L: Lattice>(c: &Relation<L>, flavor: &Flavor<L>) -> Result<Relation<L>> {
    require_idempotent(flavor)?;
    let eps = crate::lattice::default_eps();
    let src: Vec<String> = c.source_names().iter().map(|s| s.to_string()).collect();
    let src: Vec<&str> = src.iter().map(String::as_str).collect();
    let c = c
        .aligned(&src, &src)
        .map_err(|_| Error::NotEndoRelation(format!("{:?} -> {:?}", c.source_names(), c.target_names())))?;
    let l = c.lattice().clone();
    let attrs = c.sources().to_vec();
    let mut tuples = Vec::new();
    for_each_tuple(&attrs, |t| tuples.push(t.to_vec()));
    let n = tuples.len();
    let key = |i: usize, j: usize| -> Tuple {
        let mut k = tuples[i].clone();
        k.extend_from_slice(&tuples[j]);
        k
    };
    let mut m = vec![l.bottom(); n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = c.get(&key(i, j));
        }
    }
    for i in 0..n {
        if !l.is_top(m[i * n + i], eps) {
            return Err(Error::NotReflexive(c.tuple_labels(&key(i, i)).join(",")));
        }
        for j in 0..i {
            if !l.approx_eq(m[i * n + j], m[j * n + i], eps) {
                return Err(Error::NotSymmetric(c.tuple_labels(&key(i, j)).join(",")));
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            let ik = m[i * n + k];
            if l.is_bottom(ik) {
                continue;
            }
            for j in 0..n {
                let v = flavor.plus(m[i * n + j], flavor.times(ik, m[k * n + j]));
                m[i * n + j] = v;
            }
        }
    }
    let mut out = Relation::new(l, c.sources().to_vec(), c.targets().to_vec())?;
    for i in 0..n {
        for j in 0..n {
            out.set(key(i, j), m[i * n + j])?;
        }
    }
    Ok(out)
}

/// Element sets of a partition, each element as (block or vertex label, tuple labels).
pub type Partition = BTreeSet<BTreeSet<(String, String)>>;

/// Classes of the ⊤-part of a closed colimit relation.
pub fn top_classes<L: Lattice>(obj: &ColimitObject<L>, closed: &Relation<L>) -> Partition {
    let eps = crate::lattice::default_eps();
    let l = closed.lattice();
    let n = obj.elements.len() as u32;
    let mut seen = vec![false; n as usize];
    let mut out = Partition::new();
    for i in 0..n {
        if seen[i as usize] {
            continue;
        }
        let mut class = BTreeSet::new();
        for j in 0..n {
            if i == j || l.is_top(closed.get(&[i, j]), eps) {
                seen[j as usize] = true;
                let (b, t) = obj.element_labels(j);
                class.insert((b, t.join(",")));
            }
        }
        out.insert(class);
    }
    out
}

/// The classical colimit of a diagram of crisp single-vertex maps: the quotient of
/// ⨿A_i by the smallest equivalence identifying a with f(a) for every arrow f.
pub fn set_colimit_oracle<L: Lattice>(d: &MultiDiagram<L>) -> Result<Partition> {
    let l = d.lattice();
    let eps = crate::lattice::default_eps();
    let mut offset = BTreeMap::new();
    let mut elements: Vec<(String, String)> = Vec::new();
    for v in d.graph().vertices() {
        let carrier = d.object(v).expect("vertex").carrier();
        offset.insert(v.clone(), elements.len());
        for_each_tuple(carrier, |t| {
            let labels: Vec<&str> = carrier.iter().zip(t).map(|(a, &i)| a.domain.label(i)).collect();
            elements.push((v.clone(), labels.join(",")));
        });
    }
    let mut uf = UnionFind::<usize>::new(elements.len());
    for a in d.graph().arrows() {
        let bad = |reason: String| Error::NonCrispArrow { arrow: a.label.clone(), reason };
        if a.sources.len() != 1 || a.targets.len() != 1 {
            return Err(bad("needs exactly one source and one target vertex".into()));
        }
        let rel = d.relation(&a.label).expect("arrow");
        let ns = rel.sources().len();
        let mut image: BTreeMap<Tuple, Tuple> = BTreeMap::new();
        for (t, v) in rel.entries() {
            if !l.is_top(v, eps) {
                return Err(bad(format!("weight {} is neither ⊥ nor ⊤", l.format_value(v))));
            }
            if image.insert(t[..ns].to_vec(), t[ns..].to_vec()).is_some() {
                return Err(bad(format!("({}) has several images", rel.tuple_labels(t)[..ns].join(","))));
            }
        }
        let flat = |attrs: &[Attribute], t: &[u32]| attrs.iter().zip(t).fold(0usize, |k, (a, &i)| k * a.domain.len() + i as usize);
        let mut missing = None;
        for_each_tuple(rel.sources(), |t| {
            match image.get(t) {
                Some(u) => {
                    uf.union(
                        offset[&a.sources[0]] + flat(rel.sources(), t),
                        offset[&a.targets[0]] + flat(rel.targets(), u),
                    );
                }
                None => missing = Some(t.to_vec()),
            }
        });
        if let Some(t) = missing {
            return Err(bad(format!("no image for {t:?}")));
        }
    }
    let labels = uf.into_labeling();
    let mut classes: BTreeMap<usize, BTreeSet<(String, String)>> = BTreeMap::new();
    for (i, e) in elements.into_iter().enumerate() {
        classes.entry(labels[i]).or_default().insert(e);
    }
    Ok(classes.into_values().collect())
}
