//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use omegarel::diagram::MultiDiagram;
use omegarel::lattice::{Flavor, Lattice, PlusOp, StdLattice, TimesOp};
use omegarel::omega::OmegaObject;
use omegarel::relation::{for_each_tuple, Attribute, Domain, Relation};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// Arrow shape: source and target vertex indices.
#[derive(Debug, Clone)]
pub struct Shape {
    pub sizes: Vec<usize>,
    pub arrows: Vec<(Vec<usize>, Vec<usize>)>,
}

pub fn vname(i: usize) -> String {
    format!("V{i}")
}

/// Up to `max_v` vertices with domains of size ≤ `max_dom` and up to `max_a`
/// arrows; `simple` restricts arrows to one source and one target vertex.
pub fn random_shape(rng: &mut ChaCha8Rng, max_v: usize, max_dom: usize, max_a: usize, simple: bool) -> Shape {
    let nv = rng.gen_range(1..=max_v);
    let sizes = (0..nv).map(|_| rng.gen_range(1..=max_dom)).collect();
    let na = rng.gen_range(0..=max_a);
    let mut arrows = Vec::new();
    for _ in 0..na {
        let pick = |rng: &mut ChaCha8Rng, k: usize| -> Vec<usize> {
            let mut v: Vec<usize> = (0..nv).collect();
            for i in (1..v.len()).rev() {
                v.swap(i, rng.gen_range(0..=i));
            }
            v.truncate(k);
            v
        };
        let (ns, nt) = if simple || nv == 1 { (1, 1) } else { (rng.gen_range(1..=nv.min(2)), 1) };
        arrows.push((pick(rng, ns), pick(rng, nt)));
    }
    Shape { sizes, arrows }
}

pub fn attrs(shape: &Shape) -> Vec<Attribute> {
    shape
        .sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| Attribute::new(vname(i), Domain::range(n).unwrap()))
        .collect()
}

/// A diagram on `shape` whose arrow relations come from `weight(arrow, tuple)`.
pub fn build<L: Lattice>(
    shape: &Shape,
    flavor: Flavor<L>,
    mut weight: impl FnMut(usize, &[u32]) -> L::Value,
) -> MultiDiagram<L> {
    let l = flavor.lattice().clone();
    let at = attrs(shape);
    let mut d = MultiDiagram::new(flavor);
    for (i, a) in at.iter().enumerate() {
        d.add_vertex(&vname(i), OmegaObject::crisp(l.clone(), vec![a.clone()]).unwrap()).unwrap();
    }
    for (k, (s, t)) in shape.arrows.iter().enumerate() {
        let src: Vec<Attribute> = s.iter().map(|&i| at[i].clone()).collect();
        let tgt: Vec<Attribute> = t.iter().map(|&i| at[i].clone()).collect();
        let mut rel = Relation::new(l.clone(), src.clone(), tgt.clone()).unwrap();
        let all: Vec<Attribute> = src.iter().chain(&tgt).cloned().collect();
        let mut entries = Vec::new();
        for_each_tuple(&all, |tu| entries.push((tu.to_vec(), weight(k, tu))));
        for (tu, v) in entries {
            rel.set(tu, v).unwrap();
        }
        let sn: Vec<String> = s.iter().map(|&i| vname(i)).collect();
        let tn: Vec<String> = t.iter().map(|&i| vname(i)).collect();
        let sr: Vec<&str> = sn.iter().map(String::as_str).collect();
        let tr: Vec<&str> = tn.iter().map(String::as_str).collect();
        d.add_arrow(&format!("a{k}"), &sr, &tr, rel).unwrap();
    }
    d
}

/// Random total functions on every arrow, as a crisp boolean diagram, plus the
/// function tables: `maps[k][source tuple index] = target value`.
pub fn random_crisp_maps(
    rng: &mut ChaCha8Rng,
    shape: &Shape,
) -> (MultiDiagram<StdLattice>, Vec<BTreeMap<Vec<u32>, u32>>) {
    let fl = Flavor::new(StdLattice::Boolean, TimesOp::Meet, PlusOp::Join).unwrap();
    let mut maps = Vec::new();
    for (s, t) in &shape.arrows {
        assert_eq!(t.len(), 1);
        let src: Vec<Attribute> = s.iter().map(|&i| attrs(shape)[i].clone()).collect();
        let mut m = BTreeMap::new();
        for_each_tuple(&src, |tu| {
            m.insert(tu.to_vec(), rng.gen_range(0..shape.sizes[t[0]]) as u32);
        });
        maps.push(m);
    }
    let d = build(shape, fl, |k, tu| {
        let ns = shape.arrows[k].0.len();
        if maps[k][&tu[..ns].to_vec()] == tu[ns] {
            1.0
        } else {
            0.0
        }
    });
    (d, maps)
}

/// The Set limit: tuples over all vertices on which every arrow function agrees.
pub fn set_limit(shape: &Shape, maps: &[BTreeMap<Vec<u32>, u32>]) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    for_each_tuple(&attrs(shape), |tu| {
        let ok = shape.arrows.iter().zip(maps).all(|((s, t), m)| {
            let key: Vec<u32> = s.iter().map(|&i| tu[i]).collect();
            m[&key] == tu[t[0]]
        });
        if ok {
            out.insert(tu.to_vec());
        }
    });
    out
}

/// Union-find free partition oracle: connected components of a ~ f(a).
pub fn set_colimit_classes(shape: &Shape, maps: &[BTreeMap<Vec<u32>, u32>]) -> BTreeSet<BTreeSet<(String, String)>> {
    let mut nodes: Vec<(usize, u32)> = Vec::new();
    for (v, &n) in shape.sizes.iter().enumerate() {
        for x in 0..n as u32 {
            nodes.push((v, x));
        }
    }
    let idx = |v: usize, x: u32| nodes.iter().position(|&p| p == (v, x)).unwrap();
    let mut adj = vec![Vec::new(); nodes.len()];
    for ((s, t), m) in shape.arrows.iter().zip(maps) {
        for (k, &y) in m {
            let (a, b) = (idx(s[0], k[0]), idx(t[0], y));
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut seen = vec![false; nodes.len()];
    let mut out = BTreeSet::new();
    for start in 0..nodes.len() {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut class = BTreeSet::new();
        seen[start] = true;
        while let Some(u) = stack.pop() {
            class.insert((vname(nodes[u].0), nodes[u].1.to_string()));
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        out.insert(class);
    }
    out
}

/// A dyadic value in [0,1] (exact under products and maxima).
pub fn dyadic(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.4) {
        0.0
    } else {
        rng.gen_range(0..=8) as f64 / 8.0
    }
}
