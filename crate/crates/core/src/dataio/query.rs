//! Queries as multi-graph homomorphisms Q: G₀ → G, answered by lim(D∘Q), and
//! λ-descriptions of data sets.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::diagram::{MultiDiagram, MultiGraph};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::omega::{lambda_similar, OmegaObject, SimFactor, Similarity};
use crate::relation::{Attribute, Relation};

use super::table::{read_distribution, read_similarity};

/// A homomorphism from a query graph G₀ into a diagram's graph.
#[derive(Debug, Clone)]
pub struct QueryMap {
    pub graph: MultiGraph,
    pub vertices: BTreeMap<String, String>,
    pub arrows: BTreeMap<String, String>,
}

impl QueryMap {
    pub fn identity(g: &MultiGraph) -> Self {
        QueryMap {
            graph: g.clone(),
            vertices: g.vertices().iter().map(|v| (v.clone(), v.clone())).collect(),
            arrows: g.arrows().iter().map(|a| (a.label.clone(), a.label.clone())).collect(),
        }
    }

    /// Query file: `vertex X = A` and `arrow q : X,Y -> Z = f` lines, `#` comments.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut q = QueryMap { graph: MultiGraph::new(), vertices: BTreeMap::new(), arrows: BTreeMap::new() };
        let list = |s: &str| -> Vec<String> {
            s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| Error::parse(path, i + 1, m);
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let (lhs, image) = rest.rsplit_once('=').ok_or_else(|| err("missing `= <image>`".into()))?;
            let image = image.trim().to_string();
            match key {
                "vertex" => {
                    let v = lhs.trim();
                    q.graph.add_vertex(v).map_err(|e| err(e.to_string()))?;
                    q.vertices.insert(v.to_string(), image);
                }
                "arrow" => {
                    let (name, sig) = lhs.split_once(':').ok_or_else(|| err("expected `arrow q : S -> T = f`".into()))?;
                    let (s, t) = sig.split_once("->").ok_or_else(|| err("arrow without `->`".into()))?;
                    let (s, t) = (list(s), list(t));
                    let s: Vec<&str> = s.iter().map(String::as_str).collect();
                    let t: Vec<&str> = t.iter().map(String::as_str).collect();
                    q.graph.add_arrow(name.trim(), &s, &t).map_err(|e| err(e.to_string()))?;
                    q.arrows.insert(name.trim().to_string(), image);
                }
                _ => return Err(err(format!("unknown directive `{key}`"))),
            }
        }
        Ok(q)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Structure preservation Q(□q) = □Q(q), Q(q□) = Q(q)□, with Q injective on
    /// each side of every arrow so pulled-back attributes stay distinct.
    pub fn validate(&self, g: &MultiGraph) -> Result<()> {
        for (v, w) in &self.vertices {
            if !g.has_vertex(w) {
                return Err(Error::UnknownVertex(format!("{w} (image of {v})")));
            }
        }
        for a in self.graph.arrows() {
            let bad = |reason: String| Error::NotAHomomorphism { arrow: a.label.clone(), reason };
            let image = &self.arrows[&a.label];
            let b = g.arrow(image).ok_or_else(|| bad(format!("no arrow `{image}` in the diagram")))?;
            for (side, ours, theirs) in [("sources", &a.sources, &b.sources), ("targets", &a.targets, &b.targets)] {
                let mapped: Vec<&String> = ours.iter().map(|v| &self.vertices[v]).collect();
                let set: BTreeSet<&String> = mapped.iter().copied().collect();
                if set.len() != mapped.len() {
                    return Err(bad(format!("{side} {ours:?} are not mapped injectively")));
                }
                if set != theirs.iter().collect() {
                    return Err(bad(format!("{side} map to {mapped:?}, but `{image}` has {theirs:?}")));
                }
            }
        }
        Ok(())
    }
}

/// Name of `attr` (an attribute of Q(v)) in the pulled-back diagram: the query
/// vertex name for one-attribute carriers, `v.attr` otherwise.
fn pulled_name<L: Lattice>(obj: &OmegaObject<L>, v: &str, attr: &str) -> String {
    if obj.carrier().len() == 1 {
        v.to_string()
    } else {
        format!("{v}.{attr}")
    }
}

fn pull_object<L: Lattice>(obj: &OmegaObject<L>, v: &str) -> Result<OmegaObject<L>> {
    let map: Vec<(String, String)> =
        obj.carrier().iter().map(|a| (a.name.clone(), pulled_name(obj, v, &a.name))).collect();
    let map: Vec<(&str, &str)> = map.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    obj.renamed(&map)
}

/// lim(D∘Q): vertex objects and arrow relations pulled back along Q unchanged.
pub fn answer_query<L: Lattice>(d: &MultiDiagram<L>, q: &QueryMap) -> Result<Relation<L>> {
    pull_back(d, q)?.vague_limit()
}

/// The composite diagram D∘Q over G₀.
pub fn pull_back<L: Lattice>(d: &MultiDiagram<L>, q: &QueryMap) -> Result<MultiDiagram<L>> {
    q.validate(d.graph())?;
    let mut objects = BTreeMap::new();
    for v in q.graph.vertices() {
        let obj = d.object(&q.vertices[v]).expect("validated");
        objects.insert(v.clone(), pull_object(obj, v)?);
    }
    let mut relations = BTreeMap::new();
    for a in q.graph.arrows() {
        let rel = d.relation(&q.arrows[&a.label]).expect("validated");
        let rename_side = |attrs: &[Attribute], ends: &[String]| -> Vec<Attribute> {
            attrs
                .iter()
                .map(|at| {
                    let v = ends
                        .iter()
                        .find(|v| d.object(&q.vertices[*v]).expect("validated").carrier().iter().any(|c| c.name == at.name))
                        .expect("structure preserved");
                    at.renamed(pulled_name(d.object(&q.vertices[v]).expect("validated"), v, &at.name))
                })
                .collect()
        };
        let mut out =
            Relation::new(rel.lattice().clone(), rename_side(rel.sources(), &a.sources), rename_side(rel.targets(), &a.targets))?;
        for (t, w) in rel.entries() {
            out.set(t.clone(), w)?;
        }
        relations.insert(a.label.clone(), out);
    }
    MultiDiagram::from_parts(d.flavor().clone(), &q.graph, objects, relations)
}

/// A (weighted) table s̄ with an optional similarity β on its columns.
#[derive(Debug, Clone)]
pub struct Dataset<L: Lattice> {
    pub dist: Relation<L>,
    pub sim: Option<Similarity<L>>,
}

impl<L: Lattice> Dataset<L> {
    /// Reads the table with the given column attributes and an optional
    /// similarity file (columns `c_1, c_2` per data column).
    pub fn load(path: &Path, lattice: &L, attrs: &[Attribute], sim: Option<&Path>) -> Result<Self> {
        let dist = read_distribution(path, lattice, attrs)?;
        let sim = sim.map(|p| read_similarity(p, lattice, attrs)).transpose()?;
        Ok(Dataset { dist, sim })
    }

    pub fn similarity(&self) -> Similarity<L> {
        self.sim
            .clone()
            .unwrap_or_else(|| Similarity::identity(self.dist.lattice().clone(), self.dist.targets().to_vec()))
    }
}

/// Checks that `map` (data column → diagram attribute) covers every column of
/// `data` exactly once and is injective.
pub fn check_column_map<L: Lattice>(
    data: &Relation<L>,
    attrs: &[Attribute],
    map: &[(String, String)],
) -> Result<()> {
    for c in data.target_names() {
        match map.iter().filter(|(k, _)| k == c).count() {
            1 => {}
            0 => return Err(Error::ColumnMismatch(format!("column `{c}` is not mapped"))),
            _ => return Err(Error::ColumnMismatch(format!("column `{c}` is mapped twice"))),
        }
    }
    for (i, (c, a)) in map.iter().enumerate() {
        let col = data
            .targets()
            .iter()
            .find(|x| x.name == *c)
            .ok_or_else(|| Error::ColumnMismatch(format!("no data column `{c}`")))?;
        let att = attrs.iter().find(|x| x.name == *a).ok_or_else(|| Error::UnknownAttribute(a.clone()))?;
        if col.domain != att.domain {
            return Err(Error::DomainMismatch(format!("{c} -> {a}")));
        }
        if map[..i].iter().any(|(_, b)| b == a) {
            return Err(Error::NotInjective(format!("two columns map to `{a}`")));
        }
    }
    Ok(())
}

/// i°∘lim D_e: the limit summed over attributes outside the image of `map`,
/// renamed to the data columns and ordered like `data`.
pub fn restrict_limit<L: Lattice>(
    d: &MultiDiagram<L>,
    data: &Relation<L>,
    map: &[(String, String)],
) -> Result<Relation<L>> {
    let attrs = d.attributes();
    check_column_map(data, &attrs, map)?;
    let lim = d.vague_limit()?;
    let drop: Vec<&str> = attrs
        .iter()
        .map(|a| a.name.as_str())
        .filter(|a| !map.iter().any(|(_, b)| b == a))
        .collect();
    let kept = lim.sum_out(&drop, d.flavor())?;
    // Two-step rename keeps swaps such as x->y, y->x well defined.
    let tmp: Vec<(String, String)> = map.iter().map(|(c, a)| (a.clone(), format!("\u{0}{c}"))).collect();
    let tmp_ref: Vec<(&str, &str)> = tmp.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let back: Vec<(String, String)> = map.iter().map(|(c, _)| (format!("\u{0}{c}"), c.clone())).collect();
    let back_ref: Vec<(&str, &str)> = back.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    kept.rename(&tmp_ref)?.rename(&back_ref)?.aligned(&[], &data.target_names())
}

/// [s̄ = i°∘lim D_e]_β and whether it reaches `lambda`.
pub fn lambda_description<L: Lattice>(
    d: &MultiDiagram<L>,
    data: &Dataset<L>,
    map: &[(String, String)],
    lambda: L::Value,
    eps: f64,
) -> Result<(bool, L::Value)> {
    let restricted = restrict_limit(d, &data.dist, map)?;
    let sim = data.similarity();
    if let Some(SimFactor::Explicit(r)) = sim.factors().first() {
        if r.lattice() != d.lattice() {
            return Err(Error::LatticeMismatch(r.lattice().name(), d.lattice().name()));
        }
    }
    let degree = lambda_similar(&data.dist, &restricted, &sim, d.flavor())?;
    Ok((d.lattice().approx_leq(lambda, degree, eps), degree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Flavor, StdLattice};
    use crate::relation::Domain;

    fn diagram() -> MultiDiagram<StdLattice> {
        let l = StdLattice::Product;
        let d2 = Domain::range(2).unwrap();
        let mut d = MultiDiagram::new(Flavor::standard(l));
        for v in ["A", "B"] {
            d.add_vertex(v, OmegaObject::crisp(l, vec![Attribute::new(v, d2.clone())]).unwrap()).unwrap();
        }
        let mut f = Relation::new(l, vec![Attribute::new("A", d2.clone())], vec![Attribute::new("B", d2.clone())]).unwrap();
        f.set(vec![0, 1], 0.5).unwrap();
        f.set(vec![1, 1], 0.8).unwrap();
        d.add_arrow("f", &["A"], &["B"], f).unwrap();
        d
    }

    #[test]
    fn identity_query_is_the_limit() {
        let d = diagram();
        let ans = answer_query(&d, &QueryMap::identity(d.graph())).unwrap();
        assert!(ans.approx_eq(&d.vague_limit().unwrap(), 0.0).unwrap());
    }

    #[test]
    fn doubled_arrow_squares_weights() {
        let d = diagram();
        let q = QueryMap::parse(
            "vertex X = A\nvertex Y = B\narrow p : X -> Y = f\narrow q : X -> Y = f\n",
            Path::new("q"),
        )
        .unwrap();
        let ans = answer_query(&d, &q).unwrap();
        assert_eq!(ans.target_names(), vec!["X", "Y"]);
        assert!((ans.get(&[0, 1]) - 0.25).abs() < 1e-15);
        assert!((ans.get(&[1, 1]) - 0.64).abs() < 1e-15);
    }

    #[test]
    fn non_homomorphisms_are_rejected() {
        let d = diagram();
        let q = QueryMap::parse("vertex X = B\nvertex Y = A\narrow p : X -> Y = f\n", Path::new("q")).unwrap();
        assert!(matches!(answer_query(&d, &q), Err(Error::NotAHomomorphism { ref arrow, .. }) if arrow == "p"));
        let q = QueryMap::parse("vertex X = A\narrow p : X -> X = f\n", Path::new("q")).unwrap();
        assert!(matches!(answer_query(&d, &q), Err(Error::NotAHomomorphism { .. })));
    }

    #[test]
    fn description_of_the_limit_itself() {
        let d = diagram();
        let lim = d.vague_limit().unwrap();
        let crisp = lim.map_values(|_| 1.0);
        let data = Dataset { dist: crisp.rename(&[("A", "a"), ("B", "b")]).unwrap(), sim: None };
        let map = vec![("a".to_string(), "A".to_string()), ("b".to_string(), "B".to_string())];
        let (ok, deg) = lambda_description(&d, &data, &map, 0.8, 1e-9).unwrap();
        assert!(ok);
        assert!((deg - 0.8).abs() < 1e-15);
        let bad = vec![("a".to_string(), "A".to_string()), ("b".to_string(), "A".to_string())];
        assert!(matches!(lambda_description(&d, &data, &bad, 0.8, 1e-9), Err(Error::NotInjective(_))));
        let short = vec![("a".to_string(), "A".to_string())];
        assert!(matches!(lambda_description(&d, &data, &short, 0.8, 1e-9), Err(Error::ColumnMismatch(_))));
        let empty = Dataset { dist: Relation::distribution(StdLattice::Product, data.dist.targets().to_vec()).unwrap(), sim: None };
        assert_eq!(lambda_description(&d, &empty, &map, 0.0, 1e-9).unwrap().1, 0.0);
    }
}
