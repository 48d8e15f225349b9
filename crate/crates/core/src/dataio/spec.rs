//! The line-oriented diagram spec format.
//!
//! ```text
//! lattice product                      # or: lattice table=<file>
//! flavor times=tensor plus=join
//! domain Bit = {0,1}
//! domain X = grid(-2,2,0.1)
//! vertex A : Bit [dist=<file>|top] [sim=<file>|identity]
//! arrow f : A,B -> C table=f.csv       # or builtin=gaussian-sum|equality
//! sources A
//! ```
//!
//! Paths are relative to the spec file.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::diagram::MultiDiagram;
use crate::error::{Error, Result};
use crate::lattice::{make_lattice, parse_flavor_ops, parse_real, Flavor, Lattice, StdLattice};
use crate::omega::{OmegaObject, Similarity};
use crate::relation::{for_each_tuple, Attribute, Domain, Relation};

use super::table::{read_distribution, read_relation, read_similarity};

#[derive(Debug, Clone, PartialEq)]
pub enum LatticeDecl {
    Std(StdLattice),
    Table(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistDecl {
    Top,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimDecl {
    Identity,
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct VertexDecl {
    pub name: String,
    pub domain: String,
    pub dist: DistDecl,
    pub sim: SimDecl,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArrowBody {
    Table(PathBuf),
    /// e^{−(w−x−y)²/2} for `x,y -> w`.
    GaussianSum,
    /// ⊤ exactly where all endpoint values coincide.
    Equality,
}

#[derive(Debug, Clone)]
pub struct ArrowDecl {
    pub name: String,
    pub sources: Vec<String>,
    pub targets: Vec<String>,
    pub body: ArrowBody,
    line: usize,
}

/// A parsed spec; tables are only read by [`DiagramSpec::build`].
#[derive(Debug, Clone)]
pub struct DiagramSpec {
    pub path: PathBuf,
    pub lattice: Option<LatticeDecl>,
    pub flavor: Option<String>,
    pub domains: Vec<(String, Arc<Domain>)>,
    pub vertices: Vec<VertexDecl>,
    pub arrows: Vec<ArrowDecl>,
    pub sources: Option<Vec<String>>,
}

fn names(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
}

fn parse_domain(rhs: &str) -> std::result::Result<Arc<Domain>, String> {
    if let Some(inner) = rhs.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
        return Domain::new(names(inner)).map_err(|e| e.to_string());
    }
    if let Some(inner) = rhs.strip_prefix("grid(").and_then(|r| r.strip_suffix(')')) {
        let p: Vec<f64> = names(inner)
            .iter()
            .map(|x| parse_real(x).ok_or_else(|| format!("`{x}` is not a number")))
            .collect::<std::result::Result<_, _>>()?;
        if p.len() != 3 {
            return Err("grid takes (lo,hi,step)".into());
        }
        return Domain::grid(p[0], p[1], p[2]).map_err(|e| e.to_string());
    }
    Err(format!("expected `{{v1,v2,...}}` or `grid(lo,hi,step)`, got `{rhs}`"))
}

impl DiagramSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Parses and checks every reference: domains, vertices and files.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        let mut spec = DiagramSpec {
            path: path.to_path_buf(),
            lattice: None,
            flavor: None,
            domains: Vec::new(),
            vertices: Vec::new(),
            arrows: Vec::new(),
            sources: None,
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let ln = i + 1;
            let err = |m: String| Error::parse(path, ln, m);
            let file = |f: &str| -> Result<PathBuf> {
                let p = base.join(f);
                if !p.is_file() {
                    return Err(err(format!("file `{}` not found", p.display())));
                }
                Ok(p)
            };
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match key {
                "lattice" => {
                    spec.lattice = Some(match rest.strip_prefix("table=") {
                        Some(f) => LatticeDecl::Table(file(f)?),
                        None => LatticeDecl::Std(make_lattice(rest).map_err(|e| err(e.to_string()))?),
                    })
                }
                "flavor" => {
                    parse_flavor_ops(rest).map_err(|e| err(e.to_string()))?;
                    spec.flavor = Some(rest.to_string());
                }
                "domain" => {
                    let (name, rhs) = rest.split_once('=').ok_or_else(|| err("expected `domain <Name> = ...`".into()))?;
                    let name = name.trim().to_string();
                    if spec.domains.iter().any(|(n, _)| *n == name) {
                        return Err(err(format!("domain `{name}` declared twice")));
                    }
                    spec.domains.push((name, parse_domain(rhs.trim()).map_err(err)?));
                }
                "vertex" => {
                    let (name, rhs) = rest.split_once(':').ok_or_else(|| err("expected `vertex <V> : <Domain>`".into()))?;
                    let mut toks = rhs.split_whitespace();
                    let domain = toks.next().ok_or_else(|| err("vertex without a domain".into()))?.to_string();
                    if !spec.domains.iter().any(|(n, _)| *n == domain) {
                        return Err(err(format!("undeclared domain `{domain}`")));
                    }
                    let mut v = VertexDecl { name: name.trim().into(), domain, dist: DistDecl::Top, sim: SimDecl::Identity };
                    for t in toks {
                        match t.split_once('=') {
                            None if t == "top" => v.dist = DistDecl::Top,
                            None if t == "identity" => v.sim = SimDecl::Identity,
                            Some(("dist", "top")) => v.dist = DistDecl::Top,
                            Some(("dist", f)) => v.dist = DistDecl::File(file(f)?),
                            Some(("sim", "identity")) => v.sim = SimDecl::Identity,
                            Some(("sim", f)) => v.sim = SimDecl::File(file(f)?),
                            _ => return Err(err(format!("unexpected vertex option `{t}`"))),
                        }
                    }
                    if v.name.is_empty() || spec.vertices.iter().any(|w| w.name == v.name) {
                        return Err(err(format!("vertex `{}` declared twice or unnamed", v.name)));
                    }
                    spec.vertices.push(v);
                }
                "arrow" => {
                    let (name, rhs) = rest.split_once(':').ok_or_else(|| err("expected `arrow <f> : S -> T ...`".into()))?;
                    let (lhs, rhs) = rhs.split_once("->").ok_or_else(|| err("arrow without `->`".into()))?;
                    let (tgts, body) = rhs.trim().rsplit_once(char::is_whitespace).unwrap_or(("", rhs.trim()));
                    let body = match body.split_once('=') {
                        Some(("table", f)) => ArrowBody::Table(file(f)?),
                        Some(("builtin", "gaussian-sum")) => ArrowBody::GaussianSum,
                        Some(("builtin", "equality")) => ArrowBody::Equality,
                        _ => return Err(err(format!("expected `table=<file>` or `builtin=<name>`, got `{body}`"))),
                    };
                    let a = ArrowDecl {
                        name: name.trim().into(),
                        sources: names(lhs),
                        targets: names(tgts),
                        body,
                        line: ln,
                    };
                    for v in a.sources.iter().chain(&a.targets) {
                        if !spec.vertices.iter().any(|w| w.name == *v) {
                            return Err(err(format!("arrow `{}` refers to undeclared vertex `{v}`", a.name)));
                        }
                    }
                    spec.arrows.push(a);
                }
                "sources" => {
                    let s = names(rest);
                    if let Some(v) = s.iter().find(|v| !spec.vertices.iter().any(|w| w.name == **v)) {
                        return Err(err(format!("undeclared vertex `{v}` in sources")));
                    }
                    spec.sources = Some(s);
                }
                _ => return Err(err(format!("unknown directive `{key}`"))),
            }
        }
        Ok(spec)
    }

    fn domain(&self, name: &str) -> Arc<Domain> {
        self.domains.iter().find(|(n, _)| n == name).expect("checked while parsing").1.clone()
    }

    fn attribute(&self, vertex: &str) -> Attribute {
        let v = self.vertices.iter().find(|v| v.name == vertex).expect("checked while parsing");
        Attribute::new(&v.name, self.domain(&v.domain))
    }

    /// Loads every table and assembles the diagram.
    pub fn build<L: Lattice>(&self, flavor: Flavor<L>) -> Result<MultiDiagram<L>> {
        let l = flavor.lattice().clone();
        let mut d = MultiDiagram::new(flavor);
        for v in &self.vertices {
            let attrs = vec![self.attribute(&v.name)];
            let dist = match &v.dist {
                DistDecl::Top => Relation::top_distribution(l.clone(), attrs.clone())?,
                DistDecl::File(p) => read_distribution(p, &l, &attrs)?,
            };
            let sim = match &v.sim {
                SimDecl::Identity => Similarity::identity(l.clone(), attrs.clone()),
                SimDecl::File(p) => read_similarity(p, &l, &attrs)?,
            };
            d.add_vertex(&v.name, OmegaObject::new(dist, sim)?)?;
        }
        for a in &self.arrows {
            let src: Vec<Attribute> = a.sources.iter().map(|v| self.attribute(v)).collect();
            let tgt: Vec<Attribute> = a.targets.iter().map(|v| self.attribute(v)).collect();
            let rel = match &a.body {
                ArrowBody::Table(p) => read_relation(p, &l, &src, &tgt)?,
                ArrowBody::GaussianSum => gaussian_sum(&l, &src, &tgt)
                    .map_err(|m| Error::parse(&self.path, a.line, format!("arrow `{}`: {m}", a.name)))?,
                ArrowBody::Equality => equality(&l, &src, &tgt)?,
            };
            let s: Vec<&str> = a.sources.iter().map(String::as_str).collect();
            let t: Vec<&str> = a.targets.iter().map(String::as_str).collect();
            d.add_arrow(&a.name, &s, &t, rel)?;
        }
        if let Some(s) = &self.sources {
            let s: Vec<&str> = s.iter().map(String::as_str).collect();
            d.set_sources(&s)?;
        }
        Ok(d)
    }
}

/// Flavor from a `times=..,plus=..[,unchecked]` setting; (⊗,∨) when absent.
pub fn flavor_from_ops<L: Lattice>(lattice: L, ops: Option<&str>) -> Result<Flavor<L>> {
    let (times, plus, unchecked) = parse_flavor_ops(ops.unwrap_or(""))?;
    if unchecked {
        Flavor::unchecked(lattice, times, plus)
    } else {
        Flavor::new(lattice, times, plus)
    }
}

/// Parses a spec file and builds it over a built-in lattice (`lattice` line, else product).
pub fn load_std_diagram(path: &Path) -> Result<MultiDiagram<StdLattice>> {
    let spec = DiagramSpec::load(path)?;
    let l = match &spec.lattice {
        Some(LatticeDecl::Std(l)) => *l,
        Some(LatticeDecl::Table(p)) => {
            return Err(Error::InvalidParameter(format!("spec uses the finite lattice {}", p.display())))
        }
        None => StdLattice::Product,
    };
    spec.build(flavor_from_ops(l, spec.flavor.as_deref())?)
}

fn gaussian_sum<L: Lattice>(l: &L, src: &[Attribute], tgt: &[Attribute]) -> std::result::Result<Relation<L>, String> {
    if src.len() != 2 || tgt.len() != 1 {
        return Err("gaussian-sum needs two sources and one target".into());
    }
    if src.iter().chain(tgt).any(|a| !a.domain.is_numeric()) {
        return Err("gaussian-sum needs numeric domains".into());
    }
    let (x, y, w) = (&src[0].domain, &src[1].domain, &tgt[0].domain);
    let mut rel = Relation::new(l.clone(), src.to_vec(), tgt.to_vec()).map_err(|e| e.to_string())?;
    for i in 0..x.len() as u32 {
        for j in 0..y.len() as u32 {
            for k in 0..w.len() as u32 {
                let d = w.number(k).unwrap() - x.number(i).unwrap() - y.number(j).unwrap();
                let v = l
                    .from_real((-d * d / 2.0).exp())
                    .ok_or_else(|| format!("lattice `{}` has no real values", l.name()))?;
                rel.set(vec![i, j, k], v).map_err(|e| e.to_string())?;
            }
        }
    }
    Ok(rel)
}

fn equality<L: Lattice>(l: &L, src: &[Attribute], tgt: &[Attribute]) -> Result<Relation<L>> {
    let attrs: Vec<Attribute> = src.iter().chain(tgt).cloned().collect();
    let same = |a: &Attribute, i: u32, b: &Attribute, j: u32| match (a.domain.number(i), b.domain.number(j)) {
        (Some(x), Some(y)) => (x - y).abs() <= 1e-9,
        _ => a.domain.label(i) == b.domain.label(j),
    };
    let mut rel = Relation::new(l.clone(), src.to_vec(), tgt.to_vec())?;
    let mut hits = Vec::new();
    for_each_tuple(&attrs, |t| {
        if t.iter().enumerate().all(|(k, &v)| same(&attrs[0], t[0], &attrs[k], v)) {
            hits.push(t.to_vec());
        }
    });
    for t in hits {
        rel.set(t, l.top())?;
    }
    Ok(rel)
}
