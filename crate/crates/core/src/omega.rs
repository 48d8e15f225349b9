//! Ω-objects: carriers with a membership distribution and a similarity.

use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{Flavor, Lattice};
use crate::relation::{for_each_tuple, Attribute, Domain, Relation, Tuple};

/// A tuple where a law failed, with the two compared values.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub tuple: Vec<String>,
    pub found: String,
    pub bound: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}): {} vs {}", self.tuple.join(","), self.found, self.bound)
    }
}

fn witness<L: Lattice>(r: &Relation<L>, w: Option<(Tuple, L::Value, L::Value)>) -> Option<Witness> {
    w.map(|(t, a, b)| Witness {
        tuple: r.tuple_labels(&t),
        found: r.lattice().format_value(a),
        bound: r.lattice().format_value(b),
    })
}

fn same_names(a: &[Attribute], b: &[Attribute]) -> bool {
    a.len() == b.len()
        && a.iter().all(|x| b.iter().any(|y| y.name == x.name && y.domain == x.domain))
}

fn names(attrs: &[Attribute]) -> Vec<&str> {
    attrs.iter().map(|a| a.name.as_str()).collect()
}

/// One block of a product similarity.
#[derive(Debug, Clone)]
pub enum SimFactor<L: Lattice> {
    /// The crisp identity 1_A on these attributes.
    Identity(Vec<Attribute>),
    /// An explicit endo-relation.
    Explicit(Relation<L>),
}

impl<L: Lattice> SimFactor<L> {
    fn attributes(&self) -> &[Attribute] {
        match self {
            SimFactor::Identity(a) => a,
            SimFactor::Explicit(r) => r.sources(),
        }
    }
}

/// A similarity on a set of attributes, kept as a product of independent blocks
/// so that identities on large carriers never get materialized.
#[derive(Debug, Clone)]
pub struct Similarity<L: Lattice> {
    lattice: L,
    factors: Vec<SimFactor<L>>,
}

impl<L: Lattice> Similarity<L> {
    pub fn identity(lattice: L, attrs: Vec<Attribute>) -> Self {
        let factors = if attrs.is_empty() { Vec::new() } else { vec![SimFactor::Identity(attrs)] };
        Similarity { lattice, factors }
    }

    /// Wraps an endo-relation (same attribute names as sources and targets).
    pub fn explicit(rel: Relation<L>) -> Result<Self> {
        if !same_names(rel.sources(), rel.targets()) {
            return Err(Error::NotEndoRelation(format!("{:?} -> {:?}", rel.source_names(), rel.target_names())));
        }
        let src: Vec<String> = rel.source_names().iter().map(|s| s.to_string()).collect();
        let src: Vec<&str> = src.iter().map(String::as_str).collect();
        let rel = rel.aligned(&src, &src)?;
        Ok(Similarity { lattice: rel.lattice().clone(), factors: vec![SimFactor::Explicit(rel)] })
    }

    /// α × β: blocks on disjoint attributes combined with flavor-times.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch(self.lattice.name(), other.lattice.name()));
        }
        for a in other.attributes() {
            if self.attributes().iter().any(|b| b.name == a.name) {
                return Err(Error::DuplicateAttribute(a.name));
            }
        }
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Ok(Similarity { lattice: self.lattice.clone(), factors })
    }

    pub fn lattice(&self) -> &L {
        &self.lattice
    }

    pub fn factors(&self) -> &[SimFactor<L>] {
        &self.factors
    }

    pub fn attributes(&self) -> Vec<Attribute> {
        self.factors.iter().flat_map(|f| f.attributes().iter().cloned()).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.factors.iter().all(|f| matches!(f, SimFactor::Identity(_)))
    }

    /// α∘x̄ for a distribution over (a superset of) the similarity's attributes.
    pub fn apply(&self, d: &Relation<L>, flavor: &Flavor<L>) -> Result<Relation<L>> {
        if !d.is_distribution() {
            return Err(Error::NotADistribution);
        }
        let order: Vec<String> = d.target_names().iter().map(|s| s.to_string()).collect();
        let order: Vec<&str> = order.iter().map(String::as_str).collect();
        let mut cur = d.clone();
        for f in &self.factors {
            for a in f.attributes() {
                if !d.targets().iter().any(|b| b.name == a.name && b.domain == a.domain) {
                    return Err(Error::SignatureMismatch(format!("similarity attribute `{}` not in distribution", a.name)));
                }
            }
            if let SimFactor::Explicit(r) = f {
                cur = cur.compose(r, flavor)?;
            }
        }
        cur.aligned(&[], &order)
    }

    /// The similarity as one endo-relation on all its attributes.
    pub fn to_relation(&self, flavor: &Flavor<L>) -> Result<Relation<L>> {
        let mut acc = Relation::scalar(self.lattice.clone(), self.lattice.top());
        for f in &self.factors {
            let r = match f {
                SimFactor::Identity(a) => Relation::identity(self.lattice.clone(), a.clone())?,
                SimFactor::Explicit(r) => r.clone(),
            };
            acc = acc.compose(&r, flavor)?;
        }
        let attrs = self.attributes();
        let n = names(&attrs);
        acc.aligned(&n, &n)
    }
}

/// Which similarity axioms hold, with a witness for each failure.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityReport {
    pub reflexive: Option<Witness>,
    pub symmetric: Option<Witness>,
    pub transitive: Option<Witness>,
    /// α∘α = α.
    pub equivalence: bool,
}

impl SimilarityReport {
    pub fn is_similarity(&self) -> bool {
        self.reflexive.is_none() && self.symmetric.is_none() && self.transitive.is_none()
    }
}

/// Checks 1 ≤ α, α = α°, α∘α ≤ α.
pub fn check_similarity<L: Lattice>(alpha: &Relation<L>, flavor: &Flavor<L>, eps: f64) -> Result<SimilarityReport> {
    if !same_names(alpha.sources(), alpha.targets()) {
        return Err(Error::NotEndoRelation(format!("{:?} -> {:?}", alpha.source_names(), alpha.target_names())));
    }
    let src: Vec<String> = alpha.source_names().iter().map(|s| s.to_string()).collect();
    let src: Vec<&str> = src.iter().map(String::as_str).collect();
    let a = alpha.aligned(&src, &src)?;
    let l = a.lattice();

    let mut reflexive = None;
    let attrs = a.sources().to_vec();
    for_each_tuple(&attrs, |t| {
        if reflexive.is_some() {
            return;
        }
        let mut d = t.to_vec();
        d.extend_from_slice(t);
        let v = a.get(&d);
        if !l.is_top(v, eps) {
            reflexive = Some((d, v, l.top()));
        }
    });
    let reflexive = witness(&a, reflexive);
    let symmetric = witness(&a, a.diff_witness(&a.reverse(), eps)?);
    let aa = a.compose(&a, flavor)?;
    let transitive = witness(&aa, aa.leq_witness(&a, eps)?);
    let equivalence = aa.approx_eq(&a, eps)?;
    Ok(SimilarityReport { reflexive, symmetric, transitive, equivalence })
}

/// An Ω-set (A, x̄, α).
#[derive(Debug, Clone)]
pub struct OmegaObject<L: Lattice> {
    dist: Relation<L>,
    sim: Similarity<L>,
}

impl<L: Lattice> OmegaObject<L> {
    pub fn new(dist: Relation<L>, sim: Similarity<L>) -> Result<Self> {
        if !dist.is_distribution() {
            return Err(Error::NotADistribution);
        }
        if dist.lattice() != sim.lattice() {
            return Err(Error::LatticeMismatch(dist.lattice().name(), sim.lattice().name()));
        }
        if !same_names(dist.targets(), &sim.attributes()) {
            return Err(Error::SignatureMismatch(format!(
                "distribution on {:?} but similarity on {:?}",
                dist.target_names(),
                names(&sim.attributes())
            )));
        }
        Ok(OmegaObject { dist, sim })
    }

    /// ⊤ membership with the identity similarity.
    pub fn crisp(lattice: L, attrs: Vec<Attribute>) -> Result<Self> {
        let dist = Relation::top_distribution(lattice.clone(), attrs.clone())?;
        Self::new(dist, Similarity::identity(lattice, attrs))
    }

    pub fn carrier(&self) -> &[Attribute] {
        self.dist.targets()
    }

    pub fn dist(&self) -> &Relation<L> {
        &self.dist
    }

    pub fn sim(&self) -> &Similarity<L> {
        &self.sim
    }

    /// Optional extensionality α∘x̄ ≤ x̄; returns a witness on failure.
    pub fn check_extensional(&self, flavor: &Flavor<L>, eps: f64) -> Result<Option<Witness>> {
        let ax = self.sim.apply(&self.dist, flavor)?;
        Ok(witness(&ax, ax.leq_witness(&self.dist, eps)?))
    }

    /// Same object with attributes renamed.
    pub fn renamed(&self, map: &[(&str, &str)]) -> Result<Self> {
        let ren = |a: &Attribute| match map.iter().find(|(f, _)| *f == a.name) {
            Some((_, t)) => a.renamed(*t),
            None => a.clone(),
        };
        let factors = self
            .sim
            .factors
            .iter()
            .map(|f| {
                Ok(match f {
                    SimFactor::Identity(a) => SimFactor::Identity(a.iter().map(ren).collect()),
                    SimFactor::Explicit(r) => SimFactor::Explicit(r.rename(map)?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        OmegaObject::new(self.dist.rename(map)?, Similarity { lattice: self.sim.lattice.clone(), factors })
    }
}

/// ⌜ȳ°∘α∘x̄⌝ = Σ_{a,b} ȳ(b) × α(a,b) × x̄(a).
pub fn lambda_similar<L: Lattice>(
    x: &Relation<L>,
    y: &Relation<L>,
    sim: &Similarity<L>,
    flavor: &Flavor<L>,
) -> Result<L::Value> {
    if !x.is_distribution() || !y.is_distribution() {
        return Err(Error::NotADistribution);
    }
    if !same_names(x.targets(), y.targets()) || !same_names(x.targets(), &sim.attributes()) {
        return Err(Error::SignatureMismatch(format!(
            "distributions on {:?} and {:?}, similarity on {:?}",
            x.target_names(),
            y.target_names(),
            names(&sim.attributes())
        )));
    }
    let ax = sim.apply(x, flavor)?;
    let y = y.aligned(&[], &x.target_names())?;
    Ok(ax.compose(&y.reverse(), flavor)?.scalar_value())
}

/// [f = g] over the tabulations of two parallel relations.
pub fn lambda_similar_relations<L: Lattice>(
    f: &Relation<L>,
    g: &Relation<L>,
    sim: &Similarity<L>,
    flavor: &Flavor<L>,
) -> Result<L::Value> {
    let g = g.aligned(&f.source_names(), &f.target_names())?;
    lambda_similar(&f.tabulate(), &g.tabulate(), sim, flavor)
}

/// The three bimodule inequalities f∘x̄ ≤ ȳ, f∘α ≤ f, β∘f ≤ f.
#[derive(Debug, Clone, PartialEq)]
pub struct BimoduleReport {
    pub membership: Option<Witness>,
    pub source_similarity: Option<Witness>,
    pub target_similarity: Option<Witness>,
}

impl BimoduleReport {
    pub fn is_bimodule(&self) -> bool {
        self.membership.is_none() && self.source_similarity.is_none() && self.target_similarity.is_none()
    }
}

fn check_endpoints<L: Lattice>(f: &Relation<L>, src: &OmegaObject<L>, tgt: &OmegaObject<L>) -> Result<()> {
    if !same_names(f.sources(), src.carrier()) || !same_names(f.targets(), tgt.carrier()) {
        return Err(Error::SignatureMismatch(format!(
            "relation {:?} -> {:?} between objects on {:?} and {:?}",
            f.source_names(),
            f.target_names(),
            names(src.carrier()),
            names(tgt.carrier())
        )));
    }
    Ok(())
}

pub fn check_bimodule<L: Lattice>(
    f: &Relation<L>,
    src: &OmegaObject<L>,
    tgt: &OmegaObject<L>,
    flavor: &Flavor<L>,
    eps: f64,
) -> Result<BimoduleReport> {
    check_endpoints(f, src, tgt)?;
    let fx = src.dist().compose(f, flavor)?;
    let membership = witness(&fx, fx.leq_witness(tgt.dist(), eps)?);
    let fa = src.sim().to_relation(flavor)?.compose(f, flavor)?;
    let source_similarity = witness(&fa, fa.leq_witness(f, eps)?);
    let bf = f.compose(&tgt.sim().to_relation(flavor)?, flavor)?;
    let target_similarity = witness(&bf, bf.leq_witness(f, eps)?);
    Ok(BimoduleReport { membership, source_similarity, target_similarity })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapClass {
    pub entire: bool,
    pub simple: bool,
    pub map: bool,
}

/// entire: 1 ≤ f°∘f; simple: f∘f° ≤ 1, both evaluated with the flavor's composition.
pub fn classify_map<L: Lattice>(f: &Relation<L>, flavor: &Flavor<L>, eps: f64) -> Result<MapClass> {
    let l = f.lattice().clone();
    let ffo = f.compose(&f.reverse(), flavor)?;
    let id_src = Relation::identity(l.clone(), f.sources().to_vec())?;
    let entire = id_src.leq(&ffo, eps)?;
    let fof = f.reverse().compose(f, flavor)?;
    let id_tgt = Relation::identity(l, f.targets().to_vec())?;
    let simple = fof.leq(&id_tgt, eps)?;
    Ok(MapClass { entire, simple, map: entire && simple })
}

/// The refinement equations, each with a witness on failure.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementReport {
    /// f°∘f = 1 on the target carrier.
    pub surjective: Option<Witness>,
    /// x̄ followed by f equals ȳ.
    pub membership: Option<Witness>,
    /// f°, then α, then f equals β.
    pub similarity: Option<Witness>,
}

impl RefinementReport {
    pub fn holds(&self) -> bool {
        self.surjective.is_none() && self.membership.is_none() && self.similarity.is_none()
    }
}

pub fn check_refinement<L: Lattice>(
    f: &Relation<L>,
    from: &OmegaObject<L>,
    to: &OmegaObject<L>,
    flavor: &Flavor<L>,
    eps: f64,
) -> Result<RefinementReport> {
    check_endpoints(f, from, to)?;
    let fo = f.reverse();
    let fof = fo.compose(f, flavor)?;
    let id = Relation::identity(f.lattice().clone(), f.targets().to_vec())?;
    let surjective = witness(&fof, fof.diff_witness(&id, eps)?);
    let fx = from.dist().compose(f, flavor)?;
    let membership = witness(&fx, fx.diff_witness(to.dist(), eps)?);
    let faf = fo.compose(&from.sim().to_relation(flavor)?, flavor)?.compose(f, flavor)?;
    let similarity = witness(&faf, faf.diff_witness(&to.sim().to_relation(flavor)?, eps)?);
    Ok(RefinementReport { surjective, membership, similarity })
}

/// Positive-semidefinite kernels on numeric vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    Linear,
    NormalizedLinear,
    /// (x·y + offset)^degree
    Polynomial { offset: f64, degree: u32 },
    /// e^{−gamma‖x−y‖²}
    GaussianRbf { gamma: f64 },
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

impl Kernel {
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => dot(x, y),
            Kernel::NormalizedLinear => {
                let (nx, ny) = (dot(x, x).sqrt(), dot(y, y).sqrt());
                if nx == 0.0 || ny == 0.0 {
                    if nx == ny {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    dot(x, y) / (nx * ny)
                }
            }
            Kernel::Polynomial { offset, degree } => (dot(x, y) + offset).powi(degree as i32),
            Kernel::GaussianRbf { gamma } => {
                let d: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * d).exp()
            }
        }
    }

    /// d_k(x,y)² = k(x,x) − 2k(x,y) + k(y,y), before clamping.
    pub fn squared_distance(&self, x: &[f64], y: &[f64]) -> f64 {
        self.eval(x, x) - 2.0 * self.eval(x, y) + self.eval(y, y)
    }
}

/// A kernel similarity together with the pairs whose squared distance had to be clamped.
#[derive(Debug, Clone)]
pub struct KernelSimilarity<L: Lattice> {
    pub similarity: Similarity<L>,
    pub relation: Relation<L>,
    /// (i, j, d²) for every negative squared distance that was set to zero.
    pub clamped: Vec<(usize, usize, f64)>,
}

/// s_d(x,y) = base^{−d_k(x,y)} on the point set; points are labelled 0..n-1.
pub fn kernel_similarity<L: Lattice>(
    lattice: L,
    attribute: &str,
    points: &[Vec<f64>],
    kernel: Kernel,
    base: f64,
) -> Result<KernelSimilarity<L>> {
    if !(base > 1.0) {
        return Err(Error::InvalidParameter(format!("kernel base must exceed 1, got {base}")));
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("kernel needs at least one point".into()));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidParameter("points have different dimensions".into()));
    }
    let attr = Attribute::new(attribute, Domain::range(points.len())?);
    let mut rel = Relation::new(lattice.clone(), vec![attr.clone()], vec![attr.clone()])?;
    let mut clamped = Vec::new();
    for (i, x) in points.iter().enumerate() {
        for (j, y) in points.iter().enumerate() {
            let mut d2 = if i == j { 0.0 } else { kernel.squared_distance(x, y) };
            if d2 < 0.0 {
                clamped.push((i, j, d2));
                d2 = 0.0;
            }
            let s = base.powf(-d2.sqrt());
            let v = lattice
                .from_real(s.clamp(0.0, 1.0))
                .ok_or_else(|| Error::InvalidParameter(format!("lattice {} has no real values", lattice.name())))?;
            rel.set(vec![i as u32, j as u32], v)?;
        }
    }
    Ok(KernelSimilarity { similarity: Similarity::explicit(rel.clone())?, relation: rel, clamped })
}
