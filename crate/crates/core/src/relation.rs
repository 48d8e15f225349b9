//! Sparse Ω-valued relations over named finite attributes.
//!
//! A relation stores its source attributes first and its target attributes
//! second; a tuple is the vector of value indices in that order. Absent tuples
//! weigh ⊥. The same attribute name may occur once on each side (endo-relations
//! such as similarities), never twice on one side.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{format_real, parse_real, Flavor, Lattice};

pub type Tuple = Vec<u32>;

/// Finite ordered set of distinct values; grid domains also keep the numbers.
#[derive(Clone)]
pub struct Domain {
    labels: Vec<String>,
    index: HashMap<String, u32>,
    numbers: Option<Vec<f64>>,
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(","))
    }
}

impl Domain {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Arc<Domain>> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidDomain("domain must be non-empty".into()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i as u32).is_some() {
                return Err(Error::InvalidDomain(format!("value `{l}` listed twice")));
            }
        }
        let numbers = labels.iter().map(|l| l.parse::<f64>().ok()).collect();
        Ok(Arc::new(Domain { labels, index, numbers }))
    }

    /// Numeric domain; labels are the shortest faithful decimal renderings.
    pub fn numeric(values: &[f64]) -> Result<Arc<Domain>> {
        let d = Domain::new(values.iter().map(|&v| format_real(v)))?;
        let mut d = Arc::try_unwrap(d).expect("fresh domain");
        d.numbers = Some(values.to_vec());
        Ok(Arc::new(d))
    }

    /// Uniform grid lo, lo+step, …, hi (points rounded to 12 decimals).
    pub fn grid(lo: f64, hi: f64, step: f64) -> Result<Arc<Domain>> {
        if !(step > 0.0) || !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(Error::InvalidDomain(format!("bad grid({lo},{hi},{step})")));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        if n > 1_000_000 {
            return Err(Error::InvalidDomain("grid too large".into()));
        }
        let values: Vec<f64> = (0..n)
            .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
            .collect();
        Domain::numeric(&values)
    }

    /// The values `0, 1, …, n-1`.
    pub fn range(n: usize) -> Result<Arc<Domain>> {
        Domain::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: u32) -> &str {
        &self.labels[i as usize]
    }

    pub fn index_of(&self, label: &str) -> Option<u32> {
        self.index.get(label).copied()
    }

    /// Exact label match, else (numeric domains) the point equal to the parsed
    /// number within 1e-9, so `.3` finds `0.3`.
    pub fn lookup(&self, label: &str) -> Option<u32> {
        self.index_of(label).or_else(|| {
            let x = parse_real(label.trim())?;
            let nums = self.numbers.as_ref()?;
            nums.iter().position(|&n| (n - x).abs() <= 1e-9).map(|i| i as u32)
        })
    }

    /// Numeric value of element `i`, when every label is a number.
    pub fn number(&self, i: u32) -> Option<f64> {
        self.numbers.as_ref().map(|n| n[i as usize])
    }

    pub fn is_numeric(&self) -> bool {
        self.numbers.is_some()
    }
}

/// A named attribute with its finite domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub domain: Arc<Domain>,
}

impl Attribute {
    pub fn new(name: impl Into<String>, domain: Arc<Domain>) -> Self {
        Attribute { name: name.into(), domain }
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Attribute { name: name.into(), domain: self.domain.clone() }
    }
}

fn check_unique(attrs: &[Attribute]) -> Result<()> {
    for (i, a) in attrs.iter().enumerate() {
        if attrs[..i].iter().any(|b| b.name == a.name) {
            return Err(Error::DuplicateAttribute(a.name.clone()));
        }
    }
    Ok(())
}

fn position(attrs: &[Attribute], name: &str) -> Option<usize> {
    attrs.iter().position(|a| a.name == name)
}

fn names(attrs: &[Attribute]) -> Vec<&str> {
    attrs.iter().map(|a| a.name.as_str()).collect()
}

/// Calls `f` on every tuple of the dense product of the attribute domains.
pub fn for_each_tuple(attrs: &[Attribute], mut f: impl FnMut(&[u32])) {
    let sizes: Vec<u32> = attrs.iter().map(|a| a.domain.len() as u32).collect();
    let mut t = vec![0u32; attrs.len()];
    loop {
        f(&t);
        let mut k = t.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            t[k] += 1;
            if t[k] < sizes[k] {
                break;
            }
            t[k] = 0;
        }
    }
}

/// Number of tuples in the dense product of the domains.
pub fn dense_size(attrs: &[Attribute]) -> usize {
    attrs.iter().map(|a| a.domain.len()).product()
}

/// An Ω-valued relation from its source attributes to its target attributes.
#[derive(Clone)]
pub struct Relation<L: Lattice> {
    lattice: L,
    sources: Vec<Attribute>,
    targets: Vec<Attribute>,
    weights: BTreeMap<Tuple, L::Value>,
}

/// A relation with no source attributes.
pub type Distribution<L> = Relation<L>;

impl<L: Lattice> fmt::Debug for Relation<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Relation[{:?} -> {:?}] over {}", names(&self.sources), names(&self.targets), self.lattice.name())?;
        for (t, v) in &self.weights {
            writeln!(f, "  {:?} = {}", self.tuple_labels(t), self.lattice.format_value(*v))?;
        }
        Ok(())
    }
}

impl<L: Lattice> Relation<L> {
    pub fn new(lattice: L, sources: Vec<Attribute>, targets: Vec<Attribute>) -> Result<Self> {
        check_unique(&sources)?;
        check_unique(&targets)?;
        for s in &sources {
            if let Some(t) = targets.iter().find(|t| t.name == s.name) {
                if t.domain != s.domain {
                    return Err(Error::DomainMismatch(s.name.clone()));
                }
            }
        }
        Ok(Relation { lattice, sources, targets, weights: BTreeMap::new() })
    }

    pub fn distribution(lattice: L, attrs: Vec<Attribute>) -> Result<Self> {
        Self::new(lattice, Vec::new(), attrs)
    }

    /// The relation ∗ → ∗ holding λ.
    pub fn scalar(lattice: L, value: L::Value) -> Self {
        let mut r = Relation { lattice, sources: Vec::new(), targets: Vec::new(), weights: BTreeMap::new() };
        if !r.lattice.is_bottom(value) {
            r.weights.insert(Vec::new(), value);
        }
        r
    }

    /// 1_A: the endo-relation on `attrs` with ⊤ on the diagonal.
    pub fn identity(lattice: L, attrs: Vec<Attribute>) -> Result<Self> {
        Self::identity_between(lattice, attrs.clone(), attrs)
    }

    /// ⊤ exactly where the source tuple equals the target tuple (domains must agree pairwise).
    pub fn identity_between(lattice: L, sources: Vec<Attribute>, targets: Vec<Attribute>) -> Result<Self> {
        if sources.len() != targets.len() {
            return Err(Error::SignatureMismatch("identity needs equally many sources and targets".into()));
        }
        for (s, t) in sources.iter().zip(&targets) {
            if s.domain != t.domain {
                return Err(Error::DomainMismatch(t.name.clone()));
            }
        }
        let mut r = Self::new(lattice, sources, targets)?;
        let top = r.lattice.top();
        let src = r.sources.clone();
        for_each_tuple(&src, |t| {
            let mut full = t.to_vec();
            full.extend_from_slice(t);
            r.weights.insert(full, top);
        });
        Ok(r)
    }

    /// ⊤ on every tuple of the attributes.
    pub fn top_distribution(lattice: L, attrs: Vec<Attribute>) -> Result<Self> {
        let mut r = Self::distribution(lattice, attrs)?;
        let top = r.lattice.top();
        let attrs = r.targets.clone();
        for_each_tuple(&attrs, |t| {
            r.weights.insert(t.to_vec(), top);
        });
        Ok(r)
    }

    /// Builds a relation from a weight function on the dense product.
    pub fn from_fn(
        lattice: L,
        sources: Vec<Attribute>,
        targets: Vec<Attribute>,
        mut f: impl FnMut(&[u32]) -> L::Value,
    ) -> Result<Self> {
        let mut r = Self::new(lattice, sources, targets)?;
        let attrs: Vec<Attribute> = r.attributes().into_iter().cloned().collect();
        let mut entries = Vec::new();
        for_each_tuple(&attrs, |t| entries.push((t.to_vec(), f(t))));
        for (t, v) in entries {
            r.set(t, v)?;
        }
        Ok(r)
    }

    pub fn lattice(&self) -> &L {
        &self.lattice
    }

    pub fn sources(&self) -> &[Attribute] {
        &self.sources
    }

    pub fn targets(&self) -> &[Attribute] {
        &self.targets
    }

    /// Sources followed by targets, in tuple order.
    pub fn attributes(&self) -> Vec<&Attribute> {
        self.sources.iter().chain(&self.targets).collect()
    }

    pub fn source_names(&self) -> Vec<&str> {
        names(&self.sources)
    }

    pub fn target_names(&self) -> Vec<&str> {
        names(&self.targets)
    }

    pub fn arity(&self) -> usize {
        self.sources.len() + self.targets.len()
    }

    pub fn is_distribution(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn is_scalar(&self) -> bool {
        self.sources.is_empty() && self.targets.is_empty()
    }

    /// Number of stored (non-⊥) entries.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Stored entries in tuple order.
    pub fn entries(&self) -> impl Iterator<Item = (&Tuple, L::Value)> + '_ {
        self.weights.iter().map(|(t, v)| (t, *v))
    }

    pub fn get(&self, t: &[u32]) -> L::Value {
        self.weights.get(t).copied().unwrap_or_else(|| self.lattice.bottom())
    }

    /// Value of a scalar relation (⊥ when empty).
    pub fn scalar_value(&self) -> L::Value {
        self.get(&[])
    }

    pub fn set(&mut self, t: Tuple, v: L::Value) -> Result<()> {
        if t.len() != self.arity() {
            return Err(Error::TupleArity { expected: self.arity(), got: t.len() });
        }
        for (i, a) in self.sources.iter().chain(&self.targets).enumerate() {
            if t[i] as usize >= a.domain.len() {
                return Err(Error::UnknownDomainValue { attribute: a.name.clone(), value: t[i].to_string() });
            }
        }
        if !self.lattice.contains(v) {
            return Err(Error::InvalidValue { value: self.lattice.format_value(v), lattice: self.lattice.name() });
        }
        self.put(t, v);
        Ok(())
    }

    fn put(&mut self, t: Tuple, v: L::Value) {
        if self.lattice.is_bottom(v) {
            self.weights.remove(&t);
        } else {
            self.weights.insert(t, v);
        }
    }

    /// Tuple of value indices from labels, in sources-then-targets order.
    pub fn tuple_of(&self, labels: &[&str]) -> Result<Tuple> {
        if labels.len() != self.arity() {
            return Err(Error::TupleArity { expected: self.arity(), got: labels.len() });
        }
        self.sources
            .iter()
            .chain(&self.targets)
            .zip(labels)
            .map(|(a, l)| {
                a.domain
                    .lookup(l)
                    .ok_or_else(|| Error::UnknownDomainValue { attribute: a.name.clone(), value: l.to_string() })
            })
            .collect()
    }

    pub fn set_labels(&mut self, labels: &[&str], v: L::Value) -> Result<()> {
        let t = self.tuple_of(labels)?;
        self.set(t, v)
    }

    pub fn get_labels(&self, labels: &[&str]) -> Result<L::Value> {
        Ok(self.get(&self.tuple_of(labels)?))
    }

    pub fn tuple_labels(&self, t: &[u32]) -> Vec<String> {
        self.sources
            .iter()
            .chain(&self.targets)
            .zip(t)
            .map(|(a, &i)| a.domain.label(i).to_string())
            .collect()
    }

    fn same_lattice(&self, other: &L) -> Result<()> {
        if &self.lattice != other {
            return Err(Error::LatticeMismatch(self.lattice.name(), other.name()));
        }
        Ok(())
    }

    /// Sequential composition "self, then g":
    /// (f∘g)(x̄,z̄) = Σ_{ȳ over f□∩□g} f(x̄,ȳ) × g(ȳ,z̄).
    pub fn compose(&self, g: &Self, flavor: &Flavor<L>) -> Result<Self> {
        self.same_lattice(&g.lattice)?;
        self.same_lattice(flavor.lattice())?;
        let f = self;
        let mut shared = Vec::new();
        for (fp, a) in f.targets.iter().enumerate() {
            if let Some(gp) = position(&g.sources, &a.name) {
                if g.sources[gp].domain != a.domain {
                    return Err(Error::DomainMismatch(a.name.clone()));
                }
                shared.push((fp, gp));
            }
        }
        let g_rest: Vec<usize> = (0..g.sources.len()).filter(|gp| !shared.iter().any(|s| s.1 == *gp)).collect();
        let f_rest: Vec<usize> = (0..f.targets.len()).filter(|fp| !shared.iter().any(|s| s.0 == *fp)).collect();

        let mut sources = f.sources.clone();
        sources.extend(g_rest.iter().map(|&i| g.sources[i].clone()));
        let mut targets = g.targets.clone();
        targets.extend(f_rest.iter().map(|&i| f.targets[i].clone()));
        let mut out = Relation::new(self.lattice.clone(), sources, targets)?;

        let (nf, ng) = (f.sources.len(), g.sources.len());
        let mut index: HashMap<Vec<u32>, Vec<(&Tuple, L::Value)>> = HashMap::new();
        for (gt, gv) in &g.weights {
            let key: Vec<u32> = shared.iter().map(|&(_, gp)| gt[gp]).collect();
            index.entry(key).or_default().push((gt, *gv));
        }
        let mut acc: HashMap<Tuple, L::Value> = HashMap::new();
        let mut key = Vec::with_capacity(shared.len());
        for (ft, fv) in &f.weights {
            key.clear();
            key.extend(shared.iter().map(|&(fp, _)| ft[nf + fp]));
            let Some(matches) = index.get(&key) else { continue };
            for &(gt, gv) in matches {
                let mut t = Vec::with_capacity(out.arity());
                t.extend_from_slice(&ft[..nf]);
                t.extend(g_rest.iter().map(|&i| gt[i]));
                t.extend_from_slice(&gt[ng..]);
                t.extend(f_rest.iter().map(|&i| ft[nf + i]));
                let w = flavor.times(*fv, gv);
                acc.entry(t)
                    .and_modify(|old| *old = flavor.plus(*old, w))
                    .or_insert(w);
            }
        }
        for (t, v) in acc {
            out.put(t, v);
        }
        Ok(out)
    }

    /// f↾λ: every weight multiplied by λ.
    pub fn external_product(&self, lambda: L::Value, flavor: &Flavor<L>) -> Result<Self> {
        self.same_lattice(flavor.lattice())?;
        Ok(self.map_values(|v| flavor.times(v, lambda)))
    }

    /// Pointwise image of the weights (⊥ results are dropped).
    pub fn map_values(&self, mut f: impl FnMut(L::Value) -> L::Value) -> Self {
        let mut out = Relation {
            lattice: self.lattice.clone(),
            sources: self.sources.clone(),
            targets: self.targets.clone(),
            weights: BTreeMap::new(),
        };
        for (t, v) in &self.weights {
            out.put(t.clone(), f(*v));
        }
        out
    }

    /// f°: sources and targets swapped.
    pub fn reverse(&self) -> Self {
        let ns = self.sources.len();
        let weights = self
            .weights
            .iter()
            .map(|(t, v)| {
                let mut r = t[ns..].to_vec();
                r.extend_from_slice(&t[..ns]);
                (r, *v)
            })
            .collect();
        Relation {
            lattice: self.lattice.clone(),
            sources: self.targets.clone(),
            targets: self.sources.clone(),
            weights,
        }
    }

    /// Same relation with its attributes reordered to the given name orders.
    pub fn aligned(&self, sources: &[&str], targets: &[&str]) -> Result<Self> {
        let mismatch = || {
            Error::SignatureMismatch(format!(
                "{:?} -> {:?} cannot be aligned to {:?} -> {:?}",
                self.source_names(),
                self.target_names(),
                sources,
                targets
            ))
        };
        if sources.len() != self.sources.len() || targets.len() != self.targets.len() {
            return Err(mismatch());
        }
        let ns = self.sources.len();
        let mut perm = Vec::with_capacity(self.arity());
        for n in sources {
            perm.push(position(&self.sources, n).ok_or_else(mismatch)?);
        }
        for n in targets {
            perm.push(ns + position(&self.targets, n).ok_or_else(mismatch)?);
        }
        let attrs = self.attributes();
        let new_sources = perm[..ns].iter().map(|&i| attrs[i].clone()).collect();
        let new_targets = perm[ns..].iter().map(|&i| attrs[i].clone()).collect();
        let mut out = Relation::new(self.lattice.clone(), new_sources, new_targets)?;
        for (t, v) in &self.weights {
            out.weights.insert(perm.iter().map(|&i| t[i]).collect(), *v);
        }
        Ok(out)
    }

    /// `other` aligned to this relation's signature, or SignatureMismatch.
    fn aligned_like(&self, other: &Self) -> Result<Self> {
        self.same_lattice(&other.lattice)?;
        let o = other.aligned(&self.source_names(), &self.target_names())?;
        for (a, b) in self.attributes().into_iter().zip(o.attributes()) {
            if a.domain != b.domain {
                return Err(Error::SignatureMismatch(format!("attribute `{}` has different domains", a.name)));
            }
        }
        Ok(o)
    }

    /// First tuple where self ≰ other (pointwise, tolerance `eps`).
    pub fn leq_witness(&self, other: &Self, eps: f64) -> Result<Option<(Tuple, L::Value, L::Value)>> {
        let o = self.aligned_like(other)?;
        for (t, v) in &self.weights {
            let w = o.get(t);
            if !self.lattice.approx_leq(*v, w, eps) {
                return Ok(Some((t.clone(), *v, w)));
            }
        }
        // tuples stored only in `other` have self = ⊥, which is below anything
        Ok(None)
    }

    /// f ≤ g pointwise in the lattice order (tolerance `eps`).
    pub fn leq(&self, other: &Self, eps: f64) -> Result<bool> {
        Ok(self.leq_witness(other, eps)?.is_none())
    }

    /// First tuple where the two relations differ by more than `eps`.
    pub fn diff_witness(&self, other: &Self, eps: f64) -> Result<Option<(Tuple, L::Value, L::Value)>> {
        let o = self.aligned_like(other)?;
        for t in self.weights.keys().chain(o.weights.keys()) {
            let (a, b) = (self.get(t), o.get(t));
            if !self.lattice.approx_eq(a, b, eps) {
                return Ok(Some((t.clone(), a, b)));
            }
        }
        Ok(None)
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> Result<bool> {
        Ok(self.diff_witness(other, eps)?.is_none())
    }

    /// ρ_f: every attribute moved to the targets. A name present on both sides
    /// becomes `name_1` (source copy) and `name_2` (target copy).
    pub fn tabulate(&self) -> Self {
        let both = |n: &str| position(&self.sources, n).is_some() && position(&self.targets, n).is_some();
        let mut attrs: Vec<Attribute> = self
            .sources
            .iter()
            .map(|a| if both(&a.name) { a.renamed(format!("{}_1", a.name)) } else { a.clone() })
            .collect();
        attrs.extend(
            self.targets
                .iter()
                .map(|a| if both(&a.name) { a.renamed(format!("{}_2", a.name)) } else { a.clone() }),
        );
        Relation { lattice: self.lattice.clone(), sources: Vec::new(), targets: attrs, weights: self.weights.clone() }
    }

    /// Splits a distribution back into a relation with the named attributes as sources.
    pub fn untabulate(&self, sources: &[&str]) -> Result<Self> {
        if !self.is_distribution() {
            return Err(Error::NotADistribution);
        }
        for s in sources {
            if position(&self.targets, s).is_none() {
                return Err(Error::UnknownAttribute(s.to_string()));
            }
        }
        let rest: Vec<&str> = self.target_names().into_iter().filter(|n| !sources.contains(n)).collect();
        let all: Vec<&str> = sources.iter().copied().chain(rest.iter().copied()).collect();
        let d = self.aligned(&[], &all)?;
        let ns = sources.len();
        Ok(Relation {
            lattice: d.lattice,
            sources: d.targets[..ns].to_vec(),
            targets: d.targets[ns..].to_vec(),
            weights: d.weights,
        })
    }

    /// Cylindrical extension of a distribution to a superset of its attributes.
    pub fn canonical_extension(&self, bigger: &[Attribute]) -> Result<Self> {
        if !self.is_distribution() {
            return Err(Error::NotADistribution);
        }
        check_unique(bigger)?;
        let mut from = Vec::with_capacity(self.targets.len());
        for a in &self.targets {
            let p = position(bigger, &a.name).ok_or_else(|| Error::NotASuperset(a.name.clone()))?;
            if bigger[p].domain != a.domain {
                return Err(Error::DomainMismatch(a.name.clone()));
            }
            from.push(p);
        }
        let free: Vec<usize> = (0..bigger.len()).filter(|p| !from.contains(p)).collect();
        let free_attrs: Vec<Attribute> = free.iter().map(|&p| bigger[p].clone()).collect();
        let mut out = Relation::distribution(self.lattice.clone(), bigger.to_vec())?;
        for (t, v) in &self.weights {
            let mut full = vec![0u32; bigger.len()];
            for (i, &p) in from.iter().enumerate() {
                full[p] = t[i];
            }
            for_each_tuple(&free_attrs, |ft| {
                for (i, &p) in free.iter().enumerate() {
                    full[p] = ft[i];
                }
                out.weights.insert(full.clone(), *v);
            });
        }
        Ok(out)
    }

    /// Σ over the named attributes of a distribution.
    pub fn sum_out(&self, attrs: &[&str], flavor: &Flavor<L>) -> Result<Self> {
        self.same_lattice(flavor.lattice())?;
        if !self.is_distribution() {
            return Err(Error::NotADistribution);
        }
        for a in attrs {
            if position(&self.targets, a).is_none() {
                return Err(Error::UnknownAttribute(a.to_string()));
            }
        }
        let keep: Vec<usize> = (0..self.targets.len())
            .filter(|&i| !attrs.contains(&self.targets[i].name.as_str()))
            .collect();
        let mut out = Relation::distribution(
            self.lattice.clone(),
            keep.iter().map(|&i| self.targets[i].clone()).collect(),
        )?;
        let mut acc: HashMap<Tuple, L::Value> = HashMap::new();
        for (t, v) in &self.weights {
            let k: Tuple = keep.iter().map(|&i| t[i]).collect();
            acc.entry(k).and_modify(|o| *o = flavor.plus(*o, *v)).or_insert(*v);
        }
        for (t, v) in acc {
            out.put(t, v);
        }
        Ok(out)
    }

    /// Natural join of two distributions, multiplying matched weights with flavor-times.
    /// Equals the product of both canonical extensions to the union of attributes.
    pub fn join(&self, other: &Self, flavor: &Flavor<L>) -> Result<Self> {
        self.same_lattice(&other.lattice)?;
        self.same_lattice(flavor.lattice())?;
        if !self.is_distribution() || !other.is_distribution() {
            return Err(Error::NotADistribution);
        }
        let mut shared = Vec::new();
        for (i, a) in self.targets.iter().enumerate() {
            if let Some(j) = position(&other.targets, &a.name) {
                if other.targets[j].domain != a.domain {
                    return Err(Error::DomainMismatch(a.name.clone()));
                }
                shared.push((i, j));
            }
        }
        let rest: Vec<usize> = (0..other.targets.len()).filter(|j| !shared.iter().any(|s| s.1 == *j)).collect();
        let mut attrs = self.targets.clone();
        attrs.extend(rest.iter().map(|&j| other.targets[j].clone()));
        let mut out = Relation::distribution(self.lattice.clone(), attrs)?;

        let mut index: HashMap<Vec<u32>, Vec<(&Tuple, L::Value)>> = HashMap::new();
        for (t, v) in &other.weights {
            index.entry(shared.iter().map(|&(_, j)| t[j]).collect()).or_default().push((t, *v));
        }
        let mut key = Vec::with_capacity(shared.len());
        for (t, v) in &self.weights {
            key.clear();
            key.extend(shared.iter().map(|&(i, _)| t[i]));
            let Some(matches) = index.get(&key) else { continue };
            for &(u, w) in matches {
                let mut full = t.clone();
                full.extend(rest.iter().map(|&j| u[j]));
                out.put(full, flavor.times(*v, w));
            }
        }
        Ok(out)
    }

    /// Pointwise flavor-plus of two parallel relations.
    pub fn add(&self, other: &Self, flavor: &Flavor<L>) -> Result<Self> {
        self.same_lattice(flavor.lattice())?;
        let o = self.aligned_like(other)?;
        let mut out = self.clone();
        for (t, v) in o.weights {
            let w = match out.weights.get(&t) {
                Some(old) => flavor.plus(*old, v),
                None => v,
            };
            out.put(t, w);
        }
        Ok(out)
    }

    /// Renames attributes on both sides; names not in `map` are kept.
    pub fn rename(&self, map: &[(&str, &str)]) -> Result<Self> {
        let ren = |a: &Attribute| match map.iter().find(|(from, _)| *from == a.name) {
            Some((_, to)) => a.renamed(*to),
            None => a.clone(),
        };
        let mut out = Relation::new(
            self.lattice.clone(),
            self.sources.iter().map(ren).collect(),
            self.targets.iter().map(ren).collect(),
        )?;
        out.weights = self.weights.clone();
        Ok(out)
    }

    /// Restriction to the tuples where `keep` holds.
    pub fn filter(&self, mut keep: impl FnMut(&[u32], L::Value) -> bool) -> Self {
        let mut out = self.clone();
        out.weights.retain(|t, v| keep(t, *v));
        out
    }
}
