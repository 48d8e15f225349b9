//! Complete residuated lattices and the semiring flavors built from them.

use std::fmt::Debug;
use std::sync::{Arc, OnceLock};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Tolerance used for verdict comparisons. `OMEGAREL_EPS` overrides the default of 1e-9.
pub fn default_eps() -> f64 {
    static EPS: OnceLock<f64> = OnceLock::new();
    *EPS.get_or_init(|| {
        std::env::var("OMEGAREL_EPS")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|e| e.is_finite() && *e >= 0.0)
            .unwrap_or(1e-9)
    })
}

/// Shortest decimal rendering of `x` rounded to 12 decimal places; reads back
/// within 1e-12 and is a fixed point of write-read-write.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = if x.abs() < 1e3 { (x * 1e12).round() / 1e12 } else { x };
    if r == 0.0 {
        return "0".into();
    }
    format!("{r}")
}

/// Parses decimals and simple fractions such as `1/3`.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p.trim().parse().ok()?;
        let q: f64 = q.trim().parse().ok()?;
        if q == 0.0 {
            return None;
        }
        return Some(p / q);
    }
    s.parse().ok().filter(|x: &f64| x.is_finite())
}

/// A complete residuated lattice (Ω, ⊗, ⇒, ∧, ∨, ⊥, ⊤), optionally with a strong disjunction ⊕.
pub trait Lattice: Clone + Debug + PartialEq + Send + Sync {
    type Value: Copy + Debug + PartialEq + Send + Sync;

    fn name(&self) -> String;
    fn top(&self) -> Self::Value;
    fn bottom(&self) -> Self::Value;
    fn tensor(&self, x: Self::Value, y: Self::Value) -> Self::Value;
    fn implies(&self, x: Self::Value, y: Self::Value) -> Self::Value;
    fn meet(&self, x: Self::Value, y: Self::Value) -> Self::Value;
    fn join(&self, x: Self::Value, y: Self::Value) -> Self::Value;
    /// Strong disjunction, where the lattice defines one.
    fn oplus(&self, x: Self::Value, y: Self::Value) -> Option<Self::Value>;
    fn has_oplus(&self) -> bool;
    /// Order test allowing `eps` of slack on real-valued components.
    fn approx_leq(&self, x: Self::Value, y: Self::Value, eps: f64) -> bool;
    fn contains(&self, x: Self::Value) -> bool;
    fn parse_value(&self, s: &str) -> Result<Self::Value>;
    fn format_value(&self, x: Self::Value) -> String;
    fn random_value(&self, rng: &mut dyn RngCore) -> Self::Value;
    /// All elements, when the carrier is finite.
    fn elements(&self) -> Option<Vec<Self::Value>>;
    /// Distinguished values worth testing exhaustively (the whole carrier when finite).
    fn landmarks(&self) -> Vec<Self::Value>;

    fn from_real(&self, _x: f64) -> Option<Self::Value> {
        None
    }
    fn to_real(&self, _x: Self::Value) -> Option<f64> {
        None
    }
    /// Text used when reporting a degree; finite lattices add the element index.
    fn format_degree(&self, x: Self::Value) -> String {
        self.format_value(x)
    }

    fn leq(&self, x: Self::Value, y: Self::Value) -> bool {
        self.approx_leq(x, y, 0.0)
    }
    fn approx_eq(&self, x: Self::Value, y: Self::Value, eps: f64) -> bool {
        self.approx_leq(x, y, eps) && self.approx_leq(y, x, eps)
    }
    fn is_top(&self, x: Self::Value, eps: f64) -> bool {
        self.approx_leq(self.top(), x, eps)
    }
    fn is_bottom(&self, x: Self::Value) -> bool {
        x == self.bottom()
    }
}

/// The built-in lattices on [0,1] and {0,1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StdLattice {
    Lukasiewicz,
    Goedel,
    Product,
    Boolean,
}

pub fn make_lattice(kind: &str) -> Result<StdLattice> {
    match kind.trim().to_ascii_lowercase().as_str() {
        "lukasiewicz" | "luk" | "łukasiewicz" => Ok(StdLattice::Lukasiewicz),
        "goedel" | "godel" | "gödel" => Ok(StdLattice::Goedel),
        "product" | "prod" => Ok(StdLattice::Product),
        "boolean" | "bool" => Ok(StdLattice::Boolean),
        _ => Err(Error::UnknownLatticeKind(kind.to_string())),
    }
}

const UNIT_LANDMARKS: [f64; 9] = [0.0, 0.125, 0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.75, 0.875, 1.0];

impl Lattice for StdLattice {
    type Value = f64;

    fn name(&self) -> String {
        match self {
            StdLattice::Lukasiewicz => "lukasiewicz",
            StdLattice::Goedel => "goedel",
            StdLattice::Product => "product",
            StdLattice::Boolean => "boolean",
        }
        .to_string()
    }

    fn top(&self) -> f64 {
        1.0
    }

    fn bottom(&self) -> f64 {
        0.0
    }

    fn tensor(&self, x: f64, y: f64) -> f64 {
        match self {
            // keep ⊤ an exact unit despite rounding in x + y − 1
            StdLattice::Lukasiewicz if x == 1.0 => y,
            StdLattice::Lukasiewicz if y == 1.0 => x,
            StdLattice::Lukasiewicz => (x + y - 1.0).max(0.0),
            StdLattice::Goedel => x.min(y),
            StdLattice::Product | StdLattice::Boolean => x * y,
        }
    }

    fn implies(&self, x: f64, y: f64) -> f64 {
        if x <= y {
            return 1.0;
        }
        match self {
            StdLattice::Lukasiewicz => (1.0 - x + y).min(1.0),
            StdLattice::Goedel => y,
            // x > y >= 0 here, so the division is safe; x = 0 was handled above
            StdLattice::Product => y / x,
            StdLattice::Boolean => 0.0,
        }
    }

    fn meet(&self, x: f64, y: f64) -> f64 {
        x.min(y)
    }

    fn join(&self, x: f64, y: f64) -> f64 {
        x.max(y)
    }

    fn oplus(&self, x: f64, y: f64) -> Option<f64> {
        match self {
            StdLattice::Lukasiewicz => Some((x + y).min(1.0)),
            _ => None,
        }
    }

    fn has_oplus(&self) -> bool {
        matches!(self, StdLattice::Lukasiewicz)
    }

    fn approx_leq(&self, x: f64, y: f64, eps: f64) -> bool {
        x <= y + eps
    }

    fn contains(&self, x: f64) -> bool {
        match self {
            StdLattice::Boolean => x == 0.0 || x == 1.0,
            _ => (0.0..=1.0).contains(&x),
        }
    }

    fn parse_value(&self, s: &str) -> Result<f64> {
        let invalid = || Error::InvalidValue { value: s.to_string(), lattice: self.name() };
        let x = match (self, s.trim()) {
            (StdLattice::Boolean, "true") => 1.0,
            (StdLattice::Boolean, "false") => 0.0,
            _ => parse_real(s).ok_or_else(invalid)?,
        };
        if self.contains(x) {
            Ok(x)
        } else {
            Err(invalid())
        }
    }

    fn format_value(&self, x: f64) -> String {
        format_real(x)
    }

    fn random_value(&self, rng: &mut dyn RngCore) -> f64 {
        match self {
            StdLattice::Boolean => {
                if rng.gen_bool(0.5) {
                    1.0
                } else {
                    0.0
                }
            }
            _ => {
                if rng.gen_ratio(1, 8) {
                    UNIT_LANDMARKS[rng.gen_range(0..UNIT_LANDMARKS.len())]
                } else {
                    rng.gen::<f64>()
                }
            }
        }
    }

    fn elements(&self) -> Option<Vec<f64>> {
        match self {
            StdLattice::Boolean => Some(vec![0.0, 1.0]),
            _ => None,
        }
    }

    fn landmarks(&self) -> Vec<f64> {
        match self {
            StdLattice::Boolean => vec![0.0, 1.0],
            _ => UNIT_LANDMARKS.to_vec(),
        }
    }

    fn from_real(&self, x: f64) -> Option<f64> {
        self.contains(x).then_some(x)
    }

    fn to_real(&self, x: f64) -> Option<f64> {
        Some(x)
    }
}

/// Operation tables of a finite residuated lattice; elements are indices into `labels`.
#[derive(Debug, PartialEq)]
struct FiniteTable {
    name: String,
    labels: Vec<String>,
    leq: Vec<bool>,
    meet: Vec<u16>,
    join: Vec<u16>,
    tensor: Vec<u16>,
    implies: Vec<u16>,
    oplus: Option<Vec<u16>>,
    top: u16,
    bottom: u16,
}

/// How the monoid operation of a finite lattice is given.
#[derive(Debug, Clone)]
pub enum TensorSpec {
    /// ⊗ = ∧ (a Heyting algebra).
    Meet,
    /// Explicit entries `a ⊗ b = c`; products with ⊤ and ⊥ may be omitted.
    Table(Vec<(String, String, String)>),
}

/// A finite lattice supplied as explicit tables and validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteLattice {
    table: Arc<FiniteTable>,
}

impl FiniteLattice {
    /// `leq` lists generating pairs `a ≤ b`; reflexive-transitive closure is taken.
    pub fn new(
        name: &str,
        labels: Vec<String>,
        leq: &[(String, String)],
        tensor: TensorSpec,
        oplus: Option<Vec<(String, String, String)>>,
    ) -> Result<Self> {
        let bad = |m: String| Error::InvalidLatticeTable(m);
        let n = labels.len();
        if n == 0 {
            return Err(bad("no elements".into()));
        }
        if n > u16::MAX as usize {
            return Err(bad("too many elements".into()));
        }
        let idx = |s: &str| -> Result<usize> {
            labels
                .iter()
                .position(|l| l == s)
                .ok_or_else(|| bad(format!("unknown element `{s}`")))
        };
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(bad(format!("element `{l}` listed twice")));
            }
        }

        let mut le = vec![false; n * n];
        for i in 0..n {
            le[i * n + i] = true;
        }
        for (a, b) in leq {
            le[idx(a)? * n + idx(b)?] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if le[i * n + k] {
                    for j in 0..n {
                        if le[k * n + j] {
                            le[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                if le[i * n + j] && le[j * n + i] {
                    return Err(bad(format!("order is not antisymmetric at {} and {}", labels[i], labels[j])));
                }
            }
        }

        let extremum = |lower: bool| -> Result<u16> {
            (0..n)
                .find(|&i| (0..n).all(|j| if lower { le[i * n + j] } else { le[j * n + i] }))
                .map(|i| i as u16)
                .ok_or_else(|| bad(if lower { "no bottom element" } else { "no top element" }.into()))
        };
        let bottom = extremum(true)?;
        let top = extremum(false)?;

        // greatest lower / least upper bounds
        let mut meet = vec![0u16; n * n];
        let mut join = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                let lows: Vec<usize> = (0..n).filter(|&z| le[z * n + a] && le[z * n + b]).collect();
                let m = lows
                    .iter()
                    .copied()
                    .find(|&z| lows.iter().all(|&w| le[w * n + z]))
                    .ok_or_else(|| bad(format!("{} and {} have no meet", labels[a], labels[b])))?;
                let ups: Vec<usize> = (0..n).filter(|&z| le[a * n + z] && le[b * n + z]).collect();
                let j = ups
                    .iter()
                    .copied()
                    .find(|&z| ups.iter().all(|&w| le[z * n + w]))
                    .ok_or_else(|| bad(format!("{} and {} have no join", labels[a], labels[b])))?;
                meet[a * n + b] = m as u16;
                join[a * n + b] = j as u16;
            }
        }

        let fill = |entries: &[(String, String, String)], unit: u16, absorb: Option<u16>, what: &str| -> Result<Vec<u16>> {
            let mut t: Vec<Option<u16>> = vec![None; n * n];
            for x in 0..n {
                t[unit as usize * n + x] = Some(x as u16);
                t[x * n + unit as usize] = Some(x as u16);
                if let Some(z) = absorb {
                    t[z as usize * n + x] = Some(z);
                    t[x * n + z as usize] = Some(z);
                }
            }
            for (a, b, c) in entries {
                let (a, b, c) = (idx(a)?, idx(b)?, idx(c)? as u16);
                for (p, q) in [(a, b), (b, a)] {
                    match t[p * n + q] {
                        Some(old) if old != c => {
                            return Err(bad(format!(
                                "conflicting {what} entries for {} and {}",
                                labels[p], labels[q]
                            )))
                        }
                        _ => t[p * n + q] = Some(c),
                    }
                }
            }
            t.iter()
                .enumerate()
                .map(|(k, v)| v.ok_or_else(|| bad(format!("missing {what} entry for {} and {}", labels[k / n], labels[k % n]))))
                .collect()
        };
        let tensor = match tensor {
            TensorSpec::Meet => meet.clone(),
            TensorSpec::Table(entries) => fill(&entries, top, Some(bottom), "tensor")?,
        };
        let oplus = match oplus {
            Some(entries) => Some(fill(&entries, bottom, Some(top), "oplus")?),
            None => None,
        };

        // residuum: the largest z with a ⊗ z ≤ b; existence is checked by the law suite below
        let mut implies = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                let mut acc = bottom as usize;
                for z in 0..n {
                    if le[tensor[a * n + z] as usize * n + b] {
                        acc = join[acc * n + z] as usize;
                    }
                }
                implies[a * n + b] = acc as u16;
            }
        }

        let lattice = FiniteLattice {
            table: Arc::new(FiniteTable {
                name: name.to_string(),
                labels,
                leq: le,
                meet,
                join,
                tensor,
                implies,
                oplus,
                top,
                bottom,
            }),
        };
        let random = if lattice.len() > 40 { 20_000 } else { 0 };
        check_laws(&lattice, random, 0).map_err(|e| bad(e.to_string()))?;
        Ok(lattice)
    }

    pub fn labels(&self) -> &[String] {
        &self.table.labels
    }

    pub fn len(&self) -> usize {
        self.table.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.labels.is_empty()
    }

    fn at(&self, t: &[u16], x: u16, y: u16) -> u16 {
        t[x as usize * self.len() + y as usize]
    }
}

impl Lattice for FiniteLattice {
    type Value = u16;

    fn name(&self) -> String {
        self.table.name.clone()
    }
    fn top(&self) -> u16 {
        self.table.top
    }
    fn bottom(&self) -> u16 {
        self.table.bottom
    }
    fn tensor(&self, x: u16, y: u16) -> u16 {
        self.at(&self.table.tensor, x, y)
    }
    fn implies(&self, x: u16, y: u16) -> u16 {
        self.at(&self.table.implies, x, y)
    }
    fn meet(&self, x: u16, y: u16) -> u16 {
        self.at(&self.table.meet, x, y)
    }
    fn join(&self, x: u16, y: u16) -> u16 {
        self.at(&self.table.join, x, y)
    }
    fn oplus(&self, x: u16, y: u16) -> Option<u16> {
        self.table.oplus.as_ref().map(|t| self.at(t, x, y))
    }
    fn has_oplus(&self) -> bool {
        self.table.oplus.is_some()
    }
    fn approx_leq(&self, x: u16, y: u16, _eps: f64) -> bool {
        self.table.leq[x as usize * self.len() + y as usize]
    }
    fn contains(&self, x: u16) -> bool {
        (x as usize) < self.len()
    }
    fn parse_value(&self, s: &str) -> Result<u16> {
        self.table
            .labels
            .iter()
            .position(|l| l == s.trim())
            .map(|i| i as u16)
            .ok_or_else(|| Error::InvalidValue { value: s.to_string(), lattice: self.name() })
    }
    fn format_value(&self, x: u16) -> String {
        self.table.labels[x as usize].clone()
    }
    fn format_degree(&self, x: u16) -> String {
        format!("{} (element {})", self.table.labels[x as usize], x)
    }
    fn random_value(&self, rng: &mut dyn RngCore) -> u16 {
        rng.gen_range(0..self.len()) as u16
    }
    fn elements(&self) -> Option<Vec<u16>> {
        Some((0..self.len() as u16).collect())
    }
    fn landmarks(&self) -> Vec<u16> {
        (0..self.len() as u16).collect()
    }
}

/// Ω0 × Ω1 with componentwise operations and order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductLattice<A, B> {
    pub left: A,
    pub right: B,
}

pub fn product_lattice<A: Lattice, B: Lattice>(a: A, b: B) -> ProductLattice<A, B> {
    ProductLattice { left: a, right: b }
}

impl<A: Lattice, B: Lattice> ProductLattice<A, B> {
    /// The embedding λ ↦ (λ, ⊤).
    pub fn embed_left(&self, x: A::Value) -> (A::Value, B::Value) {
        (x, self.right.top())
    }
}

impl<A: Lattice, B: Lattice> Lattice for ProductLattice<A, B> {
    type Value = (A::Value, B::Value);

    fn name(&self) -> String {
        format!("{}x{}", self.left.name(), self.right.name())
    }
    fn top(&self) -> Self::Value {
        (self.left.top(), self.right.top())
    }
    fn bottom(&self) -> Self::Value {
        (self.left.bottom(), self.right.bottom())
    }
    fn tensor(&self, x: Self::Value, y: Self::Value) -> Self::Value {
        (self.left.tensor(x.0, y.0), self.right.tensor(x.1, y.1))
    }
    fn implies(&self, x: Self::Value, y: Self::Value) -> Self::Value {
        (self.left.implies(x.0, y.0), self.right.implies(x.1, y.1))
    }
    fn meet(&self, x: Self::Value, y: Self::Value) -> Self::Value {
        (self.left.meet(x.0, y.0), self.right.meet(x.1, y.1))
    }
    fn join(&self, x: Self::Value, y: Self::Value) -> Self::Value {
        (self.left.join(x.0, y.0), self.right.join(x.1, y.1))
    }
    fn oplus(&self, x: Self::Value, y: Self::Value) -> Option<Self::Value> {
        Some((self.left.oplus(x.0, y.0)?, self.right.oplus(x.1, y.1)?))
    }
    fn has_oplus(&self) -> bool {
        self.left.has_oplus() && self.right.has_oplus()
    }
    fn approx_leq(&self, x: Self::Value, y: Self::Value, eps: f64) -> bool {
        self.left.approx_leq(x.0, y.0, eps) && self.right.approx_leq(x.1, y.1, eps)
    }
    fn contains(&self, x: Self::Value) -> bool {
        self.left.contains(x.0) && self.right.contains(x.1)
    }
    fn parse_value(&self, s: &str) -> Result<Self::Value> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|r| r.split_once(';'))
            .ok_or_else(|| Error::InvalidValue { value: s.to_string(), lattice: self.name() })?;
        Ok((self.left.parse_value(inner.0)?, self.right.parse_value(inner.1)?))
    }
    fn format_value(&self, x: Self::Value) -> String {
        format!("({};{})", self.left.format_value(x.0), self.right.format_value(x.1))
    }
    fn random_value(&self, rng: &mut dyn RngCore) -> Self::Value {
        (self.left.random_value(rng), self.right.random_value(rng))
    }
    fn elements(&self) -> Option<Vec<Self::Value>> {
        let a = self.left.elements()?;
        let b = self.right.elements()?;
        Some(a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect())
    }
    fn landmarks(&self) -> Vec<Self::Value> {
        let b = self.right.landmarks();
        self.left
            .landmarks()
            .into_iter()
            .flat_map(|x| b.iter().map(move |&y| (x, y)))
            .collect()
    }
}

/// Sample of triples: exhaustive over landmarks (capped) followed by `random` draws.
fn sample_triples<L: Lattice>(lattice: &L, random: usize, seed: u64) -> Vec<[L::Value; 3]> {
    let marks = lattice.landmarks();
    let mut out = Vec::new();
    if marks.len() <= 40 {
        for &x in &marks {
            for &y in &marks {
                for &z in &marks {
                    out.push([x, y, z]);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        out.push([
            lattice.random_value(&mut rng),
            lattice.random_value(&mut rng),
            lattice.random_value(&mut rng),
        ]);
    }
    out
}

const LAW_EPS: f64 = 1e-12;

fn witness<L: Lattice>(l: &L, vals: &[L::Value]) -> String {
    let parts: Vec<String> = vals.iter().map(|v| l.format_value(*v)).collect();
    format!("({})", parts.join(", "))
}

/// Residuation z ≤ (x⇒y) ⇔ x⊗z ≤ y on `n` random triples plus the landmark grid.
/// Returns the number of triples checked.
pub fn check_residuation<L: Lattice>(lattice: &L, n: usize, seed: u64) -> Result<usize> {
    let triples = sample_triples(lattice, n, seed);
    for &[x, y, z] in &triples {
        let left = lattice.approx_leq(z, lattice.implies(x, y), LAW_EPS);
        let right = lattice.approx_leq(lattice.tensor(x, z), y, LAW_EPS);
        if left != right {
            return Err(Error::LawViolation {
                law: "residuation".into(),
                witness: witness(lattice, &[x, y, z]),
            });
        }
    }
    Ok(triples.len())
}

/// Lattice, monoid, monotonicity and residuation laws on a sample (exhaustive for finite carriers).
pub fn check_laws<L: Lattice>(lattice: &L, n: usize, seed: u64) -> Result<()> {
    let l = lattice;
    let eq = |a, b| l.approx_eq(a, b, LAW_EPS);
    let fail = |law: &str, vals: &[L::Value]| Error::LawViolation { law: law.into(), witness: witness(l, vals) };
    let (top, bot) = (l.top(), l.bottom());
    for &[x, y, z] in &sample_triples(l, n, seed) {
        if !l.approx_leq(bot, x, LAW_EPS) || !l.approx_leq(x, top, LAW_EPS) {
            return Err(fail("bounds", &[x]));
        }
        if !eq(l.meet(x, x), x) || !eq(l.join(x, x), x) {
            return Err(fail("idempotency", &[x]));
        }
        if !eq(l.meet(x, y), l.meet(y, x)) || !eq(l.join(x, y), l.join(y, x)) {
            return Err(fail("lattice commutativity", &[x, y]));
        }
        if !eq(l.meet(x, l.meet(y, z)), l.meet(l.meet(x, y), z)) || !eq(l.join(x, l.join(y, z)), l.join(l.join(x, y), z)) {
            return Err(fail("lattice associativity", &[x, y, z]));
        }
        if !eq(l.meet(x, l.join(x, y)), x) || !eq(l.join(x, l.meet(x, y)), x) {
            return Err(fail("absorption", &[x, y]));
        }
        if !eq(l.tensor(x, y), l.tensor(y, x)) {
            return Err(fail("tensor commutativity", &[x, y]));
        }
        if !eq(l.tensor(x, l.tensor(y, z)), l.tensor(l.tensor(x, y), z)) {
            return Err(fail("tensor associativity", &[x, y, z]));
        }
        if !eq(l.tensor(top, x), x) {
            return Err(fail("tensor unit", &[x]));
        }
        if l.leq(x, y) && !l.approx_leq(l.tensor(x, z), l.tensor(y, z), LAW_EPS) {
            return Err(fail("tensor monotonicity", &[x, y, z]));
        }
    }
    check_residuation(l, n, seed).map(|_| ())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimesOp {
    Tensor,
    Meet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlusOp {
    Oplus,
    Join,
}

impl TimesOp {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tensor" | "otimes" | "⊗" | "prod" | "product" | "times" | "*" | "·" => Ok(TimesOp::Tensor),
            "meet" | "and" | "min" | "∧" => Ok(TimesOp::Meet),
            _ => Err(Error::UnknownOperation(s.to_string())),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            TimesOp::Tensor => "⊗",
            TimesOp::Meet => "∧",
        }
    }
}

impl PlusOp {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "oplus" | "⊕" | "sum" | "bounded-sum" => Ok(PlusOp::Oplus),
            "join" | "or" | "max" | "∨" => Ok(PlusOp::Join),
            _ => Err(Error::UnknownOperation(s.to_string())),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            PlusOp::Oplus => "⊕",
            PlusOp::Join => "∨",
        }
    }
}

/// A semiring (Ω, ×, ⊤, +) selecting how relation weights multiply and aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct Flavor<L: Lattice> {
    lattice: L,
    times: TimesOp,
    plus: PlusOp,
    checked: bool,
    idempotent: bool,
}

/// Number of random triples used when validating a flavor, on top of the landmark grid.
const FLAVOR_SAMPLES: usize = 2000;

pub fn make_flavor<L: Lattice>(lattice: L, times: TimesOp, plus: PlusOp) -> Result<Flavor<L>> {
    Flavor::new(lattice, times, plus)
}

impl<L: Lattice> Flavor<L> {
    /// Validated construction: rejects combinations where times fails to distribute over plus.
    pub fn new(lattice: L, times: TimesOp, plus: PlusOp) -> Result<Self> {
        let mut f = Self::unchecked(lattice, times, plus)?;
        f.validate()?;
        f.checked = true;
        Ok(f)
    }

    /// Construction without the semiring checks, for deliberately non-distributive combinations.
    pub fn unchecked(lattice: L, times: TimesOp, plus: PlusOp) -> Result<Self> {
        if plus == PlusOp::Oplus && !lattice.has_oplus() {
            return Err(Error::UndefinedOperation { op: "oplus".into(), lattice: lattice.name() });
        }
        let mut f = Flavor { lattice, times, plus, checked: false, idempotent: true };
        f.idempotent = match plus {
            PlusOp::Join => true,
            PlusOp::Oplus => sample_triples(&f.lattice, 200, 7)
                .iter()
                .all(|t| f.lattice.approx_eq(f.plus(t[0], t[0]), t[0], LAW_EPS)),
        };
        Ok(f)
    }

    /// ⊗ and ∨ on the lattice: the default flavor.
    pub fn standard(lattice: L) -> Self {
        Self::unchecked(lattice, TimesOp::Tensor, PlusOp::Join).expect("join is always defined")
    }

    fn validate(&self) -> Result<()> {
        let l = &self.lattice;
        let fail = |law: &str, vals: &[L::Value]| Error::LawViolation { law: law.into(), witness: witness(l, vals) };
        for &[x, y, z] in &sample_triples(l, FLAVOR_SAMPLES, 11) {
            let lhs = self.times(x, self.plus(y, z));
            let rhs = self.plus(self.times(x, y), self.times(x, z));
            if !l.approx_eq(lhs, rhs, LAW_EPS) {
                return Err(Error::DistributivityViolation {
                    x: l.format_value(x),
                    y: l.format_value(y),
                    z: l.format_value(z),
                });
            }
            if !l.approx_eq(self.plus(x, self.plus(y, z)), self.plus(self.plus(x, y), z), LAW_EPS) {
                return Err(fail("plus associativity", &[x, y, z]));
            }
            if !l.approx_eq(self.plus(x, y), self.plus(y, x), LAW_EPS) {
                return Err(fail("plus commutativity", &[x, y]));
            }
            if !l.approx_eq(self.times(x, self.times(y, z)), self.times(self.times(x, y), z), LAW_EPS) {
                return Err(fail("times associativity", &[x, y, z]));
            }
            if !l.approx_eq(self.times(l.top(), x), x, LAW_EPS) {
                return Err(fail("times unit", &[x]));
            }
            if l.leq(x, y)
                && !(l.approx_leq(self.times(x, z), self.times(y, z), LAW_EPS)
                    && l.approx_leq(self.plus(x, z), self.plus(y, z), LAW_EPS))
            {
                return Err(fail("monotonicity", &[x, y, z]));
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> &L {
        &self.lattice
    }

    pub fn times_op(&self) -> TimesOp {
        self.times
    }

    pub fn plus_op(&self) -> PlusOp {
        self.plus
    }

    /// True when built through [`Flavor::new`], i.e. the semiring laws were sampled.
    pub fn is_checked(&self) -> bool {
        self.checked
    }

    /// λ + λ = λ on every sampled λ.
    pub fn plus_idempotent(&self) -> bool {
        self.idempotent
    }

    pub fn top(&self) -> L::Value {
        self.lattice.top()
    }

    pub fn bottom(&self) -> L::Value {
        self.lattice.bottom()
    }

    pub fn times(&self, x: L::Value, y: L::Value) -> L::Value {
        match self.times {
            TimesOp::Tensor => self.lattice.tensor(x, y),
            TimesOp::Meet => self.lattice.meet(x, y),
        }
    }

    pub fn plus(&self, x: L::Value, y: L::Value) -> L::Value {
        match self.plus {
            PlusOp::Join => self.lattice.join(x, y),
            PlusOp::Oplus => self.lattice.oplus(x, y).expect("oplus checked at construction"),
        }
    }

    pub fn describe(&self) -> String {
        format!("{}({},{})", self.lattice.name(), self.times.symbol(), self.plus.symbol())
    }
}

/// Parses `times=<op>,plus=<op>` (commas or whitespace between the two settings).
pub fn parse_flavor_ops(s: &str) -> Result<(TimesOp, PlusOp, bool)> {
    let mut times = TimesOp::Tensor;
    let mut plus = PlusOp::Join;
    let mut unchecked = false;
    for part in s.split(|c: char| c == ',' || c.is_whitespace()).filter(|p| !p.is_empty()) {
        match part.split_once('=') {
            Some(("times", v)) => times = TimesOp::parse(v)?,
            Some(("plus", v)) => plus = PlusOp::parse(v)?,
            None if part == "unchecked" => unchecked = true,
            _ => return Err(Error::InvalidParameter(format!("bad flavor setting `{part}`"))),
        }
    }
    Ok((times, plus, unchecked))
}
