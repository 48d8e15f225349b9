//! Łukasiewicz neural networks: evaluation, classification of neurons as
//! conjunctions or disjunctions of literals, formula extraction, and compilation
//! into multi-diagrams over a finite grid.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataio::query::{lambda_description, Dataset};
use crate::diagram::MultiDiagram;
use crate::error::{Error, Result};
use crate::lattice::{format_real, Flavor, Lattice, StdLattice};
use crate::omega::OmegaObject;
use crate::relation::{Attribute, Domain, Relation};

/// z = ψ_b(w₁x₁,…,wₙxₙ) = min(1, max(0, Σ wᵢxᵢ + b)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neuron {
    pub inputs: Vec<String>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub output: String,
}

impl Neuron {
    pub fn new(inputs: &[&str], weights: &[f64], bias: f64, output: &str) -> Self {
        Neuron {
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            weights: weights.to_vec(),
            bias,
            output: output.to_string(),
        }
    }
}

pub fn eval_neuron(n: &Neuron, inputs: &[f64]) -> Result<f64> {
    if inputs.len() != n.weights.len() {
        return Err(Error::ArityMismatch { expected: n.weights.len(), got: inputs.len() });
    }
    let s: f64 = n.weights.iter().zip(inputs).map(|(w, x)| w * x).sum::<f64>() + n.bias;
    Ok(s.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Literal {
    pub var: String,
    pub negated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    /// ¬x₁⊗…⊗¬xₙ⊗xₙ₊₁⊗…⊗xₘ
    Conjunctive(Vec<Literal>),
    /// ¬x₁⊕…⊕¬xₙ⊕xₙ₊₁⊕…⊕xₘ
    Disjunctive(Vec<Literal>),
    /// A single literal: both readings coincide.
    Both(Literal),
    Unclassified,
}

/// With n negative and p positive unit weights: b = −p+1 is conjunctive, b = n disjunctive.
pub fn classify_neuron(n: &Neuron) -> Classification {
    let mut lits = Vec::new();
    let (mut neg, mut pos) = (0i64, 0i64);
    for (x, &w) in n.inputs.iter().zip(&n.weights) {
        if w == 0.0 {
            continue;
        }
        if w == 1.0 {
            pos += 1;
        } else if w == -1.0 {
            neg += 1;
        } else {
            return Classification::Unclassified;
        }
        lits.push(Literal { var: x.clone(), negated: w < 0.0 });
    }
    if lits.is_empty() || n.inputs.len() != n.weights.len() || n.bias.fract() != 0.0 {
        return Classification::Unclassified;
    }
    let b = n.bias as i64;
    match (b == 1 - pos, b == neg) {
        (true, true) => Classification::Both(lits.remove(0)),
        (true, false) => Classification::Conjunctive(lits),
        (false, true) => Classification::Disjunctive(lits),
        (false, false) => Classification::Unclassified,
    }
}

/// Formulas over literals with Łukasiewicz ⊗ and ⊕.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Var(String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn literal(l: &Literal) -> Formula {
        let v = Formula::Var(l.var.clone());
        if l.negated {
            Formula::Not(Box::new(v))
        } else {
            v
        }
    }

    /// Łukasiewicz semantics: ¬x = 1−x, ⊗ bounded difference, ⊕ bounded sum.
    pub fn eval(&self, env: &dyn Fn(&str) -> Option<f64>) -> Result<f64> {
        let l = StdLattice::Lukasiewicz;
        Ok(match self {
            Formula::Var(v) => env(v).ok_or_else(|| Error::InvalidNetwork(format!("unbound variable `{v}`")))?,
            Formula::Not(f) => 1.0 - f.eval(env)?,
            Formula::And(fs) => fs.iter().try_fold(1.0, |acc, f| Ok::<_, Error>(l.tensor(acc, f.eval(env)?)))?,
            Formula::Or(fs) => fs.iter().try_fold(0.0, |acc, f| Ok::<_, Error>(l.oplus(acc, f.eval(env)?).expect("⊕")))?,
        })
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        fn walk(f: &Formula, out: &mut Vec<String>) {
            match f {
                Formula::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone())
                    }
                }
                Formula::Not(g) => walk(g, out),
                Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| walk(g, out)),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    fn fmt_nested(&self, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        match self {
            Formula::Var(v) => write!(f, "{v}"),
            Formula::Not(g) => {
                write!(f, "~")?;
                g.fmt_nested(f, true)
            }
            Formula::And(gs) | Formula::Or(gs) => {
                let op = if matches!(self, Formula::And(_)) { " & " } else { " | " };
                if nested {
                    write!(f, "(")?;
                }
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "{op}")?;
                    }
                    g.fmt_nested(f, true)?;
                }
                if nested {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_nested(f, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Input,
    Hidden,
    Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wire {
    pub id: String,
    pub role: Role,
}

/// A network of neurons connected by input, hidden and output wires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LnnNetwork {
    pub wires: Vec<Wire>,
    pub neurons: Vec<Neuron>,
}

impl LnnNetwork {
    /// Parses the JSON interchange format and validates the wiring.
    pub fn from_json(text: &str) -> Result<Self> {
        let net: LnnNetwork = serde_json::from_str(text)?;
        net.validate()?;
        Ok(net)
    }

    pub fn role(&self, wire: &str) -> Option<Role> {
        self.wires.iter().find(|w| w.id == wire).map(|w| w.role)
    }

    pub fn wires_with(&self, role: Role) -> Vec<&str> {
        self.wires.iter().filter(|w| w.role == role).map(|w| w.id.as_str()).collect()
    }

    /// Unique ids, one producer per non-input wire, no cycles.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Error::InvalidNetwork(m);
        for (i, w) in self.wires.iter().enumerate() {
            if self.wires[..i].iter().any(|x| x.id == w.id) {
                return Err(bad(format!("wire `{}` declared twice", w.id)));
            }
        }
        let mut producer: HashMap<&str, usize> = HashMap::new();
        for (k, n) in self.neurons.iter().enumerate() {
            if n.inputs.len() != n.weights.len() {
                return Err(Error::ArityMismatch { expected: n.inputs.len(), got: n.weights.len() });
            }
            if n.weights.iter().all(|&w| w == 0.0) {
                return Err(bad(format!("neuron producing `{}` has only zero weights", n.output)));
            }
            for x in n.inputs.iter().chain(std::iter::once(&n.output)) {
                if self.role(x).is_none() {
                    return Err(bad(format!("undeclared wire `{x}`")));
                }
            }
            if self.role(&n.output) == Some(Role::Input) {
                return Err(bad(format!("input wire `{}` is produced by a neuron", n.output)));
            }
            if producer.insert(&n.output, k).is_some() {
                return Err(bad(format!("wire `{}` is produced twice", n.output)));
            }
        }
        for w in &self.wires {
            if w.role != Role::Input && !producer.contains_key(w.id.as_str()) {
                return Err(bad(format!("wire `{}` is never produced", w.id)));
            }
        }
        self.topological_order().map(|_| ())
    }

    /// Neuron indices so that producers come before consumers.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let mut done: Vec<bool> = vec![false; self.neurons.len()];
        let mut ready: Vec<&str> = self.wires_with(Role::Input);
        let mut order = Vec::new();
        while order.len() < self.neurons.len() {
            let next = (0..self.neurons.len())
                .find(|&k| !done[k] && self.neurons[k].inputs.iter().all(|x| ready.contains(&x.as_str())));
            match next {
                Some(k) => {
                    done[k] = true;
                    ready.push(&self.neurons[k].output);
                    order.push(k);
                }
                None => return Err(Error::InvalidNetwork("wiring has a cycle".into())),
            }
        }
        Ok(order)
    }

    /// Values on every wire for the given input assignment.
    pub fn eval(&self, inputs: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>> {
        let mut vals = inputs.clone();
        for k in self.topological_order()? {
            let n = &self.neurons[k];
            let xs: Vec<f64> = n
                .inputs
                .iter()
                .map(|x| vals.get(x).copied().ok_or_else(|| Error::InvalidNetwork(format!("no value for `{x}`"))))
                .collect::<Result<_>>()?;
            vals.insert(n.output.clone(), eval_neuron(n, &xs)?);
        }
        Ok(vals)
    }
}

fn neuron_formula(n: &Neuron) -> Result<Formula> {
    Ok(match classify_neuron(n) {
        Classification::Both(l) => Formula::literal(&l),
        Classification::Conjunctive(ls) => Formula::And(ls.iter().map(Formula::literal).collect()),
        Classification::Disjunctive(ls) => Formula::Or(ls.iter().map(Formula::literal).collect()),
        Classification::Unclassified => return Err(Error::UnclassifiableNeuron(n.output.clone())),
    })
}

fn substitute(f: &Formula, defs: &BTreeMap<String, Formula>) -> Formula {
    match f {
        Formula::Var(v) => defs.get(v).cloned().unwrap_or_else(|| f.clone()),
        Formula::Not(g) => Formula::Not(Box::new(substitute(g, defs))),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| substitute(g, defs)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| substitute(g, defs)).collect()),
    }
}

/// A formula over input wires for every output wire, in declaration order.
pub fn extract_formula(net: &LnnNetwork) -> Result<Vec<(String, Formula)>> {
    net.validate()?;
    let mut defs: BTreeMap<String, Formula> = BTreeMap::new();
    for k in net.topological_order()? {
        let n = &net.neurons[k];
        let f = substitute(&neuron_formula(n)?, &defs);
        defs.insert(n.output.clone(), f);
    }
    Ok(net
        .wires_with(Role::Output)
        .into_iter()
        .map(|w| (w.to_string(), defs[w].clone()))
        .collect())
}

/// A value moved to the nearest grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Snap {
    pub wire: String,
    pub inputs: Vec<f64>,
    pub value: f64,
    pub snapped: f64,
}

/// Index of the nearest grid point; ties go to the lower point.
pub fn snap_to_grid(grid: &[f64], x: f64) -> usize {
    let mut best = 0;
    for (i, &g) in grid.iter().enumerate() {
        let (d, db) = ((g - x).abs(), (grid[best] - x).abs());
        if d < db || (d == db && g < grid[best]) {
            best = i;
        }
    }
    best
}

/// Anything that can be compiled into a crisp diagram on a grid.
#[derive(Debug, Clone)]
pub enum Model {
    Network(LnnNetwork),
    /// A formula computing the named output wire; `inputs` lists every input
    /// wire, including ones the formula ignores.
    Formula { inputs: Vec<String>, output: String, formula: Formula },
}

impl Model {
    fn as_network(&self) -> Result<(LnnNetwork, Option<&Formula>)> {
        match self {
            Model::Network(n) => Ok((n.clone(), None)),
            Model::Formula { inputs, output, formula } => {
                if let Some(v) = formula.variables().into_iter().find(|v| !inputs.contains(v)) {
                    return Err(Error::InvalidNetwork(format!("formula variable `{v}` is not an input wire")));
                }
                let mut wires: Vec<Wire> = inputs.iter().map(|id| Wire { id: id.clone(), role: Role::Input }).collect();
                wires.push(Wire { id: output.clone(), role: Role::Output });
                Ok((LnnNetwork { wires, neurons: Vec::new() }, Some(formula)))
            }
        }
    }
}

/// Grid domain with points sorted ascending and restricted to [0,1].
pub fn unit_grid(points: &[f64]) -> Result<Vec<f64>> {
    let mut g: Vec<f64> = points.iter().copied().filter(|x| (0.0..=1.0).contains(x)).collect();
    g.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    g.dedup();
    if g.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(g)
}

/// One vertex per wire (domain = grid) and one crisp map per neuron, with
/// outputs snapped to the grid.
pub fn network_to_diagram<L: Lattice>(
    model: &Model,
    grid: &[f64],
    flavor: &Flavor<L>,
) -> Result<(MultiDiagram<L>, Vec<Snap>)> {
    let grid = unit_grid(grid)?;
    let (net, formula) = model.as_network()?;
    if formula.is_none() {
        net.validate()?;
    }
    let l = flavor.lattice().clone();
    let dom = Domain::numeric(&grid)?;
    let mut d = MultiDiagram::new(flavor.clone());
    for w in &net.wires {
        d.add_vertex(&w.id, OmegaObject::crisp(l.clone(), vec![Attribute::new(&w.id, dom.clone())])?)?;
    }
    let mut snaps = Vec::new();
    let mut compile = |label: &str, inputs: &[String], output: &str, f: &dyn Fn(&[f64]) -> Result<f64>| -> Result<()> {
        let src: Vec<Attribute> = inputs.iter().map(|x| Attribute::new(x, dom.clone())).collect();
        let tgt = vec![Attribute::new(output, dom.clone())];
        let mut rel = Relation::new(l.clone(), src.clone(), tgt)?;
        let mut err = None;
        crate::relation::for_each_tuple(&src, |t| {
            let xs: Vec<f64> = t.iter().map(|&i| grid[i as usize]).collect();
            match f(&xs) {
                Ok(z) => {
                    let k = snap_to_grid(&grid, z);
                    if (grid[k] - z).abs() > 1e-12 {
                        snaps.push(Snap { wire: output.to_string(), inputs: xs, value: z, snapped: grid[k] });
                    }
                    let mut full = t.to_vec();
                    full.push(k as u32);
                    if let Err(e) = rel.set(full, l.top()) {
                        err = Some(e);
                    }
                }
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        let s: Vec<&str> = inputs.iter().map(String::as_str).collect();
        d.add_arrow(label, &s, &[output], rel)
    };
    match formula {
        None => {
            for k in net.topological_order()? {
                let n = &net.neurons[k];
                compile(&format!("n_{}", n.output), &n.inputs, &n.output, &|xs| eval_neuron(n, xs))?;
            }
        }
        Some(f) => {
            let vars = f.variables();
            let out = net.wires_with(Role::Output)[0].to_string();
            compile(&format!("n_{out}"), &vars, &out, &|xs| {
                f.eval(&|v| vars.iter().position(|x| x == v).map(|i| xs[i]))
            })?;
        }
    }
    Ok((d, snaps))
}

/// The extracted formula of a single-output network as a model over all of
/// the network's input wires.
pub fn formula_model(net: &LnnNetwork) -> Result<Model> {
    let mut fs = extract_formula(net)?;
    if fs.len() != 1 {
        return Err(Error::InvalidNetwork(format!("expected one output wire, found {}", fs.len())));
    }
    let (output, formula) = fs.remove(0);
    let inputs = net.wires_with(Role::Input).into_iter().map(String::from).collect();
    Ok(Model::Formula { inputs, output, formula })
}

/// [s̄ = i°∘lim D]_β for the diagram compiled from `model` on `grid`; `map`
/// sends data columns to wires.
pub fn description_fit<L: Lattice>(
    model: &Model,
    grid: &[f64],
    data: &Dataset<L>,
    map: &[(String, String)],
    flavor: &Flavor<L>,
) -> Result<L::Value> {
    let (d, _) = network_to_diagram(model, grid, flavor)?;
    Ok(lambda_description(&d, data, map, flavor.bottom(), 0.0)?.1)
}

/// Renders the snapping log compactly.
pub fn describe_snap(s: &Snap) -> String {
    let xs: Vec<String> = s.inputs.iter().map(|&x| format_real(x)).collect();
    format!("{}({}) = {} snapped to {}", s.wire, xs.join(","), format_real(s.value), format_real(s.snapped))
}
