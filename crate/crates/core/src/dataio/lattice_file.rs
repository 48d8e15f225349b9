//! Finite lattices from a small line-oriented table file:
//!
//! ```text
//! name   chain3
//! elements 0, h, 1
//! order  0<h, h<1
//! tensor meet          # or entries such as: tensor h*h=0
//! oplus  h+h=1         # optional strong disjunction entries
//! ```

use std::path::Path;

use crate::error::{Error, Result};
use crate::lattice::{FiniteLattice, TensorSpec};

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

fn triple(s: &str, op: char) -> Option<(String, String, String)> {
    let (lhs, c) = s.split_once('=')?;
    let (a, b) = lhs.split_once(op)?;
    Some((a.trim().into(), b.trim().into(), c.trim().into()))
}

pub fn parse_lattice_table(text: &str, path: &Path) -> Result<FiniteLattice> {
    let mut name = path.file_stem().map_or("finite".to_string(), |s| s.to_string_lossy().into_owned());
    let mut labels: Vec<String> = Vec::new();
    let mut leq: Vec<(String, String)> = Vec::new();
    let mut meet = false;
    let mut tensor: Vec<(String, String, String)> = Vec::new();
    let mut oplus: Option<Vec<(String, String, String)>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| Error::parse(path, i + 1, m);
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "name" => name = rest.to_string(),
            "elements" => labels.extend(split_list(rest).map(String::from)),
            "order" => {
                for p in split_list(rest) {
                    let (a, b) = p.split_once('<').ok_or_else(|| err("order pairs look like `a<b`"))?;
                    leq.push((a.trim().into(), b.trim().into()));
                }
            }
            "tensor" if rest == "meet" => meet = true,
            "tensor" => {
                for e in split_list(rest) {
                    tensor.push(triple(e, '*').ok_or_else(|| err("tensor entries look like `a*b=c`"))?);
                }
            }
            "oplus" => {
                let v = oplus.get_or_insert_with(Vec::new);
                for e in split_list(rest) {
                    v.push(triple(e, '+').ok_or_else(|| err("oplus entries look like `a+b=c`"))?);
                }
            }
            _ => return Err(err(&format!("unknown directive `{key}`"))),
        }
    }
    if meet && !tensor.is_empty() {
        return Err(Error::InvalidLatticeTable("`tensor meet` combined with explicit tensor entries".into()));
    }
    let spec = if meet || tensor.is_empty() { TensorSpec::Meet } else { TensorSpec::Table(tensor) };
    FiniteLattice::new(&name, labels, &leq, spec, oplus)
}

pub fn read_lattice_table(path: &Path) -> Result<FiniteLattice> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_lattice_table(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;

    #[test]
    fn three_element_lukasiewicz_chain() {
        let text = "name L3\nelements 0, h, 1\norder 0<h, h<1\ntensor h*h=0\noplus h+h=1\n";
        let l = parse_lattice_table(text, Path::new("l3.lat")).unwrap();
        assert_eq!(l.name(), "L3");
        let h = l.parse_value("h").unwrap();
        assert_eq!(l.format_value(l.tensor(h, h)), "0");
        assert_eq!(l.format_value(l.implies(h, l.bottom())), "h");
        assert_eq!(l.oplus(h, h).map(|v| l.format_value(v)), Some("1".into()));
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(parse_lattice_table("colour red\n", Path::new("x")), Err(Error::Parse { line: 1, .. })));
        let bad = "elements 0,a,1\norder 0<a,a<1\ntensor a*a=1\n";
        assert!(matches!(parse_lattice_table(bad, Path::new("x")), Err(Error::InvalidLatticeTable(_))));
    }
}
