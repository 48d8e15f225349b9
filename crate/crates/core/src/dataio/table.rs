//! Weighted tables: CSV with one column per attribute and a trailing `omega`.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::omega::Similarity;
use crate::relation::{Attribute, Domain, Relation, Tuple};

pub const WEIGHT_COLUMN: &str = "omega";

/// Raw rows: header cells and records, from a CSV source.
struct RawTable {
    header: Vec<String>,
    rows: Vec<(usize, Vec<String>)>,
}

fn read_raw(mut src: impl Read, path: &Path) -> Result<RawTable> {
    let mut text = String::new();
    src.read_to_string(&mut text).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(RawTable { header, rows })
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::io(path, e))
}

/// Tuples of `columns` (looked up by header name) with their weights; a missing
/// `omega` column gives every listed row ⊤, and repeated tuples are joined.
fn read_entries<L: Lattice>(
    raw: &RawTable,
    path: &Path,
    lattice: &L,
    columns: &[(String, Arc<Domain>)],
) -> Result<Vec<(Tuple, L::Value)>> {
    let has_weight = raw.header.last().map(String::as_str) == Some(WEIGHT_COLUMN);
    let data_cols = &raw.header[..raw.header.len() - has_weight as usize];
    let mut pos = Vec::with_capacity(columns.len());
    for (name, _) in columns {
        let p = data_cols.iter().position(|h| h == name).ok_or_else(|| {
            Error::ColumnMismatch(format!("{}: no column `{name}` (header {:?})", path.display(), raw.header))
        })?;
        pos.push(p);
    }
    if let Some(extra) = data_cols.iter().find(|h| !columns.iter().any(|(c, _)| c == *h)) {
        return Err(Error::ColumnMismatch(format!("{}: unexpected column `{extra}`", path.display())));
    }
    if data_cols.len() != columns.len() {
        return Err(Error::ColumnMismatch(format!("{}: repeated column in header", path.display())));
    }
    let mut out: Vec<(Tuple, L::Value)> = Vec::with_capacity(raw.rows.len());
    for (line, cells) in &raw.rows {
        let err = |m: String| Error::parse(path, *line, m);
        let mut t = Vec::with_capacity(columns.len());
        for ((name, dom), &p) in columns.iter().zip(&pos) {
            let cell = &cells[p];
            t.push(dom.lookup(cell).ok_or_else(|| err(format!("`{cell}` is not in the domain of `{name}`")))?);
        }
        let w = if has_weight {
            lattice.parse_value(&cells[cells.len() - 1]).map_err(|e| err(e.to_string()))?
        } else {
            lattice.top()
        };
        out.push((t, w));
    }
    Ok(out)
}

fn fill<L: Lattice>(rel: &mut Relation<L>, entries: Vec<(Tuple, L::Value)>) -> Result<()> {
    let l = rel.lattice().clone();
    for (t, w) in entries {
        let v = l.join(rel.get(&t), w);
        rel.set(t, v)?;
    }
    Ok(())
}

/// Column headers of a relation: attribute names, with `_1`/`_2` suffixes on
/// names occurring on both sides.
pub fn column_names<L: Lattice>(rel: &Relation<L>) -> Vec<String> {
    let src = rel.source_names();
    let tgt = rel.target_names();
    let both = |n: &str| src.contains(&n) && tgt.contains(&n);
    src.iter()
        .map(|n| if both(n) { format!("{n}_1") } else { n.to_string() })
        .chain(tgt.iter().map(|n| if both(n) { format!("{n}_2") } else { n.to_string() }))
        .collect()
}

/// Reads a relation with the given signature from any reader; `path` only labels errors.
pub fn read_relation_from<L: Lattice>(
    src: impl Read,
    path: &Path,
    lattice: &L,
    sources: &[Attribute],
    targets: &[Attribute],
) -> Result<Relation<L>> {
    let mut rel = Relation::new(lattice.clone(), sources.to_vec(), targets.to_vec())?;
    let columns: Vec<(String, Arc<Domain>)> =
        column_names(&rel).into_iter().zip(rel.attributes()).map(|(c, a)| (c, a.domain.clone())).collect();
    let raw = read_raw(src, path)?;
    let entries = read_entries(&raw, path, lattice, &columns)?;
    fill(&mut rel, entries)?;
    Ok(rel)
}

pub fn read_relation<L: Lattice>(
    path: &Path,
    lattice: &L,
    sources: &[Attribute],
    targets: &[Attribute],
) -> Result<Relation<L>> {
    read_relation_from(open(path)?, path, lattice, sources, targets)
}

pub fn read_distribution<L: Lattice>(path: &Path, lattice: &L, attrs: &[Attribute]) -> Result<Relation<L>> {
    read_relation(path, lattice, &[], attrs)
}

/// A similarity on `attrs` stored as its tabulation (`a_1, a_2, …, omega`).
pub fn read_similarity<L: Lattice>(path: &Path, lattice: &L, attrs: &[Attribute]) -> Result<Similarity<L>> {
    Similarity::explicit(read_relation(path, lattice, attrs, attrs)?)
}

/// Header names of a table file, without the weight column.
pub fn read_header(path: &Path) -> Result<Vec<String>> {
    let raw = read_raw(open(path)?, path)?;
    let mut h = raw.header;
    if h.last().map(String::as_str) == Some(WEIGHT_COLUMN) {
        h.pop();
    }
    Ok(h)
}

/// Distinct cell values per data column (in order of first appearance).
pub fn column_values(path: &Path) -> Result<Vec<(String, Vec<String>)>> {
    let raw = read_raw(open(path)?, path)?;
    let n = raw.header.len() - (raw.header.last().map(String::as_str) == Some(WEIGHT_COLUMN)) as usize;
    Ok((0..n)
        .map(|i| {
            let mut vals: Vec<String> = Vec::new();
            for (_, r) in &raw.rows {
                if !vals.contains(&r[i]) {
                    vals.push(r[i].clone());
                }
            }
            (raw.header[i].clone(), vals)
        })
        .collect())
}

/// Writes the non-⊥ entries in tuple order (domain order per column).
pub fn write_relation<L: Lattice>(rel: &Relation<L>, out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(out);
    let mut header = column_names(rel);
    header.push(WEIGHT_COLUMN.to_string());
    w.write_record(&header)?;
    for (t, v) in rel.entries() {
        let mut row = rel.tuple_labels(t);
        row.push(rel.lattice().format_value(v));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(())
}

pub fn relation_to_string<L: Lattice>(rel: &Relation<L>) -> String {
    let mut buf = Vec::new();
    write_relation(rel, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8")
}

pub fn write_relation_file<L: Lattice>(rel: &Relation<L>, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_relation(rel, f)
}

/// Numeric vectors, one per row; a non-numeric first row is taken as a header.
pub fn read_points(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        let vals: Option<Vec<f64>> = rec.iter().map(crate::lattice::parse_real).collect();
        match vals {
            Some(v) => out.push(v),
            None if i == 0 => continue,
            None => return Err(Error::parse(path, line, "non-numeric point coordinate")),
        }
    }
    if let Some(d) = out.first().map(Vec::len) {
        if out.iter().any(|p| p.len() != d) {
            return Err(Error::parse(path, 0, "points of different dimensions"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::StdLattice;

    fn ab() -> Vec<Attribute> {
        let d = Domain::range(2).unwrap();
        vec![Attribute::new("A", d.clone()), Attribute::new("B", d)]
    }

    #[test]
    fn round_trip() {
        let l = StdLattice::Product;
        let mut r = Relation::new(l, ab()[..1].to_vec(), ab()[1..].to_vec()).unwrap();
        r.set(vec![0, 1], 0.5).unwrap();
        r.set(vec![1, 1], 1.0 / 3.0).unwrap();
        let text = relation_to_string(&r);
        assert_eq!(text, "A,B,omega\n0,1,0.5\n1,1,0.333333333333\n");
        let back = read_relation_from(text.as_bytes(), Path::new("mem"), &l, &ab()[..1], &ab()[1..]).unwrap();
        assert!(back.approx_eq(&r, 1e-12).unwrap());
    }

    #[test]
    fn missing_weight_means_top_and_columns_by_name() {
        let text = "B,A\n1,0\n";
        let r = read_relation_from(text.as_bytes(), Path::new("mem"), &StdLattice::Boolean, &[], &ab()).unwrap();
        assert_eq!(r.get(&[0, 1]), 1.0);
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn endo_columns_are_suffixed() {
        let a = ab()[..1].to_vec();
        let text = "A_1,A_2,omega\n0,0,1\n1,1,1\n0,1,0.25\n1,0,0.25\n";
        let r = read_relation_from(text.as_bytes(), Path::new("mem"), &StdLattice::Goedel, &a, &a).unwrap();
        assert_eq!(r.get(&[0, 1]), 0.25);
        assert_eq!(column_names(&r), vec!["A_1", "A_2"]);
    }

    #[test]
    fn errors_name_the_line() {
        let text = "A,B,omega\n0,1,0.5\n0,7,1\n";
        let e = read_relation_from(text.as_bytes(), Path::new("t.csv"), &StdLattice::Product, &[], &ab()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = read_relation_from("A,omega\n0,1\n".as_bytes(), Path::new("t.csv"), &StdLattice::Product, &[], &ab())
            .unwrap_err();
        assert!(matches!(e, Error::ColumnMismatch(_)));
        let e = read_relation_from("A,B,omega\n0,1,1.5\n".as_bytes(), Path::new("t.csv"), &StdLattice::Product, &[], &ab())
            .unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }
}
