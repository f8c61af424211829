//! Tab-separated relation files: a header of variable names, then one
//! tuple per line. Values are arbitrary strings without tabs or newlines.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use flowjoin_core::database::{Atom, Database};
use flowjoin_core::relation::Relation;
use flowjoin_core::value::{Interner, Value};
use flowjoin_core::vars::{VarNames, VarSet};

#[derive(Debug)]
pub enum TsvError {
    Io(String, io::Error),
    Format(String),
}

impl std::fmt::Display for TsvError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TsvError::Io(p, e) => write!(f, "{p}: {e}"),
            TsvError::Format(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for TsvError {}

/// Reads the rows for `atom`. When the header names exactly the atom's
/// variables the columns are matched by name, otherwise by position.
pub fn parse_relation(text: &str, atom: &Atom, names: &VarNames, values: &mut Interner, src: &str) -> Result<Relation, TsvError> {
    let mut lines = text.lines();
    let header: Vec<&str> = match lines.next() {
        Some(h) => h.split('\t').map(str::trim).collect(),
        None => return Err(TsvError::Format(format!("{src}: missing header line"))),
    };
    let arity = atom.cols.len();
    if header.len() != arity {
        return Err(TsvError::Format(format!("{src}: header has {} columns, atom {} has {arity}", header.len(), atom.name)));
    }
    let atom_names: Vec<&str> = atom.cols.iter().map(|&v| names.name(v)).collect();
    let by_name: Option<Vec<usize>> = atom_names.iter().map(|n| header.iter().position(|h| h == n)).collect();
    let order: Vec<usize> = by_name.unwrap_or_else(|| (0..arity).collect());
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != arity {
            return Err(TsvError::Format(format!("{src}:{}: expected {arity} fields, found {}", i + 2, fields.len())));
        }
        rows.push(order.iter().map(|&j| values.intern(fields[j])).collect::<Vec<Value>>());
    }
    Ok(Relation::from_columns(&atom.cols, rows))
}

/// Loads `DIR/<name>.tsv` for every body atom.
pub fn load_database(dir: &Path, body: &[Atom], names: &VarNames, values: &mut Interner) -> Result<Database, TsvError> {
    let mut db = Database::new();
    for a in body {
        let path = dir.join(format!("{}.tsv", a.name));
        let src = path.display().to_string();
        let text = fs::read_to_string(&path).map_err(|e| TsvError::Io(src.clone(), e))?;
        let rel = parse_relation(&text, a, names, values, &src)?;
        db.insert(a.clone(), rel).map_err(|e| TsvError::Format(e.to_string()))?;
    }
    Ok(db)
}

/// Renders a relation with columns in variable-id order.
pub fn render_relation(rel: &Relation, names: &VarNames, values: &Interner) -> String {
    render_columns(rel, &rel.vars().iter().collect::<Vec<_>>(), names, values)
}

/// Renders a relation with the given column order.
pub fn render_columns(rel: &Relation, cols: &[usize], names: &VarNames, values: &Interner) -> String {
    let mut out = String::new();
    let header: Vec<&str> = cols.iter().map(|&v| names.name(v)).collect();
    out.push_str(&header.join("\t"));
    out.push('\n');
    let vars = rel.vars();
    let pos: Vec<usize> = cols.iter().map(|&v| vars.rank(v).expect("column outside the relation")).collect();
    let mut lines: Vec<String> = rel
        .iter()
        .map(|row| {
            pos.iter()
                .map(|&p| {
                    let v = row[p];
                    if (v.0 as usize) < values.len() { values.resolve(v).to_string() } else { v.0.to_string() }
                })
                .collect::<Vec<_>>()
                .join("\t")
        })
        .collect();
    lines.sort();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

pub fn write_file(path: &Path, text: &str) -> Result<(), TsvError> {
    let src = path.display().to_string();
    let mut f = fs::File::create(path).map_err(|e| TsvError::Io(src.clone(), e))?;
    f.write_all(text.as_bytes()).map_err(|e| TsvError::Io(src, e))
}

/// Writes each relation to `DIR/<name>.tsv` with columns in atom order.
pub fn write_database(dir: &Path, db: &Database, names: &VarNames, values: &Interner) -> Result<(), TsvError> {
    fs::create_dir_all(dir).map_err(|e| TsvError::Io(dir.display().to_string(), e))?;
    for (a, r) in db.iter() {
        write_file(&dir.join(format!("{}.tsv", a.name)), &render_columns(r, &a.cols, names, values))?;
    }
    Ok(())
}

/// Reads `DIR/<head>.tsv` for each head, as written by `run-ddr --out-dir`.
pub fn load_heads(dir: &Path, heads: &[Atom], names: &VarNames, values: &mut Interner) -> Result<Vec<Relation>, TsvError> {
    heads
        .iter()
        .map(|h| {
            let path = dir.join(format!("{}.tsv", h.name));
            let src = path.display().to_string();
            let text = fs::read_to_string(&path).map_err(|e| TsvError::Io(src.clone(), e))?;
            let r = parse_relation(&text, h, names, values, &src)?;
            Ok(r)
        })
        .collect()
}

/// Whether `s` can be a field value.
pub fn valid_value(s: &str) -> bool {
    !s.contains(['\t', '\n', '\r'])
}

pub fn head_columns(a: &Atom) -> VarSet {
    a.vars()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_match_by_name() {
        let mut names = VarNames::new();
        let a = names.intern("A").unwrap();
        let b = names.intern("B").unwrap();
        let atom = Atom::new("R", vec![a, b]).unwrap();
        let mut values = Interner::new();
        let r = parse_relation("B\tA\nx\t1\ny\t2\n", &atom, &names, &mut values, "R").unwrap();
        assert_eq!(r.len(), 2);
        let text = render_columns(&r, &atom.cols, &names, &values);
        assert_eq!(text, "A\tB\n1\tx\n2\ty\n");
        let positional = parse_relation("u\tv\n1\tx\n", &atom, &names, &mut values, "R").unwrap();
        assert!(positional.contains(&[values.get("1").unwrap(), values.get("x").unwrap()]));
        assert!(parse_relation("A\tB\n1\n", &atom, &names, &mut values, "R").is_err());
    }
}
