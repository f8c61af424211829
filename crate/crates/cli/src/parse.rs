//! Text formats for rules, constraints, proof steps and decompositions.

use std::fmt;

use flowjoin_core::cq::TreeDecomposition;
use flowjoin_core::database::Atom;
use flowjoin_core::ddr::{Cq, Ddr};
use flowjoin_core::degree::{DegreeConstraints, MonTerm};
use flowjoin_core::shannon::ProofStep;
use flowjoin_core::vars::{VarNames, VarSet};

/// A syntax error with a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

/// A parsed rule: a conjunctive query when there is exactly one head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    Ddr(Ddr),
    Cq(Cq),
}

impl Query {
    pub fn as_ddr(&self) -> Ddr {
        match self {
            Query::Ddr(d) => d.clone(),
            Query::Cq(q) => q.as_ddr(),
        }
    }

    pub fn names(&self) -> &VarNames {
        match self {
            Query::Ddr(d) => &d.names,
            Query::Cq(q) => &q.names,
        }
    }

    pub fn body(&self) -> &[Atom] {
        match self {
            Query::Ddr(d) => &d.body,
            Query::Cq(q) => &q.body,
        }
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { text, pos: 0 }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        error_at(self.text, self.pos, msg)
    }

    fn skip_ws(&mut self) {
        loop {
            let rest = &self.text[self.pos..];
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('%') || trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{tok}`")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .char_indices()
            .find(|&(i, c)| !(c.is_alphanumeric() || c == '_' || (i > 0 && c == '\'')))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 || rest.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(self.error(format!("expected {what}")));
        }
        self.pos += len;
        Ok((start, &rest[..len]))
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.text.len()
    }
}

fn error_at(text: &str, pos: usize, msg: impl Into<String>) -> ParseError {
    let before = &text[..pos];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    ParseError { line, col, msg: msg.into() }
}

type RawAtom<'a> = (usize, &'a str, Vec<(usize, &'a str)>);

fn raw_atom<'a>(c: &mut Cursor<'a>) -> Result<RawAtom<'a>, ParseError> {
    let (at, name) = c.ident("a relation name")?;
    c.expect("(")?;
    let mut vars = Vec::new();
    if !c.eat(")") {
        loop {
            vars.push(c.ident("a variable")?);
            if c.eat(")") {
                break;
            }
            c.expect(",")?;
        }
    }
    Ok((at, name, vars))
}

/// Parses `head ("|" head)* ":-" atom ("," atom)* "."`. Body variables are
/// numbered in order of first appearance, then any head-only ones.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let mut c = Cursor::new(text);
    let mut heads = vec![raw_atom(&mut c)?];
    while c.eat("|") {
        heads.push(raw_atom(&mut c)?);
    }
    c.expect(":-")?;
    let mut body = vec![raw_atom(&mut c)?];
    while c.eat(",") {
        body.push(raw_atom(&mut c)?);
    }
    c.expect(".")?;
    if !c.at_end() {
        return Err(c.error("unexpected text after the final `.`"));
    }
    let mut names = VarNames::new();
    let build = |raw: &[RawAtom], names: &mut VarNames, allow_empty: bool| -> Result<Vec<Atom>, ParseError> {
        raw.iter()
            .map(|(at, name, vars)| {
                if vars.is_empty() && !allow_empty {
                    return Err(error_at(text, *at, format!("body atom {name} has no variables")));
                }
                let cols = vars
                    .iter()
                    .map(|(p, v)| names.intern(v).map_err(|e| error_at(text, *p, e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                Atom::new(*name, cols).map_err(|e| error_at(text, *at, e.to_string()))
            })
            .collect()
    };
    let body_atoms = build(&body, &mut names, false)?;
    let universe = body_atoms.iter().fold(VarSet::EMPTY, |s, a| s.union(a.vars()));
    for (_, name, vars) in &heads {
        for (p, v) in vars {
            if names.lookup(v).is_none_or(|id| !universe.contains(id)) {
                return Err(error_at(text, *p, format!("head {name} uses {v}, which appears in no body atom")));
            }
        }
    }
    let head_atoms = build(&heads, &mut names, true)?;
    for (i, h) in head_atoms.iter().enumerate() {
        if head_atoms[..i].iter().any(|g| g.vars() == h.vars()) {
            return Err(error_at(text, heads[i].0, format!("head {} repeats the variables of an earlier head", h.name)));
        }
    }
    let q = if head_atoms.len() == 1 {
        let head = head_atoms.into_iter().next().unwrap();
        Query::Cq(Cq::new(names, head, body_atoms).map_err(|e| error_at(text, 0, e.to_string()))?)
    } else {
        Query::Ddr(Ddr::new(names, head_atoms, body_atoms).map_err(|e| error_at(text, 0, e.to_string()))?)
    };
    Ok(q)
}

fn render_atom(names: &VarNames, a: &Atom) -> String {
    let vars: Vec<&str> = a.cols.iter().map(|&v| names.name(v)).collect();
    format!("{}({})", a.name, vars.join(","))
}

/// Inverse of [`parse_query`].
pub fn render_query(names: &VarNames, heads: &[Atom], body: &[Atom]) -> String {
    let h: Vec<String> = heads.iter().map(|a| render_atom(names, a)).collect();
    let b: Vec<String> = body.iter().map(|a| render_atom(names, a)).collect();
    format!("{} :- {}.", h.join(" | "), b.join(", "))
}

pub fn render_ddr(d: &Ddr) -> String {
    render_query(&d.names, &d.heads, &d.body)
}

fn var_list(c: &mut Cursor, names: &VarNames, stop: &[&str]) -> Result<VarSet, ParseError> {
    let mut s = VarSet::EMPTY;
    loop {
        if stop.iter().any(|t| c.text[c.pos..].trim_start().starts_with(t)) {
            return Ok(s);
        }
        let (p, v) = c.ident("a variable")?;
        let id = names.lookup(v).ok_or_else(|| error_at(c.text, p, format!("unknown variable {v}")))?;
        s = s.with(id);
        if !c.eat(",") {
            return Ok(s);
        }
    }
}

/// Parses constraint lines `deg(REL; Y1,..,Yk | X1,..,Xm) <= N` and
/// `card(REL) <= N`. Blank lines and `#` comments are skipped.
///
/// The relation must be a body atom whose variables include the term's; any
/// relation satisfying the bound may guard it at run time.
pub fn parse_constraints(text: &str, names: &VarNames, body: &[Atom]) -> Result<DegreeConstraints, ParseError> {
    let mut dc = DegreeConstraints::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let start = offset;
        offset += line.len();
        let body_text = line.split('#').next().unwrap();
        if body_text.trim().is_empty() {
            continue;
        }
        let mut c = Cursor { text: &text[..start + body_text.len()], pos: start };
        let (kp, kind) = c.ident("`deg` or `card`")?;
        c.expect("(")?;
        let (rp, rel) = c.ident("a relation name")?;
        let atoms: Vec<&Atom> = body.iter().filter(|a| a.name == rel).collect();
        if atoms.is_empty() {
            return Err(error_at(text, rp, format!("no body atom named {rel}")));
        }
        let terms: Vec<MonTerm> = match kind {
            "card" => atoms.iter().map(|a| MonTerm::unconditional(a.vars())).collect(),
            "deg" => {
                c.expect(";")?;
                let y = var_list(&mut c, names, &["|", ")"])?;
                let x = if c.eat("|") { var_list(&mut c, names, &[")"])? } else { VarSet::EMPTY };
                let t = MonTerm::new(y, x);
                if !atoms.iter().any(|a| t.all().is_subset(a.vars())) {
                    return Err(error_at(text, rp, format!("{rel} does not contain the constrained variables")));
                }
                vec![t]
            }
            _ => return Err(error_at(text, kp, format!("unknown constraint kind {kind}"))),
        };
        c.expect(")")?;
        c.expect("<=")?;
        c.skip_ws();
        let np = c.pos;
        let digits: String = c.text[np..].chars().take_while(char::is_ascii_digit).collect();
        let n: u64 = digits.parse().map_err(|_| error_at(text, np, "expected a positive integer bound"))?;
        c.pos += digits.len();
        if !c.at_end() {
            return Err(c.error("unexpected text after the bound"));
        }
        for t in terms {
            dc.insert(t, n).map_err(|e| error_at(text, kp, e.to_string()))?;
        }
    }
    Ok(dc)
}

/// One line per constraint, `card(..)` where a body atom matches exactly.
pub fn render_constraints(dc: &DegreeConstraints, names: &VarNames, body: &[Atom]) -> String {
    let mut out = String::new();
    for (t, n) in dc.iter() {
        let list = |s: VarSet| s.iter().map(|v| names.name(v)).collect::<Vec<_>>().join(",");
        let exact = body.iter().find(|a| t.is_unconditional() && a.vars() == t.y);
        let line = match exact {
            Some(a) => format!("card({}) <= {n}\n", a.name),
            None => {
                let a = body.iter().find(|a| t.all().is_subset(a.vars()));
                let rel = a.map_or("?", |a| a.name.as_str());
                if t.x.is_empty() {
                    format!("deg({rel}; {}) <= {n}\n", list(t.y))
                } else {
                    format!("deg({rel}; {} | {}) <= {n}\n", list(t.y), list(t.x))
                }
            }
        };
        out.push_str(&line);
    }
    out
}

fn term(c: &mut Cursor, names: &VarNames) -> Result<MonTerm, ParseError> {
    c.skip_ws();
    if c.eat("0") {
        return Ok(MonTerm::new(VarSet::EMPTY, VarSet::EMPTY));
    }
    c.expect("h(")?;
    let start = c.pos;
    let close = c.text[start..].find(')').ok_or_else(|| c.error("unclosed `h(`"))? + start;
    let inner = &c.text[start..close];
    let (y, x) = inner.split_once('|').unwrap_or((inner, ""));
    let set = |s: &str| -> Result<VarSet, ParseError> {
        if s.trim() == "0" {
            return Ok(VarSet::EMPTY);
        }
        names.parse_set(s).map_err(|e| error_at(c.text, start, e.to_string()))
    };
    let t = MonTerm::new(set(y)?, set(x)?);
    c.pos = close + 1;
    Ok(t)
}

/// Parses the line form written by [`ProofStep::render`].
pub fn parse_step(line: &str, names: &VarNames) -> Result<ProofStep, ParseError> {
    let mut c = Cursor::new(line);
    let (kp, kind) = c.ident("a step kind")?;
    let bad = |c: &Cursor| error_at(c.text, kp, format!("malformed {kind} step"));
    let step = match kind {
        "SUBMOD" => {
            let a = term(&mut c, names)?;
            c.expect("->")?;
            let b = term(&mut c, names)?;
            if a.y != b.y || !a.x.is_subset(b.x) {
                return Err(bad(&c));
            }
            ProofStep::Submodularity { y: a.y, x: a.x, z: b.x.difference(a.x) }
        }
        "COMP" => {
            let a = term(&mut c, names)?;
            c.expect("+")?;
            let b = term(&mut c, names)?;
            c.expect("->")?;
            let r = term(&mut c, names)?;
            if !a.is_unconditional() || b.x != a.y || r.y != a.y.union(b.y) {
                return Err(bad(&c));
            }
            ProofStep::Composition { x: a.y, y: b.y }
        }
        "DECOMP" => {
            let a = term(&mut c, names)?;
            c.expect("->")?;
            let b = term(&mut c, names)?;
            c.expect("+")?;
            let r = term(&mut c, names)?;
            if r.x != b.y || a.y != b.y.union(r.y) {
                return Err(bad(&c));
            }
            ProofStep::Decomposition { x: b.y, y: r.y }
        }
        "MONO" => {
            let a = term(&mut c, names)?;
            c.expect("->")?;
            let b = term(&mut c, names)?;
            if !b.y.is_subset(a.y) {
                return Err(bad(&c));
            }
            ProofStep::Monotonicity { x: b.y, y: a.y.difference(b.y) }
        }
        _ => return Err(error_at(line, kp, format!("unknown step kind {kind}"))),
    };
    if !c.at_end() {
        return Err(c.error("unexpected text after the step"));
    }
    Ok(step)
}

/// One step per non-blank line; `#` starts a comment.
pub fn parse_steps(text: &str, names: &VarNames) -> Result<Vec<ProofStep>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap();
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_step(line, names).map_err(|e| ParseError { line: i + 1, ..e })?);
    }
    Ok(out)
}

/// One decomposition per non-blank line: whitespace-separated bags, each a
/// comma-separated variable list (or run of one-letter names).
pub fn parse_tds(text: &str, names: &VarNames, free: VarSet) -> Result<Vec<TreeDecomposition>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap();
        if line.trim().is_empty() {
            continue;
        }
        let bags = line
            .split_whitespace()
            .map(|b| {
                names.parse_set(b).map_err(|e| ParseError { line: i + 1, col: 1, msg: e.to_string() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(TreeDecomposition::from_bags(bags, free));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use flowjoin_core::fixtures;

    #[test]
    fn two_head_rule() {
        let q = parse_query("U(A,B,C) | V(B,C,D) :- R(A,B), S(B,C), T(C,D).").unwrap();
        assert_eq!(q, Query::Ddr(fixtures::two_targets_path()));
    }

    #[test]
    fn single_head_is_a_cq() {
        let q = parse_query("Q(A,B) :- R(A,B).").unwrap();
        let Query::Cq(cq) = q else { panic!() };
        assert!(cq.is_full());
        let b = parse_query("Q() :- R(A,B), S(B,C).").unwrap();
        let Query::Cq(cq) = b else { panic!() };
        assert!(cq.is_boolean());
    }

    #[test]
    fn fixtures_round_trip() {
        for (_, d, _) in fixtures::catalog() {
            let text = render_ddr(&d);
            assert_eq!(parse_query(&text).unwrap().as_ddr(), d, "{text}");
        }
        let q = fixtures::hexagon_cq();
        assert_eq!(parse_query(&render_ddr(&q.as_ddr())).unwrap(), Query::Cq(q));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_query("Q(A) :- R(A,B)\n  S(B).").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        let e = parse_query("U(A) | V(A) :- R(A,B).").unwrap_err();
        assert!(e.msg.contains("repeats"), "{e}");
        let e = parse_query("Q(C) :- R(A,B).").unwrap_err();
        assert_eq!((e.line, e.col), (1, 3));
    }

    #[test]
    fn constraint_lines() {
        let d = fixtures::two_targets_path();
        let text = "card(R) <= 10\n# comment\ndeg(S; C | B) <= 3\ndeg(T; C,D) <= 7\n";
        let dc = parse_constraints(text, &d.names, &d.body).unwrap();
        assert_eq!(dc.len(), 3);
        let s = |t: &str| d.names.parse_set(t).unwrap();
        assert_eq!(dc.get(&MonTerm::new(s("C"), s("B"))), Some(3));
        assert_eq!(dc.get(&MonTerm::unconditional(s("AB"))), Some(10));
        let back = parse_constraints(&render_constraints(&dc, &d.names, &d.body), &d.names, &d.body).unwrap();
        assert_eq!(back, dc);
        let e = parse_constraints("card(R) <= 1\ndeg(S; A) <= 2\n", &d.names, &d.body).unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn steps_round_trip() {
        let (ddr, _, _, steps) = fixtures::hexagon_proof();
        for s in steps {
            assert_eq!(parse_step(&s.render(&ddr.names), &ddr.names).unwrap(), s);
        }
        let mono = ProofStep::Monotonicity { x: VarSet::EMPTY, y: ddr.names.parse_set("AB").unwrap() };
        assert_eq!(parse_step(&mono.render(&ddr.names), &ddr.names).unwrap(), mono);
    }
}
