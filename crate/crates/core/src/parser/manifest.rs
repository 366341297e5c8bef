//! Line-oriented model manifests. See `docs/manifest-format.md`.

use std::collections::BTreeMap;

use super::expr::{parse_field_at, parse_scalar_at};
use super::Diagnostic;
use crate::algebra::{GaussianRational, RationalFunction};
use crate::atlas::{Atlas, Chart, CochainValue, Transition};
use crate::error::{Error, Result};

type RF = RationalFunction;

#[derive(Debug, Clone, PartialEq)]
pub enum DegreeExpectation {
    Declared(i64),
    Compute,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoliationDecl {
    pub name: String,
    /// Per chart, generators as components aligned with `Chart::vars`.
    pub generators: BTreeMap<String, Vec<Vec<RF>>>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapDecl {
    pub name: String,
    /// Per chart, components aligned with `Chart::vars`.
    pub components: BTreeMap<String, Vec<RF>>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectDecl {
    Foliation(FoliationDecl),
    Map(MapDecl),
}

impl ObjectDecl {
    pub fn name(&self) -> &str {
        match self {
            ObjectDecl::Foliation(f) => &f.name,
            ObjectDecl::Map(m) => &m.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointDecl {
    pub object: Option<String>,
    pub chart: String,
    /// Tangential coordinates of the point.
    pub coords: BTreeMap<String, GaussianRational>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub name: String,
    pub description: String,
    pub params: BTreeMap<String, GaussianRational>,
    pub atlas: Atlas,
    pub codim: usize,
    pub submanifold: Option<String>,
    pub objects: Vec<ObjectDecl>,
    pub points: Vec<PointDecl>,
    pub cochains: BTreeMap<String, CochainValue>,
    pub expect_degree: Option<DegreeExpectation>,
    pub expect_sum: Option<GaussianRational>,
}

const KEYWORDS: &[&str] =
    &["model", "description", "param", "chart", "transition", "submanifold", "foliation", "map", "point", "cochain", "expect"];

/// A `{ ... }` entry with its byte offset.
#[derive(Debug, Clone)]
struct Entry {
    text: String,
    at: usize,
}

#[derive(Debug, Clone)]
enum Stmt {
    Model(String),
    Description(String),
    Param { name: String, expr: Entry },
    Chart { name: String, normal: Vec<String>, tangential: Vec<String> },
    Transition { from: String, to: String, fwd: Vec<Entry>, inv: Vec<Entry> },
    Submanifold { name: String, codim: usize },
    Foliation { name: String, chart: String, gens: Vec<Entry> },
    Map { name: String, chart: String, comps: Vec<Entry> },
    Point { object: Option<String>, chart: String, coords: Vec<Entry> },
    Cochain { chart: String, entries: Vec<Entry> },
    ExpectDegree(Option<i64>),
    ExpectSum(Entry),
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line_starts: Vec<usize>,
}

type CResult<T> = std::result::Result<T, (usize, String)>;

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        let mut line_starts = vec![0];
        for (i, b) in src.bytes().enumerate() {
            if b == b'\n' {
                line_starts.push(i + 1);
            }
        }
        Cursor { src, pos: 0, line_starts }
    }

    fn line_col(&self, at: usize) -> (usize, usize) {
        let l = match self.line_starts.binary_search(&at) {
            Ok(k) => k,
            Err(k) => k - 1,
        };
        (l + 1, self.src[self.line_starts[l]..at].chars().count() + 1)
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn skip_inline_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t') | Some(b'\r')) {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> CResult<String> {
        self.skip_inline_ws();
        let start = self.pos;
        match self.peek() {
            Some(b) if b.is_ascii_alphabetic() => self.pos += 1,
            _ => return Err((start, "expected an identifier".to_string())),
        }
        while matches!(self.peek(), Some(b) if b.is_ascii_alphanumeric() || b == b'_') {
            self.pos += 1;
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> CResult<()> {
        self.skip_inline_ws();
        if self.eat(s) {
            Ok(())
        } else {
            Err((self.pos, format!("expected `{}`", s)))
        }
    }

    fn keyword(&mut self, kw: &str) -> CResult<()> {
        let at = self.pos;
        let w = self.ident()?;
        if w == kw {
            Ok(())
        } else {
            Err((at, format!("expected `{}`, found `{}`", kw, w)))
        }
    }

    fn rest_of_line(&mut self) -> Entry {
        self.skip_inline_ws();
        let start = self.pos;
        while !matches!(self.peek(), None | Some(b'\n')) {
            self.pos += 1;
        }
        Entry { text: self.src[start..self.pos].trim_end().to_string(), at: start }
    }

    fn end_of_line(&mut self) -> CResult<()> {
        self.skip_inline_ws();
        match self.peek() {
            None | Some(b'\n') => Ok(()),
            _ => Err((self.pos, "unexpected trailing text".to_string())),
        }
    }

    fn paren_list(&mut self, name: &str) -> CResult<Vec<String>> {
        self.keyword(name)?;
        self.expect("(")?;
        let mut out = Vec::new();
        self.skip_inline_ws();
        if self.eat(")") {
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            self.skip_inline_ws();
            if self.eat(")") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    /// `{ a; b; ... }` possibly spanning lines.
    fn block(&mut self) -> CResult<Vec<Entry>> {
        self.skip_ws();
        let open = self.pos;
        if !self.eat("{") {
            return Err((open, "expected `{`".to_string()));
        }
        let mut out = Vec::new();
        let mut start = self.pos;
        loop {
            match self.peek() {
                None => return Err((open, "unclosed `{`".to_string())),
                Some(b'{') => return Err((self.pos, "nested `{` is not allowed".to_string())),
                Some(b';') | Some(b'}') => {
                    let raw = &self.src[start..self.pos];
                    let lead = raw.len() - raw.trim_start().len();
                    if !raw.trim().is_empty() {
                        out.push(Entry { text: raw.trim().to_string(), at: start + lead });
                    }
                    let closing = self.peek() == Some(b'}');
                    self.pos += 1;
                    start = self.pos;
                    if closing {
                        return Ok(out);
                    }
                }
                Some(_) => self.pos += 1,
            }
        }
    }

    /// Skips to the next line that starts with a keyword.
    fn recover(&mut self) {
        loop {
            while !matches!(self.peek(), None | Some(b'\n')) {
                self.pos += 1;
            }
            if self.peek().is_none() {
                return;
            }
            self.pos += 1;
            let save = self.pos;
            self.skip_inline_ws();
            let rest = &self.src[self.pos..];
            let word: String = rest.chars().take_while(|c| c.is_ascii_alphanumeric() || *c == '_').collect();
            if KEYWORDS.contains(&word.as_str()) || rest.is_empty() {
                self.pos = save;
                return;
            }
        }
    }
}

fn strip_comments(src: &str) -> String {
    src.lines()
        .map(|l| match l.find('#') {
            Some(k) => format!("{}{}", &l[..k], " ".repeat(l.len() - k)),
            None => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn statement(c: &mut Cursor) -> CResult<Stmt> {
    let at = c.pos;
    let kw = c.ident()?;
    let st = match kw.as_str() {
        "model" => {
            let e = c.rest_of_line();
            if e.text.is_empty() {
                return Err((e.at, "expected a model name".to_string()));
            }
            Stmt::Model(e.text)
        }
        "description" => Stmt::Description(c.rest_of_line().text),
        "param" => {
            let name = c.ident()?;
            c.expect("=")?;
            Stmt::Param { name, expr: c.rest_of_line() }
        }
        "chart" => {
            let name = c.ident()?;
            let normal = c.paren_list("normal")?;
            let tangential = c.paren_list("tangential")?;
            c.end_of_line()?;
            Stmt::Chart { name, normal, tangential }
        }
        "transition" => {
            let from = c.ident()?;
            c.expect("->")?;
            let to = c.ident()?;
            let fwd = c.block()?;
            c.skip_ws();
            let here = c.pos;
            if c.ident().ok().as_deref() != Some("inverse") {
                return Err((here, format!("missing inverse block for transition {} -> {}", from, to)));
            }
            let inv = c.block()?;
            c.end_of_line()?;
            Stmt::Transition { from, to, fwd, inv }
        }
        "submanifold" => {
            let name = c.ident()?;
            c.keyword("codim")?;
            c.skip_inline_ws();
            let e = c.rest_of_line();
            let codim = e.text.parse().map_err(|_| (e.at, "expected a nonnegative integer".to_string()))?;
            Stmt::Submanifold { name, codim }
        }
        "foliation" => {
            let name = c.ident()?;
            c.keyword("in")?;
            let chart = c.ident()?;
            c.keyword("generators")?;
            let gens = c.block()?;
            c.end_of_line()?;
            Stmt::Foliation { name, chart, gens }
        }
        "map" => {
            let name = c.ident()?;
            c.keyword("in")?;
            let chart = c.ident()?;
            let comps = c.block()?;
            c.end_of_line()?;
            Stmt::Map { name, chart, comps }
        }
        "point" => {
            let w = c.ident()?;
            let object = if w == "in" {
                None
            } else {
                c.keyword("in")?;
                Some(w)
            };
            let chart = c.ident()?;
            let coords = c.block()?;
            c.end_of_line()?;
            Stmt::Point { object, chart, coords }
        }
        "cochain" => {
            let chart = c.ident()?;
            let entries = c.block()?;
            c.end_of_line()?;
            Stmt::Cochain { chart, entries }
        }
        "expect" => {
            let what_at = c.pos;
            match c.ident()?.as_str() {
                "degree" => {
                    let e = c.rest_of_line();
                    if e.text == "compute" {
                        Stmt::ExpectDegree(None)
                    } else {
                        let d = e.text.parse().map_err(|_| (e.at, "expected an integer or `compute`".to_string()))?;
                        Stmt::ExpectDegree(Some(d))
                    }
                }
                "sum" => Stmt::ExpectSum(c.rest_of_line()),
                w => return Err((what_at, format!("unknown expectation `{}`", w))),
            }
        }
        other => return Err((at, format!("unknown section `{}`", other))),
    };
    Ok(st)
}

/// Splits `lhs = rhs`; returns `(lhs, rhs, offset of rhs)`.
fn split_eq(e: &Entry) -> CResult<(String, String, usize)> {
    let k = e.text.find('=').ok_or((e.at, "expected `name = expression`".to_string()))?;
    let rhs = &e.text[k + 1..];
    let lead = rhs.len() - rhs.trim_start().len();
    Ok((e.text[..k].trim().to_string(), rhs.trim().to_string(), e.at + k + 1 + lead))
}

struct Resolver<'a> {
    cur: &'a Cursor<'a>,
    diags: Vec<Diagnostic>,
    params: BTreeMap<String, GaussianRational>,
}

impl<'a> Resolver<'a> {
    fn err(&mut self, at: usize, msg: String) {
        let (l, c) = self.cur.line_col(at);
        self.diags.push(Diagnostic::error(l, c, msg));
    }

    fn scalar(&mut self, text: &str, at: usize, vars: &[String]) -> Option<RF> {
        let (l, c) = self.cur.line_col(at);
        match parse_scalar_at(text, vars, &self.params, l, c) {
            Ok(r) => Some(r),
            Err(d) => {
                self.diags.push(d);
                None
            }
        }
    }

    fn constant(&mut self, text: &str, at: usize) -> Option<GaussianRational> {
        let r = self.scalar(text, at, &[])?;
        match r.as_constant() {
            Some(c) => Some(c),
            None => {
                self.err(at, "expected a constant".to_string());
                None
            }
        }
    }

    /// `var = expr` entries covering each of `targets` exactly once.
    fn assignments(&mut self, entries: &[Entry], targets: &[String], scope: &[String], primed: bool, what: &str, at: usize) -> Option<Vec<RF>> {
        let mut got: BTreeMap<String, RF> = BTreeMap::new();
        let mut ok = true;
        for e in entries {
            let (lhs, rhs, rat) = match split_eq(e) {
                Ok(v) => v,
                Err((a, m)) => {
                    self.err(a, m);
                    ok = false;
                    continue;
                }
            };
            let name = if primed {
                match lhs.strip_suffix('\'') {
                    Some(n) => n.trim().to_string(),
                    None => {
                        self.err(e.at, format!("expected `{}'` on the left of a map component", lhs));
                        ok = false;
                        continue;
                    }
                }
            } else {
                lhs
            };
            if !targets.contains(&name) {
                self.err(e.at, format!("`{}` is not a variable of {}", name, what));
                ok = false;
                continue;
            }
            if got.contains_key(&name) {
                self.err(e.at, format!("`{}` assigned twice", name));
                ok = false;
                continue;
            }
            match self.scalar(&rhs, rat, scope) {
                Some(r) => {
                    got.insert(name, r);
                }
                None => ok = false,
            }
        }
        if !ok {
            return None;
        }
        let missing: Vec<&String> = targets.iter().filter(|t| !got.contains_key(*t)).collect();
        if !missing.is_empty() {
            let names: Vec<&str> = missing.iter().map(|s| s.as_str()).collect();
            self.err(at, format!("{} does not assign {}", what, names.join(", ")));
            return None;
        }
        Some(targets.iter().map(|t| got.remove(t).expect("checked")).collect())
    }
}

/// Parses a manifest. `overrides` replace declared parameter values.
pub fn parse_manifest_with(text: &str, overrides: &BTreeMap<String, GaussianRational>) -> Result<ModelBundle> {
    let clean = strip_comments(text);
    let mut cur = Cursor::new(&clean);
    let mut stmts: Vec<(usize, Stmt)> = Vec::new();
    let mut diags = Vec::new();
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            break;
        }
        let at = cur.pos;
        match statement(&mut cur) {
            Ok(s) => stmts.push((at, s)),
            Err((pos, msg)) => {
                let (l, c) = cur.line_col(pos.min(clean.len()));
                diags.push(Diagnostic::error(l, c, msg));
                cur.recover();
            }
        }
    }
    let mut r = Resolver { cur: &cur, diags, params: BTreeMap::new() };

    let mut name = None;
    let mut description = String::new();
    let mut charts: Vec<Chart> = Vec::new();
    let mut submanifold = None;
    let mut declared_codim = None;
    let mut expect_degree = None;
    let mut expect_sum_entry = None;
    for (at, s) in &stmts {
        match s {
            Stmt::Model(n) => {
                if name.is_some() {
                    r.err(*at, "model declared twice".to_string());
                }
                name = Some(n.clone());
            }
            Stmt::Description(d) => description = d.clone(),
            Stmt::Param { name: p, expr } => {
                let v = match overrides.get(p) {
                    Some(v) => Some(v.clone()),
                    None => r.constant(&expr.text, expr.at),
                };
                if let Some(v) = v {
                    r.params.insert(p.clone(), v);
                }
            }
            Stmt::Chart { name: n, normal, tangential } => {
                if charts.iter().any(|c| &c.name == n) {
                    r.err(*at, format!("chart `{}` declared twice", n));
                    continue;
                }
                let all: Vec<&String> = normal.iter().chain(tangential).collect();
                if let Some(d) = all.iter().enumerate().find(|(k, v)| all[..*k].contains(v)) {
                    r.err(*at, format!("variable `{}` repeated in chart `{}`", d.1, n));
                    continue;
                }
                if all.iter().any(|v| v.as_str() == "i") {
                    r.err(*at, "`i` is the imaginary unit and cannot name a variable".to_string());
                    continue;
                }
                charts.push(Chart { name: n.clone(), normal: normal.clone(), tangential: tangential.clone() });
            }
            Stmt::Submanifold { name: n, codim } => {
                submanifold = Some(n.clone());
                declared_codim = Some((*codim, *at));
            }
            Stmt::ExpectDegree(d) => {
                expect_degree = Some(match d {
                    Some(k) => DegreeExpectation::Declared(*k),
                    None => DegreeExpectation::Compute,
                })
            }
            Stmt::ExpectSum(e) => expect_sum_entry = Some(e.clone()),
            _ => {}
        }
    }
    for p in overrides.keys() {
        if !r.params.contains_key(p) {
            r.diags.push(Diagnostic::error(1, 1, format!("override for undeclared parameter `{}`", p)));
        }
    }
    if name.is_none() {
        r.diags.push(Diagnostic::error(1, 1, "missing `model <name>` line".to_string()));
    }
    if charts.is_empty() {
        r.diags.push(Diagnostic::error(1, 1, "no charts declared".to_string()));
    }
    let codim = match declared_codim {
        Some((m, at)) => {
            for c in &charts {
                if c.codim() != m {
                    r.err(at, format!("inconsistent codimension: chart `{}` has {} normal variables, submanifold declares {}", c.name, c.codim(), m));
                }
            }
            m
        }
        None => {
            let m = charts.first().map(|c| c.codim()).unwrap_or(0);
            if let Some(c) = charts.iter().find(|c| c.codim() != m) {
                r.diags.push(Diagnostic::error(1, 1, format!("inconsistent codimension across charts (chart `{}`)", c.name)));
            }
            m
        }
    };
    if let Some(c) = charts.first() {
        if let Some(d) = charts.iter().find(|d| d.dim() != c.dim()) {
            r.diags.push(Diagnostic::error(1, 1, format!("chart `{}` has a different dimension", d.name)));
        }
    }
    let expect_sum = expect_sum_entry.and_then(|e| r.constant(&e.text, e.at));

    let chart_of = |n: &str| charts.iter().find(|c| c.name == n).cloned();
    let mut transitions = Vec::new();
    let mut first_transition_at = 0;
    let mut foliations: Vec<FoliationDecl> = Vec::new();
    let mut maps: Vec<MapDecl> = Vec::new();
    let mut order: Vec<String> = Vec::new();
    let mut points = Vec::new();
    let mut cochains = BTreeMap::new();
    for (at, s) in &stmts {
        let (l, _) = cur.line_col(*at);
        match s {
            Stmt::Transition { from, to, fwd, inv } => {
                let (Some(a), Some(b)) = (chart_of(from), chart_of(to)) else {
                    let bad = if chart_of(from).is_none() { from } else { to };
                    r.err(*at, format!("unknown chart `{}`", bad));
                    continue;
                };
                if transitions.is_empty() {
                    first_transition_at = *at;
                }
                let what = format!("transition {} -> {}", from, to);
                let f = r.assignments(fwd, &b.vars(), &a.vars(), false, &what, *at);
                let g = r.assignments(inv, &a.vars(), &b.vars(), false, &format!("inverse of {}", what), *at);
                if let (Some(forward), Some(backward)) = (f, g) {
                    transitions.push((*at, Transition { from: from.clone(), to: to.clone(), forward, backward }));
                }
            }
            Stmt::Foliation { name: n, chart, gens } => {
                let Some(c) = chart_of(chart) else {
                    r.err(*at, format!("unknown chart `{}`", chart));
                    continue;
                };
                let vars = c.vars();
                let mut fields = Vec::new();
                for g in gens {
                    let (gl, gc) = cur.line_col(g.at);
                    match parse_field_at(&g.text, &vars, &r.params, gl, gc) {
                        Ok(f) => fields.push(vars.iter().map(|v| f.get(v).cloned().unwrap_or_default()).collect()),
                        Err(d) => r.diags.push(d),
                    }
                }
                if fields.is_empty() {
                    r.err(*at, format!("foliation `{}` has no generators in chart `{}`", n, chart));
                    continue;
                }
                if maps.iter().any(|m| &m.name == n) {
                    r.err(*at, format!("`{}` already names a map", n));
                    continue;
                }
                match foliations.iter_mut().find(|f| &f.name == n) {
                    Some(f) => {
                        if f.generators.insert(chart.clone(), fields).is_some() {
                            r.err(*at, format!("foliation `{}` declared twice in chart `{}`", n, chart));
                        }
                    }
                    None => {
                        let mut generators = BTreeMap::new();
                        generators.insert(chart.clone(), fields);
                        foliations.push(FoliationDecl { name: n.clone(), generators, line: l });
                        order.push(n.clone());
                    }
                }
            }
            Stmt::Map { name: n, chart, comps } => {
                let Some(c) = chart_of(chart) else {
                    r.err(*at, format!("unknown chart `{}`", chart));
                    continue;
                };
                let vars = c.vars();
                let Some(f) = r.assignments(comps, &vars, &vars, true, &format!("map `{}`", n), *at) else {
                    continue;
                };
                if foliations.iter().any(|m| &m.name == n) {
                    r.err(*at, format!("`{}` already names a foliation", n));
                    continue;
                }
                match maps.iter_mut().find(|m| &m.name == n) {
                    Some(m) => {
                        if m.components.insert(chart.clone(), f).is_some() {
                            r.err(*at, format!("map `{}` declared twice in chart `{}`", n, chart));
                        }
                    }
                    None => {
                        let mut components = BTreeMap::new();
                        components.insert(chart.clone(), f);
                        maps.push(MapDecl { name: n.clone(), components, line: l });
                        order.push(n.clone());
                    }
                }
            }
            Stmt::Point { object, chart, coords } => {
                let Some(c) = chart_of(chart) else {
                    r.err(*at, format!("unknown chart `{}`", chart));
                    continue;
                };
                let mut pt = BTreeMap::new();
                for e in coords {
                    let (lhs, rhs, rat) = match split_eq(e) {
                        Ok(v) => v,
                        Err((a, m)) => {
                            r.err(a, m);
                            continue;
                        }
                    };
                    let Some(v) = r.constant(&rhs, rat) else { continue };
                    if c.normal.contains(&lhs) {
                        if !v.is_zero() {
                            r.err(e.at, format!("point is not on S: normal coordinate `{}` = {}", lhs, v));
                        }
                    } else if c.tangential.contains(&lhs) {
                        pt.insert(lhs, v);
                    } else {
                        r.err(e.at, format!("`{}` is not a variable of chart `{}`", lhs, chart));
                    }
                }
                if let Some(missing) = c.tangential.iter().find(|v| !pt.contains_key(*v)) {
                    r.err(*at, format!("point does not give tangential coordinate `{}`", missing));
                    continue;
                }
                points.push(PointDecl { object: object.clone(), chart: chart.clone(), coords: pt, line: l });
            }
            Stmt::Cochain { chart, entries } => {
                let Some(c) = chart_of(chart) else {
                    r.err(*at, format!("unknown chart `{}`", chart));
                    continue;
                };
                let mut rows = vec![vec![RF::zero(); c.codim()]; c.tangential.len()];
                for e in entries {
                    let (lhs, rhs, rat) = match split_eq(e) {
                        Ok(v) => v,
                        Err((a, m)) => {
                            r.err(a, m);
                            continue;
                        }
                    };
                    let idx = lhs.split_once('/').and_then(|(p, s)| {
                        let p = c.tangential.iter().position(|v| v == p.trim())?;
                        let s = c.normal.iter().position(|v| v == s.trim())?;
                        Some((p, s))
                    });
                    let Some((p, s)) = idx else {
                        r.err(e.at, format!("cochain entry must be `<tangential>/<normal>`, got `{}`", lhs));
                        continue;
                    };
                    if let Some(v) = r.scalar(&rhs, rat, &c.tangential) {
                        rows[p][s] = v;
                    }
                }
                match CochainValue::from_matrix(&c, rows) {
                    Ok(v) => {
                        cochains.insert(chart.clone(), v);
                    }
                    Err(e) => r.err(*at, e.to_string()),
                }
            }
            _ => {}
        }
    }
    for p in &points {
        if let Some(o) = &p.object {
            if !order.contains(o) {
                r.diags.push(Diagnostic::error(p.line, 1, format!("point refers to unknown object `{}`", o)));
            }
        }
    }

    let mut diags = r.diags;
    let atlas = if diags.is_empty() {
        let ts: Vec<Transition> = transitions.iter().map(|(_, t)| t.clone()).collect();
        match Atlas::new(charts, ts) {
            Ok(a) => Some(a),
            Err(e) => {
                let (l, c) = cur.line_col(first_transition_at);
                diags.push(Diagnostic::error(l, c, e.to_string()));
                None
            }
        }
    } else {
        None
    };
    if !diags.is_empty() {
        diags.sort_by_key(|d| (d.line, d.column));
        return Err(Error::Parse(diags));
    }
    let mut objects = Vec::new();
    for n in order {
        if let Some(f) = foliations.iter().find(|f| f.name == n) {
            objects.push(ObjectDecl::Foliation(f.clone()));
        } else if let Some(m) = maps.iter().find(|m| m.name == n) {
            objects.push(ObjectDecl::Map(m.clone()));
        }
    }
    Ok(ModelBundle {
        name: name.expect("checked"),
        description,
        params: r.params,
        atlas: atlas.expect("checked"),
        codim,
        submanifold,
        objects,
        points,
        cochains,
        expect_degree,
        expect_sum,
    })
}

pub fn parse_manifest(text: &str) -> Result<ModelBundle> {
    parse_manifest_with(text, &BTreeMap::new())
}
