//! Positive-existential formulas over the vector-space signature enriched
//! with bilinear-product relations: AST, parser, printer, conversion to
//! disjunctions of regular formulas, direct evaluation, and the compilation
//! of regular formulas into linear systems over Gram unknowns.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{parse_scalar_prefix, FieldSpec, Scalar};
use crate::linalg::{enumerate_vectors, solve, vec_add, vec_scale, zero_vector, AffineSolutionSet, Matrix, Vector};
use crate::space::{BilinearSpace, Flavor};

/// A linear combination of variables (the zero term is the empty map).
/// Coefficients are never zero and variables are kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    coeffs: BTreeMap<String, Scalar>,
}

impl Term {
    pub fn zero() -> Term {
        Term {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn var(name: impl Into<String>, spec: FieldSpec) -> Term {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.into(), spec.one());
        Term { coeffs }
    }

    pub fn scaled_var(name: impl Into<String>, coeff: Scalar) -> Term {
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(name.into(), coeff);
        }
        Term { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &BTreeMap<String, Scalar> {
        &self.coeffs
    }

    pub fn add(&self, other: &Term) -> Term {
        let mut coeffs = self.coeffs.clone();
        for (v, c) in &other.coeffs {
            let entry = match coeffs.remove(v) {
                Some(prev) => &prev + c,
                None => c.clone(),
            };
            if !entry.is_zero() {
                coeffs.insert(v.clone(), entry);
            }
        }
        Term { coeffs }
    }

    pub fn sub(&self, other: &Term) -> Term {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Term {
        Term {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Term {
        if s.is_zero() {
            return Term::zero();
        }
        Term {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), s * c)).collect(),
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &String> {
        self.coeffs.keys()
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> Term {
        Term {
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, c)| (map.get(v).cloned().unwrap_or_else(|| v.clone()), c.clone()))
                .collect(),
        }
    }

    /// Value of the term under an assignment of coordinate vectors.
    pub fn eval(
        &self,
        assignment: &BTreeMap<String, Vector>,
        spec: FieldSpec,
        dim: usize,
    ) -> Result<Vector> {
        let mut acc = zero_vector(spec, dim);
        for (v, c) in &self.coeffs {
            let vec = assignment
                .get(v)
                .ok_or_else(|| Error::UnboundVariable(v.clone()))?;
            acc = vec_add(&acc, &vec_scale(c, vec));
        }
        Ok(acc)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (v, c)) in self.coeffs.iter().enumerate() {
            let (neg, mag) = rational_sign_split(c);
            if neg {
                f.write_str("-")?;
            } else if i > 0 {
                f.write_str("+")?;
            }
            if mag.is_one() {
                write!(f, "{v}")?;
            } else {
                write!(f, "{mag}*{v}")?;
            }
        }
        Ok(())
    }
}

/// Split off a leading minus sign for display, for scalars with a genuine
/// rational sign (negative residues mod p stay as canonical residues).
fn rational_sign_split(c: &Scalar) -> (bool, Scalar) {
    use num_traits::{Signed, Zero};
    match c {
        Scalar::Rat(r) if r.is_negative() => (true, -c),
        Scalar::Quad { a, b, .. } if b.is_zero() && a.is_negative() => (true, -c),
        _ => (false, c.clone()),
    }
}

/// Positive-existential formula: atoms, conjunction, disjunction, truth
/// constants and existential quantification. Inequality is a primitive
/// positive atom, not a negation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Bottom,
    LinEq(Term, Term),
    LinNeq(Term, Term),
    BilEq(Term, Term, Scalar),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Vec<String>, Box<Formula>),
}

impl Formula {
    /// Flattening n-ary conjunction (associativity normal form).
    pub fn and(children: Vec<Formula>) -> Formula {
        let mut flat = Vec::new();
        for c in children {
            match c {
                Formula::And(cs) => flat.extend(cs),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Formula::Top,
            1 => flat.pop().unwrap(),
            _ => Formula::And(flat),
        }
    }

    /// Flattening n-ary disjunction.
    pub fn or(children: Vec<Formula>) -> Formula {
        let mut flat = Vec::new();
        for c in children {
            match c {
                Formula::Or(cs) => flat.extend(cs),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Formula::Bottom,
            1 => flat.pop().unwrap(),
            _ => Formula::Or(flat),
        }
    }

    pub fn exists(vars: Vec<String>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Exists(..) => false,
            Formula::And(cs) | Formula::Or(cs) => cs.iter().all(Formula::is_quantifier_free),
            _ => true,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Top | Formula::Bottom => {}
                Formula::LinEq(t, s) | Formula::LinNeq(t, s) => {
                    for v in t.vars().chain(s.vars()) {
                        if !bound.iter().any(|b| b == v) {
                            out.insert(v.clone());
                        }
                    }
                }
                Formula::BilEq(t, s, _) => {
                    for v in t.vars().chain(s.vars()) {
                        if !bound.iter().any(|b| b == v) {
                            out.insert(v.clone());
                        }
                    }
                }
                Formula::And(cs) | Formula::Or(cs) => {
                    for c in cs {
                        go(c, bound, out);
                    }
                }
                Formula::Exists(vs, body) => {
                    let depth = bound.len();
                    bound.extend(vs.iter().cloned());
                    go(body, bound, out);
                    bound.truncate(depth);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// All variable names occurring anywhere, free or bound.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(f: &Formula, out: &mut BTreeSet<String>) {
            match f {
                Formula::Top | Formula::Bottom => {}
                Formula::LinEq(t, s) | Formula::LinNeq(t, s) => {
                    out.extend(t.vars().cloned());
                    out.extend(s.vars().cloned());
                }
                Formula::BilEq(t, s, _) => {
                    out.extend(t.vars().cloned());
                    out.extend(s.vars().cloned());
                }
                Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| go(c, out)),
                Formula::Exists(vs, body) => {
                    out.extend(vs.iter().cloned());
                    go(body, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    /// Rename free occurrences of variables (targets must be fresh).
    pub fn rename_free(&self, map: &BTreeMap<String, String>) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Bottom => Formula::Bottom,
            Formula::LinEq(t, s) => Formula::LinEq(t.rename(map), s.rename(map)),
            Formula::LinNeq(t, s) => Formula::LinNeq(t.rename(map), s.rename(map)),
            Formula::BilEq(t, s, l) => Formula::BilEq(t.rename(map), s.rename(map), l.clone()),
            Formula::And(cs) => Formula::And(cs.iter().map(|c| c.rename_free(map)).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(|c| c.rename_free(map)).collect()),
            Formula::Exists(vs, body) => {
                let inner: BTreeMap<String, String> = map
                    .iter()
                    .filter(|(k, _)| !vs.contains(k))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                Formula::Exists(vs.clone(), Box::new(body.rename_free(&inner)))
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

/// Canonical concrete syntax; `parse_formula` inverts it.
pub fn print_formula(f: &Formula) -> String {
    fn conj_item(f: &Formula) -> String {
        match f {
            Formula::Or(_) | Formula::Exists(..) => format!("({})", top(f)),
            _ => top(f),
        }
    }
    fn disj_item(f: &Formula) -> String {
        match f {
            Formula::Exists(..) => format!("({})", top(f)),
            _ => top(f),
        }
    }
    fn top(f: &Formula) -> String {
        match f {
            Formula::Top => "T".into(),
            Formula::Bottom => "F".into(),
            Formula::LinEq(t, s) => format!("{t} = {s}"),
            Formula::LinNeq(t, s) => format!("{t} != {s}"),
            Formula::BilEq(t, s, l) => format!("[{t}, {s}] = {l}"),
            Formula::And(cs) => cs
                .iter()
                .map(conj_item)
                .collect::<Vec<_>>()
                .join(" & "),
            Formula::Or(cs) => cs
                .iter()
                .map(disj_item)
                .collect::<Vec<_>>()
                .join(" | "),
            Formula::Exists(vs, body) => {
                format!("E {}. {}", vs.join(" "), top(body))
            }
        }
    }
    top(f)
}

// ---------------------------------------------------------------------------
// parser
//
//   formula := disj ;  disj := conj ('|' conj)* ;  conj := unit ('&' unit)*
//   unit := 'E' var+ '.' unit | 'T' | 'F' | atom | '(' formula ')'
//   atom := term '=' term | term '!=' term | '[' term ',' term ']' '=' scalar
//   term := ['-'] addend (('+'|'-') addend)* ;  addend := [scalar '*'] var | '0'
//   var  := [A-Za-z_][A-Za-z0-9_]*
//
// '&' binds tighter than '|'; 'E' scopes maximally rightward until ')' or
// end of input. 'E', 'T' and 'F' are reserved words.
// ---------------------------------------------------------------------------

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    spec: FieldSpec,
}

pub fn parse_formula(text: &str, spec: FieldSpec) -> Result<Formula> {
    let mut p = Parser { text, pos: 0, spec };
    let f = p.disj()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.err("end of input, '&', or '|'"));
    }
    Ok(f)
}

impl<'a> Parser<'a> {
    fn err(&self, expected: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            expected: expected.into(),
        }
    }

    fn bytes(&self) -> &[u8] {
        self.text.as_bytes()
    }

    fn peek(&self) -> Option<u8> {
        self.bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8, what: &str) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(what))
        }
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut items = vec![self.conj()?];
        loop {
            self.skip_ws();
            if self.eat(b'|') {
                items.push(self.conj()?);
            } else {
                break;
            }
        }
        Ok(Formula::or(items))
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut items = vec![self.unit()?];
        loop {
            self.skip_ws();
            if self.eat(b'&') {
                items.push(self.unit()?);
            } else {
                break;
            }
        }
        Ok(Formula::and(items))
    }

    fn unit(&mut self) -> Result<Formula> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.err("a formula")),
            Some(b'(') => {
                self.pos += 1;
                let f = self.disj()?;
                self.skip_ws();
                self.expect(b')', "')'")?;
                Ok(f)
            }
            Some(b'[') => self.bilinear_atom(),
            _ => {
                if let Some(word) = self.peek_ident() {
                    match word.as_str() {
                        "T" => {
                            self.pos += 1;
                            return Ok(Formula::Top);
                        }
                        "F" => {
                            self.pos += 1;
                            return Ok(Formula::Bottom);
                        }
                        "E" => {
                            self.pos += 1;
                            return self.exists();
                        }
                        _ => {}
                    }
                }
                self.linear_atom()
            }
        }
    }

    fn exists(&mut self) -> Result<Formula> {
        let mut vars = Vec::new();
        loop {
            self.skip_ws();
            if self.eat(b'.') {
                if vars.is_empty() {
                    return Err(self.err("at least one bound variable"));
                }
                // maximal rightward scope: the body is a full disjunction
                let body = self.disj()?;
                return Ok(Formula::Exists(vars, Box::new(body)));
            }
            let v = self.var()?;
            if matches!(v.as_str(), "E" | "T" | "F") {
                return Err(self.err("a variable (E, T, F are reserved)"));
            }
            if vars.contains(&v) {
                return Err(self.err("distinct bound variables"));
            }
            vars.push(v);
        }
    }

    fn bilinear_atom(&mut self) -> Result<Formula> {
        self.expect(b'[', "'['")?;
        let t = self.term()?;
        self.skip_ws();
        self.expect(b',', "','")?;
        let s = self.term()?;
        self.skip_ws();
        self.expect(b']', "']'")?;
        self.skip_ws();
        self.expect(b'=', "'='")?;
        self.skip_ws();
        let (l, end) = parse_scalar_prefix(self.text, self.pos, self.spec)?;
        self.pos = end;
        Ok(Formula::BilEq(t, s, l))
    }

    fn linear_atom(&mut self) -> Result<Formula> {
        let t = self.term()?;
        self.skip_ws();
        if self.peek() == Some(b'!') {
            self.pos += 1;
            self.expect(b'=', "'=' after '!'")?;
            let s = self.term()?;
            Ok(Formula::LinNeq(t, s))
        } else if self.eat(b'=') {
            let s = self.term()?;
            Ok(Formula::LinEq(t, s))
        } else {
            Err(self.err("'=' or '!='"))
        }
    }

    fn term(&mut self) -> Result<Term> {
        self.skip_ws();
        let negate_first = self.eat(b'-');
        let mut acc = {
            let first = self.addend()?;
            if negate_first {
                first.neg()
            } else {
                first
            }
        };
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let a = self.addend()?;
                    acc = acc.add(&a);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let a = self.addend()?;
                    acc = acc.sub(&a);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    /// addend := scalar '*' var | var | '0', tried in that order with
    /// backtracking (quadratic-extension scalars contain '+'/'-').
    fn addend(&mut self) -> Result<Term> {
        self.skip_ws();
        let start = self.pos;
        if let Ok((coeff, after)) = parse_scalar_prefix(self.text, start, self.spec) {
            let mut probe = Parser {
                text: self.text,
                pos: after,
                spec: self.spec,
            };
            probe.skip_ws();
            if probe.eat(b'*') {
                probe.skip_ws();
                if let Ok(v) = probe.var() {
                    self.pos = probe.pos;
                    return Ok(Term::scaled_var(v, coeff));
                }
            }
        }
        self.pos = start;
        if let Ok(v) = self.var() {
            if matches!(v.as_str(), "E" | "T" | "F") {
                self.pos = start;
                return Err(self.err("a variable (E, T, F are reserved)"));
            }
            return Ok(Term::var(v, self.spec));
        }
        self.pos = start;
        if self.eat(b'0') {
            return Ok(Term::zero());
        }
        Err(self.err("an addend: coefficient*variable, variable, or 0"))
    }

    fn peek_ident(&self) -> Option<String> {
        let bytes = self.bytes();
        let mut end = self.pos;
        if end >= bytes.len() {
            return None;
        }
        if !(bytes[end].is_ascii_alphabetic() || bytes[end] == b'_') {
            return None;
        }
        end += 1;
        while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
            end += 1;
        }
        Some(self.text[self.pos..end].to_string())
    }

    fn var(&mut self) -> Result<String> {
        match self.peek_ident() {
            Some(name) => {
                self.pos += name.len();
                Ok(name)
            }
            None => Err(self.err("a variable name")),
        }
    }
}

// ---------------------------------------------------------------------------
// regular formulas and the Gram-unknown translation
// ---------------------------------------------------------------------------

/// An atomic formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    LinEq(Term, Term),
    LinNeq(Term, Term),
    BilEq(Term, Term, Scalar),
}

impl Atom {
    pub fn to_formula(&self) -> Formula {
        match self {
            Atom::LinEq(t, s) => Formula::LinEq(t.clone(), s.clone()),
            Atom::LinNeq(t, s) => Formula::LinNeq(t.clone(), s.clone()),
            Atom::BilEq(t, s, l) => Formula::BilEq(t.clone(), s.clone(), l.clone()),
        }
    }
}

/// An existentially quantified conjunction of atoms. `free_vars` is the
/// sorted list of free variables of the formula the disjunction was derived
/// from (shared by all its disjuncts); `bound_vars` are in quantifier order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularFormula {
    pub spec: FieldSpec,
    pub free_vars: Vec<String>,
    pub bound_vars: Vec<String>,
    pub atoms: Vec<Atom>,
}

impl RegularFormula {
    pub fn all_vars(&self) -> Vec<String> {
        let mut vars = self.free_vars.clone();
        vars.extend(self.bound_vars.iter().cloned());
        vars
    }

    pub fn to_formula(&self) -> Formula {
        let body = Formula::and(self.atoms.iter().map(Atom::to_formula).collect());
        Formula::exists(self.bound_vars.clone(), body)
    }
}

struct Freshener {
    used: BTreeSet<String>,
    counter: usize,
}

impl Freshener {
    fn fresh(&mut self, base: &str) -> String {
        loop {
            self.counter += 1;
            let name = format!("{}_{}", base, self.counter);
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

/// Convert any formula into an equivalent disjunction of regular formulas
/// (prenex disjunctive normal form with capture-avoiding renaming of bound
/// variables).
pub fn to_regular_disjunction(f: &Formula, spec: FieldSpec) -> Vec<RegularFormula> {
    let mut fresh = Freshener {
        used: f.all_vars(),
        counter: 0,
    };
    let free_vars: Vec<String> = f.free_vars().into_iter().collect();
    convert(f, &mut fresh)
        .into_iter()
        .map(|(bound_vars, atoms)| RegularFormula {
            spec,
            free_vars: free_vars.clone(),
            bound_vars,
            atoms,
        })
        .collect()
}

fn convert(f: &Formula, fresh: &mut Freshener) -> Vec<(Vec<String>, Vec<Atom>)> {
    match f {
        Formula::Top => vec![(Vec::new(), Vec::new())],
        Formula::Bottom => Vec::new(),
        Formula::LinEq(t, s) => vec![(Vec::new(), vec![Atom::LinEq(t.clone(), s.clone())])],
        Formula::LinNeq(t, s) => vec![(Vec::new(), vec![Atom::LinNeq(t.clone(), s.clone())])],
        Formula::BilEq(t, s, l) => vec![(
            Vec::new(),
            vec![Atom::BilEq(t.clone(), s.clone(), l.clone())],
        )],
        Formula::Or(cs) => cs.iter().flat_map(|c| convert(c, fresh)).collect(),
        Formula::And(cs) => {
            let mut acc: Vec<(Vec<String>, Vec<Atom>)> = vec![(Vec::new(), Vec::new())];
            for c in cs {
                let parts = convert(c, fresh);
                let mut next = Vec::new();
                for (lb, la) in &acc {
                    for (rb, ra) in &parts {
                        let mut bound = lb.clone();
                        bound.extend(rb.iter().cloned());
                        let mut atoms = la.clone();
                        atoms.extend(ra.iter().cloned());
                        next.push((bound, atoms));
                    }
                }
                acc = next;
            }
            acc
        }
        Formula::Exists(vs, body) => {
            let map: BTreeMap<String, String> =
                vs.iter().map(|v| (v.clone(), fresh.fresh(v))).collect();
            let renamed: Vec<String> = vs.iter().map(|v| map[v].clone()).collect();
            let body = body.rename_free(&map);
            convert(&body, fresh)
                .into_iter()
                .map(|(mut bound, atoms)| {
                    let mut all = renamed.clone();
                    all.append(&mut bound);
                    (all, atoms)
                })
                .collect()
        }
    }
}

/// The linear system over Gram unknowns `u_ij` (row-major, `i*n + j`)
/// extracted from the bilinear atoms of a regular formula, with the rows
/// forced by the flavor appended.
#[derive(Debug, Clone)]
pub struct GramSystem {
    pub var_count: usize,
    pub matrix: Matrix,
    pub rhs: Vector,
    pub flavor: Flavor,
}

impl GramSystem {
    pub fn unknown_index(&self, i: usize, j: usize) -> usize {
        i * self.var_count + j
    }

    pub fn solve(&self) -> Result<AffineSolutionSet> {
        solve(&self.matrix, &self.rhs)
    }
}

/// Build the Gram system of the bilinear atoms of `atoms` over the ordered
/// variable list `vars`; other atoms contribute nothing.
pub fn gram_system_from_atoms(
    atoms: &[Atom],
    vars: &[String],
    spec: FieldSpec,
    flavor: Flavor,
    include_flavor_rows: bool,
) -> Result<GramSystem> {
    let n = vars.len();
    let index: BTreeMap<&str, usize> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let mut rows: Vec<Vector> = Vec::new();
    let mut rhs: Vector = Vec::new();
    for atom in atoms {
        if let Atom::BilEq(t, s, mu) = atom {
            let mut row = zero_vector(spec, n * n);
            for (vt, ct) in t.coeffs() {
                for (vs, cs) in s.coeffs() {
                    let i = *index
                        .get(vt.as_str())
                        .ok_or_else(|| Error::UnboundVariable(vt.clone()))?;
                    let j = *index
                        .get(vs.as_str())
                        .ok_or_else(|| Error::UnboundVariable(vs.clone()))?;
                    row[i * n + j] = row[i * n + j].checked_add(&ct.checked_mul(cs)?)?;
                }
            }
            rows.push(row);
            rhs.push(mu.clone());
        }
    }
    if include_flavor_rows {
        match flavor {
            Flavor::Plain => {}
            Flavor::Symmetric => {
                for i in 0..n {
                    for j in i + 1..n {
                        let mut row = zero_vector(spec, n * n);
                        row[i * n + j] = spec.one();
                        row[j * n + i] = spec.from_i64(-1);
                        rows.push(row);
                        rhs.push(spec.zero());
                    }
                }
            }
            Flavor::Alternating => {
                for i in 0..n {
                    let mut row = zero_vector(spec, n * n);
                    row[i * n + i] = spec.one();
                    rows.push(row);
                    rhs.push(spec.zero());
                    for j in i + 1..n {
                        let mut row = zero_vector(spec, n * n);
                        row[i * n + j] = spec.one();
                        row[j * n + i] = spec.one();
                        rows.push(row);
                        rhs.push(spec.zero());
                    }
                }
            }
        }
    }
    let matrix = Matrix::from_rows(spec, n * n, &rows)?;
    Ok(GramSystem {
        var_count: n,
        matrix,
        rhs,
        flavor,
    })
}

/// Translate a regular formula containing no linear equations into its Gram
/// system. Inequality atoms are recorded on the regular formula itself and
/// contribute no rows.
pub fn compile_regular(r: &RegularFormula, flavor: Flavor) -> Result<GramSystem> {
    if r.atoms.iter().any(|a| matches!(a, Atom::LinEq(..))) {
        return Err(Error::ContainsLinearEquation);
    }
    gram_system_from_atoms(&r.atoms, &r.all_vars(), r.spec, flavor, true)
}

/// Outcome of the forced-value analysis of a regular formula over one or
/// two free variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForcedValue {
    Forced(Scalar),
    NotForced,
    Unsatisfiable,
}

/// Does the formula force the product of its (first two) free variables to
/// a single value? Works under the reading in which all variables denote
/// jointly generic vectors, so a trivial inequality `t != t` makes the
/// formula unsatisfiable outright.
pub fn forced_bilinear_value(r: &RegularFormula, flavor: Flavor) -> Result<ForcedValue> {
    if r.atoms.iter().any(|a| matches!(a, Atom::LinEq(..))) {
        return Err(Error::ContainsLinearEquation);
    }
    let coord = match r.free_vars.len() {
        1 => (0usize, 0usize),
        2 => (0usize, 1usize),
        _ => {
            return Err(Error::PreconditionFailed(
                "forced-value analysis needs one or two free variables".into(),
            ))
        }
    };
    for atom in &r.atoms {
        if let Atom::LinNeq(t, s) = atom {
            if t.sub(s).is_zero() {
                return Ok(ForcedValue::Unsatisfiable);
            }
        }
    }
    let system = compile_regular(r, flavor)?;
    let sol = system.solve()?;
    if !sol.consistent {
        return Ok(ForcedValue::Unsatisfiable);
    }
    let idx = system.unknown_index(coord.0, coord.1);
    match sol.determined_coordinate(idx)? {
        Some(v) => Ok(ForcedValue::Forced(v)),
        None => Ok(ForcedValue::NotForced),
    }
}

// ---------------------------------------------------------------------------
// named formulas
// ---------------------------------------------------------------------------

/// The linear-independence formula in `n` variables `x1..xn`, true on a
/// tuple in an existentially closed model iff the tuple has rank `n`.
/// Built by recursion: each level adds two witnesses that pair as 1 with
/// every earlier variable and disagree (1 against 0) on the new one.
pub fn theta(n: usize, spec: FieldSpec) -> Formula {
    assert!(n >= 1, "theta is defined for n >= 1");
    // Base case: a single vector is independent iff it is nonzero. The
    // recursion below only ever strengthens this.
    let mut acc = Formula::LinNeq(Term::var("x1", spec), Term::zero());
    let one = spec.one();
    let zero = spec.zero();
    for k in 1..n {
        let y = format!("y{k}");
        let z = format!("z{k}");
        let mut atoms = Vec::new();
        for i in 1..=k {
            let xi = format!("x{i}");
            atoms.push(Formula::BilEq(
                Term::var(&y, spec),
                Term::var(&xi, spec),
                one.clone(),
            ));
            atoms.push(Formula::BilEq(
                Term::var(&z, spec),
                Term::var(&xi, spec),
                one.clone(),
            ));
        }
        let next = format!("x{}", k + 1);
        atoms.push(Formula::BilEq(
            Term::var(&y, spec),
            Term::var(&next, spec),
            one.clone(),
        ));
        atoms.push(Formula::BilEq(
            Term::var(&z, spec),
            Term::var(&next, spec),
            zero.clone(),
        ));
        let block = Formula::exists(vec![y, z], Formula::and(atoms));
        acc = Formula::and(vec![acc, block]);
    }
    acc
}

/// The four-atom chain formula over free variables `x, y, xp, yp`, true in
/// an existentially closed model exactly when `[x, y] = [xp, yp]`.
pub fn semi_hausdorff_formula(spec: FieldSpec) -> Formula {
    let x = || Term::var("x", spec);
    let y = || Term::var("y", spec);
    let xp = || Term::var("xp", spec);
    let yp = || Term::var("yp", spec);
    let z = || Term::var("z", spec);
    let zp = || Term::var("zp", spec);
    let zero = spec.zero();
    Formula::exists(
        vec!["z".into(), "zp".into()],
        Formula::and(vec![
            Formula::BilEq(x(), y().sub(&z()), zero.clone()),
            Formula::BilEq(x().sub(&zp()), z(), zero.clone()),
            Formula::BilEq(zp(), z().sub(&yp()), zero.clone()),
            Formula::BilEq(zp().sub(&xp()), yp(), zero),
        ]),
    )
}

/// Quantifier-free linear independence over a finite field: the conjunction,
/// over all nonzero coefficient tuples, of the inequalities saying the
/// corresponding combination of `x1..xn` is nonzero.
pub fn qf_linear_independence(n: usize, spec: FieldSpec) -> Result<Formula> {
    if !spec.is_finite() {
        return Err(Error::InfiniteField);
    }
    let mut conjuncts = Vec::new();
    for coeffs in enumerate_vectors(spec, n)? {
        if coeffs.iter().all(Scalar::is_zero) {
            continue;
        }
        let mut term = Term::zero();
        for (i, c) in coeffs.iter().enumerate() {
            term = term.add(&Term::scaled_var(format!("x{}", i + 1), c.clone()));
        }
        conjuncts.push(Formula::LinNeq(term, Term::zero()));
    }
    Ok(Formula::and(conjuncts))
}

// ---------------------------------------------------------------------------
// direct evaluation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Quantifier-free evaluation in the given space.
    Qf,
    /// Full evaluation in the given space, quantifiers ranging over all its
    /// vectors. Finite fields only.
    Brute,
}

/// Truth of `f` in `space` itself under the assignment.
pub fn eval(
    f: &Formula,
    space: &BilinearSpace,
    assignment: &BTreeMap<String, Vector>,
    mode: EvalMode,
) -> Result<bool> {
    if mode == EvalMode::Qf && !f.is_quantifier_free() {
        return Err(Error::NotQuantifierFree);
    }
    if mode == EvalMode::Brute && !space.spec().is_finite() {
        return Err(Error::InfiniteField);
    }
    let mut asg = assignment.clone();
    eval_rec(f, space, &mut asg)
}

fn eval_rec(
    f: &Formula,
    space: &BilinearSpace,
    asg: &mut BTreeMap<String, Vector>,
) -> Result<bool> {
    let spec = space.spec();
    let dim = space.dim();
    match f {
        Formula::Top => Ok(true),
        Formula::Bottom => Ok(false),
        Formula::LinEq(t, s) => Ok(t.eval(asg, spec, dim)? == s.eval(asg, spec, dim)?),
        Formula::LinNeq(t, s) => Ok(t.eval(asg, spec, dim)? != s.eval(asg, spec, dim)?),
        Formula::BilEq(t, s, l) => {
            let tv = t.eval(asg, spec, dim)?;
            let sv = s.eval(asg, spec, dim)?;
            Ok(space.form(&tv, &sv)? == *l)
        }
        Formula::And(cs) => {
            for c in cs {
                if !eval_rec(c, space, asg)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(cs) => {
            for c in cs {
                if eval_rec(c, space, asg)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Exists(vs, body) => exists_rec(vs, body, space, asg),
    }
}

fn exists_rec(
    vars: &[String],
    body: &Formula,
    space: &BilinearSpace,
    asg: &mut BTreeMap<String, Vector>,
) -> Result<bool> {
    let Some((v, rest)) = vars.split_first() else {
        return eval_rec(body, space, asg);
    };
    let saved = asg.get(v).cloned();
    for w in enumerate_vectors(space.spec(), space.dim())? {
        asg.insert(v.clone(), w);
        if exists_rec(rest, body, space, asg)? {
            asg.remove(v);
            if let Some(orig) = saved {
                asg.insert(v.clone(), orig);
            }
            return Ok(true);
        }
    }
    asg.remove(v);
    if let Some(orig) = saved {
        asg.insert(v.clone(), orig);
    }
    Ok(false)
}
