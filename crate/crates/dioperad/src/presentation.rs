//! Presentations: generators, rational polynomials, rewrite rules, the
//! presentation file grammar, and termination certificates.

use crate::linalg;
use crate::trees::{
    self, AritySignature, Color, GenId, GeneratorSymbol, Mode, MonomialOrder, Node, OrderKind,
    TermParser, TreeMonomial,
};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exact rational coefficient. `BigRational` keeps fractions reduced with a
/// positive denominator, which is exactly the spec'd invariant.
pub type Coefficient = BigRational;

pub fn coeff_int(n: i64) -> Coefficient {
    BigRational::from_integer(n.into())
}

pub fn format_coeff(c: &Coefficient) -> String {
    if c.denom() == &num_bigint::BigInt::from(1) {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// A rational linear combination of tree monomials of one arity signature.
/// Terms are kept merged, zero-free and sorted descending by the canonical
/// order (pathlex over declaration order), so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: Vec<(Coefficient, TreeMonomial)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolynomialError {
    MixedSignatures,
    SignatureMismatch,
}

impl fmt::Display for PolynomialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolynomialError::MixedSignatures => write!(f, "terms mix arity signatures"),
            PolynomialError::SignatureMismatch => write!(f, "arity signature mismatch"),
        }
    }
}

fn canonical_order(gens: &[GeneratorSymbol]) -> MonomialOrder {
    MonomialOrder::declaration(OrderKind::PathLex, gens)
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn monomial(m: TreeMonomial) -> Self {
        Polynomial { terms: vec![(Coefficient::one(), m)] }
    }

    pub fn term(c: Coefficient, m: TreeMonomial) -> Self {
        if c.is_zero() {
            Polynomial::zero()
        } else {
            Polynomial { terms: vec![(c, m)] }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Coefficient, TreeMonomial)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Coefficient, TreeMonomial)> {
        self.terms
    }

    /// Leading term in the canonical order (the first stored term).
    pub fn leading(&self) -> Option<&(Coefficient, TreeMonomial)> {
        self.terms.first()
    }

    /// Largest monomial under an arbitrary order.
    pub fn leading_under<'a>(
        &'a self,
        order: &MonomialOrder,
        gens: &[GeneratorSymbol],
    ) -> Option<&'a (Coefficient, TreeMonomial)> {
        self.terms.iter().max_by(|a, b| order.compare(&a.1, &b.1, gens))
    }

    pub fn signature(&self, gens: &[GeneratorSymbol]) -> Option<AritySignature> {
        self.terms.iter().find_map(|(_, m)| m.signature(gens))
    }

    pub fn scaled(&self, c: &Coefficient) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(k, m)| (k * c, m.clone())).collect() }
    }

    pub fn add(&self, other: &Polynomial, gens: &[GeneratorSymbol]) -> Polynomial {
        let mut raw: Vec<(Coefficient, TreeMonomial)> = self.terms.clone();
        raw.extend(other.terms.iter().cloned());
        canonicalize_polynomial(raw, gens).expect("adding canonical polynomials")
    }

    pub fn sub(&self, other: &Polynomial, gens: &[GeneratorSymbol]) -> Polynomial {
        self.add(&other.scaled(&-Coefficient::one()), gens)
    }

    pub fn support_contains(&self, m: &TreeMonomial) -> bool {
        self.terms.iter().any(|(_, t)| t == m)
    }
}

/// Merge repeats, drop zeros, sort by the canonical order (descending).
/// Idempotent. Errors when the terms mix arity signatures.
pub fn canonicalize_polynomial(
    raw: Vec<(Coefficient, TreeMonomial)>,
    gens: &[GeneratorSymbol],
) -> Result<Polynomial, PolynomialError> {
    let mut sig: Option<AritySignature> = None;
    let mut arity: Option<usize> = None;
    for (_, m) in &raw {
        let n = m.leaf_count();
        if let Some(a) = arity {
            if a != n {
                return Err(PolynomialError::MixedSignatures);
            }
        } else {
            arity = Some(n);
        }
        if let Some(s) = m.signature(gens) {
            if let Some(prev) = &sig {
                if prev != &s {
                    return Err(PolynomialError::MixedSignatures);
                }
            } else {
                sig = Some(s);
            }
        }
    }
    let mut map: BTreeMap<TreeMonomial, Coefficient> = BTreeMap::new();
    for (c, m) in raw {
        let e = map.entry(m).or_insert_with(Coefficient::zero);
        *e += c;
    }
    let order = canonical_order(gens);
    let mut terms: Vec<(Coefficient, TreeMonomial)> =
        map.into_iter().filter(|(_, c)| !c.is_zero()).map(|(m, c)| (c, m)).collect();
    terms.sort_by(|a, b| order.compare(&b.1, &a.1, gens));
    Ok(Polynomial { terms })
}

/// Replace an embedded pattern occurrence by a polynomial: substitute each
/// replacement monomial into the cut, carrying coefficients through.
pub fn replace(
    host: &TreeMonomial,
    pattern: &TreeMonomial,
    emb: &trees::Embedding,
    rhs: &Polynomial,
    gens: &[GeneratorSymbol],
) -> Result<Polynomial, PolynomialError> {
    if let (Some(ps), Some(rs)) = (pattern.signature(gens), rhs.signature(gens)) {
        if ps != rs {
            return Err(PolynomialError::SignatureMismatch);
        }
    }
    let raw: Vec<(Coefficient, TreeMonomial)> = rhs
        .terms()
        .iter()
        .map(|(c, m)| (c.clone(), trees::replace_monomial(host, pattern, emb, m)))
        .collect();
    canonicalize_polynomial(raw, gens)
}

// ---------------------------------------------------------------------------
// Rules, certificates, presentations
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub name: String,
    pub lhs: TreeMonomial,
    pub rhs: Polynomial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    DottedInternalEdges,
    /// Rank of the color-stripped monomial under a shape order. Generators
    /// strip by name prefix (text before the first `_`) and arity.
    ShapeRank(OrderKind),
}

impl MeasureKind {
    fn token(&self) -> String {
        match self {
            MeasureKind::DottedInternalEdges => "dotted_internal_edges".into(),
            MeasureKind::ShapeRank(k) => format!("shape_rank:{}", k.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Order(MonomialOrder),
    Measure(Vec<MeasureKind>),
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub mode: Mode,
    pub generators: Vec<GeneratorSymbol>,
    pub rules: Vec<RewriteRule>,
    pub certificate: Certificate,
}

impl Presentation {
    pub fn gen_by_name(&self, name: &str) -> Option<GenId> {
        self.generators.iter().position(|g| g.name == name).map(|i| GenId(i as u32))
    }

    pub fn order(&self) -> Option<&MonomialOrder> {
        match &self.certificate {
            Certificate::Order(o) => Some(o),
            _ => None,
        }
    }

    pub fn parse_term(&self, src: &str) -> Result<TreeMonomial, trees::ParseError> {
        trees::parse_term(src, &self.generators, self.mode)
    }

    /// Compare full monomials under the termination certificate; `Less`
    /// means strictly smaller, which every reduction step must produce.
    pub fn certificate_compare(&self, a: &TreeMonomial, b: &TreeMonomial) -> Option<Ordering> {
        match &self.certificate {
            Certificate::Order(o) => Some(o.compare(a, b, &self.generators)),
            Certificate::Measure(ms) => Some(self.measure_compare(ms, a, b)),
            Certificate::None => None,
        }
    }

    fn measure_compare(&self, ms: &[MeasureKind], a: &TreeMonomial, b: &TreeMonomial) -> Ordering {
        for m in ms {
            let c = match m {
                MeasureKind::DottedInternalEdges => a
                    .dotted_internal_edges(&self.generators)
                    .cmp(&b.dotted_internal_edges(&self.generators)),
                MeasureKind::ShapeRank(kind) => {
                    let (stripped_gens, map) = self.stripped_table();
                    let order = MonomialOrder::declaration(*kind, &stripped_gens);
                    let sa = strip_monomial(a, &map);
                    let sb = strip_monomial(b, &map);
                    order.compare(&sa, &sb, &stripped_gens)
                }
            };
            if c != Ordering::Equal {
                return c;
            }
        }
        Ordering::Equal
    }

    /// Color-stripped generator table: one generator per (name prefix,
    /// arity), in first-occurrence order, plus the per-generator map.
    pub fn stripped_table(&self) -> (Vec<GeneratorSymbol>, Vec<GenId>) {
        let mut table: Vec<GeneratorSymbol> = Vec::new();
        let mut keys: Vec<(String, usize)> = Vec::new();
        let mut map = Vec::new();
        for g in &self.generators {
            let prefix = g.name.split('_').next().unwrap_or(&g.name).to_string();
            let key = (prefix.clone(), g.arity());
            let idx = match keys.iter().position(|k| *k == key) {
                Some(i) => i,
                None => {
                    keys.push(key);
                    table.push(GeneratorSymbol::new(
                        prefix,
                        vec![Color::Straight; g.arity()],
                        Color::Straight,
                    ));
                    table.len() - 1
                }
            };
            map.push(GenId(idx as u32));
        }
        (table, map)
    }
}

/// Same tree with generators replaced by their color-stripped versions.
pub fn strip_monomial(t: &TreeMonomial, map: &[GenId]) -> TreeMonomial {
    fn go(n: &Node, map: &[GenId]) -> Node {
        match n {
            Node::Leaf(l) => Node::Leaf(*l),
            Node::Vertex { gen, children } => Node::Vertex {
                gen: map[gen.idx()],
                children: children.iter().map(|c| go(c, map)).collect(),
            },
        }
    }
    TreeMonomial::new(go(&t.root, map), t.mode)
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PresentationError {
    Syntax { line: usize, message: String },
    DuplicateGenerator(String),
    UnknownGenerator { line: usize, name: String },
    InvalidRule { rule: String, message: String },
    CertificateViolation { rule: String, monomial: String },
    NoOrderDeclared { line: usize },
    ZeroWeightGenerator(String),
}

impl fmt::Display for PresentationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PresentationError::Syntax { line, message } => {
                write!(f, "line {line}: {message}")
            }
            PresentationError::DuplicateGenerator(n) => write!(f, "duplicate generator '{n}'"),
            PresentationError::UnknownGenerator { line, name } => {
                write!(f, "line {line}: unknown generator '{name}'")
            }
            PresentationError::InvalidRule { rule, message } => {
                write!(f, "rule '{rule}': {message}")
            }
            PresentationError::CertificateViolation { rule, monomial } => write!(
                f,
                "rule '{rule}': right-hand monomial {monomial} does not decrease under the declared certificate"
            ),
            PresentationError::NoOrderDeclared { line } => {
                write!(f, "line {line}: rel requires a declared order to orient")
            }
            PresentationError::ZeroWeightGenerator(n) => {
                write!(f, "generator '{n}' must have weight >= 1")
            }
        }
    }
}

impl std::error::Error for PresentationError {}

pub fn validate_presentation(p: &Presentation) -> Result<(), PresentationError> {
    let mut seen = std::collections::BTreeSet::new();
    for g in &p.generators {
        if !seen.insert(g.name.clone()) {
            return Err(PresentationError::DuplicateGenerator(g.name.clone()));
        }
        if g.weight == 0 {
            return Err(PresentationError::ZeroWeightGenerator(g.name.clone()));
        }
    }
    for r in &p.rules {
        let err = |message: String| PresentationError::InvalidRule {
            rule: r.name.clone(),
            message,
        };
        trees::validate(&r.lhs, &p.generators).map_err(|v| err(format!("lhs: {v}")))?;
        if r.lhs.mode != p.mode {
            return Err(err("lhs mode differs from presentation mode".into()));
        }
        for (_, m) in r.rhs.terms() {
            trees::validate(m, &p.generators).map_err(|v| err(format!("rhs: {v}")))?;
            if m.mode != p.mode {
                return Err(err("rhs mode differs from presentation mode".into()));
            }
        }
        if let (Some(ls), Some(rs)) =
            (r.lhs.signature(&p.generators), r.rhs.signature(&p.generators))
        {
            if ls != rs {
                return Err(err("lhs and rhs signatures differ".into()));
            }
        }
        if r.rhs.support_contains(&r.lhs) {
            return Err(err("lhs occurs in rhs support".into()));
        }
        if p.certificate != Certificate::None {
            for (_, m) in r.rhs.terms() {
                if p.certificate_compare(m, &r.lhs) != Some(Ordering::Less) {
                    return Err(PresentationError::CertificateViolation {
                        rule: r.name.clone(),
                        monomial: trees::format_term(m, &p.generators),
                    });
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Orientation
// ---------------------------------------------------------------------------

/// Orient a single relation (`poly = 0`) into a monic rule on its largest
/// monomial under `order`.
pub fn orient_relation(
    poly: &Polynomial,
    order: &MonomialOrder,
    gens: &[GeneratorSymbol],
    name: String,
) -> Option<RewriteRule> {
    let (c, lead) = poly.leading_under(order, gens)?.clone();
    let rest: Vec<(Coefficient, TreeMonomial)> = poly
        .terms()
        .iter()
        .filter(|(_, m)| *m != lead)
        .map(|(k, m)| (-(k / &c), m.clone()))
        .collect();
    let rhs = canonicalize_polynomial(rest, gens).ok()?;
    Some(RewriteRule { name, lhs: lead, rhs })
}

/// Deduplicate relations by reduced row echelon form per (signature, weight)
/// block and orient each surviving row on its largest monomial.
pub fn orient_relations_block(
    relations: &[Polynomial],
    order: &MonomialOrder,
    gens: &[GeneratorSymbol],
    name_prefix: &str,
) -> Vec<RewriteRule> {
    // Group by (signature, weight).
    let mut blocks: BTreeMap<(Option<AritySignature>, u32), Vec<&Polynomial>> = BTreeMap::new();
    for p in relations {
        if p.is_zero() {
            continue;
        }
        let sig = p.signature(gens);
        let w = p.terms()[0].1.weight(gens);
        blocks.entry((sig, w)).or_default().push(p);
    }
    let mut rules = Vec::new();
    for (_, polys) in blocks {
        // Columns: monomials sorted descending under `order`.
        let mut monos: Vec<TreeMonomial> = Vec::new();
        for p in &polys {
            for (_, m) in p.terms() {
                if !monos.contains(m) {
                    monos.push(m.clone());
                }
            }
        }
        monos.sort_by(|a, b| order.compare(b, a, gens));
        let col = |m: &TreeMonomial| monos.iter().position(|x| x == m).unwrap();
        let rows: Vec<linalg::SparseRow> = polys
            .iter()
            .map(|p| p.terms().iter().map(|(c, m)| (col(m), c.clone())).collect())
            .collect();
        for row in linalg::rref(rows) {
            let raw: Vec<(Coefficient, TreeMonomial)> =
                row.into_iter().map(|(j, c)| (c, monos[j].clone())).collect();
            let poly = canonicalize_polynomial(raw, gens).expect("block rows are homogeneous");
            let name = format!("{name_prefix}{}", rules.len() + 1);
            if let Some(rule) = orient_relation(&poly, order, gens, name) {
                rules.push(rule);
            }
        }
    }
    rules
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

struct LineParser<'a> {
    line_no: usize,
    inner: TermParser<'a>,
}

impl<'a> LineParser<'a> {
    fn new(line_no: usize, src: &'a str) -> Self {
        LineParser { line_no, inner: TermParser::new(src) }
    }

    fn err(&self, message: impl Into<String>) -> PresentationError {
        PresentationError::Syntax { line: self.line_no, message: message.into() }
    }

    fn coefficient(&mut self) -> Result<Coefficient, PresentationError> {
        let num = self.inner.parse_uint().map_err(|e| self.err(e.message))? as i64;
        if self.inner.peek() == Some('/') {
            self.inner.expect('/').unwrap();
            let den = self.inner.parse_uint().map_err(|e| self.err(e.message))? as i64;
            if den == 0 {
                return Err(self.err("zero denominator"));
            }
            Ok(BigRational::new(num.into(), den.into()))
        } else {
            Ok(coeff_int(num))
        }
    }

    /// POLY := '0' | [+|-] COEFF '*' TERM (('+'|'-') COEFF '*' TERM)*
    fn polynomial(
        &mut self,
        gens: &[GeneratorSymbol],
        mode: Mode,
    ) -> Result<Polynomial, PresentationError> {
        if self.inner.peek() == Some('0') {
            let save = self.inner.pos;
            self.inner.expect('0').unwrap();
            // Bare zero only when nothing follows that would extend a number
            // or a term; otherwise back off and parse normally.
            match self.inner.peek() {
                None | Some('=') => return Ok(Polynomial::zero()),
                _ => self.inner.pos = save,
            }
        }
        let mut raw = Vec::new();
        let mut sign = match self.inner.peek() {
            Some('-') => {
                self.inner.expect('-').unwrap();
                -Coefficient::one()
            }
            Some('+') => {
                self.inner.expect('+').unwrap();
                Coefficient::one()
            }
            _ => Coefficient::one(),
        };
        loop {
            let c = self.coefficient()?;
            self.inner.expect('*').map_err(|e| self.err(e.message))?;
            let node = self.inner.parse_node(gens).map_err(|e| self.err(e.message))?;
            raw.push((&sign * c, TreeMonomial::new(node, mode)));
            match self.inner.peek() {
                Some('+') => {
                    self.inner.expect('+').unwrap();
                    sign = Coefficient::one();
                }
                Some('-') => {
                    self.inner.expect('-').unwrap();
                    sign = -Coefficient::one();
                }
                _ => break,
            }
        }
        canonicalize_polynomial(raw, gens).map_err(|e| self.err(e.to_string()))
    }
}

pub fn parse_presentation(text: &str) -> Result<Presentation, PresentationError> {
    let mut mode: Option<Mode> = None;
    let mut generators: Vec<GeneratorSymbol> = Vec::new();
    let mut rules: Vec<RewriteRule> = Vec::new();
    let mut certificate = Certificate::None;
    // (line, kind, names): deferred until generators are all known.
    let mut order_decl: Option<(usize, OrderKind, Vec<String>)> = None;
    let mut rel_lines: Vec<(usize, String, String)> = Vec::new();
    let mut rule_lines: Vec<(usize, String, String)> = Vec::new();
    let mut measure_decl: Option<Vec<MeasureKind>> = None;

    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw_line.find('#') {
            Some(k) => &raw_line[..k],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (directive, rest) = match line.split_once(char::is_whitespace) {
            Some((d, r)) => (d, r.trim()),
            None => (line, ""),
        };
        let syntax = |message: String| PresentationError::Syntax { line: line_no, message };
        match directive {
            "operad" => {
                mode = Some(match rest {
                    "shuffle" => Mode::Shuffle,
                    "planar" => Mode::Planar,
                    other => return Err(syntax(format!("unknown mode '{other}'"))),
                });
            }
            "order" => {
                let mut toks = rest.split_whitespace();
                let kind = match toks.next() {
                    Some("pathlex") => OrderKind::PathLex,
                    Some("revpathlex") => OrderKind::RevPathLex,
                    Some("quantumpath") => OrderKind::QuantumPath,
                    other => return Err(syntax(format!("unknown order {other:?}"))),
                };
                order_decl = Some((line_no, kind, toks.map(str::to_string).collect()));
            }
            "measure" => {
                let mut ms = Vec::new();
                for tok in rest.split_whitespace() {
                    let m = if tok == "dotted_internal_edges" {
                        MeasureKind::DottedInternalEdges
                    } else if tok == "shape_rank" {
                        MeasureKind::ShapeRank(OrderKind::PathLex)
                    } else if let Some(kind) = tok.strip_prefix("shape_rank:") {
                        let kind = match kind {
                            "pathlex" => OrderKind::PathLex,
                            "revpathlex" => OrderKind::RevPathLex,
                            "quantumpath" => OrderKind::QuantumPath,
                            other => {
                                return Err(syntax(format!("unknown shape order '{other}'")))
                            }
                        };
                        MeasureKind::ShapeRank(kind)
                    } else {
                        return Err(syntax(format!("unknown measure '{tok}'")));
                    };
                    ms.push(m);
                }
                measure_decl = Some(ms);
            }
            "gen" => {
                // NAME : (COLORS) -> COLOR [deg INT] [wt INT]
                let mut p = LineParser::new(line_no, rest);
                let name = p.inner.parse_name().map_err(|e| p.err(e.message))?;
                p.inner.expect(':').map_err(|e| p.err(e.message))?;
                p.inner.expect('(').map_err(|e| p.err(e.message))?;
                let mut inputs = Vec::new();
                loop {
                    match p.inner.peek() {
                        Some(')') => {
                            p.inner.expect(')').unwrap();
                            break;
                        }
                        Some(c) => {
                            let col = Color::from_letter(c)
                                .ok_or_else(|| p.err(format!("bad color '{c}'")))?;
                            inputs.push(col);
                            p.inner.pos += 1;
                        }
                        None => return Err(p.err("unterminated color list")),
                    }
                }
                p.inner.expect('-').map_err(|e| p.err(e.message))?;
                p.inner.expect('>').map_err(|e| p.err(e.message))?;
                let out_c = p.inner.peek().ok_or_else(|| p.err("missing output color"))?;
                let output =
                    Color::from_letter(out_c).ok_or_else(|| p.err(format!("bad color '{out_c}'")))?;
                p.inner.pos += 1;
                let mut sym = GeneratorSymbol::new(name, inputs, output);
                while let Some(_) = p.inner.peek() {
                    let word = p.inner.parse_name().map_err(|e| p.err(e.message))?;
                    match word.as_str() {
                        "deg" => {
                            let neg = p.inner.peek() == Some('-');
                            if neg {
                                p.inner.expect('-').unwrap();
                            }
                            let v = p.inner.parse_uint().map_err(|e| p.err(e.message))? as i32;
                            sym.hdegree = if neg { -v } else { v };
                        }
                        "wt" => {
                            sym.weight = p.inner.parse_uint().map_err(|e| p.err(e.message))? as u32;
                        }
                        other => return Err(p.err(format!("unknown attribute '{other}'"))),
                    }
                }
                generators.push(sym);
            }
            "rule" => {
                let (name, body) = rest
                    .split_once(':')
                    .ok_or_else(|| syntax("rule needs 'NAME : TERM -> POLY'".into()))?;
                rule_lines.push((line_no, name.trim().to_string(), body.trim().to_string()));
            }
            "rel" => {
                let (name, body) = rest
                    .split_once(':')
                    .ok_or_else(|| syntax("rel needs 'NAME : POLY = 0'".into()))?;
                rel_lines.push((line_no, name.trim().to_string(), body.trim().to_string()));
            }
            other => return Err(syntax(format!("unknown directive '{other}'"))),
        }
    }

    let mode = mode.ok_or(PresentationError::Syntax {
        line: 1,
        message: "missing 'operad shuffle|planar' header".into(),
    })?;

    if let Some((line, kind, names)) = order_decl {
        let order = if names.is_empty() {
            MonomialOrder::declaration(kind, &generators)
        } else {
            MonomialOrder::from_decreasing_names(kind, &names, &generators).ok_or(
                PresentationError::Syntax {
                    line,
                    message: "order names must list every declared generator".into(),
                },
            )?
        };
        certificate = Certificate::Order(order);
    }
    if let Some(ms) = measure_decl {
        certificate = Certificate::Measure(ms);
    }

    for (line_no, name, body) in rule_lines {
        let mut p = LineParser::new(line_no, &body);
        let node = p.inner.parse_node(&generators).map_err(|e| p.err(e.message))?;
        p.inner.expect('-').map_err(|e| p.err(e.message))?;
        p.inner.expect('>').map_err(|e| p.err(e.message))?;
        let rhs = p.polynomial(&generators, mode)?;
        if !p.inner.at_end() {
            return Err(p.err("trailing input after rule"));
        }
        rules.push(RewriteRule { name, lhs: TreeMonomial::new(node, mode), rhs });
    }

    for (line_no, name, body) in rel_lines {
        let mut p = LineParser::new(line_no, &body);
        let poly = p.polynomial(&generators, mode)?;
        p.inner.expect('=').map_err(|e| p.err(e.message))?;
        p.inner.expect('0').map_err(|e| p.err(e.message))?;
        if !p.inner.at_end() {
            return Err(p.err("trailing input after rel"));
        }
        if poly.is_zero() {
            continue;
        }
        let order = match &certificate {
            Certificate::Order(o) => o,
            _ => return Err(PresentationError::NoOrderDeclared { line: line_no }),
        };
        let rule = orient_relation(&poly, order, &generators, name)
            .expect("nonzero polynomial orients");
        rules.push(rule);
    }

    let p = Presentation { mode, generators, rules, certificate };
    validate_presentation(&p)?;
    Ok(p)
}

pub fn serialize_presentation(p: &Presentation) -> String {
    let mut out = String::new();
    out.push_str(match p.mode {
        Mode::Shuffle => "operad shuffle\n",
        Mode::Planar => "operad planar\n",
    });
    match &p.certificate {
        Certificate::Order(o) => {
            out.push_str(&format!(
                "order {} {}\n",
                o.kind.name(),
                o.decreasing_names(&p.generators).join(" ")
            ));
        }
        Certificate::Measure(ms) => {
            let toks: Vec<String> = ms.iter().map(MeasureKind::token).collect();
            out.push_str(&format!("measure {}\n", toks.join(" ")));
        }
        Certificate::None => {}
    }
    for g in &p.generators {
        let colors: String = g.signature.inputs.iter().map(|c| c.letter()).collect();
        let mut line = format!("gen {} : ({}) -> {}", g.name, colors, g.signature.output.letter());
        if g.hdegree != 0 {
            line.push_str(&format!(" deg {}", g.hdegree));
        }
        if g.weight != 1 {
            line.push_str(&format!(" wt {}", g.weight));
        }
        out.push_str(&line);
        out.push('\n');
    }
    for r in &p.rules {
        out.push_str(&format!(
            "rule {} : {} -> {}\n",
            r.name,
            trees::format_term(&r.lhs, &p.generators),
            format_polynomial(&r.rhs, &p.generators)
        ));
    }
    out
}

pub fn format_polynomial(poly: &Polynomial, gens: &[GeneratorSymbol]) -> String {
    if poly.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (c, m)) in poly.terms().iter().enumerate() {
        let neg = c.is_negative();
        let abs = if neg { -c.clone() } else { c.clone() };
        if i == 0 {
            if neg {
                out.push_str("- ");
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&format_coeff(&abs));
        out.push_str(" * ");
        out.push_str(&trees::format_term(m, gens));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\n# toy presentation\noperad shuffle\norder pathlex\ngen m : (ss) -> s\nrule assoc : m(m(1,2),3) -> 1 * m(1,m(2,3))\n";

    #[test]
    fn parse_and_serialize_roundtrip() {
        let p = parse_presentation(SMALL).unwrap();
        assert_eq!(p.generators.len(), 1);
        assert_eq!(p.rules.len(), 1);
        let text = serialize_presentation(&p);
        let p2 = parse_presentation(&text).unwrap();
        assert_eq!(p, p2);
    }

    #[test]
    fn empty_presentation_is_valid() {
        let p = parse_presentation("operad shuffle\n").unwrap();
        assert!(p.generators.is_empty());
        assert!(p.rules.is_empty());
    }

    #[test]
    fn rel_orients_on_largest() {
        let text = "\noperad shuffle\norder pathlex\ngen m : (ss) -> s\nrel r : 1 * m(m(1,2),3) - 1 * m(1,m(2,3)) = 0\n";
        let p = parse_presentation(text).unwrap();
        assert_eq!(p.rules.len(), 1);
        let lhs = trees::format_term(&p.rules[0].lhs, &p.generators);
        assert_eq!(lhs, "m(m(1,2),3)");
    }

    #[test]
    fn rel_without_order_is_error() {
        let text = "operad shuffle\ngen m : (ss) -> s\nrel r : 1 * m(m(1,2),3) - 1 * m(1,m(2,3)) = 0\n";
        assert!(matches!(
            parse_presentation(text),
            Err(PresentationError::NoOrderDeclared { .. })
        ));
    }

    #[test]
    fn certificate_violation_detected() {
        // Orient the wrong way round: rhs is larger under pathlex.
        let text = "\noperad shuffle\norder pathlex\ngen m : (ss) -> s\nrule bad : m(1,m(2,3)) -> 1 * m(m(1,2),3)\n";
        assert!(matches!(
            parse_presentation(text),
            Err(PresentationError::CertificateViolation { .. })
        ));
    }

    #[test]
    fn canonicalize_merges_and_drops_zeros() {
        let p = parse_presentation(SMALL).unwrap();
        let m = p.parse_term("m(1,2)").unwrap();
        let poly = canonicalize_polynomial(
            vec![
                (coeff_int(1), m.clone()),
                (coeff_int(-1), m.clone()),
            ],
            &p.generators,
        )
        .unwrap();
        assert!(poly.is_zero());
        let half = BigRational::new(1.into(), 2.into());
        let poly = canonicalize_polynomial(
            vec![(half.clone(), m.clone()), (half, m.clone())],
            &p.generators,
        )
        .unwrap();
        assert_eq!(poly.terms(), &[(coeff_int(1), m)]);
    }
}
