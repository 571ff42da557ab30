//! Normal-form enumeration, the brute-force dimension oracle, q-graded
//! bivariate generating series, and the Koszul functional equation.

use crate::linalg;
use crate::par::{self, Parallelism};
use crate::presentation::{replace, Coefficient, Presentation};
use crate::trees::{
    find_divisors_at_root, AritySignature, Color, GeneratorSymbol, Mode, Node, TreeMonomial,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

// ---------------------------------------------------------------------------
// Monomial enumeration
// ---------------------------------------------------------------------------

/// All tree monomials of the given signature and weight, in generation
/// order. With `prune`, subtrees containing a rule left-hand side as divisor
/// are discarded as soon as they appear, so the result is exactly the set of
/// irreducible monomials.
pub fn enumerate_monomials(
    p: &Presentation,
    sig: &AritySignature,
    weight: u32,
    prune: bool,
) -> Vec<TreeMonomial> {
    let gens = &p.generators;
    let n = sig.arity();
    if n == 0 {
        return Vec::new();
    }
    // Weight 0: the identity leaf, one per color.
    if weight == 0 {
        if n == 1 && sig.inputs[0] == sig.output {
            return vec![TreeMonomial::identity(p.mode)];
        }
        return Vec::new();
    }
    let labels: Vec<u32> = (1..=n as u32).collect();
    let lhss: Vec<&TreeMonomial> = if prune { p.rules.iter().map(|r| &r.lhs).collect() } else { Vec::new() };
    let mut out = Vec::new();
    for node in subtrees(gens, p.mode, sig, &labels, sig.output, weight, &lhss) {
        out.push(TreeMonomial::new(node, p.mode));
    }
    out
}

/// All subtrees on the sorted label set `labels`, of the given output color
/// and weight; leaf label colors must match `sig`.
fn subtrees(
    gens: &[GeneratorSymbol],
    mode: Mode,
    sig: &AritySignature,
    labels: &[u32],
    output: Color,
    weight: u32,
    lhss: &[&TreeMonomial],
) -> Vec<Node> {
    if weight == 0 {
        return if labels.len() == 1 && sig.inputs[(labels[0] - 1) as usize] == output {
            vec![Node::Leaf(labels[0])]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    for (gi, g) in gens.iter().enumerate() {
        if g.signature.output != output || g.weight > weight || g.arity() == 0 {
            continue;
        }
        let k = g.arity();
        if labels.len() < 1 || k > labels.len() + weight as usize {
            // loose sanity bound; real pruning below
        }
        let rest = weight - g.weight;
        for partition in partitions(labels, k, mode) {
            // Distribute remaining weight over the k blocks.
            for wsplit in weight_splits(rest, &partition) {
                let mut choices: Vec<Vec<Node>> = Vec::with_capacity(k);
                let mut dead = false;
                for (block, w) in partition.iter().zip(wsplit.iter()) {
                    let c =
                        subtrees(gens, mode, sig, block, g.signature.inputs[choices.len()], *w, lhss);
                    if c.is_empty() {
                        dead = true;
                        break;
                    }
                    choices.push(c);
                }
                if dead {
                    continue;
                }
                let mut idx = vec![0usize; k];
                loop {
                    let children: Vec<Node> =
                        idx.iter().enumerate().map(|(s, i)| choices[s][*i].clone()).collect();
                    let node =
                        Node::Vertex { gen: crate::trees::GenId(gi as u32), children };
                    let keep = if lhss.is_empty() {
                        true
                    } else {
                        let t = TreeMonomial::new(node.clone(), mode);
                        !lhss.iter().any(|l| find_divisors_at_root(&t, l).is_some())
                    };
                    if keep {
                        out.push(node);
                    }
                    // advance mixed radix
                    let mut s = 0;
                    loop {
                        if s == k {
                            break;
                        }
                        idx[s] += 1;
                        if idx[s] < choices[s].len() {
                            break;
                        }
                        idx[s] = 0;
                        s += 1;
                    }
                    if s == k {
                        break;
                    }
                }
            }
        }
    }
    out
}

/// Ordered partitions of a sorted label set into `k` nonempty blocks with
/// increasing minima (shuffle) or into consecutive runs (planar).
fn partitions(labels: &[u32], k: usize, mode: Mode) -> Vec<Vec<Vec<u32>>> {
    if labels.len() < k || k == 0 {
        return Vec::new();
    }
    match mode {
        Mode::Planar => {
            // Compositions of the run into k consecutive nonempty blocks.
            let mut out = Vec::new();
            compositions(labels.len(), k, &mut Vec::new(), &mut |sizes| {
                let mut blocks = Vec::with_capacity(k);
                let mut at = 0;
                for s in sizes {
                    blocks.push(labels[at..at + s].to_vec());
                    at += s;
                }
                out.push(blocks);
            });
            out
        }
        Mode::Shuffle => {
            // Assign each label to one of k blocks; smallest label to block 0;
            // keep assignments whose block minima strictly increase and whose
            // blocks are all nonempty.
            let mut out = Vec::new();
            let mut assignment = vec![0usize; labels.len()];
            fn go(
                labels: &[u32],
                k: usize,
                pos: usize,
                assignment: &mut Vec<usize>,
                out: &mut Vec<Vec<Vec<u32>>>,
            ) {
                if pos == labels.len() {
                    let mut blocks: Vec<Vec<u32>> = vec![Vec::new(); k];
                    for (i, b) in assignment.iter().enumerate() {
                        blocks[*b].push(labels[i]);
                    }
                    if blocks.iter().all(|b| !b.is_empty()) {
                        let minima: Vec<u32> = blocks.iter().map(|b| b[0]).collect();
                        if minima.windows(2).all(|w| w[0] < w[1]) {
                            out.push(blocks);
                        }
                    }
                    return;
                }
                let hi = if pos == 0 { 1 } else { k };
                for b in 0..hi {
                    assignment[pos] = b;
                    go(labels, k, pos + 1, assignment, out);
                }
            }
            go(labels, k, 0, &mut assignment, &mut out);
            out
        }
    }
}

fn compositions(total: usize, k: usize, acc: &mut Vec<usize>, f: &mut impl FnMut(Vec<usize>)) {
    if k == 1 {
        if total >= 1 {
            let mut v = acc.clone();
            v.push(total);
            f(v);
        }
        return;
    }
    for first in 1..=total.saturating_sub(k - 1) {
        acc.push(first);
        compositions(total - first, k - 1, acc, f);
        acc.pop();
    }
}

/// Splits of `rest` into per-block weights, each block of size 1 allowing
/// weight 0 and larger blocks needing at least 1.
fn weight_splits(rest: u32, blocks: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mins: Vec<u32> = blocks.iter().map(|b| if b.len() == 1 { 0 } else { 1 }).collect();
    let mut out = Vec::new();
    fn go(rest: u32, mins: &[u32], acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if mins.len() == 1 {
            if rest >= mins[0] {
                let mut v = acc.clone();
                v.push(rest);
                out.push(v);
            }
            return;
        }
        let tail_min: u32 = mins[1..].iter().sum();
        let hi = rest.saturating_sub(tail_min);
        for w in mins[0]..=hi {
            acc.push(w);
            go(rest - w, &mins[1..], acc, out);
            acc.pop();
        }
    }
    if !blocks.is_empty() {
        go(rest, &mins, &mut Vec::new(), &mut out);
    }
    out
}

/// Exact count of irreducible monomials of the given signature and weight.
pub fn count_normal_forms(p: &Presentation, sig: &AritySignature, weight: u32) -> u64 {
    enumerate_monomials(p, sig, weight, true).len() as u64
}

// ---------------------------------------------------------------------------
// Brute-force dimension oracle
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardError {
    pub monomials: usize,
    pub bound: usize,
}

impl fmt::Display for GuardError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "block has {} monomials, oracle guard is {}", self.monomials, self.bound)
    }
}

impl std::error::Error for GuardError {}

pub const ORACLE_GUARD: usize = 100_000;

/// Dimension of a (signature, weight) block by exact rank computation: the
/// span of all rule instances placed into every embedding context, removed
/// from the full monomial space. Independent of any orientation or
/// confluence property.
pub fn oracle_dim(
    p: &Presentation,
    sig: &AritySignature,
    weight: u32,
    par: Parallelism,
) -> Result<u64, GuardError> {
    let monos = enumerate_monomials(p, sig, weight, false);
    if monos.len() > ORACLE_GUARD {
        return Err(GuardError { monomials: monos.len(), bound: ORACLE_GUARD });
    }
    let index: BTreeMap<&TreeMonomial, usize> =
        monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let gens = &p.generators;
    let rows: Vec<Vec<linalg::SparseRow>> = par::map_items(par, monos.iter().collect(), |m| {
        let mut rows = Vec::new();
        for rule in &p.rules {
            for emb in crate::trees::find_divisors(m, &rule.lhs, gens) {
                let reduced = replace(m, &rule.lhs, &emb, &rule.rhs, gens)
                    .expect("rule instance replacement");
                // row = m - reduced
                let mut row: BTreeMap<usize, Coefficient> = BTreeMap::new();
                row.insert(index[m], Coefficient::one());
                for (c, t) in reduced.terms() {
                    let e = row.entry(index[t]).or_insert_with(Coefficient::zero);
                    *e -= c;
                }
                rows.push(row.into_iter().filter(|(_, c)| !c.is_zero()).collect());
            }
        }
        rows
    });
    let rank = linalg::rank(rows.into_iter().flatten());
    Ok((monos.len() - rank) as u64)
}

// ---------------------------------------------------------------------------
// Dimension tables
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    NormalForms,
    Oracle,
}

/// q-graded dimension table of a dioperad, indexed by (inputs, outputs).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimTable {
    pub entries: BTreeMap<(u32, u32), QPolynomial>,
}

impl DimTable {
    pub fn total(&self, m: u32, n: u32) -> BigRational {
        self.entries.get(&(m, n)).map(|q| q.eval_at_one()).unwrap_or_else(BigRational::zero)
    }
}

/// The shuffle signature that reads off dioperadic dimensions: for `n >= 1`
/// sorted as `s^m d^(n-1) -> s`, otherwise rooted at an input.
pub fn dioperad_signature(m: u32, n: u32) -> Option<AritySignature> {
    if n >= 1 {
        let mut inputs = vec![Color::Straight; m as usize];
        inputs.extend(vec![Color::Dotted; (n - 1) as usize]);
        if inputs.is_empty() {
            return None;
        }
        Some(AritySignature::new(inputs, Color::Straight))
    } else if m >= 1 {
        let inputs = vec![Color::Straight; (m - 1) as usize];
        if inputs.is_empty() {
            return None;
        }
        Some(AritySignature::new(inputs, Color::Dotted))
    } else {
        None
    }
}

/// Weight cap for scanning a block's q-grading: in the two-colored world an
/// extra vertex beyond the binary skeleton needs a color-flipping unary, and
/// those cannot stack, so 2(m+n) is safely past every nonzero weight.
fn weight_cap(arity: u32) -> u32 {
    2 * arity + 2
}

fn count_block(
    p: &Presentation,
    sig: &AritySignature,
    weight: u32,
    mode: CountMode,
    par: Parallelism,
) -> Result<u64, GuardError> {
    match mode {
        CountMode::NormalForms => Ok(count_normal_forms(p, sig, weight)),
        CountMode::Oracle => oracle_dim(p, sig, weight, par),
    }
}

fn dim_q_of_signature(
    p: &Presentation,
    sig: &AritySignature,
    mode: CountMode,
    par: Parallelism,
) -> Result<QPolynomial, GuardError> {
    let mut q = QPolynomial::zero();
    for w in 0..=weight_cap(sig.arity() as u32) {
        let c = count_block(p, sig, w, mode, par)?;
        if c > 0 {
            q.add_term(w, BigRational::from_integer(c.into()));
        }
    }
    Ok(q)
}

/// All interleavings of `m` straight and `k` dotted inputs.
fn interleavings(m: u32, k: u32) -> Vec<Vec<Color>> {
    let mut out = Vec::new();
    fn go(m: u32, k: u32, acc: &mut Vec<Color>, out: &mut Vec<Vec<Color>>) {
        if m == 0 && k == 0 {
            out.push(acc.clone());
            return;
        }
        if m > 0 {
            acc.push(Color::Straight);
            go(m - 1, k, acc, out);
            acc.pop();
        }
        if k > 0 {
            acc.push(Color::Dotted);
            go(m, k - 1, acc, out);
            acc.pop();
        }
    }
    go(m, k, &mut Vec::new(), &mut out);
    out
}

fn factorial(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Dimension table `dim_q(m, n)` for `m + n <= max_total`.
///
/// Shuffle mode counts the single sorted signature; planar mode symmetrizes:
/// `m!(n-1)!` times the sum over all interleavings of the planar counts.
pub fn dioperad_dims(
    p: &Presentation,
    max_total: u32,
    mode: CountMode,
    par: Parallelism,
) -> Result<DimTable, GuardError> {
    let mut cells: Vec<(u32, u32)> = Vec::new();
    for total in 1..=max_total {
        for m in 0..=total {
            let n = total - m;
            cells.push((m, n));
        }
    }
    let computed = par::map_items(par, cells, |(m, n)| {
        let q = dim_q_cell(p, m, n, mode, Parallelism::Sequential);
        ((m, n), q)
    });
    let mut entries = BTreeMap::new();
    for ((m, n), q) in computed {
        let q = q?;
        if !q.is_zero() {
            entries.insert((m, n), q);
        }
    }
    Ok(DimTable { entries })
}

fn dim_q_cell(
    p: &Presentation,
    m: u32,
    n: u32,
    mode: CountMode,
    par: Parallelism,
) -> Result<QPolynomial, GuardError> {
    match p.mode {
        Mode::Shuffle => match dioperad_signature(m, n) {
            Some(sig) => dim_q_of_signature(p, &sig, mode, par),
            None => {
                // (1,1) has no nonidentity signature only when m+n < 2; the
                // identity lives at the one-input signature.
                if (m, n) == (1, 1) {
                    unreachable!("dioperad_signature covers (1,1)")
                } else {
                    Ok(QPolynomial::zero())
                }
            }
        },
        Mode::Planar => {
            if n == 0 {
                return Ok(QPolynomial::zero());
            }
            let mut sum = QPolynomial::zero();
            for inputs in interleavings(m, n - 1) {
                if inputs.is_empty() {
                    continue;
                }
                let sig = AritySignature::new(inputs, Color::Straight);
                sum = sum.add(&dim_q_of_signature(p, &sig, mode, par)?);
            }
            let scale = BigRational::from_integer(factorial(m) * factorial(n - 1));
            Ok(sum.scale(&scale))
        }
    }
}

// ---------------------------------------------------------------------------
// q-polynomials and bivariate series
// ---------------------------------------------------------------------------

/// Polynomial in q with exact rational coefficients and no zero entries.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct QPolynomial {
    pub coeffs: BTreeMap<u32, BigRational>,
}

impl QPolynomial {
    pub fn zero() -> Self {
        QPolynomial { coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        QPolynomial::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(0, c);
        }
        QPolynomial { coeffs }
    }

    pub fn q_power(exp: u32, c: BigRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exp, c);
        }
        QPolynomial { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, exp: u32, c: BigRational) {
        let e = self.coeffs.entry(exp).or_insert_with(BigRational::zero);
        *e += c;
        if self.coeffs.get(&exp).map(|v| v.is_zero()).unwrap_or(false) {
            self.coeffs.remove(&exp);
        }
    }

    pub fn add(&self, other: &QPolynomial) -> QPolynomial {
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &QPolynomial) -> QPolynomial {
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.add_term(*e, -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &QPolynomial) -> QPolynomial {
        let mut out = QPolynomial::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> QPolynomial {
        if c.is_zero() {
            return QPolynomial::zero();
        }
        QPolynomial { coeffs: self.coeffs.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    /// Substitute q -> -q.
    pub fn negate_q(&self) -> QPolynomial {
        QPolynomial {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (*e, if e % 2 == 0 { c.clone() } else { -c.clone() }))
                .collect(),
        }
    }

    pub fn eval_at_one(&self) -> BigRational {
        self.coeffs.values().fold(BigRational::zero(), |acc, c| acc + c)
    }

    pub fn has_negative_coefficient(&self) -> bool {
        self.coeffs.values().any(|c| c.is_negative())
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.coeffs {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = *e == 0 || !abs.is_one();
            if show_coeff {
                write!(f, "{}", crate::presentation::format_coeff(&abs))?;
            }
            if *e > 0 {
                if show_coeff {
                    write!(f, "*")?;
                }
                if *e == 1 {
                    write!(f, "q")?;
                } else {
                    write!(f, "q^{}", e)?;
                }
            }
        }
        Ok(())
    }
}

/// Truncated bivariate series with q-polynomial coefficients: the
/// coefficient of `x^m y^n` for `m + n <= order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BivariateSeries {
    pub order: u32,
    pub coeffs: BTreeMap<(u32, u32), QPolynomial>,
}

impl BivariateSeries {
    pub fn zero(order: u32) -> Self {
        BivariateSeries { order, coeffs: BTreeMap::new() }
    }

    pub fn coeff(&self, m: u32, n: u32) -> QPolynomial {
        self.coeffs.get(&(m, n)).cloned().unwrap_or_else(QPolynomial::zero)
    }

    pub fn set(&mut self, m: u32, n: u32, q: QPolynomial) {
        if m + n <= self.order && !q.is_zero() {
            self.coeffs.insert((m, n), q);
        } else {
            self.coeffs.remove(&(m, n));
        }
    }

    pub fn x(order: u32) -> Self {
        let mut s = BivariateSeries::zero(order);
        s.set(1, 0, QPolynomial::one());
        s
    }

    pub fn y(order: u32) -> Self {
        let mut s = BivariateSeries::zero(order);
        s.set(0, 1, QPolynomial::one());
        s
    }

    pub fn add(&self, other: &BivariateSeries) -> BivariateSeries {
        let order = self.order.min(other.order);
        let mut out = BivariateSeries::zero(order);
        let keys: std::collections::BTreeSet<_> =
            self.coeffs.keys().chain(other.coeffs.keys()).cloned().collect();
        for (m, n) in keys {
            if m + n <= order {
                out.set(m, n, self.coeff(m, n).add(&other.coeff(m, n)));
            }
        }
        out
    }

    pub fn sub(&self, other: &BivariateSeries) -> BivariateSeries {
        self.add(&other.scale_q(&QPolynomial::constant(-BigRational::one())))
    }

    pub fn scale_q(&self, q: &QPolynomial) -> BivariateSeries {
        let mut out = BivariateSeries::zero(self.order);
        for ((m, n), c) in &self.coeffs {
            out.set(*m, *n, c.mul(q));
        }
        out
    }

    pub fn mul(&self, other: &BivariateSeries) -> BivariateSeries {
        let order = self.order.min(other.order);
        let mut out = BivariateSeries::zero(order);
        for ((m1, n1), c1) in &self.coeffs {
            for ((m2, n2), c2) in &other.coeffs {
                let (m, n) = (m1 + m2, n1 + n2);
                if m + n <= order {
                    let cur = out.coeff(m, n).add(&c1.mul(c2));
                    out.set(m, n, cur);
                }
            }
        }
        out
    }

    pub fn negate_q(&self) -> BivariateSeries {
        let mut out = BivariateSeries::zero(self.order);
        for ((m, n), c) in &self.coeffs {
            out.set(*m, *n, c.negate_q());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Truncate to a smaller order.
    pub fn truncate(&self, order: u32) -> BivariateSeries {
        let mut out = BivariateSeries::zero(order);
        for ((m, n), c) in &self.coeffs {
            if m + n <= order {
                out.set(*m, *n, c.clone());
            }
        }
        out
    }
}

/// chi(x, y; q) from a dimension table: coefficient of x^m y^n is
/// dim_q(m, n) / (m! n!).
pub fn series_from_dims(table: &DimTable, order: u32) -> BivariateSeries {
    let mut s = BivariateSeries::zero(order);
    for ((m, n), q) in &table.entries {
        if m + n <= order {
            let scale = BigRational::new(BigInt::one(), factorial(*m) * factorial(*n));
            s.set(*m, *n, q.scale(&scale));
        }
    }
    s
}

pub fn partial_x(s: &BivariateSeries) -> BivariateSeries {
    let mut out = BivariateSeries::zero(s.order.saturating_sub(1));
    for ((m, n), c) in &s.coeffs {
        if *m >= 1 {
            out.set(m - 1, *n, c.scale(&BigRational::from_integer((*m).into())));
        }
    }
    out
}

pub fn partial_y(s: &BivariateSeries) -> BivariateSeries {
    let mut out = BivariateSeries::zero(s.order.saturating_sub(1));
    for ((m, n), c) in &s.coeffs {
        if *n >= 1 {
            out.set(*m, n - 1, c.scale(&BigRational::from_integer((*n).into())));
        }
    }
    out
}

/// A pair of series in (x, y): a formal map of the plane fixing the origin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesPair(pub BivariateSeries, pub BivariateSeries);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesError {
    NonzeroConstantTerm,
    SingularLinearPart,
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::NonzeroConstantTerm => write!(f, "composition needs zero constant term"),
            SeriesError::SingularLinearPart => {
                write!(f, "pair inversion needs an invertible linear part with constant determinant")
            }
        }
    }
}

impl std::error::Error for SeriesError {}

/// Compose pairs: (f1(g1,g2), f2(g1,g2)).
pub fn compose_pair(f: &SeriesPair, g: &SeriesPair) -> Result<SeriesPair, SeriesError> {
    Ok(SeriesPair(compose_one(&f.0, g)?, compose_one(&f.1, g)?))
}

fn compose_one(f: &BivariateSeries, g: &SeriesPair) -> Result<BivariateSeries, SeriesError> {
    let order = f.order.min(g.0.order).min(g.1.order);
    if !g.0.coeff(0, 0).is_zero() || !g.1.coeff(0, 0).is_zero() {
        return Err(SeriesError::NonzeroConstantTerm);
    }
    // Powers g1^a g2^b for a + b <= order.
    let mut pow1: Vec<BivariateSeries> = vec![{
        let mut one = BivariateSeries::zero(order);
        one.set(0, 0, QPolynomial::one());
        one
    }];
    for a in 1..=order as usize {
        pow1.push(pow1[a - 1].mul(&g.0.truncate(order)));
    }
    let mut pow2: Vec<BivariateSeries> = vec![pow1[0].clone()];
    for b in 1..=order as usize {
        pow2.push(pow2[b - 1].mul(&g.1.truncate(order)));
    }
    let mut out = BivariateSeries::zero(order);
    for ((a, b), c) in &f.coeffs {
        if a + b > order {
            continue;
        }
        let term = pow1[*a as usize].mul(&pow2[*b as usize]).scale_q(c);
        out = out.add(&term);
    }
    Ok(out)
}

/// Invert a pair with invertible linear part by fixed-point iteration:
/// g_{k+1} = L^{-1}((x, y) - H(g_k)), converging in at most `order` steps.
/// The linear part's determinant must be a nonzero rational constant so the
/// inverse matrix stays polynomial in q.
pub fn invert_pair(f: &SeriesPair) -> Result<SeriesPair, SeriesError> {
    let order = f.0.order.min(f.1.order);
    if !f.0.coeff(0, 0).is_zero() || !f.1.coeff(0, 0).is_zero() {
        return Err(SeriesError::NonzeroConstantTerm);
    }
    // Linear part L = [[a, b], [c, d]].
    let a = f.0.coeff(1, 0);
    let b = f.0.coeff(0, 1);
    let c = f.1.coeff(1, 0);
    let d = f.1.coeff(0, 1);
    let det = a.mul(&d).sub(&b.mul(&c));
    let det_const = match (det.coeffs.len(), det.coeffs.get(&0)) {
        (0, _) => return Err(SeriesError::SingularLinearPart),
        (1, Some(v)) => v.clone(),
        _ => return Err(SeriesError::SingularLinearPart),
    };
    let inv_det = det_const.recip();
    // L^{-1} = adj(L) / det.
    let li = [
        [d.scale(&inv_det), b.scale(&-inv_det.clone())],
        [c.scale(&-inv_det.clone()), a.scale(&inv_det)],
    ];

    // Higher-degree parts H_i.
    let strip_linear = |s: &BivariateSeries| {
        let mut out = s.clone();
        out.coeffs.remove(&(1, 0));
        out.coeffs.remove(&(0, 1));
        out
    };
    let h = SeriesPair(strip_linear(&f.0), strip_linear(&f.1));

    let apply_linv = |v: &SeriesPair| {
        SeriesPair(
            v.0.scale_q(&li[0][0]).add(&v.1.scale_q(&li[0][1])),
            v.0.scale_q(&li[1][0]).add(&v.1.scale_q(&li[1][1])),
        )
    };

    let target = SeriesPair(BivariateSeries::x(order), BivariateSeries::y(order));
    let mut g = apply_linv(&target);
    for _ in 0..order {
        let hg = compose_pair(&h, &g)?;
        let next = apply_linv(&SeriesPair(target.0.sub(&hg.0), target.1.sub(&hg.1)));
        if next == g {
            break;
        }
        g = next;
    }
    Ok(g)
}

/// Outcome of the Koszul functional-equation check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KoszulCheck {
    pub pass: bool,
    /// First nonzero residual: (m, n, component, residual polynomial).
    pub residual: Option<(u32, u32, u8, QPolynomial)>,
}

/// Check (d_y chiDual(-q), d_x chiDual(-q)) o (d_y chiP(q), d_x chiP(q)) = (x, y).
pub fn koszul_series_check(
    chi_p: &BivariateSeries,
    chi_dual: &BivariateSeries,
    order: u32,
) -> Result<KoszulCheck, SeriesError> {
    let fp = SeriesPair(partial_y(chi_p).truncate(order), partial_x(chi_p).truncate(order));
    let dual_neg = chi_dual.negate_q();
    let fd = SeriesPair(partial_y(&dual_neg).truncate(order), partial_x(&dual_neg).truncate(order));
    let comp = compose_pair(&fd, &fp)?;
    let id = SeriesPair(BivariateSeries::x(order), BivariateSeries::y(order));
    let res0 = comp.0.sub(&id.0);
    let res1 = comp.1.sub(&id.1);
    let mut residual = None;
    let mut keys: Vec<(u32, u32, u8)> = res0
        .coeffs
        .keys()
        .map(|(m, n)| (*m, *n, 0u8))
        .chain(res1.coeffs.keys().map(|(m, n)| (*m, *n, 1u8)))
        .collect();
    keys.sort_by_key(|(m, n, comp)| (m + n, *m, *comp));
    if let Some((m, n, c)) = keys.first().cloned() {
        let q = if c == 0 { res0.coeff(m, n) } else { res1.coeff(m, n) };
        residual = Some((m, n, c, q));
    }
    Ok(KoszulCheck { pass: residual.is_none(), residual })
}

/// dim Lieb(m, n) = (m+n-2)!^2 / ((m-1)!(n-1)!), exactly.
pub fn lieb_dim_formula(m: u32, n: u32) -> BigInt {
    assert!(m >= 1 && n >= 1);
    let num = factorial(m + n - 2);
    let ratio = BigRational::new(
        num.clone() * num,
        factorial(m - 1) * factorial(n - 1),
    );
    assert!(ratio.is_integer());
    ratio.to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    const COM: &str = "\noperad shuffle\norder pathlex\ngen m : (ss) -> s\nrule r1 : m(m(1,2),3) -> 1 * m(1,m(2,3))\nrule r2 : m(m(1,3),2) -> 1 * m(1,m(2,3))\n";

    #[test]
    fn com_counts() {
        let p = parse_presentation(COM).unwrap();
        let sig3 = AritySignature::new(vec![Color::Straight; 3], Color::Straight);
        assert_eq!(enumerate_monomials(&p, &sig3, 2, false).len(), 3);
        assert_eq!(count_normal_forms(&p, &sig3, 2), 1);
        let sig4 = AritySignature::new(vec![Color::Straight; 4], Color::Straight);
        assert_eq!(enumerate_monomials(&p, &sig4, 3, false).len(), 15);
        assert_eq!(count_normal_forms(&p, &sig4, 3), 1);
        assert_eq!(oracle_dim(&p, &sig4, 3, Parallelism::Sequential).unwrap(), 1);
    }

    #[test]
    fn identity_block() {
        let p = parse_presentation(COM).unwrap();
        let sig = AritySignature::new(vec![Color::Straight], Color::Straight);
        assert_eq!(count_normal_forms(&p, &sig, 0), 1);
        let sig_d = AritySignature::new(vec![Color::Dotted], Color::Straight);
        assert_eq!(count_normal_forms(&p, &sig_d, 0), 0);
    }

    #[test]
    fn lieb_formula_values() {
        assert_eq!(lieb_dim_formula(1, 1), BigInt::from(1));
        assert_eq!(lieb_dim_formula(2, 2), BigInt::from(4));
        assert_eq!(lieb_dim_formula(3, 2), BigInt::from(18));
        assert_eq!(lieb_dim_formula(3, 3), BigInt::from(144));
    }

    #[test]
    fn invert_identity() {
        let id = SeriesPair(BivariateSeries::x(6), BivariateSeries::y(6));
        let inv = invert_pair(&id).unwrap();
        assert_eq!(inv, id);
    }

    #[test]
    fn invert_contract() {
        // F = (x + x^2 + q x y, y - y^2): check F o F^{-1} = id.
        let mut f1 = BivariateSeries::zero(7);
        f1.set(1, 0, QPolynomial::one());
        f1.set(2, 0, QPolynomial::one());
        f1.set(1, 1, QPolynomial::q_power(1, BigRational::one()));
        let mut f2 = BivariateSeries::zero(7);
        f2.set(0, 1, QPolynomial::one());
        f2.set(0, 2, QPolynomial::constant(-BigRational::one()));
        let f = SeriesPair(f1, f2);
        let g = invert_pair(&f).unwrap();
        let comp = compose_pair(&f, &g).unwrap();
        assert_eq!(comp.0, BivariateSeries::x(7));
        assert_eq!(comp.1, BivariateSeries::y(7));
    }
}
