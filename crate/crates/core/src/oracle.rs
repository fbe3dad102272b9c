//! Brute-force ground truth over prime fields.
//!
//! Everything here is deliberately naive: `GL_n(p)` is enumerated matrix by
//! matrix, homomorphisms are counted by checking relators on tuples of
//! matrices, and minimal tuples are found by scanning a full box. None of it
//! shares code with the polynomial side.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::minimizer::{defect, IntTuple, MinimalReport};
use crate::profiles::{prime_power, DegreeProfile, GroupSpec};
use crate::ResourceLimit;

/// Default cap on candidate matrices (`q^(n^2)`) and on candidate generator
/// tuples.
pub const DEFAULT_MAX_GL: u128 = 100_000_000;
/// Default cap on the box `(2r + 1)^s` scanned by [`minimal_tuples_naive`].
pub const DEFAULT_MAX_BOX: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} is not prime (only prime fields are supported)")]
    NotPrime(u64),
    #[error("dimension {0} is outside the supported range 1..=3")]
    Dimension(usize),
    #[error("field size {0} is too large for brute force (must be below 2^21)")]
    FieldTooLarge(u64),
    #[error("presentation parse error at position {position}: expected {expected}")]
    Parse { position: usize, expected: String },
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error(transparent)]
    ResourceLimit(#[from] ResourceLimit),
}

const MAX_DIM: usize = 3;

/// An `n x n` matrix over `F_q`, `q` prime, `n <= 3`. Entries are stored
/// row-major in the first `n*n` slots; unused slots stay zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeFieldMatrix {
    n: usize,
    q: u32,
    entries: [u32; MAX_DIM * MAX_DIM],
}

impl PrimeFieldMatrix {
    pub fn identity(n: usize, q: u32) -> Self {
        let mut entries = [0; MAX_DIM * MAX_DIM];
        for i in 0..n {
            entries[i * n + i] = 1 % q;
        }
        Self { n, q, entries }
    }

    /// Row-major entries, reduced mod `q`.
    pub fn from_entries(n: usize, q: u32, values: &[i64]) -> Self {
        assert!(n <= MAX_DIM && values.len() == n * n);
        let mut entries = [0; MAX_DIM * MAX_DIM];
        for (e, &v) in entries.iter_mut().zip(values) {
            *e = v.rem_euclid(q as i64) as u32;
        }
        Self { n, q, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u32 {
        self.q
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    fn at(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j] as u64
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n, self.q)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let (n, q) = (self.n, self.q as u64);
        let mut entries = [0; MAX_DIM * MAX_DIM];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0u64;
                for k in 0..n {
                    s += self.at(i, k) * rhs.at(k, j);
                }
                entries[i * n + j] = (s % q) as u32;
            }
        }
        Self {
            n,
            q: self.q,
            entries,
        }
    }

    pub fn det(&self) -> u32 {
        let q = self.q as i64;
        let m = |i, j| self.at(i, j) as i64;
        let d = match self.n {
            0 => 1,
            1 => m(0, 0),
            2 => m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0),
            _ => {
                m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                    - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                    + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
            }
        };
        d.rem_euclid(q) as u32
    }

    /// Inverse via the adjugate; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == 0 {
            return None;
        }
        let q = self.q as i64;
        let det_inv = mod_pow(det as u64, self.q as u64 - 2, self.q as u64) as i64;
        let m = |i: usize, j: usize| self.at(i, j) as i64;
        let adj: Vec<i64> = match self.n {
            1 => vec![1],
            2 => vec![m(1, 1), -m(0, 1), -m(1, 0), m(0, 0)],
            _ => {
                // adj[i][j] = cofactor[j][i]
                let mut out = vec![0; 9];
                for i in 0..3 {
                    for j in 0..3 {
                        let (r0, r1) = minor_rows(j);
                        let (c0, c1) = minor_rows(i);
                        let minor = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
                        let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                        out[i * 3 + j] = sign * minor;
                    }
                }
                out
            }
        };
        let values: Vec<i64> = adj
            .iter()
            .map(|&x| (x.rem_euclid(q) * det_inv) % q)
            .collect();
        Some(Self::from_entries(self.n, self.q, &values))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::identity(self.n, self.q);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order, by repeated multiplication.
    pub fn order(&self) -> u64 {
        let mut k = 1;
        let mut acc = *self;
        while !acc.is_identity() {
            acc = acc.mul(self);
            k += 1;
        }
        k
    }
}

fn minor_rows(skip: usize) -> (usize, usize) {
    match skip {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

impl fmt::Debug for PrimeFieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<u32>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect();
        write!(f, "F{}{:?}", self.q, rows)
    }
}

fn check_field(n: usize, q: u64) -> Result<u32, OracleError> {
    if !(1..=MAX_DIM).contains(&n) {
        return Err(OracleError::Dimension(n));
    }
    if q >= 1 << 21 {
        return Err(OracleError::FieldTooLarge(q));
    }
    match prime_power(q) {
        Some((p, 1)) if p == q => Ok(q as u32),
        _ => Err(OracleError::NotPrime(q)),
    }
}

/// Iterator over the invertible `n x n` matrices over `F_q`, each exactly
/// once, in lexicographic order of entries.
pub struct GlIter {
    current: Option<PrimeFieldMatrix>,
}

impl Iterator for GlIter {
    type Item = PrimeFieldMatrix;

    fn next(&mut self) -> Option<PrimeFieldMatrix> {
        loop {
            let m = self.current?;
            // odometer increment over all q^(n^2) entry vectors
            let mut next = m;
            let len = m.n * m.n;
            let mut pos = len;
            let mut carried_out = true;
            while pos > 0 {
                pos -= 1;
                next.entries[pos] += 1;
                if next.entries[pos] < m.q {
                    carried_out = false;
                    break;
                }
                next.entries[pos] = 0;
            }
            self.current = (!carried_out).then_some(next);
            if m.det() != 0 {
                return Some(m);
            }
        }
    }
}

/// Lazily enumerates `GL_n(q)`; refuses when `q^(n^2)` candidates exceed
/// `max_gl`.
pub fn gl_iter(n: usize, q: u64, max_gl: u128) -> Result<GlIter, OracleError> {
    let q32 = check_field(n, q)?;
    let candidates = (q as u128).checked_pow((n * n) as u32).unwrap_or(u128::MAX);
    if candidates > max_gl {
        return Err(ResourceLimit {
            what: "GL_n(q) candidate matrices",
            needed: candidates,
            limit: max_gl,
        }
        .into());
    }
    Ok(GlIter {
        current: Some(PrimeFieldMatrix {
            n,
            q: q32,
            entries: [0; MAX_DIM * MAX_DIM],
        }),
    })
}

/// All of `GL_n(q)`.
pub fn gl_enumerate(n: usize, q: u64, max_gl: u128) -> Result<Vec<PrimeFieldMatrix>, OracleError> {
    Ok(gl_iter(n, q, max_gl)?.collect())
}

/// `#{g in GL_n(q) : g^m = 1}` by computing the order of every element.
pub fn count_order_dividing(n: usize, q: u64, m: u64, max_gl: u128) -> Result<u128, OracleError> {
    Ok(gl_iter(n, q, max_gl)?
        .filter(|g| m.is_multiple_of(g.order()))
        .count() as u128)
}

/// A finitely presented group: generators `x1..xk` and relator words. A
/// word is a sequence of signed 1-based generator indices (`-2` is `x2^-1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generator_count: usize,
    relators: Vec<Vec<i32>>,
    label: String,
}

impl Presentation {
    pub fn new(
        generator_count: usize,
        relators: Vec<Vec<i32>>,
        label: impl Into<String>,
    ) -> Result<Self, OracleError> {
        if generator_count == 0 {
            return Err(OracleError::InvalidPresentation(
                "at least one generator is required".into(),
            ));
        }
        for (i, rel) in relators.iter().enumerate() {
            if rel.is_empty() {
                return Err(OracleError::InvalidPresentation(format!(
                    "relator {} is the empty word",
                    i + 1
                )));
            }
            if let Some(&bad) = rel
                .iter()
                .find(|&&g| g == 0 || g.unsigned_abs() as usize > generator_count)
            {
                return Err(OracleError::InvalidPresentation(format!(
                    "relator {} uses generator index {bad} outside 1..={generator_count}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            generator_count,
            relators,
            label: label.into(),
        })
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    pub fn relators(&self) -> &[Vec<i32>] {
        &self.relators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Exponent `m` when some relator is `x_g^{+-m}`.
    fn power_relator(&self, g: usize) -> Option<u64> {
        let target = g as i32 + 1;
        self.relators
            .iter()
            .filter(|rel| rel.iter().all(|&x| x == target) || rel.iter().all(|&x| x == -target))
            .map(|rel| rel.len() as u64)
            .min()
    }
}

fn render_word(word: &[i32]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < word.len() {
        let g = word[i];
        let run = word[i..].iter().take_while(|&&x| x == g).count();
        let exp = if g < 0 { -(run as i64) } else { run as i64 };
        parts.push(if exp == 1 {
            format!("x{}", g.unsigned_abs())
        } else {
            format!("x{}^{exp}", g.unsigned_abs())
        });
        i += run;
    }
    parts.join("*")
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens={}", self.generator_count)?;
        for rel in &self.relators {
            write!(f, "; rel={}", render_word(rel))?;
        }
        Ok(())
    }
}

struct WordParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    offset: usize,
}

impl WordParser<'_> {
    fn error<T>(&self, expected: &str) -> Result<T, OracleError> {
        Err(OracleError::Parse {
            position: self.offset + self.pos,
            expected: expected.into(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<i64, OracleError> {
        let neg = self.peek() == Some(b'-');
        if neg {
            self.pos += 1;
        }
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("integer");
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        let v: i64 = match text.parse() {
            Ok(v) if v <= 1_000_000 => v,
            _ => return self.error("integer of at most 1000000"),
        };
        Ok(if neg { -v } else { v })
    }

    fn word(&mut self) -> Result<Vec<i32>, OracleError> {
        let mut out = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            out.extend(self.factor()?);
        }
        Ok(out)
    }

    fn factor(&mut self) -> Result<Vec<i32>, OracleError> {
        let base = match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let idx = self.number()?;
                if idx <= 0 {
                    return self.error("generator index >= 1");
                }
                vec![idx as i32]
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.word()?;
                if self.peek() != Some(b')') {
                    return self.error("`)`");
                }
                self.pos += 1;
                inner
            }
            _ => return self.error("generator `x<k>` or `(`"),
        };
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let exp = self.number()?;
        let unit: Vec<i32> = if exp < 0 {
            base.iter().rev().map(|g| -g).collect()
        } else {
            base
        };
        let reps = exp.unsigned_abs() as usize;
        if unit.len().saturating_mul(reps) > 10_000_000 {
            return self.error("shorter expanded word");
        }
        Ok(unit.repeat(reps))
    }
}

/// Parses `gens=k; rel=x1^2; rel=(x1*x2)^3; ...`. Whitespace around `;` is
/// ignored; words use `*`, `^` with signed integer exponents, and brackets.
pub fn parse_presentation(text: &str) -> Result<Presentation, OracleError> {
    let mut generator_count = None;
    let mut relators = Vec::new();
    let mut offset = 0;
    for (i, raw) in text.split(';').enumerate() {
        let lead = raw.len() - raw.trim_start().len();
        let part = raw.trim();
        let start = offset + lead;
        offset += raw.len() + 1;
        let err = |pos: usize, expected: &str| OracleError::Parse {
            position: pos,
            expected: expected.into(),
        };
        if i == 0 {
            let digits = part
                .strip_prefix("gens=")
                .ok_or_else(|| err(start, "`gens=`"))?;
            let k: usize = digits
                .parse()
                .map_err(|_| err(start + 5, "generator count"))?;
            generator_count = Some(k);
            continue;
        }
        let body = part
            .strip_prefix("rel=")
            .ok_or_else(|| err(start, "`rel=`"))?;
        let mut parser = WordParser {
            bytes: body.as_bytes(),
            pos: 0,
            offset: start + 4,
        };
        let word = parser.word()?;
        if parser.pos != body.len() {
            return parser.error("`*`, `;` or end of input");
        }
        relators.push(word);
    }
    let k = generator_count.ok_or(OracleError::Parse {
        position: 0,
        expected: "`gens=`".into(),
    })?;
    Presentation::new(k, relators, "custom")
}

impl FromStr for Presentation {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_presentation(s)
    }
}

/// Presentation shipped for a built-in family, if any. The pairing of each
/// presentation with its degree profile is a fixture, confirmed by the
/// brute-force counts matching the polynomial side.
pub fn builtin_presentation(spec: &GroupSpec) -> Option<Presentation> {
    let text = match spec {
        GroupSpec::Cyclic { m } => format!("gens=1; rel=x1^{m}"),
        GroupSpec::Abelian { factors } => {
            let mut text = format!("gens={}", factors.len());
            for (i, f) in factors.iter().enumerate() {
                text += &format!("; rel=x{}^{f}", i + 1);
            }
            for i in 1..=factors.len() {
                for j in i + 1..=factors.len() {
                    text += &format!("; rel=x{i}*x{j}*x{i}^-1*x{j}^-1");
                }
            }
            text
        }
        GroupSpec::Dihedral { m } => format!("gens=2; rel=x1^{m}; rel=x2^2; rel=(x1*x2)^2"),
        GroupSpec::Sym { n: 4 } => "gens=2; rel=x1^2; rel=x2^3; rel=(x1*x2)^4".into(),
        // Coxeter presentation on the adjacent transpositions
        GroupSpec::Sym { n: 5 } => "gens=4; rel=x1^2; rel=x2^2; rel=x3^2; rel=x4^2; \
             rel=(x1*x2)^3; rel=(x2*x3)^3; rel=(x3*x4)^3; \
             rel=(x1*x3)^2; rel=(x1*x4)^2; rel=(x2*x4)^2"
            .into(),
        GroupSpec::Sym { .. } | GroupSpec::Custom { .. } => return None,
    };
    Some(
        parse_presentation(&text)
            .expect("built-in presentations parse")
            .with_label(spec.to_string()),
    )
}

/// Caps for the brute-force homomorphism count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCaps {
    /// Bounds both `q^(n^2)` and the product of per-generator candidate
    /// counts.
    pub max_gl: u128,
}

impl Default for OracleCaps {
    fn default() -> Self {
        Self {
            max_gl: DEFAULT_MAX_GL,
        }
    }
}

#[derive(Clone, Copy)]
struct Element {
    m: PrimeFieldMatrix,
    inv: PrimeFieldMatrix,
}

struct Counter<'a> {
    pr: &'a Presentation,
    candidates: Vec<Vec<Element>>,
    /// Relators to check once generator `i` (and all before it) is fixed.
    checks: Vec<Vec<usize>>,
    identity: PrimeFieldMatrix,
}

impl Counter<'_> {
    fn relator_holds(&self, rel: &[i32], images: &[Element]) -> bool {
        let mut acc = self.identity;
        for &g in rel {
            let e = &images[g.unsigned_abs() as usize - 1];
            acc = acc.mul(if g > 0 { &e.m } else { &e.inv });
        }
        acc.is_identity()
    }

    fn count_from(&self, images: &mut Vec<Element>) -> u128 {
        let level = images.len() - 1;
        let ok = self.checks[level]
            .iter()
            .all(|&r| self.relator_holds(&self.pr.relators[r], images));
        if !ok {
            return 0;
        }
        if images.len() == self.pr.generator_count {
            return 1;
        }
        let mut total = 0;
        for cand in &self.candidates[images.len()] {
            images.push(*cand);
            total += self.count_from(images);
            images.pop();
        }
        total
    }
}

/// `|Hom(A, GL_n(q))|` for the group presented by `pr`, by checking every
/// relator on every tuple of candidate generator images.
///
/// Generators with a power relator `x^m` only range over matrices with
/// `g^m = 1`. The count for each choice of the first generator is computed
/// independently and summed.
pub fn hom_count_bruteforce(
    pr: &Presentation,
    n: usize,
    q: u64,
    caps: OracleCaps,
) -> Result<u128, OracleError> {
    let group = gl_enumerate(n, q, caps.max_gl)?;
    let elements: Vec<Element> = group
        .iter()
        .map(|&m| Element {
            m,
            inv: m.inverse().expect("enumerated matrices are invertible"),
        })
        .collect();
    let candidates: Vec<Vec<Element>> = (0..pr.generator_count)
        .map(|g| match pr.power_relator(g) {
            Some(m) => elements
                .iter()
                .filter(|e| e.m.pow(m).is_identity())
                .copied()
                .collect(),
            None => elements.clone(),
        })
        .collect();
    let search = candidates
        .iter()
        .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128))
        .unwrap_or(u128::MAX);
    if search > caps.max_gl {
        return Err(ResourceLimit {
            what: "candidate generator tuples",
            needed: search,
            limit: caps.max_gl,
        }
        .into());
    }
    let mut checks = vec![Vec::new(); pr.generator_count];
    for (r, rel) in pr.relators.iter().enumerate() {
        let last = rel
            .iter()
            .map(|g| g.unsigned_abs() as usize - 1)
            .max()
            .unwrap_or(0);
        checks[last].push(r);
    }
    let counter = Counter {
        pr,
        identity: PrimeFieldMatrix::identity(n, q as u32),
        candidates,
        checks,
    };
    Ok(counter.candidates[0]
        .par_iter()
        .map(|first| counter.count_from(&mut vec![*first]))
        .sum())
}

/// Minimal tuples of weight `r` by scanning the whole box `[-r, r]^s`.
pub fn minimal_tuples_naive(
    p: &DegreeProfile,
    r: u64,
    max_box: u128,
) -> Result<MinimalReport, OracleError> {
    let s = p.len();
    let side = 2 * r as u128 + 1;
    let size = side.checked_pow(s as u32).unwrap_or(u128::MAX);
    if size > max_box {
        return Err(ResourceLimit {
            what: "naive search box",
            needed: size,
            limit: max_box,
        }
        .into());
    }
    let r_i = r as i64;
    let degrees: Vec<i64> = p.degrees().iter().map(|&d| d as i64).collect();
    let mut point = vec![-r_i; s];
    let mut best = u64::MAX;
    let mut tuples = Vec::new();
    loop {
        let w: i64 = point.iter().zip(&degrees).map(|(x, d)| x * d).sum();
        if w == r_i {
            let sq: u64 = point.iter().map(|x| (x * x) as u64).sum();
            if sq < best {
                best = sq;
                tuples.clear();
            }
            if sq == best {
                tuples.push(IntTuple(point.clone()));
            }
        }
        // odometer; the scan order is already lexicographic
        let mut pos = s;
        loop {
            if pos == 0 {
                return Ok(MinimalReport {
                    r,
                    tuples,
                    s_r: best,
                    eps_r: defect(best, r, p.order()),
                });
            }
            pos -= 1;
            if point[pos] < r_i {
                point[pos] += 1;
                break;
            }
            point[pos] = -r_i;
        }
    }
}

/// Least square-sum over all tuples of weight `target` and the number of
/// tuples attaining it, by dynamic programming over partial weights.
///
/// Shares nothing with the branch-and-bound search; suitable for profiles
/// whose naive box is too large to scan. Entries are bounded by `target` in
/// absolute value and partial states costing more than `target^2` are
/// dropped, since `(target, 0, ..., 0)` already costs that much.
pub fn minimal_by_dp(p: &DegreeProfile, target: u64) -> (u64, u128) {
    use std::collections::HashMap;

    let t = target as i64;
    let ceiling = target * target;
    // partial weight -> (least cost, number of prefixes attaining it)
    let mut layer: HashMap<i64, (u64, u128)> = HashMap::from([(0, (0, 1))]);
    for &d in p.degrees() {
        let d = d as i64;
        let mut next: HashMap<i64, (u64, u128)> = HashMap::new();
        for (&w, &(cost, count)) in &layer {
            for v in -t..=t {
                let c = cost + (v * v) as u64;
                if c > ceiling {
                    continue;
                }
                let slot = next.entry(w + v * d).or_insert((u64::MAX, 0));
                if c < slot.0 {
                    *slot = (c, count);
                } else if c == slot.0 {
                    slot.1 += count;
                }
            }
        }
        layer = next;
    }
    layer[&t]
}
