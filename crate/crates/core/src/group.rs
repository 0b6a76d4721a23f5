//! Construction of small finite groups with exact element arithmetic.
//!
//! Two element families are supported: `PSL(2,p)` for odd primes `p`, whose
//! elements are 2x2 residue matrices canonicalized modulo `±I`, and
//! permutation groups given by generators in disjoint-cycle notation. Either
//! way the group is fully materialized: every element gets an index, and all
//! arithmetic happens on indices.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Largest prime accepted by [`build_psl2`]. `PSL(2,31)` has 14880 elements,
/// which is already well past anything the classification needs.
pub const MAX_PSL_PRIME: u64 = 31;

/// Below this order a dense multiplication table is stored; above it,
/// products are recomputed from payloads on demand.
pub const DENSE_TABLE_LIMIT: usize = 1000;

/// Default cap on permutation-group closures.
pub const DEFAULT_CLOSURE_CAP: usize = 20_000;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("p must be an odd prime with 5 <= p <= {MAX_PSL_PRIME}, got {0}")]
    UnsupportedPrime(u64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("generator closure exceeded the cap of {cap} elements")]
    ClosureCapExceeded { cap: usize },
}

/// Canonical element datum. For the `PSL(2,p)` family this is a 2x2 matrix
/// of residues mod `p` with determinant 1, canonicalized modulo `±I` so that
/// the first nonzero entry in row-major order lies in `{1,...,(p-1)/2}`.
/// For permutation groups it is the image array of a bijection on `{0..n-1}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GroupElement {
    /// Row-major entries `[a, b, c, d]` of a determinant-1 matrix mod `p`.
    Matrix { p: u16, m: [u16; 4] },
    /// Image array: point `i` maps to `img[i]`.
    Perm(Box<[u16]>),
}

impl GroupElement {
    /// Canonicalize a determinant-1 matrix modulo `±I`. Idempotent.
    pub fn canonical_matrix(p: u16, m: [u16; 4]) -> GroupElement {
        let half = (p - 1) / 2;
        for &x in &m {
            if x != 0 {
                if x <= half {
                    return GroupElement::Matrix { p, m };
                }
                let neg = [
                    (p - m[0]) % p,
                    (p - m[1]) % p,
                    (p - m[2]) % p,
                    (p - m[3]) % p,
                ];
                return GroupElement::Matrix { p, m: neg };
            }
        }
        unreachable!("zero matrix has determinant 0");
    }

    fn mul(&self, other: &GroupElement) -> GroupElement {
        match (self, other) {
            (GroupElement::Matrix { p, m: a }, GroupElement::Matrix { p: q, m: b }) => {
                debug_assert_eq!(p, q);
                let p32 = u32::from(*p);
                let a: [u32; 4] = [a[0].into(), a[1].into(), a[2].into(), a[3].into()];
                let b: [u32; 4] = [b[0].into(), b[1].into(), b[2].into(), b[3].into()];
                let m = [
                    ((a[0] * b[0] + a[1] * b[2]) % p32) as u16,
                    ((a[0] * b[1] + a[1] * b[3]) % p32) as u16,
                    ((a[2] * b[0] + a[3] * b[2]) % p32) as u16,
                    ((a[2] * b[1] + a[3] * b[3]) % p32) as u16,
                ];
                GroupElement::canonical_matrix(*p, m)
            }
            (GroupElement::Perm(a), GroupElement::Perm(b)) => {
                // (a * b)(x) = a(b(x))
                GroupElement::Perm(b.iter().map(|&x| a[usize::from(x)]).collect())
            }
            _ => panic!("mixed element families"),
        }
    }

    fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Matrix { p, m } => {
                // det = 1, so inv([[a,b],[c,d]]) = [[d,-b],[-c,a]]
                let inv = [m[3], (p - m[1]) % p, (p - m[2]) % p, m[0]];
                GroupElement::canonical_matrix(*p, inv)
            }
            GroupElement::Perm(img) => {
                let mut inv = vec![0u16; img.len()];
                for (i, &x) in img.iter().enumerate() {
                    inv[usize::from(x)] = i as u16;
                }
                GroupElement::Perm(inv.into_boxed_slice())
            }
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Matrix { m, .. } => {
                write!(f, "[[{},{}],[{},{}]]", m[0], m[1], m[2], m[3])
            }
            GroupElement::Perm(img) => {
                write!(f, "[")?;
                for (i, x) in img.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// A fully materialized finite group. Immutable after construction and safe
/// to share across parallel workers.
///
/// Elements are indexed by the sorted order of their canonical payloads, so
/// indices are identical from run to run.
pub struct FiniteGroup {
    elements: Vec<GroupElement>,
    index: HashMap<GroupElement, u32>,
    identity: u32,
    inverse: Vec<u32>,
    orders: Vec<u32>,
    table: Option<Vec<u32>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.elements.len())
            .field("dense_table", &self.table.is_some())
            .finish()
    }
}

impl FiniteGroup {
    fn from_elements(set: BTreeSet<GroupElement>) -> FiniteGroup {
        let elements: Vec<GroupElement> = set.into_iter().collect();
        let n = elements.len();
        let index: HashMap<GroupElement, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        let identity_payload = match &elements[0] {
            GroupElement::Matrix { p, .. } => GroupElement::canonical_matrix(*p, [1, 0, 0, 1]),
            GroupElement::Perm(img) => GroupElement::Perm((0..img.len() as u16).collect()),
        };
        let identity = index[&identity_payload];
        let inverse: Vec<u32> = elements.iter().map(|e| index[&e.inverse()]).collect();
        let table = if n <= DENSE_TABLE_LIMIT {
            let mut t = vec![0u32; n * n];
            for (i, a) in elements.iter().enumerate() {
                for (j, b) in elements.iter().enumerate() {
                    t[i * n + j] = index[&a.mul(b)];
                }
            }
            Some(t)
        } else {
            None
        };
        let mut g = FiniteGroup {
            elements,
            index,
            identity,
            inverse,
            orders: Vec::new(),
            table,
        };
        g.orders = (0..n)
            .map(|i| {
                let mut k = 1u32;
                let mut x = i as u32;
                while x != g.identity {
                    x = g.mul(x as usize, i) as u32;
                    k += 1;
                }
                k
            })
            .collect();
        g
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        self.identity as usize
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    pub fn elements(&self) -> impl Iterator<Item = &GroupElement> {
        self.elements.iter()
    }

    pub fn index_of(&self, e: &GroupElement) -> Option<usize> {
        self.index.get(e).map(|&i| i as usize)
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        match &self.table {
            Some(t) => t[i * self.elements.len() + j] as usize,
            None => {
                let prod = self.elements[i].mul(&self.elements[j]);
                self.index[&prod] as usize
            }
        }
    }

    pub fn inv(&self, i: usize) -> usize {
        self.inverse[i] as usize
    }

    /// Least `k >= 1` with `x^k = identity`. Cached at construction.
    pub fn element_order(&self, i: usize) -> u32 {
        self.orders[i]
    }

    /// `x^k` by repeated squaring on indices.
    pub fn power(&self, x: usize, k: u64) -> usize {
        let mut acc = self.identity();
        let mut base = x;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// `x * y * x^-1 * y^-1`.
    pub fn commutator(&self, x: usize, y: usize) -> usize {
        let a = self.mul(x, y);
        let b = self.mul(self.inv(x), self.inv(y));
        self.mul(a, b)
    }

    /// Number of `g` with `g x = x g`.
    pub fn centralizer_order(&self, x: usize) -> usize {
        (0..self.order())
            .filter(|&g| self.mul(g, x) == self.mul(x, g))
            .count()
    }

    /// Conjugate `g x g^-1`.
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// Closure of `gens` under multiplication, as a sorted index list.
    /// The empty generating set yields `{identity}`.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.identity()] = true;
        let mut members = vec![self.identity()];
        let mut frontier = vec![self.identity()];
        while let Some(w) = frontier.pop() {
            for &g in gens {
                let z = self.mul(w, g);
                if !seen[z] {
                    seen[z] = true;
                    members.push(z);
                    frontier.push(z);
                }
            }
        }
        members.sort_unstable();
        members
    }

    /// Whether `gens` generates the whole group.
    pub fn generates(&self, gens: &[usize]) -> bool {
        self.generated_subgroup(gens).len() == self.order()
    }

    /// Map element order -> number of elements of that order.
    pub fn order_census(&self) -> BTreeMap<u32, usize> {
        let mut census = BTreeMap::new();
        for &o in &self.orders {
            *census.entry(o).or_insert(0) += 1;
        }
        census
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Materialize `PSL(2,p)`: all 2x2 matrices over `F_p` with determinant 1,
/// modulo the center `{±I}`. The group has order `p(p^2-1)/2`.
pub fn build_psl2(p: u64) -> Result<FiniteGroup, GroupError> {
    if !(5..=MAX_PSL_PRIME).contains(&p) || !is_prime(p) {
        return Err(GroupError::UnsupportedPrime(p));
    }
    let p16 = p as u16;
    let mut set = BTreeSet::new();
    for a in 0..p16 {
        for b in 0..p16 {
            for c in 0..p16 {
                for d in 0..p16 {
                    let det = (u32::from(a) * u32::from(d) + u32::from(p16) * u32::from(p16)
                        - u32::from(b) * u32::from(c))
                        % u32::from(p16);
                    if det == 1 {
                        set.insert(GroupElement::canonical_matrix(p16, [a, b, c, d]));
                    }
                }
            }
        }
    }
    let g = FiniteGroup::from_elements(set);
    debug_assert_eq!(g.order() as u64, p * (p * p - 1) / 2);
    Ok(g)
}

/// Parse a permutation group from its generator file with the default
/// closure cap of [`DEFAULT_CLOSURE_CAP`] elements.
///
/// Format (UTF-8 text): line 1 `degree N`; each subsequent line one
/// generator in disjoint-cycle notation with zero-based points, e.g.
/// `(0 1 2)(3 4)`. Blank lines and `#` comments are ignored.
pub fn parse_permutation_group(text: &str) -> Result<FiniteGroup, GroupError> {
    parse_permutation_group_with_cap(text, DEFAULT_CLOSURE_CAP)
}

/// Same as [`parse_permutation_group`] with an explicit closure cap.
pub fn parse_permutation_group_with_cap(text: &str, cap: usize) -> Result<FiniteGroup, GroupError> {
    let mut degree: Option<usize> = None;
    let mut generators: Vec<GroupElement> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        match degree {
            None => {
                let rest = line
                    .strip_prefix("degree")
                    .ok_or_else(|| GroupError::Parse {
                        line: lineno,
                        msg: format!("expected `degree N`, got `{line}`"),
                    })?;
                let n: usize = rest.trim().parse().map_err(|_| GroupError::Parse {
                    line: lineno,
                    msg: format!("invalid degree `{}`", rest.trim()),
                })?;
                if n == 0 || n > usize::from(u16::MAX) {
                    return Err(GroupError::Parse {
                        line: lineno,
                        msg: format!("degree {n} out of range"),
                    });
                }
                degree = Some(n);
            }
            Some(n) => {
                generators.push(parse_cycles(line, n, lineno)?);
            }
        }
    }
    let n = degree.ok_or_else(|| GroupError::Parse {
        line: 0,
        msg: "missing `degree N` line".to_string(),
    })?;

    // breadth-first closure of the generators under composition
    let identity = GroupElement::Perm((0..n as u16).collect());
    let mut set: BTreeSet<GroupElement> = BTreeSet::new();
    set.insert(identity.clone());
    let mut frontier = vec![identity];
    while let Some(w) = frontier.pop() {
        for g in &generators {
            let z = w.mul(g);
            if set.insert(z.clone()) {
                if set.len() > cap {
                    return Err(GroupError::ClosureCapExceeded { cap });
                }
                frontier.push(z);
            }
        }
    }
    Ok(FiniteGroup::from_elements(set))
}

fn parse_cycles(line: &str, degree: usize, lineno: usize) -> Result<GroupElement, GroupError> {
    let err = |msg: String| GroupError::Parse { line: lineno, msg };
    let mut img: Vec<u16> = (0..degree as u16).collect();
    let mut moved = vec![false; degree];
    let mut rest = line;
    while !rest.is_empty() {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        if !rest.starts_with('(') {
            return Err(err(format!("expected `(` in cycle notation, got `{rest}`")));
        }
        let close = rest
            .find(')')
            .ok_or_else(|| err("unbalanced parenthesis".to_string()))?;
        let body = &rest[1..close];
        rest = &rest[close + 1..];
        let points: Vec<usize> = body
            .split(|ch: char| ch.is_whitespace() || ch == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|_| err(format!("invalid point `{s}`")))
            })
            .collect::<Result<_, _>>()?;
        if points.is_empty() {
            continue; // `()` denotes the identity cycle
        }
        for &pt in &points {
            if pt >= degree {
                return Err(err(format!("point {pt} exceeds degree {degree}")));
            }
            if moved[pt] {
                return Err(err(format!("point {pt} appears twice in one generator")));
            }
            moved[pt] = true;
        }
        // cycle (p0 p1 ... pk): p0 -> p1 -> ... -> pk -> p0
        for i in 0..points.len() {
            img[points[i]] = points[(i + 1) % points.len()] as u16;
        }
    }
    Ok(GroupElement::Perm(img.into_boxed_slice()))
}
