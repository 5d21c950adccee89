//! Partitions, ramification types and the partition-level predicates used by
//! the tree, dessin and series layers.
//!
//! A [`Partition`] is kept in canonical form (parts non-increasing, all
//! positive), so structural equality is partition equality. A [`TypeList`]
//! is an ordered list of full ramification types of a degree `n` polynomial;
//! the branch values themselves are never stored, only their rank.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A multiset of positive integers, stored non-increasing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} has a zero part"
            )));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    /// Builds a partition from parts already known to be positive.
    pub(crate) fn from_positive(mut parts: Vec<u32>) -> Self {
        debug_assert!(parts.iter().all(|&p| p > 0));
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// The unramified type `(1, ..., 1)` of degree `n`.
    pub fn ones(n: u32) -> Self {
        Partition(vec![1; n as usize])
    }

    /// The type `(2, 1, ..., 1)` of a simple branch point in degree `n`.
    pub fn simple(n: u32) -> Self {
        assert!(n >= 2, "a simple branch point needs degree at least 2");
        let mut parts = vec![1; n as usize - 1];
        parts[0] = 2;
        Partition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the parts.
    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Value → multiplicity, ascending by value.
    pub fn multiplicities(&self) -> BTreeMap<u32, u32> {
        let mut m = BTreeMap::new();
        for &p in &self.0 {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    /// Subtract one from every part and drop the zeros.
    pub fn reduce(&self) -> Partition {
        Partition(self.0.iter().filter(|&&p| p > 1).map(|&p| p - 1).collect())
    }

    /// Inverse of [`reduce`](Self::reduce) at fixed degree `n`.
    pub fn expand(&self, n: u32) -> Result<Partition> {
        let need = self.size() + self.len() as u32;
        if need > n {
            return Err(Error::InvalidPartition(format!(
                "cannot expand {self} to degree {n}: needs at least {need}"
            )));
        }
        let mut parts: Vec<u32> = self.0.iter().map(|&p| p + 1).collect();
        parts.extend(std::iter::repeat_n(1, (n - need) as usize));
        Ok(Partition(parts))
    }

    /// `[λ/2]`: a value of multiplicity `m` appears `⌊m/2⌋` times.
    pub fn half(&self) -> Partition {
        let mut parts = Vec::new();
        for (&v, &m) in self.multiplicities().iter().rev() {
            parts.extend(std::iter::repeat_n(v, (m / 2) as usize));
        }
        Partition(parts)
    }

    /// Order of the automorphism group: product of multiplicity factorials.
    pub fn aut(&self) -> BigUint {
        self.multiplicities()
            .values()
            .map(|&m| factorial(m))
            .fold(BigUint::one(), |acc, f| acc * f)
    }

    fn odd_multiplicity_values(&self) -> (Vec<u32>, Vec<u32>) {
        let (mut odd, mut even) = (Vec::new(), Vec::new());
        for (&v, &m) in &self.multiplicities() {
            if m % 2 == 1 {
                if v % 2 == 1 {
                    odd.push(v);
                } else {
                    even.push(v);
                }
            }
        }
        (odd, even)
    }

    fn even_ok(&self) -> bool {
        let (odd, even) = self.odd_multiplicity_values();
        even.is_empty() && odd.len() <= 1
    }

    fn odd_ok(&self) -> bool {
        let (odd, even) = self.odd_multiplicity_values();
        even.len() <= 1 && odd.len() <= 1
    }

    /// Sign attached to a partition in the odd-degree leading coefficient.
    pub fn epsilon_sign(&self) -> Result<i32> {
        if !self.odd_ok() {
            return Err(Error::Vanishing(format!(
                "{self} has two odd or two even values of odd multiplicity"
            )));
        }
        let (odd, even) = self.odd_multiplicity_values();
        Ok(match (odd.first(), even.first()) {
            (Some(_), None) => -1,
            (Some(o), Some(e)) if o > e => -1,
            _ => 1,
        })
    }

    /// Parses `"4,2,2"`; the empty string (or `"-"`) is the empty partition.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "-" || s == "()" {
            return Ok(Partition::empty());
        }
        let s = s.trim_start_matches('(').trim_end_matches(')');
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad part `{t}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Partition::parse(s)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

pub fn factorial(m: u32) -> BigUint {
    (1..=m).fold(BigUint::one(), |acc, i| acc * i)
}

/// Degree parity selector for the generating series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: u32) -> Parity {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn matches(self, n: u32) -> bool {
        Parity::of(n) == self
    }
}

impl FromStr for Parity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            _ => Err(Error::Parse(format!(
                "parity must be `even` or `odd`, got `{s}`"
            ))),
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Non-vanishing predicate for even-degree series: in each reduced type every
/// even value has even multiplicity and at most one odd value has odd
/// multiplicity.
pub fn even_nonvanishing(lambdas: &[Partition]) -> bool {
    lambdas.iter().all(Partition::even_ok)
}

/// Non-vanishing predicate for odd-degree series: in each reduced type at most
/// one odd and at most one even value have odd multiplicity.
pub fn odd_nonvanishing(lambdas: &[Partition]) -> bool {
    lambdas.iter().all(Partition::odd_ok)
}

pub fn nonvanishing(lambdas: &[Partition], parity: Parity) -> bool {
    match parity {
        Parity::Even => even_nonvanishing(lambdas),
        Parity::Odd => odd_nonvanishing(lambdas),
    }
}

/// `(ℓ, s)` controlling the top monomial of the series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesStats {
    pub ell: u32,
    pub s: u32,
}

/// `(ℓ, s)` without checking the non-vanishing predicate. For even parity `s`
/// counts partitions having some value of odd multiplicity; for odd parity it
/// counts partitions having an odd value of odd multiplicity.
pub fn series_stats_unchecked(lambdas: &[Partition], parity: Parity) -> SeriesStats {
    let ell = lambdas.iter().map(|l| l.half().len() as u32).sum();
    let s = lambdas
        .iter()
        .filter(|l| {
            let (odd, even) = l.odd_multiplicity_values();
            match parity {
                Parity::Even => !odd.is_empty() || !even.is_empty(),
                Parity::Odd => !odd.is_empty(),
            }
        })
        .count() as u32;
    SeriesStats { ell, s }
}

pub fn series_stats(lambdas: &[Partition], parity: Parity) -> Result<SeriesStats> {
    if !nonvanishing(lambdas, parity) {
        return Err(Error::Vanishing(format!(
            "{} series of {} vanishes identically",
            parity,
            format_list(lambdas)
        )));
    }
    Ok(series_stats_unchecked(lambdas, parity))
}

pub(crate) fn format_list(ps: &[Partition]) -> String {
    let s: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
    format!("[{}]", s.join(";"))
}

/// Parses a semicolon-separated list of partitions, e.g. `"2,2;2,1,1"`.
/// An entirely empty string is the empty list.
pub fn parse_partition_list(s: &str) -> Result<Vec<Partition>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(Partition::parse).collect()
}

/// Ordered full ramification types `(Λ_1, ..., Λ_k)` of a degree `n`
/// polynomial, with `Σ (n - l(Λ_i)) = n - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeList {
    degree: u32,
    entries: Vec<Partition>,
}

impl TypeList {
    pub fn new(entries: Vec<Partition>) -> Result<Self> {
        let degree = match entries.first() {
            Some(p) => p.size(),
            None => return Err(Error::InvalidTypeList("empty type list".into())),
        };
        Self::with_degree(degree, entries)
    }

    /// The empty list is accepted only for `n = 1` (the polynomial `z`).
    pub fn with_degree(degree: u32, entries: Vec<Partition>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidTypeList("degree must be positive".into()));
        }
        for p in &entries {
            if p.size() != degree {
                return Err(Error::InvalidTypeList(format!(
                    "{p} is not a partition of {degree}"
                )));
            }
            if p.len() as u32 == degree {
                return Err(Error::InvalidTypeList(format!(
                    "{p} is unramified and cannot be a branch type"
                )));
            }
        }
        let total: u32 = entries.iter().map(|p| degree - p.len() as u32).sum();
        if total != degree - 1 {
            return Err(Error::InvalidTypeList(format!(
                "Σ (n - l(Λ_i)) = {total}, expected n - 1 = {}",
                degree - 1
            )));
        }
        Ok(TypeList { degree, entries })
    }

    /// Parses `"3,1;2,2"`. Fails on malformed partitions or invalid lists.
    pub fn parse(s: &str) -> Result<Self> {
        TypeList::new(parse_partition_list(s)?)
    }

    /// Full types from reduced types at degree `n`.
    pub fn from_reduced(reduced: &[Partition], n: u32) -> Result<Self> {
        let entries = reduced
            .iter()
            .map(|l| l.expand(n))
            .collect::<Result<Vec<_>>>()?;
        TypeList::with_degree(n, entries)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn entries(&self) -> &[Partition] {
        &self.entries
    }

    /// Number of branch values `k`.
    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn reduced(&self) -> Vec<Partition> {
        self.entries.iter().map(Partition::reduce).collect()
    }

    /// Same entries in a different order.
    pub fn permuted(&self, order: &[usize]) -> TypeList {
        TypeList {
            degree: self.degree,
            entries: order.iter().map(|&i| self.entries[i].clone()).collect(),
        }
    }

    /// The list with entries sorted, used as an order-independent key.
    pub fn sorted_key(&self) -> TypeList {
        let mut entries = self.entries.clone();
        entries.sort();
        TypeList {
            degree: self.degree,
            entries,
        }
    }

    /// All distinct orderings of the entries, in lexicographic order of index
    /// sequences over the sorted multiset.
    pub fn distinct_orderings(&self) -> Vec<TypeList> {
        let mut sorted = self.entries.clone();
        sorted.sort();
        let mut out = Vec::new();
        loop {
            out.push(TypeList {
                degree: self.degree,
                entries: sorted.clone(),
            });
            if !next_permutation(&mut sorted) {
                break;
            }
        }
        out
    }

    /// Replaces the last two entries by `merged`, the type of the special
    /// label after contraction.
    pub(crate) fn contracted(&self, merged: Partition) -> TypeList {
        let k = self.entries.len();
        let mut entries = self.entries[..k - 2].to_vec();
        entries.push(merged);
        TypeList {
            degree: self.degree,
            entries,
        }
    }
}

impl fmt::Display for TypeList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.entries.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(";"))
    }
}

impl FromStr for TypeList {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TypeList::parse(s)
    }
}

/// Lexicographic successor; false when `v` was the last permutation.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// All partitions of `n` with exactly `len` parts, in decreasing lexicographic
/// order.
pub fn partitions_with_length(n: u32, len: usize) -> Vec<Partition> {
    fn go(rest: u32, slots: usize, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if slots == 0 {
            if rest == 0 {
                out.push(Partition(cur.clone()));
            }
            return;
        }
        if rest < slots as u32 {
            return;
        }
        let hi = max.min(rest - (slots as u32 - 1));
        for p in (1..=hi).rev() {
            if p * (slots as u32) < rest {
                break;
            }
            cur.push(p);
            go(rest - p, slots - 1, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if len == 0 {
        if n == 0 {
            out.push(Partition::empty());
        }
        return out;
    }
    go(n, len, n, &mut Vec::new(), &mut out);
    out
}

/// All partitions of `n`.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    if n == 0 {
        return vec![Partition::empty()];
    }
    (1..=n as usize)
        .flat_map(|len| partitions_with_length(n, len))
        .collect()
}

/// Every valid type list of degree `n` with at most `max_k` entries, in a
/// deterministic order.
pub fn all_type_lists(n: u32, max_k: usize) -> Vec<TypeList> {
    // candidate branch types grouped by order n - l
    let by_order: Vec<Vec<Partition>> = (0..n)
        .map(|o| {
            if o == 0 {
                Vec::new()
            } else {
                partitions_with_length(n, (n - o) as usize)
            }
        })
        .collect();
    let mut out = Vec::new();
    fn go(
        rest: u32,
        max_k: usize,
        by_order: &[Vec<Partition>],
        cur: &mut Vec<Partition>,
        n: u32,
        out: &mut Vec<TypeList>,
    ) {
        if rest == 0 {
            if !cur.is_empty() {
                out.push(TypeList {
                    degree: n,
                    entries: cur.clone(),
                });
            }
            return;
        }
        if cur.len() == max_k {
            return;
        }
        for o in 1..=rest {
            for p in &by_order[o as usize] {
                cur.push(p.clone());
                go(rest - o, max_k, by_order, cur, n, out);
                cur.pop();
            }
        }
    }
    if n >= 2 {
        go(n - 1, max_k, &by_order, &mut Vec::new(), n, &mut out);
    }
    out
}

/// Sub-multisets of `pool` (value → count) summing to `target`, each returned
/// as a partition, restricted to exactly `len` parts when given.
pub(crate) fn sub_partitions(
    pool: &BTreeMap<u32, u32>,
    target: u32,
    len: Option<usize>,
    copies: u32,
) -> Vec<Partition> {
    let values: Vec<(u32, u32)> = pool
        .iter()
        .rev()
        .map(|(&v, &c)| (v, c / copies))
        .filter(|&(_, c)| c > 0)
        .collect();
    let mut out = Vec::new();
    fn go(
        values: &[(u32, u32)],
        idx: usize,
        rest: u32,
        len: Option<usize>,
        cur: &mut Vec<u32>,
        out: &mut Vec<Partition>,
    ) {
        if rest == 0 {
            if len.is_none_or(|l| l == cur.len()) {
                out.push(Partition(cur.clone()));
            }
            return;
        }
        if idx == values.len() {
            return;
        }
        if let Some(l) = len {
            if cur.len() >= l {
                return;
            }
        }
        let (v, c) = values[idx];
        let max_take = c.min(rest / v);
        for take in (0..=max_take).rev() {
            for _ in 0..take {
                cur.push(v);
            }
            go(values, idx + 1, rest - take * v, len, cur, out);
            for _ in 0..take {
                cur.pop();
            }
        }
    }
    go(&values, 0, target, len, &mut Vec::new(), &mut out);
    out
}
