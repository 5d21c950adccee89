//! Exponential generating series of s-numbers as polynomials in `q`, `f` and
//! `g`, where `f = tanh q` and `g = 1/cosh q`.
//!
//! Every series is handled through its exact integer Taylor data: `f` and `g`
//! have integer egf coefficients, and so do all products of them, which keeps
//! extraction to order 200 cheap.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::euler_numbers;
use crate::partition::{
    nonvanishing, series_stats, series_stats_unchecked, Parity, Partition, TypeList,
};
use crate::snumber::{s_number, Mode};

pub type Rat = BigRational;

fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `Σ c_{a,b} q^a f^b`, optionally times `g`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QFPoly {
    terms: BTreeMap<(u32, u32), Rat>,
    g_factor: bool,
}

impl QFPoly {
    pub fn zero() -> Self {
        QFPoly::default()
    }

    pub fn monomial(a: u32, b: u32, c: Rat, g_factor: bool) -> Self {
        let mut p = QFPoly {
            terms: BTreeMap::new(),
            g_factor,
        };
        p.add_term(a, b, c);
        p
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, Rat::one(), false)
    }

    pub fn q() -> Self {
        Self::monomial(1, 0, Rat::one(), false)
    }

    pub fn f() -> Self {
        Self::monomial(0, 1, Rat::one(), false)
    }

    pub fn g() -> Self {
        Self::monomial(0, 0, Rat::one(), true)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), Rat)>, g_factor: bool) -> Self {
        let mut p = QFPoly {
            terms: BTreeMap::new(),
            g_factor,
        };
        for ((a, b), c) in terms {
            p.add_term(a, b, c);
        }
        p
    }

    pub fn g_factor(&self) -> bool {
        self.g_factor
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), Rat> {
        &self.terms
    }

    pub fn coeff(&self, a: u32, b: u32) -> Rat {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, a: u32, b: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((a, b)).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    /// Sum of two polynomials with the same `g` factor (a zero polynomial
    /// adopts the other's factor).
    pub fn add(&self, other: &QFPoly) -> QFPoly {
        let mut out = self.clone();
        if self.is_zero() {
            out.g_factor = other.g_factor;
        } else {
            assert!(
                other.is_zero() || other.g_factor == self.g_factor,
                "cannot add series with and without the g factor"
            );
        }
        for (&(a, b), c) in &other.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> QFPoly {
        QFPoly::from_terms(self.terms.iter().map(|(&k, v)| (k, v * c)), self.g_factor)
    }

    /// The same polynomial times `q f`; used for the `g` rule.
    fn times_qf(&self) -> QFPoly {
        QFPoly::from_terms(
            self.terms
                .iter()
                .map(|(&(a, b), v)| ((a + 1, b + 1), v.clone())),
            self.g_factor,
        )
    }

    /// Largest `(a, b)` in lexicographic order on `(b, a)`.
    pub fn top_monomial(&self) -> Option<((u32, u32), Rat)> {
        self.terms
            .iter()
            .max_by_key(|(&(a, b), _)| (b, a))
            .map(|(&k, v)| (k, v.clone()))
    }
}

/// `D = q d/dq` with `Dq = q`, `Df = q(1 - f²)`, `Dg = -q f g`.
pub fn apply_d(p: &QFPoly) -> QFPoly {
    let mut out = QFPoly {
        terms: BTreeMap::new(),
        g_factor: p.g_factor,
    };
    for (&(a, b), c) in &p.terms {
        if a > 0 {
            out.add_term(a, b, c * rat(a as i64));
        }
        if b > 0 {
            out.add_term(a + 1, b - 1, c * rat(b as i64));
            out.add_term(a + 1, b + 1, -(c * rat(b as i64)));
        }
    }
    if p.g_factor {
        let correction = p.times_qf();
        for (&(a, b), c) in &correction.terms {
            out.add_term(a, b, -c.clone());
        }
    }
    out
}

fn two_pow_factorial(p: u32) -> Rat {
    let mut d = BigInt::one();
    for i in 1..=p {
        d *= BigInt::from(2 * i);
    }
    Rat::from_integer(d)
}

/// `(D-1)(D-3)…(D-2p+1) f / (2^p p!)`.
pub fn f_p(p: u32) -> QFPoly {
    let mut x = QFPoly::f();
    for j in 0..p {
        x = apply_d(&x).add(&x.scale(&rat(-(2 * j as i64 + 1))));
    }
    x.scale(&two_pow_factorial(p).recip())
}

/// `D(D-2)…(D-2p+2) g / (2^p p!)`.
pub fn g_p(p: u32) -> QFPoly {
    let mut x = QFPoly::g();
    for j in 0..p {
        x = apply_d(&x).add(&x.scale(&rat(-(2 * j as i64))));
    }
    x.scale(&two_pow_factorial(p).recip())
}

impl fmt::Display for QFPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = if self.terms.is_empty() {
            "0".to_string()
        } else {
            let mut s = String::new();
            for (i, (&(a, b), c)) in self.terms.iter().enumerate() {
                let neg = c.is_negative();
                if i == 0 {
                    if neg {
                        s.push('-');
                    }
                } else {
                    s.push_str(if neg { " - " } else { " + " });
                }
                s.push_str(&format!("{} * q^{a} * f^{b}", c.abs()));
            }
            s
        };
        if self.g_factor {
            write!(f, "g * ({body})")
        } else {
            write!(f, "{body}")
        }
    }
}

impl FromStr for QFPoly {
    type Err = Error;

    /// Reads the text form written by `Display`. Factors may be omitted or
    /// reordered inside a term, e.g. `"f - 1/2 * q * f^2"`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |m: &str| Error::Parse(format!("{m} in series {s:?}"));
        let mut body = s.trim();
        let mut g_factor = false;
        if let Some(rest) = body.strip_prefix("g *") {
            g_factor = true;
            body = rest.trim();
            if let Some(inner) = body.strip_prefix('(').and_then(|b| b.strip_suffix(')')) {
                body = inner.trim();
            }
        } else if body == "g" {
            return Ok(QFPoly::g());
        }
        let mut p = QFPoly {
            terms: BTreeMap::new(),
            g_factor,
        };
        if body == "0" {
            return Ok(p);
        }
        // split into signed terms
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for ch in body.chars() {
            if (ch == '+' || ch == '-') && !cur.trim().is_empty() && !cur.trim_end().ends_with('^')
            {
                terms.push((neg, cur.trim().to_string()));
                cur.clear();
                neg = ch == '-';
            } else if (ch == '+' || ch == '-') && cur.trim().is_empty() {
                if ch == '-' {
                    neg = !neg;
                }
            } else {
                cur.push(ch);
            }
        }
        if !cur.trim().is_empty() {
            terms.push((neg, cur.trim().to_string()));
        }
        if terms.is_empty() {
            return Err(err("empty expression"));
        }
        for (neg, t) in terms {
            let (mut a, mut b) = (0u32, 0u32);
            let mut c = Rat::one();
            for factor in t.split('*').map(str::trim) {
                if factor.is_empty() {
                    return Err(err("empty factor"));
                }
                let (base, exp) = match factor.split_once('^') {
                    Some((x, e)) => (
                        x.trim(),
                        e.trim().parse::<u32>().map_err(|_| err("bad exponent"))?,
                    ),
                    None => (factor, 1),
                };
                match base {
                    "q" => a += exp,
                    "f" => b += exp,
                    _ => {
                        if factor.contains('^') {
                            return Err(err("exponent on a coefficient"));
                        }
                        c *= parse_rat(base).ok_or_else(|| err("bad coefficient"))?;
                    }
                }
            }
            if neg {
                c = -c;
            }
            p.add_term(a, b, c);
        }
        Ok(p)
    }
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
        None => Some(Rat::from_integer(s.parse().ok()?)),
    }
}

/// JSON form: `{"g_factor": bool, "terms": [[a, b, "num", "den"], ...]}`.
#[derive(Serialize, Deserialize)]
struct QFPolyJson {
    g_factor: bool,
    terms: Vec<(u32, u32, String, String)>,
}

impl Serialize for QFPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QFPolyJson {
            g_factor: self.g_factor,
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| (a, b, c.numer().to_string(), c.denom().to_string()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QFPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = QFPolyJson::deserialize(d)?;
        let mut terms = Vec::new();
        for (a, b, n, den) in j.terms {
            let c = parse_rat(&format!("{n}/{den}"))
                .ok_or_else(|| serde::de::Error::custom("bad rational coefficient"))?;
            terms.push(((a, b), c));
        }
        Ok(QFPoly::from_terms(terms, j.g_factor))
    }
}

/// `Σ c_m q^m / m!` for `m = 0..=order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgfSeries {
    pub order: usize,
    #[serde(with = "rat_vec")]
    pub coefficients: Vec<Rat>,
}

mod rat_vec {
    use super::{parse_rat, Rat};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|c| c.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rat(s).ok_or_else(|| serde::de::Error::custom("bad rational")))
            .collect()
    }
}

impl EgfSeries {
    pub fn coeff(&self, m: usize) -> &Rat {
        &self.coefficients[m]
    }

    /// Coefficients as integers, if they all are.
    pub fn integers(&self) -> Option<Vec<BigInt>> {
        self.coefficients
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }
}

/// Pascal rows `0..=order`.
fn binomials(order: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let mut row = vec![BigInt::one(); m + 1];
        for i in 1..m {
            row[i] = &rows[m - 1][i - 1] + &rows[m - 1][i];
        }
        rows.push(row);
    }
    rows
}

fn egf_mul(x: &[BigInt], y: &[BigInt], binom: &[Vec<BigInt>]) -> Vec<BigInt> {
    (0..x.len())
        .map(|m| {
            let mut acc = BigInt::zero();
            for i in 0..=m {
                if x[i].is_zero() || y[m - i].is_zero() {
                    continue;
                }
                acc += &binom[m][i] * &x[i] * &y[m - i];
            }
            acc
        })
        .collect()
}

/// Integer egf coefficients of `tanh` and `sech` through `order`.
pub fn f_g_coefficients(order: usize) -> (Vec<BigInt>, Vec<BigInt>) {
    let e = euler_numbers(order);
    let mut f = vec![BigInt::zero(); order + 1];
    let mut g = vec![BigInt::zero(); order + 1];
    for m in 0..=order {
        let sign = if (m / 2) % 2 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        if m % 2 == 1 {
            f[m] = &e[m] * &sign;
        } else {
            g[m] = &e[m] * &sign;
        }
    }
    (f, g)
}

/// Exact Taylor coefficients of `p` up to `q^order / order!`.
pub fn taylor(p: &QFPoly, order: usize) -> EgfSeries {
    let binom = binomials(order);
    let (f, g) = f_g_coefficients(order);
    let max_b = p.terms.keys().map(|&(_, b)| b).max().unwrap_or(0);
    let mut one = vec![BigInt::zero(); order + 1];
    one[0] = BigInt::one();
    let mut powers = vec![if p.g_factor { g.clone() } else { one }];
    for b in 1..=max_b as usize {
        let next = egf_mul(&powers[b - 1], &f, &binom);
        powers.push(next);
    }
    let mut out = vec![Rat::zero(); order + 1];
    for (&(a, b), c) in &p.terms {
        let base = &powers[b as usize];
        let a = a as usize;
        for m in a..=order {
            if base[m - a].is_zero() {
                continue;
            }
            // q^a X: m!/(m-a)! x_{m-a}
            let mut falling = BigInt::one();
            for j in 0..a {
                falling *= BigInt::from(m - j);
            }
            out[m] += c * Rat::from_integer(falling * &base[m - a]);
        }
    }
    EgfSeries {
        order,
        coefficients: out,
    }
}

/// The parity class of `m` carrying the non-zero coefficients of the series
/// of `lambdas` at degree parity `parity`.
pub fn admissible_parity(lambdas: &[Partition], parity: Parity) -> u32 {
    let total: u32 = lambdas.iter().map(Partition::size).sum();
    let n_mod = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    // m = n - 1 - Σ|λ|
    (n_mod + 2 + 2 * total - 1 - total) % 2
}

/// s-numbers `s(m)` of a series, indexed by the number `m` of simple branch
/// values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SNumberTable {
    pub lambdas: Vec<Partition>,
    pub parity: Parity,
    pub values: BTreeMap<u32, BigInt>,
}

impl SNumberTable {
    /// The type list counted by `s(m)`, or `None` when some reduced type
    /// does not fit into degree `n` (then no polynomial exists and `s = 0`).
    pub fn type_list(lambdas: &[Partition], m: u32) -> Result<Option<TypeList>> {
        let n = m + 1 + lambdas.iter().map(Partition::size).sum::<u32>();
        let mut entries = Vec::new();
        for l in lambdas.iter().filter(|l| !l.is_empty()) {
            match l.expand(n) {
                Ok(p) => entries.push(p),
                Err(_) => return Ok(None),
            }
        }
        entries.extend((0..m).map(|_| Partition::simple(n)));
        TypeList::with_degree(n, entries).map(Some)
    }

    /// Computes `s(m)` for every admissible `m ≤ m_max`.
    pub fn build(lambdas: &[Partition], parity: Parity, m_max: u32, mode: Mode) -> Result<Self> {
        Self::build_with(lambdas, parity, m_max, |t| {
            s_number(t, mode).map(BigInt::from)
        })
    }

    /// As `build`, with a caller-supplied s-number source (for caching).
    pub fn build_with(
        lambdas: &[Partition],
        parity: Parity,
        m_max: u32,
        source: impl Fn(&TypeList) -> Result<BigInt> + Sync,
    ) -> Result<Self> {
        let r = admissible_parity(lambdas, parity);
        let ms: Vec<u32> = (0..=m_max).filter(|m| m % 2 == r).collect();
        let values: Vec<Result<(u32, BigInt)>> = ms
            .par_iter()
            .map(|&m| {
                let v = match Self::type_list(lambdas, m)? {
                    Some(t) => source(&t)?,
                    None => BigInt::zero(),
                };
                Ok((m, v))
            })
            .collect();
        Ok(SNumberTable {
            lambdas: lambdas.to_vec(),
            parity,
            values: values.into_iter().collect::<Result<_>>()?,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(Zero::is_zero)
    }

    /// `m,s(m)` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,s\n");
        for (m, v) in &self.values {
            s.push_str(&format!("{m},{v}\n"));
        }
        s
    }
}

/// Monomials allowed in the series of `lambdas`.
///
/// The series is a sum over bases of products of `f_p` (times one `g_p` for
/// odd degree), one factor per chain. A term `q^a` needs `a` distinguished
/// maxima, each using up a pair of conjugate critical points, so at most
/// `L - 2a` critical points are real (`L = Σ l(λ_i)`), which bounds the
/// number of chains. Each `D` raises the power of `f` by at most one, hence
/// `b ≤ a + chains`. In the top row `a = ℓ` the sharper bound `ℓ + s + 1`
/// (even) or `ℓ + s` (odd) applies.
pub fn fit_basis(lambdas: &[Partition], parity: Parity) -> Vec<(u32, u32)> {
    let st = series_stats_unchecked(lambdas, parity);
    let total_len: u32 = lambdas.iter().map(|l| l.len() as u32).sum();
    let (top, extra) = match parity {
        Parity::Even => (st.ell + st.s + 1, 1),
        Parity::Odd => (st.ell + st.s, 0),
    };
    let r = admissible_parity(lambdas, parity);
    let mut out = Vec::new();
    for a in 0..=st.ell {
        let b_max = if a == st.ell {
            top.min(total_len + extra - a)
        } else {
            total_len + extra - a
        };
        for b in 0..=b_max {
            if (a + b) % 2 == r {
                out.push((a, b));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitReport {
    pub series: QFPoly,
    pub basis: Vec<(u32, u32)>,
    /// Values of `m` that determined the solution.
    pub fitted: Vec<u32>,
    /// Values of `m` only checked against the solution.
    pub held_out: Vec<u32>,
}

pub const MIN_HELD_OUT: usize = 2;

/// Exact fit of the series of `table` in the monomial basis; every supplied
/// coefficient must be reproduced.
pub fn fit_f(table: &SNumberTable) -> Result<QFPoly> {
    fit_f_report(table).map(|r| r.series)
}

pub fn fit_f_report(table: &SNumberTable) -> Result<FitReport> {
    fit_with_basis(table, fit_basis(&table.lambdas, table.parity))
}

/// Exact fit against an arbitrary monomial basis.
pub fn fit_with_basis(table: &SNumberTable, basis: Vec<(u32, u32)>) -> Result<FitReport> {
    let g_factor = table.parity == Parity::Odd;
    let n_unknowns = basis.len();
    let have = table.values.len();
    if have < n_unknowns + MIN_HELD_OUT {
        return Err(Error::InsufficientData {
            needed: n_unknowns + MIN_HELD_OUT,
            have,
        });
    }
    let m_max = *table.values.keys().max().expect("non-empty table") as usize;
    let columns: Vec<EgfSeries> = basis
        .iter()
        .map(|&(a, b)| taylor(&QFPoly::monomial(a, b, Rat::one(), g_factor), m_max))
        .collect();
    let rows: Vec<(u32, Vec<Rat>, Rat)> = table
        .values
        .iter()
        .map(|(&m, v)| {
            (
                m,
                columns
                    .iter()
                    .map(|c| c.coeff(m as usize).clone())
                    .collect(),
                Rat::from_integer(v.clone()),
            )
        })
        .collect();

    // incremental elimination until the basis is pinned down
    let mut echelon: Vec<(usize, Vec<Rat>, Rat)> = Vec::new();
    let mut used = 0;
    for (_, row, rhs) in &rows {
        if echelon.len() == n_unknowns {
            break;
        }
        used += 1;
        let (mut row, mut rhs) = (row.clone(), rhs.clone());
        for (pivot, er, erhs) in &echelon {
            if !row[*pivot].is_zero() {
                let factor = row[*pivot].clone();
                for j in 0..n_unknowns {
                    row[j] -= &factor * &er[j];
                }
                rhs -= &factor * erhs;
            }
        }
        match row.iter().position(|c| !c.is_zero()) {
            Some(p) => {
                let inv = row[p].recip();
                for c in row.iter_mut() {
                    *c *= &inv;
                }
                rhs *= &inv;
                for (_, er, erhs) in echelon.iter_mut() {
                    if !er[p].is_zero() {
                        let factor = er[p].clone();
                        for j in 0..n_unknowns {
                            let d = &factor * &row[j];
                            er[j] -= d;
                        }
                        *erhs -= &factor * &rhs;
                    }
                }
                echelon.push((p, row, rhs));
            }
            None => {
                if !rhs.is_zero() {
                    return Err(Error::InconsistentFit(format!(
                        "dependent row has non-zero residual {rhs}"
                    )));
                }
            }
        }
    }
    if echelon.len() < n_unknowns || rows.len() - used < MIN_HELD_OUT {
        return Err(Error::InsufficientData {
            needed: used.max(n_unknowns) + MIN_HELD_OUT,
            have,
        });
    }
    let mut solution = vec![Rat::zero(); n_unknowns];
    for (p, _, rhs) in &echelon {
        solution[*p] = rhs.clone();
    }
    for (m, row, rhs) in &rows[used..] {
        let predicted: Rat = row.iter().zip(&solution).map(|(a, b)| a * b).sum();
        if &predicted != rhs {
            return Err(Error::InconsistentFit(format!(
                "held-out coefficient at m = {m}: predicted {predicted}, table has {rhs}"
            )));
        }
    }
    let series = QFPoly::from_terms(basis.iter().copied().zip(solution), g_factor);
    Ok(FitReport {
        series,
        basis,
        fitted: rows[..used].iter().map(|r| r.0).collect(),
        held_out: rows[used..].iter().map(|r| r.0).collect(),
    })
}

/// Builds a table just large enough for a fit with `extra` held-out values
/// beyond the minimum and fits it.
pub fn fit_from_engine(
    lambdas: &[Partition],
    parity: Parity,
    mode: Mode,
    extra: u32,
) -> Result<FitReport> {
    let unknowns = fit_basis(lambdas, parity).len() as u32;
    let r = admissible_parity(lambdas, parity);
    let mut count = unknowns + MIN_HELD_OUT as u32 + extra;
    loop {
        let m_max = r + 2 * (count - 1);
        let table = SNumberTable::build(lambdas, parity, m_max, mode)?;
        match fit_f_report(&table) {
            Err(Error::InsufficientData { .. }) if count < unknowns * 4 + 8 => count += 2,
            other => return other,
        }
    }
}

/// Closed-form top monomial and its coefficient.
pub fn leading_coefficient(lambdas: &[Partition], parity: Parity) -> Result<((u32, u32), Rat)> {
    let st = series_stats(lambdas, parity)?;
    let mut denom = BigInt::one();
    for l in lambdas {
        denom *= BigInt::from(l.half().aut());
    }
    let mut fact = BigInt::one();
    for i in 1..=(st.ell + st.s) {
        fact *= BigInt::from(i);
    }
    let mut value = Rat::new(fact, denom);
    if st.ell % 2 == 1 {
        value = -value;
    }
    value /= Rat::from_integer(BigInt::from(2u32).pow(st.ell));
    let b = match parity {
        Parity::Even => st.ell + st.s + 1,
        Parity::Odd => {
            let eps: i32 = lambdas
                .iter()
                .map(Partition::epsilon_sign)
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .product();
            if eps < 0 {
                value = -value;
            }
            st.ell + st.s
        }
    };
    Ok(((st.ell, b), value))
}

/// `true` iff the fitted series vanishes exactly when the non-vanishing
/// predicate fails.
pub fn vanishing_consistency(table: &SNumberTable) -> Result<bool> {
    let fit = fit_f(table)?;
    Ok(fit.is_zero() != nonvanishing(&table.lambdas, table.parity))
}

/// `ln |x|` for big integers beyond `f64` range.
pub fn ln_abs(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.abs().to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top: BigInt = x.abs() >> shift;
    top.to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_abs_rat(x: &Rat) -> f64 {
    ln_abs(x.numer()) - ln_abs(x.denom())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AsymptoticReport {
    /// Residue class of `m` carrying the coefficients.
    pub parity_of_m: u32,
    /// `(m, |s(m+2)| / ((m+1)(m+2)|s(m)|))`.
    pub ratios: Vec<(u32, f64)>,
    /// `(m, ln|s(m)| / (m ln m))` for `m ≥ 2`.
    pub log_trend: Vec<(u32, f64)>,
}

pub const POLE_RATIO: f64 = 4.0 / (std::f64::consts::PI * std::f64::consts::PI);

impl AsymptoticReport {
    /// Smallest admissible `m ≥ target`.
    pub fn admissible_at_least(&self, target: u32) -> u32 {
        if target % 2 == self.parity_of_m {
            target
        } else {
            target + 1
        }
    }

    pub fn ratio_at(&self, target: u32) -> Option<f64> {
        let m = self.admissible_at_least(target);
        self.ratios.iter().find(|r| r.0 == m).map(|r| r.1)
    }

    pub fn relative_error_at(&self, target: u32) -> Option<f64> {
        self.ratio_at(target)
            .map(|r| (r - POLE_RATIO).abs() / POLE_RATIO)
    }

    /// Whether `ln|s(m)|/(m ln m)` increases along `from, from+step, …, to`
    /// (each moved to the nearest admissible `m` above).
    pub fn trend_increasing(&self, from: u32, to: u32, step: u32) -> Option<bool> {
        let mut prev: Option<f64> = None;
        let mut t = from;
        while t <= to {
            let m = self.admissible_at_least(t);
            let v = self.log_trend.iter().find(|r| r.0 == m)?.1;
            if let Some(p) = prev {
                if v <= p {
                    return Some(false);
                }
            }
            prev = Some(v);
            t += step;
        }
        Some(true)
    }
}

/// Growth diagnostics of the coefficients of `series` up to `m_max`.
pub fn asymptotic_check(
    series: &QFPoly,
    parity_of_m: Parity,
    m_max: u32,
) -> Result<AsymptoticReport> {
    if series.is_zero() {
        return Err(Error::ZeroSeries);
    }
    let r = match parity_of_m {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let t = taylor(series, m_max as usize);
    let mut ratios = Vec::new();
    let mut log_trend = Vec::new();
    for m in (r..=m_max).step_by(2) {
        let s = t.coeff(m as usize);
        if s.is_zero() {
            continue;
        }
        if m >= 2 {
            let mf = m as f64;
            log_trend.push((m, ln_abs_rat(s) / (mf * mf.ln())));
        }
        if m + 2 <= m_max {
            let s2 = t.coeff(m as usize + 2);
            if !s2.is_zero() {
                let scale = ((m + 1) as f64).ln() + ((m + 2) as f64).ln();
                ratios.push((m, (ln_abs_rat(s2) - ln_abs_rat(s) - scale).exp()));
            }
        }
    }
    Ok(AsymptoticReport {
        parity_of_m: r,
        ratios,
        log_trend,
    })
}

/// Greatest common divisor of the numerators, handy for compact display.
pub fn content(p: &QFPoly) -> BigInt {
    p.terms
        .values()
        .fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(s: &EgfSeries) -> Vec<i64> {
        s.integers()
            .unwrap()
            .iter()
            .map(|x| x.try_into().unwrap())
            .collect()
    }

    #[test]
    fn d_rules() {
        let df = apply_d(&QFPoly::f());
        assert_eq!(df, "q - q * f^2".parse().unwrap());
        assert!(apply_d(&QFPoly::one()).is_zero());
        let dg = apply_d(&QFPoly::g());
        assert!(dg.g_factor());
        assert_eq!(dg.coeff(1, 1), rat(-1));
        assert_eq!(dg.terms().len(), 1);
        assert_eq!(apply_d(&QFPoly::q()), QFPoly::q());
    }

    #[test]
    fn first_f_p() {
        assert_eq!(f_p(0), QFPoly::f());
        assert_eq!(g_p(0), QFPoly::g());
        let expect: QFPoly = "1/2 * q - 1/2 * q * f^2 - 1/2 * f".parse().unwrap();
        assert_eq!(f_p(1), expect);
    }

    #[test]
    fn taylor_of_f_and_g() {
        assert_eq!(
            ints(&taylor(&QFPoly::f(), 7)),
            vec![0, 1, 0, -2, 0, 16, 0, -272]
        );
        assert_eq!(ints(&taylor(&QFPoly::g(), 6)), vec![1, 0, -1, 0, 5, 0, -61]);
        let f = taylor(&QFPoly::f(), 12);
        let qf = taylor(&QFPoly::monomial(1, 1, Rat::one(), false), 12);
        for m in 1..=12 {
            assert_eq!(qf.coeff(m), &(f.coeff(m - 1) * rat(m as i64)));
        }
    }

    #[test]
    fn pythagoras() {
        let f = taylor(&QFPoly::f(), 24);
        let g = taylor(&QFPoly::g(), 24);
        let b = binomials(24);
        let f: Vec<BigInt> = f.integers().unwrap();
        let g: Vec<BigInt> = g.integers().unwrap();
        let ff = egf_mul(&f, &f, &b);
        let gg = egf_mul(&g, &g, &b);
        for m in 0..=24 {
            let v = &ff[m] + &gg[m];
            assert_eq!(
                v,
                if m == 0 {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            );
        }
    }

    #[test]
    fn f_p_g_p_count_alternating_permutations() {
        use crate::oracle::alternating_with_maxima;
        for p in 0..=4u32 {
            let fp = taylor(&f_p(p), 14);
            let gp = taylor(&g_p(p), 14);
            for m in 0..=14usize {
                if m % 2 == 1 {
                    let c = fp.coeff(m);
                    assert_eq!(
                        c.abs(),
                        Rat::from_integer(alternating_with_maxima(m, p as usize)),
                        "f_{p} at {m}"
                    );
                    assert!(gp.coeff(m).is_zero());
                } else {
                    let c = gp.coeff(m);
                    assert_eq!(
                        c.abs(),
                        Rat::from_integer(alternating_with_maxima(m, p as usize)),
                        "g_{p} at {m}"
                    );
                    assert!(fp.coeff(m).is_zero());
                }
            }
        }
    }

    #[test]
    fn text_and_json_round_trip() {
        let p = f_p(2).add(&QFPoly::monomial(3, 0, Rat::new(7.into(), 3.into()), false));
        assert_eq!(p.to_string().parse::<QFPoly>().unwrap(), p);
        let js = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<QFPoly>(&js).unwrap(), p);
        let g = g_p(1);
        assert_eq!(g.to_string().parse::<QFPoly>().unwrap(), g);
        assert_eq!("0".parse::<QFPoly>().unwrap(), QFPoly::zero());
        assert!("q^x".parse::<QFPoly>().is_err());
    }

    #[test]
    fn empty_series() {
        let even = fit_from_engine(&[], Parity::Even, Mode::Multiplicative, 0).unwrap();
        assert_eq!(even.series, QFPoly::f());
        let odd = fit_from_engine(&[], Parity::Odd, Mode::Multiplicative, 0).unwrap();
        assert_eq!(odd.series, QFPoly::g());
        assert!(odd.held_out.len() >= MIN_HELD_OUT);
    }

    #[test]
    fn leading_closed_form() {
        let l22 = vec![Partition::parse("2,2").unwrap()];
        assert_eq!(
            leading_coefficient(&l22, Parity::Even).unwrap(),
            ((1, 2), Rat::new((-1).into(), 2.into()))
        );
        assert_eq!(
            leading_coefficient(&[], Parity::Even).unwrap(),
            ((0, 1), Rat::one())
        );
        assert!(leading_coefficient(&[Partition::parse("2").unwrap()], Parity::Even).is_err());
    }

    #[test]
    fn insufficient_data() {
        let t = SNumberTable::build(&[], Parity::Even, 3, Mode::Multiplicative).unwrap();
        assert!(matches!(fit_f(&t), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn corrupted_table_is_inconsistent() {
        let mut t = SNumberTable::build(&[], Parity::Even, 11, Mode::Multiplicative).unwrap();
        *t.values.get_mut(&11).unwrap() += 1;
        assert!(matches!(fit_f(&t), Err(Error::InconsistentFit(_))));
    }

    #[test]
    fn euler_family_ratios() {
        let g = asymptotic_check(&QFPoly::g(), Parity::Even, 40).unwrap();
        assert!(g.relative_error_at(20).unwrap() < 0.01);
        let f = asymptotic_check(&QFPoly::f(), Parity::Odd, 40).unwrap();
        assert!(f.relative_error_at(20).unwrap() < 0.01);
        assert!(asymptotic_check(&QFPoly::zero(), Parity::Odd, 10).is_err());
    }

    fn arb_poly() -> impl Strategy<Value = QFPoly> {
        (
            proptest::collection::btree_map((0u32..3, 0u32..4), -5i64..6, 0..5),
            any::<bool>(),
        )
            .prop_map(|(m, g)| QFPoly::from_terms(m.into_iter().map(|(k, v)| (k, rat(v))), g))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn d_scales_coefficients(p in arb_poly(), order in 0usize..=20) {
            let t = taylor(&p, order);
            let dt = taylor(&apply_d(&p), order);
            for m in 0..=order {
                prop_assert_eq!(dt.coeff(m), &(t.coeff(m) * rat(m as i64)));
            }
        }

        #[test]
        fn text_round_trip(p in arb_poly()) {
            prop_assert_eq!(p.to_string().parse::<QFPoly>().unwrap(), p);
        }
    }
}
