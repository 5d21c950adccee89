//! s-numbers in two independent ways: summing signs over explicitly built
//! dessins, and the multiplicative formula over contracted dessins.
//!
//! The multiplicative side never builds rotation systems. A contracted dessin
//! only enters the formula through its *profile*: the real vertices of the
//! top label (order and direction of the right real edge), the orders of the
//! top-label vertices in the upper half-plane, and the sign carried by the
//! lower labels. Profiles are produced level by level by inserting trees
//! into the top label, exactly as in the explicit enumeration, but dessins
//! sharing a profile are merged into one weighted entry.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::insertion::{explicit_s_number, Explicit, Marking};
use crate::partition::{partitions_with_length, sub_partitions, Partition, TypeList};
use crate::trees::{
    disorders_of, enumerate_real_trees, marked_count_cached, signed_sum_cached, tree_side, Color,
    PlaneTree, RealBWTree,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Explicit,
    #[default]
    Multiplicative,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit" => Ok(Mode::Explicit),
            "multiplicative" => Ok(Mode::Multiplicative),
            _ => Err(Error::Parse(format!(
                "mode must be `explicit` or `multiplicative`, got `{s}`"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Explicit => "explicit",
            Mode::Multiplicative => "multiplicative",
        })
    }
}

/// What later insertions need to know about a dessin.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Profile {
    /// Top-label real vertices left to right: `(order, right edge outgoing)`.
    real: Vec<(u32, bool)>,
    /// Orders of the top-label vertices in the upper half-plane, sorted.
    upper: Vec<u32>,
}

/// Signed and unsigned number of dessins sharing a profile.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Weight {
    signed: i128,
    count: i128,
}

/// A real tree seen from the outside.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct TreeShape {
    black: Vec<u32>,
    white: Vec<(u32, bool)>,
    upper_white: Vec<u32>,
}

type ShapeKey = (Partition, Partition, Color);

#[derive(Default)]
struct ShapeCache {
    map: Mutex<HashMap<ShapeKey, Arc<Vec<(TreeShape, i128)>>>>,
}

impl ShapeCache {
    fn get(
        &self,
        nb: &Partition,
        nw: &Partition,
        side: Color,
    ) -> Result<Arc<Vec<(TreeShape, i128)>>> {
        let key = (nb.clone(), nw.clone(), side);
        if let Some(v) = self.map.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let mut grouped: HashMap<TreeShape, i128> = HashMap::new();
        for t in enumerate_real_trees(nb, nw)? {
            if tree_side(&t) != side {
                continue;
            }
            *grouped.entry(shape_of(&t)).or_insert(0) += 1;
        }
        let mut v: Vec<(TreeShape, i128)> = grouped.into_iter().collect();
        v.sort_by(|a, b| {
            (&a.0.black, &a.0.white, &a.0.upper_white).cmp(&(
                &b.0.black,
                &b.0.white,
                &b.0.upper_white,
            ))
        });
        let v = Arc::new(v);
        self.map.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }
}

fn shape_of(t: &RealBWTree) -> TreeShape {
    let rp = t.real_part();
    let last = rp.len() - 1;
    let mut black = Vec::new();
    let mut white = Vec::new();
    for (i, &(c, d)) in rp.iter().enumerate() {
        match c {
            Color::Black => black.push(d),
            Color::White => white.push((d, i == last)),
        }
    }
    let mut upper_white = Vec::new();
    fn walk(p: &PlaneTree, acc: &mut Vec<u32>) {
        if p.root_color == Color::White {
            acc.push(p.children.len() as u32 + 1);
        }
        for c in &p.children {
            walk(c, acc);
        }
    }
    for v in t.spine() {
        for p in &v.upper {
            walk(p, &mut upper_white);
        }
    }
    TreeShape {
        black,
        white,
        upper_white,
    }
}

fn take(pool: &BTreeMap<u32, u32>, p: &Partition, copies: u32) -> BTreeMap<u32, u32> {
    let mut out = pool.clone();
    for &x in p.parts() {
        let e = out.get_mut(&x).expect("sub-multiset");
        *e -= copies;
        if *e == 0 {
            out.remove(&x);
        }
    }
    out
}

fn pool_of_all(n: u32) -> BTreeMap<u32, u32> {
    (1..=n).map(|v| (v, n)).collect()
}

/// Splits the top label of every profile into `black` (final) and a new top
/// label; `white`, when given, fixes the new top label's orders.
fn step(
    states: &HashMap<Profile, Weight>,
    black: &Partition,
    white: Option<&Partition>,
    n: u32,
    shapes: &ShapeCache,
) -> Result<HashMap<Profile, Weight>> {
    let pool_b = black.multiplicities();
    let pool_w = white.map(Partition::multiplicities);
    let parts: Vec<Result<HashMap<Profile, Weight>>> = states
        .par_iter()
        .map(|(p, w)| {
            let mut out = HashMap::new();
            let mut cx = StepCtx {
                profile: p,
                weight: *w,
                shapes,
                n,
                free_white: pool_w.is_none(),
                chosen: Vec::new(),
                pair_whites: Vec::new(),
                mult: 1,
                out: &mut out,
            };
            cx.rec(
                0,
                pool_b.clone(),
                pool_w.clone().unwrap_or_else(|| pool_of_all(n)),
            )?;
            Ok(out)
        })
        .collect();
    let mut merged: HashMap<Profile, Weight> = HashMap::new();
    for part in parts {
        for (p, w) in part? {
            let e = merged.entry(p).or_default();
            e.signed += w.signed;
            e.count += w.count;
        }
    }
    merged.retain(|_, w| w.count != 0);
    Ok(merged)
}

struct StepCtx<'a> {
    profile: &'a Profile,
    weight: Weight,
    shapes: &'a ShapeCache,
    n: u32,
    free_white: bool,
    chosen: Vec<(Arc<Vec<(TreeShape, i128)>>, usize)>,
    pair_whites: Vec<u32>,
    mult: i128,
    out: &'a mut HashMap<Profile, Weight>,
}

impl StepCtx<'_> {
    fn rec(
        &mut self,
        i: usize,
        pool_b: BTreeMap<u32, u32>,
        pool_w: BTreeMap<u32, u32>,
    ) -> Result<()> {
        let nr = self.profile.real.len();
        if i == nr + self.profile.upper.len() {
            if !pool_b.is_empty() || (!self.free_white && !pool_w.is_empty()) {
                return Ok(());
            }
            self.finish();
            return Ok(());
        }
        let (e, copies) = if i < nr {
            (self.profile.real[i].0, 1)
        } else {
            (self.profile.upper[i - nr], 2)
        };
        for nb in sub_partitions(&pool_b, e, None, copies) {
            let want = e as usize + 1 - nb.len();
            if want == 0 {
                continue;
            }
            let whites = if self.free_white {
                partitions_with_length(e, want)
            } else {
                sub_partitions(&pool_w, e, Some(want), copies)
            };
            let pb = take(&pool_b, &nb, copies);
            for nw in whites {
                let pw = if self.free_white {
                    pool_w.clone()
                } else {
                    take(&pool_w, &nw, copies)
                };
                if i < nr {
                    let side = if self.profile.real[i].1 {
                        Color::White
                    } else {
                        Color::Black
                    };
                    let shapes = self.shapes.get(&nb, &nw, side)?;
                    for si in 0..shapes.len() {
                        self.chosen.push((shapes.clone(), si));
                        self.rec(i + 1, pb.clone(), pw.clone())?;
                        self.chosen.pop();
                    }
                } else {
                    let m = marked_count_cached(&nb, &nw)?;
                    let m: i128 = i128::try_from(m).expect("marked tree count fits in i128");
                    if m == 0 {
                        continue;
                    }
                    let saved = self.mult;
                    self.mult *= m;
                    let base = self.pair_whites.len();
                    self.pair_whites.extend_from_slice(nw.parts());
                    self.rec(i + 1, pb.clone(), pw)?;
                    self.pair_whites.truncate(base);
                    self.mult = saved;
                }
            }
        }
        let _ = self.n;
        Ok(())
    }

    fn finish(&mut self) {
        let mut black = Vec::new();
        let mut real = Vec::new();
        let mut upper = self.pair_whites.clone();
        let mut count = self.mult;
        for (shapes, si) in &self.chosen {
            let (s, c) = &shapes[*si];
            black.extend(s.black.iter().map(|&d| ((), d)));
            real.extend_from_slice(&s.white);
            upper.extend_from_slice(&s.upper_white);
            count *= c;
        }
        upper.sort_unstable();
        let sign = if disorders_of(&black) % 2 == 0 { 1 } else { -1 };
        let e = self.out.entry(Profile { real, upper }).or_default();
        e.signed += self.weight.signed * sign * count;
        e.count += self.weight.count * count;
    }
}

/// Profiles of all dessins of types `(Λ_1, …, Λ_j, M)` for every `M`, where
/// `j = lambdas.len()`.
fn profiles(
    n: u32,
    lambdas: &[Partition],
    shapes: &ShapeCache,
) -> Result<HashMap<Profile, Weight>> {
    let mut states = HashMap::new();
    states.insert(
        Profile {
            real: vec![(n, true)],
            upper: Vec::new(),
        },
        Weight {
            signed: 1,
            count: 1,
        },
    );
    for lam in lambdas {
        states = step(&states, lam, None, n, shapes)?;
    }
    Ok(states)
}

/// Σ ε(Ĝ) ∏ m_v over the enhanced contracted dessins of one profile.
fn multiplicative_term(p: &Profile, black: &Partition, white: &Partition) -> Result<i128> {
    fn rec(
        p: &Profile,
        i: usize,
        pool_b: BTreeMap<u32, u32>,
        pool_w: BTreeMap<u32, u32>,
        parts: &mut Vec<(Partition, Partition)>,
        acc: i128,
        total: &mut i128,
    ) -> Result<()> {
        let nr = p.real.len();
        if i == nr + p.upper.len() {
            if !pool_b.is_empty() || !pool_w.is_empty() {
                return Ok(());
            }
            let refs: Vec<&(Partition, Partition)> = parts.iter().collect();
            let d = crate::insertion::special_disorders(&refs);
            *total += if d.is_multiple_of(2) { acc } else { -acc };
            return Ok(());
        }
        let (e, copies) = if i < nr {
            (p.real[i].0, 1)
        } else {
            (p.upper[i - nr], 2)
        };
        for nb in sub_partitions(&pool_b, e, None, copies) {
            let want = e as usize + 1 - nb.len();
            if want == 0 {
                continue;
            }
            for nw in sub_partitions(&pool_w, e, Some(want), copies) {
                let m: i128 = if i < nr {
                    signed_sum_cached(&nb, &nw, Color::Black)? as i128
                } else {
                    i128::try_from(marked_count_cached(&nb, &nw)?).expect("fits in i128")
                };
                if m == 0 {
                    continue;
                }
                let pb = take(&pool_b, &nb, copies);
                let pw = take(&pool_w, &nw, copies);
                if i < nr {
                    parts.push((nb.clone(), nw.clone()));
                    rec(p, i + 1, pb, pw, parts, acc * m, total)?;
                    parts.pop();
                } else {
                    rec(p, i + 1, pb, pw, parts, acc * m, total)?;
                }
            }
        }
        Ok(())
    }
    let mut total = 0;
    rec(
        p,
        0,
        black.multiplicities(),
        white.multiplicities(),
        &mut Vec::new(),
        1,
        &mut total,
    )?;
    Ok(total)
}

/// s-number of increasing real polynomial dessins of type `t`.
pub fn s_number(t: &TypeList, mode: Mode) -> Result<i128> {
    match mode {
        Mode::Explicit => Ok(explicit_s_number(t)? as i128),
        Mode::Multiplicative => multiplicative_s_number(t),
    }
}

fn multiplicative_s_number(t: &TypeList) -> Result<i128> {
    let k = t.k();
    let n = t.degree();
    if k == 0 {
        return Ok(1);
    }
    if k == 1 {
        return Ok(1);
    }
    let e = t.entries();
    if (e[k - 2].len() + e[k - 1].len()) as i64 - (n as i64) <= 0 {
        return Ok(0);
    }
    let shapes = ShapeCache::default();
    let states = profiles(n, &e[..k - 2], &shapes)?;
    let terms: Vec<Result<i128>> = states
        .par_iter()
        .filter(|(_, w)| w.signed != 0)
        .map(|(p, w)| Ok(w.signed * multiplicative_term(p, &e[k - 2], &e[k - 1])?))
        .collect();
    terms.into_iter().sum()
}

/// Number of increasing dessins of type `t`, from the profile recursion.
pub fn dessin_count(t: &TypeList) -> Result<i128> {
    let k = t.k();
    let n = t.degree();
    if k <= 1 {
        return Ok(1);
    }
    let e = t.entries();
    let shapes = ShapeCache::default();
    let states = profiles(n, &e[..k - 2], &shapes)?;
    let last = step(&states, &e[k - 2], Some(&e[k - 1]), n, &shapes)?;
    Ok(last.values().map(|w| w.count).sum())
}

/// s-number computed by inserting trees at every level, with the last label's
/// disorders counted directly. Independent of the multiplicative formula.
pub fn profile_s_number(t: &TypeList) -> Result<i128> {
    let k = t.k();
    let n = t.degree();
    if k <= 1 {
        return Ok(1);
    }
    let e = t.entries();
    let shapes = ShapeCache::default();
    let states = profiles(n, &e[..k - 2], &shapes)?;
    let last = step(&states, &e[k - 2], Some(&e[k - 1]), n, &shapes)?;
    Ok(last
        .iter()
        .map(|(p, w)| {
            let seq: Vec<((), u32)> = p.real.iter().map(|&(d, _)| ((), d)).collect();
            if disorders_of(&seq).is_multiple_of(2) {
                w.signed
            } else {
                -w.signed
            }
        })
        .sum())
}

/// Result of checking that an s-number does not depend on the order of the
/// branch values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub invariant: bool,
    /// Orderings checked, starting with the given one.
    pub orderings: Vec<TypeList>,
    pub s_numbers: Vec<i128>,
    /// Number of dessins (unsigned) per ordering.
    pub raw_counts: Vec<i128>,
}

impl fmt::Display for InvarianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let counts: Vec<String> = self.raw_counts.iter().map(|c| c.to_string()).collect();
        if self.invariant {
            write!(
                f,
                "invariant: true; s = {}; per-order raw counts: [{}]",
                self.s_numbers[0],
                counts.join(", ")
            )
        } else {
            let s: Vec<String> = self.s_numbers.iter().map(|c| c.to_string()).collect();
            write!(
                f,
                "invariant: false; s per order: [{}]; per-order raw counts: [{}]",
                s.join(", "),
                counts.join(", ")
            )
        }
    }
}

/// Distinct reorderings of `t`, the given order first, then the others in
/// lexicographic order of index permutations.
pub fn orderings(t: &TypeList) -> Vec<TypeList> {
    let k = t.k();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    loop {
        let p = t.permuted(&idx);
        if seen.insert(p.clone()) {
            out.push(p);
        }
        if !crate::partition::next_permutation(&mut idx) {
            break;
        }
    }
    out
}

pub fn invariance_check(t: &TypeList, mode: Mode) -> Result<InvarianceReport> {
    let orderings = orderings(t);
    let s_numbers = orderings
        .iter()
        .map(|o| s_number(o, mode))
        .collect::<Result<Vec<_>>>()?;
    let raw_counts = orderings
        .iter()
        .map(|o| match mode {
            Mode::Explicit if o.k() > 0 => {
                Ok(Explicit::new(Marking::MinIndex).enumerate(o)?.len() as i128)
            }
            _ => dessin_count(o),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InvarianceReport {
        invariant: s_numbers.windows(2).all(|w| w[0] == w[1]),
        orderings,
        s_numbers,
        raw_counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tl(s: &str) -> TypeList {
        TypeList::parse(s).unwrap()
    }

    #[test]
    fn quartic_both_orders() {
        for s in ["2,2;2,1,1", "2,1,1;2,2"] {
            assert_eq!(s_number(&tl(s), Mode::Explicit).unwrap(), 0);
            assert_eq!(s_number(&tl(s), Mode::Multiplicative).unwrap(), 0);
        }
        assert_eq!(dessin_count(&tl("2,2;2,1,1")).unwrap(), 2);
        assert_eq!(dessin_count(&tl("2,1,1;2,2")).unwrap(), 0);
        let r = invariance_check(&tl("2,2;2,1,1"), Mode::Multiplicative).unwrap();
        assert_eq!(
            r.to_string(),
            "invariant: true; s = 0; per-order raw counts: [2, 0]"
        );
    }

    #[test]
    fn star_type() {
        for n in 2..6 {
            let t = tl(&n.to_string());
            assert_eq!(s_number(&t, Mode::Explicit).unwrap(), 1);
            assert_eq!(s_number(&t, Mode::Multiplicative).unwrap(), 1);
        }
    }

    #[test]
    fn simple_types_follow_tangent_and_secant() {
        let expected = [1i128, -1, -2, 5, 16, -61];
        for n in 2..=7u32 {
            let simple = crate::partition::Partition::simple(n).to_string();
            let t = tl(&vec![simple; n as usize - 1].join(";"));
            let e = s_number(&t, Mode::Explicit).unwrap();
            let m = s_number(&t, Mode::Multiplicative).unwrap();
            let p = profile_s_number(&t).unwrap();
            assert_eq!(e, expected[n as usize - 2], "n = {n}");
            assert_eq!(m, e);
            assert_eq!(p, e);
        }
    }

    #[test]
    fn modes_agree_small() {
        for n in 2..=6 {
            for t in crate::partition::all_type_lists(n, 3) {
                let e = s_number(&t, Mode::Explicit).unwrap();
                let m = s_number(&t, Mode::Multiplicative).unwrap();
                assert_eq!(e, m, "{t}");
                let c = Explicit::new(Marking::MinIndex)
                    .enumerate(&t)
                    .unwrap()
                    .len() as i128;
                assert_eq!(dessin_count(&t).unwrap(), c, "{t}");
            }
        }
    }
}
