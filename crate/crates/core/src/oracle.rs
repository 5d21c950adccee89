//! Slow, independent references the engines are checked against.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::dessin::Dessin;
use crate::error::{Error, Result};
use crate::partition::{next_permutation, Partition, TypeList};
use crate::trees::{Color, PlaneTree, RealBWTree, SpineVertex};

pub const DEFAULT_DESSIN_CAP: u32 = 5;
pub const DEFAULT_TREE_CAP: u32 = 8;

/// Numbers of alternating permutations of lengths `0..=upto`, read off the
/// Seidel–Entringer boustrophedon.
pub fn euler_numbers(upto: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::one()];
    let mut row = vec![BigInt::one()];
    for _ in 1..=upto {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(BigInt::zero());
        for j in 0..row.len() {
            let v = &next[j] + &row[row.len() - 1 - j];
            next.push(v);
        }
        out.push(next.last().cloned().expect("non-empty row"));
        row = next;
    }
    out
}

/// Alternating permutations of length `m` with `p` of their maxima singled
/// out.
pub fn alternating_with_maxima(m: usize, p: usize) -> BigInt {
    let maxima = if m % 2 == 1 { (m - 1) / 2 } else { m / 2 };
    if p > maxima {
        return BigInt::zero();
    }
    let e = euler_numbers(m).pop().expect("non-empty");
    e * binomial(BigInt::from(maxima), BigInt::from(p))
}

/// Direct count of up-down permutations of length `m` (first step up), for
/// cross-checking the boustrophedon on small lengths.
pub fn count_alternating_direct(m: usize) -> u64 {
    let mut p: Vec<usize> = (0..m).collect();
    let mut count = 0;
    loop {
        if (1..m).all(|i| (p[i] > p[i - 1]) == (i % 2 == 1)) {
            count += 1;
        }
        if !next_permutation(&mut p) {
            return count;
        }
    }
}

/// All Dyck words with `pairs` pairs, as bool vectors (`true` = open).
fn dyck_words(pairs: usize) -> Vec<Vec<bool>> {
    fn go(open: usize, close: usize, cur: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        if open == 0 && close == 0 {
            out.push(cur.clone());
            return;
        }
        if open > 0 {
            cur.push(true);
            go(open - 1, close + 1, cur, out);
            cur.pop();
        }
        if close > 0 {
            cur.push(false);
            go(open, close - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(pairs, 0, &mut Vec::new(), &mut out);
    out
}

fn forest_from_dyck(word: &[bool], root_color: Color) -> Vec<PlaneTree> {
    let mut stack: Vec<PlaneTree> = vec![PlaneTree::leaf(root_color)];
    for &b in word {
        if b {
            let c = stack.last().expect("open node").root_color.opposite();
            stack.push(PlaneTree::leaf(c));
        } else {
            let done = stack.pop().expect("balanced");
            stack.last_mut().expect("balanced").children.push(done);
        }
    }
    stack.pop().expect("root").children
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every real tree with `e` edges, grouped by black/white degree partitions;
/// values are the sorted canonical codes.
pub fn brute_force_tree_codes(
    e: u32,
) -> Result<BTreeMap<(Partition, Partition), BTreeSet<String>>> {
    if e > DEFAULT_TREE_CAP {
        return Err(Error::CapExceeded(format!(
            "tree oracle limited to {DEFAULT_TREE_CAP} edges, asked for {e}"
        )));
    }
    brute_force_tree_codes_uncapped(e)
}

pub fn brute_force_tree_codes_uncapped(
    e: u32,
) -> Result<BTreeMap<(Partition, Partition), BTreeSet<String>>> {
    if e == 0 {
        return Err(Error::Precondition(
            "a real tree needs at least one edge".into(),
        ));
    }
    let mut out: BTreeMap<(Partition, Partition), BTreeSet<String>> = BTreeMap::new();
    let e = e as usize;
    for len in 1..=e + 1 {
        if (e + 1 - len) % 2 == 1 {
            continue;
        }
        let forest_edges = (e + 1 - len) / 2;
        for first in [Color::Black, Color::White] {
            for comp in compositions(forest_edges, len) {
                let per_vertex: Vec<Vec<Vec<bool>>> = comp.iter().map(|&f| dyck_words(f)).collect();
                let mut idx = vec![0usize; len];
                loop {
                    let spine: Vec<SpineVertex> = (0..len)
                        .map(|i| {
                            let color = if i % 2 == 0 { first } else { first.opposite() };
                            SpineVertex {
                                color,
                                upper: forest_from_dyck(&per_vertex[i][idx[i]], color),
                            }
                        })
                        .collect();
                    let t = RealBWTree::new(spine)?;
                    let key = t.degree_partitions();
                    out.entry(key).or_default().insert(t.canonical());
                    let mut j = 0;
                    loop {
                        if j == len {
                            break;
                        }
                        idx[j] += 1;
                        if idx[j] < per_vertex[j].len() {
                            break;
                        }
                        idx[j] = 0;
                        j += 1;
                    }
                    if j == len {
                        break;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Tree counts per `(Λ_b, Λ_w)`.
pub fn brute_force_trees(e: u32) -> Result<BTreeMap<(Partition, Partition), usize>> {
    Ok(brute_force_tree_codes(e)?
        .into_iter()
        .map(|(k, v)| (k, v.len()))
        .collect())
}

/// All permutations of `0..n` with the given cycle type.
fn permutations_of_type(n: usize, cycle_type: &Partition) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        if cycle_type_of(&p) == *cycle_type {
            out.push(p.clone());
        }
        if !next_permutation(&mut p) {
            return out;
        }
    }
}

fn cycle_type_of(p: &[usize]) -> Partition {
    let mut seen = vec![false; p.len()];
    let mut parts = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
            len += 1;
        }
        parts.push(len);
    }
    Partition::new(parts).expect("positive cycle lengths")
}

/// The complex dessin glued from sheets: upper sheet `a` borders edge
/// `(i, a)` of every type `i`; lower sheet `sigma[i][a]` borders it from
/// below. Returns `(rho, alpha, label, tail)`.
fn glue_sheets(
    n: usize,
    k: usize,
    sigma: &[Vec<usize>],
) -> (Vec<u32>, Vec<u32>, Vec<u8>, Vec<bool>) {
    // edge (i, a), i = 0..=k; dart 2*(i*n + a) is the tail, +1 the head
    let m = 2 * (k + 1) * n;
    let tail_d = |i: usize, a: usize| (2 * (i * n + a)) as u32;
    let head_d = |i: usize, a: usize| (2 * (i * n + a) + 1) as u32;
    let mut rho = vec![0u32; m];
    let mut alpha = vec![0u32; m];
    let mut label = vec![0u8; m];
    let mut tail = vec![false; m];
    let inv = |p: &Vec<usize>| {
        let mut q = vec![0; p.len()];
        for (i, &x) in p.iter().enumerate() {
            q[x] = i;
        }
        q
    };
    for i in 0..=k {
        for a in 0..n {
            let (t, h) = (tail_d(i, a), head_d(i, a));
            alpha[t as usize] = h;
            alpha[h as usize] = t;
            tail[t as usize] = true;
            label[t as usize] = i as u8;
            label[h as usize] = ((i + 1) % (k + 1)) as u8;
        }
    }
    for i in 1..=k {
        let si = inv(&sigma[i]);
        for a in 0..n {
            rho[tail_d(i, a) as usize] = head_d(i - 1, a);
            rho[head_d(i - 1, a) as usize] = tail_d(i, si[sigma[i - 1][a]]);
        }
    }
    for a in 0..n {
        rho[tail_d(0, a) as usize] = head_d(k, a);
        rho[head_d(k, a) as usize] = tail_d(0, sigma[k][a]);
    }
    (rho, alpha, label, tail)
}

/// Orientation-reversing involutions of the map sending dart 0 anywhere.
fn conjugations(rho: &[u32], alpha: &[u32], label: &[u8], tail: &[bool]) -> Vec<Vec<u32>> {
    let m = rho.len();
    let mut rho_inv = vec![0u32; m];
    for d in 0..m {
        rho_inv[rho[d] as usize] = d as u32;
    }
    let mut out = Vec::new();
    for x in 0..m {
        if label[x] != label[0] || tail[x] != tail[0] {
            continue;
        }
        let mut c = vec![u32::MAX; m];
        c[0] = x as u32;
        let mut stack = vec![0usize];
        let mut ok = true;
        while let Some(d) = stack.pop() {
            let cd = c[d] as usize;
            for (nd, ncd) in [
                (rho[d] as usize, rho_inv[cd]),
                (alpha[d] as usize, alpha[cd]),
            ] {
                if c[nd] == u32::MAX {
                    c[nd] = ncd;
                    stack.push(nd);
                } else if c[nd] != ncd {
                    ok = false;
                    break;
                }
            }
            if !ok {
                break;
            }
        }
        if ok
            && c.iter().all(|&v| v != u32::MAX)
            && (0..m).all(|d| c[c[d] as usize] as usize == d)
            && (0..m).all(|d| label[c[d] as usize] == label[d] && tail[c[d] as usize] == tail[d])
        {
            out.push(c);
        }
    }
    out
}

/// Every increasing dessin of type `t` found by exhaustive gluing of sheets,
/// then searching all real structures and roots; sorted canonical codes.
pub fn brute_force_dessin_codes(t: &TypeList, n_cap: u32) -> Result<Vec<Vec<u8>>> {
    let n = t.degree();
    if n > n_cap {
        return Err(Error::CapExceeded(format!(
            "dessin oracle limited to degree {n_cap}, asked for {n}"
        )));
    }
    let k = t.k();
    if k == 0 {
        return Err(Error::Precondition(
            "dessins need at least one branch value".into(),
        ));
    }
    let n = n as usize;
    let classes: Vec<Vec<Vec<usize>>> = t
        .entries()
        .iter()
        .map(|lam| permutations_of_type(n, lam))
        .collect();
    let full_cycle = Partition::new(vec![n as u32]).expect("positive");
    // choose tau_1 in parallel, the rest sequentially
    let codes: Vec<HashSet<Vec<u8>>> = classes[0]
        .par_iter()
        .map(|tau1| {
            let mut found = HashSet::new();
            let id: Vec<usize> = (0..n).collect();
            let mut sigma = vec![id];
            sigma.push(apply_inverse(&sigma[0], tau1));
            search(t, n, k, &classes, 2, &mut sigma, &full_cycle, &mut found);
            found
        })
        .collect();
    let mut all: BTreeSet<Vec<u8>> = BTreeSet::new();
    for c in codes {
        all.extend(c);
    }
    Ok(all.into_iter().collect())
}

/// `sigma_prev ∘ tau⁻¹`.
fn apply_inverse(sigma_prev: &[usize], tau: &[usize]) -> Vec<usize> {
    let mut tinv = vec![0; tau.len()];
    for (i, &x) in tau.iter().enumerate() {
        tinv[x] = i;
    }
    (0..tau.len()).map(|a| sigma_prev[tinv[a]]).collect()
}

#[allow(clippy::too_many_arguments)]
fn search(
    t: &TypeList,
    n: usize,
    k: usize,
    classes: &[Vec<Vec<usize>>],
    i: usize,
    sigma: &mut Vec<Vec<usize>>,
    full_cycle: &Partition,
    found: &mut HashSet<Vec<u8>>,
) {
    if i > k {
        if cycle_type_of(&sigma[k]) != *full_cycle {
            return;
        }
        let (rho, alpha, label, tail) = glue_sheets(n, k, sigma);
        for c in conjugations(&rho, &alpha, &label, &tail) {
            for r in 0..rho.len() {
                if c[r] as usize == r
                    && tail[r]
                    && label[r] as usize == k
                    && label[alpha[r] as usize] == 0
                {
                    let d = Dessin::from_parts(
                        n as u32,
                        k as u32,
                        rho.clone(),
                        alpha.clone(),
                        c.clone(),
                        label.clone(),
                        tail.clone(),
                        r as u32,
                    );
                    if d.validate(t).is_empty() {
                        found.insert(d.canonical_code());
                    }
                }
            }
        }
        return;
    }
    for tau in &classes[i - 1] {
        let next = apply_inverse(&sigma[i - 1], tau);
        sigma.push(next);
        search(t, n, k, classes, i + 1, sigma, full_cycle, found);
        sigma.pop();
    }
}

/// Number of distinct dessins found by the exhaustive search.
pub fn brute_force_dessins(t: &TypeList, n_cap: u32) -> Result<usize> {
    Ok(brute_force_dessin_codes(t, n_cap)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_prefix() {
        let e: Vec<i64> = euler_numbers(7)
            .iter()
            .map(|x| x.try_into().unwrap())
            .collect();
        assert_eq!(e, vec![1, 1, 1, 2, 5, 16, 61, 272]);
        for m in 0..8 {
            assert_eq!(
                BigInt::from(count_alternating_direct(m)),
                euler_numbers(m)[m]
            );
        }
    }

    #[test]
    fn maxima_examples() {
        assert_eq!(alternating_with_maxima(5, 0), BigInt::from(16));
        assert_eq!(alternating_with_maxima(4, 1), BigInt::from(10));
        assert_eq!(alternating_with_maxima(3, 2), BigInt::zero());
    }

    #[test]
    fn tree_oracle_totals() {
        let total = |e| brute_force_trees(e).unwrap().values().sum::<usize>();
        assert_eq!(total(1), 2);
        assert_eq!(total(4), 12);
        assert!(brute_force_trees(9).is_err());
    }

    #[test]
    fn dessin_oracle_small() {
        let t = TypeList::parse("2,2;2,1,1").unwrap();
        assert_eq!(brute_force_dessins(&t, 5).unwrap(), 2);
        let t = TypeList::parse("2").unwrap();
        assert_eq!(brute_force_dessins(&t, 5).unwrap(), 1);
        let t = TypeList::parse("2,1,1;2,1,1;2,1,1").unwrap();
        assert_eq!(brute_force_dessins(&t, 5).unwrap(), 2);
        assert!(brute_force_dessins(&TypeList::parse("6").unwrap(), 5).is_err());
    }
}
