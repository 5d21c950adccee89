//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p snumber-core --test acceptance` (add `--release`
//! for speed). Exits non-zero if a criterion fails that is not listed in
//! `KNOWN_CONFLICTS`.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use snumber_core::dessin::dessin_sign;
use snumber_core::insertion::{enhanced_sign, enumerate_dessins, Explicit, Marking};
use snumber_core::oracle::{brute_force_dessin_codes, brute_force_tree_codes, euler_numbers};
use snumber_core::partition::{
    all_type_lists, nonvanishing, parse_partition_list, partitions_of, partitions_with_length,
    Parity, Partition, TypeList,
};
use snumber_core::series::{
    asymptotic_check, fit_from_engine, leading_coefficient, taylor, QFPoly, SNumberTable,
    POLE_RATIO,
};
use snumber_core::snumber::{dessin_count, invariance_check, s_number, Mode};
use snumber_core::trees::{
    enumerate_real_trees, midline_bijection, signed_sum, tree_side, tree_sign, tree_weight, Color,
};

type Outcome = Result<String, String>;
type Check = Box<dyn Fn() -> Outcome>;

/// Criteria whose failure is an established inconsistency in the source
/// formulas rather than an implementation defect.
const KNOWN_CONFLICTS: &[(usize, &str)] = &[(
    10,
    "the closed form predicts +1 for lambda=(1) even, but that series is the derivative of f, \
     i.e. 1 - f^2, whose f^2 coefficient is -1",
)];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn tree_pairs(e: u32) -> Vec<(Partition, Partition)> {
    let mut out = Vec::new();
    for lb in partitions_of(e) {
        for lw in partitions_of(e) {
            if lb.len() + lw.len() == e as usize + 1 {
                out.push((lb.clone(), lw));
            }
        }
    }
    out
}

fn c1_tree_census() -> Outcome {
    let mut total = 0;
    for (lb, lw) in tree_pairs(4) {
        total += enumerate_real_trees(&lb, &lw).map_err(err)?.len();
    }
    ensure(total == 12, || format!("{total} trees with 4 edges"))?;
    Ok(format!("{total} real trees with 4 edges"))
}

fn c2_tree_invariance() -> Outcome {
    let mut families = 0;
    for e in 1..=7 {
        for (lb, lw) in tree_pairs(e) {
            let w = signed_sum(&lb, &lw, Color::White).map_err(err)?;
            let b = signed_sum(&lb, &lw, Color::Black).map_err(err)?;
            ensure(w == b, || format!("({lb}), ({lw}): white {w} vs black {b}"))?;
            families += 1;
        }
    }
    let lb = Partition::parse("4,2,2").map_err(err)?;
    let lw = Partition::parse("2,2,1,1,1,1").map_err(err)?;
    let w = signed_sum(&lb, &lw, Color::White).map_err(err)?;
    let b = signed_sum(&lb, &lw, Color::Black).map_err(err)?;
    ensure(w == 2 && b == 2, || {
        format!("(4,2,2) family: white {w}, black {b}")
    })?;
    Ok(format!(
        "{families} degree families with e <= 7 balanced; (4,2,2) family sums {w}/{b}"
    ))
}

fn c3_sign_weight() -> Outcome {
    let mut families = 0;
    for e in 1..=7 {
        for (lb, lw) in tree_pairs(e) {
            let (mut eps, mut om) = (0i64, 0i64);
            for t in enumerate_real_trees(&lb, &lw).map_err(err)? {
                let dir = if tree_side(&t) == Color::White { 1 } else { -1 };
                eps += dir * tree_sign(&t) as i64;
                om += dir * tree_weight(&t) as i64;
            }
            ensure(eps == om, || {
                format!("({lb}), ({lw}): sign diff {eps}, weight diff {om}")
            })?;
            ensure(om == 0, || format!("({lb}), ({lw}): weight diff {om}"))?;
            families += 1;
        }
    }
    let mut involutions = 0;
    for e in (2..=6).step_by(2) {
        for (lb, lw) in tree_pairs(e) {
            for t in enumerate_real_trees(&lb, &lw).map_err(err)? {
                if t.spine().len() == 1 || tree_weight(&t) != 0 {
                    let u = midline_bijection(&t).map_err(err)?;
                    let back = midline_bijection(&u).map_err(err)?;
                    ensure(back == t, || {
                        format!("midline not an involution on {}", t.canonical())
                    })?;
                    involutions += 1;
                }
            }
        }
    }
    Ok(format!(
        "{families} families satisfy both identities; midline involution on {involutions} trees"
    ))
}

fn c4_quartic() -> Outcome {
    let t = TypeList::parse("2,2;2,1,1").map_err(err)?;
    let ds = enumerate_dessins(&t).map_err(err)?;
    let mut signs: Vec<i32> = ds
        .iter()
        .map(|d| dessin_sign(d).map_err(err))
        .collect::<Result<_, _>>()?;
    signs.sort();
    ensure(signs == vec![-1, 1], || format!("signs {signs:?}"))?;
    let r = TypeList::parse("2,1,1;2,2").map_err(err)?;
    let rs = enumerate_dessins(&r).map_err(err)?;
    ensure(rs.is_empty(), || {
        format!("reversed order gave {} dessins", rs.len())
    })?;
    for m in [Mode::Explicit, Mode::Multiplicative] {
        let a = s_number(&t, m).map_err(err)?;
        let b = s_number(&r, m).map_err(err)?;
        ensure(a == 0 && b == 0, || format!("{m}: s = {a}, {b}"))?;
    }
    Ok("2 dessins with signs {-1,+1}; reversed: 0 dessins; s = 0 both ways".into())
}

/// Distinct multisets of branch types with `n ≤ 8`, `k ≤ 3`.
fn exhaustive_lists() -> Vec<TypeList> {
    let mut seen = BTreeSet::new();
    for n in 2..=8 {
        for t in all_type_lists(n, 3) {
            seen.insert(t.sorted_key());
        }
    }
    seen.into_iter().collect()
}

fn sampled_lists(count: usize, seed: u64) -> Vec<TypeList> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n: u32 = rng.gen_range(5..=10);
        let k = rng.gen_range(2..=4.min(n as usize - 1));
        // random composition of n - 1 into k positive orders
        let mut cuts: Vec<u32> = (1..n - 1).collect();
        let mut chosen = Vec::new();
        for _ in 0..k - 1 {
            let i = rng.gen_range(0..cuts.len());
            chosen.push(cuts.swap_remove(i));
        }
        chosen.sort();
        let mut orders = Vec::new();
        let mut prev = 0;
        for c in chosen.into_iter().chain([n - 1]) {
            orders.push(c - prev);
            prev = c;
        }
        let entries: Vec<Partition> = orders
            .iter()
            .map(|&o| {
                let opts = partitions_with_length(n, (n - o) as usize);
                opts[rng.gen_range(0..opts.len())].clone()
            })
            .collect();
        if let Ok(t) = TypeList::with_degree(n, entries) {
            out.push(t);
        }
    }
    out
}

fn c5_invariance(lists: &[TypeList]) -> Outcome {
    let mut orderings = 0;
    for t in lists {
        let rep = invariance_check(t, Mode::Multiplicative).map_err(err)?;
        ensure(rep.invariant, || format!("{t}: {rep}"))?;
        orderings += rep.orderings.len();
    }
    Ok(format!(
        "{} lists ({orderings} orderings) invariant",
        lists.len()
    ))
}

fn c6_modes(lists: &[TypeList]) -> Outcome {
    let mut checked = 0;
    for t in lists {
        for o in t.distinct_orderings() {
            let a = s_number(&o, Mode::Explicit).map_err(err)?;
            let b = s_number(&o, Mode::Multiplicative).map_err(err)?;
            ensure(a == b, || format!("{o}: explicit {a}, multiplicative {b}"))?;
            checked += 1;
        }
    }
    let mut dessins = 0usize;
    for n in 3..=8 {
        for t in all_type_lists(n, 3).into_iter().filter(|t| t.k() >= 2) {
            let engine = Explicit::new(Marking::MinIndex);
            let mut failure = None;
            engine
                .for_each_with_provenance(&t, &mut |d, prov| {
                    if failure.is_some() {
                        return;
                    }
                    let lhs = dessin_sign(&d);
                    let rhs = enhanced_sign(&prov.enhanced())
                        .map(|s| s * prov.real_tree_signs.iter().product::<i32>());
                    match (lhs, rhs) {
                        (Ok(l), Ok(r)) if l == r => dessins += 1,
                        (l, r) => {
                            failure = Some(format!("{t}: dessin sign {l:?}, factorized {r:?}"))
                        }
                    }
                })
                .map_err(err)?;
            if let Some(f) = failure {
                return Err(f);
            }
        }
    }
    Ok(format!(
        "{checked} ordered lists agree across modes; sign factorization holds on {dessins} dessins"
    ))
}

fn c7_euler() -> Outcome {
    let e = euler_numbers(8);
    let f = taylor(&QFPoly::f(), 8);
    let g = taylor(&QFPoly::g(), 8);
    let mut counts = Vec::new();
    for n in 2..=9u32 {
        let t =
            TypeList::with_degree(n, vec![Partition::simple(n); n as usize - 1]).map_err(err)?;
        let m = (n - 1) as usize;
        let count = enumerate_dessins(&t).map_err(err)?.len();
        ensure(BigInt::from(count) == e[m], || {
            format!("n = {n}: {count} dessins, expected {}", e[m])
        })?;
        ensure(dessin_count(&t).map_err(err)? == count as i128, || {
            format!("n = {n}: profile count")
        })?;
        let want = if n % 2 == 0 { f.coeff(m) } else { g.coeff(m) };
        for mode in [Mode::Explicit, Mode::Multiplicative] {
            let s = s_number(&t, mode).map_err(err)?;
            ensure(
                want.numer() == &BigInt::from(s) && want.denom().is_one(),
                || format!("n = {n} ({mode}): s = {s}, series coefficient {want}"),
            )?;
        }
        counts.push(count);
    }
    Ok(format!(
        "all-simple counts {counts:?}; signed s-numbers equal tanh/sech coefficients"
    ))
}

fn c8_oracles() -> Outcome {
    let mut lists = 0;
    for n in 2..=5 {
        for t in all_type_lists(n, n as usize - 1) {
            let engine: BTreeSet<Vec<u8>> = enumerate_dessins(&t)
                .map_err(err)?
                .iter()
                .map(|d| d.canonical_code())
                .collect();
            let oracle: BTreeSet<Vec<u8>> = brute_force_dessin_codes(&t, 5)
                .map_err(err)?
                .into_iter()
                .collect();
            ensure(engine == oracle, || {
                format!("{t}: engine {} vs oracle {}", engine.len(), oracle.len())
            })?;
            lists += 1;
        }
    }
    let mut families = 0;
    for e in 1..=8 {
        for ((lb, lw), codes) in brute_force_tree_codes(e).map_err(err)? {
            let got: BTreeSet<String> = enumerate_real_trees(&lb, &lw)
                .map_err(err)?
                .iter()
                .map(|t| t.canonical())
                .collect();
            ensure(got == codes, || format!("trees ({lb}), ({lw}) differ"))?;
            families += 1;
        }
    }
    Ok(format!(
        "{lists} type lists (n <= 5) and {families} tree families (e <= 8) identical"
    ))
}

const FIT_CASES: [&str; 5] = ["", "1", "2,2", "1,1", "2"];

fn c9_fits() -> Outcome {
    let mut held = 0;
    for l in FIT_CASES {
        let ls = parse_partition_list(l).map_err(err)?;
        for parity in [Parity::Even, Parity::Odd] {
            let r = fit_from_engine(&ls, parity, Mode::Multiplicative, 0).map_err(err)?;
            let want_g = parity == Parity::Odd;
            ensure(r.series.is_zero() || r.series.g_factor() == want_g, || {
                format!("[{l}] {parity}: wrong shape {}", r.series)
            })?;
            ensure(r.held_out.len() >= 2, || {
                format!("[{l}] {parity}: {} held out", r.held_out.len())
            })?;
            // re-derive held-out values with the explicit engine where affordable
            let series = taylor(&r.series, *r.held_out.iter().max().unwrap() as usize);
            for &m in &r.held_out {
                let v = match SNumberTable::type_list(&ls, m).map_err(err)? {
                    Some(t) if t.degree() <= 9 => {
                        BigInt::from(s_number(&t, Mode::Explicit).map_err(err)?)
                    }
                    Some(t) => BigInt::from(s_number(&t, Mode::Multiplicative).map_err(err)?),
                    None => BigInt::zero(),
                };
                let c = series.coeff(m as usize);
                ensure(c.denom().is_one() && c.numer() == &v, || {
                    format!("[{l}] {parity}: m = {m} predicted {c}, enumerated {v}")
                })?;
                held += 1;
            }
        }
    }
    let e = fit_from_engine(&[], Parity::Even, Mode::Multiplicative, 0)
        .map_err(err)?
        .series;
    let o = fit_from_engine(&[], Parity::Odd, Mode::Multiplicative, 0)
        .map_err(err)?
        .series;
    ensure(e == QFPoly::f() && o == QFPoly::g(), || {
        format!("empty series {e} / {o}")
    })?;
    Ok(format!(
        "10 fits have the right shape; {held} held-out coefficients reproduced"
    ))
}

fn c10_leading() -> Outcome {
    let mut ok = 0;
    let mut bad = Vec::new();
    for l in FIT_CASES {
        let ls = parse_partition_list(l).map_err(err)?;
        for parity in [Parity::Even, Parity::Odd] {
            if !nonvanishing(&ls, parity) {
                continue;
            }
            let ((a, b), want) = leading_coefficient(&ls, parity).map_err(err)?;
            let fit = fit_from_engine(&ls, parity, Mode::Multiplicative, 0)
                .map_err(err)?
                .series;
            let got = fit.coeff(a, b);
            if got == want {
                ok += 1;
            } else {
                bad.push(format!(
                    "[{l}] {parity}: q^{a} f^{b} fitted {got}, closed form {want}"
                ));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{ok} nonvanishing cases match the closed form"))
    } else {
        Err(format!("{ok} match; mismatches: {}", bad.join("; ")))
    }
}

fn c11_vanishing() -> Outcome {
    let mut cases = 0;
    let mut lambdas = vec![Partition::empty()];
    for size in 1..=4 {
        lambdas.extend(partitions_of(size));
    }
    for lam in &lambdas {
        for parity in [Parity::Even, Parity::Odd] {
            let ls = vec![lam.clone()];
            let table = SNumberTable::build(&ls, parity, 6, Mode::Multiplicative).map_err(err)?;
            let predicate = nonvanishing(&ls, parity);
            ensure(table.is_zero() != predicate, || {
                format!(
                    "({lam}) {parity}: predicate {predicate}, table {:?}",
                    table.values
                )
            })?;
            cases += 1;
        }
    }
    Ok(format!(
        "{cases} (lambda, parity) cases: table vanishes exactly when the predicate fails"
    ))
}

fn c12_asymptotics() -> Outcome {
    let mut lines = Vec::new();
    for (name, series, parity) in [
        ("f", QFPoly::f(), Parity::Odd),
        ("g", QFPoly::g(), Parity::Even),
    ] {
        let rep = asymptotic_check(&series, parity, 202).map_err(err)?;
        let e = rep.relative_error_at(20).ok_or("no ratio at 20")?;
        ensure(e < 0.01, || format!("{name}: ratio error {e:.4} at m = 20"))?;
        ensure(rep.trend_increasing(40, 200, 20) == Some(true), || {
            format!("{name}: log trend not increasing")
        })?;
        lines.push(format!("{name} err {:.3}%", 100.0 * e));
    }
    let ls = parse_partition_list("2,2").map_err(err)?;
    let fit = fit_from_engine(&ls, Parity::Even, Mode::Multiplicative, 0)
        .map_err(err)?
        .series;
    let rep = asymptotic_check(&fit, Parity::Odd, 202).map_err(err)?;
    let e = rep.relative_error_at(60).ok_or("no ratio at 60")?;
    ensure(e < 0.05, || format!("F(2,2): ratio error {e:.4} at m = 60"))?;
    ensure(rep.trend_increasing(40, 200, 20) == Some(true), || {
        "F(2,2): log trend not increasing".into()
    })?;
    lines.push(format!(
        "F(2,2) err {:.3}% at m = {}",
        100.0 * e,
        rep.admissible_at_least(60)
    ));
    Ok(format!(
        "ratios vs 4/pi^2 = {POLE_RATIO:.6}: {}; log trends increasing",
        lines.join(", ")
    ))
}

fn main() {
    let exhaustive = exhaustive_lists();
    let mut lists5 = exhaustive.clone();
    lists5.extend(sampled_lists(50, 0x5eed));
    let criteria: Vec<(&str, Check)> = vec![
        ("tree census", Box::new(c1_tree_census)),
        ("tree invariance", Box::new(c2_tree_invariance)),
        ("sign/weight lemmas", Box::new(c3_sign_weight)),
        ("quartic example", Box::new(c4_quartic)),
        (
            "invariance theorem",
            Box::new(move || c5_invariance(&lists5)),
        ),
        (
            "mode equivalence",
            Box::new({
                let mut l = exhaustive.clone();
                l.extend(sampled_lists(50, 0x5eed));
                move || c6_modes(&l)
            }),
        ),
        ("Euler-Bernoulli anchor", Box::new(c7_euler)),
        ("oracle equivalence", Box::new(c8_oracles)),
        ("series shape and fit", Box::new(c9_fits)),
        ("leading coefficient", Box::new(c10_leading)),
        ("vanishing", Box::new(c11_vanishing)),
        ("asymptotics", Box::new(c12_asymptotics)),
    ];
    let mut unexpected = 0;
    let mut passed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => {
                passed += 1;
                println!("PASS {id:>2} {name}: {detail} ({secs:.1}s)");
            }
            Err(why) => {
                println!("FAIL {id:>2} {name}: {why} ({secs:.1}s)");
                match KNOWN_CONFLICTS.iter().find(|(k, _)| *k == id) {
                    Some((_, note)) => println!("     known conflict: {note}"),
                    None => unexpected += 1,
                }
            }
        }
    }
    println!("{passed}/{} criteria passed", criteria.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
