//! Acceptance criteria 1 to 10. Each prints one PASS or FAIL line; the
//! process exits nonzero if any fails.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use profinite::approx::{
    all_approximations, surjective_approximations, SourceElement, SourceGroup,
};
use profinite::fingroup::catalog::{d4, default_catalog, q8, s3};
use profinite::fingroup::{FinAbGroup, FinGroup};
use profinite::fplin::{all_vectors, DualVector, PrimeField};
use profinite::limit::{
    compare_full_vs_surjective, inverse_limit, inverse_limit_with, profinite_projection, Diagram,
    Solver,
};
use profinite::profinite::{
    check_fact_suite, check_iterate, check_theorem_iso, check_triangle, classify_surjective_images,
    corrupted_family, iterate_completion, nonsurjectivity_witness, remark47_limit, FpCompletion,
};
use profinite::Budget;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:?}, limit {limit:?}"))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn cyc(n: u64) -> Arc<FinGroup> {
    Arc::new(FinAbGroup::cyclic(n).to_fin_group().unwrap())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = profinite::profinite::complete(
        &SourceGroup::integers(),
        10,
        profinite::profinite::Mode::Surjective,
        &[],
        &Budget::default(),
    )
    .map_err(|e| e.to_string())?;
    let lcm = (1..=10u64).fold(1, |acc, n| acc / gcd(acc, n) * n);
    // Families over the divisor poset are determined by their values at
    // 6..10, compatible iff they agree modulo each pairwise gcd.
    let mut families = 0u64;
    let mut max_order = 0u64;
    let tops = [6u64, 7, 8, 9, 10];
    let total: u64 = tops.iter().product();
    for code in 0..total {
        let mut rest = code;
        let xs: Vec<u64> = tops
            .iter()
            .map(|&n| {
                let x = rest % n;
                rest /= n;
                x
            })
            .collect();
        let ok = (0..5).all(|i| {
            (0..i).all(|j| {
                let g = gcd(tops[i], tops[j]);
                xs[i] % g == xs[j] % g
            })
        });
        if ok {
            families += 1;
            let order = tops
                .iter()
                .zip(&xs)
                .map(|(&n, &x)| n / gcd(x, n))
                .fold(1, |acc, o| acc / gcd(acc, o) * o);
            max_order = max_order.max(order);
        }
    }
    ensure(lcm == 2520, format!("lcm(1..10) = {lcm}"))?;
    ensure(
        families == 2520 && max_order == 2520,
        format!("CRT brute force: {families} families, max order {max_order}"),
    )?;
    ensure(
        r.limit.order() as u64 == lcm && r.limit.invariant_factors() == Some(&[2520][..]),
        format!("limit {:?}", r.limit.invariant_factors()),
    )?;
    within(start, Duration::from_secs(5))?;
    Ok("Z, bound 10: invariant factors [2520] = lcm(1..10) = CRT count".into())
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let budget = Budget::default();
    let catalog = default_catalog(8);
    let sources = [
        SourceGroup::cyclic(4),
        SourceGroup::cyclic(6),
        SourceGroup::fp_space(2, 2).unwrap(),
        SourceGroup::finite(s3()),
    ];
    let mut summary = Vec::new();
    for g in &sources {
        let r = compare_full_vs_surjective(g, 8, &catalog, &budget).map_err(|e| e.to_string())?;
        let full_d = all_approximations(g, 8, &catalog, &budget).map_err(|e| e.to_string())?;
        let keep: Vec<usize> = (0..full_d.nodes().len())
            .filter(|&v| full_d.nodes()[v].is_surjective())
            .collect();
        let restricted: Vec<Vec<usize>> = r.full.restrict(&keep);
        let distinct: HashSet<&Vec<usize>> = restricted.iter().collect();
        let onto = r.surjective.elements().iter().all(|x| distinct.contains(x));
        let n = g.order().unwrap() as usize;
        ensure(
            distinct.len() == restricted.len() && onto && r.surjective.order() == restricted.len(),
            format!("{}: restriction is not a bijection", g.name()),
        )?;
        ensure(
            r.full.order() == n && r.bijective && r.skeleton_isomorphic,
            format!("{}: full order {} vs |G| = {n}", g.name(), r.full.order()),
        )?;
        summary.push(format!(
            "{} ({} -> {} nodes)",
            g.name(),
            r.full_nodes,
            r.surjective_nodes
        ));
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("restriction bijective for {}", summary.join(", ")))
}

const FP_INSTANCES: [(u64, usize); 4] = [(2, 1), (2, 2), (3, 1), (3, 2)];

fn fp_bound(p: u64, dim: usize) -> usize {
    (p as usize).pow(dim.max(2) as u32)
}

/// Counts functions `V* -> F_p` that are additive and homogeneous, by
/// brute force over all `p^(p^dim)` functions.
fn double_dual_size(p: u64, dim: usize) -> usize {
    let forms: Vec<Vec<u64>> = (0..(p as usize).pow(dim as u32))
        .map(|mut i| {
            (0..dim)
                .map(|_| {
                    let d = (i % p as usize) as u64;
                    i /= p as usize;
                    d
                })
                .collect()
        })
        .collect();
    let index = |v: &[u64]| forms.iter().position(|f| f == v).unwrap();
    let m = forms.len();
    let total = (p as usize).pow(m as u32);
    let mut count = 0;
    for code in 0..total {
        let mut rest = code;
        let vals: Vec<u64> = (0..m)
            .map(|_| {
                let d = (rest % p as usize) as u64;
                rest /= p as usize;
                d
            })
            .collect();
        let linear = (0..m).all(|a| {
            (0..m).all(|b| {
                (0..p).all(|l| {
                    let s: Vec<u64> = forms[a]
                        .iter()
                        .zip(&forms[b])
                        .map(|(x, y)| (x + l * y) % p)
                        .collect();
                    vals[index(&s)] == (vals[a] + l * vals[b]) % p
                })
            })
        });
        count += linear as usize;
    }
    count
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let budget = Budget::default();
    for (p, dim) in FP_INSTANCES {
        let expected = (p as usize).pow(dim as u32);
        let dd = double_dual_size(p, dim);
        ensure(
            dd == expected,
            format!("|V**| oracle gave {dd} for ({p}, {dim})"),
        )?;
        let r = check_theorem_iso(p, dim, fp_bound(p, dim), &budget).map_err(|e| e.to_string())?;
        ensure(r.passed(), format!("({p}, {dim}): {:?}", r.counterexample))?;
        let w = r.witness.unwrap();
        ensure(
            w["completion_order"] == expected && w["double_dual_order"] == dd,
            format!("({p}, {dim}): {w}"),
        )?;
    }
    within(start, Duration::from_secs(30))?;
    Ok(
        "psi bijective homomorphism, |completion| = p^dim = |V**| for (2,1) (2,2) (3,1) (3,2)"
            .into(),
    )
}

fn criterion_4() -> Outcome {
    let budget = Budget::default();
    let mut checked = 0;
    for (p, dim) in FP_INSTANCES {
        let r = check_triangle(p, dim, fp_bound(p, dim), &budget).map_err(|e| e.to_string())?;
        ensure(r.passed(), format!("({p}, {dim}): {:?}", r.counterexample))?;
        let c = FpCompletion::new(p, dim, fp_bound(p, dim), &budget).map_err(|e| e.to_string())?;
        let field = PrimeField::new(p).unwrap();
        for v in all_vectors(p, dim, &budget).unwrap() {
            let g = SourceElement::Coords(v.iter().map(|&a| a as i64).collect());
            let x = profinite_projection(c.diagram(), &g).map_err(|e| e.to_string())?;
            let theta = c.psi(&x).map_err(|e| e.to_string())?;
            // i(v)(f) = f(v) for every form f.
            for i in 0..dim {
                let f = DualVector::coordinate(field, dim, i);
                ensure(
                    theta.eval(&f) == f.eval(&v),
                    format!("({p}, {dim}) at {v:?}"),
                )?;
            }
            checked += 1;
        }
    }
    Ok(format!(
        "psi o pi-hat = i on all {checked} vectors, 0 failures"
    ))
}

fn criterion_5() -> Outcome {
    let budget = Budget::default();
    let r = check_fact_suite(2, 2, 4, &budget).map_err(|e| e.to_string())?;
    let w = r
        .witness
        .clone()
        .unwrap_or_else(|| r.counterexample.clone().unwrap());
    ensure(r.passed(), format!("{w}"))?;
    ensure(
        w["families"] == 4
            && w["triples_per_family"] == 16
            && w["checks"] == 64
            && w["passed"] == 64,
        format!("{w}"),
    )?;
    let c = FpCompletion::new(2, 2, 4, &budget).map_err(|e| e.to_string())?;
    let bad = corrupted_family(&c).unwrap();
    let field = PrimeField::new(2).unwrap();
    let forms: Vec<DualVector> = all_vectors(2, 2, &budget)
        .unwrap()
        .into_iter()
        .map(|v| DualVector::new(field, v))
        .collect();
    let mut failures = 0;
    for f in &forms {
        for g in &forms {
            failures += !c.check_fact(&bad, f, g, 1).map_err(|e| e.to_string())? as usize;
        }
    }
    ensure(failures > 0, "corrupted family passed every triple")?;
    Ok(format!(
        "4 families x 16 triples, 64/64 pass; corrupted family fails {failures} triples"
    ))
}

/// Surjections `F_2^2 -> T`: commuting pairs of elements of order dividing
/// 2 that generate `T`.
fn surjection_oracle(t: &FinGroup) -> usize {
    let n = t.order();
    let inv: Vec<usize> = (0..n).filter(|&a| t.op(a, a) == 0).collect();
    let mut count = 0;
    for &a in &inv {
        for &b in &inv {
            if t.op(a, b) == t.op(b, a) && t.closure(&[a, b]).len() == n {
                count += 1;
            }
        }
    }
    count
}

fn criterion_6() -> Outcome {
    let budget = Budget::default();
    let cat: Vec<Arc<FinGroup>> = vec![
        cyc(4),
        Arc::new(s3()),
        Arc::new(d4()),
        Arc::new(q8()),
        Arc::new(
            FinAbGroup::cyclic_product(&[2, 2])
                .unwrap()
                .to_fin_group()
                .unwrap(),
        ),
    ];
    let (classes, report) =
        classify_surjective_images(2, 2, &cat, &budget).map_err(|e| e.to_string())?;
    let got: Vec<usize> = classes.iter().map(|c| c.surjections).collect();
    let oracle: Vec<usize> = cat.iter().map(|t| surjection_oracle(t)).collect();
    let gl2 = (4 - 1) * (4 - 2);
    ensure(report.passed(), "a non-elementary image")?;
    ensure(got == oracle, format!("library {got:?}, oracle {oracle:?}"))?;
    ensure(got == vec![0, 0, 0, 0, gl2], format!("{got:?}"))?;
    Ok(format!(
        "surjections onto Z/4, S3, D4, Q8, Z/2 x Z/2: {got:?}, |GL2(F2)| = {gl2}"
    ))
}

fn criterion_7() -> Outcome {
    let budget = Budget::default();
    let (r, report) = remark47_limit(2, 3, &budget).map_err(|e| e.to_string())?;
    // Subspaces of F_2^3 as subsets of the 8 vectors (bit masks) that
    // contain 0 and are closed under xor.
    let mut by_size = [0usize; 9];
    for mask in 0u32..256 {
        if mask & 1 == 0 {
            continue;
        }
        let members: Vec<u32> = (0..8).filter(|v| mask >> v & 1 == 1).collect();
        if members
            .iter()
            .all(|&a| members.iter().all(|&b| mask >> (a ^ b) & 1 == 1))
        {
            by_size[members.len()] += 1;
        }
    }
    let oracle = vec![by_size[1], by_size[2], by_size[4], by_size[8]];
    ensure(oracle == vec![1, 7, 7, 1], format!("oracle {oracle:?}"))?;
    ensure(
        r.subspaces == 16 && r.counts_by_dim == oracle,
        format!("{r:?}"),
    )?;
    ensure(r.perp_involution, "annihilator twice is not the identity")?;
    ensure(
        r.limit_order == 8 && r.bijective && report.passed(),
        format!("{r:?}"),
    )?;
    Ok(
        "16 subspaces (1, 7, 7, 1), perp involutive, lim V/Z has 8 elements, map to V** bijective"
            .into(),
    )
}

fn criterion_8() -> Outcome {
    let budget = Budget::default();
    let mut parts = Vec::new();
    for (g, depth) in [(SourceGroup::cyclic(2), 3), (SourceGroup::finite(s3()), 2)] {
        let r = check_iterate(&g, depth, &budget).map_err(|e| e.to_string())?;
        ensure(r.passed(), format!("{}: {:?}", g.name(), r.counterexample))?;
        let stages = iterate_completion(&g, depth, &budget).map_err(|e| e.to_string())?;
        let n = g.order().unwrap() as usize;
        for s in &stages {
            ensure(
                s.limit.order() == n && s.projection.injective && s.projection.surjective,
                format!("{} stage of order {}", g.name(), s.limit.order()),
            )?;
        }
        parts.push(format!("{} depth {depth}", g.name()));
    }
    Ok(format!(
        "every iterated projection bijective: {}",
        parts.join(", ")
    ))
}

/// Least support of `v in F_p^(2(n+1))` with `v_i = 1` for `i <= n`, by
/// exhaustive search.
fn min_support_oracle(p: u64, n: usize) -> usize {
    let amb = 2 * (n + 1);
    let total = (p as usize).pow(amb as u32);
    let mut best = usize::MAX;
    for mut code in 0..total {
        let v: Vec<u64> = (0..amb)
            .map(|_| {
                let d = (code % p as usize) as u64;
                code /= p as usize;
                d
            })
            .collect();
        if v[..=n].iter().all(|&x| x == 1) {
            best = best.min(v.iter().filter(|&&x| x != 0).count());
        }
    }
    best
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    for p in [2, 3] {
        let (levels, report) = nonsurjectivity_witness(p, 16).map_err(|e| e.to_string())?;
        let supports: Vec<usize> = levels.iter().map(|l| l.min_support).collect();
        ensure(report.passed(), format!("p={p}: {supports:?}"))?;
        ensure(
            supports == (1..=17).collect::<Vec<_>>(),
            format!("p={p}: {supports:?}"),
        )?;
    }
    within(start, Duration::from_secs(1))?;
    for (p, max_n) in [(2, 3), (3, 2)] {
        for n in 0..=max_n {
            let o = min_support_oracle(p, n);
            ensure(o == n + 1, format!("oracle p={p} n={n}: {o}"))?;
        }
    }
    Ok("least support n+1 for p in {2, 3}, n = 0..16; brute force agrees for small n".into())
}

fn criterion_10() -> Outcome {
    let budget = Budget::default();
    let mut diagrams: Vec<Diagram> = Vec::new();
    let cat = default_catalog(8);
    for bound in 1..=10 {
        let d = surjective_approximations(&SourceGroup::integers(), bound, &budget).unwrap();
        diagrams.push(Diagram::from_approx(&d));
    }
    let mut sources = vec![
        SourceGroup::cyclic(4),
        SourceGroup::cyclic(6),
        SourceGroup::cyclic(8),
        SourceGroup::fp_space(2, 2).unwrap(),
        SourceGroup::fp_space(3, 1).unwrap(),
        SourceGroup::finite(s3()),
        SourceGroup::finite(d4()),
        SourceGroup::finite(q8()),
        SourceGroup::trivial(),
    ];
    sources.push(SourceGroup::fg_abelian(2, &[]).unwrap());
    sources.push(SourceGroup::fg_abelian(1, &[2]).unwrap());
    for g in &sources {
        for bound in [2, 4, 6, 8] {
            if let Ok(d) = surjective_approximations(g, bound, &budget) {
                diagrams.push(Diagram::from_approx(&d));
            }
            if let Ok(d) = all_approximations(g, bound, &cat, &budget) {
                diagrams.push(Diagram::from_approx(&d));
            }
        }
    }
    let mut compared = 0;
    for d in diagrams.iter().filter(|d| d.product_order() <= 100_000) {
        let a = inverse_limit_with(d, Solver::BruteForce, &budget).map_err(|e| e.to_string())?;
        let b = inverse_limit_with(d, Solver::FiberProduct, &budget).map_err(|e| e.to_string())?;
        ensure(
            a.elements() == b.elements(),
            format!("solvers differ on {:?}", d.labels()),
        )?;
        ensure(
            inverse_limit(d, &budget).unwrap().elements() == b.elements(),
            "default solver differs",
        )?;
        compared += 1;
    }
    ensure(compared >= 20, format!("only {compared} diagrams in range"))?;
    Ok(format!(
        "brute force = fiber product on {compared} diagrams with product order <= 1e5"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
        ("8", criterion_8),
        ("9", criterion_9),
        ("10", criterion_10),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|e| Err(format!("panicked: {:?}", e.downcast_ref::<String>())));
        match outcome {
            Ok(msg) => println!("criterion {name:>2} PASS  {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {name:>2} FAIL  {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 10 criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
