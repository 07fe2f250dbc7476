//! Acceptance suite: one PASS/FAIL line per criterion, with time limits.
//! Runs without the test harness so the report is always printed.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rand::Rng;
use wcsp_core::corpus;
use wcsp_core::dichotomy::{multiplicity_sequence, PowerInstance, PowerLanguage, Quadruple};
use wcsp_core::exactmat::{block_decompose, is_block_rank_1, rank1_condition};
use wcsp_core::oracle::BalanceMode;
use wcsp_core::reductions::{
    count_support_brute, gadget_matrix, graph_partition_function, hardness_gadget, value_set, Graph,
};
use wcsp_core::weight::{self, int, Weight};
use wcsp_core::{classify, ClassifyConfig, Instance, Oracle, RationalMatrix, Reason, RelationTable, Verdict};

use common::Fixture;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Report {
    failed: usize,
}

impl Report {
    fn run(&mut self, id: u32, title: &str, limit: Option<u64>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let over = limit.is_some_and(|s| elapsed >= Duration::from_secs(s));
        let limit_text = limit.map_or(String::new(), |s| format!(", limit {s} s"));
        let (status, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over time")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            self.failed += 1;
        }
        println!(
            "criterion {id} {status}: {title}: {detail} ({:.2} s{limit_text})",
            elapsed.as_secs_f64()
        );
    }
}

fn all_fixtures() -> impl Iterator<Item = &'static Fixture> {
    common::d2_tractable().iter().chain(common::d3_tractable())
}

/// Instances over certified languages: every instance with `n <= 4`,
/// `m <= 3` on two elements, and 200 random instances with `n <= 6` on three.
fn counting_corpus() -> Vec<(&'static Fixture, Instance)> {
    let mut out = Vec::new();
    for fx in common::d2_tractable() {
        for n in 1..=4 {
            out.extend(corpus::all_instances(&fx.language, n, 3).into_iter().map(|i| (fx, i)));
        }
    }
    let d3 = common::d3_tractable();
    let mut rng = corpus::rng(2024);
    for k in 0..200 {
        let fx = &d3[k % d3.len()];
        out.push((fx, corpus::random_instance(&mut rng, &fx.language, 6, 6)));
    }
    out
}

fn criterion_1(corpus: &mut Vec<(&'static Fixture, Instance)>) -> Outcome {
    for fx in all_fixtures() {
        check(fx.verdict.is_tractable(), || {
            format!("{} not certified: {:?}", fx.name, fx.verdict)
        })?;
    }
    *corpus = counting_corpus();
    let oracle = Oracle::default();
    let counters: Vec<_> = all_fixtures().map(|fx| (fx.name.clone(), fx.counter())).collect();
    for (fx, inst) in corpus.iter() {
        let counter = &counters.iter().find(|(n, _)| *n == fx.name).expect("fixture").1;
        let structured = counter.count(inst).map_err(|e| format!("{inst}: {e}"))?;
        let brute = oracle.partition_function(inst).map_err(|e| e.to_string())?;
        check(structured == brute, || {
            format!("{} {inst}: structured {structured} != {brute}", fx.name)
        })?;
    }
    Ok(format!("{} instances over {} languages", corpus.len(), counters.len()))
}

/// Closure of `rel` under `m`, checked over every triple of members.
fn closed_under(rel: &RelationTable, m: impl Fn(usize, usize, usize) -> usize) -> bool {
    let members: Vec<_> = rel.iter().collect();
    members.iter().all(|t1| {
        members.iter().all(|t2| {
            members.iter().all(|t3| {
                let image: Vec<usize> = (0..t1.len()).map(|j| m(t1[j], t2[j], t3[j])).collect();
                rel.contains(&image)
            })
        })
    })
}

fn criterion_2() -> Outcome {
    let config = ClassifyConfig::default();

    let eqw = corpus::eqw_language();
    let Verdict::Tractable(cert) = classify(&eqw, &config).map_err(|e| e.to_string())? else {
        return Err("{EQW} not tractable".into());
    };
    let m = &cert.maltsev;
    check(
        (0..2).all(|a| (0..2).all(|b| m.apply(a, b, b) == a && m.apply(b, b, a) == a)),
        || format!("{m} violates the Mal'tsev identities"),
    )?;
    for rel in eqw.support_language() {
        check(closed_under(&rel, |a, b, c| m.apply(a, b, c)), || {
            format!("{m} does not preserve a support")
        })?;
    }
    check(cert.automorphisms.len() == 4, || {
        format!("{} automorphisms", cert.automorphisms.len())
    })?;
    for (q, pi) in &cert.automorphisms {
        common::verify_power_automorphism(&eqw, *q, pi).map_err(|e| format!("{{EQW}} {q}: {e}"))?;
    }

    let one2 = corpus::one2_language();
    let q = Quadruple {
        alpha: 0,
        beta: 1,
        kappa: 0,
        lambda: 1,
    };
    let verdict = classify(&one2, &config).map_err(|e| e.to_string())?;
    check(verdict == Verdict::SharpPHard(Reason::NoAutomorphism(q)), || {
        format!("{{ONE2}}: {verdict:?}")
    })?;
    let mm = Oracle::default()
        .marginal_matrix(&corpus::single_constraint(&one2, "ONE2"), 1, 2)
        .map_err(|e| e.to_string())?;
    let g = |x: usize, y: usize| mm.get(x, y).clone();
    let (al, be, ka, la) = (q.alpha, q.beta, q.kappa, q.lambda);
    let lhs = g(al, ka).pow(2) * g(be, la).pow(2) * g(al, la) * g(be, ka);
    let rhs = g(al, la).pow(2) * g(be, ka).pow(2) * g(al, ka) * g(be, la);
    check(lhs != rhs, || format!("{{ONE2}}: both sides equal {lhs}"))?;

    let nand = corpus::nand_language();
    let verdict = classify(&nand, &config).map_err(|e| e.to_string())?;
    let Verdict::SharpPHard(Reason::NoMaltsev { counterexample, .. }) = verdict else {
        return Err(format!("NAND support: {verdict:?}"));
    };
    let support = nand.function(0).support();
    // Every operation with m(a,b,b) = m(b,b,a) = a: the two free cells
    // (1,2,1) and (2,1,2) range over {1,2}.
    for bits in 0..4usize {
        let cand = |a: usize, b: usize, c: usize| {
            if b == c {
                a
            } else if a == b {
                c
            } else if a == 0 {
                bits >> 1 & 1
            } else {
                bits & 1
            }
        };
        check(!closed_under(&support, cand), || {
            format!("candidate {bits} preserves the NAND support")
        })?;
    }
    let first = |a: usize, b: usize, c: usize| {
        if b == c {
            a
        } else if a == b {
            c
        } else {
            0
        }
    };
    let [t1, t2, t3] = &counterexample.tuples;
    let image: Vec<usize> = (0..2).map(|j| first(t1[j], t2[j], t3[j])).collect();
    check(
        [t1, t2, t3].iter().all(|t| support.contains(t)) && image == counterexample.image && !support.contains(&image),
        || format!("counterexample {} does not refute the first candidate", counterexample),
    )?;
    Ok(format!(
        "EQW tractable with 4 automorphisms; ONE2 {lhs} != {rhs}; NAND refuted by {counterexample}"
    ))
}

fn gadget_vars(inst: &Instance, a: usize, b: usize, g: &Graph) -> usize {
    let n = inst.num_vars();
    g.vertices() * a + g.edges().len() * ((b - a) + 2 * (n - b))
}

fn criterion_3() -> Outcome {
    let oracle = Oracle::default();
    let one2 = corpus::one2_language();
    let single = corpus::single_constraint(&one2, "ONE2");
    let edge = Graph::new(2, vec![(0, 1)]).map_err(|e| e.to_string())?;
    let a = gadget_matrix(&oracle, &single, 1, 2).map_err(|e| e.to_string())?;
    let expected = RationalMatrix::from_ints(&[&[2, 3], &[3, 5]]).expect("matrix");
    check(a.entries() == expected.entries(), || format!("worked case A = {a}"))?;
    let gadget = hardness_gadget(&single, 1, 2, &edge).map_err(|e| e.to_string())?;
    let z = oracle.partition_function(&gadget).map_err(|e| e.to_string())?;
    let za = graph_partition_function(&oracle, &a, &edge).map_err(|e| e.to_string())?;
    check(z == int(13) && za == int(13), || {
        format!("worked case Z = {z}, Z_A = {za}")
    })?;

    let mut languages = vec![
        corpus::eqw_language(),
        one2,
        corpus::rank1_language(),
        corpus::nand_language(),
    ];
    languages.extend(common::d2_tractable().iter().map(|fx| fx.language.clone()));
    let mut rng = corpus::rng(303);
    let mut done = 1;
    while done < 100 {
        let lang = &languages[rng.gen_range(0..languages.len())];
        let inst = corpus::random_instance(&mut rng, lang, 3, 3);
        let n = inst.num_vars();
        if n < 2 {
            continue;
        }
        let a = rng.gen_range(1..n);
        let b = rng.gen_range(a + 1..=n);
        let graph = corpus::random_graph(&mut rng, 4, 5);
        if gadget_vars(&inst, a, b, &graph) > 16 {
            continue;
        }
        let matrix = gadget_matrix(&oracle, &inst, a, b).map_err(|e| e.to_string())?;
        let gadget = hardness_gadget(&inst, a, b, &graph).map_err(|e| e.to_string())?;
        let z = oracle.partition_function(&gadget).map_err(|e| e.to_string())?;
        let za = graph_partition_function(&oracle, &matrix, &graph).map_err(|e| e.to_string())?;
        check(z == za, || {
            format!("{inst} split ({a},{b}) graph {:?}: {z} != {za}", graph.edges())
        })?;
        done += 1;
    }
    Ok(format!("{done} pairs, worked case Z = 13"))
}

fn criterion_4() -> Outcome {
    let oracle = Oracle::default();
    let eqw = corpus::eqw_language();
    let single = corpus::single_constraint(&eqw, "EQW");
    let values = value_set(&single).values;
    check(values == vec![int(2), int(3)], || {
        format!("worked case values {values:?}")
    })?;
    let count = count_support_brute(&oracle, &single).map_err(|e| e.to_string())?;
    check(count.to_u64() == Some(2), || format!("worked case count {count}"))?;

    let mut languages = vec![
        eqw,
        corpus::one2_language(),
        corpus::rank1_language(),
        corpus::nand_language(),
    ];
    languages.extend(all_fixtures().map(|fx| fx.language.clone()));
    let mut rng = corpus::rng(404);
    for _ in 1..100 {
        let lang = &languages[rng.gen_range(0..languages.len())];
        let inst = corpus::random_instance(&mut rng, lang, 4, 4);
        let count = count_support_brute(&oracle, &inst).map_err(|e| format!("{inst}: {e}"))?;
        let size = oracle.relation_of(&inst).map_err(|e| e.to_string())?.len();
        check(count.to_usize() == Some(size), || {
            format!("{inst}: {count} != |R| = {size}")
        })?;
    }
    Ok("100 instances, worked case |R| = 2".into())
}

fn criterion_5() -> Outcome {
    let mut checked = 0u64;
    for n in 2..=3u32 {
        let cells = (n * n) as usize;
        let mut digits = vec![0i64; cells];
        for code in 0..5u64.pow(n * n) {
            let mut rest = code;
            for d in digits.iter_mut() {
                *d = (rest % 5) as i64;
                rest /= 5;
            }
            let rows: Vec<&[i64]> = digits.chunks(n as usize).collect();
            let m = RationalMatrix::from_ints(&rows).expect("matrix");
            if block_decompose(&m).is_err() {
                continue;
            }
            checked += 1;
            let identity = rank1_condition(&m).map_err(|e| e.to_string())?;
            check(identity == is_block_rank_1(&m).is_ok(), || {
                format!("disagreement on {m}")
            })?;
        }
    }
    Ok(format!("{checked} rectangular matrices"))
}

fn criterion_6(corpus: &[(&'static Fixture, Instance)]) -> Outcome {
    let oracle = Oracle::default();
    let mut points = 0u64;
    for (fx, inst) in corpus {
        let n = inst.num_vars();
        if n < 2 {
            continue;
        }
        let (rel, s, t) = fx.counter().prepare(inst).map_err(|e| e.to_string())?;
        let f = oracle.instance_function(inst).map_err(|e| e.to_string())?;
        let marginals: Vec<_> = (1..n).map(|i| f.marginalize(i).expect("level")).collect();
        for u in rel.iter() {
            for i in 1..n {
                points += 1;
                let closed = t.closed_form(&s, &u, i);
                let sum = marginals[i - 1].value(&u[..i]);
                check(closed == *sum, || format!("{inst} u={u:?} i={i}: {closed} != {sum}"))?;
            }
        }
    }
    Ok(format!("{points} (instance, u, i) points"))
}

fn criterion_7(corpus: &[(&'static Fixture, Instance)]) -> Outcome {
    let oracle = Oracle::default();
    for (fx, inst) in corpus {
        let verdict = oracle
            .test_balance_mode(inst, BalanceMode::Strong)
            .map_err(|e| e.to_string())?;
        check(verdict.is_balanced(), || format!("{} {inst}: {verdict:?}", fx.name))?;
    }
    Ok(format!("{} instances", corpus.len()))
}

fn criterion_8() -> Outcome {
    const BOUND: u64 = 1 << 20;
    let mut rng = corpus::rng(808);
    let mut checks = 0u64;
    for fx in all_fixtures() {
        let Verdict::Tractable(cert) = &fx.verdict else {
            return Err(format!("{} not certified", fx.name));
        };
        let power = PowerLanguage::new(fx.language.clone(), 1 << 22).map_err(|e| e.to_string())?;
        let mut instances = Vec::new();
        while instances.len() < 50 {
            let inst = corpus::random_instance(&mut rng, &fx.language, 3, 4);
            if inst.num_vars() >= 2 {
                instances.push(inst);
            }
        }
        for (q, _) in &cert.automorphisms {
            let sp = power.special_elements(*q).map_err(|e| e.to_string())?;
            for inst in &instances {
                let p = PowerInstance::from_base(&power, inst).map_err(|e| e.to_string())?;
                let sums = |s| -> Result<(Weight, Weight), String> {
                    Ok((
                        p.hom(s, *q, BOUND).map_err(|e| e.to_string())?,
                        p.mon(s, *q, BOUND).map_err(|e| e.to_string())?,
                    ))
                };
                let (hb, mb) = sums(sp.b)?;
                let (hc, mc) = sums(sp.c)?;
                check(hb == hc && mb == mc, || {
                    format!("{} {q} {inst}: hom {hb} vs {hc}, mon {mb} vs {mc}", fx.name)
                })?;
                checks += 1;
            }
        }
    }

    let one2 = corpus::one2_language();
    let power = PowerLanguage::new(one2.clone(), 1 << 22).map_err(|e| e.to_string())?;
    let p = PowerInstance::from_base(&power, &corpus::single_constraint(&one2, "ONE2")).map_err(|e| e.to_string())?;
    let q = Quadruple {
        alpha: 0,
        beta: 1,
        kappa: 0,
        lambda: 1,
    };
    let sp = power.special_elements(q).map_err(|e| e.to_string())?;
    let hb = p.hom(sp.b, q, BOUND).map_err(|e| e.to_string())?;
    let hc = p.hom(sp.c, q, BOUND).map_err(|e| e.to_string())?;
    check(hb == int(4) && hc == int(2), || {
        format!("ONE2: hom_b = {hb}, hom_c = {hc}")
    })?;
    Ok(format!(
        "{checks} (automorphism, instance) pairs; ONE2 hom_b = 4 != 2 = hom_c"
    ))
}

/// Whether distinct exponent tuples over `values` always give distinct
/// weighted products, over all pairs.
fn unique_by_pairs(values: &[i64], seq: &[u64]) -> bool {
    let k = seq.len();
    let tuples: Vec<Vec<usize>> = (0..values.len().pow(k as u32))
        .map(|mut code| {
            (0..k)
                .map(|_| {
                    let d = code % values.len();
                    code /= values.len();
                    d
                })
                .collect()
        })
        .collect();
    let product = |t: &[usize]| {
        t.iter().zip(seq).fold(Weight::from_integer(1.into()), |acc, (&i, &n)| {
            acc * weight::pow(&int(values[i]), n as usize)
        })
    };
    let products: Vec<Weight> = tuples.iter().map(|t| product(t)).collect();
    (0..tuples.len()).all(|i| (0..tuples.len()).all(|j| i == j || products[i] != products[j]))
}

fn criterion_9() -> Outcome {
    let base = [2i64, 3, 4, 5];
    let mut cases = 0;
    for mask in 1u32..16 {
        let q: Vec<i64> = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| base[i]).collect();
        if q.len() > 3 {
            continue;
        }
        let weights: Vec<Weight> = q.iter().map(|&v| int(v)).collect();
        for k in 1..=3 {
            let seq = multiplicity_sequence(&weights, k).map_err(|e| e.to_string())?;
            check(seq.len() == k && seq[0] == 1, || format!("Q={q:?} k={k}: {seq:?}"))?;
            check(unique_by_pairs(&q, &seq), || {
                format!("Q={q:?} k={k}: {seq:?} has a collision")
            })?;
            cases += 1;
        }
    }
    let seq = multiplicity_sequence(&[int(2), int(3)], 2).map_err(|e| e.to_string())?;
    check(seq == vec![1, 2], || format!("Q={{2,3}}: {seq:?}"))?;
    Ok(format!("{cases} (Q, k) cases"))
}

fn main() -> ExitCode {
    let mut report = Report { failed: 0 };
    let mut corpus = Vec::new();
    report.run(
        1,
        "structured count equals the brute-force partition function",
        Some(60),
        || criterion_1(&mut corpus),
    );
    report.run(
        2,
        "classifier verdicts with independently checked certificates",
        Some(30),
        criterion_2,
    );
    report.run(3, "hardness gadget identity", Some(30), criterion_3);
    report.run(4, "support count from weighted queries", Some(30), criterion_4);
    report.run(
        5,
        "rank-1 identity matches block-rank-1 on small matrices",
        Some(60),
        criterion_5,
    );
    report.run(6, "conditional sums equal the s/t closed form", None, || {
        criterion_6(&corpus)
    });
    report.run(
        7,
        "existential matrices of certified instances are block-rank-1",
        None,
        || criterion_7(&corpus),
    );
    report.run(8, "automorphisms equalise hom and mon", None, criterion_8);
    report.run(9, "multiplicity sequences give unique products", Some(30), criterion_9);
    println!("acceptance: {} of 9 criteria failed", report.failed);
    if report.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
