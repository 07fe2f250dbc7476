//! Fixture languages shared by the integration tests, with their verdicts
//! computed once per test binary.

#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num_traits::Zero;
use wcsp_core::corpus::{self, BlockLanguageShape};
use wcsp_core::dichotomy::power::POWER;
use wcsp_core::dichotomy::{Quadruple, SpecialElements};
use wcsp_core::weight::Weight;
use wcsp_core::{classify, ClassifyConfig, Counter, Language, Oracle, Verdict};

pub struct Fixture {
    pub name: String,
    pub language: Arc<Language>,
    pub verdict: Verdict,
}

impl Fixture {
    pub fn counter(&self) -> Counter {
        Counter::with_verdict(self.language.clone(), &self.verdict, Oracle::default()).expect("certified")
    }
}

fn fixture(name: String, language: Arc<Language>, config: &ClassifyConfig) -> Fixture {
    let verdict = classify(&language, config).expect("classification within bounds");
    Fixture {
        name,
        language,
        verdict,
    }
}

pub fn d2_block_shapes() -> Vec<(u64, BlockLanguageShape)> {
    let base = BlockLanguageShape::default();
    vec![
        (1, base),
        (2, base),
        (3, base),
        (
            4,
            BlockLanguageShape {
                unary: 1,
                binary: 0,
                ternary: 1,
                ..base
            },
        ),
    ]
}

pub fn d3_block_shapes() -> Vec<(u64, BlockLanguageShape)> {
    let base = BlockLanguageShape {
        domain: 3,
        unary: 1,
        binary: 2,
        ternary: 0,
        max_weight: 4,
    };
    vec![
        (11, base),
        (12, base),
        (
            13,
            BlockLanguageShape {
                unary: 2,
                binary: 1,
                ..base
            },
        ),
    ]
}

/// `{EQW}`, `{R1}` and random block languages on two elements.
pub fn d2_tractable() -> &'static [Fixture] {
    static CELL: OnceLock<Vec<Fixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        let config = ClassifyConfig::default();
        let mut out = vec![
            fixture("EQW".into(), corpus::eqw_language(), &config),
            fixture("R1".into(), corpus::rank1_language(), &config),
        ];
        for (seed, shape) in d2_block_shapes() {
            let lang = corpus::random_block_language(&mut corpus::rng(seed), shape);
            out.push(fixture(format!("block2/{seed}"), lang, &config));
        }
        out
    })
}

/// Random block languages on three elements.
pub fn d3_tractable() -> &'static [Fixture] {
    static CELL: OnceLock<Vec<Fixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        let config = ClassifyConfig::for_domain_three();
        d3_block_shapes()
            .into_iter()
            .map(|(seed, shape)| {
                let lang = corpus::random_block_language(&mut corpus::rng(seed), shape);
                fixture(format!("block3/{seed}"), lang, &config)
            })
            .collect()
    })
}

/// Coordinates of a power element, row-major over `D^6`.
pub fn power_coords(e: usize, d: usize) -> [usize; POWER] {
    let mut out = [0; POWER];
    let mut rest = e;
    for j in (0..POWER).rev() {
        out[j] = rest % d;
        rest /= d;
    }
    out
}

pub fn power_element(coords: [usize; POWER], d: usize) -> usize {
    coords.iter().fold(0, |acc, &x| acc * d + x)
}

/// `𝔞, 𝔟, 𝔠` from their coordinate patterns.
pub fn special_elements(q: Quadruple, d: usize) -> SpecialElements {
    let (al, be, ka, la) = (q.alpha, q.beta, q.kappa, q.lambda);
    SpecialElements {
        a: power_element([al, al, al, be, be, be], d),
        b: power_element([ka, ka, la, la, la, ka], d),
        c: power_element([la, la, ka, ka, ka, la], d),
    }
}

/// Checks that `pi` is a bijection with `π(𝔞)=𝔞`, `π(𝔟)=𝔠` and
/// `g(y) = g(π(y))` for every power function `g` and every tuple `y`.
/// Values are compared as multisets of base values first, falling back to
/// the exact product only when the multisets differ.
pub fn verify_power_automorphism(language: &Language, q: Quadruple, pi: &[usize]) -> Result<(), String> {
    let d = language.domain().size();
    let size = d.pow(POWER as u32);
    if pi.len() != size {
        return Err(format!("map has {} entries, expected {size}", pi.len()));
    }
    let mut seen = vec![false; size];
    for &p in pi {
        if p >= size || std::mem::replace(&mut seen[p], true) {
            return Err("map is not a bijection".into());
        }
    }
    let sp = special_elements(q, d);
    if pi[sp.a] != sp.a || pi[sp.b] != sp.c {
        return Err("map does not fix 𝔞 or send 𝔟 to 𝔠".into());
    }
    let coords: Vec<[usize; POWER]> = (0..size).map(|e| power_coords(e, d)).collect();
    for f in language.functions() {
        let r = f.arity();
        let mut ids: HashMap<&Weight, u32> = HashMap::new();
        let base_ids: Vec<u32> = f
            .values()
            .iter()
            .map(|v| {
                let next = ids.len() as u32;
                *ids.entry(v).or_insert(next)
            })
            .collect();
        let zero_id = f.values().iter().position(Zero::is_zero).map(|i| base_ids[i]);
        let multiset = |y: &[usize]| {
            let mut cells = [0u32; POWER];
            for (j, cell) in cells.iter_mut().enumerate() {
                let idx = y.iter().fold(0, |acc, &e| acc * d + coords[e][j]);
                *cell = base_ids[idx];
            }
            cells.sort_unstable();
            cells
        };
        let value = |cells: &[u32; POWER]| {
            if zero_id.is_some_and(|z| cells.contains(&z)) {
                return Weight::zero();
            }
            let lookup: HashMap<u32, &Weight> = ids.iter().map(|(w, &i)| (i, *w)).collect();
            cells
                .iter()
                .fold(Weight::from_integer(1.into()), |acc, c| acc * lookup[c])
        };
        let mut y = vec![0usize; r];
        let total = size.pow(r as u32);
        for idx in 0..total {
            let mut rest = idx;
            for slot in y.iter_mut().rev() {
                *slot = rest % size;
                rest /= size;
            }
            let image: Vec<usize> = y.iter().map(|&e| pi[e]).collect();
            let (m1, m2) = (multiset(&y), multiset(&image));
            if m1 != m2 && value(&m1) != value(&m2) {
                return Err(format!("{} changes value at {y:?}", f.name()));
            }
        }
    }
    Ok(())
}
