//! Shared generators for the integration suites: random schemes, random
//! first-return systems on prime-denominator rotations, and the cached
//! corpora the acceptance criteria run over.

use ire::circle::{first_return_map_strict, ArcUnion, CircleRotation, ReturnMapResult};
use ire::exact::{ratio, Rational};
use ire::lengths::FloatingIRE;
use ire::scheme::{DoubledSymbol, Label, Marker, Scheme};
use num::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn label(name: &str) -> Label {
    Label::new(name).unwrap()
}

pub fn rat_u(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A uniformly random scheme on `d` labels: a random bijection of the doubled
/// alphabet.
pub fn random_scheme(rng: &mut ChaCha8Rng, d: usize) -> Scheme {
    let labels: Vec<Label> = (0..d).map(|i| label(&format!("x{i}"))).collect();
    let mut domain: Vec<DoubledSymbol> = labels
        .iter()
        .flat_map(|l| [DoubledSymbol::begin(l), DoubledSymbol::end(l)])
        .collect();
    let mut image = domain.clone();
    image.shuffle(rng);
    let perm: BTreeMap<DoubledSymbol, DoubledSymbol> = domain.drain(..).zip(image).collect();
    Scheme::new(perm).unwrap()
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut k = 3u64;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

pub fn random_prime(rng: &mut ChaCha8Rng, lo: u64, hi: u64) -> u64 {
    loop {
        let candidate = rng.gen_range(lo..hi) | 1;
        if is_prime(candidate) {
            return candidate;
        }
    }
}

#[allow(dead_code)]
pub struct ReturnSystem {
    pub rotation: CircleRotation,
    pub arcs: ArcUnion,
    pub result: ReturnMapResult,
    pub denominator: u64,
}

/// A random first-return system: rotation number `p/q` with `q` a random
/// prime (so no two grid-endpoint orbits can collide: a collision would force
/// a divisor of `q` below the grid size), and up to `max_arcs` non-touching
/// arcs with endpoints on the 1/1000 grid. The strict return map certifies
/// the absence of coincidences.
pub fn random_return_system(rng: &mut ChaCha8Rng, max_arcs: usize) -> ReturnSystem {
    loop {
        let q = random_prime(rng, 1_000_000, 8_000_000);
        let p = rng.gen_range(1..q);
        let rotation = CircleRotation::new(
            rat_u(1),
            Rational::new(BigInt::from(p), BigInt::from(q)),
            Rational::from_integer(0.into()),
        )
        .unwrap();
        let count = rng.gen_range(1..=max_arcs);
        let mut marks = BTreeSet::new();
        while marks.len() < 2 * count {
            marks.insert(rng.gen_range(1u64..1000));
        }
        let marks: Vec<u64> = marks.into_iter().collect();
        let raw: Vec<(Rational, Rational)> = marks
            .chunks(2)
            .map(|pair| (ratio(pair[0] as i64, 1000), ratio(pair[1] as i64, 1000)))
            .collect();
        let arcs = ArcUnion::new(&rotation, &raw).unwrap();
        if arcs.arcs().len() != count {
            continue;
        }
        // A prime denominator above the grid size rules out endpoint-orbit
        // collisions, so the strict detector must stay silent.
        let result = first_return_map_strict(&rotation, &arcs, q + 1)
            .expect("no coincidence can occur on a prime-denominator instance");
        return ReturnSystem {
            rotation,
            arcs,
            result,
            denominator: q,
        };
    }
}

/// 500 rotational interval exchanges with at most 10 letters, induced by
/// random rotations on up to three arcs.
pub fn small_exchange_corpus() -> &'static Vec<FloatingIRE> {
    static CORPUS: OnceLock<Vec<FloatingIRE>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut rng = rng(0x5eed_0001);
        let mut out = Vec::with_capacity(500);
        while out.len() < 500 {
            let system = random_return_system(&mut rng, 3);
            let ire = system.result.ire.floating();
            if ire.scheme().alphabet().len() <= 10 {
                out.push(ire);
            }
        }
        out
    })
}

/// 200 random first-return systems on up to five arcs, kept with their
/// rotations for realization round-trips.
pub fn return_system_corpus() -> &'static Vec<ReturnSystem> {
    static CORPUS: OnceLock<Vec<ReturnSystem>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut rng = rng(0x5eed_0002);
        (0..200)
            .map(|_| random_return_system(&mut rng, 5))
            .collect()
    })
}

/// The four-letter rotational exchange used as a running example.
pub fn four_letter_exchange() -> FloatingIRE {
    let scheme =
        Scheme::from_two_rows(&[(&["g", "a", "d"], &["d", "b"]), (&["b"], &["a", "g"])]).unwrap();
    let lengths = [("a", 1), ("b", 2), ("g", 1), ("d", 1)]
        .into_iter()
        .map(|(l, v)| (label(l), rat_u(v)))
        .collect();
    FloatingIRE::new(scheme, lengths).unwrap()
}

/// All doubled symbols of a scheme restricted to a label subset.
pub fn doubled_subset(labels: &[Label]) -> Vec<DoubledSymbol> {
    labels
        .iter()
        .flat_map(|l| {
            [
                DoubledSymbol {
                    label: l.clone(),
                    marker: Marker::Begin,
                },
                DoubledSymbol {
                    label: l.clone(),
                    marker: Marker::End,
                },
            ]
        })
        .collect()
}
