//! Canonicalize a rotational interval exchange: the reduction emits a
//! replayable transcript of inverse steps and merges, and backward replay
//! recovers the input exactly.

use ire::canonical::{canonicalize, is_canonical};
use ire::cli::{format_scheme, parse_scheme};
use ire::exact::rat;
use ire::induction::{replay, ReplayDirection};
use ire::lengths::{FloatingIRE, LengthVector};
use ire::scheme::Label;

fn main() {
    let scheme = parse_scheme("[g a d | d b] [b | a g]").unwrap().scheme;
    let lengths: LengthVector = [("a", 1), ("b", 2), ("g", 1), ("d", 1)]
        .into_iter()
        .map(|(l, v)| (Label::new(l).unwrap(), rat(v)))
        .collect();
    let source = FloatingIRE::new(scheme, lengths).unwrap();
    println!("source: {}", format_scheme(source.scheme()));

    let (form, transcript) = canonicalize(&source).expect("rotational and irreducible");
    println!("{form}");
    println!("transcript ({} ops):", transcript.len());
    print!("{transcript}");

    let target = replay(&source, &transcript, ReplayDirection::Forward).unwrap();
    println!("replayed target: {}", format_scheme(target.scheme()));
    assert_eq!(is_canonical(&target).as_ref(), Some(&form));

    let back = replay(&target, &transcript, ReplayDirection::Backward).unwrap();
    assert_eq!(back, source);
    println!("backward replay recovers the source exactly");

    println!(
        "the canonical expansion: {}",
        format_scheme(form.expand().scheme())
    );
}
