//! Perturb the second canonical length and replay the canonicalization
//! transcript backwards: the scheme survives untouched while the lengths
//! move, modelling the passage from a commensurable pair to a generic one.

use ire::canonical::canonicalize;
use ire::circle::perturb_to_irrational;
use ire::cli::{format_scheme, parse_scheme};
use ire::exact::{rat, ratio};
use ire::lengths::{is_rotational, FloatingIRE, LengthVector};
use ire::scheme::Label;

fn main() {
    let scheme = parse_scheme("[g a d | d b] [b | a g]").unwrap().scheme;
    let lengths: LengthVector = [("a", 1), ("b", 2), ("g", 1), ("d", 1)]
        .into_iter()
        .map(|(l, v)| (Label::new(l).unwrap(), rat(v)))
        .collect();
    let source = FloatingIRE::new(scheme, lengths).unwrap();
    let (form, transcript) = canonicalize(&source).unwrap();
    println!(
        "canonical pair: v_alpha={} v_beta={}",
        form.v_alpha(),
        form.v_beta()
    );

    let exact = perturb_to_irrational(&form, &transcript, &rat(0)).unwrap();
    assert_eq!(exact, source);
    println!("zero perturbation reproduces the source exactly");

    for eps in [ratio(1, 1000), ratio(1, 1_000_000)] {
        let perturbed = perturb_to_irrational(&form, &transcript, &eps).unwrap();
        assert_eq!(perturbed.scheme(), source.scheme());
        assert!(is_rotational(perturbed.scheme()));
        let lens: Vec<String> = perturbed
            .lengths()
            .iter()
            .map(|(l, v)| format!("{l}={v}"))
            .collect();
        println!(
            "eps={eps}: scheme {} unchanged",
            format_scheme(perturbed.scheme())
        );
        println!("  perturbed lengths: {}", lens.join(" "));
    }
}
