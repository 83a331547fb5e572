//! The duality involution on schemes: compute duals, verify that applying
//! duality twice returns the original, and compare twist totals.

use ire::cli::{format_scheme, parse_scheme};
use ire::scheme::Scheme;

fn report(name: &str, s: &Scheme) {
    let dual = s.dual();
    println!("{name}: {}", format_scheme(s));
    println!("  dual:            {}", format_scheme(&dual));
    println!("  twist total:     {}", s.twist_total());
    println!("  dual twist:      {}", dual.twist_total());
    println!("  twist pair:      {}", s.twist_total_pair());
    assert_eq!(dual.dual(), *s);
    println!("  dual of dual returns the original: ok");
}

fn main() {
    let two_letter = parse_scheme("[a b | b a]").unwrap().scheme;
    report("two-letter exchange", &two_letter);

    let four_letter = parse_scheme("[g a d | d b] [b | a g]").unwrap().scheme;
    report("four-letter exchange", &four_letter);

    // A self-paired single cycle: its dual fixes both elements, and the two
    // singleton cycles each carry twist number -1.
    let loop_scheme = parse_scheme("[a | a]").unwrap().scheme;
    report("single-label loop", &loop_scheme);
}
