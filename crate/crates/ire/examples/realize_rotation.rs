//! Realize a rotational interval exchange as the first return map of a
//! circle rotation, then recompute the return map and match it against the
//! input interval for interval.

use ire::circle::{first_return_map, realize};
use ire::cli::{format_scheme, parse_scheme};
use ire::exact::rat;
use ire::lengths::{shift_equivalence, FloatingIRE, LengthVector};
use ire::scheme::Label;
use num::ToPrimitive;

fn main() {
    let scheme = parse_scheme("[g a d | d b] [b | a g]").unwrap().scheme;
    let lengths: LengthVector = [("a", 1), ("b", 2), ("g", 1), ("d", 1)]
        .into_iter()
        .map(|(l, v)| (Label::new(l).unwrap(), rat(v)))
        .collect();
    let ire = FloatingIRE::new(scheme, lengths).unwrap();
    println!("input: {}", format_scheme(ire.scheme()));

    let (rotation, arcs) = realize(&ire).expect("rotational input realizes");
    println!("{rotation}");
    println!("{arcs}");
    println!("rotation number: {}", rotation.rho());

    let min_len = ire.lengths().iter().map(|(_, v)| v.clone()).min().unwrap();
    let horizon = (rotation.length() / min_len)
        .ceil()
        .to_integer()
        .to_u64()
        .unwrap()
        + 2;
    let induced = first_return_map(&rotation, &arcs, horizon).unwrap();
    println!("induced: {}", format_scheme(induced.ire.scheme()));
    let matching = shift_equivalence(&ire, &induced.ire.floating()).expect("shift equivalent");
    for (ours, theirs) in &matching {
        println!(
            "  {ours} -> {theirs} (length {}, return time {})",
            ire.lengths().get(ours),
            induced.return_times[theirs]
        );
    }
}
