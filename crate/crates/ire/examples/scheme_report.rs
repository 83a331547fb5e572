//! Parse a scheme from its two-row text and report its structure: cycles,
//! twist numbers, irreducibility, positivity, and rotationality.

use ire::cli::{format_scheme, parse_scheme};
use ire::lengths::{
    is_interval_exchange_scheme, is_positive_scheme, is_rotational, sample_positive_allowed,
};

fn main() {
    let text = "[g a d | d b] [b | a g]";
    let doc = parse_scheme(text).expect("valid scheme text");
    let s = &doc.scheme;
    println!("scheme: {}", format_scheme(s));
    for cycle in s.cycles() {
        println!("  cycle {cycle} has twist number {}", cycle.twist_number());
    }
    println!("irreducible:        {}", s.is_irreducible());
    println!("positive:           {}", is_positive_scheme(s));
    println!("interval exchange:  {}", is_interval_exchange_scheme(s));
    println!("rotational:         {}", is_rotational(s));
    let witness = sample_positive_allowed(s).expect("positive scheme");
    let entries: Vec<String> = witness.iter().map(|(l, v)| format!("{l}={v}")).collect();
    println!("positive allowed lengths: {}", entries.join(" "));
}
