//! Apply elementary induction steps to an interval exchange, watch the
//! lengths evolve, and replay the recorded transcript backwards.
//!
//! On the two-letter exchange the right-end crops subtract the shorter
//! length from the longer one, so a maximal forward walk runs the
//! subtractive form of Euclid's algorithm on the length pair.

use ire::cli::{format_scheme, parse_scheme};
use ire::exact::rat;
use ire::induction::{
    apply_step, replay, Direction, InductionStep, ReplayDirection, StepKind, Transcript,
    TranscriptOp,
};
use ire::lengths::{FloatingIRE, LengthVector};
use ire::scheme::Label;

fn main() {
    let scheme = parse_scheme("[a b | b a]").unwrap().scheme;
    let a = Label::new("a").unwrap();
    let b = Label::new("b").unwrap();
    let lengths: LengthVector = [(a.clone(), rat(2)), (b.clone(), rat(7))]
        .into_iter()
        .collect();
    let start = FloatingIRE::new(scheme, lengths).unwrap();
    println!("start: {}", format_scheme(start.scheme()));
    print_lengths(&start);

    // perm(b.b) = a.e, so both right-end crops at (b, a) are applicable; the
    // beginning-side crop shortens b by a, the ending-side crop shortens a
    // by b. Always pick the one that keeps lengths positive.
    let mut transcript = Transcript::new();
    let mut cur = start.clone();
    while cur.lengths().get(&a) != cur.lengths().get(&b) {
        let kind = if cur.lengths().get(&b) > cur.lengths().get(&a) {
            StepKind::Rb
        } else {
            StepKind::Re
        };
        let step = InductionStep::new(kind, Direction::Forward, b.clone(), a.clone());
        println!("applying {step}");
        cur = apply_step(&cur, &step).expect("the longer side was cropped");
        transcript.push(TranscriptOp::Step(step));
        print_lengths(&cur);
    }
    println!("lengths are equal; no further forward crop keeps them positive");

    let back = replay(&cur, &transcript, ReplayDirection::Backward).unwrap();
    assert_eq!(back, start);
    println!("backward replay reproduces the start exactly");
    println!("transcript:\n{transcript}");
}

fn print_lengths(ire: &FloatingIRE) {
    let entries: Vec<String> = ire
        .lengths()
        .iter()
        .map(|(l, v)| format!("{l}={v}"))
        .collect();
    println!("  lengths: {}", entries.join(" "));
}
