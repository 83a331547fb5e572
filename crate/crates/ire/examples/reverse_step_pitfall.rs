//! A reverse induction step can leave the rotational class: the resulting
//! scheme is still an interval exchange scheme, but its dual admits no
//! positive lengths. Forward steps never do this.

use ire::cli::{format_scheme, parse_scheme};
use ire::exact::rat;
use ire::induction::{apply_step, Direction, InductionStep, StepKind};
use ire::lengths::{cycle_system, is_rotational, FloatingIRE, LengthVector};
use ire::scheme::Label;

fn main() {
    let scheme = parse_scheme("[g a d | d b] [b | a g]").unwrap().scheme;
    let lengths: LengthVector = [("a", 1), ("b", 2), ("g", 1), ("d", 1)]
        .into_iter()
        .map(|(l, v)| (Label::new(l).unwrap(), rat(v)))
        .collect();
    let ire = FloatingIRE::new(scheme, lengths).unwrap();
    println!("scheme:     {}", format_scheme(ire.scheme()));
    println!("rotational: {}", is_rotational(ire.scheme()));

    let step = InductionStep::new(
        StepKind::Le,
        Direction::Inverse,
        Label::new("g").unwrap(),
        Label::new("a").unwrap(),
    );
    println!("applying the reverse step {step}");
    let out = apply_step(&ire, &step).unwrap();
    let lens: Vec<String> = out
        .lengths()
        .iter()
        .map(|(l, v)| format!("{l}={v}"))
        .collect();
    println!("result:     {}", format_scheme(out.scheme()));
    println!("lengths:    {}", lens.join(" "));
    println!("still an interval exchange: {}", out.is_interval_exchange());
    println!("rotational: {}", is_rotational(out.scheme()));

    println!("the dual's balance rows:");
    print!("{}", cycle_system(&out.scheme().dual()));
    println!(
        "positive dual lengths exist: {}",
        cycle_system(&out.scheme().dual())
            .positive_solution()
            .is_some()
    );
}
