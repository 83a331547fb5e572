//! Compute the first return map of a circle rotation onto a union of arcs,
//! then read the dual scheme off the return times.

use ire::circle::{
    default_max_time, dual_from_return_map, first_return_map, ArcUnion, CircleRotation,
};
use ire::cli::format_scheme;
use ire::exact::{rat, ratio};

fn main() {
    // A circle of length 9 turned by 4, projected onto [-1, 8); the single
    // arc [-1, 2) induces a two-interval exchange with lengths (1, 2).
    let rotation = CircleRotation::new(rat(9), rat(4), rat(-1)).unwrap();
    let arcs = ArcUnion::new(&rotation, &[(rat(-1), rat(2))]).unwrap();
    report(&rotation, &arcs);

    // A denser example: rotation number 355/1130 on two arcs.
    let rotation = CircleRotation::new(rat(1), ratio(355, 1130), rat(0)).unwrap();
    let arcs = ArcUnion::new(
        &rotation,
        &[(ratio(1, 10), ratio(3, 10)), (ratio(6, 10), ratio(7, 10))],
    )
    .unwrap();
    report(&rotation, &arcs);
}

fn report(rotation: &CircleRotation, arcs: &ArcUnion) {
    println!("{rotation}");
    println!("{arcs}");
    let horizon = default_max_time(rotation, arcs);
    match first_return_map(rotation, arcs, horizon) {
        Ok(res) => {
            println!("induced exchange: {}", format_scheme(res.ire.scheme()));
            let times: Vec<String> = res
                .return_times
                .iter()
                .map(|(l, t)| format!("{l}={t}"))
                .collect();
            println!("return times: {}", times.join(" "));
            match dual_from_return_map(&res) {
                Ok((dual, k)) => {
                    println!("dual scheme: {}", format_scheme(&dual));
                    let ks: Vec<String> = k.iter().map(|(l, v)| format!("{l}={v}")).collect();
                    println!("dual lengths (the return times): {}", ks.join(" "));
                }
                Err(e) => println!("dual unavailable: {e}"),
            }
        }
        Err(e) => println!("no return map within horizon {horizon}: {e}"),
    }
    println!();
}
