//! An optimal strategy for one structure, moved through a garbling to a
//! nearby structure, loses at most twice their distance.

use infostruct::fixtures::{ex4_q1, g_ex4, u2, u4};
use infostruct::{bayesian_value, best_response_value, transfer_strategy, value_distance, Rational};

fn main() -> infostruct::Result<()> {
    let (near, far, g) = (u2(), u4(), g_ex4());
    let sigma = bayesian_value(&near, &g)?.sigma;
    let moved = transfer_strategy(&sigma, &ex4_q1());
    let d = value_distance(&far, &near)?.d;
    let value = bayesian_value(&far, &g)?.value;
    let guaranteed = best_response_value(&far, &g, &moved)?;
    println!("value on u4 {value}, transferred strategy guarantees {guaranteed}, distance {d}");
    println!("loss {} <= 2d = {}", &value - &guaranteed, Rational::from_integer(2) * &d);
    Ok(())
}
