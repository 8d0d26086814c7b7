//! Distances between small structures, with the optimal garblings and a
//! payoff structure that attains the gap.

use infostruct::fixtures::{u2, u2_prime, u4, u_max, u_min};
use infostruct::{bayesian_value, q, value_distance, witness_payoff};

fn main() -> infostruct::Result<()> {
    let (a, b, c) = (u2(), u2_prime(), u4());
    let r = value_distance(&a, &c)?;
    println!("d(u2, u4) = {}  (deviations {} and {})", r.d, r.forward.delta, r.backward.delta);
    println!("d(u2', u4) = {}", value_distance(&b, &c)?.d);

    let g = witness_payoff(&c, &a)?;
    let gap = bayesian_value(&a, &g)?.value - bayesian_value(&c, &g)?.value;
    println!("witness payoff gains {gap} by moving from u4 to u2");

    for p in [q(1, 2), q(3, 5), q(9, 10)] {
        let prior = vec![p.clone(), q(1, 1) - &p];
        let d = value_distance(&u_max(&prior), &u_min(&prior))?.d;
        println!("prior ({}, {}): d(player 1 informed, player 2 informed) = {d}", prior[0], prior[1]);
    }
    Ok(())
}
