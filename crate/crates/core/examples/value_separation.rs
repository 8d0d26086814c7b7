//! Reporting-game values on a chain whose conditionals are exactly 1/2,
//! the induction constants, and the resulting distance bound.

use infostruct::counterexample::{alpha, build_u_l, check_ui, default_epsilon, induction_constants, verify_separation, ChainSpec};
use infostruct::value_distance;

fn main() -> infostruct::Result<()> {
    let chain = ChainSpec::new(4, vec![vec![1, 2], vec![3, 4], vec![1, 2], vec![3, 4]])?;
    let eps = default_epsilon(4);
    let ui = check_ui(&chain, 2, u128::MAX)?;
    for (l, p) in [(1, 1), (1, 2), (2, 2)] {
        let r = verify_separation(&chain, l, p, &eps, u128::MAX)?;
        // the bound is only promised when the conditions hold up to level l
        let promised = (1..=l).all(|m| ui.passes_at(m));
        println!("val(u^{l}, g^{p}) = {} ({:?} bound, met: {}, promised: {promised})", r.value, r.kind, r.meets_bound);
    }
    let d = value_distance(&build_u_l(&chain, 1)?, &build_u_l(&chain, 2)?)?.d;
    println!("d(u^1, u^2) = {d}, 2 epsilon = {}", &eps + &eps);
    let c = induction_constants(&alpha());
    println!("step constants {} / {} / {}, hold: {}", c.p2_misreport_step, c.p1_extra_signal_step, c.p1_misreport_step, c.hold());
    Ok(())
}
