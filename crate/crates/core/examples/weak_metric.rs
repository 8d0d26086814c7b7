//! The fixed enumeration of payoff structures and the weak distance bracket.

use infostruct::fixtures::{chain, trivial, two_states, u1};
use infostruct::{enumerate_payoff, value_distance, weak_distance};

fn main() -> infostruct::Result<()> {
    // size-1 games only see the prior, so the early terms cannot tell structures apart
    let first_square = (1..).find(|&n| enumerate_payoff(&two_states(), n).is_ok_and(|g| g.size() == 2)).unwrap();
    println!("first 2x2 structure is g_{first_square}");
    let w = weak_distance(&u1(), &trivial(), 40)?;
    println!("d_W(u1, trivial) in [{}, {}] from {} terms ({})", w.lower, w.upper, w.terms, w.version);
    for n in [1, 3, 6] {
        let w = weak_distance(&trivial(), &chain(n), 40)?;
        println!("chain {n}: d_W lower {} <= d {}", w.lower, value_distance(&trivial(), &chain(n))?.d);
    }
    Ok(())
}
