//! Belief partitions by order and the canonical hierarchy dump.

use infostruct::beliefs::stabilization_order;
use infostruct::fixtures::{chain, u2_prime, u2_second};
use infostruct::{belief_partition, hierarchy_distribution, hierarchy_equal, Player};

fn main() -> infostruct::Result<()> {
    let u = chain(3);
    for n in 1..=4 {
        let p1 = belief_partition(&u, Player::One, n)?;
        let p2 = belief_partition(&u, Player::Two, n)?;
        println!("order {n}: player 1 classes {:?}, player 2 classes {:?}", p1.classes, p2.classes);
    }
    println!("partitions stop refining at order {:?}", stabilization_order(&u, 12));
    println!("relabeled pair has equal hierarchies: {}", hierarchy_equal(&u2_prime(), &u2_second(), 3)?);
    println!("{}", serde_json::to_string_pretty(&hierarchy_distribution(&u2_prime(), 2)?).unwrap());
    Ok(())
}
