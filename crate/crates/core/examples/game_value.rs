//! Values of one payoff structure under three information structures, and a
//! one-player decision problem.

use infostruct::fixtures::{chain, g_ex2, two_states, u1, u2};
use infostruct::{bayesian_value, decision_value, q, InfoStructure, PayoffStructure};

fn main() -> infostruct::Result<()> {
    let g = g_ex2();
    for (name, u) in [("complete information", u1()), ("only player 1 informed", u2()), ("signal chain", chain(3))] {
        let sol = bayesian_value(&u, &g)?;
        println!("{name:>24}: value {}", sol.value);
        for s in u.signals(infostruct::Player::One) {
            let row: Vec<String> = sol.sigma.action(s).iter().map(|(a, p)| format!("{a}:{p}")).collect();
            println!("{:>24}  player 1 on signal {s} plays {}", "", row.join(" "));
        }
    }

    // guess the state after a noisy signal that is right 3 times out of 4
    let st = two_states();
    let u0 = InfoStructure::one_player(
        st.clone(),
        [((0, 0), q(3, 8)), ((0, 1), q(1, 8)), ((1, 1), q(3, 8)), ((1, 0), q(1, 8))],
    )?;
    let guess = PayoffStructure::from_blocks(
        st,
        vec![vec![vec![q(1, 1), q(1, 1)], vec![q(-1, 1), q(-1, 1)]], vec![vec![q(-1, 1), q(-1, 1)], vec![q(1, 1), q(1, 1)]]],
    )?;
    println!("decision problem value {}", decision_value(&u0, &guess)?);
    Ok(())
}
