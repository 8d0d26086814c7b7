//! Exact simplex: an optimum with duals, an infeasible system with its
//! Farkas multipliers, and a matrix game.

use infostruct::exactlp::{lp_solve, matrix_game_value, LinearProgram, LpOutcome, Relation, Sense};
use infostruct::q;

fn main() -> infostruct::Result<()> {
    // max x + y  s.t.  x + 2y <= 3,  3x + y <= 4
    let mut lp = LinearProgram::new(Sense::Maximize, vec![q(1, 1), q(1, 1)]);
    lp.add_constraint(vec![q(1, 1), q(2, 1)], Relation::Le, q(3, 1));
    lp.add_constraint(vec![q(3, 1), q(1, 1)], Relation::Le, q(4, 1));
    let out = lp_solve(&lp)?;
    out.verify(&lp).expect("certificate checks");
    if let LpOutcome::Optimal(s) = &out {
        println!("optimum {} at ({}, {}), duals ({}, {})", s.value, s.primal[0], s.primal[1], s.dual[0], s.dual[1]);
    }

    // x + y <= 1 and x + y >= 3 cannot both hold
    let mut bad = LinearProgram::new(Sense::Minimize, vec![q(0, 1), q(0, 1)]);
    bad.add_constraint(vec![q(1, 1), q(1, 1)], Relation::Le, q(1, 1));
    bad.add_constraint(vec![q(1, 1), q(1, 1)], Relation::Ge, q(3, 1));
    let out = lp_solve(&bad)?;
    out.verify(&bad).expect("certificate checks");
    if let LpOutcome::Infeasible(f) = &out {
        println!("infeasible, multipliers {:?}", f.multipliers.iter().map(|m| m.to_string()).collect::<Vec<_>>());
    }

    // matching pennies with a skew
    let m = vec![vec![q(2, 1), q(-1, 1)], vec![q(-1, 1), q(1, 1)]];
    let g = matrix_game_value(&m)?;
    println!("matrix game value {}, row strategy ({}, {})", g.value, g.row_strategy[0], g.row_strategy[1]);
    Ok(())
}
