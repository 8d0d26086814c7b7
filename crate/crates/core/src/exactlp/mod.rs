//! Exact rationals and a simplex solver built on them.

mod lp;
mod rational;

pub use lp::{
    lp_solve, Bound, Constraint, FarkasCertificate, LinearProgram, LpOutcome, LpSolution, Relation, Sense,
    UnboundedRay,
};
pub use rational::{q, ParseRationalError, Rational};

use crate::error::{Error, Result};

/// Value of a finite zero-sum matrix game (row player maximizes) with optimal
/// mixed strategies for both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixGameSolution {
    pub value: Rational,
    pub row_strategy: Vec<Rational>,
    pub col_strategy: Vec<Rational>,
}

pub fn matrix_game_value(m: &[Vec<Rational>]) -> Result<MatrixGameSolution> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(Error::structural("matrix game needs at least one row and one column"));
    }
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::structural("matrix game rows have different lengths"));
    }
    // Variables: row mixture p_0..p_{rows-1}, then the guaranteed value v.
    let mut obj = vec![Rational::ZERO; rows + 1];
    obj[rows] = Rational::ONE;
    let mut lp = LinearProgram::new(Sense::Maximize, obj);
    lp.set_bound(rows, Bound::free());
    for j in 0..cols {
        let mut row: Vec<Rational> = m.iter().map(|r| -&r[j]).collect();
        row.push(Rational::ONE);
        lp.add_constraint(row, Relation::Le, Rational::ZERO);
    }
    let mut simplex = vec![Rational::ONE; rows];
    simplex.push(Rational::ZERO);
    lp.add_constraint(simplex, Relation::Eq, Rational::ONE);

    let sol = match lp_solve(&lp)? {
        LpOutcome::Optimal(s) => s,
        other => return Err(Error::Certification(format!("matrix game LP did not solve: {other:?}"))),
    };
    let out = MatrixGameSolution {
        value: sol.value,
        row_strategy: sol.primal[..rows].to_vec(),
        col_strategy: sol.dual[..cols].to_vec(),
    };
    check_guarantees(m, &out)?;
    Ok(out)
}

fn check_guarantees(m: &[Vec<Rational>], s: &MatrixGameSolution) -> Result<()> {
    let is_mixed = |p: &[Rational]| p.iter().all(|x| !x.is_negative()) && p.iter().sum::<Rational>() == Rational::ONE;
    if !is_mixed(&s.row_strategy) || !is_mixed(&s.col_strategy) {
        return Err(Error::Certification("matrix game strategies are not distributions".into()));
    }
    for j in 0..s.col_strategy.len() {
        let payoff: Rational = m.iter().zip(&s.row_strategy).map(|(r, p)| &r[j] * p).sum();
        if payoff < s.value {
            return Err(Error::Certification(format!("row strategy guarantees less than the value against column {j}")));
        }
    }
    for (i, r) in m.iter().enumerate() {
        let payoff: Rational = r.iter().zip(&s.col_strategy).map(|(a, y)| a * y).sum();
        if payoff > s.value {
            return Err(Error::Certification(format!("column strategy concedes more than the value to row {i}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect()).collect()
    }

    #[test]
    fn matching_pennies() {
        let s = matrix_game_value(&mat(&[&[1, -1], &[-1, 1]])).unwrap();
        assert_eq!(s.value, Rational::ZERO);
        assert_eq!(s.row_strategy, vec![q(1, 2), q(1, 2)]);
        assert_eq!(s.col_strategy, vec![q(1, 2), q(1, 2)]);
    }

    #[test]
    fn one_by_one() {
        for c in [q(-7, 3), Rational::ZERO, q(5, 2)] {
            let s = matrix_game_value(&[vec![c.clone()]]).unwrap();
            assert_eq!(s.value, c);
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let (a, b, c, d) = (3i64, -1i64, -2i64, 4i64);
        let closed = q(a * d - b * c, a + d - b - c);
        let s = matrix_game_value(&mat(&[&[a, b], &[c, d]])).unwrap();
        assert_eq!(s.value, closed);
        assert_eq!(s.value, Rational::ONE);
        assert_eq!(s.row_strategy, vec![q(3, 5), q(2, 5)]);
        assert_eq!(s.col_strategy, vec![q(1, 2), q(1, 2)]);
    }

    #[test]
    fn empty_and_ragged_rejected() {
        assert!(matrix_game_value(&[]).is_err());
        assert!(matrix_game_value(&[vec![]]).is_err());
        assert!(matrix_game_value(&mat(&[&[1, 2], &[3]])).is_err());
    }

    fn arb_matrix() -> impl Strategy<Value = Vec<Vec<Rational>>> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec((-6i64..7, 1i64..4), c), r)
                .prop_map(|m| m.into_iter().map(|row| row.into_iter().map(|(n, d)| q(n, d)).collect()).collect())
        })
    }

    fn transpose_neg(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
        (0..m[0].len()).map(|j| m.iter().map(|r| -&r[j]).collect()).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn transpose_negation(m in arb_matrix()) {
            let v = matrix_game_value(&m).unwrap().value;
            let w = matrix_game_value(&transpose_neg(&m)).unwrap().value;
            prop_assert_eq!(v, -w);
        }

        #[test]
        fn adding_rows_and_columns(m in arb_matrix(), extra in proptest::collection::vec(-6i64..7, 5)) {
            let v = matrix_game_value(&m).unwrap().value;
            let mut more_rows = m.clone();
            more_rows.push(extra[..m[0].len()].iter().map(|&x| Rational::from_integer(x)).collect());
            prop_assert!(matrix_game_value(&more_rows).unwrap().value >= v);
            let mut more_cols = m.clone();
            for (i, r) in more_cols.iter_mut().enumerate() {
                r.push(Rational::from_integer(extra[i % 5]));
            }
            prop_assert!(matrix_game_value(&more_cols).unwrap().value <= v);
        }
    }
}
