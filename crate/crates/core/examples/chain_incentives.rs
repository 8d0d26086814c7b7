//! Sample small chains, check the incentive conditions exhaustively and
//! compare the conditional probabilities with their closed forms.

use infostruct::counterexample::{check_ui, niceness, sample_chain, ui_formula_crosscheck, CrosscheckScope, DEFAULT_BUDGET};

fn main() -> infostruct::Result<()> {
    let chain = sample_chain(4, 11)?;
    println!("successor sets: {:?}", (1..=4).map(|a| chain.successors(a).to_vec()).collect::<Vec<_>>());
    let s1 = chain.successors(1)[0];
    println!("niceness of (1, {s1}, {s1}): {:?}", niceness(&chain, &[1, s1, s1])?);

    let report = check_ui(&chain, 3, DEFAULT_BUDGET)?;
    for lv in &report.levels {
        println!("level {}: tested {:?}, violated {:?}, vacuous {}", lv.l, lv.tested, lv.violated, lv.vacuous);
    }

    let cross = ui_formula_crosscheck(&chain, CrosscheckScope::Exhaustive { l_max: 3 }, DEFAULT_BUDGET)?;
    println!("closed forms: {} cases, {} mismatches, by kind {:?}", cross.cases, cross.mismatches.len(), cross.by_kind);

    let big = sample_chain(20, 1)?;
    let cross = ui_formula_crosscheck(&big, CrosscheckScope::Sampled { l_max: 3, cases: 50, seed: 1 }, DEFAULT_BUDGET)?;
    println!("N = 20 sample: {} cases, {} mismatches", cross.cases, cross.mismatches.len());
    Ok(())
}
