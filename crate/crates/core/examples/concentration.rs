//! Tail frequencies of the overlap statistics against their exponential
//! bounds, the overlap event on a small chain, and the factorial bounds.

use infostruct::counterexample::{event_e_check, hoeffding_experiment, sample_chain, stirling_check};
use infostruct::q;

fn main() -> infostruct::Result<()> {
    let r = hoeffding_experiment(64, &q(1, 4), 2000, 0)?;
    println!("N = 64, gamma = 1/4, {} trials (scaled bound applies: {})", r.trials, r.scaled_regime);
    for row in &r.rows {
        println!("  {:>16}: frequency {:.4}  bound {:.3e}  within {}", row.statistic, row.frequency.to_f64(), row.bound, row.within);
    }
    let e = event_e_check(&sample_chain(8, 0)?, 50_000_000, 0)?;
    println!("overlap event at N = 8: holds {}, {} of {} ratio checks off band", e.holds, e.ratio_violations, e.ratio_checks);
    println!("factorial bounds hold for n <= 30: {}", stirling_check(30).iter().all(|s| s.lower && s.upper));
    Ok(())
}
