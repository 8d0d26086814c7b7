//! Order comparisons with their garbling certificates.

use infostruct::fixtures::{trivial, u1, u2, u2_prime, u2_relabeled, u4};
use infostruct::{compare, InfoStructure};

fn show(name: &str, u: &InfoStructure, v: &InfoStructure) -> infostruct::Result<()> {
    let c = compare(u, v)?;
    println!(
        "{name:>18}: {:?} (deviations {} / {}), {} witnesses, verified {}",
        c.direction,
        c.deviation_uv,
        c.deviation_vu,
        c.witnesses.len(),
        c.verify(u, v)
    );
    Ok(())
}

fn main() -> infostruct::Result<()> {
    show("u2 vs u4", &u2(), &u4())?;
    show("u2 vs relabeled", &u2(), &u2_relabeled())?;
    show("u2 vs u2'", &u2(), &u2_prime())?;
    show("complete vs none", &u1(), &trivial())?;
    Ok(())
}
