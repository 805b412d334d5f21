//! Footrule coefficient of a small paired sample, plus the mid-rank variant
//! for data with ties.

use footrule::rank::{footrule_coefficient, footrule_coefficient_midrank, PairedSample};

fn main() -> footrule::Result<()> {
    let x = vec![1.2, 3.4, 2.2, 5.0, 4.1, 0.7];
    let y = vec![10.0, 31.0, 25.0, 40.0, 28.0, 12.0];
    let r = footrule_coefficient(&PairedSample::new(x, y)?)?;
    println!("n = {}, D = {}, phi = {:.5}", r.n, r.distance, r.phi);

    let reversed = PairedSample::new(vec![1.0, 2.0, 3.0], vec![3.0, 2.0, 1.0])?;
    println!(
        "reversed n = 3: phi = {}",
        footrule_coefficient(&reversed)?.phi
    );

    let tied = PairedSample::new(vec![1.0, 1.0, 2.0, 3.0], vec![4.0, 3.0, 2.0, 2.0])?;
    match footrule_coefficient(&tied) {
        Err(e) => println!("strict ranks refuse ties: {e}"),
        Ok(_) => unreachable!(),
    }
    let mid = footrule_coefficient_midrank(&tied)?;
    println!("mid-rank phi = {:.5}", mid.phi);
    Ok(())
}
