//! Random geometric snapshot: grid-indexed neighbor lists and degree statistics.
//!
//!     cargo run --release --example geometry_neighbors

use mobicond::conductance::fr_contact_prob;
use mobicond::geometry::{build_snapshot, sample_uniform_positions, Topology};
use mobicond::rng::stream;

fn main() -> mobicond::Result<()> {
    let n = 2000;
    let r = 0.02;
    let mut rng = stream(11, &[0]);
    let snap = build_snapshot(sample_uniform_positions(n, &mut rng)?, r)?;

    let degrees: Vec<usize> = (0..n).map(|i| snap.degree(i)).collect();
    let mean = degrees.iter().sum::<usize>() as f64 / n as f64;
    let isolated = degrees.iter().filter(|&&d| d == 0).count();
    println!("n = {n}, r = {r}, grid {0}x{0}", snap.cells_per_side());
    println!("edges            {}", snap.edge_count());
    println!("mean degree      {mean:.3} (wall-free (n-1)πr² = {:.3})", (n - 1) as f64 * fr_contact_prob(r));
    println!("isolated nodes   {isolated}");

    let first = snap.neighbors(0)?;
    println!("node 0 at ({:.3}, {:.3}) has neighbors {:?}", snap.positions()[0].x(), snap.positions()[0].y(), first);
    Ok(())
}
