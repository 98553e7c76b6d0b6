//! Push-pull spreading on the ring, normalized by n ln n and by n.
//!
//!     cargo run --release --example ring_benchmark

use mobicond::gossip::{ring_spreading_time, SpreadConfig};

fn main() -> mobicond::Result<()> {
    println!("{:>5} {:>6} {:>10} {:>8}", "n", "t_spr", "t/(n ln n)", "t/n");
    for n in [16usize, 32, 64, 128, 256, 512] {
        let res = ring_spreading_time(n, 0.01, 300, &SpreadConfig::default(), 3)?;
        let t = res.t_spr.expect("the ring always completes") as f64;
        let nf = n as f64;
        println!("{n:>5} {t:>6} {:>10.4} {:>8.4}", t / (nf * nf.ln()), t / nf);
    }
    Ok(())
}
