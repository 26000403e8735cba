//! How many generators per link keep Bell-pair production ahead of
//! verification, and what extra links buy in depth.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use clinr_sim::arch::ArchConfig;
use clinr_sim::bounds::{entanglement_sufficient, required_parallel_links};
use clinr_sim::synthetic::distributed_timeline;

fn main() -> clinr_sim::error::Result<()> {
    let (t, delta, q) = (3usize, 30u64, 0.1);
    for (n, tau) in [(20usize, 1u32), (40, 5), (80, 10)] {
        let l = required_parallel_links(t, n, tau as f64, delta as f64, q);
        println!("n = {n}, tau_e = {tau}: need L = {l}");
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let mut options = vec![1, l as usize, 2 * l as usize];
        options.dedup();
        for links in options {
            let arch = ArchConfig::for_clinr(n, t, tau).with_links(links);
            let runs = 2000;
            let mut depth = 0.0;
            let mut stalls = 0.0;
            for _ in 0..runs {
                let tl = distributed_timeline(&vec![delta; t], &vec![q; t], &arch, n, false, &mut rng)?;
                depth += tl.total_depth as f64;
                stalls += tl.stall_layers() as f64;
            }
            println!(
                "  L = {links:<2} sufficient {:<5} depth {:>7.1}  stall layers {:>6.1}",
                entanglement_sufficient(n, tau as f64, delta as f64, q, t, links),
                depth / runs as f64,
                stalls / runs as f64
            );
        }
    }
    Ok(())
}
