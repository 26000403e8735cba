//! Step the link scheduler by hand and dump its per-layer trace.

use clinr_sim::arch::{ArchConfig, World};

fn main() -> clinr_sim::error::Result<()> {
    let n = 4;
    let ready_at = vec![6, 2, 9];
    let arch = ArchConfig::for_clinr(n, ready_at.len(), 3);
    let timeline = World::new(arch, n, ready_at)?.with_trace().run()?;

    for tr in &timeline.transfers {
        println!(
            "{:?} on link {}: layers {}..{} ({} stalled), CX layers {:?}",
            tr.kind, tr.link, tr.start, tr.end, tr.stall_layers, tr.cx_layers
        );
    }
    println!("total depth {}, pairs consumed {}", timeline.total_depth, timeline.pairs_consumed());
    for l in &timeline.links {
        println!(
            "link {:?}: generated {} consumed {} stored {} discarded {}",
            l.endpoints, l.generated, l.consumed, l.available, l.discarded
        );
    }

    println!("first layers of the trace:");
    let mut buf = Vec::new();
    timeline.write_trace(&mut buf)?;
    for line in String::from_utf8_lossy(&buf).lines().take(5) {
        println!("  {line}");
    }
    Ok(())
}
