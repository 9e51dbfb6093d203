//! Depth-optimal synthesis by SAT: a binary search over the depth with the
//! builtin solver, run on a small planted target.

use mgs::satenc::search::{search_depth, SearchOptions};
use mgs::somat::{eval_product, GateKind::*, GeneratorId};

fn main() -> mgs::Result<()> {
    let planted = [
        GeneratorId::new(Ttil, 1),
        GeneratorId::new(Rtil, 1),
        GeneratorId::new(TtilInv, 2),
        GeneratorId::new(Stil, 1),
        GeneratorId::new(Ttil, 2),
    ];
    let q = eval_product(2, &planted)?;
    println!("planted word of length {} (k_max {})", planted.len(), q.k_max());

    let rec = search_depth(&q, 8, &SearchOptions { jobs: 2, ..SearchOptions::default() })?;
    for (d, st) in &rec.probes {
        println!("  depth {d}: {}", st.name());
    }
    if let Some((d, c)) = &rec.best {
        let proven = if rec.optimal == Some(*d) { "proven optimal" } else { "not proven optimal" };
        println!("best depth {d} ({proven}), T-count {}", c.t_count());
        for (i, layer) in c.layers.iter().enumerate() {
            let names: Vec<String> = layer.iter().map(|g| g.to_string()).collect();
            println!("  layer {}: {}", i + 1, names.join(" "));
        }
    }
    Ok(())
}
