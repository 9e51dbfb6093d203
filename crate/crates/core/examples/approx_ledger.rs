//! Approximate synthesis of Haar-random SO(2n) targets and the local vs
//! global error ledger, written as CSV to stdout.

use mgs::approx::{approx_synthesize, write_ledger, SearchConfig};
use mgs::targets::random_haar_so;

fn main() -> mgs::Result<()> {
    let cfg = SearchConfig::default();
    let mut rows = Vec::new();
    for n in 2..=4 {
        for seed in 0..2 {
            let q = random_haar_so(n, seed);
            let res = approx_synthesize(&q, 0.25 * n as f64, &cfg)?;
            eprintln!("n={n} seed={seed}: {} rotations, {} gates, T-count {}", res.ledger.m, res.circuit.gate_count(), res.circuit.t_count());
            rows.push(res.ledger);
        }
    }
    write_ledger(std::io::stdout(), &rows)
}
