//! Word search over `{T, W}` for single-qubit targets, and how a word is
//! placed onto matchgates.

use mgs::approx::{map_word, su2_search, PlanarRotation, SearchConfig, Su2, Su2Word};

fn main() -> mgs::Result<()> {
    let cfg = SearchConfig::default();
    for (label, target) in [("Rz(π/4)", Su2::rz(std::f64::consts::FRAC_PI_4)), ("Rz(0.3)", Su2::rz(0.3)), ("Rx(1.1)", Su2::rx(1.1))] {
        for eps in [1e-1, 1e-2] {
            let (w, err) = su2_search(&target, eps, &cfg)?;
            println!("{label} eps {eps:.0e}: {} letters, T-count {}, error {err:.2e}", w.len(), w.t_count());
        }
    }
    let w = Su2Word::parse("T W Tinv")?;
    let gates = map_word(&w, &PlanarRotation { plane: 3, theta: 0.0 }, 3)?;
    let names: Vec<String> = gates.iter().map(|g| g.to_string()).collect();
    println!("'{w}' on qubit 2 of 3: {}", names.join(" "));
    match su2_search(&Su2::rz(0.3), 1e-4, &cfg) {
        Err(e) => println!("below the search floor: {e}"),
        Ok(_) => println!("unexpectedly reached 1e-4"),
    }
    Ok(())
}
