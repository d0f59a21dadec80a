use std::time::Instant;
use hecke_surfaces::center::CentralDecomposition;
use hecke_surfaces::coxeter::CoxeterSystem;

#[test]
#[ignore]
fn timing_probe() {
    for t in ["A3", "I2(5)", "B3", "H3"] {
        let w = CoxeterSystem::build(t.parse().unwrap()).unwrap();
        let t0 = Instant::now();
        match CentralDecomposition::compute(&w) {
            Ok(d) => eprintln!("{t}: {:?} ({} labels)", t0.elapsed(), d.len()),
            Err(e) => eprintln!("{t}: FAILED {:?} ({e})", t0.elapsed()),
        }
    }
}
