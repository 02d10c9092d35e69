use std::time::Instant;
use tipwatch_core::arma::{fit_seeded, simulate, ArmaModel};

#[test]
#[ignore]
fn bench_fit_grid() {
    let truth = ArmaModel::new(0.0, vec![0.8], vec![], 1.0).unwrap();
    let x = simulate(&truth, 350, 42, None).unwrap();
    for (pm, qm) in [(3usize, 3usize), (5, 5)] {
        let t0 = Instant::now();
        let mut acc = 0.0;
        for p in 0..=pm {
            for q in 0..=qm {
                let f = fit_seeded(&x, p, q, 1).unwrap();
                acc += f.bic;
            }
        }
        println!("grid ({pm},{qm}): {:?}  (acc {acc:.1})", t0.elapsed());
    }
    // 20-seed AR(1) recovery
    let t0 = Instant::now();
    let mut hits = 0;
    for seed in 0..20u64 {
        let x = simulate(&truth, 2000, seed, None).unwrap();
        let f = fit_seeded(&x, 1, 0, seed).unwrap();
        if (f.model.phi[0] - 0.8).abs() <= 0.05 { hits += 1; }
    }
    println!("AR(1) recovery: {hits}/20 in {:?}", t0.elapsed());
}
