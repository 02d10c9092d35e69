use tipwatch_core::scenarios::*;

#[test]
#[ignore]
fn explore_structure() {
    let params = BoxModelParams::default();
    // Equilibria at key H values
    for h in [0.0f64, -0.25, 0.24, 0.37, 0.5] {
        match find_equilibria(h, &params) {
            Ok(eq) => {
                println!("H = {h}:");
                for e in eq {
                    println!("  {:?} stable={} S_N={:.6} S_T={:.6} G={:.3}Sv eig=({:.5},{:.5}),({:.5},{:.5})",
                        e.branch, e.stable, e.s_n, e.s_t, e.gamma_flow/1e6,
                        e.eig[0].0, e.eig[0].1, e.eig[1].0, e.eig[1].1);
                }
            }
            Err(e) => println!("H = {h}: {e}"),
        }
    }
    // Hopf scan: upper-branch max real part across H
    println!("\nHopf scan:");
    let mut prev_re: Option<f64> = None;
    for i in 0..=30 {
        let h = 0.2 + 0.3 * i as f64 / 30.0;
        if let Ok(eq) = find_equilibria(h, &params) {
            if let Some(up) = eq.iter().find(|e| e.branch == BranchLabel::Upper) {
                let re = up.eig[0].0.max(up.eig[1].0);
                let complex = up.eig[0].1 != 0.0;
                if let Some(p) = prev_re {
                    if p < 0.0 && re >= 0.0 {
                        println!("  --> real part crosses 0 between H={:.3} and H={:.3}", h - 0.01, h);
                    }
                }
                println!("  H={h:.3} re={re:+.6e} complex={complex} S_N={:.5}", up.s_n);
                prev_re = Some(re);
            } else {
                println!("  H={h:.3} no upper branch");
                prev_re = None;
            }
        }
    }
}
