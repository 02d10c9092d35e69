use std::time::Instant;
use tipwatch_core::scenarios::*;
use tipwatch_core::upsilon::*;

#[test]
#[ignore]
fn upsilon_on_btip_noisier() {
    let t0 = Instant::now();
    let params = BoxModelParams::default();
    let mut sc = presets::parse_scenario(presets::PRESET_B_TIP).unwrap();
    sc.noise_amplitude = 1e-4;
    let traj = integrate(&sc, &params).unwrap();
    let series = traj.s_n_series();
    let mut cfg = SelectionConfig::new(350);
    cfg.p_max = 3;
    cfg.q_max = 3;
    cfg.stride = 5;
    cfg.seed = 7;
    let res = run_indicator(&series, &cfg).unwrap();
    println!("sweep in {:?}", t0.elapsed());

    let in_range = |r: &WindowResult, lo: f64, hi: f64| r.end_time >= lo && r.end_time <= hi;
    let mut pre: Vec<&WindowResult> = res.iter().filter(|r| in_range(r, 800.0, 1000.0) && r.status == WindowStatus::Ok).collect();
    let mut base: Vec<f64> = res.iter().filter(|r| in_range(r, 200.0, 600.0) && r.status == WindowStatus::Ok).map(|r| r.upsilon).collect();
    base.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let med = base[base.len()/2];
    pre.sort_by(|a, b| b.upsilon.partial_cmp(&a.upsilon).unwrap());
    println!("median ups [200,600] = {med:.6}; max ups [800,1000] = {:.4} at t={:.1}", pre[0].upsilon, pre[0].end_time);
    for r in pre.iter().take(8) {
        println!("  peak t={:.1} ups={:.4} d={} (p,q)=({},{}) base={} a10adm={} dbic0={:.1} dbic1={:.1}",
            r.end_time, r.upsilon, r.d, r.p, r.q, r.base_used, r.arma10_admissible, r.delta_bic0, r.delta_bic1);
    }
    let d_counts: Vec<usize> = (0..3).map(|d| res.iter().filter(|r| r.d == d).count()).collect();
    println!("d counts 0/1/2: {d_counts:?}");
    let n_inadm = res.iter().filter(|r| !r.arma10_admissible && r.status == WindowStatus::Ok).count();
    println!("windows with inadmissible ARMA(1,0): {n_inadm}/{}", res.len());
}
