use tipwatch_core::scenarios::*;

#[test]
#[ignore]
fn explore_r_tipping() {
    let params = BoxModelParams::default();
    let mut saddle: Vec<(f64, f64)> = Vec::new();
    for i in 0..=100 {
        let h = 0.5 * i as f64 / 100.0;
        if let Ok(eq) = find_equilibria(h, &params) {
            if let Some(e) = eq.iter().find(|e| e.branch == BranchLabel::Unstable) {
                saddle.push((h, e.s_n));
            }
        }
    }
    let sad_at = |h: f64| -> f64 {
        saddle.iter().min_by(|a, b| (a.0 - h).abs().partial_cmp(&(b.0 - h).abs()).unwrap()).unwrap().1
    };
    for t_fall in [200.0, 240.0, 280.0, 320.0, 400.0] {
        let mut sc = presets::parse_scenario(presets::PRESET_R_TIP).unwrap();
        sc.t_fall = t_fall;
        sc.noise_amplitude = 0.0;
        let traj = integrate(&sc, &params).unwrap();
        let mut cross_t = None;
        for i in 0..traj.len() {
            if traj.s_n[i] < sad_at(traj.h[i]) { cross_t = Some(traj.t[i]); break; }
        }
        let n = traj.len();
        let mean_end: f64 = traj.s_n[n-500..].iter().sum::<f64>() / 500.0;
        let samples: Vec<String> = [300.0, 500.0, 600.0, 700.0, 800.0, 1000.0].iter()
            .map(|&tq| { let i = (tq / 0.2) as usize; format!("S({tq:.0})={:.4}", traj.s_n[i]) }).collect();
        println!("t_fall={t_fall}: cross={cross_t:?} end_mean={mean_end:.4} | {}", samples.join(" "));
    }
}
