// Temporary probe (will be replaced by the real suites).
use etcsim_core::*;

#[test]
fn probe_chatter() {
    let t_start = std::time::Instant::now();
    let p = ChatterParams::default();
    let model = build_chatter_model(&p).unwrap();
    let cert = build_chatter_certificate(&p).unwrap();
    let trig = build_chatter_trigger();
    let cfg = IntegratorConfig::default();
    let res = simulate(&model, &trig, &cert, &cfg).unwrap();
    println!("sim time: {:?}", t_start.elapsed());
    println!("events: {}", res.events.update_count());
    println!("min gap: {:?}", res.events.min_gap());
    println!("final norm: {}", res.final_norm());
    println!("records: {}", res.records.len());
    println!("sup norm: {}", res.sup_norm());
    let enf = enforcement_check(&res, &trig, 1e-6).unwrap();
    println!("max residual: {:.3e} at {}", enf.max_residual, enf.at_time);
    let dec = decrease_check(&cert, &res, 0.02).unwrap();
    println!(
        "decrease: {} violations, worst excess {:.3e} at {}",
        dec.violations, dec.worst_excess, dec.worst_t
    );
    let t_lip = std::time::Instant::now();
    let (consts, est) = compute_bound_constants(
        &model,
        &trig,
        &cert,
        60.0,
        1.0,
        &LipschitzSpec::sampled(20_000),
        XiPolicy::HalfB,
        42,
    )
    .unwrap();
    println!("lipschitz time: {:?}", t_lip.elapsed());
    println!("consts: {consts:#?}");
    if let Some(e) = est {
        println!("est: l2_raw {} l3_raw {} p95 {} {}", e.l2_raw, e.l3_raw, e.l2_p95, e.l3_p95);
    }
    let env = envelope_check(&res, &consts, &cert.alpha1).unwrap();
    println!("envelope: sound={} worst_ratio={} at {}", env.sound, env.worst_ratio, env.worst_t);
    let zb = zeno_bound_tstar(&consts, trig.a, trig.b, 60.0).unwrap();
    println!("tstar: {:.6e}, g0 {:.6e}", zb.tstar, zb.g_at_zero);
    println!("eps consistency: {:.3e}", res.eps_consistency_max().unwrap());
    println!("total: {:?}", t_start.elapsed());

    let t2 = std::time::Instant::now();
    let resc = simulate_continuous(&model, &cfg).unwrap();
    println!("continuous final norm: {} ({:?})", resc.final_norm(), t2.elapsed());

    // Step-halved event agreement.
    let cfg2 = IntegratorConfig { h: 0.0025, ..cfg };
    let res2 = simulate(&model, &trig, &cert, &cfg2).unwrap();
    println!("halved events: {}", res2.events.update_count());
    if res.events.update_count() == res2.events.update_count() {
        let worst = res
            .events
            .times()
            .iter()
            .zip(res2.events.times())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        println!("worst event-time shift: {:.3e}", worst);
        for (i, (a, b)) in res.events.times().iter().zip(res2.events.times()).enumerate() {
            if (a - b).abs() > 1e-9 {
                println!("  event {i}: t={a:.6} shift {:.3e}", (a - b).abs());
            }
        }
    }
    for &t in &[1.0, 5.0, 10.0, 30.0, 59.0] {
        let d = res
            .history
            .interpolate(t)
            .unwrap()
            .dist(&res2.history.interpolate(t).unwrap());
        println!("state diff at t={t}: {d:.3e}");
    }
    // Tighter event tolerance: does the shift collapse?
    let tight = |h: f64| IntegratorConfig {
        h,
        event_time_tol: 1e-12,
        zeno_floor: 1e-7,
        ..cfg
    };
    let ca = simulate_continuous(&model, &tight(0.005)).unwrap();
    let cb = simulate_continuous(&model, &tight(0.0025)).unwrap();
    for &t in &[1.0, 5.0, 10.0, 30.0] {
        let d = ca
            .history
            .interpolate(t)
            .unwrap()
            .dist(&cb.history.interpolate(t).unwrap());
        println!("continuous state diff at t={t}: {d:.3e}");
    }
    let ra = simulate(&model, &trig, &cert, &tight(0.005)).unwrap();
    let rb = simulate(&model, &trig, &cert, &tight(0.0025)).unwrap();
    for &t in &[0.5, 1.0, 2.0, 3.0, 5.0] {
        let d = ra
            .history
            .interpolate(t)
            .unwrap()
            .dist(&rb.history.interpolate(t).unwrap());
        println!("triggered(tight) state diff at t={t}: {d:.3e}");
    }

    // Intrinsic sensitivity of the event map: same grid, perturbed start.
    let model_p =
        build_chatter_model_with_initial(&p, Box::new(|_| vec![1.0 + 1e-12, 2.0])).unwrap();
    let rp = simulate(&model_p, &trig, &cert, &tight(0.005)).unwrap();
    if rp.events.update_count() == ra.events.update_count() {
        for i in [1, 2, 4, 8, 12, 20, 30, 44] {
            let d = (ra.events.times()[i] - rp.events.times()[i]).abs();
            println!("perturbed 1e-12: event {i} shift {d:.3e}");
        }
    } else {
        println!(
            "perturbed event count differs: {} vs {}",
            rp.events.update_count(),
            ra.events.update_count()
        );
    }
    println!(
        "tight tol events: {} vs {}",
        ra.events.update_count(),
        rb.events.update_count()
    );
    if ra.events.update_count() == rb.events.update_count() {
        let worst = ra
            .events
            .times()
            .iter()
            .zip(rb.events.times())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        println!("tight tol worst shift: {worst:.3e}");
    }
}
