use hybridsom_core::config::CompareConfig;
use hybridsom_core::data::{gen_synthetic, prepare_splits, split};
use hybridsom_core::eval::compare;
use hybridsom_core::lvq::PushbackMode;

fn run(cfg: &CompareConfig, name: &str) {
    let mut totals = std::collections::BTreeMap::new();
    for seed in 0..20u64 {
        let ds = gen_synthetic(2, 200, 12, 0.3, 0.6, seed).unwrap();
        let (train, check) = split(&ds, 0.25, seed).unwrap();
        let (pt, pc, _, _) = prepare_splits(&train, &check, true).unwrap();
        let (reports, _) = compare(&pt, &pc, cfg, &[seed]).unwrap();
        for r in &reports {
            let e = totals.entry(r.method.clone()).or_insert((0.0, 0.0, 0));
            e.0 += r.train_error;
            e.1 += r.check_error;
            e.2 += 1;
        }
    }
    print!("{name:>34}: ");
    for (m, (_tr, ch, n)) in &totals {
        print!("{m} {:>5.2}%  ", ch / *n as f64);
    }
    println!();
}

fn all_alpha(cfg: &mut CompareConfig, alpha: f64) {
    cfg.hybrid.alpha = alpha;
    cfg.som.alpha = alpha;
    cfg.lvq.alpha = alpha;
}

fn main() {
    let base = CompareConfig::default();

    let mut c = base.clone();
    all_alpha(&mut c, 0.99);
    run(&c, "all alpha 0.99, equidistant");

    c = base.clone();
    all_alpha(&mut c, 0.99);
    c.hybrid.pushback_mode = PushbackMode::FixedEta;
    run(&c, "all alpha 0.99, fixed_eta");

    c = base.clone();
    all_alpha(&mut c, 0.95);
    run(&c, "all alpha 0.95, equidistant");

    c = base.clone();
    all_alpha(&mut c, 0.95);
    c.hybrid.pushback_mode = PushbackMode::FixedEta;
    run(&c, "all alpha 0.95, fixed_eta");

    c = base.clone();
    all_alpha(&mut c, 0.9);
    run(&c, "all alpha 0.9, equidistant");

    c = base.clone();
    all_alpha(&mut c, 0.999);
    run(&c, "all alpha 0.999, equidistant");
}
