use supctl_core::delayopt::{optimize_delays_for, DelayOptions};
use supctl_core::jobs::job_times;
use supctl_core::synthesis::sup_c;
use supctl_core::{derive_resources, DurationValuation, FiniteLanguage};

fn main() {
    let fx = supctl_core::fixtures::job_shop();
    let rm = derive_resources(&fx.plant).unwrap();
    let k = sup_c(&fx.plant, &rm, &fx.jobs, DurationValuation::base(&fx.plant)).unwrap();
    let lang = k.language.clone().unwrap();
    let ev = fx.plant.events();
    for w in lang.iter() {
        let t = job_times(&fx.plant, &rm, &fx.jobs, w, DurationValuation::base(&fx.plant)).unwrap();
        if t[0] != supctl_core::rational::int(17) {
            continue;
        }
        let l = FiniteLanguage::singleton(w.clone());
        let opt = optimize_delays_for(&fx.plant, &rm, &fx.jobs, &l, DelayOptions::default()).unwrap();
        println!("s5 = {}\ne* = {} regions = {}", ev.format_word(w), opt.e_star, opt.regions.len());
        for r in &opt.regions {
            let s: Vec<String> = r
                .witness
                .support()
                .iter()
                .map(|(t, v)| format!("{}={}", ev.name(fx.plant.transition(*t).event), v))
                .collect();
            println!("  witness {}", s.join(" "));
        }
    }
}
