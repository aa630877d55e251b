use supctl_core::automaton::enumerate_language;
use supctl_core::jobs::job_times;
use supctl_core::synthesis::requirement_product;
use supctl_core::{derive_resources, DurationValuation};
fn main() {
    let fx = supctl_core::fixtures::job_shop();
    let rm = derive_resources(&fx.plant).unwrap();
    let gl = requirement_product(&fx.plant, &fx.jobs);
    for w in enumerate_language(&gl.automaton, 40).iter() {
        let t = job_times(&fx.plant, &rm, &fx.jobs, w, DurationValuation::base(&fx.plant)).unwrap();
        println!("{} {}  {}", t[0], t[1], fx.plant.events().format_word(w));
    }
}
