//! Writes the bundled fixtures as problem documents.
//!
//! cargo run -p supctl-core --example export_fixtures -- <dir>

use std::path::PathBuf;

use supctl_core::fixtures::{self, Fixture};
use supctl_core::format::{OptionsDoc, Problem};
use supctl_core::rational::int;

fn problem(fx: Fixture) -> Problem {
    Problem {
        plant: fx.plant,
        jobs: fx.jobs,
        options: OptionsDoc::default(),
    }
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    let serial = fixtures::serial();
    let tight = Fixture {
        jobs: serial.jobs.with_deadlines(&[int(4), int(4)]).unwrap(),
        plant: serial.plant.clone(),
    };
    let all = [
        ("job_shop", fixtures::job_shop()),
        ("serial", serial),
        ("serial_tight", tight),
        ("parallel", fixtures::parallel()),
        ("chain4", fixtures::chain4()),
        ("uc_plant", fixtures::uc_plant()),
        ("logic_conflict", fixtures::logic_conflict()),
    ];
    for (name, fx) in all {
        let path = dir.join(format!("{name}.json"));
        problem(fx).save(&path).unwrap();
        println!("wrote {}", path.display());
    }
}
