use dendro::verify::{run_suite, Config, SUITES};
use std::time::Instant;

fn main() {
    let config = Config::from_env();
    let which: Vec<String> = std::env::args().skip(1).collect();
    let names: Vec<&str> = if which.is_empty() {
        SUITES.to_vec()
    } else {
        which.iter().map(|s| s.as_str()).collect()
    };
    for name in names {
        let start = Instant::now();
        match run_suite(name, &config) {
            Ok(reports) => {
                let passed = reports.iter().all(|r| r.passed());
                println!("{name}: {} in {:?}", if passed { "pass" } else { "FAIL" }, start.elapsed());
                for r in &reports {
                    for c in &r.checks {
                        if !c.passed {
                            println!("  FAILED {}::{}: {}", r.suite, c.name, c.details);
                        }
                    }
                }
            }
            Err(e) => println!("{name}: error {e} in {:?}", start.elapsed()),
        }
    }
}
