//! Every acceptance criterion at full scale, one line each. Exits nonzero if
//! any criterion fails.

use gbs_cli::selftest::{run_all, Scale};
use gbs_cli::{Command, RunConfig};

fn main() {
    let config = RunConfig::with_defaults(Command::Selftest { scale: Scale::Full });
    let outcomes = run_all(Scale::Full, &config);
    for o in &outcomes {
        println!("{o}");
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!(
        "acceptance: {}/{} criteria passed",
        outcomes.len() - failed.len(),
        outcomes.len()
    );
    if !failed.is_empty() {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
