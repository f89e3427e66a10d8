//! Prints the Monte Carlo summary table for every propensity/outcome design
//! pair. Usage: `cargo run --release --example scenarios -- [reps] [bootstrap_b] [seed]`.

use std::time::Instant;

use trimweight::simulation::{format_table, run_scenario, OutcomeDesign, PropensityDesign, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let reps = args.first().copied().unwrap_or(1000) as usize;
    let b = args.get(1).copied().unwrap_or(100) as usize;
    let seed = args.get(2).copied().unwrap_or(7);

    let scenarios = [
        ("i", OutcomeDesign::O1, PropensityDesign::P1),
        ("ii", OutcomeDesign::O1, PropensityDesign::P2),
        ("iii", OutcomeDesign::O1, PropensityDesign::P3),
        ("iv", OutcomeDesign::O1, PropensityDesign::P4),
        ("v", OutcomeDesign::O2, PropensityDesign::P1),
        ("vi", OutcomeDesign::O2, PropensityDesign::P2),
        ("vii", OutcomeDesign::O2, PropensityDesign::P3),
        ("viii", OutcomeDesign::O2, PropensityDesign::P4),
    ];
    for (name, outcome, propensity) in scenarios {
        let mut config = ScenarioConfig::new(propensity, outcome);
        config.reps = reps;
        config.bootstrap_b = b;
        config.seed = seed;
        let start = Instant::now();
        let report = run_scenario(&config)?;
        println!(
            "scenario {name} ({outcome}&{propensity}), {} replications, {} failed, {:.1}s",
            report.replications.len(),
            report.failed,
            start.elapsed().as_secs_f64()
        );
        println!("{}", format_table(&report.rows));
    }
    Ok(())
}
