use std::fs::File;
use std::io::{self, BufWriter, Write};

use trimweight::dataset::load_csv_with;
use trimweight::estimators::Variant;
use trimweight::simulation::{format_table, run_scenario, write_rows_csv, ScenarioConfig};
use trimweight::{bootstrap_variants, fit_mle, full_pipeline, load_csv, solve_att_alpha, BootstrapConfig};
use trimweight::{Execution, Result, WeightSpec};

use crate::report::{AlphaReport, EstimateReport};
use crate::{AttAlphaArgs, CurvesArgs, EstimateArgs, SimulateArgs};

fn emit<T: serde::Serialize>(value: &T, text: impl FnOnce() -> String, pretty: bool) -> Result<()> {
    let mut out = io::stdout().lock();
    if pretty {
        out.write_all(text().as_bytes())?;
    } else {
        serde_json::to_writer(&mut out, value).map_err(io::Error::from)?;
        writeln!(out)?;
    }
    Ok(())
}

pub fn estimate(args: EstimateArgs) -> Result<()> {
    let spec = WeightSpec::from_parts(args.weight, args.alpha1, args.alpha2, args.alpha, args.epsilon)?;
    let data = load_csv(&args.data, &args.treatment, &args.outcome)?;
    let fit = full_pipeline(&data, &spec, args.augmented)?;
    let boot = if args.bootstrap > 0 {
        let config = BootstrapConfig {
            replicates: args.bootstrap,
            seed: args.seed,
            method: args.ci,
            execution: Execution::Parallel,
        };
        let variant = [Variant { spec, augmented: args.augmented }];
        bootstrap_variants(&data, &variant, &config)?.pop()
    } else {
        None
    };
    let report = EstimateReport::new(&spec, args.augmented, &fit, boot.as_ref(), args.seed);
    emit(&report, || report.to_text(), args.pretty)
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    let mut config = ScenarioConfig::new(args.design, args.outcome);
    config.n = args.n;
    config.reps = args.reps;
    config.bootstrap_b = args.bootstrap;
    config.epsilon_grid = args.epsilon_grid;
    config.alpha1 = args.alpha1;
    config.alpha2 = args.alpha2;
    config.seed = args.seed;
    let report = run_scenario(&config)?;
    if let Some(path) = &args.out {
        write_rows_csv(&report.rows, BufWriter::new(File::create(path)?))?;
    }
    let mut out = io::stdout().lock();
    if args.pretty {
        writeln!(out, "{}&{}  n={} reps={} failed={}", args.design, args.outcome, args.n, args.reps, report.failed)?;
        out.write_all(format_table(&report.rows).as_bytes())?;
    } else if args.out.is_none() {
        write_rows_csv(&report.rows, out)?;
    }
    Ok(())
}

pub fn att_alpha(args: AttAlphaArgs) -> Result<()> {
    let data = load_csv_with(&args.data, &args.treatment, args.outcome.as_deref())?;
    let scores = fit_mle(&data)?.scores;
    let solution = solve_att_alpha(&scores)?;
    let n_retained = scores.iter().filter(|&&e| 1.0 - e >= solution.alpha).count();
    let report = AlphaReport { solution, n_total: data.n(), n_retained };
    emit(&report, || report.to_text(), args.pretty)
}

pub fn curves(args: CurvesArgs) -> Result<()> {
    let specs = [
        ("indicator", WeightSpec::indicator(args.alpha1, args.alpha2)?),
        ("smooth", WeightSpec::smooth(args.alpha1, args.alpha2, args.epsilon)?),
        ("overlap", WeightSpec::overlap()),
        ("att_indicator", WeightSpec::att_indicator(args.alpha)?),
        ("att_smooth", WeightSpec::att_smooth(args.alpha, args.epsilon)?),
    ];
    let mut out = BufWriter::new(io::stdout().lock());
    let header: Vec<&str> = specs.iter().map(|s| s.0).collect();
    writeln!(out, "e,{}", header.join(","))?;
    let step = 1.0 / (args.points + 1) as f64;
    for k in 1..=args.points {
        let e = k as f64 * step;
        let values: Vec<String> = specs.iter().map(|(_, s)| s.weight(e).to_string()).collect();
        writeln!(out, "{e},{}", values.join(","))?;
    }
    out.flush()?;
    Ok(())
}
