//! Batch command-line front end for `trawlkit`.
//!
//! [`run`] parses the arguments, executes one subcommand and returns the
//! process exit code: 0 on success, 2 on usage or configuration errors and
//! 1 when a computation fails. Errors are reported as one JSON line on
//! standard error.

pub mod args;
pub mod config;
pub mod output;
pub mod svg;

use std::path::Path;

use clap::Parser;
use serde::Serialize;
use trawlkit::asymptotics::{asymptotic_covariances, check_clt_assumptions};
use trawlkit::estimators::{
    gmm_fit, mom_exp_known_tau, mom_supgamma_known_tau, supgamma_acf_prefit, GmmFamily, GmmSpec, MomFitResult,
};
use trawlkit::io::{load_csv, split_series_at, Column, ColumnSpec, TimeSeriesFile, Timestamp};
use trawlkit::moments::sample_acf;
use trawlkit::slicesim::{compute_slices, simulate_replicates, SimConfig};
use trawlkit::{Acf, Error, Result, TrawlFunction};

use args::{Cli, Command, FitCommand, InputArgs, MomArgs};
use output::{num, param_row, Out, PARAM_HEADER};
use svg::{line_chart, Series};

#[derive(Serialize)]
struct ErrorLine<'a> {
    status: &'a str,
    kind: &'a str,
    message: String,
    exit_code: i32,
}

fn report_error(kind: &str, message: &str, code: i32) -> i32 {
    let line = ErrorLine { status: "error", kind, message: message.replace('\n', " ").trim().to_string(), exit_code: code };
    eprintln!("{}", serde_json::to_string(&line).unwrap_or_else(|_| format!("{{\"status\":\"error\",\"exit_code\":{code}}}")));
    code
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let argv = match config::expand(argv) {
        Ok(a) => a,
        Err(e) => return report_error(e.kind(), &e.to_string(), 2),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 };
            }
            return report_error("usage", &e.to_string(), 2);
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let code = if matches!(e, Error::Config(_)) { 2 } else { 1 };
            report_error(e.kind(), &e.to_string(), code)
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    let out = Out::new(&cli.out_dir, cli.plot)?;
    match &cli.command {
        Command::Simulate(a) => {
            config::write_resolved(&out.dir, "simulate", cli, a)?;
            simulate(cli, a, &out)
        }
        Command::Slices(a) => {
            config::write_resolved(&out.dir, "slices", cli, a)?;
            slices(a, &out)
        }
        Command::Acf(a) => {
            config::write_resolved(&out.dir, "acf", cli, a)?;
            acf(a, &out)
        }
        Command::Asymvar(a) => {
            config::write_resolved(&out.dir, "asymvar", cli, a)?;
            asymvar(a, &out)
        }
        Command::Fit(FitCommand::MomExp(a)) => {
            config::write_resolved(&out.dir, "fit mom-exp", cli, a)?;
            fit_mom(a, None, &out)
        }
        Command::Fit(FitCommand::MomSupgamma(a)) => {
            config::write_resolved(&out.dir, "fit mom-supgamma", cli, a)?;
            fit_mom(&a.mom, Some(a.alpha), &out)
        }
        Command::Fit(FitCommand::Gmm(a)) => {
            config::write_resolved(&out.dir, "fit gmm", cli, a)?;
            fit_gmm(cli, a, &out)
        }
        Command::Report(a) => {
            config::write_resolved(&out.dir, "report", cli, a)?;
            report(a, &out)
        }
    }
}

fn simulate(cli: &Cli, a: &args::SimulateArgs, out: &Out) -> Result<()> {
    let model = a.model.model(a.n)?;
    if a.replicates == 0 {
        return Err(Error::Config("--replicates must be at least 1".into()));
    }
    let mut cfg = SimConfig::new(a.n).min_slice_fraction(a.min_slice_fraction);
    if let Some(b) = a.burn_in {
        cfg = cfg.burn_in(b);
    }
    let paths = simulate_replicates(&model, &cfg, cli.seed, a.replicates)?;
    let path = if a.replicates == 1 {
        let p = &paths[0];
        out.csv("simulate.csv", &["t", "value"], p.times().into_iter().zip(&p.values).map(|(t, v)| vec![num(t), num(*v)]))?
    } else {
        let rows = paths.iter().flat_map(|p| {
            p.times()
                .into_iter()
                .zip(p.values.clone())
                .map(move |(t, v)| vec![p.replicate.to_string(), num(t), num(v)])
        });
        out.csv("simulate.csv", &["replicate", "t", "value"], rows)?
    };
    let first = &paths[0];
    out.svg(
        "simulate.svg",
        &line_chart(
            &format!("{model}"),
            "t",
            "Y",
            &[Series::line("replicate 0", first.times().into_iter().zip(first.values.iter().copied()).collect())],
        ),
    )?;
    println!("wrote {} path(s) of {} points to {}", paths.len(), first.values.len(), path.display());
    Ok(())
}

fn slices(a: &args::SlicesArgs, out: &Out) -> Result<()> {
    let g: TrawlFunction = a.trawl.parse()?;
    let s = compute_slices(&g, a.n, a.delta)?;
    let n = a.n;
    let rows = (1..=n + 1).flat_map(|i| (1..=n + 2 - i).map(move |j| (i, j))).map(|(i, j)| {
        vec![i.to_string(), j.to_string(), num(s.get(i, j))]
    });
    let path = out.csv("slices.csv", &["row", "column", "measure"], rows)?;
    println!("wrote slice measures for n = {n}, Δ = {} to {}", a.delta, path.display());
    Ok(())
}

fn load(input: &InputArgs) -> Result<TimeSeriesFile> {
    let spec = ColumnSpec {
        time: input.date_col.parse::<Column>().unwrap_or(Column::Index(0)),
        value: input.value_col.parse::<Column>().unwrap_or(Column::Index(1)),
        delta: input.delta,
    };
    let (ts, report) = load_csv(&input.input, &spec)?;
    if !report.is_clean() {
        eprint!("{report}");
    }
    Ok(ts)
}

fn acf_of(ts: &TimeSeriesFile, lags: usize, centered: bool) -> Result<Acf> {
    if ts.len() < 3 {
        return Err(Error::DegenerateSeries(format!("series of length {} is too short", ts.len())));
    }
    sample_acf(&ts.values, ts.delta, lags.min(ts.len() - 1), centered)
}

fn acf(a: &args::AcfArgs, out: &Out) -> Result<()> {
    let ts = load(&a.input)?;
    let acf = acf_of(&ts, a.lags, !a.uncentered)?;
    let rows = acf
        .values
        .iter()
        .enumerate()
        .map(|(l, v)| vec![l.to_string(), num(l as f64 * acf.delta), num(*v)]);
    let path = out.csv("acf.csv", &["lag", "t", "acf"], rows)?;
    let pts = acf.values.iter().enumerate().map(|(l, v)| (l as f64 * acf.delta, *v)).collect();
    out.svg("acf.svg", &line_chart("sample autocorrelation", "t", "acf", &[Series::points("sample", pts)]))?;
    println!("n = {}, Δ = {}, lags 0..={} written to {}", ts.len(), acf.delta, acf.max_lag(), path.display());
    Ok(())
}

fn asymvar(a: &args::AsymvarArgs, out: &Out) -> Result<()> {
    let model = a.model.model(0)?;
    let diag = check_clt_assumptions(&model, model.delta);
    print!("{diag}");
    let cov = asymptotic_covariances(&model, a.lags)?;
    out.csv(
        "asymvar.csv",
        &["quantity", "value"],
        [
            vec!["v_delta".to_string(), num(cov.v_delta)],
            vec!["truncation_lag".to_string(), cov.truncation_lag.to_string()],
            vec!["achieved_tolerance".to_string(), num(cov.achieved_tolerance)],
        ],
    )?;
    let matrix_rows = |m: &nalgebra::DMatrix<f64>| {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| num(m[(i, j)])).collect::<Vec<_>>()).collect::<Vec<_>>()
    };
    let vh: Vec<String> = (0..=a.lags).map(|l| format!("lag{l}")).collect();
    let wh: Vec<String> = (1..=a.lags).map(|l| format!("lag{l}")).collect();
    out.csv("acov_limit.csv", &vh.iter().map(String::as_str).collect::<Vec<_>>(), matrix_rows(&cov.v_matrix))?;
    out.csv("acf_limit.csv", &wh.iter().map(String::as_str).collect::<Vec<_>>(), matrix_rows(&cov.w_matrix))?;
    println!("V_Δ = {}", cov.v_delta);
    println!("w11 = {}", cov.w_matrix[(0, 0)]);
    println!("lag sums truncated at {} (tolerance {:e})", cov.truncation_lag, cov.achieved_tolerance);
    Ok(())
}

fn tau_tilde(tau: f64, delta: f64) -> Result<usize> {
    let r = tau / delta;
    let k = r.round();
    if !(k >= 1.0) || (r - k).abs() > 1e-9 * r.max(1.0) {
        return Err(Error::Config(format!("τ = {tau} is not a positive multiple of Δ = {delta}")));
    }
    Ok(k as usize)
}

fn fit_rows(fit: &MomFitResult) -> Vec<Vec<String>> {
    let names = fit.parameter_names();
    let se = fit.std_errors.clone();
    fit.parameters()
        .iter()
        .enumerate()
        .map(|(i, &v)| param_row(&names[i], v, se.as_ref().map(|s| s[i])))
        .collect()
}

fn acf_series(acf: &Acf) -> Vec<(f64, f64)> {
    acf.values.iter().enumerate().skip(1).map(|(l, v)| (l as f64 * acf.delta, *v)).collect()
}

fn fitted_series(fit: &MomFitResult, lags: usize) -> Vec<(f64, f64)> {
    (1..=lags).map(|l| (l as f64 * fit.delta, fit.fitted_acf(l))).collect()
}

fn fit_mom(a: &MomArgs, alpha: Option<f64>, out: &Out) -> Result<()> {
    let ts = load(&a.input)?;
    let tt = tau_tilde(a.tau, ts.delta)?;
    let acf = acf_of(&ts, a.plot_lags.max(tt + 1), true)?;
    let fit = match alpha {
        None => mom_exp_known_tau(&acf, tt, ts.delta)?,
        Some(al) => mom_supgamma_known_tau(&acf, tt, al, ts.delta)?,
    };
    for w in &fit.warnings {
        eprintln!("warning: {w}");
    }
    let path = out.csv("params.csv", &PARAM_HEADER, fit_rows(&fit))?;
    let lags = acf.max_lag();
    out.csv(
        "fitted_acf.csv",
        &["lag", "empirical", "fitted"],
        (0..=lags).map(|l| vec![l.to_string(), num(acf.values[l]), num(fit.fitted_acf(l))]),
    )?;
    out.svg(
        "fitted_acf.svg",
        &line_chart(
            &format!("{} trawl, τ̃ = {tt}", fit.family),
            "t",
            "acf",
            &[Series::points("empirical", acf_series(&acf)), Series::line("fitted", fitted_series(&fit, lags))],
        ),
    )?;
    print_params(&fit);
    println!("parameter table written to {}", path.display());
    Ok(())
}

fn print_params(fit: &MomFitResult) {
    let names = fit.parameter_names();
    for (i, v) in fit.parameters().iter().enumerate() {
        match &fit.std_errors {
            Some(se) => println!("{:>8} = {v:.6} (se {:.6})", names[i], se[i]),
            None => println!("{:>8} = {v:.6}", names[i]),
        }
    }
}

fn fit_gmm(cli: &Cli, a: &args::GmmArgs, out: &Out) -> Result<()> {
    let ts = load(&a.input)?;
    let family: GmmFamily = a.model.parse()?;
    let mut spec = GmmSpec::new(family, a.lags).with_seed(cli.seed);
    spec.restarts = a.restarts;
    spec.hac_bandwidth = a.bandwidth;
    if a.weight != "identity" {
        spec = spec.with_weight(output::read_matrix(Path::new(&a.weight))?);
    }
    let fit = gmm_fit(&ts.values, &spec, ts.delta)?;
    for w in &fit.warnings {
        eprintln!("warning: {w}");
    }
    let names = family.parameter_names();
    let rows = fit.theta.iter().enumerate().map(|(i, &v)| param_row(names[i], v, Some(fit.std_errors[i])));
    let path = out.csv("params.csv", &PARAM_HEADER, rows)?;
    out.csv(
        "gmm_summary.csv",
        &["quantity", "value"],
        [
            vec!["objective".to_string(), num(fit.objective)],
            vec!["moment_count".to_string(), fit.count.to_string()],
            vec!["evaluations".to_string(), fit.evaluations.to_string()],
        ],
    )?;
    for (i, v) in fit.theta.iter().enumerate() {
        println!("{:>8} = {v:.6} (se {:.6})", names[i], fit.std_errors[i]);
    }
    println!("objective = {:e}", fit.objective);
    println!("parameter table written to {}", path.display());
    Ok(())
}

fn report(a: &args::ReportArgs, out: &Out) -> Result<()> {
    let ts = load(&a.input)?;
    let boundary = Timestamp::parse(&a.split).ok_or_else(|| Error::Config(format!("cannot parse --split '{}'", a.split)))?;
    let (ts1, ts2) = split_series_at(&ts, boundary)?;
    let tt = tau_tilde(a.tau, ts.delta)?;
    let mut rows = Vec::new();
    for (label, part, alpha) in [("TS1", &ts1, a.alpha_ts1), ("TS2", &ts2, a.alpha_ts2)] {
        println!("{label}: {} observations, {} to {}", part.len(), part.timestamps[0], part.timestamps[part.len() - 1]);
        let lags = a.prefit_lags.max(a.plot_lags).max(tt + 1);
        let acf = acf_of(part, lags, true)?;
        let exp = mom_exp_known_tau(&acf, tt, part.delta)?;
        let alpha = match alpha {
            Some(al) => al,
            None => {
                let pre = supgamma_acf_prefit(&acf, tt, a.prefit_lags.min(acf.max_lag()))?;
                println!("{label}: α from the ACF fit over {} lags = {:.4}", pre.max_lag, pre.alpha);
                pre.alpha
            }
        };
        let sg = mom_supgamma_known_tau(&acf, tt, alpha, part.delta)?;
        for (model, fit) in [("exponential", &exp), ("supgamma", &sg)] {
            for w in &fit.warnings {
                eprintln!("warning ({label}, {model}): {w}");
            }
            println!("{label} {model}:");
            print_params(fit);
            let c: Vec<String> = fit.c_profile().iter().map(|v| format!("{v:.3}")).collect();
            println!("  c profile: ({})", c.join(", "));
            for r in fit_rows(fit) {
                rows.push([vec![label.to_string(), model.to_string()], r].concat());
            }
        }
        rows.push([vec![label.to_string(), "supgamma".to_string()], param_row("alpha", alpha, None)].concat());
        let shown = a.plot_lags.min(acf.max_lag());
        out.svg(
            &format!("acf_{}.svg", label.to_lowercase()),
            &line_chart(
                &format!("{label}: empirical and fitted autocorrelation"),
                "lag",
                "acf",
                &[
                    Series::points("empirical", acf_series(&acf).into_iter().take(shown).collect()),
                    Series::line("exponential", fitted_series(&exp, shown)),
                    Series::line(format!("supGamma (α = {alpha})"), fitted_series(&sg, shown)),
                ],
            ),
        )?;
    }
    let header = ["series", "model", "parameter", "estimate", "std_error", "ci_lower", "ci_upper"];
    let path = out.csv("report.csv", &header, rows)?;
    println!("report written to {}", path.display());
    Ok(())
}
