use std::fs;
use std::path::Path;

use loglift::checks::{run_module_checks, CheckReport};
use loglift::examples::{schraen_table, BreuilTwist};
use loglift::field::{ExtFieldSpec, Field, PrimeConfig};
use loglift::group_ring::{check_dgh_compatibility, DgHWitness};
use loglift::induced::TruncatedInduced;
use loglift::io::{parse_element, parse_log, parse_module, CapPolicy};
use loglift::lift::LiftedRep;
use loglift::modules::FdPModule;
use loglift::root_data::GroupElement;
use loglift::torus_log::TorusLogarithm;
use serde_json::json;

use crate::render;
use crate::{Cli, Command, ExampleArgs, ExampleName};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: String, source: loglift::Error },
    #[error(transparent)]
    Core(#[from] loglift::Error),
}

pub struct Output {
    pub text: String,
    /// False when a check ran and found a violation.
    pub ok: bool,
}

impl Output {
    fn fine(text: String) -> Self {
        Output { text, ok: true }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })
}

fn at(path: &Path) -> impl FnOnce(loglift::Error) -> CliError + '_ {
    move |source| CliError::Input { path: path.display().to_string(), source }
}

fn caps(cli: &Cli) -> CapPolicy {
    CapPolicy { force: cli.cap, default: cli.default_cap }
}

fn load_module(cli: &Cli, path: &Path) -> Result<FdPModule> {
    parse_module(&read(path)?, caps(cli)).map_err(at(path))
}

fn load_log(m: &FdPModule, path: &Path) -> Result<TorusLogarithm> {
    parse_log(&read(path)?, m.field(), m.ctx().n).map_err(at(path))
}

pub fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Lift { module, log, element } => {
            let m = load_module(cli, module)?;
            let log = load_log(&m, log)?;
            let g = parse_element(&read(element)?, m.field(), m.ctx().n).map_err(at(element))?;
            let value = LiftedRep::new(m, log)?.lift_parabolic_eval(&g)?;
            Ok(Output::fine(if cli.json {
                render::json_line(&json!({ "lift": loglift::io::matrix_to_json(&value) }))
            } else {
                format!("{}\n", render::matrix(&value))
            }))
        }
        Command::Verma { module, depth, weights, basis } => {
            let m = load_module(cli, module)?;
            let v = TruncatedInduced::build(&m, *depth)?;
            let mults = if *weights { Some(v.weight_multiplicities()?) } else { None };
            Ok(Output::fine(render::verma(&v, mults.as_ref(), *basis, cli.json)))
        }
        Command::Weights { module, projectors } => {
            let m = load_module(cli, module)?;
            let dec = m.weight_decomposition(None)?;
            Ok(Output::fine(render::weights(&dec, *projectors, cli.json)))
        }
        Command::Check { module, log, samples } => {
            let m = load_module(cli, module)?;
            let log = log.as_deref().map(|p| load_log(&m, p)).transpose()?;
            let report = run_module_checks(&m, log.as_ref(), *samples, cli.seed);
            Ok(report_output(&report, cli.json))
        }
        Command::CheckDgh { module, log, samples } => {
            let m = load_module(cli, module)?;
            let log = load_log(&m, log)?;
            let rep = LiftedRep::new(m, log)?;
            let report = check_dgh_compatibility(&DgHWitness::from_lift(&rep), *samples, cli.seed);
            let text = if cli.json {
                render::json_line(&json!({
                    "checked": report.checked,
                    "violations": report.violations,
                    "passed": report.passed(),
                }))
            } else {
                render::dgh(&report)
            };
            Ok(Output { text, ok: report.passed() })
        }
        Command::Example(args) => example(cli, args),
    }
}

fn report_output(report: &CheckReport, as_json: bool) -> Output {
    let text =
        if as_json { render::json_line(&json!({ "passed": report.all_passed(), "report": report })) } else { render::check_report(report) };
    Output { text, ok: report.all_passed() }
}

fn example(cli: &Cli, args: &ExampleArgs) -> Result<Output> {
    let cap = cli.cap.unwrap_or(cli.default_cap);
    let config = PrimeConfig::new(args.p, cap)?;
    match args.name {
        ExampleName::Breuil => {
            // odd k needs a square root of p for the smooth character
            let ext = if args.k % 2 == 0 { ExtFieldSpec::Base } else { ExtFieldSpec::SqrtP };
            let f = Field::new(config, ext)?;
            let l = f.parse(&args.l)?;
            let tw = BreuilTwist::new(&f, &l, args.k)?;
            let p = args.p as i64;
            let elements = [
                ("diag(p, 1)", GroupElement::from_ints(&f, &[&[p, 0], &[0, 1]])?),
                ("diag(1, p)", GroupElement::from_ints(&f, &[&[1, 0], &[0, p]])?),
                ("[[p, 1], [0, 1]]", GroupElement::from_ints(&f, &[&[p, 1], &[0, 1]])?),
                ("[[1, 1], [0, 1]]", GroupElement::from_ints(&f, &[&[1, 1], &[0, 1]])?),
            ];
            let rows = elements.into_iter().map(|(name, g)| Ok((name, tw.eval(&g)?, g))).collect::<Result<Vec<_>>>()?;
            Ok(Output::fine(render::breuil(&l, args.k, &rows, cli.json)))
        }
        ExampleName::Schraen => {
            let f = Field::new(config, ExtFieldSpec::Base)?;
            let l = f.parse(&args.l)?;
            let lp = f.parse(&args.lp)?;
            let table = schraen_table(&f, &l, &lp, cap - 2)?;
            let ok = table.iter().all(|r| r.agrees);
            Ok(Output { text: render::schraen(&l, &lp, &table, cli.json), ok })
        }
    }
}
