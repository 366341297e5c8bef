use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use locidx::algebra::GaussianRational as G;
use locidx::harness::corpus::{corpus_model, CORPUS};
use locidx::harness::{check_atlas, emit_report, render_text, residue_at_point, run_verification, Format, Verdict, VerificationReport};
use locidx::indices::Phi;
use locidx::parser::manifest::{parse_manifest_with, ModelBundle};
use locidx::parser::parse_expression;
use locidx::Error;

#[derive(Parser)]
#[command(name = "locidx", version, about = "Exact localization residues for foliations and self-maps along submanifolds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify the index theorem on one or more model manifests.
    Verify {
        paths: Vec<PathBuf>,
        /// Verify every bundled corpus model as well.
        #[arg(long)]
        corpus: bool,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override a manifest parameter, `name=value`.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
    },
    /// Classify the atlas of a model and print its witnesses.
    CheckAtlas { path: PathBuf },
    /// Exact residue at one point.
    Residue {
        path: PathBuf,
        /// Tangential coordinates, e.g. `y=0` or `y=1/2, z=i`.
        #[arg(long)]
        point: String,
        #[arg(long)]
        chart: String,
        #[arg(long)]
        object: Option<String>,
        /// Product of Chern classes, e.g. `c1^2` or `c2`.
        #[arg(long)]
        phi: Option<String>,
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
    },
    /// List the bundled models.
    ListCorpus,
}

fn scalar(text: &str) -> Result<G, Error> {
    parse_expression(text, &[])?.as_constant().ok_or_else(|| Error::Unsupported(format!("`{}` is not a constant", text)))
}

fn assignments(items: &[String]) -> Result<BTreeMap<String, G>, Error> {
    let mut out = BTreeMap::new();
    for it in items.iter().flat_map(|s| s.split(',')) {
        let it = it.trim();
        if it.is_empty() {
            continue;
        }
        let (k, v) = it.split_once('=').ok_or_else(|| Error::Unsupported(format!("expected name=value, got `{}`", it)))?;
        out.insert(k.trim().to_string(), scalar(v.trim())?);
    }
    Ok(out)
}

fn load(path: &PathBuf, params: &BTreeMap<String, G>) -> Result<ModelBundle, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), msg: e.to_string() })?;
    parse_manifest_with(&text, params)
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {}", e);
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::ListCorpus => {
            for (name, text) in CORPUS {
                let desc = text.lines().find_map(|l| l.strip_prefix("description ")).unwrap_or("");
                println!("{:<20} {}", name, desc);
            }
            ExitCode::SUCCESS
        }
        Cmd::CheckAtlas { path } => match load(&path, &BTreeMap::new()).and_then(|b| check_atlas(&b)) {
            Ok(s) => {
                print!("{}", s);
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Cmd::Residue { path, point, chart, object, phi, params } => {
            let run = || -> Result<G, Error> {
                let b = load(&path, &assignments(&params)?)?;
                let coords = assignments(&[point])?;
                let phi = phi.as_deref().map(Phi::parse).transpose()?;
                residue_at_point(&b, object.as_deref(), &chart, &coords, phi.as_ref())
            };
            match run() {
                Ok(v) => {
                    println!("{}", v);
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Cmd::Verify { paths, corpus, json, out, params } => {
            if paths.is_empty() && !corpus {
                eprintln!("error: give manifest paths or --corpus");
                return ExitCode::from(2);
            }
            let params = match assignments(&params) {
                Ok(p) => p,
                Err(e) => return fail(&e),
            };
            let mut bundles = Vec::new();
            for p in &paths {
                match load(p, &params) {
                    Ok(b) => bundles.push(b),
                    Err(e) => {
                        eprintln!("{}:", p.display());
                        return fail(&e);
                    }
                }
            }
            if corpus {
                for (name, _) in CORPUS {
                    match corpus_model(name) {
                        Ok(b) => bundles.push(b),
                        Err(e) => return fail(&e),
                    }
                }
            }
            let reports: Vec<VerificationReport> = bundles.iter().map(run_verification).collect();
            let mut buf: Vec<u8> = Vec::new();
            if json {
                if reports.len() == 1 {
                    let _ = emit_report(&reports[0], Format::Json, &mut buf);
                } else {
                    buf.extend(serde_json::to_string_pretty(&reports).expect("reports serialize").as_bytes());
                    buf.push(b'\n');
                }
            } else {
                for r in &reports {
                    buf.extend(render_text(r).as_bytes());
                }
                let passed = reports.iter().filter(|r| r.verdict == Verdict::Pass).count();
                buf.extend(format!("{} of {} models PASS\n", passed, reports.len()).as_bytes());
            }
            let written = match &out {
                Some(p) => std::fs::write(p, &buf).map_err(|e| Error::Io { path: p.display().to_string(), msg: e.to_string() }),
                None => std::io::stdout().write_all(&buf).map_err(|e| Error::Io { path: "stdout".into(), msg: e.to_string() }),
            };
            if let Err(e) = written {
                return fail(&e);
            }
            if reports.iter().all(|r| r.verdict == Verdict::Pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
