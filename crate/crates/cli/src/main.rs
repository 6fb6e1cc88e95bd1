//! `pcfgset`: build, audit and score PCFG SET corpora.

mod commands;
mod dataset;
mod options;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{distances, eval, generate, naturalise, oracle, testbuild, validate};

#[derive(Parser, Debug)]
#[command(name = "pcfgset", version, about = "Generate and evaluate PCFG SET compositionality test suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a base corpus and split it into train/valid/test.
    Generate(generate::GenerateArgs),
    /// Fit grammar parameters to a (length, depth) histogram.
    Naturalise(naturalise::NaturaliseArgs),
    /// Rebuild a base corpus into one of the compositionality tests.
    Testbuild(testbuild::TestbuildArgs),
    /// Score a model on a corpus directory.
    Eval(eval::EvalArgs),
    /// Re-check a corpus directory against the interpreter.
    Validate(validate::ValidateArgs),
    /// Serve the interpreter over standard input and output, one line per input.
    Oracle(oracle::OracleArgs),
    /// Compare function and synonym embeddings.
    Distances(distances::DistancesArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate::run(a).map(|_| true),
        Command::Naturalise(a) => naturalise::run(a).map(|_| true),
        Command::Testbuild(a) => testbuild::run(a).map(|_| true),
        Command::Eval(a) => eval::run(a).map(|_| true),
        Command::Validate(a) => validate::run(a),
        Command::Oracle(a) => oracle::run(a).map(|_| true),
        Command::Distances(a) => distances::run(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
