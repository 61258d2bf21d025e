//! `algaeval split` — deterministic train/val/test assignment.

use std::path::PathBuf;

use algaeval_core::dataset::{self, DatasetManifest, SplitRatios};

use super::{write_output, CliError};

#[derive(Debug, clap::Args)]
pub struct SplitArgs {
    /// Dataset manifest JSON
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated train,val,test proportions summing to 1
    #[arg(long, default_value = "0.7,0.2,0.1")]
    pub ratios: String,
    /// Shuffle seed; identical inputs and seed give byte-identical output
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the split assignment JSON
    #[arg(long)]
    pub output: PathBuf,
}

pub fn run(args: &SplitArgs) -> Result<(), CliError> {
    let ratios: SplitRatios = args
        .ratios
        .parse()
        .map_err(|e| CliError::Validation(format!("--ratios: {e}")))?;
    let manifest = DatasetManifest::load(&args.manifest).map_err(CliError::validation)?;
    let assignment = dataset::split(&manifest, ratios, args.seed);
    let (train, val, test) = assignment.counts();
    write_output(&args.output, &(assignment.to_json() + "\n"))?;
    println!(
        "train {train} / val {val} / test {test} -> {}",
        args.output.display()
    );
    Ok(())
}
