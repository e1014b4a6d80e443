use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use topoplan::parsing::Instruction;

use super::{make_parser, parser_choice};
use crate::failure::{Classify, CliResult, Failure};
use crate::stamp::{check_output, read_input, to_json, write_output, Stamp};
use crate::{Context, ParserChoice};

pub const LANDMARKS_VERSION: &str = "landmarks/1";

#[derive(Args, Debug)]
pub struct ParseArgs {
    /// Instruction text.
    #[arg(conflicts_with_all = ["instruction", "file"])]
    text: Option<String>,
    #[arg(long, conflicts_with = "file")]
    instruction: Option<String>,
    /// File with one instruction per line.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long, value_enum)]
    parser: Option<ParserChoice>,
    /// Optional JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Parsed {
    instruction: String,
    landmarks: Vec<String>,
}

#[derive(Serialize)]
struct LandmarkFile<'a> {
    version: &'static str,
    stamp: &'a Stamp,
    results: &'a [Parsed],
}

/// Prints landmarks one per line for a single instruction, or
/// `instruction<TAB>l1; l2` per line for a file.
pub fn run(ctx: &Context, a: ParseArgs) -> CliResult {
    if let Some(out) = &a.out {
        check_output(out)?;
    }
    let mut stamp = Stamp::new("parse");
    let (texts, batch) = match (a.text.or(a.instruction), &a.file) {
        (Some(t), _) => {
            stamp.setting("instruction", &t);
            (vec![t], false)
        }
        (None, Some(path)) => {
            let body = read_input(&mut stamp, "instructions", path)?;
            (body.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_string).collect(), true)
        }
        (None, None) => return Err(Failure::input("give an instruction or --file")),
    };
    let parser = make_parser(ctx, parser_choice(ctx, a.parser)?, &mut stamp)?;
    let mut results = Vec::with_capacity(texts.len());
    for text in texts {
        let landmarks = parser.extract(&Instruction::new(text.clone()).input()?).input()?.into_inner();
        if batch {
            println!("{text}\t{}", landmarks.join("; "));
        } else {
            landmarks.iter().for_each(|l| println!("{l}"));
        }
        results.push(Parsed { instruction: text, landmarks });
    }
    if let Some(out) = &a.out {
        write_output(out, &to_json(&LandmarkFile { version: LANDMARKS_VERSION, stamp: &stamp, results: &results }))?;
    }
    Ok(())
}
