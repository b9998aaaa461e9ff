use std::io::Read;

use anyhow::Context;
use cvekw_core::normalize;

use crate::settings::RunConfig;
use crate::{exit, load_keywords, Failure, Outcome};

pub fn run(config: &RunConfig, text: Option<String>) -> Outcome {
    let keywords = load_keywords(config)?;
    let text = match text {
        Some(t) => t,
        None => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf).context("reading standard input").map_err(Failure::usage)?;
            buf
        }
    };
    let matched: Vec<&str> = keywords
        .match_indices(&text)
        .into_iter()
        .map(|i| keywords.get(i).expect("index from this set").canonical())
        .collect();
    println!("normalized: {}", normalize(&text));
    println!("matched: {}", matched.join(", "));
    Ok(if matched.is_empty() { exit::NO_MATCH } else { exit::OK })
}
