//! Scores a handful of generated captions against their references.
//!
//!     cargo run --example score_captions

use capkit::metrics::{cider_corpus, evaluate, meteor, rouge_l, MetricConfig, ScoredPair, SynonymTable};
use capkit::text::tokenize;

const VIDEOS: &[(&str, &str, &[&str])] = &[
    (
        "vid1",
        "a man is cutting a tomato",
        &[
            "a man is slicing a tomato",
            "someone is cutting a tomato",
            "a man cuts vegetables",
        ],
    ),
    (
        "vid2",
        "a dog is running in the park",
        &[
            "two dogs are running on the grass",
            "dogs play in a park",
            "a puppy runs outside",
        ],
    ),
    (
        "vid3",
        "a woman is playing a guitar",
        &[
            "a woman plays the violin",
            "a lady is playing an instrument",
            "a woman performs music",
        ],
    ),
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut pairs = Vec::new();
    for (id, cand, refs) in VIDEOS {
        let refs = refs.iter().map(|r| tokenize(r, false)).collect::<Result<_, _>>()?;
        pairs.push(ScoredPair::new(*id, tokenize(cand, false)?, refs)?);
    }

    let plain = MetricConfig::default();
    println!("corpus         {}", evaluate(&pairs, &plain)?.display_row());

    let with_synonyms = MetricConfig {
        synonyms: Some(SynonymTable::parse(
            "dog puppy\nslicing cutting cuts\nguitar violin instrument\n",
        )),
        ..MetricConfig::default()
    };
    println!("with synonyms  {}", evaluate(&pairs, &with_synonyms)?.display_row());

    let cider = cider_corpus(&pairs);
    let opts = plain.meteor_options();
    for (pair, (_, c)) in pairs.iter().zip(&cider.per_video) {
        println!(
            "{:5} R_L {:5.1}  M {:5.1}  C {:6.1}",
            pair.video_id(),
            rouge_l(pair, plain.rouge_beta),
            meteor(pair, &opts),
            c
        );
    }
    Ok(())
}
