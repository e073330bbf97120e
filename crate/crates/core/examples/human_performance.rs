//! Human performance: every round holds out one caption per video as the
//! candidate and scores it against the remaining ones.
//!
//!     cargo run --release --example human_performance

use capkit::cleanse::human_performance;
use capkit::corpus::CorpusEntry;
use capkit::metrics::MetricConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = vec![
        CorpusEntry {
            video_id: "v1".into(),
            split: "test".into(),
            captions: vec![
                "a man is slicing a tomato".into(),
                "someone cuts a tomato into pieces".into(),
                "a person is chopping vegetables".into(),
                "a man slices a red tomato".into(),
            ],
        },
        CorpusEntry {
            video_id: "v2".into(),
            split: "test".into(),
            captions: vec![
                "two dogs are playing in the snow".into(),
                "dogs run around in the snow".into(),
                "two puppies play outside".into(),
                "a pair of dogs plays in snow".into(),
            ],
        },
    ];
    // two videos are too few for unsmoothed 4-gram precision
    let config = MetricConfig {
        bleu_smoothing: true,
        ..MetricConfig::default()
    };
    let hp = human_performance(&corpus, 4, &config)?;
    for (r, report) in hp.per_round.iter().enumerate() {
        println!("round {r}: {}", report.display_row());
    }
    println!("mean     {}", hp.mean.display_row());
    println!("std      {}", hp.std.display_row());
    Ok(())
}
