//! Review, double-check and apply caption corrections.
//!
//!     cargo run --example cleanse_workflow

use capkit::cleanse::{apply_corrections, caption_count, error_stats, validate_records, AnnotationRecord, ErrorClass};
use capkit::corpus::{parse_jsonl, CorpusEntry};

const CORPUS: &str = r#"{"video_id": "v1", "split": "train", "captions": ["a man slice a tomato", "a man is cutting food", "asdf qwer"]}
{"video_id": "v2", "split": "train", "captions": ["a dog runs", "a cat chases a dog", "Rex the dog runs"]}
"#;

fn rec(video: &str, idx: usize, error: ErrorClass, fix: Option<&str>, verifier: Option<&str>) -> AnnotationRecord {
    AnnotationRecord {
        video_id: video.into(),
        caption_index: idx,
        error,
        correction: fix.map(str::to_string),
        reviewer: "alice".into(),
        verified_by: verifier.map(str::to_string),
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus: Vec<CorpusEntry> = parse_jsonl(CORPUS, "corpus")?;
    let mut records = vec![
        rec(
            "v1",
            0,
            ErrorClass::Syntactic,
            Some("a man slices a tomato"),
            Some("bob"),
        ),
        rec(
            "v1",
            2,
            ErrorClass::Unsuitable,
            Some("a man prepares food"),
            Some("alice"),
        ),
        rec("v2", 1, ErrorClass::Hallucination, Some("a dog runs outside"), None),
        rec("v2", 2, ErrorClass::ProperNoun, Some("a dog runs"), Some("bob")),
    ];

    for v in validate_records(&records, &corpus) {
        println!("violation: {v}");
    }
    if let Err(e) = apply_corrections(&corpus, &records) {
        println!("refused: {e}");
    }

    records[1].verified_by = Some("bob".into());
    records[2].verified_by = Some("carol".into());
    let stats = error_stats(&records, caption_count(&corpus))?;
    println!(
        "{} of {} captions erroneous ({:.1}%)",
        stats.error_captions,
        stats.total_captions,
        100.0 * stats.error_rate
    );
    for (class, share) in &stats.breakdown {
        println!("  {class:13} {:.0}%", 100.0 * share);
    }

    let fixed = apply_corrections(&corpus, &records)?;
    for entry in &fixed {
        println!("{}: {:?}", entry.video_id, entry.captions);
    }
    assert_eq!(apply_corrections(&fixed, &records)?, fixed);
    Ok(())
}
