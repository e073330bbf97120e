//! Trains the LSTM/GRU captioner on three toy videos and decodes them.
//!
//!     cargo run --release --example train_captioner

use capkit::augment::FrameImage;
use capkit::features::{stub_extract, VideoFrames};
use capkit::seq2seq::{decode_checkpoint, encode_checkpoint, sgd_train, Seq2SeqParams, TrainConfig};
use capkit::text::{build_vocab, tokenize, EmbeddingTable, TokenizedSentence};

const CAPTIONS: [&str; 3] = ["a red ball rolls", "a green car drives away", "the blue sky is clear"];

/// Each quadrant of each frame takes a palette color that depends on the
/// video, the quadrant and the time step.
fn video(i: usize) -> VideoFrames {
    let palette = [
        [0, 0, 0],
        [255, 0, 0],
        [0, 255, 0],
        [0, 0, 255],
        [255, 255, 0],
        [255, 0, 255],
        [0, 255, 255],
        [255, 255, 255],
    ];
    let frames = (0..8)
        .map(|t| FrameImage::from_fn(8, 8, |x, y| palette[(i + 3 * ((x / 4) + 2 * (y / 4)) + t / 4) % 8]))
        .collect();
    VideoFrames::new(format!("toy{i}"), frames).expect("same size")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let captions: Vec<TokenizedSentence> = CAPTIONS.iter().map(|c| tokenize(c, false)).collect::<Result<_, _>>()?;
    let tagged: Vec<TokenizedSentence> = captions.iter().map(TokenizedSentence::tagged).collect();
    let vocab = build_vocab(&tagged);
    let embeddings = EmbeddingTable::random(&vocab, 32, 1);
    let feats: Vec<_> = (0..3).map(|i| stub_extract(&video(i), 4, 32)).collect();

    let train: Vec<_> = feats.iter().cloned().zip(captions.iter().cloned()).collect();
    let val: Vec<_> = feats
        .iter()
        .cloned()
        .zip(captions.iter().map(|c| vec![c.clone()]))
        .collect();
    let params = Seq2SeqParams::init(vocab, embeddings, 32, 32, 2);
    let config = TrainConfig {
        batch_size: 1,
        patience: 500,
        max_epochs: 500,
        ..TrainConfig::default()
    };
    let (model, log) = sgd_train(params, &train, &val, &config)?;
    let last = log.epochs.last().expect("at least one epoch");
    println!(
        "{} epochs, best METEOR {:.1} at epoch {}, final loss {:.4}",
        log.epochs.len(),
        log.best_meteor,
        log.best_epoch,
        last.train_loss
    );

    let restored = decode_checkpoint(&encode_checkpoint(&model))?;
    for f in &feats {
        println!("{}: {}", f.video_id(), restored.greedy_decode(f, 10)?.to_text());
    }
    Ok(())
}
