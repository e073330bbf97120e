//! How separable are altered-video features from the originals? Embeds
//! three labelled sets with t-SNE and reports per-label neighbor purity.
//!
//!     cargo run --release --example tsne_separation

use capkit::analysis::{coords_csv, scatter_svg, separation_report, tsne, LabeledPoints, TsneConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut points = Vec::new();
    let mut labels = Vec::new();
    // originals and a mild alteration overlap; a strong one drifts away
    for (label, shift) in [
        ("original", 0.0),
        ("brightness_x0.7", 0.3),
        ("gaussian_blur_rho20", 6.0),
    ] {
        for _ in 0..40 {
            let v: Vec<f64> = (0..12)
                .map(|d| rng.random_range(-1.0..1.0) + if d < 3 { shift } else { 0.0 })
                .collect();
            points.push(v);
            labels.push(label.to_string());
        }
    }
    let data = LabeledPoints::new(points, labels)?;
    let report = separation_report(&data, 10)?;
    for l in &report.labels {
        println!("{:22} {:3} points  purity {:.3}", l.label, l.points, l.purity);
    }
    println!("{}", report.interpretation);

    let config = TsneConfig {
        perplexity: 20.0,
        iters: 500,
        ..TsneConfig::default()
    };
    let embedding = tsne(data.points(), &config)?;
    println!(
        "KL {:.4} -> {:.4}",
        embedding.kl_trace[0],
        embedding.kl_trace.last().copied().unwrap_or(f64::NAN)
    );
    let dir = std::env::temp_dir();
    std::fs::write(
        dir.join("capkit_tsne.csv"),
        coords_csv(data.labels(), &embedding.coords),
    )?;
    std::fs::write(
        dir.join("capkit_tsne.svg"),
        scatter_svg(&embedding.coords, data.labels()),
    )?;
    println!("wrote capkit_tsne.csv and capkit_tsne.svg to {}", dir.display());
    Ok(())
}
