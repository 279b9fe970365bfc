//! Exact nearest-neighbour queries and Gaussian KDE.
//!
//! cargo run --release --example neighbors_kde

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synth_audit::estimators::{KdeModel, NeighborIndex, SearchStrategy};
use synth_audit::preprocess::EncodedMatrix;

fn main() -> synth_audit::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rows: Vec<Vec<f64>> = (0..2000).map(|_| (0..3).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
    let points = EncodedMatrix::from_rows(&rows)?;
    let query = [0.5, 0.5, 0.5];

    let tree = NeighborIndex::with_strategy(&points, SearchStrategy::KdTree);
    let brute = NeighborIndex::with_strategy(&points, SearchStrategy::BruteForce);
    let nearest = tree.knn(&query, 5)?;
    assert_eq!(nearest, brute.knn(&query, 5)?);
    for nb in &nearest {
        println!("id {:4}  distance {:.4}", nb.id, nb.distance);
    }
    println!("points within 0.1: {}", tree.radius_count(&query, 0.1)?);

    let kde = KdeModel::fit(&points)?;
    println!("\nScott bandwidth {:.4}", kde.bandwidth());
    for q in [[0.5, 0.5, 0.5], [0.0, 0.0, 0.0], [3.0, 3.0, 3.0]] {
        println!("log p({q:?}) = {:.3}", kde.logpdf(&q)?);
    }
    Ok(())
}
