//! Per-family scoring functions. Each maps encoded targets to one score per
//! target, higher meaning more member-like.

use ndarray::{concatenate, Axis};

use crate::estimators::{
    train_discriminator, DiscriminatorConfig, ForestConfig, KdeModel,
    MlpConfig, NeighborIndex, MIN_BANDWIDTH,
};
use crate::preprocess::EncodedMatrix;
use crate::seed::RandomSeed;
use crate::{Error, Result};

fn require_rows(m: &EncodedMatrix, min: usize, role: &str) -> Result<()> {
    if m.n_rows() < min {
        return Err(Error::InvalidArgument(format!(
            "{role} needs at least {min} row(s), got {}",
            m.n_rows()
        )));
    }
    Ok(())
}

fn require_dims(targets: &EncodedMatrix, other: &EncodedMatrix) -> Result<()> {
    if targets.n_cols() != other.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: targets.n_cols(),
            found: other.n_cols(),
        });
    }
    Ok(())
}

/// Negated distance to the closest synthetic record.
pub fn dcr_score(targets: &EncodedMatrix, synthetic: &EncodedMatrix) -> Result<Vec<f64>> {
    require_rows(synthetic, 1, "synthetic")?;
    require_dims(targets, synthetic)?;
    let index = NeighborIndex::new(synthetic);
    targets.rows().map(|x| Ok(-index.nn_distance(x)?)).collect()
}

/// Distance to the closest reference record minus distance to the closest
/// synthetic record.
pub fn dcr_diff_score(
    targets: &EncodedMatrix,
    synthetic: &EncodedMatrix,
    reference: &EncodedMatrix,
) -> Result<Vec<f64>> {
    require_rows(synthetic, 1, "synthetic")?;
    require_rows(reference, 1, "reference")?;
    require_dims(targets, synthetic)?;
    require_dims(targets, reference)?;
    let s = NeighborIndex::new(synthetic);
    let r = NeighborIndex::new(reference);
    targets
        .rows()
        .map(|x| Ok(r.nn_distance(x)? - s.nn_distance(x)?))
        .collect()
}

/// Log KDE density of the synthetic data at each target.
pub fn density_score(targets: &EncodedMatrix, synthetic: &EncodedMatrix) -> Result<Vec<f64>> {
    require_rows(synthetic, 2, "synthetic")?;
    require_dims(targets, synthetic)?;
    let kde = KdeModel::fit(synthetic)?;
    targets.rows().map(|x| kde.logpdf(x)).collect()
}

/// Log density ratio between synthetic and reference KDEs.
pub fn domias_score(
    targets: &EncodedMatrix,
    synthetic: &EncodedMatrix,
    reference: &EncodedMatrix,
) -> Result<Vec<f64>> {
    require_rows(synthetic, 2, "synthetic")?;
    require_rows(reference, 2, "reference")?;
    require_dims(targets, synthetic)?;
    require_dims(targets, reference)?;
    let ps = KdeModel::fit(synthetic)?;
    let pr = KdeModel::fit(reference)?;
    targets
        .rows()
        .map(|x| Ok(ps.logpdf(x)? - pr.logpdf(x)?))
        .collect()
}

/// Smoothed ratio of synthetic to reference points among the `k` nearest
/// neighbours in the pooled data: `(c_S + 1/2) / (c_R + 1/2)`.
pub fn dpi_score(
    targets: &EncodedMatrix,
    synthetic: &EncodedMatrix,
    reference: &EncodedMatrix,
    k: usize,
) -> Result<Vec<f64>> {
    require_dims(targets, synthetic)?;
    require_dims(targets, reference)?;
    let n_syn = synthetic.n_rows();
    let total = n_syn + reference.n_rows();
    if k == 0 || k > total {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must lie in 1..={total} (synthetic + reference rows)"
        )));
    }
    let pooled = concatenate(Axis(0), &[synthetic.values.view(), reference.values.view()])
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let index = NeighborIndex::new(&EncodedMatrix::raw(pooled));
    targets
        .rows()
        .map(|x| {
            let c_syn = index.knn(x, k)?.iter().filter(|n| n.id < n_syn).count();
            let c_ref = k - c_syn;
            Ok((c_syn as f64 + 0.5) / (c_ref as f64 + 0.5))
        })
        .collect()
}

/// Log-likelihood gain of the target's `k` nearest synthetic points when the
/// target is added to the reference KDE.
pub fn gen_lra_score(
    targets: &EncodedMatrix,
    synthetic: &EncodedMatrix,
    reference: &EncodedMatrix,
    k: usize,
    refit_bandwidth: bool,
) -> Result<Vec<f64>> {
    require_rows(reference, 2, "reference")?;
    require_dims(targets, synthetic)?;
    require_dims(targets, reference)?;
    if k == 0 || k > synthetic.n_rows() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must lie in 1..={} (synthetic rows)",
            synthetic.n_rows()
        )));
    }
    let base = KdeModel::fit(reference)?;
    let base_logpdf: Vec<f64> = synthetic
        .rows()
        .map(|s| base.logpdf(s))
        .collect::<Result<_>>()?;
    let index = NeighborIndex::new(synthetic);
    let reference_rows = reference.values.as_standard_layout().to_owned();

    targets
        .rows()
        .map(|x| {
            let row = ndarray::ArrayView2::from_shape((1, x.len()), x)
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let augmented = concatenate(Axis(0), &[reference_rows.view(), row])
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let with_target = if refit_bandwidth {
                KdeModel::fit_array(augmented)?
            } else {
                KdeModel::from_array(augmented, base.bandwidth())?
            };
            index.knn(x, k)?.iter().try_fold(0.0, |acc, n| {
                Ok(acc + with_target.logpdf(synthetic.row(n.id))? - base_logpdf[n.id])
            })
        })
        .collect()
}

/// Number of synthetic points within `radius` of the target.
pub fn local_neighborhood_score(
    targets: &EncodedMatrix,
    synthetic: &EncodedMatrix,
    radius: f64,
) -> Result<Vec<f64>> {
    require_dims(targets, synthetic)?;
    let index = NeighborIndex::new(synthetic);
    targets
        .rows()
        .map(|x| Ok(index.radius_count(x, radius)? as f64))
        .collect()
}

fn discriminator_scores(
    config: &DiscriminatorConfig,
    targets: &EncodedMatrix,
    synthetic: &EncodedMatrix,
    reference: &EncodedMatrix,
    seed: RandomSeed,
) -> Result<Vec<f64>> {
    require_dims(targets, synthetic)?;
    // Targets never enter training, so members stay out-of-sample.
    let model = train_discriminator(config, synthetic, reference, seed)?;
    targets.rows().map(|x| model.score(x)).collect()
}

/// MLP discriminator trained to tell synthetic (1) from reference (0) rows.
pub fn logan_score(
    targets: &EncodedMatrix,
    synthetic: &EncodedMatrix,
    reference: &EncodedMatrix,
    config: &MlpConfig,
    seed: RandomSeed,
) -> Result<Vec<f64>> {
    discriminator_scores(&DiscriminatorConfig::Mlp(*config), targets, synthetic, reference, seed)
}

/// Random-forest discriminator trained to tell synthetic from reference rows.
pub fn classifier_score(
    targets: &EncodedMatrix,
    synthetic: &EncodedMatrix,
    reference: &EncodedMatrix,
    config: &ForestConfig,
    seed: RandomSeed,
) -> Result<Vec<f64>> {
    discriminator_scores(&DiscriminatorConfig::Forest(*config), targets, synthetic, reference, seed)
}

/// Median distance from each synthetic point to its nearest other
/// synthetic point, floored at [`MIN_BANDWIDTH`].
pub fn mc_epsilon(synthetic: &EncodedMatrix) -> Result<f64> {
    require_rows(synthetic, 2, "synthetic")?;
    let index = NeighborIndex::new(synthetic);
    let mut dists = synthetic
        .rows()
        .enumerate()
        .map(|(i, s)| {
            let nn = index.knn(s, 2)?;
            let other = nn.iter().find(|n| n.id != i).expect("two neighbours");
            Ok(other.distance)
        })
        .collect::<Result<Vec<f64>>>()?;
    dists.sort_by(f64::total_cmp);
    let n = dists.len();
    let median = if n % 2 == 1 {
        dists[n / 2]
    } else {
        (dists[n / 2 - 1] + dists[n / 2]) / 2.0
    };
    Ok(median.max(MIN_BANDWIDTH))
}

/// Fraction of synthetic points within the median self-neighbour distance of
/// the target.
pub fn mc_score(targets: &EncodedMatrix, synthetic: &EncodedMatrix) -> Result<Vec<f64>> {
    require_dims(targets, synthetic)?;
    let eps = mc_epsilon(synthetic)?;
    let index = NeighborIndex::new(synthetic);
    let n = synthetic.n_rows() as f64;
    targets
        .rows()
        .map(|x| Ok(index.radius_count(x, eps)? as f64 / n))
        .collect()
}
