//! Toy generators with known leakage and the named fixtures built on them.
//!
//! Fixtures draw `2n` rows from a fixed mixture-of-Gaussians population,
//! split them 80:20 into train/holdout/reference, and fit one toy generator
//! to the training partition:
//!
//! | fixture    | generator                               | leakage            |
//! |------------|-----------------------------------------|--------------------|
//! | `leaky`    | memorizer, σ = 0                        | exact copies       |
//! | `noisy-σ`  | memorizer, Gaussian noise σ             | fades as σ grows   |
//! | `private`  | fresh population rows                   | none               |
//! | `gaussian` | one Gaussian fit to train               | distributional     |
//! | `marginal` | independent per-column resampling       | weak               |

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{DataTable, Value};
use crate::ingest::{split_real, SplitSpec};
use crate::seed::RandomSeed;
use crate::{Error, Result};

/// Ridge added to the fitted covariance diagonal.
pub const COVARIANCE_RIDGE: f64 = 1e-6;

/// Fixed seed for the population mixture, so every case shares one population.
const POPULATION_SEED: RandomSeed = RandomSeed(0x005e_ed0f_da7a);
const POPULATION_COMPONENTS: usize = 3;
const POPULATION_SPREAD: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    Memorizer { sigma: f64 },
    MarginalResampler,
    GaussianFitter,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToyGenerator {
    pub kind: GeneratorKind,
    pub seed: RandomSeed,
}

impl ToyGenerator {
    pub fn memorizer(sigma: f64, seed: RandomSeed) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("noise sigma must be ≥ 0, got {sigma}")));
        }
        Ok(ToyGenerator {
            kind: GeneratorKind::Memorizer { sigma },
            seed,
        })
    }

    pub fn marginal_resampler(seed: RandomSeed) -> Self {
        ToyGenerator {
            kind: GeneratorKind::MarginalResampler,
            seed,
        }
    }

    pub fn gaussian_fitter(seed: RandomSeed) -> Self {
        ToyGenerator {
            kind: GeneratorKind::GaussianFitter,
            seed,
        }
    }
}

/// Draws `m` synthetic rows from `gen` fit to `train`.
///
/// The memorizer walks a random permutation of the training rows (cycling
/// when `m > n`), so with `m = n` every training row is emitted exactly once.
pub fn generate(gen: &ToyGenerator, train: &DataTable, m: usize) -> Result<DataTable> {
    if m == 0 {
        return Err(Error::InvalidArgument("synthetic size must be ≥ 1".into()));
    }
    let mut rng = gen.seed.child("generate").rng();
    let n = train.n_rows();
    let rows: Vec<Vec<Value>> = match gen.kind {
        GeneratorKind::Memorizer { sigma } => {
            if !(sigma >= 0.0 && sigma.is_finite()) {
                return Err(Error::InvalidArgument(format!("noise sigma must be ≥ 0, got {sigma}")));
            }
            let noise = Normal::new(0.0, sigma).expect("sigma validated");
            let mut order: Vec<usize> = (0..n).collect();
            let mut out = Vec::with_capacity(m);
            while out.len() < m {
                order.shuffle(&mut rng);
                for &i in order.iter().take(m - out.len()) {
                    let row = train
                        .row(i)
                        .iter()
                        .map(|cell| match cell {
                            Value::Num(v) if sigma > 0.0 => Value::Num(v + noise.sample(&mut rng)),
                            other => other.clone(),
                        })
                        .collect();
                    out.push(row);
                }
            }
            out
        }
        GeneratorKind::MarginalResampler => (0..m)
            .map(|_| {
                (0..train.n_cols())
                    .map(|j| train.row(rng.random_range(0..n))[j].clone())
                    .collect()
            })
            .collect(),
        GeneratorKind::GaussianFitter => {
            let data = train.numeric_rows().ok_or_else(|| {
                Error::InvalidArgument("the Gaussian fitter needs an all-numeric table".into())
            })?;
            let (mean, cov) = mean_and_covariance(&data);
            let chol = cholesky(&cov)?;
            (0..m)
                .map(|_| {
                    let z: Vec<f64> = (0..mean.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
                    (0..mean.len())
                        .map(|i| {
                            let shift: f64 = (0..=i).map(|j| chol[i][j] * z[j]).sum();
                            Value::Num(mean[i] + shift)
                        })
                        .collect()
                })
                .collect()
        }
    };
    DataTable::new(train.schema().clone(), rows)
}

/// Sample mean and covariance (`n − 1` denominator) plus the ridge.
#[allow(clippy::needless_range_loop)]
fn mean_and_covariance(data: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = data.len();
    let d = data[0].len();
    let mut mean = vec![0.0; d];
    for row in data {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let denom = (n.max(2) - 1) as f64;
    let mut cov = vec![vec![0.0; d]; d];
    for row in data {
        for i in 0..d {
            for j in 0..=i {
                cov[i][j] += (row[i] - mean[i]) * (row[j] - mean[j]);
            }
        }
    }
    for i in 0..d {
        for j in 0..=i {
            cov[i][j] /= denom;
            cov[j][i] = cov[i][j];
        }
        cov[i][i] += COVARIANCE_RIDGE;
    }
    (mean, cov)
}

/// Lower-triangular `L` with `L Lᵀ = a`.
fn cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = a.len();
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let v = a[i][i] - s;
                if v <= 0.0 {
                    return Err(Error::InvalidArgument("covariance is not positive definite".into()));
                }
                l[i][j] = v.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Ok(l)
}

/// `n` rows from the shared mixture population in `d` dimensions.
pub fn sample_population(n: usize, d: usize, seed: RandomSeed) -> Result<DataTable> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("population draws need n ≥ 1 and d ≥ 1".into()));
    }
    let mut centre_rng = POPULATION_SEED.child(&format!("centres/d{d}")).rng();
    let centres: Vec<Vec<f64>> = (0..POPULATION_COMPONENTS)
        .map(|_| {
            (0..d)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut centre_rng);
                    POPULATION_SPREAD * z
                })
                .collect()
        })
        .collect();
    let mut rng = seed.rng();
    let rows = (0..n)
        .map(|_| {
            let c = &centres[rng.random_range(0..POPULATION_COMPONENTS)];
            c.iter()
                .map(|mu| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    mu + z
                })
                .collect()
        })
        .collect();
    DataTable::from_numeric_rows(rows)
}

/// One fixture instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Case {
    pub train: DataTable,
    pub holdout: DataTable,
    pub reference: DataTable,
    pub synthetic: DataTable,
}

/// Named fixture, as parsed from `leaky`, `noisy-<σ>`, `private`,
/// `gaussian` or `marginal`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Fixture {
    Leaky,
    Noisy(f64),
    Private,
    Gaussian,
    Marginal,
}

impl Fixture {
    pub fn parse(name: &str) -> Result<Self> {
        let unknown = || Error::UnknownFixture(name.to_string());
        Ok(match name {
            "leaky" => Fixture::Leaky,
            "private" => Fixture::Private,
            "gaussian" => Fixture::Gaussian,
            "marginal" => Fixture::Marginal,
            _ => {
                let sigma: f64 = name
                    .strip_prefix("noisy-")
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(unknown)?;
                if !(sigma >= 0.0 && sigma.is_finite()) {
                    return Err(unknown());
                }
                Fixture::Noisy(sigma)
            }
        })
    }
}

/// Builds the named fixture from `2n` population rows.
pub fn make_case(name: &str, n: usize, d: usize, seed: u64) -> Result<Case> {
    let fixture = Fixture::parse(name)?;
    let seed = RandomSeed(seed);
    let population = sample_population(2 * n, d, seed.child("case/population"))?;
    let split = split_real(&population, &SplitSpec::with_seed(seed.child("case/split")))?;
    let m = split.train.n_rows();
    let gen_seed = seed.child("case/generator");
    let synthetic = match fixture {
        Fixture::Leaky => generate(&ToyGenerator::memorizer(0.0, gen_seed)?, &split.train, m)?,
        Fixture::Noisy(sigma) => generate(&ToyGenerator::memorizer(sigma, gen_seed)?, &split.train, m)?,
        Fixture::Private => sample_population(m, d, seed.child("case/private"))?,
        Fixture::Gaussian => generate(&ToyGenerator::gaussian_fitter(gen_seed), &split.train, m)?,
        Fixture::Marginal => generate(&ToyGenerator::marginal_resampler(gen_seed), &split.train, m)?,
    };
    Ok(Case {
        train: split.train,
        holdout: split.holdout,
        reference: split.reference,
        synthetic,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::data::{Column, TableSchema};
    use crate::estimators::NeighborIndex;
    use crate::preprocess::EncodedMatrix;

    fn keys(t: &DataTable) -> HashSet<Vec<u8>> {
        t.rows().iter().map(|r| DataTable::row_key(r)).collect()
    }

    #[test]
    fn leaky_copies_every_training_row() {
        let case = make_case("leaky", 50, 4, 3).unwrap();
        assert_eq!(case.train.n_rows(), 80);
        assert_eq!(case.holdout.n_rows(), 10);
        assert_eq!(case.reference.n_rows(), 10);
        assert_eq!(keys(&case.synthetic), keys(&case.train));
        assert_eq!(case.synthetic.n_rows(), case.train.n_rows());
    }

    #[test]
    fn private_is_disjoint_from_train() {
        let case = make_case("private", 50, 4, 3).unwrap();
        assert!(keys(&case.synthetic).is_disjoint(&keys(&case.train)));
    }

    #[test]
    fn fixture_names() {
        assert_eq!(Fixture::parse("noisy-0.1").unwrap(), Fixture::Noisy(0.1));
        assert!(matches!(Fixture::parse("noisy-x"), Err(Error::UnknownFixture(_))));
        assert!(matches!(Fixture::parse("noisy--1"), Err(Error::UnknownFixture(_))));
        assert!(matches!(make_case("bogus", 10, 2, 0), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn deterministic_cases() {
        assert_eq!(make_case("noisy-0.2", 30, 3, 9).unwrap(), make_case("noisy-0.2", 30, 3, 9).unwrap());
        assert_ne!(make_case("noisy-0.2", 30, 3, 9).unwrap(), make_case("noisy-0.2", 30, 3, 10).unwrap());
    }

    #[test]
    fn memorizer_cycles_past_n() {
        let train = DataTable::from_numeric_rows((0..5).map(|i| vec![i as f64]).collect()).unwrap();
        let gen = ToyGenerator::memorizer(0.0, RandomSeed(1)).unwrap();
        let s = generate(&gen, &train, 12).unwrap();
        assert_eq!(s.n_rows(), 12);
        assert_eq!(keys(&s), keys(&train));
        assert!(ToyGenerator::memorizer(-1.0, RandomSeed(1)).is_err());
    }

    #[test]
    fn marginal_values_come_from_train() {
        let schema = TableSchema::new(vec![Column::numeric("a"), Column::categorical("b")]).unwrap();
        let rows = (0..20)
            .map(|i| vec![Value::Num((i % 7) as f64), Value::Cat(format!("c{}", i % 3))])
            .collect();
        let train = DataTable::new(schema, rows).unwrap();
        let s = generate(&ToyGenerator::marginal_resampler(RandomSeed(2)), &train, 50).unwrap();
        for j in 0..2 {
            let seen: HashSet<String> = train.rows().iter().map(|r| r[j].to_string()).collect();
            assert!(s.rows().iter().all(|r| seen.contains(&r[j].to_string())));
        }
        let gaussian = ToyGenerator::gaussian_fitter(RandomSeed(2));
        assert!(generate(&gaussian, &train, 5).is_err());
    }

    #[test]
    fn gaussian_fitter_mean_within_clt_bound() {
        let mut rng = RandomSeed(5).rng();
        let rows: Vec<Vec<f64>> = (0..2000)
            .map(|_| (0..3).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let train = DataTable::from_numeric_rows(rows).unwrap();
        let m = 4000;
        let s = generate(&ToyGenerator::gaussian_fitter(RandomSeed(6)), &train, m).unwrap();
        let data = s.numeric_rows().unwrap();
        for j in 0..3 {
            let mean = data.iter().map(|r| r[j]).sum::<f64>() / m as f64;
            assert!(mean.abs() < 3.0 / (m as f64).sqrt() + 3.0 / 2000f64.sqrt(), "{j}: {mean}");
        }
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = vec![vec![4.0, 2.0, 0.4], vec![2.0, 3.0, 0.5], vec![0.4, 0.5, 1.0]];
        let l = cholesky(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| l[i][k] * l[j][k]).sum();
                assert!((v - a[i][j]).abs() < 1e-12);
            }
        }
        assert!(cholesky(&[vec![0.0]]).is_err());
    }

    #[test]
    fn noisy_members_sit_closer_than_holdout() {
        let mut wins = 0;
        for seed in 0..10 {
            let case = make_case("noisy-0.1", 100, 5, seed).unwrap();
            let mean_nn = |t: &DataTable| {
                let s = EncodedMatrix::from_rows(&case.synthetic.numeric_rows().unwrap()).unwrap();
                let index = NeighborIndex::new(&s);
                let rows = t.numeric_rows().unwrap();
                rows.iter().map(|r| index.nn_distance(r).unwrap()).sum::<f64>() / rows.len() as f64
            };
            if mean_nn(&case.train) < mean_nn(&case.holdout) {
                wins += 1;
            }
        }
        assert_eq!(wins, 10);
    }
}
