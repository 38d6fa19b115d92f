use rand::Rng;
use rand_distr::{Beta, Cauchy, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{check_count, rejection};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IidKind {
    Box,
    Ball,
    Annulus { r_in: f64, r_out: f64 },
    Sphere,
    Beta { a: f64, b: f64 },
    Normal,
    Cauchy,
}

/// An iid model of intrinsic dimension `dim`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IidModel {
    pub kind: IidKind,
    pub dim: usize,
}

impl IidModel {
    pub fn new(kind: IidKind, dim: usize) -> Result<Self> {
        let model = Self { kind, dim };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::param("dimension must be positive"));
        }
        match self.kind {
            IidKind::Annulus { r_in, r_out } if !(0.0 < r_in && r_in < r_out) => Err(Error::param(
                format!("annulus needs 0 < r_in < r_out, got r_in={r_in}, r_out={r_out}"),
            )),
            IidKind::Beta { a, b } if !(a > 0.0 && b > 0.0) => {
                Err(Error::param(format!("beta needs a, b > 0, got a={a}, b={b}")))
            }
            _ => Ok(()),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            IidKind::Sphere => self.dim + 1,
            _ => self.dim,
        }
    }

    pub fn tag(&self) -> String {
        let name = match self.kind {
            IidKind::Box => "box".to_string(),
            IidKind::Ball => "ball".to_string(),
            IidKind::Annulus { r_in, r_out } => format!("annulus({r_in},{r_out})"),
            IidKind::Sphere => "sphere".to_string(),
            IidKind::Beta { a, b } => format!("beta({a},{b})"),
            IidKind::Normal => "normal".to_string(),
            IidKind::Cauchy => "cauchy".to_string(),
        };
        format!("iid/{name}/d{}", self.dim)
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub fn sample_iid(model: &IidModel, n: usize, seed: u64) -> Result<PointCloud> {
    model.validate()?;
    check_count(n)?;
    let tag = model.tag();
    let mut rng = rng::stream(seed, &tag);
    let d = model.dim;
    let mut coords = Vec::with_capacity(n * model.ambient_dim());

    match model.kind {
        IidKind::Box => {
            coords.extend((0..n * d).map(|_| rng.random::<f64>()));
        }
        IidKind::Ball => {
            for _ in 0..n {
                let x = rejection(
                    &mut rng,
                    |r| (0..d).map(|_| r.random_range(-1.0..=1.0)).collect(),
                    |x| norm(x) <= 1.0,
                )?;
                coords.extend(x);
            }
        }
        IidKind::Annulus { r_in, r_out } => {
            for _ in 0..n {
                let x = rejection(
                    &mut rng,
                    |r| (0..d).map(|_| r.random_range(-r_out..=r_out)).collect(),
                    |x| {
                        let rad = norm(x);
                        r_in <= rad && rad <= r_out
                    },
                )?;
                coords.extend(x);
            }
        }
        IidKind::Sphere => {
            for _ in 0..n {
                // A zero Gaussian vector has probability zero; redraw if it ever happens.
                let x = loop {
                    let g: Vec<f64> = (0..=d).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let r = norm(&g);
                    if r > 0.0 {
                        break g.into_iter().map(|c| c / r).collect::<Vec<_>>();
                    }
                };
                coords.extend(x);
            }
        }
        IidKind::Beta { a, b } => {
            let dist = Beta::new(a, b).map_err(|e| Error::param(e.to_string()))?;
            coords.extend((0..n * d).map(|_| dist.sample(&mut rng)));
        }
        IidKind::Normal => {
            coords.extend((0..n * d).map(|_| -> f64 { StandardNormal.sample(&mut rng) }));
        }
        IidKind::Cauchy => {
            let dist = Cauchy::new(0.0, 1.0).map_err(|e| Error::param(e.to_string()))?;
            coords.extend((0..n * d).map(|_| dist.sample(&mut rng)));
        }
    }
    PointCloud::from_flat(coords, model.ambient_dim(), tag, seed, Some(d))
}
