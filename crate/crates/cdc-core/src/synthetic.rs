//! Generators for the synthetic experiments: uniform predictors, the
//! non-additive response models A1-A8, the two-dimensional functional suite
//! B1-B8, and Gaussian noise injection.

#[cfg(not(feature = "std"))]
use crate::float::FloatExt;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{CdcError, Result};
use crate::matrix::SampleMatrix;
use crate::rng::{uniform_open01, RandomStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelId {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    B1,
    B2,
    B3,
    B4,
    B5,
    B6,
    B7,
    B8,
}

impl ModelId {
    pub fn parse(name: &str) -> Option<ModelId> {
        Some(match name {
            "A1" => ModelId::A1,
            "A2" => ModelId::A2,
            "A3" => ModelId::A3,
            "A4" => ModelId::A4,
            "A5" => ModelId::A5,
            "A6" => ModelId::A6,
            "A7" => ModelId::A7,
            "A8" => ModelId::A8,
            "B1" => ModelId::B1,
            "B2" => ModelId::B2,
            "B3" => ModelId::B3,
            "B4" => ModelId::B4,
            "B5" => ModelId::B5,
            "B6" => ModelId::B6,
            "B7" => ModelId::B7,
            "B8" => ModelId::B8,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelId::A1 => "A1",
            ModelId::A2 => "A2",
            ModelId::A3 => "A3",
            ModelId::A4 => "A4",
            ModelId::A5 => "A5",
            ModelId::A6 => "A6",
            ModelId::A7 => "A7",
            ModelId::A8 => "A8",
            ModelId::B1 => "B1",
            ModelId::B2 => "B2",
            ModelId::B3 => "B3",
            ModelId::B4 => "B4",
            ModelId::B5 => "B5",
            ModelId::B6 => "B6",
            ModelId::B7 => "B7",
            ModelId::B8 => "B8",
        }
    }

    pub fn is_two_dimensional(self) -> bool {
        matches!(
            self,
            ModelId::B1
                | ModelId::B2
                | ModelId::B3
                | ModelId::B4
                | ModelId::B5
                | ModelId::B6
                | ModelId::B7
                | ModelId::B8
        )
    }

    pub fn input_dim(self) -> usize {
        if self.is_two_dimensional() {
            1
        } else {
            3
        }
    }

    pub fn output_dim(self) -> usize {
        match self {
            ModelId::A2 => 1,
            m if m.is_two_dimensional() => 1,
            _ => 3,
        }
    }

    /// Human-readable response formula, echoed into experiment headers.
    pub fn formula(self) -> &'static str {
        match self {
            ModelId::A1 => "y1 = x1*x2, y2 = x2*x3, y3 = x3*x1",
            ModelId::A2 => "y = x2*x1 + ln(x3^2)*x2^2 + sin(x1)*(x3-5)^2",
            ModelId::A3 => {
                "y1 = ln(x1^2)*x2 + x3, y2 = ln(x2^2)*sin(x1) + x1^2, y3 = ln(x3^2)*x1"
            }
            ModelId::A4 => {
                "y1 = cos(x2*(1+x1)*x3), y2 = sin(6*pi*x2^2), y3 = sin(x2)*cos(x3*(1+x2))"
            }
            ModelId::A5 => {
                "y1 = cos(x1)*cos(x2) + x1*x2, y2 = sin(x2)*sin(x3) + x2*x3, y3 = cos(x3)*sin(x1) + x1*x3"
            }
            ModelId::A6 => "y1 = x1, y2 = x2^2, y3 = x3^3",
            ModelId::A7 => {
                "y1 = sin(x2)*2^x3 + 3*x2*x1^3, y2 = 4*x2*ln(x1^2) + x1^2, y3 = sin(x3)*ln(x1) + 4*x1^2"
            }
            ModelId::A8 => {
                "y1 = 2*x1*x2 + x1^3*sin(x2), y2 = cos(x2) + 5*x2*ln(x1^2) + x1^2, y3 = sin(x2)*ln(x3) + 5*x2"
            }
            ModelId::B1 => "y = x",
            ModelId::B2 => "y = 4*(x - 1/2)^2",
            ModelId::B3 => "y = 128*(x-1/3)^3 - 48*(x-1/3)^2 - 12*(x-1/3)",
            ModelId::B4 => "y = sin(4*pi*x)",
            ModelId::B5 => "y = sin(16*pi*x)",
            ModelId::B6 => "y = x^(1/4)",
            ModelId::B7 => "y = +/- sqrt(1 - (2x-1)^2)",
            ModelId::B8 => "y = 1{x > 1/2}",
        }
    }

    pub fn all_a() -> [ModelId; 8] {
        [
            ModelId::A1,
            ModelId::A2,
            ModelId::A3,
            ModelId::A4,
            ModelId::A5,
            ModelId::A6,
            ModelId::A7,
            ModelId::A8,
        ]
    }

    pub fn all_b() -> [ModelId; 8] {
        [
            ModelId::B1,
            ModelId::B2,
            ModelId::B3,
            ModelId::B4,
            ModelId::B5,
            ModelId::B6,
            ModelId::B7,
            ModelId::B8,
        ]
    }
}

/// Additive Gaussian noise on every response coordinate, parameterized by its
/// variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub variance: f64,
}

impl NoiseSpec {
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance >= 0.0) || !variance.is_finite() {
            return Err(CdcError::InvalidConfig("noise variance must be nonnegative"));
        }
        Ok(NoiseSpec { variance })
    }

    pub fn none() -> Self {
        NoiseSpec { variance: 0.0 }
    }
}

/// n x 3 matrix of independent U(0,1) draws, excluding exact zeros so the
/// logarithmic models are defined on every row.
pub fn gen_predictors(n: usize, stream: &RandomStream) -> Result<SampleMatrix> {
    if n == 0 {
        return Err(CdcError::EmptyInput);
    }
    let mut rng = stream.rng();
    let values: Vec<f64> = (0..n * 3).map(|_| uniform_open01(&mut rng)).collect();
    SampleMatrix::new(values, n, 3)
}

/// Two-dimensional functional suite; the formulas are table data so a
/// correction touches exactly one line. `aux` is a uniform draw consumed only
/// by shapes that need extra randomness (the circle's branch sign).
pub struct TwoDimModel {
    pub id: ModelId,
    pub response: fn(x: f64, aux: f64) -> f64,
}

pub const TWO_DIM_SUITE: [TwoDimModel; 8] = [
    TwoDimModel { id: ModelId::B1, response: |x, _| x },
    TwoDimModel { id: ModelId::B2, response: |x, _| 4.0 * (x - 0.5) * (x - 0.5) },
    TwoDimModel {
        id: ModelId::B3,
        response: |x, _| {
            let t = x - 1.0 / 3.0;
            128.0 * t * t * t - 48.0 * t * t - 12.0 * t
        },
    },
    TwoDimModel { id: ModelId::B4, response: |x, _| (4.0 * core::f64::consts::PI * x).sin() },
    TwoDimModel { id: ModelId::B5, response: |x, _| (16.0 * core::f64::consts::PI * x).sin() },
    TwoDimModel { id: ModelId::B6, response: |x, _| x.powf(0.25) },
    TwoDimModel {
        id: ModelId::B7,
        response: |x, aux| {
            let t = 2.0 * x - 1.0;
            let sign = if aux < 0.5 { -1.0 } else { 1.0 };
            sign * (1.0 - t * t).max(0.0).sqrt()
        },
    },
    TwoDimModel { id: ModelId::B8, response: |x, _| if x > 0.5 { 1.0 } else { 0.0 } },
];

fn two_dim_model(id: ModelId) -> &'static TwoDimModel {
    TWO_DIM_SUITE
        .iter()
        .find(|m| m.id == id)
        .expect("every B id is in the suite table")
}

/// Evaluate the response model on `x` and add noise. The stream is consumed
/// in a fixed order (auxiliary draws first, then noise) so output is
/// reproducible for a given `(model, x, noise, stream)`.
pub fn gen_response(
    model: ModelId,
    x: &SampleMatrix,
    noise: &NoiseSpec,
    stream: &RandomStream,
) -> Result<SampleMatrix> {
    if x.n_cols() != model.input_dim() {
        return Err(CdcError::DimensionMismatch {
            expected: model.input_dim(),
            got: x.n_cols(),
        });
    }
    let n = x.n_rows();
    let q = model.output_dim();
    let mut rng = stream.rng();

    let mut values = Vec::with_capacity(n * q);
    if model.is_two_dimensional() {
        let table_entry = two_dim_model(model);
        for i in 0..n {
            let aux: f64 = rng.random();
            values.push((table_entry.response)(x.row(i)[0], aux));
        }
    } else {
        for i in 0..n {
            response_row_a(model, x.row(i), &mut values);
        }
    }

    for (idx, v) in values.iter().enumerate() {
        if !v.is_finite() {
            // reachable only with hand-fed predictors on the boundary of a
            // logarithmic model's domain
            return Err(CdcError::NonFinite {
                row: idx / q,
                col: idx % q,
            });
        }
    }

    if noise.variance > 0.0 {
        let sd = noise.variance.sqrt();
        for v in values.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v += sd * z;
        }
    }
    SampleMatrix::new(values, n, q)
}

fn response_row_a(model: ModelId, row: &[f64], out: &mut Vec<f64>) {
    let (x1, x2, x3) = (row[0], row[1], row[2]);
    match model {
        ModelId::A1 => out.extend([x1 * x2, x2 * x3, x3 * x1]),
        ModelId::A2 => out.push(x2 * x1 + (x3 * x3).ln() * x2 * x2 + x1.sin() * (x3 - 5.0) * (x3 - 5.0)),
        ModelId::A3 => out.extend([
            (x1 * x1).ln() * x2 + x3,
            (x2 * x2).ln() * x1.sin() + x1 * x1,
            (x3 * x3).ln() * x1,
        ]),
        ModelId::A4 => out.extend([
            (x2 * (1.0 + x1) * x3).cos(),
            (6.0 * core::f64::consts::PI * x2 * x2).sin(),
            x2.sin() * (x3 * (1.0 + x2)).cos(),
        ]),
        ModelId::A5 => out.extend([
            x1.cos() * x2.cos() + x1 * x2,
            x2.sin() * x3.sin() + x2 * x3,
            x3.cos() * x1.sin() + x1 * x3,
        ]),
        ModelId::A6 => out.extend([x1, x2 * x2, x3 * x3 * x3]),
        ModelId::A7 => out.extend([
            x2.sin() * x3.exp2() + 3.0 * x2 * x1 * x1 * x1,
            4.0 * x2 * (x1 * x1).ln() + x1 * x1,
            x3.sin() * x1.ln() + 4.0 * x1 * x1,
        ]),
        ModelId::A8 => out.extend([
            2.0 * x1 * x2 + x1 * x1 * x1 * x2.sin(),
            x2.cos() + 5.0 * x2 * (x1 * x1).ln() + x1 * x1,
            x2.sin() * x3.ln() + 5.0 * x2,
        ]),
        _ => unreachable!("B models are handled by the suite table"),
    }
}

/// Scalar (x, y) sample from the two-dimensional suite, x ~ U(0,1).
pub fn gen_2d_suite(
    model: ModelId,
    n: usize,
    noise: &NoiseSpec,
    stream: &RandomStream,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !model.is_two_dimensional() {
        return Err(CdcError::InvalidConfig("gen_2d_suite requires a B model"));
    }
    if n == 0 {
        return Err(CdcError::EmptyInput);
    }
    let mut rng = stream.child(1).rng();
    let x: Vec<f64> = (0..n).map(|_| uniform_open01(&mut rng)).collect();
    let xm = SampleMatrix::from_column(x.clone())?;
    let y = gen_response(model, &xm, noise, &stream.child(2))?;
    Ok((x, y.column(0)))
}

/// One synthetic dataset for any model id: A models pair the uniform
/// predictor block with its response, B models produce scalar columns.
pub fn gen_dataset(
    model: ModelId,
    n: usize,
    noise: &NoiseSpec,
    stream: &RandomStream,
) -> Result<(SampleMatrix, SampleMatrix)> {
    if model.is_two_dimensional() {
        let (x, y) = gen_2d_suite(model, n, noise, stream)?;
        Ok((SampleMatrix::from_column(x)?, SampleMatrix::from_column(y)?))
    } else {
        let x = gen_predictors(n, &stream.child(1))?;
        let y = gen_response(model, &x, noise, &stream.child(2))?;
        Ok((x, y))
    }
}
