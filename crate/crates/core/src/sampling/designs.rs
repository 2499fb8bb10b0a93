use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{efast_phases, sobol_points, SamplingError, MAX_SOBOL_DIM};
use crate::config::efast_min_samples;
use crate::statlib::Rng;

/// Unit-cube rows plus the metadata stored under `design_meta`.
pub type DesignWithMeta = (Vec<Vec<f64>>, Map<String, Value>);

/// Corner enumeration is capped at 2^20 rows.
pub const MAX_EXTREME_FACTORS: usize = 20;

/// Latin hypercube: one point per stratum `[s/n, (s+1)/n)` in every column.
pub fn lhs_points(dim: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![0.0; dim]; n];
    if n == 0 {
        return rows;
    }
    let mut rng = Rng::new(seed);
    let nf = n as f64;
    let mut strata: Vec<usize> = (0..n).collect();
    for d in 0..dim {
        rng.shuffle(&mut strata);
        for (row, &s) in rows.iter_mut().zip(&strata) {
            let hi = (s + 1) as f64 / nf;
            let v = (s as f64 + rng.next_f64()) / nf;
            row[d] = if v >= hi { hi.next_down() } else { v };
        }
    }
    rows
}

/// All `2^k` corners of the unit cube, factor 0 as the least significant bit.
pub fn extreme_points(k: usize) -> Result<Vec<Vec<f64>>, SamplingError> {
    if k > MAX_EXTREME_FACTORS {
        return Err(SamplingError::TooManyFactors(k));
    }
    Ok((0..1usize << k)
        .map(|i| (0..k).map(|bit| ((i >> bit) & 1) as f64).collect())
        .collect())
}

/// Baseline at 0.5, then factor `i` at 0 (row `2i+1`) and at 1 (row `2i+2`).
pub fn oat_design(k: usize) -> Vec<Vec<f64>> {
    let mut rows = Vec::with_capacity(2 * k + 1);
    rows.push(vec![0.5; k]);
    for i in 0..k {
        for level in [0.0, 1.0] {
            let mut r = vec![0.5; k];
            r[i] = level;
            rows.push(r);
        }
    }
    rows
}

pub fn random_unit(k: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = Rng::new(seed);
    (0..n).map(|_| (0..k).map(|_| rng.next_f64()).collect()).collect()
}

/// Role of a row inside one Saltelli base-sample group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaltelliBlock {
    A,
    /// `A` with column `i` taken from `B`.
    AB(usize),
    /// `B` with column `i` taken from `A`.
    BA(usize),
    B,
}

impl SaltelliBlock {
    /// Per-base-sample row order: `A, AB_0..AB_{k-1}, [BA_0..BA_{k-1}], B`.
    pub fn layout(k: usize, second_order: bool) -> Vec<SaltelliBlock> {
        let mut out = vec![SaltelliBlock::A];
        out.extend((0..k).map(SaltelliBlock::AB));
        if second_order {
            out.extend((0..k).map(SaltelliBlock::BA));
        }
        out.push(SaltelliBlock::B);
        out
    }

    pub fn label(self) -> String {
        match self {
            SaltelliBlock::A => "A".into(),
            SaltelliBlock::B => "B".into(),
            SaltelliBlock::AB(i) => format!("AB_{i}"),
            SaltelliBlock::BA(i) => format!("BA_{i}"),
        }
    }

    pub fn parse(label: &str) -> Option<Self> {
        match label {
            "A" => Some(SaltelliBlock::A),
            "B" => Some(SaltelliBlock::B),
            _ => {
                let (kind, idx) = label.split_once('_')?;
                let i = idx.parse().ok()?;
                match kind {
                    "AB" => Some(SaltelliBlock::AB(i)),
                    "BA" => Some(SaltelliBlock::BA(i)),
                    _ => None,
                }
            }
        }
    }
}

/// Saltelli cross-sampling built from a `2k`-dimensional Sobol sequence.
///
/// Returns the rows and layout metadata (`n_base`, `k`, `second_order`,
/// `block_order`); row `j * block_order.len() + r` is base sample `j` in
/// block role `block_order[r]`.
pub fn saltelli_design(
    n_base: usize,
    k: usize,
    second_order: bool,
) -> Result<DesignWithMeta, SamplingError> {
    if k == 0 {
        return Err(SamplingError::InvalidRequest("Saltelli design needs k >= 1".into()));
    }
    if 2 * k > MAX_SOBOL_DIM {
        return Err(SamplingError::DimensionUnsupported(2 * k));
    }
    let base = sobol_points(2 * k, 0, n_base)?;
    let layout = SaltelliBlock::layout(k, second_order);
    let mut rows = Vec::with_capacity(n_base * layout.len());
    for p in &base {
        let (a, b) = p.split_at(k);
        for role in &layout {
            let row = match *role {
                SaltelliBlock::A => a.to_vec(),
                SaltelliBlock::B => b.to_vec(),
                SaltelliBlock::AB(i) => {
                    let mut r = a.to_vec();
                    r[i] = b[i];
                    r
                }
                SaltelliBlock::BA(i) => {
                    let mut r = b.to_vec();
                    r[i] = a[i];
                    r
                }
            };
            rows.push(row);
        }
    }
    let mut meta = Map::new();
    meta.insert("layout".into(), Value::from("saltelli"));
    meta.insert("n_base".into(), Value::from(n_base));
    meta.insert("k".into(), Value::from(k));
    meta.insert("second_order".into(), Value::from(second_order));
    meta.insert(
        "block_order".into(),
        Value::Array(layout.iter().map(|b| Value::from(b.label())).collect()),
    );
    Ok((rows, meta))
}

/// Frequency assignment of one eFAST search curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EfastCurve {
    pub driver: usize,
    /// Frequency per factor, driver included.
    pub frequencies: Vec<usize>,
}

/// Driver frequency for a curve of `n` points and `m` harmonics.
pub fn efast_omega_max(n: usize, m: usize) -> usize {
    (n - 1) / (2 * m)
}

/// Non-driver frequencies are spread evenly over `1..=comp_max`; with fewer
/// slots than factors they wrap round-robin.
fn complementary_frequency(slot: usize, others: usize, comp_max: usize) -> usize {
    if others <= 1 {
        1
    } else if comp_max >= others {
        1 + (comp_max - 1) * slot / (others - 1)
    } else {
        slot % comp_max + 1
    }
}

/// Extended FAST search-curve sampling: `k` curves of `n_per_curve` points.
///
/// `phase_seed = None` uses zero phase shifts.
pub fn efast_design(
    n_per_curve: usize,
    k: usize,
    harmonics: usize,
    phase_seed: Option<u64>,
) -> Result<DesignWithMeta, SamplingError> {
    if harmonics == 0 {
        return Err(SamplingError::InvalidRequest("eFAST needs at least one harmonic".into()));
    }
    if k < 2 {
        return Err(SamplingError::InvalidRequest("eFAST needs at least two factors".into()));
    }
    let minimum = efast_min_samples(harmonics) as usize;
    if n_per_curve < minimum || n_per_curve.is_multiple_of(2) {
        return Err(SamplingError::SampleSizeTooSmall {
            minimum: if n_per_curve < minimum { minimum } else { n_per_curve + 1 },
            got: n_per_curve,
        });
    }
    let omega_max = efast_omega_max(n_per_curve, harmonics);
    let comp_max = (omega_max / (2 * harmonics)).max(1);
    let n = n_per_curve as f64;
    let grid: Vec<f64> =
        (0..n_per_curve).map(|t| PI * (2.0 * t as f64 + 1.0 - n) / n).collect();

    let mut rows = Vec::with_capacity(k * n_per_curve);
    let mut curves = Vec::with_capacity(k);
    for driver in 0..k {
        let mut freqs = vec![0usize; k];
        let mut slot = 0;
        for (j, f) in freqs.iter_mut().enumerate() {
            if j == driver {
                *f = omega_max;
            } else {
                *f = complementary_frequency(slot, k - 1, comp_max);
                slot += 1;
            }
        }
        let phases = match phase_seed {
            Some(seed) => efast_phases(seed, driver, k),
            None => vec![0.0; k],
        };
        for s in &grid {
            rows.push(
                freqs
                    .iter()
                    .zip(&phases)
                    .map(|(&w, &phi)| {
                        let v = 0.5 + ((w as f64 * s + phi).sin()).asin() / PI;
                        v.clamp(0.0, 1.0)
                    })
                    .collect(),
            );
        }
        curves.push(EfastCurve { driver, frequencies: freqs });
    }

    let mut meta = Map::new();
    meta.insert("layout".into(), Value::from("efast"));
    meta.insert("n_per_curve".into(), Value::from(n_per_curve));
    meta.insert("harmonics".into(), Value::from(harmonics));
    meta.insert("omega_max".into(), Value::from(omega_max));
    meta.insert("phase_seed".into(), phase_seed.map_or(Value::Null, Value::from));
    meta.insert(
        "curves".into(),
        serde_json::to_value(&curves).expect("curves serialize"),
    );
    Ok((rows, meta))
}
