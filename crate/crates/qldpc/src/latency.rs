//! Closed-form latency estimates for decoder architectures.
//!
//! All estimates are products of the clock period with an iteration and
//! a work term:
//!
//! - **parallel**: `T · 2 · it` — two clock cycles per iteration, `it`
//!   iterations run by the parallel decoder;
//! - **serial**: `T · (it/2) · m` — one check per cycle over `m`
//!   checks; `it` is the parallel-equivalent budget, of which the
//!   serial decoder needs about half;
//! - **layered**: `T · 2 · it · k` — two cycles per layer, `k` layers
//!   per iteration (fractional layer numbers are accepted), `it`
//!   iterations run by the layered decoder.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{architecture} latency needs {field}")]
    MissingField {
        architecture: Architecture,
        field: &'static str,
    },
    #[error("{field} must be positive")]
    NotPositive { field: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    Parallel,
    Serial,
    Layered,
}

impl std::fmt::Display for Architecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Architecture::Parallel => "parallel",
            Architecture::Serial => "serial",
            Architecture::Layered => "layered",
        })
    }
}

/// Inputs of a latency estimate. `m` is only needed for the serial
/// architecture, `fractional_layers` (k/t) only for the layered one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyQuery {
    pub architecture: Architecture,
    pub clock_period_ns: f64,
    pub it_max: u32,
    pub m: Option<usize>,
    pub fractional_layers: Option<f64>,
}

/// Estimated decoding latency in nanoseconds.
pub fn latency_ns(query: &LatencyQuery) -> Result<f64, Error> {
    if !(query.clock_period_ns > 0.0 && query.clock_period_ns.is_finite()) {
        return Err(Error::NotPositive {
            field: "clock_period_ns",
        });
    }
    if query.it_max == 0 {
        return Err(Error::NotPositive { field: "it_max" });
    }
    let clock = query.clock_period_ns;
    let it = f64::from(query.it_max);
    match query.architecture {
        Architecture::Parallel => Ok(clock * 2.0 * it),
        Architecture::Serial => {
            let m = query.m.ok_or(Error::MissingField {
                architecture: query.architecture,
                field: "m",
            })?;
            if m == 0 {
                return Err(Error::NotPositive { field: "m" });
            }
            Ok(clock * (it / 2.0) * m as f64)
        }
        Architecture::Layered => {
            let k = query.fractional_layers.ok_or(Error::MissingField {
                architecture: query.architecture,
                field: "fractional_layers",
            })?;
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::NotPositive {
                    field: "fractional_layers",
                });
            }
            Ok(clock * 2.0 * it * k)
        }
    }
}
