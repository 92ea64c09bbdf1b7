//! Every numerical default used by the command-line tool.
//!
//! | name                | value    | used by                                    |
//! |---------------------|----------|--------------------------------------------|
//! | `SEED`              | 0        | `make haar`, `make circulant`, `sweep`     |
//! | `ITERATE_STEPS`     | 10 000   | `iterate` (maximum applications of Φ)      |
//! | `ITERATE_TOL`       | 1e-12    | `iterate` (stop when max abs step <= tol)  |
//! | `CERTIFICATE_TOL`   | 1e-9     | `analyze --dim2` (relative determinants)   |
//! | `SWEEP_SAMPLES`     | 1000     | `sweep`                                    |
//! | `P1`                | 0.7      | `make sigmaxx`                             |
//! | `THETA`             | π/4      | `make sigmaxx`                             |
//!
//! Rank decisions use the library's relative policy
//! (`1e3 · max(rows, cols) · ε · σ_max`) unless `--rank-tol` is given.
//! The environment spectrum defaults to `λ_j ∝ n - j` (`make`, `sweep`).
//! The minimum phase margin for generated circulants is
//! `repchan::circulant::default_min_margin(n)`. Input states and
//! unitaries are validated at `max(1e-10, 1e3 · ε)`.

pub const SEED: u64 = 0;
pub const ITERATE_STEPS: usize = 10_000;
pub const ITERATE_TOL: f64 = 1e-12;
pub const CERTIFICATE_TOL: f64 = repchan::dim2::DEFAULT_TOL;
pub const SWEEP_SAMPLES: usize = 1000;
pub const P1: f64 = 0.7;
pub const THETA: f64 = std::f64::consts::FRAC_PI_4;
