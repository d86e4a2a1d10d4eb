//! Simulation of an integrated, temporal all-optical FFT.
//!
//! An `N = 2^m` point transform is realised as a tree of `N - 1` delayed
//! Mach-Zehnder interferometers. Stage `s` delays one arm by `T / 2^s`
//! (with `T = 1 / f_s`) and applies a static twiddle phase, so every output
//! port becomes an `N`-tap FIR comb that computes one bin of a sliding DFT.
//!
//! The crate is organised by subsystem:
//!
//! - [`photonic`]: 2x2 transfer matrices, couplers, delay lines, dB and
//!   geometry conversions.
//! - [`network`]: the butterfly builder, frequency responses, the
//!   discrete-time simulator and the output sampler.
//! - [`oracle`]: the naive reference DFT and port matching.
//! - [`sensitivity`]: phase/delay/loss sweeps, SNR, mismatch ratio, figure
//!   of merit, crosstalk tolerance and extinction ratio.
//! - [`thermal`]: thermo-optic heater conversions.
//! - [`scaling`]: loss, power and area budgets versus an electronic baseline.
//! - [`config`], [`output`] and [`cli`]: the file formats and the `offt`
//!   command line.
//!
//! ```
//! use offt::network::{NetworkParams, OfftNetwork};
//! use offt::oracle::dft;
//! use num_complex::Complex64;
//!
//! let net = OfftNetwork::build(&NetworkParams::ideal(4, 10e9)).unwrap();
//! let window = [1.0, 2.0, -1.0, 0.5].map(|re| Complex64::new(re, 0.0));
//! // time order is oldest first; the DFT window is newest first
//! let input: Vec<_> = window.iter().rev().copied().collect();
//! let trace = offt::network::time_simulate(&net, &input).unwrap();
//! let frame = &offt::network::sample_outputs(&trace, 0).unwrap()[0];
//! let bins = dft(&window);
//! for (out, bin) in frame.iter().zip(&bins) {
//!     assert!((out - bin / 4.0).norm() < 1e-12);
//! }
//! ```

pub mod cli;
pub mod config;
pub mod error;
pub mod network;
pub mod oracle;
pub mod output;
pub mod photonic;
pub mod scaling;
pub mod sensitivity;
pub mod thermal;

pub use error::{OfftError, Result};
pub use photonic::ComplexAmplitude;
