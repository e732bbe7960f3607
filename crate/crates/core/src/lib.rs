//! Numerical and text-processing core for curating web images into a
//! weakly-supervised class-incremental segmentation pipeline.
//!
//! Everything here is pure computation over owned buffers: no filesystem,
//! no threads, no clock. The crate is `no_std` and only needs `alloc`, so
//! it can be embedded wherever a global allocator exists. File formats,
//! manifests, backends and the command-line driver live in the `curator`
//! crate on top of this one.
//!
//! Module map:
//!
//! - [`imaging`]: raster images, grayscale projection, bilinear resizing,
//!   2D DFT and the log-amplitude spectrum feature adapter.
//! - [`discriminator`]: a small MLP trained by SGD to tell dataset spectra
//!   from web spectra, and the acceptance gate built on it.
//! - [`lexicon`]: per-class word sets, caption matching and multi-hot
//!   image-level labels.
//! - [`semfilter`]: WordNet noun graph, hypernym depth descriptors and the
//!   caption-pair filter used for rehearsal.
//! - [`wilss`]: pooling, smoothing, pseudo-label fusion and the loss stack
//!   with analytic gradients.
//! - [`toy`]: a per-pixel linear model that trains end to end on the loss
//!   stack.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod discriminator;
pub mod imaging;
pub mod lexicon;
pub mod semfilter;
pub mod toy;
pub mod wilss;

mod rng;
