//! Optical glyph recognition: scanned SignWriting pages to SWML drafts.
//!
//! binarize → connected components → blob grouping → features →
//! classification → column/sign segmentation → human review.

mod binarize;
mod classify;
mod components;
mod features;
mod grouping;
mod pipeline;
mod render;
mod review;
mod segment;

pub use binarize::{binarize, otsu_threshold, Binarization};
pub use classify::{classify, normalized_grid, similarity, Template, TemplateIndex, COMPACTNESS_FACTOR, GRID, HOLE_TOLERANCE};
pub use components::{extract_components, ComponentBlob, Run, DEFAULT_MIN_AREA};
pub use features::{crack_perimeter, euler_number, extract_features, zhang_suen, FeatureVector};
pub use grouping::{group_blobs, GlyphCandidate};
pub use pipeline::{overlay, recognize, Alternate, OgrConfig, RecognitionResult, RecognizedGlyph, Recognizer, UnresolvedCandidate, UnresolvedReason};
pub use render::{render_page, synth_document, RenderOptions, RenderedGlyph, RenderedPage, SynthSpec};
pub use review::{apply_review, ReviewEdit, ReviewOutcome, SplitPart};
pub use segment::{segment_signs, SegmentConfig, Segmentation};

use crate::raster::RasterError;
use crate::swml::SwmlError;

#[derive(Debug, thiserror::Error)]
pub enum OgrError {
    #[error("page has no usable contrast")]
    DegenerateImage,
    #[error("no catalog glyph family fits the candidate")]
    NoCandidates,
    #[error("invalid review edit: {0}")]
    InvalidEdit(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Swml(#[from] SwmlError),
}
