//! Control-based segmentation of expert/client dialogue transcripts.
//!
//! The pipeline classifies utterances, assigns control turn by turn, groups
//! turns into phases, classifies each control shift by its signal and audits
//! cue words. Topic analysis works from adjudicated judge votes, and a small
//! belief-state engine decides when a listener ought to interrupt.

pub mod classifier;
pub mod control;
pub mod interruption;
pub mod report;
pub mod shifts;
pub mod text;
pub mod topics;
pub mod transcript;
