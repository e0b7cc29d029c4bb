//! Exact computation in R. Thompson's group V and in the group QAut(T_2,c)
//! of quasi-automorphisms of the infinite 2-edge-coloured binary tree.
//!
//! * [`prefix_words`]: binary words, the prefix order, complete antichains.
//! * [`thompson_v`]: elements of V as reduced prefix-replacement tables.
//! * [`qaut`]: quasi-automorphisms in canonical cutoff form, decompositions.
//! * [`embeddings`]: the embeddings `theta: V → QAut` and `phi: QAut → V`.
//! * [`dynamics`]: fixed points, periodic orbits, torsion, slope spectra.
//! * [`bs_embed`]: Baumslag–Solitar groups `BS(m, ±m)` realized inside V.
//! * [`format`]: text and JSON element formats.
//! * [`selfcheck`]: seeded property suites behind the acceptance tests and
//!   the `selfcheck` command.

pub mod bs_embed;
pub mod dynamics;
pub mod embeddings;
pub mod error;
pub mod format;
pub mod par;
pub mod prefix_words;
pub mod qaut;
pub mod selfcheck;
pub mod thompson_v;

pub use error::{Error, Result};
pub use prefix_words::{Antichain, PrefixRelation, Word};
pub use qaut::QAutElement;
pub use thompson_v::VElement;
