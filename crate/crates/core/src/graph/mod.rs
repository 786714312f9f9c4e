//! Graphs as functions on `V × V`, with cut atoms and regularity lemmas.

mod cut;
mod edge;
mod pair;
mod partition;

pub use cut::{cut_atom_search, cut_atoms, CutAtom, CutAtoms, EXHAUSTIVE_MAX_N};
pub use edge::{edge_density, EdgeFunction};
pub use pair::{regular_pair_check, PairCheckMode, PairReport, Verdict, Witness, EXACT_MAX_PART};
pub use partition::{
    szemeredi_regularize, weak_regularize, PairRecord, RegularityPartition, SzemerediConfig,
    WeakRegularity,
};
