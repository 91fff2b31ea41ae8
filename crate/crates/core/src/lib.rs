//! Multi-CCS: process terms with strong prefixing, their transition
//! semantics, their P/T net semantics and the translation back from nets.

mod combine;
pub mod check;
pub mod dot;
pub mod env;
pub mod equiv;
pub mod error;
pub mod gen;
mod lex;
pub mod lts;
pub mod multiset;
pub mod net;
pub mod netfmt;
pub mod net2term;
pub mod normal;
pub mod parse;
pub mod sync;
pub mod term;

pub use check::{check_wellformed, classify_finite_net, FragmentReport, Violation, WellFormedReport};
pub use env::{free_names, substitute, Env};
pub use error::{Error, Result};
pub use lts::{build_lts, explore, step, Budget, Lts, Semantics, State};
pub use multiset::Multiset;
pub use normal::{normalize, normalize_with, NormalForm, NormalizeOptions};
pub use parse::{parse_program, parse_sequence, parse_term, Program};
pub use sync::{is_sync, sync_outcomes, SyncMode, SyncTable};
pub use term::{Action, ConstRef, Name, Sequence, Term};
pub use net::{
    build_net, dec, derive_transitions, is_reduced, is_safe, marking_graph, FreshAllocator,
    Marking, NetSession, PTNet, Place, PlaceId, Transition, Verdict,
};
pub use netfmt::{parse_net, print_net};
pub use net2term::{is_ccs_net, translate, TranslationNames};
pub use equiv::{bisimilar, holds, isomorphic, net_bisimilar, verify_bisimulation, verify_isomorphism, BisimResult, Formula, IsoWitness};
pub use dot::{lts_to_dot, net_to_dot};
