//! Representation side: the modules L(λ_i), the bases of ⟨Y_i(z)⟩, the
//! algebra U_q(sl_(n+1))_z with its modules L(λ_i)_z, and the isomorphism Ω.

mod basis;
mod fdmodule;
mod graph;
mod independence;
mod lemmas;
mod matrix;
mod omega;
mod uqz;

use thiserror::Error;

use crate::voperator::EngineError;

pub use basis::{
    decompose, enumerate_basis, enumerate_bminus, enumerate_ybasis, psi_product, BMinusElement, BasisAction,
    BasisElementB, BasisElementJson, BasisLabel, Head, PsiFactor, YBasis,
};
pub use fdmodule::{
    all_sequences, epath_by_pairing, fd_module, fpath_by_pairing, nonzero_epath, nonzero_fpath, FDModule, RelationCheck,
};
pub use graph::{figure_caps, figure_sl2, figure_sl3, ActionGraph, GraphEdgeJson, GraphJson, GraphNode};
pub use independence::{independence_rank, IndependenceConfig, IndependenceReport};
pub use lemmas::{
    drinfeld_checks, predicted_shift, shift_table, sweep_lemmas, vacuum_survivors, DrinfeldCheck, LemmaMismatch, LemmaSweep, ShiftRow,
};
pub use matrix::{rank, rank_mod_p, reduce_mod_p, Matrix, RANK_PRIME};
pub use omega::{
    build_omega, module_name, ActionComparison, ActionJson, DiagramCheck, OmegaPairJson, OmegaReport, OmegaReportJson, TIE_BREAK,
};
pub use uqz::{
    build_lz_basis, build_uqz, e_series, l_exponents, lz_rank, u_difference, CAction, CElement, CLabel, Caps, EFactor, LzBasis,
    Uqz, ZSeriesVector,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("path-condition and matrix oracles disagree: {0}")]
    OracleMismatch(String),
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("operator is not a scalar multiple of a basis element: {0}")]
    NotBasisForm(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}
