//! Exact computation of the 3-parts of wild and tame kernels of quadratic fields
//! and of the splitting of WK₂(k){3} ⊆ K₂(o_k){3}.
//!
//! Layers, bottom up:
//! - [`exactalg`]: HNF/SNF and finite abelian groups.
//! - [`galmod`]: finite Galois modules, twists, eigenspaces, section solving.
//! - [`quadclass`]: class groups of quadratic fields by binary quadratic forms.
//! - [`lvalues`]: Kronecker characters, B₂,χ and the Birch–Tate 3-part.
//! - [`nfengine`]: number fields, a small relation-search class group engine, record ingestion and cache.
//! - [`iwasawa`]: tower data, stabilization, Ψ and the m = 1 criterion kernel.
//! - [`kernelctl`]: the decision pipeline producing a [`KernelReport`].

pub mod error;
pub mod exactalg;
pub mod galmod;
pub mod iwasawa;
pub mod kernelctl;
pub mod lvalues;
pub mod nfengine;
pub mod quadclass;

pub use error::{Error, Result};
pub use exactalg::{FiniteAbelianGroup, GroupHom, IntMatrix};
pub use kernelctl::{analyze, scan, DataSources, KernelReport, Structure, Verdict};
pub use nfengine::{Assurance, ClassGroupRecord, NumberFieldDesc};
pub use quadclass::QuadDiscriminant;
