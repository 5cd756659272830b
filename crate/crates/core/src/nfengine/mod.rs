//! Number fields of small degree: polynomials, factorization, canonical layer fields,
//! class-group records and their cache, and a small relation-search class group engine.

pub mod cache;
pub mod engine;
pub mod factor;
pub mod field;
pub mod library;
pub mod poly;
pub mod record;

pub use field::{
    cyclotomic_compositum, layer_field, layer_field_bounded, layer_label, polynomial_for_label, quadratic_label,
    NumberFieldDesc,
};
pub use cache::{CacheStore, PutOutcome};
pub use engine::{class_group_generic, EngineOutput, EngineParams, PrimeIdeal};
pub use library::{record_files, RecordLibrary};
pub use poly::ZPoly;
pub use record::{
    ingest_record, parse_record, Assurance, ClassGroupRecord, NormMap, OrderRecord, ParsedRecord, Provenance,
};
