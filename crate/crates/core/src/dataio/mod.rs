//! File formats and the glue between them and the engine.

pub mod lattice_file;
pub mod query;
pub mod spec;
pub mod table;

pub use lattice_file::{parse_lattice_table, read_lattice_table};
pub use query::{answer_query, lambda_description, pull_back, Dataset, QueryMap};
pub use spec::{flavor_from_ops, load_std_diagram, DiagramSpec, LatticeDecl};
pub use table::{read_distribution, read_relation, read_similarity, relation_to_string, write_relation};
