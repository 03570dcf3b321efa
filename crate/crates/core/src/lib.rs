//! Link-traversal evaluation of SPARQL queries over Linked Data.
//!
//! A query is answerable by traversal when every variable can be reached
//! from an IRI it mentions: dereference that IRI, match what comes back,
//! dereference the IRIs just bound, and so on. The crate decides that
//! ([`answerability`]), rewrites such queries into `SERVICE`-anchored form
//! ([`transform`]) and evaluates the rewritten plan against the web or an
//! in-memory fixture web ([`exec`]). [`pattern`] and [`analyzer`] mine query
//! logs for structural templates.
//!
//! ```
//! use ldtraverse::answerability::is_ldaq;
//! use ldtraverse::sparql::{parse, repair};
//! use ldtraverse::transform::{to_sparql_ld, transform_query};
//!
//! let q = parse(&repair("SELECT ?d WHERE { dbr:Barack_Obama dbo:birthDate ?d }")).unwrap();
//! assert!(is_ldaq(&q.pattern).answerable);
//! let plan = transform_query(&q.pattern).unwrap();
//! assert!(to_sparql_ld(&q, &plan).contains("SERVICE <http://dbpedia.org/resource/Barack_Obama>"));
//! ```

pub mod analyzer;
pub mod answerability;
pub mod cli;
pub mod exec;
pub mod pattern;
pub mod rdf;
pub mod sparql;
pub mod transform;
