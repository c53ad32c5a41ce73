//! Network model: the alphabet, networks with classical protocols, the D3
//! normal form and the rewrite into it.

mod d3;
mod letter;
mod network;
mod normalize;

pub use d3::{D3Error, D3Network, D3Node, D3Role};
pub use letter::{GroupKind, IllegalMapError, Letter, LetterMap, MapClass, ParseLetterError};
pub use network::{
    validate_network, ClassicalProtocol, Edge, Instance, Network, NetworkFile, Node, NodeKind, OutputOp, Requirement,
    ResolvedOp, Term, ValidationReport, Violation,
};
pub use normalize::{normalize_to_d3, NodeCorrespondence, NormalizeError};
