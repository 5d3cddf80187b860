//! Builders for the linear, star, binary-tree, k-ary fat-tree and spine-leaf
//! topologies, and `dump`/`links`/dot views of the result.

mod build;
mod inspect;
mod model;

pub use build::{build, Census, TopologyKind, TopologySpec};
pub use inspect::{dump, export_dot, links};
pub use model::{
    Endpoint, HostId, HostNode, LinkId, LinkParams, LinkSpec, NetworkModel, NodeId, Port, PortNo,
    SwitchEdge, SwitchId, SwitchNode,
};
