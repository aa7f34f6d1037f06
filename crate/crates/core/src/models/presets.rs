//! Standard evaluation parameter sets.

use super::{NetworkModel, Topology};

/// `(delta, delta_e)` pairs for the Y evaluation network.
pub const Y_LINKS: [(f64, f64); 3] = [(0.2, 0.05), (0.3, 0.05), (0.25, 0.05)];
/// `(delta, delta_e)` pairs for the RY evaluation network.
pub const RY_LINKS: [(f64, f64); 3] = [(0.1, 0.1), (0.2, 0.05), (0.3, 0.15)];
pub const RY_D0: f64 = 0.4;
/// `(delta, delta_e)` pairs for the X evaluation network.
pub const X_LINKS: [(f64, f64); 5] = [(0.1, 0.1), (0.2, 0.05), (0.3, 0.15), (0.4, 0.35), (0.5, 0.2)];

/// Every link nearly dead for the legitimate receiver and nearly
/// transparent to the eavesdropper.
pub const HARSH_LINK: (f64, f64) = (0.99, 0.01);

pub fn y_network() -> NetworkModel {
    NetworkModel::y(Y_LINKS).expect("valid preset")
}

pub fn ry_network() -> NetworkModel {
    NetworkModel::ry(RY_LINKS, RY_D0).expect("valid preset")
}

pub fn x_network() -> NetworkModel {
    NetworkModel::x(X_LINKS).expect("valid preset")
}

pub fn evaluation(topology: Topology) -> NetworkModel {
    match topology {
        Topology::Y => y_network(),
        Topology::Ry => ry_network(),
        Topology::X => x_network(),
    }
}

/// All links set to [`HARSH_LINK`]; RY gets `d0 = 1`.
pub fn harsh(topology: Topology) -> NetworkModel {
    match topology {
        Topology::Y => NetworkModel::y([HARSH_LINK; 3]),
        Topology::Ry => NetworkModel::ry([HARSH_LINK; 3], 1.0),
        Topology::X => NetworkModel::x([HARSH_LINK; 5]),
    }
    .expect("valid preset")
}
