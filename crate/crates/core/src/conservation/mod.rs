pub mod certificate;
pub mod energy;
pub mod frame;
pub mod hamiltonian;
pub mod lyapunov;
pub mod rate;

pub use certificate::{
    bound_certificate, conservation_certificate, monotone_certificate, Certificate, CertificateKind,
};
pub use energy::EnergyBreakdown;
pub use frame::{conjugate_momentum, from_dilated, to_dilated, DilatedFrame};
pub use rate::RateBound;
