pub mod asymptotics;
pub mod electrostatics;
pub mod ensemble;
pub mod numerics;
