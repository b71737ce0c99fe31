pub mod cases;
pub mod oracles;
pub mod tables;
