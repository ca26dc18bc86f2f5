pub mod arith;
pub mod cotangent;
pub mod linalg;
pub mod model;
pub mod parse;
pub mod sphere;
pub mod symmetry;
pub mod tensor;
pub mod verify;
