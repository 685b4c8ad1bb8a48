pub mod arith;
pub mod construct;
pub mod geometry;
pub mod gf;
pub mod logsig;
pub mod matgrp;
pub mod matrix;
pub mod refute;
