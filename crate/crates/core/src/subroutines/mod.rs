pub mod list_coloring;
pub mod ruling;
pub mod split;
