pub mod certjson;
pub mod drivers;
pub mod pipeline;
