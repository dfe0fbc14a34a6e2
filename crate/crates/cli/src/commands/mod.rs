pub mod channel_sample;
pub mod compile;
pub mod estimate;
pub mod ghz;
