use serde::{Deserialize, Serialize};

use super::TimingError;

/// Serialized packet layout of one cache line on the link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlitPlan {
    pub flit_bytes: u32,
    pub data_flits: u32,
    /// CMD/ADDR initiator flits.
    pub extra_flits: u32,
}

impl FlitPlan {
    pub fn total_flits(&self) -> u32 {
        self.data_flits + self.extra_flits
    }
}

pub fn flit_plan(line_bytes: u32, flit_bytes: u32) -> Result<FlitPlan, TimingError> {
    if flit_bytes == 0 {
        return Err(TimingError::Invalid("flit_bytes must be positive".into()));
    }
    Ok(FlitPlan {
        flit_bytes,
        data_flits: line_bytes.div_ceil(flit_bytes),
        extra_flits: 1,
    })
}
