// Copyright 2026 sqzsync Contributors
// SPDX-License-Identifier: Apache-2.0

//! Minimal library walkthrough: steady state, synchronization peak, and
//! optimal drive for a squeezed-vacuum reservoir. This is the snippet shown
//! in the README, kept compiling here.

use sqzsync::metrics::{epsilon_opt, steady_s_max};
use sqzsync::{steady_state, Result, SystemParams};

fn main() -> Result<()> {
    let p = SystemParams::new(0.0, 1.5, 0.0, 0.0, 0.5)?;
    let state = steady_state(&p)?; // cross-checked Bloch vector
    let peak = steady_s_max(&p)?; // S_max and locked phase
    let opt = epsilon_opt(&p)?; // optimal drive strength
    println!(
        "state ({:.4}, {:.4}, {:.4}); S_max {:.5} at phi* {:.5}; eps_opt {:.5}",
        state.x, state.y, state.z, peak.value, peak.phi_star, opt.eps
    );
    Ok(())
}
