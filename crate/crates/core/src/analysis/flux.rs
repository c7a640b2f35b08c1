use crate::error::Result;
use crate::operators::DiffractionOperator;

/// `b₁ u′(Γ⁻) − b₂ u′(Γ⁺)` from the two elements adjacent to the interface node.
pub fn flux_jump(op: &DiffractionOperator, u: &[f64]) -> Result<f64> {
    op.check(u)?;
    let nodes = op.mesh().nodes();
    let k = op.mesh().interface_index();
    let left = (u[k] - u[k - 1]) / (nodes[k] - nodes[k - 1]);
    let right = (u[k + 1] - u[k]) / (nodes[k + 1] - nodes[k]);
    let b = op.diffusion();
    Ok(b.b1() * left - b.b2() * right)
}
