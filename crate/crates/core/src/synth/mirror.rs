use super::circuit::Circuit;
use crate::error::{Error, Result};

/// Replaces application `index` by its mirror gate `U_d(π/4, π/4, π/4) · G`.
///
/// The mirror gate is `e^{iπ/4} SWAP · G`, so the SWAP is carried through
/// everything applied later: those layers have their factors exchanged and
/// later gates are swap-conjugated. The result evaluates exactly to
/// `U_d(π/4, π/4, π/4) · evaluate(c)`.
pub fn mirror_rewrite(c: &Circuit, index: usize) -> Result<Circuit> {
    let n = c.n();
    if index >= n {
        return Err(Error::IndexOutOfRange { index, n });
    }
    c.validate()?;
    let gates = c
        .gates()
        .into_iter()
        .enumerate()
        .map(|(i, g)| match i.cmp(&index) {
            std::cmp::Ordering::Less => g,
            std::cmp::Ordering::Equal => g.mirrored(),
            std::cmp::Ordering::Greater => g.swap_conjugated(),
        })
        .collect();
    let layers = c
        .layers
        .iter()
        .enumerate()
        .map(|(k, l)| if k > index { l.swapped() } else { *l })
        .collect();
    Ok(Circuit::from_slots(c.phase, layers, gates, c.base.clone()))
}
