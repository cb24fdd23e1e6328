//! Directional modulation engine: QPSK, per-port compensation, the two
//! transmit schemes, an AWGN receiver with a genie phase equalizer, and the
//! closed-form QPSK bit-error rate.

mod link;
mod qpsk;
mod session;
mod theory;

pub use link::{
    compensation_phase, effective_gain_switched, multiport_composite_gain, random_bits, receive_and_count,
    receive_symbols, transmit, transmit_multiport, transmit_switched, Emission, RxOutcome, TxPath, TxRecord,
};
pub use qpsk::{qpsk_demodulate, qpsk_modulate, qpsk_point, QPSK_POINTS};
pub use session::{DmSessionConfig, Scheme};
pub use theory::{q_function, theoretical_qpsk_ber};
