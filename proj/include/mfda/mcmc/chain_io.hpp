#pragma once

#include <string>

#include "mfda/mcmc/chain.hpp"

namespace mfda {

/// Writes the chain as CSV with header
///   iter,theta_0,...,theta_{m-1},log_like,accepted
/// using round-trip double formatting. Written atomically.
void write_chain_csv(const Chain& chain, const std::string& path);

/// Reads a chain CSV written by write_chain_csv. Per-level counters and
/// timings live in the sidecar and are not recovered here.
Chain read_chain_csv(const std::string& path);

/// Sidecar JSON carrying what the CSV cannot: per-level proposal and accept
/// counts, acceptance rates, the chain seed and wall time.
void write_chain_sidecar(const Chain& chain, const std::string& path);

}  // namespace mfda
