#pragma once

#include <cstdint>

#include "ingest.hpp"

namespace leadwarn::synth {

// Generator knobs. Background traffic draws addresses from a Zipf popularity
// law, log-normal USD amounts, and exponential inter-arrival gaps. Anomalies
// are contiguous bursts where one fresh hub address fans in/out to a
// counterparty pool with near-uniform amounts at compressed gaps. The burst
// signature leaks weakly into the rows before each burst: extra hub rows at
// reduced amplitude, injected with linearly ramping density whose mean is
// precursor_rate_elevation (label 0), so the stream rate rises ahead of the
// event.
struct SynthConfig {
  std::size_t n_rows = 20000;
  std::size_t n_addresses = 2000;
  double anomaly_prevalence = 0.05;  // in (0, 0.5)
  double burst_length_mean = 100.0;  // rows per burst
  double burst_length_spread = 0.2;  // uniform half-width, fraction of the mean
  double hub_fraction = 0.1;         // counterparty pool size fraction
  std::uint64_t seed = 0;
  double amount_log_mean = 4.0;
  double amount_log_std = 1.0;
  double arrival_rate = 1.0 / 60.0;  // background events per second
  double precursor_rate_elevation = 0.2;
  std::size_t precursor_rows = 300;
  double precursor_amplitude = 1.0;  // leak amount as a burst-amplitude fraction
  double burst_gap_compression = 5.0;
  bool zipf_addresses = true;
  double zipf_exponent = 1.2;

  void validate() const;
};

// Deterministic labeled stream; label-1 rows form contiguous bursts and the
// realized prevalence equals round(prevalence * n_rows) / n_rows exactly.
ingest::TransactionLog generate_stream(const SynthConfig& cfg);

// Least-squares slope of ln(degree) vs ln(rank) over the top decile of the
// address degree rank-frequency curve. Requires >= 1000 rows.
double degree_tail_check(const ingest::TransactionLog& log);

}  // namespace leadwarn::synth
