#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "errors.hpp"

namespace leadwarn::synth {

namespace {

constexpr std::int64_t kStreamStart = 1704067200;  // 2024-01-01T00:00:00Z
constexpr double kUsdPerBtc = 60000.0;

std::string pad_number(std::uint64_t v, int width) {
  std::string s = std::to_string(v);
  if (static_cast<int>(s.size()) < width)
    s.insert(s.begin(), width - s.size(), '0');
  return s;
}

class AddressSampler {
 public:
  AddressSampler(std::size_t n, bool zipf, double exponent) : n_(n) {
    if (zipf) {
      cum_.reserve(n);
      double total = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        total += std::pow(static_cast<double>(k + 1), -exponent);
        cum_.push_back(total);
      }
    }
  }

  std::size_t draw(std::mt19937_64& rng) const {
    if (cum_.empty()) {
      std::uniform_int_distribution<std::size_t> d(0, n_ - 1);
      return d(rng);
    }
    std::uniform_real_distribution<double> d(0.0, cum_.back());
    const double u = d(rng);
    return static_cast<std::size_t>(
        std::lower_bound(cum_.begin(), cum_.end(), u) - cum_.begin());
  }

 private:
  std::size_t n_;
  std::vector<double> cum_;
};

struct RowEmitter {
  const SynthConfig& cfg;
  std::mt19937_64& rng;
  AddressSampler sampler;
  ingest::TransactionLog& log;
  std::int64_t ts = kStreamStart;
  std::uint64_t tx_counter = 0;
  std::exponential_distribution<double> bg_gap;
  std::exponential_distribution<double> fast_gap;
  std::normal_distribution<double> log_amount;
  std::uniform_real_distribution<double> burst_jitter{0.95, 1.05};

  RowEmitter(const SynthConfig& c, std::mt19937_64& r,
             ingest::TransactionLog& l)
      : cfg(c),
        rng(r),
        sampler(c.n_addresses, c.zipf_addresses, c.zipf_exponent),
        log(l),
        bg_gap(c.arrival_rate),
        fast_gap(c.arrival_rate * c.burst_gap_compression),
        log_amount(c.amount_log_mean, c.amount_log_std) {}

  void advance(double gap_seconds) {
    ts += std::max<std::int64_t>(1, std::llround(gap_seconds));
  }

  void push(const std::string& recv, const std::string& cp, double usd,
            int label) {
    ingest::TransactionRecord rec;
    rec.timestamp = ts;
    rec.recv_addr = recv;
    rec.counterparty_addr = cp;
    rec.tx_hash = "tx" + pad_number(tx_counter++, 12);
    rec.usd_value = usd;
    rec.btc_value = usd / kUsdPerBtc;
    rec.label = label;
    log.records.push_back(std::move(rec));
  }

  std::string addr_name(std::size_t idx) const {
    return "a" + pad_number(idx, 6);
  }

  void background_row() {
    advance(bg_gap(rng));
    std::size_t recv = sampler.draw(rng);
    std::size_t cp = sampler.draw(rng);
    if (cp == recv) cp = (cp + 1) % cfg.n_addresses;
    push(addr_name(recv), addr_name(cp), std::exp(log_amount(rng)), 0);
  }

  // One hub fan-in/out row against the burst's counterparty pool.
  void hub_row(const std::string& hub, std::size_t pool_offset,
               std::size_t pool_size, double amplitude, int label) {
    advance(fast_gap(rng));
    std::uniform_int_distribution<std::size_t> pick(0, pool_size - 1);
    const std::string other =
        addr_name((pool_offset + pick(rng)) % cfg.n_addresses);
    const double usd = amplitude * burst_jitter(rng);
    if (tx_counter % 2 == 0)
      push(hub, other, usd, label);  // fan-in
    else
      push(other, hub, usd, label);  // fan-out
  }
};

}  // namespace

void SynthConfig::validate() const {
  if (n_rows < 10)
    throw Error(ErrorCode::invalid_config, "n_rows must be at least 10");
  if (n_addresses < 2)
    throw Error(ErrorCode::invalid_config, "n_addresses must be at least 2");
  if (!(anomaly_prevalence > 0.0) || !(anomaly_prevalence < 0.5))
    throw Error(ErrorCode::invalid_config,
                "anomaly_prevalence must lie in (0, 0.5)");
  if (!(burst_length_mean >= 1.0))
    throw Error(ErrorCode::invalid_config, "burst_length_mean must be >= 1");
  if (!(burst_length_spread >= 0.0) || !(burst_length_spread < 1.0))
    throw Error(ErrorCode::invalid_config,
                "burst_length_spread must lie in [0, 1)");
  if (!(hub_fraction > 0.0) || hub_fraction > 1.0)
    throw Error(ErrorCode::invalid_config, "hub_fraction must lie in (0, 1]");
  if (!(arrival_rate > 0.0))
    throw Error(ErrorCode::invalid_config, "arrival_rate must be positive");
  if (!(amount_log_std >= 0.0))
    throw Error(ErrorCode::invalid_config, "amount_log_std must be >= 0");
  if (!(precursor_rate_elevation >= 0.0))
    throw Error(ErrorCode::invalid_config,
                "precursor_rate_elevation must be >= 0");
  if (!(precursor_amplitude >= 0.0))
    throw Error(ErrorCode::invalid_config, "precursor_amplitude must be >= 0");
  if (!(burst_gap_compression >= 1.0))
    throw Error(ErrorCode::invalid_config,
                "burst_gap_compression must be >= 1");
  if (!(zipf_exponent > 0.0))
    throw Error(ErrorCode::invalid_config, "zipf_exponent must be positive");
}

ingest::TransactionLog generate_stream(const SynthConfig& cfg) {
  cfg.validate();
  const auto n_anom = static_cast<std::size_t>(
      std::llround(cfg.anomaly_prevalence * static_cast<double>(cfg.n_rows)));
  if (n_anom == 0)
    throw Error(ErrorCode::invalid_config,
                "prevalence yields zero anomaly rows at this n_rows");
  const auto n_bursts = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(
             static_cast<double>(n_anom) / cfg.burst_length_mean)));

  std::mt19937_64 rng(cfg.seed);

  // Burst lengths drawn uniformly within spread of the mean, then rescaled
  // by cumulative rounding so labeled rows total exactly n_anom.
  std::vector<std::size_t> burst_len(n_bursts);
  {
    std::uniform_real_distribution<double> len_draw(
        (1.0 - cfg.burst_length_spread) * cfg.burst_length_mean,
        (1.0 + cfg.burst_length_spread) * cfg.burst_length_mean);
    std::vector<double> raw(n_bursts);
    double total = 0.0;
    for (auto& x : raw) {
      x = len_draw(rng);
      total += x;
    }
    double cum = 0.0;
    std::size_t assigned = 0;
    for (std::size_t b = 0; b < n_bursts; ++b) {
      cum += raw[b] / total * static_cast<double>(n_anom);
      const auto upto = static_cast<std::size_t>(std::llround(cum));
      burst_len[b] = upto - assigned;
      assigned = upto;
    }
  }

  const auto leak_per_burst = static_cast<std::size_t>(std::llround(
      cfg.precursor_rate_elevation * static_cast<double>(cfg.precursor_rows)));
  const std::size_t total_leak = leak_per_burst * n_bursts;
  if (n_anom + total_leak >= cfg.n_rows)
    throw Error(ErrorCode::invalid_config,
                "burst and precursor rows exceed n_rows");
  const std::size_t total_background = cfg.n_rows - n_anom - total_leak;

  // Background gaps around the bursts; precursors occupy each gap's tail.
  std::vector<std::size_t> gap_len(n_bursts + 1,
                                   total_background / (n_bursts + 1));
  for (std::size_t g = 0; g < total_background % (n_bursts + 1); ++g)
    gap_len[g] += 1;
  for (std::size_t b = 0; b < n_bursts; ++b)
    if (gap_len[b] < cfg.precursor_rows + 1)
      throw Error(ErrorCode::invalid_config,
                  "precursor_rows too large for the burst spacing");

  ingest::TransactionLog log;
  log.source_id = "synth";
  log.records.reserve(cfg.n_rows);
  RowEmitter emit(cfg, rng, log);

  const auto pool_size = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::llround(
             cfg.hub_fraction * static_cast<double>(cfg.n_addresses))));
  const double burst_amp =
      std::exp(cfg.amount_log_mean + 2.0 * cfg.amount_log_std);
  std::uniform_int_distribution<std::size_t> offset_pick(0,
                                                         cfg.n_addresses - 1);

  for (std::size_t b = 0; b < n_bursts; ++b) {
    const std::string hub = "hub" + pad_number(b, 4);
    const std::size_t pool_offset = offset_pick(rng);
    const std::size_t plain = gap_len[b] - cfg.precursor_rows;
    for (std::size_t i = 0; i < plain; ++i) emit.background_row();

    // Precursor: background rows with leak rows diffused at linearly
    // ramping density (mean = precursor_rate_elevation).
    std::size_t emitted_leaks = 0;
    double acc = 0.0;
    for (std::size_t j = 0; j < cfg.precursor_rows; ++j) {
      emit.background_row();
      if (leak_per_burst == 0) continue;
      const double ramp =
          0.5 + static_cast<double>(j) /
                    std::max(1.0, static_cast<double>(cfg.precursor_rows - 1));
      acc += ramp * static_cast<double>(leak_per_burst) /
             static_cast<double>(cfg.precursor_rows);
      while (acc >= 1.0 && emitted_leaks < leak_per_burst) {
        emit.hub_row(hub, pool_offset, pool_size,
                     cfg.precursor_amplitude * burst_amp, 0);
        ++emitted_leaks;
        acc -= 1.0;
      }
    }
    while (emitted_leaks < leak_per_burst) {
      emit.hub_row(hub, pool_offset, pool_size,
                   cfg.precursor_amplitude * burst_amp, 0);
      ++emitted_leaks;
    }

    for (std::size_t i = 0; i < burst_len[b]; ++i)
      emit.hub_row(hub, pool_offset, pool_size, burst_amp, 1);
  }
  for (std::size_t i = 0; i < gap_len[n_bursts]; ++i) emit.background_row();

  return log;
}

double degree_tail_check(const ingest::TransactionLog& log) {
  if (log.records.size() < 1000)
    throw Error(ErrorCode::too_few_rows,
                "degree_tail_check needs at least 1000 rows");
  std::map<std::string, std::size_t> degree;
  for (const auto& rec : log.records) {
    degree[rec.recv_addr] += 1;
    degree[rec.counterparty_addr] += 1;
  }
  std::vector<double> degrees;
  degrees.reserve(degree.size());
  for (const auto& [addr, d] : degree) degrees.push_back(static_cast<double>(d));
  std::sort(degrees.begin(), degrees.end(), std::greater<>());

  const auto top = std::max<std::size_t>(2, degrees.size() / 10);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t r = 0; r < top; ++r) {
    const double x = std::log(static_cast<double>(r + 1));
    const double y = std::log(degrees[r]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(top);
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0)
    throw Error(ErrorCode::too_few_rows, "degenerate rank range");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace leadwarn::synth
