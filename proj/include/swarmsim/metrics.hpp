#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swarmsim/types.hpp"

namespace swarmsim::metrics {

enum class RecordKind : std::uint8_t {
  QueueSample,       // node, value = occupation
  OffloadRequested,  // req, node = origin
  TargetFound,       // req, value = hops
  RequestLost,       // req
  ResultReturned,    // req
  MessageSent,       // req (-1 when unattributed control traffic)
};

const char* to_string(RecordKind k);

struct Record {
  RecordKind kind{};
  std::int64_t t_ms = 0;
  NodeId node = kNoNode;
  std::int64_t req = -1;
  std::int32_t value = 0;
};

/// Append-only run log. Every reported metric derives from these records and
/// nothing else, so two runs with equal ledgers are equal runs.
class Ledger {
 public:
  void queue_sample(std::int64_t t_ms, NodeId node, int occupation);
  void offload_requested(std::int64_t t_ms, std::int64_t req, NodeId origin);
  void target_found(std::int64_t t_ms, std::int64_t req, int hops);
  void request_lost(std::int64_t t_ms, std::int64_t req);
  void result_returned(std::int64_t t_ms, std::int64_t req);
  void message_sent(std::int64_t t_ms, std::int64_t req);

  const std::vector<Record>& records() const { return records_; }

  /// Canonical byte form, one line per record; the determinism check
  /// compares these strings across runs.
  std::string serialize() const;

 private:
  std::vector<Record> records_;
};

/// The seven summary metrics. Ratio metrics are absent (not NaN) when the
/// run produced no offload requests; HPH and ST additionally require at
/// least one hit / one completed round trip.
struct Summary {
  double ld = 0.0;
  std::optional<double> st;   // seconds
  std::optional<double> hph;
  std::int64_t am = 0;
  std::optional<double> mpr;
  std::optional<double> hmr;  // percent
  std::optional<double> gr;   // percent

  // raw counts, exported separately for transparency
  std::int64_t requests = 0;
  std::int64_t hits = 0;
  std::int64_t misses = 0;
  std::int64_t returned = 0;
  std::int64_t am_attributed = 0;
  std::int64_t samples = 0;
};

Summary compute_summary(const Ledger& ledger);

struct SeriesPoint {
  double t_s = 0.0;  // bucket start
  double value = 0.0;
};

/// Time-resolved views. LD and AM cover every bucket from zero up to their
/// last datum; the ratio metrics list only buckets that have data. MPR
/// buckets messages by the owning request's creation time, so its
/// request-weighted mean equals the summary value.
std::map<std::string, std::vector<SeriesPoint>> export_timeseries(const Ledger& ledger,
                                                                  double bucket_seconds);

}  // namespace swarmsim::metrics
