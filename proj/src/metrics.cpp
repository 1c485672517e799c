#include "swarmsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace swarmsim::metrics {

const char* to_string(RecordKind k) {
  switch (k) {
    case RecordKind::QueueSample: return "queue_sample";
    case RecordKind::OffloadRequested: return "offload_requested";
    case RecordKind::TargetFound: return "target_found";
    case RecordKind::RequestLost: return "request_lost";
    case RecordKind::ResultReturned: return "result_returned";
    case RecordKind::MessageSent: return "message_sent";
  }
  return "?";
}

void Ledger::queue_sample(std::int64_t t_ms, NodeId node, int occupation) {
  records_.push_back({RecordKind::QueueSample, t_ms, node, -1, occupation});
}
void Ledger::offload_requested(std::int64_t t_ms, std::int64_t req, NodeId origin) {
  records_.push_back({RecordKind::OffloadRequested, t_ms, origin, req, 0});
}
void Ledger::target_found(std::int64_t t_ms, std::int64_t req, int hops) {
  records_.push_back({RecordKind::TargetFound, t_ms, kNoNode, req, hops});
}
void Ledger::request_lost(std::int64_t t_ms, std::int64_t req) {
  records_.push_back({RecordKind::RequestLost, t_ms, kNoNode, req, 0});
}
void Ledger::result_returned(std::int64_t t_ms, std::int64_t req) {
  records_.push_back({RecordKind::ResultReturned, t_ms, kNoNode, req, 0});
}
void Ledger::message_sent(std::int64_t t_ms, std::int64_t req) {
  records_.push_back({RecordKind::MessageSent, t_ms, kNoNode, req, 0});
}

std::string Ledger::serialize() const {
  std::ostringstream out;
  for (const Record& r : records_) {
    out << to_string(r.kind) << ' ' << r.t_ms << ' ' << r.node << ' ' << r.req
        << ' ' << r.value << '\n';
  }
  return out.str();
}

Summary compute_summary(const Ledger& ledger) {
  Summary s;
  double occupation_sum = 0.0;
  std::map<std::int64_t, std::int64_t> requested_at;
  double st_sum = 0.0;
  std::int64_t st_count = 0;
  double hops_sum = 0.0;

  for (const Record& r : ledger.records()) {
    switch (r.kind) {
      case RecordKind::QueueSample:
        occupation_sum += r.value;
        ++s.samples;
        break;
      case RecordKind::OffloadRequested:
        requested_at[r.req] = r.t_ms;
        ++s.requests;
        break;
      case RecordKind::TargetFound:
        ++s.hits;
        hops_sum += r.value;
        break;
      case RecordKind::RequestLost:
        ++s.misses;
        break;
      case RecordKind::ResultReturned: {
        ++s.returned;
        auto it = requested_at.find(r.req);
        if (it != requested_at.end()) {
          st_sum += static_cast<double>(r.t_ms - it->second) / 1000.0;
          ++st_count;
        }
        break;
      }
      case RecordKind::MessageSent:
        ++s.am;
        if (r.req >= 0) ++s.am_attributed;
        break;
    }
  }

  s.ld = s.samples > 0 ? occupation_sum / static_cast<double>(s.samples) : 0.0;
  if (st_count > 0) s.st = st_sum / static_cast<double>(st_count);
  if (s.hits > 0) s.hph = hops_sum / static_cast<double>(s.hits);
  if (s.requests > 0) {
    s.mpr = static_cast<double>(s.am_attributed) / static_cast<double>(s.requests);
    s.hmr = 100.0 * static_cast<double>(s.hits) /
            static_cast<double>(s.hits + s.misses);
    s.gr = 100.0 * static_cast<double>(s.returned) / static_cast<double>(s.requests);
  }
  return s;
}

std::map<std::string, std::vector<SeriesPoint>> export_timeseries(const Ledger& ledger,
                                                                  double bucket_seconds) {
  if (bucket_seconds <= 0.0) throw std::invalid_argument("bucket_seconds must be > 0");
  const double bucket_ms = bucket_seconds * 1000.0;
  auto bucket_of = [bucket_ms](std::int64_t t_ms) {
    return static_cast<std::int64_t>(std::floor(static_cast<double>(t_ms) / bucket_ms));
  };

  struct BucketAcc {
    double sum = 0.0;
    std::int64_t count = 0;
  };
  std::map<std::int64_t, BucketAcc> ld;
  std::map<std::int64_t, std::int64_t> am;
  std::map<std::int64_t, BucketAcc> hph;
  std::map<std::int64_t, BucketAcc> st;
  struct ReqBucket {
    std::int64_t requests = 0, hits = 0, misses = 0, returned = 0, messages = 0;
  };
  std::map<std::int64_t, ReqBucket> byreq;
  // request id -> (creation bucket, creation time)
  std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> req_info;

  for (const auto& r : ledger.records()) {
    const std::int64_t b = bucket_of(r.t_ms);
    switch (r.kind) {
      case RecordKind::QueueSample: {
        auto& acc = ld[b];
        acc.sum += r.value;
        ++acc.count;
        break;
      }
      case RecordKind::OffloadRequested:
        req_info[r.req] = {b, r.t_ms};
        ++byreq[b].requests;
        break;
      case RecordKind::TargetFound: {
        auto it = req_info.find(r.req);
        if (it != req_info.end()) {
          ++byreq[it->second.first].hits;
          auto& acc = hph[it->second.first];
          acc.sum += r.value;
          ++acc.count;
        }
        break;
      }
      case RecordKind::RequestLost: {
        auto it = req_info.find(r.req);
        if (it != req_info.end()) ++byreq[it->second.first].misses;
        break;
      }
      case RecordKind::ResultReturned: {
        auto it = req_info.find(r.req);
        if (it != req_info.end()) {
          ++byreq[it->second.first].returned;
          auto& acc = st[it->second.first];
          acc.sum += static_cast<double>(r.t_ms - it->second.second) / 1000.0;
          ++acc.count;
        }
        break;
      }
      case RecordKind::MessageSent: {
        ++am[b];
        if (r.req >= 0) {
          auto it = req_info.find(r.req);
          if (it != req_info.end()) ++byreq[it->second.first].messages;
        }
        break;
      }
    }
  }

  std::map<std::string, std::vector<SeriesPoint>> out;
  auto start_of = [bucket_seconds](std::int64_t b) {
    return static_cast<double>(b) * bucket_seconds;
  };

  // Dense series from bucket 0 for sampled/counted metrics.
  if (!ld.empty()) {
    auto& v = out["ld"];
    const std::int64_t last = ld.rbegin()->first;
    for (std::int64_t b = 0; b <= last; ++b) {
      auto it = ld.find(b);
      const double value =
          it != ld.end() && it->second.count > 0 ? it->second.sum / it->second.count : 0.0;
      v.push_back({start_of(b), value});
    }
  } else {
    out["ld"];
  }
  if (!am.empty()) {
    auto& v = out["am"];
    const std::int64_t last = am.rbegin()->first;
    for (std::int64_t b = 0; b <= last; ++b) {
      auto it = am.find(b);
      v.push_back({start_of(b), it != am.end() ? static_cast<double>(it->second) : 0.0});
    }
  } else {
    out["am"];
  }

  auto put_acc = [&](const char* name, const std::map<std::int64_t, BucketAcc>& src) {
    auto& v = out[name];
    for (const auto& [b, acc] : src) {
      if (acc.count > 0) v.push_back({start_of(b), acc.sum / acc.count});
    }
  };
  put_acc("hph", hph);
  put_acc("st", st);

  auto& mpr = out["mpr"];
  auto& hmr = out["hmr"];
  auto& gr = out["gr"];
  for (const auto& [b, rb] : byreq) {
    if (rb.requests <= 0) continue;
    mpr.push_back({start_of(b), static_cast<double>(rb.messages) / rb.requests});
    if (rb.hits + rb.misses > 0) {
      hmr.push_back({start_of(b), 100.0 * rb.hits / static_cast<double>(rb.hits + rb.misses)});
    }
    gr.push_back({start_of(b), 100.0 * rb.returned / static_cast<double>(rb.requests)});
  }
  return out;
}

}  // namespace swarmsim::metrics
