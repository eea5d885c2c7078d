#pragma once

#include <vector>

namespace edm {

struct SpikeRecord {
  double t = 0.0;  // ms
  int agent = 0;

  bool operator==(const SpikeRecord&) const = default;
};

/// Population summary taken every snapshot_stride steps.
struct Snapshot {
  double t = 0.0;
  double mean_v = 0.0;
  double mean_activity = 0.0;
  double sigma_global = 0.0;
  int min_deg = 0;
  int max_deg = 0;
  std::vector<int> degree_histogram{};  // count of agents per out-degree 0..K

  bool operator==(const Snapshot&) const = default;
};

}  // namespace edm
