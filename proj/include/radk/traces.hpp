// Time-series store shared by the model and the scenario generator.
#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace radk {

// Named per-step series (capacity factors, load shapes, flexible-demand
// baselines). Calendar alignment is implicit: step i belongs to day
// i / steps_per_day, so day-block bootstrapping applies the same day
// indices to every series in the store.
class TraceStore {
 public:
  void put(const std::string& id, std::vector<double> series) {
    for (double v : series) {
      if (!std::isfinite(v))
        throw std::invalid_argument("trace '" + id + "' has non-finite value");
    }
    series_[id] = std::move(series);
  }

  bool has(const std::string& id) const { return series_.count(id) > 0; }

  const std::vector<double>& get(const std::string& id) const {
    auto it = series_.find(id);
    if (it == series_.end())
      throw std::out_of_range("trace '" + id + "' not found");
    return it->second;
  }

  std::size_t length(const std::string& id) const { return get(id).size(); }

  const std::map<std::string, std::vector<double>>& all() const {
    return series_;
  }

 private:
  std::map<std::string, std::vector<double>> series_;
};

}  // namespace radk
