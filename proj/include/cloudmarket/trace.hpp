#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cloudmarket/time.hpp"

namespace cloudmarket {

// One line of the run trace. Records are appended in dispatch order, so the
// time column is non-decreasing by construction.
struct TraceRecord {
    SimTime time;
    std::string entity;
    std::string event;
    std::vector<std::pair<std::string, std::string>> details;
};

class TraceLog {
public:
    void emit(SimTime time, std::string entity, std::string event,
              std::vector<std::pair<std::string, std::string>> details);

    const std::vector<TraceRecord>& records() const { return records_; }

    // CSV with header time_us,entity,event,details; details joined as k=v;k=v.
    std::string to_csv() const;

private:
    std::vector<TraceRecord> records_;
};

}  // namespace cloudmarket
